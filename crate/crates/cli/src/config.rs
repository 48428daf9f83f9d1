//! Plain key-value configuration files: `key = value` lines, `#` comments.

use std::collections::HashMap;
use std::path::Path;

#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: HashMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected 'key = value'", lineno + 1))?;
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Config { entries })
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Config::parse(&text)
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, String> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|e| format!("config key '{key}': {e}")),
        }
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>, String> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|e| format!("config key '{key}': {e}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_comments_and_blanks() {
        let cfg = Config::parse(
            "# solver settings\nrmax = 1000.0\n\nnodes = 2048  # default\nname = run-a\n",
        )
        .unwrap();
        assert_eq!(cfg.get_f64("rmax").unwrap(), Some(1000.0));
        assert_eq!(cfg.get_usize("nodes").unwrap(), Some(2048));
        assert_eq!(cfg.get_f64("missing").unwrap(), None);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(Config::parse("just words\n").is_err());
        let cfg = Config::parse("nodes = abc\n").unwrap();
        assert!(cfg.get_usize("nodes").is_err());
    }
}
