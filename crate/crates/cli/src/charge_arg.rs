//! One-line charge descriptions:
//!
//!   delta:x,y,z:a            point charge (join several with ';')
//!   uniform-ball:R:density   constant density on the ball of radius R
//!   radial-file:path         CSV with columns r,rho
//!   grid-file:path           base path of a .json/.f64 density pair

use crate::gridio;
use crate::table::Table;
use bil_core::charge::{ChargeSpec, PointCharge, PointSet, RadialDensity};
use std::path::Path;

pub fn parse_charge(spec: &str, dim: usize) -> Result<ChargeSpec, String> {
    if spec.starts_with("delta:") {
        let mut charges = Vec::new();
        for term in spec.split(';') {
            let rest = term
                .strip_prefix("delta:")
                .ok_or_else(|| format!("expected another delta term, got '{term}'"))?;
            let (coords, a) = rest
                .rsplit_once(':')
                .ok_or_else(|| format!("delta needs 'coords:intensity', got '{rest}'"))?;
            let position: Result<Vec<f64>, String> = coords
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|e| e.to_string()))
                .collect();
            let intensity = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
            charges.push(PointCharge {
                position: position?,
                intensity,
            });
        }
        let dim = charges[0].position.len();
        let points = PointSet::new(dim, charges).map_err(|e| e.to_string())?;
        Ok(ChargeSpec::PointCharges(points))
    } else if let Some(rest) = spec.strip_prefix("uniform-ball:") {
        let (radius, density) = rest
            .split_once(':')
            .ok_or("uniform-ball needs 'R:density'")?;
        let radius: f64 = radius.trim().parse().map_err(|e| format!("radius: {e}"))?;
        let density: f64 = density.trim().parse().map_err(|e| format!("density: {e}"))?;
        Ok(ChargeSpec::RadialProfile(
            RadialDensity::uniform_ball(dim, radius, density).map_err(|e| e.to_string())?,
        ))
    } else if let Some(path) = spec.strip_prefix("radial-file:") {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
        let table = Table::from_csv(&text)?;
        let r_idx = table
            .columns
            .iter()
            .position(|c| c == "r")
            .ok_or("radial file needs an 'r' column")?;
        let rho_idx = table
            .columns
            .iter()
            .position(|c| c == "rho")
            .ok_or("radial file needs a 'rho' column")?;
        let grid: Vec<f64> = table.rows.iter().map(|row| row[r_idx]).collect();
        let values: Vec<f64> = table.rows.iter().map(|row| row[rho_idx]).collect();
        Ok(ChargeSpec::RadialProfile(
            RadialDensity::new(dim, grid, values).map_err(|e| e.to_string())?,
        ))
    } else if let Some(path) = spec.strip_prefix("grid-file:") {
        let sample = gridio::read_density(Path::new(path))?;
        Ok(ChargeSpec::GridDensity(sample))
    } else {
        Err(format!(
            "unknown charge description '{spec}' (expected delta:, uniform-ball:, radial-file: or grid-file:)"
        ))
    }
}

/// Comma-separated list of positive integers (cascade orders).
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|tok| tok.trim().parse::<usize>().map_err(|e| e.to_string()))
        .collect()
}

/// Comma-separated list of floats (mollification widths).
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|tok| tok.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_single_and_pair() {
        let one = parse_charge("delta:0,0,0:12.57", 3).unwrap();
        match one {
            ChargeSpec::PointCharges(p) => {
                assert_eq!(p.charges.len(), 1);
                assert_eq!(p.charges[0].intensity, 12.57);
            }
            _ => panic!("expected point charges"),
        }
        let two = parse_charge("delta:-1,0,0:2.0;delta:1,0,0:2.0", 3).unwrap();
        match two {
            ChargeSpec::PointCharges(p) => assert_eq!(p.charges.len(), 2),
            _ => panic!("expected point charges"),
        }
    }

    #[test]
    fn ball_and_errors() {
        assert!(matches!(
            parse_charge("uniform-ball:1.0:1.0", 3),
            Ok(ChargeSpec::RadialProfile(_))
        ));
        assert!(parse_charge("uniform-ball:1.0", 3).is_err());
        assert!(parse_charge("nonsense", 3).is_err());
        assert!(parse_charge("delta:0,0,0:0.0", 3).is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_usize_list("1,2,4").unwrap(), vec![1, 2, 4]);
        assert_eq!(parse_f64_list("0.4, 0.2").unwrap(), vec![0.4, 0.2]);
        assert!(parse_usize_list("1,x").is_err());
    }
}
