//! Grid field files: a JSON header next to a flat little-endian f64 array.
//!
//! `{base}.json` holds dims, spacing, origin, the Lagrangian variant and the
//! element count; `{base}.f64` holds the node values in lattice order.

use bil_core::charge::GridSample;
use bil_core::geom::GridGeom;
use bil_core::lagrangian::LagrangianModel;
use bil_core::potential::GridPotential;
use std::path::{Path, PathBuf};

fn lagrangian_tag(model: &LagrangianModel) -> String {
    match model {
        LagrangianModel::Exact => "exact".into(),
        LagrangianModel::Series { coefficients } => format!("series:{}", coefficients.len()),
        LagrangianModel::Truncated { theta, power, .. } => {
            format!("truncated:{theta}:{power}")
        }
    }
}

pub fn header_path(base: &Path) -> PathBuf {
    base.with_extension("json")
}

pub fn data_path(base: &Path) -> PathBuf {
    base.with_extension("f64")
}

/// Write a solved potential (or any node field) as header + binary pair.
pub fn write_field(
    base: &Path,
    geom: &GridGeom,
    values: &[f64],
    model: Option<&LagrangianModel>,
    kind: &str,
) -> Result<(), String> {
    let dims = geom
        .dims
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    let origin = geom
        .origin
        .iter()
        .map(|v| crate::table::fmt_f64(*v))
        .collect::<Vec<_>>()
        .join(", ");
    let header = format!(
        "{{\n  \"kind\": \"{kind}\",\n  \"dims\": [{dims}],\n  \"spacing\": {},\n  \"origin\": [{origin}],\n  \"lagrangian\": \"{}\",\n  \"count\": {},\n  \"encoding\": \"f64-le\"\n}}\n",
        crate::table::fmt_f64(geom.spacing),
        model.map(lagrangian_tag).unwrap_or_else(|| "none".into()),
        values.len(),
    );
    std::fs::write(header_path(base), header).map_err(|e| e.to_string())?;
    let mut bytes = Vec::with_capacity(values.len() * 8);
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(data_path(base), bytes).map_err(|e| e.to_string())
}

pub fn write_potential(base: &Path, phi: &GridPotential) -> Result<(), String> {
    write_field(
        base,
        &phi.geom,
        &phi.values,
        Some(&phi.active_lagrangian),
        "potential",
    )
}

fn extract_array(header: &str, key: &str) -> Result<Vec<f64>, String> {
    let tag = format!("\"{key}\"");
    let at = header
        .find(&tag)
        .ok_or_else(|| format!("header missing {key}"))?;
    let open = header[at..]
        .find('[')
        .ok_or_else(|| format!("header {key}: no array"))?
        + at;
    let close = header[open..]
        .find(']')
        .ok_or_else(|| format!("header {key}: unterminated array"))?
        + open;
    header[open + 1..close]
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|e| format!("header {key}: {e}"))
        })
        .collect()
}

fn extract_scalar(header: &str, key: &str) -> Result<f64, String> {
    let tag = format!("\"{key}\"");
    let at = header
        .find(&tag)
        .ok_or_else(|| format!("header missing {key}"))?;
    let colon = header[at..]
        .find(':')
        .ok_or_else(|| format!("header {key}: no value"))?
        + at;
    let rest = header[colon + 1..]
        .trim_start()
        .split(|c: char| c == ',' || c == '\n' || c == '}')
        .next()
        .unwrap_or("");
    rest.trim()
        .parse::<f64>()
        .map_err(|e| format!("header {key}: {e}"))
}

/// Read a density field back as a grid sample.
pub fn read_density(base: &Path) -> Result<GridSample, String> {
    let header = std::fs::read_to_string(header_path(base))
        .map_err(|e| format!("cannot read {}: {e}", header_path(base).display()))?;
    let dims: Vec<usize> = extract_array(&header, "dims")?
        .into_iter()
        .map(|v| v as usize)
        .collect();
    let spacing = extract_scalar(&header, "spacing")?;
    let origin = extract_array(&header, "origin")?;
    let geom = GridGeom::new(origin, spacing, dims).map_err(|e| e.to_string())?;
    let bytes = std::fs::read(data_path(base))
        .map_err(|e| format!("cannot read {}: {e}", data_path(base).display()))?;
    if bytes.len() != geom.node_count() * 8 {
        return Err(format!(
            "{}: expected {} bytes, found {}",
            data_path(base).display(),
            geom.node_count() * 8,
            bytes.len()
        ));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    GridSample::new(geom, values).map_err(|e| e.to_string())
}
