//! Axis-aligned box lattices used by the grid density and the grid solver.

use crate::error::{Error, Result};

/// Uniform node lattice over an axis-aligned box.
///
/// Nodes sit at `origin + h * index` per axis; `dims` counts nodes (not
/// cells). The outermost node layer is the Dirichlet boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct GridGeom {
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub dims: Vec<usize>,
    strides: Vec<usize>,
}

impl GridGeom {
    pub fn new(origin: Vec<f64>, spacing: f64, dims: Vec<usize>) -> Result<Self> {
        if origin.len() != dims.len() {
            return Err(Error::Geometry(format!(
                "origin has {} coordinates but dims has {}",
                origin.len(),
                dims.len()
            )));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::Geometry(format!("spacing must be positive, got {spacing}")));
        }
        if dims.iter().any(|&n| n < 3) {
            return Err(Error::Geometry(
                "need at least 3 nodes per axis (one interior layer)".into(),
            ));
        }
        let mut strides = vec![0usize; dims.len()];
        let mut s = 1usize;
        for d in (0..dims.len()).rev() {
            strides[d] = s;
            s *= dims[d];
        }
        Ok(GridGeom {
            origin,
            spacing,
            dims,
            strides,
        })
    }

    /// Cube of side `2 * half_width` centered at the origin with `cells` cells per axis.
    pub fn centered_cube(dim: usize, half_width: f64, cells: usize) -> Result<Self> {
        let spacing = 2.0 * half_width / cells as f64;
        GridGeom::new(vec![-half_width; dim], spacing, vec![cells + 1; dim])
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn node_count(&self) -> usize {
        self.dims.iter().product()
    }

    /// Count of cells (each cell has a base node with all indices < dims-1).
    pub fn cell_count(&self) -> usize {
        self.dims.iter().map(|&n| n - 1).product()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.ndim()];
        for d in 0..self.ndim() {
            idx[d] = flat / self.strides[d];
            flat %= self.strides[d];
        }
        idx
    }

    pub fn node_position(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(d, &i)| self.origin[d] + self.spacing * i as f64)
            .collect()
    }

    pub fn is_boundary(&self, idx: &[usize]) -> bool {
        idx.iter()
            .zip(&self.dims)
            .any(|(&i, &n)| i == 0 || i == n - 1)
    }

    pub fn upper_corner(&self) -> Vec<f64> {
        self.dims
            .iter()
            .enumerate()
            .map(|(d, &n)| self.origin[d] + self.spacing * (n - 1) as f64)
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let hi = self.upper_corner();
        x.iter()
            .enumerate()
            .all(|(d, &v)| v >= self.origin[d] && v <= hi[d])
    }

    /// Base node of all cells, flattened.
    pub fn cell_base_indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.cell_count());
        let mut idx = vec![0usize; self.ndim()];
        loop {
            out.push(self.flat_index(&idx));
            // odometer over indices < dims-1
            let mut d = self.ndim();
            loop {
                if d == 0 {
                    return out;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < self.dims[d] - 1 {
                    break;
                }
                idx[d] = 0;
            }
        }
    }

    /// Geometric agreement with another lattice (same box, spacing, dims).
    pub fn matches(&self, other: &GridGeom) -> bool {
        self.dims == other.dims
            && (self.spacing - other.spacing).abs() <= 1e-12 * self.spacing
            && self
                .origin
                .iter()
                .zip(&other.origin)
                .all(|(a, b)| (a - b).abs() <= 1e-9 * (1.0 + a.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trip() {
        let g = GridGeom::new(vec![0.0, 0.0, 0.0], 0.5, vec![4, 5, 6]).unwrap();
        assert_eq!(g.node_count(), 120);
        assert_eq!(g.cell_count(), 3 * 4 * 5);
        for flat in [0usize, 17, 63, 119] {
            assert_eq!(g.flat_index(&g.multi_index(flat)), flat);
        }
    }

    #[test]
    fn centered_cube_geometry() {
        let g = GridGeom::centered_cube(3, 8.0, 64).unwrap();
        assert_eq!(g.dims, vec![65, 65, 65]);
        assert_eq!(g.spacing, 0.25);
        assert_eq!(g.upper_corner(), vec![8.0, 8.0, 8.0]);
        assert!(g.contains(&[0.0, 0.0, 0.0]));
        assert!(!g.contains(&[8.1, 0.0, 0.0]));
    }

    #[test]
    fn boundary_detection() {
        let g = GridGeom::new(vec![0.0, 0.0, 0.0], 1.0, vec![3, 3, 3]).unwrap();
        assert!(g.is_boundary(&[0, 1, 1]));
        assert!(!g.is_boundary(&[1, 1, 1]));
    }
}
