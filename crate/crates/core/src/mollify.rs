//! Mollification of point charges and the convergence study of smoothed
//! solutions toward the point-charge minimizer.
//!
//! Normalization is discrete: the sampled kernel is rescaled so that the
//! exact integral of the emitted description (piecewise-linear profile or
//! lattice sum) reproduces the total intensity to machine precision. The
//! emitted density is therefore itself an admissible smooth charge whose
//! moment the radial solver integrates exactly.

use crate::charge::{ChargeSpec, GridSample, Kernel, PointSet, RadialDensity};
use crate::energy;
use crate::error::{Error, Result};
use crate::geom::GridGeom;
use crate::grid::{self, GridSolveParams};
use crate::lagrangian::LagrangianModel;

use crate::radial;

/// Where a mollified density should be materialized.
#[derive(Debug, Clone)]
pub enum MollifyTarget {
    /// Radial profile with the given sample count (all charges must sit at
    /// the origin).
    Radial { nodes: usize },
    /// Node samples on a lattice.
    Grid { geom: GridGeom },
}

/// Materialize the mollification of a point set as a concrete density.
pub fn mollify_charge(
    points: &PointSet,
    width: f64,
    kernel: Kernel,
    target: &MollifyTarget,
) -> Result<ChargeSpec> {
    if !(width > 0.0) {
        return Err(Error::Charge(format!(
            "mollification width must be positive, got {width}"
        )));
    }
    match target {
        MollifyTarget::Radial { nodes } => Ok(ChargeSpec::RadialProfile(
            radial_profile_from_points(points, width, kernel, *nodes)?,
        )),
        MollifyTarget::Grid { geom } => {
            let values = rasterize_points(points, width, kernel, geom)?;
            Ok(ChargeSpec::GridDensity(GridSample::new(
                geom.clone(),
                values,
            )?))
        }
    }
}

/// Radial profile of the mollified origin charge, rescaled so its exact
/// piecewise-linear moment carries the full intensity.
pub fn radial_profile_from_points(
    points: &PointSet,
    width: f64,
    kernel: Kernel,
    nodes: usize,
) -> Result<RadialDensity> {
    if !points.all_at_origin() {
        return Err(Error::Charge(
            "a radial mollification needs all charges at the origin".into(),
        ));
    }
    if nodes < 8 {
        return Err(Error::Charge("mollified profile needs at least 8 nodes".into()));
    }
    if !(width > 0.0) {
        return Err(Error::Charge(format!(
            "mollification width must be positive, got {width}"
        )));
    }
    let total = points.total_intensity();
    let reach = width * kernel.support_factor();
    let grid: Vec<f64> = (0..nodes)
        .map(|i| reach * i as f64 / (nodes - 1) as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&r| kernel.shape(r / width)).collect();
    let raw = RadialDensity::new(points.dim, grid, values)?;
    let mass = raw.total_charge();
    if mass <= 0.0 {
        return Err(Error::Charge("kernel sampling produced no mass".into()));
    }
    let scale = total / mass;
    RadialDensity::new(
        raw.dim,
        raw.grid,
        raw.values.into_iter().map(|v| v * scale).collect(),
    )
}

/// Node samples of the mollified point set on a lattice, one discretely
/// normalized kernel per charge so the cell sum carries the exact total.
pub fn rasterize_points(
    points: &PointSet,
    width: f64,
    kernel: Kernel,
    geom: &GridGeom,
) -> Result<Vec<f64>> {
    if !(width > 0.0) {
        return Err(Error::Charge(format!(
            "mollification width must be positive, got {width}"
        )));
    }
    let nd = geom.ndim();
    if points.dim != nd {
        return Err(Error::Geometry("point set and lattice dimensions differ".into()));
    }
    let cell = geom.spacing.powi(nd as i32);
    let mut values = vec![0.0; geom.node_count()];
    let mut stamp = vec![0.0; geom.node_count()];
    for c in &points.charges {
        if !geom.contains(&c.position) {
            return Err(Error::Geometry(format!(
                "charge at {:?} lies outside the box",
                c.position
            )));
        }
        stamp.iter_mut().for_each(|v| *v = 0.0);
        let mut mass = 0.0;
        for flat in 0..geom.node_count() {
            let x = geom.node_position(&geom.multi_index(flat));
            let dist = x
                .iter()
                .zip(&c.position)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let v = kernel.shape(dist / width);
            stamp[flat] = v;
            mass += v * cell;
        }
        if mass <= 0.0 {
            return Err(Error::Charge(format!(
                "width {width} is too small to register on spacing {}",
                geom.spacing
            )));
        }
        let scale = c.intensity / mass;
        for (out, s) in values.iter_mut().zip(&stamp) {
            *out += scale * s;
        }
    }
    Ok(values)
}

/// Dominating density for a family of mollifications: the widest one scaled
/// by the ratio of kernel sup-norms, which bounds every member pointwise.
pub fn dominating_profile(
    points: &PointSet,
    eps_max: f64,
    eps_min: f64,
    kernel: Kernel,
    nodes: usize,
) -> Result<RadialDensity> {
    if !(eps_min > 0.0 && eps_max >= eps_min) {
        return Err(Error::Charge("need 0 < eps_min <= eps_max".into()));
    }
    let base = radial_profile_from_points(points, eps_max, kernel, nodes)?;
    let scale = (eps_max / eps_min).powi(points.dim as i32);
    RadialDensity::new(
        base.dim,
        base.grid,
        base.values.into_iter().map(|v| v * scale).collect(),
    )
}

/// One row of a mollification convergence study.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub epsilon: f64,
    pub sup_distance: f64,
    pub max_grad_near_charge: f64,
    pub energy: f64,
}

/// Radial-path study: solve the mollified origin charge for each width and
/// compare against the exact point-charge solution on the same grid.
pub fn convergence_study_radial(
    points: &PointSet,
    eps_list: &[f64],
    kernel: Kernel,
) -> Result<Vec<ConvergenceRow>> {
    if !points.all_at_origin() {
        return Err(Error::Charge(
            "the radial study needs a single origin charge".into(),
        ));
    }
    let exact_charge = ChargeSpec::PointCharges(points.clone());
    let limit = radial::solve_radial(&exact_charge, &radial::default_r_grid(&exact_charge))?;
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let rho = ChargeSpec::mollified(points.clone(), eps, kernel)?;
        let phi = radial::solve_radial(&rho, &radial::default_r_grid(&rho))?;
        let sup_distance = phi
            .r_grid
            .iter()
            .map(|&r| (phi.value_at(r) - limit.value_at(r)).abs())
            .fold(0.0f64, f64::max);
        let max_grad_near_charge = phi
            .r_grid
            .iter()
            .zip(&phi.dphi)
            .filter(|(&r, _)| r >= eps && r <= 2.0 * eps)
            .fold(0.0f64, |a, (_, &u)| a.max(u.abs()));
        let energy = energy::energy_radial(&LagrangianModel::Exact, &rho, &phi)?;
        rows.push(ConvergenceRow {
            epsilon: eps,
            sup_distance,
            max_grad_near_charge,
            energy,
        });
    }
    Ok(rows)
}

/// Grid-path study: the finest width is the reference; distances of the
/// coarser solves are measured against it nodewise.
pub fn convergence_study_grid(
    points: &PointSet,
    eps_list: &[f64],
    kernel: Kernel,
    geom: &GridGeom,
    params: &GridSolveParams,
) -> Result<Vec<ConvergenceRow>> {
    if eps_list.len() < 2 {
        return Err(Error::Domain("the grid study needs at least two widths".into()));
    }
    let finest = eps_list
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let rho_ref = ChargeSpec::mollified(points.clone(), finest, kernel)?;
    let (phi_ref, _) = grid::solve_grid(&rho_ref, geom, params)?;
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let rho = ChargeSpec::mollified(points.clone(), eps, kernel)?;
        let (phi, report) = grid::solve_grid(&rho, geom, params)?;
        let sup_distance = phi
            .values
            .iter()
            .zip(&phi_ref.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let mut max_grad_near_charge = 0.0f64;
        let nd = geom.ndim();
        let mut g = vec![0.0; nd];
        for base in geom.cell_base_indices() {
            let x = geom.node_position(&geom.multi_index(base));
            let near = points.charges.iter().any(|c| {
                let d2: f64 = x
                    .iter()
                    .zip(&c.position)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                d2 <= (2.0 * eps + geom.spacing) * (2.0 * eps + geom.spacing)
            });
            if near {
                phi.cell_gradient(base, &mut g);
                let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                max_grad_near_charge = max_grad_near_charge.max(norm);
            }
        }
        rows.push(ConvergenceRow {
            epsilon: eps,
            sup_distance,
            max_grad_near_charge,
            energy: report.energy,
        });
    }
    Ok(rows)
}
