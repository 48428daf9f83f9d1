//! Exact solver for radially distributed charges via the first integral of
//! the radial flux: phi'(R) R^{N-1} / sqrt(1 - phi'(R)^2) = -m(R), where
//! m(R) is the cumulative charge moment. The relation inverts pointwise to
//!
//!   phi'(R) = -m(R) / sqrt(m(R)^2 + R^{2(N-1)}),
//!
//! so the potential reduces to quadrature of a known slope plus an analytic
//! power-law tail. Point charges at the origin (BIons) enter through the
//! constant a / omega_N in m.

use crate::charge::{ChargeSpec, RadialDensity};
use crate::error::{Error, Result};
use crate::mollify;
use crate::potential::RadialPotential;
use crate::quad::{geometric_grid, gl8, merge_grids, unit_sphere_measure};

/// Default node count of the geometric solver grid.
pub const DEFAULT_RADIAL_NODES: usize = 2048;
/// Default inner radius of the solver grid, relative to the support scale.
pub const DEFAULT_RMIN_FACTOR: f64 = 1e-6;
/// Default outer radius of the solver grid, relative to the support scale.
pub const DEFAULT_RMAX_FACTOR: f64 = 1e3;

/// Flux-form identities lose all significant digits as |phi'| -> 1; they are
/// only evaluated on nodes with 1 - phi'^2 at or above this floor, where the
/// f64 rounding of phi' perturbs the flux by less than ~1e-13 per unit
/// moment.
pub const FLUX_CONDITION_FLOOR: f64 = 1e-3;

/// Cumulative charge moment m(R) = a0/omega_N [R > 0] + int_0^R rho r^{N-1} dr.
///
/// Evaluable at any radius, exactly for the piecewise-linear density model.
#[derive(Debug, Clone)]
pub struct CumulativeMoment {
    pub dim: usize,
    pub r_grid: Vec<f64>,
    pub m: Vec<f64>,
    pub m_infinity: f64,
    origin_term: f64,
    profile: Option<RadialDensity>,
    /// cumulative profile moment at the profile's own breakpoints
    profile_cum: Vec<f64>,
}

impl CumulativeMoment {
    /// m(r) at an arbitrary radius.
    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let mut m = self.origin_term;
        if let Some(p) = &self.profile {
            let end = p.support_end();
            if r >= end {
                m += self.profile_cum[self.profile_cum.len() - 1];
            } else if r <= p.grid[0] {
                m += p.moment_integral(0.0, r);
            } else {
                let j = match p.grid.binary_search_by(|g| g.partial_cmp(&r).unwrap()) {
                    Ok(j) => j,
                    Err(j) => j - 1,
                };
                m += self.profile_cum[j] + p.moment_integral(p.grid[j], r);
            }
        }
        m
    }

    /// Largest |m| over the sampled grid (m is piecewise monotone between
    /// sign changes of rho, so node samples bound it well).
    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
    }

    /// Guaranteed spacelike margin at radii >= r0: every solved slope there
    /// satisfies |phi'| <= 1 - margin.
    pub fn spacelike_margin(&self, r0: f64) -> f64 {
        assert!(r0 > 0.0);
        let m_max = self.max_abs();
        if m_max == 0.0 {
            return 1.0;
        }
        let rp = r0.powi(self.dim as i32 - 1);
        1.0 - m_max / f64::hypot(m_max, rp)
    }
}

fn validate_radial_charge(rho: &ChargeSpec) -> Result<(f64, Option<RadialDensity>)> {
    match rho {
        ChargeSpec::RadialProfile(p) => Ok((0.0, Some(p.clone()))),
        ChargeSpec::PointCharges(points) => {
            if !points.all_at_origin() {
                return Err(Error::Charge(
                    "off-origin point charges are not radial; use the grid solver".into(),
                ));
            }
            let omega = unit_sphere_measure(points.dim);
            Ok((points.total_intensity() / omega, None))
        }
        ChargeSpec::MollifiedPoints { base, width, kernel } => {
            if !base.all_at_origin() {
                return Err(Error::Charge(
                    "off-origin mollified charges are not radial; use the grid solver".into(),
                ));
            }
            let profile = mollify::radial_profile_from_points(base, *width, *kernel, 1025)?;
            Ok((0.0, Some(profile)))
        }
        ChargeSpec::GridDensity(_) => Err(Error::Charge(
            "grid densities have no radial profile; use the grid solver".into(),
        )),
    }
}

/// Cumulative moment of a radial charge on the given grid.
pub fn cumulative_moment(rho: &ChargeSpec, r_grid: &[f64]) -> Result<CumulativeMoment> {
    if r_grid.len() < 2 || r_grid.windows(2).any(|w| w[1] <= w[0]) || r_grid[0] < 0.0 {
        return Err(Error::Domain(
            "radial grid must be nonnegative and strictly ascending".into(),
        ));
    }
    let (origin_term, profile) = validate_radial_charge(rho)?;
    if let Some(p) = &profile {
        if p.support_end() > r_grid[r_grid.len() - 1] * (1.0 + 1e-12) {
            return Err(Error::Domain(
                "radial grid must cover the charge support".into(),
            ));
        }
    }
    let dim = rho.dim();
    let profile_cum = match &profile {
        Some(p) => {
            let mut cum = Vec::with_capacity(p.grid.len());
            let mut acc = p.moment_integral(0.0, p.grid[0]);
            cum.push(acc);
            for j in 0..p.grid.len() - 1 {
                acc += p.moment_integral(p.grid[j], p.grid[j + 1]);
                cum.push(acc);
            }
            cum
        }
        None => Vec::new(),
    };
    let mut mom = CumulativeMoment {
        dim,
        r_grid: r_grid.to_vec(),
        m: Vec::new(),
        m_infinity: 0.0,
        origin_term,
        profile,
        profile_cum,
    };
    mom.m = r_grid.iter().map(|&r| mom.eval(r)).collect();
    mom.m_infinity = origin_term
        + mom
            .profile_cum
            .last()
            .copied()
            .unwrap_or(0.0);
    Ok(mom)
}

/// Slope samples from a cumulative moment, plus the light-cone flag when the
/// origin carries a point charge (|phi'| -> 1 there).
#[derive(Debug, Clone)]
pub struct SlopeSamples {
    pub dphi: Vec<f64>,
    pub origin_saturated: bool,
}

fn slope_value(m: f64, r: f64, dim: usize, origin_term: f64) -> f64 {
    if r <= 0.0 {
        return if origin_term != 0.0 {
            -origin_term.signum()
        } else {
            0.0
        };
    }
    if m == 0.0 {
        return 0.0;
    }
    let rp = r.powi(dim as i32 - 1);
    -m / f64::hypot(m, rp)
}

/// Pointwise inversion of the first integral on the moment's grid.
pub fn slope_from_moment(mom: &CumulativeMoment) -> SlopeSamples {
    let dphi = mom
        .r_grid
        .iter()
        .zip(&mom.m)
        .map(|(&r, &m)| slope_value(m, r, mom.dim, mom.origin_term))
        .collect();
    SlopeSamples {
        dphi,
        origin_saturated: mom.r_grid[0] == 0.0 && mom.origin_term != 0.0,
    }
}

/// Exact-model potential tail from a constant far moment:
/// int_R^inf m / sqrt(m^2 + s^{2(N-1)}) ds expanded to second order.
fn exact_tail(m: f64, dim: usize, r: f64) -> (f64, f64) {
    let n = dim as f64;
    let lead = m / ((n - 2.0) * r.powf(n - 2.0));
    let cubic_coeff = m.powi(3) / (2.0 * (3.0 * n - 4.0));
    (lead - cubic_coeff * r.powf(4.0 - 3.0 * n), cubic_coeff)
}

/// Grid used by [`solve_radial`] and the approximation solvers when the
/// caller has no preference: geometric spacing sized to the charge support,
/// refined by the density breakpoints, starting at r = 0.
pub fn default_r_grid(rho: &ChargeSpec) -> Vec<f64> {
    let scale = rho.support_scale();
    let base = geometric_grid(
        DEFAULT_RMIN_FACTOR * scale,
        DEFAULT_RMAX_FACTOR * scale,
        DEFAULT_RADIAL_NODES,
    );
    let mut extra = vec![0.0];
    match rho {
        ChargeSpec::RadialProfile(p) => extra.extend_from_slice(&p.grid),
        ChargeSpec::MollifiedPoints { width, kernel, .. } => {
            extra.push(width * kernel.support_factor());
        }
        _ => {}
    }
    merge_grids(&base, &extra)
}

/// Solve the radial problem on the given grid.
///
/// The returned grid starts at 0 and refines the requested one by the
/// density's breakpoints, so every quadrature panel sees a smooth integrand.
pub fn solve_radial(rho: &ChargeSpec, r_grid: &[f64]) -> Result<RadialPotential> {
    let mut grid: Vec<f64> = vec![0.0];
    if let ChargeSpec::RadialProfile(p) = rho {
        grid.extend_from_slice(&p.grid);
    }
    let grid = merge_grids(r_grid, &grid);
    let mom = cumulative_moment(rho, &grid)?;
    let slopes = slope_from_moment(&mom);
    let dim = mom.dim;
    let origin_term = mom.origin_term;
    let slope_fn = |s: f64| slope_value(mom.eval(s), s, dim, origin_term);

    let n = grid.len();
    let mut phi = vec![0.0; n];
    let rmax = grid[n - 1];
    let (tail, tail_cubic) = exact_tail(mom.m_infinity, dim, rmax);
    phi[n - 1] = tail;
    for i in (0..n - 1).rev() {
        let drop = gl8(|s| -slope_fn(s), grid[i], grid[i + 1]);
        phi[i] = phi[i + 1] + drop;
    }

    RadialPotential::new(
        dim,
        grid,
        phi,
        slopes.dphi,
        mom.m_infinity,
        tail_cubic,
        slopes.origin_saturated,
    )
}

/// Residuals of the identity phi' r^{N-1} / sqrt(1 - phi'^2) + m = 0 over
/// the positive grid nodes.
#[derive(Debug, Clone, Copy)]
pub struct FirstIntegralResidual {
    /// Sup of |phi' + m / sqrt(m^2 + r^{2(N-1)})|, evaluable at every node.
    pub inverted_form: f64,
    /// Sup of |phi' r^{N-1} / sqrt(1 - phi'^2) + m| over nodes with
    /// 1 - phi'^2 >= [`FLUX_CONDITION_FLOOR`].
    pub flux_form: f64,
}

/// First-integral residual of a solved potential against a moment.
pub fn first_integral_residual(
    phi: &RadialPotential,
    mom: &CumulativeMoment,
) -> FirstIntegralResidual {
    let mut inverted = 0.0f64;
    let mut flux = 0.0f64;
    for (i, &r) in phi.r_grid.iter().enumerate() {
        if r <= 0.0 {
            continue;
        }
        let u = phi.dphi[i];
        let m = mom.eval(r);
        let rp = r.powi(phi.dim as i32 - 1);
        let target = if m == 0.0 { 0.0 } else { -m / f64::hypot(m, rp) };
        inverted = inverted.max((u - target).abs());
        let w = 1.0 - u * u;
        if w >= FLUX_CONDITION_FLOOR {
            flux = flux.max((u * rp / w.sqrt() + m).abs());
        }
    }
    FirstIntegralResidual {
        inverted_form: inverted,
        flux_form: flux,
    }
}

/// How the solution behaves at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OriginClass {
    /// phi'(0+) -> 0; the potential is C1 through the origin.
    RegularC1,
    /// |phi'(0+)| -> 1; light-cone saturation (point charge).
    LightCone,
    /// phi'(0+) tends to a value strictly between 0 and 1.
    Intermediate,
}

/// Band-wise slope diagnostics of a solved radial potential.
#[derive(Debug, Clone)]
pub struct RegularityReport {
    /// phi'(0+) extrapolated from the innermost positive nodes.
    pub slope_at_origin: f64,
    pub origin_class: OriginClass,
    /// Dyadic bands (r_lo, r_hi, sup |phi'| over the band).
    pub bands: Vec<(f64, f64, f64)>,
    /// Largest sigma with rho in L^sigma near the origin, estimated from the
    /// profile's small-r power behavior; infinite for bounded densities,
    /// absent for point charges.
    pub integrability_exponent: Option<f64>,
    /// Whether that exponent predicts C1 regularity at the origin
    /// (sigma >= N).
    pub predicts_c1_origin: Option<bool>,
}

/// Regularity diagnostics: origin slope extrapolation, dyadic spacelike
/// bands, and the integrability class of the density near the origin.
pub fn regularity_report(
    phi: &RadialPotential,
    rho: &ChargeSpec,
    eps_report: f64,
) -> RegularityReport {
    // extrapolate |phi'| to r = 0 from the two innermost positive nodes
    let pos: Vec<usize> = (0..phi.r_grid.len())
        .filter(|&i| phi.r_grid[i] > 0.0)
        .take(2)
        .collect();
    let slope_at_origin = match pos.as_slice() {
        [i, j] => {
            let (r1, u1) = (phi.r_grid[*i], phi.dphi[*i].abs());
            let (r2, u2) = (phi.r_grid[*j], phi.dphi[*j].abs());
            (u1 - (u2 - u1) / (r2 - r1) * r1).clamp(0.0, 1.0)
        }
        _ => phi.dphi[0].abs(),
    };
    let origin_class = if slope_at_origin >= 1.0 - 10.0 * eps_report {
        OriginClass::LightCone
    } else if slope_at_origin <= 10.0 * eps_report {
        OriginClass::RegularC1
    } else {
        OriginClass::Intermediate
    };

    let mut bands = Vec::new();
    if let Some(&first) = phi.r_grid.iter().find(|&&r| r > 0.0) {
        let mut lo = first;
        let rmax = phi.last_radius();
        while lo < rmax {
            let hi = (2.0 * lo).min(rmax);
            let sup = phi
                .r_grid
                .iter()
                .zip(&phi.dphi)
                .filter(|(&r, _)| r >= lo && r <= hi)
                .fold(0.0f64, |a, (_, &u)| a.max(u.abs()));
            bands.push((lo, hi, sup));
            lo = hi;
        }
    }

    let (integrability_exponent, predicts_c1_origin) = match rho {
        ChargeSpec::PointCharges(_) => (None, Some(false)),
        ChargeSpec::RadialProfile(p) => {
            let r1 = if p.grid[0] > 0.0 { p.grid[0] } else { p.grid[1] / 4.0 };
            let r2 = 2.0 * r1;
            let (v1, v2) = (p.eval(r1).abs(), p.eval(r2).abs());
            if v1 == 0.0 && v2 == 0.0 {
                (Some(f64::INFINITY), Some(true))
            } else if v1 > 0.0 && v2 > 0.0 {
                let alpha = -(v2 / v1).ln() / (r2 / r1).ln();
                if alpha <= 0.0 {
                    (Some(f64::INFINITY), Some(true))
                } else {
                    let sigma = p.dim as f64 / alpha;
                    (Some(sigma), Some(sigma >= p.dim as f64))
                }
            } else {
                (Some(f64::INFINITY), Some(true))
            }
        }
        ChargeSpec::MollifiedPoints { .. } => (Some(f64::INFINITY), Some(true)),
        ChargeSpec::GridDensity(_) => (None, None),
    };

    RegularityReport {
        slope_at_origin,
        origin_class,
        bands,
        integrability_exponent,
        predicts_c1_origin,
    }
}

/// Compactly supported radial test profiles for the weak form.
#[derive(Debug, Clone, Copy)]
pub enum RadialTest {
    /// psi(r) = max(R - r, 0); slope -1 inside the support.
    Tent { radius: f64 },
    /// Smooth bump exp(-1/(1-z^2)) with z = (r - center)/width, supported on
    /// |r - center| < width.
    Bump { center: f64, width: f64 },
}

impl RadialTest {
    pub fn value(&self, r: f64) -> f64 {
        match self {
            RadialTest::Tent { radius } => (radius - r).max(0.0),
            RadialTest::Bump { center, width } => {
                let z = (r - center) / width;
                if z.abs() < 1.0 {
                    (-1.0 / (1.0 - z * z)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    pub fn slope(&self, r: f64) -> f64 {
        match self {
            RadialTest::Tent { radius } => {
                if r < *radius {
                    -1.0
                } else {
                    0.0
                }
            }
            RadialTest::Bump { center, width } => {
                let z = (r - center) / width;
                if z.abs() < 1.0 {
                    let q = 1.0 - z * z;
                    (-1.0 / q).exp() * (-2.0 * z / (q * q)) / width
                } else {
                    0.0
                }
            }
        }
    }

    pub fn support_end(&self) -> f64 {
        match self {
            RadialTest::Tent { radius } => *radius,
            RadialTest::Bump { center, width } => center + width,
        }
    }

    /// Breakpoints where the test profile is not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            RadialTest::Tent { radius } => vec![*radius],
            RadialTest::Bump { center, width } => {
                vec![(center - width).max(0.0), center + width]
            }
        }
    }
}

/// <rho, psi> for a radial test profile.
pub fn pairing_with_test(rho: &ChargeSpec, test: &RadialTest) -> Result<f64> {
    match rho {
        ChargeSpec::PointCharges(points) => {
            if !points.all_at_origin() {
                return Err(Error::Charge(
                    "radial test pairing requires origin-centered charges".into(),
                ));
            }
            Ok(points.total_intensity() * test.value(0.0))
        }
        ChargeSpec::RadialProfile(profile) => {
            let omega = unit_sphere_measure(profile.dim);
            let pow = profile.dim as i32 - 1;
            let end = profile.support_end().min(test.support_end());
            let mut nodes = vec![0.0, end];
            nodes.extend_from_slice(&profile.grid);
            nodes.extend_from_slice(&test.breakpoints());
            let coarse: Vec<f64> = merge_grids(&nodes, &[])
                .into_iter()
                .filter(|&r| r <= end + 1e-12)
                .collect();
            // subdivide so panel width resolves the test profile
            let max_width = end / 256.0;
            let mut grid = Vec::new();
            for w in coarse.windows(2) {
                let parts = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
                for p in 0..parts {
                    grid.push(w[0] + (w[1] - w[0]) * p as f64 / parts as f64);
                }
            }
            grid.push(end);
            let mut total = 0.0;
            for w in grid.windows(2) {
                total += gl8(
                    |r| profile.eval(r) * test.value(r) * r.powi(pow),
                    w[0],
                    w[1],
                );
            }
            Ok(omega * total)
        }
        ChargeSpec::MollifiedPoints { base, width, kernel } => {
            let profile = mollify::radial_profile_from_points(base, *width, *kernel, 1025)?;
            pairing_with_test(&ChargeSpec::RadialProfile(profile), test)
        }
        ChargeSpec::GridDensity(_) => Err(Error::Charge(
            "grid densities pair on the lattice, not in radial form".into(),
        )),
    }
}

/// Sup over test profiles of the radial weak-form residual
/// |int_0^inf h(r) psi'(r) dr - <rho, psi> / omega_N|.
///
/// Node fluxes come from the solved slopes where they are safely spacelike
/// and from the moment where |phi'| saturates (the slope alone carries no
/// flux information there; the inverted-form residual certifies the two
/// agree). Between nodes the flux is continued exactly through its
/// derivative law h' = -rho r^{N-1}, i.e. h(r) = h_i + m(r_i) - m(r), so
/// the quadrature adds no interpolation error of its own.
pub fn weak_residual_radial(
    phi: &RadialPotential,
    rho: &ChargeSpec,
    tests: &[RadialTest],
) -> Result<f64> {
    let mom = cumulative_moment(rho, &phi.r_grid)?;
    let omega = unit_sphere_measure(phi.dim);
    let pow = phi.dim as i32 - 1;
    let node_flux: Vec<f64> = phi
        .r_grid
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let u = phi.dphi[i];
            let w = 1.0 - u * u;
            if r > 0.0 && w >= FLUX_CONDITION_FLOOR {
                u * r.powi(pow) / w.sqrt()
            } else {
                -mom.m[i]
            }
        })
        .collect();
    let locate = |r: f64| -> usize {
        match phi
            .r_grid
            .binary_search_by(|g| g.partial_cmp(&r).unwrap())
        {
            Ok(j) => j.min(phi.r_grid.len() - 1),
            Err(j) => j - 1,
        }
    };
    let mut sup = 0.0f64;
    for test in tests {
        let end = test.support_end();
        if end > phi.last_radius() * (1.0 + 1e-12) {
            return Err(Error::Domain(
                "test profile support exceeds the potential grid".into(),
            ));
        }
        let mut nodes: Vec<f64> = phi
            .r_grid
            .iter()
            .copied()
            .filter(|&r| r <= end)
            .collect();
        nodes.extend_from_slice(&test.breakpoints());
        nodes.push(end);
        let grid: Vec<f64> = merge_grids(&nodes, &[])
            .into_iter()
            .filter(|&r| r <= end + 1e-12)
            .collect();
        let mut lhs = 0.0;
        for w in grid.windows(2) {
            let i = locate(w[0]);
            let (h_i, m_i) = (node_flux[i], mom.m[i]);
            lhs += gl8(
                |r| (h_i + m_i - mom.eval(r)) * test.slope(r),
                w[0],
                w[1],
            );
        }
        let rhs = pairing_with_test(rho, test)? / omega;
        sup = sup.max((lhs - rhs).abs());
    }
    Ok(sup)
}

/// Both sides of the radial energy identity
/// int |grad phi|^2 / sqrt(1 - |grad phi|^2) dx = <rho, phi>,
/// which holds with equality for radial weak solutions.
pub fn energy_identity_sides(phi: &RadialPotential, rho: &ChargeSpec) -> Result<(f64, f64)> {
    let mom = cumulative_moment(rho, &phi.r_grid)?;
    let omega = unit_sphere_measure(phi.dim);
    let pow = phi.dim as i32 - 1;
    let integrand = |r: f64| -> f64 {
        let u = phi.slope_at(r);
        let w = 1.0 - u * u;
        if w >= FLUX_CONDITION_FLOOR {
            u * u * r.powi(pow) / w.sqrt()
        } else {
            // same quantity through the first integral, stable at saturation
            let m = mom.eval(r);
            m * m / f64::hypot(m, r.powi(pow))
        }
    };
    let mut integral = 0.0;
    for w in phi.r_grid.windows(2) {
        integral += gl8(integrand, w[0], w[1]);
    }
    let rmax = phi.last_radius();
    let n = phi.dim as f64;
    let m_inf = mom.m_infinity;
    integral += m_inf * m_inf * rmax.powf(2.0 - n) / (n - 2.0);
    let lhs = omega * integral;
    let rhs = crate::energy::pairing_radial(rho, phi)?;
    Ok((lhs, rhs))
}

/// Largest violation of phi_lo <= phi_hi over the union of both node sets
/// (0 when the comparison principle holds).
pub fn comparison_violation(phi_lo: &RadialPotential, phi_hi: &RadialPotential) -> f64 {
    let grid = merge_grids(&phi_lo.r_grid, &phi_hi.r_grid);
    grid.iter()
        .map(|&r| phi_lo.value_at(r) - phi_hi.value_at(r))
        .fold(0.0f64, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charge::PointSet;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    const PI: f64 = std::f64::consts::PI;

    // frozen with an independent adaptive quadrature of the closed-form
    // integrands (40-digit arithmetic)
    const PHI_BION_0: f64 = 1.854_074_677_301_371_9;
    const PHI_BION_1: f64 = 0.927_037_338_650_686;
    const PHI_BION_2: f64 = 0.496_953_563_209_454_3;
    const PHI_BALL_1: f64 = 0.329_790_862_096_390_05;
    const PHI_BALL_2: f64 = 0.166_551_259_488_367_13;

    fn bion_charge(a: f64) -> ChargeSpec {
        ChargeSpec::PointCharges(PointSet::origin(3, a).unwrap())
    }

    fn ball_charge() -> ChargeSpec {
        ChargeSpec::RadialProfile(RadialDensity::uniform_ball(3, 1.0, 1.0).unwrap())
    }

    #[test]
    fn moment_of_zero_charge_vanishes() {
        let zero = ChargeSpec::RadialProfile(
            RadialDensity::new(3, vec![0.0, 1.0], vec![0.0, 0.0]).unwrap(),
        );
        let mom = cumulative_moment(&zero, &[0.0, 0.5, 1.0, 2.0]).unwrap();
        assert!(mom.m.iter().all(|&v| v == 0.0));
        assert_eq!(mom.m_infinity, 0.0);
    }

    #[test]
    fn moment_of_bion_is_constant() {
        // a = 4 pi in R^3 gives m(R) = 1 for all R > 0
        let mom = cumulative_moment(&bion_charge(4.0 * PI), &[0.0, 0.1, 1.0, 10.0]).unwrap();
        assert_eq!(mom.m[0], 0.0);
        for &v in &mom.m[1..] {
            assert_relative_eq!(v, 1.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn moment_of_uniform_ball_is_cubic_then_flat() {
        let mom = cumulative_moment(&ball_charge(), &[0.0, 0.3, 0.7, 1.0, 2.0, 5.0]).unwrap();
        for (&r, &m) in mom.r_grid.iter().zip(&mom.m) {
            let expect = (r.min(1.0)).powi(3) / 3.0;
            assert_abs_diff_eq!(m, expect, epsilon = 1e-10);
        }
        // brute trapezoid oracle for m(1)
        let n = 4_000_000;
        let h = 1.0 / n as f64;
        let mut oracle = 0.0;
        for i in 0..n {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            oracle += 0.5 * (a * a + b * b) * h;
        }
        assert_abs_diff_eq!(mom.eval(1.0), oracle, epsilon = 1e-10);
    }

    #[test]
    fn moment_rejects_off_origin_points() {
        let off = PointSet::new(
            3,
            vec![crate::charge::PointCharge {
                position: vec![1.0, 0.0, 0.0],
                intensity: 1.0,
            }],
        )
        .unwrap();
        assert!(cumulative_moment(&ChargeSpec::PointCharges(off), &[0.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn slope_examples() {
        // m = 0 -> phi' = 0
        let zero = ChargeSpec::RadialProfile(
            RadialDensity::new(3, vec![0.0, 1.0], vec![0.0, 0.0]).unwrap(),
        );
        let mom = cumulative_moment(&zero, &[0.0, 1.0, 2.0]).unwrap();
        assert!(slope_from_moment(&mom).dphi.iter().all(|&u| u == 0.0));

        // BIon m = 1 at R = 1: phi'(1) = -1/sqrt(2)
        let mom = cumulative_moment(&bion_charge(4.0 * PI), &[0.0, 1.0, 2.0]).unwrap();
        let s = slope_from_moment(&mom);
        assert_relative_eq!(s.dphi[1], -1.0 / 2.0f64.sqrt(), max_relative = 1e-14);
        assert!(s.origin_saturated);
        assert_eq!(s.dphi[0], -1.0);

        // ball at R = 1: phi'(1) = -(1/3)/sqrt(1/9 + 1) = -1/sqrt(10)
        let mom = cumulative_moment(&ball_charge(), &[0.0, 1.0, 2.0]).unwrap();
        let s = slope_from_moment(&mom);
        assert_relative_eq!(s.dphi[1], -1.0 / 10.0f64.sqrt(), max_relative = 1e-14);
        assert!(!s.origin_saturated);
    }

    #[test]
    fn solve_zero_charge_gives_zero_potential() {
        let zero = ChargeSpec::RadialProfile(
            RadialDensity::new(3, vec![0.0, 1.0], vec![0.0, 0.0]).unwrap(),
        );
        let phi = solve_radial(&zero, &default_r_grid(&zero)).unwrap();
        assert!(phi.phi.iter().all(|&v| v == 0.0));
        assert!(phi.dphi.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn solve_bion_matches_quadrature_oracle() {
        let rho = bion_charge(4.0 * PI);
        let phi = solve_radial(&rho, &default_r_grid(&rho)).unwrap();
        assert_abs_diff_eq!(phi.value_at(0.0), PHI_BION_0, epsilon = 1e-8);
        assert_abs_diff_eq!(phi.value_at(1.0), PHI_BION_1, epsilon = 1e-8);
        assert_abs_diff_eq!(phi.value_at(2.0), PHI_BION_2, epsilon = 1e-8);
        assert!(phi.origin_saturated);
    }

    #[test]
    fn solve_ball_matches_quadrature_oracle() {
        let rho = ball_charge();
        let phi = solve_radial(&rho, &default_r_grid(&rho)).unwrap();
        assert_abs_diff_eq!(phi.value_at(1.0), PHI_BALL_1, epsilon = 1e-8);
        assert_abs_diff_eq!(phi.value_at(2.0), PHI_BALL_2, epsilon = 1e-8);
        assert!(!phi.origin_saturated);
    }

    #[test]
    fn solved_potentials_satisfy_the_first_integral() {
        for rho in [bion_charge(4.0 * PI), ball_charge()] {
            let grid = default_r_grid(&rho);
            let phi = solve_radial(&rho, &grid).unwrap();
            let mom = cumulative_moment(&rho, &phi.r_grid).unwrap();
            let res = first_integral_residual(&phi, &mom);
            assert!(res.inverted_form < 1e-12, "inverted residual {}", res.inverted_form);
            assert!(res.flux_form < 1e-12, "flux residual {}", res.flux_form);
        }
    }

    #[test]
    fn monotone_potential_and_decay() {
        let rho = bion_charge(4.0 * PI);
        let phi = solve_radial(&rho, &default_r_grid(&rho)).unwrap();
        // positive moment: phi nonincreasing
        assert!(phi.phi.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        // phi * r^{N-2} approaches the tail constant in the last decade
        let rmax = phi.last_radius();
        for &f in &[0.1, 0.3, 1.0] {
            let r = rmax * f;
            let scaled = phi.value_at(r) * r;
            assert_relative_eq!(scaled, phi.tail_constant, max_relative = 1e-2);
        }
    }

    #[test]
    fn spacelike_bands_away_from_origin() {
        let rho = bion_charge(4.0 * PI);
        let grid = default_r_grid(&rho);
        let phi = solve_radial(&rho, &grid).unwrap();
        let mom = cumulative_moment(&rho, &phi.r_grid).unwrap();
        for &r0 in &[0.5, 1.0, 4.0] {
            let margin = mom.spacelike_margin(r0);
            assert!(margin > 0.0);
            for (i, &r) in phi.r_grid.iter().enumerate() {
                if r >= r0 {
                    assert!(phi.dphi[i].abs() <= 1.0 - margin + 1e-15);
                }
            }
        }
    }

    #[test]
    fn regularity_classification() {
        let ball = ball_charge();
        let phi = solve_radial(&ball, &default_r_grid(&ball)).unwrap();
        let rep = regularity_report(&phi, &ball, 1e-3);
        assert_eq!(rep.origin_class, OriginClass::RegularC1);
        assert_eq!(rep.predicts_c1_origin, Some(true));
        assert_eq!(rep.integrability_exponent, Some(f64::INFINITY));

        let bion = bion_charge(4.0 * PI);
        let phi = solve_radial(&bion, &default_r_grid(&bion)).unwrap();
        let rep = regularity_report(&phi, &bion, 1e-3);
        assert_eq!(rep.origin_class, OriginClass::LightCone);
        assert_eq!(rep.predicts_c1_origin, Some(false));

        let zero = ChargeSpec::RadialProfile(
            RadialDensity::new(3, vec![0.0, 1.0], vec![0.0, 0.0]).unwrap(),
        );
        let phi = solve_radial(&zero, &default_r_grid(&zero)).unwrap();
        let rep = regularity_report(&phi, &zero, 1e-3);
        assert!(rep.bands.iter().all(|&(_, _, s)| s == 0.0));
    }

    #[test]
    fn weak_residual_zero_charge() {
        let zero = ChargeSpec::RadialProfile(
            RadialDensity::new(3, vec![0.0, 1.0], vec![0.0, 0.0]).unwrap(),
        );
        let phi = solve_radial(&zero, &default_r_grid(&zero)).unwrap();
        let tests = [
            RadialTest::Tent { radius: 2.0 },
            RadialTest::Bump {
                center: 1.0,
                width: 0.5,
            },
        ];
        let res = weak_residual_radial(&phi, &zero, &tests).unwrap();
        assert!(res < 1e-12);
    }

    #[test]
    fn bion_tent_test_reproduces_the_mean_flux_identity() {
        // for the BIon, h = -m = -1 identically, so
        // int_0^R h psi' dr = R = <rho, psi_R> / omega_3 with psi_R = R - r
        let rho = bion_charge(4.0 * PI);
        let phi = solve_radial(&rho, &default_r_grid(&rho)).unwrap();
        let res =
            weak_residual_radial(&phi, &rho, &[RadialTest::Tent { radius: 3.0 }]).unwrap();
        assert!(res < 1e-9, "tent residual {res}");
    }

    #[test]
    fn ball_weak_residual_small_for_random_bumps() {
        let rho = ball_charge();
        let phi = solve_radial(&rho, &default_r_grid(&rho)).unwrap();
        let mut tests = Vec::new();
        for i in 0..10 {
            let center = 0.3 + 0.28 * i as f64;
            tests.push(RadialTest::Bump {
                center,
                width: 0.2 + 0.05 * (i % 3) as f64,
            });
        }
        let res = weak_residual_radial(&phi, &rho, &tests).unwrap();
        assert!(res < 1e-6, "bump residual {res}");
    }

    #[test]
    fn energy_identity_holds_for_radial_solutions() {
        for rho in [bion_charge(4.0 * PI), ball_charge()] {
            let phi = solve_radial(&rho, &default_r_grid(&rho)).unwrap();
            let (lhs, rhs) = energy_identity_sides(&phi, &rho).unwrap();
            assert!(
                (lhs - rhs).abs() / rhs.abs() < 1e-6,
                "identity gap {} vs {}",
                lhs,
                rhs
            );
        }
    }

    #[test]
    fn comparison_of_ordered_bions() {
        let lo = bion_charge(4.0 * PI);
        let hi = bion_charge(8.0 * PI);
        let phi_lo = solve_radial(&lo, &default_r_grid(&lo)).unwrap();
        let phi_hi = solve_radial(&hi, &default_r_grid(&hi)).unwrap();
        assert!(comparison_violation(&phi_lo, &phi_hi) <= 1e-12);
    }
}
