//! Radial solvers for the two approximation schemes: finite-order series
//! functionals (sums of 2h-Laplacians) and the C^1-truncated functional.
//! Both radial first integrals invert pointwise through strictly monotone
//! scalar equations, so the solvers are the exact machinery with a different
//! slope law.

use crate::charge::ChargeSpec;
use crate::error::{Error, Result};
use crate::lagrangian::{series_coefficients, LagrangianModel};
use crate::potential::RadialPotential;
use crate::quad::{gl8, merge_grids};
use crate::radial::{cumulative_moment, CumulativeMoment};
use crate::{energy, radial};

/// Residual target of the monotone scalar inversions, relative to max(1, |g|).
pub const INVERSION_TOL: f64 = 1e-13;

/// Solve sum_h alpha_h |u|^{2h-2} u = g for u by safeguarded Newton.
///
/// The odd map is strictly increasing, so the root is unique; the bracket
/// [0, min(|g|, (|g|/alpha_n)^{1/(2n-1)})] always contains |u| because every
/// term of the sum is nonnegative.
pub fn invert_series_flux(alpha: &[f64], g: f64) -> f64 {
    debug_assert!(!alpha.is_empty());
    if g == 0.0 {
        return 0.0;
    }
    if alpha.len() == 1 {
        return g / alpha[0];
    }
    let target = g.abs();
    let n = alpha.len();
    let q = |x: f64| -> (f64, f64) {
        // value and derivative of sum alpha_h x^{2h-1} by Horner in x^2
        let x2 = x * x;
        let mut v = 0.0;
        let mut d = 0.0;
        for h in (1..=n).rev() {
            v = v * x2 + alpha[h - 1];
            d = d * x2 + (2.0 * h as f64 - 1.0) * alpha[h - 1];
        }
        (v * x, d)
    };
    let mut hi = target
        .min((target / alpha[n - 1]).powf(1.0 / (2.0 * n as f64 - 1.0)));
    if !(hi > 0.0) {
        hi = target;
    }
    let mut lo = 0.0;
    let mut x = hi;
    let tol = INVERSION_TOL * target.max(1.0);
    for _ in 0..200 {
        let (v, d) = q(x);
        let r = v - target;
        if r.abs() <= tol {
            break;
        }
        if r > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let step = r / d;
        let mut next = x - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= f64::EPSILON * x.abs() {
            break;
        }
        x = next;
    }
    x.copysign(g)
}

/// Solve a_theta(u^2) u = g for u.
///
/// Below the branch threshold sqrt((1-theta)/theta) the exact branch inverts
/// in closed form; past it the polynomial tail is handled by safeguarded
/// Newton on a strictly increasing odd map.
pub fn invert_truncated_flux(model: &LagrangianModel, g: f64) -> Result<f64> {
    let (theta, power, gamma, delta) = match model {
        LagrangianModel::Truncated {
            theta,
            power,
            gamma,
            delta,
        } => (*theta, *power, *gamma, *delta),
        _ => {
            return Err(Error::Domain(
                "truncated inversion needs a truncated model".into(),
            ))
        }
    };
    if g == 0.0 {
        return Ok(0.0);
    }
    let target = g.abs();
    let threshold = ((1.0 - theta) / theta).sqrt();
    if target <= threshold {
        // exact branch: u / sqrt(1 - u^2) = g
        return Ok(g / f64::hypot(1.0, g));
    }
    // polynomial branch: (gamma x^{2(n-1)} + delta) x = target, x > sqrt(1-theta)
    let q = |x: f64| -> (f64, f64) {
        let xp = x.powi(2 * power as i32 - 2);
        (
            (gamma * xp + delta) * x,
            gamma * (2.0 * power as f64 - 1.0) * xp + delta,
        )
    };
    let mut lo = (1.0 - theta).sqrt();
    let mut hi = lo.max((target / gamma).powf(1.0 / (2.0 * power as f64 - 1.0)) + 1.0);
    for _ in 0..120 {
        if q(hi).0 >= target {
            break;
        }
        hi *= 2.0;
    }
    let tol = INVERSION_TOL * target.max(1.0);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (v, d) = q(x);
        let r = v - target;
        if r.abs() <= tol {
            break;
        }
        if r > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let mut next = x - r / d;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= f64::EPSILON * x.abs() {
            break;
        }
        x = next;
    }
    Ok(x.copysign(g))
}

fn solve_radial_with_inversion<F>(
    rho: &ChargeSpec,
    r_grid: &[f64],
    invert: F,
    tail_cubic_coeff: f64,
) -> Result<(RadialPotential, CumulativeMoment)>
where
    F: Fn(f64) -> f64,
{
    let mut grid: Vec<f64> = vec![0.0];
    if let ChargeSpec::RadialProfile(p) = rho {
        grid.extend_from_slice(&p.grid);
    }
    let grid = merge_grids(r_grid, &grid);
    let mom = cumulative_moment(rho, &grid)?;
    let dim = mom.dim;
    let pow = dim as i32 - 1;
    let slope_fn = |s: f64| -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        invert(-mom.eval(s) / s.powi(pow))
    };

    let n = grid.len();
    let mut dphi: Vec<f64> = grid.iter().map(|&r| slope_fn(r)).collect();
    // the scalar flux law can diverge at an origin point charge; clamp the
    // r = 0 sample to the innermost positive node for interpolation only
    if !dphi[0].is_finite() {
        dphi[0] = dphi[1];
    }
    let m_inf = mom.m_infinity;
    let nf = dim as f64;
    let rmax = grid[n - 1];
    let tail_cubic = tail_cubic_coeff * m_inf.powi(3) / (3.0 * nf - 4.0);
    let tail = m_inf * rmax.powf(2.0 - nf) / (nf - 2.0) - tail_cubic * rmax.powf(4.0 - 3.0 * nf);
    let mut phi = vec![0.0; n];
    phi[n - 1] = tail;
    for i in (0..n - 1).rev() {
        phi[i] = phi[i + 1] + gl8(|s| -slope_fn(s), grid[i], grid[i + 1]);
    }
    let potential = RadialPotential::new(dim, grid, phi, dphi, m_inf, tail_cubic, false)?;
    Ok((potential, mom))
}

/// Minimizer of the order-n series functional restricted to radial fields:
/// pointwise inversion of sum_h alpha_h |u|^{2h-2} u = -m(R)/R^{N-1}, then
/// the same quadrature and tail treatment as the exact solver.
pub fn solve_radial_series(rho: &ChargeSpec, n: usize, r_grid: &[f64]) -> Result<RadialPotential> {
    let alpha = series_coefficients(n)?;
    let kappa = if n >= 2 { alpha[1] } else { 0.0 };
    let (phi, _) =
        solve_radial_with_inversion(rho, r_grid, |g| invert_series_flux(&alpha, g), kappa)?;
    Ok(phi)
}

/// Minimizer of the theta-truncated functional restricted to radial fields.
///
/// Wherever the solution satisfies |phi'|^2 <= 1 - theta this coincides with
/// the exact solver; near strong charges the polynomial branch takes over
/// and the slope may exceed 1 (the truncated model has no gradient bound).
pub fn solve_radial_truncated(
    rho: &ChargeSpec,
    theta: f64,
    n: usize,
    r_grid: &[f64],
) -> Result<RadialPotential> {
    let model = LagrangianModel::truncated(theta, n)?;
    let (phi, _) = solve_radial_with_inversion(
        rho,
        r_grid,
        |g| invert_truncated_flux(&model, g).unwrap_or(f64::NAN),
        0.5,
    )?;
    Ok(phi)
}

/// One row of a cascade study.
#[derive(Debug, Clone, Copy)]
pub struct CascadeRow {
    pub n: usize,
    pub energy: f64,
    pub sup_distance: f64,
    pub max_slope: f64,
}

/// Model energy evaluated with the solver's own slope law at the
/// quadrature points.
///
/// Near an origin point charge the minimizer's slope diverges, so sampled
/// slopes interpolate badly there; sharing the pointwise inversion between
/// the potential integral and the energy integral keeps the two
/// quadratures consistent (the order-1 case is the classically divergent
/// Coulomb field energy, regularized here by the finite grid).
fn slope_consistent_energy<F>(
    model: &LagrangianModel,
    rho: &ChargeSpec,
    phi: &RadialPotential,
    mom: &CumulativeMoment,
    invert: F,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let omega = crate::quad::unit_sphere_measure(phi.dim);
    let pow = phi.dim as i32 - 1;
    let mut integral = 0.0;
    for w in phi.r_grid.windows(2) {
        let mut bad: Option<Error> = None;
        integral += gl8(
            |s| {
                let u = if s <= 0.0 {
                    0.0
                } else {
                    invert(-mom.eval(s) / s.powi(pow))
                };
                match model.value(u * u) {
                    Ok(v) => v * s.powi(pow),
                    Err(e) => {
                        bad = Some(e);
                        0.0
                    }
                }
            },
            w[0],
            w[1],
        );
        if let Some(e) = bad {
            return Err(e);
        }
    }
    let rmax = phi.last_radius();
    let nf = phi.dim as f64;
    let tail = mom.m_infinity * mom.m_infinity * rmax.powf(2.0 - nf) / (2.0 * (nf - 2.0));
    Ok(omega * (integral + tail) - energy::pairing_radial(rho, phi)?)
}

/// Series-cascade study against the exact radial solution: per order, the
/// series energy at its own minimizer, the sup-node distance to the exact
/// potential, and the largest slope magnitude.
pub fn cascade_study(
    rho: &ChargeSpec,
    n_list: &[usize],
    r_grid: &[f64],
) -> Result<Vec<CascadeRow>> {
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("cascade orders must ascend strictly".into()));
    }
    let exact = radial::solve_radial(rho, r_grid)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let alpha = series_coefficients(n)?;
        let kappa = if n >= 2 { alpha[1] } else { 0.0 };
        let (phi_n, mom) = solve_radial_with_inversion(
            rho,
            r_grid,
            |g| invert_series_flux(&alpha, g),
            kappa,
        )?;
        let model = LagrangianModel::series(n)?;
        let e = slope_consistent_energy(&model, rho, &phi_n, &mom, |g| {
            invert_series_flux(&alpha, g)
        })?;
        let sup_distance = phi_n
            .r_grid
            .iter()
            .map(|&r| (phi_n.value_at(r) - exact.value_at(r)).abs())
            .fold(0.0f64, f64::max);
        rows.push(CascadeRow {
            n,
            energy: e,
            sup_distance,
            max_slope: phi_n.max_abs_slope(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charge::{PointSet, RadialDensity};
    use crate::radial::default_r_grid;
    use ::approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};

    const PI: f64 = std::f64::consts::PI;

    fn bion_charge(a: f64) -> ChargeSpec {
        ChargeSpec::PointCharges(PointSet::origin(3, a).unwrap())
    }

    fn ball_charge() -> ChargeSpec {
        ChargeSpec::RadialProfile(RadialDensity::uniform_ball(3, 1.0, 1.0).unwrap())
    }

    #[test]
    fn inversion_solves_the_cubic_example() {
        // u + u^3/2 = -1; frozen from an independent bisection oracle
        let alpha = series_coefficients(2).unwrap();
        let u = invert_series_flux(&alpha, -1.0);
        assert_abs_diff_eq!(u, -0.770_916_997_059_248_1, epsilon = 1e-13);
        // back substitution
        assert!((u + 0.5 * u * u * u + 1.0).abs() < 1e-12);
    }

    #[test]
    fn inversion_random_battery() {
        // odd monotone map: sign preserved, residual below 1e-12
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100_000 {
            let n = rng.gen_range(1..=24usize);
            let g: f64 = rng.gen_range(-8.0..8.0);
            let alpha = series_coefficients(n).unwrap();
            let u = invert_series_flux(&alpha, g);
            let mut v = 0.0;
            for h in (1..=n).rev() {
                v = v * (u * u) + alpha[h - 1];
            }
            v *= u;
            assert!(
                (v - g).abs() < 1e-12,
                "residual {} at n={n}, g={g}",
                (v - g).abs()
            );
            assert!(u == 0.0 && g == 0.0 || u.signum() == g.signum());
        }
    }

    #[test]
    fn order_one_is_the_coulomb_solution() {
        // rho = delta scaling (a = 1): phi(r) = 1/(4 pi r)
        let rho = bion_charge(1.0);
        let phi = solve_radial_series(&rho, 1, &default_r_grid(&rho)).unwrap();
        for i in 1..20 {
            let r = phi.r_grid[i * phi.r_grid.len() / 21];
            if r <= 0.0 {
                continue;
            }
            let expect = 1.0 / (4.0 * PI * r);
            assert_relative_eq!(phi.value_at(r), expect, max_relative = 1e-10);
        }
    }

    #[test]
    fn zero_moment_gives_zero_slope_for_every_order() {
        let zero = ChargeSpec::RadialProfile(
            RadialDensity::new(3, vec![0.0, 1.0], vec![0.0, 0.0]).unwrap(),
        );
        for n in [1, 2, 5] {
            let phi = solve_radial_series(&zero, n, &default_r_grid(&zero)).unwrap();
            assert!(phi.dphi.iter().all(|&u| u == 0.0));
            assert!(phi.phi.iter().all(|&v| v == 0.0));
        }
        let phi = solve_radial_truncated(&zero, 0.5, 2, &default_r_grid(&zero)).unwrap();
        assert!(phi.phi.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn series_order_validation() {
        let rho = bion_charge(4.0 * PI);
        assert!(solve_radial_series(&rho, 0, &default_r_grid(&rho)).is_err());
    }

    #[test]
    fn truncated_matches_exact_when_slopes_stay_below_switch() {
        // ball solution has max |phi'| = 1/sqrt(10), so any theta <= 0.9
        // keeps the whole solve on the exact branch
        let rho = ball_charge();
        let grid = default_r_grid(&rho);
        let exact = radial::solve_radial(&rho, &grid).unwrap();
        let trunc = solve_radial_truncated(&rho, 0.9, 2, &grid).unwrap();
        assert_eq!(exact.r_grid, trunc.r_grid);
        for i in 0..exact.phi.len() {
            assert_abs_diff_eq!(exact.phi[i], trunc.phi[i], epsilon = 1e-10);
            assert_abs_diff_eq!(exact.dphi[i], trunc.dphi[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn truncated_bion_exceeds_light_speed_near_origin() {
        // theta = 0.5 activates the polynomial branch near the charge where
        // the truncated model has no slope bound
        let rho = bion_charge(4.0 * PI);
        let phi = solve_radial_truncated(&rho, 0.5, 2, &default_r_grid(&rho)).unwrap();
        assert!(phi.max_abs_slope() > 1.0);
        // far from the charge both models agree
        let exact = radial::solve_radial(&rho, &default_r_grid(&rho)).unwrap();
        assert_relative_eq!(phi.value_at(5.0), exact.value_at(5.0), max_relative = 1e-6);
    }

    #[test]
    fn truncated_inversion_residuals() {
        let model = LagrangianModel::truncated(0.5, 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let g: f64 = rng.gen_range(-50.0..50.0);
            let u = invert_truncated_flux(&model, g).unwrap();
            let v = model.slope_profile(u * u) * u;
            assert!(
                (v - g).abs() < 1e-11 * g.abs().max(1.0),
                "residual {} at g={g}",
                (v - g).abs()
            );
        }
    }

    #[test]
    fn cascade_energies_increase_and_distances_shrink() {
        let rho = bion_charge(4.0 * PI);
        let rows = cascade_study(&rho, &[1, 2, 4, 8], &default_r_grid(&rho)).unwrap();
        for w in rows.windows(2) {
            assert!(
                w[1].energy > w[0].energy,
                "energies not increasing: {} -> {}",
                w[0].energy,
                w[1].energy
            );
            assert!(w[1].sup_distance < w[0].sup_distance);
        }
        assert!(rows.iter().all(|r| r.energy <= 0.0));
        // series energies stay below the exact energy at the exact minimizer
        let exact_phi = radial::solve_radial(&rho, &default_r_grid(&rho)).unwrap();
        let exact_energy =
            energy::energy_radial(&LagrangianModel::Exact, &rho, &exact_phi).unwrap();
        assert!(rows.last().unwrap().energy < exact_energy);
    }

    #[test]
    fn lower_estimate_on_sampled_fields() {
        // I_n(phi) <= I(phi) for a fixed spacelike field
        let rho = ball_charge();
        let grid = default_r_grid(&rho);
        let phi = radial::solve_radial(&rho, &grid).unwrap();
        let exact = energy::energy_radial(&LagrangianModel::Exact, &rho, &phi).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for n in [1, 2, 4, 8] {
            let model = LagrangianModel::series(n).unwrap();
            let e = energy::energy_radial(&model, &rho, &phi).unwrap();
            assert!(e <= exact * (1.0 - 1e-14) + 1e-12);
            assert!(e >= prev);
            prev = e;
        }
    }

    #[test]
    fn random_inversion_is_odd() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let alpha = series_coefficients(6).unwrap();
        for _ in 0..1000 {
            let g: f64 = rng.gen_range(0.0..5.0);
            let plus = invert_series_flux(&alpha, g);
            let minus = invert_series_flux(&alpha, -g);
            assert_eq!(plus, -minus);
        }
    }
}
