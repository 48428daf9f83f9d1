//! Runnable property suites mirroring the analytic facts the solvers rest
//! on. The CLI `check` subcommand executes these and fails the process on
//! any violation; the test suite exercises the same code paths.

use crate::charge::{ChargeSpec, GridSample, Kernel, PointSet, RadialDensity};
use crate::error::{Error, Result};
use crate::geom::GridGeom;
use crate::grid::{self, GridSolveParams};
use crate::lagrangian::{series_coefficients, truncation_match, LagrangianModel};
use crate::potential::GridPotential;
use crate::radial::{self, default_r_grid};
use crate::{approx, bikg, mollify};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of a single named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn pass(name: &str, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed: true,
            detail,
        }
    }

    fn fail(name: &str, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed: false,
            detail,
        }
    }

    fn from_bound(name: &str, value: f64, bound: f64) -> Self {
        if value <= bound {
            CheckResult::pass(name, format!("{value:.3e} <= {bound:.1e}"))
        } else {
            CheckResult::fail(name, format!("{value:.3e} > {bound:.1e}"))
        }
    }
}

/// Property suites grouped by module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Inequalities,
    Radial,
    Approximation,
    Mollify,
    Grid,
    Bikg,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inequalities" => Ok(Suite::Inequalities),
            "radial" => Ok(Suite::Radial),
            "approximation" | "approx" | "cascade" => Ok(Suite::Approximation),
            "mollify" => Ok(Suite::Mollify),
            "grid" => Ok(Suite::Grid),
            "bikg" => Ok(Suite::Bikg),
            "all" => Ok(Suite::All),
            other => Err(Error::Domain(format!("unknown suite '{other}'"))),
        }
    }
}

/// Run one suite (or all of them) with the given seed for the randomized
/// parts; deterministic for a fixed seed.
pub fn run_suite(suite: Suite, seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Inequalities {
        inequalities(&mut out, seed);
    }
    if all || suite == Suite::Radial {
        radial_suite(&mut out, seed);
    }
    if all || suite == Suite::Approximation {
        approximation_suite(&mut out, seed);
    }
    if all || suite == Suite::Mollify {
        mollify_suite(&mut out);
    }
    if all || suite == Suite::Grid {
        grid_suite(&mut out, seed);
    }
    if all || suite == Suite::Bikg {
        bikg_suite(&mut out);
    }
    out
}

const PI: f64 = std::f64::consts::PI;

fn bion(a: f64) -> ChargeSpec {
    ChargeSpec::PointCharges(PointSet::origin(3, a).unwrap())
}

fn ball() -> ChargeSpec {
    ChargeSpec::RadialProfile(RadialDensity::uniform_ball(3, 1.0, 1.0).unwrap())
}

fn inequalities(out: &mut Vec<CheckResult>, seed: u64) {
    // t/2 <= 1 - sqrt(1-t) <= t at 1000 points, exact in f64
    let exact = LagrangianModel::Exact;
    let mut worst = 0.0f64;
    let mut ok = true;
    for i in 0..1000 {
        let t = i as f64 / 999.0 * (1.0 - 1e-13);
        let v = exact.value(t).unwrap();
        if v < 0.5 * t || v > t {
            ok = false;
        }
        worst = worst.max((v - t).max(0.5 * t - v));
    }
    out.push(if ok {
        CheckResult::pass("simple-inequality", format!("worst excess {worst:.1e}"))
    } else {
        CheckResult::fail("simple-inequality", format!("excess {worst:.1e}"))
    });

    // series values increase with the order and stay below the exact value
    let mut ok = true;
    for &t in &[0.05, 0.3, 0.7, 0.95] {
        let mut prev = 0.0;
        for n in [1, 2, 4, 8, 16, 32] {
            let v = LagrangianModel::series(n).unwrap().value(t).unwrap();
            if v + 1e-15 < prev || v > exact.value(t).unwrap() + 1e-15 {
                ok = false;
            }
            prev = v;
        }
    }
    out.push(if ok {
        CheckResult::pass("series-monotone-below-exact", "orders 1..32".into())
    } else {
        CheckResult::fail("series-monotone-below-exact", "ordering violated".into())
    });

    // C1 matching equations of the truncated tail for random parameters
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x01);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let theta: f64 = rng.gen_range(0.05..0.95);
        let n = rng.gen_range(2..6usize);
        let (gamma, delta) = truncation_match(theta, n).unwrap();
        let s = 1.0 - theta;
        let d_match = gamma * (n as f64 - 1.0) * s.powi(n as i32 - 2);
        let v_match = gamma * s.powi(n as i32 - 1) + delta;
        let r1 = (d_match - 0.5 * theta.powf(-1.5)).abs() / (0.5 * theta.powf(-1.5));
        let r2 = (v_match - theta.powf(-0.5)).abs() / theta.powf(-0.5);
        worst = worst.max(r1).max(r2);
    }
    out.push(CheckResult::from_bound("truncation-c1-match", worst, 1e-12));

    // the exact branch of a_theta reproduces (1-s)^{-1/2} identically
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let theta: f64 = rng.gen_range(0.05..0.95);
        let model = LagrangianModel::truncated(theta, 2).unwrap();
        for i in 0..50 {
            // keep s at or below the switch point under rounding
            let s = (1.0 - theta) * (i as f64 / 49.0);
            worst = worst.max((model.slope_profile(s) - 1.0 / (1.0 - s).sqrt()).abs());
        }
    }
    out.push(CheckResult::from_bound("truncation-exact-branch", worst, 0.0));

    let alpha = series_coefficients(64).unwrap();
    let positive = alpha.iter().all(|&a| a > 0.0) && (alpha[0] - 1.0).abs() == 0.0;
    out.push(if positive {
        CheckResult::pass("series-coefficients-positive", "alpha_1 = 1".into())
    } else {
        CheckResult::fail("series-coefficients-positive", format!("{:?}", &alpha[..3]))
    });
}

fn radial_suite(out: &mut Vec<CheckResult>, seed: u64) {
    // first-integral residual on the canonical solves
    let mut worst = 0.0f64;
    for rho in [bion(4.0 * PI), bion(-2.0 * PI), ball()] {
        let phi = radial::solve_radial(&rho, &default_r_grid(&rho)).unwrap();
        let mom = radial::cumulative_moment(&rho, &phi.r_grid).unwrap();
        let res = radial::first_integral_residual(&phi, &mom);
        worst = worst.max(res.inverted_form).max(res.flux_form);
    }
    out.push(CheckResult::from_bound("first-integral-residual", worst, 1e-12));

    // randomized comparison principle on ordered profile pairs
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x02);
    let mut violation = 0.0f64;
    for _ in 0..50 {
        let nodes = 8;
        let grid: Vec<f64> = (0..nodes).map(|i| i as f64 * 2.0 / (nodes - 1) as f64).collect();
        let lo: Vec<f64> = (0..nodes).map(|_| rng.gen_range(-0.5..1.0)).collect();
        let hi: Vec<f64> = lo.iter().map(|v| v + rng.gen_range(0.0..1.0)).collect();
        let rho_lo = ChargeSpec::RadialProfile(RadialDensity::new(3, grid.clone(), lo).unwrap());
        let rho_hi = ChargeSpec::RadialProfile(RadialDensity::new(3, grid, hi).unwrap());
        let phi_lo = radial::solve_radial(&rho_lo, &default_r_grid(&rho_lo)).unwrap();
        let phi_hi = radial::solve_radial(&rho_hi, &default_r_grid(&rho_hi)).unwrap();
        violation = violation.max(radial::comparison_violation(&phi_lo, &phi_hi));
    }
    out.push(CheckResult::from_bound("comparison-principle", violation, 1e-10));

    // energy identity for radial weak solutions
    let mut worst = 0.0f64;
    for rho in [bion(4.0 * PI), ball()] {
        let phi = radial::solve_radial(&rho, &default_r_grid(&rho)).unwrap();
        let (lhs, rhs) = radial::energy_identity_sides(&phi, &rho).unwrap();
        worst = worst.max((lhs - rhs).abs() / rhs.abs());
    }
    out.push(CheckResult::from_bound("energy-identity", worst, 1e-6));

    // power-law decay of the scaled potential in the last decade
    let rho = bion(4.0 * PI);
    let phi = radial::solve_radial(&rho, &default_r_grid(&rho)).unwrap();
    let rmax = phi.last_radius();
    let mut worst = 0.0f64;
    for &f in &[0.1, 0.5, 1.0] {
        let r = rmax * f;
        worst = worst.max((phi.value_at(r) * r / phi.tail_constant - 1.0).abs());
    }
    out.push(CheckResult::from_bound("tail-decay", worst, 1e-2));

    // weak residual with smooth bumps on the ball solve
    let rho = ball();
    let phi = radial::solve_radial(&rho, &default_r_grid(&rho)).unwrap();
    let tests: Vec<radial::RadialTest> = (0..10)
        .map(|i| radial::RadialTest::Bump {
            center: 0.3 + 0.28 * i as f64,
            width: 0.25,
        })
        .collect();
    let res = radial::weak_residual_radial(&phi, &rho, &tests).unwrap();
    out.push(CheckResult::from_bound("weak-residual", res, 1e-6));
}

fn approximation_suite(out: &mut Vec<CheckResult>, seed: u64) {
    // scalar inversion battery
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x03);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=24usize);
        let g: f64 = rng.gen_range(-8.0..8.0);
        let alpha = series_coefficients(n).unwrap();
        let u = approx::invert_series_flux(&alpha, g);
        let mut v = 0.0;
        for h in (1..=n).rev() {
            v = v * (u * u) + alpha[h - 1];
        }
        worst = worst.max((v * u - g).abs());
    }
    out.push(CheckResult::from_bound("series-inversion", worst, 1e-12));

    // order-1 reproduces the Coulomb potential for the unit point charge
    let rho = bion(1.0);
    let phi = approx::solve_radial_series(&rho, 1, &default_r_grid(&rho)).unwrap();
    let mut worst = 0.0f64;
    for i in 1..=20 {
        let r = phi.r_grid[i * (phi.r_grid.len() - 1) / 21].max(phi.r_grid[1]);
        let expect = 1.0 / (4.0 * PI * r);
        worst = worst.max((phi.value_at(r) - expect).abs() / expect);
    }
    out.push(CheckResult::from_bound("coulomb-limit", worst, 1e-10));

    // cascade monotonicity on the BIon
    let rho = bion(4.0 * PI);
    let rows = approx::cascade_study(&rho, &[1, 2, 4, 8, 16, 32], &default_r_grid(&rho)).unwrap();
    let energies_ok = rows.windows(2).all(|w| w[1].energy > w[0].energy);
    let drop = rows[0].sup_distance / rows.last().unwrap().sup_distance;
    out.push(if energies_ok && drop >= 10.0 {
        CheckResult::pass(
            "cascade-monotone",
            format!("distance drop {drop:.1}x, energies increasing"),
        )
    } else {
        CheckResult::fail(
            "cascade-monotone",
            format!("energies_ok={energies_ok}, drop {drop:.2}x"),
        )
    });

    // truncated solve coincides with the exact one below the switch
    let rho = ball();
    let grid = default_r_grid(&rho);
    let exact = radial::solve_radial(&rho, &grid).unwrap();
    let trunc = approx::solve_radial_truncated(&rho, 0.9, 2, &grid).unwrap();
    let worst = exact
        .phi
        .iter()
        .zip(&trunc.phi)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    out.push(CheckResult::from_bound("truncated-agreement", worst, 1e-10));
}

fn mollify_suite(out: &mut Vec<CheckResult>) {
    let points = PointSet::origin(3, 4.0 * PI).unwrap();
    let eps_list = [0.4, 0.2, 0.1, 0.05];

    let mut worst = 0.0f64;
    for &eps in &eps_list {
        for kernel in [Kernel::Bump, Kernel::Gaussian] {
            let profile =
                mollify::radial_profile_from_points(&points, eps, kernel, 1025).unwrap();
            worst = worst.max((profile.total_charge() - 4.0 * PI).abs());
        }
    }
    out.push(CheckResult::from_bound("charge-conservation", worst, 1e-12));

    let dom = mollify::dominating_profile(&points, 0.4, 0.05, Kernel::Bump, 2049).unwrap();
    let mut excess = 0.0f64;
    for &eps in &eps_list {
        let profile = mollify::radial_profile_from_points(&points, eps, Kernel::Bump, 2049).unwrap();
        for i in 0..256 {
            let r = 0.4 * i as f64 / 255.0;
            excess = excess.max(profile.eval(r) - dom.eval(r) * (1.0 + 1e-9));
        }
    }
    out.push(CheckResult::from_bound("domination", excess.max(0.0), 1e-6));

    let rows = mollify::convergence_study_radial(&points, &eps_list, Kernel::Bump).unwrap();
    let decreasing = rows.windows(2).all(|w| w[1].sup_distance < w[0].sup_distance);
    let saturating = rows.last().unwrap().max_grad_near_charge > 0.99;
    out.push(if decreasing && saturating {
        CheckResult::pass(
            "mollified-convergence",
            format!(
                "final distance {:.3e}, edge slope {:.4}",
                rows.last().unwrap().sup_distance,
                rows.last().unwrap().max_grad_near_charge
            ),
        )
    } else {
        CheckResult::fail(
            "mollified-convergence",
            format!("decreasing={decreasing}, saturating={saturating}"),
        )
    });

    // |phi_eps| <= phi of the dominating density, nodewise
    let rho_dom = ChargeSpec::RadialProfile(dom);
    let phi_dom = radial::solve_radial(&rho_dom, &default_r_grid(&rho_dom)).unwrap();
    let mut violation = 0.0f64;
    for &eps in &eps_list {
        let rho = ChargeSpec::mollified(points.clone(), eps, Kernel::Bump).unwrap();
        let phi = radial::solve_radial(&rho, &default_r_grid(&rho)).unwrap();
        violation = violation.max(radial::comparison_violation(&phi, &phi_dom));
    }
    out.push(CheckResult::from_bound("dominated-potentials", violation, 1e-10));
}

fn grid_suite(out: &mut Vec<CheckResult>, seed: u64) {
    let params = GridSolveParams::default();

    // odd symmetry under charge negation
    let geom = GridGeom::centered_cube(3, 2.5, 12).unwrap();
    let mut blob = vec![0.0; geom.node_count()];
    for flat in 0..geom.node_count() {
        let x = geom.node_position(&geom.multi_index(flat));
        let d2: f64 = x.iter().map(|v| v * v).sum();
        blob[flat] = 1.5 * (-d2 / 0.5).exp();
    }
    let plus = ChargeSpec::GridDensity(GridSample::new(geom.clone(), blob.clone()).unwrap());
    let minus = ChargeSpec::GridDensity(
        GridSample::new(geom.clone(), blob.iter().map(|v| -v).collect()).unwrap(),
    );
    let (phi_p, report) = grid::solve_grid(&plus, &geom, &params).unwrap();
    let (phi_m, _) = grid::solve_grid(&minus, &geom, &params).unwrap();
    let worst = phi_p
        .values
        .iter()
        .zip(&phi_m.values)
        .map(|(a, b)| (a + b).abs())
        .fold(0.0f64, f64::max);
    out.push(CheckResult::from_bound("odd-symmetry", worst, 1e-12));
    out.push(CheckResult::from_bound(
        "energy-negativity",
        report.energy,
        -1e-12,
    ));
    let monotone = report
        .stage_energies
        .windows(2)
        .all(|w| w[1].1 >= w[0].1 - 1e-9);
    out.push(if monotone {
        CheckResult::pass(
            "monotone-continuation",
            format!("{} stages", report.stage_energies.len()),
        )
    } else {
        CheckResult::fail("monotone-continuation", "stage energies decreased".into())
    });

    // comparison principle on one ordered pair
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x04);
    let mut lo = vec![0.0; geom.node_count()];
    let center = [
        rng.gen_range(-0.5..0.5),
        rng.gen_range(-0.5..0.5),
        rng.gen_range(-0.5..0.5),
    ];
    for flat in 0..geom.node_count() {
        let x = geom.node_position(&geom.multi_index(flat));
        let d2: f64 = x.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum();
        lo[flat] = (-d2 / 0.4).exp();
    }
    let hi: Vec<f64> = lo
        .iter()
        .enumerate()
        .map(|(flat, v)| {
            let x = geom.node_position(&geom.multi_index(flat));
            let d2: f64 = x.iter().map(|v| v * v).sum();
            v + 0.7 * (-d2 / 0.6).exp()
        })
        .collect();
    let rho_lo = ChargeSpec::GridDensity(GridSample::new(geom.clone(), lo).unwrap());
    let rho_hi = ChargeSpec::GridDensity(GridSample::new(geom.clone(), hi).unwrap());
    let mut tight = params.clone();
    tight.newton_tol = 1e-12;
    let (phi_lo, _) = grid::solve_grid(&rho_lo, &geom, &tight).unwrap();
    let (phi_hi, _) = grid::solve_grid(&rho_hi, &geom, &tight).unwrap();
    let violation = phi_lo
        .values
        .iter()
        .zip(&phi_hi.values)
        .map(|(a, b)| a - b)
        .fold(0.0f64, f64::max);
    out.push(CheckResult::from_bound("grid-comparison", violation, 1e-10));

    // variational inequality against random spacelike fields
    let (phi, _) = grid::solve_grid(&plus, &geom, &params).unwrap();
    let mut worst_gap = f64::NEG_INFINITY;
    for _ in 0..10 {
        let mut psi = vec![0.0; geom.node_count()];
        let c = [
            rng.gen_range(-0.8..0.8),
            rng.gen_range(-0.8..0.8),
            rng.gen_range(-0.8..0.8),
        ];
        let amp = rng.gen_range(-0.3..0.3);
        for flat in 0..geom.node_count() {
            if geom.is_boundary(&geom.multi_index(flat)) {
                continue;
            }
            let x = geom.node_position(&geom.multi_index(flat));
            let d2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
            psi[flat] = amp * (-d2 / 0.5).exp();
        }
        let psi = GridPotential::new(geom.clone(), psi, LagrangianModel::Exact).unwrap();
        worst_gap = worst_gap.max(grid::variational_gap(&phi, &plus, &psi).unwrap());
    }
    out.push(CheckResult::from_bound("variational-inequality", worst_gap, 1e-6));

    // analytic gradients against central differences on a coarse lattice
    let small = GridGeom::centered_cube(3, 1.0, 6).unwrap();
    let mut rho_small = vec![0.0; small.node_count()];
    for flat in 0..small.node_count() {
        let x = small.node_position(&small.multi_index(flat));
        let d2: f64 = x.iter().map(|v| v * v).sum();
        rho_small[flat] = (-d2 / 0.3).exp();
    }
    let mut worst = 0.0f64;
    for model in [
        LagrangianModel::series(3).unwrap(),
        LagrangianModel::truncated(0.5, 2).unwrap(),
    ] {
        for _ in 0..5 {
            let mut phi = vec![0.0; small.node_count()];
            for flat in 0..small.node_count() {
                if !small.is_boundary(&small.multi_index(flat)) {
                    phi[flat] = 0.05 * rng.gen_range(-1.0..1.0);
                }
            }
            let grad = grid::discrete_gradient(&model, &small, &phi, &rho_small).unwrap();
            let dir: Vec<f64> = (0..small.node_count())
                .map(|flat| {
                    if small.is_boundary(&small.multi_index(flat)) {
                        0.0
                    } else {
                        rng.gen_range(-1.0..1.0)
                    }
                })
                .collect();
            let analytic: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
            let h = 1e-6;
            let plus_phi: Vec<f64> = phi.iter().zip(&dir).map(|(p, d)| p + h * d).collect();
            let minus_phi: Vec<f64> = phi.iter().zip(&dir).map(|(p, d)| p - h * d).collect();
            let fd = (grid::discrete_energy(&model, &small, &plus_phi, &rho_small).unwrap()
                - grid::discrete_energy(&model, &small, &minus_phi, &rho_small).unwrap())
                / (2.0 * h);
            worst = worst.max((analytic - fd).abs() / analytic.abs().max(1e-3));
        }
    }
    out.push(CheckResult::from_bound("gradient-check", worst, 1e-6));
}

fn bikg_suite(out: &mut Vec<CheckResult>) {
    let mut grid = vec![0.0];
    grid.extend(crate::quad::geometric_grid(1e-6, 1e3, 1024));
    let u = bikg::unit_mass_bump(3, 1.0, 257).unwrap();
    match bikg::solve_bikg_phi(&u, 1.0, &grid, 0.5, 200, 1e-10) {
        Ok(outcome) => {
            let mut worst_ratio = 0.0f64;
            for w in outcome.history.windows(2).skip(2) {
                if w[0].residual > 1e-13 {
                    worst_ratio = worst_ratio.max(w[1].residual / w[0].residual);
                }
            }
            out.push(CheckResult::from_bound("bikg-contraction", worst_ratio, 0.9));
            let sc = bikg::self_consistency_residual(&u, 1.0, &outcome.potential).unwrap();
            out.push(CheckResult::from_bound("bikg-self-consistency", sc, 1e-8));
            let monotone = outcome
                .history
                .windows(2)
                .all(|w| w[1].energy <= w[0].energy + 1e-10)
                && outcome.history.last().unwrap().energy < outcome.history[0].energy;
            out.push(if monotone {
                CheckResult::pass(
                    "bikg-energy-descent",
                    format!("{} iterations", outcome.iterations),
                )
            } else {
                CheckResult::fail("bikg-energy-descent", "energy increased".into())
            });
            let sign_ok = outcome.potential.phi.iter().all(|&v| v <= 1e-15);
            out.push(if sign_ok {
                CheckResult::pass("bikg-sign", "phi <= 0 nodewise".into())
            } else {
                CheckResult::fail("bikg-sign", "positive node value".into())
            });
        }
        Err(e) => out.push(CheckResult::fail("bikg-contraction", e.to_string())),
    }

    // energies computed for the zero matter field are exactly zero
    let zero_u = RadialDensity::new(3, vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
    let phi0 = crate::potential::RadialPotential::zero(3, grid).unwrap();
    let e = bikg::eu_energy(&zero_u, 1.0, &phi0).unwrap();
    out.push(CheckResult::from_bound("bikg-zero-energy", e.abs(), 0.0));

    // the energy functional rejects superluminal slopes
    let bad = crate::potential::RadialPotential::new(
        3,
        vec![0.0, 1.0, 2.0],
        vec![1.5, 0.0, 0.0],
        vec![-1.5, -1.5, 0.0],
        0.0,
        0.0,
        false,
    )
    .unwrap();
    out.push(match bikg::eu_energy(&zero_u, 1.0, &bad) {
        Err(_) => CheckResult::pass("bikg-domain-guard", "superluminal slope rejected".into()),
        Ok(v) => CheckResult::fail("bikg-domain-guard", format!("accepted with energy {v}")),
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inequality_suite_passes() {
        let results = run_suite(Suite::Inequalities, 1234);
        for r in &results {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }

    #[test]
    fn suite_is_deterministic() {
        let a = run_suite(Suite::Inequalities, 99);
        let b = run_suite(Suite::Inequalities, 99);
        let fmt = |v: &[CheckResult]| {
            v.iter()
                .map(|r| format!("{}|{}|{}", r.name, r.passed, r.detail))
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(fmt(&a), fmt(&b));
    }

    #[test]
    fn unknown_suite_name_is_rejected() {
        assert!("nonsense".parse::<Suite>().is_err());
        assert!(matches!("all".parse::<Suite>(), Ok(Suite::All)));
    }
}
