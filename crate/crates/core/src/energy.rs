//! Duality pairing <rho, phi> and the action-functional energy
//! I(phi) = int V(|grad phi|^2) dx - <rho, phi> for radial and grid
//! potentials.

use crate::charge::ChargeSpec;
use crate::error::{Error, Result};
use crate::lagrangian::LagrangianModel;
use crate::mollify;
use crate::potential::{GridPotential, RadialPotential};
use crate::quad::{gl8, merge_grids, unit_sphere_measure};

/// Resolution used when a mollified point set must be expanded into a radial
/// profile on the fly.
const MOLLIFY_PROFILE_NODES: usize = 1025;

/// Rounding slack on the light cone: saturated solutions store slopes whose
/// square evaluates to 1 in f64, and interpolating between their samples
/// can overshoot by about ulp(phi)/h. On the closed cone (within the slack)
/// the integrand's continuous extension is exactly 1; squared gradients
/// beyond it are genuine domain violations and stay hard errors.
const SATURATION_SLACK: f64 = 1e-6;

/// Exact integrand extended continuously onto the closed light cone.
fn exact_value_extended(t: f64) -> Result<f64> {
    if t <= 1.0 - crate::lagrangian::EXACT_GUARD {
        Ok(t / (1.0 + (1.0 - t).sqrt()))
    } else if t <= 1.0 + SATURATION_SLACK {
        Ok(1.0)
    } else {
        Err(Error::Domain(format!(
            "exact integrand rejected t = {t} beyond the light cone"
        )))
    }
}

/// Duality pairing <rho, phi> for a radial potential.
///
/// Point charges must sit at the origin; radially incompatible descriptions
/// are rejected (use the grid pairing for those).
pub fn pairing_radial(rho: &ChargeSpec, phi: &RadialPotential) -> Result<f64> {
    match rho {
        ChargeSpec::PointCharges(points) => {
            if !points.all_at_origin() {
                return Err(Error::Charge(
                    "radial pairing requires all point charges at the origin".into(),
                ));
            }
            Ok(points.total_intensity() * phi.value_at(0.0))
        }
        ChargeSpec::RadialProfile(profile) => {
            if profile.dim != phi.dim {
                return Err(Error::Geometry("dimension mismatch in radial pairing".into()));
            }
            if profile.support_end() > phi.last_radius() * (1.0 + 1e-12) {
                return Err(Error::Geometry(
                    "charge support extends past the potential grid".into(),
                ));
            }
            let omega = unit_sphere_measure(profile.dim);
            let pow = profile.dim as i32 - 1;
            // integrate on the union of both break point sets so every
            // panel sees a smooth integrand
            let end = profile.support_end();
            let rho_grid: Vec<f64> = std::iter::once(0.0)
                .chain(profile.grid.iter().copied())
                .collect();
            let phi_grid: Vec<f64> = phi
                .r_grid
                .iter()
                .copied()
                .filter(|&r| r <= end)
                .collect();
            let grid = merge_grids(&rho_grid, &phi_grid);
            let mut total = 0.0;
            for w in grid.windows(2) {
                total += gl8(
                    |r| profile.eval(r) * phi.value_at(r) * r.powi(pow),
                    w[0],
                    w[1],
                );
            }
            Ok(omega * total)
        }
        ChargeSpec::MollifiedPoints { base, width, kernel } => {
            if !base.all_at_origin() {
                return Err(Error::Charge(
                    "radial pairing requires origin-centered mollified charges".into(),
                ));
            }
            let profile =
                mollify::radial_profile_from_points(base, *width, *kernel, MOLLIFY_PROFILE_NODES)?;
            pairing_radial(&ChargeSpec::RadialProfile(profile), phi)
        }
        ChargeSpec::GridDensity(_) => Err(Error::Charge(
            "grid densities pair with grid potentials, not radial ones".into(),
        )),
    }
}

/// Duality pairing <rho, phi> for a grid potential.
pub fn pairing_grid(rho: &ChargeSpec, phi: &GridPotential) -> Result<f64> {
    match rho {
        ChargeSpec::PointCharges(points) => {
            let mut sum = 0.0;
            for c in &points.charges {
                sum += c.intensity * phi.value_at(&c.position)?;
            }
            Ok(sum)
        }
        ChargeSpec::GridDensity(sample) => {
            if !sample.geom.matches(&phi.geom) {
                return Err(Error::Geometry(
                    "density and potential lattices disagree".into(),
                ));
            }
            let cell = phi.geom.spacing.powi(phi.geom.ndim() as i32);
            Ok(cell
                * sample
                    .values
                    .iter()
                    .zip(&phi.values)
                    .map(|(r, p)| r * p)
                    .sum::<f64>())
        }
        ChargeSpec::MollifiedPoints { base, width, kernel } => {
            let values = mollify::rasterize_points(base, *width, *kernel, &phi.geom)?;
            let cell = phi.geom.spacing.powi(phi.geom.ndim() as i32);
            Ok(cell
                * values
                    .iter()
                    .zip(&phi.values)
                    .map(|(r, p)| r * p)
                    .sum::<f64>())
        }
        ChargeSpec::RadialProfile(profile) => {
            let cell = phi.geom.spacing.powi(phi.geom.ndim() as i32);
            let mut sum = 0.0;
            for flat in 0..phi.geom.node_count() {
                let x = phi.geom.node_position(&phi.geom.multi_index(flat));
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                sum += profile.eval(r) * phi.values[flat];
            }
            Ok(cell * sum)
        }
    }
}

/// Energy I(phi) of a radial potential under the given integrand model.
///
/// The gradient integral runs Gauss-Legendre panels over the potential grid
/// and appends the analytic far-field contribution
/// m_infinity^2 R^{2-N} / (2 (N-2)); model differences beyond that order are
/// below 1e-15 at the default grid extents.
pub fn energy_radial(
    model: &LagrangianModel,
    rho: &ChargeSpec,
    phi: &RadialPotential,
) -> Result<f64> {
    let omega = unit_sphere_measure(phi.dim);
    let pow = phi.dim as i32 - 1;
    let mut integral = 0.0;
    for w in phi.r_grid.windows(2) {
        // errors inside the closure are latched and re-raised after the panel
        let mut bad: Option<Error> = None;
        let v = gl8(
            |r| {
                let s = phi.slope_at(r);
                let t = s * s;
                let value = match model {
                    LagrangianModel::Exact => exact_value_extended(t),
                    _ => model.value(t),
                };
                match value {
                    Ok(v) => v * r.powi(pow),
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
        integral += v;
    }
    let rmax = phi.last_radius();
    let n = phi.dim as f64;
    let tail = phi.total_moment * phi.total_moment * rmax.powf(2.0 - n) / (2.0 * (n - 2.0));
    Ok(omega * (integral + tail) - pairing_radial(rho, phi)?)
}

/// Energy I(phi) of a grid potential: cell-summed integrand minus pairing.
pub fn energy_grid(
    model: &LagrangianModel,
    rho: &ChargeSpec,
    phi: &GridPotential,
) -> Result<f64> {
    let nd = phi.geom.ndim();
    let cell = phi.geom.spacing.powi(nd as i32);
    let mut g = vec![0.0; nd];
    let mut sum = 0.0;
    for base in phi.geom.cell_base_indices() {
        phi.cell_gradient(base, &mut g);
        let t: f64 = g.iter().map(|v| v * v).sum();
        sum += model.value(t)?;
    }
    Ok(cell * sum - pairing_grid(rho, phi)?)
}

/// Differentiable discretization of the radial energy with node unknowns:
/// per-interval forward-difference gradients against exact shell weights,
/// and a fixed pairing functional assembled from hat functions.
///
/// This is the 1-d analogue of the grid solver's discrete energy; its
/// analytic gradient is what the finite-difference checks exercise.
pub struct RadialDiscretization {
    pub dim: usize,
    pub r_grid: Vec<f64>,
    shell_weights: Vec<f64>,
    pairing_weights: Vec<f64>,
}

impl RadialDiscretization {
    pub fn new(dim: usize, r_grid: Vec<f64>, rho: &ChargeSpec) -> Result<Self> {
        if r_grid.len() < 2 || r_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("radial mesh must ascend strictly".into()));
        }
        let omega = unit_sphere_measure(dim);
        let n = dim as i32;
        let shell_weights: Vec<f64> = r_grid
            .windows(2)
            .map(|w| omega * (w[1].powi(n) - w[0].powi(n)) / n as f64)
            .collect();
        // pairing weights p_j = omega int rho(r) hat_j(r) r^{N-1} dr
        let mut pairing_weights = vec![0.0; r_grid.len()];
        match rho {
            ChargeSpec::PointCharges(points) => {
                if !points.all_at_origin() {
                    return Err(Error::Charge(
                        "radial discretization needs origin-centered charges".into(),
                    ));
                }
                pairing_weights[0] = points.total_intensity();
            }
            ChargeSpec::RadialProfile(profile) => {
                for j in 0..r_grid.len() {
                    let mut p = 0.0;
                    if j > 0 {
                        let (a, b) = (r_grid[j - 1], r_grid[j]);
                        p += gl8(
                            |r| profile.eval(r) * (r - a) / (b - a) * r.powi(n - 1),
                            a,
                            b,
                        );
                    }
                    if j + 1 < r_grid.len() {
                        let (a, b) = (r_grid[j], r_grid[j + 1]);
                        p += gl8(
                            |r| profile.eval(r) * (b - r) / (b - a) * r.powi(n - 1),
                            a,
                            b,
                        );
                    }
                    pairing_weights[j] = omega * p;
                }
            }
            _ => {
                return Err(Error::Charge(
                    "radial discretization accepts profiles or origin charges".into(),
                ))
            }
        }
        Ok(RadialDiscretization {
            dim,
            r_grid,
            shell_weights,
            pairing_weights,
        })
    }

    pub fn energy(&self, model: &LagrangianModel, phi: &[f64]) -> Result<f64> {
        let mut e = 0.0;
        for (i, w) in self.r_grid.windows(2).enumerate() {
            let g = (phi[i + 1] - phi[i]) / (w[1] - w[0]);
            e += self.shell_weights[i] * model.value(g * g)?;
        }
        let pairing: f64 = self
            .pairing_weights
            .iter()
            .zip(phi)
            .map(|(p, v)| p * v)
            .sum();
        Ok(e - pairing)
    }

    pub fn gradient(&self, model: &LagrangianModel, phi: &[f64]) -> Result<Vec<f64>> {
        let mut grad: Vec<f64> = self.pairing_weights.iter().map(|p| -p).collect();
        for (i, w) in self.r_grid.windows(2).enumerate() {
            let dr = w[1] - w[0];
            let g = (phi[i + 1] - phi[i]) / dr;
            let flux = self.shell_weights[i] * model.dvalue(g * g)? * 2.0 * g / dr;
            grad[i] -= flux;
            grad[i + 1] += flux;
        }
        Ok(grad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charge::{PointSet, RadialDensity};
    use crate::quad::geometric_grid;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn unit_ball_charge() -> ChargeSpec {
        ChargeSpec::RadialProfile(RadialDensity::uniform_ball(3, 1.0, 1.0).unwrap())
    }

    fn constant_potential(c: f64, rmax: f64) -> RadialPotential {
        // constant c out to rmax then abruptly... constant with zero slope;
        // only used inside the charge support for pairing tests
        RadialPotential::new(
            3,
            vec![0.0, rmax / 2.0, rmax],
            vec![c, c, c],
            vec![0.0, 0.0, 0.0],
            0.0,
            0.0,
            false,
        )
        .unwrap()
    }

    #[test]
    fn pairing_of_zero_charge_vanishes() {
        let zero = ChargeSpec::RadialProfile(
            RadialDensity::new(3, vec![0.0, 1.0], vec![0.0, 0.0]).unwrap(),
        );
        let phi = constant_potential(0.7, 4.0);
        assert_eq!(pairing_radial(&zero, &phi).unwrap(), 0.0);
    }

    #[test]
    fn pairing_with_origin_point_charge_samples_phi_at_zero() {
        let rho = ChargeSpec::PointCharges(PointSet::origin(3, 1.0).unwrap());
        let phi = constant_potential(0.3, 4.0);
        assert_relative_eq!(pairing_radial(&rho, &phi).unwrap(), 0.3, max_relative = 1e-15);
    }

    #[test]
    fn pairing_rejects_off_center_points_for_radial_potentials() {
        let off = PointSet::new(
            3,
            vec![crate::charge::PointCharge {
                position: vec![0.5, 0.0, 0.0],
                intensity: 1.0,
            }],
        )
        .unwrap();
        let phi = constant_potential(0.3, 4.0);
        assert!(pairing_radial(&ChargeSpec::PointCharges(off), &phi).is_err());
    }

    #[test]
    fn pairing_uniform_ball_against_constant_is_volume_times_c() {
        // omega_3 int_0^1 r^2 dr * c = (4 pi / 3) c; midpoint-rule oracle below
        let rho = unit_ball_charge();
        let c = 0.37;
        let phi = constant_potential(c, 4.0);
        let got = pairing_radial(&rho, &phi).unwrap();
        let exact = c * 4.0 * std::f64::consts::PI / 3.0;
        assert_relative_eq!(got, exact, max_relative = 1e-13);

        let n = 2_000_000;
        let h = 1.0 / n as f64;
        let mut oracle = 0.0;
        for i in 0..n {
            let r = (i as f64 + 0.5) * h;
            oracle += r * r * h;
        }
        oracle *= 4.0 * std::f64::consts::PI * c;
        assert_relative_eq!(got, oracle, max_relative = 1e-10);
    }

    #[test]
    fn energy_of_zero_potential_is_zero() {
        let rho = unit_ball_charge();
        let phi = RadialPotential::zero(3, vec![0.0, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!(
            energy_radial(&LagrangianModel::Exact, &rho, &phi).unwrap(),
            0.0
        );
    }

    #[test]
    fn energy_with_zero_charge_dominates_half_dirichlet() {
        // I(phi) >= 0.5 ||grad phi||_2^2 when rho = 0, for any weakly
        // spacelike phi (lower bound of the integrand comparison)
        let zero = ChargeSpec::RadialProfile(
            RadialDensity::new(3, vec![0.0, 1.0], vec![0.0, 0.0]).unwrap(),
        );
        // tent with slope -0.6 on [0, 1], zero after
        let grid = vec![0.0, 0.5, 1.0, 2.0];
        let phi = RadialPotential::new(
            3,
            grid,
            vec![0.6, 0.3, 0.0, 0.0],
            vec![-0.6, -0.6, 0.0, 0.0],
            0.0,
            0.0,
            false,
        )
        .unwrap();
        let e = energy_radial(&LagrangianModel::Exact, &zero, &phi).unwrap();
        // 0.5 * omega_3 * int_0^1 0.36 r^2 dr = 0.5 * 4 pi * 0.12
        let half_dirichlet = 0.5 * 4.0 * std::f64::consts::PI * 0.12;
        assert!(e > 0.0);
        assert!(e >= half_dirichlet * (1.0 - 1e-6));
    }

    #[test]
    fn exact_energy_rejects_super_luminal_samples() {
        let rho = unit_ball_charge();
        let phi = RadialPotential::new(
            3,
            vec![0.0, 1.0, 2.0],
            vec![1.5, 0.0, 0.0],
            vec![-1.5, -1.5, 0.0],
            0.0,
            0.0,
            false,
        )
        .unwrap();
        assert!(energy_radial(&LagrangianModel::Exact, &rho, &phi).is_err());
        // the same samples are fine for a series model
        assert!(energy_radial(&LagrangianModel::series(2).unwrap(), &rho, &phi).is_ok());
    }

    #[test]
    fn discrete_energy_gradient_matches_central_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let rho = unit_ball_charge();
        let grid = geometric_grid(0.05, 8.0, 24);
        let mesh = RadialDiscretization::new(3, grid.clone(), &rho).unwrap();
        for model in [
            LagrangianModel::series(3).unwrap(),
            LagrangianModel::truncated(0.5, 2).unwrap(),
        ] {
            for _ in 0..5 {
                let phi: Vec<f64> = (0..grid.len())
                    .map(|_| 0.05 * rng.gen_range(-1.0..1.0))
                    .collect();
                let grad = mesh.gradient(&model, &phi).unwrap();
                let dir: Vec<f64> = (0..grid.len())
                    .map(|_| rng.gen_range(-1.0..1.0))
                    .collect();
                let analytic: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
                let h = 1e-6;
                let mut plus = phi.clone();
                let mut minus = phi.clone();
                for j in 0..phi.len() {
                    plus[j] += h * dir[j];
                    minus[j] -= h * dir[j];
                }
                let fd = (mesh.energy(&model, &plus).unwrap()
                    - mesh.energy(&model, &minus).unwrap())
                    / (2.0 * h);
                assert_relative_eq!(analytic, fd, max_relative = 1e-6);
            }
        }
    }
}
