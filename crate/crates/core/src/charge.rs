//! Charge density descriptions accepted by the solvers.

use crate::error::{Error, Result};
use crate::geom::GridGeom;
use crate::quad::unit_sphere_measure;

/// Mollification kernel shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// exp(-|x|^2 / (2 eps^2)) scaled to unit mass; truncated at 8.5 eps
    /// where the remaining mass is below 1e-16.
    Gaussian,
    /// exp(-1 / (1 - |x/eps|^2)) on the open ball of radius eps, scaled to
    /// unit mass; identically zero outside.
    Bump,
}

impl Kernel {
    /// Unnormalized radial shape k(r / eps).
    pub fn shape(&self, z: f64) -> f64 {
        match self {
            Kernel::Gaussian => (-0.5 * z * z).exp(),
            Kernel::Bump => {
                if z.abs() < 1.0 {
                    (-1.0 / (1.0 - z * z)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// Support radius in units of eps (truncation radius for the Gaussian).
    pub fn support_factor(&self) -> f64 {
        match self {
            Kernel::Gaussian => 8.5,
            Kernel::Bump => 1.0,
        }
    }
}

/// Radial density profile: piecewise linear between the sample nodes,
/// constant `values[0]` on [0, grid[0]], identically zero past the last node.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialDensity {
    pub dim: usize,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialDensity {
    pub fn new(dim: usize, grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if dim < 3 {
            return Err(Error::Charge(format!("dimension must be at least 3, got {dim}")));
        }
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(Error::Charge(
                "radial profile needs matching grid/value samples (at least 2)".into(),
            ));
        }
        if grid[0] < 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Charge(
                "radial profile grid must be nonnegative and strictly ascending".into(),
            ));
        }
        if grid.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Charge("radial profile samples must be finite".into()));
        }
        Ok(RadialDensity { dim, grid, values })
    }

    /// Uniform density on the ball of radius `r` (value `density` inside).
    pub fn uniform_ball(dim: usize, r: f64, density: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::Charge(format!("ball radius must be positive, got {r}")));
        }
        RadialDensity::new(dim, vec![0.0, r], vec![density, density])
    }

    pub fn support_end(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= self.grid[0] {
            return self.values[0];
        }
        if r > self.support_end() {
            return 0.0;
        }
        let j = match self
            .grid
            .binary_search_by(|g| g.partial_cmp(&r).unwrap())
        {
            Ok(j) => return self.values[j],
            Err(j) => j - 1,
        };
        let w = (r - self.grid[j]) / (self.grid[j + 1] - self.grid[j]);
        self.values[j] * (1.0 - w) + self.values[j + 1] * w
    }

    /// Exact integral of rho(r) r^{dim-1} over [a, b] for the piecewise-linear
    /// profile (the weighted-trapezoid rule that is exact on the interpolant).
    pub fn moment_integral(&self, a: f64, b: f64) -> f64 {
        debug_assert!(b >= a && a >= 0.0);
        let end = self.support_end();
        let b = b.min(end);
        if b <= a {
            return 0.0;
        }
        let mut total = 0.0;
        let mut lo = a;
        // flat head segment [0, grid[0]]
        if lo < self.grid[0] {
            let hi = b.min(self.grid[0]);
            total += segment_moment(self.values[0], 0.0, lo, hi, self.dim);
            lo = hi;
        }
        if lo >= b {
            return total;
        }
        // interior linear segments
        let start = match self
            .grid
            .binary_search_by(|g| g.partial_cmp(&lo).unwrap())
        {
            Ok(j) => j,
            Err(j) => j.saturating_sub(1),
        };
        for j in start..self.grid.len() - 1 {
            let (g0, g1) = (self.grid[j], self.grid[j + 1]);
            if g0 >= b {
                break;
            }
            let (s0, s1) = (lo.max(g0), b.min(g1));
            if s1 <= s0 {
                continue;
            }
            let slope = (self.values[j + 1] - self.values[j]) / (g1 - g0);
            let intercept = self.values[j] - slope * g0;
            total += segment_moment(intercept, slope, s0, s1, self.dim);
        }
        total
    }

    /// Total moment integral over the support: int_0^inf rho r^{dim-1} dr.
    pub fn total_moment(&self) -> f64 {
        self.moment_integral(0.0, self.support_end())
    }

    /// Total charge omega_N * total_moment.
    pub fn total_charge(&self) -> f64 {
        unit_sphere_measure(self.dim) * self.total_moment()
    }
}

/// int_a^b (c0 + c1 r) r^{N-1} dr in closed form.
fn segment_moment(c0: f64, c1: f64, a: f64, b: f64, dim: usize) -> f64 {
    let n = dim as i32;
    c0 * (b.powi(n) - a.powi(n)) / n as f64
        + c1 * (b.powi(n + 1) - a.powi(n + 1)) / (n + 1) as f64
}

/// A single point charge.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCharge {
    pub position: Vec<f64>,
    pub intensity: f64,
}

/// Superposition of point charges; the intensity a_i is the distributional
/// coefficient in <rho, psi> = sum a_i psi(x_i).
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub dim: usize,
    pub charges: Vec<PointCharge>,
}

impl PointSet {
    pub fn new(dim: usize, charges: Vec<PointCharge>) -> Result<Self> {
        if dim < 3 {
            return Err(Error::Charge(format!("dimension must be at least 3, got {dim}")));
        }
        for c in &charges {
            if c.position.len() != dim {
                return Err(Error::Charge("point position has wrong dimension".into()));
            }
            if c.intensity == 0.0 || !c.intensity.is_finite() {
                return Err(Error::Charge("point intensities must be finite and nonzero".into()));
            }
            if c.position.iter().any(|v| !v.is_finite()) {
                return Err(Error::Charge("point positions must be finite".into()));
            }
        }
        for i in 0..charges.len() {
            for j in i + 1..charges.len() {
                let d2: f64 = charges[i]
                    .position
                    .iter()
                    .zip(&charges[j].position)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if d2 == 0.0 {
                    return Err(Error::Charge("point positions must be pairwise distinct".into()));
                }
            }
        }
        Ok(PointSet { dim, charges })
    }

    /// Single charge of intensity `a` at the origin.
    pub fn origin(dim: usize, a: f64) -> Result<Self> {
        PointSet::new(
            dim,
            vec![PointCharge {
                position: vec![0.0; dim],
                intensity: a,
            }],
        )
    }

    pub fn total_intensity(&self) -> f64 {
        self.charges.iter().map(|c| c.intensity).sum()
    }

    /// True when every charge sits at the origin (radial machinery only
    /// accepts such sets).
    pub fn all_at_origin(&self) -> bool {
        self.charges
            .iter()
            .all(|c| c.position.iter().all(|&v| v == 0.0))
    }
}

/// Density samples on a node lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSample {
    pub geom: GridGeom,
    pub values: Vec<f64>,
}

impl GridSample {
    pub fn new(geom: GridGeom, values: Vec<f64>) -> Result<Self> {
        if values.len() != geom.node_count() {
            return Err(Error::Geometry(format!(
                "grid density has {} samples for {} nodes",
                values.len(),
                geom.node_count()
            )));
        }
        if geom.ndim() < 3 {
            return Err(Error::Charge("dimension must be at least 3".into()));
        }
        Ok(GridSample { geom, values })
    }

    /// Total charge h^N * sum of node values.
    pub fn total_charge(&self) -> f64 {
        let cell = self.geom.spacing.powi(self.geom.ndim() as i32);
        cell * self.values.iter().sum::<f64>()
    }
}

/// Tagged description of a charge density.
#[derive(Debug, Clone, PartialEq)]
pub enum ChargeSpec {
    RadialProfile(RadialDensity),
    PointCharges(PointSet),
    GridDensity(GridSample),
    MollifiedPoints {
        base: PointSet,
        width: f64,
        kernel: Kernel,
    },
}

impl ChargeSpec {
    pub fn mollified(base: PointSet, width: f64, kernel: Kernel) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::Charge(format!(
                "mollification width must be positive, got {width}"
            )));
        }
        Ok(ChargeSpec::MollifiedPoints { base, width, kernel })
    }

    pub fn dim(&self) -> usize {
        match self {
            ChargeSpec::RadialProfile(p) => p.dim,
            ChargeSpec::PointCharges(p) => p.dim,
            ChargeSpec::GridDensity(g) => g.geom.ndim(),
            ChargeSpec::MollifiedPoints { base, .. } => base.dim,
        }
    }

    /// Characteristic length of the charge support, used to size default grids.
    pub fn support_scale(&self) -> f64 {
        match self {
            ChargeSpec::RadialProfile(p) => p.support_end().max(1e-3),
            ChargeSpec::PointCharges(_) => 1.0,
            ChargeSpec::GridDensity(g) => {
                let hi = g.geom.upper_corner();
                hi.iter()
                    .zip(&g.geom.origin)
                    .map(|(h, l)| (h - l) / 2.0)
                    .fold(0.0f64, f64::max)
            }
            ChargeSpec::MollifiedPoints { base, width, kernel } => {
                let reach = width * kernel.support_factor();
                let far = base
                    .charges
                    .iter()
                    .flat_map(|c| c.position.iter())
                    .fold(0.0f64, |acc, &v| acc.max(v.abs()));
                (far + reach).max(1.0)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ChargeSpec::RadialProfile(p) => p.values.iter().all(|&v| v == 0.0),
            ChargeSpec::PointCharges(p) => p.charges.is_empty(),
            ChargeSpec::GridDensity(g) => g.values.iter().all(|&v| v == 0.0),
            ChargeSpec::MollifiedPoints { base, .. } => base.charges.is_empty(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn profile_validation() {
        assert!(RadialDensity::new(2, vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(RadialDensity::new(3, vec![1.0, 0.5], vec![1.0, 1.0]).is_err());
        assert!(RadialDensity::new(3, vec![0.0, 1.0], vec![f64::NAN, 1.0]).is_err());
        assert!(RadialDensity::new(3, vec![0.0, 1.0], vec![1.0, 1.0]).is_ok());
    }

    #[test]
    fn ball_moment_is_exact() {
        let ball = RadialDensity::uniform_ball(3, 1.0, 1.0).unwrap();
        // int_0^R r^2 dr = R^3/3, exactly representable by the closed form
        assert_relative_eq!(ball.moment_integral(0.0, 0.5), 0.125 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(ball.moment_integral(0.0, 1.0), 1.0 / 3.0, max_relative = 1e-15);
        assert_eq!(ball.moment_integral(1.0, 5.0), 0.0);
        assert_relative_eq!(
            ball.total_charge(),
            4.0 * std::f64::consts::PI / 3.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn profile_eval_interpolates() {
        let p = RadialDensity::new(3, vec![0.5, 1.0, 2.0], vec![2.0, 1.0, 0.0]).unwrap();
        assert_eq!(p.eval(0.1), 2.0); // flat head
        assert_eq!(p.eval(0.75), 1.5);
        assert_eq!(p.eval(3.0), 0.0);
    }

    #[test]
    fn point_set_validation() {
        assert!(PointSet::origin(3, 1.0).is_ok());
        assert!(PointSet::origin(3, 0.0).is_err());
        let dup = PointSet::new(
            3,
            vec![
                PointCharge {
                    position: vec![0.0; 3],
                    intensity: 1.0,
                },
                PointCharge {
                    position: vec![0.0; 3],
                    intensity: 2.0,
                },
            ],
        );
        assert!(dup.is_err());
    }

    #[test]
    fn mollified_width_must_be_positive() {
        let p = PointSet::origin(3, 1.0).unwrap();
        assert!(ChargeSpec::mollified(p.clone(), 0.0, Kernel::Bump).is_err());
        assert!(ChargeSpec::mollified(p, 0.1, Kernel::Bump).is_ok());
    }
}
