//! Numerical laboratory for the electrostatic Born-Infeld equation
//!
//!   -div( grad phi / sqrt(1 - |grad phi|^2) ) = rho  in R^N,  phi -> 0,
//!
//! the gradient-constrained replacement of the Poisson equation that keeps
//! point-charge field energies finite.
//!
//! The crate provides:
//!
//! - [`radial`]: an exact solver for radially distributed charges built on
//!   the first integral of the radial flux, including point charges at the
//!   origin (BIons), with regularity and weak-form diagnostics;
//! - [`grid`]: a constrained convex finite-difference minimizer on a
//!   truncated box (damped Newton with continuation over smoothed
//!   integrands), plus light-cone diagnostics between point charges;
//! - [`approx`]: the two approximation cascades in radial geometry, series
//!   functionals of increasing order and the C^1-truncated functional;
//! - [`mollify`]: mollification of point charges and convergence studies
//!   toward the singular limit;
//! - [`bikg`]: the coupled Born-Infeld/Klein-Gordon potential equation for
//!   a fixed matter profile;
//! - [`checks`]: runnable property suites over all of the above.
//!
//! Conventions: the light-speed scale is fixed to 1, omega_N denotes the
//! measure of the unit (N-1)-sphere, N >= 3 throughout, and point-charge
//! intensities a_i are the distributional coefficients in
//! <rho, psi> = sum a_i psi(x_i).
//!
//! All public types are immutable after construction and every operation is
//! a pure function; concurrent solves of distinct problems are safe.

pub mod approx;
pub mod bikg;
pub mod charge;
pub mod checks;
pub mod energy;
pub mod error;
pub mod geom;
pub mod grid;
pub mod lagrangian;
pub mod mollify;
pub mod potential;
pub mod quad;
pub mod radial;
pub mod report;

pub use charge::{ChargeSpec, GridSample, Kernel, PointCharge, PointSet, RadialDensity};
pub use error::{Error, Result};
pub use geom::GridGeom;
pub use lagrangian::{lagrangian_value, series_coefficients, truncation_match, LagrangianModel};
pub use potential::{GridPotential, RadialPotential};
pub use report::SolveReport;
