//! Lagrangian integrand variants: the exact Born-Infeld density
//! V(t) = 1 - sqrt(1 - t) of t = |grad phi|^2, its finite-order power-series
//! truncations, and the C^1 polynomial-tail surgery of the singular branch.
//!
//! All three variants share the conventions V(0) = 0 and V'(0) = 1/2, so
//! every model reduces to the Coulomb density t/2 for weak fields.

use crate::error::{Error, Result};

/// Which integrand is active in an energy evaluation or a solve.
#[derive(Debug, Clone, PartialEq)]
pub enum LagrangianModel {
    /// V(t) = 1 - sqrt(1 - t), defined for t in [0, 1].
    Exact,
    /// V(t) = sum_{h=1..n} (alpha_h / 2h) t^h with the expansion coefficients
    /// alpha_1..alpha_n; defined for all t >= 0.
    Series { coefficients: Vec<f64> },
    /// V(t) = A_theta(t)/2 where A_theta integrates the slope profile
    /// a_theta: exact branch (1-s)^{-1/2} up to s = 1-theta, then the C^1
    /// matched tail gamma s^{n-1} + delta; defined for all t >= 0.
    Truncated {
        theta: f64,
        power: usize,
        gamma: f64,
        delta: f64,
    },
}

/// Guard band of the exact model near the light cone: arguments with
/// t > 1 - EXACT_GUARD are rejected rather than clamped.
pub const EXACT_GUARD: f64 = 1e-14;

impl LagrangianModel {
    /// Series model of order `n` with coefficients from [`series_coefficients`].
    pub fn series(n: usize) -> Result<Self> {
        Ok(LagrangianModel::Series {
            coefficients: series_coefficients(n)?,
        })
    }

    /// Truncated model with the C^1 matched tail from [`truncation_match`].
    pub fn truncated(theta: f64, power: usize) -> Result<Self> {
        let (gamma, delta) = truncation_match(theta, power)?;
        Ok(LagrangianModel::Truncated {
            theta,
            power,
            gamma,
            delta,
        })
    }

    /// Integrand value V(t) at t = |grad phi|^2.
    pub fn value(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("negative squared gradient t = {t}")));
        }
        match self {
            LagrangianModel::Exact => {
                if t > 1.0 - EXACT_GUARD {
                    return Err(Error::Domain(format!(
                        "exact integrand rejected t = {t} beyond the light-cone guard"
                    )));
                }
                // 1 - sqrt(1-t) = t / (1 + sqrt(1-t)), stable for small t
                Ok(t / (1.0 + (1.0 - t).sqrt()))
            }
            LagrangianModel::Series { coefficients } => {
                // Horner over C_h = alpha_h / 2h
                let n = coefficients.len();
                let mut acc = 0.0;
                for h in (1..=n).rev() {
                    acc = acc * t + coefficients[h - 1] / (2.0 * h as f64);
                }
                Ok(acc * t)
            }
            LagrangianModel::Truncated {
                theta,
                power,
                gamma,
                delta,
            } => {
                let s_star = 1.0 - theta;
                if t <= s_star {
                    Ok(t / (1.0 + (1.0 - t).sqrt()))
                } else {
                    let n = *power as f64;
                    let head = 2.0 * (1.0 - theta.sqrt());
                    let tail =
                        gamma * (t.powi(*power as i32) - s_star.powi(*power as i32)) / n
                            + delta * (t - s_star);
                    Ok(0.5 * (head + tail))
                }
            }
        }
    }

    /// First derivative V'(t).
    pub fn dvalue(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("negative squared gradient t = {t}")));
        }
        match self {
            LagrangianModel::Exact => {
                if t > 1.0 - EXACT_GUARD {
                    return Err(Error::Domain(format!(
                        "exact integrand rejected t = {t} beyond the light-cone guard"
                    )));
                }
                Ok(0.5 / (1.0 - t).sqrt())
            }
            LagrangianModel::Series { coefficients } => {
                let n = coefficients.len();
                let mut acc = 0.0;
                for h in (1..=n).rev() {
                    acc = acc * t + 0.5 * coefficients[h - 1];
                }
                Ok(acc)
            }
            LagrangianModel::Truncated { .. } => Ok(0.5 * self.slope_profile(t)),
        }
    }

    /// Second derivative V''(t).
    pub fn ddvalue(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("negative squared gradient t = {t}")));
        }
        match self {
            LagrangianModel::Exact => {
                if t > 1.0 - EXACT_GUARD {
                    return Err(Error::Domain(format!(
                        "exact integrand rejected t = {t} beyond the light-cone guard"
                    )));
                }
                Ok(0.25 / (1.0 - t).powf(1.5))
            }
            LagrangianModel::Series { coefficients } => {
                let n = coefficients.len();
                let mut acc = 0.0;
                for h in (2..=n).rev() {
                    acc = acc * t + 0.5 * (h - 1) as f64 * coefficients[h - 1];
                }
                Ok(acc)
            }
            LagrangianModel::Truncated {
                theta,
                power,
                gamma,
                ..
            } => {
                let s_star = 1.0 - theta;
                if t <= s_star {
                    Ok(0.25 / (1.0 - t).powf(1.5))
                } else {
                    Ok(0.5 * gamma * (*power as f64 - 1.0) * t.powi(*power as i32 - 2))
                }
            }
        }
    }

    /// Slope profile a(t) = 2 V'(t) of the truncated model (the coefficient
    /// in front of the gradient in the flux). Only meaningful for Truncated.
    pub fn slope_profile(&self, t: f64) -> f64 {
        match self {
            LagrangianModel::Truncated {
                theta,
                power,
                gamma,
                delta,
            } => {
                if t <= 1.0 - theta {
                    1.0 / (1.0 - t).sqrt()
                } else {
                    gamma * t.powi(*power as i32 - 1) + delta
                }
            }
            _ => panic!("slope_profile is defined for the truncated model"),
        }
    }

    /// Coefficient of the cubic term in the far-field slope expansion,
    /// used for the second-order potential tail. Zero for the order-1
    /// series (Coulomb tail is exact), 1/2 otherwise.
    pub fn tail_cubic_coefficient(&self) -> f64 {
        match self {
            LagrangianModel::Series { coefficients } if coefficients.len() < 2 => 0.0,
            LagrangianModel::Series { coefficients } => coefficients[1],
            _ => 0.5,
        }
    }
}

/// Integrand value V(t); thin wrapper over [`LagrangianModel::value`].
pub fn lagrangian_value(model: &LagrangianModel, t: f64) -> Result<f64> {
    model.value(t)
}

/// Expansion coefficients alpha_1..alpha_n of the curvature operator as a sum
/// of 2h-Laplacians, from the stable recurrence
/// alpha_1 = 1, alpha_{h+1} = alpha_h (2h-1) / (2h).
///
/// Equivalently alpha_h = 2h C_h where C_h are the Taylor coefficients of
/// 1 - sqrt(1 - t); the recurrence avoids factorial overflow.
pub fn series_coefficients(n: usize) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(Error::Domain("series order must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(n);
    let mut alpha = 1.0;
    out.push(alpha);
    for h in 1..n {
        alpha *= (2.0 * h as f64 - 1.0) / (2.0 * h as f64);
        out.push(alpha);
    }
    Ok(out)
}

/// Tail coefficients (gamma, delta) making the truncated slope profile C^1
/// at the switch point s = 1 - theta:
///
///   gamma (n-1) (1-theta)^{n-2} = theta^{-3/2} / 2     (derivative match)
///   gamma (1-theta)^{n-1} + delta = theta^{-1/2}       (value match)
pub fn truncation_match(theta: f64, n: usize) -> Result<(f64, f64)> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Domain(format!(
            "truncation parameter must lie in (0,1), got {theta}"
        )));
    }
    if n < 2 {
        return Err(Error::Domain(
            "tail power 1 gives a constant tail; no C^1 match exists".into(),
        ));
    }
    let s_star = 1.0 - theta;
    let gamma = 0.5 * theta.powf(-1.5) / ((n as f64 - 1.0) * s_star.powi(n as i32 - 2));
    let delta = theta.powf(-0.5) - gamma * s_star.powi(n as i32 - 1);
    Ok((gamma, delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_values() {
        let m = LagrangianModel::Exact;
        assert_eq!(m.value(0.0).unwrap(), 0.0);
        assert_relative_eq!(m.value(1.0 - 1e-13).unwrap(), 1.0, max_relative = 1e-6);
        assert_relative_eq!(m.value(0.75).unwrap(), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn exact_rejects_beyond_light_cone() {
        let m = LagrangianModel::Exact;
        assert!(m.value(1.0).is_err());
        assert!(m.value(1.5).is_err());
        assert!(m.value(-0.1).is_err());
        assert!(m.value(f64::NAN).is_err());
    }

    #[test]
    fn series_order_two_example() {
        // t/2 + t^2/8 at t = 0.5 -> 0.28125
        let m = LagrangianModel::series(2).unwrap();
        assert_eq!(m.value(0.5).unwrap(), 0.28125);
    }

    #[test]
    fn series_coefficients_first_three() {
        assert_eq!(series_coefficients(1).unwrap(), vec![1.0]);
        assert_eq!(series_coefficients(2).unwrap(), vec![1.0, 0.5]);
        assert_eq!(series_coefficients(3).unwrap(), vec![1.0, 0.5, 0.375]);
        assert!(series_coefficients(0).is_err());
    }

    #[test]
    fn series_coefficients_all_positive_and_match_taylor() {
        // alpha_h / 2h are the Taylor coefficients of 1 - sqrt(1-t); cross
        // check against finite differences of the exact function at t = 0.1.
        let alpha = series_coefficients(60).unwrap();
        assert!(alpha.iter().all(|&a| a > 0.0));
        let t: f64 = 0.1;
        let exact = 1.0 - (1.0 - t).sqrt();
        let series: f64 = alpha
            .iter()
            .enumerate()
            .map(|(i, a)| a / (2.0 * (i + 1) as f64) * t.powi(i as i32 + 1))
            .sum();
        assert_relative_eq!(series, exact, max_relative = 1e-15);
    }

    #[test]
    fn truncation_match_examples() {
        // theta = 3/4, n = 2: gamma = 4/(3 sqrt 3), delta = 5/(3 sqrt 3)
        let (g, d) = truncation_match(0.75, 2).unwrap();
        assert_relative_eq!(g, 0.769_800_358_919_501, max_relative = 1e-12);
        assert_relative_eq!(d, 0.962_250_448_649_376_3, max_relative = 1e-12);

        // theta = 1/2, n = 2: gamma = sqrt 2, delta = sqrt 2 / 2
        let (g, d) = truncation_match(0.5, 2).unwrap();
        assert_relative_eq!(g, std::f64::consts::SQRT_2, max_relative = 1e-12);
        assert_relative_eq!(d, std::f64::consts::SQRT_2 / 2.0, max_relative = 1e-12);

        assert!(truncation_match(0.5, 1).is_err());
        assert!(truncation_match(0.0, 2).is_err());
        assert!(truncation_match(1.0, 2).is_err());
    }

    #[test]
    fn truncated_profile_is_c1_at_switch() {
        for &(theta, n) in &[(0.75, 2), (0.5, 2), (0.25, 3), (0.9, 4), (0.1, 2)] {
            let m = LagrangianModel::truncated(theta, n).unwrap();
            let s = 1.0 - theta;
            let eps = 1e-9 * (1.0 + s);
            let below = m.slope_profile(s - eps);
            let above = m.slope_profile(s + eps);
            assert_relative_eq!(below, above, max_relative = 1e-7);
            // value match is exact at the switch point
            assert_relative_eq!(
                m.slope_profile(s),
                theta.powf(-0.5),
                max_relative = 1e-12
            );
            // derivative match via one-sided differences
            let d_below = (m.slope_profile(s - eps) - m.slope_profile(s - 2.0 * eps)) / eps;
            let d_above = (m.slope_profile(s + 2.0 * eps) - m.slope_profile(s + eps)) / eps;
            assert_relative_eq!(d_below, d_above, max_relative = 1e-5);
            // a_theta(0) = 1 for every theta, n
            assert_eq!(m.slope_profile(0.0), 1.0);
        }
    }

    #[test]
    fn truncated_matches_exact_below_switch() {
        let m = LagrangianModel::truncated(0.5, 2).unwrap();
        let e = LagrangianModel::Exact;
        for i in 0..100 {
            let t = 0.5 * i as f64 / 99.0;
            assert_eq!(m.value(t).unwrap(), e.value(t).unwrap());
        }
    }

    #[test]
    fn simple_inequality_bounds_exact() {
        // t/2 <= 1 - sqrt(1-t) <= t at 1000 uniform points, exactly in f64
        let m = LagrangianModel::Exact;
        for i in 0..1000 {
            let t = i as f64 / 999.0 * (1.0 - 1e-13);
            let v = m.value(t).unwrap();
            assert!(v >= 0.5 * t, "lower bound fails at t = {t}");
            assert!(v <= t, "upper bound fails at t = {t}");
        }
    }

    #[test]
    fn series_increases_to_exact() {
        let e = LagrangianModel::Exact;
        for &t in &[0.1, 0.5, 0.9, 0.99] {
            let mut prev = 0.0;
            for n in [1, 2, 4, 8, 16, 32] {
                let m = LagrangianModel::series(n).unwrap();
                let v = m.value(t).unwrap();
                assert!(v >= prev, "series not monotone in n at t = {t}");
                assert!(v <= e.value(t).unwrap() + 1e-15, "series exceeds exact at t = {t}");
                prev = v;
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let models = [
            LagrangianModel::Exact,
            LagrangianModel::series(5).unwrap(),
            LagrangianModel::truncated(0.5, 2).unwrap(),
            LagrangianModel::truncated(0.25, 3).unwrap(),
        ];
        let h = 1e-6;
        for m in &models {
            for &t in &[0.1, 0.3, 0.6, 0.8] {
                let fd1 = (m.value(t + h).unwrap() - m.value(t - h).unwrap()) / (2.0 * h);
                assert_relative_eq!(m.dvalue(t).unwrap(), fd1, max_relative = 1e-8);
                let fd2 = (m.dvalue(t + h).unwrap() - m.dvalue(t - h).unwrap()) / (2.0 * h);
                assert_relative_eq!(m.ddvalue(t).unwrap(), fd2, max_relative = 1e-6);
            }
        }
    }
}
