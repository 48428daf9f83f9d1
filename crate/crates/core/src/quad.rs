//! Panel quadrature and sphere geometry shared by the radial machinery.
//!
//! Radial integrands here are smooth between grid nodes (the solvers merge
//! density breakpoints into their grids), so a fixed-order Gauss-Legendre
//! rule per panel integrates them to machine accuracy.

/// 8-point Gauss-Legendre nodes on [-1, 1].
pub const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];

/// 8-point Gauss-Legendre weights matching [`GL8_NODES`].
pub const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Integrate `f` on [a, b] with a single 8-point Gauss-Legendre panel.
pub fn gl8<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for k in 0..8 {
        sum += GL8_WEIGHTS[k] * f(mid + half * GL8_NODES[k]);
    }
    sum * half
}

/// Per-interval panel integrals of `f` over consecutive grid nodes.
pub fn panel_integrals<F: FnMut(f64) -> f64>(grid: &[f64], mut f: F) -> Vec<f64> {
    grid.windows(2).map(|w| gl8(&mut f, w[0], w[1])).collect()
}

/// Measure of the unit (N-1)-sphere: omega_N = 2 pi^{N/2} / Gamma(N/2).
///
/// omega_3 = 4 pi.
pub fn unit_sphere_measure(dim: usize) -> f64 {
    assert!(dim >= 1, "dimension must be at least 1");
    2.0 * std::f64::consts::PI.powf(dim as f64 / 2.0) / gamma_half(dim)
}

/// Gamma(k/2) for positive integer k.
fn gamma_half(k: usize) -> f64 {
    let mut x = if k % 2 == 0 { 1.0 } else { 0.5 };
    let mut acc = if k % 2 == 0 {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    while 2.0 * x < k as f64 {
        acc *= x;
        x += 1.0;
    }
    acc
}

/// Geometrically spaced grid with `nodes` points from `r_min` to `r_max`.
pub fn geometric_grid(r_min: f64, r_max: f64, nodes: usize) -> Vec<f64> {
    assert!(r_min > 0.0 && r_max > r_min && nodes >= 2);
    let ratio = (r_max / r_min).ln() / (nodes - 1) as f64;
    let mut grid: Vec<f64> = (0..nodes)
        .map(|i| r_min * (ratio * i as f64).exp())
        .collect();
    // pin the endpoints exactly
    grid[0] = r_min;
    grid[nodes - 1] = r_max;
    grid
}

/// Sorted union of two ascending grids, deduplicated to relative spacing tolerance.
pub fn merge_grids(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    all.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for v in all {
        match out.last() {
            Some(&last) if v - last <= 1e-13 * (1.0 + v.abs()) => {}
            _ => out.push(v),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sphere_measures() {
        assert_relative_eq!(
            unit_sphere_measure(3),
            4.0 * std::f64::consts::PI,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            unit_sphere_measure(4),
            2.0 * std::f64::consts::PI * std::f64::consts::PI,
            max_relative = 1e-15
        );
        // omega_2 = 2 pi (circle), omega_5 = 8 pi^2 / 3
        assert_relative_eq!(
            unit_sphere_measure(2),
            2.0 * std::f64::consts::PI,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            unit_sphere_measure(5),
            8.0 * std::f64::consts::PI.powi(2) / 3.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn gl8_is_exact_on_degree_15_polynomials() {
        let exact: f64 = (2.0f64).powi(16) / 16.0 - 1.0 / 16.0;
        let got = gl8(|x| x.powi(15), 1.0, 2.0);
        assert_relative_eq!(got, exact, max_relative = 1e-14);
    }

    #[test]
    fn geometric_grid_endpoints_and_order() {
        let g = geometric_grid(1e-6, 1e3, 512);
        assert_eq!(g.len(), 512);
        assert_eq!(g[0], 1e-6);
        assert_eq!(g[511], 1e3);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn merge_deduplicates() {
        let merged = merge_grids(&[0.0, 1.0, 2.0], &[1.0, 1.5]);
        assert_eq!(merged, vec![0.0, 1.0, 1.5, 2.0]);
    }
}
