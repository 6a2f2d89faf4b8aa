//! Continuum companions of the lattice main term: the cell functions
//! `F_N(alpha, beta, c)` (additive) and `G_N(alpha, beta, c)` (difference)
//! extended to real arguments, and the discrete sums they approximate.
//! Comparing `sum_{u,v} F_N` with its double integral is the
//! discrete-to-continuous diagnostic; the gap scales like `N log^2 N`.

use crate::quad::NeumaierSum;

/// `F_N(alpha, beta, c) = max(0, V' - U')` with
/// `V' = min(N/alpha, c/(alpha beta) - 1/beta)` and
/// `U' = max(1/alpha, c/(alpha beta) - N/beta)`.
pub fn continuum_f(alpha: f64, beta: f64, c: f64, n: f64) -> f64 {
    debug_assert!(alpha > 0.0 && beta > 0.0);
    let upper = (n / alpha).min(c / (alpha * beta) - 1.0 / beta);
    let lower = (1.0 / alpha).max(c / (alpha * beta) - n / beta);
    (upper - lower).max(0.0)
}

/// `G_N(alpha, beta, c) = 1_{alpha - beta >= c/N} (N/alpha)
///  + 1_{c/N <= alpha < c/N + beta} (N/beta - c/(alpha beta))`.
pub fn continuum_g(alpha: f64, beta: f64, c: f64, n: f64) -> f64 {
    debug_assert!(alpha > 0.0 && beta > 0.0);
    let mut value = 0.0;
    if alpha - beta >= c / n {
        value += n / alpha;
    }
    if c / n <= alpha && alpha < c / n + beta {
        value += n / beta - c / (alpha * beta);
    }
    value
}

/// `sum_{1 <= u, v <= m} F_N(u, v, c)`.
pub fn discrete_f_sum(m: u64, c: f64, n: f64) -> f64 {
    let mut acc = NeumaierSum::new();
    for u in 1..=m {
        for v in 1..=m {
            acc.add(continuum_f(u as f64, v as f64, c, n));
        }
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_2d;
    use rand::{Rng, SeedableRng};

    #[test]
    fn f_vanishes_for_huge_c() {
        assert_eq!(continuum_f(1.5, 2.0, 1e9, 100.0), 0.0);
    }

    #[test]
    fn f_at_unit_arguments() {
        let n = 50.0;
        // V' = min(N, N - 1) = N - 1, U' = max(1, 0) = 1
        assert_eq!(continuum_f(1.0, 1.0, n, n), n - 2.0);
    }

    #[test]
    fn f_respects_trivial_cap() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xf00d);
        for _ in 0..100_000 {
            let alpha = rng.random_range(1e-3..64.0f64);
            let beta = rng.random_range(1e-3..64.0f64);
            let c = rng.random_range(0.0..8192.0f64);
            let n = rng.random_range(1.0..64.0f64);
            let f = continuum_f(alpha, beta, c, n);
            assert!(f >= 0.0);
            assert!(
                f <= n / alpha.max(beta) + 1e-12,
                "F({alpha},{beta},{c};{n}) = {f}"
            );
        }
    }

    #[test]
    fn discrete_sum_tracks_integral() {
        // |sum F - integral of F over [1, m+1]^2| stays within C N log^2 N
        const FITTED_C: f64 = 4.0;
        for (n, lambda) in [(32u64, 1.0f64), (64, 1.0), (64, 0.5), (96, 1.5)] {
            let c = lambda * (n * n) as f64;
            let m = n; // d = k = 1 slice
            let discrete = discrete_f_sum(m, c, n as f64);
            let hi = (m + 1) as f64;
            let split = c / (n as f64); // F's kink abscissa in each variable
            let breaks: Vec<f64> = [1.0, hi, split, split + 1.0, hi / 2.0]
                .into_iter()
                .filter(|&x| (1.0..=hi).contains(&x))
                .collect();
            let integral = integrate_2d(
                |a, b| continuum_f(a, b, c, n as f64),
                &breaks,
                &breaks,
                0.5,
                400_000,
            )
            .unwrap()
            .value;
            let budget = FITTED_C * n as f64 * (n as f64).ln().powi(2);
            assert!(
                (discrete - integral).abs() <= budget,
                "N={n} lambda={lambda}: |{discrete} - {integral}| > {budget}"
            );
        }
    }

    #[test]
    fn g_matches_its_indicator_form() {
        // spot values straddling the two indicator regions
        let (c, n) = (50.0, 10.0);
        // alpha - beta >= c/N = 5 only
        assert_eq!(continuum_g(8.0, 2.0, c, n), n / 8.0);
        // second region: c/N <= alpha < c/N + beta
        let g = continuum_g(6.0, 4.0, c, n);
        assert!((g - (n / 4.0 - c / 24.0)).abs() < 1e-12);
        // the two regions are disjoint: alpha >= beta + c/N excludes
        // alpha < c/N + beta
        let g = continuum_g(9.0, 4.0, c, n);
        assert!((g - n / 9.0).abs() < 1e-12);
        assert_eq!(continuum_g(1.0, 1.0, c, n), 0.0);
    }
}
