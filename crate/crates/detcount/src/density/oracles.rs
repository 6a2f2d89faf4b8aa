//! Numeric oracles for the real densities: direct 2D quadrature of the
//! defining integrals, independent 1D reductions following the case splits
//! that derive the closed forms, and the mollified 4D volumes reduced
//! exactly to 2D. These adjudicate the stated closed forms.

use super::DensityError;
use crate::quad::{geometric_breakpoints, integrate_1d, integrate_2d, QuadOutcome};
use crate::ZETA_2;
use serde::Serialize;

/// Which sliced volume is being evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    /// Additive slice: `J(lambda)`, supported on `(0, 2)`.
    J,
    /// Difference slice: `K(lambda)`, even, supported on `(-1, 1)`.
    K,
}

pub(crate) const MAX_PANELS_2D: usize = 800_000;
const MAX_PANELS_1D: usize = 200_000;

/// Fitted constant for the `eta log^2(2/eta)` mollification rate, used when
/// reporting the accuracy of mollified values.
pub const MOLLIFIED_RATE_CONSTANT: f64 = 20.0;

/// Accuracy claim for a mollified density at width `eta` integrated to `tol`.
pub fn mollified_tolerance(eta: f64, tol: f64) -> f64 {
    let rate = MOLLIFIED_RATE_CONSTANT * eta * (2.0 / eta).ln().powi(2);
    rate.max(1e-2) + tol
}

/// The integrands behave like `min(alpha, beta, sqrt(alpha beta))/(alpha
/// beta) <= 1/sqrt(alpha beta)` toward the origin, so truncating the domain
/// at `f` discards at most `4 f + 2 f ln(1/f)`. Picks `f` so that the
/// discarded mass is under a tenth of the tolerance.
fn origin_floor(tol: f64) -> (f64, f64) {
    let tail = |f: f64| 4.0 * f + 2.0 * f * (1.0 / f).ln();
    let mut f = (tol / 100.0).min(1e-6);
    while tail(f) > tol / 10.0 {
        f *= 0.25;
    }
    (f, tail(f))
}

fn j_measure(alpha: f64, beta: f64, lambda: f64) -> f64 {
    (beta.min(lambda) - (lambda - alpha).max(0.0)).max(0.0)
}

fn k_measure(alpha: f64, beta: f64, lambda: f64) -> f64 {
    debug_assert!(lambda >= 0.0);
    (alpha.min(beta + lambda) - lambda).max(0.0)
}

fn with_kinks(base: &[f64], kinks: &[f64]) -> Vec<f64> {
    let mut b = base.to_vec();
    for &k in kinks {
        if k > base[0] && k < 1.0 {
            b.push(k);
        }
    }
    b
}

fn checked_tolerance(tol: f64) -> Result<(), DensityError> {
    if !(tol >= 1e-8) {
        return Err(DensityError::ToleranceTooTight(tol));
    }
    Ok(())
}

fn zero_outcome() -> QuadOutcome {
    QuadOutcome {
        value: 0.0,
        error_estimate: 0.0,
        panels: 0,
    }
}

/// `J(lambda)` as the 2D integral of `(alpha beta)^{-1}
/// mu((0,beta] cap (lambda - (0,alpha]))` over the unit square.
/// Self-convergence contract: a refinement pass at a quarter of the internal
/// tolerance must move the value by less than `tol`.
pub fn j_quadrature(lambda: f64, tol: f64) -> Result<QuadOutcome, DensityError> {
    checked_tolerance(tol)?;
    if lambda <= 0.0 || lambda >= 2.0 {
        return Ok(zero_outcome());
    }
    let run = |inner: f64| -> Result<QuadOutcome, DensityError> {
        let (floor, tail) = origin_floor(inner);
        let base = geometric_breakpoints(floor, 1.0, 0.25);
        let breaks = with_kinks(&base, &[lambda, lambda - 1.0]);
        let mut out = integrate_2d(
            |a, b| j_measure(a, b, lambda) / (a * b),
            &breaks,
            &breaks,
            inner,
            MAX_PANELS_2D,
        )?;
        out.error_estimate += tail;
        Ok(out)
    };
    let coarse = run(tol / 4.0)?;
    let fine = run(tol / 16.0)?;
    let drift = (coarse.value - fine.value).abs();
    if drift >= tol {
        return Err(DensityError::SelfConvergenceFailure {
            lambda,
            drift,
            tol,
        });
    }
    Ok(QuadOutcome {
        value: fine.value,
        error_estimate: fine.error_estimate.max(drift),
        panels: coarse.panels + fine.panels,
    })
}

/// `K(lambda)` as the 2D integral of `(alpha beta)^{-1}
/// mu([lambda, beta + lambda] cap [0, alpha])`; evaluated at `|lambda|`
/// since `K` is even.
pub fn k_quadrature(lambda: f64, tol: f64) -> Result<QuadOutcome, DensityError> {
    checked_tolerance(tol)?;
    let l = lambda.abs();
    if l >= 1.0 {
        return Ok(zero_outcome());
    }
    let run = |inner: f64| -> Result<QuadOutcome, DensityError> {
        let (floor, tail) = origin_floor(inner);
        let base = geometric_breakpoints(floor, 1.0, 0.25);
        let breaks = with_kinks(&base, &[l]);
        let mut out = integrate_2d(
            |a, b| k_measure(a, b, l) / (a * b),
            &breaks,
            &breaks,
            inner,
            MAX_PANELS_2D,
        )?;
        out.error_estimate += tail;
        Ok(out)
    };
    let coarse = run(tol / 4.0)?;
    let fine = run(tol / 16.0)?;
    let drift = (coarse.value - fine.value).abs();
    if drift >= tol {
        return Err(DensityError::SelfConvergenceFailure {
            lambda: l,
            drift,
            tol,
        });
    }
    Ok(QuadOutcome {
        value: fine.value,
        error_estimate: fine.error_estimate.max(drift),
        panels: coarse.panels + fine.panels,
    })
}

/// Independent 1D oracle for `J`: the `I1 + I2 + I3` case split on
/// `(0, 1]` (with `I3`'s integral done numerically) and the direct
/// single-integral form on `(1, 2)`.
pub fn j_reduction(lambda: f64, tol: f64) -> Result<f64, DensityError> {
    checked_tolerance(tol)?;
    if lambda <= 0.0 || lambda >= 2.0 {
        return Ok(0.0);
    }
    if lambda <= 1.0 {
        let log = lambda.ln();
        let i1 = lambda * (log * log - log);
        let i2 = -lambda * log;
        // I3 = lambda - int_0^lambda (lambda - a)(log lambda - log(lambda - a))/a da
        let f = |a: f64| {
            let diff = -(-a / lambda).ln_1p(); // log(lambda) - log(lambda - a)
            (lambda - a) * diff / a
        };
        let (floor, _) = origin_floor(tol);
        let left = geometric_breakpoints(floor * lambda, lambda / 2.0, 0.25);
        let mut breaks: Vec<f64> = left.clone();
        breaks.extend(left.iter().map(|&t| lambda - t));
        breaks.push(0.0);
        breaks.push(lambda);
        let g = integrate_1d(f, &breaks, tol / 2.0, MAX_PANELS_1D)?.value;
        Ok(i1 + i2 + (lambda - g))
    } else {
        // int_{lambda-1}^1 [(lambda - a) log(lambda - a) - (lambda - a - 1)]/a da
        let f = |a: f64| {
            let w = lambda - a;
            (w * w.ln() - (w - 1.0)) / a
        };
        let breaks = geometric_breakpoints(lambda - 1.0, 1.0, 0.5);
        Ok(integrate_1d(f, &breaks, tol / 2.0, MAX_PANELS_1D)?.value)
    }
}

/// Independent 1D oracle for `K` on `(-1, 1)`:
/// `int_l^1 (a - l)/a da - int_l^1 (a - l) log(a - l)/a da` at `l = |lambda|`.
pub fn k_reduction(lambda: f64, tol: f64) -> Result<f64, DensityError> {
    checked_tolerance(tol)?;
    let l = lambda.abs();
    if l >= 1.0 {
        return Ok(0.0);
    }
    let span = 1.0 - l;
    let (floor, _) = origin_floor(tol);
    let offsets = geometric_breakpoints(floor * span, span, 0.25);
    let mut breaks: Vec<f64> = offsets.iter().map(|&t| l + t).collect();
    breaks.push(l);
    breaks.push(1.0);
    let term1 = integrate_1d(|a| (a - l) / a, &breaks, tol / 2.0, MAX_PANELS_1D)?.value;
    let term2 = integrate_1d(
        |a| {
            let w = a - l;
            if w <= 0.0 {
                0.0
            } else {
                w * w.ln() / a
            }
        },
        &breaks,
        tol / 2.0,
        MAX_PANELS_1D,
    )?
    .value;
    Ok(term1 - term2)
}

/// Area of `{(u, v) in [0,a] x [0,b] : u + v <= t}`.
fn corner_area(a: f64, b: f64, t: f64) -> f64 {
    let pos = |x: f64| x.max(0.0);
    0.5 * (pos(t).powi(2) - pos(t - a).powi(2) - pos(t - b).powi(2) + pos(t - a - b).powi(2))
}

/// The mollified density `(2 eta)^{-1} vol{ x in (0,1)^4 : |Q - lambda| < eta }`
/// for the additive (`J`) or difference (`K`) slice, via the exact reduction
/// of the inner double integral to a slab-in-box area.
pub fn mollified_density(
    lambda: f64,
    eta: f64,
    kind: DensityKind,
    tol: f64,
) -> Result<f64, DensityError> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(DensityError::InvalidEta(eta));
    }
    checked_tolerance(tol)?;
    let l = match kind {
        DensityKind::J => lambda,
        DensityKind::K => lambda.abs(), // the slab volume is even in lambda
    };
    // quick support exits: u + v <= 2 and |u - v| < 1 on the unit box
    match kind {
        DensityKind::J if l + eta <= 0.0 || l - eta >= 2.0 => return Ok(0.0),
        DensityKind::K if l - eta >= 1.0 => return Ok(0.0),
        _ => {}
    }
    let slab = move |a: f64, b: f64| -> f64 {
        match kind {
            DensityKind::J => corner_area(a, b, l + eta) - corner_area(a, b, l - eta),
            // {t1 < u - v < t2} has area A(t2 + b) - A(t1 + b)
            DensityKind::K => corner_area(a, b, l + eta + b) - corner_area(a, b, l - eta + b),
        }
    };
    let (floor, _) = origin_floor(tol);
    let base = geometric_breakpoints(floor, 1.0, 0.25);
    let breaks = with_kinks(&base, &[l - eta, l + eta, l, eta]);
    let out = integrate_2d(
        |a, b| slab(a, b) / (2.0 * eta * a * b),
        &breaks,
        &breaks,
        tol,
        MAX_PANELS_2D,
    )?;
    Ok(out.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-6;

    #[test]
    fn j_anchor_at_one() {
        let j = j_quadrature(1.0, TOL).unwrap();
        assert!(
            (j.value - (2.0 - ZETA_2)).abs() < 1e-4,
            "J(1) = {} vs {}",
            j.value,
            2.0 - ZETA_2
        );
    }

    #[test]
    fn j_outside_support() {
        assert_eq!(j_quadrature(-0.5, TOL).unwrap().value, 0.0);
        assert_eq!(j_quadrature(2.0, TOL).unwrap().value, 0.0);
        assert_eq!(j_reduction(2.5, TOL).unwrap(), 0.0);
    }

    #[test]
    fn k_anchor_at_zero() {
        let k = k_quadrature(0.0, TOL).unwrap();
        assert!((k.value - 2.0).abs() < 1e-4, "K(0) = {}", k.value);
    }

    #[test]
    fn k_small_near_support_edge() {
        let k = k_quadrature(0.99, TOL).unwrap();
        assert!(k.value > 0.0 && k.value < 0.01, "K(0.99) = {}", k.value);
        assert_eq!(k_quadrature(1.0, TOL).unwrap().value, 0.0);
    }

    #[test]
    fn desk_values_at_half() {
        let j = j_quadrature(0.5, TOL).unwrap().value;
        assert!((j - 1.11091).abs() < 1e-4, "J(0.5) = {j}");
        let k = k_quadrature(0.5, TOL).unwrap().value;
        assert!((k - 0.34854).abs() < 1e-4, "K(0.5) = {k}");
    }

    #[test]
    fn reductions_agree_with_quadrature() {
        for i in 1..=19 {
            let l = i as f64 / 10.0;
            let jq = j_quadrature(l, TOL).unwrap().value;
            let jr = j_reduction(l, TOL).unwrap();
            assert!((jq - jr).abs() < 1e-3, "J({l}): quad {jq} vs reduction {jr}");
            let kq = k_quadrature(l, TOL).unwrap().value;
            let kr = k_reduction(l, TOL).unwrap();
            assert!((kq - kr).abs() < 1e-3, "K({l}): quad {kq} vs reduction {kr}");
        }
    }

    #[test]
    fn k_symmetry() {
        for i in 1..=9 {
            let l = i as f64 / 10.0;
            let plus = k_quadrature(l, TOL).unwrap().value;
            let minus = k_quadrature(-l, TOL).unwrap().value;
            assert!((plus - minus).abs() < 1e-12);
        }
    }

    #[test]
    fn mollified_anchors() {
        // lambda = 1, eta = 1e-3: within 1e-2 of J(1)
        let j = mollified_density(1.0, 1e-3, DensityKind::J, 1e-3).unwrap();
        assert!((j - 0.35507).abs() < 1e-2, "J_eta(1) = {j}");
        // K(0) anchor at the eta log^2 rate
        for eta in [1e-2, 1e-3] {
            let k = mollified_density(0.0, eta, DensityKind::K, 1e-3).unwrap();
            assert!(
                (k - 2.0).abs() < mollified_tolerance(eta, 1e-3),
                "K_eta(0) = {k} at eta = {eta}"
            );
        }
        // outside the support
        let j = mollified_density(2.5, 0.1, DensityKind::J, 1e-3).unwrap();
        assert_eq!(j, 0.0);
    }

    #[test]
    fn mollified_rejects_bad_eta() {
        assert!(mollified_density(1.0, 0.0, DensityKind::J, 1e-3).is_err());
        assert!(mollified_density(1.0, 1.5, DensityKind::J, 1e-3).is_err());
    }

    #[test]
    fn tolerance_floor_enforced() {
        assert!(j_quadrature(1.0, 1e-9).is_err());
        assert!(k_reduction(0.5, 1e-10).is_err());
    }
}
