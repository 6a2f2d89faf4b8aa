//! The closed-form expressions for `J`, `K` and `sigma_inf` as stated,
//! transcribed verbatim branch by branch. These are *candidates*: each
//! branch is classified validated/refuted against the quadrature oracles
//! (see [`super::adjudicate_closed_forms`]), because desk checks flag the
//! `0 < lambda < 1` branches of `J` and `K` (and the combined `sigma_inf`
//! formula they feed into) as inconsistent with the defining integrals.
//! The `lambda = 1` values and the `(1, 2)` branches do validate.

use super::dilog::dilog_unit_interval;
use crate::ZETA_2;
use serde::Serialize;

/// Which piece of the stated piecewise formula produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Outside the support; the value is 0.
    Outside,
    /// `lambda = 0` (relevant for `K`, where the stated value is 2).
    Origin,
    /// `0 < lambda < 1`.
    SubUnit,
    /// `lambda = 1` exactly.
    Unit,
    /// `1 < lambda < 2`.
    SuperUnit,
}

/// A closed-form evaluation tagged by its branch. The `validated` flag stays
/// `None` until an adjudication run compares the branch against quadrature.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClosedForm {
    pub value: f64,
    pub branch: Branch,
    pub validated: Option<bool>,
}

impl ClosedForm {
    fn new(value: f64, branch: Branch) -> Self {
        ClosedForm {
            value,
            branch,
            validated: None,
        }
    }
}

/// Stated closed form for `J(lambda)`.
pub fn j_closed(lambda: f64) -> ClosedForm {
    if lambda <= 0.0 || lambda >= 2.0 {
        ClosedForm::new(0.0, Branch::Outside)
    } else if lambda < 1.0 {
        let log = lambda.ln();
        ClosedForm::new(
            lambda * (log * log - 2.0 * log + 2.0 - dilog_unit_interval(lambda)),
            Branch::SubUnit,
        )
    } else if lambda == 1.0 {
        ClosedForm::new(2.0 - ZETA_2, Branch::Unit)
    } else {
        let log = lambda.ln();
        ClosedForm::new(
            2.0 + 2.0 * (lambda - 1.0) * ((lambda - 1.0).ln() - 1.0)
                + lambda * (ZETA_2 - log * log - 2.0 * dilog_unit_interval(1.0 / lambda)),
            Branch::SuperUnit,
        )
    }
}

/// Stated closed form for `K(lambda)`; `K` is even, `K(0) = 2`, and the sum
/// vanishes for `|lambda| >= 1`.
pub fn k_closed(lambda: f64) -> ClosedForm {
    let l = lambda.abs();
    if l >= 1.0 {
        ClosedForm::new(0.0, Branch::Outside)
    } else if l == 0.0 {
        ClosedForm::new(2.0, Branch::Origin)
    } else {
        let log = l.ln();
        ClosedForm::new(
            l * (dilog_unit_interval(l) - ZETA_2 + 0.5 * log * log)
                + (1.0 - l) * (l * log - (1.0 - l).ln() + 2.0),
            Branch::SubUnit,
        )
    }
}

/// Stated combined branch formulas for `sigma_inf(lambda)` (the direct
/// piecewise expressions, not `4 J + 8 K` recombined).
pub fn sigma_closed_branch(lambda: f64) -> ClosedForm {
    if lambda < 0.0 || lambda >= 2.0 {
        ClosedForm::new(0.0, Branch::Outside)
    } else if lambda == 0.0 {
        // 4 J(0) + 8 K(0) with the stated anchors J(0) = 0, K(0) = 2
        ClosedForm::new(16.0, Branch::Origin)
    } else if lambda < 1.0 {
        let log = lambda.ln();
        let value = 16.0 - 8.0 * (1.0 - lambda) * (1.0 - lambda).ln()
            + 4.0
                * lambda
                * (dilog_unit_interval(lambda) - 2.0 * (1.0 + ZETA_2) - 2.0 * lambda * log
                    + 2.0 * (1.0 - lambda) * log * log);
        ClosedForm::new(value, Branch::SubUnit)
    } else if lambda == 1.0 {
        ClosedForm::new(8.0 - 4.0 * ZETA_2, Branch::Unit)
    } else {
        let log = lambda.ln();
        let value = 8.0 + 8.0 * (lambda - 1.0) * ((lambda - 1.0).ln() - 1.0)
            + 4.0 * lambda * (ZETA_2 - log * log - 2.0 * dilog_unit_interval(1.0 / lambda));
        ClosedForm::new(value, Branch::SuperUnit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_anchors() {
        assert!((j_closed(1.0).value - (2.0 - ZETA_2)).abs() < 1e-15);
        assert_eq!(j_closed(2.5).value, 0.0);
        assert_eq!(k_closed(0.0).value, 2.0);
        assert_eq!(k_closed(1.0).value, 0.0);
        assert_eq!(k_closed(-1.3).value, 0.0);
        assert!((sigma_closed_branch(1.0).value - (8.0 - 4.0 * ZETA_2)).abs() < 1e-15);
    }

    #[test]
    fn stated_subunit_values() {
        // the raw stated formulas at 1/2 (the adjudication targets)
        assert!((j_closed(0.5).value - 1.64225).abs() < 1e-4);
        assert!((k_closed(0.5).value - 0.76205).abs() < 1e-4);
        assert!((sigma_closed_branch(0.5).value - 11.7045).abs() < 1e-3);
    }

    #[test]
    fn k_is_even() {
        for i in 1..10 {
            let l = i as f64 / 10.0;
            assert_eq!(k_closed(l).value, k_closed(-l).value);
        }
    }

    #[test]
    fn superunit_branch_internally_consistent() {
        // for lambda > 1, K = 0, so the combined formula must equal 4 J
        for &l in &[1.2f64, 1.5, 1.9] {
            let via_jk = 4.0 * j_closed(l).value + 8.0 * k_closed(l).value;
            assert!((sigma_closed_branch(l).value - via_jk).abs() < 1e-12, "lambda = {l}");
        }
    }
}
