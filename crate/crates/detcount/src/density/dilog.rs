//! Dilogarithm `Li2(x) = sum x^n / n^2` on `[0, 1]`, to absolute accuracy
//! better than 1e-12: power series up to `x = 1/2`, the reflection formula
//! `Li2(x) + Li2(1-x) = zeta(2) - log(x) log(1-x)` above (with the
//! `log(0) log(1) = 0` convention at the endpoints).

use super::DensityError;
use crate::ZETA_2;

/// Series evaluation, valid (and fast) for `0 <= x <= 1/2`.
fn dilog_series(x: f64) -> f64 {
    debug_assert!((0.0..=0.5).contains(&x));
    let mut sum = 0.0f64;
    let mut power = x;
    let mut n = 1u32;
    while power.abs() > 1e-18 && n < 200 {
        sum += power / (n as f64 * n as f64);
        power *= x;
        n += 1;
    }
    sum
}

pub(crate) fn dilog_unit_interval(x: f64) -> f64 {
    if x <= 0.5 {
        dilog_series(x)
    } else if x == 1.0 {
        ZETA_2
    } else {
        ZETA_2 - x.ln() * (1.0 - x).ln() - dilog_series(1.0 - x)
    }
}

/// `Li2(x)` for `x in [0, 1]`.
pub fn dilog(x: f64) -> Result<f64, DensityError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(DensityError::DomainViolation(x));
    }
    Ok(dilog_unit_interval(x))
}
