//! Complete and incomplete Kloosterman sums with their Weil/Hooley bound
//! checkers. The complete sum `S(a, b; u) = sum_{(x,u)=1} e((a x + b xbar)/u)`
//! is real (the `x <-> u - x` pairing conjugates terms) and obeys
//! `|S| <= d(u) * gcd(b, u)^{1/2} * u^{1/2}`.

use crate::arith::{gcd, Factorization};
use crate::quad::NeumaierSum;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ExpSumError {
    #[error("{x} is not invertible modulo {u}")]
    NotCoprime { x: i64, u: u64 },
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("interval [{lo}, {hi}] is empty")]
    EmptyInterval { lo: i64, hi: i64 },
    #[error("argument {0} exceeds the 10^9 cap")]
    ArgumentTooLarge(u64),
}

/// Multiplicative inverse of `x` modulo `u`, as the unique representative in
/// `[1, u)`. Requires `u >= 2` and `gcd(x, u) = 1`.
pub fn mod_inverse(x: i64, u: u64) -> Result<u64, ExpSumError> {
    if u < 2 {
        return Err(ExpSumError::ModulusTooSmall(u));
    }
    let r = x.rem_euclid(u as i64) as u64;
    if gcd(r, u) != 1 {
        return Err(ExpSumError::NotCoprime { x, u });
    }
    // extended Euclid on (r, u)
    let (mut old_r, mut rr) = (r as i64, u as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while rr != 0 {
        let q = old_r / rr;
        (old_r, rr) = (rr, old_r - q * rr);
        (old_s, s) = (s, old_s - q * s);
    }
    Ok(old_s.rem_euclid(u as i64) as u64)
}

/// A complete Kloosterman sum together with its Weil bound.
#[derive(Debug, Clone, Copy)]
pub struct KloostermanValue {
    pub a: i64,
    pub b: i64,
    pub u: u64,
    pub real: f64,
    pub imaginary: f64,
    pub weil_bound: f64,
}

impl KloostermanValue {
    pub fn modulus(&self) -> f64 {
        self.real.hypot(self.imaginary)
    }
}

/// `S(a, b; u) = sum over 1 <= x < u, (x, u) = 1 of e((a x + b xbar)/u)`.
/// The displayed range is empty for `u = 1`, so that case returns zero.
pub fn kloosterman_complete(a: i64, b: i64, u: u64) -> KloostermanValue {
    assert!(u >= 1, "modulus must be positive");
    let weil_bound = if u == 1 {
        1.0
    } else {
        let d = Factorization::of(u).expect("u >= 1").divisor_count() as f64;
        d * (gcd(b.unsigned_abs(), u) as f64).sqrt() * (u as f64).sqrt()
    };
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    for x in 1..u {
        if gcd(x, u) != 1 {
            continue;
        }
        let xbar = mod_inverse(x as i64, u).expect("x coprime to u");
        let t = ((a as i128 * x as i128 + b as i128 * xbar as i128).rem_euclid(u as i128)) as u64;
        let angle = TAU * (t as f64) / (u as f64);
        re.add(angle.cos());
        im.add(angle.sin());
    }
    KloostermanValue {
        a,
        b,
        u,
        real: re.total(),
        imaginary: im.total(),
        weil_bound,
    }
}

/// An incomplete Kloosterman sum over an integer interval, with the
/// `gcd(r,u)^{1/2} u^{-1/2} (|I| + u log u)` bound it is checked against.
#[derive(Debug, Clone, Copy)]
pub struct IncompleteKloosterman {
    pub lo: i64,
    pub hi: i64,
    pub r: i64,
    pub u: u64,
    pub real: f64,
    pub imaginary: f64,
    pub hooley_bound: f64,
    /// Number of coprime residues actually summed.
    pub terms: u64,
}

impl IncompleteKloosterman {
    pub fn modulus(&self) -> f64 {
        self.real.hypot(self.imaginary)
    }
}

const ARGUMENT_CAP: u64 = 1_000_000_000;

/// `sum over v in [lo, hi], (v, u) = 1 of e(r vbar / u)` for `u >= 2`.
pub fn kloosterman_incomplete(
    lo: i64,
    hi: i64,
    r: i64,
    u: u64,
) -> Result<IncompleteKloosterman, ExpSumError> {
    if u < 2 {
        return Err(ExpSumError::ModulusTooSmall(u));
    }
    if lo > hi {
        return Err(ExpSumError::EmptyInterval { lo, hi });
    }
    if u > ARGUMENT_CAP {
        return Err(ExpSumError::ArgumentTooLarge(u));
    }
    if r.unsigned_abs() > ARGUMENT_CAP {
        return Err(ExpSumError::ArgumentTooLarge(r.unsigned_abs()));
    }
    // inverses depend on v mod u only; cache them per residue
    let mut inverses = vec![0u64; u as usize];
    for x in 1..u {
        if gcd(x, u) == 1 {
            inverses[x as usize] = mod_inverse(x as i64, u).expect("coprime");
        }
    }
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    let mut terms = 0u64;
    for v in lo..=hi {
        let res = v.rem_euclid(u as i64) as usize;
        if res == 0 || gcd(res as u64, u) != 1 {
            continue;
        }
        terms += 1;
        let t = ((r as i128 * inverses[res] as i128).rem_euclid(u as i128)) as u64;
        let angle = TAU * (t as f64) / (u as f64);
        re.add(angle.cos());
        im.add(angle.sin());
    }
    let len = (hi - lo + 1) as f64;
    let g = gcd(r.unsigned_abs(), u);
    let hooley_bound = (g as f64 / u as f64).sqrt() * (len + u as f64 * (u as f64).ln());
    Ok(IncompleteKloosterman {
        lo,
        hi,
        r,
        u,
        real: re.total(),
        imaginary: im.total(),
        hooley_bound,
        terms,
    })
}
