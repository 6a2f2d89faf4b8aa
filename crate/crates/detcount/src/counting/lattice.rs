//! The lattice (arithmetic-progression) counting method and its exact
//! main/error split.
//!
//! For `d | h` and coprime `u, v <= N/d`, the solutions of
//! `a u + b v = h/d` (additive) or `a u - b v = h/d` (difference) with
//! `a, b in [N]` form an arithmetic progression in a step parameter `s`;
//! the admissible `s` fill an interval `[U, V]` whose endpoints are
//! rationals with denominators `u` and `v`. Every endpoint comparison,
//! floor and sawtooth value here is taken in exact rational arithmetic, so
//! `V >= U` and `1_Z(U)` are never misclassified at boundaries.

use super::{CountError, CountQuery};
use crate::arith::{gcd, Factorization};
use crate::expsums::mod_inverse;
use crate::quad::NeumaierSum;
use crate::rat::Rat;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;

/// Which of the two positive-orthant equations a cell belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    Additive,
    Difference,
}

impl fmt::Display for SolutionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolutionKind::Additive => "additive",
            SolutionKind::Difference => "difference",
        })
    }
}

/// One `(d, u, v)` cell of the lattice method.
#[derive(Debug, Clone, Copy)]
pub struct LatticeCell {
    pub d: u64,
    pub u: u64,
    pub v: u64,
    /// The unique `b0 in [1, u]` with `b0 v = +-h/d (mod u)` (sign by kind).
    pub b0: u64,
    pub a0: i64,
    pub lower: Rat,
    pub upper: Rat,
    pub kind: SolutionKind,
}

impl LatticeCell {
    /// Number of integers `s` with `lower <= s <= upper`, exactly.
    pub fn solution_count(&self) -> u64 {
        if self.upper >= self.lower {
            (self.upper.floor() - self.lower.floor() + i128::from(self.lower.is_integer())) as u64
        } else {
            0
        }
    }
}

fn cell_unchecked(d: u64, u: u64, v: u64, h: u64, n: u64, kind: SolutionKind) -> LatticeCell {
    let c = h / d;
    let b0 = if u == 1 {
        1
    } else {
        let vbar = mod_inverse(v as i64, u).expect("v coprime to u");
        let residue = match kind {
            SolutionKind::Additive => c % u,
            SolutionKind::Difference => (u - c % u) % u,
        };
        let b0 = ((residue as u128 * vbar as u128) % u as u128) as u64;
        if b0 == 0 {
            u
        } else {
            b0
        }
    };
    let (a0, lower, upper) = match kind {
        SolutionKind::Additive => {
            let a0_num = c as i128 - b0 as i128 * v as i128;
            debug_assert_eq!(a0_num.rem_euclid(u as i128), 0);
            let a0 = a0_num / u as i128;
            let lower = Rat::new(1 - b0 as i128, u as i128).max(Rat::new(a0 - n as i128, v as i128));
            let upper = Rat::new(n as i128 - b0 as i128, u as i128).min(Rat::new(a0 - 1, v as i128));
            (a0, lower, upper)
        }
        SolutionKind::Difference => {
            let a0_num = c as i128 + b0 as i128 * v as i128;
            debug_assert_eq!(a0_num.rem_euclid(u as i128), 0);
            let a0 = a0_num / u as i128;
            let lower = Rat::new(1 - a0, v as i128).max(Rat::new(1 - b0 as i128, u as i128));
            let upper =
                Rat::new(n as i128 - a0, v as i128).min(Rat::new(n as i128 - b0 as i128, u as i128));
            (a0, lower, upper)
        }
    };
    LatticeCell {
        d,
        u,
        v,
        b0,
        a0: a0 as i64,
        lower,
        upper,
        kind,
    }
}

/// Builds the cell for `(d, u, v)`, validating the lattice preconditions.
pub fn lattice_bounds(
    d: u64,
    u: u64,
    v: u64,
    h: u64,
    n: u64,
    kind: SolutionKind,
) -> Result<LatticeCell, CountError> {
    if d == 0 || h % d != 0 {
        return Err(CountError::NotDivisor { d, h });
    }
    if gcd(u, v) != 1 {
        return Err(CountError::NotCoprime { u, v });
    }
    let m = n / d;
    if u == 0 || v == 0 || u > m || v > m {
        return Err(CountError::OutOfBox { u, v, m });
    }
    Ok(cell_unchecked(d, u, v, h, n, kind))
}

/// Per-divisor counts from the lattice method.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeCount {
    pub total: u64,
    /// `(d, count over that divisor's coprime cells)`, ascending in `d`.
    pub per_divisor: Vec<(u64, u64)>,
}

fn divisors_up_to(h: u64, n: u64) -> Vec<u64> {
    let mut ds: Vec<u64> = Factorization::of(h)
        .expect("h >= 1")
        .divisors()
        .into_iter()
        .filter(|&d| d <= n)
        .collect();
    ds.sort_unstable();
    ds
}

fn lattice_count(query: CountQuery, kind: SolutionKind) -> LatticeCount {
    let (h, n) = (query.h(), query.n());
    let per_divisor: Vec<(u64, u64)> = divisors_up_to(h, n)
        .into_iter()
        .map(|d| {
            let m = n / d;
            let count: u64 = (1..=m)
                .into_par_iter()
                .map(|u| {
                    let inv = residue_inverses(u);
                    let mut acc = 0u64;
                    for v in 1..=m {
                        // inv[r] = 0 marks residues not coprime to u
                        if u > 1 && inv[(v % u) as usize] == 0 {
                            continue;
                        }
                        acc += cell_unchecked(d, u, v, h, n, kind).solution_count();
                    }
                    acc
                })
                .sum();
            (d, count)
        })
        .collect();
    LatticeCount {
        total: per_divisor.iter().map(|&(_, c)| c).sum(),
        per_divisor,
    }
}

/// Inverse table modulo `u`: `inv[r]` is the inverse of `r` when
/// `gcd(r, u) = 1`, and 0 otherwise. `inv[0] = 0`.
fn residue_inverses(u: u64) -> Vec<u64> {
    if u == 1 {
        return vec![0];
    }
    let mut inv = vec![0u64; u as usize];
    for r in 1..u {
        if gcd(r, u) == 1 {
            inv[r as usize] = mod_inverse(r as i64, u).expect("coprime residue");
        }
    }
    inv
}

/// `T+` by the lattice method, with per-divisor breakdown.
pub fn count_additive_lattice(query: CountQuery) -> LatticeCount {
    lattice_count(query, SolutionKind::Additive)
}

/// `T-` by the lattice method, with per-divisor breakdown.
pub fn count_difference_lattice(query: CountQuery) -> LatticeCount {
    lattice_count(query, SolutionKind::Difference)
}

/// The exact main/error split of the lattice count:
/// `main = sum (V - U) 1_{V >= U}` and
/// `error = sum (1_Z(U) - psi(V) + psi(U)) 1_{V >= U}`, each term converted
/// from its exact rational; `main + error` reproduces the exact count.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SplitResult {
    pub main: f64,
    pub error: f64,
    /// The exact integer count the split must reproduce.
    pub count: u64,
}

pub fn main_error_split(query: CountQuery, kind: SolutionKind) -> SplitResult {
    let c = error_components_impl(query, kind);
    SplitResult {
        main: c.linear,
        error: c.integrality as f64 - c.psi_upper + c.psi_lower,
        count: c.count,
    }
}

/// The three error constituents of the split, per divisor and in total:
/// the integrality count `sum 1_Z(U) 1_{V>=U}` (an exact integer) and the
/// two sawtooth sums `sum psi(V) 1_{V>=U}`, `sum psi(U) 1_{V>=U}`.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorComponents {
    pub kind: SolutionKind,
    pub count: u64,
    pub linear: f64,
    pub integrality: u64,
    pub psi_upper: f64,
    pub psi_lower: f64,
    pub per_divisor: Vec<ComponentRow>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComponentRow {
    pub d: u64,
    pub count: u64,
    pub linear: f64,
    pub integrality: u64,
    pub psi_upper: f64,
    pub psi_lower: f64,
}

pub fn error_components(query: CountQuery, kind: SolutionKind) -> ErrorComponents {
    error_components_impl(query, kind)
}

fn error_components_impl(query: CountQuery, kind: SolutionKind) -> ErrorComponents {
    let (h, n) = (query.h(), query.n());
    let per_divisor: Vec<ComponentRow> = divisors_up_to(h, n)
        .into_iter()
        .map(|d| {
            let m = n / d;
            // per-u partials, combined in u order so float sums are
            // independent of the worker schedule
            let partials: Vec<(u64, f64, u64, f64, f64)> = (1..=m)
                .into_par_iter()
                .map(|u| {
                    let inv = residue_inverses(u);
                    let mut count = 0u64;
                    let mut integral = 0u64;
                    let mut linear = NeumaierSum::new();
                    let mut psi_v = NeumaierSum::new();
                    let mut psi_u = NeumaierSum::new();
                    for v in 1..=m {
                        if u > 1 && inv[(v % u) as usize] == 0 {
                            continue;
                        }
                        let cell = cell_unchecked(d, u, v, h, n, kind);
                        if cell.upper < cell.lower {
                            continue;
                        }
                        count += cell.solution_count();
                        linear.add(cell.upper.checked_sub(cell.lower).to_f64());
                        integral += u64::from(cell.lower.is_integer());
                        psi_v.add(cell.upper.sawtooth().to_f64());
                        psi_u.add(cell.lower.sawtooth().to_f64());
                    }
                    (count, linear.total(), integral, psi_v.total(), psi_u.total())
                })
                .collect();
            let mut count = 0u64;
            let mut integrality = 0u64;
            let mut linear = NeumaierSum::new();
            let mut psi_upper = NeumaierSum::new();
            let mut psi_lower = NeumaierSum::new();
            for (c, l, i, pv, pu) in partials {
                count += c;
                integrality += i;
                linear.add(l);
                psi_upper.add(pv);
                psi_lower.add(pu);
            }
            ComponentRow {
                d,
                count,
                linear: linear.total(),
                integrality,
                psi_upper: psi_upper.total(),
                psi_lower: psi_lower.total(),
            }
        })
        .collect();
    let mut count = 0u64;
    let mut integrality = 0u64;
    let mut linear = NeumaierSum::new();
    let mut psi_upper = NeumaierSum::new();
    let mut psi_lower = NeumaierSum::new();
    for row in &per_divisor {
        count += row.count;
        integrality += row.integrality;
        linear.add(row.linear);
        psi_upper.add(row.psi_upper);
        psi_lower.add(row.psi_lower);
    }
    ErrorComponents {
        kind,
        count,
        linear: linear.total(),
        integrality,
        psi_upper: psi_upper.total(),
        psi_lower: psi_lower.total(),
        per_divisor,
    }
}
