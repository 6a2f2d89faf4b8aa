//! Exact rational arithmetic on 128-bit integers.
//!
//! All comparisons and the sawtooth/floor decompositions in the lattice
//! counting method go through this type, so interval endpoints like
//! `(a0 - N)/v` are classified exactly instead of through floating point.
//! Overflow is a hard error (panic with a clear message), never silent
//! wraparound; the magnitudes occurring in this crate stay far below `i128`
//! range for every supported box size.

use std::cmp::Ordering;
use std::fmt;

/// A reduced fraction `num/den` with `den > 0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rat {
    num: i128,
    den: i128,
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Rat {
    /// Builds `num/den`, normalising the sign and reducing. Panics if `den == 0`.
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "rational with zero denominator");
        let g = gcd_i128(num, den).max(1);
        let sign = if den < 0 { -1 } else { 1 };
        Rat {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn from_int(n: i128) -> Self {
        Rat { num: n, den: 1 }
    }

    pub fn zero() -> Self {
        Rat { num: 0, den: 1 }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    /// Largest integer `<= self`.
    pub fn floor(&self) -> i128 {
        self.num.div_euclid(self.den)
    }

    /// Fractional part `self - floor(self)`, in `[0, 1)`.
    pub fn fract(&self) -> Rat {
        Rat::new(self.num.rem_euclid(self.den), self.den)
    }

    /// Sawtooth `psi(self) = self - floor(self) - 1/2` as an exact rational.
    pub fn sawtooth(&self) -> Rat {
        let f = self.fract();
        f.checked_sub(Rat::new(1, 2))
    }

    pub fn checked_add(self, other: Rat) -> Rat {
        let num = self
            .num
            .checked_mul(other.den)
            .and_then(|a| other.num.checked_mul(self.den).and_then(|b| a.checked_add(b)))
            .expect("overflow in rational addition");
        let den = self.den.checked_mul(other.den).expect("overflow in rational addition");
        Rat::new(num, den)
    }

    pub fn checked_sub(self, other: Rat) -> Rat {
        self.checked_add(Rat {
            num: -other.num,
            den: other.den,
        })
    }

    pub fn checked_mul(self, other: Rat) -> Rat {
        // Cross-reduce first to keep intermediates small.
        let g1 = gcd_i128(self.num, other.den).max(1);
        let g2 = gcd_i128(other.num, self.den).max(1);
        let num = (self.num / g1)
            .checked_mul(other.num / g2)
            .expect("overflow in rational multiplication");
        let den = (self.den / g2)
            .checked_mul(other.den / g1)
            .expect("overflow in rational multiplication");
        Rat::new(num, den)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        // den > 0 on both sides, so cross-multiplication preserves order.
        let lhs = self.num.checked_mul(other.den).expect("overflow in rational comparison");
        let rhs = other.num.checked_mul(self.den).expect("overflow in rational comparison");
        lhs.cmp(&rhs)
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalisation_and_order() {
        assert_eq!(Rat::new(2, 4), Rat::new(1, 2));
        assert_eq!(Rat::new(1, -2), Rat::new(-1, 2));
        assert!(Rat::new(-1, 3) < Rat::new(1, 4));
        assert!(Rat::new(7, 3) > Rat::from_int(2));
    }

    #[test]
    fn floor_and_fract() {
        assert_eq!(Rat::new(7, 2).floor(), 3);
        assert_eq!(Rat::new(-7, 2).floor(), -4);
        assert_eq!(Rat::new(-7, 2).fract(), Rat::new(1, 2));
        assert!(Rat::new(6, 3).is_integer());
    }

    #[test]
    fn sawtooth_matches_definition() {
        assert_eq!(Rat::new(1, 4).sawtooth(), Rat::new(-1, 4));
        assert_eq!(Rat::from_int(7).sawtooth(), Rat::new(-1, 2));
        assert_eq!(Rat::new(-1, 4).sawtooth(), Rat::new(1, 4));
    }

    #[test]
    fn arithmetic() {
        let a = Rat::new(1, 6);
        let b = Rat::new(1, 10);
        assert_eq!(a.checked_add(b), Rat::new(4, 15));
        assert_eq!(a.checked_sub(b), Rat::new(1, 15));
        assert_eq!(a.checked_mul(b), Rat::new(1, 60));
    }
}
