//! Software floating point at a fixed 192-bit significand.
//!
//! The delta table, the closed-form cross-checks, and the inequality
//! verifiers all need logarithms and square roots well past the 53 bits
//! of an `f64`. This wraps `astro_float::BigFloat` with one crate-wide
//! precision so call sites don't thread precision and rounding-mode
//! arguments around, and converts to `f64` only at the edges.

use std::cell::RefCell;
use std::cmp::Ordering;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;

/// Working precision in bits for every irrational evaluation in the crate.
pub const PRECISION: usize = 192;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

/// A fixed-precision real number. Arithmetic is rounded to [`PRECISION`]
/// bits; construction from integers and rationals is exact up to that.
#[derive(Clone, Debug)]
pub struct Hp(BigFloat);

impl Hp {
    pub fn from_u64(v: u64) -> Self {
        Hp(BigFloat::from_u64(v, PRECISION))
    }

    pub fn from_i64(v: i64) -> Self {
        Hp(BigFloat::from_i64(v, PRECISION))
    }

    pub fn from_f64(v: f64) -> Self {
        Hp(BigFloat::from_f64(v, PRECISION))
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        let s = v.to_string();
        CONSTS.with(|cc| Hp(BigFloat::parse(&s, Radix::Dec, PRECISION, RM, &mut cc.borrow_mut())))
    }

    pub fn from_ratio(v: &BigRational) -> Self {
        Hp::from_bigint(v.numer()).div(&Hp::from_bigint(v.denom()))
    }

    pub fn add(&self, rhs: &Hp) -> Hp {
        Hp(self.0.add(&rhs.0, PRECISION, RM))
    }

    pub fn sub(&self, rhs: &Hp) -> Hp {
        Hp(self.0.sub(&rhs.0, PRECISION, RM))
    }

    pub fn mul(&self, rhs: &Hp) -> Hp {
        Hp(self.0.mul(&rhs.0, PRECISION, RM))
    }

    pub fn div(&self, rhs: &Hp) -> Hp {
        Hp(self.0.div(&rhs.0, PRECISION, RM))
    }

    /// Square root; negative input yields NaN, matching the backend.
    pub fn sqrt(&self) -> Hp {
        Hp(self.0.sqrt(PRECISION, RM))
    }

    /// Natural logarithm.
    pub fn ln(&self) -> Hp {
        CONSTS.with(|cc| Hp(self.0.ln(PRECISION, RM, &mut cc.borrow_mut())))
    }

    pub fn powi(&self, exp: usize) -> Hp {
        Hp(self.0.powi(exp, PRECISION, RM))
    }

    pub fn abs(&self) -> Hp {
        Hp(self.0.abs())
    }

    pub fn neg(&self) -> Hp {
        Hp(self.0.neg())
    }

    pub fn is_nan(&self) -> bool {
        self.0.is_nan()
    }

    /// Nearest `f64`. Goes through the decimal representation, which the
    /// standard parser rounds correctly; accuracy loss is one ulp at most.
    pub fn to_f64(&self) -> f64 {
        let s = format!("{}", self.0);
        s.parse::<f64>()
            .unwrap_or_else(|_| panic!("unparseable float repr: {s}"))
    }
}

impl PartialEq for Hp {
    fn eq(&self, other: &Self) -> bool {
        matches!(self.partial_cmp(other), Some(Ordering::Equal))
    }
}

impl PartialOrd for Hp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.0.is_nan() || other.0.is_nan() {
            return None;
        }
        let d = self.0.sub(&other.0, PRECISION, RM);
        if d.is_zero() {
            Some(Ordering::Equal)
        } else if d.is_negative() {
            Some(Ordering::Less)
        } else {
            Some(Ordering::Greater)
        }
    }
}

impl std::fmt::Display for Hp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// 1 + √2, the dominant root of x² = 2x + 1.
pub fn silver_ratio() -> Hp {
    Hp::from_u64(1).add(&Hp::from_u64(2).sqrt())
}
