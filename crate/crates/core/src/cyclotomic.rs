//! Exact arithmetic in rings of roots of unity.
//!
//! An element of order m lives in Z[x]/(xᵐ−1) as an integer coefficient
//! vector, deliberately left unreduced: sums of roots of unity stay
//! sums of monomials. The only nontrivial question — is this element
//! actually zero? — is answered exactly by reducing modulo the m-th
//! cyclotomic polynomial, which is itself computed by exact division.
//! This is what lets character orthogonality be tested as an identity
//! rather than as a float comparison.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, ToPrimitive, Zero};

/// Coefficients of the m-th cyclotomic polynomial Φ_m, ascending by
/// degree, computed by the exact division
/// Φ_m(x) = (xᵐ − 1) / Π_{d|m, d<m} Φ_d(x).
pub fn cyclotomic_poly(m: u64) -> Vec<BigInt> {
    assert!(m >= 1, "cyclotomic order must be positive");
    thread_local! {
        static CACHE: RefCell<BTreeMap<u64, Rc<Vec<BigInt>>>> = RefCell::new(BTreeMap::new());
    }
    fn compute(m: u64) -> Rc<Vec<BigInt>> {
        let mut denom = vec![BigInt::one()];
        for d in 1..m {
            if m % d == 0 {
                denom = poly_mul(&denom, &cyclotomic_poly(d));
            }
        }
        let mut num = vec![BigInt::zero(); m as usize + 1];
        num[0] = -BigInt::one();
        num[m as usize] = BigInt::one();
        Rc::new(poly_div_exact(&num, &denom))
    }
    CACHE.with(|c| {
        if let Some(hit) = c.borrow().get(&m) {
            return hit.as_ref().clone();
        }
        let fresh = compute(m);
        c.borrow_mut().insert(m, fresh.clone());
        fresh.as_ref().clone()
    })
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Divides, requiring a monic divisor and a zero remainder.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().map(|c| c.is_one()).unwrap_or(false), "divisor not monic");
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![BigInt::zero(); rem.len().saturating_sub(dd)];
    for top in (dd..rem.len()).rev() {
        let lead = std::mem::take(&mut rem[top]);
        if lead.is_zero() {
            continue;
        }
        for (j, dj) in den[..dd].iter().enumerate() {
            let sub = dj * &lead;
            rem[top - dd + j] -= sub;
        }
        quot[top - dd] = lead;
    }
    assert!(rem.iter().all(Zero::is_zero), "division left a remainder");
    quot
}

/// An exact element of Z[ζ_m]: an integer combination of the powers of
/// a primitive m-th root of unity, stored unreduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cyclotomic {
    order: u64,
    /// Coefficient of ζʲ for j = 0..order.
    coeffs: Vec<BigInt>,
}

impl Cyclotomic {
    pub fn zero(order: u64) -> Self {
        assert!(order >= 1);
        Cyclotomic {
            order,
            coeffs: vec![BigInt::zero(); order as usize],
        }
    }

    pub fn from_int(order: u64, v: i64) -> Self {
        let mut out = Self::zero(order);
        out.coeffs[0] = BigInt::from(v);
        out
    }

    /// ζʲ as an element, with j reduced mod the order.
    pub fn root(order: u64, j: u64) -> Self {
        let mut out = Self::zero(order);
        out.coeffs[(j % order) as usize] = BigInt::one();
        out
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn add_assign(&mut self, rhs: &Cyclotomic) {
        assert_eq!(self.order, rhs.order, "mixed orders");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }

    pub fn sub_assign(&mut self, rhs: &Cyclotomic) {
        assert_eq!(self.order, rhs.order, "mixed orders");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }

    pub fn scaled(&self, m: &BigInt) -> Cyclotomic {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * m).collect(),
        }
    }

    /// Complex conjugate: ζʲ ↦ ζ⁻ʲ.
    pub fn conj(&self) -> Cyclotomic {
        let m = self.order as usize;
        let mut coeffs = vec![BigInt::zero(); m];
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs[(m - j) % m] = c.clone();
        }
        Cyclotomic { order: self.order, coeffs }
    }

    /// Product via cyclic convolution (ζᵃ·ζᵇ = ζᵃ⁺ᵇ with wraparound).
    pub fn mul(&self, rhs: &Cyclotomic) -> Cyclotomic {
        assert_eq!(self.order, rhs.order, "mixed orders");
        let m = self.order as usize;
        let mut coeffs = vec![BigInt::zero(); m];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[(i + j) % m] += a * b;
            }
        }
        Cyclotomic { order: self.order, coeffs }
    }

    /// Exact zero test: the represented value is 0 iff the coefficient
    /// polynomial is divisible by Φ_order.
    pub fn is_zero(&self) -> bool {
        if self.coeffs.iter().all(Zero::is_zero) {
            return true;
        }
        let phi = cyclotomic_poly(self.order);
        let dd = phi.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            // Only order 1 lands here (deg Φ_m = φ(m) < m for m > 1);
            // Z[ζ₁] = Z, so the constant itself decides.
            return rem.iter().all(Zero::is_zero);
        }
        for top in (dd..rem.len()).rev() {
            let lead = std::mem::take(&mut rem[top]);
            if lead.is_zero() {
                continue;
            }
            for (j, pj) in phi[..dd].iter().enumerate() {
                let sub = pj * &lead;
                rem[top - dd + j] -= sub;
            }
        }
        rem.iter().all(Zero::is_zero)
    }

    /// Floating-point value Σ cⱼ·e^(2πij/m).
    pub fn eval_f64(&self) -> Complex<f64> {
        let mut acc = Complex::new(0.0, 0.0);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (s, co) = (2.0 * std::f64::consts::PI * j as f64 / self.order as f64).sin_cos();
            let w = c.to_f64().unwrap_or(f64::NAN);
            acc += Complex::new(co * w, s * w);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_poly(2), ints(&[1, 1]));
        assert_eq!(cyclotomic_poly(3), ints(&[1, 1, 1]));
        assert_eq!(cyclotomic_poly(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_poly(5), ints(&[1, 1, 1, 1, 1]));
        assert_eq!(cyclotomic_poly(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_poly(12), ints(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn degrees_match_the_totient() {
        for m in 1..=40u64 {
            assert_eq!(
                cyclotomic_poly(m).len() as u64 - 1,
                crate::arith::euler_phi(m),
                "degree of phi_{m}"
            );
        }
    }

    #[test]
    fn full_root_sums_vanish() {
        for m in 2..=20u64 {
            let mut acc = Cyclotomic::zero(m);
            for j in 0..m {
                acc.add_assign(&Cyclotomic::root(m, j));
            }
            assert!(acc.is_zero(), "sum of all order-{m} roots");
        }
        // A proper subset of the roots does not vanish.
        let mut partial = Cyclotomic::root(5, 0);
        partial.add_assign(&Cyclotomic::root(5, 1));
        assert!(!partial.is_zero());
    }

    #[test]
    fn hexagonal_identity() {
        // 1 + ζ₃ = ζ₆, i.e. 1 + ζ₆² − ζ₆ = 0.
        let mut v = Cyclotomic::from_int(6, 1);
        v.add_assign(&Cyclotomic::root(6, 2));
        v.sub_assign(&Cyclotomic::root(6, 1));
        assert!(v.is_zero());
    }

    #[test]
    fn multiplication_wraps_exponents() {
        let i = Cyclotomic::root(4, 1);
        let minus_one = i.mul(&i);
        let mut expect = Cyclotomic::from_int(4, -1);
        expect.sub_assign(&minus_one);
        assert!(expect.is_zero());
        // ζ₄ · ζ₄³ = 1.
        let one = Cyclotomic::root(4, 1).mul(&Cyclotomic::root(4, 3));
        let mut d = Cyclotomic::from_int(4, 1);
        d.sub_assign(&one);
        assert!(d.is_zero());
    }

    #[test]
    fn conjugation_inverts_roots() {
        let z = Cyclotomic::root(8, 3);
        let prod = z.mul(&z.conj());
        let mut d = Cyclotomic::from_int(8, 1);
        d.sub_assign(&prod);
        assert!(d.is_zero());
    }

    #[test]
    fn numeric_evaluation_agrees() {
        let z = Cyclotomic::root(8, 1);
        let v = z.eval_f64();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v.re - r).abs() < 1e-14 && (v.im - r).abs() < 1e-14);
        let mut s = Cyclotomic::from_int(3, 2);
        s.add_assign(&Cyclotomic::root(3, 1).scaled(&BigInt::from(3)));
        let w = s.eval_f64();
        assert!((w.re - (2.0 - 1.5)).abs() < 1e-13);
        assert!((w.im - 3.0 * (3.0f64).sqrt() / 2.0).abs() < 1e-13);
    }
}
