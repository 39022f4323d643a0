//! The Pell-type integer sequences at the heart of the crate, their
//! closed forms, and the coefficient tables of the step-combination
//! identity.
//!
//! Everything integer-valued is computed with exact `BigInt` recurrences;
//! the closed-form evaluations and the density ratios δ_n use the 192-bit
//! floats from [`crate::hp`] and exist only as cross-checks — the
//! recurrences are always the source of truth.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::hp::{silver_ratio, Hp};
use crate::{Error, Result};

/// Configuration cap on sequence indices. The tables grow like
/// (1+√2)^n, so anything beyond this is almost certainly a caller bug.
pub const MAX_N: usize = 256;

/// Exact tables of the coupled sequences
/// q_n = 2q_{n−1} + q_{n−2} (q_{−2} = q_{−1} = 1),
/// 2p_n = 4p_{n−1} + 2p_{n−2} + q_{n−1} + q_{n−2} (p_{−2} = p_{−1} = 0),
/// c_n = (q_n − 1)/2, and the ratios δ_n = p_n/(q_n ln q_n).
///
/// The integer tables carry the two seed entries at indices −2 and −1
/// because the decomposition identities reference q_{n−2} and c_{n−2}
/// even at n = 0 and n = 1.
#[derive(Clone, Debug)]
pub struct SequenceTables {
    n_max: usize,
    /// q_{−2}..q_{n_max}, stored with offset 2.
    q: Vec<BigInt>,
    /// p_{−2}..p_{n_max}, stored with offset 2.
    p: Vec<BigInt>,
    /// c_{−2}..c_{n_max}, stored with offset 2.
    c: Vec<BigInt>,
    /// δ_0..δ_{n_max}.
    delta: Vec<Hp>,
}

impl SequenceTables {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// q_n for −2 ≤ n ≤ n_max. Panics out of range.
    pub fn q(&self, n: i64) -> &BigInt {
        Self::pick(&self.q, n, self.n_max, "q")
    }

    /// p_n for −2 ≤ n ≤ n_max. Panics out of range.
    pub fn p(&self, n: i64) -> &BigInt {
        Self::pick(&self.p, n, self.n_max, "p")
    }

    /// c_n for −2 ≤ n ≤ n_max. Panics out of range.
    pub fn c(&self, n: i64) -> &BigInt {
        Self::pick(&self.c, n, self.n_max, "c")
    }

    fn pick<'a>(v: &'a [BigInt], n: i64, n_max: usize, what: &str) -> &'a BigInt {
        assert!(
            (-2..=n_max as i64).contains(&n),
            "{what}({n}) outside generated range -2..={n_max}"
        );
        &v[(n + 2) as usize]
    }

    /// δ_n at working precision, for 0 ≤ n ≤ n_max.
    pub fn delta_hp(&self, n: usize) -> &Hp {
        assert!(n <= self.n_max, "delta({n}) outside generated range");
        &self.delta[n]
    }

    /// δ_n rounded to `f64`.
    pub fn delta(&self, n: usize) -> f64 {
        self.delta_hp(n).to_f64()
    }
}

/// Builds the exact sequence tables for indices up to `n_max`.
///
/// Integer arithmetic throughout; the division by 2 in the p-recurrence
/// is checked exact at runtime (q_{n−1} + q_{n−2} must be even) rather
/// than assumed.
pub fn gen_sequences(n_max: usize) -> Result<SequenceTables> {
    if n_max > MAX_N {
        return Err(Error::Usage(format!(
            "n_max {n_max} exceeds the configured cap {MAX_N}"
        )));
    }
    let len = n_max + 3;
    let mut q: Vec<BigInt> = Vec::with_capacity(len);
    let mut p: Vec<BigInt> = Vec::with_capacity(len);
    q.push(BigInt::one()); // q_{-2}
    q.push(BigInt::one()); // q_{-1}
    p.push(BigInt::zero()); // p_{-2}
    p.push(BigInt::zero()); // p_{-1}
    for i in 2..len {
        let qn = 2 * &q[i - 1] + &q[i - 2];
        let carry = &q[i - 1] + &q[i - 2];
        assert!(
            (&carry % 2u32).is_zero(),
            "q_{} + q_{} odd; p-recurrence would not be integral",
            i as i64 - 3,
            i as i64 - 4
        );
        let pn = 2 * &p[i - 1] + &p[i - 2] + carry / 2;
        q.push(qn);
        p.push(pn);
    }
    let c: Vec<BigInt> = q.iter().map(|qn| (qn - 1) / 2).collect();
    let delta = (0..=n_max)
        .map(|n| {
            let qh = Hp::from_bigint(&q[n + 2]);
            Hp::from_bigint(&p[n + 2]).div(&qh.mul(&qh.ln()))
        })
        .collect();
    Ok(SequenceTables { n_max, q, p, c, delta })
}

/// Evaluates the closed forms of (q_n, p_n) at working precision and
/// returns them as a pair of `f64`. With λ₁ = 1+√2 and λ₂ = 1−√2:
///
/// q_n = (3/2 + √2)λ₁ⁿ + (3/2 − √2)λ₂ⁿ
/// p_n = (1/2 + 5√2/16)λ₁ⁿ + (1/2 − 5√2/16)λ₂ⁿ + (n/8)(λ₁ⁿ⁺² + λ₂ⁿ⁺²)
///
/// Callers compare the results against the exact recurrence values; the
/// closed forms are never used as inputs to anything else.
pub fn closed_form_check(n: usize) -> (f64, f64) {
    let sqrt2 = Hp::from_u64(2).sqrt();
    let l1 = silver_ratio();
    let l2 = Hp::from_u64(1).sub(&sqrt2);
    let half = Hp::from_u64(1).div(&Hp::from_u64(2));
    let three_half = Hp::from_u64(3).div(&Hp::from_u64(2));

    let l1n = l1.powi(n);
    let l2n = l2.powi(n);
    let qv = three_half
        .add(&sqrt2)
        .mul(&l1n)
        .add(&three_half.sub(&sqrt2).mul(&l2n));

    let coef = Hp::from_u64(5).mul(&sqrt2).div(&Hp::from_u64(16));
    let drift = Hp::from_u64(n as u64)
        .div(&Hp::from_u64(8))
        .mul(&l1.powi(n + 2).add(&l2.powi(n + 2)));
    let pv = half
        .add(&coef)
        .mul(&l1n)
        .add(&half.sub(&coef).mul(&l2n))
        .add(&drift);

    (qv.to_f64(), pv.to_f64())
}

/// The limit of δ_n as n → ∞, namely 1/(4 ln(1+√2)).
pub fn delta_limit_hp() -> Hp {
    Hp::from_u64(1).div(&Hp::from_u64(4).mul(&silver_ratio().ln()))
}

/// [`delta_limit_hp`] rounded to `f64`.
pub fn delta_limit() -> f64 {
    delta_limit_hp().to_f64()
}

/// One row of the coefficient system: the weights a_{j,n} (j = 0..n) and
/// b_{j,n} (j = 0..n−2) that express a depth-n window combination, plus
/// the totals α_n and β_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffTable {
    pub n: usize,
    pub a: Vec<BigInt>,
    pub b: Vec<BigInt>,
    pub alpha: BigInt,
    pub beta: BigInt,
}

/// Computes row `n` of the coefficient system by the joint recursion
///
/// a_{j,n} = 2a_{j,n−1} + b_{j,n−2},  a_{n,n} = 1,
/// b_{j,n} = a_{j,n−2} + 2b_{j,n−1},
///
/// where entries absent from a shorter row are read as 0 — that single
/// convention covers every branch, including b_{n−2,n} = a_{n−2,n−2}.
/// The totals follow α_n = 2α_{n−1} + β_{n−2}, β_n = α_{n−2} + 2β_{n−1}
/// from (α_0, β_0) = (2, 1) and (α_1, β_1) = (4, 3).
pub fn gen_coeffs(n: usize) -> CoeffTable {
    let mut rows: Vec<CoeffTable> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let row = match m {
            0 => CoeffTable {
                n: 0,
                a: vec![BigInt::one()],
                b: vec![],
                alpha: BigInt::from(2),
                beta: BigInt::one(),
            },
            1 => CoeffTable {
                n: 1,
                a: vec![BigInt::from(2), BigInt::one()],
                b: vec![],
                alpha: BigInt::from(4),
                beta: BigInt::from(3),
            },
            _ => {
                let prev = &rows[m - 1];
                let prev2 = &rows[m - 2];
                let at = |v: &[BigInt], j: usize| v.get(j).cloned().unwrap_or_default();
                let mut a: Vec<BigInt> = (0..m)
                    .map(|j| 2 * at(&prev.a, j) + at(&prev2.b, j))
                    .collect();
                a.push(BigInt::one());
                let b: Vec<BigInt> = (0..=m - 2)
                    .map(|j| at(&prev2.a, j) + 2 * at(&prev.b, j))
                    .collect();
                CoeffTable {
                    n: m,
                    a,
                    b,
                    alpha: 2 * &prev.alpha + &prev2.beta,
                    beta: &prev2.alpha + 2 * &prev.beta,
                }
            }
        };
        rows.push(row);
    }
    rows.pop().expect("n+1 rows built")
}

/// Checks the exact weight/step identity
/// 2p_n = Σ_j a_{j,n}(q_{j−1} + q_{j−2}) + Σ_j b_{j,n}(q_{j−1} + q_{j−2})
/// in integer arithmetic.
pub fn verify_pn_identity(n: usize) -> bool {
    let tables = gen_sequences(n).expect("n within cap");
    let coeffs = gen_coeffs(n);
    let step = |j: usize| tables.q(j as i64 - 1) + tables.q(j as i64 - 2);
    let mut sum = BigInt::zero();
    for (j, a) in coeffs.a.iter().enumerate() {
        sum += a * step(j);
    }
    for (j, b) in coeffs.b.iter().enumerate() {
        sum += b * step(j);
    }
    sum == 2 * tables.p(n as i64)
}

/// The weights A_i = (q_nⁱ + 1)/2 and B_i = (q_nⁱ − 1)/2 of the i-th
/// telescoping step at depth n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepWeights {
    pub n: usize,
    pub i: u32,
    pub a: BigInt,
    pub b: BigInt,
}

/// Computes the step weights exactly; `i` must be ≥ 1. At i = 1 these
/// coincide with (α_n, β_n).
pub fn step_weights(n: usize, i: u32) -> Result<StepWeights> {
    if i < 1 {
        return Err(Error::Usage(format!("step index i must be >= 1, got {i}")));
    }
    let tables = gen_sequences(n)?;
    let qi = tables.q(n as i64).pow(i);
    assert!(qi.is_odd(), "q_n^i must be odd");
    Ok(StepWeights {
        n,
        i,
        a: (&qi + 1) / 2,
        b: (&qi - 1) / 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_and_p_match_known_prefix() {
        let t = gen_sequences(4).unwrap();
        let q: Vec<i64> = (0..=4).map(|n| i64::try_from(t.q(n)).unwrap()).collect();
        let p: Vec<i64> = (0..=4).map(|n| i64::try_from(t.p(n)).unwrap()).collect();
        assert_eq!(q, [3, 7, 17, 41, 99]);
        assert_eq!(p, [1, 4, 14, 44, 131]);
        assert_eq!(i64::try_from(t.q(-2)).unwrap(), 1);
        assert_eq!(i64::try_from(t.q(-1)).unwrap(), 1);
        assert_eq!(i64::try_from(t.p(-1)).unwrap(), 0);
    }

    #[test]
    fn c_is_half_of_q_minus_one() {
        let t = gen_sequences(2).unwrap();
        let c: Vec<i64> = (0..=2).map(|n| i64::try_from(t.c(n)).unwrap()).collect();
        assert_eq!(c, [1, 3, 8]);
        assert_eq!(i64::try_from(t.c(-1)).unwrap(), 0);
    }

    #[test]
    fn delta_prefix_to_six_decimals() {
        let t = gen_sequences(4).unwrap();
        let got: Vec<String> = (0..=4).map(|n| format!("{:.6}", t.delta(n))).collect();
        assert_eq!(
            got,
            ["0.303413", "0.293656", "0.290670", "0.288986", "0.287965"]
        );
    }

    #[test]
    fn delta_decreases_and_approaches_the_limit() {
        let t = gen_sequences(40).unwrap();
        for n in 1..=40 {
            assert!(
                t.delta_hp(n) < t.delta_hp(n - 1),
                "delta not strictly decreasing at n={n}"
            );
        }
        let gap = t.delta(40) - delta_limit();
        assert!(gap > 0.0 && gap < 1e-2, "delta_40 gap {gap}");
    }

    #[test]
    fn limit_value() {
        // 1/(4 ln(1+√2)) to 16 digits, frozen from an independent
        // high-precision evaluation.
        assert!((delta_limit() - 0.283_648_164_276_627_7).abs() < 1e-12);
        let gap0 = gen_sequences(0).unwrap().delta(0) - delta_limit();
        assert!((gap0 - 0.019_764_9).abs() < 1e-5, "delta_0 gap {gap0}");
    }

    #[test]
    fn closed_forms_track_the_recurrences() {
        let t = gen_sequences(30).unwrap();
        let (q0, p0) = closed_form_check(0);
        assert!((q0 - 3.0).abs() < 1e-9 && (p0 - 1.0).abs() < 1e-9);
        for n in [4usize, 20, 30] {
            let (qv, pv) = closed_form_check(n);
            let qe = i64::try_from(t.q(n as i64)).unwrap() as f64;
            let pe = i64::try_from(t.p(n as i64)).unwrap() as f64;
            assert!((qv - qe).abs() / qe < 1e-6, "q closed form off at n={n}");
            assert!((pv - pe).abs() / pe < 1e-6, "p closed form off at n={n}");
        }
    }

    #[test]
    fn q_parity_and_c_recurrence() {
        let t = gen_sequences(30).unwrap();
        for n in 0..=30i64 {
            assert!(t.q(n).is_odd(), "q_{n} should be odd");
            assert!(
                ((t.q(n - 1) + t.q(n - 2)) % 2u32).is_zero(),
                "step at {n} should be even"
            );
            assert_eq!(t.c(n), &(2 * t.c(n - 1) + t.c(n - 2) + 1));
            assert_eq!(t.c(n) - t.c(n - 1), (t.q(n - 1) + t.q(n - 2)) / 2);
        }
    }

    #[test]
    fn coefficient_rows_match_hand_unrolling() {
        let big = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        let r0 = gen_coeffs(0);
        assert_eq!((r0.a, r0.b), (big(&[1]), big(&[])));
        assert_eq!((r0.alpha, r0.beta), (BigInt::from(2), BigInt::from(1)));
        let r1 = gen_coeffs(1);
        assert_eq!((r1.a, r1.b), (big(&[2, 1]), big(&[])));
        assert_eq!((r1.alpha, r1.beta), (BigInt::from(4), BigInt::from(3)));
        let r2 = gen_coeffs(2);
        assert_eq!((r2.a, r2.b), (big(&[4, 2, 1]), big(&[1])));
        assert_eq!((r2.alpha, r2.beta), (BigInt::from(9), BigInt::from(8)));
        let r3 = gen_coeffs(3);
        assert_eq!((r3.a, r3.b), (big(&[8, 4, 2, 1]), big(&[4, 1])));
        assert_eq!((r3.alpha, r3.beta), (BigInt::from(21), BigInt::from(20)));
    }

    #[test]
    fn coefficients_stay_positive_and_totals_follow_q() {
        let t = gen_sequences(20).unwrap();
        for n in 0..=20usize {
            let row = gen_coeffs(n);
            assert!(row.a.iter().all(|v| v >= &BigInt::one()));
            assert!(row.b.iter().all(|v| v >= &BigInt::one()));
            assert_eq!(&row.alpha, &((t.q(n as i64) + 1) / 2));
            assert_eq!(&row.beta, &((t.q(n as i64) - 1) / 2));
            assert_eq!(row.alpha - row.beta, BigInt::one());
        }
    }

    #[test]
    fn weight_identity_holds_through_twenty() {
        for n in 0..=20 {
            assert!(verify_pn_identity(n), "identity fails at n={n}");
        }
    }

    #[test]
    fn step_weight_values() {
        let w = step_weights(0, 1).unwrap();
        assert_eq!((w.a, w.b), (BigInt::from(2), BigInt::from(1)));
        let w = step_weights(0, 2).unwrap();
        assert_eq!((w.a, w.b), (BigInt::from(5), BigInt::from(4)));
        let w = step_weights(1, 3).unwrap();
        assert_eq!((w.a, w.b), (BigInt::from(172), BigInt::from(171)));
        assert!(step_weights(2, 0).is_err());
    }

    #[test]
    fn first_step_weight_equals_alpha_beta() {
        for n in 0..=10 {
            let w = step_weights(n, 1).unwrap();
            let row = gen_coeffs(n);
            assert_eq!(w.a, row.alpha);
            assert_eq!(w.b, row.beta);
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(gen_sequences(MAX_N).is_ok());
        assert!(matches!(gen_sequences(MAX_N + 1), Err(Error::Usage(_))));
    }
}
