//! Period-q functions with exact complex-rational values, and the
//! two-constant class test: a sup-norm bound A and a mean-square window
//! bound B. Membership decisions are made entirely in exact arithmetic;
//! floating point appears only in reported magnitudes.

use std::io::BufRead;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::gauss::{abs_sqr, parse_gauss, rational_from_f64, GaussRational};
use crate::hp::Hp;
use crate::{Error, Result};

/// A function on the integers with period `q`, stored as its exact
/// values on the residues `0..q-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicFunction {
    q: u64,
    values: Vec<GaussRational>,
}

/// Result of the window-moment scan: either the attained bound with the
/// smallest window length attaining it, or the marker that no finite
/// bound exists because the function has nonzero mean.
#[derive(Clone, Debug, PartialEq)]
pub enum MinB {
    Finite { value: BigRational, k: u64 },
    Infinite,
}

impl MinB {
    /// The bound as `f64`, with `+∞` for the nonzero-mean case.
    pub fn value_f64(&self) -> f64 {
        match self {
            MinB::Finite { value, .. } => value.to_f64().unwrap_or(f64::NAN),
            MinB::Infinite => f64::INFINITY,
        }
    }

    /// The attaining window length, 0 for the nonzero-mean case.
    pub fn k(&self) -> u64 {
        match self {
            MinB::Finite { k, .. } => *k,
            MinB::Infinite => 0,
        }
    }
}

/// The class parameters: `a` bounds every |f(n)|, `b` bounds the
/// averaged squared window sums, `q` is the period the pair refers to.
#[derive(Clone, Copy, Debug)]
pub struct ClassFParams {
    pub a: f64,
    pub b: f64,
    pub q: u64,
}

impl PeriodicFunction {
    /// Wraps `q` exact values as a period-`q` function. The length must
    /// equal the period and the period must be at least 1.
    pub fn new(q: u64, values: Vec<GaussRational>) -> Result<Self> {
        if q < 1 {
            return Err(Error::Construction("period must be >= 1".into()));
        }
        if values.len() as u64 != q {
            return Err(Error::Construction(format!(
                "period {q} with {} values",
                values.len()
            )));
        }
        Ok(PeriodicFunction { q, values })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn values(&self) -> &[GaussRational] {
        &self.values
    }

    /// f(n) for any integer n, reducing with the mathematical
    /// (non-negative) remainder: f(-1) is the value at residue q-1.
    pub fn eval(&self, n: i64) -> &GaussRational {
        &self.values[n.rem_euclid(self.q as i64) as usize]
    }

    /// Σ f(n) over one period, exactly.
    pub fn period_sum(&self) -> GaussRational {
        let mut acc = GaussRational::zero();
        for v in &self.values {
            acc += v.clone();
        }
        acc
    }

    pub fn has_zero_mean(&self) -> bool {
        self.period_sum().is_zero()
    }

    /// max |f(n)|² over a period, exactly.
    pub fn bound_a_sqr(&self) -> BigRational {
        self.values
            .iter()
            .map(abs_sqr)
            .max()
            .expect("period >= 1")
    }

    /// max |f(n)| over a period: the squared maximum is found exactly,
    /// and the single square root happens at output precision.
    pub fn bound_a(&self) -> f64 {
        Hp::from_ratio(&self.bound_a_sqr()).sqrt().to_f64()
    }

    /// Scans window lengths `K = 1..=k_max` for the largest value of
    /// (1/(qK)) Σ_{n=1}^{q} |Σ_{k=1}^{K} f(n+k)|², entirely in exact
    /// arithmetic.
    ///
    /// A nonzero mean makes the quantity unbounded in K (each extra full
    /// period adds the mean q times), reported as [`MinB::Infinite`].
    /// Ties prefer the smallest window length. Each step extends every
    /// window by one term, so the scan costs O(q) per window length.
    pub fn min_b(&self, k_max: u64) -> Result<MinB> {
        if k_max < 1 {
            return Err(Error::Usage(format!("k_max must be >= 1, got {k_max}")));
        }
        if !self.has_zero_mean() {
            return Ok(MinB::Infinite);
        }
        let q = self.q as usize;
        // windows[n-1] accumulates f(n+1) + ... + f(n+K) for n = 1..q.
        let mut windows: Vec<GaussRational> = vec![GaussRational::zero(); q];
        let mut best: Option<(BigRational, u64)> = None;
        for k in 1..=k_max {
            for (i, w) in windows.iter_mut().enumerate() {
                let n = i as i64 + 1;
                *w += self.eval(n + k as i64).clone();
            }
            let moment: BigRational = windows.iter().map(abs_sqr).sum();
            let ratio = moment / BigRational::from_integer((self.q * k).into());
            match &best {
                Some((b, _)) if *b >= ratio => {}
                _ => best = Some((ratio, k)),
            }
        }
        let (value, k) = best.expect("k_max >= 1");
        Ok(MinB::Finite { value, k })
    }

    /// Tests membership in the class with sup bound `params.a` and
    /// window bound `params.b`, certifying windows up to `k_max`.
    ///
    /// For zero-mean functions every window length reduces mod q (full
    /// periods contribute nothing), so `k_max = q` certifies all K. The
    /// comparisons are exact: the float parameters are converted to the
    /// rationals they denote.
    pub fn is_member(&self, params: &ClassFParams, k_max: u64) -> Result<bool> {
        assert_eq!(params.q, self.q, "class parameters for a different period");
        let (a, b) = match (rational_from_f64(params.a), rational_from_f64(params.b)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Usage(
                    "class parameters must be finite".into(),
                ))
            }
        };
        if a < BigRational::zero() || b < BigRational::zero() {
            return Err(Error::Usage("class parameters must be non-negative".into()));
        }
        if self.bound_a_sqr() > &a * &a {
            return Ok(false);
        }
        match self.min_b(k_max)? {
            MinB::Infinite => Ok(false),
            MinB::Finite { value, .. } => Ok(value <= b),
        }
    }

    /// Reads a function from CSV rows `residue,re,im` where `re` and
    /// `im` are exact rationals (`num` or `num/den`). The rows must
    /// cover each residue `0..q-1` exactly once, where q is the row
    /// count; order is free, blank lines and `#` comments are skipped.
    pub fn from_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut rows: Vec<(u64, GaussRational)> = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!(
                    "line {}: expected residue,re,im",
                    lineno + 1
                )));
            }
            let residue: u64 = fields[0].trim().parse().map_err(|_| {
                Error::Parse(format!("line {}: bad residue {:?}", lineno + 1, fields[0]))
            })?;
            rows.push((residue, parse_gauss(fields[1], fields[2])?));
        }
        let q = rows.len() as u64;
        if q == 0 {
            return Err(Error::Parse("no data rows".into()));
        }
        let mut values: Vec<Option<GaussRational>> = vec![None; q as usize];
        for (residue, value) in rows {
            if residue >= q {
                return Err(Error::Parse(format!(
                    "residue {residue} out of range for period {q}"
                )));
            }
            let slot = &mut values[residue as usize];
            if slot.is_some() {
                return Err(Error::Parse(format!("residue {residue} appears twice")));
            }
            *slot = Some(value);
        }
        let values = values
            .into_iter()
            .map(|v| v.expect("all residues present by counting"))
            .collect();
        PeriodicFunction::new(q, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::gauss_int;

    fn from_ints(vals: &[(i64, i64)]) -> PeriodicFunction {
        PeriodicFunction::new(
            vals.len() as u64,
            vals.iter().map(|&(re, im)| gauss_int(re, im)).collect(),
        )
        .unwrap()
    }

    /// The quadratic-residue pattern mod 5: 0, 1, -1, -1, 1.
    fn legendre5() -> PeriodicFunction {
        from_ints(&[(0, 0), (1, 0), (-1, 0), (-1, 0), (1, 0)])
    }

    #[test]
    fn construction_checks_length() {
        assert!(PeriodicFunction::new(2, vec![gauss_int(1, 0)]).is_err());
        assert!(PeriodicFunction::new(0, vec![]).is_err());
        assert!(PeriodicFunction::new(1, vec![gauss_int(0, 0)]).is_ok());
    }

    #[test]
    fn evaluation_wraps_negatives() {
        let f = from_ints(&[(0, 0), (1, 0), (-1, 0)]);
        assert_eq!(f.eval(-1), &gauss_int(-1, 0));
        assert_eq!(f.eval(3), &gauss_int(0, 0));
        let z = from_ints(&[(0, 0)]);
        assert_eq!(z.eval(12345), &gauss_int(0, 0));
        assert_eq!(z.eval(-12345), &gauss_int(0, 0));
        assert_eq!(legendre5().eval(7), &gauss_int(-1, 0));
    }

    #[test]
    fn sup_bound_values() {
        assert_eq!(legendre5().bound_a(), 1.0);
        let f = from_ints(&[(3, 4), (0, 0)]);
        assert_eq!(f.bound_a(), 5.0);
        assert_eq!(from_ints(&[(0, 0)]).bound_a(), 0.0);
    }

    #[test]
    fn window_bound_for_legendre5() {
        let m = legendre5().min_b(5).unwrap();
        match m {
            MinB::Finite { ref value, k } => {
                assert_eq!(value, &BigRational::new(4.into(), 5.into()));
                assert_eq!(k, 1);
            }
            MinB::Infinite => panic!("legendre5 has zero mean"),
        }
        assert_eq!(m.value_f64(), 0.8);
    }

    #[test]
    fn window_bound_degenerate_cases() {
        let zero = from_ints(&[(0, 0), (0, 0)]);
        assert_eq!(
            zero.min_b(4).unwrap(),
            MinB::Finite { value: BigRational::zero(), k: 1 }
        );
        let ones = from_ints(&[(1, 0), (1, 0)]);
        assert_eq!(ones.min_b(4).unwrap(), MinB::Infinite);
        assert_eq!(ones.min_b(4).unwrap().value_f64(), f64::INFINITY);
        assert_eq!(ones.min_b(4).unwrap().k(), 0);
        assert!(zero.min_b(0).is_err());
    }

    #[test]
    fn window_scan_reduces_over_full_periods() {
        // Zero mean: lengths q..3q revisit the same window sums, so
        // extending the scan cannot change the maximum.
        let f = from_ints(&[(2, 1), (-1, 0), (-1, -1), (1, 1), (-1, -1)]);
        assert!(f.has_zero_mean());
        let short = f.min_b(5).unwrap();
        let long = f.min_b(15).unwrap();
        assert_eq!(short, long);
    }

    #[test]
    fn membership_decisions() {
        let params = |a: f64, b: f64, q: u64| ClassFParams { a, b, q };
        assert!(legendre5().is_member(&params(1.0, 1.0, 5), 5).unwrap());
        let ones = from_ints(&[(1, 0), (1, 0), (1, 0)]);
        assert!(!ones.is_member(&params(1.0, 1.0, 3), 3).unwrap());
        let zero = from_ints(&[(0, 0)]);
        assert!(zero.is_member(&params(0.0, 0.0, 1), 1).unwrap());
        // Sup bound fails even though the window bound passes.
        let spike = from_ints(&[(2, 0), (-2, 0)]);
        assert!(!spike.is_member(&params(1.0, 4.0, 2), 2).unwrap());
        assert!(spike.is_member(&params(2.0, 4.0, 2), 2).unwrap());
    }

    #[test]
    fn csv_roundtrip() {
        let text = "# quadratic residues mod 5\n0,0,0\n1,1,0\n2,-1,0\n3,-1,0\n4,1,0\n";
        let f = PeriodicFunction::from_csv(text.as_bytes()).unwrap();
        assert_eq!(f, legendre5());
        let shuffled = "2,-1,0\n0,0,0\n4,1,0\n1,1,0\n3,-1,0\n";
        assert_eq!(PeriodicFunction::from_csv(shuffled.as_bytes()).unwrap(), f);
        let fractional = "0,1/2,0\n1,-1/2,0\n";
        let g = PeriodicFunction::from_csv(fractional.as_bytes()).unwrap();
        assert_eq!(g.bound_a(), 0.5);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(PeriodicFunction::from_csv("0,1\n".as_bytes()).is_err());
        assert!(PeriodicFunction::from_csv("0,1,0\n0,1,0\n".as_bytes()).is_err());
        assert!(PeriodicFunction::from_csv("5,1,0\n".as_bytes()).is_err());
        assert!(PeriodicFunction::from_csv("".as_bytes()).is_err());
        assert!(PeriodicFunction::from_csv("0,1/0,0\n".as_bytes()).is_err());
    }
}
