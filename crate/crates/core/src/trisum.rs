//! Triangular and square partial sums, and exact verifiers for the
//! window-decomposition identities built from them.
//!
//! The three kernels are
//!
//! * `T₋(x, y) = Σ_{k=1}^{y} (y+1−k)·f(x+k)` — weights fall off to the right,
//! * `T₊(x, y) = Σ_{k=1}^{y} k·f(x+k)` — weights grow to the right,
//! * `S(x, y) = Σ_{i=x+1}^{x+y} Σ_{j=0}^{y−1} f(i+j)` — a y×y parallelogram.
//!
//! The fast paths evaluate these with running sums (one addition per term,
//! no multiplications); literal double-loop oracles are kept as separate
//! code paths so the two can be played against each other in tests.
//! Identity verification runs in exact complex-rational arithmetic:
//! "true" means bit-exact equality. The two inequality verifiers at the
//! bottom compare exact sums against square-root expressions evaluated in
//! 192-bit floats.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::gauss::{abs_sqr, rational_from_f64, GaussRational};
use crate::hp::Hp;
use crate::periodic::{ClassFParams, MinB, PeriodicFunction};
use crate::seq::{gen_sequences, CoeffTable, SequenceTables};
use crate::{Error, Result};

/// A half-open summation window: left anchor `x`, length `y ≥ 0`. The
/// kernels sum over the points x+1 .. x+y.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub x: i64,
    pub y: i64,
}

impl Window {
    pub fn new(x: i64, y: i64) -> Result<Self> {
        if y < 0 {
            return Err(Error::Construction(format!("window length {y} < 0")));
        }
        Ok(Window { x, y })
    }
}

/// Value domain for the sum kernels: exact complex rationals for
/// identity checks, `f64` components for numeric probes of functions
/// with irrational values.
pub trait SumValue: Clone {
    fn zero_value() -> Self;
    fn add_ref(&mut self, rhs: &Self);
}

impl SumValue for GaussRational {
    fn zero_value() -> Self {
        Zero::zero()
    }
    fn add_ref(&mut self, rhs: &Self) {
        *self += rhs.clone();
    }
}

impl SumValue for Complex<f64> {
    fn zero_value() -> Self {
        Zero::zero()
    }
    fn add_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
}

/// Σ_{k=1}^{y} (y+1−k)·f(x+k) for an arbitrary integrand, by ascending
/// running sums: after step j the running sum holds f(x+1)+…+f(x+j), and
/// accumulating it once per step gives f(x+k) multiplicity y+1−k.
pub fn t_minus_fn<V: SumValue>(f: &impl Fn(i64) -> V, x: i64, y: i64) -> V {
    assert!(y >= 0, "negative window length {y}");
    let mut run = V::zero_value();
    let mut acc = V::zero_value();
    for j in 1..=y {
        run.add_ref(&f(x + j));
        acc.add_ref(&run);
    }
    acc
}

/// Σ_{k=1}^{y} k·f(x+k), by the same running-sum scheme walked from the
/// right end, giving f(x+k) multiplicity k.
pub fn t_plus_fn<V: SumValue>(f: &impl Fn(i64) -> V, x: i64, y: i64) -> V {
    assert!(y >= 0, "negative window length {y}");
    let mut run = V::zero_value();
    let mut acc = V::zero_value();
    for j in (1..=y).rev() {
        run.add_ref(&f(x + j));
        acc.add_ref(&run);
    }
    acc
}

/// The square sum S(x, y), assembled from the two triangles on either
/// side of the anti-diagonal: S(x, y) = T₊(x, y) + T₋(x+y, y−1).
pub fn s_sum_fn<V: SumValue>(f: &impl Fn(i64) -> V, x: i64, y: i64) -> V {
    assert!(y >= 0, "negative window length {y}");
    if y == 0 {
        return V::zero_value();
    }
    let mut acc = t_plus_fn(f, x, y);
    acc.add_ref(&t_minus_fn(f, x + y, y - 1));
    acc
}

/// T₋ of a periodic function, exactly.
pub fn t_minus(f: &PeriodicFunction, x: i64, y: i64) -> GaussRational {
    t_minus_fn(&|n| f.eval(n).clone(), x, y)
}

/// T₊ of a periodic function, exactly.
pub fn t_plus(f: &PeriodicFunction, x: i64, y: i64) -> GaussRational {
    t_plus_fn(&|n| f.eval(n).clone(), x, y)
}

/// S of a periodic function, exactly.
pub fn s_sum(f: &PeriodicFunction, x: i64, y: i64) -> GaussRational {
    s_sum_fn(&|n| f.eval(n).clone(), x, y)
}

/// Literal triangle evaluation of T₋: row i runs over columns
/// j = x+1−i .. 0 of f(i+j). Reference implementation for tests; kept
/// deliberately independent of the running-sum path.
pub fn t_minus_oracle(f: &PeriodicFunction, x: i64, y: i64) -> GaussRational {
    assert!(y >= 0);
    let mut acc = GaussRational::zero();
    for i in x + 1..=x + y {
        let mut j = x + 1 - i;
        while j <= 0 {
            acc += f.eval(i + j).clone();
            j += 1;
        }
    }
    acc
}

/// Literal triangle evaluation of T₊: row i runs over columns
/// j = 0 .. x+y−i of f(i+j). Reference implementation for tests.
pub fn t_plus_oracle(f: &PeriodicFunction, x: i64, y: i64) -> GaussRational {
    assert!(y >= 0);
    let mut acc = GaussRational::zero();
    for i in x + 1..=x + y {
        for j in 0..=x + y - i {
            acc += f.eval(i + j).clone();
        }
    }
    acc
}

/// Literal grid evaluation of S over all y² points. Reference
/// implementation for tests.
pub fn s_sum_oracle(f: &PeriodicFunction, x: i64, y: i64) -> GaussRational {
    assert!(y >= 0);
    let mut acc = GaussRational::zero();
    for i in x + 1..=x + y {
        for j in 0..=y - 1 {
            acc += f.eval(i + j).clone();
        }
    }
    acc
}

/// Checks the re-indexing identity
/// Σ_{i=x}^{x+y} Σ_{j=u}^{u+v} f(i+j) = Σ_{i=x−k}^{x+y−k} Σ_{j=u+k}^{u+v+k} f(i+j)
/// by direct evaluation of both rectangles. Always true for every f; a
/// false return means the evaluator itself is broken.
pub fn shift_check(f: &PeriodicFunction, x: i64, y: i64, u: i64, v: i64, k: i64) -> bool {
    assert!(y >= 0 && v >= 0, "negative rectangle extent");
    let rect = |x0: i64, u0: i64| {
        let mut acc = GaussRational::zero();
        for i in x0..=x0 + y {
            for j in u0..=u0 + v {
                acc += f.eval(i + j).clone();
            }
        }
        acc
    };
    rect(x, u) == rect(x - k, u + k)
}

/// Default refusal threshold for decomposition sizes: parameter sets
/// with q_nᵗ beyond this are rejected rather than truncated.
pub const DEFAULT_SIZE_CAP: u64 = 1_000_000;

/// The bookkeeping of one telescoping decomposition: the ladder
/// K_j = (q_nᵗ⁻ʲ−1)/2 for j = 0..τ, the selected level `i`, and the
/// window shift s belonging to that level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionParams {
    pub n: usize,
    pub tau: u32,
    pub i: u32,
    /// K_0 .. K_τ, descending, ending in 0.
    pub k: Vec<i64>,
    /// s = (q_{n−1}+q_{n−2})·K_i + c_{n−1}+c_{n−2}.
    pub s: i64,
}

/// Builds decomposition parameters under the default size cap.
/// Requires τ ≥ 3 and 1 ≤ i ≤ τ.
pub fn make_decomposition_params(n: usize, tau: u32, i: u32) -> Result<DecompositionParams> {
    make_decomposition_params_capped(n, tau, i, DEFAULT_SIZE_CAP)
}

/// As [`make_decomposition_params`] with an explicit size cap on q_nᵗ.
pub fn make_decomposition_params_capped(
    n: usize,
    tau: u32,
    i: u32,
    cap: u64,
) -> Result<DecompositionParams> {
    if tau < 3 {
        return Err(Error::Usage(format!("tau must be >= 3, got {tau}")));
    }
    if !(1..=tau).contains(&i) {
        return Err(Error::Usage(format!("level i={i} outside 1..={tau}")));
    }
    let tables = gen_sequences(n)?;
    let qn = tables.q(n as i64);
    let top = qn.pow(tau);
    if top > BigInt::from(cap) {
        return Err(Error::SizeCap(format!(
            "q_{n}^{tau} = {top} exceeds the cap {cap}"
        )));
    }
    let k: Vec<i64> = (0..=tau)
        .map(|j| {
            let kj: BigInt = (qn.pow(tau - j) - 1) / 2;
            kj.to_i64().expect("below the cap")
        })
        .collect();
    let small = |v: &BigInt| v.to_i64().expect("tiny by cap");
    let ki = k[i as usize];
    let s = (small(tables.q(n as i64 - 1)) + small(tables.q(n as i64 - 2))) * ki
        + small(tables.c(n as i64 - 1))
        + small(tables.c(n as i64 - 2));
    Ok(DecompositionParams { n, tau, i, k, s })
}

fn scaled(z: &GaussRational, m: &BigInt) -> GaussRational {
    let m = BigRational::from_integer(m.clone());
    Complex::new(&z.re * &m, &z.im * &m)
}

/// Per-level window geometry used by the decomposition identities; all
/// values are small by the size cap.
struct Levels {
    tables: SequenceTables,
}

impl Levels {
    fn new(n: usize) -> Self {
        Levels {
            tables: gen_sequences(n).expect("n is tiny under the size cap"),
        }
    }
    fn q(&self, j: i64) -> i64 {
        self.tables.q(j).to_i64().expect("small under the cap")
    }
    fn c(&self, j: i64) -> i64 {
        self.tables.c(j).to_i64().expect("small under the cap")
    }
    /// Length of the level-j square window: (q_{j−2}+q_{j−1})·K + c_j − c_{j−1}.
    fn s_len(&self, j: i64, k: i64) -> i64 {
        (self.q(j - 2) + self.q(j - 1)) * k + self.c(j) - self.c(j - 1)
    }
    /// The left-anchored level-j square: S(a − q_{j−2}K − c_{j−2}, s_len).
    fn s_left(&self, f: &PeriodicFunction, j: i64, a: i64, k: i64) -> GaussRational {
        s_sum(f, a - self.q(j - 2) * k - self.c(j - 2), self.s_len(j, k))
    }
    /// The right-anchored level-j square: S(a − q_jK − c_j, s_len).
    fn s_right(&self, f: &PeriodicFunction, j: i64, a: i64, k: i64) -> GaussRational {
        s_sum(f, a - self.q(j) * k - self.c(j), self.s_len(j, k))
    }
}

/// Checks the one-step descent of the falling-weight sum: with
/// K' = q_n·K + c_n,
///
/// T₋(a, K') = 2·T₋(a, q_{n−1}K + c_{n−1})
///           − T₊(a − q_{n−2}K − c_{n−2}, q_{n−2}K + c_{n−2})
///           + S(a − q_{n−2}K − c_{n−2}, (q_{n−2}+q_{n−1})K + c_n − c_{n−1}),
///
/// exactly, at K = K_i from `params`.
pub fn verify_lemma_minus(f: &PeriodicFunction, a: i64, params: &DecompositionParams) -> bool {
    assert!(
        (1..=params.tau).contains(&params.i),
        "level {} outside 1..={}",
        params.i,
        params.tau
    );
    let lv = Levels::new(params.n);
    let n = params.n as i64;
    let ki = params.k[params.i as usize];
    let prev = params.k[params.i as usize - 1];
    let lhs = t_minus(f, a, prev);
    let mut rhs = scaled(&t_minus(f, a, lv.q(n - 1) * ki + lv.c(n - 1)), &2.into());
    rhs -= t_plus(
        f,
        a - lv.q(n - 2) * ki - lv.c(n - 2),
        lv.q(n - 2) * ki + lv.c(n - 2),
    );
    rhs += lv.s_left(f, n, a, ki);
    lhs == rhs
}

/// Checks the mirrored one-step descent of the rising-weight sum:
///
/// T₊(a − K', K') = 2·T₊(a − q_{n−1}K − c_{n−1}, q_{n−1}K + c_{n−1})
///                − T₋(a, q_{n−2}K + c_{n−2})
///                + S(a − q_nK − c_n, (q_{n−2}+q_{n−1})K + c_n − c_{n−1}),
///
/// exactly, at K = K_i from `params`.
pub fn verify_lemma_plus(f: &PeriodicFunction, a: i64, params: &DecompositionParams) -> bool {
    assert!(
        (1..=params.tau).contains(&params.i),
        "level {} outside 1..={}",
        params.i,
        params.tau
    );
    let lv = Levels::new(params.n);
    let n = params.n as i64;
    let ki = params.k[params.i as usize];
    let prev = params.k[params.i as usize - 1];
    let lhs = t_plus(f, a - prev, prev);
    let mut rhs = scaled(
        &t_plus(
            f,
            a - lv.q(n - 1) * ki - lv.c(n - 1),
            lv.q(n - 1) * ki + lv.c(n - 1),
        ),
        &2.into(),
    );
    rhs -= t_minus(f, a, lv.q(n - 2) * ki + lv.c(n - 2));
    rhs += lv.s_right(f, n, a, ki);
    lhs == rhs
}

/// Checks both fully-unrolled decompositions at once: with K = K_i,
/// K' = K_{i−1} and the weights (a_j, b_j, α, β) from `coeffs`,
///
/// T₋(a, K') = α·T₋(a, K) − β·T₊(a−K, K) + Σ_j a_j·S_left(j) − Σ_j b_j·S_right(j)
/// T₊(a−K', K') = α·T₊(a−K, K) − β·T₋(a, K) + Σ_j a_j·S_right(j) − Σ_j b_j·S_left(j)
///
/// where S_left(j)/S_right(j) are the level-j squares of [`Levels`].
/// Both equalities must hold exactly.
pub fn verify_lemma_combined(
    f: &PeriodicFunction,
    a: i64,
    params: &DecompositionParams,
    coeffs: &CoeffTable,
) -> bool {
    assert!(
        params.tau >= 1 && (1..params.tau).contains(&params.i),
        "level {} outside 1..{}",
        params.i,
        params.tau
    );
    assert_eq!(coeffs.n, params.n, "coefficient row for a different depth");
    let lv = Levels::new(params.n);
    let ki = params.k[params.i as usize];
    let prev = params.k[params.i as usize - 1];

    let tm = t_minus(f, a, ki);
    let tp = t_plus(f, a - ki, ki);

    let mut rhs_minus = scaled(&tm, &coeffs.alpha) - scaled(&tp, &coeffs.beta);
    let mut rhs_plus = scaled(&tp, &coeffs.alpha) - scaled(&tm, &coeffs.beta);
    for (j, aj) in coeffs.a.iter().enumerate() {
        rhs_minus += scaled(&lv.s_left(f, j as i64, a, ki), aj);
        rhs_plus += scaled(&lv.s_right(f, j as i64, a, ki), aj);
    }
    for (j, bj) in coeffs.b.iter().enumerate() {
        rhs_minus -= scaled(&lv.s_right(f, j as i64, a, ki), bj);
        rhs_plus -= scaled(&lv.s_left(f, j as i64, a, ki), bj);
    }

    t_minus(f, a, prev) == rhs_minus && t_plus(f, a - prev, prev) == rhs_plus
}

/// Checks the square-window cancellation bound: for a family of
/// disjoint length-y windows with signs λ_i ∈ {±1} inside one period,
/// |Σ λ_i·S(x_i, y)| ≤ y·√(B·q·m) with m the family size.
///
/// The hypotheses are enforced, not assumed: 0 < y < q, the windows must
/// be separated (x_i + y < x_{i+1}) and fit in one period
/// (x_m + y − x_1 ≤ q), f must have zero mean, and `b` must dominate the
/// window bound of f. Violations are usage errors. The comparison is
/// exact: |Σ λ_i S|² ≤ y²·B·q·m in rational arithmetic.
pub fn verify_sum_s_lemma(
    f: &PeriodicFunction,
    windows: &[(i64, i8)],
    y: i64,
    b: &BigRational,
) -> Result<bool> {
    let q = f.q() as i64;
    if !(0 < y && y < q) {
        return Err(Error::Usage(format!("window length {y} outside 0 < y < {q}")));
    }
    if windows.is_empty() {
        return Err(Error::Usage("empty window family".into()));
    }
    for pair in windows.windows(2) {
        if pair[0].0 + y >= pair[1].0 {
            return Err(Error::Usage(format!(
                "windows at {} and {} overlap or touch",
                pair[0].0, pair[1].0
            )));
        }
    }
    let first = windows[0].0;
    let last = windows[windows.len() - 1].0;
    if last + y - first > q {
        return Err(Error::Usage(
            "window family spans more than one period".into(),
        ));
    }
    if windows.iter().any(|&(_, s)| s != 1 && s != -1) {
        return Err(Error::Usage("window signs must be +1 or -1".into()));
    }
    if !f.has_zero_mean() {
        return Err(Error::Usage("f must have zero mean".into()));
    }
    match f.min_b(f.q())? {
        MinB::Infinite => unreachable!("zero mean was just checked"),
        MinB::Finite { value, .. } => {
            if b < &value {
                return Err(Error::Usage(format!(
                    "B = {b} is below the window bound {value} of f"
                )));
            }
        }
    }

    let mut total = GaussRational::zero();
    for &(x, sign) in windows {
        let s = s_sum(f, x, y);
        if sign > 0 {
            total += s;
        } else {
            total -= s;
        }
    }
    let m = windows.len() as i64;
    let rhs = BigRational::from_integer((y * y).into())
        * b
        * BigRational::from_integer((q * m).into());
    Ok(abs_sqr(&total) <= rhs)
}

/// Checks the long-sum estimate that the whole decomposition exists to
/// prove: for f in the class with window bound B and any 1 ≤ K ≤ N,
///
/// |Σ_{n=a+1}^{a+N} f(n)| ≤ √(Bq)·√(N/K) + (1/K)·|−T₋(a, K) + T₊(a+N, K)|.
///
/// Class membership (up to window length q) is a precondition and is
/// re-checked here. The exact sums are compared after taking square
/// roots at 192-bit precision, with slack covering only that rounding.
pub fn verify_master_inequality(
    f: &PeriodicFunction,
    a: i64,
    n_len: i64,
    k: i64,
    params: &ClassFParams,
) -> Result<bool> {
    if !(1 <= k && k <= n_len) {
        return Err(Error::Usage(format!("need 1 <= K <= N, got K={k}, N={n_len}")));
    }
    if !f.is_member(params, f.q())? {
        return Err(Error::Usage(
            "f is not certified for the given class parameters".into(),
        ));
    }
    let b = rational_from_f64(params.b).expect("checked by is_member");

    let mut inner = GaussRational::zero();
    for n in a + 1..=a + n_len {
        inner += f.eval(n).clone();
    }
    let lhs = Hp::from_ratio(&abs_sqr(&inner)).sqrt();

    let boundary = t_plus(f, a + n_len, k) - t_minus(f, a, k);
    let kf = Hp::from_i64(k);
    let smooth = Hp::from_ratio(&b)
        .mul(&Hp::from_u64(f.q()))
        .sqrt()
        .mul(&Hp::from_i64(n_len).div(&kf).sqrt());
    let rhs = smooth.add(&Hp::from_ratio(&abs_sqr(&boundary)).sqrt().div(&kf));

    // Slack for the 192-bit square roots only; the margin of a genuine
    // violation would dwarf this.
    let eps = Hp::from_f64(2.0f64.powi(-150));
    let slack = rhs.abs().add(&Hp::from_u64(1)).mul(&eps);
    Ok(lhs <= rhs.add(&slack))
}

/// RHS − LHS of the master inequality for a numerically-valued
/// integrand of period q, assuming window bound `b`. Positive means the
/// inequality held. This is the probe used for functions whose values
/// are irrational (characters of order > 4); errors stay far below the
/// margins it is used to observe.
pub fn master_inequality_margin(
    f: &impl Fn(i64) -> Complex<f64>,
    q: u64,
    a: i64,
    n_len: i64,
    k: i64,
    b: f64,
) -> f64 {
    assert!(1 <= k && k <= n_len, "need 1 <= K <= N");
    let mut inner = Complex::new(0.0, 0.0);
    for n in a + 1..=a + n_len {
        inner += f(n);
    }
    let boundary = t_plus_fn(f, a + n_len, k) - t_minus_fn(f, a, k);
    let rhs = (b * q as f64).sqrt() * (n_len as f64 / k as f64).sqrt()
        + boundary.norm() / k as f64;
    rhs - inner.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::gauss_int;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn constant_one(q: u64) -> PeriodicFunction {
        PeriodicFunction::new(q, vec![gauss_int(1, 0); q as usize]).unwrap()
    }

    fn legendre(q: u64) -> PeriodicFunction {
        let values = (0..q)
            .map(|r| {
                if r == 0 {
                    gauss_int(0, 0)
                } else if crate::arith::pow_mod(r, (q - 1) / 2, q) == 1 {
                    gauss_int(1, 0)
                } else {
                    gauss_int(-1, 0)
                }
            })
            .collect();
        PeriodicFunction::new(q, values).unwrap()
    }

    fn random_fn(rng: &mut ChaCha8Rng, q: u64) -> PeriodicFunction {
        let values = (0..q)
            .map(|_| gauss_int(rng.gen_range(-5..=5), rng.gen_range(-5..=5)))
            .collect();
        PeriodicFunction::new(q, values).unwrap()
    }

    #[test]
    fn kernel_values_on_known_inputs() {
        let one = constant_one(7);
        assert_eq!(t_minus(&one, 0, 4), gauss_int(10, 0));
        assert_eq!(t_plus(&one, 0, 4), gauss_int(10, 0));
        assert_eq!(s_sum(&one, 0, 3), gauss_int(9, 0));
        let leg = legendre(5);
        assert_eq!(t_minus(&leg, 0, 4), gauss_int(0, 0));
        assert_eq!(t_plus(&leg, 0, 4), gauss_int(0, 0));
        assert_eq!(s_sum(&leg, 0, 5), gauss_int(0, 0));
        assert_eq!(s_sum(&leg, 0, 2), gauss_int(-2, 0));
        assert_eq!(t_minus(&leg, 3, 0), gauss_int(0, 0));
        assert_eq!(t_plus(&leg, -9, 0), gauss_int(0, 0));
        assert_eq!(s_sum(&leg, 11, 0), gauss_int(0, 0));
    }

    #[test]
    fn kernels_agree_with_literal_loops() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..120 {
            let q = rng.gen_range(1..=30);
            let f = random_fn(&mut rng, q);
            let x = rng.gen_range(-40..40);
            let y = rng.gen_range(0..=(3 * q as i64));
            assert_eq!(t_minus(&f, x, y), t_minus_oracle(&f, x, y));
            assert_eq!(t_plus(&f, x, y), t_plus_oracle(&f, x, y));
            assert_eq!(s_sum(&f, x, y), s_sum_oracle(&f, x, y));
        }
    }

    #[test]
    fn rising_plus_falling_weights_telescope() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..60 {
            let q = rng.gen_range(1..=20);
            let f = random_fn(&mut rng, q);
            let x = rng.gen_range(-15..15);
            let y = rng.gen_range(0..=40);
            let mut plain = GaussRational::zero();
            for k in 1..=y {
                plain += f.eval(x + k).clone();
            }
            assert_eq!(
                t_plus(&f, x, y) + t_minus(&f, x, y),
                scaled(&plain, &(y + 1).into())
            );
        }
    }

    #[test]
    fn rectangle_shifts_never_change_the_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = random_fn(&mut rng, 11);
        for _ in 0..100 {
            let x = rng.gen_range(-30..30);
            let y = rng.gen_range(0..25);
            let u = rng.gen_range(-30..30);
            let v = rng.gen_range(0..25);
            let k = rng.gen_range(-50..50);
            assert!(shift_check(&f, x, y, u, v, k));
        }
        assert!(shift_check(&f, 3, 4, 1, 2, 0));
        assert!(shift_check(&f, 3, 0, 1, 0, 17));
    }

    #[test]
    fn decomposition_ladder_for_depth_zero() {
        let p = make_decomposition_params(0, 3, 1).unwrap();
        assert_eq!(p.k, [13, 4, 1, 0]);
        assert_eq!(p.k[0], 3 * p.k[1] + 1);
        for j in 0..3 {
            assert_eq!(p.k[j], 3 * p.k[j + 1] + 1);
        }
    }

    #[test]
    fn decomposition_shift_matches_both_formulas() {
        let p = make_decomposition_params(1, 3, 1).unwrap();
        assert_eq!(p.k[1], 24);
        assert_eq!(p.s, 97);
        // (q_1−q_0)K_1 + c_1−c_0−1 and (q_0+q_{−1})K_1 + c_0+c_{−1}.
        assert_eq!((7 - 3) * 24 + (3 - 1 - 1), 97);
        assert_eq!((3 + 1) * 24 + (1 + 0), 97);
    }

    #[test]
    fn decomposition_rejects_bad_arguments() {
        assert!(matches!(
            make_decomposition_params(0, 2, 1),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            make_decomposition_params(0, 3, 0),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            make_decomposition_params(0, 3, 4),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            make_decomposition_params(2, 6, 1),
            Err(Error::SizeCap(_))
        ));
        assert!(make_decomposition_params_capped(2, 6, 1, 30_000_000).is_ok());
    }

    #[test]
    fn descent_identities_hold_for_random_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for n in 0..=1usize {
            let p = make_decomposition_params(n, 3, 1).unwrap();
            for _ in 0..60 {
                let q = rng.gen_range(1..=101);
                let f = random_fn(&mut rng, q);
                let a = rng.gen_range(-200..200);
                assert!(verify_lemma_minus(&f, a, &p), "minus n={n} a={a}");
                assert!(verify_lemma_plus(&f, a, &p), "plus n={n} a={a}");
            }
        }
    }

    #[test]
    fn descent_identities_on_constant_and_zero_functions() {
        let p = make_decomposition_params(2, 3, 1).unwrap();
        let one = constant_one(7);
        assert!(verify_lemma_minus(&one, 5, &p));
        assert!(verify_lemma_plus(&one, 5, &p));
        // For f ≡ 1 the falling-weight sum is length(length+1)/2 with
        // length K_0 = (17³−1)/2.
        let k0 = BigInt::from(p.k[0]);
        assert_eq!(
            t_minus(&one, 5, p.k[0]),
            Complex::new(
                BigRational::from_integer(&k0 * (&k0 + 1) / 2),
                BigRational::zero()
            )
        );
        let zero = PeriodicFunction::new(3, vec![gauss_int(0, 0); 3]).unwrap();
        assert!(verify_lemma_minus(&zero, -7, &p));
        assert!(verify_lemma_plus(&zero, -7, &p));
    }

    #[test]
    fn combined_identities_hold_for_random_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for n in 0..=1usize {
            let p = make_decomposition_params(n, 3, 1).unwrap();
            let coeffs = crate::seq::gen_coeffs(n);
            for _ in 0..60 {
                let q = rng.gen_range(1..=101);
                let f = random_fn(&mut rng, q);
                let a = rng.gen_range(-200..200);
                assert!(
                    verify_lemma_combined(&f, a, &p, &coeffs),
                    "combined n={n} a={a}"
                );
            }
        }
    }

    #[test]
    fn combined_identity_at_depth_two_on_a_character() {
        let p = make_decomposition_params(2, 4, 1).unwrap();
        let coeffs = crate::seq::gen_coeffs(2);
        let leg = legendre(101);
        for a in [-1000, -3, 0, 77, 4321] {
            assert!(verify_lemma_combined(&leg, a, &p, &coeffs));
        }
    }

    #[test]
    fn window_family_bound_on_examples() {
        let leg = legendre(5);
        let one_b = BigRational::from_integer(1.into());
        assert!(verify_sum_s_lemma(&leg, &[(0, 1)], 2, &one_b).unwrap());
        let zero = PeriodicFunction::new(6, vec![gauss_int(0, 0); 6]).unwrap();
        assert!(verify_sum_s_lemma(&zero, &[(0, 1), (3, -1)], 2, &BigRational::zero()).unwrap());
    }

    #[test]
    fn window_family_bound_enforces_its_hypotheses() {
        let leg = legendre(5);
        let one_b = BigRational::from_integer(1.into());
        // y out of range.
        assert!(verify_sum_s_lemma(&leg, &[(0, 1)], 0, &one_b).is_err());
        assert!(verify_sum_s_lemma(&leg, &[(0, 1)], 5, &one_b).is_err());
        // overlapping windows.
        assert!(verify_sum_s_lemma(&leg, &[(0, 1), (1, -1)], 2, &one_b).is_err());
        // family longer than a period.
        assert!(verify_sum_s_lemma(&leg, &[(0, 1), (4, -1)], 2, &one_b).is_err());
        // bad sign.
        assert!(verify_sum_s_lemma(&leg, &[(0, 0)], 2, &one_b).is_err());
        // nonzero mean.
        let ones = constant_one(5);
        assert!(verify_sum_s_lemma(&ones, &[(0, 1)], 2, &one_b).is_err());
        // B below the window bound of f.
        let small = BigRational::new(1.into(), 100.into());
        assert!(verify_sum_s_lemma(&leg, &[(0, 1)], 2, &small).is_err());
    }

    #[test]
    fn long_sum_estimate_on_examples() {
        let leg = legendre(5);
        let params = ClassFParams { a: 1.0, b: 1.0, q: 5 };
        assert!(verify_master_inequality(&leg, 0, 2, 1, &params).unwrap());
        let zero = PeriodicFunction::new(3, vec![gauss_int(0, 0); 3]).unwrap();
        let zp = ClassFParams { a: 0.0, b: 0.0, q: 3 };
        assert!(verify_master_inequality(&zero, -5, 4, 2, &zp).unwrap());
    }

    #[test]
    fn long_sum_estimate_enforces_preconditions() {
        let leg = legendre(5);
        let params = ClassFParams { a: 1.0, b: 1.0, q: 5 };
        assert!(verify_master_inequality(&leg, 0, 2, 0, &params).is_err());
        assert!(verify_master_inequality(&leg, 0, 2, 3, &params).is_err());
        let ones = constant_one(5);
        assert!(verify_master_inequality(&ones, 0, 2, 1, &params).is_err());
    }

    #[test]
    fn long_sum_estimate_on_random_exact_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let mut checked = 0;
        while checked < 40 {
            let q = rng.gen_range(2..=30);
            let mut f = random_fn(&mut rng, q);
            // Force zero mean by balancing the last value.
            let mut sum = GaussRational::zero();
            for v in &f.values()[..q as usize - 1] {
                sum += v.clone();
            }
            let mut values = f.values().to_vec();
            values[q as usize - 1] = -sum;
            f = PeriodicFunction::new(q, values).unwrap();
            let (a_bound, b_bound) = match f.min_b(q).unwrap() {
                MinB::Finite { value, .. } => (
                    f.bound_a() * (1.0 + 1e-9),
                    crate::gauss::rational_to_f64(&value) * (1.0 + 1e-9),
                ),
                MinB::Infinite => continue,
            };
            let n_len = rng.gen_range(1..=(4 * q as i64));
            let k = rng.gen_range(1..=n_len);
            let a = rng.gen_range(-50..50);
            let params = ClassFParams { a: a_bound, b: b_bound, q };
            assert!(verify_master_inequality(&f, a, n_len, k, &params).unwrap());
            checked += 1;
        }
    }
}
