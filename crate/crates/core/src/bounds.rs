//! Closed-form upper bounds on character-sum maxima, and reports that
//! compare them against each other and against scanned empirical data.
//!
//! All bounds are evaluated in double precision. The underlying
//! statements are exact, so violation checks add a small relative guard
//! ([`VIOLATION_GUARD`]) to keep float round-off from manufacturing a
//! false counterexample to a true theorem.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::seq::SequenceTables;
use crate::{Error, Result};

/// Relative slack applied to a bound before declaring a violation.
pub const VIOLATION_GUARD: f64 = 1e-9;

/// A bound value together with whether its hypothesis holds at this
/// modulus. Inapplicable bounds still carry their computed value so
/// reports can show what the formula would give.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApplicableBound {
    pub value: f64,
    pub applicable: bool,
}

fn sqrt_ln(q: u64) -> (f64, f64) {
    let qf = q as f64;
    (qf.sqrt(), qf.ln())
}

fn q_n(tables: &SequenceTables, n: usize) -> f64 {
    tables.q(n as i64).to_f64().expect("q_n within f64 range")
}

fn p_n(tables: &SequenceTables, n: usize) -> f64 {
    tables.p(n as i64).to_f64().expect("p_n within f64 range")
}

/// (√B/(2 ln 2))·√q·ln q + 3A·√q, for window sums of functions in
/// F_{A,B}(q). Domain q ≥ 2, A, B ≥ 0.
pub fn bound_dw(q: u64, a: f64, b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b >= 0.0, "class parameters must be nonnegative");
    let (rq, lq) = sqrt_ln(q);
    b.sqrt() / (2.0 * 2f64.ln()) * rq * lq + 3.0 * a * rq
}

/// (√B/(3 ln 3))·√q·ln q + (5√B + (3/2)A)·√q — same shape as
/// [`bound_dw`] with a smaller leading constant and a larger secondary
/// one.
pub fn bound_br(q: u64, a: f64, b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b >= 0.0, "class parameters must be nonnegative");
    let (rq, lq) = sqrt_ln(q);
    b.sqrt() / (3.0 * 3f64.ln()) * rq * lq + (5.0 * b.sqrt() + 1.5 * a) * rq
}

/// The additive tail √B·(q_n + q_n⁻²)·(δ_n·ln q + (√2−1)·2p_n/(q_n−1))
/// of the level-n bound.
pub fn psi_n(q: u64, b: f64, n: usize, tables: &SequenceTables) -> f64 {
    let qn = q_n(tables, n);
    let pn = p_n(tables, n);
    let lq = (q as f64).ln();
    b.sqrt()
        * (qn + 1.0 / (qn * qn))
        * (tables.delta(n) * lq + (2f64.sqrt() - 1.0) * 2.0 * pn / (qn - 1.0))
}

/// The level-n bound
/// √B·δ_n·√q·ln q + (√B·√(q_n+q_n⁻²) + √B(√2−1)·2p_n/(q_n−1) + A/2)·√q + ψ_n,
/// applicable once q ≥ q_n⁶. The value is computed either way and the
/// hypothesis reported alongside it.
pub fn bound_thm1(q: u64, a: f64, b: f64, n: usize, tables: &SequenceTables) -> ApplicableBound {
    let qn = q_n(tables, n);
    let pn = p_n(tables, n);
    let (rq, lq) = sqrt_ln(q);
    let rb = b.sqrt();
    let secondary =
        rb * (qn + 1.0 / (qn * qn)).sqrt() + rb * (2f64.sqrt() - 1.0) * 2.0 * pn / (qn - 1.0)
            + a / 2.0;
    let value = rb * tables.delta(n) * rq * lq + secondary * rq + psi_n(q, b, n, tables);
    let applicable = tables.q(n as i64).pow(6) <= BigInt::from(q);
    ApplicableBound { value, applicable }
}

/// [`bound_thm1`] specialized to characters, which sit in F_{1,1}(q).
pub fn bound_cor1(q: u64, n: usize, tables: &SequenceTables) -> ApplicableBound {
    bound_thm1(q, 1.0, 1.0, n, tables)
}

/// Numerically explicit window-sum bound for nonprincipal characters,
/// split by parity:
/// even: (2/π²)√q ln q + (4/π²)√q ln ln q + (3/2)√q;
/// odd:  (1/(2π))√q ln q + (1/π)√q ln ln q + √q.
pub fn bound_pomerance(q: u64, parity: i8) -> Result<f64> {
    if parity != 1 && parity != -1 {
        return Err(Error::Usage(format!("parity must be +1 or -1, got {parity}")));
    }
    if q < 3 {
        return Err(Error::Usage(format!(
            "modulus {q} below 3: ln ln q undefined"
        )));
    }
    let (rq, lq) = sqrt_ln(q);
    let llq = lq.ln();
    let pi = std::f64::consts::PI;
    Ok(if parity == 1 {
        2.0 / (pi * pi) * rq * lq + 4.0 / (pi * pi) * rq * llq + 1.5 * rq
    } else {
        1.0 / (2.0 * pi) * rq * lq + 1.0 / pi * rq * llq + rq
    })
}

/// Leading-order prefix-sum bound with the o(1) term dropped: the
/// constant times √q·ln q, with c = 1/4 on cubefree moduli and 1/3
/// otherwise. NOT rigorous at finite q (the o(1) is unknown), and it
/// bounds the prefix maximum T_χ, not the window maximum S_χ — reports
/// carry it for context only and never use it in violation checks.
pub fn bound_gs(q: u64, parity: i8, cubefree: bool) -> f64 {
    debug_assert!(parity == 1 || parity == -1, "parity must be +-1");
    let c = if cubefree { 0.25 } else { 1.0 / 3.0 };
    let (rq, lq) = sqrt_ln(q);
    let pi = std::f64::consts::PI;
    if parity == 1 {
        69.0 / 70.0 * c / (pi * 3f64.sqrt()) * rq * lq
    } else {
        c / pi * rq * lq
    }
}

/// The level n minimizing [`bound_thm1`] among levels whose hypothesis
/// q ≥ q_n⁶ holds, with its value; None when even level 0 is out of
/// range (q < 729). In practice level 0 wins at every realistic q: the
/// higher levels trade a slightly smaller √q·ln q coefficient for much
/// larger secondary constants, and the trade only pays off at
/// astronomically large q.
pub fn best_n_for_q(q: u64, a: f64, b: f64, tables: &SequenceTables) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for n in 0..=tables.n_max() {
        let ab = bound_thm1(q, a, b, n, tables);
        if !ab.applicable {
            break; // q_n increases with n, so later levels are out too
        }
        if best.map_or(true, |(_, v)| ab.value < v) {
            best = Some((n, ab.value));
        }
    }
    best
}

/// Smallest modulus on the doubling grid {q₀, 2q₀, 4q₀, …} (q₀ = the
/// level's applicability threshold) from which the level-n bound stays
/// below [`bound_br`] at A=B=1 across the rest of the tested grid.
/// Reported rather than asserted: the crossover is an empirical
/// observation on the grid, not a theorem of this crate.
pub fn crossover_q(n: usize, tables: &SequenceTables) -> Option<u64> {
    const CAP: u64 = 1 << 60;
    let start = tables.q(n as i64).pow(6).to_u64()?.max(2);
    if start > CAP {
        return None;
    }
    let below = |q: u64| bound_thm1(q, 1.0, 1.0, n, tables).value < bound_br(q, 1.0, 1.0);
    let mut q = start;
    while q <= CAP && !below(q) {
        q = q.saturating_mul(2);
    }
    if q > CAP {
        return None;
    }
    let mut probe = q;
    while probe <= CAP {
        if !below(probe) {
            return None;
        }
        probe = probe.saturating_mul(2);
    }
    Some(q)
}

/// Scanned maxima for one character, as fed to [`compare`].
#[derive(Clone, Copy, Debug)]
pub struct CharMax {
    pub char_index: u64,
    pub s_chi: f64,
    pub t_chi: f64,
    pub parity: i8,
}

/// One line of a [`BoundReport`].
#[derive(Clone, Debug)]
pub struct BoundEntry {
    pub name: &'static str,
    pub value: f64,
    pub applicable: bool,
    pub rigorous: bool,
    /// bound − relevant empirical maximum, when one was supplied.
    pub margin: Option<f64>,
    pub violation: bool,
}

/// Every bound evaluated at one modulus, with margins against supplied
/// empirical maxima and a violation flag per rigorous entry.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub q: u64,
    pub a: f64,
    pub b: f64,
    pub entries: Vec<BoundEntry>,
    /// Name of the minimal applicable rigorous entry.
    pub best_rigorous: Option<&'static str>,
}

/// Evaluates every bound at modulus q and class parameters (A, B).
/// Empirical rows attach margins: window bounds are compared against
/// S_χ (parity-filtered for the parity-specific ones) and the
/// non-rigorous prefix bounds against T_χ. Rows for the principal
/// character (index 0) are ignored — the bounds concern nonprincipal
/// characters only.
pub fn compare(
    q: u64,
    a: f64,
    b: f64,
    empirical: &[CharMax],
    tables: &SequenceTables,
) -> BoundReport {
    let maxima = |parity: Option<i8>, prefix: bool| -> Option<f64> {
        empirical
            .iter()
            .filter(|r| r.char_index != 0 && parity.map_or(true, |p| r.parity == p))
            .map(|r| if prefix { r.t_chi } else { r.s_chi })
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |m| m.max(v))))
    };

    let mut entries = Vec::new();
    let mut push = |name, value: f64, applicable, rigorous, max: Option<f64>| {
        let margin = max.map(|m| value - m);
        let violation = rigorous
            && applicable
            && margin.map_or(false, |mg| mg < -(VIOLATION_GUARD * (value.abs() + 1.0)));
        entries.push(BoundEntry { name, value, applicable, rigorous, margin, violation });
    };

    let s_all = maxima(None, false);
    push("dw", bound_dw(q, a, b), q >= 2, true, s_all);
    push("br", bound_br(q, a, b), q >= 2, true, s_all);
    let t1 = bound_thm1(q, a, b, 0, tables);
    push("thm1_n0", t1.value, t1.applicable, true, s_all);
    if q >= 3 {
        push("pomerance_even", bound_pomerance(q, 1).expect("q >= 3"), true, true, maxima(Some(1), false));
        push("pomerance_odd", bound_pomerance(q, -1).expect("q >= 3"), true, true, maxima(Some(-1), false));
    }
    let cubefree = crate::arith::is_cubefree(q);
    push("gs_even", bound_gs(q, 1, cubefree), true, false, maxima(Some(1), true));
    push("gs_odd", bound_gs(q, -1, cubefree), true, false, maxima(Some(-1), true));

    let best_rigorous = entries
        .iter()
        .filter(|e| e.applicable && e.rigorous)
        .min_by(|x, y| x.value.partial_cmp(&y.value).expect("finite bounds"))
        .map(|e| e.name);
    BoundReport { q, a, b, entries, best_rigorous }
}

/// Prints a real with 10 significant digits: plain decimal notation in
/// [1e−4, 1e10), scientific otherwise, and bare "0" for zero. Locale
/// independent, for diffable CSV output.
pub fn fmt_sig10(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let mag = v.abs();
    if (1e-4..1e10).contains(&mag) {
        let exp = mag.log10().floor() as i32;
        let decimals = (9 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.9e}")
    }
}

impl BoundReport {
    /// One CSV row per entry; margins left empty when no empirical data
    /// was attached.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bound,value,applicable,rigorous,margin,violation\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.name,
                fmt_sig10(e.value),
                e.applicable,
                e.rigorous,
                e.margin.map(fmt_sig10).unwrap_or_default(),
                e.violation
            ));
        }
        out
    }
}

impl std::fmt::Display for BoundReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "bounds at q={} (A={}, B={})", self.q, self.a, self.b)?;
        writeln!(
            f,
            "{:<16} {:>16} {:>11} {:>9} {:>16} {:>10}",
            "bound", "value", "applicable", "rigorous", "margin", "violation"
        )?;
        for e in &self.entries {
            writeln!(
                f,
                "{:<16} {:>16} {:>11} {:>9} {:>16} {:>10}",
                e.name,
                fmt_sig10(e.value),
                e.applicable,
                e.rigorous,
                e.margin.map(fmt_sig10).unwrap_or_else(|| "-".into()),
                if e.violation { "VIOLATION" } else { "ok" }
            )?;
        }
        match self.best_rigorous {
            Some(name) => writeln!(f, "best rigorous bound: {name}"),
            None => writeln!(f, "best rigorous bound: none applicable"),
        }
    }
}
