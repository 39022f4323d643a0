//! Seeded randomized trials of the identity verifiers, with plain-text
//! replay files so any failure reproduces exactly.
//!
//! Every identity exercised here is a theorem, so a failing trial
//! always means an implementation bug. Trials draw from a ChaCha stream
//! keyed by (seed, kind, index): the same triple regenerates the same
//! function and parameters bit for bit, which is what makes the tiny
//! replay files sufficient.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gauss::{gauss_int, rational_to_f64, GaussRational};
use crate::periodic::{ClassFParams, MinB, PeriodicFunction};
use crate::seq::gen_coeffs;
use crate::trisum::{
    make_decomposition_params_capped, s_sum, s_sum_oracle, shift_check, t_minus, t_minus_oracle,
    t_plus, t_plus_oracle, verify_lemma_combined, verify_lemma_minus, verify_lemma_plus,
    verify_master_inequality, verify_sum_s_lemma, DEFAULT_SIZE_CAP,
};
use crate::{Error, Result};

/// One verifier family to draw trials from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrialKind {
    /// Rectangle re-indexing identity.
    ShiftCheck,
    /// Running-sum T₋ against its literal triangle evaluation.
    OracleTMinus,
    /// Running-sum T₊ against its literal triangle evaluation.
    OracleTPlus,
    /// Composed S against its literal grid evaluation.
    OracleSSum,
    /// One-level descent identity for T₋.
    LemmaMinus,
    /// One-level descent identity for T₊.
    LemmaPlus,
    /// Combined two-sided descent with coefficient tables.
    LemmaCombined,
    /// Second-moment estimate for signed sums of S windows.
    SumS,
    /// The long-sum estimate tying everything together.
    Master,
}

/// Every kind, in the order suites run them.
pub const ALL_KINDS: [TrialKind; 9] = [
    TrialKind::ShiftCheck,
    TrialKind::OracleTMinus,
    TrialKind::OracleTPlus,
    TrialKind::OracleSSum,
    TrialKind::LemmaMinus,
    TrialKind::LemmaPlus,
    TrialKind::LemmaCombined,
    TrialKind::SumS,
    TrialKind::Master,
];

impl TrialKind {
    pub fn name(self) -> &'static str {
        match self {
            TrialKind::ShiftCheck => "shift_check",
            TrialKind::OracleTMinus => "oracle_t_minus",
            TrialKind::OracleTPlus => "oracle_t_plus",
            TrialKind::OracleSSum => "oracle_s_sum",
            TrialKind::LemmaMinus => "lemma_minus",
            TrialKind::LemmaPlus => "lemma_plus",
            TrialKind::LemmaCombined => "lemma_combined",
            TrialKind::SumS => "sum_s",
            TrialKind::Master => "master",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        ALL_KINDS
            .iter()
            .copied()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::Parse(format!("unknown trial kind {name:?}")))
    }

    fn id(self) -> u64 {
        ALL_KINDS.iter().position(|&k| k == self).expect("listed") as u64
    }
}

impl fmt::Display for TrialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Knobs shared by a whole run: the RNG seed, the period of the random
/// functions, the decomposition shape for the descent lemmas, and the
/// ladder size cap (lift it past [`DEFAULT_SIZE_CAP`] only knowingly —
/// descent sums grow like q_nᵗ).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialConfig {
    pub seed: u64,
    pub q: u64,
    pub n: usize,
    pub tau: u32,
    pub size_cap: u64,
}

impl TrialConfig {
    pub fn new(seed: u64, q: u64, n: usize, tau: u32) -> Self {
        TrialConfig { seed, q, n, tau, size_cap: DEFAULT_SIZE_CAP }
    }
}

fn rng_for(cfg: &TrialConfig, kind: TrialKind, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // A distinct stream per (kind, index) keeps trials independent while
    // staying reproducible from the four replay numbers alone.
    rng.set_stream(kind.id() << 32 | (index & 0xffff_ffff));
    rng
}

fn random_fn(rng: &mut ChaCha8Rng, q: u64) -> PeriodicFunction {
    let values: Vec<GaussRational> = (0..q)
        .map(|_| gauss_int(rng.gen_range(-5..=5), rng.gen_range(-5..=5)))
        .collect();
    PeriodicFunction::new(q, values).expect("period >= 1")
}

/// Random Gaussian-integer values whose period sum is exactly zero (the
/// last value balances the rest).
fn random_zero_mean_fn(rng: &mut ChaCha8Rng, q: u64) -> PeriodicFunction {
    let mut re_sum = 0i64;
    let mut im_sum = 0i64;
    let mut values: Vec<GaussRational> = (1..q)
        .map(|_| {
            let re = rng.gen_range(-5..=5);
            let im = rng.gen_range(-5..=5);
            re_sum += re;
            im_sum += im;
            gauss_int(re, im)
        })
        .collect();
    values.push(gauss_int(-re_sum, -im_sum));
    PeriodicFunction::new(q, values).expect("period >= 1")
}

/// Runs one seeded trial. `Ok(false)` means the identity under test
/// failed (an implementation bug); errors mean the configuration itself
/// is unusable (bad period, τ < 3, size cap).
pub fn run_trial(kind: TrialKind, cfg: &TrialConfig, index: u64) -> Result<bool> {
    if cfg.q < 2 {
        return Err(Error::Usage(format!(
            "trial period must be >= 2, got {}",
            cfg.q
        )));
    }
    let mut rng = rng_for(cfg, kind, index);
    let q = cfg.q as i64;
    match kind {
        TrialKind::ShiftCheck => {
            let f = random_fn(&mut rng, cfg.q);
            let x = rng.gen_range(-50..=50);
            let y = rng.gen_range(0..=12);
            let u = rng.gen_range(-50..=50);
            let v = rng.gen_range(0..=12);
            let k = rng.gen_range(-30..=30);
            Ok(shift_check(&f, x, y, u, v, k))
        }
        TrialKind::OracleTMinus => {
            let f = random_fn(&mut rng, cfg.q);
            let x = rng.gen_range(-50..=50);
            let y = rng.gen_range(0..=25);
            Ok(t_minus(&f, x, y) == t_minus_oracle(&f, x, y))
        }
        TrialKind::OracleTPlus => {
            let f = random_fn(&mut rng, cfg.q);
            let x = rng.gen_range(-50..=50);
            let y = rng.gen_range(0..=25);
            Ok(t_plus(&f, x, y) == t_plus_oracle(&f, x, y))
        }
        TrialKind::OracleSSum => {
            let f = random_fn(&mut rng, cfg.q);
            let x = rng.gen_range(-50..=50);
            let y = rng.gen_range(0..=25);
            Ok(s_sum(&f, x, y) == s_sum_oracle(&f, x, y))
        }
        TrialKind::LemmaMinus => {
            let i = rng.gen_range(1..=cfg.tau);
            let params = make_decomposition_params_capped(cfg.n, cfg.tau, i, cfg.size_cap)?;
            let f = random_fn(&mut rng, cfg.q);
            let a = rng.gen_range(-500..=500);
            Ok(verify_lemma_minus(&f, a, &params))
        }
        TrialKind::LemmaPlus => {
            let i = rng.gen_range(1..=cfg.tau);
            let params = make_decomposition_params_capped(cfg.n, cfg.tau, i, cfg.size_cap)?;
            let f = random_fn(&mut rng, cfg.q);
            let a = rng.gen_range(-500..=500);
            Ok(verify_lemma_plus(&f, a, &params))
        }
        TrialKind::LemmaCombined => {
            let i = rng.gen_range(1..cfg.tau.max(2));
            let params = make_decomposition_params_capped(cfg.n, cfg.tau, i, cfg.size_cap)?;
            let coeffs = gen_coeffs(cfg.n);
            let f = random_fn(&mut rng, cfg.q);
            let a = rng.gen_range(-500..=500);
            Ok(verify_lemma_combined(&f, a, &params, &coeffs))
        }
        TrialKind::SumS => {
            let f = random_zero_mean_fn(&mut rng, cfg.q);
            let y = rng.gen_range(1..=(q / 3).clamp(1, q - 1));
            let mut xs = vec![rng.gen_range(-q..=q)];
            let target = rng.gen_range(1..=4usize);
            while xs.len() < target {
                let next = xs.last().unwrap() + y + rng.gen_range(1..=3);
                if next + y - xs[0] > q {
                    break;
                }
                xs.push(next);
            }
            let windows: Vec<(i64, i8)> = xs
                .into_iter()
                .map(|x| (x, if rng.gen_bool(0.5) { 1 } else { -1 }))
                .collect();
            let b = match f.min_b(cfg.q)? {
                MinB::Finite { value, .. } => value,
                MinB::Infinite => unreachable!("zero-mean by construction"),
            };
            verify_sum_s_lemma(&f, &windows, y, &b)
        }
        TrialKind::Master => {
            let f = random_zero_mean_fn(&mut rng, cfg.q);
            let b_exact = match f.min_b(cfg.q)? {
                MinB::Finite { value, .. } => value,
                MinB::Infinite => unreachable!("zero-mean by construction"),
            };
            // Certify with the exact optima nudged up so that the f64
            // round-trip inside membership checking cannot round below
            // them.
            let params = ClassFParams {
                a: f.bound_a() * (1.0 + 1e-9) + 1e-9,
                b: rational_to_f64(&b_exact) * (1.0 + 1e-9) + 1e-9,
                q: cfg.q,
            };
            let a0 = rng.gen_range(-2 * q..=2 * q);
            let n_len = rng.gen_range(1..=3 * q);
            let k = rng.gen_range(1..=n_len);
            verify_master_inequality(&f, a0, n_len, k, &params)
        }
    }
}

/// Outcome of a full suite run: per-kind trial count and the (kind,
/// index) pairs that failed.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub trials_per_kind: u64,
    pub failures: Vec<(TrialKind, u64)>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs `trials` seeded trials of every kind. Setup errors (unusable
/// configuration) abort the run; identity failures are collected.
pub fn run_suite(cfg: &TrialConfig, trials: u64) -> Result<SuiteReport> {
    let mut failures = Vec::new();
    for &kind in &ALL_KINDS {
        for index in 0..trials {
            if !run_trial(kind, cfg, index)? {
                failures.push((kind, index));
            }
        }
    }
    Ok(SuiteReport { trials_per_kind: trials, failures })
}

/// Writes the key=value replay file identifying one trial. The cap
/// line appears only when it was overridden, so files from default
/// runs stay minimal.
pub fn write_replay(path: &Path, kind: TrialKind, cfg: &TrialConfig, index: u64) -> Result<()> {
    let mut body = format!(
        "kind={}\nseed={}\ntrial={}\nq={}\nn={}\ntau={}\n",
        kind.name(),
        cfg.seed,
        index,
        cfg.q,
        cfg.n,
        cfg.tau
    );
    if cfg.size_cap != DEFAULT_SIZE_CAP {
        body.push_str(&format!("cap={}\n", cfg.size_cap));
    }
    fs::write(path, body)?;
    Ok(())
}

/// Parses a replay file back into the trial it identifies. Blank lines
/// and `#` comments are skipped; unknown keys are ignored.
pub fn read_replay(path: &Path) -> Result<(TrialKind, TrialConfig, u64)> {
    let text = fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!("replay line {}: expected key=value", lineno + 1))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    let field = |key: &str| -> Result<&str> {
        map.get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Parse(format!("replay file missing {key}")))
    };
    let number = |key: &str| -> Result<u64> {
        field(key)?
            .parse()
            .map_err(|_| Error::Parse(format!("replay field {key} is not a number")))
    };
    let kind = TrialKind::from_name(field("kind")?)?;
    let cfg = TrialConfig {
        seed: number("seed")?,
        q: number("q")?,
        n: number("n")? as usize,
        tau: number("tau")? as u32,
        size_cap: if map.contains_key("cap") {
            number("cap")?
        } else {
            DEFAULT_SIZE_CAP
        },
    };
    Ok((kind, cfg, number("trial")?))
}

/// Re-runs the trial a replay file identifies.
pub fn run_replay(path: &Path) -> Result<bool> {
    let (kind, cfg, index) = read_replay(path)?;
    run_trial(kind, &cfg, index)
}
