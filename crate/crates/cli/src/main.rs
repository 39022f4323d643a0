//! `charbound` binary: sequence tables, seeded identity fuzzing,
//! character scans against the bound family, and membership probes.
//!
//! Exit codes are part of the contract: 0 on success, 1 when a
//! mathematical check fails (a bound violation, a failed trial, a
//! mismatched table row), 2 on usage errors — nothing else.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use charbound::arith::is_prime;
use charbound::bounds::{
    bound_br, bound_cor1, bound_dw, bound_pomerance, compare, fmt_sig10, CharMax, VIOLATION_GUARD,
};
use charbound::dirichlet::{s_chi_value, t_chi, CharacterGroup};
use charbound::fuzz::{run_replay, run_suite, write_replay, TrialConfig, ALL_KINDS};
use charbound::gauss::rational_to_f64;
use charbound::periodic::{ClassFParams, MinB, PeriodicFunction};
use charbound::seq::{delta_limit, gen_coeffs, gen_sequences, SequenceTables};
use charbound::trisum::{
    make_decomposition_params_capped, s_sum, s_sum_oracle, shift_check, t_minus, t_minus_oracle,
    t_plus, t_plus_oracle, verify_lemma_combined, verify_lemma_minus, verify_lemma_plus,
    verify_master_inequality, verify_sum_s_lemma, DEFAULT_SIZE_CAP,
};
use charbound::{Error, Result};

/// Like outln!, but a closed stdout (e.g. piping into `head`) ends
/// the process quietly instead of panicking with a broken-pipe error.
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if writeln!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

/// outln! without the trailing newline.
macro_rules! outfmt {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if write!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

/// Largest modulus `scan` and `compare` accept without --force.
const SCAN_CAP: u64 = 5000;
/// Largest modulus `membership` accepts without --force.
const MEMBERSHIP_CAP: u64 = 150;

const SCAN_HEADER: &str =
    "q,char_index,parity,S_chi,T_chi,bound_cor1_n0,bound_br,bound_dw,bound_pomerance,margin_min,violation";

const MEMBERSHIP_HEADER: &str = "q,char_index,parity,order,bound_a,min_b,k_star,path";

/// The five reference rows `table1` checks itself against.
const TABLE_ROWS: [&str; 5] = [
    "0,3,1,0.303413",
    "1,7,4,0.293656",
    "2,17,14,0.290670",
    "3,41,44,0.288986",
    "4,99,131,0.287965",
];

#[derive(Parser)]
#[command(
    name = "charbound",
    version,
    about = "Recurrence tables, identity fuzzing, and character-sum bound scans"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the q/p/delta table as CSV and check the first five rows.
    Table1 {
        /// Last row to print.
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
    /// Run seeded trials of every identity verifier.
    Verify {
        /// Seed for the whole suite.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Trials per verifier kind.
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Period of the randomly drawn functions.
        #[arg(long, default_value_t = 101)]
        q: u64,
        /// Recurrence depth for the descent checks.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Ladder exponent (at least 3).
        #[arg(long, default_value_t = 3)]
        tau: u32,
        /// Lift the ladder size cap.
        #[arg(long)]
        force: bool,
        /// Re-run one recorded trial from a replay file.
        #[arg(long, value_name = "FILE")]
        replay: Option<PathBuf>,
        /// Check each identity once on a function read from CSV
        /// (rows "residue,re_num/re_den,im_num/im_den") instead of
        /// running randomized trials.
        #[arg(long = "fn", value_name = "FILE")]
        fixed_fn: Option<PathBuf>,
    },
    /// Scan moduli, comparing every nonprincipal character against the bounds.
    Scan {
        /// Smallest modulus to visit.
        #[arg(long)]
        q_min: u64,
        /// Largest modulus to visit.
        #[arg(long)]
        q_max: u64,
        /// Which moduli in the range to visit.
        #[arg(long, value_enum, default_value = "all")]
        moduli: ModuliArg,
        /// Which nonprincipal characters to include.
        #[arg(long, value_enum, default_value = "all")]
        chars: CharsArg,
        /// Write the CSV here instead of standard output.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Scan past the q <= 5000 cap.
        #[arg(long)]
        force: bool,
    },
    /// Probe class membership for every nonprincipal character mod q.
    Membership {
        /// Modulus whose character group to probe.
        #[arg(long)]
        q: Option<u64>,
        /// Probe one function read from CSV instead of a character group.
        #[arg(long, value_name = "FILE")]
        input: Option<PathBuf>,
        /// Probe past the q <= 150 cap.
        #[arg(long)]
        force: bool,
    },
    /// Evaluate every bound at one modulus against measured maxima.
    Compare {
        /// Modulus to evaluate at.
        #[arg(long)]
        q: u64,
        /// Class scale parameter A.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Class window parameter B.
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        /// Take measured maxima from a scan CSV instead of recomputing.
        #[arg(long, value_name = "FILE")]
        scan: Option<PathBuf>,
        /// Write the report as CSV here instead of printing the table.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Evaluate past the q <= 5000 cap.
        #[arg(long)]
        force: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModuliArg {
    All,
    Primes,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CharsArg {
    All,
    Real,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Table1 { n_max } => cmd_table1(n_max),
        Command::Verify { seed, trials, q, n, tau, force, replay, fixed_fn } => {
            cmd_verify(seed, trials, q, n, tau, force, replay, fixed_fn)
        }
        Command::Scan { q_min, q_max, moduli, chars, out, force } => {
            cmd_scan(q_min, q_max, moduli, chars, out, force)
        }
        Command::Membership { q, input, force } => cmd_membership(q, input, force),
        Command::Compare { q, a, b, scan, out, force } => cmd_compare(q, a, b, scan, out, force),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Worker pool honoring CHARBOUND_THREADS (0 or unset = one per core).
fn thread_pool() -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(val) = std::env::var("CHARBOUND_THREADS") {
        if let Ok(n) = val.trim().parse::<usize>() {
            if n > 0 {
                builder = builder.num_threads(n);
            }
        }
    }
    builder.build().expect("thread pool construction cannot fail")
}

fn cmd_table1(n_max: usize) -> Result<u8> {
    let tables = gen_sequences(n_max)?;
    let mut ok = true;
    for n in 0..=n_max {
        let row = format!(
            "{n},{},{},{:.6}",
            tables.q(n as i64),
            tables.p(n as i64),
            tables.delta(n)
        );
        outln!("{row}");
        if n < TABLE_ROWS.len() {
            ok &= row == TABLE_ROWS[n];
        }
    }
    outln!("limit,,,{:.6}", delta_limit());
    Ok(if ok { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    seed: u64,
    trials: u64,
    q: u64,
    n: usize,
    tau: u32,
    force: bool,
    replay: Option<PathBuf>,
    fixed_fn: Option<PathBuf>,
) -> Result<u8> {
    if let Some(path) = replay {
        return if run_replay(&path)? {
            outln!("replay {}: PASS", path.display());
            Ok(0)
        } else {
            outln!("replay {}: FAIL", path.display());
            Ok(1)
        };
    }
    let size_cap = if force {
        eprintln!("warning: ladder size cap lifted; descent sums grow like q_n^tau");
        u64::MAX
    } else {
        DEFAULT_SIZE_CAP
    };
    if let Some(path) = fixed_fn {
        return verify_fixed(&path, n, tau, size_cap);
    }
    let mut cfg = TrialConfig::new(seed, q, n, tau);
    cfg.size_cap = size_cap;
    let report = run_suite(&cfg, trials)?;
    if report.all_passed() {
        outln!(
            "all {} trials passed ({} per verifier, seed {seed}, q {q}, n {n}, tau {tau})",
            report.trials_per_kind * ALL_KINDS.len() as u64,
            report.trials_per_kind
        );
        return Ok(0);
    }
    for (kind, index) in &report.failures {
        outln!("FAIL {} trial {index}", kind.name());
    }
    let (kind, index) = report.failures[0];
    let path = PathBuf::from(format!("charbound-replay-{seed}-{}-{index}.txt", kind.name()));
    write_replay(&path, kind, &cfg, index)?;
    outln!("replay file written to {}", path.display());
    Ok(1)
}

/// One deterministic pass of every identity check over a function read
/// from CSV. The function must have zero mean: the window-sum and
/// master checks need a finite window bound.
fn verify_fixed(path: &Path, n: usize, tau: u32, size_cap: u64) -> Result<u8> {
    let f = PeriodicFunction::from_csv(BufReader::new(File::open(path)?))?;
    if f.q() < 2 {
        return Err(Error::Usage(format!(
            "loaded function must have period >= 2, got {}",
            f.q()
        )));
    }
    let q = f.q() as i64;
    let mut ok = true;
    let mut check = |name: &str, passed: bool| {
        outln!("{name}: {}", if passed { "ok" } else { "FAIL" });
        ok &= passed;
    };
    check("shift_check", shift_check(&f, 3, 7, -5, 4, 2));
    check("oracle_t_minus", t_minus(&f, -4, 9) == t_minus_oracle(&f, -4, 9));
    check("oracle_t_plus", t_plus(&f, -4, 9) == t_plus_oracle(&f, -4, 9));
    check("oracle_s_sum", s_sum(&f, -4, 9) == s_sum_oracle(&f, -4, 9));
    let params = make_decomposition_params_capped(n, tau, 1, size_cap)?;
    check("lemma_minus", verify_lemma_minus(&f, 17, &params));
    check("lemma_plus", verify_lemma_plus(&f, 17, &params));
    check("lemma_combined", verify_lemma_combined(&f, 17, &params, &gen_coeffs(n)));
    let b = match f.min_b(f.q())? {
        MinB::Finite { value, .. } => value,
        MinB::Infinite => {
            return Err(Error::Usage(
                "loaded function must have zero mean for the window-sum and master checks".into(),
            ))
        }
    };
    let y = (q / 3).clamp(1, q - 1);
    check("sum_s", verify_sum_s_lemma(&f, &[(1, 1)], y, &b)?);
    // Nudge the certified parameters up so the f64 round-trip inside
    // membership checking cannot round below the exact optima.
    let class = ClassFParams {
        a: f.bound_a() * (1.0 + 1e-9) + 1e-9,
        b: rational_to_f64(&b) * (1.0 + 1e-9) + 1e-9,
        q: f.q(),
    };
    check("master", verify_master_inequality(&f, 1, 2 * q, q, &class)?);
    Ok(if ok { 0 } else { 1 })
}

fn cmd_scan(
    q_min: u64,
    q_max: u64,
    moduli: ModuliArg,
    chars: CharsArg,
    out: Option<PathBuf>,
    force: bool,
) -> Result<u8> {
    if q_min < 1 || q_min > q_max {
        return Err(Error::Usage(format!(
            "need 1 <= q-min <= q-max, got {q_min}..{q_max}"
        )));
    }
    if q_max > SCAN_CAP {
        if !force {
            return Err(Error::Usage(format!(
                "q-max {q_max} exceeds the scan cap {SCAN_CAP}; pass --force to lift it"
            )));
        }
        eprintln!("warning: scanning past q = {SCAN_CAP}; expect long runtimes");
    }
    let tables = gen_sequences(4)?;
    let targets: Vec<u64> = (q_min..=q_max)
        .filter(|&q| match moduli {
            ModuliArg::All => true,
            ModuliArg::Primes => is_prime(q),
        })
        .collect();
    let pool = thread_pool();
    let per_modulus: Vec<(Vec<String>, u64)> = pool.install(|| {
        targets
            .par_iter()
            .map(|&q| scan_modulus(q, chars, &tables))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut csv = String::from(SCAN_HEADER);
    csv.push('\n');
    let mut rows = 0u64;
    let mut violations = 0u64;
    for (lines, v) in per_modulus {
        for line in lines {
            csv.push_str(&line);
            csv.push('\n');
            rows += 1;
        }
        violations += v;
    }
    match out {
        Some(path) => {
            std::fs::write(&path, csv)?;
            outln!("wrote {rows} rows to {} ({violations} violations)", path.display());
        }
        None => outfmt!("{csv}"),
    }
    Ok(if violations > 0 { 1 } else { 0 })
}

/// All scan rows for one modulus, sorted by character index, plus the
/// violation count.
fn scan_modulus(q: u64, chars: CharsArg, tables: &SequenceTables) -> Result<(Vec<String>, u64)> {
    let group = CharacterGroup::new(q)?;
    let cor1 = bound_cor1(q, 0, tables);
    let br = bound_br(q, 1.0, 1.0);
    let dw = bound_dw(q, 1.0, 1.0);
    let mut lines = Vec::new();
    let mut violations = 0u64;
    for index in 1..group.num_characters() {
        let chi = group.character(index)?;
        if chars == CharsArg::Real && chi.order() > 2 {
            continue;
        }
        let s = s_chi_value(&chi);
        let t = t_chi(&chi);
        let pom = bound_pomerance(q, chi.parity())?;
        let mut margin_min = f64::INFINITY;
        let mut violated = false;
        let mut account = |bound: f64| {
            let margin = bound - s;
            margin_min = margin_min.min(margin);
            if margin < -(VIOLATION_GUARD * (bound.abs() + 1.0)) {
                violated = true;
            }
        };
        if cor1.applicable {
            account(cor1.value);
        }
        account(br);
        account(dw);
        account(pom);
        // Inapplicable level-0 cell stays empty rather than carrying a
        // number no theorem backs.
        let cor1_cell = if cor1.applicable { fmt_sig10(cor1.value) } else { String::new() };
        lines.push(format!(
            "{q},{index},{},{},{},{cor1_cell},{},{},{},{},{violated}",
            chi.parity(),
            fmt_sig10(s),
            fmt_sig10(t),
            fmt_sig10(br),
            fmt_sig10(dw),
            fmt_sig10(pom),
            fmt_sig10(margin_min),
        ));
        if violated {
            violations += 1;
        }
    }
    Ok((lines, violations))
}

fn cmd_membership(q: Option<u64>, input: Option<PathBuf>, force: bool) -> Result<u8> {
    match (q, input) {
        (None, Some(path)) => {
            let f = PeriodicFunction::from_csv(BufReader::new(File::open(path)?))?;
            outln!("{MEMBERSHIP_HEADER}");
            let min_b = f.min_b(f.q())?;
            let ok = match &min_b {
                MinB::Finite { value, .. } => *value <= BigRational::one(),
                MinB::Infinite => false,
            };
            outln!(
                "{},,,,{},{},{},exact",
                f.q(),
                fmt_sig10(f.bound_a()),
                fmt_sig10(min_b.value_f64()),
                min_b.k()
            );
            Ok(if ok { 0 } else { 1 })
        }
        (Some(q), None) => {
            if q > MEMBERSHIP_CAP {
                if !force {
                    return Err(Error::Usage(format!(
                        "q {q} exceeds the membership cap {MEMBERSHIP_CAP}; pass --force to lift it"
                    )));
                }
                eprintln!("warning: probing past q = {MEMBERSHIP_CAP}; expect long runtimes");
            }
            let group = CharacterGroup::new(q)?;
            outln!("{MEMBERSHIP_HEADER}");
            let mut all_ok = true;
            for index in 1..group.num_characters() {
                let chi = group.character(index)?;
                let (bound_a, b_cell, k_star, path, ok) = match chi.to_periodic() {
                    Some(f) => match f.min_b(q)? {
                        MinB::Finite { value, k } => (
                            f.bound_a(),
                            fmt_sig10(rational_to_f64(&value)),
                            k,
                            "exact",
                            value <= BigRational::one(),
                        ),
                        MinB::Infinite => unreachable!("nonprincipal characters have zero mean"),
                    },
                    None => {
                        let (b, k) = chi.min_b_numeric(q)?;
                        (1.0, fmt_sig10(b), k, "numeric", b <= 1.0 + 1e-9)
                    }
                };
                outln!(
                    "{q},{index},{},{},{},{b_cell},{k_star},{path}",
                    chi.parity(),
                    chi.order(),
                    fmt_sig10(bound_a)
                );
                all_ok &= ok;
            }
            Ok(if all_ok { 0 } else { 1 })
        }
        _ => Err(Error::Usage(
            "exactly one of --q and --input is required".into(),
        )),
    }
}

fn cmd_compare(
    q: u64,
    a: f64,
    b: f64,
    scan: Option<PathBuf>,
    out: Option<PathBuf>,
    force: bool,
) -> Result<u8> {
    if q < 2 {
        return Err(Error::Usage(format!("need q >= 2, got {q}")));
    }
    if q > SCAN_CAP {
        if !force {
            return Err(Error::Usage(format!(
                "q {q} exceeds the cap {SCAN_CAP}; pass --force to lift it"
            )));
        }
        eprintln!("warning: evaluating past q = {SCAN_CAP}; expect long runtimes");
    }
    let tables = gen_sequences(4)?;
    let maxima = match scan {
        Some(path) => parse_scan_maxima(&path, q)?,
        None => {
            let group = CharacterGroup::new(q)?;
            let pool = thread_pool();
            pool.install(|| {
                (1..group.num_characters())
                    .into_par_iter()
                    .map(|index| {
                        let chi = group.character(index)?;
                        Ok(CharMax {
                            char_index: index,
                            s_chi: s_chi_value(&chi),
                            t_chi: t_chi(&chi),
                            parity: chi.parity(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })?
        }
    };
    let report = compare(q, a, b, &maxima, &tables);
    let violated = report.entries.iter().any(|e| e.violation);
    match out {
        Some(path) => {
            std::fs::write(&path, report.to_csv())?;
            outln!("wrote report to {}", path.display());
        }
        None => outfmt!("{report}"),
    }
    Ok(if violated { 1 } else { 0 })
}

/// Measured (S, T) maxima for modulus q out of a scan CSV.
fn parse_scan_maxima(path: &Path, q: u64) -> Result<Vec<CharMax>> {
    let text = std::fs::read_to_string(path)?;
    let mut maxima = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line == SCAN_HEADER {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 5 {
            return Err(Error::Parse(format!(
                "scan row {} has {} fields, expected at least 5",
                lineno + 1,
                fields.len()
            )));
        }
        let bad = |what: &str| Error::Parse(format!("scan row {}: bad {what}", lineno + 1));
        let row_q: u64 = fields[0].parse().map_err(|_| bad("q"))?;
        if row_q != q {
            continue;
        }
        maxima.push(CharMax {
            char_index: fields[1].parse().map_err(|_| bad("char_index"))?,
            parity: fields[2].parse().map_err(|_| bad("parity"))?,
            s_chi: fields[3].parse().map_err(|_| bad("S_chi"))?,
            t_chi: fields[4].parse().map_err(|_| bad("T_chi"))?,
        });
    }
    if maxima.is_empty() {
        return Err(Error::Usage(format!("scan file has no rows for modulus {q}")));
    }
    Ok(maxima)
}
