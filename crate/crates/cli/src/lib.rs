//! The `pplab` command line: simulate, enumerate, sweep and analyze the
//! loss-mimicking attack on the ping-pong protocol.
//!
//! Every command is deterministic given its arguments: seeds select ChaCha
//! streams, parallel work reduces order-independently, and output is plain
//! `key=value` lines or CSV, so runs diff cleanly. Exit codes: 0 success,
//! 1 output/self-check failure, 2 bad arguments, 3 invalid attack profile,
//! 4 a worked example did not reproduce.

use clap::{Parser, Subcommand, ValueEnum};
use pplab_core::{
    bell_decode, empirical_mi, encode, enumerate_outcomes, expected_errors, fmt_sig6,
    info_curves, parse_tag_string, prepare_bell, qber, records_to_csv, simulate_run,
    sweep_to_csv, threshold_report, AttackProfile, BitSequence, Condition, EmpiricalConfig,
    Normalization, RunConfig, SweepError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

const EXIT_OK: i32 = 0;
const EXIT_FAILURE: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_PROFILE: i32 = 3;
const EXIT_MISMATCH: i32 = 4;

#[derive(Parser)]
#[command(
    name = "pplab",
    version,
    about = "Simulator and analysis toolkit for a loss-mimicking eavesdropping attack \
             on the ping-pong protocol"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run honest encode/decode round-trips through the two-qubit layer
    HonestCheck {
        /// Round-trips to run
        #[arg(long, default_value_t = 10_000)]
        rounds: usize,
        /// Seed for the message bits
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Simulate a finite attacked run and report its statistics
    Simulate {
        /// Protocol rounds to simulate
        #[arg(long)]
        n: usize,
        /// Transmission efficiency Eve must mimic
        #[arg(long)]
        eta: f64,
        /// Master seed; round i draws from ChaCha stream (seed, i)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Attack profile file (key=value lines); defaults to the built-in
        /// profile
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Alice's message bits, e.g. 1001; drawn uniformly when omitted
        #[arg(long)]
        alice: Option<String>,
        /// Per-round attack tags over {n,u,s}, e.g. uusn; sampled when
        /// omitted
        #[arg(long)]
        tags: Option<String>,
        /// Append the per-round record CSV after the statistics
        #[arg(long)]
        records: bool,
    },
    /// Exhaustively enumerate the outcomes of a short run
    Enumerate {
        /// Alice's message bits (at most 16)
        #[arg(long)]
        alice: String,
        /// Per-round attack tags over {n,u,s}; every u/s combination is
        /// enumerated when omitted
        #[arg(long)]
        tags: Option<String>,
        /// What the probabilities condition on
        #[arg(long, value_enum, default_value_t = ConditionArg::AllArrived)]
        condition: ConditionArg,
        /// Attack profile file; defaults to the built-in profile
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Report P(Bob receives exactly this string) instead of the CSV
        #[arg(long)]
        bob: Option<String>,
        /// Report P(Eve records exactly this string) instead of the CSV
        #[arg(long)]
        eve: Option<String>,
    },
    /// Sweep the information curves over transmission efficiency
    Sweep {
        /// Grid points on [0, 1]
        #[arg(long, default_value_t = 101)]
        grid: usize,
        /// Normalization of the reported rates
        #[arg(long, value_enum, default_value_t = NormalizationArg::PerArrived)]
        normalization: NormalizationArg,
        /// Simulated runs per grid point for empirical columns; 0 disables
        /// them
        #[arg(long, default_value_t = 0)]
        trials: usize,
        /// Rounds per empirical run
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Master seed for the empirical runs
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Attack profile file; defaults to the built-in profile
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Report the security thresholds of a profile
    Thresholds {
        /// Attack profile file; defaults to the built-in profile
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Reproduce a named worked example and verify it
    Example {
        /// Which example to reproduce
        #[arg(long, value_enum)]
        name: ExampleName,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConditionArg {
    AllArrived,
    Unconditional,
}

impl From<ConditionArg> for Condition {
    fn from(arg: ConditionArg) -> Self {
        match arg {
            ConditionArg::AllArrived => Condition::AllArrived,
            ConditionArg::Unconditional => Condition::Unconditional,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormalizationArg {
    PerArrived,
    PerSent,
}

impl From<NormalizationArg> for Normalization {
    fn from(arg: NormalizationArg) -> Self {
        match arg {
            NormalizationArg::PerArrived => Normalization::PerArrived,
            NormalizationArg::PerSent => Normalization::PerSent,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExampleName {
    /// One flipped bit: MI 0.3113 and QBER exactly 1/4
    #[value(name = "empirical-1001")]
    Empirical1001,
    /// A perfect copy: MI exactly 1 with zero errors
    #[value(name = "exact-match-1001")]
    ExactMatch1001,
    /// Fractional expected error counts are never observable
    #[value(name = "integer-qber")]
    IntegerQber,
    /// Information curve shape and crossing point
    #[value(name = "curve-recon")]
    CurveRecon,
    /// Threshold 75% under the pessimistic rule, 50%/60% under expected
    /// counting
    #[value(name = "threshold-75")]
    Threshold75,
}

impl ExampleName {
    fn as_str(self) -> &'static str {
        match self {
            ExampleName::Empirical1001 => "empirical-1001",
            ExampleName::ExactMatch1001 => "exact-match-1001",
            ExampleName::IntegerQber => "integer-qber",
            ExampleName::CurveRecon => "curve-recon",
            ExampleName::Threshold75 => "threshold-75",
        }
    }
}

/// Parses `args` and runs the selected command, writing to the given
/// streams. Returns the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(parse_error) => {
            let rendered = parse_error.render().to_string();
            let stream: &mut dyn Write =
                if parse_error.use_stderr() { &mut *err } else { &mut *out };
            let _ = stream.write_all(rendered.as_bytes());
            return parse_error.exit_code();
        }
    };
    let result = match cli.command {
        Command::HonestCheck { rounds, seed } => honest_check(rounds, seed, out, err),
        Command::Simulate { n, eta, seed, profile, alice, tags, records } => {
            simulate(n, eta, seed, profile.as_deref(), alice, tags, records, out, err)
        }
        Command::Enumerate { alice, tags, condition, profile, bob, eve } => {
            enumerate(&alice, tags, condition.into(), profile.as_deref(), bob, eve, out, err)
        }
        Command::Sweep { grid, normalization, trials, n, seed, profile } => {
            sweep(grid, normalization.into(), trials, n, seed, profile.as_deref(), out, err)
        }
        Command::Thresholds { profile } => thresholds(profile.as_deref(), out, err),
        Command::Example { name } => example(name, out),
    };
    match result {
        Ok(code) => code,
        Err(io_error) => {
            let _ = writeln!(err, "error: {io_error}");
            EXIT_FAILURE
        }
    }
}

fn load_profile(
    path: Option<&Path>,
    err: &mut dyn Write,
) -> io::Result<Result<AttackProfile, i32>> {
    match path {
        None => Ok(Ok(AttackProfile::default_profile())),
        Some(path) => match AttackProfile::from_file(path) {
            Ok(profile) => Ok(Ok(profile)),
            Err(profile_error) => {
                writeln!(err, "error: profile {}: {profile_error}", path.display())?;
                Ok(Err(EXIT_PROFILE))
            }
        },
    }
}

fn honest_check(
    rounds: usize,
    seed: u64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<i32> {
    if rounds == 0 {
        writeln!(err, "error: honest-check needs at least one round")?;
        return Ok(EXIT_USAGE);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errors = 0usize;
    let mut min_confidence = f64::INFINITY;
    for _ in 0..rounds {
        let bit = rng.random_bool(0.5);
        let outcome = bell_decode(&encode(&prepare_bell(), bit));
        if outcome.bit != bit || !outcome.in_span {
            errors += 1;
        }
        min_confidence = min_confidence.min(outcome.confidence);
    }
    writeln!(out, "rounds={rounds}")?;
    writeln!(out, "errors={errors}")?;
    writeln!(out, "min_confidence={}", fmt_sig6(min_confidence))?;
    if errors == 0 {
        writeln!(out, "status=ok")?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "status=failed")?;
        Ok(EXIT_FAILURE)
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    n: usize,
    eta: f64,
    seed: u64,
    profile_path: Option<&Path>,
    alice: Option<String>,
    tags: Option<String>,
    records: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<i32> {
    let profile = match load_profile(profile_path, err)? {
        Ok(profile) => profile,
        Err(code) => return Ok(code),
    };
    let mut config = RunConfig::new(n, eta, seed, profile);
    if let Some(text) = alice {
        match text.parse::<BitSequence>() {
            Ok(bits) => config.alice_bits = Some(bits),
            Err(parse_error) => {
                writeln!(err, "error: --alice: {parse_error}")?;
                return Ok(EXIT_USAGE);
            }
        }
    }
    if let Some(text) = tags {
        match parse_tag_string(&text) {
            Ok(tags) => config.tags = Some(tags),
            Err(parse_error) => {
                writeln!(err, "error: --tags: {parse_error}")?;
                return Ok(EXIT_USAGE);
            }
        }
    }
    let (round_records, stats) = match simulate_run(&config) {
        Ok(run) => run,
        Err(sim_error) => {
            writeln!(err, "error: {sim_error}")?;
            return Ok(EXIT_USAGE);
        }
    };
    let count_or_none = |count: Option<pplab_core::ErrorCount>| match count {
        Some(count) => count.to_string(),
        None => "none".to_string(),
    };
    writeln!(out, "n={}", stats.n)?;
    writeln!(out, "eta={}", fmt_sig6(eta))?;
    writeln!(out, "attack_fraction={}", fmt_sig6(config.profile.attack_fraction(eta)))?;
    writeln!(out, "seed={seed}")?;
    writeln!(out, "profile_digest={}", config.profile.digest())?;
    writeln!(out, "arrived={}", stats.arrived)?;
    writeln!(out, "attacked={}", stats.attacked)?;
    writeln!(out, "bob_errors={}", count_or_none(stats.bob_errors))?;
    writeln!(out, "eve_errors={}", count_or_none(stats.eve_errors))?;
    let qber_text = match stats.bob_errors {
        Some(count) => {
            let rate = count.qber();
            fmt_sig6(*rate.numer() as f64 / *rate.denom() as f64)
        }
        None => "none".to_string(),
    };
    writeln!(out, "qber={qber_text}")?;
    writeln!(out, "i_ab_emp={}", fmt_sig6(stats.i_ab_emp))?;
    writeln!(out, "i_ae_emp={}", fmt_sig6(stats.i_ae_emp))?;
    writeln!(out, "bob_exact_match={}", stats.bob_exact_match)?;
    writeln!(out, "eve_exact_match={}", stats.eve_exact_match)?;
    if records {
        writeln!(out)?;
        out.write_all(records_to_csv(&round_records).as_bytes())?;
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    alice: &str,
    tags: Option<String>,
    condition: Condition,
    profile_path: Option<&Path>,
    bob: Option<String>,
    eve: Option<String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<i32> {
    let profile = match load_profile(profile_path, err)? {
        Ok(profile) => profile,
        Err(code) => return Ok(code),
    };
    let alice = match alice.parse::<BitSequence>() {
        Ok(bits) => bits,
        Err(parse_error) => {
            writeln!(err, "error: --alice: {parse_error}")?;
            return Ok(EXIT_USAGE);
        }
    };
    let tags = match tags.map(|text| parse_tag_string(&text)).transpose() {
        Ok(tags) => tags,
        Err(parse_error) => {
            writeln!(err, "error: --tags: {parse_error}")?;
            return Ok(EXIT_USAGE);
        }
    };
    let atlas = match enumerate_outcomes(&alice, tags.as_deref(), &profile, condition) {
        Ok(atlas) => atlas,
        Err(sim_error) => {
            writeln!(err, "error: {sim_error}")?;
            return Ok(EXIT_USAGE);
        }
    };
    if bob.is_none() && eve.is_none() {
        out.write_all(atlas.to_csv().as_bytes())?;
        return Ok(EXIT_OK);
    }
    if let Some(bob) = bob {
        writeln!(out, "p[bob={bob}]={}", fmt_sig6(atlas.prob_bob_equals(&bob)))?;
    }
    if let Some(eve) = eve {
        writeln!(out, "p[eve={eve}]={}", fmt_sig6(atlas.prob_eve_equals(&eve)))?;
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    grid: usize,
    normalization: Normalization,
    trials: usize,
    n: usize,
    seed: u64,
    profile_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<i32> {
    let profile = match load_profile(profile_path, err)? {
        Ok(profile) => profile,
        Err(code) => return Ok(code),
    };
    let empirical = (trials > 0).then_some(EmpiricalConfig { trials, n, seed });
    let rows = match info_curves(&profile, grid, normalization, empirical.as_ref()) {
        Ok(rows) => rows,
        Err(sweep_error) => {
            let code = match sweep_error {
                SweepError::GridTooSmall | SweepError::ZeroTrials | SweepError::Sim(_) => {
                    EXIT_USAGE
                }
            };
            writeln!(err, "error: {sweep_error}")?;
            return Ok(code);
        }
    };
    writeln!(
        out,
        "# profile_digest={} normalization={normalization} grid={grid} trials={trials}",
        profile.digest()
    )?;
    out.write_all(sweep_to_csv(&rows).as_bytes())?;
    Ok(EXIT_OK)
}

fn thresholds(
    profile_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<i32> {
    let profile = match load_profile(profile_path, err)? {
        Ok(profile) => profile,
        Err(code) => return Ok(code),
    };
    out.write_all(threshold_report(&profile).to_key_values().as_bytes())?;
    Ok(EXIT_OK)
}

fn example(name: ExampleName, out: &mut dyn Write) -> io::Result<i32> {
    let verdict = match name {
        ExampleName::Empirical1001 => example_empirical_1001(out)?,
        ExampleName::ExactMatch1001 => example_exact_match_1001(out)?,
        ExampleName::IntegerQber => example_integer_qber(out)?,
        ExampleName::CurveRecon => example_curve_recon(out)?,
        ExampleName::Threshold75 => example_threshold_75(out)?,
    };
    match verdict {
        Ok(()) => {
            writeln!(out, "PASS example {}", name.as_str())?;
            Ok(EXIT_OK)
        }
        Err(reason) => {
            writeln!(out, "FAIL example {}: {reason}", name.as_str())?;
            Ok(EXIT_MISMATCH)
        }
    }
}

type Verdict = Result<(), String>;

fn example_empirical_1001(out: &mut dyn Write) -> io::Result<Verdict> {
    let alice: BitSequence = "1001".parse().expect("literal bits");
    let bob: BitSequence = "1000".parse().expect("literal bits");
    let mi = empirical_mi(&alice, &bob).expect("equal-length strings");
    let count = qber(&alice, &bob).expect("equal-length strings");
    let rate = count.qber();
    writeln!(out, "alice={alice}")?;
    writeln!(out, "bob={bob}")?;
    writeln!(out, "i_ab_emp={}", fmt_sig6(mi))?;
    writeln!(out, "qber={rate}")?;
    Ok(if (mi - 0.3113).abs() > 5e-4 {
        Err(format!("mutual information {mi} is not 0.3113 within 5e-4"))
    } else if (*rate.numer(), *rate.denom()) != (1, 4) {
        Err(format!("QBER {rate} is not exactly 1/4"))
    } else {
        Ok(())
    })
}

fn example_exact_match_1001(out: &mut dyn Write) -> io::Result<Verdict> {
    let alice: BitSequence = "1001".parse().expect("literal bits");
    let mi = empirical_mi(&alice, &alice).expect("equal-length strings");
    let count = qber(&alice, &alice).expect("equal-length strings");
    writeln!(out, "alice={alice}")?;
    writeln!(out, "bob={alice}")?;
    writeln!(out, "i_ab_emp={}", fmt_sig6(mi))?;
    writeln!(out, "errors={}", count.errors())?;
    Ok(if mi != 1.0 {
        Err(format!("mutual information {mi} is not exactly 1"))
    } else if count.errors() != 0 {
        Err(format!("{} errors on identical strings", count.errors()))
    } else {
        Ok(())
    })
}

fn example_integer_qber(out: &mut dyn Write) -> io::Result<Verdict> {
    let mut verdict = Ok(());
    for n in [201u64, 202, 203, 204] {
        let result = expected_errors(0.25, n);
        writeln!(
            out,
            "expected_errors(0.25,{n})={} achievable={}",
            fmt_sig6(result.expected),
            result.achievable
        )?;
        let should_be_achievable = n == 204;
        if result.achievable != should_be_achievable {
            verdict = Err(format!("achievability of {n} positions reported wrongly"));
        }
    }
    Ok(verdict)
}

fn example_curve_recon(out: &mut dyn Write) -> io::Result<Verdict> {
    let profile = AttackProfile::default_profile();
    let rows = info_curves(&profile, 101, Normalization::PerArrived, None)
        .expect("grid of 101 points is valid");
    let mut flat_max_dev: f64 = 0.0;
    let mut monotone = true;
    for pair in rows.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        if next.eta <= 0.5 + 1e-12 {
            flat_max_dev = flat_max_dev
                .max((next.i_ab_spd - rows[0].i_ab_spd).abs())
                .max((next.i_ae_spd - rows[0].i_ae_spd).abs());
        } else if next.i_ab_spd < prev.i_ab_spd || next.i_ae_spd > prev.i_ae_spd {
            monotone = false;
        }
    }
    let crossing = pplab_core::crossing_point(&profile);
    writeln!(out, "grid=101")?;
    writeln!(out, "flat_max_dev={}", fmt_sig6(flat_max_dev))?;
    writeln!(out, "monotone={monotone}")?;
    match crossing {
        Some(eta) => writeln!(out, "crossing_eta={}", fmt_sig6(eta))?,
        None => writeln!(out, "crossing_eta=none")?,
    }
    Ok(if flat_max_dev >= 1e-9 {
        Err(format!("curves wobble below the forking point by {flat_max_dev}"))
    } else if !monotone {
        Err("curves are not monotone above the forking point".to_string())
    } else {
        match crossing {
            Some(eta) if (eta - 0.5546).abs() <= 1e-3 => Ok(()),
            Some(eta) => Err(format!("crossing at {eta}, expected 0.5546 within 1e-3")),
            None => Err("curves never cross".to_string()),
        }
    })
}

fn example_threshold_75(out: &mut dyn Write) -> io::Result<Verdict> {
    let report = threshold_report(&AttackProfile::default_profile());
    writeln!(out, "worst_case_eta={}", fmt_sig6(report.worst_case_eta))?;
    writeln!(out, "expected_case_eta={}", fmt_sig6(report.expected_case_eta))?;
    writeln!(
        out,
        "perfect_eve_expected_eta={}",
        fmt_sig6(report.perfect_eve_expected_eta)
    )?;
    Ok(if report.worst_case_eta != 0.75 {
        Err(format!("worst-case threshold {} is not 0.75", report.worst_case_eta))
    } else if report.expected_case_eta != 0.5 {
        Err(format!("expected-case threshold {} is not 0.5", report.expected_case_eta))
    } else if (report.perfect_eve_expected_eta - 0.6).abs() > 1e-6 {
        Err(format!(
            "perfect-Eve expected threshold {} is not 0.6 within 1e-6",
            report.perfect_eve_expected_eta
        ))
    } else {
        Ok(())
    })
}
