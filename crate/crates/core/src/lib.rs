//! Simulation and analysis of a loss-mimicking eavesdropping attack on the
//! ping-pong protocol.
//!
//! The ping-pong protocol sends message bits through a shared Bell pair. An
//! eavesdropper who cannot break the encoding can still exploit channel loss:
//! she attacks a fraction of the rounds with an operation that reveals part
//! of the message but destroys the travel qubit half the time, and hides the
//! induced loss inside the transmission efficiency `eta` the legitimate
//! parties already expect. This crate models that attack abstractly as a
//! per-round classical channel (an [`attack::AttackProfile`]) and provides:
//!
//! - the honest protocol layer ([`protocol`]): Bell pair preparation, phase
//!   encoding and Bell-basis decoding;
//! - the attacked channel ([`attack`]): per-round sampling, attack fractions,
//!   and single-use asymptotic joint distributions;
//! - information measures ([`info`]): plug-in mutual information, empirical
//!   joints, exact integer-count error rates;
//! - finite-run machinery ([`montecarlo`]): seeded simulation, exhaustive
//!   outcome enumeration for small runs, convergence experiments;
//! - security analysis ([`security`]): information curves over `eta`,
//!   crossing points and threshold counting rules.
//!
//! Randomness is deterministic throughout: every round, trial and search
//! derives its own ChaCha stream from a user seed and its index, so results
//! are reproducible bit-for-bit regardless of how work is scheduled.

// indices over {0, 1} double as the bit values in channel formulas, so the
// range loops clippy flags are clearer than iterator chains here
#![allow(clippy::needless_range_loop)]

pub mod attack;
pub mod info;
pub mod montecarlo;
pub mod protocol;
pub mod security;

pub use attack::{
    attack_fraction, sample_round, spd_joint, AttackProfile, AttackTag, Normalization, Party,
    ProfileError, RoundRecord,
};
pub use info::{
    binary_entropy, empirical_joint, empirical_mi, expected_errors, qber, BitSequence, ErrorCount,
    ExpectedErrors, InfoError, JointDistribution,
};
pub use montecarlo::{
    convergence_experiment, enumerate_outcomes, parse_tag_string, prob_exact_match,
    records_to_csv, simulate_run, AtlasEntry, Condition, ConvergenceRow, OutcomeAtlas,
    ProbEstimate, RunConfig, RunStats, SimError, MAX_ENUMERATION_BITS, MIN_TRIALS,
};
pub use protocol::{bell_decode, encode, prepare_bell, DecodeOutcome, StateError, StateVector};
pub use security::{
    crossing_point, curve_point, expected_case_threshold, info_curves, sweep_to_csv,
    threshold_report, worst_case_threshold, EmpiricalConfig, SweepError, SweepRow,
    ThresholdReport, CROSSING_TOLERANCE, EXPECTED_CASE_RULE, WORST_CASE_RULE,
};

/// Formats a value with 6 significant digits for CSV and report output:
/// '.' decimal separator, no exponent for the magnitudes this crate emits
/// (quantities in [0, 1] and small counts), exact zero as "0".
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if mag >= 6 {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}
