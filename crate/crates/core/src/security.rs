//! Information curves over transmission efficiency and security thresholds.
//!
//! All quantities here are asymptotic (single-use) rates derived from an
//! [`AttackProfile`], optionally annotated with finite-run empirical
//! estimates. Two normalizations are offered everywhere:
//!
//! - per-arrived: bits per round that reaches Bob — the rate the legitimate
//!   parties can actually observe;
//! - per-sent: bits per round Alice transmits — the per-arrived rate scaled
//!   by `eta`, which credits neither party for rounds that never arrive.
//!
//! The modeled Alice-Bob curve charges the attack by attack fraction: an
//! honest round carries a full bit, an attacked round carries the mutual
//! information of the attacked Bob channel, and the two are mixed with
//! weights `(1 - f, f)`. The Alice-Eve curve is `f` times the attacked Eve
//! channel's mutual information. Below the forking point the attack is
//! saturated (`f = 1`), so both per-arrived curves sit at unequal constants
//! there — under the default profile about 0.189 against 0.311 bits; only
//! the per-sent normalization drives both to 0 as `eta` does.
//!
//! Thresholds are counting rules, not theorems: each one is reported under
//! an explicit rule identifier so competing readings can sit side by side.

use crate::attack::{attack_fraction, AttackProfile, Normalization};
use crate::montecarlo::{derive_seed, simulate_run, RunConfig, SimError};
use rayon::prelude::*;
use thiserror::Error;

/// Bisection stops once the bracketing interval is this narrow.
pub const CROSSING_TOLERANCE: f64 = 1e-6;

/// Errors from sweep and curve configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("a sweep grid needs at least two points")]
    GridTooSmall,
    #[error("empirical columns need at least one trial per grid point")]
    ZeroTrials,
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Configuration of the optional empirical columns of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmpiricalConfig {
    /// Simulated runs per grid point.
    pub trials: usize,
    /// Rounds per run.
    pub n: usize,
    /// Master seed; grid point j, trial t derives its own run seed.
    pub seed: u64,
}

/// One grid point of an information sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub eta: f64,
    /// Attack fraction Eve uses at this efficiency.
    pub attack_fraction: f64,
    /// Modeled Alice-Bob mutual information, in the row's normalization.
    pub i_ab_spd: f64,
    /// Modeled Alice-Eve mutual information, in the row's normalization.
    pub i_ae_spd: f64,
    /// Mean empirical Alice-Bob estimate, when requested.
    pub i_ab_emp_mean: Option<f64>,
    /// Mean empirical Alice-Eve estimate, when requested.
    pub i_ae_emp_mean: Option<f64>,
    /// Normalization the rates are expressed in.
    pub normalization: Normalization,
}

/// Modeled per-arrived rates at one efficiency: `(f, i_ab, i_ae)`.
fn per_arrived_point(profile: &AttackProfile, eta: f64) -> (f64, f64, f64) {
    let f = attack_fraction(eta, profile.p_loss_attacked());
    let i_ab_attacked = profile.attacked_bob_joint().mutual_information();
    let i_ae_attacked = profile.attacked_eve_joint().mutual_information();
    // an honest round carries exactly one bit: Bob decodes Alice's uniform
    // bit without error
    let i_ab = (1.0 - f) + f * i_ab_attacked;
    let i_ae = f * i_ae_attacked;
    (f, i_ab, i_ae)
}

/// Modeled curve values at one efficiency, in the requested normalization.
pub fn curve_point(profile: &AttackProfile, eta: f64, normalization: Normalization) -> SweepRow {
    let (f, i_ab, i_ae) = per_arrived_point(profile, eta);
    let scale = match normalization {
        Normalization::PerArrived => 1.0,
        Normalization::PerSent => eta,
    };
    SweepRow {
        eta,
        attack_fraction: f,
        i_ab_spd: scale * i_ab,
        i_ae_spd: scale * i_ae,
        i_ab_emp_mean: None,
        i_ae_emp_mean: None,
        normalization,
    }
}

/// Sweeps the information curves over a uniform `eta` grid on [0, 1].
///
/// With an [`EmpiricalConfig`], each grid point also runs `trials` seeded
/// simulations and reports mean empirical estimates of the same two rates:
/// per trial, Alice-Bob is the empirical mutual information over arrived
/// rounds and Alice-Eve is the attacked fraction times the empirical mutual
/// information over attacked rounds; per-sent estimates scale by the run's
/// empirical arrival rate. Trials run in parallel with per-trial seeds and
/// are averaged in grid order, so output is independent of scheduling.
pub fn info_curves(
    profile: &AttackProfile,
    grid_points: usize,
    normalization: Normalization,
    empirical: Option<&EmpiricalConfig>,
) -> Result<Vec<SweepRow>, SweepError> {
    if grid_points < 2 {
        return Err(SweepError::GridTooSmall);
    }
    if let Some(config) = empirical {
        if config.trials == 0 {
            return Err(SweepError::ZeroTrials);
        }
    }
    let mut rows = Vec::with_capacity(grid_points);
    for j in 0..grid_points {
        let eta = j as f64 / (grid_points - 1) as f64;
        let mut row = curve_point(profile, eta, normalization);
        if let Some(config) = empirical {
            let estimates: Result<Vec<(f64, f64)>, SimError> = (0..config.trials)
                .into_par_iter()
                .map(|t| {
                    let run = RunConfig::new(
                        config.n,
                        eta,
                        derive_seed(config.seed, j as u64, t as u64),
                        profile.clone(),
                    );
                    let (_, stats) = simulate_run(&run)?;
                    let n = stats.n as f64;
                    let i_ab = stats.i_ab_emp;
                    let i_ae = (stats.attacked as f64 / n) * stats.i_ae_emp;
                    Ok(match normalization {
                        Normalization::PerArrived => (i_ab, i_ae),
                        Normalization::PerSent => {
                            let arrival = stats.arrived as f64 / n;
                            (arrival * i_ab, arrival * i_ae)
                        }
                    })
                })
                .collect();
            let estimates = estimates?;
            let trials = estimates.len() as f64;
            row.i_ab_emp_mean = Some(estimates.iter().map(|e| e.0).sum::<f64>() / trials);
            row.i_ae_emp_mean = Some(estimates.iter().map(|e| e.1).sum::<f64>() / trials);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Renders sweep rows as CSV with header
/// `eta,f,i_ab_spd,i_ae_spd,i_ab_emp_mean,i_ae_emp_mean,normalization`;
/// empirical cells are empty when no estimates were requested, line endings
/// are LF.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let opt = |v: Option<f64>| v.map(crate::fmt_sig6).unwrap_or_default();
    let mut out = String::from("eta,f,i_ab_spd,i_ae_spd,i_ab_emp_mean,i_ae_emp_mean,normalization\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            crate::fmt_sig6(row.eta),
            crate::fmt_sig6(row.attack_fraction),
            crate::fmt_sig6(row.i_ab_spd),
            crate::fmt_sig6(row.i_ae_spd),
            opt(row.i_ab_emp_mean),
            opt(row.i_ae_emp_mean),
            row.normalization,
        ));
    }
    out
}

/// Finds the efficiency above the forking point where the per-arrived curves
/// cross (`i_ab == i_ae`), to within [`CROSSING_TOLERANCE`].
///
/// Below the forking point both curves are constant, so any crossing there
/// shows up at the forking point itself, which is returned when the gap
/// vanishes there. Returns `None` when Eve never catches up — when Bob's
/// curve dominates over the whole bracket.
pub fn crossing_point(profile: &AttackProfile) -> Option<f64> {
    let gap = |eta: f64| {
        let (_, i_ab, i_ae) = per_arrived_point(profile, eta);
        i_ab - i_ae
    };
    let mut lo = 1.0 - profile.p_loss_attacked();
    let mut hi = 1.0;
    let mut gap_lo = gap(lo);
    if gap_lo.abs() < 1e-12 {
        return Some(lo);
    }
    // at eta = 1 the attack fraction is 0: i_ab = 1, i_ae = 0, gap = 1 > 0,
    // so a sign change exists exactly when Eve leads at the forking point
    if gap_lo.signum() == gap(hi).signum() {
        return None;
    }
    while hi - lo > CROSSING_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let gap_mid = gap(mid);
        if gap_mid == 0.0 {
            return Some(mid);
        }
        if gap_mid.signum() == gap_lo.signum() {
            lo = mid;
            gap_lo = gap_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Identifier of the counting rule behind [`worst_case_threshold`].
pub const WORST_CASE_RULE: &str = "guaranteed-bob-vs-best-case-eve";

/// Identifier of the counting rule behind [`expected_case_threshold`].
pub const EXPECTED_CASE_RULE: &str = "expected-bob-vs-expected-eve";

/// Worst-case efficiency threshold: the smallest `eta` that is still safe
/// when Eve is granted her best case.
///
/// The rule compares guaranteed tallies of correct bits per sent round: Bob
/// is guaranteed only his `1 - f` honest rounds, while best-case Eve gets
/// every one of her `f` attacked rounds correct — which is possible exactly
/// when her per-round record matches Alice's bit with positive probability
/// (a lucky match counts; this is her best case, not her typical one).
/// Safety demands `1 - f >= f`, i.e. an attack fraction of at most 1/2. If
/// Eve's record can never match — her best case is zero correct bits — the
/// condition holds vacuously for every fraction and the threshold drops to
/// the forking point.
pub fn worst_case_threshold(profile: &AttackProfile) -> f64 {
    let f_max = if profile.eve_correct_attacked() > 0.0 { 0.5 } else { 1.0 };
    1.0 - profile.p_loss_attacked() * f_max
}

/// Expected-case efficiency threshold: the smallest `eta` at which Bob's
/// expected number of correct bits still matches Eve's.
///
/// Per sent round, an honest round hands Bob a guaranteed correct bit while
/// an attacked round is correct for Bob at his attacked rate and for Eve at
/// her match rate. Eve's expected tally overtakes Bob's once
/// `f > 1 / (1 - p_bob + p_eve)`; the threshold maps that largest safe
/// fraction back through the loss rate.
pub fn expected_case_threshold(profile: &AttackProfile) -> f64 {
    let p_bob = 1.0 - profile.bob_error_attacked();
    let p_eve = profile.eve_correct_attacked();
    let denom = 1.0 - p_bob + p_eve;
    let f_max = if denom <= 1.0 { 1.0 } else { 1.0 / denom };
    1.0 - profile.p_loss_attacked() * f_max
}

/// The threshold summary of a profile under every counting rule.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    /// Below this efficiency the saturated attack can no longer hide inside
    /// the expected loss.
    pub forking_eta: f64,
    /// Threshold under the pessimistic rule of [`worst_case_threshold`].
    pub worst_case_eta: f64,
    /// Threshold under the counting rule of [`expected_case_threshold`].
    pub expected_case_eta: f64,
    /// Expected-case threshold after upgrading Eve to a perfect conclusive
    /// channel, Bob's disturbance unchanged.
    pub perfect_eve_expected_eta: f64,
    /// Where the per-arrived information curves cross, if they do.
    pub crossing_eta: Option<f64>,
    /// Identifier of the worst-case counting rule.
    pub worst_case_rule: &'static str,
    /// Identifier of the expected-case counting rule.
    pub expected_case_rule: &'static str,
    /// Digest of the profile the report was computed from.
    pub profile_digest: String,
}

impl ThresholdReport {
    /// Renders the report as `key=value` lines in a fixed order.
    pub fn to_key_values(&self) -> String {
        let crossing = match self.crossing_eta {
            Some(eta) => crate::fmt_sig6(eta),
            None => "none".to_string(),
        };
        format!(
            "profile_digest={}\nforking_eta={}\nworst_case_eta={}\nexpected_case_eta={}\n\
             perfect_eve_expected_eta={}\ncrossing_eta={}\nworst_case_rule={}\n\
             expected_case_rule={}\n",
            self.profile_digest,
            crate::fmt_sig6(self.forking_eta),
            crate::fmt_sig6(self.worst_case_eta),
            crate::fmt_sig6(self.expected_case_eta),
            crate::fmt_sig6(self.perfect_eve_expected_eta),
            crossing,
            self.worst_case_rule,
            self.expected_case_rule,
        )
    }
}

/// Computes every threshold of a profile.
pub fn threshold_report(profile: &AttackProfile) -> ThresholdReport {
    ThresholdReport {
        forking_eta: 1.0 - profile.p_loss_attacked(),
        worst_case_eta: worst_case_threshold(profile),
        expected_case_eta: expected_case_threshold(profile),
        perfect_eve_expected_eta: expected_case_threshold(&profile.perfect_eve_variant()),
        crossing_eta: crossing_point(profile),
        worst_case_rule: WORST_CASE_RULE,
        expected_case_rule: EXPECTED_CASE_RULE,
        profile_digest: profile.digest(),
    }
}
