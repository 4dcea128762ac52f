//! Finite-run simulation and exact enumeration of the attacked protocol.
//!
//! The asymptotic story (attack fractions, single-use joints, information
//! curves) says what happens on average; this module is about what a single
//! run of N rounds actually produces: integer error counts, empirical mutual
//! information, exact-match events ("Bob received precisely Alice's string")
//! and their probabilities. For N ≤ 16 those probabilities come from
//! exhaustive enumeration of the outcome space; beyond that they are Monte
//! Carlo estimates with a confidence interval.
//!
//! Reproducibility contract: round i of a run draws from a ChaCha stream
//! derived from (seed, i), and trial t of an experiment gets its own seed
//! derived from (seed, N, t). Results are therefore identical however the
//! work is distributed across threads — reductions are either integer counts
//! or sequential folds over order-preserving collections.

use crate::attack::{sample_round, spd_joint, AttackProfile, AttackTag, Normalization, Party, RoundRecord};
use crate::info::{empirical_mi, BitSequence, ErrorCount};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Exhaustive enumeration is capped here: the outcome space grows like 4^N
/// (times 2^N when tag strings are enumerated too), so while the guard
/// admits N = 16, exhaustive use is practical up to N of about 8.
pub const MAX_ENUMERATION_BITS: usize = 16;

/// Convergence experiments need enough trials for the mean deviation to be
/// meaningful.
pub const MIN_TRIALS: usize = 30;

/// Errors from configuring runs and experiments.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("a run needs at least one round")]
    ZeroRounds,
    #[error("eta = {eta} must lie in [0, 1]")]
    EtaOutOfRange { eta: f64 },
    #[error("{bits} message bits were given for {rounds} rounds")]
    AliceLengthMismatch { bits: usize, rounds: usize },
    #[error("{tags} attack tags were given for {rounds} rounds")]
    TagLengthMismatch { tags: usize, rounds: usize },
    #[error("tag strings contain only 'n', 'u' and 's', found {found:?}")]
    BadTagChar { found: char },
    #[error("enumeration over {n} rounds exceeds the {max}-round guard")]
    EnumerationTooLarge { n: usize, max: usize },
    #[error("{trials} trials are too few; experiments need at least {min}")]
    TooFewTrials { trials: usize, min: usize },
    #[error("Monte Carlo estimation needs at least one sample")]
    ZeroSamples,
}

/// Parses a tag string such as "uusn" into per-round attack tags.
pub fn parse_tag_string(s: &str) -> Result<Vec<AttackTag>, SimError> {
    s.chars()
        .map(|ch| AttackTag::from_char(ch).ok_or(SimError::BadTagChar { found: ch }))
        .collect()
}

/// Configuration of one finite run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Number of protocol rounds.
    pub n: usize,
    /// Transmission efficiency Eve must mimic; sets the attack fraction when
    /// tags are sampled.
    pub eta: f64,
    /// Master seed; round i uses ChaCha stream (seed, i).
    pub seed: u64,
    pub profile: AttackProfile,
    /// Alice's message bits; drawn uniformly when absent.
    pub alice_bits: Option<BitSequence>,
    /// Explicit per-round tags; sampled from (attack_fraction, p_symmetrize)
    /// when absent.
    pub tags: Option<Vec<AttackTag>>,
}

impl RunConfig {
    /// A run with sampled bits and tags under the given profile.
    pub fn new(n: usize, eta: f64, seed: u64, profile: AttackProfile) -> Self {
        Self { n, eta, seed, profile, alice_bits: None, tags: None }
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.n == 0 {
            return Err(SimError::ZeroRounds);
        }
        if !(0.0..=1.0).contains(&self.eta) || self.eta.is_nan() {
            return Err(SimError::EtaOutOfRange { eta: self.eta });
        }
        if let Some(bits) = &self.alice_bits {
            if bits.len() != self.n {
                return Err(SimError::AliceLengthMismatch { bits: bits.len(), rounds: self.n });
            }
        }
        if let Some(tags) = &self.tags {
            if tags.len() != self.n {
                return Err(SimError::TagLengthMismatch { tags: tags.len(), rounds: self.n });
            }
        }
        Ok(())
    }
}

/// Summary statistics of one finite run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    /// Rounds in the run.
    pub n: usize,
    /// Rounds that reached Bob.
    pub arrived: usize,
    /// Rounds Eve attacked (she holds a record for each, arrived or lost).
    pub attacked: usize,
    /// Bob's disagreements with Alice over arrived rounds; `None` when
    /// nothing arrived.
    pub bob_errors: Option<ErrorCount>,
    /// Eve's disagreements with Alice over attacked rounds; `None` when
    /// nothing was attacked.
    pub eve_errors: Option<ErrorCount>,
    /// Empirical mutual information of (Alice, Bob) over arrived rounds,
    /// in bits per arrived round; 0 when nothing arrived.
    pub i_ab_emp: f64,
    /// Empirical mutual information of (Alice, Eve) over attacked rounds,
    /// in bits per attacked round; 0 when nothing was attacked.
    pub i_ae_emp: f64,
    /// True iff every round arrived and Bob's string equals Alice's.
    pub bob_exact_match: bool,
    /// True iff Eve's records agree with Alice on every attacked round
    /// (vacuously true when no round was attacked).
    pub eve_exact_match: bool,
}

impl RunStats {
    /// Computes the summary of a record list.
    pub fn from_records(records: &[RoundRecord]) -> Self {
        let n = records.len();
        let mut alice_arrived = Vec::new();
        let mut bob_arrived = Vec::new();
        let mut alice_attacked = Vec::new();
        let mut eve_attacked = Vec::new();
        for record in records {
            if let Some(bob) = record.bob_bit {
                alice_arrived.push(record.alice_bit);
                bob_arrived.push(bob);
            }
            if let Some(eve) = record.eve_bit {
                alice_attacked.push(record.alice_bit);
                eve_attacked.push(eve);
            }
        }
        let pair_stats = |xs: Vec<bool>, ys: Vec<bool>| {
            if xs.is_empty() {
                return (None, 0.0);
            }
            let errors = xs.iter().zip(&ys).filter(|(x, y)| x != y).count() as u64;
            let count = ErrorCount::new(errors, xs.len() as u64).expect("non-empty comparison");
            let xs = BitSequence::new(xs);
            let ys = BitSequence::new(ys);
            let mi = empirical_mi(&xs, &ys).expect("equal-length non-empty sequences");
            (Some(count), mi)
        };
        let arrived = alice_arrived.len();
        let attacked = alice_attacked.len();
        let (bob_errors, i_ab_emp) = pair_stats(alice_arrived, bob_arrived);
        let (eve_errors, i_ae_emp) = pair_stats(alice_attacked, eve_attacked);
        RunStats {
            n,
            arrived,
            attacked,
            bob_errors,
            eve_errors,
            i_ab_emp,
            i_ae_emp,
            bob_exact_match: arrived == n && bob_errors.is_some_and(|c| c.errors() == 0),
            eve_exact_match: eve_errors.is_none_or(|c| c.errors() == 0),
        }
    }
}

/// Simulates one run, returning its per-round records and summary.
///
/// Round i draws, in fixed order and from its own stream (seed, i): Alice's
/// bit (when sampled), the attack tag (when sampled: attacked with
/// probability `attack_fraction(eta)`, then the mode with probability
/// `p_symmetrize`), then the round outcome via [`sample_round`]. Note the
/// attack's intrinsic loss floors the arrival rate at `1 - p_loss_attacked`:
/// below the forking point a run cannot dip to `eta` (Eve's extra blocking
/// there is not simulated), which is invisible to per-arrived statistics.
pub fn simulate_run(config: &RunConfig) -> Result<(Vec<RoundRecord>, RunStats), SimError> {
    config.validate()?;
    let f = config.profile.attack_fraction(config.eta);
    let records: Vec<RoundRecord> = (0..config.n)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            let alice_bit = match &config.alice_bits {
                Some(bits) => bits.bits()[i],
                None => rng.random_bool(0.5),
            };
            let tag = match &config.tags {
                Some(tags) => tags[i],
                None => {
                    if rng.random_bool(f) {
                        if rng.random_bool(config.profile.p_symmetrize()) {
                            AttackTag::Symmetrized
                        } else {
                            AttackTag::Unsymmetrized
                        }
                    } else {
                        AttackTag::NotAttacked
                    }
                }
            };
            sample_round(alice_bit, tag, &config.profile, &mut rng)
        })
        .collect();
    let stats = RunStats::from_records(&records);
    Ok((records, stats))
}

/// Renders run records as CSV: `round,alice,tag,arrived,bob,eve`, bits as
/// 0/1, absent symbols as empty cells, LF line endings.
pub fn records_to_csv(records: &[RoundRecord]) -> String {
    let bit = |b: bool| if b { '1' } else { '0' };
    let opt = |b: Option<bool>| b.map(bit).map(String::from).unwrap_or_default();
    let mut out = String::from("round,alice,tag,arrived,bob,eve\n");
    for (i, r) in records.iter().enumerate() {
        out.push_str(&format!(
            "{i},{},{},{},{},{}\n",
            bit(r.alice_bit),
            r.tag.as_char(),
            u8::from(r.arrived),
            opt(r.bob_bit),
            opt(r.eve_bit),
        ));
    }
    out
}

/// What an enumeration or exact-match probability conditions on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// Condition on every round arriving at Bob.
    AllArrived,
    /// No conditioning; lost rounds show up as '-' in Bob's string.
    Unconditional,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::AllArrived => "all-arrived",
            Condition::Unconditional => "unconditional",
        })
    }
}

/// One outcome of an enumerated run: the full (Bob string, Eve string, tag
/// string) triple and its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct AtlasEntry {
    /// Bob's received string over {0, 1, -}; '-' marks a lost round.
    pub bob: String,
    /// Eve's records over the attacked positions, in round order.
    pub eve: String,
    /// Tag string over {n, u, s}.
    pub tags: String,
    pub probability: f64,
}

/// The exhaustive outcome distribution of a small run.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeAtlas {
    entries: Vec<AtlasEntry>,
    total_probability: f64,
}

impl OutcomeAtlas {
    pub fn entries(&self) -> &[AtlasEntry] {
        &self.entries
    }

    /// Sum of all entry probabilities; 1 up to rounding.
    pub fn total_probability(&self) -> f64 {
        self.total_probability
    }

    /// Probability that Bob receives exactly `bob`, tags and Eve marginalized.
    pub fn prob_bob_equals(&self, bob: &str) -> f64 {
        self.entries.iter().filter(|e| e.bob == bob).map(|e| e.probability).sum()
    }

    /// Probability that Eve records exactly `eve`, tags and Bob marginalized.
    pub fn prob_eve_equals(&self, eve: &str) -> f64 {
        self.entries.iter().filter(|e| e.eve == eve).map(|e| e.probability).sum()
    }

    /// The (Bob string, Eve string) outcome distribution with tag strings
    /// summed out, in deterministic key order.
    pub fn outcome_marginal(&self) -> BTreeMap<(String, String), f64> {
        let mut marginal = BTreeMap::new();
        for entry in &self.entries {
            *marginal.entry((entry.bob.clone(), entry.eve.clone())).or_insert(0.0) +=
                entry.probability;
        }
        marginal
    }

    /// Renders the atlas as CSV: `bob,eve,tags,probability`, LF endings,
    /// entries in enumeration order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bob,eve,tags,probability\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.bob,
                e.eve,
                e.tags,
                crate::fmt_sig6(e.probability)
            ));
        }
        out
    }
}

/// Exhaustively enumerates every outcome of a run of at most
/// [`MAX_ENUMERATION_BITS`] rounds.
///
/// With explicit `tags` the atlas covers that single tag string; without,
/// every u/s tag string is enumerated (an all-attacked run) weighted by
/// `p_symmetrize` per position. Zero-probability branches are pruned, so
/// entries always have positive probability and the atlas total is 1.
pub fn enumerate_outcomes(
    alice: &BitSequence,
    tags: Option<&[AttackTag]>,
    profile: &AttackProfile,
    condition: Condition,
) -> Result<OutcomeAtlas, SimError> {
    let n = alice.len();
    if n == 0 {
        return Err(SimError::ZeroRounds);
    }
    if n > MAX_ENUMERATION_BITS {
        return Err(SimError::EnumerationTooLarge { n, max: MAX_ENUMERATION_BITS });
    }
    if let Some(tags) = tags {
        if tags.len() != n {
            return Err(SimError::TagLengthMismatch { tags: tags.len(), rounds: n });
        }
    }

    let tag_sets: Vec<(Vec<AttackTag>, f64)> = match tags {
        Some(tags) => vec![(tags.to_vec(), 1.0)],
        None => {
            let p_s = profile.p_symmetrize();
            (0..1u32 << n)
                .filter_map(|mask| {
                    let mut weight = 1.0;
                    let tags: Vec<AttackTag> = (0..n)
                        .map(|i| {
                            if mask >> i & 1 == 1 {
                                weight *= p_s;
                                AttackTag::Symmetrized
                            } else {
                                weight *= 1.0 - p_s;
                                AttackTag::Unsymmetrized
                            }
                        })
                        .collect();
                    (weight > 0.0).then_some((tags, weight))
                })
                .collect()
        }
    };

    let mut entries = Vec::new();
    for (tags, weight) in &tag_sets {
        let tag_string: String = tags.iter().map(|t| t.as_char()).collect();
        let mut bob = String::with_capacity(n);
        let mut eve = String::with_capacity(n);
        walk_outcomes(
            alice.bits(),
            tags,
            profile,
            condition,
            0,
            &mut bob,
            &mut eve,
            *weight,
            &tag_string,
            &mut entries,
        );
    }
    let total_probability = entries.iter().map(|e| e.probability).sum();
    Ok(OutcomeAtlas { entries, total_probability })
}

#[allow(clippy::too_many_arguments)]
fn walk_outcomes(
    alice: &[bool],
    tags: &[AttackTag],
    profile: &AttackProfile,
    condition: Condition,
    i: usize,
    bob: &mut String,
    eve: &mut String,
    probability: f64,
    tag_string: &str,
    entries: &mut Vec<AtlasEntry>,
) {
    if i == alice.len() {
        entries.push(AtlasEntry {
            bob: bob.clone(),
            eve: eve.clone(),
            tags: tag_string.to_string(),
            probability,
        });
        return;
    }
    let bit_char = |b: usize| if b == 1 { '1' } else { '0' };
    let tag = tags[i];
    if tag == AttackTag::NotAttacked {
        bob.push(bit_char(usize::from(alice[i])));
        walk_outcomes(alice, tags, profile, condition, i + 1, bob, eve, probability, tag_string, entries);
        bob.pop();
        return;
    }
    let a = usize::from(alice[i]);
    let joint = &profile.joint(tag)[a];
    let arrive_weight = match condition {
        Condition::AllArrived => 1.0,
        Condition::Unconditional => 1.0 - profile.p_loss_attacked(),
    };
    if arrive_weight > 0.0 {
        for b in 0..2 {
            for e in 0..2 {
                let p = arrive_weight * joint[b][e];
                if p > 0.0 {
                    bob.push(bit_char(b));
                    eve.push(bit_char(e));
                    walk_outcomes(
                        alice, tags, profile, condition, i + 1, bob, eve,
                        probability * p, tag_string, entries,
                    );
                    eve.pop();
                    bob.pop();
                }
            }
        }
    }
    if condition == Condition::Unconditional && profile.p_loss_attacked() > 0.0 {
        let marginal = profile.eve_marginal(tag, alice[i]);
        for e in 0..2 {
            let p = profile.p_loss_attacked() * marginal[e];
            if p > 0.0 {
                bob.push('-');
                eve.push(bit_char(e));
                walk_outcomes(
                    alice, tags, profile, condition, i + 1, bob, eve,
                    probability * p, tag_string, entries,
                );
                eve.pop();
                bob.pop();
            }
        }
    }
}

/// A probability that is either exact (from enumeration) or estimated.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbEstimate {
    /// Exact value from exhaustive enumeration.
    Exact(f64),
    /// Monte Carlo estimate with a 95% confidence half-width.
    MonteCarlo { estimate: f64, half_width_95: f64, samples: u64 },
}

impl ProbEstimate {
    pub fn value(&self) -> f64 {
        match self {
            ProbEstimate::Exact(p) => *p,
            ProbEstimate::MonteCarlo { estimate, .. } => *estimate,
        }
    }
}

/// Probability that a party's string exactly reproduces Alice's bits: Bob's
/// whole received string for [`Party::Bob`], the records over attacked
/// positions for [`Party::Eve`].
///
/// Runs of at most [`MAX_ENUMERATION_BITS`] rounds are answered exactly via
/// [`enumerate_outcomes`]; longer runs fall back to `mc_samples` Monte Carlo
/// samples seeded by `seed` (sample t uses ChaCha stream (seed, t)). As in
/// enumeration, absent `tags` means every round is attacked with the mode
/// drawn from `p_symmetrize`.
pub fn prob_exact_match(
    alice: &BitSequence,
    tags: Option<&[AttackTag]>,
    profile: &AttackProfile,
    condition: Condition,
    party: Party,
    mc_samples: u64,
    seed: u64,
) -> Result<ProbEstimate, SimError> {
    let n = alice.len();
    if n == 0 {
        return Err(SimError::ZeroRounds);
    }
    if let Some(tags) = tags {
        if tags.len() != n {
            return Err(SimError::TagLengthMismatch { tags: tags.len(), rounds: n });
        }
    }

    if n <= MAX_ENUMERATION_BITS {
        let atlas = enumerate_outcomes(alice, tags, profile, condition)?;
        let alice_string = alice.to_string();
        let p = match party {
            Party::Bob => atlas.prob_bob_equals(&alice_string),
            Party::Eve => atlas
                .entries()
                .iter()
                .filter(|entry| {
                    let target: String = entry
                        .tags
                        .chars()
                        .zip(alice_string.chars())
                        .filter(|(tag, _)| *tag != 'n')
                        .map(|(_, bit)| bit)
                        .collect();
                    entry.eve == target
                })
                .map(|entry| entry.probability)
                .sum(),
        };
        return Ok(ProbEstimate::Exact(p));
    }

    if mc_samples == 0 {
        return Err(SimError::ZeroSamples);
    }
    let matches: u64 = (0..mc_samples)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            u64::from(sample_matches(alice.bits(), tags, profile, condition, party, &mut rng))
        })
        .sum();
    let estimate = matches as f64 / mc_samples as f64;
    let half_width_95 = 1.96 * (estimate * (1.0 - estimate) / mc_samples as f64).sqrt();
    Ok(ProbEstimate::MonteCarlo { estimate, half_width_95, samples: mc_samples })
}

/// One Monte Carlo sample for [`prob_exact_match`]: true iff the party's
/// string reproduces Alice's bits on this sample.
fn sample_matches(
    alice: &[bool],
    tags: Option<&[AttackTag]>,
    profile: &AttackProfile,
    condition: Condition,
    party: Party,
    rng: &mut impl Rng,
) -> bool {
    for (i, &a) in alice.iter().enumerate() {
        let tag = match tags {
            Some(tags) => tags[i],
            None => {
                if rng.random_bool(profile.p_symmetrize()) {
                    AttackTag::Symmetrized
                } else {
                    AttackTag::Unsymmetrized
                }
            }
        };
        if tag == AttackTag::NotAttacked {
            // passes through perfectly; matches for both parties trivially
            continue;
        }
        let joint = &profile.joint(tag)[usize::from(a)];
        let (bob_bit, eve_bit, arrived) = match condition {
            Condition::AllArrived => {
                let (b, e) = draw_joint(joint, rng);
                (Some(b), e, true)
            }
            Condition::Unconditional => {
                if rng.random_bool(1.0 - profile.p_loss_attacked()) {
                    let (b, e) = draw_joint(joint, rng);
                    (Some(b), e, true)
                } else {
                    let marginal = profile.eve_marginal(tag, a);
                    let u: f64 = rng.random();
                    (None, u >= marginal[0], false)
                }
            }
        };
        match party {
            Party::Bob => {
                if !arrived || bob_bit != Some(a) {
                    return false;
                }
            }
            Party::Eve => {
                if eve_bit != a {
                    return false;
                }
            }
        }
    }
    true
}

fn draw_joint(joint: &[[f64; 2]; 2], rng: &mut impl Rng) -> (bool, bool) {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for b in 0..2 {
        for e in 0..2 {
            acc += joint[b][e];
            if u < acc {
                return (b == 1, e == 1);
            }
        }
    }
    (true, true)
}

/// One row of a convergence experiment: mean absolute deviation of the
/// empirical per-arrived mutual information from its asymptotic value.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub mean_abs_dev: f64,
}

/// Runs `trials` independent runs at each size in `ns` and measures how far
/// the empirical Alice-Bob mutual information sits from the single-use
/// per-arrived value. Trials are distributed across workers; trial t of size
/// N runs with seed derived from (seed, N, t), and the per-size mean is a
/// sequential fold, so results do not depend on the worker count.
pub fn convergence_experiment(
    ns: &[usize],
    eta: f64,
    profile: &AttackProfile,
    trials: usize,
    seed: u64,
) -> Result<Vec<ConvergenceRow>, SimError> {
    if trials < MIN_TRIALS {
        return Err(SimError::TooFewTrials { trials, min: MIN_TRIALS });
    }
    let target = spd_joint(profile, eta, Party::Bob, Normalization::PerArrived)
        .mutual_information();
    ns.iter()
        .map(|&n| {
            let deviations: Result<Vec<f64>, SimError> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let config = RunConfig::new(
                        n,
                        eta,
                        derive_seed(seed, n as u64, t as u64),
                        profile.clone(),
                    );
                    let (_, stats) = simulate_run(&config)?;
                    Ok((stats.i_ab_emp - target).abs())
                })
                .collect();
            let deviations = deviations?;
            let mean_abs_dev = deviations.iter().sum::<f64>() / deviations.len() as f64;
            Ok(ConvergenceRow { n, mean_abs_dev })
        })
        .collect()
}

/// Derives an independent run seed from (master seed, experiment size,
/// trial index) — splitmix64 over a collision-free packing.
pub(crate) fn derive_seed(seed: u64, n: u64, trial: u64) -> u64 {
    splitmix64(seed ^ splitmix64(n << 32 | trial))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::binary_entropy;

    fn bits(s: &str) -> BitSequence {
        s.parse().unwrap()
    }

    fn default_config(n: usize, eta: f64, seed: u64) -> RunConfig {
        RunConfig::new(n, eta, seed, AttackProfile::default_profile())
    }

    #[test]
    fn honest_run_is_error_free() {
        let (records, stats) = simulate_run(&default_config(4, 1.0, 7)).unwrap();
        assert_eq!(records.len(), 4);
        assert_eq!(stats.arrived, 4);
        assert_eq!(stats.attacked, 0);
        let errors = stats.bob_errors.unwrap();
        assert_eq!(errors.errors(), 0);
        assert_eq!(errors.compared(), 4);
        assert_eq!(stats.eve_errors, None);
        assert!(stats.bob_exact_match);
        assert!(stats.eve_exact_match); // vacuous: no attacked rounds
        // Bob's bits equal Alice's, so the empirical MI is the entropy of
        // Alice's empirical marginal.
        let ones = records.iter().filter(|r| r.alice_bit).count();
        let expected = binary_entropy(ones as f64 / 4.0);
        assert!((stats.i_ab_emp - expected).abs() < 1e-12);
    }

    #[test]
    fn saturated_run_attacks_every_round() {
        let (records, stats) = simulate_run(&default_config(100, 0.5, 3)).unwrap();
        assert_eq!(stats.attacked, 100);
        assert!(records.iter().all(|r| r.tag.is_attacked()));
        assert!(records.iter().all(|r| r.eve_bit.is_some()));
        assert!(records.iter().all(|r| r.bob_bit.is_some() == r.arrived));
        assert_eq!(stats.eve_errors.unwrap().compared(), 100);
    }

    #[test]
    fn explicit_bits_and_tags_are_respected() {
        let mut config = default_config(4, 0.5, 1);
        config.alice_bits = Some(bits("1001"));
        config.tags = Some(parse_tag_string("usnn").unwrap());
        let (records, stats) = simulate_run(&config).unwrap();
        let alice: Vec<bool> = records.iter().map(|r| r.alice_bit).collect();
        assert_eq!(alice, vec![true, false, false, true]);
        assert_eq!(records[0].tag, AttackTag::Unsymmetrized);
        assert_eq!(records[1].tag, AttackTag::Symmetrized);
        assert_eq!(records[2].tag, AttackTag::NotAttacked);
        assert_eq!(stats.attacked, 2);
        // unattacked rounds always arrive and decode perfectly
        assert_eq!(records[2].bob_bit, Some(false));
        assert_eq!(records[3].bob_bit, Some(true));
    }

    #[test]
    fn runs_are_deterministic_in_the_seed() {
        let (records_a, stats_a) = simulate_run(&default_config(256, 0.6, 11)).unwrap();
        let (records_b, stats_b) = simulate_run(&default_config(256, 0.6, 11)).unwrap();
        assert_eq!(records_a, records_b);
        assert_eq!(stats_a, stats_b);
        let (records_c, _) = simulate_run(&default_config(256, 0.6, 12)).unwrap();
        assert_ne!(records_a, records_c);
    }

    #[test]
    fn config_validation_catches_mismatches() {
        assert_eq!(simulate_run(&default_config(0, 0.5, 1)).unwrap_err(), SimError::ZeroRounds);
        assert_eq!(
            simulate_run(&default_config(4, 1.5, 1)).unwrap_err(),
            SimError::EtaOutOfRange { eta: 1.5 }
        );
        let mut config = default_config(4, 0.5, 1);
        config.alice_bits = Some(bits("10"));
        assert_eq!(
            simulate_run(&config).unwrap_err(),
            SimError::AliceLengthMismatch { bits: 2, rounds: 4 }
        );
        let mut config = default_config(4, 0.5, 1);
        config.tags = Some(parse_tag_string("uu").unwrap());
        assert_eq!(
            simulate_run(&config).unwrap_err(),
            SimError::TagLengthMismatch { tags: 2, rounds: 4 }
        );
        assert_eq!(parse_tag_string("uxs").unwrap_err(), SimError::BadTagChar { found: 'x' });
    }

    #[test]
    fn a_seed_exists_where_bob_receives_one_error() {
        // Alice sends '1001' at eta = 1/2, where every round is attacked
        // with a sampled symmetrization tag; some seed must deliver all four
        // rounds with exactly the last bit flipped. Per seed that event has
        // probability (1/16) * (27/256), so a million seeds is ample.
        let mut config = default_config(4, 0.5, 0);
        config.alice_bits = Some(bits("1001"));
        let found = (0..1_000_000u64).find(|&seed| {
            config.seed = seed;
            let (records, stats) = simulate_run(&config).unwrap();
            stats.arrived == 4
                && records
                    .iter()
                    .map(|r| r.bob_bit.unwrap())
                    .eq([true, false, false, false])
        });
        assert!(found.is_some(), "no seed below 10^6 produced bob = 1000");
    }

    #[test]
    fn arrival_rate_mimics_the_expected_efficiency() {
        // Eve stays undetectable through the loss ledger: above the forking
        // point the arrival rate reproduces eta itself, below it the rate
        // floors at 1 - p_loss_attacked. 200k rounds put the binomial
        // standard error near 0.0011, so 0.005 is a generous 4-sigma band.
        for (eta, expected) in
            [(0.2, 0.5), (0.5, 0.5), (0.6, 0.6), (0.75, 0.75), (0.9, 0.9)]
        {
            let (_, stats) = simulate_run(&default_config(200_000, eta, 42)).unwrap();
            let rate = stats.arrived as f64 / stats.n as f64;
            assert!((rate - expected).abs() < 0.005, "eta={eta}: rate {rate}");
        }
        // honest rounds always arrive
        let (_, stats) = simulate_run(&default_config(200_000, 1.0, 42)).unwrap();
        assert_eq!(stats.arrived, 200_000);
    }

    #[test]
    fn records_csv_has_the_documented_shape() {
        let mut config = default_config(3, 1.0, 5);
        config.alice_bits = Some(bits("101"));
        let (records, _) = simulate_run(&config).unwrap();
        let csv = records_to_csv(&records);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "round,alice,tag,arrived,bob,eve");
        assert_eq!(lines.len(), 4);
        // honest run: every row arrives, bob echoes alice, eve cell empty
        assert_eq!(lines[1], "0,1,n,1,1,");
        assert_eq!(lines[2], "1,0,n,1,0,");
        assert_eq!(lines[3], "2,1,n,1,1,");
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
    }

    #[test]
    fn enumeration_reproduces_hand_computed_probabilities() {
        let profile = AttackProfile::default_profile();
        let tags = parse_tag_string("uuuu").unwrap();
        let atlas =
            enumerate_outcomes(&bits("1001"), Some(&tags), &profile, Condition::AllArrived)
                .unwrap();
        // per-round correct probability 3/4: exact match (3/4)^4 = 81/256
        assert!((atlas.prob_bob_equals("1001") - 81.0 / 256.0).abs() < 1e-12);
        // one error in the last position: (3/4)^3 * (1/4) = 27/256
        assert!((atlas.prob_bob_equals("1000") - 27.0 / 256.0).abs() < 1e-12);
        assert!((atlas.total_probability() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eve_reads_a_two_bit_message_half_the_time() {
        let profile = AttackProfile::default_profile();
        let tags = parse_tag_string("uu").unwrap();
        let estimate = prob_exact_match(
            &bits("10"),
            Some(&tags),
            &profile,
            Condition::AllArrived,
            Party::Eve,
            0,
            0,
        )
        .unwrap();
        // P(e='1' | a=1) = 1/2, P(e='0' | a=0) = 1: product 1/2
        assert_eq!(estimate, ProbEstimate::Exact(0.5));
        assert!((estimate.value() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn enumerated_tag_strings_cover_the_symmetrization_mix() {
        let profile = AttackProfile::default_profile();
        for condition in [Condition::AllArrived, Condition::Unconditional] {
            let atlas = enumerate_outcomes(&bits("101"), None, &profile, condition).unwrap();
            assert!((atlas.total_probability() - 1.0).abs() < 1e-10);
            let tag_strings: std::collections::BTreeSet<&str> =
                atlas.entries().iter().map(|e| e.tags.as_str()).collect();
            assert_eq!(tag_strings.len(), 8); // all 2^3 u/s strings
            assert!(atlas.entries().iter().all(|e| e.probability > 0.0));
        }
    }

    #[test]
    fn unconditional_atlas_accounts_for_lost_rounds() {
        let profile = AttackProfile::default_profile();
        let tags = parse_tag_string("uu").unwrap();
        let atlas =
            enumerate_outcomes(&bits("10"), Some(&tags), &profile, Condition::Unconditional)
                .unwrap();
        assert!((atlas.total_probability() - 1.0).abs() < 1e-10);
        assert!(atlas.entries().iter().any(|e| e.bob.contains('-')));
        // P(both lost) = (1/2)^2, with Eve's records still drawn:
        let both_lost: f64 = atlas
            .entries()
            .iter()
            .filter(|e| e.bob == "--")
            .map(|e| e.probability)
            .sum();
        assert!((both_lost - 0.25).abs() < 1e-12);
    }

    #[test]
    fn enumeration_guard_rejects_large_runs() {
        let profile = AttackProfile::default_profile();
        let alice = BitSequence::new(vec![false; 17]);
        assert_eq!(
            enumerate_outcomes(&alice, None, &profile, Condition::AllArrived).unwrap_err(),
            SimError::EnumerationTooLarge { n: 17, max: 16 }
        );
    }

    #[test]
    fn honest_tags_match_with_certainty() {
        let profile = AttackProfile::default_profile();
        let tags = vec![AttackTag::NotAttacked; 4];
        let estimate = prob_exact_match(
            &bits("1001"),
            Some(&tags),
            &profile,
            Condition::AllArrived,
            Party::Bob,
            0,
            0,
        )
        .unwrap();
        assert_eq!(estimate, ProbEstimate::Exact(1.0));
    }

    #[test]
    fn small_runs_resolve_exact_match_probabilities_exactly() {
        // four unsymmetrized attacks: Bob matches '1001' with (3/4)^4
        let profile = AttackProfile::default_profile();
        let tags = parse_tag_string("uuuu").unwrap();
        let estimate = prob_exact_match(
            &bits("1001"),
            Some(&tags),
            &profile,
            Condition::AllArrived,
            Party::Bob,
            0,
            0,
        )
        .unwrap();
        match estimate {
            ProbEstimate::Exact(p) => assert!((p - 81.0 / 256.0).abs() < 1e-12),
            ProbEstimate::MonteCarlo { .. } => panic!("4 rounds should enumerate"),
        }
    }

    #[test]
    fn monte_carlo_estimate_agrees_with_the_closed_form() {
        // 20 rounds is beyond the enumeration guard; all-unsymmetrized
        // attacks on an all-ones message match with probability (3/4)^20.
        let profile = AttackProfile::default_profile();
        let alice = BitSequence::new(vec![true; 20]);
        let tags = vec![AttackTag::Unsymmetrized; 20];
        let estimate = prob_exact_match(
            &alice,
            Some(&tags),
            &profile,
            Condition::AllArrived,
            Party::Bob,
            200_000,
            99,
        )
        .unwrap();
        let expected = 0.75f64.powi(20);
        match estimate {
            ProbEstimate::MonteCarlo { estimate, half_width_95, samples } => {
                assert_eq!(samples, 200_000);
                assert!((estimate - expected).abs() < 1e-3);
                assert!(half_width_95 > 0.0 && half_width_95 < 1e-3);
            }
            ProbEstimate::Exact(_) => panic!("20 rounds should trigger Monte Carlo"),
        }
        assert_eq!(
            prob_exact_match(
                &alice,
                Some(&tags),
                &profile,
                Condition::AllArrived,
                Party::Bob,
                0,
                99
            )
            .unwrap_err(),
            SimError::ZeroSamples
        );
    }

    #[test]
    fn exact_match_probability_is_positive_for_positive_channels() {
        // every per-bit correct probability is positive under the default
        // profile, so exact matches always have positive probability
        let profile = AttackProfile::default_profile();
        for tag_string in ["uuuu", "ssss", "usns", "nnnn"] {
            let tags = parse_tag_string(tag_string).unwrap();
            for party in [Party::Bob, Party::Eve] {
                let p = prob_exact_match(
                    &bits("1001"),
                    Some(&tags),
                    &profile,
                    Condition::AllArrived,
                    party,
                    0,
                    0,
                )
                .unwrap();
                assert!(p.value() > 0.0, "{tag_string} {party:?}");
            }
        }
    }

    #[test]
    fn convergence_improves_with_run_length() {
        let profile = AttackProfile::default_profile();
        let rows = convergence_experiment(&[50, 800], 0.5, &profile, 40, 5).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(
            rows[1].mean_abs_dev < rows[0].mean_abs_dev,
            "deviation should shrink: {rows:?}"
        );
        assert_eq!(
            convergence_experiment(&[50], 0.5, &profile, 10, 5).unwrap_err(),
            SimError::TooFewTrials { trials: 10, min: MIN_TRIALS }
        );
    }

    #[test]
    fn honest_runs_converge_on_the_full_bit() {
        // at eta = 1 the target is one full bit; the only deviation left is
        // the entropy shortfall of Alice's empirical marginal, which decays
        // like 1/n
        let profile = AttackProfile::default_profile();
        let rows = convergence_experiment(&[200, 3_200], 1.0, &profile, 40, 8).unwrap();
        assert!(rows[1].mean_abs_dev < rows[0].mean_abs_dev, "{rows:?}");
        assert!(rows[0].mean_abs_dev < 0.02, "{rows:?}");
        assert!(rows[1].mean_abs_dev < 1e-3, "{rows:?}");
    }

    #[test]
    fn convergence_is_reproducible_and_worker_count_independent() {
        let profile = AttackProfile::default_profile();
        let run = || convergence_experiment(&[64, 128], 0.75, &profile, 32, 123).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run);
        let several = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(run);
        assert_eq!(single, several);
    }
}
