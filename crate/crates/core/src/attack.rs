//! Eve's loss-mimicking attack, abstracted to a per-round classical channel.
//!
//! The attack exploits that legitimate parties tolerate a known transmission
//! efficiency `eta`: every lost travel qubit is blamed on the channel. Eve
//! attacks a fraction `f` of rounds with an operation that destroys the
//! travel qubit with probability `p_loss_attacked` (1/2 for the canonical
//! attack); choosing `f = min(1, (1-eta)/p_loss_attacked)` makes the overall
//! arrival rate come out at exactly `eta`, so loss statistics reveal nothing.
//! At and below the forking point `eta = 1 - p_loss_attacked` the budget
//! saturates and she attacks every round.
//!
//! What the attack does to the data is captured by an [`AttackProfile`]: for
//! each of Alice's bits `a`, a joint conditional distribution over (Bob's
//! decoded bit `b`, Eve's record `e`) given that the round arrived. Two
//! conditionals are carried, one per attack mode — the plain mode `u` and the
//! symmetrized mode `s` that randomizes which leg of the round is measured —
//! and a valid profile gives Bob the same error rate under either mode, since
//! otherwise the QBER would betray the mode mix. Eve measures before the loss
//! happens, so she keeps a record even for rounds Bob never receives.
//!
//! The default profile is the canonical attack reduced to classical form:
//! Bob sees a binary symmetric channel with error rate 1/4; Eve learns `a`
//! outright with probability 1/2 and otherwise records 0; both modes look
//! identical; losses strike half the attacked rounds.

use crate::info::JointDistribution;
use rand::Rng;
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// Tolerance on each conditional distribution's total mass.
const COND_MASS_TOLERANCE: f64 = 1e-12;

/// Tolerance on the u-vs-s Bob error rate agreement (the QBER-preservation
/// constraint).
const QBER_PRESERVATION_TOLERANCE: f64 = 1e-9;

/// How a round was treated on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttackTag {
    /// Eve passed the round through her lossless substitute line.
    NotAttacked,
    /// Attacked in the plain (unsymmetrized) mode.
    Unsymmetrized,
    /// Attacked in the symmetrized mode.
    Symmetrized,
}

impl AttackTag {
    /// One-letter form used in tag strings: 'n', 'u' or 's'.
    pub fn as_char(self) -> char {
        match self {
            AttackTag::NotAttacked => 'n',
            AttackTag::Unsymmetrized => 'u',
            AttackTag::Symmetrized => 's',
        }
    }

    /// Inverse of [`AttackTag::as_char`].
    pub fn from_char(ch: char) -> Option<Self> {
        match ch {
            'n' => Some(AttackTag::NotAttacked),
            'u' => Some(AttackTag::Unsymmetrized),
            's' => Some(AttackTag::Symmetrized),
            _ => None,
        }
    }

    pub fn is_attacked(self) -> bool {
        !matches!(self, AttackTag::NotAttacked)
    }
}

/// Whose symbols a distribution or curve refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Bob,
    Eve,
}

/// Normalization of asymptotic distributions and information curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Conditioned on the round arriving at Bob.
    PerArrived,
    /// Per sent round; the non-arriving (or, for Eve, non-attacked) mass is
    /// kept in an explicit "none" column.
    PerSent,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::PerArrived => "per-arrived",
            Normalization::PerSent => "per-sent",
        })
    }
}

/// Errors from building, parsing or validating attack profiles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("{name} = {value} must lie in [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("joint_{mode}[a={a}] cell (b={b}, e={e}) = {value} must lie in [0, 1]")]
    CellOutOfRange { mode: char, a: u8, b: u8, e: u8, value: f64 },
    #[error("joint_{mode}[a={a}] sums to {total}, not 1")]
    ConditionalNotNormalized { mode: char, a: u8, total: f64 },
    #[error(
        "Bob's error rate differs between modes ({qber_u} under u, {qber_s} under s); \
         the mode mix would be visible in the QBER"
    )]
    QberNotPreserved { qber_u: f64, qber_s: f64 },
    #[error("profile line {line} is not a key=value pair: {text:?}")]
    BadLine { line: usize, text: String },
    #[error("unknown profile key {key:?}")]
    UnknownKey { key: String },
    #[error("duplicate profile key {key:?}")]
    DuplicateKey { key: String },
    #[error("profile key {key:?} has unparseable value {text:?}")]
    BadValue { key: String, text: String },
    #[error("profile is missing key {key:?}")]
    MissingKey { key: String },
    #[error("cannot read profile file: {0}")]
    Unreadable(String),
}

/// Conditional joints for one attack mode, indexed `[a][b][e]`.
type ModeJoint = [[[f64; 2]; 2]; 2];

/// The classical shadow of Eve's attack: per-mode conditional distributions
/// P(b, e | a, round arrived), the induced loss rate on attacked rounds, and
/// how often the symmetrized mode is used.
///
/// Invariants enforced at construction: all probabilities lie in [0, 1],
/// every conditional sums to 1 (within 1e-12), and Bob's error rate agrees
/// between the two modes within 1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackProfile {
    p_loss_attacked: f64,
    p_symmetrize: f64,
    joint_u: ModeJoint,
    joint_s: ModeJoint,
}

impl AttackProfile {
    pub fn new(
        p_loss_attacked: f64,
        p_symmetrize: f64,
        joint_u: ModeJoint,
        joint_s: ModeJoint,
    ) -> Result<Self, ProfileError> {
        let profile = Self { p_loss_attacked, p_symmetrize, joint_u, joint_s };
        profile.validate()?;
        Ok(profile)
    }

    /// The canonical attack in classical form: loss 1/2 on attacked rounds,
    /// both modes giving Bob a binary symmetric channel with error rate 1/4
    /// and Eve a one-sided readout (probability 1/2 of learning the bit
    /// exactly, otherwise a fixed 0 record), modes mixed evenly.
    pub fn default_profile() -> Self {
        Self::one_sided(0.5, 0.5, 0.25, 0.5).expect("canonical parameters are valid")
    }

    /// Like [`AttackProfile::default_profile`] but with an Eve who reads
    /// every attacked bit perfectly. Used to contrast threshold counting
    /// rules.
    pub fn perfect_eve_profile() -> Self {
        Self::one_sided(0.5, 0.5, 0.25, 1.0).expect("canonical parameters are valid")
    }

    /// Product-form profile: Bob sees BSC(`bob_error`) in both modes, Eve a
    /// one-sided channel that resolves the bit with probability
    /// `eve_conclusive` and records 0 otherwise, independent of Bob given
    /// Alice's bit.
    pub fn one_sided(
        p_loss_attacked: f64,
        p_symmetrize: f64,
        bob_error: f64,
        eve_conclusive: f64,
    ) -> Result<Self, ProfileError> {
        let mut joint = [[[0.0; 2]; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                let p_b = if a == b { 1.0 - bob_error } else { bob_error };
                for e in 0..2 {
                    // conclusive: e = a; inconclusive: e = 0
                    let p_e = if e == a {
                        if a == 0 { 1.0 } else { eve_conclusive }
                    } else if e == 0 {
                        1.0 - eve_conclusive
                    } else {
                        0.0
                    };
                    joint[a][b][e] = p_b * p_e;
                }
            }
        }
        Self::new(p_loss_attacked, p_symmetrize, joint, joint)
    }

    /// The same attack with Eve's readout replaced by a perfect one
    /// (`e = a` on every attacked round). Bob's conditionals are untouched,
    /// so the QBER-preservation invariant carries over.
    pub fn perfect_eve_variant(&self) -> Self {
        let mut variant = self.clone();
        for joint in [&mut variant.joint_u, &mut variant.joint_s] {
            for a in 0..2 {
                for b in 0..2 {
                    let bob_mass: f64 = joint[a][b].iter().sum();
                    joint[a][b] = [0.0; 2];
                    joint[a][b][a] = bob_mass;
                }
            }
        }
        variant
    }

    fn validate(&self) -> Result<(), ProfileError> {
        for (name, value) in [
            ("p_loss_attacked", self.p_loss_attacked),
            ("p_symmetrize", self.p_symmetrize),
        ] {
            if !(0.0..=1.0).contains(&value) || value.is_nan() {
                return Err(ProfileError::ParameterOutOfRange { name, value });
            }
        }
        for (mode, joint) in [('u', &self.joint_u), ('s', &self.joint_s)] {
            for a in 0..2 {
                for b in 0..2 {
                    for e in 0..2 {
                        let value = joint[a][b][e];
                        if !(0.0..=1.0).contains(&value) || value.is_nan() {
                            return Err(ProfileError::CellOutOfRange {
                                mode,
                                a: a as u8,
                                b: b as u8,
                                e: e as u8,
                                value,
                            });
                        }
                    }
                }
                let total: f64 = joint[a].iter().flatten().sum();
                if (total - 1.0).abs() > COND_MASS_TOLERANCE {
                    return Err(ProfileError::ConditionalNotNormalized {
                        mode,
                        a: a as u8,
                        total,
                    });
                }
            }
        }
        let qber_u = bob_error_rate(&self.joint_u);
        let qber_s = bob_error_rate(&self.joint_s);
        if (qber_u - qber_s).abs() > QBER_PRESERVATION_TOLERANCE {
            return Err(ProfileError::QberNotPreserved { qber_u, qber_s });
        }
        Ok(())
    }

    pub fn p_loss_attacked(&self) -> f64 {
        self.p_loss_attacked
    }

    pub fn p_symmetrize(&self) -> f64 {
        self.p_symmetrize
    }

    /// The conditional joint for an attacked round of the given mode.
    /// `NotAttacked` has no joint; callers handle it before reaching here.
    pub fn joint(&self, tag: AttackTag) -> &ModeJoint {
        match tag {
            AttackTag::Unsymmetrized => &self.joint_u,
            AttackTag::Symmetrized => &self.joint_s,
            AttackTag::NotAttacked => panic!("unattacked rounds have no attack joint"),
        }
    }

    /// P(b, e | a) averaged over the mode mix.
    fn mixed_cell(&self, a: usize, b: usize, e: usize) -> f64 {
        (1.0 - self.p_symmetrize) * self.joint_u[a][b][e]
            + self.p_symmetrize * self.joint_s[a][b][e]
    }

    /// Eve's marginal P(e | a) for one mode — her record exists even when
    /// the round is lost, so this is what lost rounds are drawn from.
    pub fn eve_marginal(&self, tag: AttackTag, a: bool) -> [f64; 2] {
        let joint = &self.joint(tag)[usize::from(a)];
        [joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]]
    }

    /// Attack fraction needed to hide this profile's loss inside `eta`.
    pub fn attack_fraction(&self, eta: f64) -> f64 {
        attack_fraction(eta, self.p_loss_attacked)
    }

    /// Bob's per-attacked-round error probability (uniform Alice marginal,
    /// modes mixed).
    pub fn bob_error_attacked(&self) -> f64 {
        0.5 * (self.mixed_cell(0, 1, 0) + self.mixed_cell(0, 1, 1))
            + 0.5 * (self.mixed_cell(1, 0, 0) + self.mixed_cell(1, 0, 1))
    }

    /// Probability that Eve's record equals Alice's bit on an attacked round
    /// (uniform Alice marginal, modes mixed).
    pub fn eve_correct_attacked(&self) -> f64 {
        0.5 * (self.mixed_cell(0, 0, 0) + self.mixed_cell(0, 1, 0))
            + 0.5 * (self.mixed_cell(1, 0, 1) + self.mixed_cell(1, 1, 1))
    }

    /// P(a, b) on attacked, arrived rounds with a uniform Alice marginal.
    pub fn attacked_bob_joint(&self) -> JointDistribution {
        let cell = |a: usize, b: usize| 0.5 * (self.mixed_cell(a, b, 0) + self.mixed_cell(a, b, 1));
        JointDistribution::over_bits([cell(0, 0), cell(0, 1), cell(1, 0), cell(1, 1)])
            .expect("validated conditionals mix to a valid joint")
    }

    /// P(a, e) on attacked rounds with a uniform Alice marginal. Identical
    /// whether or not the round arrived: Eve measures first.
    pub fn attacked_eve_joint(&self) -> JointDistribution {
        let cell = |a: usize, e: usize| 0.5 * (self.mixed_cell(a, 0, e) + self.mixed_cell(a, 1, e));
        JointDistribution::over_bits([cell(0, 0), cell(0, 1), cell(1, 0), cell(1, 1)])
            .expect("validated conditionals mix to a valid joint")
    }

    /// Canonical key=value rendering (the same flat format [`parse_str`]
    /// accepts), keys in a fixed order, shortest round-tripping floats.
    ///
    /// [`parse_str`]: AttackProfile::parse_str
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("p_loss_attacked={}\n", self.p_loss_attacked));
        out.push_str(&format!("p_symmetrize={}\n", self.p_symmetrize));
        for (prefix, joint) in [("ju", &self.joint_u), ("js", &self.joint_s)] {
            for a in 0..2 {
                for b in 0..2 {
                    for e in 0..2 {
                        out.push_str(&format!("{prefix}_a{a}_b{b}_e{e}={}\n", joint[a][b][e]));
                    }
                }
            }
        }
        out
    }

    /// Short fingerprint of the profile parameters (FNV-1a over the
    /// canonical key=value form), for labelling reports.
    pub fn digest(&self) -> String {
        format!("{:016x}", fnv1a64(self.to_key_values().as_bytes()))
    }

    /// Parses the flat key=value profile format.
    ///
    /// Lines are `key=value`; blank lines and lines starting with `#` are
    /// skipped. Required keys: `p_loss_attacked`, `p_symmetrize`, and the
    /// eight cells of each mode as `ju_a{0|1}_b{0|1}_e{0|1}` /
    /// `js_a{0|1}_b{0|1}_e{0|1}`. The first violated constraint is reported.
    pub fn parse_str(text: &str) -> Result<Self, ProfileError> {
        let mut p_loss_attacked: Option<f64> = None;
        let mut p_symmetrize: Option<f64> = None;
        let mut joint_u: [[[Option<f64>; 2]; 2]; 2] = [[[None; 2]; 2]; 2];
        let mut joint_s = joint_u;

        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value_text) = line.split_once('=').ok_or(ProfileError::BadLine {
                line: idx + 1,
                text: raw.to_string(),
            })?;
            let key = key.trim();
            let value: f64 = value_text.trim().parse().map_err(|_| ProfileError::BadValue {
                key: key.to_string(),
                text: value_text.trim().to_string(),
            })?;
            let slot = match key {
                "p_loss_attacked" => &mut p_loss_attacked,
                "p_symmetrize" => &mut p_symmetrize,
                _ => match parse_cell_key(key) {
                    Some((mode, a, b, e)) => {
                        let joint = if mode == 'u' { &mut joint_u } else { &mut joint_s };
                        &mut joint[a][b][e]
                    }
                    None => return Err(ProfileError::UnknownKey { key: key.to_string() }),
                },
            };
            if slot.is_some() {
                return Err(ProfileError::DuplicateKey { key: key.to_string() });
            }
            *slot = Some(value);
        }

        let require = |value: Option<f64>, key: String| {
            value.ok_or(ProfileError::MissingKey { key })
        };
        let mut cells_u = [[[0.0; 2]; 2]; 2];
        let mut cells_s = [[[0.0; 2]; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                for e in 0..2 {
                    cells_u[a][b][e] = require(joint_u[a][b][e], format!("ju_a{a}_b{b}_e{e}"))?;
                    cells_s[a][b][e] = require(joint_s[a][b][e], format!("js_a{a}_b{b}_e{e}"))?;
                }
            }
        }
        Self::new(
            require(p_loss_attacked, "p_loss_attacked".into())?,
            require(p_symmetrize, "p_symmetrize".into())?,
            cells_u,
            cells_s,
        )
    }

    /// Reads and parses a profile file in the key=value format.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ProfileError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| ProfileError::Unreadable(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse_str(&text)
    }
}

impl Default for AttackProfile {
    fn default() -> Self {
        Self::default_profile()
    }
}

fn parse_cell_key(key: &str) -> Option<(char, usize, usize, usize)> {
    let rest = key.strip_prefix('j')?;
    let mode = rest.chars().next().filter(|c| *c == 'u' || *c == 's')?;
    let rest = &rest[1..];
    let bytes = rest.as_bytes();
    // expect "_aX_bY_eZ" with X, Y, Z in {0, 1}
    if bytes.len() != 9 || &bytes[0..2] != b"_a" || &bytes[3..5] != b"_b" || &bytes[6..8] != b"_e" {
        return None;
    }
    let digit = |byte: u8| match byte {
        b'0' => Some(0usize),
        b'1' => Some(1usize),
        _ => None,
    };
    Some((mode, digit(bytes[2])?, digit(bytes[5])?, digit(bytes[8])?))
}

fn bob_error_rate(joint: &ModeJoint) -> f64 {
    0.5 * (joint[0][1][0] + joint[0][1][1]) + 0.5 * (joint[1][0][0] + joint[1][0][1])
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &byte in bytes {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Fraction of rounds Eve must attack so the arrival rate lands on `eta`:
/// `f = min(1, (1 - eta) / p_loss_attacked)`.
///
/// At `eta = 1` there is no loss budget and `f = 0`, even for a lossless
/// attack. Below the forking point `eta = 1 - p_loss_attacked` the fraction
/// saturates at 1. Panics if either argument lies outside [0, 1].
pub fn attack_fraction(eta: f64, p_loss_attacked: f64) -> f64 {
    assert!((0.0..=1.0).contains(&eta), "attack_fraction: eta = {eta} outside [0, 1]");
    assert!(
        (0.0..=1.0).contains(&p_loss_attacked),
        "attack_fraction: p_loss_attacked = {p_loss_attacked} outside [0, 1]"
    );
    if eta >= 1.0 {
        return 0.0;
    }
    if p_loss_attacked == 0.0 {
        return 1.0;
    }
    ((1.0 - eta) / p_loss_attacked).min(1.0)
}

/// Everything observable about one protocol round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundRecord {
    /// Alice's message bit.
    pub alice_bit: bool,
    /// How Eve treated the round.
    pub tag: AttackTag,
    /// Whether the travel qubit reached Bob.
    pub arrived: bool,
    /// Bob's decoded bit; present exactly when the round arrived.
    pub bob_bit: Option<bool>,
    /// Eve's record; present exactly when the round was attacked — she
    /// measures before the loss happens, so lost rounds still carry one.
    pub eve_bit: Option<bool>,
}

/// Samples a single round through Eve's channel.
///
/// Unattacked rounds travel Eve's substitute line: they always arrive and
/// Bob decodes them error-free. Attacked rounds arrive with probability
/// `1 - p_loss_attacked`; arrived ones draw (b, e) from the mode's joint
/// conditional, lost ones draw Eve's record from her marginal. Draw order is
/// fixed (arrival gate, then one outcome draw), so a given RNG stream always
/// reproduces the same record.
pub fn sample_round(
    alice_bit: bool,
    tag: AttackTag,
    profile: &AttackProfile,
    rng: &mut impl Rng,
) -> RoundRecord {
    if tag == AttackTag::NotAttacked {
        return RoundRecord {
            alice_bit,
            tag,
            arrived: true,
            bob_bit: Some(alice_bit),
            eve_bit: None,
        };
    }
    let arrived = rng.random_bool(1.0 - profile.p_loss_attacked());
    let a = usize::from(alice_bit);
    if arrived {
        let joint = &profile.joint(tag)[a];
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for b in 0..2 {
            for e in 0..2 {
                acc += joint[b][e];
                if u < acc {
                    return RoundRecord {
                        alice_bit,
                        tag,
                        arrived: true,
                        bob_bit: Some(b == 1),
                        eve_bit: Some(e == 1),
                    };
                }
            }
        }
        // Accumulated rounding can leave u just above the final boundary.
        RoundRecord { alice_bit, tag, arrived: true, bob_bit: Some(true), eve_bit: Some(true) }
    } else {
        let marginal = profile.eve_marginal(tag, alice_bit);
        let u: f64 = rng.random();
        RoundRecord {
            alice_bit,
            tag,
            arrived: false,
            bob_bit: None,
            eve_bit: Some(u >= marginal[0]),
        }
    }
}

/// Single-use asymptotic joint distribution of (Alice's bit, a party's
/// symbol) at transmission efficiency `eta`, uniform Alice marginal.
///
/// Per-arrived tables condition on the round arriving: the unattacked and
/// attacked populations enter with their arrival-conditioned weights
/// `(1-f)/eta` and `1 - (1-f)/eta`. Mimicry is taken at face value — the
/// arrival rate is `eta` even below the forking point, where Eve's extra
/// blocking is assumed independent of outcomes (at `eta = 0` the table is
/// the degenerate all-attacked limit). This is the law that a run's
/// empirical per-arrived statistics converge to.
///
/// Per-sent tables keep the missing mass in an explicit "none" column:
/// Bob's informative cells are the per-arrived ones scaled by `eta`; Eve
/// holds a record for every attacked round including lost ones, so her
/// informative mass is the full attack fraction `f` and "none" is the
/// unattacked remainder.
pub fn spd_joint(
    profile: &AttackProfile,
    eta: f64,
    party: Party,
    normalization: Normalization,
) -> JointDistribution {
    assert!((0.0..=1.0).contains(&eta), "spd_joint: eta = {eta} outside [0, 1]");
    let f = profile.attack_fraction(eta);
    let w_honest = if eta == 0.0 { 0.0 } else { (1.0 - f) / eta };
    let w_attacked = 1.0 - w_honest;

    let bits = vec!["0".to_string(), "1".to_string()];
    let with_none = vec!["0".to_string(), "1".to_string(), "none".to_string()];

    match (party, normalization) {
        (Party::Bob, Normalization::PerArrived) => {
            let att = profile.attacked_bob_joint();
            let cell = |a: usize, b: usize| {
                let honest = if a == b { 0.5 } else { 0.0 };
                w_honest * honest + w_attacked * att.prob(a, b)
            };
            JointDistribution::over_bits([cell(0, 0), cell(0, 1), cell(1, 0), cell(1, 1)])
                .expect("mixture of valid joints is valid")
        }
        (Party::Bob, Normalization::PerSent) => {
            let arrived = spd_joint(profile, eta, Party::Bob, Normalization::PerArrived);
            let mut cells = Vec::with_capacity(6);
            for a in 0..2 {
                cells.push(eta * arrived.prob(a, 0));
                cells.push(eta * arrived.prob(a, 1));
                cells.push((1.0 - eta) * 0.5);
            }
            JointDistribution::new(bits, with_none, cells)
                .expect("arrival-scaled cells keep unit mass")
        }
        (Party::Eve, Normalization::PerArrived) => {
            let att = profile.attacked_eve_joint();
            let mut cells = Vec::with_capacity(6);
            for a in 0..2 {
                cells.push(w_attacked * att.prob(a, 0));
                cells.push(w_attacked * att.prob(a, 1));
                cells.push(w_honest * 0.5);
            }
            JointDistribution::new(bits, with_none, cells)
                .expect("mixture of valid joints is valid")
        }
        (Party::Eve, Normalization::PerSent) => {
            let att = profile.attacked_eve_joint();
            let mut cells = Vec::with_capacity(6);
            for a in 0..2 {
                cells.push(f * att.prob(a, 0));
                cells.push(f * att.prob(a, 1));
                cells.push((1.0 - f) * 0.5);
            }
            JointDistribution::new(bits, with_none, cells)
                .expect("mixture of valid joints is valid")
        }
    }
}
