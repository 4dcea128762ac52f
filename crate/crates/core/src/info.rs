//! Discrete information measures over finite alphabets.
//!
//! Everything here is plug-in estimation on explicit tables: a
//! [`JointDistribution`] is a validated probability table, mutual information
//! is the direct sum over its cells (base-2 logs, 0·log 0 = 0), and the
//! empirical variants build the table from relative frequencies of paired
//! sequences. Error rates keep their exact integer counts: a QBER is the
//! rational k/n, never a rounded float, so a run can state "50 errors in 200
//! bits" without pretending fractional errors are observable.

use num_rational::Ratio;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Tolerance on the total mass of a probability table.
const MASS_TOLERANCE: f64 = 1e-12;

/// Errors from building or comparing information-theoretic objects.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InfoError {
    #[error("probability table has {cells} cells but {rows} rows x {cols} columns were labelled")]
    ShapeMismatch { rows: usize, cols: usize, cells: usize },
    #[error("probability table needs at least one row and one column")]
    EmptyTable,
    #[error("probability at ({row}, {col}) is {value}, outside [0, 1]")]
    InvalidProbability { row: String, col: String, value: f64 },
    #[error("probability table sums to {total}, not 1")]
    NotNormalized { total: f64 },
    #[error("sequences have different lengths: {xs} vs {ys}")]
    LengthMismatch { xs: usize, ys: usize },
    #[error("empty sequences carry no information")]
    EmptySequence,
    #[error("bit sequences contain only '0' and '1', found {found:?}")]
    BadBitChar { found: char },
    #[error("error counts need at least one compared position")]
    NothingCompared,
    #[error("{errors} errors cannot occur in {compared} compared positions")]
    TooManyErrors { errors: u64, compared: u64 },
}

/// Shannon binary entropy h(p) in bits; h(0) = h(1) = 0.
///
/// Panics if `p` lies outside [0, 1].
pub fn binary_entropy(p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "binary_entropy: p = {p} outside [0, 1]");
    if p == 0.0 || p == 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// A validated joint probability table over two finite labelled alphabets.
///
/// Stored row-major: `prob(r, c)` is the mass on (row symbol r, column
/// symbol c). Construction checks shape, cell ranges and total mass; the
/// measures defined on the table are then total functions.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    probs: Vec<f64>,
}

impl JointDistribution {
    /// Builds a table from row-major probabilities.
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        probs: Vec<f64>,
    ) -> Result<Self, InfoError> {
        if row_labels.is_empty() || col_labels.is_empty() {
            return Err(InfoError::EmptyTable);
        }
        if probs.len() != row_labels.len() * col_labels.len() {
            return Err(InfoError::ShapeMismatch {
                rows: row_labels.len(),
                cols: col_labels.len(),
                cells: probs.len(),
            });
        }
        for (i, &p) in probs.iter().enumerate() {
            if !(0.0..=1.0 + MASS_TOLERANCE).contains(&p) || p.is_nan() {
                return Err(InfoError::InvalidProbability {
                    row: row_labels[i / col_labels.len()].clone(),
                    col: col_labels[i % col_labels.len()].clone(),
                    value: p,
                });
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(InfoError::NotNormalized { total });
        }
        Ok(Self { row_labels, col_labels, probs })
    }

    /// Convenience constructor for the ubiquitous 2x2 bit-by-bit table,
    /// cells ordered (0,0), (0,1), (1,0), (1,1).
    pub fn over_bits(probs: [f64; 4]) -> Result<Self, InfoError> {
        Self::new(
            vec!["0".into(), "1".into()],
            vec!["0".into(), "1".into()],
            probs.to_vec(),
        )
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    /// Mass on (row r, column c).
    pub fn prob(&self, r: usize, c: usize) -> f64 {
        self.probs[r * self.col_labels.len() + c]
    }

    pub fn row_marginal(&self) -> Vec<f64> {
        (0..self.row_labels.len())
            .map(|r| (0..self.col_labels.len()).map(|c| self.prob(r, c)).sum())
            .collect()
    }

    pub fn col_marginal(&self) -> Vec<f64> {
        (0..self.col_labels.len())
            .map(|c| (0..self.row_labels.len()).map(|r| self.prob(r, c)).sum())
            .collect()
    }

    /// Plug-in mutual information I(row; col) in bits.
    ///
    /// Direct evaluation of sum p(x,y) log2(p(x,y) / (p(x) p(y))) with the
    /// 0·log 0 = 0 convention; clamped at 0 to absorb rounding on
    /// near-independent tables.
    pub fn mutual_information(&self) -> f64 {
        let rows = self.row_marginal();
        let cols = self.col_marginal();
        let mut bits = 0.0;
        for r in 0..rows.len() {
            for c in 0..cols.len() {
                let p = self.prob(r, c);
                if p > 0.0 {
                    bits += p * (p / (rows[r] * cols[c])).log2();
                }
            }
        }
        bits.max(0.0)
    }

    /// Shannon entropy of the row marginal, in bits.
    pub fn row_entropy(&self) -> f64 {
        entropy(&self.row_marginal())
    }

    /// Shannon entropy of the column marginal, in bits.
    pub fn col_entropy(&self) -> f64 {
        entropy(&self.col_marginal())
    }

    /// Renders the table as CSV with columns `row,col,prob`, one line per
    /// cell in row-major order, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,prob\n");
        for r in 0..self.row_labels.len() {
            for c in 0..self.col_labels.len() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    self.row_labels[r],
                    self.col_labels[c],
                    crate::fmt_sig6(self.prob(r, c)),
                ));
            }
        }
        out
    }
}

fn entropy(marginal: &[f64]) -> f64 {
    -marginal
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// A finite sequence of message bits, parseable from strings like "1001".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSequence(Vec<bool>);

impl BitSequence {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }
}

impl FromStr for BitSequence {
    type Err = InfoError;

    fn from_str(s: &str) -> Result<Self, InfoError> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                found => Err(InfoError::BadBitChar { found }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &bit in &self.0 {
            write!(f, "{}", if bit { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Relative-frequency 2x2 joint of two equal-length bit sequences.
pub fn empirical_joint(xs: &BitSequence, ys: &BitSequence) -> Result<JointDistribution, InfoError> {
    if xs.len() != ys.len() {
        return Err(InfoError::LengthMismatch { xs: xs.len(), ys: ys.len() });
    }
    if xs.is_empty() {
        return Err(InfoError::EmptySequence);
    }
    let mut counts = [0u64; 4];
    for (&x, &y) in xs.bits().iter().zip(ys.bits()) {
        counts[usize::from(x) * 2 + usize::from(y)] += 1;
    }
    let n = xs.len() as f64;
    JointDistribution::over_bits([
        counts[0] as f64 / n,
        counts[1] as f64 / n,
        counts[2] as f64 / n,
        counts[3] as f64 / n,
    ])
}

/// Plug-in mutual information of two bit sequences, in bits per symbol.
pub fn empirical_mi(xs: &BitSequence, ys: &BitSequence) -> Result<f64, InfoError> {
    Ok(empirical_joint(xs, ys)?.mutual_information())
}

/// An exact error tally: k disagreements among n compared positions.
///
/// The rate k/n stays rational; only presentation converts to floating
/// point. This is what makes statements like "a quarter of 201 bits" visibly
/// unachievable: 201/4 is not an integer, so no run can realize it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErrorCount {
    errors: u64,
    compared: u64,
}

impl ErrorCount {
    /// `compared` must be positive and at least `errors`.
    pub fn new(errors: u64, compared: u64) -> Result<Self, InfoError> {
        if compared == 0 {
            return Err(InfoError::NothingCompared);
        }
        if errors > compared {
            return Err(InfoError::TooManyErrors { errors, compared });
        }
        Ok(Self { errors, compared })
    }

    pub fn errors(&self) -> u64 {
        self.errors
    }

    pub fn compared(&self) -> u64 {
        self.compared
    }

    /// The exact rate k/n in lowest terms.
    pub fn qber(&self) -> Ratio<u64> {
        Ratio::new(self.errors, self.compared)
    }

    /// Floating-point view of the rate, for presentation only.
    pub fn qber_f64(&self) -> f64 {
        self.errors as f64 / self.compared as f64
    }
}

impl fmt::Display for ErrorCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.errors, self.compared)
    }
}

/// Counts disagreements between two equal-length, non-empty bit sequences.
pub fn qber(xs: &BitSequence, ys: &BitSequence) -> Result<ErrorCount, InfoError> {
    if xs.len() != ys.len() {
        return Err(InfoError::LengthMismatch { xs: xs.len(), ys: ys.len() });
    }
    if xs.is_empty() {
        return Err(InfoError::EmptySequence);
    }
    let errors = xs
        .bits()
        .iter()
        .zip(ys.bits())
        .filter(|(x, y)| x != y)
        .count() as u64;
    ErrorCount::new(errors, xs.len() as u64)
}

/// The expectation rate·n together with whether any run can attain it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedErrors {
    /// Expected number of errors, rate·n. An expectation, not a count.
    pub expected: f64,
    /// True iff rate·n is an integer (within 1e-9), i.e. some run could
    /// realize the expectation exactly.
    pub achievable: bool,
}

/// Expected error count for an error rate over `n` compared bits.
///
/// Panics if `rate` lies outside [0, 1].
pub fn expected_errors(rate: f64, n: u64) -> ExpectedErrors {
    assert!((0.0..=1.0).contains(&rate), "expected_errors: rate = {rate} outside [0, 1]");
    let expected = rate * n as f64;
    ExpectedErrors {
        expected,
        achievable: (expected - expected.round()).abs() < 1e-9,
    }
}
