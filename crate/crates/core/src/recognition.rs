//! Scoring a candidate against learnt weight matrices and picking a label.
//!
//! For a weight matrix `W` and a binary candidate `I`:
//!
//! - candidate score `psi = sum W(i,j) * I(i,j)`, the weight mass under the
//!   candidate's black cells;
//! - ideal score `mu = sum of the positive entries of W`, the best `psi` any
//!   candidate could reach;
//! - recognition quotient `Q = psi / mu`, never above 1.
//!
//! Recognition feeds the binary grid directly; white candidate cells add
//! nothing. All comparisons use exact rationals.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::grid::BinaryGrid;
use crate::knowledge::{KnowledgeBase, Label, WeightMatrix};

/// Exact rational `num / den` in lowest terms with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Quotient {
    num: i64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Quotient {
    pub const ONE: Quotient = Quotient { num: 1, den: 1 };
    pub const HALF: Quotient = Quotient { num: 1, den: 2 };

    /// `None` when `den == 0`.
    pub fn new(num: i64, den: u64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let g = gcd(num.unsigned_abs(), den);
        let den = den / g;
        let num = num / g as i64;
        Some(Quotient { num, den })
    }

    pub fn numer(&self) -> i64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Decimal rendering with `digits` fractional digits, rounding half away
    /// from zero.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = 10u128.pow(digits);
        let den = u128::from(self.den);
        let mag = u128::from(self.num.unsigned_abs()) * scale;
        let rounded = (2 * mag + den) / (2 * den);
        let sign = if self.num < 0 && rounded != 0 {
            "-"
        } else {
            ""
        };
        let int = rounded / scale;
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            let frac = rounded % scale;
            format!("{sign}{int}.{frac:0width$}", width = digits as usize)
        }
    }

    /// Parses `a/b`, an integer, or a finite decimal such as `0.5`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            return Quotient::new(n.trim().parse().ok()?, d.trim().parse().ok()?);
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() {
            return None;
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 18 {
            return None;
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
        let frac: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().ok()?
        };
        let num = int.checked_mul(den as i64)?.checked_add(frac)?;
        Quotient::new(if neg { -num } else { num }, den)
    }
}

impl Ord for Quotient {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = i128::from(self.num) * i128::from(other.den);
        let rhs = i128::from(other.num) * i128::from(self.den);
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for Quotient {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Quotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn check_dims(w: &WeightMatrix, input: &BinaryGrid) -> Result<()> {
    if w.dims() != input.dims() {
        return Err(Error::DimsMismatch {
            expected: w.dims(),
            found: input.dims(),
        });
    }
    Ok(())
}

/// Candidate score: sum of the weights under the input's black cells.
pub fn candidate_score(w: &WeightMatrix, input: &BinaryGrid) -> Result<i64> {
    check_dims(w, input)?;
    Ok(w.weights()
        .iter()
        .zip(input.cells())
        .filter(|(_, &black)| black)
        .map(|(&wt, _)| i64::from(wt))
        .sum())
}

/// Ideal score: sum of the strictly positive weights.
pub fn ideal_score(w: &WeightMatrix) -> u64 {
    w.weights()
        .iter()
        .filter(|&&wt| wt > 0)
        .map(|&wt| wt as u64)
        .sum()
}

/// `psi / mu`. Fails with `UndefinedQuotient` when `mu == 0`.
pub fn recognition_quotient(w: &WeightMatrix, input: &BinaryGrid) -> Result<Quotient> {
    let psi = candidate_score(w, input)?;
    Quotient::new(psi, ideal_score(w)).ok_or_else(|| Error::UndefinedQuotient(String::new()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelScore {
    pub label: Label,
    pub psi: i64,
    pub mu: u64,
    pub q: Quotient,
}

impl LabelScore {
    pub fn q_display(&self) -> String {
        self.q.to_decimal(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DecisionKind {
    Match,
    Unknown,
    EmptyKb,
}

impl fmt::Display for DecisionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecisionKind::Match => "Match",
            DecisionKind::Unknown => "Unknown",
            DecisionKind::EmptyKb => "EmptyKb",
        })
    }
}

/// Selector output. `scores` is sorted by descending `q`, ties by label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub kind: DecisionKind,
    pub threshold: Quotient,
    pub scores: Vec<LabelScore>,
    /// Labels skipped because their matrix has no positive weight.
    pub unscorable: Vec<Label>,
}

impl Decision {
    pub fn best(&self) -> Option<&LabelScore> {
        self.scores.first()
    }
}

/// Scores `input` against every label and selects the highest quotient.
///
/// Labels with `mu == 0` are left out of the ranking and listed in
/// `unscorable`. Equal quotients are ordered by label. The result is a
/// `Match` when the best quotient is at least `threshold`.
pub fn classify(kb: &KnowledgeBase, input: &BinaryGrid, threshold: Quotient) -> Result<Decision> {
    kb.check_dims(input.dims())?;
    let mut scores = Vec::with_capacity(kb.len());
    let mut unscorable = Vec::new();
    for (label, w) in kb.entries() {
        let psi = candidate_score(w, input)?;
        let mu = ideal_score(w);
        match Quotient::new(psi, mu) {
            Some(q) => scores.push(LabelScore {
                label: label.clone(),
                psi,
                mu,
                q,
            }),
            None => unscorable.push(label.clone()),
        }
    }
    scores.sort_by(|a, b| b.q.cmp(&a.q).then_with(|| a.label.cmp(&b.label)));
    let kind = match scores.first() {
        None => DecisionKind::EmptyKb,
        Some(best) if best.q >= threshold => DecisionKind::Match,
        Some(_) => DecisionKind::Unknown,
    };
    Ok(Decision {
        kind,
        threshold,
        scores,
        unscorable,
    })
}
