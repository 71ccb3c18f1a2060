//! Labeled weight matrices and the additive teaching rule.
//!
//! Every label owns one integer [`WeightMatrix`], zero until first taught.
//! Teaching a pattern adds its bipolar form (+1 for black, -1 for white) to
//! the matrix, so after `n` teachings each weight equals `2*B - n`, where `B`
//! counts the taught patterns that were black at that cell.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{BinaryGrid, GridDims};

pub const MAX_LABEL_LEN: usize = 64;
pub const MAX_TEACH_COUNT: u32 = i32::MAX as u32;

/// Case-sensitive character name: 1 to 64 chars, no whitespace or controls.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        let reason = if name.is_empty() {
            Some("label is empty")
        } else if name.chars().count() > MAX_LABEL_LEN {
            Some("label is longer than 64 characters")
        } else if name.chars().any(char::is_whitespace) {
            Some("label contains whitespace")
        } else if name.chars().any(char::is_control) {
            Some("label contains a control character")
        } else {
            None
        };
        match reason {
            Some(reason) => Err(Error::InvalidLabel {
                label: name,
                reason,
            }),
            None => Ok(Label(name)),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Label {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Label::new(s)
    }
}

impl From<Label> for String {
    fn from(l: Label) -> String {
        l.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Accumulated weights for one label.
///
/// Invariants: `|w| <= teach_count` and `w ≡ teach_count (mod 2)` for every
/// weight.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightMatrix {
    dims: GridDims,
    weights: Vec<i32>,
    teach_count: u32,
}

impl WeightMatrix {
    pub fn zeros(dims: GridDims) -> Self {
        WeightMatrix {
            dims,
            weights: vec![0; dims.cell_count()],
            teach_count: 0,
        }
    }

    /// Rebuilds a matrix from stored parts, checking the range and parity laws.
    pub fn from_parts(dims: GridDims, weights: Vec<i32>, teach_count: u32) -> Result<Self> {
        let violation = |reason: String| Error::InvariantViolation {
            label: String::new(),
            reason,
        };
        if weights.len() != dims.cell_count() {
            return Err(violation(format!(
                "{} weights supplied for a {dims} grid",
                weights.len()
            )));
        }
        if teach_count > MAX_TEACH_COUNT {
            return Err(violation(format!(
                "teach count {teach_count} exceeds {MAX_TEACH_COUNT}"
            )));
        }
        let n = i64::from(teach_count);
        for (i, &w) in weights.iter().enumerate() {
            let (row, col) = (i / dims.width() + 1, i % dims.width() + 1);
            let w = i64::from(w);
            if w.abs() > n {
                return Err(violation(format!(
                    "weight {w} at row {row}, column {col} exceeds teach count {n} in magnitude"
                )));
            }
            if (w - n).rem_euclid(2) != 0 {
                return Err(violation(format!(
                    "weight {w} at row {row}, column {col} has the wrong parity for teach count {n}"
                )));
            }
        }
        Ok(WeightMatrix {
            dims,
            weights,
            teach_count,
        })
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn weights(&self) -> &[i32] {
        &self.weights
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i32]> {
        self.weights.chunks(self.dims.width())
    }

    pub fn teach_count(&self) -> u32 {
        self.teach_count
    }

    pub fn get(&self, col: usize, row: usize) -> i32 {
        self.weights[row * self.dims.width() + col]
    }

    pub fn max_abs(&self) -> u32 {
        self.weights
            .iter()
            .map(|w| w.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    fn absorb(&mut self, pattern: &BinaryGrid) {
        let bipolar = pattern.to_bipolar();
        for (w, &m) in self.weights.iter_mut().zip(bipolar.cells()) {
            *w += i32::from(m);
        }
        self.teach_count += 1;
    }
}

/// All labels known to one profile, sharing one grid size.
///
/// Entries iterate in lexicographic label order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    dims: GridDims,
    entries: BTreeMap<Label, WeightMatrix>,
}

impl KnowledgeBase {
    pub fn new(dims: GridDims) -> Self {
        KnowledgeBase {
            dims,
            entries: BTreeMap::new(),
        }
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.entries.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Label, &WeightMatrix)> {
        self.entries.iter()
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.entries.contains_key(label)
    }

    /// Adds the bipolar form of `pattern` to the label's matrix, creating a
    /// zero matrix first if the label is new.
    pub fn teach(&mut self, label: &Label, pattern: &BinaryGrid) -> Result<&WeightMatrix> {
        self.check_dims(pattern.dims())?;
        if self
            .entries
            .get(label)
            .is_some_and(|w| w.teach_count >= MAX_TEACH_COUNT)
        {
            return Err(Error::TeachLimit(label.to_string()));
        }
        let dims = self.dims;
        let entry = self
            .entries
            .entry(label.clone())
            .or_insert_with(|| WeightMatrix::zeros(dims));
        entry.absorb(pattern);
        Ok(entry)
    }

    /// Removes a label and returns its matrix.
    pub fn forget(&mut self, label: &Label) -> Result<WeightMatrix> {
        self.entries
            .remove(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn weights(&self, label: &Label) -> Result<&WeightMatrix> {
        self.entries
            .get(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Inserts a pre-built matrix, replacing any previous entry for the label.
    pub fn insert(&mut self, label: Label, weights: WeightMatrix) -> Result<()> {
        self.check_dims(weights.dims())?;
        self.entries.insert(label, weights);
        Ok(())
    }

    pub(crate) fn check_dims(&self, found: GridDims) -> Result<()> {
        if found != self.dims {
            return Err(Error::DimsMismatch {
                expected: self.dims,
                found,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label(s: &str) -> Label {
        Label::new(s).unwrap()
    }

    fn grid(rows: &[&str]) -> BinaryGrid {
        BinaryGrid::from_rows(rows).unwrap()
    }

    #[test]
    fn label_validation() {
        assert!(Label::new("S").is_ok());
        assert!(Label::new("ß_ж").is_ok());
        assert!(Label::new("x".repeat(64)).is_ok());
        assert!(Label::new("x".repeat(65)).is_err());
        assert!(Label::new("").is_err());
        assert!(Label::new("a b").is_err());
        assert!(Label::new("a\u{7}").is_err());
        assert_ne!(label("s"), label("S"));
    }

    #[test]
    fn new_kb_is_empty() {
        let kb = KnowledgeBase::new(GridDims::new(6, 8).unwrap());
        assert!(kb.is_empty());
        assert_eq!(kb.labels().count(), 0);
        assert_eq!(kb.dims(), GridDims::new(6, 8).unwrap());
    }

    #[test]
    fn first_teach_is_bipolar_pattern() {
        let p = grid(&["#.#", ".#."]);
        let mut kb = KnowledgeBase::new(p.dims());
        let w = kb.teach(&label("S"), &p).unwrap();
        assert_eq!(w.teach_count(), 1);
        assert_eq!(w.weights(), &[1, -1, 1, -1, 1, -1]);
    }

    #[test]
    fn three_teachings_closed_form() {
        let ps = [
            grid(&["##.", "#.."]),
            grid(&["#..", "##."]),
            grid(&["##.", "..."]),
        ];
        let mut kb = KnowledgeBase::new(ps[0].dims());
        for p in &ps {
            kb.teach(&label("S"), p).unwrap();
        }
        let w = kb.weights(&label("S")).unwrap();
        // B per cell: [3,2,0; 2,1,0] -> 2B-3
        assert_eq!(w.weights(), &[3, 1, -3, 1, -1, -3]);
        assert!(w.weights().iter().all(|x| [-3, -1, 1, 3].contains(x)));
    }

    #[test]
    fn teach_rejects_wrong_dims() {
        let mut kb = KnowledgeBase::new(GridDims::new(3, 3).unwrap());
        let err = kb.teach(&label("A"), &grid(&["##"])).unwrap_err();
        assert!(matches!(err, Error::DimsMismatch { .. }));
        assert!(kb.is_empty());
    }

    #[test]
    fn forget_and_lookup() {
        let a = grid(&["#."]);
        let b = grid(&[".#"]);
        let mut kb = KnowledgeBase::new(a.dims());
        assert!(matches!(
            kb.forget(&label("A")),
            Err(Error::UnknownLabel(_))
        ));
        kb.teach(&label("A"), &a).unwrap();
        kb.teach(&label("B"), &b).unwrap();
        let before = kb.weights(&label("B")).unwrap().clone();
        kb.forget(&label("A")).unwrap();
        assert!(!kb.contains(&label("A")));
        assert_eq!(kb.weights(&label("B")).unwrap(), &before);
        assert!(matches!(
            kb.weights(&label("A")),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn labels_sorted() {
        let p = grid(&["#"]);
        let mut kb = KnowledgeBase::new(p.dims());
        for name in ["b", "B", "a", "A"] {
            kb.teach(&label(name), &p).unwrap();
        }
        let names: Vec<_> = kb.labels().map(Label::as_str).collect();
        assert_eq!(names, ["A", "B", "a", "b"]);
    }

    #[test]
    fn from_parts_checks_laws() {
        let d = GridDims::new(2, 1).unwrap();
        assert!(WeightMatrix::from_parts(d, vec![3, -1], 3).is_ok());
        assert!(WeightMatrix::from_parts(d, vec![4, -1], 3).is_err());
        assert!(WeightMatrix::from_parts(d, vec![5, 1], 3).is_err());
        assert!(WeightMatrix::from_parts(d, vec![1, 0], 0).is_err());
        assert!(WeightMatrix::from_parts(d, vec![0, 0], 0).is_ok());
        assert!(WeightMatrix::from_parts(d, vec![0], 0).is_err());
    }

    #[test]
    fn teach_limit() {
        let d = GridDims::new(1, 1).unwrap();
        let mut kb = KnowledgeBase::new(d);
        let full =
            WeightMatrix::from_parts(d, vec![MAX_TEACH_COUNT as i32], MAX_TEACH_COUNT).unwrap();
        kb.insert(label("A"), full).unwrap();
        assert!(matches!(
            kb.teach(&label("A"), &BinaryGrid::filled(d)),
            Err(Error::TeachLimit(_))
        ));
    }
}
