//! Knowledge-base text format:
//!
//! ```text
//! vcrkb 1
//! grid <width> <height>
//! label <name> <teach_count>
//! <height rows of width space-separated integers>
//! ...
//! ```
//!
//! Entries appear in lexicographic label order. Weights are checked against
//! the stored teach count on load.

use std::fmt::Write;

use super::{parse_int, split_lines};
use crate::error::{Error, Result};
use crate::grid::GridDims;
use crate::knowledge::{KnowledgeBase, Label, WeightMatrix};

pub const KB_FORMAT_VERSION: u32 = 1;

pub fn format_kb(kb: &KnowledgeBase) -> String {
    let dims = kb.dims();
    let mut out = format!(
        "vcrkb {KB_FORMAT_VERSION}\ngrid {} {}\n",
        dims.width(),
        dims.height()
    );
    for (label, w) in kb.entries() {
        let _ = writeln!(out, "label {label} {}", w.teach_count());
        for row in w.rows() {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(' ');
                }
                first = false;
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
    }
    out
}

pub fn parse_kb(text: &str) -> Result<KnowledgeBase> {
    let lines = split_lines(text)?;
    let mut it = lines.iter().enumerate().map(|(i, l)| (i + 1, *l));

    match it.next() {
        Some((_, "vcrkb 1")) => {}
        Some((n, l)) if l.starts_with("vcrkb ") => {
            return Err(Error::parse(
                n,
                format!("unsupported format version in {l:?}"),
            ))
        }
        _ => return Err(Error::parse(1, "expected header `vcrkb 1`")),
    }

    let dims = match it.next() {
        Some((n, l)) => {
            let toks: Vec<&str> = l.split(' ').collect();
            match toks.as_slice() {
                ["grid", w, h] => {
                    let (w, h) = parse_int::<usize>(w)
                        .zip(parse_int::<usize>(h))
                        .ok_or_else(|| Error::parse(n, "grid dimensions must be integers"))?;
                    GridDims::new(w, h).map_err(|e| Error::parse(n, e.to_string()))?
                }
                _ => return Err(Error::parse(n, "expected `grid <width> <height>`")),
            }
        }
        None => return Err(Error::parse(2, "missing `grid` line")),
    };

    let mut kb = KnowledgeBase::new(dims);
    let mut prev: Option<Label> = None;
    while let Some((n, l)) = it.next() {
        let toks: Vec<&str> = l.split(' ').collect();
        let (label, teach_count) = match toks.as_slice() {
            ["label", name, count] => {
                let label = Label::new(*name).map_err(|e| Error::parse(n, e.to_string()))?;
                let count = parse_int::<u32>(count)
                    .ok_or_else(|| Error::parse(n, format!("bad teach count {count:?}")))?;
                (label, count)
            }
            _ => return Err(Error::parse(n, "expected `label <name> <teach_count>`")),
        };
        if let Some(p) = &prev {
            if *p >= label {
                return Err(Error::parse(
                    n,
                    format!("label {label} out of order or duplicated after {p}"),
                ));
            }
        }

        let mut weights = Vec::with_capacity(dims.cell_count());
        for row in 0..dims.height() {
            let (rn, rl) = it.next().ok_or_else(|| {
                Error::parse(
                    n + row + 1,
                    format!(
                        "label {label}: expected {} weight rows, found {row}",
                        dims.height()
                    ),
                )
            })?;
            let before = weights.len();
            for (col, tok) in rl.split(' ').enumerate() {
                let v = parse_int::<i32>(tok)
                    .ok_or_else(|| Error::parse_at(rn, col + 1, format!("bad weight {tok:?}")))?;
                weights.push(v);
            }
            let got = weights.len() - before;
            if got != dims.width() {
                return Err(Error::parse(
                    rn,
                    format!("row has {got} weights, expected {}", dims.width()),
                ));
            }
        }

        let matrix = WeightMatrix::from_parts(dims, weights, teach_count).map_err(|e| match e {
            Error::InvariantViolation { reason, .. } => Error::InvariantViolation {
                label: label.to_string(),
                reason,
            },
            other => other,
        })?;
        kb.insert(label.clone(), matrix)?;
        prev = Some(label);
    }
    Ok(kb)
}
