//! Independent oracles and generators shared by the integration suites.
//! Nothing here calls the scoring or teaching code it is used to check.
#![allow(dead_code)]

use std::path::PathBuf;

use glyphforge::{BinaryGrid, GridDims, KnowledgeBase, Label, WeightMatrix};
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// The printed S weight matrix, 8 rows of 6, taught three times.
pub const PRINTED_S: [[i64; 6]; 8] = [
    [1, 3, 3, 3, 3, 1],
    [3, 3, -3, -3, -1, -1],
    [3, -1, -3, -3, -3, -3],
    [3, 3, 1, -1, -1, -1],
    [-1, 3, 3, 3, 3, 3],
    [-3, -3, -3, -3, -3, 3],
    [3, -3, -3, -1, 1, 3],
    [3, 3, 3, 3, 3, 1],
];

pub fn label(s: &str) -> Label {
    Label::new(s).unwrap()
}

pub fn dims(w: usize, h: usize) -> GridDims {
    GridDims::new(w, h).unwrap()
}

/// Per-cell closed form `2*B - n` by counting black occurrences directly.
pub fn counted_weights(patterns: &[BinaryGrid], d: GridDims) -> Vec<i64> {
    let n = patterns.len() as i64;
    let mut out = Vec::with_capacity(d.cell_count());
    for row in 0..d.height() {
        for col in 0..d.width() {
            let b = patterns.iter().filter(|p| p.get(col, row)).count() as i64;
            out.push(2 * b - n);
        }
    }
    out
}

/// Double loop `sum W(i,j) * I(i,j)` with `I` as 0/1 integers.
pub fn looped_psi(w: &WeightMatrix, input: &BinaryGrid) -> i64 {
    let d = w.dims();
    let mut psi = 0i64;
    for i in 0..d.height() {
        for j in 0..d.width() {
            let cell = if input.get(j, i) { 1 } else { 0 };
            psi += i64::from(w.get(j, i)) * cell;
        }
    }
    psi
}

/// Loop accumulating only strictly positive weights.
pub fn looped_mu(w: &WeightMatrix) -> i64 {
    let d = w.dims();
    let mut mu = 0i64;
    for i in 0..d.height() {
        for j in 0..d.width() {
            let v = i64::from(w.get(j, i));
            if v > 0 {
                mu += v;
            }
        }
    }
    mu
}

/// `a/b == c/d` by cross multiplication, `b, d > 0`.
pub fn ratio_eq(a: i64, b: i64, c: i64, d: i64) -> bool {
    i128::from(a) * i128::from(d) == i128::from(c) * i128::from(b)
}

/// `a/b <= c/d`, `b, d > 0`.
pub fn ratio_le(a: i64, b: i64, c: i64, d: i64) -> bool {
    i128::from(a) * i128::from(d) <= i128::from(c) * i128::from(b)
}

pub fn random_grid(rng: &mut impl Rng, d: GridDims) -> BinaryGrid {
    let density: f64 = rng.random_range(0.1..0.9);
    BinaryGrid::from_fn(d, |_, _| rng.random_bool(density))
}

/// Random pattern whose ink touches all four edges, so its bounding box is
/// the whole grid.
pub fn edge_touching_grid(rng: &mut impl Rng, d: GridDims) -> BinaryGrid {
    loop {
        let g = random_grid(rng, d);
        let top = (0..d.width()).any(|c| g.get(c, 0));
        let bottom = (0..d.width()).any(|c| g.get(c, d.height() - 1));
        let left = (0..d.height()).any(|r| g.get(0, r));
        let right = (0..d.height()).any(|r| g.get(d.width() - 1, r));
        if top && bottom && left && right {
            return g;
        }
    }
}

pub fn random_dims(rng: &mut impl Rng, max: usize) -> GridDims {
    dims(rng.random_range(1..=max), rng.random_range(1..=max))
}

/// A matrix reached by teaching `n` random patterns, with `n` in `1..=max_n`.
pub fn random_matrix(rng: &mut impl Rng, d: GridDims, max_n: usize) -> WeightMatrix {
    let mut kb = KnowledgeBase::new(d);
    let l = label("w");
    let n = rng.random_range(1..=max_n);
    for _ in 0..n {
        kb.teach(&l, &random_grid(rng, d)).unwrap();
    }
    kb.weights(&l).unwrap().clone()
}

/// Plain-text PBM encoding of a luminance raster (black where luminance < 128).
pub fn pbm_text(r: &glyphforge::Raster) -> String {
    let mut out = format!("P1\n{} {}\n", r.width(), r.height());
    for row in r.pixels().chunks(r.width()) {
        let line: Vec<&str> = row
            .iter()
            .map(|&p| if p < 128 { "1" } else { "0" })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
