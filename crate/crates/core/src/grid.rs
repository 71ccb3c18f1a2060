//! Fixed-dimension binary grids and the digitizer that produces them.
//!
//! A [`BinaryGrid`] holds 1 for black (ink) cells and 0 for white. Teaching
//! works on the bipolar form ([`BipolarGrid`]), where white cells become -1.
//! Any raster, whatever its size, is digitized into a grid of fixed,
//! caller-chosen dimensions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_SIDE: usize = 1024;
pub const DEFAULT_INK_THRESHOLD: u8 = 127;
pub const DEFAULT_COVERAGE: f64 = 0.5;

/// Width (columns) and height (rows) of a grid, each in `1..=1024`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDims", into = "RawDims")]
pub struct GridDims {
    width: usize,
    height: usize,
}

#[derive(Serialize, Deserialize)]
struct RawDims {
    w: usize,
    h: usize,
}

impl TryFrom<RawDims> for GridDims {
    type Error = Error;

    fn try_from(raw: RawDims) -> Result<Self> {
        GridDims::new(raw.w, raw.h)
    }
}

impl From<GridDims> for RawDims {
    fn from(d: GridDims) -> Self {
        RawDims {
            w: d.width,
            h: d.height,
        }
    }
}

impl GridDims {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if !(1..=MAX_SIDE).contains(&width) || !(1..=MAX_SIDE).contains(&height) {
            return Err(Error::InvalidDims { width, height });
        }
        Ok(GridDims { width, height })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_count(&self) -> usize {
        self.width * self.height
    }
}

impl Default for GridDims {
    /// 32x32, enough resolution for handwritten Latin characters.
    fn default() -> Self {
        GridDims {
            width: 32,
            height: 32,
        }
    }
}

impl fmt::Display for GridDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

impl FromStr for GridDims {
    type Err = Error;

    /// Parses `WxH`, e.g. `32x32` or `6x8`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("expected WIDTHxHEIGHT, got {s:?}"));
        let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let w = w.trim().parse().map_err(|_| bad())?;
        let h = h.trim().parse().map_err(|_| bad())?;
        GridDims::new(w, h)
    }
}

/// Binary image matrix: row-major cells, `true` = black.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryGrid {
    dims: GridDims,
    cells: Vec<bool>,
}

impl BinaryGrid {
    pub fn new(dims: GridDims, cells: Vec<bool>) -> Result<Self> {
        if cells.len() != dims.cell_count() {
            return Err(Error::InvalidParameter(format!(
                "{} cells supplied for a {dims} grid",
                cells.len()
            )));
        }
        Ok(BinaryGrid { dims, cells })
    }

    pub fn blank(dims: GridDims) -> Self {
        BinaryGrid {
            dims,
            cells: vec![false; dims.cell_count()],
        }
    }

    pub fn filled(dims: GridDims) -> Self {
        BinaryGrid {
            dims,
            cells: vec![true; dims.cell_count()],
        }
    }

    /// Builds a grid by evaluating `f(col, row)` for every cell.
    pub fn from_fn(dims: GridDims, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let cells = (0..dims.height)
            .flat_map(|row| (0..dims.width).map(move |col| (col, row)))
            .map(|(col, row)| f(col, row))
            .collect();
        BinaryGrid { dims, cells }
    }

    /// Parses rows of `#` (black) and `.` (white). All rows must share one width.
    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let height = rows.len();
        let width = rows
            .first()
            .map(|r| r.as_ref().chars().count())
            .unwrap_or(0);
        let dims = GridDims::new(width, height)?;
        let mut cells = Vec::with_capacity(dims.cell_count());
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            let mut n = 0;
            for (j, ch) in row.chars().enumerate() {
                cells.push(match ch {
                    '#' => true,
                    '.' => false,
                    other => {
                        return Err(Error::parse_at(
                            i + 1,
                            j + 1,
                            format!("unexpected character {other:?}"),
                        ))
                    }
                });
                n += 1;
            }
            if n != width {
                return Err(Error::parse(
                    i + 1,
                    format!("row has {n} cells, expected {width}"),
                ));
            }
        }
        Ok(BinaryGrid { dims, cells })
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.cells[row * self.dims.width + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[bool]> {
        self.cells.chunks(self.dims.width)
    }

    /// Rows rendered as `#`/`.` strings.
    pub fn to_row_strings(&self) -> Vec<String> {
        self.rows()
            .map(|r| r.iter().map(|&b| if b { '#' } else { '.' }).collect())
            .collect()
    }

    /// Number of black cells.
    pub fn black_count(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    pub fn to_bipolar(&self) -> BipolarGrid {
        BipolarGrid {
            dims: self.dims,
            cells: self.cells.iter().map(|&b| if b { 1 } else { -1 }).collect(),
        }
    }

    /// Cellwise complement (black and white swapped).
    pub fn inverted(&self) -> Self {
        BinaryGrid {
            dims: self.dims,
            cells: self.cells.iter().map(|b| !b).collect(),
        }
    }
}

/// Training input: row-major cells in {-1, +1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BipolarGrid {
    dims: GridDims,
    cells: Vec<i8>,
}

impl BipolarGrid {
    pub fn new(dims: GridDims, cells: Vec<i8>) -> Result<Self> {
        if cells.len() != dims.cell_count() {
            return Err(Error::InvalidParameter(format!(
                "{} cells supplied for a {dims} grid",
                cells.len()
            )));
        }
        if let Some(bad) = cells.iter().find(|&&c| c != 1 && c != -1) {
            return Err(Error::InvalidParameter(format!(
                "bipolar cell value {bad} is not -1 or +1"
            )));
        }
        Ok(BipolarGrid { dims, cells })
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn cells(&self) -> &[i8] {
        &self.cells
    }

    pub fn to_binary(&self) -> BinaryGrid {
        BinaryGrid {
            dims: self.dims,
            cells: self.cells.iter().map(|&c| c > 0).collect(),
        }
    }
}

/// 8-bit luminance image, row-major. 0 is black ink, 255 is white paper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl Raster {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster(format!(
                "raster must be non-empty, got {width}x{height}"
            )));
        }
        if width.checked_mul(height) != Some(pixels.len()) {
            return Err(Error::InvalidRaster(format!(
                "{} pixels supplied for a {width}x{height} raster",
                pixels.len()
            )));
        }
        Ok(Raster {
            width,
            height,
            pixels,
        })
    }

    /// Renders `grid` with every cell blown up to a `scale`x`scale` block of
    /// pure black or white, surrounded by `margin` pixels of white.
    pub fn from_grid(grid: &BinaryGrid, scale: usize, margin: usize) -> Self {
        assert!(scale >= 1, "scale must be at least 1");
        let width = grid.dims.width * scale + 2 * margin;
        let height = grid.dims.height * scale + 2 * margin;
        let mut pixels = vec![255u8; width * height];
        for row in 0..grid.dims.height {
            for col in 0..grid.dims.width {
                if !grid.get(col, row) {
                    continue;
                }
                for dy in 0..scale {
                    let y = margin + row * scale + dy;
                    let start = y * width + margin + col * scale;
                    pixels[start..start + scale].fill(0);
                }
            }
        }
        Raster {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    fn luminance(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }
}

/// Digitizer knobs. A pixel is ink iff its luminance is `<= ink_threshold`;
/// a cell is black iff its ink fraction is `>= coverage`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DigitizeParams {
    pub ink_threshold: u8,
    pub coverage: f64,
}

impl Default for DigitizeParams {
    fn default() -> Self {
        DigitizeParams {
            ink_threshold: DEFAULT_INK_THRESHOLD,
            coverage: DEFAULT_COVERAGE,
        }
    }
}

/// Maps index `i` of a `from`-long axis onto a `to`-long axis by the position
/// of its center. A center landing exactly on a boundary goes to the lower index.
fn map_center(i: usize, from: usize, to: usize) -> usize {
    let num = (2 * i + 1) * to;
    let den = 2 * from;
    let idx = num / den;
    if num.is_multiple_of(den) && idx > 0 {
        idx - 1
    } else {
        idx
    }
}

/// Samples `raster` into a grid of `dims`.
///
/// The raster is binarized, cropped to the bounding box of its ink, and the
/// crop is stretched onto the grid: each source pixel belongs to the cell
/// containing its center. A cell turns black when its ink fraction reaches
/// `coverage`. When the grid is finer than the crop some cells receive no
/// pixel centers; those take the value of the pixel under their own center.
pub fn digitize(raster: &Raster, dims: GridDims, params: DigitizeParams) -> Result<BinaryGrid> {
    let coverage = params.coverage;
    if !(coverage > 0.0 && coverage <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "coverage must be in (0, 1], got {coverage}"
        )));
    }
    let is_ink = |x: usize, y: usize| raster.luminance(x, y) <= params.ink_threshold;

    let mut bbox: Option<(usize, usize, usize, usize)> = None;
    for y in 0..raster.height {
        for x in 0..raster.width {
            if is_ink(x, y) {
                let b = bbox.get_or_insert((x, y, x, y));
                b.0 = b.0.min(x);
                b.1 = b.1.min(y);
                b.2 = b.2.max(x);
                b.3 = b.3.max(y);
            }
        }
    }
    let (x0, y0, x1, y1) = bbox.ok_or(Error::EmptyRaster)?;
    let crop_w = x1 - x0 + 1;
    let crop_h = y1 - y0 + 1;

    let n = dims.cell_count();
    let mut ink = vec![0usize; n];
    let mut total = vec![0usize; n];
    let col_of: Vec<usize> = (0..crop_w)
        .map(|x| map_center(x, crop_w, dims.width))
        .collect();
    for y in 0..crop_h {
        let row = map_center(y, crop_h, dims.height);
        for (x, &col) in col_of.iter().enumerate() {
            let cell = row * dims.width + col;
            total[cell] += 1;
            if is_ink(x0 + x, y0 + y) {
                ink[cell] += 1;
            }
        }
    }

    Ok(BinaryGrid::from_fn(dims, |col, row| {
        let cell = row * dims.width + col;
        if total[cell] == 0 {
            let x = map_center(col, dims.width, crop_w);
            let y = map_center(row, dims.height, crop_h);
            is_ink(x0 + x, y0 + y)
        } else {
            ink[cell] as f64 >= coverage * total[cell] as f64
        }
    }))
}
