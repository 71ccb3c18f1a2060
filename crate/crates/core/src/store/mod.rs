//! On-disk formats: knowledge-base profiles, glyph patterns, and Netpbm
//! raster ingestion.
//!
//! Text formats are UTF-8 with LF line endings and are parsed strictly; a
//! file that strays from the grammar is rejected rather than guessed at.

mod glyph;
mod kbfile;
mod netpbm;

use std::io::Write;
use std::path::Path;

pub use glyph::{format_glyph, parse_glyph};
pub use kbfile::{format_kb, parse_kb, KB_FORMAT_VERSION};
pub use netpbm::parse_netpbm;

use crate::error::{Error, Result};
use crate::grid::{digitize, BinaryGrid, DigitizeParams, GridDims, Raster};
use crate::knowledge::KnowledgeBase;

/// Writes `contents` to a sibling temp file, syncs it, then renames it over
/// `path`. Readers see either the old file or the new one.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::Builder::new()
        .prefix(".glyphforge-")
        .suffix(".tmp")
        .tempfile_in(dir)
        .map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents)
        .map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn save_kb(kb: &KnowledgeBase, path: &Path) -> Result<()> {
    write_atomic(path, format_kb(kb).as_bytes())
}

pub fn load_kb(path: &Path) -> Result<KnowledgeBase> {
    parse_kb(&read_text(path)?)
}

pub fn save_glyph(grid: &BinaryGrid, path: &Path) -> Result<()> {
    write_atomic(path, format_glyph(grid).as_bytes())
}

pub fn load_glyph(path: &Path) -> Result<BinaryGrid> {
    parse_glyph(&read_text(path)?)
}

pub fn load_raster(path: &Path) -> Result<Raster> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_netpbm(&bytes)
}

/// Reads a candidate pattern: a glyph file is used as-is, a PBM/PGM file is
/// digitized to `dims`. The format is sniffed from the first bytes.
pub fn load_pattern(path: &Path, dims: GridDims, params: DigitizeParams) -> Result<BinaryGrid> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"glyph") {
        let text = std::str::from_utf8(&bytes)
            .map_err(|_| Error::parse(1, "glyph file is not valid UTF-8"))?;
        parse_glyph(text)
    } else {
        digitize(&parse_netpbm(&bytes)?, dims, params)
    }
}

/// Strict decimal integer: optional `-`, then digits without leading zeros.
pub(crate) fn parse_int<T: std::str::FromStr>(tok: &str) -> Option<T> {
    let digits = tok.strip_prefix('-').unwrap_or(tok);
    if digits.is_empty()
        || !digits.bytes().all(|b| b.is_ascii_digit())
        || (digits.len() > 1 && digits.starts_with('0'))
        || tok == "-0"
    {
        return None;
    }
    tok.parse().ok()
}

/// Splits text into lines, requiring LF endings with a single trailing LF.
pub(crate) fn split_lines(text: &str) -> Result<Vec<&str>> {
    if let Some(pos) = text.find('\r') {
        let line = text[..pos].matches('\n').count() + 1;
        return Err(Error::parse(
            line,
            "carriage return found; LF line endings required",
        ));
    }
    let body = text
        .strip_suffix('\n')
        .ok_or_else(|| Error::parse(text.lines().count().max(1), "missing final newline"))?;
    Ok(body.split('\n').collect())
}
