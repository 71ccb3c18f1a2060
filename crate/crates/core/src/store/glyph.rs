use super::{parse_int, split_lines};
use crate::error::{Error, Result};
use crate::grid::{BinaryGrid, GridDims};

/// `glyph W H` header followed by H rows of `#`/`.`.
pub fn format_glyph(grid: &BinaryGrid) -> String {
    let dims = grid.dims();
    let mut out = format!("glyph {} {}\n", dims.width(), dims.height());
    for row in grid.to_row_strings() {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

pub fn parse_glyph(text: &str) -> Result<BinaryGrid> {
    let lines = split_lines(text)?;
    let header: Vec<&str> = lines[0].split(' ').collect();
    let (width, height) = match header.as_slice() {
        ["glyph", w, h] => match (parse_int::<usize>(w), parse_int::<usize>(h)) {
            (Some(w), Some(h)) => (w, h),
            _ => {
                return Err(Error::parse(
                    1,
                    "header dimensions must be decimal integers",
                ))
            }
        },
        _ => return Err(Error::parse(1, "expected header `glyph <width> <height>`")),
    };
    let dims = GridDims::new(width, height).map_err(|e| Error::parse(1, e.to_string()))?;
    let rows = &lines[1..];
    if rows.len() != height {
        return Err(Error::parse(
            lines.len().min(height + 1) + 1,
            format!("expected {height} rows, found {}", rows.len()),
        ));
    }
    let mut cells = Vec::with_capacity(dims.cell_count());
    for (i, row) in rows.iter().enumerate() {
        let line = i + 2;
        let mut n = 0;
        for (j, ch) in row.chars().enumerate() {
            cells.push(match ch {
                '#' => true,
                '.' => false,
                other => {
                    return Err(Error::parse_at(
                        line,
                        j + 1,
                        format!("unexpected character {other:?}"),
                    ))
                }
            });
            n += 1;
        }
        if n != width {
            return Err(Error::parse(
                line,
                format!("row has {n} cells, expected {width}"),
            ));
        }
    }
    BinaryGrid::new(dims, cells)
}
