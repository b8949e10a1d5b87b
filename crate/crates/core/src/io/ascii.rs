//! Whitespace-separated ASCII grids: `width height cell_size` on the first
//! line, then `width * height` row-major values.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::Raster;

#[derive(Debug, Clone, PartialEq)]
pub struct AsciiGrid {
    pub values: Raster<f64>,
    pub cell_size: f64,
}

pub fn read_ascii_grid<R: Read>(mut r: R) -> Result<AsciiGrid> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty grid file".into()))?;
    let mut h = header.split_whitespace();
    let width: usize = parse_tok(h.next(), "width")?;
    let height: usize = parse_tok(h.next(), "height")?;
    let cell_size: f64 = parse_tok(h.next(), "cell_size")?;
    if h.next().is_some() {
        return Err(Error::Format(
            "grid header must be `width height cell_size`".into(),
        ));
    }
    let values: Vec<f64> = lines
        .flat_map(|l| l.split_whitespace())
        .map(|t| parse_tok(Some(t), "value"))
        .collect::<Result<_>>()?;
    if values.len() != width * height {
        return Err(Error::Format(format!(
            "expected {} values, found {}",
            width * height,
            values.len()
        )));
    }
    Ok(AsciiGrid {
        values: Raster::from_vec(width, height, values).expect("length checked"),
        cell_size,
    })
}

fn parse_tok<V: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<V> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Format(format!("bad or missing {what}")))
}

pub fn write_ascii_grid<W: Write>(mut w: W, grid: &AsciiGrid) -> Result<()> {
    let r = &grid.values;
    writeln!(w, "{} {} {}", r.width(), r.height(), grid.cell_size)?;
    for row in r.as_slice().chunks(r.width()) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_ascii_grid_file(path: impl AsRef<Path>) -> Result<AsciiGrid> {
    read_ascii_grid(BufReader::new(File::open(path)?))
}

pub fn write_ascii_grid_file(path: impl AsRef<Path>, grid: &AsciiGrid) -> Result<()> {
    write_ascii_grid(BufWriter::new(File::create(path)?), grid)
}
