//! CSV, JSON and PNG input/output.
//!
//! Floats are written with Rust's shortest round-trip formatting, so values
//! read back from a CSV are bit-identical to the ones written.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::{RadialEstimate, SpectralEstimate};
use crate::pattern::PointPattern;
use crate::window::CuboidWindow;

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line}: `{s}` is not a number")))
}

/// Read a `x1,...,xd` point CSV. Points outside `window` are dropped and counted.
pub fn read_pattern<R: Read>(reader: R, window: &CuboidWindow) -> Result<(PointPattern, usize)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    let d = window.dim();
    if headers.is_empty() {
        return Err(Error::NoPoints);
    }
    let expected: Vec<String> = (1..=d).map(|j| format!("x{j}")).collect();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Parse(format!(
            "expected header `{}`, found `{}`",
            expected.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut coords = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.len() != d {
            return Err(Error::Parse(format!("line {}: expected {d} fields, got {}", i + 2, rec.len())));
        }
        for v in rec.iter() {
            coords.push(parse_f64(v, i + 2)?);
        }
    }
    if coords.is_empty() {
        return Err(Error::NoPoints);
    }
    PointPattern::from_flat_clipped(coords, window.clone())
}

pub fn read_pattern_file(path: &Path, window: &CuboidWindow) -> Result<(PointPattern, usize)> {
    read_pattern(File::open(path)?, window)
}

pub fn write_pattern<W: Write>(writer: W, pattern: &PointPattern) -> Result<()> {
    let mut w = BufWriter::new(writer);
    let header: Vec<String> = (1..=pattern.dim()).map(|j| format!("x{j}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for p in pattern.points() {
        writeln!(w, "{}", join(p))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_pattern_file(path: &Path, pattern: &PointPattern) -> Result<()> {
    write_pattern(File::create(path)?, pattern)
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Window sidecar: two rows `lower,a1,...,ad` and `upper,b1,...,bd`.
pub fn read_window<R: Read>(mut reader: R) -> Result<CuboidWindow> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let mut lower = None;
    let mut upper = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let tag = fields.next().unwrap_or("").trim();
        let values: Vec<f64> = fields.map(|v| parse_f64(v, i + 1)).collect::<Result<_>>()?;
        match tag {
            "lower" => lower = Some(values),
            "upper" => upper = Some(values),
            _ => return Err(Error::Parse(format!("line {}: expected `lower` or `upper`, got `{tag}`", i + 1))),
        }
    }
    match (lower, upper) {
        (Some(l), Some(u)) => CuboidWindow::new(l, u),
        _ => Err(Error::Parse("window file needs `lower` and `upper` rows".into())),
    }
}

pub fn read_window_file(path: &Path) -> Result<CuboidWindow> {
    read_window(File::open(path)?)
}

pub fn write_window<W: Write>(mut writer: W, window: &CuboidWindow) -> Result<()> {
    writeln!(writer, "lower,{}", join(window.lower()))?;
    writeln!(writer, "upper,{}", join(window.upper()))?;
    Ok(())
}

/// Grid CSV with header `k1,...,kd,value`.
pub fn write_grid<W: Write>(writer: W, estimate: &SpectralEstimate) -> Result<()> {
    let mut w = BufWriter::new(writer);
    let d = estimate.grid.dim();
    let header: Vec<String> = (1..=d).map(|j| format!("k{j}")).collect();
    writeln!(w, "{},value", header.join(","))?;
    for (i, v) in estimate.values.iter().enumerate() {
        writeln!(w, "{},{}", join(estimate.grid.node(i)), v)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_grid_file(path: &Path, estimate: &SpectralEstimate) -> Result<()> {
    write_grid(File::create(path)?, estimate)
}

/// Read a grid CSV back as `(nodes, values)`.
pub fn read_grid<R: Read>(reader: R) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let row: Vec<f64> = rec.iter().map(|v| parse_f64(v, i + 2)).collect::<Result<_>>()?;
        let (k, v) = row.split_at(row.len().saturating_sub(1));
        nodes.push(k.to_vec());
        values.push(*v.first().ok_or_else(|| Error::Parse(format!("line {}: empty row", i + 2)))?);
    }
    Ok((nodes, values))
}

/// Radial CSV: `t,value,count` when bin counts are known, `t,value` otherwise.
pub fn write_radial<W: Write>(writer: W, radial: &RadialEstimate) -> Result<()> {
    let mut w = BufWriter::new(writer);
    match &radial.counts {
        Some(counts) => {
            writeln!(w, "t,value,count")?;
            for ((t, v), c) in radial.t.iter().zip(&radial.values).zip(counts) {
                writeln!(w, "{t},{v},{c}")?;
            }
        }
        None => {
            writeln!(w, "t,value")?;
            for (t, v) in radial.t.iter().zip(&radial.values) {
                writeln!(w, "{t},{v}")?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_radial_file(path: &Path, radial: &RadialEstimate) -> Result<()> {
    write_radial(File::create(path)?, radial)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Viridis anchor colors, interpolated linearly.
const VIRIDIS: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];

fn colormap(x: f64) -> [u8; 3] {
    let x = x.clamp(0.0, 1.0) * (VIRIDIS.len() - 1) as f64;
    let i = (x.floor() as usize).min(VIRIDIS.len() - 2);
    let f = x - i as f64;
    let mut out = [0u8; 3];
    for c in 0..3 {
        out[c] = (VIRIDIS[i][c] * (1.0 - f) + VIRIDIS[i + 1][c] * f).round() as u8;
    }
    out
}

/// Value range mapped onto the heatmap colors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatmapRange {
    pub min: f64,
    pub max: f64,
}

/// Heatmap of a 2D estimate on a product grid, first axis horizontal and the
/// second axis pointing up. Nodes absent from the grid are drawn black.
pub fn write_heatmap<W: Write>(writer: W, estimate: &SpectralEstimate) -> Result<HeatmapRange> {
    let grid = &estimate.grid;
    let axes = grid.axes().ok_or(Error::NotAProductGrid)?;
    if grid.dim() != 2 {
        return Err(Error::InvalidParameter("heatmaps need a 2D grid".into()));
    }
    let (nx, ny) = (axes[0].len(), axes[1].len());
    let finite = estimate.values.iter().copied().filter(|v| v.is_finite());
    let min = finite.clone().fold(f64::INFINITY, f64::min);
    let max = finite.fold(f64::NEG_INFINITY, f64::max);
    let span = if max > min { max - min } else { 1.0 };
    let mut pixels = vec![0u8; nx * ny * 3];
    for (i, v) in estimate.values.iter().enumerate() {
        let mi = grid.multi_index(i).expect("product grid");
        let (x, y) = (mi[0], ny - 1 - mi[1]);
        if v.is_finite() {
            let rgb = colormap((v - min) / span);
            pixels[(y * nx + x) * 3..(y * nx + x) * 3 + 3].copy_from_slice(&rgb);
        }
    }
    let mut enc = png::Encoder::new(writer, nx as u32, ny as u32);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    let mut w = enc.write_header().map_err(|e| Error::Io(std::io::Error::other(e)))?;
    w.write_image_data(&pixels).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    Ok(HeatmapRange { min, max })
}

pub fn write_heatmap_file(path: &Path, estimate: &SpectralEstimate) -> Result<HeatmapRange> {
    write_heatmap(BufWriter::new(File::create(path)?), estimate)
}
