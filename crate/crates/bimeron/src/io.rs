//! Field snapshots and JSON sidecars.
//!
//! Snapshot format (text, one file per field):
//!
//! ```text
//! BIMERON-FIELD v1
//! <kind> <n> <h> <components>
//! i j m1 m2 [m3]        # one line per active node, 17 significant digits
//! ```
//!
//! 17 significant digits round-trip f64 exactly, so save -> load is
//! bit-exact on active nodes. A JSON sidecar (same path + ".json") carries
//! energy parameters and provenance.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{BimeronError, Result};
use crate::grid::{make_grid, CircleField, DomainGrid, DomainKind, SphereField};

const MAGIC: &str = "BIMERON-FIELD v1";

pub fn save_sphere_field(path: &Path, field: &SphereField) -> Result<()> {
    let g = &field.grid;
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "{} {} {:.16e} 3", g.kind, g.n, g.h)?;
    for j in 0..g.n {
        for i in 0..g.n {
            let idx = g.idx(i, j);
            if !g.active[idx] {
                continue;
            }
            let v = field.values[idx];
            writeln!(w, "{i} {j} {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2])?;
        }
    }
    Ok(())
}

pub fn save_circle_field(path: &Path, field: &CircleField) -> Result<()> {
    let g = &field.grid;
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "{} {} {:.16e} 2", g.kind, g.n, g.h)?;
    for j in 0..g.n {
        for i in 0..g.n {
            let idx = g.idx(i, j);
            let v = field.values[idx];
            writeln!(w, "{i} {j} {:.16e} {:.16e}", v[0], v[1])?;
        }
    }
    Ok(())
}

struct Header {
    grid: Arc<DomainGrid>,
    components: usize,
}

fn read_header(lines: &mut impl Iterator<Item = std::io::Result<String>>) -> Result<Header> {
    let magic = lines
        .next()
        .ok_or_else(|| BimeronError::Parse("empty snapshot".into()))??;
    if magic.trim() != MAGIC {
        return Err(BimeronError::Parse(format!(
            "bad magic line '{}', expected '{MAGIC}'",
            magic.trim()
        )));
    }
    let hdr = lines
        .next()
        .ok_or_else(|| BimeronError::Parse("missing header line".into()))??;
    let parts: Vec<&str> = hdr.split_whitespace().collect();
    if parts.len() != 4 {
        return Err(BimeronError::Parse(format!("bad header '{hdr}'")));
    }
    let kind: DomainKind = parts[0].parse()?;
    let n: usize = parts[1]
        .parse()
        .map_err(|_| BimeronError::Parse(format!("bad n '{}'", parts[1])))?;
    let h: f64 = parts[2]
        .parse()
        .map_err(|_| BimeronError::Parse(format!("bad h '{}'", parts[2])))?;
    let components: usize = parts[3]
        .parse()
        .map_err(|_| BimeronError::Parse(format!("bad component count '{}'", parts[3])))?;
    let grid = make_grid(kind, n)?;
    if (grid.h - h).abs() > 1e-12 * grid.h {
        return Err(BimeronError::Parse(format!(
            "inconsistent spacing: file {h}, derived {}",
            grid.h
        )));
    }
    Ok(Header { grid, components })
}

pub fn load_sphere_field(path: &Path) -> Result<SphereField> {
    let mut lines = BufReader::new(std::fs::File::open(path)?).lines();
    let hdr = read_header(&mut lines)?;
    if hdr.components != 3 {
        return Err(BimeronError::Parse(format!(
            "expected 3 components, snapshot has {}",
            hdr.components
        )));
    }
    let g = hdr.grid;
    let n = g.n;
    let mut values = vec![[f64::NAN; 3]; n * n];
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let p: Vec<&str> = line.split_whitespace().collect();
        if p.len() != 5 {
            return Err(BimeronError::Parse(format!("bad node line '{line}'")));
        }
        let i: usize = p[0]
            .parse()
            .map_err(|_| BimeronError::Parse(format!("bad index '{}'", p[0])))?;
        let j: usize = p[1]
            .parse()
            .map_err(|_| BimeronError::Parse(format!("bad index '{}'", p[1])))?;
        if i >= n || j >= n {
            return Err(BimeronError::Parse(format!("index ({i},{j}) out of range")));
        }
        let mut v = [0.0; 3];
        for (k, s) in p[2..].iter().enumerate() {
            v[k] = s
                .parse()
                .map_err(|_| BimeronError::Parse(format!("bad value '{s}'")))?;
        }
        values[g.idx(i, j)] = v;
    }
    for j in 0..n {
        for i in 0..n {
            let idx = g.idx(i, j);
            if g.active[idx] && values[idx][0].is_nan() {
                return Err(BimeronError::Parse(format!(
                    "missing value for active node ({i},{j})"
                )));
            }
        }
    }
    fill_halo(&g, &mut values);
    Ok(SphereField { grid: g, values })
}

pub fn load_circle_field(path: &Path) -> Result<CircleField> {
    let mut lines = BufReader::new(std::fs::File::open(path)?).lines();
    let hdr = read_header(&mut lines)?;
    if hdr.components != 2 {
        return Err(BimeronError::Parse(format!(
            "expected 2 components, snapshot has {}",
            hdr.components
        )));
    }
    let g = hdr.grid;
    let n = g.n;
    let mut values = vec![[f64::NAN; 2]; n * n];
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let p: Vec<&str> = line.split_whitespace().collect();
        if p.len() != 4 {
            return Err(BimeronError::Parse(format!("bad node line '{line}'")));
        }
        let i: usize = p[0]
            .parse()
            .map_err(|_| BimeronError::Parse(format!("bad index '{}'", p[0])))?;
        let j: usize = p[1]
            .parse()
            .map_err(|_| BimeronError::Parse(format!("bad index '{}'", p[1])))?;
        if i >= n || j >= n {
            return Err(BimeronError::Parse(format!("index ({i},{j}) out of range")));
        }
        let v0: f64 = p[2]
            .parse()
            .map_err(|_| BimeronError::Parse(format!("bad value '{}'", p[2])))?;
        let v1: f64 = p[3]
            .parse()
            .map_err(|_| BimeronError::Parse(format!("bad value '{}'", p[3])))?;
        values[g.idx(i, j)] = [v0, v1];
    }
    if values.iter().any(|v| v[0].is_nan()) {
        return Err(BimeronError::Parse("missing node values".into()));
    }
    Ok(CircleField { grid: g, values })
}

/// Inactive halo nodes get the nearest active value in their row; rim
/// diagnostics interpolate through them.
fn fill_halo(g: &DomainGrid, values: &mut [[f64; 3]]) {
    let n = g.n;
    for j in 0..n {
        let row_active: Vec<usize> = (0..n).filter(|&i| g.active[g.idx(i, j)]).collect();
        if row_active.is_empty() {
            continue;
        }
        for i in 0..n {
            let idx = g.idx(i, j);
            if !g.active[idx] {
                let nearest = *row_active
                    .iter()
                    .min_by_key(|&&k| k.abs_diff(i))
                    .unwrap();
                values[idx] = values[g.idx(nearest, j)];
            }
        }
    }
}

/// Write a JSON sidecar next to a snapshot (or any artifact).
pub fn save_sidecar(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| BimeronError::Parse(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}
