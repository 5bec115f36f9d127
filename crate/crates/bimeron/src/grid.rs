//! Lattice domains and the fields living on them.
//!
//! Two domains are supported: the unit disk, discretized as a masked square
//! lattice on [-1,1]^2 with a Dirichlet staircase rim, and the flat torus
//! [0,1)^2 with periodic wrap. Fields store one value per lattice node in
//! row-major order (`idx = j*n + i`); on the disk, nodes outside the unit
//! circle keep a halo value so that interpolation near the rim stays smooth,
//! but they never contribute to energies or gradients.

use std::sync::Arc;

use crate::error::{BimeronError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DomainKind {
    Disk,
    Torus,
}

impl std::fmt::Display for DomainKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DomainKind::Disk => write!(f, "disk"),
            DomainKind::Torus => write!(f, "torus"),
        }
    }
}

impl std::str::FromStr for DomainKind {
    type Err = BimeronError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "disk" => Ok(DomainKind::Disk),
            "torus" => Ok(DomainKind::Torus),
            other => Err(BimeronError::Parse(format!("unknown domain kind '{other}'"))),
        }
    }
}

/// Uniform lattice over the disk (masked) or torus (periodic).
#[derive(Debug, Clone)]
pub struct DomainGrid {
    pub kind: DomainKind,
    pub n: usize,
    pub h: f64,
    /// Disk: |x| <= 1. Torus: all nodes.
    pub active: Vec<bool>,
    /// Disk: active nodes with an inactive 4-neighbor or |x| >= 1-h. Torus: empty.
    pub boundary: Vec<bool>,
    /// active && !boundary
    pub interior: Vec<bool>,
}

/// Build a lattice domain. Disk covers [-1,1]^2 with h = 2/(n-1);
/// torus covers [0,1)^2 with h = 1/n.
pub fn make_grid(kind: DomainKind, n: usize) -> Result<Arc<DomainGrid>> {
    if n < 8 {
        return Err(BimeronError::GridTooCoarse(n));
    }
    let h = match kind {
        DomainKind::Disk => 2.0 / (n as f64 - 1.0),
        DomainKind::Torus => 1.0 / n as f64,
    };
    let mut active = vec![true; n * n];
    let mut boundary = vec![false; n * n];
    if kind == DomainKind::Disk {
        for j in 0..n {
            for i in 0..n {
                let (x, y) = disk_coord(n, i, j);
                active[j * n + i] = x * x + y * y <= 1.0;
            }
        }
        for j in 0..n {
            for i in 0..n {
                let idx = j * n + i;
                if !active[idx] {
                    continue;
                }
                let (x, y) = disk_coord(n, i, j);
                let near_rim = (x * x + y * y).sqrt() >= 1.0 - h;
                let edge_of_lattice = i == 0 || i == n - 1 || j == 0 || j == n - 1;
                let inactive_nb = edge_of_lattice
                    || !active[idx - 1]
                    || !active[idx + 1]
                    || !active[idx - n]
                    || !active[idx + n];
                boundary[idx] = near_rim || inactive_nb;
            }
        }
    }
    let interior = active
        .iter()
        .zip(&boundary)
        .map(|(&a, &b)| a && !b)
        .collect();
    Ok(Arc::new(DomainGrid {
        kind,
        n,
        h,
        active,
        boundary,
        interior,
    }))
}

/// Disk node coordinate; exactly antisymmetric under i -> n-1-i.
#[inline]
pub fn disk_coord(n: usize, i: usize, j: usize) -> (f64, f64) {
    let d = (n - 1) as f64;
    (
        (2.0 * i as f64 - d) / d,
        (2.0 * j as f64 - d) / d,
    )
}

#[inline]
pub fn torus_coord(n: usize, i: usize, j: usize) -> (f64, f64) {
    (i as f64 / n as f64, j as f64 / n as f64)
}

impl DomainGrid {
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    pub fn coord(&self, i: usize, j: usize) -> (f64, f64) {
        match self.kind {
            DomainKind::Disk => disk_coord(self.n, i, j),
            DomainKind::Torus => torus_coord(self.n, i, j),
        }
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// Unordered nearest-neighbor edges with both endpoints active, as
    /// (from, to) index pairs. Torus edges wrap; each edge appears once.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        let mut out = Vec::with_capacity(2 * n * n);
        match self.kind {
            DomainKind::Torus => {
                for j in 0..n {
                    for i in 0..n {
                        let p = self.idx(i, j);
                        out.push((p, self.idx((i + 1) % n, j)));
                        out.push((p, self.idx(i, (j + 1) % n)));
                    }
                }
            }
            DomainKind::Disk => {
                for j in 0..n {
                    for i in 0..n {
                        let p = self.idx(i, j);
                        if !self.active[p] {
                            continue;
                        }
                        if i + 1 < n && self.active[p + 1] {
                            out.push((p, p + 1));
                        }
                        if j + 1 < n && self.active[p + n] {
                            out.push((p, p + n));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Discrete magnetization: one unit 3-vector per node.
#[derive(Debug, Clone)]
pub struct SphereField {
    pub grid: Arc<DomainGrid>,
    pub values: Vec<[f64; 3]>,
}

/// In-plane field on the torus: one unit 2-vector per node.
#[derive(Debug, Clone)]
pub struct CircleField {
    pub grid: Arc<DomainGrid>,
    pub values: Vec<[f64; 2]>,
}

#[inline]
pub fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[inline]
pub fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let r = norm3(v);
    [v[0] / r, v[1] / r, v[2] / r]
}

impl SphereField {
    /// Constant in-plane field (cos phase, sin phase, 0) on all nodes.
    pub fn constant(grid: Arc<DomainGrid>, phase: f64) -> Self {
        let v = [phase.cos(), phase.sin(), 0.0];
        let values = vec![v; grid.n * grid.n];
        SphereField { grid, values }
    }

    /// Worst |1 - |m|| over active nodes.
    pub fn unit_norm_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (idx, v) in self.values.iter().enumerate() {
            if self.grid.active[idx] {
                worst = worst.max((norm3(*v) - 1.0).abs());
            }
        }
        worst
    }
}

impl CircleField {
    pub fn constant(grid: Arc<DomainGrid>, phase: f64) -> Result<Self> {
        if grid.kind != DomainKind::Torus {
            return Err(BimeronError::DomainMismatch(
                "CircleField requires a torus grid".into(),
            ));
        }
        let v = [phase.cos(), phase.sin()];
        let values = vec![v; grid.n * grid.n];
        Ok(CircleField { grid, values })
    }

    pub fn unit_norm_defect(&self) -> f64 {
        self.values
            .iter()
            .map(|v| ((v[0] * v[0] + v[1] * v[1]).sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Evaluate `map(x, y)` at every node, renormalizing defensively. On the disk,
/// boundary nodes and the inactive halo are overwritten with
/// (cos phase, sin phase, 0) when `boundary_phase` is given.
pub fn sample_field<F>(
    grid: Arc<DomainGrid>,
    map: F,
    boundary_phase: Option<f64>,
) -> Result<SphereField>
where
    F: Fn(f64, f64) -> [f64; 3],
{
    let n = grid.n;
    let mut values = vec![[0.0; 3]; n * n];
    for j in 0..n {
        for i in 0..n {
            let idx = grid.idx(i, j);
            let (x, y) = grid.coord(i, j);
            let v = map(x, y);
            let r = norm3(v);
            if !(r > 1e-14) || !r.is_finite() {
                return Err(BimeronError::UndefinedDirection(i, j));
            }
            values[idx] = [v[0] / r, v[1] / r, v[2] / r];
        }
    }
    if let Some(phase) = boundary_phase {
        if grid.kind == DomainKind::Disk {
            let bv = [phase.cos(), phase.sin(), 0.0];
            for idx in 0..n * n {
                if !grid.active[idx] || grid.boundary[idx] {
                    values[idx] = bv;
                }
            }
        }
    }
    Ok(SphereField { grid, values })
}

/// Evaluate a unit 2-vector map on a torus grid.
pub fn sample_circle_field<F>(grid: Arc<DomainGrid>, map: F) -> Result<CircleField>
where
    F: Fn(f64, f64) -> [f64; 2],
{
    if grid.kind != DomainKind::Torus {
        return Err(BimeronError::DomainMismatch(
            "CircleField requires a torus grid".into(),
        ));
    }
    let n = grid.n;
    let mut values = vec![[0.0; 2]; n * n];
    for j in 0..n {
        for i in 0..n {
            let (x, y) = grid.coord(i, j);
            let v = map(x, y);
            let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
            if !(r > 1e-14) || !r.is_finite() {
                return Err(BimeronError::UndefinedDirection(i, j));
            }
            values[grid.idx(i, j)] = [v[0] / r, v[1] / r];
        }
    }
    Ok(CircleField { grid, values })
}
