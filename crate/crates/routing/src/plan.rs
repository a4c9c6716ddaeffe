use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{Result, RoutingError};

/// Grid plus source qubits. Qubits `0..p` are the sources, then the grid
/// vertices row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingGrid {
    pub p: usize,
    pub m: usize,
    pub rows: usize,
    pub cols: usize,
}

impl RoutingGrid {
    /// Standard `(2p-1) x 2m` layout.
    pub fn new(p: usize, m: usize) -> Self {
        RoutingGrid { p, m, rows: (2 * p).saturating_sub(1), cols: 2 * m }
    }

    /// Arbitrary shape, for hand-built plans.
    pub fn with_shape(p: usize, m: usize, rows: usize, cols: usize) -> Self {
        RoutingGrid { p, m, rows, cols }
    }

    pub fn num_vertices(&self) -> usize {
        self.rows * self.cols
    }

    pub fn num_qubits(&self) -> usize {
        self.p + self.num_vertices()
    }

    pub fn contains(&self, (r, c): (usize, usize)) -> bool {
        r < self.rows && c < self.cols
    }

    pub fn vertex_qubit(&self, (r, c): (usize, usize)) -> usize {
        self.p + r * self.cols + c
    }

    pub fn qubit_vertex(&self, q: usize) -> Option<(usize, usize)> {
        (q >= self.p && q < self.num_qubits()).then(|| ((q - self.p) / self.cols, (q - self.p) % self.cols))
    }

    /// Grid vertex that source `r` hangs off, if it lies on the grid.
    pub fn attachment(&self, source: usize) -> Option<(usize, usize)> {
        let v = (2 * source, 0);
        (source < self.p && self.contains(v)).then_some(v)
    }

    pub fn target(&self, i: usize) -> (usize, usize) {
        (2 * i, self.cols.saturating_sub(1))
    }

    pub fn grid_neighbors(&self, (r, c): (usize, usize)) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(4);
        if r > 0 {
            out.push((r - 1, c));
        }
        if c > 0 {
            out.push((r, c - 1));
        }
        if r + 1 < self.rows {
            out.push((r + 1, c));
        }
        if c + 1 < self.cols {
            out.push((r, c + 1));
        }
        out
    }

    /// Neighbours of qubit `q` in the full graph (grid edges plus source links).
    pub fn neighbors(&self, q: usize) -> Vec<usize> {
        if q < self.p {
            return self.attachment(q).map(|v| vec![self.vertex_qubit(v)]).unwrap_or_default();
        }
        let v = self.qubit_vertex(q).expect("qubit in range");
        let mut out: Vec<usize> = self.grid_neighbors(v).into_iter().map(|u| self.vertex_qubit(u)).collect();
        if v.1 == 0 && v.0 % 2 == 0 && v.0 / 2 < self.p {
            out.push(v.0 / 2);
        }
        out
    }

    /// Every edge once, sources first.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = (0..self.p).filter_map(|s| self.attachment(s).map(|v| (s, self.vertex_qubit(v)))).collect();
        for r in 0..self.rows {
            for c in 0..self.cols {
                let q = self.vertex_qubit((r, c));
                if c + 1 < self.cols {
                    out.push((q, q + 1));
                }
                if r + 1 < self.rows {
                    out.push((q, q + self.cols));
                }
            }
        }
        out
    }
}

/// A wire from a source, through its attachment vertex, to an output vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutePath {
    pub source: usize,
    /// Grid vertices from the attachment to the output, inclusive.
    pub vertices: Vec<(usize, usize)>,
}

impl RoutePath {
    /// Edges including the source link.
    pub fn length(&self) -> usize {
        self.vertices.len()
    }

    /// X-measured grid vertices: everything but the output.
    pub fn interior(&self) -> &[(usize, usize)] {
        &self.vertices[..self.vertices.len().saturating_sub(1)]
    }

    pub fn output(&self) -> Option<(usize, usize)> {
        self.vertices.last().copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    /// Measured in X: teleports along a wire.
    X,
    /// Measured in Z: removes the vertex.
    Z,
    /// Left unmeasured: a wire output.
    O,
}

impl Basis {
    pub fn to_char(self) -> char {
        match self {
            Basis::X => 'X',
            Basis::Z => 'Z',
            Basis::O => 'O',
        }
    }
}

/// What the byproduct of one wire depends on: the chain of measured qubits
/// and, for each chain qubit, the Z-measured neighbours whose outcomes kick
/// a phase onto it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireFrameRule {
    /// Source qubit, then the path's grid qubits; the last is the output.
    pub chain: Vec<usize>,
    pub z_neighbors: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingPlan {
    pub grid: RoutingGrid,
    pub flags: Vec<bool>,
    pub paths: Vec<RoutePath>,
}

/// Routes the first `m` flagged sources. Wire `i` runs right along row
/// `2 r_i` to column `2i+1`, up that column to row `2i`, then right to the
/// output. Rows of different wires are even and distinct and their vertical
/// columns are two apart, so no grid edge joins two wires.
pub fn plan_routes(p: usize, m: usize, flags: &[bool]) -> Result<RoutingPlan> {
    if flags.len() != p {
        return Err(RoutingError::FlagLength { expected: p, found: flags.len() });
    }
    if m > p {
        return Err(RoutingError::TooManyTargets { p, m });
    }
    let found = flags.iter().filter(|&&f| f).count();
    if found < m {
        return Err(RoutingError::TooFewFlags { needed: m, found });
    }
    let grid = RoutingGrid::new(p, m);
    let last = grid.cols.saturating_sub(1);
    let paths = flags
        .iter()
        .enumerate()
        .filter(|(_, &f)| f)
        .take(m)
        .enumerate()
        .map(|(i, (r, _))| {
            let (row, top, x) = (2 * r, 2 * i, 2 * i + 1);
            let mut v: Vec<(usize, usize)> = (0..=x).map(|c| (row, c)).collect();
            v.extend((top..row).rev().map(|rr| (rr, x)));
            v.extend((x + 1..=last).map(|c| (top, c)));
            RoutePath { source: r, vertices: v }
        })
        .collect();
    Ok(RoutingPlan { grid, flags: flags.to_vec(), paths })
}

/// True iff every path is a connected in-bounds grid walk starting at its
/// source's attachment, sources and outputs are distinct, and no vertex is
/// used twice.
pub fn verify_disjoint(plan: &RoutingPlan) -> bool {
    let g = &plan.grid;
    let mut seen = HashSet::new();
    let mut sources = HashSet::new();
    for path in &plan.paths {
        if path.vertices.is_empty() || !sources.insert(path.source) || g.attachment(path.source) != path.vertices.first().copied() {
            return false;
        }
        if !plan.flags.get(path.source).copied().unwrap_or(false) {
            return false;
        }
        for (k, &v) in path.vertices.iter().enumerate() {
            if !g.contains(v) || !seen.insert(v) {
                return false;
            }
            if k > 0 {
                let u = path.vertices[k - 1];
                if u.0.abs_diff(v.0) + u.1.abs_diff(v.1) != 1 {
                    return false;
                }
            }
        }
    }
    true
}

/// [`verify_disjoint`] plus: the only grid edges between path vertices are
/// the consecutive steps of a single path. Needed for exact teleportation.
pub fn verify_isolated(plan: &RoutingPlan) -> bool {
    if !verify_disjoint(plan) {
        return false;
    }
    let owner: HashMap<(usize, usize), (usize, usize)> =
        plan.paths.iter().enumerate().flat_map(|(w, p)| p.vertices.iter().enumerate().map(move |(k, &v)| (v, (w, k)))).collect();
    owner.iter().all(|(&v, &(w, k))| {
        plan.grid.grid_neighbors(v).iter().all(|u| match owner.get(u) {
            None => true,
            Some(&(w2, k2)) => w2 == w && k2.abs_diff(k) == 1,
        })
    })
}

/// Row-major basis map over the grid vertices.
pub fn measurement_pattern(plan: &RoutingPlan) -> Vec<Basis> {
    let g = &plan.grid;
    let mut out = vec![Basis::Z; g.num_vertices()];
    for path in &plan.paths {
        for &(r, c) in path.interior() {
            out[r * g.cols + c] = Basis::X;
        }
        if let Some((r, c)) = path.output() {
            out[r * g.cols + c] = Basis::O;
        }
    }
    out
}

impl RoutingPlan {
    pub fn measurement_pattern(&self) -> Vec<Basis> {
        measurement_pattern(self)
    }

    /// Routed sources are teleported (X); the rest are discarded (Z).
    pub fn source_bases(&self) -> Vec<Basis> {
        let mut out = vec![Basis::Z; self.grid.p];
        for path in &self.paths {
            out[path.source] = Basis::X;
        }
        out
    }

    /// Basis for every qubit, sources first.
    pub fn qubit_bases(&self) -> Vec<Basis> {
        let mut out = self.source_bases();
        out.extend(self.measurement_pattern());
        out
    }

    pub fn frame_rules(&self) -> Vec<WireFrameRule> {
        let bases = self.qubit_bases();
        self.paths
            .iter()
            .map(|path| {
                let chain: Vec<usize> = std::iter::once(path.source).chain(path.vertices.iter().map(|&v| self.grid.vertex_qubit(v))).collect();
                let z_neighbors = chain.iter().map(|&q| self.grid.neighbors(q).into_iter().filter(|&u| bases[u] == Basis::Z).collect()).collect();
                WireFrameRule { chain, z_neighbors }
            })
            .collect()
    }

    /// Plain-text export: wires as coordinate lists, then the basis grid.
    pub fn to_text(&self) -> String {
        let g = &self.grid;
        let mut s = String::new();
        let _ = writeln!(s, "grid rows={} cols={} sources={} outputs={}", g.rows, g.cols, g.p, g.m);
        let flags: String = self.flags.iter().map(|&f| if f { '1' } else { '0' }).collect();
        let _ = writeln!(s, "flags {flags}");
        for (i, path) in self.paths.iter().enumerate() {
            let coords: Vec<String> = path.vertices.iter().map(|(r, c)| format!("({r},{c})")).collect();
            let _ = writeln!(s, "path {i} source {}: {}", path.source, coords.join(" "));
        }
        let _ = writeln!(s, "basis");
        let pattern = self.measurement_pattern();
        for r in 0..g.rows {
            let line: String = pattern[r * g.cols..(r + 1) * g.cols].iter().map(|b| b.to_char()).collect();
            let _ = writeln!(s, "{line}");
        }
        s
    }
}
