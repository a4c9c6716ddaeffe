use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::{GadgetSpec, GraphError, Result};

/// Measurement assigned to a vertex: an XY-plane angle from {0, π/4, π/2},
/// or a computational-basis readout for the last column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasurementRole {
    #[serde(rename = "0")]
    Xy0,
    #[serde(rename = "pi/4")]
    XyPi4,
    #[serde(rename = "pi/2")]
    XyPi2,
    #[serde(rename = "output")]
    OutputZ,
}

impl MeasurementRole {
    pub fn angle(self) -> Option<f64> {
        match self {
            MeasurementRole::Xy0 => Some(0.0),
            MeasurementRole::XyPi4 => Some(FRAC_PI_4),
            MeasurementRole::XyPi2 => Some(FRAC_PI_2),
            MeasurementRole::OutputZ => None,
        }
    }

    pub fn is_output(self) -> bool {
        self == MeasurementRole::OutputZ
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VertexKind {
    /// Part of a two-wire gadget.
    Gadget,
    /// Wire not paired in this column.
    Idle,
    /// Interior of a linear cluster replacing a long-range edge.
    Link,
    Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vertex {
    /// Wire index; link vertices use `n + lane`.
    pub row: usize,
    pub col: usize,
    pub sub: usize,
    pub kind: VertexKind,
    pub role: MeasurementRole,
}

/// Measurement-pattern graph on `n` wires and `k` columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    n: usize,
    k: usize,
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize)>,
}

impl GraphSpec {
    /// Validates the structural invariants: exactly `n` outputs, a simple
    /// undirected edge set and a connected graph.
    pub fn new(n: usize, k: usize, vertices: Vec<Vertex>, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::assemble(n, k, vertices, edges, true)
    }

    /// Same checks as [`GraphSpec::new`] except connectivity. Such specs can be
    /// scheduled but not sampled meaningfully as one pattern.
    pub fn new_allow_disconnected(n: usize, k: usize, vertices: Vec<Vertex>, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::assemble(n, k, vertices, edges, false)
    }

    fn assemble(n: usize, k: usize, vertices: Vec<Vertex>, edges: Vec<(usize, usize)>, connected: bool) -> Result<Self> {
        let nv = vertices.len();
        let outputs = vertices.iter().filter(|v| v.role.is_output()).count();
        if outputs != n {
            return Err(GraphError::Invalid(format!("{outputs} output vertices, expected {n}")));
        }
        let mut seen = BTreeSet::new();
        let mut norm = Vec::with_capacity(edges.len());
        for &(a, b) in &edges {
            if a >= nv || b >= nv {
                return Err(GraphError::Invalid(format!("edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(GraphError::Invalid(format!("self-loop at {a}")));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(GraphError::Invalid(format!("duplicate edge {e:?}")));
            }
            norm.push(e);
        }
        let spec = GraphSpec { n, k, vertices, edges: norm };
        if connected && !spec.connected() {
            return Err(GraphError::Invalid("graph is not connected".into()));
        }
        Ok(spec)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Non-output vertices in index order; their outcomes form `s`.
    pub fn measured_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&i| !self.vertices[i].role.is_output()).collect()
    }

    /// Output vertices in index order; their outcomes form `x`.
    pub fn output_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&i| self.vertices[i].role.is_output()).collect()
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        self.connected()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn count_role(&self, role: MeasurementRole) -> usize {
        self.vertices.iter().filter(|v| v.role == role).count()
    }

    fn connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let adj = self.neighbors();
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Relabels vertices by `perm` (new index of old vertex `i` is `perm[i]`).
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let mut vertices = self.vertices.clone();
        for (old, &new) in perm.iter().enumerate() {
            vertices[new] = self.vertices[old];
        }
        let edges = self.edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        GraphSpec::new(self.n, self.k, vertices, edges)
    }

    /// Same graph with the edge list in a different order.
    pub fn with_edge_order(&self, order: &[usize]) -> Result<Self> {
        let edges = order.iter().map(|&i| (self.edges[i].1, self.edges[i].0)).collect();
        GraphSpec::new(self.n, self.k, self.vertices.clone(), edges)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrickworkOptions {
    /// Interior vertices of each cluster that replaces a wrap-around edge.
    pub link_length: usize,
}

impl Default for BrickworkOptions {
    fn default() -> Self {
        BrickworkOptions { link_length: 12 }
    }
}

/// Wire pairs `(upper, lower)` coupled in gadget column `col`, and whether the
/// pair wraps around the boundary.
pub fn column_pairs(n: usize, col: usize) -> Vec<(usize, usize, bool)> {
    if col % 2 == 0 {
        (0..n.saturating_sub(1)).step_by(2).map(|r| (r, r + 1, false)).collect()
    } else if n == 2 {
        vec![(1, 0, false)]
    } else {
        let mut pairs: Vec<_> = (1..n.saturating_sub(1)).step_by(2).map(|r| (r, r + 1, false)).collect();
        if n % 2 == 0 && n >= 4 {
            pairs.push((n - 1, 0, true));
        }
        pairs
    }
}

/// Tiles `gadget` over `n` wires and `k − 1` gadget columns followed by an output column.
pub fn build_brickwork_graph(n: usize, k: usize, gadget: &GadgetSpec) -> Result<GraphSpec> {
    build_brickwork_graph_with(n, k, gadget, BrickworkOptions::default())
}

pub fn build_brickwork_graph_with(n: usize, k: usize, gadget: &GadgetSpec, opts: BrickworkOptions) -> Result<GraphSpec> {
    let (vertices, edges) = brickwork_parts(n, k, gadget, opts)?;
    GraphSpec::new(n, k, vertices, edges)
}

/// Vertices and edges of the tiling without the connectivity check, for
/// callers that only schedule the pattern (some small tilings are disconnected).
pub fn brickwork_parts(n: usize, k: usize, gadget: &GadgetSpec, opts: BrickworkOptions) -> Result<(Vec<Vertex>, Vec<(usize, usize)>)> {
    if n < 1 || k < 2 {
        return Err(GraphError::TooSmall { n, k });
    }
    let layout = gadget.layout()?;
    if opts.link_length == 0 {
        return Err(GraphError::Invalid("link length must be positive".into()));
    }
    let w = layout.width;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut grid: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for col in 0..k - 1 {
        let pairs = column_pairs(n, col);
        let mut role_of = vec![None; n];
        for &(up, down, _) in &pairs {
            role_of[up] = Some(0);
            role_of[down] = Some(1);
        }
        for sub in 0..w {
            for (row, slot) in role_of.iter().enumerate() {
                let (kind, role) = match slot {
                    Some(r) => (VertexKind::Gadget, layout.roles[*r][sub]),
                    None => (VertexKind::Idle, MeasurementRole::Xy0),
                };
                grid.insert((row, col, sub), vertices.len());
                vertices.push(Vertex { row, col, sub, kind, role });
            }
        }
        let mut lane = 0;
        for &(up, down, wraps) in &pairs {
            for &s in &layout.vertical {
                let a = grid[&(up, col, s)];
                let b = grid[&(down, col, s)];
                if !wraps {
                    edges.push((a, b));
                    continue;
                }
                let mut prev = a;
                for j in 0..opts.link_length {
                    let id = vertices.len();
                    vertices.push(Vertex {
                        row: n + lane,
                        col,
                        sub: j,
                        kind: VertexKind::Link,
                        role: MeasurementRole::Xy0,
                    });
                    edges.push((prev, id));
                    prev = id;
                }
                edges.push((prev, b));
                lane += 1;
            }
        }
    }
    for row in 0..n {
        grid.insert((row, k - 1, 0), vertices.len());
        vertices.push(Vertex { row, col: k - 1, sub: 0, kind: VertexKind::Output, role: MeasurementRole::OutputZ });
    }
    for row in 0..n {
        let mut prev: Option<usize> = None;
        for col in 0..k {
            let subs = if col == k - 1 { 1 } else { w };
            for sub in 0..subs {
                let id = grid[&(row, col, sub)];
                if let Some(p) = prev {
                    edges.push((p, id));
                }
                prev = Some(id);
            }
        }
    }
    Ok((vertices, edges))
}

/// Number of vertices [`build_brickwork_graph_with`] creates.
pub fn brickwork_vertex_count(n: usize, k: usize, width: usize, vertical: usize, link_length: usize) -> usize {
    let wraps: usize = (0..k.saturating_sub(1)).map(|c| column_pairs(n, c).iter().filter(|p| p.2).count()).sum();
    n * (k - 1) * width + n + wraps * vertical * link_length
}

/// Replaces every π/2 vertex by a three-vertex wire segment (π/4, 0, π/4) and
/// pads every other vertex at the same column position with a segment that
/// implements the same single-wire operation (role, 0, 0). Edges leaving the
/// wire attach to the first vertex of a segment.
pub fn substitute_gbprime(spec: &GraphSpec) -> Result<GraphSpec> {
    let n = spec.n;
    let k = spec.k;
    if k < 2 {
        return Err(GraphError::NotTiling("need at least one gadget column".into()));
    }
    let mut width = vec![None::<usize>; k - 1];
    let mut cells: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for (i, v) in spec.vertices.iter().enumerate() {
        match v.kind {
            VertexKind::Gadget | VertexKind::Idle => {
                if v.row >= n || v.col >= k - 1 || v.role.is_output() {
                    return Err(GraphError::NotTiling(format!("vertex {i} lies outside the gadget grid")));
                }
                if cells.insert((v.row, v.col, v.sub), i).is_some() {
                    return Err(GraphError::NotTiling(format!("two vertices at {:?}", (v.row, v.col, v.sub))));
                }
            }
            VertexKind::Output => {
                if v.col != k - 1 || v.sub != 0 || !v.role.is_output() || v.row >= n {
                    return Err(GraphError::NotTiling(format!("output vertex {i} is not in the last column")));
                }
                cells.insert((v.row, v.col, 0), i);
            }
            VertexKind::Link => {
                if v.role != MeasurementRole::Xy0 {
                    return Err(GraphError::NotTiling(format!("link vertex {i} is not measured at angle 0")));
                }
            }
        }
    }
    for col in 0..k - 1 {
        for row in 0..n {
            let count = cells.range((row, col, 0)..(row, col + 1, 0)).count();
            match width[col] {
                None => width[col] = Some(count),
                Some(w) if w != count => {
                    return Err(GraphError::NotTiling(format!("column {col} has ragged wires")));
                }
                _ => {}
            }
            for sub in 0..count {
                if !cells.contains_key(&(row, col, sub)) {
                    return Err(GraphError::NotTiling(format!("column {col} wire {row} skips sub {sub}")));
                }
            }
        }
    }
    for row in 0..n {
        if !cells.contains_key(&(row, k - 1, 0)) {
            return Err(GraphError::NotTiling(format!("wire {row} has no output")));
        }
    }

    // New sub offset of every (col, sub) position and whether it expands.
    let mut expand = BTreeMap::new();
    for col in 0..k - 1 {
        let w = width[col].unwrap_or(0);
        let mut next = 0;
        for sub in 0..w {
            let grow = (0..n).any(|row| spec.vertices[cells[&(row, col, sub)]].role == MeasurementRole::XyPi2);
            expand.insert((col, sub), (next, grow));
            next += if grow { 3 } else { 1 };
        }
    }

    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut first = vec![0usize; spec.vertices.len()];
    let mut last = vec![0usize; spec.vertices.len()];
    for (i, v) in spec.vertices.iter().enumerate() {
        let grid_vertex = matches!(v.kind, VertexKind::Gadget | VertexKind::Idle);
        let (offset, grow) = if grid_vertex { expand[&(v.col, v.sub)] } else { (v.sub, false) };
        let roles: Vec<MeasurementRole> = if !grow {
            vec![v.role]
        } else if v.role == MeasurementRole::XyPi2 {
            vec![MeasurementRole::XyPi4, MeasurementRole::Xy0, MeasurementRole::XyPi4]
        } else {
            vec![v.role, MeasurementRole::Xy0, MeasurementRole::Xy0]
        };
        first[i] = vertices.len();
        for (j, role) in roles.into_iter().enumerate() {
            let id = vertices.len();
            vertices.push(Vertex { sub: offset + j, role, ..*v });
            if j > 0 {
                edges.push((id - 1, id));
            }
        }
        last[i] = vertices.len() - 1;
    }
    for &(a, b) in &spec.edges {
        let (va, vb) = (&spec.vertices[a], &spec.vertices[b]);
        let on_wire = va.kind != VertexKind::Link && vb.kind != VertexKind::Link && va.row == vb.row;
        if on_wire {
            let (early, late) = if (va.col, va.sub) < (vb.col, vb.sub) { (a, b) } else { (b, a) };
            edges.push((last[early], first[late]));
        } else {
            edges.push((first[a], first[b]));
        }
    }
    GraphSpec::assemble(n, k, vertices, edges, spec.connected())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_instance_is_a_two_vertex_path() {
        let g = build_brickwork_graph(1, 2, &GadgetSpec::single_wire()).unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.edges(), &[(0, 1)]);
        assert_eq!(g.vertices()[0].role, MeasurementRole::Xy0);
        assert_eq!(g.vertices()[1].role, MeasurementRole::OutputZ);
    }

    #[test]
    fn too_small_rejected() {
        assert!(matches!(build_brickwork_graph(0, 3, &GadgetSpec::default_gb()), Err(GraphError::TooSmall { .. })));
        assert!(matches!(build_brickwork_graph(2, 1, &GadgetSpec::default_gb()), Err(GraphError::TooSmall { .. })));
    }

    #[test]
    fn pairs_alternate() {
        assert_eq!(column_pairs(4, 0), vec![(0, 1, false), (2, 3, false)]);
        assert_eq!(column_pairs(4, 1), vec![(1, 2, false), (3, 0, true)]);
        assert_eq!(column_pairs(3, 1), vec![(1, 2, false)]);
        assert_eq!(column_pairs(2, 1), vec![(1, 0, false)]);
        assert!(column_pairs(1, 0).is_empty());
    }

    #[test]
    fn validation_catches_bad_specs() {
        let v = |role| Vertex { row: 0, col: 0, sub: 0, kind: VertexKind::Gadget, role };
        assert!(GraphSpec::new(1, 2, vec![v(MeasurementRole::Xy0), v(MeasurementRole::OutputZ)], vec![(0, 0)]).is_err());
        assert!(GraphSpec::new(1, 2, vec![v(MeasurementRole::Xy0), v(MeasurementRole::OutputZ)], vec![]).is_err());
        assert!(GraphSpec::new(2, 2, vec![v(MeasurementRole::Xy0), v(MeasurementRole::OutputZ)], vec![(0, 1)]).is_err());
    }
}
