use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{GraphError, MeasurementRole, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GadgetVertex {
    pub id: String,
    /// 0 for the upper wire of the pair, 1 for the lower.
    pub row: usize,
    pub sub: usize,
    pub role: MeasurementRole,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ports {
    pub west: [String; 2],
    pub east: [String; 2],
}

/// Two-wire tile of the brickwork pattern, loaded from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GadgetSpec {
    pub name: String,
    pub vertices: Vec<GadgetVertex>,
    pub edges: Vec<[String; 2]>,
    pub ports: Ports,
}

/// Validated tile: both wires have `width` vertices joined in a chain, plus
/// vertical edges at the listed sub-indices.
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetLayout {
    pub width: usize,
    pub roles: [Vec<MeasurementRole>; 2],
    pub vertical: Vec<usize>,
}

const DEFAULT_JSON: &str = include_str!("../gadgets/gb_default.json");
const TRIVIAL_JSON: &str = include_str!("../gadgets/trivial.json");

impl GadgetSpec {
    /// Shipped two-wire tile with π/2, π/4 and 0 roles.
    pub fn default_gb() -> Self {
        serde_json::from_str(DEFAULT_JSON).expect("shipped gadget parses")
    }

    /// Width-one tile with no coupling: every wire is a plain XY(0) chain.
    pub fn single_wire() -> Self {
        serde_json::from_str(TRIVIAL_JSON).expect("shipped gadget parses")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GraphError::Gadget(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GraphError::Gadget(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn layout(&self) -> Result<GadgetLayout> {
        let bad = |msg: String| Err(GraphError::Gadget(format!("{}: {msg}", self.name)));
        let mut by_id = HashMap::new();
        let mut cells: [Vec<Option<MeasurementRole>>; 2] = [Vec::new(), Vec::new()];
        for v in &self.vertices {
            if v.row > 1 {
                return bad(format!("vertex {} has row {} (only 0 and 1 allowed)", v.id, v.row));
            }
            if v.role == MeasurementRole::OutputZ {
                return bad(format!("vertex {} cannot carry the output role", v.id));
            }
            if by_id.insert(v.id.clone(), (v.row, v.sub)).is_some() {
                return bad(format!("duplicate vertex id {}", v.id));
            }
            let row = &mut cells[v.row];
            if row.len() <= v.sub {
                row.resize(v.sub + 1, None);
            }
            if row[v.sub].replace(v.role).is_some() {
                return bad(format!("two vertices at row {} sub {}", v.row, v.sub));
            }
        }
        let width = cells[0].len();
        if width == 0 || cells[1].len() != width {
            return bad("both wires need the same non-zero width".into());
        }
        let roles: [Vec<MeasurementRole>; 2] = [0, 1].map(|r| cells[r].iter().map(|c| c.unwrap_or(MeasurementRole::Xy0)).collect());
        if cells.iter().any(|row| row.iter().any(Option::is_none)) {
            return bad("sub-indices must be contiguous from 0".into());
        }
        let mut chain = BTreeSet::new();
        let mut vertical = BTreeSet::new();
        for [a, b] in &self.edges {
            let (Some(&pa), Some(&pb)) = (by_id.get(a), by_id.get(b)) else {
                return bad(format!("edge {a}-{b} names an unknown vertex"));
            };
            let (lo, hi) = if pa <= pb { (pa, pb) } else { (pb, pa) };
            if lo.0 == hi.0 && hi.1 == lo.1 + 1 {
                if !chain.insert(lo) {
                    return bad(format!("duplicate edge {a}-{b}"));
                }
            } else if lo.0 != hi.0 && lo.1 == hi.1 {
                if !vertical.insert(lo.1) {
                    return bad(format!("duplicate edge {a}-{b}"));
                }
            } else {
                return bad(format!("edge {a}-{b} is not nearest-neighbour within the tile"));
            }
        }
        for r in 0..2 {
            for s in 0..width - 1 {
                if !chain.contains(&(r, s)) {
                    return bad(format!("wire {r} is broken between sub {s} and {}", s + 1));
                }
            }
        }
        for r in 0..2 {
            let west = by_id.get(&self.ports.west[r]).copied();
            let east = by_id.get(&self.ports.east[r]).copied();
            if west != Some((r, 0)) || east != Some((r, width - 1)) {
                return bad(format!("ports of wire {r} must be its first and last vertex"));
            }
        }
        Ok(GadgetLayout { width, roles, vertical: vertical.into_iter().collect() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_gadgets_validate() {
        let l = GadgetSpec::default_gb().layout().unwrap();
        assert_eq!(l.width, 2);
        assert_eq!(l.vertical, vec![0]);
        let roles: BTreeSet<_> = l.roles.iter().flatten().copied().collect();
        assert!(roles.contains(&MeasurementRole::Xy0));
        assert!(roles.contains(&MeasurementRole::XyPi4));
        assert!(roles.contains(&MeasurementRole::XyPi2));
        let t = GadgetSpec::single_wire().layout().unwrap();
        assert_eq!(t.width, 1);
        assert!(t.vertical.is_empty());
    }

    #[test]
    fn diagonal_edge_rejected() {
        let mut g = GadgetSpec::default_gb();
        g.edges.push(["t0".into(), "b1".into()]);
        assert!(g.layout().is_err());
    }

    #[test]
    fn broken_wire_rejected() {
        let mut g = GadgetSpec::default_gb();
        g.edges.retain(|e| e != &["b0".to_string(), "b1".to_string()]);
        assert!(g.layout().is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = DEFAULT_JSON.replacen("\"name\"", "\"extra\": 1, \"name\"", 1);
        assert!(GadgetSpec::from_json(&text).is_err());
    }
}
