use std::collections::BTreeMap;

use graph_sampler::{GraphSpec, VertexKind};
use msd::MsdProtocolSpec;
use pauli_core::{CliffordCircuit, Gate};
use routing::{entangling_circuit, plan_routes};
use serde::Serialize;
use surface_code::{StabilizerKind, SurfaceCodePatch};

use crate::graph::{load_gadget, magic_vertices, schedule_graph};
use crate::{Architecture, PipelineConfig, PipelineError, Result, RunRecord};

/// CZ time slots of the routing stage: source links, even and odd
/// horizontal, even and odd vertical edges; then one slot of Hadamards.
pub const ROUTING_SLOTS: usize = 6;

/// CZ time slots of the sampled pattern. Wire edges alternate between two
/// slots and the coupling edges (with their link chains) fit in two more.
pub const GRAPH_CZ_SLOTS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepthStage {
    pub name: String,
    /// Time steps the stage occupies in the schedule.
    pub layers: usize,
    /// Steps that hold at least one operation for this instance.
    pub used: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepthReport {
    pub stages: Vec<DepthStage>,
    pub total: usize,
}

/// Feedback layers per run. Every record of the stream must agree.
pub fn interaction_audit(records: &[RunRecord]) -> Result<usize> {
    let first = records.first().ok_or_else(|| PipelineError::Schedule("no records to audit".into()))?.feedback.len();
    if let Some(r) = records.iter().find(|r| r.feedback.len() != first) {
        return Err(PipelineError::Schedule(format!("shot {} has {} feedback layers, shot {} has {first}", r.shot, r.feedback.len(), records[0].shot)));
    }
    Ok(first)
}

/// One round of stabilizer measurement on a fresh patch: ancilla per check,
/// CNOTs in support order, Hadamards around the X-type ancillas.
fn code_prep_circuit(distance: usize) -> Result<CliffordCircuit> {
    let patch = SurfaceCodePatch::new(distance)?;
    let nd = patch.num_qubits();
    let stabs = patch.stabilizers();
    let n = nd + stabs.len();
    let mut gates = Vec::new();
    let x_anc: Vec<usize> = stabs.iter().enumerate().filter(|(_, s)| s.kind == StabilizerKind::X).map(|(i, _)| nd + i).collect();
    gates.extend(x_anc.iter().map(|&a| Gate::H(a)));
    let width = stabs.iter().map(|s| s.support.len()).max().unwrap_or(0);
    for j in 0..width {
        for (i, s) in stabs.iter().enumerate() {
            if let Some(&q) = s.support.get(j) {
                gates.push(if s.kind == StabilizerKind::X { Gate::Cnot(nd + i, q) } else { Gate::Cnot(q, nd + i) });
            }
        }
    }
    gates.extend(x_anc.iter().map(|&a| Gate::H(a)));
    CliffordCircuit::from_gates(n, &gates).map_err(|e| PipelineError::Schedule(e.to_string()))
}

/// Greedy edge colouring with wire edges first, by parity of their position
/// along the wire. Returns the CZ circuit in colour order.
fn graph_cz_circuit(spec: &GraphSpec) -> Result<(usize, CliffordCircuit)> {
    let v = spec.vertices();
    let mut position = vec![usize::MAX; v.len()];
    let mut rows: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, x) in v.iter().enumerate() {
        if x.kind != VertexKind::Link {
            rows.entry(x.row).or_default().push(i);
        }
    }
    for members in rows.values_mut() {
        members.sort_by_key(|&i| (v[i].col, v[i].sub));
        for (idx, &i) in members.iter().enumerate() {
            position[i] = idx;
        }
    }
    let on_wire = |(a, b): (usize, usize)| v[a].kind != VertexKind::Link && v[b].kind != VertexKind::Link && v[a].row == v[b].row;
    let mut edges: Vec<(usize, (usize, usize))> =
        spec.edges().iter().map(|&e| (if on_wire(e) { position[e.0].min(position[e.1]) % 2 } else { 2 }, e)).collect();
    edges.sort_by_key(|&(class, _)| class);
    let mut used: Vec<Vec<usize>> = vec![Vec::new(); v.len()];
    let mut coloured: Vec<(usize, (usize, usize))> = Vec::with_capacity(edges.len());
    for (_, (a, b)) in edges {
        let c = (0..).find(|c| !used[a].contains(c) && !used[b].contains(c)).expect("a free colour exists");
        used[a].push(c);
        used[b].push(c);
        coloured.push((c, (a, b)));
    }
    coloured.sort_by_key(|&(c, _)| c);
    let colours = coloured.iter().map(|&(c, _)| c + 1).max().unwrap_or(0);
    let gates: Vec<Gate> = coloured.into_iter().map(|(_, (a, b))| Gate::Cz(a, b)).collect();
    let circuit = CliffordCircuit::from_gates(v.len(), &gates).map_err(|e| PipelineError::Schedule(e.to_string()))?;
    Ok((colours, circuit))
}

/// Layer count of the quantum schedule: preparation, code-state preparation
/// (distance > 1), each distillation circuit, each routing stage and the
/// pattern itself, each ending in one measurement layer. Stages occupy fixed
/// time slots, so the count depends on the architecture, gadget and distance
/// only; every instance is checked to fit its slots.
pub fn quantum_depth_audit(cfg: &PipelineConfig) -> Result<DepthReport> {
    cfg.validate()?;
    let spec = schedule_graph(cfg.n, cfg.k, &load_gadget(cfg)?, cfg.gadget)?;
    let nt = magic_vertices(&spec).len();
    let mut stages = vec![DepthStage { name: "prep".into(), layers: 1, used: 1 }];
    if cfg.distance > 1 {
        let c = code_prep_circuit(cfg.distance)?;
        stages.push(DepthStage { name: "code_prep".into(), layers: c.depth() + 1, used: c.depth() + 1 });
    }
    if cfg.distill && nt > 0 {
        let mut plan_stages = Vec::new();
        if cfg.architecture == Architecture::ThreeD {
            plan_stages.push(("y", MsdProtocolSpec::y7(), cfg.y_copies));
        }
        plan_stages.push(("t", MsdProtocolSpec::t15(), cfg.t_copies));
        for (name, protocol, copies) in plan_stages {
            let circuit = protocol.concrete_circuit.as_ref().ok_or(msd::MsdError::MissingCircuit)?;
            let d = circuit.encoder.depth() + 1 + circuit.decoder.depth() + 1;
            stages.push(DepthStage { name: format!("{name}_distillation"), layers: d, used: d });
            let p = copies.unwrap_or(nt + 1).max(nt);
            let plan = plan_routes(p, nt, &vec![true; p])?;
            let used = entangling_circuit(&plan).depth();
            if used > ROUTING_SLOTS {
                return Err(PipelineError::Schedule(format!("{name} routing needs {used} layers, {ROUTING_SLOTS} scheduled")));
            }
            stages.push(DepthStage { name: format!("{name}_routing"), layers: ROUTING_SLOTS + 1, used: used + 1 });
        }
    }
    let (colours, cz) = graph_cz_circuit(&spec)?;
    if colours > GRAPH_CZ_SLOTS || cz.depth() > GRAPH_CZ_SLOTS {
        return Err(PipelineError::Schedule(format!("pattern needs {colours} CZ layers, {GRAPH_CZ_SLOTS} scheduled")));
    }
    // CZ slots, one layer of basis rotations, one of measurements.
    stages.push(DepthStage { name: "pattern".into(), layers: GRAPH_CZ_SLOTS + 2, used: cz.depth() + 2 });
    let total = stages.iter().map(|s| s.layers).sum();
    Ok(DepthReport { stages, total })
}
