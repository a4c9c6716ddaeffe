use std::path::Path;

use graph_sampler::statevector::{hadamard, StateVector};
use graph_sampler::{
    brickwork_parts, build_brickwork_graph, substitute_gbprime, BrickworkOptions, GadgetSpec, GraphError, GraphSpec, MeasurementRole,
    OutcomeDistribution, Vertex, VertexKind,
};
use msd::magic_state;
use num_complex::Complex64 as C;

use crate::{GadgetChoice, PipelineConfig, PipelineError, Result};

pub(crate) fn load_gadget(config: &PipelineConfig) -> Result<GadgetSpec> {
    match &config.gadget_file {
        Some(path) => Ok(GadgetSpec::load(Path::new(path))?),
        None => Ok(GadgetSpec::default_gb()),
    }
}

/// A lone wire never pairs in the brickwork, so it would only see idle XY(0)
/// vertices. Here it runs the upper row of the tile instead, which keeps the
/// tile's magic vertices in an n = 1 pattern.
fn single_wire_parts(k: usize, gadget: &GadgetSpec) -> Result<(Vec<Vertex>, Vec<(usize, usize)>)> {
    let layout = gadget.layout()?;
    let mut vertices = Vec::new();
    for col in 0..k - 1 {
        for (sub, &role) in layout.roles[0].iter().enumerate() {
            vertices.push(Vertex { row: 0, col, sub, kind: VertexKind::Gadget, role });
        }
    }
    vertices.push(Vertex { row: 0, col: k - 1, sub: 0, kind: VertexKind::Output, role: MeasurementRole::OutputZ });
    let edges = (1..vertices.len()).map(|i| (i - 1, i)).collect();
    Ok((vertices, edges))
}

fn parts(n: usize, k: usize, gadget: &GadgetSpec) -> Result<(Vec<Vertex>, Vec<(usize, usize)>)> {
    if n < 1 || k < 2 {
        return Err(GraphError::TooSmall { n, k }.into());
    }
    if n == 1 {
        single_wire_parts(k, gadget)
    } else {
        Ok(brickwork_parts(n, k, gadget, BrickworkOptions::default())?)
    }
}

fn finish(spec: GraphSpec, choice: GadgetChoice) -> Result<GraphSpec> {
    Ok(match choice {
        GadgetChoice::Gb => spec,
        GadgetChoice::GbPrime => substitute_gbprime(&spec)?,
    })
}

/// The sampled pattern: brickwork for n ≥ 2, the tile's upper row for n = 1.
pub fn pipeline_graph(n: usize, k: usize, gadget: &GadgetSpec, choice: GadgetChoice) -> Result<GraphSpec> {
    let spec = if n == 1 {
        let (v, e) = single_wire_parts(k, gadget)?;
        GraphSpec::new(1, k, v, e)?
    } else {
        build_brickwork_graph(n, k, gadget)?
    };
    finish(spec, choice)
}

/// Same pattern without the connectivity requirement, for scheduling only.
pub fn schedule_graph(n: usize, k: usize, gadget: &GadgetSpec, choice: GadgetChoice) -> Result<GraphSpec> {
    let (v, e) = parts(n, k, gadget)?;
    finish(GraphSpec::new_allow_disconnected(n, k, v, e)?, choice)
}

/// Vertices measured at π/4; each consumes one T state.
pub fn magic_vertices(spec: &GraphSpec) -> Vec<usize> {
    (0..spec.num_vertices()).filter(|&i| spec.vertices()[i].role == MeasurementRole::XyPi4).collect()
}

/// Vertices measured at π/2.
pub fn y_vertices(spec: &GraphSpec) -> Vec<usize> {
    (0..spec.num_vertices()).filter(|&i| spec.vertices()[i].role == MeasurementRole::XyPi2).collect()
}

/// Per-vertex input states of the ideal pattern: `Z(θ)|+⟩` up to phase on
/// measured vertices, `|+⟩` on outputs.
pub(crate) fn ideal_states(spec: &GraphSpec) -> Vec<[C; 2]> {
    spec.vertices().iter().map(|v| magic_state(v.role.angle().unwrap_or(0.0))).collect()
}

/// Outcome distribution of the pattern when vertex `v` starts in `states[v]`
/// and every measured vertex is read in X. With [`ideal_states`] this equals
/// the exact distribution of the pattern.
pub fn assembled_distribution(spec: &GraphSpec, states: &[[C; 2]], cap: usize) -> Result<OutcomeDistribution> {
    let nv = spec.num_vertices();
    if states.len() != nv {
        return Err(PipelineError::Config(format!("{} vertex states for {nv} vertices", states.len())));
    }
    if nv > cap {
        return Err(PipelineError::Cap { what: "graph pattern".into(), qubits: nv, cap });
    }
    let mut sv = StateVector::product(states);
    for &(a, b) in spec.edges() {
        sv.apply_cz(a, b);
    }
    let h = hadamard();
    let measured = spec.measured_vertices();
    for &v in &measured {
        sv.apply_single(v, &h);
    }
    let mut dest = vec![0usize; nv];
    for (j, &v) in measured.iter().chain(spec.output_vertices().iter()).enumerate() {
        dest[v] = j;
    }
    let norm = sv.norm_sqr();
    let mut probs = vec![0.0; 1 << nv];
    for (b, a) in sv.amplitudes().iter().enumerate() {
        let idx = dest.iter().enumerate().fold(0usize, |acc, (v, &d)| acc | (((b >> v) & 1) << d));
        probs[idx] = a.norm_sqr() / norm;
    }
    Ok(OutcomeDistribution::new(measured.len(), nv - measured.len(), probs)?)
}

/// Inverse-CDF draw of an outcome index.
pub(crate) fn draw_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding can leave the total a hair below 1; fall back to the last
    // outcome with nonzero weight.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Pauli code (0 = I, 1 = X, 2 = Y, 3 = Z) as (x, z) bits and back.
pub(crate) fn compose(a: u8, b: u8) -> u8 {
    let bits = |c: u8| match c {
        0 => (false, false),
        1 => (true, false),
        2 => (true, true),
        _ => (false, true),
    };
    let ((ax, az), (bx, bz)) = (bits(a), bits(b));
    match (ax ^ bx, az ^ bz) {
        (false, false) => 0,
        (true, false) => 1,
        (true, true) => 2,
        (false, true) => 3,
    }
}
