//! Brickwork measurement-pattern graph states and their output distributions.
//!
//! A [`GraphSpec`] is tiled from a two-wire [`GadgetSpec`]. Every non-output
//! vertex is measured in the XY plane at its role angle and every output
//! vertex in the computational basis, which gives a joint distribution over
//! `(s, x)`. Small instances are handled exactly with a dense statevector;
//! a frontier sampler draws from the same distribution with memory bounded by
//! the widest cut of the graph.

mod distribution;
mod gadget;
mod graph;
pub mod statevector;

pub use distribution::{
    anticoncentration_stats, exact_distribution, exact_distribution_with_cap, graph_statevector,
    graph_statevector_with_cap, l1_distance, sample_batch, sample_outcome, sampling_envelope,
    uniform_s_deviation,
    uniform_s_marginal_check, OutcomeDistribution, Sample, Sampler, DEFAULT_QUBIT_CAP,
};
pub use gadget::{GadgetLayout, GadgetSpec, GadgetVertex, Ports};
pub use graph::{
    brickwork_parts, brickwork_vertex_count, build_brickwork_graph, build_brickwork_graph_with, column_pairs,
    substitute_gbprime, BrickworkOptions, GraphSpec, MeasurementRole, Vertex, VertexKind,
};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid gadget: {0}")]
    Gadget(String),
    #[error("brickwork needs n >= 1 and k >= 2 (got n={n}, k={k})")]
    TooSmall { n: usize, k: usize },
    #[error("{qubits} qubits exceed the statevector cap of {cap}")]
    SizeCap { qubits: usize, cap: usize },
    #[error("not a recognised tiling: {0}")]
    NotTiling(String),
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("outcome spaces differ: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, GraphError>;
