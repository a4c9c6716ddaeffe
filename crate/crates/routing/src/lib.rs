//! Routing of m successful outputs out of p candidate slots through a grid
//! graph state. Vertices off the chosen paths are measured in Z, which cuts
//! them out; path vertices are measured in X, which teleports each source
//! state down its wire. Pauli byproducts are tracked per wire.
//!
//! Layout: source `r` is its own qubit, attached to grid vertex `(2r, 0)`
//! of a `(2p-1) x 2m` grid. Target `i` sits at `(2i, 2m-1)`. The blank rows
//! and the spacing of the vertical segments keep different wires from
//! touching, since a grid edge between two wires would act as a logical CZ.

mod plan;
mod sim;

pub use plan::{
    measurement_pattern, plan_routes, verify_disjoint, verify_isolated, Basis, RoutePath, RoutingGrid, RoutingPlan, WireFrameRule,
};
pub use sim::{
    entangling_circuit, residual_target_error, simulate_branches, simulate_routing, simulate_routing_forced, simulate_routing_statevector,
    simulate_with_error, BranchReport, Frame, RoutingOutcome, SourceState, StatevectorRouting, STABILIZER_BUDGET, STATEVECTOR_CAP,
};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum RoutingError {
    #[error("need {needed} successful slots, only {found} flagged")]
    TooFewFlags { needed: usize, found: usize },
    #[error("flag vector has length {found}, expected {expected}")]
    FlagLength { expected: usize, found: usize },
    #[error("m = {m} exceeds p = {p}")]
    TooManyTargets { p: usize, m: usize },
    #[error("{qubits} qubits exceed the simulator budget of {cap}")]
    Budget { qubits: usize, cap: usize },
    #[error("invalid plan: {0}")]
    Invalid(String),
    #[error("bad inputs: {0}")]
    Inputs(String),
}

pub type Result<T> = std::result::Result<T, RoutingError>;
