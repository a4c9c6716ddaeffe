//! Magic-state distillation: resource planning for the layered non-adaptive
//! scheme and simulation of small concrete distillation circuits.
//!
//! The planning side treats the large protocol parametrically (block size d,
//! suppression constant C, input-law exponent gamma). The simulation side
//! runs two small stand-ins, a 15-to-1 T circuit and a 7-to-1 Y circuit,
//! with Pauli-corrupted magic inputs and post-selection. The circuits run on
//! a sparse-amplitude statevector; the dense engine serves as a cross-check.

pub mod oracle;
mod planning;
mod protocol;
mod simulate;
pub mod sparse;

pub use oracle::{exact_distillation, OracleOutcome};
pub use planning::{
    calibrated_eps, copies_for_target, epsilon_closed_form, epsilon_leading_form, epsilon_recursion, ln_binomial_cdf, n_noisy_inputs, plan_zmsd,
    success_probability_bound, y_state_requirements, BoundChain, CopiesReport, PlanConstants, YStateReport, ZMsdPlan, MAX_EXACT_TARGET, MAX_LAYERS,
    TARGET_SLACK, Y_GAMMA,
};
pub use protocol::{CircuitFile, CodeFile, ConcreteCircuit, DistillationCode, MsdProtocolSpec, ProtocolFile};
pub use simulate::{
    corrupt, enumerate_weight, fit_loglog_slope, magic_state, write_sweep_csv, DistillOutcome, Distiller, Pattern, PatternValue, ShotResult,
    StratifiedDistill, StratifiedOptions, StratumRow, SweepRow,
};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum MsdError {
    #[error("outside the suppression regime: {0}")]
    Regime(String),
    #[error("bad target: {0}")]
    Target(String),
    #[error("target {target} not reached within {layers} layers")]
    Unreachable { target: f64, layers: u32 },
    #[error("per-instance success probability {0} must lie in (0, 1]")]
    Probability(f64),
    #[error("protocol has no concrete circuit")]
    MissingCircuit,
    #[error("circuit needs {qubits} qubits, cap is {cap}")]
    CapExceeded { qubits: usize, cap: usize },
    #[error("input infidelity {0} outside [0, 0.5)")]
    Eps(f64),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, MsdError>;
