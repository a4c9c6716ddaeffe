//! End-to-end composition of distillation, routing and graph-state sampling.
//!
//! Two fidelity levels share one configuration type:
//!
//! * `exact_small` runs every stage concretely on tiny instances: noisy magic
//!   inputs are distilled, the successes select a routing pattern (the one
//!   classical feedback point of the 4D architecture), routed states are
//!   verified on a statevector, the graph state is measured and every logical
//!   outcome is read out through a surface-code patch and decoded.
//! * `error_model` samples the ideal distribution and injects decoding
//!   failures and residual magic-state infidelity at the logical level, so the
//!   measured l1 distance can be set against the analytic bounds.
//!
//! Audits count classical-feedback layers per run and the quantum depth of
//! the assembled schedule.

mod audit;
mod config;
mod error_model;
mod exact;
mod graph;
mod record;

pub use audit::{interaction_audit, quantum_depth_audit, DepthReport, DepthStage, GRAPH_CZ_SLOTS, ROUTING_SLOTS};
pub use config::{Architecture, Calibration, DecodeModel, GadgetChoice, MagicNoise, Mode, PipelineConfig, PIPELINE_KEYS};
pub use error_model::{run_error_model, ErrorModelReport};
pub use exact::{run_exact_small, run_exact_small_batch, ExactSmallReport};
pub use graph::{assembled_distribution, magic_vertices, pipeline_graph, schedule_graph, y_vertices};
pub use record::{DecodeMeta, FeedbackEvent, MsdTally, RoutingMeta, RunRecord};

use graph_sampler::GraphError;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("decode-failure rate p_f is not calibrated: set p_f or a calibration block")]
    NotCalibrated,
    #[error("{stage} distillation: {found} successes, {needed} needed")]
    InsufficientSuccesses { stage: String, needed: usize, found: usize },
    #[error("{what} needs {qubits} qubits, cap is {cap}")]
    Cap { what: String, qubits: usize, cap: usize },
    #[error("routing delivered fidelity {0}")]
    RoutingFidelity(f64),
    #[error("schedule check failed: {0}")]
    Schedule(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Msd(#[from] msd::MsdError),
    #[error(transparent)]
    Routing(#[from] routing::RoutingError),
    #[error(transparent)]
    Surface(#[from] surface_code::SurfaceError),
    #[error(transparent)]
    Bounds(#[from] bounds_estimator::BoundsError),
}

impl PipelineError {
    /// Errors a user fixes by editing the config, as opposed to run failures.
    pub fn is_config(&self) -> bool {
        matches!(self, PipelineError::Config(_) | PipelineError::NotCalibrated | PipelineError::Cap { .. })
            || matches!(self, PipelineError::Graph(GraphError::Gadget(_) | GraphError::TooSmall { .. } | GraphError::SizeCap { .. }))
    }
}

pub type Result<T> = std::result::Result<T, PipelineError>;
