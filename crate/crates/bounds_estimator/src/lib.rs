//! Failure bounds and resource formulas evaluated exactly, with every
//! asymptotic constant explicit (default 1). Each number comes with the
//! formula string that produced it.

mod bounds;
pub mod formula;
mod overhead;

pub use bounds::{
    appendix_a_from_q, appendix_a_l1_bound, appendix_b_l1_chain, appendix_b_l1_chain_q, choose_l, lm_for_target, saw_failure_bound, threshold_backsolve,
    BChain, ChooseL, ExactCoarse, LmChoice, SawBound, Threshold, ThresholdMode, SAW_DECAY_EXPONENT,
};
pub use formula::{evaluate, Ledger, Record};
pub use overhead::{overhead_3d, overhead_4d, ResourceReport, ScalingParams, KNOWN_CONSTANTS};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("{0}")]
    Domain(String),
    #[error("degree check failed: sqrt(l) = {sqrt_l} does not exceed {rhs} (l = {l})")]
    DegreeCheck { l: f64, sqrt_l: f64, rhs: f64 },
    #[error("walk sum diverges: ratio sqrt(100 q) = {0} >= 1")]
    Divergent(f64),
    #[error("formula error: {0}")]
    Formula(String),
}

pub type Result<T> = std::result::Result<T, BoundsError>;
