use serde::{Deserialize, Serialize};

use crate::Architecture;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeMeta {
    pub distance: usize,
    /// Z-check defects seen across all logical readouts.
    pub defects: usize,
    /// Logical bits where the decoded value differs from the raw parity.
    pub corrections: usize,
}

/// Successes of one distillation stage in one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MsdTally {
    pub stage: String,
    pub protocol: String,
    pub copies: usize,
    pub needed: usize,
    pub successes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingMeta {
    /// `stage:p:m:flags`, enough to rebuild the plan.
    pub plan_id: String,
    /// Smallest fidelity of a delivered state with its source.
    pub min_fidelity: f64,
}

/// A point where measurement results choose a later quantum operation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackEvent {
    pub after: String,
    pub selects: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub shot: u64,
    pub architecture: Architecture,
    /// Decoded logical outcomes.
    pub s: Vec<bool>,
    pub x: Vec<bool>,
    /// Undecoded readout: parity of each patch's Z̄ support.
    pub raw_s: Vec<bool>,
    pub raw_x: Vec<bool>,
    pub decode: DecodeMeta,
    pub msd: Vec<MsdTally>,
    pub routing: Vec<RoutingMeta>,
    pub feedback: Vec<FeedbackEvent>,
    /// Wall time of the run; excluded from reproducibility comparisons.
    pub elapsed_us: u64,
}

impl RunRecord {
    /// Every stage reached its target.
    pub fn tallies_consistent(&self) -> bool {
        self.msd.iter().all(|t| t.successes >= t.needed && t.successes <= t.copies)
    }
}
