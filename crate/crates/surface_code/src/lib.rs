//! Rotated surface-code patch with a matching decoder for a single round of
//! transversal Z readout, plus Monte Carlo estimates of the decoding-failure
//! rate and its exponential fit in the code distance.

mod blossom;
mod decoder;
pub mod matching;
mod montecarlo;
mod patch;

pub use blossom::max_weight_matching;
pub use decoder::{mwpm, z_readout_decode, DecodeResult, Decoder};
pub use matching::Matching;
pub use montecarlo::{
    fit_pf_exponent, logical_error_rate, logical_error_rate_stratified, pattern_fails, rate_sweep, readout_trial, wilson_interval, write_sweep_csv,
    ExponentFit, RateEstimate, StratifiedEstimate, SweepRow, Z95,
};
pub use patch::{build_patch, Stabilizer, StabilizerKind, SurfaceCodePatch};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("distance must be odd and positive, got {0}")]
    Distance(usize),
    #[error("expected {expected} readout bits, got {found}")]
    Length { expected: usize, found: usize },
    #[error("flip rate {0} outside [0, 1)")]
    Rate(f64),
    #[error("trials must be at least 1")]
    Trials,
    #[error("cannot fit exponent: {0}")]
    Fit(String),
    #[error("invalid patch: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, SurfaceError>;
