use pauli_core::{seed, NoiseSpec};
use serde::{Deserialize, Serialize};
use surface_code::logical_error_rate;

use crate::{PipelineError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    ExactSmall,
    ErrorModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Architecture {
    /// T distillation, one feedback step, T routing.
    #[default]
    #[serde(rename = "4d")]
    FourD,
    /// Y distillation and routing, then T distillation and routing.
    #[serde(rename = "3d")]
    ThreeD,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetChoice {
    #[default]
    Gb,
    /// The tile with every π/2 vertex replaced by a π/4, 0, π/4 segment.
    GbPrime,
}

/// How a faulty magic state differs from the ideal one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MagicNoise {
    /// `Z|m⟩`, the orthogonal state on the equator.
    #[default]
    Dephasing,
    /// `P|m⟩` with P uniform over X, Y, Z.
    Depolarizing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeModel {
    /// Every logical bit fails on its own with probability `p_f`.
    #[default]
    Independent,
    /// With probability `min(1, N p_f)` exactly one uniformly chosen bit fails.
    UnionBound,
}

/// Monte Carlo calibration of `p_f` from the surface-code decoder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    pub distance: usize,
    pub flip_rate: f64,
    pub trials: u64,
}

fn default_distance() -> usize {
    1
}

fn default_true() -> bool {
    true
}

fn default_shots() -> u64 {
    10_000
}

fn default_cap() -> usize {
    20
}

fn default_z() -> f64 {
    5.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub mode: Mode,
    #[serde(default)]
    pub architecture: Architecture,
    pub n: usize,
    pub k: usize,
    #[serde(default)]
    pub gadget: GadgetChoice,
    /// Custom tile; replaces the shipped default before any substitution.
    #[serde(default)]
    pub gadget_file: Option<String>,
    /// Surface-code distance of every logical qubit (1 or 3 in `exact_small`).
    #[serde(default = "default_distance")]
    pub distance: usize,
    /// Physical noise. Only `p_out` (readout flips) is simulated; the other
    /// rates must be zero.
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
    /// Infidelity of raw T inputs.
    #[serde(default)]
    pub eps_t: f64,
    /// Infidelity of raw Y inputs (3D only).
    #[serde(default)]
    pub eps_y: f64,
    /// Distil and route magic states; off means raw states are injected directly.
    #[serde(default = "default_true")]
    pub distill: bool,
    /// Distillation copies per run for T (default: targets + 1).
    #[serde(default)]
    pub t_copies: Option<usize>,
    #[serde(default)]
    pub y_copies: Option<usize>,
    /// Per-logical-qubit decoding failure rate for `error_model`.
    #[serde(default)]
    pub p_f: Option<f64>,
    #[serde(default)]
    pub calibration: Option<Calibration>,
    /// Residual infidelity of each delivered T state in `error_model`.
    #[serde(default)]
    pub eps_out: f64,
    #[serde(default)]
    pub magic_noise: MagicNoise,
    #[serde(default)]
    pub decode_model: DecodeModel,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    /// Statevector qubit cap for the exactly simulated pieces.
    #[serde(default = "default_cap")]
    pub cap: usize,
    /// Standard deviations in the sampling envelope.
    #[serde(default = "default_z")]
    pub envelope_z: f64,
}

/// Every key accepted by [`PipelineConfig`].
pub const PIPELINE_KEYS: &[&str] = &[
    "mode", "architecture", "n", "k", "gadget", "gadget_file", "distance", "noise", "eps_t", "eps_y", "distill", "t_copies", "y_copies",
    "p_f", "calibration", "eps_out", "magic_noise", "decode_model", "shots", "seed", "cap", "envelope_z",
];

impl PipelineConfig {
    pub fn new(mode: Mode, n: usize, k: usize) -> Self {
        PipelineConfig {
            mode,
            architecture: Architecture::FourD,
            n,
            k,
            gadget: GadgetChoice::Gb,
            gadget_file: None,
            distance: 1,
            noise: None,
            eps_t: 0.0,
            eps_y: 0.0,
            distill: true,
            t_copies: None,
            y_copies: None,
            p_f: None,
            calibration: None,
            eps_out: 0.0,
            magic_noise: MagicNoise::Dephasing,
            decode_model: DecodeModel::Independent,
            shots: default_shots(),
            seed: 0,
            cap: default_cap(),
            envelope_z: default_z(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// Physical readout flip rate.
    pub fn readout_flip(&self) -> f64 {
        self.noise.as_ref().map_or(0.0, |n| n.p_out)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if self.n < 1 || self.k < 2 {
            return bad(format!("need n >= 1 and k >= 2, got n={} k={}", self.n, self.k));
        }
        if self.shots == 0 {
            return bad("shots must be at least 1".into());
        }
        for (name, v) in [("eps_t", self.eps_t), ("eps_y", self.eps_y)] {
            if !(0.0..0.5).contains(&v) {
                return bad(format!("{name} = {v} outside [0, 0.5)"));
            }
        }
        if !(0.0..1.0).contains(&self.eps_out) {
            return bad(format!("eps_out = {} outside [0, 1)", self.eps_out));
        }
        if let Some(p) = self.p_f {
            if !(0.0..1.0).contains(&p) {
                return bad(format!("p_f = {p} outside [0, 1)"));
            }
        }
        if let Some(noise) = &self.noise {
            noise.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
            if noise.p_prep != 0.0 || noise.p_layer.iter().any(|&p| p != 0.0) {
                return bad("only readout noise (p_out) is simulated; p_prep and p_layer must be 0".into());
            }
        }
        if self.architecture == Architecture::ThreeD && self.gadget != GadgetChoice::GbPrime {
            return bad("the 3d architecture runs on the gb_prime gadget".into());
        }
        if self.mode == Mode::ExactSmall && !matches!(self.distance, 1 | 3) {
            return bad(format!("exact_small supports distance 1 or 3, got {}", self.distance));
        }
        if self.distance == 0 || self.distance % 2 == 0 {
            return bad(format!("distance must be odd, got {}", self.distance));
        }
        if let Some(c) = &self.calibration {
            if c.trials == 0 || !(0.0..1.0).contains(&c.flip_rate) {
                return bad("calibration needs trials >= 1 and flip_rate in [0, 1)".into());
            }
        }
        if self.t_copies == Some(0) || self.y_copies == Some(0) {
            return bad("copy counts must be positive".into());
        }
        if !(self.envelope_z >= 0.0) {
            return bad("envelope_z must be non-negative".into());
        }
        Ok(())
    }

    /// `p_f` as given, or estimated from the decoder on the calibration stream.
    pub fn resolve_p_f(&self) -> Result<f64> {
        if let Some(p) = self.p_f {
            return Ok(p);
        }
        let c = self.calibration.ok_or(PipelineError::NotCalibrated)?;
        let est = logical_error_rate(c.distance, c.flip_rate, c.trials, seed::derive_named(self.seed, "calibration"))?;
        Ok(est.estimate)
    }
}
