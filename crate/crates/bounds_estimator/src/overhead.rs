use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::formula::{Ledger, Record};
use crate::{BoundsError, Result};

/// Named O(1) factors understood by the overhead reports.
pub const KNOWN_CONSTANTS: [&str; 8] = ["c_c1", "c_r", "c_c2", "c_prep", "c_lambda", "c_c1p", "c_rp", "c_cells"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingParams {
    pub n: f64,
    /// Columns of the sampled graph; defaults to `n` (4D) or `n^3` (3D).
    pub k: Option<f64>,
    /// Block-size constant in `l = ceil(r ln^2 n)`.
    pub r: f64,
    /// Overrides for [`KNOWN_CONSTANTS`]; missing entries are 1.
    pub constants: BTreeMap<String, f64>,
}

impl Default for ScalingParams {
    fn default() -> Self {
        ScalingParams { n: 64.0, k: None, r: 1.0, constants: BTreeMap::new() }
    }
}

impl ScalingParams {
    pub fn with_n(n: f64) -> Self {
        ScalingParams { n, ..Self::default() }
    }

    /// Every constant, including `r`, set to `v`.
    pub fn uniform(n: f64, v: f64) -> Self {
        ScalingParams { n, k: None, r: v, constants: KNOWN_CONSTANTS.iter().map(|c| (c.to_string(), v)).collect() }
    }

    pub fn constant(&self, name: &str) -> f64 {
        self.constants.get(name).copied().unwrap_or(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n >= 2.0) {
            return Err(BoundsError::Domain(format!("n must be at least 2, got {}", self.n)));
        }
        if let Some(bad) = self.constants.keys().find(|k| !KNOWN_CONSTANTS.contains(&k.as_str())) {
            return Err(BoundsError::Domain(format!("unknown constant {bad}; known: {}", KNOWN_CONSTANTS.join(", "))));
        }
        let negative = self.r < 0.0 || self.k.is_some_and(|k| k <= 0.0) || self.constants.values().any(|&v| v < 0.0);
        if negative {
            return Err(BoundsError::Domain("constants must be nonnegative and k positive".into()));
        }
        Ok(())
    }

    fn ledger(&self, default_k: f64) -> Ledger {
        let mut led = Ledger::new();
        led.bind("n", self.n).bind("k", self.k.unwrap_or(default_k)).bind("r", self.r);
        for c in KNOWN_CONSTANTS {
            led.bind(c, self.constant(c));
        }
        led
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub mode: String,
    pub params: ScalingParams,
    pub records: Vec<Record>,
    pub physical_total: f64,
}

impl ResourceReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.records.iter().find(|r| r.name == name).map(|r| r.value)
    }
}

/// Logical block counts of the 4D construction times physical qubits per
/// logical qubit (`l` data plus `c_prep l^1.5` for preparing `|0>`).
pub fn overhead_4d(params: &ScalingParams) -> Result<ResourceReport> {
    params.validate()?;
    let mut led = params.ledger(params.n);
    led.add("ln_n", "math::ln(n)")?;
    led.add("l", "ceil(r * ln_n^2.0)")?;
    led.add("prep_per_logical", "c_prep * l^1.5")?;
    led.add("per_logical", "l + prep_per_logical")?;
    led.add("c1_inputs", "2.0 * c_c1 * k * n^2.0 * ln_n^2.0")?;
    led.add("cr_ancillas", "c_r * k^2.0 * n^3.0 * ln_n")?;
    led.add("c2_inputs", "2.0 * c_c2 * k * n")?;
    led.add("logical_total", "c1_inputs + cr_ancillas + c2_inputs")?;
    let total = led.add("physical_total", "logical_total * per_logical")?;
    led.add("scaling_ratio", "physical_total / (n^5.0 * ln_n^4.0)")?;
    Ok(ResourceReport { mode: "4d".into(), params: params.clone(), records: led.into_records(), physical_total: total })
}

/// 3D construction: every logical qubit costs four logical cells of
/// `18 lambda^3` qubits, `lambda = c_lambda ceil(log2 n)`. The Y-routing
/// block `n^11 ln^5 n` dominates.
pub fn overhead_3d(params: &ScalingParams) -> Result<ResourceReport> {
    params.validate()?;
    let mut led = params.ledger(params.n.powi(3));
    led.add("ln_n", "math::ln(n)")?;
    led.add("lambda", "c_lambda * ceil(math::log2(n))")?;
    led.add("per_logical", "4.0 * 18.0 * lambda^3.0")?;
    led.add("c1p_inputs", "c_c1p * n^6.0 * ln_n^3.0")?;
    led.add("c1_inputs", "2.0 * c_c1 * k * n^2.0 * ln_n^2.0")?;
    led.add("cr_ancillas", "c_r * k^2.0 * n^3.0 * ln_n")?;
    led.add("c2_inputs", "2.0 * c_c2 * k * n")?;
    led.add("crp_ancillas", "c_rp * n^11.0 * ln_n^5.0")?;
    led.add("logical_inputs", "c1p_inputs + c1_inputs + cr_ancillas + c2_inputs + crp_ancillas")?;
    led.add("logical_total", "c_cells * logical_inputs")?;
    let total = led.add("physical_total", "logical_total * per_logical")?;
    led.add("crp_share", "if(logical_inputs > 0.0, crp_ancillas / logical_inputs, 0.0)")?;
    Ok(ResourceReport { mode: "3d".into(), params: params.clone(), records: led.into_records(), physical_total: total })
}
