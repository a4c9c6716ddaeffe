use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{CliffordCircuit, Pauli, PauliError, PauliString, Result};

/// Per-stage local stochastic rates for a circuit of known depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub p_prep: f64,
    pub p_layer: Vec<f64>,
    pub p_out: f64,
}

impl NoiseSpec {
    pub fn uniform(p: f64, depth: usize) -> Self {
        NoiseSpec { p_prep: p, p_layer: vec![p; depth], p_out: p }
    }

    pub fn noiseless(depth: usize) -> Self {
        Self::uniform(0.0, depth)
    }

    pub fn validate(&self) -> Result<()> {
        for &p in std::iter::once(&self.p_prep).chain(&self.p_layer).chain(std::iter::once(&self.p_out)) {
            check_rate(p)?;
        }
        Ok(())
    }

    pub fn validate_for(&self, circuit: &CliffordCircuit) -> Result<()> {
        self.validate()?;
        if self.p_layer.len() != circuit.depth() {
            return Err(PauliError::DepthMismatch { expected: circuit.depth(), found: self.p_layer.len() });
        }
        Ok(())
    }

    /// Draws one error per stage.
    pub fn sample<R: Rng + ?Sized>(&self, num_qubits: usize, rng: &mut R) -> Result<StageErrors> {
        self.validate()?;
        Ok(StageErrors {
            prep: sample_local_stochastic(num_qubits, self.p_prep, rng)?,
            layers: self
                .p_layer
                .iter()
                .map(|&p| sample_local_stochastic(num_qubits, p, rng))
                .collect::<Result<_>>()?,
            out: sample_local_stochastic(num_qubits, self.p_out, rng)?,
        })
    }
}

fn check_rate(p: f64) -> Result<()> {
    if (0.0..1.0).contains(&p) {
        Ok(())
    } else {
        Err(PauliError::InvalidRate(p))
    }
}

/// Errors `E_prep, E_1 … E_d, E_out` of a noisy depth-`d` circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct StageErrors {
    pub prep: PauliString,
    pub layers: Vec<PauliString>,
    pub out: PauliString,
}

impl StageErrors {
    pub fn identity(num_qubits: usize, depth: usize) -> Self {
        StageErrors {
            prep: PauliString::identity(num_qubits),
            layers: vec![PauliString::identity(num_qubits); depth],
            out: PauliString::identity(num_qubits),
        }
    }

    pub fn union_support(&self) -> BTreeSet<usize> {
        std::iter::once(&self.prep)
            .chain(&self.layers)
            .chain(std::iter::once(&self.out))
            .flat_map(|p| p.support())
            .collect()
    }
}

/// I.i.d. noise: each qubit independently carries X, Y or Z (uniformly) with probability `p`.
pub fn sample_local_stochastic<R: Rng + ?Sized>(num_qubits: usize, p: f64, rng: &mut R) -> Result<PauliString> {
    check_rate(p)?;
    let mut e = PauliString::identity(num_qubits);
    if p == 0.0 {
        return Ok(e);
    }
    for q in 0..num_qubits {
        if rng.gen::<f64>() < p {
            e.set(q, [Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..3)]);
        }
    }
    Ok(e)
}

/// Returns `E` with `E·U = E_out E_d U_d … E_1 U_1 E_prep` as operators.
pub fn push_noise_to_end(circuit: &CliffordCircuit, errors: &StageErrors) -> Result<PauliString> {
    let n = circuit.num_qubits();
    if errors.layers.len() != circuit.depth() {
        return Err(PauliError::DepthMismatch { expected: circuit.depth(), found: errors.layers.len() });
    }
    for e in std::iter::once(&errors.prep).chain(&errors.layers).chain(std::iter::once(&errors.out)) {
        if e.num_qubits() != n {
            return Err(PauliError::WidthMismatch { expected: n, found: e.num_qubits() });
        }
    }
    let mut acc = errors.prep.clone();
    for (layer, e) in circuit.layers().iter().zip(&errors.layers) {
        layer.conjugate_in_place(&mut acc);
        acc.mul_assign_left(e);
    }
    acc.mul_assign_left(&errors.out);
    Ok(acc)
}

/// Forward lightcone of `input_support` through every layer of `circuit`.
pub fn lightcone_support_bound(circuit: &CliffordCircuit, input_support: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut cone = input_support.clone();
    for layer in circuit.layers() {
        for g in layer.gates() {
            let sites = g.sites();
            if sites.len() == 2 && (cone.contains(&sites[0]) || cone.contains(&sites[1])) {
                cone.extend(sites);
            }
        }
    }
    cone
}
