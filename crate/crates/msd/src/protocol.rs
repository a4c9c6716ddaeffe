//! Distillation protocols: parametric planning models and concrete circuits.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::Path;

use pauli_core::{CliffordCircuit, Gate};
use serde::{Deserialize, Serialize};

use crate::{MsdError, Result};

/// A distillation code given by generator rows over `n` qubits. Row 0 is the
/// logical row; the remaining rows span the checks. Applying the diagonal
/// gate `diag(1, e^(i angle))` to every qubit of the encoded `|+>` state must
/// act on the logical qubit as its inverse, which the constructor verifies.
#[derive(Debug, Clone, PartialEq)]
pub struct DistillationCode {
    rows: Vec<u64>,
    n: usize,
    angle: f64,
}

impl DistillationCode {
    pub fn new(rows: Vec<Vec<bool>>, angle: f64) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.len() < 2 || n == 0 || n > 32 {
            return Err(MsdError::Invalid("code needs a logical row, at least one check row and 1..=32 columns".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(MsdError::Invalid("generator rows differ in length".into()));
        }
        let packed: Vec<u64> = rows.iter().map(|r| r.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | (b as u64) << i)).collect();
        if rank(&packed) != packed.len() {
            return Err(MsdError::Invalid("generator rows are linearly dependent".into()));
        }
        let code = DistillationCode { rows: packed, n, angle };
        code.check_phases()?;
        Ok(code)
    }

    /// Columns are all nonzero `m`-bit vectors; the logical row is all ones.
    pub fn simplex(m: usize, angle: f64) -> Result<Self> {
        let n = (1usize << m) - 1;
        let mut rows = vec![vec![true; n]];
        for j in 0..m {
            rows.push((1..=n).map(|v| v >> j & 1 == 1).collect());
        }
        Self::new(rows, angle)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Number of check rows.
    pub fn num_checks(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Codeword for logical bit `y` and check coefficients `a`.
    pub fn codeword(&self, y: bool, a: u64) -> u64 {
        let mut w = if y { self.rows[0] } else { 0 };
        for (j, r) in self.rows[1..].iter().enumerate() {
            if a >> j & 1 == 1 {
                w ^= r;
            }
        }
        w
    }

    /// Ideal transversal phases must be trivial on the y = 0 coset and one
    /// common `e^(-i angle)` on the y = 1 coset.
    fn check_phases(&self) -> Result<()> {
        let phase = |w: u64| {
            let t = (w.count_ones() as f64 * self.angle).rem_euclid(std::f64::consts::TAU);
            num_complex::Complex64::from_polar(1.0, t)
        };
        let want = num_complex::Complex64::from_polar(1.0, -self.angle);
        for a in 0..1u64 << self.num_checks() {
            if (phase(self.codeword(false, a)) - 1.0).norm() > 1e-9 || (phase(self.codeword(true, a)) - want).norm() > 1e-9 {
                return Err(MsdError::Invalid("transversal gate does not act as a logical inverse rotation".into()));
            }
        }
        Ok(())
    }

    /// Encoder: H on qubits `0..=checks`, then the CNOT network mapping
    /// `|y, a, 0..0>` to the codeword. Decoder: the inverse network, H on the
    /// check qubits and X on qubit 0, which turns the logical inverse
    /// rotation back into the magic state.
    pub fn circuit(&self) -> ConcreteCircuit {
        let n = self.n;
        let k = self.rows.len();
        // Columns of B: the generator rows, completed to a basis by unit vectors.
        let mut cols = self.rows.clone();
        for i in 0..n {
            if cols.len() == n {
                break;
            }
            cols.push(1 << i);
            if rank(&cols) < cols.len() {
                cols.pop();
            }
        }
        // Row-major copy of B, reduced to the identity by row additions.
        let mut b: Vec<u64> = (0..n).map(|i| cols.iter().enumerate().fold(0u64, |acc, (j, c)| acc | (c >> i & 1) << j)).collect();
        let mut ops = Vec::new();
        for j in 0..n {
            if b[j] >> j & 1 == 0 {
                let r = (j + 1..n).find(|&r| b[r] >> j & 1 == 1).expect("B is invertible");
                b[j] ^= b[r];
                ops.push((j, r));
            }
            for i in 0..n {
                if i != j && b[i] >> j & 1 == 1 {
                    b[i] ^= b[j];
                    ops.push((i, j));
                }
            }
        }
        // Row op `row_t ^= row_c` is CNOT(c -> t); the eliminating sequence is B^-1.
        let mut enc: Vec<Gate> = (0..k).map(Gate::H).collect();
        enc.extend(ops.iter().rev().map(|&(t, c)| Gate::Cnot(c, t)));
        let mut dec: Vec<Gate> = ops.iter().map(|&(t, c)| Gate::Cnot(c, t)).collect();
        dec.extend((1..k).map(Gate::H));
        dec.push(Gate::X(0));
        ConcreteCircuit {
            num_qubits: n,
            encoder: CliffordCircuit::from_gates(n, &enc).expect("gates fit the width"),
            magic_slots: (0..n).collect(),
            magic_angle: self.angle,
            decoder: CliffordCircuit::from_gates(n, &dec).expect("gates fit the width"),
            output: 0,
            postselect: (1..n).collect(),
        }
    }
}

fn rank(vectors: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &v in vectors {
        let mut x = v;
        for &b in &basis {
            x = x.min(x ^ b);
        }
        if x != 0 {
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// A Clifford circuit with marked magic-input slots: start from `|0..0>`,
/// run `encoder`, inject one magic state per slot as the diagonal gate
/// `diag(1, e^(i magic_angle))`, run `decoder`, accept when every
/// `postselect` qubit reads 0 and keep `output`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcreteCircuit {
    pub num_qubits: usize,
    pub encoder: CliffordCircuit,
    pub magic_slots: Vec<usize>,
    pub magic_angle: f64,
    pub decoder: CliffordCircuit,
    pub output: usize,
    pub postselect: Vec<usize>,
}

impl ConcreteCircuit {
    pub fn validate(&self) -> Result<()> {
        let n = self.num_qubits;
        if self.encoder.num_qubits() != n || self.decoder.num_qubits() != n {
            return Err(MsdError::Invalid("encoder/decoder width differs from the circuit width".into()));
        }
        if self.magic_slots.is_empty() || self.magic_slots.len() > 32 {
            return Err(MsdError::Invalid("need 1..=32 magic slots".into()));
        }
        let mut seen = vec![false; n];
        for &q in &self.magic_slots {
            if q >= n || std::mem::replace(&mut seen[q], true) {
                return Err(MsdError::Invalid(format!("bad or repeated magic slot {q}")));
            }
        }
        if self.output >= n || self.postselect.iter().any(|&q| q >= n || q == self.output) {
            return Err(MsdError::Invalid("output/post-selection qubits out of range or overlapping".into()));
        }
        Ok(())
    }
}

/// Protocol description used both for planning and for simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct MsdProtocolSpec {
    pub name: String,
    pub d: u32,
    pub inputs_per_round: u64,
    pub outputs_per_round: u64,
    pub gamma: f64,
    pub c: f64,
    pub code: Option<DistillationCode>,
    pub concrete_circuit: Option<ConcreteCircuit>,
}

impl MsdProtocolSpec {
    fn from_code(name: &str, code: DistillationCode, c: f64) -> Self {
        let n = code.num_qubits();
        MsdProtocolSpec {
            name: name.into(),
            d: 3,
            inputs_per_round: n as u64,
            outputs_per_round: 1,
            gamma: (n as f64).ln() / 3f64.ln(),
            c,
            concrete_circuit: Some(code.circuit()),
            code: Some(code),
        }
    }

    /// 15-to-1 T-state stand-in (punctured Reed-Muller code, leading error 35 eps^3).
    pub fn t15() -> Self {
        Self::from_code("t15", DistillationCode::simplex(4, FRAC_PI_4).expect("valid code"), 35.0)
    }

    /// 7-to-1 Y-state stand-in (Steane code, leading error 7 eps^3).
    pub fn y7() -> Self {
        Self::from_code("y7", DistillationCode::simplex(3, FRAC_PI_2).expect("valid code"), 7.0)
    }

    /// Planning-only model: `d^2` inputs to `d` outputs per round with input
    /// law exponent `gamma` and suppression constant `c`.
    pub fn parametric(d: u32, c: f64, gamma: f64) -> Result<Self> {
        let spec = MsdProtocolSpec {
            name: format!("parametric-d{d}"),
            d,
            inputs_per_round: (d as u64).pow(2),
            outputs_per_round: d as u64,
            gamma,
            c,
            code: None,
            concrete_circuit: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "t15" => Some(Self::t15()),
            "y7" => Some(Self::y7()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(MsdError::Invalid(format!("d = {} must be at least 2", self.d)));
        }
        if !(self.c > 0.0) || !(self.gamma > 0.0) {
            return Err(MsdError::Invalid("C and gamma must be positive".into()));
        }
        if self.inputs_per_round < 1 || self.outputs_per_round < 1 {
            return Err(MsdError::Invalid("inputs and outputs per round must be at least 1".into()));
        }
        if let Some(c) = &self.concrete_circuit {
            c.validate()?;
        }
        Ok(())
    }

    /// Parses the JSON protocol format (see [`ProtocolFile`]).
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProtocolFile = serde_json::from_str(text).map_err(|e| MsdError::Invalid(e.to_string()))?;
        file.into_spec()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| MsdError::Invalid(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_file(&self) -> ProtocolFile {
        ProtocolFile {
            name: self.name.clone(),
            d: self.d,
            inputs_per_round: self.inputs_per_round,
            outputs_per_round: self.outputs_per_round,
            gamma: self.gamma,
            c: self.c,
            code: self.code.as_ref().map(|c| CodeFile {
                rows: c.rows.iter().map(|r| (0..c.n).map(|i| if r >> i & 1 == 1 { '1' } else { '0' }).collect()).collect(),
                angle: c.angle,
            }),
            circuit: self.concrete_circuit.as_ref().filter(|_| self.code.is_none()).map(|c| CircuitFile {
                encoder: c.encoder.to_text(),
                decoder: c.decoder.to_text(),
                magic_slots: c.magic_slots.clone(),
                magic_angle: c.magic_angle,
                output: c.output,
                postselect: c.postselect.clone(),
            }),
        }
    }
}

/// On-disk protocol: planning parameters plus either a code (from which the
/// circuit is synthesised) or an explicit circuit in the text format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolFile {
    pub name: String,
    pub d: u32,
    pub inputs_per_round: u64,
    pub outputs_per_round: u64,
    pub gamma: f64,
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<CodeFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<CircuitFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    /// Bitstrings, qubit 0 first; the first row is the logical row.
    pub rows: Vec<String>,
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitFile {
    pub encoder: String,
    pub decoder: String,
    pub magic_slots: Vec<usize>,
    pub magic_angle: f64,
    pub output: usize,
    pub postselect: Vec<usize>,
}

impl ProtocolFile {
    pub fn into_spec(self) -> Result<MsdProtocolSpec> {
        if self.code.is_some() && self.circuit.is_some() {
            return Err(MsdError::Invalid("give either a code or a circuit, not both".into()));
        }
        let code = match self.code {
            Some(cf) => {
                let rows = cf
                    .rows
                    .iter()
                    .map(|r| {
                        r.chars()
                            .map(|ch| match ch {
                                '0' => Ok(false),
                                '1' => Ok(true),
                                _ => Err(MsdError::Invalid(format!("bad bit '{ch}' in code row"))),
                            })
                            .collect()
                    })
                    .collect::<Result<Vec<Vec<bool>>>>()?;
                Some(DistillationCode::new(rows, cf.angle)?)
            }
            None => None,
        };
        let concrete_circuit = match (&code, self.circuit) {
            (Some(c), _) => Some(c.circuit()),
            (None, Some(cf)) => {
                let parse = |t: &str| CliffordCircuit::from_text(t).map_err(|e| MsdError::Invalid(e.to_string()));
                let encoder = parse(&cf.encoder)?;
                Some(ConcreteCircuit {
                    num_qubits: encoder.num_qubits(),
                    encoder,
                    magic_slots: cf.magic_slots,
                    magic_angle: cf.magic_angle,
                    decoder: parse(&cf.decoder)?,
                    output: cf.output,
                    postselect: cf.postselect,
                })
            }
            (None, None) => None,
        };
        let spec = MsdProtocolSpec {
            name: self.name,
            d: self.d,
            inputs_per_round: self.inputs_per_round,
            outputs_per_round: self.outputs_per_round,
            gamma: self.gamma,
            c: self.c,
            code,
            concrete_circuit,
        };
        spec.validate()?;
        Ok(spec)
    }
}
