use pauli_core::{Pauli, PauliString};
use serde::Serialize;

use crate::{Result, SurfaceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StabilizerKind {
    X,
    Z,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stabilizer {
    pub kind: StabilizerKind,
    /// Top-left corner of the plaquette in data-qubit coordinates (may be −1).
    pub corner: (i64, i64),
    pub support: Vec<usize>,
}

/// Rotated planar patch of odd distance `d` with `d²` data qubits. Data qubit
/// `(r, c)` has index `r·d + c`. X-type weight-two plaquettes sit on the top
/// and bottom edges, Z-type ones on the left and right.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceCodePatch {
    distance: usize,
    stabilizers: Vec<Stabilizer>,
    logical_z: Vec<usize>,
    logical_x: Vec<usize>,
}

pub fn build_patch(distance: usize) -> Result<SurfaceCodePatch> {
    SurfaceCodePatch::new(distance)
}

impl SurfaceCodePatch {
    pub fn new(distance: usize) -> Result<Self> {
        if distance == 0 || distance % 2 == 0 {
            return Err(SurfaceError::Distance(distance));
        }
        let d = distance as i64;
        let mut stabilizers = Vec::new();
        for r in -1..d {
            for c in -1..d {
                let support: Vec<usize> = [(0, 0), (0, 1), (1, 0), (1, 1)]
                    .iter()
                    .map(|(dr, dc)| (r + dr, c + dc))
                    .filter(|&(y, x)| (0..d).contains(&y) && (0..d).contains(&x))
                    .map(|(y, x)| (y * d + x) as usize)
                    .collect();
                let kind = if (r + c).rem_euclid(2) == 0 { StabilizerKind::X } else { StabilizerKind::Z };
                let keep = match support.len() {
                    4 => true,
                    2 => match kind {
                        StabilizerKind::X => r == -1 || r == d - 1,
                        StabilizerKind::Z => c == -1 || c == d - 1,
                    },
                    _ => false,
                };
                if keep {
                    stabilizers.push(Stabilizer { kind, corner: (r, c), support });
                }
            }
        }
        Ok(SurfaceCodePatch {
            distance,
            stabilizers,
            logical_z: (0..distance).collect(),
            logical_x: (0..distance).map(|r| r * distance).collect(),
        })
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    /// Number of physical qubits `l`.
    pub fn num_qubits(&self) -> usize {
        self.distance * self.distance
    }

    pub fn stabilizers(&self) -> &[Stabilizer] {
        &self.stabilizers
    }

    pub fn stabilizers_of(&self, kind: StabilizerKind) -> impl Iterator<Item = &Stabilizer> {
        self.stabilizers.iter().filter(move |s| s.kind == kind)
    }

    /// Support of Z̄ (the first row).
    pub fn logical_z_support(&self) -> &[usize] {
        &self.logical_z
    }

    /// Support of X̄ (the first column).
    pub fn logical_x_support(&self) -> &[usize] {
        &self.logical_x
    }

    fn pauli_on(&self, support: &[usize], p: Pauli) -> PauliString {
        let sparse: Vec<(usize, Pauli)> = support.iter().map(|&q| (q, p)).collect();
        PauliString::from_sparse(self.num_qubits(), &sparse).expect("support lies on the patch")
    }

    pub fn stabilizer_pauli(&self, s: &Stabilizer) -> PauliString {
        let p = match s.kind {
            StabilizerKind::X => Pauli::X,
            StabilizerKind::Z => Pauli::Z,
        };
        self.pauli_on(&s.support, p)
    }

    pub fn logical_z(&self) -> PauliString {
        self.pauli_on(&self.logical_z, Pauli::Z)
    }

    pub fn logical_x(&self) -> PauliString {
        self.pauli_on(&self.logical_x, Pauli::X)
    }

    /// Checks commutation of all stabilizers with each other and with both
    /// logicals, and anticommutation of the logicals.
    pub fn validate(&self) -> Result<()> {
        let paulis: Vec<PauliString> = self.stabilizers.iter().map(|s| self.stabilizer_pauli(s)).collect();
        let (lz, lx) = (self.logical_z(), self.logical_x());
        for (i, a) in paulis.iter().enumerate() {
            for b in &paulis[i + 1..] {
                if !a.commutes_with(b) {
                    return Err(SurfaceError::Invalid(format!("stabilizers {a} and {b} anticommute")));
                }
            }
            if !a.commutes_with(&lz) || !a.commutes_with(&lx) {
                return Err(SurfaceError::Invalid(format!("stabilizer {a} anticommutes with a logical")));
            }
        }
        if lz.commutes_with(&lx) {
            return Err(SurfaceError::Invalid("logical operators commute".into()));
        }
        Ok(())
    }
}
