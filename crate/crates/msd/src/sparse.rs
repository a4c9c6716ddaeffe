//! Statevector stored as a map from basis index to amplitude. Distillation
//! circuits keep the state on a few hundred basis states out of 2^15, so this
//! is far cheaper than the dense engine for them.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::BuildHasherDefault;

use num_complex::Complex64 as C;
use pauli_core::{CliffordCircuit, Gate};

/// Amplitudes below this magnitude are dropped after each Hadamard.
const PRUNE: f64 = 1e-14;

/// Fixed-key hasher so iteration order, and hence rounding, is reproducible.
type Map = HashMap<u64, C, BuildHasherDefault<DefaultHasher>>;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    n: usize,
    amps: Map,
}

impl SparseState {
    pub fn zero(n: usize) -> Self {
        assert!(n <= 64, "sparse state holds at most 64 qubits");
        let mut amps = Map::default();
        amps.insert(0, C::new(1.0, 0.0));
        SparseState { n, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitude(&self, index: u64) -> C {
        self.amps.get(&index).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    fn remap(&mut self, f: impl Fn(u64, C) -> (u64, C)) {
        self.amps = self.amps.drain().map(|(i, a)| f(i, a)).collect();
    }

    pub fn apply_diagonal(&mut self, q: usize, d0: C, d1: C) {
        for (i, a) in self.amps.iter_mut() {
            *a *= if i >> q & 1 == 1 { d1 } else { d0 };
        }
    }

    pub fn apply_gate(&mut self, g: &Gate) {
        let one = C::new(1.0, 0.0);
        match *g {
            Gate::H(q) => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let mut next = Map::with_capacity_and_hasher(2 * self.amps.len(), Default::default());
                for (&i, &a) in &self.amps {
                    let bit = 1u64 << q;
                    let sign = if i & bit != 0 { -1.0 } else { 1.0 };
                    *next.entry(i & !bit).or_default() += a * h;
                    *next.entry(i | bit).or_default() += a * (h * sign);
                }
                next.retain(|_, a| a.norm() > PRUNE);
                self.amps = next;
            }
            Gate::S(q) => self.apply_diagonal(q, one, C::i()),
            Gate::Z(q) => self.apply_diagonal(q, one, -one),
            Gate::X(q) => self.remap(|i, a| (i ^ 1 << q, a)),
            Gate::Y(q) => self.remap(|i, a| (i ^ 1 << q, if i >> q & 1 == 0 { a * C::i() } else { -a * C::i() })),
            Gate::Cz(x, y) => {
                for (i, a) in self.amps.iter_mut() {
                    if i >> x & 1 == 1 && i >> y & 1 == 1 {
                        *a = -*a;
                    }
                }
            }
            Gate::Cnot(c, t) => self.remap(|i, a| (if i >> c & 1 == 1 { i ^ 1 << t } else { i }, a)),
            Gate::Swap(x, y) => self.remap(|i, a| {
                let (bx, by) = (i >> x & 1, i >> y & 1);
                (if bx != by { i ^ (1 << x | 1 << y) } else { i }, a)
            }),
        }
    }

    pub fn apply_circuit(&mut self, circuit: &CliffordCircuit) {
        for g in circuit.gates() {
            self.apply_gate(g);
        }
    }

    /// Keeps only the branch where qubit `q` reads `value` (unnormalised).
    pub fn project(&mut self, q: usize, value: bool) {
        self.amps.retain(|i, _| (i >> q & 1 == 1) == value);
    }

    /// Single-qubit reduced density matrix of qubit `q`.
    pub fn reduced_qubit(&self, q: usize) -> [[C; 2]; 2] {
        let bit = 1u64 << q;
        let mut rho = [[C::new(0.0, 0.0); 2]; 2];
        for (&i, &a) in &self.amps {
            let x = (i >> q & 1) as usize;
            rho[x][x] += a * a.conj();
            if x == 0 {
                let b = self.amplitude(i | bit);
                rho[0][1] += a * b.conj();
                rho[1][0] += b * a.conj();
            }
        }
        rho
    }
}
