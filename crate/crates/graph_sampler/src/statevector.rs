//! Dense statevector engine; qubit `q` is bit `q` of the basis index.

use num_complex::Complex64 as C;
use pauli_core::{CliffordCircuit, CliffordLayer, Gate, Pauli, PauliString};
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C>,
}

pub type Matrix2 = [[C; 2]; 2];

pub fn hadamard() -> Matrix2 {
    let h = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

/// `Z(θ) = exp(−iθZ/2)`.
pub fn z_rotation(theta: f64) -> Matrix2 {
    let zero = C::new(0.0, 0.0);
    [[C::from_polar(1.0, -theta / 2.0), zero], [zero, C::from_polar(1.0, theta / 2.0)]]
}

impl StateVector {
    pub fn zero(n: usize) -> Self {
        let mut amps = vec![C::new(0.0, 0.0); 1 << n];
        amps[0] = C::new(1.0, 0.0);
        StateVector { n, amps }
    }

    pub fn plus(n: usize) -> Self {
        let a = C::new((1u64 << n) as f64, 0.0).sqrt().inv();
        StateVector { n, amps: vec![a; 1 << n] }
    }

    /// Product state with `states[q]` on qubit `q`.
    pub fn product(states: &[[C; 2]]) -> Self {
        let n = states.len();
        let amps = (0..1usize << n)
            .map(|b| (0..n).fold(C::new(1.0, 0.0), |acc, q| acc * states[q][(b >> q) & 1]))
            .collect();
        StateVector { n, amps }
    }

    pub fn from_amplitudes(n: usize, amps: Vec<C>) -> Self {
        assert_eq!(amps.len(), 1 << n, "amplitude count must be 2^n");
        StateVector { n, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            for a in &mut self.amps {
                *a /= norm;
            }
        }
    }

    pub fn inner(&self, other: &StateVector) -> C {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn apply_single(&mut self, q: usize, m: &Matrix2) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_diagonal(&mut self, q: usize, d0: C, d1: C) {
        let bit = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if i & bit == 0 { d0 } else { d1 };
        }
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let (c, t) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    pub fn apply_swap(&mut self, a: usize, b: usize) {
        let (ma, mb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & ma != 0 && i & mb == 0 {
                self.amps.swap(i, (i & !ma) | mb);
            }
        }
    }

    pub fn apply_gate(&mut self, g: &Gate) {
        let one = C::new(1.0, 0.0);
        match *g {
            Gate::H(q) => self.apply_single(q, &hadamard()),
            Gate::S(q) => self.apply_diagonal(q, one, C::i()),
            Gate::Z(q) => self.apply_diagonal(q, one, -one),
            Gate::X(q) => self.apply_single(q, &[[C::new(0.0, 0.0), one], [one, C::new(0.0, 0.0)]]),
            Gate::Y(q) => self.apply_single(q, &[[C::new(0.0, 0.0), -C::i()], [C::i(), C::new(0.0, 0.0)]]),
            Gate::Cz(a, b) => self.apply_cz(a, b),
            Gate::Cnot(c, t) => self.apply_cnot(c, t),
            Gate::Swap(a, b) => self.apply_swap(a, b),
        }
    }

    pub fn apply_layer(&mut self, layer: &CliffordLayer) {
        for g in layer.gates() {
            self.apply_gate(g);
        }
    }

    pub fn apply_circuit(&mut self, circuit: &CliffordCircuit) {
        for l in circuit.layers() {
            self.apply_layer(l);
        }
    }

    /// Applies the operator `pauli`, including its phase.
    pub fn apply_pauli(&mut self, pauli: &PauliString) {
        for q in 0..pauli.num_qubits() {
            match pauli.get(q) {
                Pauli::I => {}
                Pauli::X => self.apply_gate(&Gate::X(q)),
                Pauli::Y => self.apply_gate(&Gate::Y(q)),
                Pauli::Z => self.apply_gate(&Gate::Z(q)),
            }
        }
        let phase = C::i().powu(pauli.phase().exponent() as u32);
        for a in &mut self.amps {
            *a *= phase;
        }
    }

    pub fn expectation(&self, pauli: &PauliString) -> C {
        let mut other = self.clone();
        other.apply_pauli(pauli);
        self.inner(&other)
    }

    pub fn prob_one(&self, q: usize) -> f64 {
        let bit = 1usize << q;
        self.amps.iter().enumerate().filter(|(i, _)| i & bit != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Zeroes the `bit ≠ value` half without renormalising; returns the kept weight.
    pub fn project(&mut self, q: usize, value: bool) -> f64 {
        let bit = 1usize << q;
        let mut kept = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & bit != 0) == value {
                kept += a.norm_sqr();
            } else {
                *a = C::new(0.0, 0.0);
            }
        }
        kept
    }

    /// Samples a Z outcome on `q` and collapses (normalised).
    pub fn measure<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> bool {
        let p1 = self.prob_one(q) / self.norm_sqr();
        let outcome = rng.gen::<f64>() < p1;
        self.project(q, outcome);
        self.normalize();
        outcome
    }

    /// Drops qubit `q`, keeping the `value` branch (unnormalised).
    pub fn remove_qubit(&self, q: usize, value: bool) -> StateVector {
        let low = (1usize << q) - 1;
        let half = self.amps.len() / 2;
        let amps = (0..half)
            .map(|i| {
                let j = (i & low) | ((i & !low) << 1) | ((value as usize) << q);
                self.amps[j]
            })
            .collect();
        StateVector { n: self.n - 1, amps }
    }

    /// Appends a qubit in `state` as the new highest index.
    pub fn push_qubit(&mut self, state: [C; 2]) {
        let len = self.amps.len();
        let mut amps = Vec::with_capacity(2 * len);
        amps.extend(self.amps.iter().map(|a| a * state[0]));
        amps.extend(self.amps.iter().map(|a| a * state[1]));
        self.amps = amps;
        self.n += 1;
    }

    /// Single-qubit reduced density matrix `ρ[a][b]` of qubit `q`.
    pub fn reduced_qubit(&self, q: usize) -> Matrix2 {
        let bit = 1usize << q;
        let mut rho = [[C::new(0.0, 0.0); 2]; 2];
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                rho[0][0] += a0 * a0.conj();
                rho[0][1] += a0 * a1.conj();
                rho[1][0] += a1 * a0.conj();
                rho[1][1] += a1 * a1.conj();
            }
        }
        rho
    }
}
