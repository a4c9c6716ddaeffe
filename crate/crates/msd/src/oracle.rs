//! Exact output state of a code-defined protocol, computed from the code
//! alone: the encoded state is a uniform superposition over codewords, each
//! slot's noisy injection contributes the averaged kernel
//! `K = E_P[2 (P|m>)(P|m>)^dagger]`, and the decoder projects the check
//! coefficients onto their `|+>` component.

use num_complex::Complex64 as C;
use serde::Serialize;

use crate::simulate::{corrupt, magic_state};
use crate::DistillationCode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleOutcome {
    pub accept_rate: f64,
    pub infidelity: f64,
    /// Unnormalised output density matrix (trace = acceptance).
    #[serde(skip)]
    pub rho: [[C; 2]; 2],
}

pub fn exact_distillation(code: &DistillationCode, eps: f64) -> OracleOutcome {
    let m = magic_state(code.angle());
    let mut k = [[C::new(0.0, 0.0); 2]; 2];
    for p in 0..4u64 {
        let w = if p == 0 { 1.0 - eps } else { eps / 3.0 };
        let v = corrupt(m, p);
        for a in 0..2 {
            for b in 0..2 {
                k[a][b] += 2.0 * w * v[a] * v[b].conj();
            }
        }
    }
    let checks = code.num_checks();
    let n = code.num_qubits();
    let words: [Vec<u64>; 2] = [false, true].map(|y| (0..1u64 << checks).map(|a| code.codeword(y, a)).collect());
    // rho_pre[y][y'] before the final X.
    let mut pre = [[C::new(0.0, 0.0); 2]; 2];
    for (y, wy) in words.iter().enumerate() {
        for (y2, wy2) in words.iter().enumerate() {
            let mut s = C::new(0.0, 0.0);
            for &u in wy {
                for &v in wy2 {
                    s += (0..n).fold(C::new(1.0, 0.0), |acc, i| acc * k[(u >> i & 1) as usize][(v >> i & 1) as usize]);
                }
            }
            pre[y][y2] = s / (1u64 << (2 * checks + 1)) as f64;
        }
    }
    let rho = [[pre[1][1], pre[1][0]], [pre[0][1], pre[0][0]]];
    let accept = (rho[0][0] + rho[1][1]).re;
    let mut overlap = C::new(0.0, 0.0);
    for a in 0..2 {
        for b in 0..2 {
            overlap += m[a].conj() * rho[a][b] * m[b];
        }
    }
    OracleOutcome { accept_rate: accept, infidelity: 1.0 - overlap.re / accept, rho }
}
