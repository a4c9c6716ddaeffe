//! Pauli and Clifford algebra for constant-depth circuits.
//!
//! The crate provides phase-exact Pauli strings, depth-one Clifford layers,
//! an Aaronson-Gottesman stabilizer tableau, i.i.d. local stochastic noise and
//! the routine that commutes every stage error of a noisy circuit to its end.

mod clifford;
mod error;
mod noise;
mod pauli;
pub mod seed;
mod tableau;

pub use clifford::{conjugate_pauli, CliffordCircuit, CliffordLayer, Gate};
pub use error::PauliError;
pub use noise::{
    lightcone_support_bound, push_noise_to_end, sample_local_stochastic, NoiseSpec, StageErrors,
};
pub use pauli::{Pauli, PauliString, Phase};
pub use tableau::{apply_clifford, measure_pauli, Measurement, StabilizerState};

pub type Result<T> = std::result::Result<T, PauliError>;
