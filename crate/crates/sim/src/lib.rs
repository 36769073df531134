//! Density-matrix simulation of QAOA variants under a parameterized
//! depolarizing + thermal-relaxation noise model.
//!
//! The crate is organized around six modules:
//!
//! * [`densim`] — exact density-matrix simulation (states, unitaries, Kraus
//!   channels, measurement, sampling, Ising expectations),
//! * [`noise`] — noise-model construction (thermal relaxation, depolarizing
//!   channels, average-fidelity matching, strength scaling),
//! * [`circuits`] — gate-level IR, QAOA circuit construction, transpilation
//!   to the native set `{RZ, SX, CX}`, scheduling and noise insertion,
//! * [`problems`] — Max-Cut / Partition / Vertex Cover instances, Ising
//!   encodings, brute-force oracles, quality metrics and warm starts,
//! * [`qaoa`] — variational drivers for the four variants and the RQAOA
//!   recursion,
//! * [`bench`] — experiment orchestration, runtime estimation and reports.
//!
//! Convention used throughout: qubit index 0 is the least-significant bit of
//! the computational-basis integer.

pub mod bench;
pub mod circuits;
pub mod densim;
mod error;
pub mod linalg;
pub mod noise;
pub mod problems;
pub mod qaoa;

pub use error::{Error, Result};
