//! Unbiased randomized circuit compilation for time-dependent Hamiltonian
//! simulation.
//!
//! The time-ordered evolution `U(0, τ)` of `H(t) = Σ_p h_p(t) σ_p` is written
//! per segment as a linear combination of Pauli rotations (the leading
//! order of the Dyson series) and sampled Pauli products (higher orders).
//! Pairs of sampled circuits are run in a Hadamard test whose rescaled
//! outcome is an unbiased estimate of `⟨O(τ)⟩`. The biased continuous
//! qDRIFT compiler is provided as a baseline, together with dense oracles.

// `!(x > 0.0)` is used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod circuit;
pub mod compiler;
pub mod error;
pub mod estimator;
pub mod hamiltonian;
pub mod models;
pub mod oracle;
pub mod pauli;
pub mod pipeline;
pub mod qdrift;
pub mod rng;
pub mod sampling;
pub mod statevector;
pub mod waveform;

pub use error::{Error, Result};
pub use hamiltonian::{HamiltonianFile, HamiltonianTerm, TimeDependentHamiltonian};
pub use pauli::{Letter, PauliString};
pub use sampling::SegmentPlan;
pub use waveform::Waveform;
