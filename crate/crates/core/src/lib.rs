//! cohlab: a desk-scale laboratory for quantum coherence.
//!
//! The crate detects and quantifies coherence of finite-dimensional quantum
//! states with respect to a fixed reference basis:
//!
//! - [`witness`] builds and compares coherence witnesses, including the
//!   dephasing-based construction that detects any given coherent state and a
//!   decision procedure for the "finer than" partial order between witnesses.
//! - [`measures`] computes off-diagonal coherence quantifiers (the
//!   real-plus-imaginary absolute sum and the modulus sum), and the
//!   robustness of coherence via a cutting-plane solver with a dual witness
//!   certificate.
//! - [`channels`] validates incoherent Kraus channels and provides the
//!   machinery for monotonicity and convexity sweeps.
//! - [`tomo`] simulates photon-counting state estimation for qubits and
//!   generator-by-generator reconstruction for qudits, with a z-test verdict
//!   on coherence.
//! - [`scheduler`] predicts and simulates how many measurements an adaptive
//!   detection walk needs before it certifies coherence.
//!
//! Everything is dense, double-precision, and capped at dimension
//! [`linalg::MAX_DIM`]; determinism is guaranteed per seed.

pub mod channels;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod report;
pub mod scheduler;
pub mod tomo;
pub mod verify;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, HermitianOperator};
