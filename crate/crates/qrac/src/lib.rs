//! Exact construction and verification of the (n, n-1) quantum random
//! access code: n classical bits stored in n-1 qubits so that any single
//! bit can be recovered with probability (1 + sqrt((n-1)/n)) / 2.
//!
//! The crate provides:
//! - a symplectic-bitmask Pauli algebra ([`pauli`]),
//! - a small dense statevector/operator oracle with a Hermitian Jacobi
//!   eigensolver ([`dense`]),
//! - the encoding codebook and its displacement structure ([`codebook`]),
//! - optimal two-outcome POVMs and their explicit Pauli observables
//!   ([`decoder`]),
//! - linear-depth decoding circuits and the state-preparation circuit
//!   ([`circuit`]),
//! - quantitative analysis and a deterministic shot simulator
//!   ([`analysis`]).
//!
//! Numeric code is generic over the scalar type through [`scalar::Real`]
//! (implemented for `f32` and `f64`); the `*64` aliases below fix the
//! default double-precision instantiation.

pub mod analysis;
pub mod circuit;
pub mod codebook;
pub mod decoder;
pub mod dense;
pub mod error;
pub mod pauli;
pub mod scalar;

pub use codebook::{Bits, QracInstance};
pub use error::{QracError, Result};
pub use pauli::{PauliLetter, PauliString};
pub use scalar::Real;

/// Double-precision Pauli sum.
pub type PauliSum64 = pauli::PauliSum<f64>;
/// Double-precision state vector.
pub type StateVector64 = dense::StateVector<f64>;
/// Double-precision dense operator.
pub type DenseOperator64 = dense::DenseOperator<f64>;
/// Double-precision POVM pair.
pub type PovmPair64 = decoder::PovmPair<f64>;
/// Double-precision W-decomposition.
pub type WDecomposition64 = decoder::WDecomposition<f64>;
/// Double-precision circuit.
pub type Circuit64 = circuit::Circuit<f64>;
/// Double-precision rotation step.
pub type RotationStep64 = circuit::RotationStep<f64>;
