//! Exact arithmetic for the Mermin pentagram, the Kernaghan-Peres parity
//! proof over its eigenrays, and a seeded simulation of the two-party
//! six-qubit experiment built on them.
//!
//! Module map:
//! - [`pauli`]: Pauli words, phases, commutation, matrix realisation.
//! - [`pentagram`]: the ten observables and five edges, plus validation.
//! - [`atlas`]: the forty rays and the orthogonal bases among them.
//! - [`bks`]: hybrid measurements, outcome tables, parity proofs, scheme counts.
//! - [`bell`]: the six-qubit state, projective measurement, key sifting.

pub mod atlas;
pub mod bell;
pub mod bks;
pub mod error;
pub mod linalg;
pub mod pauli;
pub mod pentagram;

pub use atlas::{Atlas, BasisKind, Ray, RayBasis, RayVector};
pub use bell::{Party, Probability, Protocol, RandomSource, RunRecord, SixQubitState};
pub use bks::{HybridMeasurement, MeasurementTable, ParityVerdict};
pub use error::{Error, Result};
pub use pauli::{parse_pauli, Letter, PauliWord, Sign};
pub use pentagram::{build_pentagram, intersection, validate, EdgeId, ObservableName, Pentagram};
