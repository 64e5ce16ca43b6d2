//! Two-party simulation on the six-qubit state made of three Bell pairs.

pub mod key;
pub mod protocol;
pub mod rng;
pub mod state;

pub use key::{sift_key, verify_key, KeyMaterial};
pub use protocol::{
    perform_hybrid, perform_hybrid_forced, verify_twin_collapse, ChoicePolicy, CorrelationReport,
    HybridOutcome, MeasurementOrder, Protocol, RunRecord,
};
pub use rng::{RandomSource, Substream};
pub use state::{
    factor_check, measure_observable, prepare_psi, MeasurementEvent, Party, Probability,
    SixQubitState,
};
