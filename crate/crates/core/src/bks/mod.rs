//! Hybrid measurements, their outcome tables, and the parity proof of
//! non-colourability, with brute-force cross-checks.

pub mod enumerate;
pub mod measurement;
pub mod mermin;
pub mod scheme;
pub mod table;

pub use enumerate::{
    enumerate_parity_schemes, scheme_count_report, SchemeCountReport, SchemeEnumeration,
    CLAIMED_SCHEME_COUNT, CLAIMED_SCHEME_SIZE,
};
pub use measurement::{
    cell_index, cell_signs, measurement_for_basis, outcomes_of, HybridMeasurement, OutcomeCell,
};
pub use mermin::{count_satisfying, mermin_coloring_search, MerminReport};
pub use scheme::{fig2_scheme, format_scheme, parse_measurement, parse_scheme, FIG2_SCHEME};
pub use table::{
    generate_table, parity_check, search_assignment, MeasurementTable, ParityVerdict,
    SearchOutcome, FIG2_LABEL_GRID,
};
