//! Matrix ingestion, run configuration, reports and the dispatcher behind the
//! command-line front end.

mod config;
mod mtx;
mod report;
mod run;

pub use config::{load_matrix, Algorithm, RunConfig};
pub use mtx::{parse_matrix_market, read_matrix_market, write_matrix_market};
pub use report::{
    format_f64, read_reference, write_compare_csv, write_history_csv, write_report,
    write_spectrum_csv, write_scan_csv, CompareHistory, RunReport,
};
pub use run::{filter_scan, oracle_spectrum, run, run_partial, ORACLE_MAX_N};
