//! Convergence-study driver: spatial and temporal sweeps, single runs and
//! the two-oracle check, with CSV rows and a JSON summary.
//!
//! Parameter points run in parallel; each solver run is sequential and the
//! reference cache builds every reference once.

mod config;
mod report;
mod run;

pub use config::{parse_number, StudyConfig, StudyKind};
pub use report::{
    benchmark_matches, eps_ratio_window, spatial_benchmark, write_csv, Check, StudySummary, CSV_HEADER,
    EPS_RATIO_MIN, EPS_RATIO_TAU, ORDER_WINDOW, SPATIAL_BENCHMARK,
};
pub use run::{
    case_label, open_cache, oracle_threshold, run_oracle_check, run_single, run_spatial_study, run_temporal_study,
    EpsRatio, OraclePoint, OracleReport, OrderFit, SingleRun, StudyRow, TemporalStudy,
};
