//! Scenario files, seeded data, and CSV reports.
//!
//! A scenario is a line-oriented `key = value` file with `[section]`
//! headers, naming one of six pipelines. See the repository README for the
//! keys each section accepts and the columns each pipeline writes.

mod config;
mod csv;
mod data;
mod run;

pub use config::{
    build_grid, build_multipoint, build_operator_config, format_complex, gap_relation, parse_complex, parse_config,
    parse_config_with, parse_real, DataConfig, ExponentConfig, GridConfig, MultipointConfig, NonlinearityConfig,
    OperatorConfig, OracleConfig, OutputConfig, ParseOptions, ScenarioConfig, ScenarioKind, SourceConfig, TimeConfig,
};
pub use csv::{num, write_atomic, CsvTable, CSV_HEADER};
pub use data::{
    centered_gaussian, gaussian_data, gaussian_source, load_field, random_bumps, single_mode, Bump, BumpSpec,
};
pub use run::{exit_code, reason_line, run_scenario, RunOptions, RunOutcome};
