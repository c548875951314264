//! Scenario files, CSV time-series output, model curve sweeps and the
//! command-line front end for the `hybrid-dc-core` simulator.

pub mod cli;
pub mod csv_out;
pub mod curves;
mod error;
pub mod scenario_file;

pub use csv_out::{format_sig9, write_csv, CSV_HEADER};
pub use error::Error;
pub use scenario_file::{parse_scenario, to_scenario_text, ParsedScenario, ScenarioError};
