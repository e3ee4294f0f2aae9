//! Configuration, parameter sweeps, CSV output and the published-table
//! comparison used by the command-line tool.

pub mod config;
pub mod sweep;
pub mod table4;

pub use config::ExperimentSpec;
pub use sweep::{read_rows, run_sweep, write_plot_csv, write_rows, ResultRow};
pub use table4::{compare_table4, Table4Report};
