//! Parameter sweeps of the dissipative Rabi model written as CSV.
//!
//! Each sweep is described by a plain struct that can be built from a
//! [`RawConfig`] (config file merged with command-line flags) and returns a
//! [`Table`] whose rows follow grid order. Rows that fail to solve keep their
//! grid keys and carry the error message instead of values.

pub mod config;
mod error;
pub mod sweeps;
pub mod table;

pub use config::RawConfig;
pub use error::{CliError, Result};
pub use table::{Cell, Table};
