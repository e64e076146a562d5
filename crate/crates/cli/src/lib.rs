//! Command-line driver for hybrid quantum-neural variational Monte Carlo
//! ground-state runs.
//!
//! The library side exists so integration tests (and other tooling) can
//! assemble and execute runs in-process; the `hvmc` binary is a thin clap
//! wrapper over these modules.

pub mod config;
pub mod driver;
pub mod presets;
