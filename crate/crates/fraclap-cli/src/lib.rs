//! Command-line front end for the `fraclap` toolkit: argument/config-file
//! handling, solver orchestration, and machine-readable JSON/CSV artifacts.
//!
//! Everything that computes lives in `fraclap`; this crate only validates
//! parameters against the library's preconditions, dispatches, and formats.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod formats;
