//! Configuration, dispatch and output for the `nonlocal` experiment runner.

pub mod config;
pub mod output;
pub mod registry;
pub mod run;
