//! Experiment runner for the `orlicz-core` toolkit: JSON configs in,
//! schema-versioned JSON reports and CSV sidecars out.

pub mod app;
pub mod commands;
pub mod config;
pub mod fixtures;
pub mod report;
