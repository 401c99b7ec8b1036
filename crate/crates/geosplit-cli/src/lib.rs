//! Library surface of the benchmark harness: config parsing, trace
//! rendering, and the bundled benchmark tables. The `geosplit` binary is a
//! thin wrapper around these modules.

pub mod config;
pub mod emit;
pub mod reproduce;
