//! Columnar datasets and the numerical kernel for guided regression and
//! two-sample analyses.

pub mod data;
pub mod stats;
