//! Std companion to `qubo-core`: text file formats for matrices, formulas,
//! graphs and solutions, plus the batch commands behind the `qubo` binary.

pub mod commands;
pub mod format;
