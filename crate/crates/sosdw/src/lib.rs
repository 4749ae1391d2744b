//! Verification suites, evaluation records, tables and benchmarks for the
//! dynamical eight-vertex (8VSOS) partition function with domain wall
//! boundary conditions. The numerics and exact arithmetic live in
//! [`sosdw_core`]; this crate adds IO, a worker pool and the `sosdw` binary.

pub mod bench;
pub mod config;
pub mod evaluate;
pub mod io;
pub mod states;
pub mod suites;
pub mod tables;

pub use sosdw_core as core;
