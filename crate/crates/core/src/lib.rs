//! Partition function of the 8VSOS model with domain wall boundary conditions.
//!
//! The crate evaluates `Z_n` by exhaustive state enumeration and by several
//! closed formulas (elliptic weight function, the `2^n`-determinant sum and its
//! fully factored form, root-of-unity reductions, the Laurent expansion and the
//! free-fermion product), and reproduces the exact enumerations that follow
//! from them: dynamical ASM enumeration over `Z[ω]`, three-colouring statistics
//! and the dynamical 2-enumeration over `Z[i]`.
//!
//! Everything here is pure computation; the crate is `no_std` and only needs
//! `alloc`. IO, the command line and timing live in the `sosdw` crate.

#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod enumeration;
pub mod error;
pub mod partition;
pub mod scalar;
pub mod state_space;
pub mod theta;

pub use error::{Error, Result};
pub use scalar::C64;
