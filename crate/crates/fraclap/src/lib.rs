//! Numerical toolkit for the one-dimensional periodic fractional Laplacian.
//!
//! The operator `(-Δ)^s` on 2π-periodic functions is realized two independent
//! ways — an exact spectral diagonal and a principal-value quadrature built on
//! the periodized power-law kernel — and everything downstream (resolvent
//! solves, constrained minimization, bifurcation branches, the example-problem
//! catalog) is checked against both routes.
//!
//! The crate is `no_std` + `alloc`: all heavy lifting is plain `f64` arithmetic
//! on heap vectors, with `libm` supplying the math primitives. IO, file
//! formats, and the CLI live in the companion `fraclap-cli` crate.

#![no_std]
#![deny(unsafe_code)]
// Stencil and multi-array loops keep their explicit indices: the index IS the
// grid coordinate the math is written in.
#![allow(clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod continuation;
pub mod field;
pub mod kernel;
pub mod linalg;
pub mod linear;
pub mod operator;
pub mod problems;
pub mod rng;
pub mod space;
pub mod variational;

pub use field::{GridField, PeriodicWave, SpectralField};
pub use kernel::KernelTable;
pub use operator::{QuadratureOperator, SpectralOperator};
