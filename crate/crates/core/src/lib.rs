//! Symmetry toolkit for the fine Kolmogorov backward equation
//!
//! ```text
//! u_t + x u_y = x^2 u_xx
//! ```
//!
//! The crate provides the pieces needed to state and machine-check the
//! symmetry structure of this equation:
//!
//! * [`jet`] — dense truncated Taylor (jet) arithmetic in up to three
//!   variables, the engine behind every derivative and residual evaluation;
//! * [`lie`] — the five-dimensional essential Lie invariance algebra with
//!   exact rational structure constants and its sl(2, R) realization;
//! * [`catalog`] — the classified subalgebras, their normalizers and
//!   classifying invariants;
//! * [`ops`] — the associative algebra of Lie-symmetry operators in PBW
//!   normal form over exact rationals, with a jet-level realization;
//! * [`group`] — the essential point-symmetry group as a parameterized
//!   transformation engine (composition, point and solution actions,
//!   one-parameter subgroups, discrete symmetries);
//! * [`solution`] — closed-form solution families and residual evaluators;
//! * [`reduction`] — the codimension-one Lie reductions, their canonical
//!   transformations to heat equations with potentials, and round-trip
//!   verification;
//! * [`grid`] — the deterministic low-discrepancy sample grids used by the
//!   verification tooling.
//!
//! Everything here is `no_std` (with `alloc`); IO, CLI and report formats
//! live in the companion `fkbe-cli` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod catalog;
pub mod grid;
pub mod group;
pub mod jet;
pub mod lie;
pub mod linalg;
pub mod ops;
pub mod realize;
pub mod reduction;
pub mod solution;

pub use jet::Jet;
pub use lie::EssVec;

