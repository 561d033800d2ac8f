//! Numerical laboratory for the focusing nonlinear Schrödinger equation
//! `i u_t = Δu + |u|^{p-1} u` on radially symmetric warped-product manifolds
//! `g = dr² + h(r)² dθ²`.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: manifolds, cell-centred radial grids, the flux-form
//!   Laplace–Beltrami operator and the weighted inner product.
//! * [`weight`]: virial weights solving `Δρ = 1`, their Hessian bounds, and
//!   the `τ`/`κ` blow-up thresholds.
//! * [`solver`]: Strang-split Crank–Nicolson time stepping and the run loop.
//! * [`diagnostics`]: conserved quantities, the virial functional `J` and its
//!   time derivatives, concavity checks and blow-up time bounds.
//! * [`config`], [`output`], [`sweep`], [`report`]: the experiment plumbing
//!   used by the `nlslab` command-line tool.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod output;
pub mod quadrature;
pub mod report;
pub mod solver;
pub mod sweep;
pub mod tridiag;
pub mod weight;

pub use diagnostics::DiagnosticsRecord;
pub use error::{Error, Result};
pub use geometry::{Manifold, ManifoldKind, OuterBoundary, RadialGrid, WarpTable};
pub use solver::{Outcome, RunConfig, RunResult, Simulation, WaveState};
pub use weight::{ThresholdReport, WeightFunction};
