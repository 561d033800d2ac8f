use thiserror::Error;

use crate::geometry::ManifoldKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("radius {r} outside the domain [0, {r_max}]")]
    Domain { r: f64, r_max: f64 },

    #[error("invalid manifold: {0}")]
    Manifold(String),

    #[error("warp table: {0}")]
    WarpTable(String),

    #[error("field has {got} samples but the grid has {expected} cells")]
    Shape { expected: usize, got: usize },

    #[error("no closed-form weight for {kind} in dimension {dim}; use the quadrature weight")]
    UnsupportedClosedForm { kind: ManifoldKind, dim: usize },

    #[error("weight unit-Laplacian residual {residual:e} exceeds {tolerance:e}")]
    WeightResidual { residual: f64, tolerance: f64 },

    #[error("initial profile: {0}")]
    Profile(String),

    #[error("no amplitude makes the energy negative: the potential integral vanishes")]
    NoScaling,

    #[error("configuration: {0}")]
    Config(String),

    #[error("linear solve residual {residual:e} above tolerance {tol:e} at t = {t}")]
    LinearSolve { t: f64, residual: f64, tol: f64 },

    #[error("malformed diagnostics file: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
