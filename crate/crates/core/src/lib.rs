//! Neumann-series mass-lumping corrections for P1 convection-diffusion schemes.
//!
//! The crate has two halves that check each other:
//!
//! - an exact Fourier-symbol side ([`symbols`], [`dispersion`]) with the closed-form
//!   growth rates of the lumped, corrected and consistent semi-discrete schemes on
//!   uniform 1D meshes, the gap functions deciding which scheme wins, and their
//!   thresholds, roots and asymptotic orders;
//! - a finite-element side ([`mesh`], [`assembly`], [`integrate`], [`experiments`])
//!   that assembles the P1 matrices on simplicial meshes, applies the matrix-free
//!   correction operator, integrates in time with RK4 and reports error norms and
//!   empirical convergence orders.

pub mod assembly;
pub mod dispersion;
pub mod experiments;
pub mod integrate;
pub mod mesh;
mod series;
pub mod symbols;

pub use symbols::{SchemeParams, SymbolValue};

/// Errors shared by all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("degenerate element {element} (signed volume {volume:e})")]
    DegenerateElement { element: usize, volume: f64 },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("non-positive lumped mass in row {0}")]
    NonPositiveLumping(usize),
    #[error("mass solve stalled: relative residual {residual:e} after {iterations} iterations")]
    SolveFailure { residual: f64, iterations: usize },
    #[error("state became non-finite at t = {0}")]
    NonFinite(f64),
    #[error("no plus-to-minus sign change on (0, {0}]")]
    NoRoot(f64),
    #[error("direct and factored gap evaluations disagree: {direct:e} vs {factored:e}")]
    InternalMismatch { direct: f64, factored: f64 },
    #[error("gap values {0:e} and {1:e} differ in sign; order undefined")]
    SignChange(f64, f64),
    #[error("every node fell under the relative-error exclusion threshold")]
    AllNodesExcluded,
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
