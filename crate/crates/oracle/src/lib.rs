//! Brute-force reference computations for testing `ipvem`.
//!
//! Nothing here shares numerical code with the crate under test: Gauss nodes
//! come from bracketed root finding, polygon integrals from the divergence
//! theorem or refined signed fans, and the projectors from their defining
//! integrals with exact edge traces.

mod monomials;
mod penalty;
mod polygon;
mod projectors;
pub mod quadrature;

pub use monomials::Monomials;
pub use penalty::{oracle_edge_integral, oracle_penalty};
pub use polygon::Polygon;
pub use projectors::{oracle_projectors, OracleProjectors};

/// Accuracy knobs shared by the oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Each fan triangle is split into `refinement²` pieces.
    pub refinement: usize,
    /// Gauss points per edge panel.
    pub edge_order: usize,
    pub edge_panels: usize,
    /// Default comparison tolerance.
    pub tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            refinement: 10,
            edge_order: 12,
            edge_panels: 2,
            tolerance: 1e-10,
        }
    }
}

/// `max |a − b| / max(1, max |b|)`.
pub fn relative_difference(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax().max(1.0)
}
