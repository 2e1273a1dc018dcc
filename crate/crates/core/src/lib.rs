//! Interior penalty virtual element method (IPVEM) for the fourth-order
//! singular perturbation problem
//!
//! ```text
//!     ε²Δ²u − Δu = f   in Ω,        u = ∂u/∂n = 0   on ∂Ω
//! ```
//!
//! on general polygonal meshes. The crate is organized bottom-up:
//!
//! * [`mesh`]: polygonal meshes, generators (grids, distorted grids,
//!   centroidal Voronoi tessellations), topology and text I/O.
//! * [`basis`] and [`quadrature`]: scaled monomials and the edge / triangle
//!   rules every integral in the method goes through.
//! * [`element`]: per-element DoF layout, the projectors Π∇, Π⁰ and Π^Δ,
//!   local stiffness matrices and the load vector.
//! * [`assembly`]: global numbering, volume and interior-penalty assembly,
//!   boundary conditions and the sparse solve.
//! * [`analysis`]: manufactured solutions, the energy error, rate fitting and
//!   the convergence-study driver.

pub mod analysis;
pub mod assembly;
pub mod basis;
pub mod element;
mod error;
pub mod mesh;
pub mod quadrature;

pub use error::{Error, Result};

/// Points and vectors in the plane.
pub type Point = nalgebra::Point2<f64>;
pub type Vector = nalgebra::Vector2<f64>;
