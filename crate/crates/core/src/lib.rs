//! Quasi-static brittle fracture in anti-plane shear.
//!
//! Cracks are compact polyline sets on a lattice; the elastic response is
//! the minimizer of the Dirichlet energy on the slit domain, computed with
//! P1 finite elements on meshes whose nodes are duplicated along the crack.
//! Crack evolution is driven by incremental minimization of the total
//! energy `E(g, K) = ∫|∇u|² + H¹(K)` over growing cracks.

pub mod compact_sets;
pub mod energy;
pub mod error;
pub mod evolution;
pub mod geometry;
pub mod laplace;
pub mod scenario;
pub mod slit_mesh;
mod union_find;

pub use error::{FractureError, Result};
