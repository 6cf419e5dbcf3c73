//! Dirichlet eigenvalues of a disk with a rotating, dihedrally symmetric
//! obstacle: geometry, meshing, P1 finite elements, shape derivatives and
//! rotation sweeps.

pub mod error;
pub mod fem;
pub mod geometry;
pub mod linalg;
pub mod mesh;
pub mod reference;
pub mod shape_derivative;
pub mod sweep;

pub use error::{Error, Result};
