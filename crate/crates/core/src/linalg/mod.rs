//! Sparse symmetric storage and a profile Cholesky solver.

mod cholesky;
mod sparse;

pub use cholesky::{reverse_cuthill_mckee, EnvelopeCholesky};
pub use sparse::{SparseSymMatrix, TripletBuilder};
