//! P1 finite elements: assembly, the principal Dirichlet eigenpair, the
//! torsion problem and boundary flux recovery.

mod assembly;
mod eigen;
mod flux;
mod poisson;

pub use assembly::{assemble, assemble_potential, element_matrices};
pub use eigen::{free_nodes, schrodinger_eigenpair, smallest_eigenpair, EigenSolution, DEFAULT_TOL};
pub use flux::{boundary_flux, residual_flux, BoundaryFlux, FluxRecovery};
pub use poisson::{dirichlet_energy, energy_report, solve_poisson, unit_load, EnergyReport};

use crate::error::Result;
use crate::linalg::SparseSymMatrix;
use crate::mesh::TriMesh;

/// Assembled operators of one mesh together with its Dirichlet nodes.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub k: SparseSymMatrix,
    pub m: SparseSymMatrix,
    pub dirichlet: Vec<usize>,
}

impl Discretization {
    pub fn new(mesh: &TriMesh) -> Result<Self> {
        let (k, m) = assemble(mesh)?;
        Ok(Self { k, m, dirichlet: mesh.dirichlet_nodes() })
    }

    pub fn eigenpair(&self, tol: f64) -> Result<EigenSolution> {
        smallest_eigenpair(&self.k, &self.m, &self.dirichlet, tol)
    }

    /// Torsion function and its energy report.
    pub fn torsion(&self) -> Result<(Vec<f64>, EnergyReport)> {
        let load = unit_load(&self.m);
        let u = solve_poisson(&self.k, &load, &self.dirichlet)?;
        let rep = energy_report(&self.k, &u, &load);
        Ok((u, rep))
    }
}
