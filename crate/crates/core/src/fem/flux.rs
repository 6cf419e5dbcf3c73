use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::eigen::EigenSolution;
use crate::error::{Error, Result};
use crate::linalg::SparseSymMatrix;
use crate::mesh::{BoundaryMarker, TriMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxRecovery {
    /// Residual weights divided by the lumped boundary mass.
    Lumped,
    /// Residual weights solved against the consistent boundary mass.
    #[default]
    Consistent,
}

/// Normal derivative of the eigenfunction on one boundary loop, with the
/// normal pointing out of the computational domain.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFlux {
    pub marker: BoundaryMarker,
    /// Residual weight `(K u - lambda M u)_i` per boundary node.
    pub weights: BTreeMap<usize, f64>,
    /// Recovered nodal flux density.
    pub density: BTreeMap<usize, f64>,
}

impl BoundaryFlux {
    /// Density at node `i`; zero off the loop.
    pub fn at(&self, i: usize) -> f64 {
        self.density.get(&i).copied().unwrap_or(0.0)
    }

    /// `sum_i weights_i`, an approximation of the boundary integral of the flux.
    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }
}

/// Variationally consistent flux on the edges carrying `marker`.
pub fn boundary_flux(
    mesh: &TriMesh,
    k: &SparseSymMatrix,
    m: &SparseSymMatrix,
    solution: &EigenSolution,
    marker: BoundaryMarker,
    tol: f64,
    recovery: FluxRecovery,
) -> Result<BoundaryFlux> {
    if solution.residual > tol {
        return Err(Error::UnconvergedSolution { residual: solution.residual, tol });
    }
    residual_flux(mesh, k, m, &solution.u, solution.lambda1, None, marker, recovery)
}

/// Flux of any nodal field `u` satisfying `K u = lambda M u + load` in the
/// interior; `load` may be omitted.
#[allow(clippy::too_many_arguments)]
pub fn residual_flux(
    mesh: &TriMesh,
    k: &SparseSymMatrix,
    m: &SparseSymMatrix,
    u: &[f64],
    lambda: f64,
    load: Option<&[f64]>,
    marker: BoundaryMarker,
    recovery: FluxRecovery,
) -> Result<BoundaryFlux> {
    let edges: Vec<[usize; 2]> = mesh.boundary_edges.iter().filter(|e| e.marker == marker).map(|e| e.nodes).collect();
    if edges.is_empty() {
        return Err(Error::InvalidDomain(format!("mesh has no {marker:?} boundary")));
    }
    let mut nodes: Vec<usize> = edges.iter().flatten().copied().collect();
    nodes.sort_unstable();
    nodes.dedup();
    let ku = k.mul_vec(u);
    let mu = m.mul_vec(u);
    let mut weights = BTreeMap::new();
    for &i in &nodes {
        let f = load.map_or(0.0, |l| l[i]);
        weights.insert(i, ku[i] - lambda * mu[i] - f);
    }
    let pos: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(a, &b)| (b, a)).collect();
    let len = |[a, b]: [usize; 2]| {
        let (p, q) = (mesh.vertices[a], mesh.vertices[b]);
        (p[0] - q[0]).hypot(p[1] - q[1])
    };
    let mut lumped = vec![0.0; nodes.len()];
    for &e in &edges {
        let l = len(e);
        lumped[pos[&e[0]]] += 0.5 * l;
        lumped[pos[&e[1]]] += 0.5 * l;
    }
    let b: Vec<f64> = nodes.iter().map(|i| weights[i]).collect();
    let mut q: Vec<f64> = b.iter().zip(&lumped).map(|(w, l)| w / l).collect();
    if recovery == FluxRecovery::Consistent {
        // Conjugate gradients on the 1D boundary mass matrix, which is
        // spectrally equivalent to its lumped diagonal.
        let apply = |x: &[f64]| -> Vec<f64> {
            let mut y = vec![0.0; x.len()];
            for &e in &edges {
                let l = len(e);
                let (i, j) = (pos[&e[0]], pos[&e[1]]);
                y[i] += l / 3.0 * x[i] + l / 6.0 * x[j];
                y[j] += l / 6.0 * x[i] + l / 3.0 * x[j];
            }
            y
        };
        let ax = apply(&q);
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(a, c)| a - c).collect();
        let mut z: Vec<f64> = r.iter().zip(&lumped).map(|(a, l)| a / l).collect();
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, c)| a * c).sum();
        let bnorm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        for _ in 0..500 {
            if r.iter().map(|x| x * x).sum::<f64>().sqrt() <= 1e-14 * bnorm {
                break;
            }
            let ap = apply(&p);
            let alpha = rz / p.iter().zip(&ap).map(|(a, c)| a * c).sum::<f64>();
            for i in 0..q.len() {
                q[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            z = r.iter().zip(&lumped).map(|(a, l)| a / l).collect();
            let rz_new: f64 = r.iter().zip(&z).map(|(a, c)| a * c).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..p.len() {
                p[i] = z[i] + beta * p[i];
            }
        }
    }
    let density = nodes.iter().zip(q).map(|(&i, v)| (i, v)).collect();
    Ok(BoundaryFlux { marker, weights, density })
}
