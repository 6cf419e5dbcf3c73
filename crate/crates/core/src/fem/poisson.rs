use serde::Serialize;

use super::eigen::free_nodes;
use crate::error::{Error, Result};
use crate::linalg::{EnvelopeCholesky, SparseSymMatrix};

/// Load vector of the unit right-hand side, `M 1`.
pub fn unit_load(m: &SparseSymMatrix) -> Vec<f64> {
    m.row_sums()
}

/// Solves `K u = load` with `u = 0` on `dirichlet`; returns all nodal values.
pub fn solve_poisson(k: &SparseSymMatrix, load: &[f64], dirichlet: &[usize]) -> Result<Vec<f64>> {
    let free = free_nodes(k.dim(), dirichlet);
    let kf = k.submatrix(&free);
    let bf: Vec<f64> = free.iter().map(|&i| load[i]).collect();
    let chol = EnvelopeCholesky::factor(&kf)?;
    let xf = chol.solve(&bf);
    let r = kf.mul_vec(&xf);
    let num: f64 = r.iter().zip(&bf).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let den: f64 = bf.iter().map(|b| b * b).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let tol = 1e-8;
    if num / den > tol {
        return Err(Error::UnconvergedSolution { residual: num / den, tol });
    }
    let mut u = vec![0.0; k.dim()];
    for (&i, &x) in free.iter().zip(&xf) {
        u[i] = x;
    }
    Ok(u)
}

/// `u^T K u`.
pub fn dirichlet_energy(k: &SparseSymMatrix, u: &[f64]) -> f64 {
    k.bilinear(u, u)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    pub energy: f64,
    /// `u^T load`, which equals the energy for the discrete solution.
    pub load_functional: f64,
    pub relative_mismatch: f64,
}

pub fn energy_report(k: &SparseSymMatrix, u: &[f64], load: &[f64]) -> EnergyReport {
    let energy = dirichlet_energy(k, u);
    let load_functional: f64 = u.iter().zip(load).map(|(a, b)| a * b).sum();
    let scale = energy.abs().max(load_functional.abs());
    let relative_mismatch = if scale > 0.0 { (energy - load_functional).abs() / scale } else { 0.0 };
    EnergyReport { energy, load_functional, relative_mismatch }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::TripletBuilder;

    #[test]
    fn zero_vector_has_zero_energy() {
        let mut b = TripletBuilder::new(2);
        b.add_sym(0, 0, 1.0);
        b.add_sym(1, 1, 1.0);
        assert_eq!(dirichlet_energy(&b.build(), &[0.0, 0.0]), 0.0);
    }

    #[test]
    fn interval_torsion_is_nodally_exact() {
        // -u'' = 1 on (0, 1): P1 is nodally exact, u = x (1 - x) / 2.
        let n = 20;
        let h = 1.0 / n as f64;
        let mut k = TripletBuilder::new(n + 1);
        let mut m = TripletBuilder::new(n + 1);
        for e in 0..n {
            k.add_sym(e, e, 1.0 / h);
            k.add_sym(e + 1, e + 1, 1.0 / h);
            k.add_sym(e, e + 1, -1.0 / h);
            m.add_sym(e, e, h / 3.0);
            m.add_sym(e + 1, e + 1, h / 3.0);
            m.add_sym(e, e + 1, h / 6.0);
        }
        let (k, m) = (k.build(), m.build());
        let load = unit_load(&m);
        let u = solve_poisson(&k, &load, &[0, n]).unwrap();
        for (i, ui) in u.iter().enumerate() {
            let x = i as f64 * h;
            assert!((ui - 0.5 * x * (1.0 - x)).abs() < 1e-12);
        }
        let rep = energy_report(&k, &u, &load);
        assert!(rep.relative_mismatch < 1e-12);
    }
}
