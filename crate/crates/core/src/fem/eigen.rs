use log::debug;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{EnvelopeCholesky, SparseSymMatrix};

/// Default relative tolerance for eigenvalue change and residual.
pub const DEFAULT_TOL: f64 = 1e-9;

const MAX_ITERS: usize = 400;
const BLOCK: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSolution {
    pub lambda1: f64,
    /// Nodal values on every node, zero on Dirichlet nodes, `u^T M u = 1`.
    pub u: Vec<f64>,
    /// `|K u - lambda M u| / |M u|` on the free nodes.
    pub residual: f64,
    pub iterations: usize,
}

/// Nodes that are not in `dirichlet`.
pub fn free_nodes(dim: usize, dirichlet: &[usize]) -> Vec<usize> {
    let mut fixed = vec![false; dim];
    for &d in dirichlet {
        fixed[d] = true;
    }
    (0..dim).filter(|&i| !fixed[i]).collect()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Smallest eigenpair of `K u = lambda M u` with `u = 0` on `dirichlet`.
pub fn smallest_eigenpair(
    k: &SparseSymMatrix,
    m: &SparseSymMatrix,
    dirichlet: &[usize],
    tol: f64,
) -> Result<EigenSolution> {
    eigen_shifted(k, m, dirichlet, 0.0, tol)
}

/// Smallest eigenpair of `(K + alpha V) u = lambda M u`.
pub fn schrodinger_eigenpair(
    k: &SparseSymMatrix,
    m: &SparseSymMatrix,
    v: &SparseSymMatrix,
    alpha: f64,
    dirichlet: &[usize],
    tol: f64,
) -> Result<EigenSolution> {
    if !alpha.is_finite() {
        return Err(Error::InvalidDomain(format!("potential strength {alpha} must be finite")));
    }
    let a = k.add_scaled(v, alpha);
    // For a well, K + alpha (V - M) is still positive definite because V <= M.
    eigen_shifted(&a, m, dirichlet, alpha.min(0.0), tol)
}

/// Block shift-invert subspace iteration with Rayleigh-Ritz projection.
fn eigen_shifted(
    a: &SparseSymMatrix,
    m: &SparseSymMatrix,
    dirichlet: &[usize],
    shift: f64,
    tol: f64,
) -> Result<EigenSolution> {
    let free = free_nodes(a.dim(), dirichlet);
    let nf = free.len();
    if nf == 0 {
        return Err(Error::InvalidDomain("no free nodes".into()));
    }
    let af = a.submatrix(&free);
    let mf = m.submatrix(&free);
    let op = if shift == 0.0 { af.clone() } else { af.add_scaled(&mf, -shift) };
    let chol = EnvelopeCholesky::factor(&op)?;
    debug!("eigensolver: {nf} free nodes, factor fill {}", chol.fill());

    let p = BLOCK.min(nf);
    let mut x: Vec<Vec<f64>> = (0..p)
        .map(|j| {
            (0..nf)
                .map(|i| if j == 0 { 1.0 } else { ((i * (2 * j + 1) * 7919 + 13 * j) % 1009) as f64 / 1009.0 - 0.5 })
                .collect()
        })
        .collect();
    let mut lambda_prev = f64::INFINITY;
    let mut residual = f64::INFINITY;
    for it in 1..=MAX_ITERS {
        let y: Vec<Vec<f64>> = x.iter().map(|xj| chol.solve(&mf.mul_vec(xj))).collect();
        let ay: Vec<Vec<f64>> = y.iter().map(|yj| af.mul_vec(yj)).collect();
        let my: Vec<Vec<f64>> = y.iter().map(|yj| mf.mul_vec(yj)).collect();
        let ar = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&y[i], &ay[j]) + dot(&y[j], &ay[i])));
        let br = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&y[i], &my[j]) + dot(&y[j], &my[i])));
        let l = br.clone().cholesky().ok_or(Error::NoConvergence { max_iters: it, residual })?.unpack();
        let linv = l.clone().try_inverse().ok_or(Error::NoConvergence { max_iters: it, residual })?;
        let c = &linv * &ar * linv.transpose();
        let c = 0.5 * (&c + c.transpose());
        let eig = SymmetricEigen::new(c);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let z = linv.transpose() * &eig.eigenvectors;
        x = order
            .iter()
            .map(|&col| {
                let mut v = vec![0.0; nf];
                for (r, yr) in y.iter().enumerate() {
                    let w = z[(r, col)];
                    for (vi, yi) in v.iter_mut().zip(yr) {
                        *vi += w * yi;
                    }
                }
                v
            })
            .collect();
        let lambda = eig.eigenvalues[order[0]];
        let u = &x[0];
        let au = af.mul_vec(u);
        let mu = mf.mul_vec(u);
        let r: Vec<f64> = au.iter().zip(&mu).map(|(a, b)| a - lambda * b).collect();
        residual = norm(&r) / norm(&mu);
        let change = (lambda - lambda_prev).abs() / lambda.abs().max(f64::MIN_POSITIVE);
        lambda_prev = lambda;
        if change <= tol && residual <= tol {
            let scale = dot(u, &mu).sqrt();
            let sign = if u.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
            let mut full = vec![0.0; a.dim()];
            for (&node, &val) in free.iter().zip(u) {
                full[node] = sign * val / scale;
            }
            debug!("eigensolver: lambda = {lambda}, {it} iterations, residual {residual:e}");
            return Ok(EigenSolution { lambda1: lambda, u: full, residual, iterations: it });
        }
    }
    Err(Error::NoConvergence { max_iters: MAX_ITERS, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::TripletBuilder;

    /// 1D Dirichlet Laplacian on (0, 1) with n interior nodes, P1 elements.
    fn p1_interval(n: usize) -> (SparseSymMatrix, SparseSymMatrix) {
        let h = 1.0 / (n + 1) as f64;
        let mut k = TripletBuilder::new(n + 2);
        let mut m = TripletBuilder::new(n + 2);
        for e in 0..=n {
            k.add_sym(e, e, 1.0 / h);
            k.add_sym(e + 1, e + 1, 1.0 / h);
            k.add_sym(e, e + 1, -1.0 / h);
            m.add_sym(e, e, h / 3.0);
            m.add_sym(e + 1, e + 1, h / 3.0);
            m.add_sym(e, e + 1, h / 6.0);
        }
        (k.build(), m.build())
    }

    #[test]
    fn matches_discrete_interval_eigenvalue() {
        let n = 99;
        let (k, m) = p1_interval(n);
        let sol = smallest_eigenpair(&k, &m, &[0, n + 1], DEFAULT_TOL).unwrap();
        // Exact eigenvalue of the P1 pencil on a uniform grid.
        let h = 1.0 / (n + 1) as f64;
        let c = (std::f64::consts::PI * h).cos();
        let exact = 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
        assert!((sol.lambda1 - exact).abs() / exact < 1e-10);
        assert!(sol.residual <= DEFAULT_TOL);
        assert!((m.bilinear(&sol.u, &sol.u) - 1.0).abs() < 1e-10);
        assert!(sol.u[1..=n].iter().all(|&x| x > 0.0));
        assert_eq!(sol.u[0], 0.0);
    }

    #[test]
    fn potential_shifts_spectrum() {
        let n = 49;
        let (k, m) = p1_interval(n);
        let base = smallest_eigenpair(&k, &m, &[0, n + 1], DEFAULT_TOL).unwrap().lambda1;
        // V = M: the spectrum shifts by exactly alpha.
        for alpha in [-30.0, 5.0, 100.0] {
            let s = schrodinger_eigenpair(&k, &m, &m, alpha, &[0, n + 1], DEFAULT_TOL).unwrap();
            assert!((s.lambda1 - (base + alpha)).abs() < 1e-8 * base);
        }
    }
}
