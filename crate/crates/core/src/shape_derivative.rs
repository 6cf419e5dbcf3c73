//! Rotation derivative of the principal eigenvalue: the Hadamard boundary
//! integral over the obstacle, its sector decomposition, and a finite
//! difference cross-check on a transported mesh.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fem::{boundary_flux, BoundaryFlux, Discretization, EigenSolution, FluxRecovery};
use crate::geometry::{DomainSpec, ObstacleSpec, RadialBoundary};
use crate::mesh::{triangulate, BoundaryMarker, TriMesh};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeSample {
    pub t: f64,
    pub lambda1_prime: f64,
    /// Contribution of each sector `(t + k pi/n, t + (k+1) pi/n)`, `k = 0..2n`.
    pub per_sector: Vec<f64>,
    pub fd_estimate: Option<f64>,
    /// Set when the obstacle has corners, where the formula is only formal.
    pub formal: bool,
}

const GAUSS: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

fn wrap(d: f64) -> f64 {
    let w = d.rem_euclid(TAU);
    if w > std::f64::consts::PI {
        w - TAU
    } else {
        w
    }
}

/// `lambda'(t) = -int |du/deta|^2 <eta_t, v> dsigma` over the obstacle
/// boundary, with `eta_t` the outward normal of the perforated domain and
/// `v(x) = i x`. On the curve `r = f(phi)` this is `-int q^2 f f' dphi`.
pub fn hadamard_derivative(
    domain: &DomainSpec,
    t: f64,
    mesh: &TriMesh,
    flux: &BoundaryFlux,
) -> Result<DerivativeSample> {
    let ob: ObstacleSpec = domain.obstacle.clone().with_phase(t);
    let sectors = 2 * ob.n as usize;
    let width = ob.sector_angle();
    let mut per_sector = vec![0.0; sectors];
    let mut total = 0.0;
    for e in mesh.boundary_edges.iter().filter(|e| e.marker == BoundaryMarker::Inner) {
        let [a, b] = e.nodes;
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        let (mut phi0, mut q0) = (pa[1].atan2(pa[0]), flux.at(a));
        let mut span = wrap(pb[1].atan2(pb[0]) - phi0);
        let mut q1 = flux.at(b);
        if span < 0.0 {
            phi0 += span;
            span = -span;
            std::mem::swap(&mut q0, &mut q1);
        }
        // Split the edge at sector boundaries so each piece lies in one sector.
        let mut cuts = vec![0.0];
        let rel = (phi0 - t).rem_euclid(width);
        let mut next = width - rel;
        while next < span - 1e-14 {
            if next > 1e-14 {
                cuts.push(next);
            }
            next += width;
        }
        cuts.push(span);
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mid = phi0 + 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            let mut piece = 0.0;
            for g in GAUSS {
                let s = 0.5 * (lo + hi) + g * half;
                let phi = phi0 + s;
                let q = q0 + (q1 - q0) * s / span;
                let f = ob.radius(phi);
                let df = ob.slope(phi).map_err(|_| Error::PolygonVertexOnQuadraturePoint { phi })?;
                piece -= q * q * f * df * half;
            }
            per_sector[ob.sector_of(mid)] += piece;
            total += piece;
        }
    }
    Ok(DerivativeSample { t, lambda1_prime: total, per_sector, fd_estimate: None, formal: !ob.is_smooth() })
}

/// Mesh `mesh` (of the domain at phase `t`) with the obstacle turned by
/// `delta`: nodes inside the obstacle's circumcircle rotate rigidly, nodes
/// beyond a blending band stay put, so the outer circle is unchanged and the
/// obstacle boundary nodes land exactly on the rotated curve.
pub fn transported_mesh(domain: &DomainSpec, mesh: &TriMesh, delta: f64) -> TriMesh {
    let (_, circum) = domain.obstacle.incircle_circumcircle();
    let near = domain.disk.radius - domain.disk.offset;
    let gap = near - circum;
    let r_in = circum + 0.15 * gap;
    let r_out = near - 0.15 * gap;
    let weight = |r: f64| {
        if r <= r_in {
            1.0
        } else if r >= r_out {
            0.0
        } else {
            let s = (r - r_in) / (r_out - r_in);
            1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
        }
    };
    let mut out = mesh.clone();
    for v in out.vertices.iter_mut() {
        let ang = weight(v[0].hypot(v[1])) * delta;
        if ang != 0.0 {
            let (s, c) = ang.sin_cos();
            *v = [c * v[0] - s * v[1], s * v[0] + c * v[1]];
        }
    }
    if let Some(g) = out.geometry.as_mut() {
        if let Some(ob) = g.obstacle.as_mut() {
            ob.phase += delta;
        }
    }
    out
}

/// Central difference `(lambda(t + delta) - lambda(t - delta)) / (2 delta)`
/// on meshes transported from one mesh of the domain at `t`.
pub fn finite_difference_on_mesh(domain: &DomainSpec, mesh: &TriMesh, delta: f64, tol: f64) -> Result<f64> {
    let lam = |d: f64| -> Result<f64> {
        let m = transported_mesh(domain, mesh, d);
        Ok(Discretization::new(&m)?.eigenpair(tol)?.lambda1)
    };
    Ok((lam(delta)? - lam(-delta)?) / (2.0 * delta))
}

pub fn finite_difference_derivative(domain: &DomainSpec, t: f64, delta: f64, h: f64) -> Result<f64> {
    let mesh = triangulate(domain, t, h)?;
    finite_difference_on_mesh(domain, &mesh, delta, crate::fem::DEFAULT_TOL)
}

/// Eigenpair, inner-boundary flux and Hadamard derivative for one mesh.
pub fn derivative_on_mesh(
    domain: &DomainSpec,
    t: f64,
    mesh: &TriMesh,
    tol: f64,
    recovery: FluxRecovery,
) -> Result<(EigenSolution, DerivativeSample)> {
    let disc = Discretization::new(mesh)?;
    let sol = disc.eigenpair(tol)?;
    let flux = boundary_flux(mesh, &disc.k, &disc.m, &sol, BoundaryMarker::Inner, tol, recovery)?;
    let sample = hadamard_derivative(domain, t, mesh, &flux)?;
    Ok((sol, sample))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorPairing {
    pub n: u32,
    /// `(k, k+1)` and the summed contribution of the two sectors.
    pub pairs: Vec<([usize; 2], f64)>,
    /// For odd `n`: the two sectors `n-1` and `2n-1` left over by the
    /// hemisphere pairing, summed.
    pub unpaired: Option<([usize; 2], f64)>,
    pub total: f64,
    /// Odd `n`: the pairing argument does not apply; results are a conjecture check.
    pub conjecture: bool,
}

impl SectorPairing {
    pub fn min_pair(&self) -> f64 {
        self.pairs.iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
    }
}

pub fn sector_pairing_report(sample: &DerivativeSample, n: u32) -> SectorPairing {
    let c = &sample.per_sector;
    let nn = n as usize;
    let pair = |k: usize| ([k, k + 1], c[k] + c[k + 1]);
    if nn.is_multiple_of(2) {
        SectorPairing {
            n,
            pairs: (0..nn).map(|j| pair(2 * j)).collect(),
            unpaired: None,
            total: c.iter().sum(),
            conjecture: false,
        }
    } else {
        let mut pairs: Vec<_> = (0..nn - 1).step_by(2).map(pair).collect();
        pairs.extend((nn..2 * nn - 1).step_by(2).map(pair));
        SectorPairing {
            n,
            pairs,
            unpaired: Some(([nn - 1, 2 * nn - 1], c[nn - 1] + c[2 * nn - 1])),
            total: c.iter().sum(),
            conjecture: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DiskSpec;
    use std::f64::consts::PI;

    fn gear4() -> DomainSpec {
        DomainSpec::new(ObstacleSpec::gear(4, 0.35, 0.2), DiskSpec::new(0.2, 1.0))
    }

    #[test]
    fn circle_has_zero_hadamard_derivative() {
        let domain = DomainSpec::new(ObstacleSpec::circle(0.35), DiskSpec::new(0.2, 1.0));
        let mesh = triangulate(&domain, 0.3, 0.06).unwrap();
        let (_, s) = derivative_on_mesh(&domain, 0.3, &mesh, 1e-9, FluxRecovery::Consistent).unwrap();
        assert_eq!(s.lambda1_prime, 0.0);
    }

    #[test]
    fn sectors_sum_to_total() {
        let domain = gear4();
        let mesh = triangulate(&domain, PI / 8.0, 0.05).unwrap();
        let (_, s) = derivative_on_mesh(&domain, PI / 8.0, &mesh, 1e-9, FluxRecovery::Consistent).unwrap();
        let sum: f64 = s.per_sector.iter().sum();
        assert!((sum - s.lambda1_prime).abs() <= 1e-10 * s.lambda1_prime.abs());
        assert_eq!(s.per_sector.len(), 8);
        assert!(s.lambda1_prime > 0.0);
        assert!(!s.formal);
    }

    #[test]
    fn transport_moves_obstacle_only() {
        let domain = gear4();
        let mesh = triangulate(&domain, 0.1, 0.06).unwrap();
        let moved = transported_mesh(&domain, &mesh, 0.01);
        let ob = domain.obstacle.clone().with_phase(0.11);
        let markers = mesh.node_markers();
        for (i, m) in markers.iter().enumerate() {
            let (p, q) = (mesh.vertices[i], moved.vertices[i]);
            match m {
                Some(BoundaryMarker::Outer) => assert_eq!(p, q),
                Some(BoundaryMarker::Inner) => {
                    let phi = q[1].atan2(q[0]);
                    assert!((q[0].hypot(q[1]) - ob.radius(phi)).abs() < 1e-12);
                }
                None => {}
            }
        }
        moved.validate().unwrap();
    }

    #[test]
    fn pairing_layouts() {
        let sample = DerivativeSample {
            t: 0.1,
            lambda1_prime: 0.0,
            per_sector: (0..10).map(|k| k as f64).collect(),
            fd_estimate: None,
            formal: false,
        };
        let odd = sector_pairing_report(&sample, 5);
        let idx: Vec<[usize; 2]> = odd.pairs.iter().map(|p| p.0).collect();
        assert_eq!(idx, vec![[0, 1], [2, 3], [5, 6], [7, 8]]);
        assert_eq!(odd.unpaired, Some(([4, 9], 13.0)));
        assert!(odd.conjecture);
        let even_sample = DerivativeSample { per_sector: (0..8).map(|k| k as f64).collect(), ..sample };
        let even = sector_pairing_report(&even_sample, 4);
        assert_eq!(even.pairs.len(), 4);
        assert_eq!(even.pairs[3], ([6, 7], 13.0));
        assert_eq!(even.total, 28.0);
    }
}
