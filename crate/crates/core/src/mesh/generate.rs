//! Boundary sampling, constrained Delaunay refinement and smoothing.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};

use super::{angles, mesh_quality, signed_area, BoundaryEdge, BoundaryMarker, MeshGeometry, MeshKind, Region, TriMesh};
use crate::error::{Error, Result};
use crate::geometry::{DiskSpec, DomainSpec, ObstacleFamily, ObstacleSpec, Point};

type Cdt = ConstrainedDelaunayTriangulation<Point2<f64>>;

#[derive(Debug, Clone, PartialEq)]
pub struct MeshOptions {
    /// Target maximum edge length.
    pub h: f64,
    /// 0 gives the canonical symmetric boundary sampling; any other value
    /// draws random sampling phases, yielding an independent re-mesh.
    pub seed: u64,
    pub kind: MeshKind,
    pub smoothing_passes: usize,
}

impl MeshOptions {
    pub fn new(h: f64) -> Self {
        Self { h, seed: 0, kind: MeshKind::Perforated, smoothing_passes: 3 }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn kind(mut self, kind: MeshKind) -> Self {
        self.kind = kind;
        self
    }
}

/// Mesh of `B \ rho_t(P)` with the default options.
pub fn triangulate(domain: &DomainSpec, t: f64, h: f64) -> Result<TriMesh> {
    triangulate_with(domain, t, &MeshOptions::new(h))
}

/// Mesh of the whole disk with the obstacle at phase `t` as a marked region.
pub fn triangulate_full_disk(domain: &DomainSpec, t: f64, h: f64) -> Result<TriMesh> {
    triangulate_with(domain, t, &MeshOptions::new(h).kind(MeshKind::FullDisk))
}

/// Mesh of the disk alone.
pub fn triangulate_disk(disk: &DiskSpec, h: f64) -> Result<TriMesh> {
    disk.validate()?;
    check_h(h)?;
    let mut rng = None::<ChaCha8Rng>;
    let outer = sample_outer(disk, h, &mut rng);
    let n_outer = outer.len();
    let markers = vec![BoundaryMarker::Outer; n_outer];
    let edges: Vec<[usize; 2]> = (0..n_outer).map(|i| [i, (i + 1) % n_outer]).collect();
    let geometry = MeshGeometry { disk: *disk, obstacle: None };
    let area = disk.area();
    build(outer, markers, edges, h, MeshKind::Perforated, &geometry, area, None, 3)
}

pub fn triangulate_with(domain: &DomainSpec, t: f64, opts: &MeshOptions) -> Result<TriMesh> {
    domain.validate()?;
    check_h(opts.h)?;
    let obstacle = domain.obstacle.clone().with_phase(t);
    let (_, circum) = obstacle.incircle_circumcircle();
    let gap = domain.disk.radius - domain.disk.offset - circum;
    if opts.h >= 0.5 * gap {
        return Err(Error::MeshFailure(format!(
            "element size {} is too coarse for the gap {gap} between obstacle and disk",
            opts.h
        )));
    }
    let mut rng = (opts.seed != 0).then(|| ChaCha8Rng::seed_from_u64(opts.seed));
    let outer = sample_outer(&domain.disk, opts.h, &mut rng);
    let inner = sample_inner(&obstacle, opts.h, &mut rng);
    let (n_outer, n_inner) = (outer.len(), inner.len());
    let mut points = outer;
    points.extend(inner);
    let mut markers = vec![BoundaryMarker::Outer; n_outer];
    markers.extend(std::iter::repeat_n(BoundaryMarker::Inner, n_inner));
    let mut edges: Vec<[usize; 2]> = (0..n_outer).map(|i| [i, (i + 1) % n_outer]).collect();
    edges.extend((0..n_inner).map(|i| [n_outer + i, n_outer + (i + 1) % n_inner]));
    let geometry = MeshGeometry { disk: domain.disk, obstacle: Some(obstacle.clone()) };
    let area = match opts.kind {
        MeshKind::Perforated => domain.disk.area() - obstacle.area(),
        MeshKind::FullDisk => domain.disk.area(),
    };
    build(points, markers, edges, opts.h, opts.kind, &geometry, area, Some(n_outer), opts.smoothing_passes)
}

fn check_h(h: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::MeshFailure(format!("element size {h} must be positive")));
    }
    Ok(())
}

/// Outer circle sampled uniformly about its own centre. An even count keeps
/// the sampling symmetric about the x1-axis.
fn sample_outer(disk: &DiskSpec, h: f64, rng: &mut Option<ChaCha8Rng>) -> Vec<Point> {
    let mut count = (TAU * disk.radius / (0.95 * h)).ceil() as usize;
    count = count.div_ceil(2) * 2;
    count = count.max(8);
    let shift = rng.as_mut().map_or(0.0, |r| r.random::<f64>());
    (0..count).map(|j| disk.point_at_center_angle(TAU * (j as f64 + shift) / count as f64)).collect()
}

/// Dense chord-length table of the body-frame profile on `[a, b]`.
fn arc_table(ob: &ObstacleSpec, a: f64, b: f64, steps: usize) -> (Vec<f64>, Vec<f64>) {
    let mut psi = Vec::with_capacity(steps + 1);
    let mut s = Vec::with_capacity(steps + 1);
    let pt = |p: f64| {
        let r = ob.profile_radius(p);
        [r * p.cos(), r * p.sin()]
    };
    let mut prev = pt(a);
    let mut acc = 0.0;
    for k in 0..=steps {
        let p = a + (b - a) * k as f64 / steps as f64;
        let q = pt(p);
        acc += (q[0] - prev[0]).hypot(q[1] - prev[1]);
        prev = q;
        psi.push(p);
        s.push(acc);
    }
    (psi, s)
}

fn invert_arc(psi: &[f64], s: &[f64], target: f64) -> f64 {
    let i = s.partition_point(|&v| v < target).clamp(1, s.len() - 1);
    let (s0, s1) = (s[i - 1], s[i]);
    let w = if s1 > s0 { (target - s0) / (s1 - s0) } else { 0.0 };
    psi[i - 1] + w * (psi[i] - psi[i - 1])
}

/// Body-frame angles of the obstacle boundary nodes, roughly equispaced in
/// arc length.
fn inner_angles(ob: &ObstacleSpec, h: f64, rng: &mut Option<ChaCha8Rng>) -> Vec<f64> {
    let n = ob.n as usize;
    let half = PI / n as f64;
    let symmetric = ob.asymmetry == 0.0;
    let keeps_corners = ob.family != ObstacleFamily::Gear;
    if symmetric && (rng.is_none() || keeps_corners) {
        // One half-sector, mirrored and replicated: the node set is invariant
        // under the dihedral group of the obstacle.
        let (psi, s) = arc_table(ob, 0.0, half, 4000);
        let len = *s.last().unwrap();
        let m = ((len / (0.9 * h)).ceil() as usize).max(2);
        let halfs: Vec<f64> = (0..m).map(|j| invert_arc(&psi, &s, len * j as f64 / m as f64)).collect();
        let mut out = Vec::with_capacity(2 * m * n);
        for k in 0..n {
            let base = TAU * k as f64 / n as f64;
            for &a in &halfs {
                out.push(base + a);
            }
            for j in 0..m {
                out.push(base + 2.0 * half - if j == 0 { half } else { halfs[m - j] });
            }
        }
        out
    } else {
        let (psi, s) = arc_table(ob, 0.0, TAU, 4000 * n);
        let len = *s.last().unwrap();
        let m = ((len / (0.9 * h)).ceil() as usize).max(6);
        let shift = rng.as_mut().map_or(0.0, |r| r.random::<f64>());
        (0..m).map(|j| invert_arc(&psi, &s, len * (j as f64 + shift) / m as f64)).collect()
    }
}

/// Physical positions of the obstacle boundary nodes. The phase is reduced
/// modulo one rotation period so that congruent placements produce the same
/// node list: bit for bit at whole periods, otherwise up to rounding.
fn sample_inner(ob: &ObstacleSpec, h: f64, rng: &mut Option<ChaCha8Rng>) -> Vec<Point> {
    let body = inner_angles(ob, h, rng);
    let period = TAU / ob.n as f64;
    let whole = if ob.asymmetry == 0.0 { (ob.phase / period).floor() } else { 0.0 };
    let mut reduced = ob.phase - whole * period;
    let slack = 64.0 * f64::EPSILON * ob.phase.abs().max(1.0);
    if ob.asymmetry == 0.0 && (reduced <= slack || period - reduced <= slack) {
        // A whole number of periods, up to rounding of the division.
        reduced = 0.0;
    }
    let rot = ob.placement_offset() + reduced;
    body.iter()
        .map(|&psi| {
            let r = ob.profile_radius(psi);
            let phi = rot + psi;
            [r * phi.cos(), r * phi.sin()]
        })
        .collect()
}

fn winding_inside(poly: &[Point], p: Point) -> bool {
    let mut inside = false;
    let m = poly.len();
    for i in 0..m {
        let (a, b) = (poly[i], poly[(i + 1) % m]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn cdt_from(points: &[Point], edges: &[[usize; 2]]) -> Result<Cdt> {
    let verts: Vec<Point2<f64>> = points.iter().map(|p| Point2::new(p[0], p[1])).collect();
    let cdt = Cdt::bulk_load_cdt(verts, edges.to_vec()).map_err(|e| Error::MeshFailure(format!("{e:?}")))?;
    if cdt.num_vertices() != points.len() {
        return Err(Error::MeshFailure("duplicate boundary nodes".into()));
    }
    Ok(cdt)
}

#[allow(clippy::too_many_arguments)]
fn build(
    points: Vec<Point>,
    markers: Vec<BoundaryMarker>,
    edges: Vec<[usize; 2]>,
    h: f64,
    kind: MeshKind,
    geometry: &MeshGeometry,
    expected_area: f64,
    inner_start: Option<usize>,
    smoothing_passes: usize,
) -> Result<TriMesh> {
    let mut cdt = cdt_from(&points, &edges)?;
    let max_area = 0.5 * 3f64.sqrt() / 4.0 * h * h;
    let budget = (4.0 * expected_area / max_area) as usize + 10 * points.len();
    let params = RefinementParameters::<f64>::new()
        .with_angle_limit(AngleLimit::from_deg(28.0))
        .with_max_allowed_area(max_area)
        .with_max_additional_vertices(budget)
        .keep_constraint_edges()
        .exclude_outer_faces(kind == MeshKind::Perforated);
    let result = cdt.refine(params);
    if !result.refinement_complete {
        return Err(Error::MeshFailure("Delaunay refinement ran out of vertices".into()));
    }

    let mut vertices: Vec<Point> = cdt.vertices().map(|v| [v.position().x, v.position().y]).collect();
    let mut node_marker: Vec<Option<BoundaryMarker>> = vec![None; vertices.len()];
    for (i, m) in markers.iter().enumerate() {
        node_marker[i] = Some(*m);
    }
    // Constraint edges, including any that refinement subdivided.
    let mut constraint: Vec<[usize; 2]> = Vec::new();
    for e in cdt.undirected_edges() {
        if e.is_constraint_edge() {
            let [a, b] = e.vertices();
            constraint.push([a.fix().index(), b.fix().index()]);
        }
    }
    for &[a, b] in &constraint {
        for v in [a, b] {
            if node_marker[v].is_none() {
                let p = vertices[v];
                let m = if geometry.distance_to(BoundaryMarker::Outer, p)
                    <= geometry.distance_to(BoundaryMarker::Inner, p)
                {
                    BoundaryMarker::Outer
                } else {
                    BoundaryMarker::Inner
                };
                node_marker[v] = Some(m);
                vertices[v] = geometry.project(m, p);
            }
        }
    }
    let inner_poly = |verts: &[Point]| -> Vec<Point> {
        let Some(_) = inner_start else { return Vec::new() };
        inner_loop_polygon(verts, &constraint, &node_marker)
    };

    let mut mesh = extract(&cdt_from(&vertices, &constraint)?, &vertices, &inner_poly(&vertices), kind)?;
    let before = mesh_quality_of(&vertices, &mesh);
    for _ in 0..smoothing_passes {
        smooth(&mut vertices, &mesh, &node_marker);
    }
    if smoothing_passes > 0 {
        let smoothed = extract(&cdt_from(&vertices, &constraint)?, &vertices, &inner_poly(&vertices), kind)?;
        if mesh_quality_of(&vertices, &smoothed) >= before {
            mesh = smoothed;
        } else {
            vertices = cdt.vertices().map(|v| [v.position().x, v.position().y]).collect();
            for (v, m) in node_marker.iter().enumerate() {
                if let Some(m) = m {
                    vertices[v] = geometry.project(*m, vertices[v]);
                }
            }
        }
    }
    let (triangles, regions) = mesh;

    // Drop nodes that ended up in the hole (none are expected, but the
    // refinement may place Steiner points there when faces are not excluded).
    let mut used = vec![false; vertices.len()];
    for t in &triangles {
        for &v in t {
            used[v] = true;
        }
    }
    let mut remap = vec![usize::MAX; vertices.len()];
    let mut kept = Vec::with_capacity(vertices.len());
    for (i, &u) in used.iter().enumerate() {
        if u {
            remap[i] = kept.len();
            kept.push(vertices[i]);
        }
    }
    let triangles = triangles.iter().map(|t| [remap[t[0]], remap[t[1]], remap[t[2]]]).collect();
    let boundary_edges = constraint
        .iter()
        .map(|&[a, b]| BoundaryEdge {
            nodes: [remap[a], remap[b]],
            marker: node_marker[a].expect("constraint endpoint carries a marker"),
        })
        .collect();
    let mesh = TriMesh {
        vertices: kept,
        triangles,
        boundary_edges,
        target_h: h,
        kind,
        regions: Some(regions),
        geometry: Some(geometry.clone()),
    };
    mesh.validate()?;
    Ok(mesh)
}

fn inner_loop_polygon(vertices: &[Point], constraint: &[[usize; 2]], marker: &[Option<BoundaryMarker>]) -> Vec<Point> {
    let mut next: HashMap<usize, Vec<usize>> = HashMap::new();
    for &[a, b] in constraint {
        if marker[a] == Some(BoundaryMarker::Inner) {
            next.entry(a).or_default().push(b);
            next.entry(b).or_default().push(a);
        }
    }
    let Some(&start) = next.keys().min() else { return Vec::new() };
    let mut poly = vec![vertices[start]];
    let (mut prev, mut cur) = (start, next[&start][0]);
    while cur != start {
        poly.push(vertices[cur]);
        let nb = &next[&cur];
        let nxt = if nb[0] == prev { nb[1] } else { nb[0] };
        prev = cur;
        cur = nxt;
    }
    poly
}

type Elements = (Vec<[usize; 3]>, Vec<Region>);

fn extract(cdt: &Cdt, vertices: &[Point], inner_poly: &[Point], kind: MeshKind) -> Result<Elements> {
    let mut tris = Vec::with_capacity(cdt.num_inner_faces());
    let mut regions = Vec::with_capacity(cdt.num_inner_faces());
    for f in cdt.inner_faces() {
        let [a, b, c] = f.vertices().map(|v| v.fix().index());
        let (pa, pb, pc) = (vertices[a], vertices[b], vertices[c]);
        let centroid = [(pa[0] + pb[0] + pc[0]) / 3.0, (pa[1] + pb[1] + pc[1]) / 3.0];
        let region = if !inner_poly.is_empty() && winding_inside(inner_poly, centroid) {
            Region::Obstacle
        } else {
            Region::Free
        };
        if region == Region::Obstacle && kind == MeshKind::Perforated {
            continue;
        }
        let tri = if signed_area(pa, pb, pc) > 0.0 { [a, b, c] } else { [a, c, b] };
        tris.push(tri);
        regions.push(region);
    }
    if tris.is_empty() {
        return Err(Error::MeshFailure("triangulation produced no elements".into()));
    }
    Ok((tris, regions))
}

fn mesh_quality_of(vertices: &[Point], (tris, _): &Elements) -> f64 {
    let m = TriMesh {
        vertices: vertices.to_vec(),
        triangles: tris.clone(),
        boundary_edges: Vec::new(),
        target_h: 0.0,
        kind: MeshKind::Perforated,
        regions: None,
        geometry: None,
    };
    mesh_quality(&m).min_angle_deg
}

/// One pass of guarded Laplacian smoothing over free nodes: a node moves to
/// the centroid of its neighbours only if no incident triangle flips and the
/// smallest incident angle does not shrink.
fn smooth(vertices: &mut [Point], (tris, _): &Elements, marker: &[Option<BoundaryMarker>]) {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for (k, t) in tris.iter().enumerate() {
        for &v in t {
            incident[v].push(k);
        }
    }
    let min_angle = |verts: &[Point], ks: &[usize]| -> f64 {
        ks.iter()
            .map(|&k| {
                let [a, b, c] = tris[k];
                if signed_area(verts[a], verts[b], verts[c]) <= 0.0 {
                    return -1.0;
                }
                angles(verts[a], verts[b], verts[c]).into_iter().fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min)
    };
    for v in 0..vertices.len() {
        if marker[v].is_some() || incident[v].is_empty() {
            continue;
        }
        let mut sum = [0.0, 0.0];
        let mut count = 0.0;
        for &k in &incident[v] {
            for &w in &tris[k] {
                if w != v {
                    sum[0] += vertices[w][0];
                    sum[1] += vertices[w][1];
                    count += 1.0;
                }
            }
        }
        let old = vertices[v];
        let before = min_angle(vertices, &incident[v]);
        vertices[v] = [sum[0] / count, sum[1] / count];
        if min_angle(vertices, &incident[v]) < before {
            vertices[v] = old;
        }
    }
}
