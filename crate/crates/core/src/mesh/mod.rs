//! Conforming triangulations of the perforated disk with marked boundaries.

mod generate;
pub mod io;

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{DiskSpec, ObstacleSpec, Point, RadialBoundary};

pub use generate::{triangulate, triangulate_disk, triangulate_full_disk, triangulate_with, MeshOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BoundaryMarker {
    /// The circle bounding the disk.
    Outer,
    /// The obstacle boundary (an interior interface on full-disk meshes).
    Inner,
}

impl BoundaryMarker {
    pub fn code(self) -> u8 {
        match self {
            BoundaryMarker::Outer => 1,
            BoundaryMarker::Inner => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(BoundaryMarker::Outer),
            2 => Some(BoundaryMarker::Inner),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    /// Part of the disk outside the obstacle.
    Free,
    /// Inside the obstacle; only present on full-disk meshes.
    Obstacle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MeshKind {
    /// The obstacle is a hole; both loops are Dirichlet boundary.
    Perforated,
    /// The whole disk is meshed and the obstacle is a marked subregion.
    FullDisk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub marker: BoundaryMarker,
}

/// Exact curves the mesh boundary was sampled from.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshGeometry {
    pub disk: DiskSpec,
    /// Obstacle at its meshed phase.
    pub obstacle: Option<ObstacleSpec>,
}

impl MeshGeometry {
    /// Moves `p` onto the curve carrying `marker` along the ray from the
    /// curve's polar centre.
    pub fn project(&self, marker: BoundaryMarker, p: Point) -> Point {
        match marker {
            BoundaryMarker::Outer => {
                let c = self.disk.center();
                let theta = (p[1] - c[1]).atan2(p[0] - c[0]);
                self.disk.point_at_center_angle(theta)
            }
            BoundaryMarker::Inner => match &self.obstacle {
                Some(ob) => ob.point(p[1].atan2(p[0])),
                None => p,
            },
        }
    }

    pub fn distance_to(&self, marker: BoundaryMarker, p: Point) -> f64 {
        let q = self.project(marker, p);
        (p[0] - q[0]).hypot(p[1] - q[1])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub target_h: f64,
    pub kind: MeshKind,
    /// Per-triangle region, when known.
    pub regions: Option<Vec<Region>>,
    pub geometry: Option<MeshGeometry>,
}

pub(crate) fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

/// Interior angles (radians) of the triangle `abc`.
pub(crate) fn angles(a: Point, b: Point, c: Point) -> [f64; 3] {
    let ang = |p: Point, q: Point, r: Point| {
        let u = [q[0] - p[0], q[1] - p[1]];
        let v = [r[0] - p[0], r[1] - p[1]];
        let cross = u[0] * v[1] - u[1] * v[0];
        let dot = u[0] * v[0] + u[1] * v[1];
        cross.abs().atan2(dot)
    };
    [ang(a, b, c), ang(b, c, a), ang(c, a, b)]
}

impl TriMesh {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_points(&self, k: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[k];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, k: usize) -> f64 {
        let [a, b, c] = self.triangle_points(k);
        signed_area(a, b, c)
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|k| self.triangle_area(k)).sum()
    }

    /// Area of the triangles in `region`.
    pub fn region_area(&self, region: Region) -> Option<f64> {
        let regions = self.regions.as_ref()?;
        Some((0..self.triangles.len()).filter(|&k| regions[k] == region).map(|k| self.triangle_area(k)).sum())
    }

    /// Marker of every node that sits on a boundary edge.
    pub fn node_markers(&self) -> Vec<Option<BoundaryMarker>> {
        let mut markers = vec![None; self.vertices.len()];
        for e in &self.boundary_edges {
            for &v in &e.nodes {
                markers[v] = Some(e.marker);
            }
        }
        markers
    }

    /// Nodes carrying homogeneous Dirichlet data: every boundary node of a
    /// perforated mesh, only the outer circle of a full-disk mesh.
    pub fn dirichlet_nodes(&self) -> Vec<usize> {
        let mut flags = vec![false; self.vertices.len()];
        for e in &self.boundary_edges {
            if self.kind == MeshKind::Perforated || e.marker == BoundaryMarker::Outer {
                flags[e.nodes[0]] = true;
                flags[e.nodes[1]] = true;
            }
        }
        flags.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i).collect()
    }

    /// Boundary edges with `marker`, chained into closed loops. Each loop is
    /// returned as an ordered list of edge indices into `boundary_edges`.
    pub fn boundary_loops(&self, marker: BoundaryMarker) -> Vec<Vec<usize>> {
        let edges: Vec<usize> =
            (0..self.boundary_edges.len()).filter(|&i| self.boundary_edges[i].marker == marker).collect();
        let mut by_node: HashMap<usize, Vec<usize>> = HashMap::new();
        for &e in &edges {
            for &v in &self.boundary_edges[e].nodes {
                by_node.entry(v).or_default().push(e);
            }
        }
        let mut used = vec![false; self.boundary_edges.len()];
        let mut loops = Vec::new();
        for &start in &edges {
            if used[start] {
                continue;
            }
            let mut lp = vec![start];
            used[start] = true;
            let mut node = self.boundary_edges[start].nodes[1];
            loop {
                let next = by_node.get(&node).and_then(|cands| cands.iter().copied().find(|&c| !used[c]));
                match next {
                    Some(e) => {
                        used[e] = true;
                        lp.push(e);
                        let [a, b] = self.boundary_edges[e].nodes;
                        node = if a == node { b } else { a };
                    }
                    None => break,
                }
            }
            loops.push(lp);
        }
        loops
    }

    /// Checks element orientation and boundary topology.
    pub fn validate(&self) -> Result<()> {
        for k in 0..self.triangles.len() {
            let a = self.triangle_area(k);
            if a.is_nan() || a <= 0.0 {
                return Err(Error::DegenerateElement { index: k, area: a });
            }
        }
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                *edge_count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        if let Some((e, _)) = edge_count.iter().find(|(_, &c)| c > 2) {
            return Err(Error::MeshFailure(format!("edge {e:?} shared by more than two triangles")));
        }
        for be in &self.boundary_edges {
            let [a, b] = be.nodes;
            if !edge_count.contains_key(&(a.min(b), a.max(b))) {
                return Err(Error::MeshFailure(format!("boundary edge {a}-{b} is not a mesh edge")));
            }
        }
        Ok(())
    }

    /// Node permutation: vertex `i` moves to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> TriMesh {
        let mut vertices = vec![[0.0; 2]; self.vertices.len()];
        for (i, &p) in perm.iter().enumerate() {
            vertices[p] = self.vertices[i];
        }
        TriMesh {
            vertices,
            triangles: self.triangles.iter().map(|t| [perm[t[0]], perm[t[1]], perm[t[2]]]).collect(),
            boundary_edges: self
                .boundary_edges
                .iter()
                .map(|e| BoundaryEdge { nodes: [perm[e.nodes[0]], perm[e.nodes[1]]], marker: e.marker })
                .collect(),
            ..self.clone()
        }
    }

    /// Uniform red refinement: every triangle is split into four and new
    /// boundary nodes are moved onto the exact curves.
    pub fn refine(&self) -> TriMesh {
        let mut vertices = self.vertices.clone();
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let boundary_marker: HashMap<(usize, usize), BoundaryMarker> = self
            .boundary_edges
            .iter()
            .map(|e| ((e.nodes[0].min(e.nodes[1]), e.nodes[0].max(e.nodes[1])), e.marker))
            .collect();
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
            let key = (a.min(b), a.max(b));
            if let Some(&m) = midpoint.get(&key) {
                return m;
            }
            let (pa, pb) = (vertices[a], vertices[b]);
            let mut p = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
            if let (Some(&marker), Some(geo)) = (boundary_marker.get(&key), self.geometry.as_ref()) {
                p = geo.project(marker, p);
            }
            vertices.push(p);
            midpoint.insert(key, vertices.len() - 1);
            vertices.len() - 1
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        let mut regions = self.regions.as_ref().map(|_| Vec::with_capacity(4 * self.triangles.len()));
        for (k, &[a, b, c]) in self.triangles.iter().enumerate() {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            triangles.extend_from_slice(&[[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
            if let (Some(out), Some(src)) = (regions.as_mut(), self.regions.as_ref()) {
                out.extend_from_slice(&[src[k]; 4]);
            }
        }
        let mut boundary_edges = Vec::with_capacity(2 * self.boundary_edges.len());
        for e in &self.boundary_edges {
            let [a, b] = e.nodes;
            let m = midpoint[&(a.min(b), a.max(b))];
            boundary_edges.push(BoundaryEdge { nodes: [a, m], marker: e.marker });
            boundary_edges.push(BoundaryEdge { nodes: [m, b], marker: e.marker });
        }
        TriMesh {
            vertices,
            triangles,
            boundary_edges,
            target_h: 0.5 * self.target_h,
            kind: self.kind,
            regions,
            geometry: self.geometry.clone(),
        }
    }

    /// Largest distance of a marked boundary node from its exact curve.
    pub fn boundary_deviation(&self, marker: BoundaryMarker) -> f64 {
        let Some(geo) = &self.geometry else { return 0.0 };
        self.node_markers()
            .iter()
            .enumerate()
            .filter(|(_, m)| **m == Some(marker))
            .map(|(i, _)| geo.distance_to(marker, self.vertices[i]))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshQuality {
    pub min_angle_deg: f64,
    pub max_angle_deg: f64,
    /// Counts of circumradius / (2 inradius) in `[1, 1.5)`, `[1.5, 2)`,
    /// `[2, 3)` and `[3, inf)`.
    pub aspect_histogram: [usize; 4],
    /// Longest edge.
    pub h_max: f64,
    pub degenerate: usize,
}

/// Minimum angle every production mesh must keep.
pub const MIN_ANGLE_GATE_DEG: f64 = 20.0;

impl MeshQuality {
    pub fn passes(&self) -> bool {
        self.degenerate == 0 && self.min_angle_deg >= MIN_ANGLE_GATE_DEG
    }
}

pub fn mesh_quality(mesh: &TriMesh) -> MeshQuality {
    let mut q =
        MeshQuality { min_angle_deg: 180.0, max_angle_deg: 0.0, aspect_histogram: [0; 4], h_max: 0.0, degenerate: 0 };
    for k in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.triangle_points(k);
        let area = signed_area(a, b, c);
        let la = (b[0] - c[0]).hypot(b[1] - c[1]);
        let lb = (a[0] - c[0]).hypot(a[1] - c[1]);
        let lc = (a[0] - b[0]).hypot(a[1] - b[1]);
        q.h_max = q.h_max.max(la).max(lb).max(lc);
        if area <= 1e-14 * (la * la + lb * lb + lc * lc) {
            q.degenerate += 1;
            q.min_angle_deg = 0.0;
            q.max_angle_deg = 180.0;
            q.aspect_histogram[3] += 1;
            continue;
        }
        for ang in angles(a, b, c) {
            q.min_angle_deg = q.min_angle_deg.min(ang.to_degrees());
            q.max_angle_deg = q.max_angle_deg.max(ang.to_degrees());
        }
        let circumradius = la * lb * lc / (4.0 * area);
        let inradius = 2.0 * area / (la + lb + lc);
        let ratio = circumradius / (2.0 * inradius);
        let bin = if ratio < 1.5 {
            0
        } else if ratio < 2.0 {
            1
        } else if ratio < 3.0 {
            2
        } else {
            3
        };
        q.aspect_histogram[bin] += 1;
    }
    q
}
