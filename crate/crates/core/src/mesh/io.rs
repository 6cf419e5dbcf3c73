//! Plain-text and legacy VTK mesh files.
//!
//! The text format is a header `nv nt nbe` followed by one `x y` line per
//! vertex, one `i j k` line per triangle and one `i j marker` line per
//! boundary edge (marker 1 = outer circle, 2 = obstacle). Coordinates are
//! written in shortest round-trip form, so reading a written mesh gives back
//! bit-identical vertices.

use std::fmt::Write as _;

use super::{mesh_quality, BoundaryEdge, BoundaryMarker, MeshKind, Region, TriMesh};
use crate::error::{Error, Result};

pub fn to_text(mesh: &TriMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {} {}", mesh.vertices.len(), mesh.triangles.len(), mesh.boundary_edges.len());
    for v in &mesh.vertices {
        let _ = writeln!(s, "{:?} {:?}", v[0], v[1]);
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    for e in &mesh.boundary_edges {
        let _ = writeln!(s, "{} {} {}", e.nodes[0], e.nodes[1], e.marker.code());
    }
    s
}

fn parse_err(line: usize, what: &str) -> Error {
    Error::Io(format!("mesh text line {line}: {what}"))
}

/// Parses the text format. Region markers and the exact curves are not part
/// of the format; `target_h` is set to the longest edge.
pub fn from_text(text: &str) -> Result<TriMesh> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let mut fields = |expect: usize| -> Result<(usize, Vec<&str>)> {
        let (no, l) = lines.next().ok_or_else(|| Error::Io("mesh text ends early".into()))?;
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != expect {
            return Err(parse_err(no + 1, &format!("expected {expect} fields")));
        }
        Ok((no + 1, f))
    };
    let num = |no: usize, s: &str| s.parse::<usize>().map_err(|_| parse_err(no, "bad integer"));
    let (no, head) = fields(3)?;
    let (nv, nt, nbe) = (num(no, head[0])?, num(no, head[1])?, num(no, head[2])?);
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (no, f) = fields(2)?;
        let x = f[0].parse::<f64>().map_err(|_| parse_err(no, "bad coordinate"))?;
        let y = f[1].parse::<f64>().map_err(|_| parse_err(no, "bad coordinate"))?;
        vertices.push([x, y]);
    }
    let index = |no: usize, s: &str| -> Result<usize> {
        let i = num(no, s)?;
        if i >= nv {
            return Err(parse_err(no, "vertex index out of range"));
        }
        Ok(i)
    };
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (no, f) = fields(3)?;
        triangles.push([index(no, f[0])?, index(no, f[1])?, index(no, f[2])?]);
    }
    let mut boundary_edges = Vec::with_capacity(nbe);
    for _ in 0..nbe {
        let (no, f) = fields(3)?;
        let code = f[2].parse::<u8>().map_err(|_| parse_err(no, "bad marker"))?;
        let marker = BoundaryMarker::from_code(code).ok_or_else(|| parse_err(no, "unknown marker"))?;
        boundary_edges.push(BoundaryEdge { nodes: [index(no, f[0])?, index(no, f[1])?], marker });
    }
    let mut mesh = TriMesh {
        vertices,
        triangles,
        boundary_edges,
        target_h: 0.0,
        kind: MeshKind::Perforated,
        regions: None,
        geometry: None,
    };
    mesh.target_h = mesh_quality(&mesh).h_max;
    Ok(mesh)
}

/// Legacy ASCII VTK unstructured grid with optional nodal scalar fields.
pub fn to_vtk(mesh: &TriMesh, title: &str, fields: &[(&str, &[f64])]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "{}", title.replace('\n', " "));
    let _ = writeln!(s, "ASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", mesh.vertices.len());
    for v in &mesh.vertices {
        let _ = writeln!(s, "{:?} {:?} 0", v[0], v[1]);
    }
    let nt = mesh.triangles.len();
    let _ = writeln!(s, "CELLS {} {}", nt, 4 * nt);
    for t in &mesh.triangles {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {nt}");
    for _ in 0..nt {
        let _ = writeln!(s, "5");
    }
    if let Some(regions) = &mesh.regions {
        let _ = writeln!(s, "CELL_DATA {nt}\nSCALARS region int 1\nLOOKUP_TABLE default");
        for r in regions {
            let _ = writeln!(s, "{}", if *r == Region::Obstacle { 1 } else { 0 });
        }
    }
    if !fields.is_empty() {
        let _ = writeln!(s, "POINT_DATA {}", mesh.vertices.len());
        for (name, data) in fields {
            let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
            for x in data.iter() {
                let _ = writeln!(s, "{x:?}");
            }
        }
    }
    s
}
