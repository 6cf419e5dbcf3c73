use crate::error::{Error, Result};
use crate::linalg::{SparseSymMatrix, TripletBuilder};
use crate::mesh::{Region, TriMesh};

/// P1 element stiffness and mass matrices of one triangle.
pub fn element_matrices(p: [[f64; 2]; 3]) -> ([[f64; 3]; 3], [[f64; 3]; 3], f64) {
    let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
    let mut b = [0.0; 3];
    let mut c = [0.0; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        b[i] = p[j][1] - p[k][1];
        c[i] = p[k][0] - p[j][0];
    }
    let mut ke = [[0.0; 3]; 3];
    let mut me = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            ke[i][j] = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
            me[i][j] = area / 12.0 * if i == j { 2.0 } else { 1.0 };
        }
    }
    (ke, me, area)
}

fn check_area(k: usize, area: f64) -> Result<()> {
    if area > 0.0 {
        Ok(())
    } else {
        Err(Error::DegenerateElement { index: k, area })
    }
}

/// Global stiffness `K` and mass `M` over all nodes.
pub fn assemble(mesh: &TriMesh) -> Result<(SparseSymMatrix, SparseSymMatrix)> {
    let n = mesh.num_vertices();
    let mut kb = TripletBuilder::new(n);
    let mut mb = TripletBuilder::new(n);
    for (k, tri) in mesh.triangles.iter().enumerate() {
        let (ke, me, area) = element_matrices(mesh.triangle_points(k));
        check_area(k, area)?;
        for i in 0..3 {
            for j in i..3 {
                kb.add_sym(tri[i], tri[j], ke[i][j]);
                mb.add_sym(tri[i], tri[j], me[i][j]);
            }
        }
    }
    Ok((kb.build(), mb.build()))
}

/// Mass matrix restricted to the elements marked as obstacle.
pub fn assemble_potential(mesh: &TriMesh) -> Result<SparseSymMatrix> {
    let regions = mesh.regions.as_ref().ok_or(Error::MarkerMissing)?;
    let mut vb = TripletBuilder::new(mesh.num_vertices());
    for (k, tri) in mesh.triangles.iter().enumerate() {
        if regions[k] != Region::Obstacle {
            continue;
        }
        let (_, me, area) = element_matrices(mesh.triangle_points(k));
        check_area(k, area)?;
        for i in 0..3 {
            for j in i..3 {
                vb.add_sym(tri[i], tri[j], me[i][j]);
            }
        }
    }
    Ok(vb.build())
}
