use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use specobs::geometry::*;
use specobs::mesh::*;

/// Area enclosed by a radial curve, `1/2 int r^2 dphi`, by composite Simpson.
fn radial_area(r: impl Fn(f64) -> f64) -> f64 {
    let m = 4096;
    let h = TAU / m as f64;
    (0..m)
        .map(|i| {
            let a = i as f64 * h;
            let f = |p: f64| 0.5 * r(p).powi(2);
            h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h))
        })
        .sum()
}

fn edge_use(mesh: &TriMesh) -> HashMap<(usize, usize), usize> {
    let mut uses = HashMap::new();
    for t in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *uses.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    uses
}

fn domain_strategy() -> impl Strategy<Value = (DomainSpec, f64)> {
    (3u32..8, 0.2f64..0.35, 0.0f64..0.3, 0.0f64..0.25, -3.2f64..3.2)
        .prop_map(|(n, r0, eps, x0, t)| (DomainSpec::new(ObstacleSpec::gear(n, r0, eps), DiskSpec::new(x0, 1.0)), t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn meshes_are_conforming_and_close_to_the_exact_area((domain, t) in domain_strategy(), h in 0.05f64..0.08) {
        let mesh = triangulate(&domain, t, h).unwrap();
        mesh.validate().unwrap();
        for (_, count) in edge_use(&mesh) {
            prop_assert!(count <= 2);
        }
        let ob = domain.obstacle.clone().with_phase(t);
        let exact = radial_area(|p| domain.disk.radius(p)) - radial_area(|p| ob.radius(p));
        prop_assert!((mesh.area() - exact).abs() / exact < 1e-2);
        prop_assert!((domain.area() - exact).abs() / exact < 1e-10);
        prop_assert_eq!(mesh.boundary_loops(BoundaryMarker::Outer).len(), 1);
        prop_assert_eq!(mesh.boundary_loops(BoundaryMarker::Inner).len(), 1);
        let q = mesh_quality(&mesh);
        prop_assert!(q.passes(), "{:?}", q);
    }

    #[test]
    fn congruent_placements_share_boundary_nodes((domain, t) in domain_strategy()) {
        // Interior refinement may differ once rounding separates the reduced
        // phases; the boundary node lists may not.
        let a = triangulate(&domain, t, 0.07).unwrap();
        let b = triangulate(&domain, t + TAU / domain.obstacle.n as f64, 0.07).unwrap();
        prop_assert!((a.area() - b.area()).abs() <= 1e-10 * a.area());
        let loop_points = |m: &TriMesh| -> Vec<[f64; 2]> {
            m.boundary_loops(BoundaryMarker::Inner)[0].iter().map(|&i| m.vertices[i]).collect()
        };
        let (pa, pb) = (loop_points(&a), loop_points(&b));
        prop_assert_eq!(pa.len(), pb.len());
        let near = |p: &[f64; 2], q: &[f64; 2]| (p[0] - q[0]).hypot(p[1] - q[1]) < 1e-12;
        prop_assert!(pa.iter().all(|p| pb.iter().any(|q| near(p, q))));
    }

    #[test]
    fn whole_periods_share_a_mesh(n in 3u32..8, m in 1i32..6) {
        let domain = DomainSpec::new(ObstacleSpec::gear(n, 0.3, 0.2), DiskSpec::new(0.2, 1.0));
        let a = triangulate(&domain, 0.0, 0.07).unwrap();
        let b = triangulate(&domain, m as f64 * TAU / n as f64, 0.07).unwrap();
        prop_assert_eq!(a.vertices, b.vertices);
        prop_assert_eq!(a.triangles, b.triangles);
    }

    #[test]
    fn text_format_round_trips((domain, t) in domain_strategy(), seed in 0u64..5) {
        let mesh = triangulate_with(&domain, t, &MeshOptions::new(0.08).seed(seed)).unwrap();
        let back = io::from_text(&io::to_text(&mesh)).unwrap();
        prop_assert_eq!(&back.vertices, &mesh.vertices);
        prop_assert_eq!(&back.triangles, &mesh.triangles);
        prop_assert_eq!(&back.boundary_edges, &mesh.boundary_edges);
    }
}

#[test]
fn area_error_shrinks_quadratically_under_refinement() {
    let domain = DomainSpec::new(ObstacleSpec::gear(4, 0.35, 0.2), DiskSpec::new(0.2, 1.0));
    let ob = domain.obstacle.clone().with_phase(0.3);
    let exact = radial_area(|p| domain.disk.radius(p)) - radial_area(|p| ob.radius(p));
    let mut mesh = triangulate(&domain, 0.3, 0.08).unwrap();
    let mut errors = vec![(mesh.area() - exact).abs()];
    for _ in 0..2 {
        mesh = mesh.refine();
        mesh.validate().unwrap();
        errors.push((mesh.area() - exact).abs());
    }
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!(ratio > 3.5, "area errors {errors:?}");
    }
}

#[test]
fn area_is_within_one_percent_at_production_size() {
    let domain = DomainSpec::new(ObstacleSpec::gear(4, 0.35, 0.2), DiskSpec::new(0.2, 1.0));
    let mesh = triangulate(&domain, PI / 8.0, 0.02).unwrap();
    let rel = (mesh.area() - domain.area()).abs() / domain.area();
    assert!(rel < 1e-2, "{rel}");
    assert!(mesh.boundary_deviation(BoundaryMarker::Inner) < 1e-12);
    assert!(mesh.boundary_deviation(BoundaryMarker::Outer) < 1e-12);
}

#[test]
fn full_disk_mesh_splits_into_regions() {
    let domain = DomainSpec::new(ObstacleSpec::gear(5, 0.3, 0.2), DiskSpec::new(0.2, 1.0));
    let mesh = triangulate_full_disk(&domain, 0.4, 0.06).unwrap();
    let inside = mesh.region_area(Region::Obstacle).unwrap();
    let outside = mesh.region_area(Region::Free).unwrap();
    let ob_area = domain.obstacle.area();
    assert!((inside - ob_area).abs() / ob_area < 1e-2);
    assert!((inside + outside - domain.disk.area()).abs() / domain.disk.area() < 1e-2);
    // Only the outer circle is a Dirichlet boundary.
    let markers = mesh.node_markers();
    for i in mesh.dirichlet_nodes() {
        assert_eq!(markers[i], Some(BoundaryMarker::Outer));
    }
}

#[test]
fn too_coarse_mesh_is_rejected() {
    let domain = DomainSpec::new(ObstacleSpec::gear(4, 0.35, 0.2), DiskSpec::new(0.2, 1.0));
    assert!(matches!(triangulate(&domain, 0.0, 0.3), Err(specobs::Error::MeshFailure(_))));
}

#[test]
fn vtk_output_lists_every_cell() {
    let mesh = triangulate_disk(&DiskSpec::new(0.0, 1.0), 0.2).unwrap();
    let field: Vec<f64> = mesh.vertices.iter().map(|p| p[0]).collect();
    let vtk = io::to_vtk(&mesh, "disk", &[("x", &field)]);
    assert!(vtk.contains(&format!("CELLS {} {}", mesh.num_triangles(), 4 * mesh.num_triangles())));
    assert!(vtk.contains(&format!("POINT_DATA {}", mesh.num_vertices())));
}
