use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use log::info;
use rayon::prelude::*;
use serde::Serialize;
use specobs::fem::{residual_flux, Discretization, DEFAULT_TOL};
use specobs::geometry::DomainSpec;
use specobs::mesh::{
    io, mesh_quality, triangulate_disk, triangulate_with, BoundaryMarker, MeshKind, MeshOptions, TriMesh,
};
use specobs::reference::{annulus_lambda1, disk_lambda1, disk_torsion_energy};
use specobs::shape_derivative::derivative_on_mesh;
use specobs::sweep::{
    calibrate, circumscribed_upper_bound, evaluate_sample, solve_sample, verify as verify_sweep, Mode, Status,
    SweepOptions, SweepResult, VerificationReport,
};

use crate::config::{Format, RunConfig};
use crate::CliError;

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    info!("wrote {}", dir.join(name).display());
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))
}

/// Closed-form eigenvalue when the configuration has one.
fn oracle(cfg: &RunConfig) -> Option<f64> {
    let disk = cfg.disk();
    match cfg.obstacle() {
        None => Some(disk_lambda1(disk.radius)),
        Some(ob) if ob.is_circular() && disk.is_concentric() => {
            Some(annulus_lambda1(ob.incircle_circumcircle().0, disk.radius))
        }
        Some(_) => None,
    }
}

#[derive(Serialize)]
struct SolveReport {
    t: f64,
    mode: Mode,
    value: f64,
    residual: f64,
    lambda1_prime: Option<f64>,
    fd_estimate: Option<f64>,
    oracle: Option<f64>,
    vertices: usize,
    triangles: usize,
}

pub fn solve(cfg: &RunConfig, t: Option<f64>, seed: u64) -> Result<(), CliError> {
    let t = t.unwrap_or(cfg.geometry.t);
    let opts = cfg.sweep_options(seed)?;
    let dir = &cfg.output.directory;
    let (mesh, field, report) = match cfg.domain() {
        Some(domain) => {
            let s = solve_sample(&domain, t, &opts)?;
            let report = SolveReport {
                t,
                mode: opts.mode,
                value: s.sample.value,
                residual: s.sample.residual,
                lambda1_prime: s.sample.lambda1_prime(),
                fd_estimate: s.sample.fd_estimate(),
                oracle: if opts.mode == Mode::Dirichlet { oracle(cfg) } else { None },
                vertices: s.mesh.num_vertices(),
                triangles: s.mesh.num_triangles(),
            };
            (s.mesh, s.field, report)
        }
        None => {
            let mesh = triangulate_disk(&cfg.disk(), cfg.discretization.h)?;
            let disc = Discretization::new(&mesh)?;
            let (value, residual, field, oracle) = match opts.mode {
                Mode::Dirichlet => {
                    let sol = disc.eigenpair(DEFAULT_TOL)?;
                    (sol.lambda1, sol.residual, sol.u, oracle(cfg))
                }
                Mode::StationaryEnergy => {
                    let (u, rep) = disc.torsion()?;
                    (rep.energy, rep.relative_mismatch, u, Some(disk_torsion_energy(cfg.geometry.r1)))
                }
                _ => return Err(CliError::Config("potential modes need an obstacle".into())),
            };
            let report = SolveReport {
                t,
                mode: opts.mode,
                value,
                residual,
                lambda1_prime: None,
                fd_estimate: None,
                oracle,
                vertices: mesh.num_vertices(),
                triangles: mesh.num_triangles(),
            };
            (mesh, field, report)
        }
    };
    let label = opts.mode.value_label();
    println!("{label} = {:.10}", report.value);
    println!("residual = {:.3e}", report.residual);
    if let Some(o) = report.oracle {
        println!("oracle = {o:.10} (relative error {:.3e})", (report.value - o).abs() / o);
    }
    if let Some(d) = report.lambda1_prime {
        println!("lambda1' = {d:.6e}");
    }
    if let Some(d) = report.fd_estimate {
        println!("finite difference = {d:.6e}");
    }

    write(dir, "mesh.txt", &io::to_text(&mesh))?;
    if cfg.output.wants(Format::Csv) {
        let mut csv = format!("t,{label},residual,lambda1_prime,fd_estimate\n");
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            t,
            report.value,
            report.residual,
            opt(report.lambda1_prime),
            opt(report.fd_estimate)
        );
        write(dir, "solve.csv", &csv)?;
        if opts.mode == Mode::Dirichlet && cfg.domain().is_some() && mesh.kind == MeshKind::Perforated {
            write(dir, "flux.csv", &flux_csv(cfg, &mesh, &field, report.value)?)?;
        }
    }
    if cfg.output.wants(Format::Json) {
        write(dir, "solve.json", &json(&report)?)?;
    }
    if cfg.output.wants(Format::Vtk) {
        write(dir, "solution.vtk", &io::to_vtk(&mesh, "specobs solve", &[("u", &field)]))?;
    }
    Ok(())
}

fn flux_csv(cfg: &RunConfig, mesh: &TriMesh, u: &[f64], lambda: f64) -> Result<String, CliError> {
    let disc = Discretization::new(mesh)?;
    let flux = residual_flux(mesh, &disc.k, &disc.m, u, lambda, None, BoundaryMarker::Inner, cfg.discretization.flux)?;
    let mut csv = String::from("node,x,y,phi,flux\n");
    for (&i, &q) in &flux.density {
        let [x, y] = mesh.vertices[i];
        let _ = writeln!(csv, "{i},{x},{y},{},{q}", y.atan2(x));
    }
    Ok(csv)
}

fn sweep_result(domain: &DomainSpec, cfg: &RunConfig, opts: &SweepOptions) -> Result<SweepResult, CliError> {
    let grid = cfg.grid()?;
    specobs::sweep::check_grid(&grid, domain.obstacle.n)?;
    domain.validate()?;
    opts.validate()?;
    let dir = &cfg.output.directory;
    let samples = if cfg.output.wants(Format::Vtk) {
        let solved = grid.par_iter().map(|&t| solve_sample(domain, t, opts)).collect::<Result<Vec<_>, _>>()?;
        for (i, s) in solved.iter().enumerate() {
            let title = format!("t = {}", s.sample.t);
            write(dir, &format!("sample_{i:03}.vtk"), &io::to_vtk(&s.mesh, &title, &[("u", &s.field)]))?;
        }
        solved.into_iter().map(|s| s.sample).collect()
    } else {
        grid.par_iter().map(|&t| evaluate_sample(domain, t, opts)).collect::<Result<Vec<_>, _>>()?
    };
    let mut result = SweepResult::from_samples(domain, opts, samples);
    result.noise = Some(calibrate(domain, opts)?);
    Ok(result)
}

#[derive(Serialize)]
struct SweepReport<'a> {
    mode: Mode,
    n: u32,
    h: f64,
    conjecture: bool,
    passed: bool,
    samples: &'a [specobs::sweep::Sample],
    report: &'a VerificationReport,
}

fn summarize(result: &SweepResult, report: &VerificationReport) {
    let conjecture = result.domain.obstacle.n % 2 == 1;
    if conjecture {
        println!("CONJECTURE: n = {} is odd; ordering verdicts are conjecture checks only", result.domain.obstacle.n);
    }
    println!("{:>12} {:>18} {:>14} {:>10}", "t", result.mode.value_label(), "lambda1'", "position");
    for s in &result.samples {
        let d = s.lambda1_prime().map(|d| format!("{d:.4e}")).unwrap_or_else(|| "-".into());
        println!("{:>12.6} {:>18.10} {:>14} {:>10}", s.t, s.value, d, s.classification.label());
    }
    println!("noise floor: value {:.3e}, derivative {:.3e}", report.value_floor, report.derivative_floor);
    for v in &report.verdicts {
        let status = match v.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Degenerate => "DEGENERATE",
            Status::Skipped => "SKIPPED",
        };
        let tag = if v.conjecture { " [CONJECTURE]" } else { "" };
        println!("{status:>10} {}{tag}: {}", v.name, v.detail);
    }
}

fn finish(cfg: &RunConfig, result: &SweepResult, report: &VerificationReport, name: &str) -> Result<(), CliError> {
    summarize(result, report);
    let dir = &cfg.output.directory;
    if cfg.output.wants(Format::Csv) {
        write(dir, &format!("{name}.csv"), &result.to_csv())?;
    }
    if cfg.output.wants(Format::Json) {
        let doc = SweepReport {
            mode: result.mode,
            n: result.domain.obstacle.n,
            h: result.h,
            conjecture: result.domain.obstacle.n % 2 == 1,
            passed: report.passed(),
            samples: &result.samples,
            report,
        };
        write(dir, &format!("{name}.json"), &json(&doc)?)?;
    }
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> =
            report.verdicts.iter().filter(|v| v.is_hard_failure()).map(|v| v.name.as_str()).collect();
        Err(CliError::Verification(failed.join(", ")))
    }
}

pub fn sweep(cfg: &RunConfig, seed: u64) -> Result<(), CliError> {
    let domain = cfg.require_domain()?;
    let opts = cfg.sweep_options(seed)?;
    let result = sweep_result(&domain, cfg, &opts)?;
    let report = verify_sweep(&result, None);
    finish(cfg, &result, &report, "sweep")
}

pub fn verify(cfg: &RunConfig, seed: u64) -> Result<(), CliError> {
    let domain = cfg.require_domain()?;
    let mut opts = cfg.sweep_options(seed)?;
    let upper = if opts.mode == Mode::Dirichlet {
        opts.derivative = true;
        opts.fd_delta = Some(cfg.sweep.fd_delta.unwrap_or(1e-3));
        Some(circumscribed_upper_bound(&domain, cfg.discretization.h)?)
    } else {
        None
    };
    let result = sweep_result(&domain, cfg, &opts)?;
    let report = verify_sweep(&result, upper);
    finish(cfg, &result, &report, "verification")
}

#[derive(Debug, Serialize)]
struct Level {
    level: usize,
    h: f64,
    vertices: usize,
    lambda1: f64,
    error: Option<f64>,
    order: Option<f64>,
    lambda1_prime: Option<f64>,
}

pub fn convergence(cfg: &RunConfig) -> Result<(), CliError> {
    let steps = cfg.discretization.refinements;
    if steps < 2 {
        return Err(CliError::Config(format!("convergence needs at least 2 refinements (got {steps})")));
    }
    let h = cfg.discretization.h;
    let domain = cfg.domain();
    let t = cfg.geometry.t;
    let mut mesh = match &domain {
        Some(d) => triangulate_with(d, t, &MeshOptions::new(h))?,
        None => triangulate_disk(&cfg.disk(), h)?,
    };
    let exact = oracle(cfg);
    let mut levels: Vec<Level> = Vec::new();
    for level in 0..=steps {
        if level > 0 {
            mesh = mesh.refine();
        }
        let (lambda1, lambda1_prime) = match (&domain, cfg.sweep.derivative) {
            (Some(d), true) => {
                let (sol, s) = derivative_on_mesh(d, t, &mesh, DEFAULT_TOL, cfg.discretization.flux)?;
                (sol.lambda1, Some(s.lambda1_prime))
            }
            _ => (Discretization::new(&mesh)?.eigenpair(DEFAULT_TOL)?.lambda1, None),
        };
        info!("level {level}: {} vertices, lambda1 = {lambda1}", mesh.num_vertices());
        levels.push(Level {
            level,
            h: h / (1 << level) as f64,
            vertices: mesh.num_vertices(),
            lambda1,
            error: exact.map(|e| (lambda1 - e).abs()),
            order: None,
            lambda1_prime,
        });
    }
    // Orders from the oracle error, or from successive differences.
    for k in 1..levels.len() {
        levels[k].order = match exact {
            Some(_) => {
                let (a, b) = (levels[k - 1].error.unwrap_or(0.0), levels[k].error.unwrap_or(0.0));
                (a > 0.0 && b > 0.0).then(|| (a / b).log2())
            }
            None if k >= 2 => {
                let a = (levels[k - 1].lambda1 - levels[k - 2].lambda1).abs();
                let b = (levels[k].lambda1 - levels[k - 1].lambda1).abs();
                (a > 0.0 && b > 0.0).then(|| (a / b).log2())
            }
            None => None,
        };
    }
    println!("{:>5} {:>10} {:>9} {:>18} {:>12} {:>7}", "level", "h", "vertices", "lambda1", "error", "order");
    let opt = |x: Option<f64>, p: usize| x.map(|v| format!("{v:.p$e}")).unwrap_or_else(|| "-".into());
    for l in &levels {
        println!(
            "{:>5} {:>10.5} {:>9} {:>18.10} {:>12} {:>7}",
            l.level,
            l.h,
            l.vertices,
            l.lambda1,
            opt(l.error, 3),
            l.order.map(|o| format!("{o:.3}")).unwrap_or_else(|| "-".into())
        );
    }
    if let Some(e) = exact {
        println!("oracle lambda1 = {e:.12}");
    }
    let dir = &cfg.output.directory;
    if cfg.output.wants(Format::Csv) {
        let mut csv = String::from("level,h,vertices,lambda1,error,order,lambda1_prime\n");
        let o = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for l in &levels {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                l.level,
                l.h,
                l.vertices,
                l.lambda1,
                o(l.error),
                o(l.order),
                o(l.lambda1_prime)
            );
        }
        write(dir, "convergence.csv", &csv)?;
    }
    if cfg.output.wants(Format::Json) {
        write(dir, "convergence.json", &json(&levels)?)?;
    }
    Ok(())
}

pub fn mesh_export(cfg: &RunConfig, t: Option<f64>, seed: u64) -> Result<(), CliError> {
    let t = t.unwrap_or(cfg.geometry.t);
    let h = cfg.discretization.h;
    let mesh = match cfg.domain() {
        Some(d) => {
            let kind = match cfg.mode()? {
                Mode::Schrodinger { .. } | Mode::Well { .. } => MeshKind::FullDisk,
                _ => MeshKind::Perforated,
            };
            triangulate_with(&d, t, &MeshOptions::new(h).seed(seed).kind(kind))?
        }
        None => triangulate_disk(&cfg.disk(), h)?,
    };
    let q = mesh_quality(&mesh);
    println!(
        "{} vertices, {} triangles, {} boundary edges; angles [{:.2}, {:.2}] deg, h_max {:.4}",
        mesh.num_vertices(),
        mesh.num_triangles(),
        mesh.boundary_edges.len(),
        q.min_angle_deg,
        q.max_angle_deg,
        q.h_max
    );
    let dir = &cfg.output.directory;
    write(dir, "mesh.txt", &io::to_text(&mesh))?;
    if cfg.output.wants(Format::Vtk) {
        write(dir, "mesh.vtk", &io::to_vtk(&mesh, &format!("specobs mesh t = {t}"), &[]))?;
    }
    Ok(())
}
