//! Acceptance criteria 1-9, one PASS/FAIL line each. Runs every criterion
//! even when an earlier one fails and exits non-zero if any failed.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use specobs::fem::{Discretization, DEFAULT_TOL};
use specobs::geometry::{DiskSpec, DomainSpec, ObstacleSpec};
use specobs::mesh::{triangulate, triangulate_disk, TriMesh};
use specobs::reference;
use specobs::shape_derivative::sector_pairing_report;
use specobs::sweep::*;

const H: f64 = 0.018;
/// Mesh size for the weakly varying generalized modes (see criterion 7).
const H_FINE: f64 = 0.012;

type Outcome = Result<String, String>;

fn gear(n: u32) -> DomainSpec {
    DomainSpec::new(ObstacleSpec::gear(n, 0.35, 0.2), DiskSpec::new(0.2, 1.0))
}

fn lambda1(mesh: &TriMesh) -> f64 {
    Discretization::new(mesh).unwrap().eigenpair(DEFAULT_TOL).unwrap().lambda1
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_1() -> Outcome {
    let (a, b) = (0.3, 1.0);
    let bessel = reference::annulus_lambda1(a, b);
    let shooting = common::annulus_eigenvalue(a, b);
    let start = Instant::now();
    let domain = DomainSpec::new(ObstacleSpec::circle(a), DiskSpec::new(0.0, b));
    let lam = lambda1(&triangulate(&domain, 0.0, 0.02).map_err(|e| e.to_string())?);
    let secs = start.elapsed().as_secs_f64();
    let rel = (lam - bessel).abs() / bessel;
    let oracle_gap = (bessel - shooting).abs() / shooting;
    check(
        rel < 0.01 && secs < 10.0 && oracle_gap < 1e-8,
        format!(
            "lambda1 {lam:.6} vs k^2 {bessel:.8} (rel {rel:.2e}; shooting oracle gap {oracle_gap:.1e}); {secs:.1} s"
        ),
    )
}

fn criterion_2() -> Outcome {
    let exact = reference::disk_lambda1(1.0);
    let independent = common::disk_eigenvalue(1.0);
    let mut mesh = triangulate_disk(&DiskSpec::new(0.0, 1.0), 0.1).map_err(|e| e.to_string())?;
    let mut errors = vec![(lambda1(&mesh) - exact).abs()];
    for _ in 0..3 {
        mesh = mesh.refine();
        errors.push((lambda1(&mesh) - exact).abs());
    }
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let worst_rel = errors[0] / exact;
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    check(
        worst_rel < 0.01 && min_order >= 1.8 && (exact - independent).abs() < 1e-9 * exact,
        format!("coarsest rel error {worst_rel:.2e}; orders {orders:.3?}"),
    )
}

/// `values` at `{0, q, 2q, 3q, 4q}` with `q = pi/(2n)`: rise to the middle,
/// fall back, ends and inner pair equal within `floor`. Every step must be
/// resolved above `floor`. `max_in_middle = false` expects the reverse.
fn ordering(values: &[f64], floor: f64, max_in_middle: bool) -> (bool, String) {
    let s = if max_in_middle { 1.0 } else { -1.0 };
    let steps = [values[1] - values[0], values[2] - values[1], values[2] - values[3], values[3] - values[4]];
    let resolved = steps.iter().all(|d| s * d > floor);
    let ends = (values[0] - values[4]).abs();
    let inner = (values[1] - values[3]).abs();
    let ok = resolved && ends <= floor && inner <= floor;
    let signed: Vec<String> = steps.iter().map(|d| format!("{:.3e}", s * d)).collect();
    (ok, format!("steps [{}], |v0-v4| {ends:.1e}, |v1-v3| {inner:.1e}, floor {floor:.3e}", signed.join(", ")))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let grid = uniform_grid(4, 5, 2.0).map_err(|e| e.to_string())?;
    let r = run_calibrated_sweep(&gear(4), &grid, &SweepOptions::new(H)).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let (ok, detail) = ordering(&r.values(), r.value_floor(), true);
    let v = r.values();
    check(
        ok && secs < 120.0,
        format!("lambda1 {:.5} < {:.5} < {:.5} > {:.5} > {:.5}; {detail}; {secs:.0} s", v[0], v[1], v[2], v[3], v[4]),
    )
}

struct DerivativeRun {
    floor: NoiseFloor,
    at_axes: Vec<Sample>,
    interior: Vec<Sample>,
}

fn derivative_run() -> Result<DerivativeRun, String> {
    let domain = gear(4);
    let opts = SweepOptions::new(H).with_derivative(Some(1e-3));
    let floor = calibrate(&domain, &opts).map_err(|e| e.to_string())?;
    let eval = |t: f64| evaluate_sample(&domain, t, &opts).map_err(|e| e.to_string());
    let at_axes = (0..8).map(|k| eval(k as f64 * PI / 4.0)).collect::<Result<_, _>>()?;
    let interior = (1..=9).map(|k| eval(k as f64 * PI / 40.0)).collect::<Result<_, _>>()?;
    Ok(DerivativeRun { floor, at_axes, interior })
}

fn criterion_4(run: &DerivativeRun) -> Outcome {
    let floor = run.floor.derivative().unwrap_or(0.0);
    let worst = run.at_axes.iter().map(|s| s.lambda1_prime().unwrap().abs()).fold(0.0, f64::max);
    check(worst < floor, format!("max |lambda1'(k pi/4)| {worst:.3e} over k = 0..7, floor {floor:.3e}"))
}

fn criterion_5(run: &DerivativeRun) -> Outcome {
    let floor = run.floor.derivative().unwrap_or(0.0);
    let min = run.interior.iter().map(|s| s.lambda1_prime().unwrap()).fold(f64::INFINITY, f64::min);
    let rel = run
        .interior
        .iter()
        .map(|s| {
            let (h, f) = (s.lambda1_prime().unwrap(), s.fd_estimate().unwrap());
            (h - f).abs() / f.abs()
        })
        .fold(0.0, f64::max);
    check(
        min > floor && rel < 0.05,
        format!("min lambda1' {min:.4e} (floor {floor:.3e}); max Hadamard/FD relative gap {rel:.2e}"),
    )
}

fn criterion_6(run: &DerivativeRun) -> Outcome {
    let floor4 = run.floor.derivative().unwrap_or(0.0);
    let mut sum_gap: f64 = 0.0;
    let mut worst_pair = f64::INFINITY;
    let mut worst_at = (0.0, [0, 0]);
    for s in &run.interior {
        let d = s.derivative.as_ref().unwrap();
        let sum: f64 = d.per_sector.iter().sum();
        sum_gap = sum_gap.max((sum - d.lambda1_prime).abs() / d.lambda1_prime.abs());
        for (pair, value) in sector_pairing_report(d, 4).pairs {
            if value < worst_pair {
                worst_pair = value;
                worst_at = (s.t, pair);
            }
        }
    }
    let domain5 = gear(5);
    let opts5 = SweepOptions::new(H).with_derivative(None);
    let floor5 = calibrate(&domain5, &opts5.clone().with_derivative(Some(1e-3)))
        .map_err(|e| e.to_string())?
        .derivative()
        .unwrap_or(0.0);
    let mut odd_ok = true;
    let mut odd_detail = Vec::new();
    for k in 1..=3 {
        let t = k as f64 * PI / 20.0;
        let s = evaluate_sample(&domain5, t, &opts5).map_err(|e| e.to_string())?;
        let p = sector_pairing_report(s.derivative.as_ref().unwrap(), 5);
        let unpaired = p.unpaired.unwrap().1;
        odd_ok &= unpaired < -floor5 && p.total > floor5;
        odd_detail.push(format!("t={t:.3}: unpaired {unpaired:+.3e}, total {:+.3e}", p.total));
    }
    let even_ok = worst_pair >= -floor4;
    check(
        sum_gap <= 1e-10 && even_ok && odd_ok,
        format!(
            "sector sum gap {sum_gap:.1e}; n=4 smallest pair {worst_pair:+.3e} (sectors {:?} at t={:.3}, floor {floor4:.2e}); \
             [CONJECTURE] n=5 {} (floor {floor5:.2e})",
            worst_at.1,
            worst_at.0,
            odd_detail.join("; ")
        ),
    )
}

fn criterion_7() -> Outcome {
    let grid = uniform_grid(4, 5, 2.0).map_err(|e| e.to_string())?;
    let cases = [
        ("schrodinger alpha=100", Mode::Schrodinger { alpha: 100.0 }, H, true),
        ("well alpha=-50", Mode::Well { alpha: -50.0 }, H_FINE, false),
        ("stationary energy", Mode::StationaryEnergy, H_FINE, true),
    ];
    let mut all = true;
    let mut parts = Vec::new();
    for (name, mode, h, max_on) in cases {
        let r = generalization_sweep(&gear(4), mode, &grid, h).map_err(|e| e.to_string())?;
        let (ok, detail) = ordering(&r.values(), r.value_floor(), max_on);
        all &= ok;
        let verdict = if ok { "ok" } else { "MISMATCH" };
        parts
            .push(format!("{name} (h={h}, expects max at {}): {verdict}, {detail}", if max_on { "ON" } else { "OFF" }));
    }
    check(all, parts.join(" | "))
}

/// Value of the P1 interpolant at `p`, by brute-force point location.
fn interpolate(mesh: &TriMesh, u: &[f64], p: [f64; 2]) -> Option<f64> {
    mesh.triangles.iter().find_map(|t| {
        let [a, b, c] = t.map(|i| mesh.vertices[i]);
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let l1 = ((p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])) / det;
        let l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det;
        let l0 = 1.0 - l1 - l2;
        (l0 >= -1e-12 && l1 >= -1e-12 && l2 >= -1e-12).then(|| l0 * u[t[0]] + l1 * u[t[1]] + l2 * u[t[2]])
    })
}

fn criterion_8() -> Outcome {
    let mesh = triangulate_disk(&DiskSpec::new(0.0, 1.0), 0.02).map_err(|e| e.to_string())?;
    let (u, rep) = Discretization::new(&mesh).and_then(|d| d.torsion()).map_err(|e| e.to_string())?;
    let centre = interpolate(&mesh, &u, [0.0, 0.0]).ok_or("origin not inside the mesh")?;
    let ru = (centre - 0.25).abs() / 0.25;
    let re = (rep.energy - PI / 8.0).abs() / (PI / 8.0);
    check(ru < 0.01 && re < 0.01, format!("u(0) {centre:.6} (rel {ru:.2e}), E {:.6} (rel {re:.2e})", rep.energy))
}

fn criterion_9() -> Outcome {
    let dir = std::env::temp_dir().join(format!("specobs-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let config = dir.join("asymmetric.toml");
    std::fs::write(
        &config,
        "[geometry]\nn = 4\nfamily = \"gear\"\nr0 = 0.35\nepsilon = 0.2\nx0 = 0.2\nr1 = 1.0\nasymmetry = 0.05\n\n\
         [discretization]\nh = 0.03\n",
    )
    .map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_specobs"))
        .args(["verify", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .map_err(|e| e.to_string())?;
    let _ = std::fs::remove_dir_all(&dir);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let line = stdout.lines().find(|l| l.contains(" symmetry")).unwrap_or("").trim().to_string();
    let code = out.status.code();
    check(code == Some(1) && line.starts_with("FAIL"), format!("exit code {code:?}; {line}"))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |n: u32, outcome: Outcome| match &outcome {
        Ok(d) => println!("criterion {n}: PASS - {d}"),
        Err(d) => {
            failed += 1;
            println!("criterion {n}: FAIL - {d}");
        }
    };
    report(1, criterion_1());
    report(2, criterion_2());
    report(3, criterion_3());
    match derivative_run() {
        Ok(run) => {
            report(4, criterion_4(&run));
            report(5, criterion_5(&run));
            report(6, criterion_6(&run));
        }
        Err(e) => {
            for n in 4..=6 {
                report(n, Err(format!("derivative run failed: {e}")));
            }
        }
    }
    report(7, criterion_7());
    report(8, criterion_8());
    report(9, criterion_9());
    if failed == 0 {
        println!("acceptance: all 9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 9 criteria failed");
        ExitCode::FAILURE
    }
}
