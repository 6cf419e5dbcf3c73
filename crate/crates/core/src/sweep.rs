//! Rotation sweeps `t -> lambda1(t)` (or the torsion energy), noise-floor
//! calibration by re-meshing, and the structural verdicts checked on a sweep:
//! symmetry, critical points, monotonicity, extremum placement.

use std::f64::consts::PI;

use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{assemble_potential, schrodinger_eigenpair, Discretization, FluxRecovery, DEFAULT_TOL};
use crate::geometry::{classify_configuration, Configuration, DomainSpec, ObstacleSpec};
use crate::mesh::{triangulate_with, MeshKind, MeshOptions, TriMesh};
use crate::reference::disk_lambda1;
use crate::shape_derivative::{
    derivative_on_mesh, finite_difference_on_mesh, sector_pairing_report, DerivativeSample, SectorPairing,
};

/// Angular tolerance for matching grid points.
const GRID_TOL: f64 = 1e-9;

/// Seeds used for re-meshing when calibrating the noise floor.
pub const CALIBRATION_SEEDS: [u64; 3] = [1, 2, 3];

/// Safety factor applied to every calibrated noise level.
pub const FLOOR_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    /// Dirichlet eigenvalue of the perforated disk.
    #[default]
    Dirichlet,
    /// `-Δ + alpha 1_P` on the whole disk, `alpha > 0`.
    Schrodinger { alpha: f64 },
    /// Same operator with `alpha < 0`.
    Well { alpha: f64 },
    /// Torsion energy of the perforated disk.
    StationaryEnergy,
}

impl Mode {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Mode::Schrodinger { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                Err(Error::InvalidParameter(format!("Schrodinger mode needs alpha > 0, got {alpha}")))
            }
            Mode::Well { alpha } if !(alpha < 0.0 && alpha.is_finite()) => {
                Err(Error::InvalidParameter(format!("well mode needs alpha < 0, got {alpha}")))
            }
            _ => Ok(()),
        }
    }

    /// Column label of the swept quantity.
    pub fn value_label(&self) -> &'static str {
        match self {
            Mode::StationaryEnergy => "energy",
            _ => "lambda1",
        }
    }

    /// Predicted position of the maximum; the minimum sits at the other one.
    pub fn expected_max(&self) -> Configuration {
        match self {
            Mode::Well { .. } => Configuration::Off,
            _ => Configuration::On,
        }
    }

    /// +1 if the quantity should increase on `(0, pi/n)`, -1 if it should decrease.
    fn expected_slope(&self) -> f64 {
        if self.expected_max() == Configuration::On {
            1.0
        } else {
            -1.0
        }
    }

    fn mesh_kind(&self) -> MeshKind {
        match self {
            Mode::Schrodinger { .. } | Mode::Well { .. } => MeshKind::FullDisk,
            _ => MeshKind::Perforated,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub h: f64,
    pub seed: u64,
    pub mode: Mode,
    /// Evaluate the Hadamard derivative at every sample (Dirichlet mode).
    pub derivative: bool,
    /// Also evaluate a central difference with this step.
    pub fd_delta: Option<f64>,
    pub recovery: FluxRecovery,
    pub tol: f64,
}

impl SweepOptions {
    pub fn new(h: f64) -> Self {
        Self {
            h,
            seed: 0,
            mode: Mode::Dirichlet,
            derivative: false,
            fd_delta: None,
            recovery: FluxRecovery::default(),
            tol: DEFAULT_TOL,
        }
    }

    pub fn mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_derivative(mut self, fd_delta: Option<f64>) -> Self {
        self.derivative = true;
        self.fd_delta = fd_delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.mode.validate()?;
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidParameter(format!("mesh size h = {} must be positive", self.h)));
        }
        if self.derivative && self.mode != Mode::Dirichlet {
            return Err(Error::InvalidParameter("derivatives are only available in Dirichlet mode".into()));
        }
        if let Some(d) = self.fd_delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::InvalidParameter(format!("finite-difference step {d} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    /// `lambda1`, or the torsion energy in stationary mode.
    pub value: f64,
    pub residual: f64,
    pub derivative: Option<DerivativeSample>,
    pub classification: Configuration,
}

impl Sample {
    pub fn lambda1_prime(&self) -> Option<f64> {
        self.derivative.as_ref().map(|d| d.lambda1_prime)
    }

    pub fn fd_estimate(&self) -> Option<f64> {
        self.derivative.as_ref().and_then(|d| d.fd_estimate)
    }
}

/// `points` equally spaced angles from 0 to `window * pi / n` inclusive.
pub fn uniform_grid(n: u32, points: usize, window: f64) -> Result<Vec<f64>> {
    if points < 2 || !(window > 0.0 && window.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "grid needs at least 2 points and a positive window (got {points}, {window})"
        )));
    }
    let end = window * PI / n as f64;
    Ok((0..points).map(|k| end * k as f64 / (points - 1) as f64).collect())
}

/// Checks the sweep grid precondition: at least 5 points, containing 0 and `pi/n`.
pub fn check_grid(grid: &[f64], n: u32) -> Result<()> {
    let has = |a: f64| grid.iter().any(|t| (t - a).abs() <= GRID_TOL);
    if grid.len() < 5 || !has(0.0) || !has(PI / n as f64) {
        return Err(Error::InvalidParameter(format!(
            "sweep grid must have at least 5 points including 0 and pi/{n} (got {} points)",
            grid.len()
        )));
    }
    Ok(())
}

/// A sample together with the mesh and nodal field it was computed from
/// (eigenfunction, or torsion function in stationary mode).
#[derive(Debug, Clone)]
pub struct SolvedSample {
    pub sample: Sample,
    pub mesh: TriMesh,
    pub field: Vec<f64>,
}

/// Mesh, solve and (optionally) differentiate at one rotation angle.
pub fn solve_sample(domain: &DomainSpec, t: f64, opts: &SweepOptions) -> Result<SolvedSample> {
    let at = |e: Error| Error::AtSample { t, source: Box::new(e) };
    let mesh_opts = MeshOptions::new(opts.h).seed(opts.seed).kind(opts.mode.mesh_kind());
    let mesh = triangulate_with(domain, t, &mesh_opts).map_err(at)?;
    let classification = classify_configuration(&domain.at_phase(t));
    let (value, residual, derivative, field) = match opts.mode {
        Mode::Dirichlet if opts.derivative => {
            let (sol, mut d) = derivative_on_mesh(domain, t, &mesh, opts.tol, opts.recovery).map_err(at)?;
            if let Some(delta) = opts.fd_delta {
                d.fd_estimate = Some(finite_difference_on_mesh(domain, &mesh, delta, opts.tol).map_err(at)?);
            }
            (sol.lambda1, sol.residual, Some(d), sol.u)
        }
        Mode::Dirichlet => {
            let sol = Discretization::new(&mesh).and_then(|d| d.eigenpair(opts.tol)).map_err(at)?;
            (sol.lambda1, sol.residual, None, sol.u)
        }
        Mode::Schrodinger { alpha } | Mode::Well { alpha } => {
            let disc = Discretization::new(&mesh).map_err(at)?;
            let v = assemble_potential(&mesh).map_err(at)?;
            let sol = schrodinger_eigenpair(&disc.k, &disc.m, &v, alpha, &disc.dirichlet, opts.tol).map_err(at)?;
            (sol.lambda1, sol.residual, None, sol.u)
        }
        Mode::StationaryEnergy => {
            let (u, rep) = Discretization::new(&mesh).and_then(|d| d.torsion()).map_err(at)?;
            (rep.energy, rep.relative_mismatch, None, u)
        }
    };
    debug!("t = {t:.6}: {} = {value:.10} (nv = {})", opts.mode.value_label(), mesh.num_vertices());
    Ok(SolvedSample { sample: Sample { t, value, residual, derivative, classification }, mesh, field })
}

pub fn evaluate_sample(domain: &DomainSpec, t: f64, opts: &SweepOptions) -> Result<Sample> {
    solve_sample(domain, t, opts).map(|s| s.sample)
}

/// Calibrated noise levels of one sweep configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseFloor {
    /// Sample standard deviation of the swept value over re-meshings at `pi/(2n)`.
    pub value_std: f64,
    /// Same for the Hadamard derivative, when derivatives are on.
    pub derivative_std: Option<f64>,
    /// `|lambda1'|` of a circular obstacle by central differences on the same mesh size.
    pub circle_baseline: Option<f64>,
}

impl NoiseFloor {
    /// Threshold for comparisons of the swept value.
    pub fn value(&self) -> f64 {
        FLOOR_FACTOR * self.value_std
    }

    /// Threshold for "derivative is zero" and "derivative is positive".
    pub fn derivative(&self) -> Option<f64> {
        let std = self.derivative_std?;
        Some(FLOOR_FACTOR * std.max(self.circle_baseline.unwrap_or(0.0)))
    }
}

fn sample_std(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Re-meshes the domain at `t = pi/(2n)` with [`CALIBRATION_SEEDS`] and
/// measures the spread of the results; with derivatives on, also measures
/// the circular-obstacle baseline.
pub fn calibrate(domain: &DomainSpec, opts: &SweepOptions) -> Result<NoiseFloor> {
    opts.validate()?;
    let t = PI / (2.0 * domain.obstacle.n as f64);
    let quiet = SweepOptions { fd_delta: None, ..opts.clone() };
    let samples: Vec<Sample> = CALIBRATION_SEEDS
        .par_iter()
        .map(|&s| evaluate_sample(domain, t, &quiet.clone().seed(s)))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
    let (derivative_std, circle_baseline) = if opts.derivative {
        let d: Vec<f64> = samples.iter().filter_map(Sample::lambda1_prime).collect();
        let circle = DomainSpec::new(ObstacleSpec::circle(domain.obstacle.base_radius), domain.disk);
        let mesh = triangulate_with(&circle, t, &MeshOptions::new(opts.h).seed(opts.seed))?;
        let fd = finite_difference_on_mesh(&circle, &mesh, opts.fd_delta.unwrap_or(1e-3), opts.tol)?;
        (Some(sample_std(&d)), Some(fd.abs()))
    } else {
        (None, None)
    };
    let floor = NoiseFloor { value_std: sample_std(&values), derivative_std, circle_baseline };
    info!("noise floor: {floor:?}");
    Ok(floor)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub domain: DomainSpec,
    pub h: f64,
    pub mode: Mode,
    /// `2 pi / n`.
    pub period: f64,
    pub samples: Vec<Sample>,
    pub noise: Option<NoiseFloor>,
}

impl SweepResult {
    pub fn from_samples(domain: &DomainSpec, opts: &SweepOptions, samples: Vec<Sample>) -> Self {
        Self {
            domain: domain.clone(),
            h: opts.h,
            mode: opts.mode,
            period: 2.0 * PI / domain.obstacle.n as f64,
            samples,
            noise: None,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.value).collect()
    }

    pub fn value_floor(&self) -> f64 {
        self.noise.as_ref().map_or(0.0, NoiseFloor::value)
    }

    pub fn derivative_floor(&self) -> f64 {
        self.noise.as_ref().and_then(NoiseFloor::derivative).unwrap_or(0.0)
    }

    /// One row per sample: t, value, derivative, finite difference,
    /// classification, then the per-sector contributions.
    pub fn to_csv(&self) -> String {
        let sectors = 2 * self.domain.obstacle.n as usize;
        let mut out = format!("t,{},lambda1_prime,fd_estimate,classification", self.mode.value_label());
        for k in 0..sectors {
            out.push_str(&format!(",sector_{k}"));
        }
        out.push('\n');
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{},{},{}",
                s.t,
                s.value,
                opt(s.lambda1_prime()),
                opt(s.fd_estimate()),
                s.classification.label()
            ));
            for k in 0..sectors {
                let c = s.derivative.as_ref().map(|d| d.per_sector[k]);
                out.push(',');
                out.push_str(&opt(c));
            }
            out.push('\n');
        }
        out
    }
}

/// Solves every grid point (in parallel on the current rayon pool) and
/// collects the samples in grid order. No calibration is done.
pub fn run_sweep(domain: &DomainSpec, grid: &[f64], opts: &SweepOptions) -> Result<SweepResult> {
    domain.validate()?;
    opts.validate()?;
    check_grid(grid, domain.obstacle.n)?;
    let samples = grid.par_iter().map(|&t| evaluate_sample(domain, t, opts)).collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::from_samples(domain, opts, samples))
}

/// [`run_sweep`] followed by [`calibrate`].
pub fn run_calibrated_sweep(domain: &DomainSpec, grid: &[f64], opts: &SweepOptions) -> Result<SweepResult> {
    let mut result = run_sweep(domain, grid, opts)?;
    result.noise = Some(calibrate(domain, opts)?);
    Ok(result)
}

/// Sweep of one of the generalized functionals.
pub fn generalization_sweep(domain: &DomainSpec, mode: Mode, grid: &[f64], h: f64) -> Result<SweepResult> {
    run_calibrated_sweep(domain, grid, &SweepOptions::new(h).mode(mode))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The property holds trivially or the signal is below noise.
    Degenerate,
    /// Not applicable to this sweep (e.g. no derivatives were computed).
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub status: Status,
    /// Odd `n`: a conjecture check that never counts as a hard failure.
    pub conjecture: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Verdict {
    fn new(name: &str, status: Status, measured: f64, threshold: f64, detail: String) -> Self {
        Self { name: name.into(), status, conjecture: false, measured, threshold, detail }
    }

    pub fn is_hard_failure(&self) -> bool {
        self.status == Status::Fail && !self.conjecture
    }
}

fn is_multiple(t: f64, step: f64) -> bool {
    let r = t.rem_euclid(step);
    r.min(step - r) <= GRID_TOL
}

/// Compares every pair of samples related by `t -> -t` or `t -> t + 2 pi/n`,
/// i.e. `lambda(t) = lambda(2 pi/n - t)` on a fundamental window.
pub fn verify_symmetries(result: &SweepResult, tol: f64) -> Verdict {
    let s = &result.samples;
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if is_multiple(s[i].t + s[j].t, result.period) || is_multiple(s[i].t - s[j].t, result.period) {
                pairs += 1;
                worst = worst.max((s[i].value - s[j].value).abs());
            }
        }
    }
    if pairs == 0 {
        return Verdict::new("symmetry", Status::Skipped, 0.0, tol, "grid has no symmetric pairs".into());
    }
    let status = if worst <= tol { Status::Pass } else { Status::Fail };
    let detail = format!("max deviation {worst:.3e} over {pairs} pairs (tolerance {tol:.3e})");
    Verdict::new("symmetry", status, worst, tol, detail)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub t: f64,
    pub kind: ExtremumKind,
    pub value: f64,
    pub classification: Configuration,
}

/// Discrete local extrema of the sweep. Differences within `floor` count as
/// flat. Grid ends at multiples of `pi/n` are extended by the evenness of
/// the map about those angles.
pub fn detect_extrema(result: &SweepResult, floor: f64) -> Result<Vec<Extremum>> {
    let v = result.values();
    let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if hi - lo <= floor {
        return Err(Error::AmbiguousExtremum { variation: hi - lo, floor });
    }
    let n = v.len();
    let step = PI / result.domain.obstacle.n as f64;
    let sign = |d: f64| {
        if d > floor {
            1
        } else if d < -floor {
            -1
        } else {
            0
        }
    };
    let mut out = Vec::new();
    for i in 0..n {
        let t = result.samples[i].t;
        let left = if i > 0 {
            Some(v[i - 1])
        } else if n > 1 && is_multiple(t, step) {
            Some(v[1])
        } else {
            None
        };
        let right = if i + 1 < n {
            Some(v[i + 1])
        } else if n > 1 && is_multiple(t, step) {
            Some(v[n - 2])
        } else {
            None
        };
        let (Some(l), Some(r)) = (left, right) else { continue };
        let kind = match (sign(v[i] - l), sign(v[i] - r)) {
            (1, 1) => ExtremumKind::Max,
            (-1, -1) => ExtremumKind::Min,
            _ => continue,
        };
        out.push(Extremum { t, kind, value: v[i], classification: result.samples[i].classification });
    }
    Ok(out)
}

/// Every extremum must sit at the configuration predicted by the mode, and
/// both a maximum and a minimum must be present.
pub fn extrema_verdict(result: &SweepResult, floor: f64) -> (Verdict, Vec<Extremum>) {
    let conjecture = result.domain.obstacle.n % 2 == 1;
    let extrema = match detect_extrema(result, floor) {
        Ok(e) => e,
        Err(e) => {
            let mut v = Verdict::new("extrema", Status::Degenerate, 0.0, floor, e.to_string());
            v.conjecture = conjecture;
            return (v, Vec::new());
        }
    };
    let max_at = result.mode.expected_max();
    let min_at = if max_at == Configuration::On { Configuration::Off } else { Configuration::On };
    let mismatches = extrema
        .iter()
        .filter(|e| match e.kind {
            ExtremumKind::Max => e.classification != max_at,
            ExtremumKind::Min => e.classification != min_at,
        })
        .count();
    let has = |k: ExtremumKind| extrema.iter().any(|e| e.kind == k);
    let ok = mismatches == 0 && has(ExtremumKind::Max) && has(ExtremumKind::Min);
    let detail = format!(
        "{} extrema, {mismatches} misplaced; expected Max at {} and Min at {}",
        extrema.len(),
        max_at.label(),
        min_at.label()
    );
    let mut v = Verdict::new("extrema", if ok { Status::Pass } else { Status::Fail }, mismatches as f64, 0.0, detail);
    v.conjecture = conjecture;
    (v, extrema)
}

/// On `[0, pi/n]`: successive samples move in the predicted direction by
/// more than `floor`, and interior derivatives exceed `derivative_floor`.
pub fn monotonicity_check(result: &SweepResult, floor: f64, derivative_floor: f64) -> Verdict {
    let step = PI / result.domain.obstacle.n as f64;
    let window: Vec<&Sample> = result.samples.iter().filter(|s| s.t >= -GRID_TOL && s.t <= step + GRID_TOL).collect();
    let interior = window.iter().filter(|s| s.t > GRID_TOL && s.t < step - GRID_TOL).count();
    let mut v = if interior < 7 {
        Verdict::new(
            "monotonicity",
            Status::Skipped,
            interior as f64,
            7.0,
            format!("only {interior} interior samples in (0, pi/n); need 7"),
        )
    } else {
        let slope = result.mode.expected_slope();
        let values: Vec<f64> = window.iter().map(|s| s.value).collect();
        let variation = values.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
            - values.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        if variation <= floor {
            Verdict::new(
                "monotonicity",
                Status::Degenerate,
                variation,
                floor,
                format!("variation {variation:.3e} below noise floor {floor:.3e}"),
            )
        } else {
            let min_step = values.windows(2).map(|w| slope * (w[1] - w[0])).fold(f64::INFINITY, f64::min);
            let min_deriv = window
                .iter()
                .filter(|s| s.t > GRID_TOL && s.t < step - GRID_TOL)
                .filter_map(|s| s.lambda1_prime())
                .map(|d| slope * d)
                .fold(f64::INFINITY, f64::min);
            let ok = min_step > floor && (min_deriv.is_infinite() || min_deriv > derivative_floor);
            let detail = if min_deriv.is_infinite() {
                format!("smallest step {min_step:.3e} (floor {floor:.3e})")
            } else {
                format!(
                    "smallest step {min_step:.3e} (floor {floor:.3e}), smallest derivative {min_deriv:.3e} (floor {derivative_floor:.3e})"
                )
            };
            Verdict::new("monotonicity", if ok { Status::Pass } else { Status::Fail }, min_step, floor, detail)
        }
    };
    v.conjecture = result.domain.obstacle.n % 2 == 1;
    v
}

/// `|lambda1'(k pi/n)|` below `floor` at every sample on a symmetry angle.
pub fn critical_points_verdict(result: &SweepResult, floor: f64) -> Verdict {
    let step = PI / result.domain.obstacle.n as f64;
    let d: Vec<f64> =
        result.samples.iter().filter(|s| is_multiple(s.t, step)).filter_map(|s| s.lambda1_prime()).collect();
    if d.is_empty() {
        return Verdict::new("critical_points", Status::Skipped, 0.0, floor, "no derivatives at k pi/n".into());
    }
    let worst = d.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let status = if worst < floor { Status::Pass } else { Status::Fail };
    let detail = format!("max |lambda1'| {worst:.3e} at {} symmetry angles (floor {floor:.3e})", d.len());
    Verdict::new("critical_points", status, worst, floor, detail)
}

/// Relative agreement of the Hadamard derivative with the finite difference,
/// `|had - fd| / max(|fd|, floor) <= rel`, over samples with signal above `floor`.
pub fn derivative_agreement_verdict(result: &SweepResult, floor: f64, rel: f64) -> Verdict {
    let pairs: Vec<(f64, f64)> =
        result.samples.iter().filter_map(|s| Some((s.lambda1_prime()?, s.fd_estimate()?))).collect();
    if pairs.is_empty() {
        return Verdict::new("derivative_agreement", Status::Skipped, 0.0, rel, "no finite differences".into());
    }
    let signal: Vec<&(f64, f64)> = pairs.iter().filter(|(a, b)| a.abs().max(b.abs()) > floor).collect();
    if signal.is_empty() {
        return Verdict::new(
            "derivative_agreement",
            Status::Degenerate,
            0.0,
            rel,
            "all derivatives below the noise floor".into(),
        );
    }
    let worst = signal.iter().map(|(a, b)| (a - b).abs() / b.abs().max(floor)).fold(0.0, f64::max);
    let status = if worst <= rel { Status::Pass } else { Status::Fail };
    let detail = format!("max relative difference {worst:.3e} over {} samples", signal.len());
    Verdict::new("derivative_agreement", status, worst, rel, detail)
}

/// Domain monotonicity: `lambda1(B) < lambda1(t)`, and `lambda1(t) < upper`
/// when an upper bound (e.g. the disk minus the circumscribed disk) is given.
/// The upper bound is itself a discrete value, so it is relaxed by the value
/// noise floor; the lower bound is exact.
pub fn bracket_verdict(result: &SweepResult, upper: Option<f64>) -> Verdict {
    if result.mode != Mode::Dirichlet {
        return Verdict::new("bracket", Status::Skipped, 0.0, 0.0, "only for Dirichlet sweeps".into());
    }
    let lower = disk_lambda1(result.domain.disk.radius);
    let v = result.values();
    let lo = v.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let hi = v.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let floor = result.value_floor();
    let ok = lo > lower && upper.is_none_or(|u| hi < u + floor);
    let detail = match upper {
        Some(u) => format!("{lower:.6} < [{lo:.6}, {hi:.6}] < {u:.6} (+ floor {floor:.3e})"),
        None => format!("{lower:.6} < [{lo:.6}, {hi:.6}]"),
    };
    Verdict::new("bracket", if ok { Status::Pass } else { Status::Fail }, lo - lower, 0.0, detail)
}

/// FEM eigenvalue of the disk minus the obstacle's circumscribed disk, an
/// upper bound for every rotation by domain monotonicity.
pub fn circumscribed_upper_bound(domain: &DomainSpec, h: f64) -> Result<f64> {
    let (_, circum) = domain.obstacle.incircle_circumcircle();
    let hull = DomainSpec::new(ObstacleSpec::circle(circum), domain.disk);
    let mesh = triangulate_with(&hull, 0.0, &MeshOptions::new(h))?;
    Ok(Discretization::new(&mesh)?.eigenpair(DEFAULT_TOL)?.lambda1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub verdicts: Vec<Verdict>,
    pub extrema: Vec<Extremum>,
    /// Sector pairing at every sample strictly inside `(0, pi/n)`; diagnostic only.
    pub pairings: Vec<(f64, SectorPairing)>,
    pub noise: Option<NoiseFloor>,
    pub value_floor: f64,
    pub derivative_floor: f64,
}

impl VerificationReport {
    /// True when no verdict outside the conjecture set failed.
    pub fn passed(&self) -> bool {
        !self.verdicts.iter().any(Verdict::is_hard_failure)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

/// The full property suite over a (calibrated) sweep.
pub fn verify(result: &SweepResult, upper: Option<f64>) -> VerificationReport {
    let floor = result.value_floor();
    let dfloor = result.derivative_floor();
    let (extrema_v, extrema) = extrema_verdict(result, floor);
    let verdicts = vec![
        verify_symmetries(result, floor),
        extrema_v,
        monotonicity_check(result, floor, dfloor),
        critical_points_verdict(result, dfloor),
        derivative_agreement_verdict(result, dfloor, 0.05),
        bracket_verdict(result, upper),
    ];
    let n = result.domain.obstacle.n;
    let step = PI / n as f64;
    let pairings = result
        .samples
        .iter()
        .filter(|s| s.t > GRID_TOL && s.t < step - GRID_TOL)
        .filter_map(|s| Some((s.t, sector_pairing_report(s.derivative.as_ref()?, n))))
        .collect();
    VerificationReport {
        verdicts,
        extrema,
        pairings,
        noise: result.noise.clone(),
        value_floor: floor,
        derivative_floor: dfloor,
    }
}
