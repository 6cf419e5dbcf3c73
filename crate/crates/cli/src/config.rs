//! Run configuration: TOML (or JSON, by extension) with four blocks.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use specobs::fem::FluxRecovery;
use specobs::geometry::{DiskSpec, DomainSpec, ObstacleSpec};
use specobs::sweep::{uniform_grid, Mode, SweepOptions};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gear,
    Polygon,
    RoundedPolygon,
    /// No obstacle: the plain disk.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub n: u32,
    pub family: Family,
    pub r0: f64,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub corner_radius: f64,
    pub x0: f64,
    pub r1: f64,
    /// Rotation angle for single solves.
    #[serde(default)]
    pub t: f64,
    /// Symmetry-breaking coefficient, for negative controls only.
    #[serde(default)]
    pub asymmetry: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Discretization {
    pub h: f64,
    /// Uniform refinement steps for the convergence study.
    #[serde(default = "default_refinements")]
    pub refinements: usize,
    #[serde(default)]
    pub flux: FluxRecovery,
}

fn default_refinements() -> usize {
    3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    #[default]
    Dirichlet,
    Schrodinger,
    Well,
    StationaryEnergy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    #[serde(default = "default_points")]
    pub points: usize,
    /// Grid end in units of `pi/n`; the grid runs from 0 to `window * pi/n`.
    #[serde(default = "default_window")]
    pub window: f64,
    #[serde(default)]
    pub derivative: bool,
    /// Central-difference step; `None` skips the cross-check.
    #[serde(default)]
    pub fd_delta: Option<f64>,
    #[serde(default)]
    pub mode: ModeName,
    #[serde(default)]
    pub alpha: Option<f64>,
}

fn default_points() -> usize {
    5
}

fn default_window() -> f64 {
    2.0
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            points: default_points(),
            window: default_window(),
            derivative: false,
            fd_delta: None,
            mode: ModeName::default(),
            alpha: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Vtk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_directory() -> PathBuf {
    PathBuf::from("specobs-out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

impl Default for Output {
    fn default() -> Self {
        Self { directory: default_directory(), formats: default_formats() }
    }
}

impl Output {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: Geometry,
    pub discretization: Discretization,
    #[serde(default)]
    pub sweep: Sweep,
    #[serde(default)]
    pub output: Output,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.discretization.h > 0.0 && self.discretization.h.is_finite()) {
            return bad(format!("h = {} must be positive", self.discretization.h));
        }
        if self.sweep.points < 2 {
            return bad("sweep.points must be at least 2".into());
        }
        self.mode()?.validate()?;
        self.disk().validate()?;
        if let Some(d) = self.domain() {
            d.validate()?;
        }
        Ok(())
    }

    pub fn disk(&self) -> DiskSpec {
        DiskSpec::new(self.geometry.x0, self.geometry.r1)
    }

    pub fn obstacle(&self) -> Option<ObstacleSpec> {
        let g = &self.geometry;
        let ob = match g.family {
            Family::None => return None,
            Family::Gear => ObstacleSpec::gear(g.n, g.r0, g.epsilon),
            Family::Polygon => ObstacleSpec::polygon(g.n, g.r0),
            Family::RoundedPolygon => ObstacleSpec::rounded_polygon(g.n, g.r0, g.corner_radius),
        };
        Some(ob.with_asymmetry(g.asymmetry))
    }

    /// The perforated domain, or `None` for the plain disk.
    pub fn domain(&self) -> Option<DomainSpec> {
        self.obstacle().map(|o| DomainSpec::new(o, self.disk()))
    }

    pub fn require_domain(&self) -> Result<DomainSpec, CliError> {
        self.domain().ok_or_else(|| CliError::Config("this command needs an obstacle (family != none)".into()))
    }

    pub fn mode(&self) -> Result<Mode, CliError> {
        let alpha = || self.sweep.alpha.ok_or_else(|| CliError::Config("sweep.alpha is required for this mode".into()));
        Ok(match self.sweep.mode {
            ModeName::Dirichlet => Mode::Dirichlet,
            ModeName::Schrodinger => Mode::Schrodinger { alpha: alpha()? },
            ModeName::Well => Mode::Well { alpha: alpha()? },
            ModeName::StationaryEnergy => Mode::StationaryEnergy,
        })
    }

    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        Ok(uniform_grid(self.geometry.n, self.sweep.points, self.sweep.window)?)
    }

    pub fn sweep_options(&self, seed: u64) -> Result<SweepOptions, CliError> {
        let mut o = SweepOptions::new(self.discretization.h).mode(self.mode()?).seed(seed);
        if self.sweep.derivative {
            o = o.with_derivative(self.sweep.fd_delta);
        }
        o.recovery = self.discretization.flux;
        Ok(o)
    }
}
