//! Admissible geometry: a dihedrally symmetric star-shaped obstacle placed
//! at the origin inside an off-center disk.
//!
//! Obstacle boundaries are described by their polar radius about the origin.
//! Each family is first written in a *body frame* in which an outer vertex
//! sits at angle 0 and the neighbouring inner vertex at `pi/n`. The body frame
//! is then turned by a fixed placement offset so that at phase `t = 0` an
//! inner vertex lies on the negative x1-axis (the OFF configuration), and by
//! the phase `t` on top of that.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Angular tolerance used when deciding ON/OFF positions.
pub const ANGULAR_TOL: f64 = 1e-9;

/// Polar description of a star-shaped curve about the origin.
pub trait RadialBoundary {
    fn radius(&self, phi: f64) -> f64;

    /// Derivative of the radius with respect to the polar angle.
    fn slope(&self, phi: f64) -> Result<f64>;

    fn point(&self, phi: f64) -> Point {
        let r = self.radius(phi);
        [r * phi.cos(), r * phi.sin()]
    }
}

/// A radial boundary given by closures for the radius and its derivative.
pub struct RadialFn<F, G>(pub F, pub G);

impl<F, G> RadialBoundary for RadialFn<F, G>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    fn radius(&self, phi: f64) -> f64 {
        (self.0)(phi)
    }

    fn slope(&self, phi: f64) -> Result<f64> {
        Ok((self.1)(phi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstacleFamily {
    /// `r0 (1 + eps cos(n psi))` in the body frame.
    Gear,
    /// Regular n-gon with circumradius `r0` whose corners are rounded with
    /// radius `corner_radius`.
    RoundedPolygon,
    /// Regular n-gon with circumradius `r0`.
    Polygon,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleSpec {
    pub n: u32,
    pub family: ObstacleFamily,
    pub base_radius: f64,
    pub amplitude: f64,
    pub corner_radius: f64,
    /// Current rotation angle `t`.
    pub phase: f64,
    /// Coefficient of an extra `r0 * a * sin(psi)` term that breaks the
    /// dihedral symmetry. Zero for every admissible obstacle; only used to
    /// build negative controls.
    pub asymmetry: f64,
}

impl ObstacleSpec {
    pub fn gear(n: u32, base_radius: f64, amplitude: f64) -> Self {
        Self { n, family: ObstacleFamily::Gear, base_radius, amplitude, corner_radius: 0.0, phase: 0.0, asymmetry: 0.0 }
    }

    pub fn circle(radius: f64) -> Self {
        Self::gear(4, radius, 0.0)
    }

    pub fn polygon(n: u32, circumradius: f64) -> Self {
        Self { family: ObstacleFamily::Polygon, ..Self::gear(n, circumradius, 0.0) }
    }

    pub fn rounded_polygon(n: u32, circumradius: f64, corner_radius: f64) -> Self {
        Self { family: ObstacleFamily::RoundedPolygon, corner_radius, ..Self::gear(n, circumradius, 0.0) }
    }

    pub fn with_phase(mut self, t: f64) -> Self {
        self.phase = t;
        self
    }

    pub fn with_asymmetry(mut self, a: f64) -> Self {
        self.asymmetry = a;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDomain(msg));
        if self.n < 3 {
            return bad(format!("symmetry order n = {} must be at least 3", self.n));
        }
        if !(self.base_radius.is_finite() && self.base_radius > 0.0) {
            return bad(format!("r0 = {} must be positive", self.base_radius));
        }
        if !self.phase.is_finite() || !self.asymmetry.is_finite() {
            return bad("phase and asymmetry must be finite".into());
        }
        match self.family {
            ObstacleFamily::Gear => {
                if !(0.0..1.0).contains(&self.amplitude) {
                    return bad(format!("gear amplitude {} must lie in [0, 1)", self.amplitude));
                }
            }
            ObstacleFamily::RoundedPolygon => {
                if !(self.corner_radius >= 0.0 && self.corner_radius < self.base_radius) {
                    return bad(format!("corner radius {} must lie in [0, r0)", self.corner_radius));
                }
            }
            ObstacleFamily::Polygon => {}
        }
        let (inr, _) = self.incircle_circumcircle();
        if inr <= 0.0 {
            return bad("obstacle radius must stay positive".into());
        }
        Ok(())
    }

    /// True when every boundary operation requiring a C^1 curve is defined
    /// everywhere.
    pub fn is_smooth(&self) -> bool {
        self.family != ObstacleFamily::Polygon
    }

    pub fn is_circular(&self) -> bool {
        let (a, b) = self.incircle_circumcircle();
        (b - a).abs() <= 1e-14 * b
    }

    /// Angle by which the body frame is turned at phase 0.
    pub fn placement_offset(&self) -> f64 {
        PI - PI / self.n as f64
    }

    pub fn sector_angle(&self) -> f64 {
        PI / self.n as f64
    }

    /// Converts a physical polar angle to the body-frame angle.
    pub fn body_angle(&self, phi: f64) -> f64 {
        phi - self.phase - self.placement_offset()
    }

    /// Radius and slope of the family in the body frame.
    pub fn profile(&self, psi: f64) -> Result<(f64, f64)> {
        let r0 = self.base_radius;
        let n = self.n as f64;
        let (mut r, mut dr) = match self.family {
            ObstacleFamily::Gear => {
                let e = self.amplitude;
                (r0 * (1.0 + e * (n * psi).cos()), -r0 * e * n * (n * psi).sin())
            }
            ObstacleFamily::RoundedPolygon | ObstacleFamily::Polygon => {
                let c = if self.family == ObstacleFamily::Polygon { 0.0 } else { self.corner_radius };
                let period = TAU / n;
                let half = PI / n;
                let w = psi.rem_euclid(period);
                let (local, sign) = if w <= half { (w, 1.0) } else { (period - w, -1.0) };
                if c == 0.0 && (local < 1e-12) {
                    // Polygon corner: radius is fine, derivative is not.
                    return Err(Error::UndefinedPoint { phi: psi });
                }
                let (r, d) = rounded_polygon_half_sector(r0, c, half, local);
                (r, sign * d)
            }
        };
        if self.asymmetry != 0.0 {
            r += r0 * self.asymmetry * psi.sin();
            dr += r0 * self.asymmetry * psi.cos();
        }
        Ok((r, dr))
    }

    /// Body-frame radius; total even at polygon corners.
    pub fn profile_radius(&self, psi: f64) -> f64 {
        match self.profile(psi) {
            Ok((r, _)) => r,
            Err(_) => {
                // Only the polygon corner lands here; the radius is the circumradius.
                self.base_radius + self.base_radius * self.asymmetry * psi.sin()
            }
        }
    }

    /// Returns `(incircle radius, circumcircle radius)`.
    pub fn incircle_circumcircle(&self) -> (f64, f64) {
        let r0 = self.base_radius;
        let n = self.n as f64;
        if self.asymmetry == 0.0 {
            match self.family {
                ObstacleFamily::Gear => (r0 * (1.0 - self.amplitude), r0 * (1.0 + self.amplitude)),
                ObstacleFamily::Polygon => (r0 * (PI / n).cos(), r0),
                ObstacleFamily::RoundedPolygon => {
                    let c = self.corner_radius;
                    ((r0 - c) * (PI / n).cos() + c, r0)
                }
            }
        } else {
            let m = 8192 * self.n as usize;
            (0..m)
                .map(|k| self.profile_radius(TAU * k as f64 / m as f64))
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)))
        }
    }

    /// Enclosed area by periodic trapezoidal quadrature of `r^2 / 2`.
    pub fn area(&self) -> f64 {
        let m = 4096 * self.n as usize;
        let dphi = TAU / m as f64;
        (0..m)
            .map(|k| {
                let r = self.profile_radius(k as f64 * dphi);
                0.5 * r * r
            })
            .sum::<f64>()
            * dphi
    }

    /// Physical angles of the inner vertices (contacts with the incircle).
    pub fn inner_vertex_angles(&self) -> Vec<f64> {
        let step = TAU / self.n as f64;
        (0..self.n)
            .map(|k| (self.placement_offset() + self.phase + PI / self.n as f64 + k as f64 * step).rem_euclid(TAU))
            .collect()
    }

    /// Physical angles of the outer vertices (contacts with the circumcircle).
    pub fn outer_vertex_angles(&self) -> Vec<f64> {
        let step = TAU / self.n as f64;
        (0..self.n).map(|k| (self.placement_offset() + self.phase + k as f64 * step).rem_euclid(TAU)).collect()
    }

    /// Polar angles of the symmetry axes `t + k pi/n`, `k = 0..2n`; these
    /// bound the sectors.
    pub fn sector_boundaries(&self) -> Vec<f64> {
        (0..2 * self.n).map(|k| self.phase + k as f64 * self.sector_angle()).collect()
    }

    /// Index of the sector `(t + k pi/n, t + (k+1) pi/n)` containing `phi`.
    pub fn sector_of(&self, phi: f64) -> usize {
        let s = ((phi - self.phase).rem_euclid(TAU) / self.sector_angle()).floor() as usize;
        s.min(2 * self.n as usize - 1)
    }

    /// Whether `p` lies strictly inside the obstacle.
    pub fn contains(&self, p: Point) -> bool {
        let phi = p[1].atan2(p[0]);
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        r < self.radius(phi)
    }
}

/// Radius and derivative of a rounded polygon on `[0, pi/n]`, measured from
/// a corner. The corner arc is centred at distance `r0 - c` from the origin.
fn rounded_polygon_half_sector(r0: f64, c: f64, half: f64, psi: f64) -> (f64, f64) {
    let rq = r0 - c;
    let apothem = rq * half.cos() + c;
    let switch = (c * half.sin()).atan2(rq + c * half.cos());
    if psi < switch {
        let (s, co) = psi.sin_cos();
        let root = (c * c - rq * rq * s * s).max(0.0).sqrt();
        let r = rq * co + root;
        let dr = -rq * s - rq * rq * s * co / root;
        (r, dr)
    } else {
        let u = half - psi;
        let r = apothem / u.cos();
        let dr = -apothem * u.sin() / (u.cos() * u.cos());
        (r, dr)
    }
}

impl RadialBoundary for ObstacleSpec {
    fn radius(&self, phi: f64) -> f64 {
        self.profile_radius(self.body_angle(phi))
    }

    fn slope(&self, phi: f64) -> Result<f64> {
        self.profile(self.body_angle(phi)).map(|(_, dr)| dr).map_err(|_| Error::UndefinedPoint { phi })
    }
}

/// Disk `B` of radius `r1` centred at `(-x0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskSpec {
    pub offset: f64,
    pub radius: f64,
}

impl DiskSpec {
    pub fn new(offset: f64, radius: f64) -> Self {
        Self { offset, radius }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::InvalidDomain(format!("r1 = {} must be positive", self.radius)));
        }
        if !(self.offset >= 0.0 && self.offset < self.radius) {
            return Err(Error::InvalidDomain(format!(
                "offset x0 = {} must satisfy 0 <= x0 < r1 = {}",
                self.offset, self.radius
            )));
        }
        Ok(())
    }

    pub fn is_concentric(&self) -> bool {
        self.offset == 0.0
    }

    pub fn center(&self) -> Point {
        [-self.offset, 0.0]
    }

    /// Point of the circle at angle `theta` measured about the disk centre.
    pub fn point_at_center_angle(&self, theta: f64) -> Point {
        [-self.offset + self.radius * theta.cos(), self.radius * theta.sin()]
    }

    pub fn contains(&self, p: Point) -> bool {
        let dx = p[0] + self.offset;
        dx * dx + p[1] * p[1] < self.radius * self.radius
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }
}

impl RadialBoundary for DiskSpec {
    fn radius(&self, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        let x0 = self.offset;
        -x0 * c + (self.radius * self.radius - x0 * x0 * s * s).sqrt()
    }

    fn slope(&self, phi: f64) -> Result<f64> {
        let (s, c) = phi.sin_cos();
        let x0 = self.offset;
        let root = (self.radius * self.radius - x0 * x0 * s * s).sqrt();
        Ok(x0 * s - x0 * x0 * s * c / root)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub obstacle: ObstacleSpec,
    pub disk: DiskSpec,
}

impl DomainSpec {
    pub fn new(obstacle: ObstacleSpec, disk: DiskSpec) -> Self {
        Self { obstacle, disk }
    }

    /// Checks both parts and the free-rotation condition `max f < g(0)`.
    pub fn validate(&self) -> Result<()> {
        self.obstacle.validate()?;
        self.disk.validate()?;
        let margin = self.free_rotation_margin();
        if margin <= 0.0 {
            let (_, circ) = self.obstacle.incircle_circumcircle();
            return Err(Error::InvalidDomain(format!(
                "obstacle circumradius {circ} does not fit below r1 - x0 = {}",
                self.disk.radius - self.disk.offset
            )));
        }
        Ok(())
    }

    /// `g(0) - circumradius`: the narrowest annular gap over all rotations.
    pub fn free_rotation_margin(&self) -> f64 {
        let (_, circ) = self.obstacle.incircle_circumcircle();
        self.disk.radius - self.disk.offset - circ
    }

    pub fn at_phase(&self, t: f64) -> Self {
        Self { obstacle: self.obstacle.clone().with_phase(t), disk: self.disk }
    }

    pub fn area(&self) -> f64 {
        self.disk.area() - self.obstacle.area()
    }
}

/// Evaluates `f(phi - t)` for the obstacle at its current phase.
pub fn obstacle_radius(spec: &ObstacleSpec, phi: f64) -> f64 {
    spec.radius(phi)
}

/// `g(phi) = -x0 cos(phi) + sqrt(r1^2 - x0^2 sin^2(phi))`.
pub fn disk_radius(disk: &DiskSpec, phi: f64) -> f64 {
    disk.radius(phi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiskMonotonicityReport {
    pub samples: usize,
    pub strictly_increasing: bool,
    pub strictly_decreasing_second_half: bool,
    /// Smallest successive difference on `[0, pi]`.
    pub min_gap: f64,
    pub degenerate_concentric: bool,
}

impl DiskMonotonicityReport {
    pub fn passed(&self) -> bool {
        self.degenerate_concentric || (self.strictly_increasing && self.strictly_decreasing_second_half)
    }
}

/// Samples `g` on a uniform grid of `[0, pi]` (and the mirrored grid of
/// `[pi, 2 pi]`) and reports whether it is strictly monotone.
pub fn check_disk_monotonicity(disk: &DiskSpec, samples: usize) -> Result<DiskMonotonicityReport> {
    if samples < 3 {
        return Err(Error::InvalidDomain(format!("need at least 3 samples, got {samples}")));
    }
    disk.validate()?;
    let grid =
        |a: f64| -> Vec<f64> { (0..samples).map(|k| disk.radius(a + PI * k as f64 / (samples - 1) as f64)).collect() };
    let first = grid(0.0);
    let second = grid(PI);
    let gaps: Vec<f64> = first.windows(2).map(|w| w[1] - w[0]).collect();
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(DiskMonotonicityReport {
        samples,
        strictly_increasing: gaps.iter().all(|&d| d > 0.0),
        strictly_decreasing_second_half: second.windows(2).all(|w| w[1] < w[0]),
        min_gap,
        degenerate_concentric: disk.is_concentric(),
    })
}

/// `<eta, v>` at the boundary point of angle `phi`, where `eta` is the unit
/// outward normal of the region `{r < h}` and `v = i zeta` the rotation field.
pub fn inner_product_eta_v<B: RadialBoundary + ?Sized>(h: &B, phi: f64) -> Result<f64> {
    let r = h.radius(phi);
    let dr = h.slope(phi)?;
    Ok(-r * dr / (r * r + dr * dr).sqrt())
}

/// Unit outward normal of the region `{r < h}` at angle `phi`.
pub fn outward_normal<B: RadialBoundary + ?Sized>(h: &B, phi: f64) -> Result<Point> {
    let r = h.radius(phi);
    let dr = h.slope(phi)?;
    let norm = (r * r + dr * dr).sqrt();
    let (s, c) = phi.sin_cos();
    Ok([(r * c + dr * s) / norm, (r * s - dr * c) / norm])
}

/// Outward normal of the perforated domain on the obstacle boundary, which
/// points into the obstacle.
pub fn domain_normal_on_obstacle(spec: &ObstacleSpec, phi: f64) -> Result<Point> {
    outward_normal(spec, phi).map(|[a, b]| [-a, -b])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Configuration {
    On,
    Off,
    /// Phase reduced modulo `2 pi / n`.
    Intermediate(f64),
    /// Circular obstacle: every boundary point is a vertex.
    Circular,
}

impl Configuration {
    pub fn label(&self) -> &'static str {
        match self {
            Configuration::On => "ON",
            Configuration::Off => "OFF",
            Configuration::Intermediate(_) => "--",
            Configuration::Circular => "CIRCULAR",
        }
    }
}

/// ON if an outer vertex lies on the negative x1-axis, OFF if an inner
/// vertex does.
pub fn classify_configuration(domain: &DomainSpec) -> Configuration {
    let obstacle = &domain.obstacle;
    if obstacle.is_circular() {
        return Configuration::Circular;
    }
    let period = TAU / obstacle.n as f64;
    let distance_to = |angles: Vec<f64>| {
        angles
            .into_iter()
            .map(|a| {
                let d = (a - PI).rem_euclid(period);
                d.min(period - d)
            })
            .fold(f64::INFINITY, f64::min)
    };
    if distance_to(obstacle.inner_vertex_angles()) <= ANGULAR_TOL {
        Configuration::Off
    } else if distance_to(obstacle.outer_vertex_angles()) <= ANGULAR_TOL {
        Configuration::On
    } else {
        Configuration::Intermediate(obstacle.phase.rem_euclid(period))
    }
}

/// Returns `(incircle radius, circumcircle radius)`.
pub fn incircle_circumcircle(spec: &ObstacleSpec) -> (f64, f64) {
    spec.incircle_circumcircle()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContainmentReport {
    pub checked: usize,
    pub violations: usize,
    /// Samples where the reflected point lands exactly on the circle.
    pub equalities: usize,
    /// Smallest `g(far) - g(near)` over all samples.
    pub min_margin: f64,
}

/// Samples the disk boundary of each smaller sector of a consecutive pair,
/// reflects it across the separating symmetry axis and checks that it lands
/// strictly inside the disk.
pub fn sector_containment_diagnostic(domain: &DomainSpec, t: f64, samples: usize) -> Result<ContainmentReport> {
    let n = domain.obstacle.n as usize;
    let sector = PI / n as f64;
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidDomain("sector containment is stated for even n only".into()));
    }
    if !(t > 0.0 && t < sector) {
        return Err(Error::InvalidDomain(format!("t = {t} must lie in (0, pi/n)")));
    }
    if samples == 0 {
        return Err(Error::InvalidDomain("need at least one sample".into()));
    }
    let g = |phi: f64| domain.disk.radius(phi);
    let scale = domain.disk.radius;
    let mut report = ContainmentReport { checked: 0, violations: 0, equalities: 0, min_margin: f64::INFINITY };
    let mut record = |near: f64, far: f64| {
        let margin = far - near;
        report.checked += 1;
        report.min_margin = report.min_margin.min(margin);
        if margin.abs() <= 1e-13 * scale {
            report.equalities += 1;
        } else if margin < 0.0 {
            report.violations += 1;
        }
    };
    for j in 1..=samples {
        let beta = sector * j as f64 / samples as f64;
        // Upper hemisphere: reflect sector k into sector k + 1.
        for k in (0..=n - 2).step_by(2) {
            let axis = t + (k + 1) as f64 * sector;
            record(g(axis - beta), g(axis + beta));
        }
        // Lower hemisphere: reflect sector k + 1 into sector k.
        for k in (n..=2 * n - 2).step_by(2) {
            let axis = t + (k + 1) as f64 * sector;
            record(g(axis + beta), g(axis - beta));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn gear_profile(phi: f64) -> f64 {
        1.0 + 0.2 * (4.0 * phi).cos()
    }

    fn gear_profile_slope(phi: f64) -> f64 {
        -0.8 * (4.0 * phi).sin()
    }

    #[test]
    fn circle_radius_is_constant() {
        let spec = ObstacleSpec::gear(4, 0.5, 0.0);
        for k in 0..17 {
            let phi = 0.37 * k as f64;
            assert!((obstacle_radius(&spec, phi) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn gear_profile_values() {
        let spec = ObstacleSpec::gear(4, 0.5, 0.2);
        assert!((spec.profile(0.0).unwrap().0 - 0.6).abs() < 1e-15);
        assert!((spec.profile(FRAC_PI_4).unwrap().0 - 0.4).abs() < 1e-15);
    }

    #[test]
    fn gear_placement_is_off_at_zero_phase() {
        for n in [3u32, 4, 5, 6] {
            let spec = ObstacleSpec::gear(n, 0.5, 0.2);
            assert!((spec.radius(PI) - 0.4).abs() < 1e-14, "n = {n}");
            let on = spec.clone().with_phase(PI / n as f64);
            assert!((on.radius(PI) - 0.6).abs() < 1e-14, "n = {n}");
        }
        // n = 4: the physical radius at phase 0 is r0 (1 - eps cos 4 phi).
        let spec = ObstacleSpec::gear(4, 0.5, 0.2);
        assert!((spec.radius(0.0) - 0.4).abs() < 1e-14);
        assert!((spec.radius(FRAC_PI_4) - 0.6).abs() < 1e-14);
    }

    #[test]
    fn square_radius() {
        let r = 0.5;
        let sq = ObstacleSpec::polygon(4, r);
        assert!((sq.profile_radius(0.0) - r).abs() < 1e-15);
        assert!((sq.profile_radius(FRAC_PI_4) - r * FRAC_PI_4.cos()).abs() < 1e-15);
        assert!(matches!(sq.profile(0.0), Err(Error::UndefinedPoint { .. })));
        let vertex_phi = sq.outer_vertex_angles()[0];
        assert!((sq.radius(vertex_phi) - r).abs() < 1e-14);
    }

    #[test]
    fn rounded_polygon_is_continuous_and_c1() {
        let spec = ObstacleSpec::rounded_polygon(5, 0.4, 0.08);
        let m = 20_000;
        let h = 1e-6;
        for k in 0..m {
            let psi = TAU * (k as f64 + 0.5) / m as f64;
            let (r, dr) = spec.profile(psi).unwrap();
            let fd = (spec.profile_radius(psi + h) - spec.profile_radius(psi - h)) / (2.0 * h);
            assert!((fd - dr).abs() < 1e-5, "psi {psi}: {fd} vs {dr}");
            assert!(r > 0.0);
        }
        let (inr, circ) = spec.incircle_circumcircle();
        assert!((circ - 0.4).abs() < 1e-15);
        assert!((spec.profile_radius(PI / 5.0) - inr).abs() < 1e-14);
    }

    #[test]
    fn disk_radius_values() {
        let concentric = DiskSpec::new(0.0, 1.0);
        assert!((disk_radius(&concentric, 1.234) - 1.0).abs() < 1e-15);
        let d = DiskSpec::new(0.2, 1.0);
        assert!((disk_radius(&d, 0.0) - 0.8).abs() < 1e-15);
        assert!((disk_radius(&d, PI) - 1.2).abs() < 1e-15);
        assert!((disk_radius(&d, PI / 2.0) - 0.96f64.sqrt()).abs() < 1e-15);
        assert!((disk_radius(&d, PI / 2.0) - 0.9798).abs() < 1e-4);
    }

    #[test]
    fn disk_radius_lies_on_circle() {
        let d = DiskSpec::new(0.37, 1.3);
        for k in 0..360 {
            let phi = TAU * k as f64 / 360.0;
            let g = d.radius(phi);
            let lhs = (g * phi.cos() + d.offset).powi(2) + (g * phi.sin()).powi(2);
            assert!((lhs - d.radius * d.radius).abs() < 1e-12 * d.radius * d.radius);
        }
    }

    #[test]
    fn disk_monotonicity_reports() {
        let rep = check_disk_monotonicity(&DiskSpec::new(0.2, 1.0), 100).unwrap();
        assert!(rep.strictly_increasing && rep.strictly_decreasing_second_half);
        assert!(rep.min_gap > 0.0);
        assert!(rep.passed());

        let rep = check_disk_monotonicity(&DiskSpec::new(0.0, 1.0), 100).unwrap();
        assert!(rep.degenerate_concentric);
        assert!(!rep.strictly_increasing);

        let d = DiskSpec::new(0.5, 1.0);
        let rep = check_disk_monotonicity(&d, 4).unwrap();
        assert!(rep.strictly_increasing);
        let vals: Vec<f64> = [0.0, PI / 3.0, 2.0 * PI / 3.0, PI].iter().map(|&p| d.radius(p)).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));

        assert!(check_disk_monotonicity(&d, 2).is_err());
    }

    #[test]
    fn eta_v_values() {
        let circle = RadialFn(|_: f64| 1.0, |_: f64| 0.0);
        assert_eq!(inner_product_eta_v(&circle, 0.3).unwrap(), 0.0);

        let h = RadialFn(gear_profile, gear_profile_slope);
        let expected = 0.8 / 1.64f64.sqrt();
        let a = inner_product_eta_v(&h, PI / 8.0).unwrap();
        assert!((a - expected).abs() < 1e-14);
        assert!((a - 0.6247).abs() < 1e-4);
        let b = inner_product_eta_v(&h, 3.0 * PI / 8.0).unwrap();
        assert!((b + expected).abs() < 1e-14);
    }

    #[test]
    fn normal_values() {
        let circle = RadialFn(|_: f64| 1.0, |_: f64| 0.0);
        let e = outward_normal(&circle, 0.0).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-15 && e[1].abs() < 1e-15);
        let e = outward_normal(&circle, PI / 2.0).unwrap();
        assert!(e[0].abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);

        let h = RadialFn(gear_profile, gear_profile_slope);
        let phi = PI / 8.0;
        let e = outward_normal(&h, phi).unwrap();
        let (r, dr): (f64, f64) = (1.0, -0.8);
        let norm = (r * r + dr * dr).sqrt();
        let expected = [(r * phi.cos() + dr * phi.sin()) / norm, (r * phi.sin() - dr * phi.cos()) / norm];
        assert!((e[0] - expected[0]).abs() < 1e-14 && (e[1] - expected[1]).abs() < 1e-14);
        assert!((e[0].hypot(e[1]) - 1.0).abs() < 1e-12);
        // Normal is orthogonal to the tangent (h' + i h) e^{i phi}.
        let tangent = [dr * phi.cos() - r * phi.sin(), dr * phi.sin() + r * phi.cos()];
        assert!((e[0] * tangent[0] + e[1] * tangent[1]).abs() < 1e-14);
    }

    #[test]
    fn polygon_vertex_has_no_normal() {
        let sq = ObstacleSpec::polygon(4, 0.5);
        let v = sq.outer_vertex_angles()[1];
        assert!(matches!(inner_product_eta_v(&sq, v), Err(Error::UndefinedPoint { .. })));
        assert!(outward_normal(&sq, v).is_err());
        assert!(inner_product_eta_v(&sq, v + 0.1).is_ok());
    }

    #[test]
    fn classification() {
        let base = DomainSpec::new(ObstacleSpec::gear(4, 0.35, 0.2), DiskSpec::new(0.2, 1.0));
        assert_eq!(classify_configuration(&base), Configuration::Off);
        assert_eq!(classify_configuration(&base.at_phase(PI / 4.0)), Configuration::On);
        match classify_configuration(&base.at_phase(PI / 8.0)) {
            Configuration::Intermediate(t) => assert!((t - PI / 8.0).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        assert_eq!(classify_configuration(&base.at_phase(PI / 2.0)), Configuration::Off);
        let circle = DomainSpec::new(ObstacleSpec::circle(0.3), DiskSpec::new(0.2, 1.0));
        assert_eq!(classify_configuration(&circle), Configuration::Circular);
    }

    #[test]
    fn incircle_circumcircle_values() {
        assert_eq!(incircle_circumcircle(&ObstacleSpec::gear(4, 0.5, 0.2)), (0.4, 0.6));
        assert_eq!(incircle_circumcircle(&ObstacleSpec::gear(4, 0.5, 0.0)), (0.5, 0.5));
        let (a, b) = incircle_circumcircle(&ObstacleSpec::polygon(4, 0.5));
        assert!((a - 0.5 / 2f64.sqrt()).abs() < 1e-15 && b == 0.5);
        let rotated = ObstacleSpec::gear(4, 0.5, 0.2).with_phase(0.3);
        assert_eq!(incircle_circumcircle(&rotated), (0.4, 0.6));
    }

    #[test]
    fn free_rotation_condition() {
        let ok = DomainSpec::new(ObstacleSpec::gear(4, 0.35, 0.2), DiskSpec::new(0.2, 1.0));
        assert!(ok.validate().is_ok());
        let tight = DomainSpec::new(ObstacleSpec::gear(4, 0.6, 0.4), DiskSpec::new(0.2, 1.0));
        assert!(matches!(tight.validate(), Err(Error::InvalidDomain(_))));
        let bad_disk = DomainSpec::new(ObstacleSpec::gear(4, 0.1, 0.0), DiskSpec::new(1.0, 1.0));
        assert!(bad_disk.validate().is_err());
    }

    #[test]
    fn areas() {
        let sq = ObstacleSpec::polygon(4, 1.0);
        assert!((sq.area() - 2.0).abs() < 1e-6);
        let circle = ObstacleSpec::circle(0.3);
        assert!((circle.area() - PI * 0.09).abs() < 1e-12);
        let gear = ObstacleSpec::gear(4, 0.35, 0.2);
        let exact = PI * 0.35 * 0.35 * (1.0 + 0.02);
        assert!((gear.area() - exact).abs() < 1e-12);
    }

    #[test]
    fn containment_diagnostic() {
        let d = DomainSpec::new(ObstacleSpec::gear(4, 0.35, 0.2), DiskSpec::new(0.2, 1.0));
        let rep = sector_containment_diagnostic(&d, PI / 8.0, 200).unwrap();
        assert_eq!(rep.violations, 0);
        assert_eq!(rep.equalities, 0);
        assert!(rep.checked > 0 && rep.min_margin > 0.0);

        let d = DomainSpec::new(ObstacleSpec::gear(6, 0.3, 0.15), DiskSpec::new(0.15, 1.0));
        let rep = sector_containment_diagnostic(&d, PI / 12.0, 200).unwrap();
        assert_eq!(rep.violations, 0);

        let d = DomainSpec::new(ObstacleSpec::gear(4, 0.35, 0.2), DiskSpec::new(0.0, 1.0));
        let rep = sector_containment_diagnostic(&d, PI / 8.0, 50).unwrap();
        assert_eq!(rep.violations, 0);
        assert_eq!(rep.equalities, rep.checked);

        let odd = DomainSpec::new(ObstacleSpec::gear(5, 0.3, 0.1), DiskSpec::new(0.2, 1.0));
        assert!(sector_containment_diagnostic(&odd, 0.1, 10).is_err());
    }

    #[test]
    fn sector_indexing() {
        let spec = ObstacleSpec::gear(4, 0.3, 0.1).with_phase(0.1);
        assert_eq!(spec.sector_of(0.1 + 1e-9), 0);
        assert_eq!(spec.sector_of(0.1 - 1e-9), 7);
        assert_eq!(spec.sector_of(0.1 + PI / 4.0 + 1e-9), 1);
        assert_eq!(spec.sector_boundaries().len(), 8);
    }
}
