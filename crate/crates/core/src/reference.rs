//! Closed-form reference values for radially symmetric domains.

use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Bessel function `J0` by its power series (accurate for moderate `x`).
pub fn bessel_j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / (k * k) as f64;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Bessel function `Y0` by its power series, `x > 0`.
pub fn bessel_y0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut series = 0.0;
    for k in 1..200 {
        term *= q / (k * k) as f64;
        harmonic += 1.0 / k as f64;
        let add = -term * harmonic;
        series += add;
        if add.abs() < 1e-17 * series.abs() && k > 2 {
            break;
        }
    }
    2.0 / PI * (((0.5 * x).ln() + EULER_GAMMA) * bessel_j0(x) + series)
}

/// Root of `f` in `[lo, hi]` by bisection; `f(lo)` and `f(hi)` must differ in sign.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "root is not bracketed");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// First positive root of `f`, scanning upward from `start` in steps of `step`.
fn first_root(f: impl Fn(f64) -> f64, start: f64, step: f64) -> f64 {
    let mut a = start;
    let mut fa = f(a);
    loop {
        let b = a + step;
        let fb = f(b);
        if fa * fb <= 0.0 {
            return bisect(&f, a, b, 1e-12);
        }
        a = b;
        fa = fb;
    }
}

/// First zero of `J0`.
pub fn j0_first_zero() -> f64 {
    bisect(bessel_j0, 2.0, 3.0, 1e-13)
}

/// Principal Dirichlet eigenvalue of a disk of radius `r`.
pub fn disk_lambda1(r: f64) -> f64 {
    let j = j0_first_zero();
    j * j / (r * r)
}

/// Principal Dirichlet eigenvalue of the annulus `a < |x| < b`: `k^2` with
/// `k` the first root of `J0(ka) Y0(kb) - Y0(ka) J0(kb)`.
pub fn annulus_lambda1(a: f64, b: f64) -> f64 {
    let f = |k: f64| bessel_j0(k * a) * bessel_y0(k * b) - bessel_y0(k * a) * bessel_j0(k * b);
    let k = first_root(f, 0.5 * PI / (b - a), 0.01 / (b - a));
    k * k
}

/// Torsion function of the disk of radius `r` at distance `s` from its centre.
pub fn disk_torsion(r: f64, s: f64) -> f64 {
    0.25 * (r * r - s * s)
}

/// Dirichlet energy of the disk torsion function.
pub fn disk_torsion_energy(r: f64) -> f64 {
    PI * r.powi(4) / 8.0
}

/// Torsion function of the annulus `a < s < b`.
pub fn annulus_torsion(a: f64, b: f64, s: f64) -> f64 {
    0.25 * (b * b - s * s) + 0.25 * (b * b - a * a) * (s / b).ln() / (b / a).ln()
}

/// Dirichlet energy (equal to the integral) of the annulus torsion function.
pub fn annulus_torsion_energy(a: f64, b: f64) -> f64 {
    let l = (a / b).ln();
    let d = b * b - a * a;
    let c = -0.25 * d / l;
    2.0 * PI * (d * d / 16.0 + c * (-0.25 * d - 0.5 * a * a * l))
}
