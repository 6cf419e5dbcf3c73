//! Independent oracles for the integration tests. Nothing here calls into
//! the library's own reference values.

#![allow(dead_code)]

use std::f64::consts::PI;

/// `J0(x) = 1/pi int_0^pi cos(x sin s) ds`; the trapezoid rule is spectrally
/// accurate for this periodic integrand.
pub fn j0(x: f64) -> f64 {
    let m = 400;
    let h = PI / m as f64;
    let mut sum = 0.5 * (1.0 + (x * PI.sin()).cos());
    for i in 1..m {
        sum += (x * (i as f64 * h).sin()).cos();
    }
    sum * h / PI
}

pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa0 = f(a);
    assert!(fa0 * f(b) < 0.0);
    let mut fa = fa0;
    while b - a > 1e-13 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// First Dirichlet eigenvalue of the disk of radius `r`.
pub fn disk_eigenvalue(r: f64) -> f64 {
    let z = bisect(j0, 2.0, 3.0);
    z * z / (r * r)
}

/// `u(b)` for `u'' + u'/r + k^2 u = 0`, `u(a) = 0`, `u'(a) = 1`, by RK4.
fn shoot(k: f64, a: f64, b: f64) -> f64 {
    let steps = 4000;
    let h = (b - a) / steps as f64;
    let f = |r: f64, y: [f64; 2]| [y[1], -y[1] / r - k * k * y[0]];
    let mut y = [0.0, 1.0];
    let mut r = a;
    for _ in 0..steps {
        let k1 = f(r, y);
        let k2 = f(r + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = f(r + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = f(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        r += h;
    }
    y[0]
}

/// First Dirichlet eigenvalue of the annulus `a < |x| < b` by shooting on
/// the radial equation.
pub fn annulus_eigenvalue(a: f64, b: f64) -> f64 {
    // The first eigenfunction has no interior zero: scan until u(b) changes sign.
    let mut k = 0.5 / (b - a);
    let step = 0.01 / (b - a);
    while shoot(k, a, b) * shoot(k + step, a, b) > 0.0 {
        k += step;
    }
    let k = bisect(|k| shoot(k, a, b), k, k + step);
    k * k
}

/// Torsion energy of the annulus, `2 pi int_a^b u(s) s ds` by Simpson, with
/// the radial solution `u = -s^2/4 + c ln s + d`, `u(a) = u(b) = 0`.
pub fn annulus_torsion_energy(a: f64, b: f64) -> f64 {
    let c = (b * b - a * a) / (4.0 * (b / a).ln());
    let d = b * b / 4.0 - c * b.ln();
    let u = |s: f64| -s * s / 4.0 + c * s.ln() + d;
    let m = 4000;
    let h = (b - a) / m as f64;
    (0..m)
        .map(|i| {
            let s = a + i as f64 * h;
            let f = |x: f64| 2.0 * PI * x * u(x);
            h / 6.0 * (f(s) + 4.0 * f(s + 0.5 * h) + f(s + h))
        })
        .sum()
}
