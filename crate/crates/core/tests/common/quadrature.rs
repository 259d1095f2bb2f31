//! Independent reference values for the special functions: densities are
//! integrated numerically with adaptive Simpson, and log-gamma comes from a
//! shifted Stirling series rather than the Lanczos form used by the library.
#![allow(dead_code)]

use std::f64::consts::PI;

pub fn ln_gamma_stirling(x: f64) -> f64 {
    let mut shift = 0.0;
    let mut z = x;
    while z < 15.0 {
        shift += z.ln();
        z += 1.0;
    }
    let z2 = z * z;
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2)
        - 1.0 / (1680.0 * z * z2 * z2 * z2);
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - shift
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adapt(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + adapt(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Adaptive Simpson integral of `f` over `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adapt(f, a, b, fa, fm, fb, whole, tol, 60)
}

pub fn t_density(t: f64, df: f64) -> f64 {
    let ln_c =
        ln_gamma_stirling(0.5 * (df + 1.0)) - ln_gamma_stirling(0.5 * df) - 0.5 * (df * PI).ln();
    (ln_c - 0.5 * (df + 1.0) * (1.0 + t * t / df).ln()).exp()
}

/// `P(T ≤ t)` by integrating the density from 0 and using symmetry.
pub fn t_cdf_oracle(t: f64, df: f64) -> f64 {
    let half = integrate(&|s| t_density(s, df), 0.0, t.abs(), 1e-14);
    if t >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// `P(F ≤ x)`. Integrated in `u = sqrt(x)` so the `x^(d1/2 - 1)` singularity
/// at zero (d1 = 1) disappears.
pub fn f_cdf_oracle(x: f64, d1: f64, d2: f64) -> f64 {
    let ln_b = ln_gamma_stirling(0.5 * d1) + ln_gamma_stirling(0.5 * d2)
        - ln_gamma_stirling(0.5 * (d1 + d2));
    let ln_c = 0.5 * d1 * (d1 / d2).ln() - ln_b;
    let integrand = |u: f64| {
        if u == 0.0 {
            return if d1 == 1.0 { 2.0 * ln_c.exp() } else { 0.0 };
        }
        let v = u * u;
        let ln_pdf = ln_c + (0.5 * d1 - 1.0) * v.ln() - 0.5 * (d1 + d2) * (1.0 + d1 * v / d2).ln();
        2.0 * u * ln_pdf.exp()
    };
    integrate(&integrand, 0.0, x.sqrt(), 1e-14)
}

/// `I_x(a, b)` by direct integration of the beta density (requires a, b ≥ 1
/// for a bounded integrand).
pub fn beta_oracle(x: f64, a: f64, b: f64) -> f64 {
    let ln_b = ln_gamma_stirling(a) + ln_gamma_stirling(b) - ln_gamma_stirling(a + b);
    integrate(
        &|s: f64| {
            if s <= 0.0 || s >= 1.0 {
                0.0
            } else {
                ((a - 1.0) * s.ln() + (b - 1.0) * (1.0 - s).ln() - ln_b).exp()
            }
        },
        0.0,
        x,
        1e-15,
    )
}

/// The 50-point evaluation grid: ten abscissae for each df.
pub const DFS: [f64; 5] = [1.0, 2.0, 8.0, 30.0, 300.0];

pub fn t_grid() -> Vec<(f64, f64)> {
    let xs = [-12.0, -4.0, -2.5, -1.0, -0.3, 0.2, 0.9, 1.96, 3.5, 9.0];
    DFS.iter()
        .flat_map(|&df| xs.iter().map(move |&x| (x, df)))
        .collect()
}

pub fn f_grid() -> Vec<(f64, f64, f64)> {
    let xs = [0.01, 0.1, 0.4, 0.8, 1.0, 1.5, 2.5, 4.0, 7.0, 15.0];
    // Pair each df with a partner so both numerator and denominator vary.
    let partners = [8.0, 30.0, 1.0, 300.0, 2.0];
    DFS.iter()
        .zip(partners)
        .flat_map(|(&d1, d2)| xs.iter().map(move |&x| (x, d1, d2)))
        .collect()
}
