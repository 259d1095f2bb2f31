//! Special functions behind the p-values: log-gamma, the regularized
//! incomplete beta function, and the Student-t and F distributions built on it.

use std::f64::consts::PI;

use super::StatsError;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const CF_EPS: f64 = 1e-16;
const CF_TINY: f64 = 1e-300;
const CF_MAX_ITER: usize = 20_000;

/// Natural log of the gamma function for `x > 0` (Lanczos approximation).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection formula.
        (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS_COEF[0];
        for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
    }
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// `(I_x(a, b), 1 - I_x(a, b))`, with `y = 1 - x` passed separately so the
/// complement keeps full precision when `x` is close to 1.
fn beta_pair(x: f64, y: f64, a: f64, b: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if y <= 0.0 {
        return (1.0, 0.0);
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * y.ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        let v = (front * beta_continued_fraction(x, a, b) / a).clamp(0.0, 1.0);
        (v, 1.0 - v)
    } else {
        // Symmetry: I_x(a, b) = 1 - I_{1-x}(b, a).
        let w = (front * beta_continued_fraction(y, b, a) / b).clamp(0.0, 1.0);
        (1.0 - w, w)
    }
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn reg_incomplete_beta(x: f64, a: f64, b: f64) -> Result<f64, StatsError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(StatsError::Domain(format!("x = {x} outside [0, 1]")));
    }
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(StatsError::Domain(format!(
            "shape parameters must be positive, got a = {a}, b = {b}"
        )));
    }
    Ok(beta_pair(x, 1.0 - x, a, b).0)
}

fn check_df(df: f64) -> Result<(), StatsError> {
    if df > 0.0 && !df.is_nan() {
        Ok(())
    } else {
        Err(StatsError::Domain(format!(
            "degrees of freedom must be positive, got {df}"
        )))
    }
}

/// Lower-tail probability in one direction: `P(T > |t|)`.
fn t_upper_tail(t: f64, df: f64) -> f64 {
    let t2 = t * t;
    if !t2.is_finite() {
        return 0.0;
    }
    let denom = df + t2;
    0.5 * beta_pair(df / denom, t2 / denom, 0.5 * df, 0.5).0
}

/// Student-t CDF.
pub fn t_cdf(t: f64, df: f64) -> Result<f64, StatsError> {
    check_df(df)?;
    if t.is_nan() {
        return Err(StatsError::Domain("t is NaN".into()));
    }
    let tail = t_upper_tail(t, df);
    Ok(if t > 0.0 { 1.0 - tail } else { tail })
}

/// Student-t survival function `1 - t_cdf(t, df)`, computed without cancellation.
pub fn t_sf(t: f64, df: f64) -> Result<f64, StatsError> {
    t_cdf(-t, df)
}

/// Student-t density.
pub fn t_pdf(t: f64, df: f64) -> Result<f64, StatsError> {
    check_df(df)?;
    let ln_c = ln_gamma(0.5 * (df + 1.0)) - ln_gamma(0.5 * df) - 0.5 * (df * PI).ln();
    Ok((ln_c - 0.5 * (df + 1.0) * (t * t / df).ln_1p()).exp())
}

/// Inverse of [`t_cdf`]: Newton iterations safeguarded by a bisection bracket.
pub fn t_quantile(p: f64, df: f64) -> Result<f64, StatsError> {
    check_df(df)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(StatsError::Domain(format!(
            "probability {p} outside (0, 1)"
        )));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (-1.0, 1.0);
    while t_cdf(lo, df)? > p {
        lo *= 2.0;
    }
    while t_cdf(hi, df)? < p {
        hi *= 2.0;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = t_cdf(x, df)? - p;
        if f == 0.0 {
            return Ok(x);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let pdf = t_pdf(x, df)?;
        let newton = x - f / pdf;
        let next = if pdf > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-15 * x.abs().max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

fn check_f_df(d1: f64, d2: f64) -> Result<(), StatsError> {
    check_df(d1)?;
    check_df(d2)
}

/// F-distribution CDF with `(d1, d2)` degrees of freedom.
pub fn f_cdf(x: f64, d1: f64, d2: f64) -> Result<f64, StatsError> {
    Ok(f_pair(x, d1, d2)?.0)
}

/// F-distribution survival function, computed without cancellation.
pub fn f_sf(x: f64, d1: f64, d2: f64) -> Result<f64, StatsError> {
    Ok(f_pair(x, d1, d2)?.1)
}

fn f_pair(x: f64, d1: f64, d2: f64) -> Result<(f64, f64), StatsError> {
    check_f_df(d1, d2)?;
    if x.is_nan() {
        return Err(StatsError::Domain("x is NaN".into()));
    }
    if x <= 0.0 {
        return Ok((0.0, 1.0));
    }
    if x.is_infinite() {
        return Ok((1.0, 0.0));
    }
    let denom = d1 * x + d2;
    Ok(beta_pair(d1 * x / denom, d2 / denom, 0.5 * d1, 0.5 * d2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ln_gamma_known_values() {
        assert_abs_diff_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ln_gamma(2.0), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ln_gamma(0.5), PI.sqrt().ln(), epsilon = 1e-14);
        // ln(10!) = ln(3628800)
        assert_abs_diff_eq!(ln_gamma(11.0), 3_628_800f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn uniform_case_is_identity() {
        for &x in &[0.0, 0.1, 0.37, 0.5, 0.999, 1.0] {
            assert_abs_diff_eq!(
                reg_incomplete_beta(x, 1.0, 1.0).unwrap(),
                x,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn symmetric_shapes_at_half() {
        for &a in &[0.5, 1.0, 2.5, 10.0, 150.0] {
            assert_abs_diff_eq!(
                reg_incomplete_beta(0.5, a, a).unwrap(),
                0.5,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn beta_domain_errors() {
        assert!(reg_incomplete_beta(-0.1, 1.0, 1.0).is_err());
        assert!(reg_incomplete_beta(1.1, 1.0, 1.0).is_err());
        assert!(reg_incomplete_beta(0.5, 0.0, 1.0).is_err());
        assert!(reg_incomplete_beta(0.5, 1.0, -2.0).is_err());
    }

    #[test]
    fn t_cdf_closed_forms() {
        for &df in &[1.0, 2.0, 7.5, 30.0, 1000.0] {
            assert_eq!(t_cdf(0.0, df).unwrap(), 0.5);
        }
        // Cauchy: 1/2 + atan(1)/pi
        assert_abs_diff_eq!(t_cdf(1.0, 1.0).unwrap(), 0.75, epsilon = 1e-14);
        // df = 2: F(t) = 1/2 + t / (2 sqrt(2 + t^2))
        let t: f64 = -1.3;
        assert_abs_diff_eq!(
            t_cdf(t, 2.0).unwrap(),
            0.5 + t / (2.0 * (2.0 + t * t).sqrt()),
            epsilon = 1e-14
        );
        assert_eq!(t_cdf(f64::INFINITY, 3.0).unwrap(), 1.0);
        assert_eq!(t_cdf(f64::NEG_INFINITY, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn t_tail_keeps_precision() {
        // Far tail stays representable instead of rounding 1 - cdf to zero.
        let sf = t_sf(9.0, 300.0).unwrap();
        assert!(sf > 0.0 && sf < 1e-15);
    }

    #[test]
    fn t_domain_errors() {
        assert!(t_cdf(1.0, 0.0).is_err());
        assert!(t_cdf(f64::NAN, 3.0).is_err());
        assert!(t_quantile(1.0, 3.0).is_err());
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &df in &[1.0, 3.0, 8.0, 317.0] {
            for &p in &[0.001, 0.025, 0.3, 0.5, 0.9, 0.975] {
                let q = t_quantile(p, df).unwrap();
                assert_abs_diff_eq!(t_cdf(q, df).unwrap(), p, epsilon = 1e-12);
            }
        }
        // Classic table value.
        assert_abs_diff_eq!(
            t_quantile(0.975, 8.0).unwrap(),
            2.306_004_135,
            epsilon = 1e-8
        );
    }

    #[test]
    fn f_cdf_closed_form_d1_2() {
        // With d1 = 2, d2 = 2: F(x) = x / (1 + x).
        for &x in &[0.1, 1.0, 3.5] {
            assert_abs_diff_eq!(f_cdf(x, 2.0, 2.0).unwrap(), x / (1.0 + x), epsilon = 1e-14);
        }
        assert_eq!(f_cdf(0.0, 3.0, 4.0).unwrap(), 0.0);
        assert_eq!(f_sf(0.0, 3.0, 4.0).unwrap(), 1.0);
        assert!(f_cdf(1.0, 0.0, 4.0).is_err());
    }
}
