//! Randomized invariants of the statistics kernel. Each check runs a given
//! number of generated cases and reports the first failure as text, so the
//! same checks serve the test suite and the acceptance runner.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::test_runner::{TestCaseError, TestRunner};
use stepwise_core::stats::{
    f_cdf, iqr_outliers_dense, levene_test, ols_fit, t_cdf, two_sample_ttest, vif, Alternative,
    LeveneCenter,
};

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    };
    TestRunner::new(config)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

/// Design columns (predictors only) plus a response, n rows.
fn system(max_n: usize, max_p: usize) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
    (1..=max_p).prop_flat_map(move |p| {
        (p + 2..=max_n).prop_flat_map(move |n| {
            (
                prop::collection::vec(prop::collection::vec(-20i32..=20, n), p),
                prop::collection::vec(-50i32..=50, n),
            )
                .prop_map(|(xs, y)| {
                    (
                        xs.into_iter()
                            .map(|c| c.into_iter().map(|v| v as f64 / 4.0).collect())
                            .collect(),
                        y.into_iter().map(|v| v as f64 / 8.0).collect(),
                    )
                })
        })
    })
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

/// Solves `XᵀX b = Xᵀy` exactly; `None` if singular.
#[allow(clippy::needless_range_loop)] // Gauss–Jordan reads clearer with indices
fn normal_equations(cols: &[Vec<f64>], y: &[f64]) -> Option<Vec<BigRational>> {
    let p = cols.len();
    let xr: Vec<Vec<BigRational>> = cols
        .iter()
        .map(|c| c.iter().map(|&v| rat(v)).collect())
        .collect();
    let yr: Vec<BigRational> = y.iter().map(|&v| rat(v)).collect();
    let dot = |a: &[BigRational], b: &[BigRational]| {
        a.iter()
            .zip(b)
            .fold(BigRational::zero(), |s, (x, y)| s + x * y)
    };
    let mut m: Vec<Vec<BigRational>> = (0..p)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..p).map(|j| dot(&xr[i], &xr[j])).collect();
            row.push(dot(&xr[i], &yr));
            row
        })
        .collect();
    for c in 0..p {
        let pivot = (c..p).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, pivot);
        let inv = BigRational::one() / &m[c][c];
        for k in c..=p {
            m[c][k] = &m[c][k] * &inv;
        }
        for r in 0..p {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in c..=p {
                    let sub = &f * &m[c][k];
                    m[r][k] = &m[r][k] - sub;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[p].clone()).collect())
}

/// Hadamard ratio det(G) / prod(G_ii) of the Gram matrix, computed in f64;
/// small values mean the columns are nearly dependent.
#[allow(clippy::needless_range_loop)]
fn hadamard_ratio(cols: &[Vec<f64>]) -> f64 {
    let p = cols.len();
    let mut g: Vec<Vec<f64>> = (0..p)
        .map(|i| {
            (0..p)
                .map(|j| cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    let diag: f64 = (0..p).map(|i| g[i][i]).product();
    if diag == 0.0 {
        return 0.0;
    }
    let mut det = 1.0;
    for c in 0..p {
        let piv = (c..p)
            .max_by(|&a, &b| g[a][c].abs().total_cmp(&g[b][c].abs()))
            .unwrap();
        if g[piv][c] == 0.0 {
            return 0.0;
        }
        g.swap(c, piv);
        if piv != c {
            det = -det;
        }
        det *= g[c][c];
        for r in c + 1..p {
            let f = g[r][c] / g[c][c];
            for k in c..p {
                g[r][k] -= f * g[c][k];
            }
        }
    }
    det.abs() / diag
}

fn named(cols: &[Vec<f64>]) -> (Vec<String>, Vec<&[f64]>) {
    (
        (0..cols.len()).map(|i| format!("x{i}")).collect(),
        cols.iter().map(Vec::as_slice).collect(),
    )
}

pub fn ols_matches_exact_normal_equations(cases: u32) -> Result<(), String> {
    let strategy = system(12, 3);
    run(cases, strategy, |(xs, y)| {
        let n = y.len();
        let mut design = vec![vec![1.0; n]];
        design.extend(xs.iter().cloned());
        prop_assume!(hadamard_ratio(&design) > 1e-6);
        let exact = normal_equations(&design, &y);
        prop_assume!(exact.is_some());
        let exact = exact.unwrap();
        let (names, cols) = named(&xs);
        let predictors: Vec<(&str, &[f64])> = names.iter().map(String::as_str).zip(cols).collect();
        let m = ols_fit(&predictors, ("y", &y), true).unwrap();
        for (term, want) in m.terms.iter().zip(&exact) {
            let want_f = want.to_f64().unwrap();
            let err = (term.coefficient - want_f).abs();
            prop_assert!(
                err <= 1e-9 * want_f.abs().max(1.0),
                "{}: {} vs {}",
                term.name,
                term.coefficient,
                want
            );
        }
        Ok(())
    })
}

pub fn ols_residuals_are_centered_and_orthogonal(cases: u32) -> Result<(), String> {
    let strategy = system(40, 3);
    run(cases, strategy, |(xs, y)| {
        let n = y.len();
        let mut design = vec![vec![1.0; n]];
        design.extend(xs.iter().cloned());
        prop_assume!(hadamard_ratio(&design) > 1e-6);
        let (names, cols) = named(&xs);
        let predictors: Vec<(&str, &[f64])> =
            names.iter().map(String::as_str).zip(cols.clone()).collect();
        let m = ols_fit(&predictors, ("y", &y), true).unwrap();
        let fitted = m.predict(&cols).unwrap();
        let resid: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
        let tol = 1e-8 * n as f64;
        prop_assert!(resid.iter().sum::<f64>().abs() <= tol);
        for c in &xs {
            let d: f64 = resid.iter().zip(c).map(|(r, x)| r * x).sum();
            prop_assert!(d.abs() <= tol, "residual·x = {}", d);
        }
        prop_assert!((0.0..=1.0 + 1e-12).contains(&m.r_squared));
        prop_assert_eq!(m.df_resid, n - m.terms.len());
        prop_assert!(m.terms.iter().all(|t| (0.0..=1.0).contains(&t.p_value)));
        Ok(())
    })
}

pub fn finite_vifs_are_at_least_one(cases: u32) -> Result<(), String> {
    let strategy = system(30, 4);
    run(cases, strategy, |(xs, _y)| {
        prop_assume!(xs.len() >= 2);
        let (names, cols) = named(&xs);
        let predictors: Vec<(&str, &[f64])> = names.iter().map(String::as_str).zip(cols).collect();
        for e in vif(&predictors).unwrap() {
            let v = e.vif.as_f64();
            prop_assert!(
                v.is_infinite() || v >= 1.0 - 1e-12,
                "{} = {}",
                e.variable,
                v
            );
        }
        Ok(())
    })
}

pub fn centered_orthogonal_predictors_have_unit_vif(cases: u32) -> Result<(), String> {
    let strategy = (
        prop::collection::vec(-10.0f64..10.0, 6..30),
        prop::collection::vec(-10.0f64..10.0, 30),
    );
    run(cases, strategy, |(u, w)| {
        let n = u.len();
        let center = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| x - m).collect::<Vec<f64>>()
        };
        let a = center(&u);
        let b0 = center(&w[..n]);
        let aa: f64 = a.iter().map(|x| x * x).sum();
        prop_assume!(aa > 1e-6);
        let proj = a.iter().zip(&b0).map(|(x, y)| x * y).sum::<f64>() / aa;
        let b: Vec<f64> = b0.iter().zip(&a).map(|(y, x)| y - proj * x).collect();
        prop_assume!(b.iter().map(|x| x * x).sum::<f64>() > 1e-6);
        // Shift both so they are orthogonal only after centering.
        let a: Vec<f64> = a.iter().map(|x| x + 3.0).collect();
        let b: Vec<f64> = b.iter().map(|x| x - 7.0).collect();
        for e in vif(&[("a", &a), ("b", &b)]).unwrap() {
            prop_assert!((e.vif.as_f64() - 1.0).abs() < 1e-9);
        }
        Ok(())
    })
}

pub fn ttest_is_antisymmetric(cases: u32) -> Result<(), String> {
    let strategy = (
        prop::collection::vec(-100.0f64..100.0, 2..40),
        prop::collection::vec(-100.0f64..100.0, 2..40),
        any::<bool>(),
    );
    run(cases, strategy, |(a, b, equal)| {
        let ab = two_sample_ttest(&a, &b, equal, Alternative::TwoSided, 0.05);
        let ba = two_sample_ttest(&b, &a, equal, Alternative::TwoSided, 0.05);
        match (ab, ba) {
            (Ok(ab), Ok(ba)) => {
                prop_assert!((ab.t + ba.t).abs() <= 1e-10 * ab.t.abs().max(1.0));
                prop_assert!((ab.p - ba.p).abs() <= 1e-12);
                prop_assert!((0.0..=1.0).contains(&ab.p));
                prop_assert!(ab.ci_low <= ab.ci_high);
                prop_assert_eq!(ab.reject_null, ab.p < 0.05);
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "asymmetric failure"),
        }
        Ok(())
    })
}

pub fn ttest_is_scale_invariant(cases: u32) -> Result<(), String> {
    let strategy = (
        prop::collection::vec(-100.0f64..100.0, 2..40),
        prop::collection::vec(-100.0f64..100.0, 2..40),
        0.01f64..1000.0,
        any::<bool>(),
    );
    run(cases, strategy, |(a, b, c, equal)| {
        let base = two_sample_ttest(&a, &b, equal, Alternative::TwoSided, 0.05).unwrap();
        let sa: Vec<f64> = a.iter().map(|v| v * c).collect();
        let sb: Vec<f64> = b.iter().map(|v| v * c).collect();
        let scaled = two_sample_ttest(&sa, &sb, equal, Alternative::TwoSided, 0.05).unwrap();
        prop_assert!((base.t - scaled.t).abs() <= 1e-10 * base.t.abs().max(1.0));
        prop_assert!((base.df - scaled.df).abs() <= 1e-10 * base.df);
        prop_assert!((base.p - scaled.p).abs() <= 1e-10);
        Ok(())
    })
}

pub fn levene_is_location_invariant(cases: u32) -> Result<(), String> {
    let strategy = (
        prop::collection::vec(-100.0f64..100.0, 2..40),
        prop::collection::vec(-100.0f64..100.0, 2..40),
        -1000.0f64..1000.0,
        any::<bool>(),
    );
    run(cases, strategy, |(a, b, shift, median)| {
        let center = if median {
            LeveneCenter::Median
        } else {
            LeveneCenter::Mean
        };
        let base = levene_test(&a, &b, center).unwrap();
        let moved: Vec<f64> = b.iter().map(|v| v + shift).collect();
        let shifted = levene_test(&a, &moved, center).unwrap();
        prop_assert!(
            base.w == shifted.w || (base.w - shifted.w).abs() <= 1e-10 * base.w.abs().max(1.0),
            "{} vs {}",
            base.w,
            shifted.w
        );
        prop_assert_eq!((base.df1, base.df2), (1, a.len() + b.len() - 2));
        prop_assert!((0.0..=1.0).contains(&base.p));
        Ok(())
    })
}

pub fn outlier_set_is_affine_invariant(cases: u32) -> Result<(), String> {
    let strategy = (
        prop::collection::vec(-1000i32..1000, 4..80),
        prop::collection::vec((0usize..80, -100_000i32..100_000), 0..5),
        -4i32..6,
        -10_000i32..10_000,
    );
    run(cases, strategy, |(v, spikes, log_scale, offset)| {
        // Integer data with power-of-two scales keeps every step exact.
        let mut x: Vec<f64> = v.iter().map(|&i| f64::from(i)).collect();
        for (i, s) in spikes {
            let n = x.len();
            x[i % n] = f64::from(s);
        }
        let alpha = 2f64.powi(log_scale);
        let y: Vec<f64> = x.iter().map(|v| alpha * v + f64::from(offset)).collect();
        let rx = iqr_outliers_dense(&x).unwrap();
        let ry = iqr_outliers_dense(&y).unwrap();
        prop_assert_eq!(&rx.outlier_row_indices, &ry.outlier_row_indices);
        prop_assert_eq!(rx.outlier_count, rx.outlier_row_indices.len());
        prop_assert_eq!(rx.lower_fence, rx.q1 - 1.5 * rx.iqr);
        for &i in &rx.outlier_row_indices {
            prop_assert!(x[i] < rx.lower_fence || x[i] > rx.upper_fence);
        }
        Ok(())
    })
}

pub fn cdfs_are_monotone_and_bounded(cases: u32) -> Result<(), String> {
    let strategy = (
        prop::collection::vec(-50.0f64..50.0, 2..30),
        0.5f64..500.0,
        0.5f64..500.0,
    );
    run(cases, strategy, |(mut xs, df, d2)| {
        xs.sort_by(f64::total_cmp);
        let t: Vec<f64> = xs.iter().map(|&x| t_cdf(x, df).unwrap()).collect();
        let f: Vec<f64> = xs
            .iter()
            .map(|&x| f_cdf(x.abs(), df, d2).unwrap())
            .collect();
        prop_assert!(t.iter().all(|p| (0.0..=1.0).contains(p)));
        prop_assert!(f.iter().all(|p| (0.0..=1.0).contains(p)));
        prop_assert!(t.windows(2).all(|w| w[0] <= w[1]));
        let mut abs: Vec<f64> = xs.iter().map(|x| x.abs()).collect();
        abs.sort_by(f64::total_cmp);
        let f_sorted: Vec<f64> = abs.iter().map(|&x| f_cdf(x, df, d2).unwrap()).collect();
        prop_assert!(f_sorted.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(f.len(), xs.len());
        Ok(())
    })
}

pub type Check = fn(u32) -> Result<(), String>;

pub const ALL: &[(&str, Check)] = &[
    (
        "ols_matches_exact_normal_equations",
        ols_matches_exact_normal_equations,
    ),
    (
        "ols_residuals_are_centered_and_orthogonal",
        ols_residuals_are_centered_and_orthogonal,
    ),
    ("finite_vifs_are_at_least_one", finite_vifs_are_at_least_one),
    (
        "centered_orthogonal_predictors_have_unit_vif",
        centered_orthogonal_predictors_have_unit_vif,
    ),
    ("ttest_is_antisymmetric", ttest_is_antisymmetric),
    ("ttest_is_scale_invariant", ttest_is_scale_invariant),
    ("levene_is_location_invariant", levene_is_location_invariant),
    (
        "outlier_set_is_affine_invariant",
        outlier_set_is_affine_invariant,
    ),
    (
        "cdfs_are_monotone_and_bounded",
        cdfs_are_monotone_and_bounded,
    ),
];
