//! Figures on the two bundled datasets, checked against values computed with
//! an independent statistics stack.

use std::path::PathBuf;

use approx::assert_abs_diff_eq;
use stepwise_core::data::{
    derive_column, drop_rows_where, load_csv, Comparator, CsvOptions, Dataset, Expr, Literal,
    Predicate,
};
use stepwise_core::stats::{
    iqr_outliers, levene_test, ols_fit, two_sample_ttest, vif_with, Alternative, LeveneCenter,
    VifOptions,
};

fn load(name: &str) -> Dataset {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name);
    let file = std::fs::File::open(&path).unwrap();
    load_csv(file, &CsvOptions::default()).unwrap()
}

fn housing_prepared() -> Dataset {
    let d = load("housing.csv");
    let d = drop_rows_where(
        &d,
        &Predicate {
            column: "median_house_value".into(),
            comparator: Comparator::Eq,
            literal: Literal::Number(500001.0),
        },
    )
    .unwrap();
    let d = derive_column(
        &d,
        "avg_rooms",
        &"total_rooms / population".parse::<Expr>().unwrap(),
    )
    .unwrap();
    derive_column(
        &d,
        "avg_bedrooms",
        &"total_bedrooms / population".parse::<Expr>().unwrap(),
    )
    .unwrap()
}

fn columns(d: &Dataset, names: &[&str]) -> Vec<Vec<f64>> {
    let (rows, dropped) = d.complete_rows(names).unwrap();
    assert_eq!(dropped, 0);
    (0..names.len())
        .map(|j| rows.iter().map(|r| r[j]).collect())
        .collect()
}

#[test]
fn housing_value_outliers() {
    let d = load("housing.csv");
    assert_eq!(d.row_count(), 20640);
    let r = iqr_outliers(
        d.column("median_house_value")
            .unwrap()
            .as_numeric()
            .unwrap(),
    )
    .unwrap();
    assert_eq!(r.outlier_count, 1071);
}

#[test]
fn housing_censored_rows_removed() {
    assert_eq!(housing_prepared().row_count(), 19675);
}

#[test]
fn housing_vif_without_intercept() {
    let d = housing_prepared();
    let names = [
        "median_income",
        "avg_rooms",
        "avg_bedrooms",
        "housing_median_age",
    ];
    let cols = columns(&d, &names);
    let named: Vec<(&str, &[f64])> = names
        .iter()
        .zip(&cols)
        .map(|(n, c)| (*n, c.as_slice()))
        .collect();
    let v = vif_with(&named, VifOptions { intercept: false }).unwrap();
    assert_abs_diff_eq!(v[0].vif.as_f64(), 6.071271, epsilon = 1e-5);
    assert_abs_diff_eq!(v[1].vif.as_f64(), 38.133839, epsilon = 1e-5);
    assert_abs_diff_eq!(v[2].vif.as_f64(), 30.548463, epsilon = 1e-5);
    assert_abs_diff_eq!(v[3].vif.as_f64(), 3.788435, epsilon = 1e-5);
    let centered = vif_with(&named, VifOptions { intercept: true }).unwrap();
    assert_abs_diff_eq!(centered[0].vif.as_f64(), 1.789598, epsilon = 1e-5);
    assert_abs_diff_eq!(centered[1].vif.as_f64(), 10.072512, epsilon = 1e-5);
    assert_abs_diff_eq!(centered[2].vif.as_f64(), 9.611907, epsilon = 1e-5);
}

#[test]
fn housing_models() {
    let d = housing_prepared();
    let first = [
        "median_income",
        "avg_rooms",
        "avg_bedrooms",
        "housing_median_age",
    ];
    let final_ivs = [
        "median_income",
        "avg_rooms",
        "housing_median_age",
        "households",
    ];
    let y = columns(&d, &["median_house_value"]).remove(0);
    for (names, r2) in [(&first, 0.49545), (&final_ivs, 0.4718)] {
        let cols = columns(&d, names);
        let named: Vec<(&str, &[f64])> = names
            .iter()
            .zip(&cols)
            .map(|(n, c)| (*n, c.as_slice()))
            .collect();
        let m = ols_fit(&named, ("median_house_value", &y), true).unwrap();
        assert_abs_diff_eq!(m.r_squared, r2, epsilon = 1e-4);
    }
    let cols = columns(&d, &first);
    let named: Vec<(&str, &[f64])> = first
        .iter()
        .zip(&cols)
        .map(|(n, c)| (*n, c.as_slice()))
        .collect();
    let m = ols_fit(&named, ("median_house_value", &y), true).unwrap();
    assert_abs_diff_eq!(
        m.coefficient("median_income").unwrap(),
        52605.39,
        epsilon = 0.05
    );
    assert_abs_diff_eq!(
        m.coefficient("avg_rooms").unwrap(),
        -50757.81,
        epsilon = 0.05
    );
    assert_abs_diff_eq!(
        m.coefficient("avg_bedrooms").unwrap(),
        261329.59,
        epsilon = 0.05
    );
    assert_abs_diff_eq!(
        m.coefficient("(intercept)").unwrap(),
        -51606.86,
        epsilon = 0.05
    );
}

fn mpg_groups() -> (Vec<f64>, Vec<f64>) {
    let d = load("auto-mpg.csv");
    let mpg = d.column("mpg").unwrap().as_numeric().unwrap();
    let origin = d.column("origin").unwrap();
    let pick = |g: &str| -> Vec<f64> {
        (0..d.row_count())
            .filter(|&r| origin.cell_text(r).as_deref() == Some(g))
            .filter_map(|r| mpg[r])
            .collect()
    };
    (pick("usa"), pick("europe"))
}

#[test]
fn auto_mpg_outliers_and_tests() {
    let d = load("auto-mpg.csv");
    assert_eq!(d.row_count(), 398);
    let r = iqr_outliers(d.column("mpg").unwrap().as_numeric().unwrap()).unwrap();
    assert_eq!(r.outlier_count, 1);

    let (us, eu) = mpg_groups();
    assert_eq!((us.len(), eu.len()), (249, 70));
    let lev = levene_test(&us, &eu, LeveneCenter::Median).unwrap();
    assert_abs_diff_eq!(lev.w, 0.016022, epsilon = 1e-6);
    assert_abs_diff_eq!(lev.p, 0.89935, epsilon = 1e-5);
    let lev_mean = levene_test(&us, &eu, LeveneCenter::Mean).unwrap();
    assert_abs_diff_eq!(lev_mean.p, 0.9856, epsilon = 1e-4);

    let t = two_sample_ttest(&us, &eu, true, Alternative::TwoSided, 0.05).unwrap();
    assert_abs_diff_eq!(t.t, -8.914687, epsilon = 1e-6);
    assert_eq!(t.df, 317.0);
    assert!(t.p < 1e-10);
    assert!((t.p / 3.945e-17 - 1.0).abs() < 1e-3);
}
