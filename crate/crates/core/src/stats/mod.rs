//! The statistics kernel. Every function here is a pure function of its
//! inputs.

mod levene;
mod linalg;
mod normality;
mod ols;
mod outliers;
pub mod special;
mod ttest;
mod vif;

use thiserror::Error;

pub use self::levene::{levene_test, LeveneCenter, LeveneResult};
pub use self::normality::{normality_check, NormalityReport, LARGE_SAMPLE_THRESHOLD};
pub use self::ols::{ols_fit, RegressionModel, Term, INTERCEPT_NAME};
pub use self::outliers::{iqr_outliers, iqr_outliers_dense, OutlierReport};
pub use self::special::{f_cdf, f_sf, reg_incomplete_beta, t_cdf, t_quantile, t_sf};
pub use self::ttest::{
    mean_difference_summary, two_sample_ttest, Alternative, MeanDifference, TTestResult,
};
pub use self::vif::{vif, vif_with, VifEntry, VifOptions, VifValue};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("{what} needs at least {needed} values, got {got}")]
    InsufficientData {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("design matrix is rank deficient: {} are linearly dependent", columns.join(", "))]
    Singular { columns: Vec<String> },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("{0}")]
    Arity(String),
    #[error("column lengths differ: {0}")]
    LengthMismatch(String),
}

/// A named numeric column borrowed from the caller.
pub type Named<'a> = (&'a str, &'a [f64]);

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample variance with the n - 1 denominator.
pub(crate) fn sample_variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
}
