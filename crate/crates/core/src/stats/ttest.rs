use serde::{Deserialize, Serialize};

use super::special::{t_cdf, t_quantile, t_sf};
use super::{mean, sample_variance, StatsError};

/// Direction of the alternative hypothesis, stated for `mean_a - mean_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    #[default]
    TwoSided,
    Less,
    Greater,
}

impl std::fmt::Display for Alternative {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Alternative::TwoSided => "two-sided",
            Alternative::Less => "less",
            Alternative::Greater => "greater",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    pub df: f64,
    pub p: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    pub mean_diff: f64,
    /// Two-sided confidence interval for the mean difference at `1 - alpha`.
    pub ci_low: f64,
    pub ci_high: f64,
    pub alternative: Alternative,
    pub equal_variance: bool,
    pub alpha: f64,
    pub reject_null: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanDifference {
    pub mean_a: f64,
    pub mean_b: f64,
    pub diff: f64,
    pub se_diff: f64,
    pub df: f64,
    pub confidence: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

struct Pieces {
    mean_a: f64,
    mean_b: f64,
    se: f64,
    df: f64,
}

fn pieces(a: &[f64], b: &[f64], equal_variance: bool) -> Result<Pieces, StatsError> {
    for g in [a, b] {
        if g.len() < 2 {
            return Err(StatsError::InsufficientData {
                what: "each group of a two-sample test",
                needed: 2,
                got: g.len(),
            });
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::Domain("non-finite value in group".into()));
        }
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (sample_variance(a), sample_variance(b));
    let pooled_df = na + nb - 2.0;
    let (se, df) = if equal_variance {
        let sp2 = ((na - 1.0) * va + (nb - 1.0) * vb) / pooled_df;
        ((sp2 * (1.0 / na + 1.0 / nb)).sqrt(), pooled_df)
    } else {
        let (qa, qb) = (va / na, vb / nb);
        let se2 = qa + qb;
        let denom = qa * qa / (na - 1.0) + qb * qb / (nb - 1.0);
        let df = if denom > 0.0 {
            se2 * se2 / denom
        } else {
            pooled_df
        };
        (se2.sqrt(), df)
    };
    Ok(Pieces {
        mean_a: mean(a),
        mean_b: mean(b),
        se,
        df,
    })
}

/// Two-sample Student (pooled) or Welch t-test.
pub fn two_sample_ttest(
    a: &[f64],
    b: &[f64],
    equal_variance: bool,
    alternative: Alternative,
    alpha: f64,
) -> Result<TTestResult, StatsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::Domain(format!("alpha {alpha} outside (0, 1)")));
    }
    let Pieces {
        mean_a,
        mean_b,
        se,
        df,
    } = pieces(a, b, equal_variance)?;
    let diff = mean_a - mean_b;
    if se == 0.0 && diff == 0.0 {
        return Err(StatsError::Degenerate(
            "both groups are constant with equal means".into(),
        ));
    }
    let t = if se == 0.0 {
        f64::INFINITY.copysign(diff)
    } else {
        diff / se
    };
    let p = match alternative {
        Alternative::TwoSided => (2.0 * t_sf(t.abs(), df)?).min(1.0),
        Alternative::Less => t_cdf(t, df)?,
        Alternative::Greater => t_sf(t, df)?,
    };
    let half = t_quantile(1.0 - alpha / 2.0, df)? * se;
    Ok(TTestResult {
        t,
        df,
        p,
        mean_a,
        mean_b,
        mean_diff: diff,
        ci_low: diff - half,
        ci_high: diff + half,
        alternative,
        equal_variance,
        alpha,
        reject_null: p < alpha,
    })
}

/// Difference of means with a 95% confidence interval, using the pooled or
/// Welch standard error.
pub fn mean_difference_summary(
    a: &[f64],
    b: &[f64],
    equal_variance: bool,
) -> Result<MeanDifference, StatsError> {
    let Pieces {
        mean_a,
        mean_b,
        se,
        df,
    } = pieces(a, b, equal_variance)?;
    let diff = mean_a - mean_b;
    let half = t_quantile(0.975, df)? * se;
    Ok(MeanDifference {
        mean_a,
        mean_b,
        diff,
        se_diff: se,
        df,
        confidence: 0.95,
        ci_low: diff - half,
        ci_high: diff + half,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identical_groups() {
        let r = two_sample_ttest(
            &[1.0, 2.0, 3.0],
            &[1.0, 2.0, 3.0],
            true,
            Alternative::TwoSided,
            0.05,
        )
        .unwrap();
        assert_eq!(r.t, 0.0);
        assert_abs_diff_eq!(r.p, 1.0, epsilon = 1e-15);
        assert!(!r.reject_null);
    }

    #[test]
    fn pooled_hand_computation() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [2.0, 3.0, 4.0, 5.0, 6.0];
        let r = two_sample_ttest(&a, &b, true, Alternative::TwoSided, 0.05).unwrap();
        assert_abs_diff_eq!(r.t, -1.0, epsilon = 1e-12);
        assert_eq!(r.df, 8.0);
        assert_abs_diff_eq!(r.p, 0.346_593_507_087_334_2, epsilon = 1e-9);
        let less = two_sample_ttest(&a, &b, true, Alternative::Less, 0.05).unwrap();
        let greater = two_sample_ttest(&a, &b, true, Alternative::Greater, 0.05).unwrap();
        assert_abs_diff_eq!(less.p + greater.p, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(less.p, r.p / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn welch_df_for_unequal_groups() {
        // va = 2.5 (n=5), vb = 28/3 (n=3).
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [10.0, 12.0, 16.0];
        let r = two_sample_ttest(&a, &b, false, Alternative::TwoSided, 0.05).unwrap();
        let (qa, qb): (f64, f64) = (0.5, 28.0 / 3.0 / 3.0);
        let df = (qa + qb).powi(2) / (qa * qa / 4.0 + qb * qb / 2.0);
        assert_abs_diff_eq!(r.df, df, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_and_small_inputs() {
        assert!(matches!(
            two_sample_ttest(&[1.0, 1.0], &[1.0, 1.0], true, Alternative::TwoSided, 0.05),
            Err(StatsError::Degenerate(_))
        ));
        assert!(matches!(
            two_sample_ttest(&[1.0], &[1.0, 2.0], true, Alternative::TwoSided, 0.05),
            Err(StatsError::InsufficientData { .. })
        ));
        assert!(
            two_sample_ttest(&[1.0, 2.0], &[1.0, 2.0], true, Alternative::TwoSided, 1.0).is_err()
        );
    }

    #[test]
    fn constant_groups_with_different_means() {
        let r =
            two_sample_ttest(&[0.0, 0.0], &[1.0, 1.0], true, Alternative::TwoSided, 0.05).unwrap();
        assert_eq!(r.t, f64::NEG_INFINITY);
        assert_eq!(r.p, 0.0);
        assert!(r.reject_null);
    }

    #[test]
    fn mean_difference_examples() {
        let d = mean_difference_summary(&[0.0, 0.0], &[1.0, 1.0], true).unwrap();
        assert_eq!(d.diff, -1.0);
        let same = mean_difference_summary(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], false).unwrap();
        assert_eq!(same.diff, 0.0);
        assert!(same.ci_low < 0.0 && same.ci_high > 0.0);
    }
}
