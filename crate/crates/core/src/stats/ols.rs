use serde::{Deserialize, Serialize};

use super::linalg::Qr;
use super::special::t_sf;
use super::{Named, StatsError};

pub const INTERCEPT_NAME: &str = "(intercept)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    pub coefficient: f64,
    pub std_error: f64,
    pub t_value: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionModel {
    pub response: String,
    /// Intercept first (when present), then predictors in input order.
    pub terms: Vec<Term>,
    pub has_intercept: bool,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    /// Residual standard error, `sqrt(RSS / df_resid)`.
    pub sigma: f64,
    pub n_obs: usize,
    pub df_resid: usize,
}

impl RegressionModel {
    pub fn predictor_names(&self) -> Vec<&str> {
        self.terms
            .iter()
            .filter(|t| t.name != INTERCEPT_NAME || !self.has_intercept)
            .map(|t| t.name.as_str())
            .collect()
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.terms
            .iter()
            .find(|t| t.name == name)
            .map(|t| t.coefficient)
    }

    /// Predictions for columns given in the same order as the fitted
    /// predictors.
    pub fn predict(&self, predictors: &[&[f64]]) -> Result<Vec<f64>, StatsError> {
        let slopes: Vec<f64> = self
            .terms
            .iter()
            .skip(usize::from(self.has_intercept))
            .map(|t| t.coefficient)
            .collect();
        if predictors.len() != slopes.len() {
            return Err(StatsError::Arity(format!(
                "model has {} predictors, got {} columns",
                slopes.len(),
                predictors.len()
            )));
        }
        let n = predictors.first().map_or(0, |c| c.len());
        if predictors.iter().any(|c| c.len() != n) {
            return Err(StatsError::LengthMismatch("prediction columns".into()));
        }
        let b0 = if self.has_intercept {
            self.terms[0].coefficient
        } else {
            0.0
        };
        Ok((0..n)
            .map(|i| {
                b0 + slopes
                    .iter()
                    .zip(predictors)
                    .map(|(b, c)| b * c[i])
                    .sum::<f64>()
            })
            .collect())
    }

    /// R² of the model's predictions against new observations, with the same
    /// centering convention used in the fit.
    pub fn score(&self, predictors: &[&[f64]], response: &[f64]) -> Result<f64, StatsError> {
        let pred = self.predict(predictors)?;
        if pred.len() != response.len() {
            return Err(StatsError::LengthMismatch("response".into()));
        }
        if response.is_empty() {
            return Err(StatsError::InsufficientData {
                what: "scoring",
                needed: 1,
                got: 0,
            });
        }
        let rss: f64 = pred
            .iter()
            .zip(response)
            .map(|(p, y)| (y - p).powi(2))
            .sum();
        Ok(1.0 - rss / total_sum_of_squares(response, self.has_intercept))
    }
}

fn total_sum_of_squares(y: &[f64], centered: bool) -> f64 {
    if centered {
        let m = super::mean(y);
        y.iter().map(|v| (v - m).powi(2)).sum()
    } else {
        y.iter().map(|v| v * v).sum()
    }
}

/// Ordinary least squares via Householder QR.
///
/// Without an intercept, R² is the uncentered version (`1 - RSS / Σy²`), the
/// usual convention for regressions through the origin.
pub fn ols_fit(
    predictors: &[Named],
    response: Named,
    intercept: bool,
) -> Result<RegressionModel, StatsError> {
    let (response_name, y) = response;
    let n = y.len();
    for (name, col) in predictors {
        if col.len() != n {
            return Err(StatsError::LengthMismatch(format!(
                "`{name}` has {} values, response has {n}",
                col.len()
            )));
        }
    }
    if y.iter()
        .chain(predictors.iter().flat_map(|(_, c)| c.iter()))
        .any(|v| !v.is_finite())
    {
        return Err(StatsError::Domain(
            "non-finite value in regression input".into(),
        ));
    }

    let ones = vec![1.0; n];
    let mut names: Vec<&str> = Vec::new();
    let mut cols: Vec<&[f64]> = Vec::new();
    if intercept {
        names.push(INTERCEPT_NAME);
        cols.push(&ones);
    }
    for (name, col) in predictors {
        names.push(name);
        cols.push(col);
    }
    let p = cols.len();
    if p == 0 {
        return Err(StatsError::Arity("model has no terms".into()));
    }
    if n <= p {
        return Err(StatsError::InsufficientData {
            what: "regression",
            needed: p + 1,
            got: n,
        });
    }

    let qr = Qr::decompose(&cols);
    if let Some((j, partners)) = qr.dependent.first() {
        let mut columns: Vec<String> = partners.iter().map(|&i| names[i].to_string()).collect();
        columns.push(names[*j].to_string());
        return Err(StatsError::Singular { columns });
    }

    let beta = qr.solve(y);
    let rss: f64 = (0..n)
        .map(|i| {
            let fitted: f64 = beta.iter().zip(&cols).map(|(b, c)| b * c[i]).sum();
            (y[i] - fitted).powi(2)
        })
        .sum();
    let df_resid = n - p;
    let sigma2 = rss / df_resid as f64;
    let tss = total_sum_of_squares(y, intercept);
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 0.0 };
    let offset = usize::from(intercept);
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n - offset) as f64 / df_resid as f64;

    let diag = qr.inverse_gram_diagonal();
    let terms = names
        .iter()
        .zip(beta.iter().zip(diag))
        .map(|(name, (&b, d))| {
            let se = (sigma2 * d).sqrt();
            let (t, p) = if se > 0.0 {
                let t = b / se;
                (t, (2.0 * t_sf(t.abs(), df_resid as f64)?).min(1.0))
            } else if b == 0.0 {
                (0.0, 1.0)
            } else {
                (f64::INFINITY.copysign(b), 0.0)
            };
            Ok(Term {
                name: name.to_string(),
                coefficient: b,
                std_error: se,
                t_value: t,
                p_value: p,
            })
        })
        .collect::<Result<Vec<_>, StatsError>>()?;

    Ok(RegressionModel {
        response: response_name.to_string(),
        terms,
        has_intercept: intercept,
        r_squared,
        adj_r_squared,
        sigma: sigma2.sqrt(),
        n_obs: n,
        df_resid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_line() {
        let m = ols_fit(&[("x", &[0.0, 1.0, 2.0])], ("y", &[1.0, 3.0, 5.0]), true).unwrap();
        assert_abs_diff_eq!(m.terms[0].coefficient, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.terms[1].coefficient, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.r_squared, 1.0, epsilon = 1e-12);
        assert_eq!(m.df_resid, 1);
        assert_eq!(m.terms[0].name, INTERCEPT_NAME);
    }

    #[test]
    fn textbook_standard_errors() {
        // y = [1,2,2,4], x = [1,2,3,4]: slope 0.9, intercept 0, RSS 0.7,
        // se(slope) = sqrt(0.35 / 5), se(intercept) = sqrt(0.35 * 1.5).
        let m = ols_fit(
            &[("x", &[1.0, 2.0, 3.0, 4.0])],
            ("y", &[1.0, 2.0, 2.0, 4.0]),
            true,
        )
        .unwrap();
        assert_abs_diff_eq!(m.terms[1].coefficient, 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(m.terms[0].coefficient, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            m.terms[1].std_error,
            (0.35f64 / 5.0).sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            m.terms[0].std_error,
            (0.35f64 * 1.5).sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(m.r_squared, 1.0 - 0.7 / 4.75, epsilon = 1e-12);
    }

    #[test]
    fn singular_design_names_dependent_set() {
        let err = ols_fit(
            &[("a", &[1.0, 2.0, 3.0, 4.0]), ("b", &[2.0, 4.0, 6.0, 8.0])],
            ("y", &[1.0, 0.0, 1.0, 3.0]),
            true,
        )
        .unwrap_err();
        assert_eq!(
            err,
            StatsError::Singular {
                columns: vec!["a".into(), "b".into()]
            }
        );
    }

    #[test]
    fn too_few_observations() {
        let err = ols_fit(&[("x", &[1.0, 2.0])], ("y", &[1.0, 2.0]), true).unwrap_err();
        assert!(matches!(err, StatsError::InsufficientData { .. }));
    }

    #[test]
    fn predict_and_score_round_trip() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.1, 4.9, 7.0];
        let m = ols_fit(&[("x", &x)], ("y", &y), true).unwrap();
        let s = m.score(&[&x], &y).unwrap();
        assert_abs_diff_eq!(s, m.r_squared, epsilon = 1e-12);
        assert!(m.predict(&[]).is_err());
    }

    #[test]
    fn no_intercept_uses_uncentered_r2() {
        let m = ols_fit(&[("x", &[1.0, 2.0, 3.0])], ("y", &[2.0, 4.0, 6.5]), false).unwrap();
        assert_eq!(m.terms.len(), 1);
        assert!(m.r_squared > 0.99 && m.r_squared <= 1.0);
        assert_eq!(m.df_resid, 2);
    }
}
