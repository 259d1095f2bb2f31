use serde::Serialize;
use stepwise_core::data::split_indices;
use stepwise_core::stats::{ols_fit, vif_with, RegressionModel, StatsError, VifEntry, VifOptions};

use super::common::as_value;
use super::{vars, BindingError, StepContext, StepResult, Verdict};
use crate::text::{num, plain, pvalue};

/// Significance level used when describing individual coefficients.
const COEFFICIENT_ALPHA: f64 = 0.05;

#[derive(Serialize)]
struct VifCheck {
    threshold: f64,
    intercept: bool,
    rows_used: usize,
    rows_dropped: usize,
    entries: Vec<VifEntry>,
    flagged: Vec<String>,
}

pub(super) fn vif_check(ctx: &StepContext) -> Result<StepResult, BindingError> {
    let columns = ctx.list("columns")?;
    let threshold = ctx.f64("threshold")?;
    let intercept = ctx.bool("intercept")?;
    if columns.len() < 2 {
        let only = columns.first().cloned().unwrap_or_default();
        return Ok(StepResult {
            outputs: serde_json::json!({
                "threshold": threshold,
                "intercept": intercept,
                "entries": [],
                "flagged": [],
                "predictor_count": columns.len(),
            }),
            verdict: Some(Verdict::Pass),
            summary: format!("only one predictor ({only}); multicollinearity cannot arise"),
            vars: vars([
                ("predictor_count", columns.len().to_string()),
                ("vif_table", "not applicable".into()),
                ("highest_variable", only),
                ("highest_vif", "n/a".into()),
                ("flagged", "none".into()),
                ("threshold", plain(threshold)),
            ]),
        });
    }
    let names: Vec<&str> = columns.iter().map(String::as_str).collect();
    let (rows, dropped) = ctx.dataset.complete_rows(&names)?;
    let cols: Vec<Vec<f64>> = (0..names.len())
        .map(|j| rows.iter().map(|r| r[j]).collect())
        .collect();
    let named: Vec<(&str, &[f64])> = names
        .iter()
        .zip(&cols)
        .map(|(n, c)| (*n, c.as_slice()))
        .collect();
    let entries = vif_with(&named, VifOptions { intercept })?;
    let flagged: Vec<String> = entries
        .iter()
        .filter(|e| e.vif.as_f64() > threshold)
        .map(|e| e.variable.clone())
        .collect();
    let highest = entries
        .iter()
        .reduce(|best, e| {
            if e.vif.as_f64() > best.vif.as_f64() {
                e
            } else {
                best
            }
        })
        .expect("at least two entries");
    let table = entries
        .iter()
        .map(|e| format!("{} {}", e.variable, e.vif))
        .collect::<Vec<_>>()
        .join(", ");
    let flagged_text = if flagged.is_empty() {
        "none".to_string()
    } else {
        flagged.join(", ")
    };
    let verdict = if flagged.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Violated
    };
    let summary = format!(
        "VIF: {table} (threshold {}; above: {flagged_text})",
        plain(threshold)
    );
    let v = vars([
        ("predictor_count", entries.len().to_string()),
        ("vif_table", table),
        ("highest_variable", highest.variable.clone()),
        ("highest_vif", highest.vif.to_string()),
        ("flagged", flagged_text),
        ("threshold", plain(threshold)),
    ]);
    let out = VifCheck {
        threshold,
        intercept,
        rows_used: rows.len(),
        rows_dropped: dropped,
        entries,
        flagged,
    };
    Ok(StepResult {
        outputs: as_value(out)?,
        verdict: Some(verdict),
        vars: v,
        summary,
    })
}

fn model_columns(ctx: &StepContext) -> Result<(String, Vec<String>), BindingError> {
    Ok((ctx.str("response")?, ctx.list("predictors")?))
}

fn seed_of(ctx: &StepContext) -> Result<u64, BindingError> {
    let seed = ctx.f64("seed")?;
    if seed < 0.0 || seed.fract() != 0.0 {
        return Err(BindingError::new("seed must be a non-negative integer"));
    }
    Ok(seed as u64)
}

pub(super) fn split(ctx: &StepContext) -> Result<StepResult, BindingError> {
    let (response, predictors) = model_columns(ctx)?;
    let ratio = ctx.f64("train_ratio")?;
    let seed = seed_of(ctx)?;
    let mut names = vec![response.as_str()];
    names.extend(predictors.iter().map(String::as_str));
    let (rows, dropped) = ctx.dataset.complete_rows(&names)?;
    let (train, test) = split_indices(rows.len(), ratio, seed);
    let summary = format!(
        "{} rows for fitting, {} held out (ratio {}, seed {seed}); {dropped} rows with missing values left out",
        train.len(),
        test.len(),
        plain(ratio)
    );
    Ok(StepResult {
        outputs: serde_json::json!({
            "train_ratio": ratio,
            "seed": seed,
            "rows_available": rows.len(),
            "rows_dropped_missing": dropped,
            "train_rows": train.len(),
            "test_rows": test.len(),
        }),
        verdict: None,
        vars: vars([
            ("train_rows", train.len().to_string()),
            ("test_rows", test.len().to_string()),
            ("rows_dropped", dropped.to_string()),
            ("train_ratio", plain(ratio)),
            ("seed", seed.to_string()),
        ]),
        summary,
    })
}

fn formula(response: &str, predictors: &[String], intercept: bool) -> String {
    let mut rhs: Vec<&str> = predictors.iter().map(String::as_str).collect();
    if !intercept {
        rhs.push("0");
    }
    format!("{response} ~ {}", rhs.join(" + "))
}

pub(super) fn spec(ctx: &StepContext) -> Result<StepResult, BindingError> {
    let (response, predictors) = model_columns(ctx)?;
    let intercept = ctx.bool("intercept")?;
    let f = formula(&response, &predictors, intercept);
    let intercept_text = if intercept { "with" } else { "without" };
    Ok(StepResult {
        outputs: serde_json::json!({
            "response": response,
            "predictors": predictors,
            "intercept": intercept,
            "formula": f,
        }),
        verdict: None,
        summary: format!("ordinary least squares, {f}, {intercept_text} intercept"),
        vars: vars([("formula", f.clone()), ("intercept", intercept_text.into())]),
    })
}

#[derive(Serialize)]
struct Evaluation {
    model: RegressionModel,
    formula: String,
    train_rows: usize,
    test_rows: usize,
    rows_dropped_missing: usize,
    /// R² on the held-out rows; absent when every row was used for fitting.
    test_r_squared: Option<f64>,
    coefficient_notes: Vec<String>,
}

fn coefficient_note(response: &str, name: &str, b: f64, p: f64) -> String {
    let direction = if b > 0.0 {
        "rises"
    } else if b < 0.0 {
        "falls"
    } else {
        "does not change"
    };
    let significance = if p < COEFFICIENT_ALPHA {
        "distinguishable from zero at the 5% level"
    } else {
        "not distinguishable from zero at the 5% level"
    };
    format!(
        "{response} {direction} by {} per unit increase in {name}, other predictors held fixed (p = {}, {significance})",
        num(b.abs(), 4),
        pvalue(p)
    )
}

pub(super) fn evaluate(ctx: &StepContext) -> Result<StepResult, BindingError> {
    let (response, predictors) = model_columns(ctx)?;
    let ratio = ctx.f64("train_ratio")?;
    let seed = seed_of(ctx)?;
    let intercept = ctx.bool("intercept")?;
    let mut names = vec![response.as_str()];
    names.extend(predictors.iter().map(String::as_str));
    let (rows, dropped) = ctx.dataset.complete_rows(&names)?;
    let (train, test) = split_indices(rows.len(), ratio, seed);
    let column =
        |idx: &[usize], j: usize| -> Vec<f64> { idx.iter().map(|&i| rows[i][j]).collect() };

    let y_train = column(&train, 0);
    let x_train: Vec<Vec<f64>> = (1..names.len()).map(|j| column(&train, j)).collect();
    let named: Vec<(&str, &[f64])> = predictors
        .iter()
        .zip(&x_train)
        .map(|(n, c)| (n.as_str(), c.as_slice()))
        .collect();
    let model = ols_fit(&named, (&response, &y_train), intercept).map_err(|e| match e {
        StatsError::Singular { columns } => BindingError::new(format!(
            "the predictors are perfectly collinear ({}); remove one of them and refit",
            columns.join(", ")
        )),
        other => other.into(),
    })?;

    let test_r_squared = if test.is_empty() {
        None
    } else {
        let y_test = column(&test, 0);
        let x_test: Vec<Vec<f64>> = (1..names.len()).map(|j| column(&test, j)).collect();
        let refs: Vec<&[f64]> = x_test.iter().map(Vec::as_slice).collect();
        Some(model.score(&refs, &y_test)?)
    };

    let notes: Vec<String> = model
        .terms
        .iter()
        .filter(|t| predictors.contains(&t.name))
        .map(|t| coefficient_note(&response, &t.name, t.coefficient, t.p_value))
        .collect();
    let fit_note = if model.r_squared >= 1.0 - 1e-12 {
        format!("The predictors reproduce {response} exactly on the fitted rows (R² = 1); check that no predictor is a copy or rescaling of the response.")
    } else {
        format!(
            "The model accounts for {}% of the variation in {response} on the fitted rows.",
            num(100.0 * model.r_squared, 1)
        )
    };
    let test_text = test_r_squared.map_or_else(
        || "not computed (every row was used for fitting)".to_string(),
        |r| num(r, 4),
    );
    let coefficients = model
        .terms
        .iter()
        .map(|t| format!("{} {}", t.name, num(t.coefficient, 4)))
        .collect::<Vec<_>>()
        .join(", ");
    let summary = format!(
        "R² = {} (adjusted {}) on {} rows; held-out R² {test_text}; coefficients: {coefficients}",
        num(model.r_squared, 4),
        num(model.adj_r_squared, 4),
        model.n_obs
    );
    let v = vars([
        ("r_squared", num(model.r_squared, 4)),
        ("r_squared_pct", num(100.0 * model.r_squared, 1)),
        ("adj_r_squared", num(model.adj_r_squared, 4)),
        ("n_obs", model.n_obs.to_string()),
        ("test_r_squared", test_text),
        ("coefficients", coefficients),
        ("coefficient_notes", notes.join("; ")),
        ("fit_note", fit_note),
        ("response", response.clone()),
    ]);
    let out = Evaluation {
        formula: formula(&response, &predictors, intercept),
        model,
        train_rows: train.len(),
        test_rows: test.len(),
        rows_dropped_missing: dropped,
        test_r_squared,
        coefficient_notes: notes,
    };
    Ok(StepResult {
        outputs: as_value(out)?,
        verdict: None,
        vars: v,
        summary,
    })
}
