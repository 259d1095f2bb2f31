use serde::Serialize;
use stepwise_core::data::{kde, summarize, DensityCurve};
use stepwise_core::stats::{
    levene_test, mean_difference_summary, normality_check, two_sample_ttest, Alternative,
    LeveneCenter, LeveneResult, MeanDifference, NormalityReport, TTestResult,
};

use super::common::{as_value, group_values};
use super::{vars, BindingError, StepContext, StepResult, Verdict};
use crate::text::{num, plain, pvalue};

struct Groups {
    variable: String,
    group_column: String,
    a: (String, Vec<f64>),
    b: (String, Vec<f64>),
}

fn groups(ctx: &StepContext) -> Result<Groups, BindingError> {
    let variable = ctx.str("variable")?;
    let group_column = ctx.str("group_column")?;
    let load = |key: &str| -> Result<(String, Vec<f64>), BindingError> {
        let g = ctx.str(key)?;
        let values = group_values(ctx.dataset, &variable, &group_column, &g)?;
        Ok((g, values))
    };
    let a = load("group_a")?;
    let b = load("group_b")?;
    Ok(Groups {
        variable,
        group_column,
        a,
        b,
    })
}

fn parse<T: serde::de::DeserializeOwned>(ctx: &StepContext, key: &str) -> Result<T, BindingError> {
    let text = ctx.str(key)?;
    serde_json::from_value(serde_json::Value::String(text.clone()))
        .map_err(|_| BindingError::new(format!("unknown {key} `{text}`")))
}

#[derive(Serialize)]
struct GroupSummary {
    value: String,
    n: usize,
    mean: f64,
    std: f64,
}

pub(super) fn select_groups(ctx: &StepContext) -> Result<StepResult, BindingError> {
    let g = groups(ctx)?;
    let mut summaries = Vec::new();
    for (value, values) in [&g.a, &g.b] {
        if values.len() < 2 {
            return Err(BindingError::new(format!(
                "group `{value}` has {} value(s) of {}; each group needs at least 2",
                values.len(),
                g.variable
            )));
        }
        let s = summarize(values).expect("non-empty group");
        summaries.push(GroupSummary {
            value: value.clone(),
            n: s.count,
            mean: s.mean,
            std: s.std,
        });
    }
    let summary = format!(
        "{} by {}: {} (n = {}, mean {}) vs {} (n = {}, mean {})",
        g.variable,
        g.group_column,
        summaries[0].value,
        summaries[0].n,
        num(summaries[0].mean, 4),
        summaries[1].value,
        summaries[1].n,
        num(summaries[1].mean, 4)
    );
    let v = vars([
        ("variable", g.variable.clone()),
        ("group_column", g.group_column.clone()),
        ("group_a", g.a.0.clone()),
        ("group_b", g.b.0.clone()),
        ("n_a", g.a.1.len().to_string()),
        ("n_b", g.b.1.len().to_string()),
    ]);
    Ok(StepResult {
        outputs: serde_json::json!({
            "variable": g.variable,
            "group_column": g.group_column,
            "groups": as_value(&summaries)?,
        }),
        verdict: None,
        vars: v,
        summary,
    })
}

#[derive(Serialize)]
struct LeveneCheck {
    result: LeveneResult,
    alpha: f64,
    groups: Vec<GroupSpread>,
}

#[derive(Serialize)]
struct GroupSpread {
    value: String,
    n: usize,
    variance: f64,
    density: Option<DensityCurve>,
}

pub(super) fn levene(ctx: &StepContext) -> Result<StepResult, BindingError> {
    let g = groups(ctx)?;
    let center: LeveneCenter = parse(ctx, "center")?;
    let alpha = ctx.f64("alpha")?;
    let result = levene_test(&g.a.1, &g.b.1, center)?;
    let equal = result.p >= alpha;
    let spread = |(value, values): &(String, Vec<f64>)| GroupSpread {
        value: value.clone(),
        n: values.len(),
        variance: summarize(values).map_or(f64::NAN, |s| s.std * s.std),
        density: kde(values).ok(),
    };
    let decision = if equal {
        "equal variances are not rejected"
    } else {
        "equal variances are rejected"
    };
    let center_text = match center {
        LeveneCenter::Mean => "mean",
        LeveneCenter::Median => "median",
    };
    let summary = format!(
        "Levene ({center_text}-centred): W = {}, p = {} at alpha {}: {decision}",
        num(result.w, 4),
        pvalue(result.p),
        plain(alpha)
    );
    let v = vars([
        ("w", num(result.w, 4)),
        ("p", pvalue(result.p)),
        ("alpha", plain(alpha)),
        ("center", center_text.into()),
        ("decision", decision.into()),
        ("group_a", g.a.0.clone()),
        ("group_b", g.b.0.clone()),
        ("variable", g.variable.clone()),
    ]);
    let out = LeveneCheck {
        result,
        alpha,
        groups: vec![spread(&g.a), spread(&g.b)],
    };
    Ok(StepResult {
        outputs: as_value(out)?,
        verdict: Some(if equal {
            Verdict::Pass
        } else {
            Verdict::Violated
        }),
        vars: v,
        summary,
    })
}

#[derive(Serialize)]
struct NormalityCheck {
    group: String,
    report: NormalityReport,
    density: Option<DensityCurve>,
    other_group: String,
    other_n: usize,
}

pub(super) fn normality(ctx: &StepContext) -> Result<StepResult, BindingError> {
    let variable = ctx.str("variable")?;
    let group_column = ctx.str("group_column")?;
    let group = ctx.str("group")?;
    let other = ctx.str("other_group")?;
    let values = group_values(ctx.dataset, &variable, &group_column, &group)?;
    let other_n = group_values(ctx.dataset, &variable, &group_column, &other)?.len();
    let report = normality_check(&values)?;
    let threshold = stepwise_core::stats::LARGE_SAMPLE_THRESHOLD;
    let both_large = report.large_sample && other_n > threshold;
    let summary = format!(
        "{variable} in {group}: n = {}, skewness {}, excess kurtosis {}; {}",
        report.n,
        num(report.skewness, 3),
        num(report.excess_kurtosis, 3),
        if report.large_sample {
            format!("more than {threshold} observations")
        } else {
            format!("{threshold} observations or fewer")
        }
    );
    let v = vars([
        ("variable", variable.clone()),
        ("group", group.clone()),
        ("n", report.n.to_string()),
        ("other_group", other.clone()),
        ("other_n", other_n.to_string()),
        ("both_large", u8::from(both_large).to_string()),
        ("threshold", threshold.to_string()),
        ("skewness", num(report.skewness, 3)),
        ("excess_kurtosis", num(report.excess_kurtosis, 3)),
    ]);
    let verdict = if report.large_sample {
        Verdict::Pass
    } else {
        Verdict::Violated
    };
    let out = NormalityCheck {
        group,
        density: kde(&values).ok(),
        report,
        other_group: other,
        other_n,
    };
    Ok(StepResult {
        outputs: as_value(out)?,
        verdict: Some(verdict),
        vars: v,
        summary,
    })
}

fn hypotheses(variable: &str, col: &str, a: &str, b: &str, alt: Alternative) -> (String, String) {
    let ma = format!("mean {variable} ({col} = {a})");
    let mb = format!("mean {variable} ({col} = {b})");
    let op = match alt {
        Alternative::TwoSided => "≠",
        Alternative::Less => "<",
        Alternative::Greater => ">",
    };
    (format!("H0: {ma} = {mb}"), format!("H1: {ma} {op} {mb}"))
}

fn test_name(equal_variance: bool) -> &'static str {
    if equal_variance {
        "Student's two-sample t-test (pooled variance)"
    } else {
        "Welch's two-sample t-test (unequal variances)"
    }
}

pub(super) fn spec(ctx: &StepContext) -> Result<StepResult, BindingError> {
    let variable = ctx.str("variable")?;
    let col = ctx.str("group_column")?;
    let (a, b) = (ctx.str("group_a")?, ctx.str("group_b")?);
    let alternative: Alternative = parse(ctx, "alternative")?;
    let alpha = ctx.f64("alpha")?;
    let equal_variance = ctx.bool("equal_variance")?;
    let (h0, h1) = hypotheses(&variable, &col, &a, &b, alternative);
    let name = test_name(equal_variance);
    let summary = format!("{h0}; {h1}; alpha = {}; {name}", plain(alpha));
    Ok(StepResult {
        outputs: serde_json::json!({
            "null_hypothesis": h0,
            "alternative_hypothesis": h1,
            "alternative": alternative,
            "alpha": alpha,
            "equal_variance": equal_variance,
            "test": name,
        }),
        verdict: None,
        vars: vars([
            ("null_hypothesis", h0.clone()),
            ("alternative_hypothesis", h1.clone()),
            ("alpha", plain(alpha)),
            ("test", name.into()),
        ]),
        summary,
    })
}

#[derive(Serialize)]
struct Evaluation {
    test: TTestResult,
    mean_difference: MeanDifference,
    test_name: String,
    conclusion: String,
}

pub(super) fn evaluate(ctx: &StepContext) -> Result<StepResult, BindingError> {
    let g = groups(ctx)?;
    let alternative: Alternative = parse(ctx, "alternative")?;
    let alpha = ctx.f64("alpha")?;
    let equal_variance = ctx.bool("equal_variance")?;
    let (a, b) = (&g.a.0, &g.b.0);
    let test = two_sample_ttest(&g.a.1, &g.b.1, equal_variance, alternative, alpha)?;
    let diff = mean_difference_summary(&g.a.1, &g.b.1, equal_variance)?;
    let var = &g.variable;
    let conclusion = if test.reject_null {
        let relation = match alternative {
            Alternative::TwoSided => "differs from",
            Alternative::Less => "is lower than",
            Alternative::Greater => "is higher than",
        };
        format!(
            "Reject H0 at alpha = {}: p = {} < {}. The mean {var} of {a} {relation} that of {b} (difference {}, 95% CI [{}, {}]).",
            plain(alpha),
            pvalue(test.p),
            plain(alpha),
            num(diff.diff, 4),
            num(diff.ci_low, 4),
            num(diff.ci_high, 4)
        )
    } else {
        format!(
            "Do not reject H0 at alpha = {}: p = {} ≥ {}. The data do not show the mean {var} of {a} and {b} to differ in the stated direction (difference {}, 95% CI [{}, {}]).",
            plain(alpha),
            pvalue(test.p),
            plain(alpha),
            num(diff.diff, 4),
            num(diff.ci_low, 4),
            num(diff.ci_high, 4)
        )
    };
    let summary = format!(
        "t = {}, df = {}, p = {}; {}",
        num(test.t, 4),
        num(test.df, 2),
        pvalue(test.p),
        if test.reject_null {
            "H0 rejected"
        } else {
            "H0 not rejected"
        }
    );
    let v = vars([
        ("t", num(test.t, 4)),
        ("df", num(test.df, 2)),
        ("p", pvalue(test.p)),
        ("alpha", plain(alpha)),
        ("mean_a", num(test.mean_a, 4)),
        ("mean_b", num(test.mean_b, 4)),
        ("diff", num(diff.diff, 4)),
        ("ci_low", num(diff.ci_low, 4)),
        ("ci_high", num(diff.ci_high, 4)),
        (
            "decision",
            if test.reject_null {
                "reject"
            } else {
                "do not reject"
            }
            .into(),
        ),
        ("conclusion", conclusion.clone()),
    ]);
    let out = Evaluation {
        test,
        mean_difference: diff,
        test_name: test_name(equal_variance).into(),
        conclusion,
    };
    Ok(StepResult {
        outputs: as_value(out)?,
        verdict: None,
        vars: v,
        summary,
    })
}
