use serde::Serialize;
use serde_json::Value;
use stepwise_core::data::{
    box_stats, histogram, summarize, BinRule, BoxStats, DType, Dataset, HistogramData, SummaryStats,
};
use stepwise_core::stats::{iqr_outliers, OutlierReport};

use super::{vars, BindingError, StepContext, StepResult, Verdict};
use crate::text::{num, plain};

const PREVIEW_ROWS: usize = 50;

#[derive(Serialize)]
struct ColumnOverview {
    name: String,
    dtype: DType,
    missing: usize,
    distinct: usize,
}

#[derive(Serialize)]
struct DatasetOverview {
    source: String,
    rows: usize,
    version: u64,
    provenance: Vec<String>,
    columns: Vec<ColumnOverview>,
    preview: Vec<Vec<Option<String>>>,
}

pub(super) fn load(ctx: &StepContext) -> Result<StepResult, BindingError> {
    let d = ctx.dataset;
    if d.row_count() == 0 || d.column_count() == 0 {
        return Err(BindingError::new("the dataset has no rows"));
    }
    let source = ctx.str("source")?;
    let columns: Vec<ColumnOverview> = d
        .columns()
        .map(|c| ColumnOverview {
            name: c.name().to_string(),
            dtype: c.dtype(),
            missing: c.missing_count(),
            distinct: c.distinct_text().len(),
        })
        .collect();
    let preview = (0..d.row_count().min(PREVIEW_ROWS))
        .map(|r| d.columns().map(|c| c.cell_text(r)).collect())
        .collect();
    let missing: usize = columns.iter().map(|c| c.missing).sum();
    let summary = format!(
        "{source}: {} rows, {} columns, {missing} missing cells (version {})",
        d.row_count(),
        d.column_count(),
        d.version()
    );
    let out = DatasetOverview {
        source: source.clone(),
        rows: d.row_count(),
        version: d.version(),
        provenance: d.provenance().to_vec(),
        columns,
        preview,
    };
    Ok(StepResult {
        outputs: serde_json::to_value(out)?,
        verdict: None,
        vars: vars([
            ("source", source),
            ("rows", d.row_count().to_string()),
            ("column_count", d.column_count().to_string()),
            ("missing", missing.to_string()),
        ]),
        summary,
    })
}

pub(crate) fn numeric_present(d: &Dataset, column: &str) -> Result<Vec<f64>, BindingError> {
    Ok(d.column(column)?.present_values()?)
}

#[derive(Serialize)]
struct ColumnDescription {
    column: String,
    summary: SummaryStats,
    histogram: HistogramData,
}

fn describe(d: &Dataset, column: &str) -> Result<ColumnDescription, BindingError> {
    let values = numeric_present(d, column)?;
    let mut summary = summarize(&values)
        .ok_or_else(|| BindingError::new(format!("column `{column}` has no values")))?;
    summary.missing_count = d.column(column)?.missing_count();
    Ok(ColumnDescription {
        column: column.to_string(),
        summary,
        histogram: histogram(&values, BinRule::FreedmanDiaconis)?,
    })
}

pub(super) fn describe_column(ctx: &StepContext) -> Result<StepResult, BindingError> {
    let column = ctx.str("column")?;
    let desc = describe(ctx.dataset, &column)?;
    let s = &desc.summary;
    let summary = format!(
        "{column}: n = {}, mean {}, median {}, most frequent value {} ({} rows)",
        s.count,
        num(s.mean, 2),
        plain(s.median),
        plain(s.mode_value),
        s.mode_frequency
    );
    let v = vars([
        ("column", column.clone()),
        ("count", s.count.to_string()),
        ("missing", s.missing_count.to_string()),
        ("mean", num(s.mean, 2)),
        ("std", num(s.std, 2)),
        ("median", plain(s.median)),
        ("mode_value", plain(s.mode_value)),
        ("mode_frequency", s.mode_frequency.to_string()),
    ]);
    Ok(StepResult {
        outputs: serde_json::to_value(desc)?,
        verdict: None,
        vars: v,
        summary,
    })
}

pub(super) fn describe_columns(ctx: &StepContext) -> Result<StepResult, BindingError> {
    let columns = ctx.list("columns")?;
    let descs = columns
        .iter()
        .map(|c| describe(ctx.dataset, c))
        .collect::<Result<Vec<_>, _>>()?;
    let joined = columns.join(", ");
    Ok(StepResult {
        outputs: serde_json::json!({ "columns": serde_json::to_value(descs)? }),
        verdict: None,
        summary: format!("{} selected: {joined}", columns.len()),
        vars: vars([
            ("columns", joined),
            ("column_count", columns.len().to_string()),
        ]),
    })
}

#[derive(Serialize)]
struct OutlierCheck {
    column: String,
    report: OutlierReport,
    fraction: f64,
    box_plot: Option<BoxStats>,
    histogram: HistogramData,
}

fn outlier_check(d: &Dataset, column: &str) -> Result<OutlierCheck, BindingError> {
    let cells = d.column(column)?.as_numeric()?;
    let report = iqr_outliers(cells)?;
    let present: Vec<f64> = cells.iter().flatten().copied().collect();
    Ok(OutlierCheck {
        column: column.to_string(),
        fraction: report.outlier_fraction(),
        box_plot: box_stats(&present),
        histogram: histogram(&present, BinRule::FreedmanDiaconis)?,
        report,
    })
}

fn pct(x: f64) -> String {
    format!("{}%", num(100.0 * x, 2))
}

pub(super) fn outliers(ctx: &StepContext) -> Result<StepResult, BindingError> {
    let column = ctx.str("column")?;
    let check = outlier_check(ctx.dataset, &column)?;
    let r = &check.report;
    let verdict = if r.outlier_count > 0 {
        Verdict::Violated
    } else {
        Verdict::Pass
    };
    let summary = format!(
        "{column}: {} of {} values ({}) lie outside [{}, {}]",
        r.outlier_count,
        r.n,
        pct(check.fraction),
        plain(r.lower_fence),
        plain(r.upper_fence)
    );
    let v = vars([
        ("column", column.clone()),
        ("outlier_count", r.outlier_count.to_string()),
        ("n", r.n.to_string()),
        ("fraction_pct", pct(check.fraction)),
        ("q1", plain(r.q1)),
        ("q3", plain(r.q3)),
        ("lower_fence", plain(r.lower_fence)),
        ("upper_fence", plain(r.upper_fence)),
    ]);
    Ok(StepResult {
        outputs: serde_json::to_value(&check)?,
        verdict: Some(verdict),
        vars: v,
        summary,
    })
}

pub(super) fn outliers_multi(ctx: &StepContext) -> Result<StepResult, BindingError> {
    let columns = ctx.list("columns")?;
    let threshold = ctx.f64("threshold")?;
    let checks = columns
        .iter()
        .map(|c| outlier_check(ctx.dataset, c))
        .collect::<Result<Vec<_>, _>>()?;
    let flagged: Vec<&str> = checks
        .iter()
        .filter(|c| c.fraction > threshold)
        .map(|c| c.column.as_str())
        .collect();
    let worst = checks
        .iter()
        .reduce(|best, c| if c.fraction > best.fraction { c } else { best })
        .ok_or_else(|| BindingError::new("no variables selected"))?;
    let table = checks
        .iter()
        .map(|c| format!("{} {}", c.column, pct(c.fraction)))
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
        "outlier share per variable: {table}; above {}: {flagged_text}",
        pct(threshold)
    );
    let v = vars([
        ("table", table),
        ("flagged", flagged_text),
        ("flagged_count", flagged.len().to_string()),
        ("variable_count", checks.len().to_string()),
        ("threshold_pct", pct(threshold)),
        ("worst_variable", worst.column.clone()),
        ("worst_fraction_pct", pct(worst.fraction)),
        ("worst_lower_fence", plain(worst.report.lower_fence)),
        ("worst_upper_fence", plain(worst.report.upper_fence)),
    ]);
    let outputs = serde_json::json!({
        "threshold": threshold,
        "flagged": flagged,
        "variables": serde_json::to_value(&checks)?,
    });
    Ok(StepResult {
        outputs,
        verdict: Some(verdict),
        vars: v,
        summary,
    })
}

/// Non-missing values of `variable` in rows whose `group_column` reads `group`.
pub(crate) fn group_values(
    d: &Dataset,
    variable: &str,
    group_column: &str,
    group: &str,
) -> Result<Vec<f64>, BindingError> {
    let values = d.column(variable)?.as_numeric()?;
    let groups = d.column(group_column)?;
    Ok((0..d.row_count())
        .filter(|&r| groups.cell_text(r).as_deref() == Some(group))
        .filter_map(|r| values[r])
        .collect())
}

pub(crate) fn as_value<T: Serialize>(x: T) -> Result<Value, BindingError> {
    Ok(serde_json::to_value(x)?)
}
