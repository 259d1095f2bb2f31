//! Plain-text rendering of step states for the terminal. Plot data becomes
//! small summary tables.

use std::fmt::Write as _;

use serde_json::Value;
use stepwise_engine::definition::ParamType;
use stepwise_engine::text::num;
use stepwise_engine::{ActionEffect, Session, StepKind, StepState, StepStatus};

const MAX_HISTOGRAM_ROWS: usize = 10;

fn kind_word(k: StepKind) -> &'static str {
    match k {
        StepKind::UserInput => "user input",
        StepKind::AssumptionChecking => "assumption check",
        StepKind::ResultPresentation => "result",
    }
}

fn status_word(s: StepStatus) -> &'static str {
    match s {
        StepStatus::Pending => "pending",
        StepStatus::Active => "awaiting input",
        StepStatus::Done => "done",
        StepStatus::Invalidated => "needs attention",
    }
}

fn histogram_table(out: &mut String, h: &Value) {
    let (Some(edges), Some(counts)) = (h["bin_edges"].as_array(), h["counts"].as_array()) else {
        return;
    };
    let edges: Vec<f64> = edges.iter().filter_map(Value::as_f64).collect();
    let counts: Vec<u64> = counts.iter().filter_map(Value::as_u64).collect();
    if counts.is_empty() || edges.len() != counts.len() + 1 {
        return;
    }
    // Merge neighbouring bins so the table stays short.
    let group = counts.len().div_ceil(MAX_HISTOGRAM_ROWS);
    let _ = writeln!(
        out,
        "  distribution ({} bins, grouped by {group}):",
        counts.len()
    );
    let peak = counts
        .chunks(group)
        .map(|c| c.iter().sum::<u64>())
        .max()
        .unwrap_or(1)
        .max(1);
    for (i, chunk) in counts.chunks(group).enumerate() {
        let lo = edges[i * group];
        let hi = edges[(i * group + chunk.len()).min(edges.len() - 1)];
        let total: u64 = chunk.iter().sum();
        let bar = "#".repeat(((total * 30) / peak) as usize);
        let _ = writeln!(
            out,
            "    [{:>12}, {:>12})  {:>7}  {bar}",
            num(lo, 2),
            num(hi, 2),
            total
        );
    }
}

fn box_line(out: &mut String, b: &Value) {
    let g = |k: &str| b[k].as_f64().unwrap_or(f64::NAN);
    let _ = writeln!(
        out,
        "  box: q1 {}, median {}, q3 {}, fences [{}, {}]",
        num(g("q1"), 2),
        num(g("median"), 2),
        num(g("q3"), 2),
        num(g("lower_fence"), 2),
        num(g("upper_fence"), 2)
    );
}

/// One step: header, result summary, plot tables, interpretation, error.
pub fn step_block(number: usize, s: &StepState) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Step {number}. {} [{}] - {}",
        s.title,
        kind_word(s.kind),
        status_word(s.status)
    );
    if let Some(sum) = &s.summary {
        let _ = writeln!(out, "  {sum}");
    }
    if let Some(o) = s.outcome {
        let word = serde_json::to_value(o)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string));
        let _ = writeln!(out, "  check: {}", word.unwrap_or_default());
    }
    if let Some(outputs) = &s.outputs {
        if outputs["box_plot"].is_object() {
            box_line(&mut out, &outputs["box_plot"]);
        }
        if outputs["histogram"].is_object() {
            histogram_table(&mut out, &outputs["histogram"]);
        }
    }
    if let Some(i) = &s.interpretation {
        let _ = writeln!(out, "  {i}");
    }
    if let Some(e) = &s.error {
        let _ = writeln!(out, "  problem: {e}");
    }
    out
}

/// Every offered suggestion in step order; the position (from 1) is the
/// number users type to apply it.
pub fn numbered_suggestions(session: &Session) -> Vec<(String, String, String)> {
    session
        .states()
        .iter()
        .flat_map(|s| {
            s.active_suggestions
                .iter()
                .map(move |g| (s.def_id.clone(), g.id.clone(), g.message.clone()))
        })
        .collect()
}

pub fn suggestion_lines(session: &Session, steps: &[&str]) -> String {
    let mut out = String::new();
    for (i, (step, id, message)) in numbered_suggestions(session).iter().enumerate() {
        if steps.contains(&step.as_str()) {
            let _ = writeln!(out, "  [{}] {id}: {message}", i + 1);
        }
    }
    out
}

pub fn effect_text(effect: &ActionEffect) -> String {
    match effect {
        ActionEffect::Preset {
            target_step,
            param,
            value,
        } => format!("preset {param} = {value} for step `{target_step}`\n"),
        ActionEffect::Snippet(s) => format!("code for `{}`:\n{}", s.template_id, s.rendered_text),
        ActionEffect::Notice { text } => format!("note: {text}\n"),
    }
}

pub fn type_hint(ty: &ParamType) -> String {
    match ty {
        ParamType::Dataset => "data source".into(),
        ParamType::ColumnRef { dtype: Some(d), .. } => format!("{d} column"),
        ParamType::ColumnRef { .. } => "column".into(),
        ParamType::ColumnRefList { dtype: Some(d), .. } => format!("{d} columns, comma separated"),
        ParamType::ColumnRefList { .. } => "columns, comma separated".into(),
        ParamType::CategoryValue { .. } => "group value".into(),
        ParamType::Enum { options } => options.join(" | "),
        ParamType::Real { integer: true, .. } => "integer".into(),
        ParamType::Real { .. } => "number".into(),
        ParamType::Flag => "yes | no".into(),
    }
}
