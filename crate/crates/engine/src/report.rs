//! Session reports (JSON and plain text) and the exported model record.
//!
//! Reports carry no timestamps or session ids, so two sessions that made the
//! same decisions render byte-identical reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::definition::StepKind;
use crate::library::Verdict;
use crate::schema::{InputSource, ResolvedParam};
use crate::session::{ActionRecord, EngineError, HistoryEntry, Outcome, Session, StepStatus};

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetProvenance {
    pub source: String,
    pub version: u64,
    pub rows: usize,
    pub provenance: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub number: usize,
    pub id: String,
    pub title: String,
    pub kind: StepKind,
    pub status: StepStatus,
    pub inputs: BTreeMap<String, ResolvedParam>,
    pub verdict: Option<Verdict>,
    pub outcome: Option<Outcome>,
    pub summary: Option<String>,
    pub interpretation: Option<String>,
    pub actions_taken: Vec<ActionRecord>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub workflow_id: String,
    pub workflow_name: String,
    pub dataset: DatasetProvenance,
    pub complete: bool,
    pub steps: Vec<StepReport>,
    /// Assumption steps whose violation was neither fixed nor acted upon.
    pub unresolved_violations: Vec<String>,
    pub history: Vec<HistoryEntry>,
    /// Outputs of the final step, once it has run.
    pub final_results: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub schema_version: u32,
    pub workflow_id: String,
    pub dataset: DatasetProvenance,
    /// Resolved user decisions per step.
    pub decisions: BTreeMap<String, BTreeMap<String, Value>>,
    pub result: Value,
}

fn provenance(session: &Session) -> DatasetProvenance {
    let d = session.dataset();
    DatasetProvenance {
        source: session.source().to_string(),
        version: d.version(),
        rows: d.row_count(),
        provenance: d.provenance().to_vec(),
    }
}

pub fn build_report(session: &Session) -> Report {
    let states = session.states();
    let steps: Vec<StepReport> = states
        .iter()
        .enumerate()
        .map(|(i, s)| StepReport {
            number: i + 1,
            id: s.def_id.clone(),
            title: s.title.clone(),
            kind: s.kind,
            status: s.status,
            inputs: s.resolved_inputs.clone(),
            verdict: s.verdict,
            outcome: s.outcome,
            summary: s.summary.clone(),
            interpretation: s.interpretation.clone(),
            actions_taken: s.actions_taken.clone(),
            error: s.error.clone(),
        })
        .collect();
    let unresolved_violations = states
        .iter()
        .filter(|s| s.outcome == Some(Outcome::Violated))
        .map(|s| s.def_id.clone())
        .collect();
    Report {
        workflow_id: session.workflow().id.clone(),
        workflow_name: session.workflow().name.clone(),
        dataset: provenance(session),
        complete: session.is_complete(),
        steps,
        unresolved_violations,
        history: session.history().to_vec(),
        final_results: states.last().and_then(|s| s.outputs.clone()),
    }
}

pub fn export_model(session: &Session) -> Result<ModelRecord, EngineError> {
    let last = session.states().last().expect("workflows have steps");
    let result = last.outputs.clone().ok_or_else(|| {
        EngineError::Lifecycle(format!(
            "the model is not available until step `{}` has run",
            last.def_id
        ))
    })?;
    let decisions = session
        .states()
        .iter()
        .filter(|s| s.kind == StepKind::UserInput)
        .map(|s| {
            let values = s
                .resolved_inputs
                .iter()
                .map(|(k, v)| (k.clone(), v.value.clone()))
                .collect();
            (s.def_id.clone(), values)
        })
        .collect();
    Ok(ModelRecord {
        schema_version: MODEL_SCHEMA_VERSION,
        workflow_id: session.workflow().id.clone(),
        dataset: provenance(session),
        decisions,
        result,
    })
}

fn value_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(value_text).collect::<Vec<_>>().join(", "),
        other => other.to_string(),
    }
}

fn kind_text(k: StepKind) -> &'static str {
    match k {
        StepKind::UserInput => "user input",
        StepKind::AssumptionChecking => "assumption check",
        StepKind::ResultPresentation => "result",
    }
}

fn status_text(s: StepStatus) -> &'static str {
    match s {
        StepStatus::Pending => "pending",
        StepStatus::Active => "active",
        StepStatus::Done => "done",
        StepStatus::Invalidated => "invalidated",
    }
}

fn outcome_text(o: Outcome) -> &'static str {
    match o {
        Outcome::Pass => "pass",
        Outcome::Violated => "violated",
        Outcome::Bypassed => "bypassed (violated, action taken)",
    }
}

fn source_text(s: InputSource) -> &'static str {
    match s {
        InputSource::Default => "default",
        InputSource::Preset => "preset",
        InputSource::Explicit => "explicit",
    }
}

fn num(v: &Value) -> Option<f64> {
    v.as_f64()
}

/// Coefficient table or test summary pulled from the final outputs.
fn final_section(out: &mut String, results: &Value) {
    if let Some(terms) = results.pointer("/model/terms").and_then(Value::as_array) {
        let _ = writeln!(
            out,
            "  {:<28} {:>16} {:>14} {:>10} {:>12}",
            "term", "coefficient", "std. error", "t", "p"
        );
        for t in terms {
            let f = |k: &str| t.get(k).and_then(num).unwrap_or(f64::NAN);
            let _ = writeln!(
                out,
                "  {:<28} {:>16.4} {:>14.4} {:>10.3} {:>12}",
                t.get("name").and_then(Value::as_str).unwrap_or(""),
                f("coefficient"),
                f("std_error"),
                f("t_value"),
                crate::text::pvalue(f("p_value"))
            );
        }
        let m = &results["model"];
        let g = |k: &str| m.get(k).and_then(num).unwrap_or(f64::NAN);
        let _ = writeln!(
            out,
            "  R² = {:.4}, adjusted R² = {:.4}, residual std. error = {:.4}, n = {}",
            g("r_squared"),
            g("adj_r_squared"),
            g("sigma"),
            m.get("n_obs").and_then(Value::as_u64).unwrap_or(0)
        );
        match results.get("test_r_squared").and_then(num) {
            Some(r) => {
                let _ = writeln!(out, "  held-out R² = {r:.4}");
            }
            None => {
                let _ = writeln!(
                    out,
                    "  held-out R² not computed (all rows used for fitting)"
                );
            }
        }
    }
    if let Some(test) = results.get("test") {
        let g = |k: &str| test.get(k).and_then(num).unwrap_or(f64::NAN);
        let _ = writeln!(
            out,
            "  t = {:.4}, df = {:.2}, p = {}",
            g("t"),
            g("df"),
            crate::text::pvalue(g("p"))
        );
        let _ = writeln!(
            out,
            "  mean A = {:.4}, mean B = {:.4}, difference = {:.4}",
            g("mean_a"),
            g("mean_b"),
            g("mean_diff")
        );
        if let Some(d) = results.get("mean_difference") {
            let h = |k: &str| d.get(k).and_then(num).unwrap_or(f64::NAN);
            let _ = writeln!(
                out,
                "  95% CI for the difference: [{:.4}, {:.4}]",
                h("ci_low"),
                h("ci_high")
            );
        }
        if let Some(c) = results.get("conclusion").and_then(Value::as_str) {
            let _ = writeln!(out, "  {c}");
        }
    }
}

pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} ({})", report.workflow_name, report.workflow_id);
    let d = &report.dataset;
    let _ = writeln!(
        out,
        "Dataset: {} (version {}, {} rows)",
        d.source, d.version, d.rows
    );
    for p in &d.provenance {
        let _ = writeln!(out, "  - {p}");
    }
    let _ = writeln!(
        out,
        "Status: {}",
        if report.complete {
            "complete"
        } else {
            "in progress"
        }
    );

    for s in &report.steps {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "Step {}. {} [{}] - {}",
            s.number,
            s.title,
            kind_text(s.kind),
            status_text(s.status)
        );
        for (name, p) in &s.inputs {
            let _ = writeln!(
                out,
                "  {name} = {} ({})",
                value_text(&p.value),
                source_text(p.source)
            );
        }
        if let Some(sum) = &s.summary {
            let _ = writeln!(out, "  Result: {sum}");
        }
        if let Some(o) = s.outcome {
            let _ = writeln!(out, "  Outcome: {}", outcome_text(o));
        }
        if let Some(i) = &s.interpretation {
            let _ = writeln!(out, "  Interpretation: {i}");
        }
        for a in &s.actions_taken {
            let _ = writeln!(out, "  Action: {} ({})", a.suggestion_id, a.effect);
        }
        if let Some(e) = &s.error {
            let _ = writeln!(out, "  Error: {e}");
        }
    }

    let _ = writeln!(out);
    if report.unresolved_violations.is_empty() {
        let _ = writeln!(out, "Unresolved assumption violations: none");
    } else {
        let _ = writeln!(
            out,
            "Unresolved assumption violations: {}",
            report.unresolved_violations.join(", ")
        );
    }

    let _ = writeln!(out);
    let _ = writeln!(out, "History:");
    for h in &report.history {
        let tag = match (h.status, h.verdict) {
            (StepStatus::Invalidated, _) => " [invalidated]",
            (_, Some(Verdict::Pass)) => " [pass]",
            (_, Some(Verdict::Violated)) => " [violated]",
            _ => "",
        };
        let _ = writeln!(out, "  #{} {}{tag}: {}", h.seq, h.step_id, h.summary);
    }

    if let Some(results) = &report.final_results {
        let _ = writeln!(out);
        let _ = writeln!(out, "Final results:");
        final_section(&mut out, results);
    }
    out
}

pub fn render_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report serialises")
}
