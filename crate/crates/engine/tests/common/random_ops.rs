//! Random operation sequences over a session, for lifecycle and replay
//! checks. Shared with the acceptance suite.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde_json::{Map, Value};
use stepwise_core::data::{
    drop_rows_where, log_transform, Column, Comparator, Dataset, Literal, Predicate,
};
use stepwise_engine::definition::{ActionTemplate, ParamType, StepDef};
use stepwise_engine::session::{Session, StepStatus};

const NUMERIC: [&str; 4] = ["y", "x1", "x2", "x3"];

/// Small mixed-type dataset: four numeric columns (x3 sometimes an exact
/// multiple of x1), a three-level category and occasional missing cells.
pub fn synthetic_dataset(rng: &mut impl Rng) -> Dataset {
    let n = rng.random_range(24..60);
    let collinear = rng.random_bool(0.2);
    let mut cols: Vec<Vec<Option<f64>>> = (0..4).map(|_| Vec::with_capacity(n)).collect();
    let mut g = Vec::with_capacity(n);
    for i in 0..n {
        let x1: f64 = rng.random_range(-5.0..5.0);
        let x2: f64 = rng.random_range(0.0..10.0) + if i % 7 == 0 { 50.0 } else { 0.0 };
        let x3 = if collinear {
            2.0 * x1
        } else {
            rng.random_range(-1.0..1.0)
        };
        let y = 1.0 + 0.5 * x1 - 0.2 * x2 + rng.random_range(-1.0..1.0);
        for (c, v) in cols.iter_mut().zip([y, x1, x2, x3]) {
            c.push((!rng.random_bool(0.03)).then_some(v));
        }
        g.push(Some(["a", "b", "c"][i % 3].to_string()));
    }
    let mut columns: Vec<Column> = NUMERIC
        .iter()
        .zip(cols)
        .map(|(name, v)| Column::numeric(*name, v))
        .collect();
    columns.push(Column::categorical("g", g));
    Dataset::new(columns).unwrap()
}

fn random_value(
    spec: &stepwise_engine::definition::ParamSpec,
    chosen: &Map<String, Value>,
    dataset: &Dataset,
    rng: &mut impl Rng,
) -> Option<Value> {
    if spec.default.is_some() && rng.random_bool(0.3) {
        return None;
    }
    let v = match &spec.ty {
        ParamType::Dataset => Value::String("synthetic".into()),
        ParamType::ColumnRef { .. } => {
            let mut names: Vec<&str> = NUMERIC.to_vec();
            names.extend(["g", "missing"]);
            Value::String(names.choose(rng).unwrap().to_string())
        }
        ParamType::ColumnRefList { .. } => {
            let k = rng.random_range(1..=3);
            let picked: Vec<Value> = NUMERIC[1..]
                .choose_multiple(rng, k)
                .map(|s| Value::String(s.to_string()))
                .collect();
            Value::Array(picked)
        }
        ParamType::CategoryValue { column, .. } => {
            let col = chosen.get(column).and_then(Value::as_str).unwrap_or("g");
            let values = dataset
                .column(col)
                .map(|c| c.distinct_text())
                .unwrap_or_default();
            match values.choose(rng) {
                Some(v) if rng.random_bool(0.95) => Value::String(v.clone()),
                _ => Value::String("zzz".into()),
            }
        }
        ParamType::Enum { options } => Value::String(options.choose(rng).unwrap().clone()),
        ParamType::Real { integer: true, .. } => Value::from(rng.random_range(0..100u64)),
        ParamType::Real { min, max, .. } => {
            let (lo, hi) = (min.unwrap_or(0.0), max.unwrap_or(1.0));
            Value::from(rng.random_range(lo..=hi).max(0.05))
        }
        ParamType::Flag => Value::Bool(rng.random_bool(0.5)),
    };
    Some(v)
}

pub fn random_inputs(step: &StepDef, dataset: &Dataset, rng: &mut impl Rng) -> Map<String, Value> {
    let mut chosen = Map::new();
    for spec in &step.input_schema {
        if let Some(v) = random_value(spec, &chosen, dataset, rng) {
            chosen.insert(spec.name.clone(), v);
        }
    }
    chosen
}

fn variant(base: &Dataset, rng: &mut impl Rng) -> Dataset {
    match rng.random_range(0..4) {
        0 => base.clone(),
        1 => drop_rows_where(
            base,
            &Predicate::new("x2", Comparator::Gt, Literal::Number(40.0)),
        )
        .unwrap(),
        2 => {
            let gone = *["g", "x1", "y"].choose(rng).unwrap();
            let keep: Vec<Column> = base
                .columns()
                .filter(|c| c.name() != gone)
                .cloned()
                .collect();
            Dataset::new(keep).unwrap()
        }
        _ => log_transform(base, "x2").unwrap(),
    }
}

/// Performs one random operation, asserting the per-operation properties.
/// Errors from the engine are expected and ignored; they must leave the
/// session untouched.
pub fn random_op(session: &mut Session, base: &Dataset, rng: &mut impl Rng) {
    let wf = session.workflow().clone();
    let before = session.states().to_vec();
    match rng.random_range(0..10) {
        0..=4 => {
            let target = match session.active_step() {
                Some(s) if rng.random_bool(0.9) => s.def_id.clone(),
                _ => wf.steps.choose(rng).unwrap().id.clone(),
            };
            let inputs = random_inputs(wf.step(&target).unwrap(), session.dataset(), rng);
            if session.submit_inputs(&target, inputs).is_err() {
                assert_eq!(session.states(), before.as_slice());
            }
        }
        5 | 6 => {
            let done: Vec<usize> = (0..before.len())
                .filter(|&i| before[i].status == StepStatus::Done)
                .collect();
            let k = *done.choose(rng).unwrap_or(&0);
            let step = &wf.steps[k];
            let inputs = if rng.random_bool(0.3) {
                before[k].inputs.clone().unwrap_or_default()
            } else {
                random_inputs(step, session.dataset(), rng)
            };
            match session.edit_step(&step.id, inputs) {
                Ok(()) => assert_eq!(
                    &session.states()[..k],
                    &before[..k],
                    "edit touched earlier steps"
                ),
                Err(_) => assert_eq!(session.states(), before.as_slice()),
            }
        }
        7 => session.replace_dataset(variant(base, rng)),
        _ => {
            let offers: Vec<(String, String, bool)> = before
                .iter()
                .flat_map(|s| {
                    s.active_suggestions.iter().map(move |sg| {
                        let snippet = matches!(sg.action, ActionTemplate::EmitSnippet { .. });
                        (s.def_id.clone(), sg.id.clone(), snippet)
                    })
                })
                .collect();
            if let Some((step, id, snippet)) = offers.choose(rng) {
                session
                    .apply_action(step, id)
                    .expect("offered actions always apply");
                if *snippet {
                    let statuses: Vec<_> = session.states().iter().map(|s| s.status).collect();
                    let old: Vec<_> = before.iter().map(|s| s.status).collect();
                    assert_eq!(statuses, old);
                }
            } else {
                assert!(session.apply_action("load", "none").is_err());
            }
        }
    }
}
