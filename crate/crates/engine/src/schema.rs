//! Input validation and default/preset/explicit resolution.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use stepwise_core::data::{DType, Dataset};
use thiserror::Error;

use crate::definition::{split_ref, ParamSpec, ParamType, StepDef};
use crate::text::plain;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamViolation {
    pub param: String,
    pub reason: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[error("invalid inputs for step `{step_id}`: {}", describe(.violations))]
pub struct SchemaError {
    pub step_id: String,
    pub violations: Vec<ParamViolation>,
}

fn describe(v: &[ParamViolation]) -> String {
    v.iter()
        .map(|v| format!("{}: {}", v.param, v.reason))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Where a resolved parameter value came from. Explicit submissions win over
/// presets, which win over schema defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputSource {
    Default,
    Preset,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedParam {
    pub value: Value,
    pub source: InputSource,
}

pub type Resolved = BTreeMap<String, ResolvedParam>;

pub(crate) fn values_of(resolved: &Resolved) -> Map<String, Value> {
    resolved
        .iter()
        .map(|(k, v)| (k.clone(), v.value.clone()))
        .collect()
}

/// Resolves and validates the inputs of `step`. `earlier` looks up resolved
/// values of earlier steps by `(step_id, param)`.
pub fn resolve_inputs(
    step: &StepDef,
    explicit: &Map<String, Value>,
    presets: &Map<String, Value>,
    dataset: &Dataset,
    earlier: &dyn Fn(&str, &str) -> Option<Value>,
) -> Result<Resolved, SchemaError> {
    let mut violations = Vec::new();
    let known: HashSet<&str> = step.input_schema.iter().map(|p| p.name.as_str()).collect();
    for name in explicit.keys() {
        if !known.contains(name.as_str()) {
            violations.push(ParamViolation {
                param: name.clone(),
                reason: "unknown parameter".into(),
            });
        }
    }

    let mut resolved = Resolved::new();
    for spec in &step.input_schema {
        let candidate = explicit
            .get(&spec.name)
            .map(|v| (v, InputSource::Explicit))
            .or_else(|| presets.get(&spec.name).map(|v| (v, InputSource::Preset)))
            .or_else(|| spec.default.as_ref().map(|v| (v, InputSource::Default)));
        let Some((value, source)) = candidate else {
            violations.push(ParamViolation {
                param: spec.name.clone(),
                reason: "a value is required".into(),
            });
            continue;
        };
        let lookup = |r: &str| -> Option<Value> {
            let (sid, param) = split_ref(r, &step.id);
            if sid == step.id {
                resolved.get(param).map(|p: &ResolvedParam| p.value.clone())
            } else {
                earlier(sid, param)
            }
        };
        match check(spec, value, dataset, &lookup) {
            Ok(value) => {
                resolved.insert(spec.name.clone(), ResolvedParam { value, source });
            }
            Err(reason) => violations.push(ParamViolation {
                param: spec.name.clone(),
                reason,
            }),
        }
    }

    if violations.is_empty() {
        Ok(resolved)
    } else {
        Err(SchemaError {
            step_id: step.id.clone(),
            violations,
        })
    }
}

fn column_ok(dataset: &Dataset, name: &str, dtype: Option<DType>) -> Result<(), String> {
    let col = dataset
        .column(name)
        .map_err(|_| format!("column `{name}` does not exist"))?;
    match dtype {
        Some(d) if col.dtype() != d => {
            Err(format!("column `{name}` is {}, expected {d}", col.dtype()))
        }
        _ => Ok(()),
    }
}

fn excluded_names(exclude: &[String], lookup: &dyn Fn(&str) -> Option<Value>) -> Vec<String> {
    exclude
        .iter()
        .filter_map(|r| lookup(r))
        .flat_map(|v| match v {
            Value::String(s) => vec![s],
            Value::Array(items) => items
                .into_iter()
                .filter_map(|i| i.as_str().map(str::to_string))
                .collect(),
            _ => vec![],
        })
        .collect()
}

fn check(
    spec: &ParamSpec,
    value: &Value,
    dataset: &Dataset,
    lookup: &dyn Fn(&str) -> Option<Value>,
) -> Result<Value, String> {
    match &spec.ty {
        ParamType::Dataset => match value {
            Value::String(s) if !s.trim().is_empty() => Ok(value.clone()),
            _ => Err("expected a non-empty data source label".into()),
        },
        ParamType::ColumnRef { dtype, exclude } => {
            let name = value.as_str().ok_or("expected a column name")?;
            column_ok(dataset, name, *dtype)?;
            if excluded_names(exclude, lookup).iter().any(|e| e == name) {
                return Err(format!("column `{name}` is already used elsewhere"));
            }
            Ok(value.clone())
        }
        ParamType::ColumnRefList {
            dtype,
            min_items,
            exclude,
        } => {
            let items = value.as_array().ok_or("expected a list of column names")?;
            if items.len() < *min_items {
                return Err(format!("at least {min_items} column(s) required"));
            }
            let excluded = excluded_names(exclude, lookup);
            let mut seen = HashSet::new();
            for item in items {
                let name = item.as_str().ok_or("expected a list of column names")?;
                column_ok(dataset, name, *dtype)?;
                if !seen.insert(name) {
                    return Err(format!("column `{name}` is listed twice"));
                }
                if excluded.iter().any(|e| e == name) {
                    return Err(format!("column `{name}` is already used elsewhere"));
                }
            }
            Ok(value.clone())
        }
        ParamType::CategoryValue {
            column,
            distinct_from,
        } => {
            let text = match value {
                Value::String(s) => s.clone(),
                Value::Number(n) => plain(n.as_f64().unwrap_or(f64::NAN)),
                _ => return Err("expected a category value".into()),
            };
            let column_name = lookup(column)
                .and_then(|v| v.as_str().map(str::to_string))
                .ok_or_else(|| format!("`{column}` must be chosen first"))?;
            let col = dataset
                .column(&column_name)
                .map_err(|_| format!("column `{column_name}` does not exist"))?;
            if !col.distinct_text().contains(&text) {
                return Err(format!("`{text}` is not a value of column `{column_name}`"));
            }
            if let Some(other) = distinct_from {
                if lookup(other)
                    .and_then(|v| v.as_str().map(str::to_string))
                    .as_deref()
                    == Some(text.as_str())
                {
                    return Err(format!("must differ from `{other}`"));
                }
            }
            Ok(Value::String(text))
        }
        ParamType::Enum { options } => {
            let s = value.as_str().ok_or("expected one of the listed options")?;
            if options.iter().any(|o| o == s) {
                Ok(value.clone())
            } else {
                Err(format!("`{s}` is not one of: {}", options.join(", ")))
            }
        }
        ParamType::Real {
            min,
            max,
            exclusive_min,
            exclusive_max,
            integer,
        } => {
            let x = value.as_f64().ok_or("expected a number")?;
            if !x.is_finite() {
                return Err("expected a finite number".into());
            }
            if *integer && x.fract() != 0.0 {
                return Err("expected a whole number".into());
            }
            if let Some(lo) = min {
                if x < *lo || (*exclusive_min && x == *lo) {
                    let rel = if *exclusive_min { ">" } else { ">=" };
                    return Err(format!("must be {rel} {}", plain(*lo)));
                }
            }
            if let Some(hi) = max {
                if x > *hi || (*exclusive_max && x == *hi) {
                    let rel = if *exclusive_max { "<" } else { "<=" };
                    return Err(format!("must be {rel} {}", plain(*hi)));
                }
            }
            Ok(value.clone())
        }
        ParamType::Flag => match value {
            Value::Bool(_) => Ok(value.clone()),
            _ => Err("expected true or false".into()),
        },
    }
}
