//! Decision scripts and the runner that applies decisions to a session.
//!
//! Both the scripted and the interactive front ends funnel every decision
//! through [`Runner::apply`], which is what makes their reports identical for
//! identical decisions.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use stepwise_core::data::{
    derive_column, drop_rows_where, load_csv, log_transform, Comparator, CsvOptions, Dataset, Expr,
    Literal, Predicate,
};
use stepwise_engine::{builtin_workflow, ActionEffect, Session, StepState, StepStatus};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionScript {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workflow_id: Option<String>,
    /// CSV path, relative to the script file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(default)]
    pub decisions: Vec<Decision>,
}

impl DecisionScript {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read script {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid script {}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Decision {
    /// Inputs for a step: submitted when it awaits input, an edit when it
    /// is already done.
    Inputs {
        step: String,
        #[serde(default)]
        inputs: Map<String, Value>,
    },
    Action {
        apply_action: ActionRef,
    },
    Replace {
        replace_dataset: Reimport,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionRef {
    pub step: String,
    pub suggestion: String,
}

/// A re-import: start from a file (or the session's current data), apply
/// the transforms in order, then replace the session dataset once.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reimport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(default)]
    pub transforms: Vec<Transform>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Transform {
    DropRows {
        column: String,
        op: Comparator,
        value: Literal,
    },
    DeriveColumn {
        name: String,
        expr: String,
    },
    LogTransform {
        column: String,
    },
}

impl Transform {
    pub fn apply(&self, d: &Dataset) -> Result<Dataset> {
        Ok(match self {
            Transform::DropRows { column, op, value } => {
                drop_rows_where(d, &Predicate::new(column.clone(), *op, value.clone()))?
            }
            Transform::DeriveColumn { name, expr } => {
                derive_column(d, name, &expr.parse::<Expr>()?)?
            }
            Transform::LogTransform { column } => log_transform(d, column)?,
        })
    }

    /// Parses the interactive form, e.g. `drop-rows price = 500001`,
    /// `derive-column ratio = a / b` or `log-transform price`.
    pub fn parse(line: &str) -> Result<Self> {
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["drop-rows", column, op, rest @ ..] if !rest.is_empty() => {
                let op: Comparator = serde_json::from_value(Value::String(op.to_string()))
                    .map_err(|_| anyhow!("unknown comparison `{op}`"))?;
                let text = rest.join(" ");
                let value = match text.parse::<f64>() {
                    Ok(x) => Literal::Number(x),
                    Err(_) => Literal::Text(text.trim_matches('"').to_string()),
                };
                Ok(Transform::DropRows {
                    column: column.to_string(),
                    op,
                    value,
                })
            }
            ["derive-column", name, "=", rest @ ..] if !rest.is_empty() => Ok(Transform::DeriveColumn {
                name: name.to_string(),
                expr: rest.join(" "),
            }),
            ["log-transform", column] => Ok(Transform::LogTransform {
                column: column.to_string(),
            }),
            _ => bail!("expected `drop-rows <column> <op> <value>`, `derive-column <name> = <a> <op> <b>` or `log-transform <column>`"),
        }
    }
}

pub fn read_csv(path: &Path) -> Result<Dataset> {
    let file =
        std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    load_csv(file, &CsvOptions::default())
        .with_context(|| format!("cannot parse {}", path.display()))
}

/// What a decision did, for progress output.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Applied {
    Submitted { step: String },
    Edited { step: String },
    Action { step: String, effect: ActionEffect },
    Reimported { version: u64, rows: usize },
}

pub struct Runner {
    pub session: Session,
    /// Overrides the default of every `seed` parameter that a decision
    /// leaves unset.
    seed: Option<u64>,
    base_dir: PathBuf,
}

impl Runner {
    /// Opens `data` under `workflow_id`. The session is labelled with the
    /// file name only, so reports do not depend on where files live.
    pub fn open(
        workflow_id: &str,
        data: &Path,
        seed: Option<u64>,
        base_dir: &Path,
    ) -> Result<Self> {
        let workflow = builtin_workflow(workflow_id).ok_or_else(|| {
            anyhow!("unknown workflow `{workflow_id}` (available: linear-regression, t-test)")
        })?;
        let dataset = read_csv(data)?;
        let label = data
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| data.display().to_string());
        Ok(Runner {
            session: Session::create(workflow, dataset, &label)?,
            seed,
            base_dir: base_dir.to_path_buf(),
        })
    }

    fn with_seed(&self, step: &str, mut inputs: Map<String, Value>) -> Map<String, Value> {
        if let (Some(seed), Some(def)) = (self.seed, self.session.workflow().step(step)) {
            if def.input_schema.iter().any(|p| p.name == "seed") && !inputs.contains_key("seed") {
                inputs.insert("seed".into(), Value::from(seed));
            }
        }
        inputs
    }

    pub fn reimport_dataset(&self, r: &Reimport) -> Result<Dataset> {
        let mut d = match &r.data {
            Some(p) => read_csv(&self.base_dir.join(p))?,
            None => Dataset::clone(self.session.dataset()),
        };
        for t in &r.transforms {
            d = t.apply(&d)?;
        }
        Ok(d)
    }

    pub fn apply(&mut self, decision: &Decision) -> Result<Applied> {
        match decision {
            Decision::Inputs { step, inputs } => {
                let inputs = self.with_seed(step, inputs.clone());
                if self.session.state(step)?.status == StepStatus::Done {
                    self.session.edit_step(step, inputs)?;
                    Ok(Applied::Edited { step: step.clone() })
                } else {
                    self.session.submit_inputs(step, inputs)?;
                    Ok(Applied::Submitted { step: step.clone() })
                }
            }
            Decision::Action { apply_action: a } => {
                let effect = self.session.apply_action(&a.step, &a.suggestion)?;
                Ok(Applied::Action {
                    step: a.step.clone(),
                    effect,
                })
            }
            Decision::Replace { replace_dataset } => {
                let d = self.reimport_dataset(replace_dataset)?;
                if d.row_count() == 0 {
                    bail!("the transformed dataset has no rows");
                }
                self.session.replace_dataset(d);
                let d = self.session.dataset();
                Ok(Applied::Reimported {
                    version: d.version(),
                    rows: d.row_count(),
                })
            }
        }
    }

    /// Steps whose state differs between two snapshots.
    pub fn changed<'a>(&'a self, before: &[StepState]) -> Vec<&'a StepState> {
        self.session
            .states()
            .iter()
            .zip(before)
            .filter(|(now, then)| now != then)
            .map(|(now, _)| now)
            .collect()
    }
}
