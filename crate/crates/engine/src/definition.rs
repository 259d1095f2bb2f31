//! Declarative workflow definitions.
//!
//! Workflows are data: steps, input schemas, explanation texts and suggestion
//! rules all come from a JSON document. Only the compute bindings they name
//! are code (see [`crate::library`]).

use std::collections::{BTreeMap, HashSet};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use stepwise_core::data::DType;
use thiserror::Error;

use crate::library;
use crate::snippet::SnippetRegistry;

const BUILTIN_WORKFLOWS: &str = include_str!("../assets/workflows.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    UserInput,
    AssumptionChecking,
    ResultPresentation,
}

impl std::fmt::Display for StepKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StepKind::UserInput => "user input",
            StepKind::AssumptionChecking => "assumption check",
            StepKind::ResultPresentation => "result",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkflowDef {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub steps: Vec<StepDef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDef {
    pub id: String,
    pub kind: StepKind,
    pub title: String,
    pub explanation: ExplanationDef,
    #[serde(default)]
    pub input_schema: Vec<ParamSpec>,
    pub compute: ComputeDef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationDef {
    pub objective: String,
    pub concepts_and_interpretation: String,
    /// Filled with the step's result variables after it runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interpretation_template: Option<String>,
    #[serde(default)]
    pub suggested_actions: Vec<SuggestionRule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuggestionRule {
    pub id: String,
    pub when: Trigger,
    /// Message template; `{var}` placeholders are filled from step results.
    pub message: String,
    pub action: ActionTemplate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompareOp {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl CompareOp {
    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            CompareOp::Eq => lhs == rhs,
            CompareOp::Ne => lhs != rhs,
            CompareOp::Lt => lhs < rhs,
            CompareOp::Le => lhs <= rhs,
            CompareOp::Gt => lhs > rhs,
            CompareOp::Ge => lhs >= rhs,
        }
    }
}

/// When a suggestion applies, evaluated against the step verdict and result
/// variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Trigger {
    Always,
    Passed,
    Violated,
    Compare {
        var: String,
        op: CompareOp,
        value: f64,
    },
    All {
        of: Vec<Trigger>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ActionTemplate {
    PresetParameter {
        target_step: String,
        param: String,
        value: Value,
    },
    EmitSnippet {
        template_id: String,
        bindings: BTreeMap<String, String>,
    },
    ShowNotice {
        text: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    #[serde(default)]
    pub label: String,
    #[serde(flatten)]
    pub ty: ParamType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<Value>,
}

/// Parameter types. References to other parameters use `step.param` for an
/// earlier step and a bare `param` for the same step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ParamType {
    /// Label of the data source; the data itself travels separately.
    Dataset,
    ColumnRef {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dtype: Option<DType>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        exclude: Vec<String>,
    },
    ColumnRefList {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dtype: Option<DType>,
        #[serde(default = "one")]
        min_items: usize,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        exclude: Vec<String>,
    },
    CategoryValue {
        column: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        distinct_from: Option<String>,
    },
    Enum {
        options: Vec<String>,
    },
    Real {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max: Option<f64>,
        #[serde(default)]
        exclusive_min: bool,
        #[serde(default)]
        exclusive_max: bool,
        #[serde(default)]
        integer: bool,
    },
    Flag,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComputeDef {
    pub binding: String,
    #[serde(default)]
    pub config: BTreeMap<String, ConfigValue>,
}

/// A binding argument: either a reference to a resolved step input or a
/// literal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigValue {
    Ref { from: String },
    Literal(Value),
}

/// Splits `step.param`; a bare name refers to `own_step`.
pub(crate) fn split_ref<'a>(reference: &'a str, own_step: &'a str) -> (&'a str, &'a str) {
    reference.split_once('.').unwrap_or((own_step, reference))
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("workflow `{workflow}`: {message}")]
pub struct DefinitionError {
    pub workflow: String,
    pub message: String,
}

impl WorkflowDef {
    pub fn step(&self, id: &str) -> Option<&StepDef> {
        self.steps.iter().find(|s| s.id == id)
    }

    pub fn step_index(&self, id: &str) -> Option<usize> {
        self.steps.iter().position(|s| s.id == id)
    }

    pub fn assumption_step_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| s.kind == StepKind::AssumptionChecking)
            .count()
    }

    /// Checks the structural invariants, binding names, references and
    /// suggestion targets.
    pub fn validate(&self, snippets: &SnippetRegistry) -> Result<(), DefinitionError> {
        let err = |message: String| DefinitionError {
            workflow: self.id.clone(),
            message,
        };
        let mut ids = HashSet::new();
        for s in &self.steps {
            if !ids.insert(s.id.as_str()) {
                return Err(err(format!("duplicate step id `{}`", s.id)));
            }
        }
        match self.steps.last() {
            Some(s) if s.kind == StepKind::ResultPresentation => {}
            _ => return Err(err("the final step must present results".into())),
        }
        if self.assumption_step_count() == 0 {
            return Err(err(
                "at least one assumption-checking step is required".into()
            ));
        }

        for (index, step) in self.steps.iter().enumerate() {
            let here = |m: String| err(format!("step `{}`: {m}", step.id));
            if step.explanation.objective.trim().is_empty() {
                return Err(here("empty objective".into()));
            }
            if step.kind == StepKind::UserInput && step.input_schema.is_empty() {
                return Err(here("user-input steps need at least one parameter".into()));
            }
            if step.kind != StepKind::AssumptionChecking
                && !step.explanation.suggested_actions.is_empty()
            {
                return Err(here("only assumption checks may carry suggestions".into()));
            }
            if !library::has_binding(&step.compute.binding) {
                return Err(here(format!("unknown binding `{}`", step.compute.binding)));
            }
            let mut names = HashSet::new();
            for p in &step.input_schema {
                if !names.insert(p.name.as_str()) {
                    return Err(here(format!("duplicate parameter `{}`", p.name)));
                }
            }
            let check_ref = |r: &str, allow_self: bool| -> Result<(), DefinitionError> {
                let (sid, param) = split_ref(r, &step.id);
                let target = self
                    .step_index(sid)
                    .ok_or_else(|| here(format!("reference `{r}` names an unknown step")))?;
                if target > index || (target == index && !allow_self) {
                    return Err(here(format!(
                        "reference `{r}` must point to an earlier step"
                    )));
                }
                if !self.steps[target]
                    .input_schema
                    .iter()
                    .any(|p| p.name == param)
                {
                    return Err(here(format!("reference `{r}` names an unknown parameter")));
                }
                Ok(())
            };
            for p in &step.input_schema {
                match &p.ty {
                    ParamType::ColumnRef { exclude, .. }
                    | ParamType::ColumnRefList { exclude, .. } => {
                        for r in exclude {
                            check_ref(r, true)?;
                        }
                    }
                    ParamType::CategoryValue {
                        column,
                        distinct_from,
                    } => {
                        check_ref(column, true)?;
                        if let Some(d) = distinct_from {
                            check_ref(d, true)?;
                        }
                    }
                    ParamType::Enum { options } if options.is_empty() => {
                        return Err(here(format!("enum `{}` has no options", p.name)));
                    }
                    _ => {}
                }
            }
            for value in step.compute.config.values() {
                if let ConfigValue::Ref { from } = value {
                    check_ref(from, true)?;
                }
            }
            for rule in &step.explanation.suggested_actions {
                match &rule.action {
                    ActionTemplate::PresetParameter {
                        target_step, param, ..
                    } => {
                        let target = self.step_index(target_step).ok_or_else(|| {
                            here(format!("suggestion `{}` targets unknown step", rule.id))
                        })?;
                        if target <= index {
                            return Err(here(format!(
                                "suggestion `{}` must preset a later step",
                                rule.id
                            )));
                        }
                        if !self.steps[target]
                            .input_schema
                            .iter()
                            .any(|p| &p.name == param)
                        {
                            return Err(here(format!(
                                "suggestion `{}` presets unknown parameter `{param}`",
                                rule.id
                            )));
                        }
                    }
                    ActionTemplate::EmitSnippet {
                        template_id,
                        bindings,
                    } => {
                        let template = snippets.get(template_id).ok_or_else(|| {
                            here(format!("suggestion `{}` uses unknown template", rule.id))
                        })?;
                        if let Some(slot) =
                            template.slots.iter().find(|s| !bindings.contains_key(*s))
                        {
                            return Err(here(format!(
                                "suggestion `{}` leaves slot `{slot}` unbound",
                                rule.id
                            )));
                        }
                    }
                    ActionTemplate::ShowNotice { .. } => {}
                }
            }
        }
        Ok(())
    }
}

/// Parses and validates a workflow document (a JSON array of workflows).
pub fn load_workflows(
    json: &str,
    snippets: &SnippetRegistry,
) -> Result<Vec<WorkflowDef>, DefinitionError> {
    let defs: Vec<WorkflowDef> = serde_json::from_str(json).map_err(|e| DefinitionError {
        workflow: "<document>".into(),
        message: e.to_string(),
    })?;
    let mut ids = HashSet::new();
    for d in &defs {
        if !ids.insert(d.id.clone()) {
            return Err(DefinitionError {
                workflow: d.id.clone(),
                message: "duplicate workflow id".into(),
            });
        }
        d.validate(snippets)?;
    }
    Ok(defs)
}

/// The bundled linear-regression and two-sample t-test workflows.
pub fn builtin_workflows() -> &'static [Arc<WorkflowDef>] {
    static DEFS: OnceLock<Vec<Arc<WorkflowDef>>> = OnceLock::new();
    DEFS.get_or_init(|| {
        load_workflows(BUILTIN_WORKFLOWS, SnippetRegistry::builtin())
            .expect("bundled workflows are valid")
            .into_iter()
            .map(Arc::new)
            .collect()
    })
}

pub fn builtin_workflow(id: &str) -> Option<Arc<WorkflowDef>> {
    builtin_workflows().iter().find(|w| w.id == id).cloned()
}
