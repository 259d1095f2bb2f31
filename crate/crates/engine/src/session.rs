//! Session lifecycle: ordered steps, submission, downstream rerun, dataset
//! replacement, suggested actions and the replayable event log.

use std::collections::BTreeMap;
use std::sync::Arc;

use chrono::{DateTime, TimeDelta, Utc};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use stepwise_core::data::{DType, Dataset};
use thiserror::Error;

use crate::definition::{split_ref, ActionTemplate, ConfigValue, StepKind, Trigger, WorkflowDef};
use crate::library::{self, StepContext, Verdict};
use crate::schema::{resolve_inputs, values_of, Resolved, SchemaError};
use crate::snippet::{CodeSnippet, SnippetError, SnippetRegistry};
use crate::text::fill;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("unknown workflow `{0}`")]
    UnknownWorkflow(String),
    #[error("unknown step `{0}`")]
    UnknownStep(String),
    #[error("step `{step_id}` has no active suggestion `{suggestion_id}`")]
    UnknownSuggestion {
        step_id: String,
        suggestion_id: String,
    },
    #[error("{0}")]
    Lifecycle(String),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("step `{step_id}` failed: {message}")]
    Compute { step_id: String, message: String },
    #[error("the dataset has no rows")]
    EmptyDataset,
    #[error(transparent)]
    Snippet(#[from] SnippetError),
    #[error("cannot replay event log: {0}")]
    Replay(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepStatus {
    Pending,
    Active,
    Done,
    Invalidated,
}

/// How an assumption check ended up: passed, violated, or violated but
/// consciously handled by applying one of its suggested actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Violated,
    Bypassed,
}

/// A suggestion instantiated against a step's current results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suggestion {
    pub id: String,
    pub message: String,
    pub action: ActionTemplate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub suggestion_id: String,
    /// Short description of what the action did.
    pub effect: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ActionEffect {
    Preset {
        target_step: String,
        param: String,
        value: Value,
    },
    Snippet(CodeSnippet),
    Notice {
        text: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepState {
    pub def_id: String,
    pub kind: StepKind,
    pub title: String,
    pub status: StepStatus,
    /// Inputs the user submitted explicitly (absent until first submission).
    pub inputs: Option<Map<String, Value>>,
    pub preset_inputs: Map<String, Value>,
    pub resolved_inputs: Resolved,
    pub outputs: Option<Value>,
    pub verdict: Option<Verdict>,
    pub outcome: Option<Outcome>,
    pub summary: Option<String>,
    pub interpretation: Option<String>,
    pub active_suggestions: Vec<Suggestion>,
    pub actions_taken: Vec<ActionRecord>,
    /// Why the step is Invalidated.
    pub error: Option<String>,
    #[serde(skip)]
    acknowledged: bool,
}

impl StepState {
    fn new(def: &crate::definition::StepDef) -> Self {
        StepState {
            def_id: def.id.clone(),
            kind: def.kind,
            title: def.title.clone(),
            status: StepStatus::Pending,
            inputs: None,
            preset_inputs: Map::new(),
            resolved_inputs: Resolved::new(),
            outputs: None,
            verdict: None,
            outcome: None,
            summary: None,
            interpretation: None,
            active_suggestions: Vec::new(),
            actions_taken: Vec::new(),
            error: None,
            acknowledged: false,
        }
    }

    fn clear_results(&mut self) {
        self.resolved_inputs.clear();
        self.outputs = None;
        self.verdict = None;
        self.outcome = None;
        self.summary = None;
        self.interpretation = None;
        self.active_suggestions.clear();
        self.error = None;
        self.acknowledged = false;
    }

    fn refresh_outcome(&mut self) {
        self.outcome = match (self.kind, self.verdict) {
            (StepKind::AssumptionChecking, Some(Verdict::Pass)) => Some(Outcome::Pass),
            (StepKind::AssumptionChecking, Some(Verdict::Violated)) if self.acknowledged => {
                Some(Outcome::Bypassed)
            }
            (StepKind::AssumptionChecking, Some(Verdict::Violated)) => Some(Outcome::Violated),
            _ => None,
        };
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub at: DateTime<Utc>,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum EventKind {
    SessionCreated {
        workflow_id: String,
        source: String,
        rows: usize,
        version: u64,
    },
    InputsSubmitted {
        step_id: String,
        inputs: Map<String, Value>,
    },
    StepEdited {
        step_id: String,
        inputs: Map<String, Value>,
    },
    DatasetReplaced {
        version: u64,
        rows: usize,
        /// The data itself is kept in memory for replay but not serialised.
        #[serde(skip)]
        dataset: Option<Arc<Dataset>>,
    },
    ActionApplied {
        step_id: String,
        suggestion_id: String,
    },
}

/// One computation in the session's history, kept so reports can show how
/// results evolved across edits and re-imports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    /// Event that triggered the computation.
    pub seq: u64,
    pub step_id: String,
    pub status: StepStatus,
    pub verdict: Option<Verdict>,
    pub summary: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepExplanation {
    pub step_id: String,
    pub title: String,
    pub kind: StepKind,
    pub objective: String,
    pub concepts_and_interpretation: String,
    /// Filled from the step's current results, when it has any.
    pub interpretation: Option<String>,
    pub suggestions: Vec<Suggestion>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ColumnInfo {
    pub name: String,
    pub dtype: DType,
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetInfo {
    pub source: String,
    pub version: u64,
    pub rows: usize,
    pub columns: Vec<ColumnInfo>,
    pub provenance: Vec<String>,
}

/// Whole-session snapshot for clients.
#[derive(Debug, Clone, Serialize)]
pub struct SessionView {
    pub id: String,
    pub workflow_id: String,
    pub workflow_name: String,
    pub dataset: DatasetInfo,
    pub active_step: Option<String>,
    pub steps: Vec<StepState>,
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    workflow: Arc<WorkflowDef>,
    source: String,
    original: Arc<Dataset>,
    dataset: Arc<Dataset>,
    states: Vec<StepState>,
    events: Vec<Event>,
    history: Vec<HistoryEntry>,
}

struct Computed {
    resolved: Resolved,
    result: library::StepResult,
}

impl Session {
    /// Starts a session; the load step runs immediately with `source` as its
    /// label.
    pub fn create(
        workflow: Arc<WorkflowDef>,
        dataset: Dataset,
        source: &str,
    ) -> Result<Session, EngineError> {
        if dataset.row_count() == 0 || dataset.column_count() == 0 {
            return Err(EngineError::EmptyDataset);
        }
        let dataset = Arc::new(dataset);
        let states = workflow.steps.iter().map(StepState::new).collect();
        let mut session = Session {
            id: uuid::Uuid::new_v4().simple().to_string(),
            workflow: workflow.clone(),
            source: source.to_string(),
            original: dataset.clone(),
            dataset: dataset.clone(),
            states,
            events: Vec::new(),
            history: Vec::new(),
        };
        let first = &workflow.steps[0];
        let mut inputs = Map::new();
        if let Some(p) = first.input_schema.first() {
            inputs.insert(p.name.clone(), Value::String(source.to_string()));
        }
        let computed = session.compute(0, &inputs)?;
        let seq = session.log(EventKind::SessionCreated {
            workflow_id: workflow.id.clone(),
            source: source.to_string(),
            rows: dataset.row_count(),
            version: dataset.version(),
        });
        session.install(0, inputs, computed, seq);
        session.recompute_from(1, seq);
        Ok(session)
    }

    pub fn create_builtin(
        workflow_id: &str,
        dataset: Dataset,
        source: &str,
    ) -> Result<Session, EngineError> {
        let wf = crate::definition::builtin_workflow(workflow_id)
            .ok_or_else(|| EngineError::UnknownWorkflow(workflow_id.to_string()))?;
        Session::create(wf, dataset, source)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn workflow(&self) -> &Arc<WorkflowDef> {
        &self.workflow
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn dataset(&self) -> &Arc<Dataset> {
        &self.dataset
    }

    pub fn original_dataset(&self) -> &Arc<Dataset> {
        &self.original
    }

    pub fn states(&self) -> &[StepState] {
        &self.states
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    pub fn state(&self, step_id: &str) -> Result<&StepState, EngineError> {
        Ok(&self.states[self.index(step_id)?])
    }

    /// The step awaiting the user: Active or Invalidated. `None` once every
    /// step is Done.
    pub fn active_step(&self) -> Option<&StepState> {
        self.states
            .iter()
            .find(|s| matches!(s.status, StepStatus::Active | StepStatus::Invalidated))
    }

    pub fn is_complete(&self) -> bool {
        self.states.iter().all(|s| s.status == StepStatus::Done)
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            id: self.id.clone(),
            workflow_id: self.workflow.id.clone(),
            workflow_name: self.workflow.name.clone(),
            dataset: self.dataset_info(),
            active_step: self.active_step().map(|s| s.def_id.clone()),
            steps: self.states.clone(),
        }
    }

    pub fn dataset_info(&self) -> DatasetInfo {
        DatasetInfo {
            source: self.source.clone(),
            version: self.dataset.version(),
            rows: self.dataset.row_count(),
            columns: self
                .dataset
                .columns()
                .map(|c| ColumnInfo {
                    name: c.name().to_string(),
                    dtype: c.dtype(),
                })
                .collect(),
            provenance: self.dataset.provenance().to_vec(),
        }
    }

    fn index(&self, step_id: &str) -> Result<usize, EngineError> {
        self.workflow
            .step_index(step_id)
            .ok_or_else(|| EngineError::UnknownStep(step_id.to_string()))
    }

    /// Submits inputs to the Active (or Invalidated) step. The step is
    /// validated and computed before anything changes; later steps then run
    /// as far as their stored inputs allow.
    pub fn submit_inputs(
        &mut self,
        step_id: &str,
        inputs: Map<String, Value>,
    ) -> Result<(), EngineError> {
        let i = self.index(step_id)?;
        match self.states[i].status {
            StepStatus::Active | StepStatus::Invalidated => {}
            StepStatus::Pending => {
                return Err(EngineError::Lifecycle(format!(
                    "step `{step_id}` is not active yet; complete the earlier steps first"
                )))
            }
            StepStatus::Done => {
                return Err(EngineError::Lifecycle(format!(
                    "step `{step_id}` is already done; edit it instead"
                )))
            }
        }
        let computed = self.compute(i, &inputs)?;
        let seq = self.log(EventKind::InputsSubmitted {
            step_id: step_id.to_string(),
            inputs: inputs.clone(),
        });
        self.install(i, inputs, computed, seq);
        self.recompute_from(i + 1, seq);
        Ok(())
    }

    /// Changes the inputs of a Done step and reruns everything after it.
    pub fn edit_step(
        &mut self,
        step_id: &str,
        inputs: Map<String, Value>,
    ) -> Result<(), EngineError> {
        let i = self.index(step_id)?;
        if self.states[i].status != StepStatus::Done {
            return Err(EngineError::Lifecycle(format!(
                "only completed steps can be edited; `{step_id}` is {}",
                status_word(self.states[i].status)
            )));
        }
        let computed = self.compute(i, &inputs)?;
        let seq = self.log(EventKind::StepEdited {
            step_id: step_id.to_string(),
            inputs: inputs.clone(),
        });
        self.install(i, inputs, computed, seq);
        self.recompute_from(i + 1, seq);
        Ok(())
    }

    /// Swaps in a new dataset and reruns every step that has inputs. Steps
    /// whose inputs no longer fit the data become Invalidated.
    pub fn replace_dataset(&mut self, dataset: Dataset) {
        let version = dataset.version().max(self.dataset.version() + 1);
        let incoming = Arc::new(dataset);
        self.dataset = Arc::new(incoming.with_version(version));
        let seq = self.log(EventKind::DatasetReplaced {
            version,
            rows: incoming.row_count(),
            dataset: Some(incoming),
        });
        self.recompute_from(0, seq);
    }

    pub fn apply_action(
        &mut self,
        step_id: &str,
        suggestion_id: &str,
    ) -> Result<ActionEffect, EngineError> {
        let i = self.index(step_id)?;
        let suggestion = self.states[i]
            .active_suggestions
            .iter()
            .find(|s| s.id == suggestion_id)
            .cloned()
            .ok_or_else(|| EngineError::UnknownSuggestion {
                step_id: step_id.to_string(),
                suggestion_id: suggestion_id.to_string(),
            })?;
        let effect = match &suggestion.action {
            ActionTemplate::PresetParameter {
                target_step,
                param,
                value,
            } => ActionEffect::Preset {
                target_step: target_step.clone(),
                param: param.clone(),
                value: value.clone(),
            },
            ActionTemplate::EmitSnippet {
                template_id,
                bindings,
            } => ActionEffect::Snippet(SnippetRegistry::builtin().render(template_id, bindings)?),
            ActionTemplate::ShowNotice { text } => ActionEffect::Notice { text: text.clone() },
        };
        let seq = self.log(EventKind::ActionApplied {
            step_id: step_id.to_string(),
            suggestion_id: suggestion_id.to_string(),
        });
        let record = match &effect {
            ActionEffect::Preset {
                target_step,
                param,
                value,
            } => format!("preset {target_step}.{param} = {value}"),
            ActionEffect::Snippet(s) => format!("exported snippet `{}`", s.template_id),
            ActionEffect::Notice { .. } => "acknowledged notice".to_string(),
        };
        let state = &mut self.states[i];
        state.acknowledged = true;
        state.actions_taken.push(ActionRecord {
            suggestion_id: suggestion_id.to_string(),
            effect: record,
        });
        state.refresh_outcome();
        if let ActionEffect::Preset {
            target_step,
            param,
            value,
        } = &effect
        {
            let j = self.index(target_step)?;
            self.states[j]
                .preset_inputs
                .insert(param.clone(), value.clone());
            if self.states[j].status == StepStatus::Done {
                self.recompute_from(j, seq);
            }
        }
        Ok(effect)
    }

    pub fn get_explanation(&self, step_id: &str) -> Result<StepExplanation, EngineError> {
        let i = self.index(step_id)?;
        let def = &self.workflow.steps[i];
        let state = &self.states[i];
        Ok(StepExplanation {
            step_id: def.id.clone(),
            title: def.title.clone(),
            kind: def.kind,
            objective: def.explanation.objective.clone(),
            concepts_and_interpretation: def.explanation.concepts_and_interpretation.clone(),
            interpretation: state.interpretation.clone(),
            suggestions: state.active_suggestions.clone(),
        })
    }

    /// Rebuilds a session from `original` by re-executing a recorded event
    /// log.
    pub fn replay(
        workflow: Arc<WorkflowDef>,
        original: Dataset,
        events: &[Event],
    ) -> Result<Session, EngineError> {
        let (first, rest) = events
            .split_first()
            .ok_or_else(|| EngineError::Replay("empty event log".into()))?;
        let EventKind::SessionCreated { source, .. } = &first.kind else {
            return Err(EngineError::Replay(
                "log must start with session creation".into(),
            ));
        };
        let mut session = Session::create(workflow, original, source)?;
        for e in rest {
            match &e.kind {
                EventKind::SessionCreated { .. } => {
                    return Err(EngineError::Replay("repeated session creation".into()))
                }
                EventKind::InputsSubmitted { step_id, inputs } => {
                    session.submit_inputs(step_id, inputs.clone())?
                }
                EventKind::StepEdited { step_id, inputs } => {
                    session.edit_step(step_id, inputs.clone())?
                }
                EventKind::DatasetReplaced { dataset, .. } => {
                    let d = dataset.as_ref().ok_or_else(|| {
                        EngineError::Replay(format!("event {} lacks its dataset", e.seq))
                    })?;
                    session.replace_dataset(Dataset::clone(d));
                }
                EventKind::ActionApplied {
                    step_id,
                    suggestion_id,
                } => {
                    session.apply_action(step_id, suggestion_id)?;
                }
            }
        }
        Ok(session)
    }

    /// Checks the lifecycle invariants, returning a description of the first
    /// violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.states.len() != self.workflow.steps.len() {
            return Err("step count differs from the workflow".into());
        }
        for (s, d) in self.states.iter().zip(&self.workflow.steps) {
            if s.def_id != d.id {
                return Err(format!("state `{}` out of order", s.def_id));
            }
            if s.outputs.is_some() != (s.status == StepStatus::Done) {
                return Err(format!("step `{}` has outputs but is not done", s.def_id));
            }
        }
        let awaiting: Vec<usize> = self
            .states
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s.status, StepStatus::Active | StepStatus::Invalidated))
            .map(|(i, _)| i)
            .collect();
        match awaiting.as_slice() {
            [] if self.is_complete() => {}
            [] => return Err("no active step although the workflow is incomplete".into()),
            [a] => {
                if let Some(s) = self.states[..*a]
                    .iter()
                    .find(|s| s.status != StepStatus::Done)
                {
                    return Err(format!(
                        "step `{}` before the active step is not done",
                        s.def_id
                    ));
                }
                if let Some(s) = self.states[a + 1..]
                    .iter()
                    .find(|s| s.status != StepStatus::Pending)
                {
                    return Err(format!(
                        "step `{}` after the active step is not pending",
                        s.def_id
                    ));
                }
            }
            _ => return Err("more than one active step".into()),
        }
        for w in self.events.windows(2) {
            if w[1].seq <= w[0].seq || w[1].at <= w[0].at {
                return Err(format!(
                    "event {} is not after event {}",
                    w[1].seq, w[0].seq
                ));
            }
        }
        Ok(())
    }

    fn log(&mut self, kind: EventKind) -> u64 {
        let seq = self.events.last().map_or(1, |e| e.seq + 1);
        let mut at = Utc::now();
        if let Some(last) = self.events.last() {
            if at <= last.at {
                at = last.at + TimeDelta::microseconds(1);
            }
        }
        self.events.push(Event { seq, at, kind });
        seq
    }

    /// Resolves inputs and config for step `i` and runs its binding. Pure
    /// with respect to the session.
    fn compute(&self, i: usize, explicit: &Map<String, Value>) -> Result<Computed, EngineError> {
        let def = &self.workflow.steps[i];
        let earlier = |sid: &str, param: &str| -> Option<Value> {
            let j = self.workflow.step_index(sid)?;
            (j < i)
                .then(|| self.states[j].resolved_inputs.get(param))
                .flatten()
                .map(|p| p.value.clone())
        };
        let resolved = resolve_inputs(
            def,
            explicit,
            &self.states[i].preset_inputs,
            &self.dataset,
            &earlier,
        )?;
        let inputs = values_of(&resolved);
        let mut config = Map::new();
        for (key, value) in &def.compute.config {
            let v = match value {
                ConfigValue::Literal(v) => v.clone(),
                ConfigValue::Ref { from } => {
                    let (sid, param) = split_ref(from, &def.id);
                    let found = if sid == def.id {
                        inputs.get(param).cloned()
                    } else {
                        earlier(sid, param)
                    };
                    found.ok_or_else(|| EngineError::Compute {
                        step_id: def.id.clone(),
                        message: format!("`{from}` has no value yet"),
                    })?
                }
            };
            config.insert(key.clone(), v);
        }
        let binding = library::binding(&def.compute.binding).expect("validated binding");
        let ctx = StepContext {
            dataset: &self.dataset,
            inputs: &inputs,
            config: &config,
        };
        let result = binding(&ctx).map_err(|e| EngineError::Compute {
            step_id: def.id.clone(),
            message: e.0,
        })?;
        Ok(Computed { resolved, result })
    }

    fn install(&mut self, i: usize, inputs: Map<String, Value>, computed: Computed, seq: u64) {
        let def = &self.workflow.steps[i];
        let Computed { resolved, result } = computed;
        let suggestions = def
            .explanation
            .suggested_actions
            .iter()
            .filter(|r| trigger_holds(&r.when, result.verdict, &result.vars))
            .map(|r| Suggestion {
                id: r.id.clone(),
                message: fill(&r.message, &result.vars),
                action: instantiate(&r.action, &result.vars),
            })
            .collect();
        let interpretation = def
            .explanation
            .interpretation_template
            .as_ref()
            .map(|t| fill(t, &result.vars));
        let state = &mut self.states[i];
        let unchanged = state.outputs.as_ref() == Some(&result.outputs);
        state.status = StepStatus::Done;
        state.inputs = Some(inputs);
        state.resolved_inputs = resolved;
        state.outputs = Some(result.outputs);
        state.verdict = result.verdict;
        state.acknowledged &= unchanged;
        state.summary = Some(result.summary.clone());
        state.interpretation = interpretation;
        state.active_suggestions = suggestions;
        state.error = None;
        state.refresh_outcome();
        let entry = HistoryEntry {
            seq,
            step_id: def.id.clone(),
            status: StepStatus::Done,
            verdict: result.verdict,
            summary: result.summary,
        };
        self.push_history(entry);
    }

    fn push_history(&mut self, entry: HistoryEntry) {
        let same = self
            .history
            .iter()
            .rev()
            .find(|h| h.step_id == entry.step_id)
            .is_some_and(|h| {
                h.status == entry.status && h.verdict == entry.verdict && h.summary == entry.summary
            });
        if !same {
            self.history.push(entry);
        }
    }

    /// Reruns steps from `start` on. A user-input step never submitted
    /// becomes Active; a step that can no longer be computed becomes
    /// Invalidated. Either way every step after it returns to Pending.
    fn recompute_from(&mut self, start: usize, seq: u64) {
        for i in start..self.states.len() {
            let stored = self.states[i].inputs.clone();
            let inputs = match (self.states[i].kind, stored) {
                (StepKind::UserInput, None) => {
                    self.states[i].clear_results();
                    self.states[i].status = StepStatus::Active;
                    self.reset_after(i);
                    return;
                }
                (_, stored) => stored.unwrap_or_default(),
            };
            match self.compute(i, &inputs) {
                Ok(computed) => self.install(i, inputs, computed, seq),
                Err(e) => {
                    let state = &mut self.states[i];
                    state.clear_results();
                    state.status = StepStatus::Invalidated;
                    state.error = Some(e.to_string());
                    let entry = HistoryEntry {
                        seq,
                        step_id: state.def_id.clone(),
                        status: StepStatus::Invalidated,
                        verdict: None,
                        summary: e.to_string(),
                    };
                    self.push_history(entry);
                    self.reset_after(i);
                    return;
                }
            }
        }
    }

    fn reset_after(&mut self, i: usize) {
        for s in &mut self.states[i + 1..] {
            s.clear_results();
            s.status = StepStatus::Pending;
        }
    }
}

fn status_word(s: StepStatus) -> &'static str {
    match s {
        StepStatus::Pending => "pending",
        StepStatus::Active => "active",
        StepStatus::Done => "done",
        StepStatus::Invalidated => "invalidated",
    }
}

fn trigger_holds(t: &Trigger, verdict: Option<Verdict>, vars: &BTreeMap<String, String>) -> bool {
    match t {
        Trigger::Always => true,
        Trigger::Passed => verdict == Some(Verdict::Pass),
        Trigger::Violated => verdict == Some(Verdict::Violated),
        Trigger::Compare { var, op, value } => vars
            .get(var)
            .and_then(|v| v.parse::<f64>().ok())
            .is_some_and(|lhs| op.holds(lhs, *value)),
        Trigger::All { of } => of.iter().all(|t| trigger_holds(t, verdict, vars)),
    }
}

fn instantiate(action: &ActionTemplate, vars: &BTreeMap<String, String>) -> ActionTemplate {
    match action {
        ActionTemplate::PresetParameter { .. } => action.clone(),
        ActionTemplate::EmitSnippet {
            template_id,
            bindings,
        } => ActionTemplate::EmitSnippet {
            template_id: template_id.clone(),
            bindings: bindings
                .iter()
                .map(|(k, v)| (k.clone(), fill(v, vars)))
                .collect(),
        },
        ActionTemplate::ShowNotice { text } => ActionTemplate::ShowNotice {
            text: fill(text, vars),
        },
    }
}
