//! Compute bindings: the code behind each workflow step.
//!
//! A binding is a pure function of the current dataset, the step's resolved
//! inputs and its resolved config. It returns JSON outputs (plot data
//! included), an optional pass/violated verdict, and a set of display
//! variables that message and interpretation templates are filled from.

mod common;
mod regression;
mod ttest;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use stepwise_core::data::Dataset;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Violated,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{0}")]
pub struct BindingError(pub String);

impl BindingError {
    pub(crate) fn new(msg: impl Into<String>) -> Self {
        BindingError(msg.into())
    }
}

macro_rules! impl_from_error {
    ($($t:ty),*) => {$(
        impl From<$t> for BindingError {
            fn from(e: $t) -> Self {
                BindingError(e.to_string())
            }
        }
    )*};
}
impl_from_error!(
    stepwise_core::data::DataError,
    stepwise_core::stats::StatsError,
    serde_json::Error
);

pub struct StepContext<'a> {
    pub dataset: &'a Dataset,
    pub inputs: &'a Map<String, Value>,
    pub config: &'a Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub outputs: Value,
    pub verdict: Option<Verdict>,
    pub vars: BTreeMap<String, String>,
    /// One-line account of the result for reports and the history trail.
    pub summary: String,
}

pub type BindingFn = fn(&StepContext) -> Result<StepResult, BindingError>;

const BINDINGS: &[(&str, BindingFn)] = &[
    ("load", common::load),
    ("describe-column", common::describe_column),
    ("describe-columns", common::describe_columns),
    ("outliers", common::outliers),
    ("outliers-multi", common::outliers_multi),
    ("vif", regression::vif_check),
    ("split", regression::split),
    ("regression-spec", regression::spec),
    ("regression-eval", regression::evaluate),
    ("select-groups", ttest::select_groups),
    ("levene", ttest::levene),
    ("normality", ttest::normality),
    ("ttest-spec", ttest::spec),
    ("ttest-eval", ttest::evaluate),
];

pub fn binding(name: &str) -> Option<BindingFn> {
    BINDINGS.iter().find(|(n, _)| *n == name).map(|(_, f)| *f)
}

pub fn has_binding(name: &str) -> bool {
    binding(name).is_some()
}

pub fn binding_names() -> impl Iterator<Item = &'static str> {
    BINDINGS.iter().map(|(n, _)| *n)
}

impl StepContext<'_> {
    fn get(&self, key: &str) -> Result<&Value, BindingError> {
        self.config
            .get(key)
            .or_else(|| self.inputs.get(key))
            .ok_or_else(|| BindingError::new(format!("missing setting `{key}`")))
    }

    pub(crate) fn str(&self, key: &str) -> Result<String, BindingError> {
        self.get(key)?
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| BindingError::new(format!("setting `{key}` must be text")))
    }

    pub(crate) fn list(&self, key: &str) -> Result<Vec<String>, BindingError> {
        let bad = || BindingError::new(format!("setting `{key}` must be a list of names"));
        self.get(key)?
            .as_array()
            .ok_or_else(bad)?
            .iter()
            .map(|v| v.as_str().map(str::to_string).ok_or_else(bad))
            .collect()
    }

    pub(crate) fn f64(&self, key: &str) -> Result<f64, BindingError> {
        self.get(key)?
            .as_f64()
            .ok_or_else(|| BindingError::new(format!("setting `{key}` must be a number")))
    }

    pub(crate) fn bool(&self, key: &str) -> Result<bool, BindingError> {
        self.get(key)?
            .as_bool()
            .ok_or_else(|| BindingError::new(format!("setting `{key}` must be true or false")))
    }
}

pub(crate) fn vars<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
