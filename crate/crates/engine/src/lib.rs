//! Workflow engine: declarative step definitions, the compute bindings
//! behind them, stateful sessions with rerun and replay, code snippets and
//! reports.

pub mod definition;
pub mod library;
pub mod report;
pub mod schema;
pub mod session;
pub mod snippet;
pub mod text;

pub use definition::{builtin_workflow, builtin_workflows, load_workflows, StepKind, WorkflowDef};
pub use library::Verdict;
pub use report::{build_report, export_model, render_json, render_text, ModelRecord, Report};
pub use schema::{InputSource, ParamViolation, SchemaError};
pub use session::{
    ActionEffect, EngineError, Event, EventKind, Outcome, Session, SessionView, StepState,
    StepStatus,
};
pub use snippet::{render_snippet, CodeSnippet, SnippetRegistry};
