//! Terminal front end: scripted and interactive runs of the built-in
//! workflows.

pub mod display;
pub mod interactive;
pub mod output;
pub mod script;

pub use interactive::Interactive;
pub use script::{Decision, DecisionScript, Runner, Transform};
