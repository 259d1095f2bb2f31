use std::path::Path;

use anyhow::{Context, Result};
use stepwise_engine::{export_model, render_json, render_text, Report, Session};

/// JSON when the file name ends in `.json`, plain text otherwise.
pub fn render_for(report: &Report, path: &Path) -> String {
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
    {
        render_json(report)
    } else {
        render_text(report)
    }
}

pub fn write_report(report: &Report, path: &Path) -> Result<()> {
    std::fs::write(path, render_for(report, path))
        .with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_model(session: &Session, path: &Path) -> Result<()> {
    let model = export_model(session)?;
    let text = serde_json::to_string_pretty(&model)? + "\n";
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
