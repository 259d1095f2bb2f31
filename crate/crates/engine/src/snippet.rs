//! Code snippets for suggested actions, rendered from a template registry.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const BUILTIN_TEMPLATES: &str = include_str!("../assets/templates.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnippetTemplate {
    pub template_id: String,
    #[serde(default)]
    pub description: String,
    pub slots: Vec<String>,
    /// Body text with `{{slot}}` placeholders.
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSnippet {
    pub template_id: String,
    pub rendered_text: String,
    pub bindings: BTreeMap<String, String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SnippetError {
    #[error("unknown snippet template `{0}`")]
    UnknownTemplate(String),
    #[error("template `{template_id}`: slot `{slot}` is not bound")]
    UnboundSlot { template_id: String, slot: String },
    #[error("template `{template_id}`: {message}")]
    Invalid {
        template_id: String,
        message: String,
    },
    #[error("template registry: {0}")]
    Document(String),
}

/// Placeholder names in `body`, in order of first appearance.
fn placeholders(body: &str) -> Result<Vec<&str>, String> {
    let mut out = Vec::new();
    let mut rest = body;
    while let Some(start) = rest.find("{{") {
        let after = &rest[start + 2..];
        let end = after
            .find("}}")
            .ok_or_else(|| "unterminated placeholder".to_string())?;
        let name = &after[..end];
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(format!("malformed placeholder `{{{{{name}}}}}`"));
        }
        if !out.contains(&name) {
            out.push(name);
        }
        rest = &after[end + 2..];
    }
    Ok(out)
}

impl SnippetTemplate {
    fn validate(&self) -> Result<(), SnippetError> {
        let invalid = |message: String| SnippetError::Invalid {
            template_id: self.template_id.clone(),
            message,
        };
        let used = placeholders(&self.body).map_err(invalid)?;
        let slots: BTreeSet<&str> = self.slots.iter().map(String::as_str).collect();
        if slots.len() != self.slots.len() {
            return Err(invalid("duplicate slot".into()));
        }
        if let Some(p) = used.iter().find(|p| !slots.contains(*p)) {
            return Err(invalid(format!("placeholder `{p}` is not a declared slot")));
        }
        if let Some(s) = self.slots.iter().find(|s| !used.contains(&s.as_str())) {
            return Err(invalid(format!("slot `{s}` is never used")));
        }
        Ok(())
    }

    pub fn render(&self, bindings: &BTreeMap<String, String>) -> Result<CodeSnippet, SnippetError> {
        if let Some(slot) = self.slots.iter().find(|s| !bindings.contains_key(*s)) {
            return Err(SnippetError::UnboundSlot {
                template_id: self.template_id.clone(),
                slot: slot.clone(),
            });
        }
        let mut text = self.body.clone();
        for slot in &self.slots {
            text = text.replace(&format!("{{{{{slot}}}}}"), &bindings[slot]);
        }
        Ok(CodeSnippet {
            template_id: self.template_id.clone(),
            rendered_text: text,
            bindings: self
                .slots
                .iter()
                .map(|s| (s.clone(), bindings[s].clone()))
                .collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnippetRegistry {
    templates: BTreeMap<String, SnippetTemplate>,
}

impl SnippetRegistry {
    pub fn from_json(json: &str) -> Result<Self, SnippetError> {
        let list: Vec<SnippetTemplate> =
            serde_json::from_str(json).map_err(|e| SnippetError::Document(e.to_string()))?;
        let mut templates = BTreeMap::new();
        for t in list {
            t.validate()?;
            let id = t.template_id.clone();
            if templates.insert(id.clone(), t).is_some() {
                return Err(SnippetError::Document(format!("duplicate template `{id}`")));
            }
        }
        Ok(SnippetRegistry { templates })
    }

    pub fn builtin() -> &'static SnippetRegistry {
        static REGISTRY: OnceLock<SnippetRegistry> = OnceLock::new();
        REGISTRY.get_or_init(|| {
            SnippetRegistry::from_json(BUILTIN_TEMPLATES).expect("bundled templates are valid")
        })
    }

    pub fn get(&self, id: &str) -> Option<&SnippetTemplate> {
        self.templates.get(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.templates.keys().map(String::as_str)
    }

    pub fn render(
        &self,
        template_id: &str,
        bindings: &BTreeMap<String, String>,
    ) -> Result<CodeSnippet, SnippetError> {
        self.get(template_id)
            .ok_or_else(|| SnippetError::UnknownTemplate(template_id.to_string()))?
            .render(bindings)
    }
}

/// Renders a template from the bundled registry.
pub fn render_snippet(
    template_id: &str,
    bindings: &BTreeMap<String, String>,
) -> Result<CodeSnippet, SnippetError> {
    SnippetRegistry::builtin().render(template_id, bindings)
}
