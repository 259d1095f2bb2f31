//! Prompt-driven session over any line reader and writer.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Result};
use serde_json::{Map, Value};
use stepwise_engine::definition::{ParamSpec, ParamType};
use stepwise_engine::{build_report, StepStatus};

use crate::display::{effect_text, numbered_suggestions, step_block, suggestion_lines, type_hint};
use crate::output::{write_model, write_report};
use crate::script::{ActionRef, Applied, Decision, DecisionScript, Reimport, Runner, Transform};

const HELP: &str = "\
commands:
  <enter> or next          fill in the step awaiting input
  <n>                      apply suggestion number n
  edit <step>              change the inputs of a completed step
  drop-rows <col> <op> <value>
  derive-column <name> = <a> <op> <b>
  log-transform <col>      stage a transform of the current data
  reimport [file.csv]      re-run the analysis on the staged transforms (or a file)
  staged | discard         list or drop staged transforms
  steps | show <step> | explain [step] | suggestions
  export report <file>     write the report (.json for JSON, text otherwise)
  export model <file>      write the fitted model
  save <file>              write the decisions so far as a script
  help | quit
";

/// Outcome of prompting for one value.
enum Answer {
    Value(Value),
    Omit,
    Cancel,
}

pub struct Interactive<'a, R, W> {
    runner: &'a mut Runner,
    input: R,
    out: W,
    staged: Vec<Transform>,
    decisions: Vec<Decision>,
    base_dir: PathBuf,
}

impl<'a, R: BufRead, W: Write> Interactive<'a, R, W> {
    /// `base_dir` resolves relative paths typed at the prompt.
    pub fn new(runner: &'a mut Runner, input: R, out: W, base_dir: &Path) -> Self {
        Interactive {
            runner,
            input,
            out,
            staged: Vec::new(),
            decisions: Vec::new(),
            base_dir: base_dir.to_path_buf(),
        }
    }

    /// Decisions entered so far, in script form.
    pub fn decisions(&self) -> &[Decision] {
        &self.decisions
    }

    fn read_line(&mut self) -> Result<Option<String>> {
        let mut line = String::new();
        if self.input.read_line(&mut line)? == 0 {
            return Ok(None);
        }
        Ok(Some(line.trim().to_string()))
    }

    fn say(&mut self, text: &str) -> Result<()> {
        self.out.write_all(text.as_bytes())?;
        Ok(())
    }

    /// Runs until `quit` or end of input.
    pub fn run(&mut self) -> Result<()> {
        let s = &self.runner.session;
        let intro = format!(
            "{} on {} ({} rows). Type `help` for commands.\n\n{}",
            s.workflow().name,
            s.source(),
            s.dataset().row_count(),
            step_block(1, &s.states()[0])
        );
        self.say(&intro)?;
        self.announce_active()?;
        loop {
            let label = self
                .runner
                .session
                .active_step()
                .map_or("complete".to_string(), |s| s.def_id.clone());
            self.say(&format!("[{label}]> "))?;
            self.out.flush()?;
            let Some(line) = self.read_line()? else {
                self.say("\n")?;
                return Ok(());
            };
            if matches!(line.as_str(), "quit" | "exit") {
                return Ok(());
            }
            if let Err(e) = self.command(&line) {
                self.say(&format!("error: {e:#}\n"))?;
            }
        }
    }

    fn command(&mut self, line: &str) -> Result<()> {
        let (head, rest) = line
            .split_once(' ')
            .map_or((line, ""), |(h, r)| (h, r.trim()));
        match head {
            "" | "next" => match self.runner.session.active_step() {
                Some(s) => {
                    let id = s.def_id.clone();
                    self.fill_step(&id)
                }
                None => self.say("every step is done; `edit <step>` to revise one\n"),
            },
            "edit" => {
                let st = self.runner.session.state(rest)?;
                if st.status != StepStatus::Done {
                    bail!("only completed steps can be edited");
                }
                self.fill_step(rest)
            }
            n if n.parse::<usize>().is_ok() => {
                let all = numbered_suggestions(&self.runner.session);
                let i: usize = n.parse()?;
                let (step, suggestion, _) = all
                    .get(i.wrapping_sub(1))
                    .cloned()
                    .ok_or_else(|| anyhow!("no suggestion number {i}; `suggestions` lists them"))?;
                self.decide(Decision::Action {
                    apply_action: ActionRef { step, suggestion },
                })
            }
            "drop-rows" | "derive-column" | "log-transform" => {
                let t = Transform::parse(line)?;
                t.apply(self.runner.session.dataset())?;
                self.staged.push(t);
                self.say("staged; `reimport` applies all staged transforms\n")
            }
            "staged" => {
                let text: String = self.staged.iter().map(|t| format!("  {t:?}\n")).collect();
                self.say(if text.is_empty() {
                    "nothing staged\n"
                } else {
                    &text
                })
            }
            "discard" => {
                self.staged.clear();
                self.say("staged transforms dropped\n")
            }
            "reimport" => {
                let reimport = Reimport {
                    data: (!rest.is_empty()).then(|| PathBuf::from(rest)),
                    transforms: self.staged.clone(),
                };
                self.decide(Decision::Replace {
                    replace_dataset: reimport,
                })?;
                self.staged.clear();
                Ok(())
            }
            "steps" => {
                let text: String = self
                    .runner
                    .session
                    .states()
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        format!("  {}. {} ({}) - {:?}\n", i + 1, s.title, s.def_id, s.status)
                    })
                    .collect();
                self.say(&text)
            }
            "show" => {
                let i = self
                    .runner
                    .session
                    .workflow()
                    .step_index(rest)
                    .ok_or_else(|| anyhow!("unknown step `{rest}`"))?;
                let text = step_block(i + 1, &self.runner.session.states()[i]);
                self.say(&text)
            }
            "explain" => {
                let id = if rest.is_empty() {
                    self.runner
                        .session
                        .active_step()
                        .map(|s| s.def_id.clone())
                        .ok_or_else(|| anyhow!("name a step"))?
                } else {
                    rest.to_string()
                };
                let e = self.runner.session.get_explanation(&id)?;
                let mut text = format!(
                    "{}\n  Objective: {}\n  {}\n",
                    e.title, e.objective, e.concepts_and_interpretation
                );
                if let Some(i) = e.interpretation {
                    text.push_str(&format!("  Here: {i}\n"));
                }
                self.say(&text)
            }
            "suggestions" => {
                let ids: Vec<String> = self
                    .runner
                    .session
                    .states()
                    .iter()
                    .map(|s| s.def_id.clone())
                    .collect();
                let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
                let text = suggestion_lines(&self.runner.session, &refs);
                self.say(if text.is_empty() {
                    "no suggestions\n"
                } else {
                    &text
                })
            }
            "export" => {
                let (what, path) = rest
                    .split_once(' ')
                    .ok_or_else(|| anyhow!("usage: export report|model <file>"))?;
                let path = self.base_dir.join(path.trim());
                match what {
                    "report" => write_report(&build_report(&self.runner.session), &path)?,
                    "model" => write_model(&self.runner.session, &path)?,
                    _ => bail!("usage: export report|model <file>"),
                }
                self.say(&format!("wrote {}\n", path.display()))
            }
            "save" => {
                let script = DecisionScript {
                    workflow_id: Some(self.runner.session.workflow().id.clone()),
                    data: None,
                    decisions: self.decisions.clone(),
                };
                let path = self.base_dir.join(rest);
                std::fs::write(&path, serde_json::to_string_pretty(&script)? + "\n")?;
                self.say(&format!("wrote {}\n", path.display()))
            }
            "help" => self.say(HELP),
            _ => bail!("unknown command `{head}`; type `help`"),
        }
    }

    /// Applies a decision, records it and prints what changed.
    fn decide(&mut self, decision: Decision) -> Result<()> {
        let before = self.runner.session.states().to_vec();
        let applied = self.runner.apply(&decision)?;
        self.decisions.push(decision);
        let mut text = String::new();
        match &applied {
            Applied::Action { effect, .. } => text.push_str(&effect_text(effect)),
            Applied::Reimported { version, rows } => {
                text.push_str(&format!("dataset version {version}, {rows} rows\n"))
            }
            _ => {}
        }
        let wf = self.runner.session.workflow().clone();
        let changed: Vec<String> = self
            .runner
            .changed(&before)
            .into_iter()
            .filter(|s| s.status != StepStatus::Pending)
            .map(|s| s.def_id.clone())
            .collect();
        for id in &changed {
            let i = wf.step_index(id).expect("known step");
            text.push_str(&step_block(i + 1, &self.runner.session.states()[i]));
        }
        let refs: Vec<&str> = changed.iter().map(String::as_str).collect();
        text.push_str(&suggestion_lines(&self.runner.session, &refs));
        self.say(&text)?;
        self.announce_active()
    }

    fn announce_active(&mut self) -> Result<()> {
        let Some(active) = self.runner.session.active_step() else {
            return self
                .say("\nAll steps are complete. `export report <file>` to save the report.\n");
        };
        let id = active.def_id.clone();
        let e = self.runner.session.get_explanation(&id)?;
        let i = self
            .runner
            .session
            .workflow()
            .step_index(&id)
            .expect("known step");
        let text = format!("\nNext: step {}. {}\n  {}\n", i + 1, e.title, e.objective);
        self.say(&text)
    }

    /// Prompts for every parameter of `step_id` and applies the result.
    /// Invalid answers re-prompt; a rejected submission starts over.
    fn fill_step(&mut self, step_id: &str) -> Result<()> {
        let def = self
            .runner
            .session
            .workflow()
            .step(step_id)
            .cloned()
            .ok_or_else(|| anyhow!("unknown step `{step_id}`"))?;
        loop {
            let mut inputs = Map::new();
            for spec in &def.input_schema {
                if matches!(spec.ty, ParamType::Dataset) {
                    continue;
                }
                match self.ask(step_id, spec, &inputs)? {
                    Answer::Value(v) => {
                        inputs.insert(spec.name.clone(), v);
                    }
                    Answer::Omit => {}
                    Answer::Cancel => return self.say("cancelled\n"),
                }
            }
            match self.decide(Decision::Inputs {
                step: step_id.to_string(),
                inputs,
            }) {
                Ok(()) => return Ok(()),
                Err(e) => self.say(&format!("error: {e:#}\nplease try again (or `cancel`)\n"))?,
            }
        }
    }

    fn choices(&self, step_id: &str, spec: &ParamSpec, chosen: &Map<String, Value>) -> Vec<String> {
        let d = self.runner.session.dataset();
        match &spec.ty {
            ParamType::ColumnRef { dtype, .. } | ParamType::ColumnRefList { dtype, .. } => d
                .columns()
                .filter(|c| dtype.is_none_or(|t| c.dtype() == t))
                .map(|c| c.name().to_string())
                .collect(),
            ParamType::CategoryValue { column, .. } => {
                let name =
                    match column.split_once('.') {
                        Some((sid, p)) => self
                            .runner
                            .session
                            .state(sid)
                            .ok()
                            .and_then(|s| s.resolved_inputs.get(p).map(|r| r.value.clone())),
                        None => chosen.get(column).cloned().or_else(|| {
                            self.runner.session.state(step_id).ok().and_then(|s| {
                                s.resolved_inputs.get(column).map(|r| r.value.clone())
                            })
                        }),
                    };
                name.and_then(|n| {
                    n.as_str()
                        .and_then(|n| d.column(n).ok())
                        .map(|c| c.distinct_text())
                })
                .unwrap_or_default()
            }
            ParamType::Enum { options } => options.clone(),
            _ => Vec::new(),
        }
    }

    fn ask(
        &mut self,
        step_id: &str,
        spec: &ParamSpec,
        chosen: &Map<String, Value>,
    ) -> Result<Answer> {
        let state = self.runner.session.state(step_id)?.clone();
        let fallback = state
            .preset_inputs
            .get(&spec.name)
            .map(|v| ("preset", v.clone()))
            .or_else(|| spec.default.clone().map(|v| ("default", v)));
        let current = (state.status == StepStatus::Done)
            .then(|| {
                state
                    .inputs
                    .as_ref()
                    .and_then(|m| m.get(&spec.name))
                    .cloned()
            })
            .flatten();
        let choices = self.choices(step_id, spec, chosen);
        let listed = matches!(
            spec.ty,
            ParamType::ColumnRef { .. }
                | ParamType::ColumnRefList { .. }
                | ParamType::CategoryValue { .. }
        );
        if listed && !choices.is_empty() {
            let list: String = choices
                .iter()
                .enumerate()
                .map(|(i, c)| format!("  {:>3}) {c}\n", i + 1))
                .collect();
            self.say(&list)?;
        }
        let label = if spec.label.is_empty() {
            &spec.name
        } else {
            &spec.label
        };
        let note = match (&current, &fallback) {
            (Some(v), _) => format!(" [current: {}]", plain(v)),
            (None, Some((src, v))) => format!(" [{src}: {}]", plain(v)),
            _ => String::new(),
        };
        loop {
            self.say(&format!("{label} ({}){note}: ", type_hint(&spec.ty)))?;
            self.out.flush()?;
            let Some(answer) = self.read_line()? else {
                return Ok(Answer::Cancel);
            };
            if answer == "cancel" {
                return Ok(Answer::Cancel);
            }
            if answer.is_empty() {
                if let Some(v) = current.clone() {
                    return Ok(Answer::Value(v));
                }
                if fallback.is_some() {
                    return Ok(Answer::Omit);
                }
                self.say("a value is required\n")?;
                continue;
            }
            match parse_answer(&spec.ty, &answer, &choices) {
                Ok(v) => return Ok(Answer::Value(v)),
                Err(e) => self.say(&format!("{e}\n"))?,
            }
        }
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(plain).collect::<Vec<_>>().join(", "),
        other => other.to_string(),
    }
}

/// A listed entry by number or by exact name.
fn pick(answer: &str, choices: &[String], what: &str) -> Result<String> {
    if let Ok(i) = answer.parse::<usize>() {
        if (1..=choices.len()).contains(&i) {
            return Ok(choices[i - 1].clone());
        }
    }
    if choices.iter().any(|c| c == answer) {
        return Ok(answer.to_string());
    }
    bail!("unknown {what} `{answer}`; pick one from the list")
}

fn parse_answer(ty: &ParamType, answer: &str, choices: &[String]) -> Result<Value> {
    Ok(match ty {
        ParamType::Dataset => Value::String(answer.to_string()),
        ParamType::ColumnRef { .. } => Value::String(pick(answer, choices, "column")?),
        ParamType::ColumnRefList { .. } => Value::Array(
            answer
                .split(',')
                .map(|a| pick(a.trim(), choices, "column").map(Value::String))
                .collect::<Result<_>>()?,
        ),
        ParamType::CategoryValue { .. } => Value::String(pick(answer, choices, "value")?),
        ParamType::Enum { .. } => Value::String(pick(answer, choices, "option")?),
        ParamType::Real { integer, .. } => match serde_json::from_str::<Value>(answer) {
            Ok(Value::Number(n)) if !integer || n.is_u64() || n.is_i64() => Value::Number(n),
            _ if *integer => bail!("enter a whole number"),
            _ => bail!("enter a number"),
        },
        ParamType::Flag => match answer.to_ascii_lowercase().as_str() {
            "y" | "yes" | "true" => Value::Bool(true),
            "n" | "no" | "false" => Value::Bool(false),
            _ => bail!("answer yes or no"),
        },
    })
}
