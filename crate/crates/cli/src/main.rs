use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand};
use stepwise_cli::output::{write_model, write_report};
use stepwise_cli::{DecisionScript, Interactive, Runner};
use stepwise_engine::{build_report, builtin_workflows, render_json, render_text};

#[derive(Parser)]
#[command(
    name = "stepwise",
    version,
    about = "Guided statistical analysis in the terminal"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a decision script non-interactively.
    Run {
        #[arg(long)]
        workflow: Option<String>,
        /// CSV file; overrides the script's `data`.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        script: PathBuf,
        /// Report file (`.json` for JSON, text otherwise); printed when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the fitted model as JSON.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Exit with status 2 when the report lists unresolved violations.
        #[arg(long)]
        strict: bool,
        /// Seed for every step with a `seed` parameter left unset.
        #[arg(long)]
        seed: Option<u64>,
        /// Print the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Step through a workflow at the prompt.
    Interactive {
        #[arg(long)]
        workflow: String,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the built-in workflows.
    Workflows,
}

fn run_script(
    workflow: Option<String>,
    data: Option<PathBuf>,
    script_path: &Path,
    seed: Option<u64>,
) -> Result<Runner> {
    let script = DecisionScript::from_path(script_path)?;
    let base = script_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let workflow = workflow.or(script.workflow_id.clone()).ok_or_else(|| {
        anyhow!("no workflow given (use --workflow or `workflow_id` in the script)")
    })?;
    let data = data
        .or_else(|| script.data.as_ref().map(|d| base.join(d)))
        .ok_or_else(|| anyhow!("no data given (use --data or `data` in the script)"))?;
    let mut runner = Runner::open(&workflow, &data, seed, &base)?;
    for (i, decision) in script.decisions.iter().enumerate() {
        runner
            .apply(decision)
            .map_err(|e| anyhow!("decision {} failed: {e:#}", i + 1))?;
    }
    Ok(runner)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn real_main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Workflows => {
            for w in builtin_workflows() {
                println!("{:<20} {}", w.id, w.name);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            workflow,
            data,
            script,
            report,
            model,
            strict,
            seed,
            json,
        } => {
            let runner = run_script(workflow, data, &script, seed)?;
            let r = build_report(&runner.session);
            match &report {
                Some(path) => write_report(&r, path)?,
                None if json => print!("{}", render_json(&r)),
                None => print!("{}", render_text(&r)),
            }
            if let Some(path) = &model {
                write_model(&runner.session, path)?;
            }
            if strict && !r.unresolved_violations.is_empty() {
                eprintln!("unresolved assumption violations:");
                for v in &r.unresolved_violations {
                    eprintln!("  {v}");
                }
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Interactive {
            workflow,
            data,
            report,
            model,
            seed,
        } => {
            let base = std::env::current_dir()?;
            let mut runner = Runner::open(&workflow, &data, seed, &base)?;
            let stdin = io::stdin();
            let input: Box<dyn BufRead> = Box::new(stdin.lock());
            let mut stdout = io::stdout();
            Interactive::new(&mut runner, input, &mut stdout, &base).run()?;
            stdout.flush()?;
            if let Some(path) = &report {
                write_report(&build_report(&runner.session), path)?;
            }
            if let Some(path) = &model {
                write_model(&runner.session, path)?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
