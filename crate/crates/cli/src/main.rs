use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use retro_core::scalar::format_fixed3;
use retro_core::scenario::{parse_document, parse_ethics};
use retro_core::{
    explain, export_graph, retrospect, ComparisonPolicy, DecisionResult, EngineError,
    GraphDocument, GraphFormat, Scenario, ScenarioError, ValidationMode, ValidationReport,
};
use retro_service::ServiceConfig;

#[derive(Debug, Parser)]
#[command(
    name = "retro",
    version,
    about = "Hypothetical retrospection decision engine"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide and print the selected action with the acceptability table.
    Run {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = RunFormat::Text)]
        format: RunFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scenario and print the validation report.
    Validate {
        scenario: PathBuf,
        #[arg(long)]
        validation: Option<ValidationMode>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the retrospective dialogue behind every attack.
    Explain {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the attack graph as dot, json or text.
    Export {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "dot")]
        format: GraphFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Start the HTTP session service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
        /// Directory for on-demand session snapshots.
        #[arg(long)]
        snapshot_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Input {
    scenario: PathBuf,
    /// Replaces the scenario's utility classes, forbidden states and policy.
    #[arg(long)]
    ethics: Option<PathBuf>,
    #[arg(long)]
    policy: Option<ComparisonPolicy>,
    #[arg(long)]
    validation: Option<ValidationMode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RunFormat {
    Text,
    Json,
}

enum Failure {
    /// Exit status 1.
    Invalid(ValidationReport),
    /// Exit status 2.
    Input(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Failure::Input(err)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn scenario_error(path: &Path, err: ScenarioError) -> Failure {
    match err {
        ScenarioError::Invalid(report) => Failure::Invalid(report),
        other => Failure::Input(
            anyhow::Error::new(other).context(format!("cannot parse {}", path.display())),
        ),
    }
}

fn load(input: &Input) -> Result<Scenario, Failure> {
    let text = read(&input.scenario)?;
    let mut doc = parse_document::<f64>(&text).map_err(|e| scenario_error(&input.scenario, e))?;
    if let Some(path) = &input.ethics {
        let patch = parse_ethics::<f64>(&read(path)?).map_err(|e| scenario_error(path, e))?;
        doc.apply_ethics(&patch);
    }
    if let Some(policy) = input.policy {
        doc.policy = policy;
    }
    let mode = input.validation.unwrap_or(doc.validation);
    doc.into_scenario_with(mode)
        .map_err(|e| scenario_error(&input.scenario, e))
}

fn decide(input: &Input) -> Result<DecisionResult, Failure> {
    let scenario = load(input)?;
    retrospect(&scenario.problem, scenario.config).map_err(|e| match e {
        EngineError::Invalid(report) => Failure::Invalid(report),
        other => Failure::Input(other.into()),
    })
}

fn yes_no(flag: bool) -> &'static str {
    if flag {
        "yes"
    } else {
        "no"
    }
}

fn render_run(result: &DecisionResult) -> String {
    let rows: Vec<(String, String, String)> = result
        .acceptability
        .iter()
        .map(|(id, value)| {
            let label = result.action_labels.get(id).cloned().unwrap_or_default();
            (id.to_string(), label, format_fixed3(*value))
        })
        .collect();
    let id_width = rows.iter().map(|r| r.0.len()).chain([6]).max().unwrap_or(6);
    let label_width = rows.iter().map(|r| r.1.len()).chain([5]).max().unwrap_or(5);

    let mut out = String::new();
    let names: Vec<&str> = result.selected.iter().map(|a| a.as_str()).collect();
    let _ = writeln!(out, "selected: {}", names.join(", "));
    let _ = writeln!(out, "default: {}", result.default_pick);
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<id_width$}  {:<label_width$}  acceptability",
        "action", "label"
    );
    for (id, label, value) in rows {
        let _ = writeln!(out, "{id:<id_width$}  {label:<label_width$}  {value:>13}");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "attacks: {}", result.graph.attacks.len());
    let _ = writeln!(out, "tie: {}", yes_no(result.tie));
    let _ = writeln!(out, "fully acceptable: {}", yes_no(result.fully_acceptable));
    let _ = writeln!(out, "dilemma: {}", yes_no(result.dilemma));
    out
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn serve(listen: SocketAddr, snapshot_dir: Option<PathBuf>) -> Result<()> {
    let runtime = tokio::runtime::Runtime::new().context("cannot start async runtime")?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(listen)
            .await
            .with_context(|| format!("cannot listen on {listen}"))?;
        eprintln!("listening on {}", listener.local_addr()?);
        retro_service::serve(listener, ServiceConfig { snapshot_dir }).await?;
        Ok(())
    })
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { input, format, out } => {
            let result = decide(&input)?;
            let text = match format {
                RunFormat::Text => render_run(&result),
                RunFormat::Json => {
                    let mut s = serde_json::to_string_pretty(&GraphDocument::from_result(&result))
                        .context("cannot serialize result")?;
                    s.push('\n');
                    s
                }
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Validate {
            scenario,
            validation,
            out,
        } => {
            let text = read(&scenario)?;
            let doc = parse_document::<f64>(&text).map_err(|e| scenario_error(&scenario, e))?;
            let mode = validation.unwrap_or(doc.validation);
            let report = doc.to_problem().validate(mode);
            let mut rendered = format!("{} ({mode})\n", scenario.display());
            rendered.push_str(&report.to_string());
            emit(out.as_deref(), &rendered)?;
            if !report.is_valid() {
                return Err(Failure::Invalid(report));
            }
        }
        Command::Explain { input, out } => {
            let result = decide(&input)?;
            emit(out.as_deref(), &explain(&result))?;
        }
        Command::Export { input, format, out } => {
            let result = decide(&input)?;
            emit(out.as_deref(), &export_graph(&result, format))?;
        }
        Command::Serve {
            listen,
            snapshot_dir,
        } => serve(listen, snapshot_dir)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let validating = matches!(cli.command, Command::Validate { .. });
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(report)) => {
            if validating {
                eprintln!("error: validation failed");
            } else {
                eprint!("error: scenario failed validation\n{report}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Input(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
