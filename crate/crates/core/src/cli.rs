//! The `rmt` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{Config, ConfigError};
use crate::engines::EngineError;
use crate::harness::{self, HarnessError};
use crate::inference::{analyze_rule, parse_rule, InferenceError};
use crate::util::write_atomic;

/// Exit code when validation finds violations.
pub const EXIT_VIOLATIONS: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "rmt", version, about = "Rule-driven metamorphic testing of driving models")]
pub struct Cli {
    /// Configuration file (YAML).
    #[arg(long, global = true, env = "RMT_CONFIG")]
    pub config: Option<PathBuf>,
    /// More log output; repeat for debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a testing rule and show the relation it implies.
    Parse(ParseArgs),
    /// Inspect the scene ontology.
    #[command(subcommand)]
    Ontology(OntologyCommand),
    /// Generate follow-up test cases for a rule over a dataset.
    Generate(GenerateArgs),
    /// Run the model on a generated campaign and report violations.
    Validate(ValidateArgs),
    /// Re-evaluate a campaign at several thresholds.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    /// Rule text, or a file containing it.
    #[arg(long)]
    pub rule: String,
    /// Print dependency predicates as JSON lines.
    #[arg(long, conflicts_with = "emit_mr")]
    pub dump_deps: bool,
    /// Print the relation as canonical JSON.
    #[arg(long)]
    pub emit_mr: bool,
}

#[derive(Debug, Subcommand)]
pub enum OntologyCommand {
    /// Print the merged element table.
    Show {
        /// Print the merged ontology as YAML instead.
        #[arg(long)]
        yaml: bool,
    },
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Rule text, or a file containing it.
    #[arg(long)]
    pub rule: String,
    /// Directory of label maps (`*.pgm` with `.pgm.json` palettes).
    #[arg(long)]
    pub dataset: PathBuf,
    /// Output directory for follow-ups and the manifest.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// `manifest.jsonl` written by `generate`.
    #[arg(long)]
    pub manifest: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Rule or then-clause with a `{T}` placeholder.
    #[arg(long)]
    pub rule_template: String,
    /// Comma-separated threshold values.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub thresholds: Vec<f64>,
    /// `manifest.jsonl` written by `generate`.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Where to write sweep.csv and sweep.json; defaults to the manifest's directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("IoError: {0}")]
    Io(String),
}

impl CliError {
    /// Pipeline stage the failure belongs to.
    pub fn stage(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) | CliError::Harness(HarnessError::Configuration(_)) => "config",
            CliError::Inference(e) | CliError::Harness(HarnessError::Inference(e)) => e.stage(),
            CliError::Engine(_)
            | CliError::Harness(HarnessError::Engine(_) | HarnessError::Scene(_)) => "generate",
            CliError::Harness(HarnessError::Template(_) | HarnessError::RuleMismatch(_)) => "sweep",
            CliError::Harness(_) => "validate",
            CliError::Io(_) => "io",
        }
    }
}

/// A `--rule` value names a file when one exists at that path.
pub fn read_rule(arg: &str) -> Result<String, CliError> {
    let p = Path::new(arg);
    let text = if !arg.contains('\n') && p.is_file() {
        std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{arg}: {e}")))?
    } else {
        arg.to_string()
    };
    if text.trim().is_empty() {
        return Err(CliError::Usage("the rule is empty".into()));
    }
    Ok(text)
}

fn load_config(path: Option<&Path>) -> Result<Config, CliError> {
    Ok(match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    })
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Run one command, writing results to `out`. Returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let config = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Parse(a) => {
            let text = read_rule(&a.rule)?;
            if a.dump_deps {
                let blocks = analyze_rule(&text, &config.ontology).map_err(InferenceError::from)?;
                for b in &blocks {
                    for d in b.if_deps.iter().chain(&b.then_deps) {
                        writeln!(out, "{}", serde_json::to_string(d).expect("predicate serializes")).map_err(io_err)?;
                    }
                }
                return Ok(0);
            }
            let parsed = parse_rule(&text, &config.ontology, &config.thresholds)?;
            for w in &parsed.warnings {
                log::warn!("{w}");
            }
            if a.emit_mr {
                writeln!(out, "{}", parsed.mr.to_canonical_json()).map_err(io_err)?;
            } else {
                for (i, b) in parsed.mr.blocks.iter().enumerate() {
                    writeln!(out, "block {}: {} : {}", i + 1, b.proposition, b.formula).map_err(io_err)?;
                }
            }
            Ok(0)
        }
        Command::Ontology(OntologyCommand::Show { yaml }) => {
            let text = if *yaml {
                config.ontology.to_yaml()
            } else {
                config.ontology.render_table()
            };
            write!(out, "{text}").map_err(io_err)?;
            Ok(0)
        }
        Command::Generate(a) => {
            let text = read_rule(&a.rule)?;
            let (_, campaign) = harness::run_generation(&config, &text, &a.dataset, &a.out)?;
            writeln!(
                out,
                "{} of {} cases generated\nmanifest: {}",
                campaign.generated(),
                campaign.cases.len(),
                campaign.manifest.display()
            )
            .map_err(io_err)?;
            Ok(0)
        }
        Command::Validate(a) => {
            let report = harness::run_validation(&config, &a.manifest)?;
            write!(out, "{}", report.to_text()).map_err(io_err)?;
            Ok(if report.n_violations > 0 { EXIT_VIOLATIONS } else { 0 })
        }
        Command::Sweep(a) => {
            let rows = harness::threshold_sweep(&config, &a.manifest, &a.rule_template, &a.thresholds)?;
            let dir = match &a.out {
                Some(d) => d.clone(),
                None => a.manifest.parent().unwrap_or(Path::new(".")).to_path_buf(),
            };
            std::fs::create_dir_all(&dir).map_err(io_err)?;
            let csv = harness::sweep_csv(&rows);
            let json = serde_json::to_string_pretty(&rows).expect("rows serialize");
            write_atomic(&dir.join("sweep.csv"), csv.as_bytes()).map_err(io_err)?;
            write_atomic(&dir.join("sweep.json"), format!("{json}\n").as_bytes()).map_err(io_err)?;
            write!(out, "{csv}").map_err(io_err)?;
            Ok(0)
        }
    }
}

/// Parse arguments, run, and map the result to a process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    let stdout = std::io::stdout();
    match run(&cli, &mut stdout.lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rmt: {} failed: {e}", e.stage());
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Result<i32, CliError>, String) {
        let cli = Cli::try_parse_from(args).unwrap();
        let mut buf = Vec::new();
        let r = run(&cli, &mut buf);
        (r, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn parse_emits_mr_and_deps() {
        let rule = "If: a pedestrian appears on the roadside,\nThen: the ego-vehicle should slow down at least 30%.";
        let (r, out) = run_args(&["rmt", "parse", "--rule", rule, "--emit-mr"]);
        assert_eq!(r.unwrap(), 0);
        assert!(out.contains(r#""rhs":0.3"#));
        let (_, out) = run_args(&["rmt", "parse", "--rule", rule, "--dump-deps"]);
        assert!(out.lines().any(|l| l == r#"{"relation":"NSUBJ","dependent":"pedestrian","head":"appears"}"#));
    }

    #[test]
    fn garbage_names_the_stage() {
        let (r, _) = run_args(&["rmt", "parse", "--rule", "If: the the the, Then: blue."]);
        let e = r.unwrap_err();
        assert_eq!(e.stage(), "tag");
        assert!(e.to_string().starts_with("NoRootVerb"));
        let (r, _) = run_args(&["rmt", "parse", "--rule", "   "]);
        assert_eq!(r.unwrap_err().stage(), "usage");
    }

    #[test]
    fn flags_conflict() {
        assert!(Cli::try_parse_from(["rmt", "parse", "--rule", "x", "--dump-deps", "--emit-mr"]).is_err());
    }

    #[test]
    fn ontology_show_lists_elements() {
        let (r, out) = run_args(&["rmt", "ontology", "show"]);
        assert_eq!(r.unwrap(), 0);
        assert!(out.contains("pedestrian") && out.contains("stop-and-yield line"));
    }
}
