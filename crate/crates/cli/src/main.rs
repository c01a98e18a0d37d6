mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vocalscreen::dataset::Task;
use vocalscreen::eval::Method;

use config::RunConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "vocalscreen", version, about = "Voice-based COVID-19 screening pipeline")]
struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic corpus (manifest.csv + audio/).
    Synth(SynthArgs),
    /// Preprocess every manifest row and write the feature store.
    Extract(ExtractArgs),
    /// Cross-validate one task/method and write summaries, ROC data and models.
    Evaluate(EvaluateArgs),
    /// Symptom prevalence and a comparison table of prior evaluations.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TaskArg {
    Task1,
    Task2,
    Task3,
    Task4,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Task1 => Task::Task1,
            TaskArg::Task2 => Task::Task2,
            TaskArg::Task3 => Task::Task3,
            TaskArg::Task4 => Task::Task4,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    #[value(name = "v_only")]
    VOnly,
    #[value(name = "s_only")]
    SOnly,
    #[value(name = "vs_ff")]
    VsFf,
    #[value(name = "vs_df")]
    VsDf,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::VOnly => Method::VOnly,
            MethodArg::SOnly => Method::SOnly,
            MethodArg::VsFf => Method::VsFf,
            MethodArg::VsDf => Method::VsDf,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Preset {
    Default,
    Separable,
    Null,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Positive participants.
    #[arg(long)]
    pos: Option<usize>,
    /// Negative participants.
    #[arg(long)]
    neg: Option<usize>,
    #[arg(long)]
    samples_per_participant: Option<usize>,
    /// Positive participants whose last recording follows a negative test.
    #[arg(long)]
    transitioned: Option<usize>,
    /// Class-separation knobs.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Output directory for features.csv and rejections.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Feature store CSV written by `extract`.
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    task: Option<TaskArg>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long)]
    seed: Option<u64>,
    /// Cross-validation folds [default: 5].
    #[arg(long)]
    folds: Option<usize>,
    /// Maximum days since a positive test for task2 [default: 14].
    #[arg(long)]
    recency_days: Option<u32>,
    /// JSON array of the 11 symptom names.
    #[arg(long)]
    vocabulary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Manifest for the symptom prevalence figure.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Directory holding `evaluate` outputs; reports are written here too.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    vocabulary: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Synth(args) => commands::synth(&mut cfg, args),
        Command::Extract(args) => commands::extract(&mut cfg, args),
        Command::Evaluate(args) => commands::evaluate(&mut cfg, args),
        Command::Report(args) => commands::report(&mut cfg, args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
