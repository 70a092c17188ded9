//! `mrc-audit`: ingest, sample, annotate, and score MRC gold standards.

mod commands;
mod manifest;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "mrc-audit", version, about = "Audit machine reading comprehension gold standards")]
struct Cli {
    /// `table` for people, `machine` for JSON or JSON lines.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Table,
    Machine,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert an official development-set file into canonical entries.
    Ingest(IngestArgs),
    /// Draw a reproducible random subset of canonical entries.
    Sample(SampleArgs),
    /// Run the annotation workbench HTTP service.
    Serve(ServeArgs),
    /// Check annotation records against the schema rules.
    Validate(ValidateArgs),
    /// Dump the five lexical-cue features of every sentence.
    Features(FeaturesArgs),
    /// Leave-one-out evaluation of the lexical-cue supporting-fact baseline.
    Baseline(BaselineArgs),
    /// Inter-annotator agreement between two annotators.
    Agreement(AgreementArgs),
    /// Label frequencies per dataset, with chart data series.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetArg {
    Msmarco,
    Hotpotqa,
    Record,
    Multirc,
    Newsqa,
    Drop,
}

impl DatasetArg {
    pub fn dataset(self) -> mrc_audit::ingest::Dataset {
        use mrc_audit::ingest::Dataset;
        match self {
            DatasetArg::Msmarco => Dataset::MSMarco,
            DatasetArg::Hotpotqa => Dataset::HotpotQA,
            DatasetArg::Record => Dataset::ReCoRd,
            DatasetArg::Multirc => Dataset::MultiRC,
            DatasetArg::Newsqa => Dataset::NewsQA,
            DatasetArg::Drop => Dataset::DROP,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct IngestArgs {
    /// Format of the input file; never guessed.
    #[arg(long, value_enum)]
    pub dataset: DatasetArg,
    #[arg(long)]
    pub input: PathBuf,
    /// Keep NewsQA items outside the dev split.
    #[arg(long)]
    pub all_splits: bool,
    /// Defaults to stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    /// Canonical entry file.
    #[arg(long)]
    pub entries: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Only sample from this dataset.
    #[arg(long, value_enum)]
    pub dataset: Option<DatasetArg>,
    /// Allow several questions over the same passages.
    #[arg(long)]
    pub allow_shared_paragraphs: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ServeArgs {
    /// Canonical entry file holding the sample to annotate.
    #[arg(long)]
    pub entries: PathBuf,
    /// Event log; created when missing.
    #[arg(long)]
    pub log: PathBuf,
    /// TOML token file with an `[annotators]` table.
    #[arg(long, env = workbench::TOKENS_ENV)]
    pub tokens: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: String,
}

#[derive(Debug, Args, Serialize)]
pub struct ValidateArgs {
    #[arg(long)]
    pub entries: PathBuf,
    /// Line-delimited annotation records.
    #[arg(long)]
    pub records: PathBuf,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TextArgs {
    /// Compare words case-sensitively.
    #[arg(long)]
    pub keep_case: bool,
    /// Drop stopwords before computing overlaps.
    #[arg(long)]
    pub remove_stopwords: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct FeaturesArgs {
    #[arg(long)]
    pub entries: PathBuf,
    /// Adds a `supporting` column from these records.
    #[arg(long)]
    pub records: Option<PathBuf>,
    #[arg(long)]
    pub annotator: Option<String>,
    #[command(flatten)]
    pub text: TextArgs,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassWeightArg {
    None,
    Balanced,
}

#[derive(Debug, Args, Serialize)]
pub struct BaselineArgs {
    #[arg(long)]
    pub entries: PathBuf,
    #[arg(long)]
    pub records: PathBuf,
    /// Use this annotator's records; otherwise the first record per entry.
    #[arg(long)]
    pub annotator: Option<String>,
    #[arg(long, default_value_t = 5)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 2000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub l2: f64,
    /// Fit on instances in their natural order in every run.
    #[arg(long)]
    pub no_shuffle: bool,
    #[arg(long, value_enum, default_value_t = ClassWeightArg::None)]
    pub class_weight: ClassWeightArg,
    /// One row over all entries instead of one per dataset.
    #[arg(long)]
    pub pooled: bool,
    #[command(flatten)]
    pub text: TextArgs,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AgreementArgs {
    #[arg(long)]
    pub entries: PathBuf,
    /// One or more record files holding both annotators' records.
    #[arg(long, required = true, num_args = 1..)]
    pub records: Vec<PathBuf>,
    /// Reference annotator.
    #[arg(long)]
    pub first: String,
    #[arg(long)]
    pub second: String,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    #[arg(long)]
    pub entries: PathBuf,
    #[arg(long)]
    pub records: PathBuf,
    /// Only count this annotator's records.
    #[arg(long)]
    pub annotator: Option<String>,
    /// Write bar-chart series (family, label, dataset, percentage) as TSV.
    #[arg(long)]
    pub chart: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(a) => commands::ingest(a),
        Command::Sample(a) => commands::sample(a),
        Command::Serve(a) => commands::serve(a),
        Command::Validate(a) => commands::validate(a, cli.format),
        Command::Features(a) => commands::features(a, cli.format),
        Command::Baseline(a) => commands::baseline(a, cli.format),
        Command::Agreement(a) => commands::agreement(a, cli.format),
        Command::Report(a) => commands::report(a, cli.format),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
