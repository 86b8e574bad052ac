//! `cmdreason`: run, ablate, score and report command-classification experiments.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use cmdreason_core::backend::{MockTransport, ResponseCache, Transport, DEFAULT_CACHE_DIR};
use cmdreason_core::baselines::RulesError;
use cmdreason_core::dataset::{self, DatasetError, DEFAULT_SAMPLE_TOLERANCE};
use cmdreason_core::harness::{
    self, AblationGrid, Baseline, ExperimentSpec, HarnessError, MethodResult, ReportFormat, SubsetSpec,
    DEFAULT_ABLATION_SUBSET,
};
use cmdreason_core::metrics::format_percent;
use cmdreason_core::prompt::{PromptTemplate, TemplateError, DEFAULT_SHOT_COUNT};
use cmdreason_core::{BackendConfig, BackendError, Client, ExplanationMode, FailurePolicy, PromptConfig, RuleSet};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_BACKEND: u8 = 3;

#[derive(Parser)]
#[command(
    name = "cmdreason",
    version,
    about = "Classify vehicle user commands into system requirements with chat models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Query a model for every command and score the answers.
    Run(RunArgs),
    /// Run every (mode, shot count) cell on a stratified subset.
    Ablate(AblateArgs),
    /// Score the random or keyword-rule baseline.
    Baseline(BaselineArgs),
    /// Write a stratified subset of a dataset.
    Sample(SampleArgs),
    /// Tabulate finished runs.
    Report(ReportArgs),
    /// Re-score a records file offline.
    Score(ScoreArgs),
}

#[derive(Args)]
struct BackendArgs {
    /// Base URL of an OpenAI-compatible server.
    #[arg(long, default_value = "http://localhost:8000/v1")]
    endpoint: String,
    #[arg(long, default_value = "gpt-4")]
    model: String,
    #[arg(long, default_value_t = 0.0)]
    temperature: f64,
    #[arg(long, default_value_t = 1024)]
    max_tokens: u32,
    #[arg(long, default_value_t = 60)]
    timeout_secs: u64,
    #[arg(long, default_value_t = 3)]
    max_retries: u32,
    #[arg(long, default_value_t = 4)]
    max_in_flight: usize,
    /// Answer each command with its gold label instead of calling the endpoint.
    #[arg(long)]
    mock_gold: bool,
}

impl BackendArgs {
    fn config(&self) -> BackendConfig {
        BackendConfig {
            temperature: self.temperature,
            max_output_tokens: self.max_tokens,
            timeout: Duration::from_secs(self.timeout_secs),
            max_retries: self.max_retries,
            max_in_flight: self.max_in_flight,
            ..BackendConfig::new(&self.endpoint, &self.model)
        }
    }

    fn client(&self, dataset_path: &Path) -> Result<Client, CliError> {
        let config = self.config();
        let client = if self.mock_gold {
            let data = dataset::load_dataset(dataset_path)?;
            let transport: Arc<dyn Transport> = Arc::new(MockTransport::gold_oracle(&data));
            Client::new(config, transport)?
        } else {
            Client::http(config)?
        };
        let cache = ResponseCache::from_env_or(DEFAULT_CACHE_DIR)
            .map_err(|e| CliError::Data(format!("cannot open response cache: {e}")))?;
        Ok(client.with_cache(cache))
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Prompt template; the bundled one when omitted.
    #[arg(long)]
    template: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SHOT_COUNT)]
    shots: usize,
    #[arg(long, default_value = "stepwise")]
    mode: ExplanationMode,
    #[arg(long, default_value = "strict")]
    policy: FailurePolicy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run on a stratified subset of this size.
    #[arg(long)]
    subset_size: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_TOLERANCE)]
    tolerance: f64,
    /// Method name in reports.
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Args)]
struct AblateArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    template: Option<PathBuf>,
    /// Comma-separated explanation modes.
    #[arg(long, value_delimiter = ',', default_value = "none,paragraph,stepwise")]
    modes: Vec<ExplanationMode>,
    /// Comma-separated shot counts.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
    shots: Vec<usize>,
    #[arg(long, default_value = "strict")]
    policy: FailurePolicy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stratified subset size; datasets at or below it run whole.
    #[arg(long, default_value_t = DEFAULT_ABLATION_SUBSET)]
    subset_size: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_TOLERANCE)]
    tolerance: f64,
    #[arg(long, default_value = "table")]
    format: ReportFormat,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("kind").required(true).args(["random", "rules"]))]
struct BaselineArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 0, requires = "random")]
    seed: u64,
    /// Keyword rules file.
    #[arg(long)]
    rules: Option<PathBuf>,
    #[arg(long, default_value = "strict")]
    policy: FailurePolicy,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_TOLERANCE)]
    tolerance: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Run directories containing report.json.
    #[arg(long = "in", num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value = "table")]
    format: ReportFormat,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    records: PathBuf,
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value = "strict")]
    policy: FailurePolicy,
    #[arg(long, default_value = "table")]
    format: ReportFormat,
}

enum CliError {
    Usage(String),
    Data(String),
    Backend(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Backend(_) => EXIT_BACKEND,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Backend(m) => m,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Backend(_) | HarnessError::AbortedRun { .. } => CliError::Backend(e.to_string()),
            HarnessError::EmptyGrid => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<BackendError> for CliError {
    fn from(e: BackendError) -> Self {
        match e {
            BackendError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            _ => CliError::Backend(e.to_string()),
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<TemplateError> for CliError {
    fn from(e: TemplateError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<RulesError> for CliError {
    fn from(e: RulesError) -> Self {
        CliError::Data(e.to_string())
    }
}

fn load_template(path: Option<&Path>) -> Result<PromptTemplate, CliError> {
    Ok(match path {
        Some(p) => PromptTemplate::load(p)?,
        None => PromptTemplate::default_template(),
    })
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| CliError::Data(format!("cannot write {}: {e}", p.display())))?;
            }
            fs::write(p, text).map_err(|e| CliError::Data(format!("cannot write {}: {e}", p.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Data(format!("cannot write to stdout: {e}")))
        }
    }
}

fn print_summary(label: &str, report: &cmdreason_core::EvalReport) {
    println!(
        "{label}: command level {}%, question level {}% ({} commands, {} parse failures, policy {})",
        format_percent(report.command_level_accuracy),
        format_percent(report.question_level_accuracy),
        report.n_commands,
        report.n_parse_failures,
        report.failure_policy,
    );
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let template = load_template(args.template.as_deref())?;
    let prompt_config = PromptConfig::from_template(&template, args.mode, args.shots)?;
    let client = args.backend.client(&args.dataset)?;
    let label = args
        .label
        .unwrap_or_else(|| format!("{}, {}, {}-shot", args.backend.model, args.mode, args.shots));
    let spec = ExperimentSpec {
        label,
        dataset_path: args.dataset,
        subset: args.subset_size.map(|size| SubsetSpec {
            size,
            tolerance: args.tolerance,
        }),
        prompt_config,
        backend_config: client.config().clone(),
        failure_policy: args.policy,
        seed: args.seed,
        output_dir: args.out,
    };
    let outcome = harness::run_experiment(&spec, &client)?;
    print_summary(&outcome.label, &outcome.report);
    eprintln!(
        "cache hits {}, network attempts {}",
        outcome.cache_hits, outcome.network_attempts
    );
    Ok(())
}

fn cmd_ablate(args: AblateArgs) -> Result<(), CliError> {
    let template = load_template(args.template.as_deref())?;
    let max_shots = args.shots.iter().copied().max().unwrap_or(0);
    // the base config carries every shot the grid may need
    let pool = max_shots.min(template.shots.len());
    let prompt_config = PromptConfig::from_template(&template, ExplanationMode::Stepwise, pool)?;
    let client = args.backend.client(&args.dataset)?;
    let grid = AblationGrid {
        explanation_modes: args.modes.into_iter().collect(),
        shot_counts: args.shots.into_iter().collect(),
        base: ExperimentSpec {
            label: args.backend.model.clone(),
            dataset_path: args.dataset,
            subset: Some(SubsetSpec {
                size: args.subset_size,
                tolerance: args.tolerance,
            }),
            prompt_config,
            backend_config: client.config().clone(),
            failure_policy: args.policy,
            seed: args.seed,
            output_dir: args.out.clone(),
        },
    };
    let rows = harness::run_ablation(&grid, &client)?;
    let csv = harness::render_ablation_table(&rows, ReportFormat::Csv);
    write_output(Some(&args.out.join("ablation.csv")), &csv)?;
    write_output(None, &harness::render_ablation_table(&rows, args.format))?;
    for row in &rows {
        if let Err(e) = &row.result {
            eprintln!("{}/{}-shot failed: {e}", row.mode, row.shots);
        }
    }
    if rows.iter().all(|r| r.result.is_err()) {
        return Err(CliError::Backend("every ablation cell failed".into()));
    }
    Ok(())
}

fn cmd_baseline(args: BaselineArgs) -> Result<(), CliError> {
    let data = dataset::load_dataset(&args.dataset)?;
    let baseline = match &args.rules {
        Some(path) => Baseline::Rules(RuleSet::load(path)?),
        None => Baseline::Random { seed: args.seed },
    };
    let outcome = harness::run_baseline(&baseline, &data, args.policy, &args.out)?;
    print_summary(&outcome.label, &outcome.report);
    Ok(())
}

fn cmd_sample(args: SampleArgs) -> Result<(), CliError> {
    let data = dataset::load_dataset(&args.dataset)?;
    let subset = dataset::stratified_sample(&data, args.n, args.seed, args.tolerance)?;
    dataset::write_dataset(&args.out, &subset)?;
    let full = dataset::distribution(&data)?;
    let sampled = dataset::distribution(&subset)?;
    eprintln!(
        "wrote {} of {} commands, max rate deviation {:.4}",
        subset.len(),
        data.len(),
        sampled.max_deviation(&full)
    );
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), CliError> {
    let results = args
        .inputs
        .iter()
        .map(|dir| {
            harness::load_summary(dir).map(|s| MethodResult {
                method: s.label,
                report: s.report,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    write_output(
        args.out.as_deref(),
        &harness::render_method_table(&results, args.format),
    )
}

fn cmd_score(args: ScoreArgs) -> Result<(), CliError> {
    let records = harness::load_records(&args.records)?;
    let gold = dataset::load_dataset(&args.dataset)?;
    let report = harness::rescore(&records, &gold, args.policy)?;
    let method = args
        .records
        .parent()
        .and_then(|dir| harness::load_summary(dir).ok())
        .map(|s| s.label)
        .unwrap_or_else(|| args.records.display().to_string());
    let table = harness::render_method_table(&[MethodResult { method, report }], args.format);
    write_output(None, &table)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Ablate(a) => cmd_ablate(a),
        Command::Baseline(a) => cmd_baseline(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Report(a) => cmd_report(a),
        Command::Score(a) => cmd_score(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
