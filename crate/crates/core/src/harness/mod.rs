//! End-to-end runs: dataset, transcripts, backend, parser, metrics.
//!
//! A run writes into its output directory:
//!
//! - `spec.json`: the resolved [`ExperimentSpec`]
//! - `progress.jsonl`: records appended as commands complete (removed on success)
//! - `records.jsonl`: one [`CommandRecord`] per command, in dataset order
//! - `report.json`: the [`RunSummary`]
//!
//! Responses go through the client's cache, so an aborted run restarted with
//! the same spec only queries the commands it had not finished.

mod report;

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{BackendConfig, BackendError, Client};
use crate::baselines::{random_classify, rule_classify, RuleSet};
use crate::dataset::{self, DatasetError, LabeledCommand, RequirementVector};
use crate::metrics::{self, EvalReport, FailurePolicy, MetricsError, PredictionRecord};
use crate::parser::parse_response;
use crate::prompt::{build_transcript, ExplanationMode, PromptConfig, PromptError, TemplateError};

pub use report::{
    emit_ablation_report, emit_report, render_ablation_table, render_method_table, AblationRow, MethodResult,
    ReportFormat,
};

pub const SPEC_FILE: &str = "spec.json";
pub const RECORDS_FILE: &str = "records.jsonl";
pub const REPORT_FILE: &str = "report.json";
pub const PROGRESS_FILE: &str = "progress.jsonl";

/// Subset size used for ablations unless overridden.
pub const DEFAULT_ABLATION_SUBSET: usize = 100;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("cannot write {}: {source}", path.display())]
    UnwritableOutput {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot read {}: {source}", path.display())]
    Unreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {reason}", path.display())]
    MalformedRecord { path: PathBuf, line: usize, reason: String },
    #[error("run aborted after {completed} of {total} commands: {source}")]
    AbortedRun {
        completed: usize,
        total: usize,
        #[source]
        source: BackendError,
    },
    #[error("ablation grid is empty")]
    EmptyGrid,
    #[error("nothing to report")]
    EmptyResults,
}

/// Optional stratified subset taken before a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsetSpec {
    pub size: usize,
    pub tolerance: f64,
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// Method name shown in reports.
    pub label: String,
    pub dataset_path: PathBuf,
    #[serde(default)]
    pub subset: Option<SubsetSpec>,
    pub prompt_config: PromptConfig,
    pub backend_config: BackendConfig,
    pub failure_policy: FailurePolicy,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl ExperimentSpec {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = read(path)?;
        serde_json::from_str(&text).map_err(|e| HarnessError::MalformedRecord {
            path: path.to_path_buf(),
            line: e.line(),
            reason: e.to_string(),
        })
    }

    /// The commands this spec runs on, after subsetting.
    pub fn commands(&self) -> Result<Vec<LabeledCommand>, HarnessError> {
        let data = dataset::load_dataset(&self.dataset_path)?;
        select_subset(data, self.subset, self.seed)
    }
}

fn select_subset(
    data: Vec<LabeledCommand>,
    subset: Option<SubsetSpec>,
    seed: u64,
) -> Result<Vec<LabeledCommand>, HarnessError> {
    match subset {
        Some(s) if s.size < data.len() => Ok(dataset::stratified_sample(&data, s.size, seed, s.tolerance)?),
        _ => Ok(data),
    }
}

/// One line of `records.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandRecord {
    pub id: String,
    pub cache_key: Option<String>,
    /// `bracket`, `step_fallback`, `direct` (baselines) or the parse failure reason.
    pub outcome: String,
    pub predicted: Option<RequirementVector>,
    pub gold: RequirementVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_text: Option<String>,
}

impl CommandRecord {
    pub fn prediction(&self) -> PredictionRecord {
        PredictionRecord {
            command_id: self.id.clone(),
            predicted: self.predicted,
            raw_text: self.raw_text.clone(),
        }
    }
}

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub report: EvalReport,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub label: String,
    pub report: EvalReport,
    pub records: Vec<CommandRecord>,
    pub cache_hits: usize,
    pub network_attempts: u64,
}

fn read(path: &Path) -> Result<String, HarnessError> {
    fs::read_to_string(path).map_err(|source| HarnessError::Unreadable {
        path: path.to_path_buf(),
        source,
    })
}

fn unwritable(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::UnwritableOutput {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(unwritable(parent))?;
    }
    fs::write(path, contents).map_err(unwritable(path))
}

fn to_json_lines<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// Write `records.jsonl` and `report.json` for a finished run.
pub fn write_run_outputs(
    dir: &Path,
    label: &str,
    records: &[CommandRecord],
    report: &EvalReport,
) -> Result<(), HarnessError> {
    write_file(&dir.join(RECORDS_FILE), &to_json_lines(records))?;
    let summary = RunSummary {
        label: label.to_string(),
        report: report.clone(),
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_file(&dir.join(REPORT_FILE), &(json + "\n"))
}

pub fn load_records(path: impl AsRef<Path>) -> Result<Vec<CommandRecord>, HarnessError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| HarnessError::Unreadable {
        path: path.to_path_buf(),
        source,
    })?;
    let mut records = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| HarnessError::Unreadable {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| HarnessError::MalformedRecord {
            path: path.to_path_buf(),
            line: idx + 1,
            reason: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}

pub fn load_summary(dir: impl AsRef<Path>) -> Result<RunSummary, HarnessError> {
    let path = dir.as_ref().join(REPORT_FILE);
    let text = read(&path)?;
    serde_json::from_str(&text).map_err(|e| HarnessError::MalformedRecord {
        path,
        line: e.line(),
        reason: e.to_string(),
    })
}

/// Score a records file against a dataset without querying any model.
pub fn rescore(
    records: &[CommandRecord],
    gold: &[LabeledCommand],
    policy: FailurePolicy,
) -> Result<EvalReport, HarnessError> {
    let predictions: Vec<_> = records.iter().map(CommandRecord::prediction).collect();
    Ok(metrics::evaluate(&predictions, gold, policy)?)
}

/// Run `spec` through `client`. The persisted spec carries the client's
/// backend configuration.
pub fn run_experiment(spec: &ExperimentSpec, client: &Client) -> Result<RunOutcome, HarnessError> {
    let commands = spec.commands()?;
    run_on_commands(spec, &commands, client)
}

fn run_on_commands(
    spec: &ExperimentSpec,
    commands: &[LabeledCommand],
    client: &Client,
) -> Result<RunOutcome, HarnessError> {
    spec.prompt_config.validate()?;
    let transcripts = commands
        .iter()
        .map(|c| build_transcript(&spec.prompt_config, &c.text))
        .collect::<Result<Vec<_>, _>>()?;

    let dir = &spec.output_dir;
    fs::create_dir_all(dir).map_err(unwritable(dir))?;
    let resolved = ExperimentSpec {
        backend_config: client.config().clone(),
        ..spec.clone()
    };
    write_file(
        &dir.join(SPEC_FILE),
        &(serde_json::to_string_pretty(&resolved).expect("spec serializes") + "\n"),
    )?;
    let journal_path = dir.join(PROGRESS_FILE);
    let journal = Mutex::new(File::create(&journal_path).map_err(unwritable(&journal_path))?);

    struct Done {
        record: CommandRecord,
        cache_hit: bool,
    }
    let slots: Vec<Mutex<Option<Done>>> = commands.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let first_error: Mutex<Option<HarnessError>> = Mutex::new(None);
    let fail = |err: HarnessError| {
        abort.store(true, Ordering::SeqCst);
        first_error.lock().unwrap().get_or_insert(err);
    };

    let workers = client.config().max_in_flight.min(commands.len()).max(1);
    let network_before = client.network_attempts();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                while !abort.load(Ordering::SeqCst) {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    if i >= commands.len() {
                        break;
                    }
                    let result = match client.complete(&transcripts[i]) {
                        Ok(r) => r,
                        Err(e) => {
                            fail(HarnessError::Backend(e));
                            break;
                        }
                    };
                    let outcome = parse_response(&result.raw_text);
                    let record = CommandRecord {
                        id: commands[i].id.clone(),
                        cache_key: Some(result.cache_key),
                        outcome: outcome.label(),
                        predicted: outcome.vector(),
                        gold: commands[i].gold,
                        raw_text: Some(result.raw_text),
                    };
                    let line = serde_json::to_string(&record).expect("record serializes") + "\n";
                    if let Err(e) = journal.lock().unwrap().write_all(line.as_bytes()) {
                        fail(unwritable(&journal_path)(e));
                        break;
                    }
                    *slots[i].lock().unwrap() = Some(Done {
                        record,
                        cache_hit: result.cache_hit,
                    });
                }
            });
        }
    });

    let done: Vec<Option<Done>> = slots.into_iter().map(|s| s.into_inner().unwrap()).collect();
    if let Some(err) = first_error.into_inner().unwrap() {
        let completed = done.iter().filter(|d| d.is_some()).count();
        return Err(match err {
            HarnessError::Backend(source) => HarnessError::AbortedRun {
                completed,
                total: commands.len(),
                source,
            },
            other => other,
        });
    }

    let mut cache_hits = 0;
    let records: Vec<CommandRecord> = done
        .into_iter()
        .map(|d| {
            let d = d.expect("every command completed");
            cache_hits += usize::from(d.cache_hit);
            d.record
        })
        .collect();
    let predictions: Vec<_> = records.iter().map(CommandRecord::prediction).collect();
    let report = metrics::evaluate(&predictions, commands, spec.failure_policy)?;
    write_run_outputs(dir, &spec.label, &records, &report)?;
    let _ = fs::remove_file(&journal_path);

    Ok(RunOutcome {
        label: spec.label.clone(),
        report,
        records,
        cache_hits,
        network_attempts: client.network_attempts() - network_before,
    })
}

/// Explanation modes crossed with shot counts over a base spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationGrid {
    pub explanation_modes: BTreeSet<ExplanationMode>,
    pub shot_counts: BTreeSet<usize>,
    /// Its prompt config supplies the text and the pool of shots; each cell
    /// uses the first `shots` of them.
    pub base: ExperimentSpec,
}

impl AblationGrid {
    /// Cells in run order: mode-major, shots ascending.
    pub fn cells(&self) -> Vec<(ExplanationMode, usize)> {
        self.explanation_modes
            .iter()
            .flat_map(|m| self.shot_counts.iter().map(move |s| (*m, *s)))
            .collect()
    }

    pub fn cell_dir(&self, mode: ExplanationMode, shots: usize) -> PathBuf {
        self.base.output_dir.join(format!("{mode}-{shots}shot"))
    }
}

/// Run every cell of `grid`. A failing cell is recorded and the grid goes on.
/// The subset is drawn once and shared by all cells.
pub fn run_ablation(grid: &AblationGrid, client: &Client) -> Result<Vec<AblationRow>, HarnessError> {
    let cells = grid.cells();
    if cells.is_empty() {
        return Err(HarnessError::EmptyGrid);
    }
    let commands = grid.base.commands()?;
    let mut rows = Vec::with_capacity(cells.len());
    for (mode, shots) in cells {
        let result = grid
            .base
            .prompt_config
            .cell(mode, shots)
            .map_err(HarnessError::from)
            .and_then(|prompt_config| {
                let spec = ExperimentSpec {
                    label: format!("{}/{mode}/{shots}-shot", grid.base.label),
                    prompt_config,
                    output_dir: grid.cell_dir(mode, shots),
                    ..grid.base.clone()
                };
                run_on_commands(&spec, &commands, client)
            });
        rows.push(AblationRow {
            mode,
            shots,
            result: result.map(|o| o.report).map_err(|e| e.to_string()),
        });
    }
    Ok(rows)
}

/// Which non-LLM comparator to run.
#[derive(Debug, Clone)]
pub enum Baseline {
    Random { seed: u64 },
    Rules(RuleSet),
}

impl Baseline {
    pub fn label(&self) -> &'static str {
        match self {
            Baseline::Random { .. } => "Random",
            Baseline::Rules(_) => "Rule-based",
        }
    }
}

/// Run a baseline over `commands`, writing records and report into `out_dir`.
pub fn run_baseline(
    baseline: &Baseline,
    commands: &[LabeledCommand],
    policy: FailurePolicy,
    out_dir: &Path,
) -> Result<RunOutcome, HarnessError> {
    let predicted: Vec<RequirementVector> = match baseline {
        Baseline::Random { seed } => random_classify(*seed, commands),
        Baseline::Rules(rules) => commands.iter().map(|c| rule_classify(rules, &c.text)).collect(),
    };
    let records: Vec<CommandRecord> = commands
        .iter()
        .zip(predicted)
        .map(|(c, p)| CommandRecord {
            id: c.id.clone(),
            cache_key: None,
            outcome: "direct".into(),
            predicted: Some(p),
            gold: c.gold,
            raw_text: None,
        })
        .collect();
    let report = rescore(&records, commands, policy)?;
    write_run_outputs(out_dir, baseline.label(), &records, &report)?;
    Ok(RunOutcome {
        label: baseline.label().to_string(),
        report,
        records,
        cache_hits: 0,
        network_attempts: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{MockTransport, ResponseCache};
    use crate::dataset::toy_dataset;
    use crate::prompt::{answer_line, PromptTemplate};
    use std::sync::Arc;
    use std::time::Duration;

    type Reply = Option<Result<String, BackendError>>;

    fn gold_script() -> impl Fn(&crate::backend::Transcript) -> Reply + Send + Sync + 'static {
        let gold: std::collections::HashMap<String, RequirementVector> =
            toy_dataset().into_iter().map(|c| (c.text, c.gold)).collect();
        move |t| {
            let cmd = t.final_user_message()?;
            gold.get(cmd)
                .map(|g| Ok(format!("Explanation: ...\n{}", answer_line(g))))
        }
    }

    fn gold_mock() -> MockTransport {
        MockTransport::from_fn(gold_script())
    }

    fn setup(dir: &Path) -> ExperimentSpec {
        let data = dir.join("toy.tsv");
        fs::write(&data, dataset::toy_dataset_source()).unwrap();
        let template = PromptTemplate::default_template();
        ExperimentSpec {
            label: "mock".into(),
            dataset_path: data,
            subset: None,
            prompt_config: PromptConfig::from_template(&template, ExplanationMode::Stepwise, 3).unwrap(),
            backend_config: BackendConfig::new("http://unused.invalid", "mock"),
            failure_policy: FailurePolicy::Strict,
            seed: 0,
            output_dir: dir.join("out"),
        }
    }

    fn client(mock: Arc<MockTransport>, cache: &Path) -> Client {
        Client::new(BackendConfig::new("http://unused.invalid", "mock"), mock)
            .unwrap()
            .with_cache(ResponseCache::open(cache).unwrap())
            .with_backoff_base(Duration::ZERO)
    }

    #[test]
    fn oracle_mock_scores_perfectly() {
        let dir = tempfile::tempdir().unwrap();
        let spec = setup(dir.path());
        let mock = Arc::new(gold_mock());
        let c = client(mock.clone(), &dir.path().join("cache"));
        let out = run_experiment(&spec, &c).unwrap();
        assert_eq!(out.report.question_level_accuracy, 1.0);
        assert_eq!(out.report.command_level_accuracy, 1.0);
        assert_eq!(out.records.len(), 24);
        assert_eq!(mock.calls(), 24);

        let records = load_records(spec.output_dir.join(RECORDS_FILE)).unwrap();
        assert_eq!(records, out.records);
        let ids: Vec<_> = records.iter().map(|r| r.id.as_str()).collect();
        let expected: Vec<_> = toy_dataset().iter().map(|c| c.id.clone()).collect();
        assert_eq!(ids, expected);
        assert!(!spec.output_dir.join(PROGRESS_FILE).exists());
        assert_eq!(load_summary(&spec.output_dir).unwrap().report, out.report);
        let persisted = ExperimentSpec::load(spec.output_dir.join(SPEC_FILE)).unwrap();
        assert_eq!(persisted, spec);

        // warm cache: same report, no transport calls
        let again = run_experiment(&spec, &c).unwrap();
        assert_eq!(again.report, out.report);
        assert_eq!(again.network_attempts, 0);
        assert_eq!(again.cache_hits, 24);
        assert_eq!(mock.calls(), 24);
    }

    #[test]
    fn one_unparseable_answer_under_strict() {
        let dir = tempfile::tempdir().unwrap();
        let spec = setup(dir.path());
        let inner = gold_script();
        let mock = Arc::new(MockTransport::from_fn(move |t| {
            if t.final_user_message() == Some("Tell me a joke.") {
                Some(Ok("I'd rather not say.".into()))
            } else {
                inner(t)
            }
        }));
        let out = run_experiment(&spec, &client(mock, &dir.path().join("cache"))).unwrap();
        assert_eq!(out.report.n_parse_failures, 1);
        assert_eq!(out.report.commands_correct, 23);
        assert_eq!(out.report.command_level_accuracy, 23.0 / 24.0);
        assert_eq!(out.report.questions_correct(), 23 * 8);
        let failed = out.records.iter().find(|r| r.id == "c24").unwrap();
        assert_eq!(failed.outcome, "no_bracket_no_steps");
        assert_eq!(failed.predicted, None);
    }

    #[test]
    fn aborted_run_resumes_from_cache() {
        let dir = tempfile::tempdir().unwrap();
        let spec = setup(dir.path());
        let cache = dir.path().join("cache");
        let inner = gold_script();
        let served = AtomicUsize::new(0);
        let flaky = Arc::new(MockTransport::from_fn(move |t| {
            if served.fetch_add(1, Ordering::SeqCst) >= 10 {
                Some(Err(BackendError::AuthError { status: 401 }))
            } else {
                inner(t)
            }
        }));
        match run_experiment(&spec, &client(flaky, &cache)) {
            Err(HarnessError::AbortedRun { completed, total, .. }) => {
                assert!((10..24).contains(&completed), "{completed}");
                assert_eq!(total, 24);
            }
            other => panic!("{other:?}"),
        }
        assert!(spec.output_dir.join(PROGRESS_FILE).exists());

        let mock = Arc::new(gold_mock());
        let resumed = run_experiment(&spec, &client(mock.clone(), &cache)).unwrap();
        assert_eq!(resumed.cache_hits, 10);
        assert_eq!(mock.calls(), 14);

        let fresh_dir = tempfile::tempdir().unwrap();
        let fresh_spec = ExperimentSpec {
            output_dir: fresh_dir.path().join("out"),
            ..spec.clone()
        };
        let fresh = run_experiment(
            &fresh_spec,
            &client(Arc::new(gold_mock()), &fresh_dir.path().join("cache")),
        )
        .unwrap();
        assert_eq!(fresh.report, resumed.report);
        assert_eq!(fresh.records, resumed.records);
    }

    #[test]
    fn ablation_rows_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let mut base = setup(dir.path());
        base.prompt_config =
            PromptConfig::from_template(&PromptTemplate::default_template(), ExplanationMode::Stepwise, 4).unwrap();
        let grid = AblationGrid {
            explanation_modes: [ExplanationMode::Stepwise, ExplanationMode::None].into(),
            shot_counts: [4, 0, 2, 5].into(),
            base,
        };
        let mock = Arc::new(gold_mock());
        let rows = run_ablation(&grid, &client(mock.clone(), &dir.path().join("cache"))).unwrap();
        let order: Vec<_> = rows.iter().map(|r| (r.mode, r.shots)).collect();
        use ExplanationMode::*;
        assert_eq!(
            order,
            [
                (None, 0),
                (None, 2),
                (None, 4),
                (None, 5),
                (Stepwise, 0),
                (Stepwise, 2),
                (Stepwise, 4),
                (Stepwise, 5)
            ]
        );
        for row in &rows {
            if row.shots == 5 {
                assert!(row.result.is_err());
            } else {
                let r = row.result.as_ref().unwrap();
                assert_eq!((r.command_level_accuracy, r.question_level_accuracy), (1.0, 1.0));
            }
        }
        assert_eq!(mock.calls(), 6 * 24);
        assert!(grid.cell_dir(Stepwise, 2).join(RECORDS_FILE).exists());
    }

    #[test]
    fn empty_grid() {
        let dir = tempfile::tempdir().unwrap();
        let grid = AblationGrid {
            explanation_modes: BTreeSet::new(),
            shot_counts: [0].into(),
            base: setup(dir.path()),
        };
        let c = client(Arc::new(gold_mock()), &dir.path().join("cache"));
        assert!(matches!(run_ablation(&grid, &c), Err(HarnessError::EmptyGrid)));
    }

    #[test]
    fn subset_is_used_when_smaller() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = setup(dir.path());
        spec.subset = Some(SubsetSpec {
            size: 12,
            tolerance: 0.2,
        });
        let mock = Arc::new(gold_mock());
        let out = run_experiment(&spec, &client(mock.clone(), &dir.path().join("cache"))).unwrap();
        assert_eq!(out.records.len(), 12);
        assert_eq!(mock.calls(), 12);
    }

    #[test]
    fn baseline_outputs_rescore() {
        let dir = tempfile::tempdir().unwrap();
        let toy = toy_dataset();
        let out = run_baseline(&Baseline::Random { seed: 9 }, &toy, FailurePolicy::Strict, dir.path()).unwrap();
        let records = load_records(dir.path().join(RECORDS_FILE)).unwrap();
        assert_eq!(rescore(&records, &toy, FailurePolicy::Strict).unwrap(), out.report);
        assert_eq!(load_summary(dir.path()).unwrap().label, "Random");
    }
}
