//! Classify natural-language autonomous-vehicle user commands into eight
//! binary system requirements by prompting chat-completion models, then score
//! the answers against gold labels.
//!
//! The crate is split along the pipeline:
//!
//! - [`dataset`]: labeled command files, label distributions, stratified subsets
//! - [`prompt`]: conditioning text, few-shot exchanges and transcripts
//! - [`backend`]: chat-completion client, mock backend and response cache
//! - [`parser`]: answer-vector extraction from free-form model output
//! - [`baselines`]: random guessing and keyword rules
//! - [`metrics`]: question-level and command-level accuracy
//! - [`harness`]: end-to-end runs, ablation grids and report emission

pub mod backend;
pub mod baselines;
pub mod dataset;
pub mod harness;
pub mod metrics;
pub mod parser;
pub mod prompt;

pub use backend::{BackendConfig, BackendError, ChatMessage, Client, CompletionResult, Role, Transcript};
pub use baselines::{random_classify, rule_classify, RuleSet};
pub use dataset::{Category, DatasetError, LabelDistribution, LabeledCommand, RequirementVector};
pub use harness::{AblationGrid, ExperimentSpec, HarnessError};
pub use metrics::{EvalReport, FailurePolicy, PredictionRecord};
pub use parser::{parse_response, ParseMethod, ParseOutcome};
pub use prompt::{ExplanationMode, PromptConfig, ShotExample};
