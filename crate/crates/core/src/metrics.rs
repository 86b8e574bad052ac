//! Question-level and command-level accuracy.
//!
//! Counts are kept as integers; fractions are derived once at the end.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Category, LabeledCommand, RequirementVector, NUM_QUESTIONS};
use crate::parser::ParseOutcome;

/// How to score a response that yielded no vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailurePolicy {
    /// Wrong on all eight questions and at command level.
    #[default]
    Strict,
    /// Dropped from every denominator.
    Exclude,
}

impl fmt::Display for FailurePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailurePolicy::Strict => "strict",
            FailurePolicy::Exclude => "exclude",
        })
    }
}

impl FromStr for FailurePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "strict" => Ok(FailurePolicy::Strict),
            "exclude" => Ok(FailurePolicy::Exclude),
            other => Err(format!("unknown failure policy {other:?} (expected strict or exclude)")),
        }
    }
}

/// One prediction; `predicted` is `None` when the response was unparseable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub command_id: String,
    pub predicted: Option<RequirementVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_text: Option<String>,
}

impl PredictionRecord {
    pub fn from_vector(command_id: impl Into<String>, vector: RequirementVector) -> Self {
        Self {
            command_id: command_id.into(),
            predicted: Some(vector),
            raw_text: None,
        }
    }

    pub fn from_outcome(command_id: impl Into<String>, outcome: &ParseOutcome, raw_text: Option<String>) -> Self {
        Self {
            command_id: command_id.into(),
            predicted: outcome.vector(),
            raw_text,
        }
    }

    pub fn unparseable(command_id: impl Into<String>) -> Self {
        Self {
            command_id: command_id.into(),
            predicted: None,
            raw_text: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_question_accuracy: [f64; NUM_QUESTIONS],
    pub question_level_accuracy: f64,
    pub command_level_accuracy: f64,
    /// Commands in the gold set.
    pub n_commands: usize,
    /// Commands that entered the denominators.
    pub n_scored: usize,
    pub n_parse_failures: usize,
    pub per_question_correct: [usize; NUM_QUESTIONS],
    pub commands_correct: usize,
    pub failure_policy: FailurePolicy,
}

impl EvalReport {
    /// Correct (command, question) pairs.
    pub fn questions_correct(&self) -> usize {
        self.per_question_correct.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error(
        "prediction ids do not match gold ids (missing: {missing:?}, duplicate: {duplicate:?}, unknown: {unknown:?})"
    )]
    IdMismatch {
        /// Gold ids without a prediction.
        missing: Vec<String>,
        /// Ids predicted (or labeled) more than once.
        duplicate: Vec<String>,
        /// Predicted ids absent from gold.
        unknown: Vec<String>,
    },
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Score predictions against gold. Every gold id needs exactly one prediction.
pub fn evaluate(
    predictions: &[PredictionRecord],
    gold: &[LabeledCommand],
    policy: FailurePolicy,
) -> Result<EvalReport, MetricsError> {
    let mut duplicate = Vec::new();
    let mut gold_by_id: HashMap<&str, &RequirementVector> = HashMap::with_capacity(gold.len());
    for g in gold {
        if gold_by_id.insert(g.id.as_str(), &g.gold).is_some() {
            duplicate.push(g.id.clone());
        }
    }
    let mut seen = HashSet::with_capacity(predictions.len());
    let mut unknown = Vec::new();
    for p in predictions {
        if !gold_by_id.contains_key(p.command_id.as_str()) {
            unknown.push(p.command_id.clone());
        } else if !seen.insert(p.command_id.as_str()) {
            duplicate.push(p.command_id.clone());
        }
    }
    let missing: Vec<String> = gold
        .iter()
        .filter(|g| !seen.contains(g.id.as_str()))
        .map(|g| g.id.clone())
        .collect();
    if !(missing.is_empty() && duplicate.is_empty() && unknown.is_empty()) {
        return Err(MetricsError::IdMismatch {
            missing,
            duplicate,
            unknown,
        });
    }

    let mut per_question_correct = [0usize; NUM_QUESTIONS];
    let mut commands_correct = 0;
    let mut failures = 0;
    for p in predictions {
        let truth = gold_by_id[p.command_id.as_str()];
        let Some(predicted) = p.predicted else {
            failures += 1;
            continue;
        };
        let mut all = true;
        for (k, correct) in per_question_correct.iter_mut().enumerate() {
            if predicted.get(k) == truth.get(k) {
                *correct += 1;
            } else {
                all = false;
            }
        }
        commands_correct += usize::from(all);
    }

    let n_commands = gold.len();
    let n_scored = match policy {
        FailurePolicy::Strict => n_commands,
        FailurePolicy::Exclude => n_commands - failures,
    };
    let total_correct: usize = per_question_correct.iter().sum();
    Ok(EvalReport {
        per_question_accuracy: per_question_correct.map(|c| ratio(c, n_scored)),
        question_level_accuracy: ratio(total_correct, NUM_QUESTIONS * n_scored),
        command_level_accuracy: ratio(commands_correct, n_scored),
        n_commands,
        n_scored,
        n_parse_failures: failures,
        per_question_correct,
        commands_correct,
        failure_policy: policy,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BreakdownRow {
    pub name: String,
    pub accuracy: f64,
}

/// One row per category in vector order, then `Overall`.
pub fn per_question_breakdown(report: &EvalReport) -> Vec<BreakdownRow> {
    Category::ALL
        .iter()
        .map(|c| BreakdownRow {
            name: c.title().to_string(),
            accuracy: report.per_question_accuracy[c.index()],
        })
        .chain(std::iter::once(BreakdownRow {
            name: "Overall".into(),
            accuracy: report.question_level_accuracy,
        }))
        .collect()
}

/// A fraction as a percentage with two decimals.
pub fn format_percent(fraction: f64) -> String {
    format!("{:.2}", fraction * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(mask: &str) -> RequirementVector {
        RequirementVector::from_mask(mask).unwrap()
    }

    fn gold(masks: &[&str]) -> Vec<LabeledCommand> {
        masks
            .iter()
            .enumerate()
            .map(|(i, m)| LabeledCommand::new(format!("c{i}"), format!("cmd {i}"), v(m)))
            .collect()
    }

    #[test]
    fn identity_predictions() {
        let g = gold(&["01001110", "10110001", "00000000"]);
        let p: Vec<_> = g.iter().map(|c| PredictionRecord::from_vector(&c.id, c.gold)).collect();
        let r = evaluate(&p, &g, FailurePolicy::Strict).unwrap();
        assert_eq!(r.question_level_accuracy, 1.0);
        assert_eq!(r.command_level_accuracy, 1.0);
        for row in per_question_breakdown(&r) {
            assert_eq!(row.accuracy, 1.0);
        }
    }

    #[test]
    fn one_flag_off() {
        let g = gold(&["01001110"]);
        let p = [PredictionRecord::from_vector("c0", v("11001110"))];
        let r = evaluate(&p, &g, FailurePolicy::Strict).unwrap();
        assert_eq!(r.question_level_accuracy, 0.875);
        assert_eq!(r.command_level_accuracy, 0.0);
    }

    #[test]
    fn strict_failure_counts_zero() {
        let g = gold(&["01001110", "10110001"]);
        let p = [
            PredictionRecord::from_vector("c0", v("01001110")),
            PredictionRecord::unparseable("c1"),
        ];
        let r = evaluate(&p, &g, FailurePolicy::Strict).unwrap();
        assert_eq!(r.question_level_accuracy, 0.5);
        assert_eq!(r.command_level_accuracy, 0.5);
        assert_eq!(r.n_parse_failures, 1);
        assert_eq!(r.questions_correct(), 8);

        let r = evaluate(&p, &g, FailurePolicy::Exclude).unwrap();
        assert_eq!(r.question_level_accuracy, 1.0);
        assert_eq!(r.command_level_accuracy, 1.0);
        assert_eq!(r.n_scored, 1);
        assert_eq!(r.n_parse_failures, 1);
    }

    #[test]
    fn all_excluded_scores_zero() {
        let g = gold(&["01001110"]);
        let r = evaluate(&[PredictionRecord::unparseable("c0")], &g, FailurePolicy::Exclude).unwrap();
        assert_eq!(r.n_scored, 0);
        assert_eq!(r.question_level_accuracy, 0.0);
    }

    #[test]
    fn id_mismatches() {
        let g = gold(&["01001110", "10110001"]);
        let only_one = [PredictionRecord::from_vector("c0", v("01001110"))];
        match evaluate(&only_one, &g, FailurePolicy::Strict) {
            Err(MetricsError::IdMismatch { missing, .. }) => assert_eq!(missing, ["c1"]),
            other => panic!("{other:?}"),
        }
        let dup = [
            PredictionRecord::from_vector("c0", v("01001110")),
            PredictionRecord::from_vector("c0", v("01001110")),
            PredictionRecord::from_vector("c1", v("01001110")),
        ];
        match evaluate(&dup, &g, FailurePolicy::Strict) {
            Err(MetricsError::IdMismatch { duplicate, .. }) => assert_eq!(duplicate, ["c0"]),
            other => panic!("{other:?}"),
        }
        let stray = [
            PredictionRecord::from_vector("c0", v("01001110")),
            PredictionRecord::from_vector("c1", v("01001110")),
            PredictionRecord::from_vector("zz", v("01001110")),
        ];
        match evaluate(&stray, &g, FailurePolicy::Strict) {
            Err(MetricsError::IdMismatch { unknown, .. }) => assert_eq!(unknown, ["zz"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn breakdown_mean_equals_overall_under_strict() {
        let g = gold(&["01001110", "10110001", "11111111", "00000000"]);
        let p = [
            PredictionRecord::from_vector("c0", v("01001111")),
            PredictionRecord::from_vector("c1", v("00110001")),
            PredictionRecord::unparseable("c2"),
            PredictionRecord::from_vector("c3", v("00000000")),
        ];
        let r = evaluate(&p, &g, FailurePolicy::Strict).unwrap();
        let rows = per_question_breakdown(&r);
        assert_eq!(rows.len(), 9);
        assert_eq!(rows[0].name, "Perception");
        assert_eq!(rows[8].name, "Overall");
        let mean: f64 = rows[..8].iter().map(|r| r.accuracy).sum::<f64>() / 8.0;
        assert!((mean - rows[8].accuracy).abs() < 1e-12);
        // hand count: 7 + 7 + 0 + 8 = 22 of 32
        assert_eq!(r.questions_correct(), 22);
        assert_eq!(r.command_level_accuracy, 0.25);
    }

    #[test]
    fn percent_formatting() {
        assert_eq!(format_percent(0.8902), "89.02");
        assert_eq!(format_percent(1.0 / 256.0), "0.39");
        assert_eq!(format_percent(1.0), "100.00");
    }
}
