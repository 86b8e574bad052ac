//! Extraction of the answer vector from free-form model output.
//!
//! Two stages run in order. The bracket stage looks for groups of the form
//! `[b1 b2 b3 b4 b5 b6 b7 b8]` (each token `0` or `1`, separated by spaces
//! and/or commas) and takes the last one. If there is none, the step stage
//! reads `Step k: Yes/No ...` lines and needs each of steps 1..8 exactly once.

use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::dataset::{RequirementVector, NUM_QUESTIONS};

static BRACKET_GROUP: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\[ *[01](?:[ ,]+[01]){7} *\]").unwrap());

static STEP_LINE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"(?i)^[\s"'*\-]*step\s*([0-9]+)\s*["'*]*\s*:(.*)$"#).unwrap());

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseMethod {
    Bracket,
    StepFallback,
}

impl ParseMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ParseMethod::Bracket => "bracket",
            ParseMethod::StepFallback => "step_fallback",
        }
    }
}

impl fmt::Display for ParseMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Why a response yielded no vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailureReason {
    /// Neither a bracket group nor any step line.
    NoBracketNoSteps,
    /// Some step number appears on more than one line. Carries the first such step.
    DuplicateStep(u8),
    /// Step lines exist but this step is absent.
    MissingStep(u8),
    /// The step line does not start with a clear Yes or No.
    AmbiguousStep(u8),
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureReason::NoBracketNoSteps => f.write_str("no_bracket_no_steps"),
            FailureReason::DuplicateStep(_) => f.write_str("duplicate_step"),
            FailureReason::MissingStep(k) => write!(f, "missing_step({k})"),
            FailureReason::AmbiguousStep(k) => write!(f, "ambiguous_step({k})"),
        }
    }
}

impl std::str::FromStr for FailureReason {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let step = |inner: &str| -> Result<u8, String> {
            inner
                .strip_suffix(')')
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| format!("bad failure reason {s:?}"))
        };
        match s {
            "no_bracket_no_steps" => Ok(FailureReason::NoBracketNoSteps),
            "duplicate_step" => Ok(FailureReason::DuplicateStep(0)),
            _ => {
                if let Some(rest) = s.strip_prefix("missing_step(") {
                    Ok(FailureReason::MissingStep(step(rest)?))
                } else if let Some(rest) = s.strip_prefix("ambiguous_step(") {
                    Ok(FailureReason::AmbiguousStep(step(rest)?))
                } else {
                    Err(format!("bad failure reason {s:?}"))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParseOutcome {
    Parsed {
        vector: RequirementVector,
        method: ParseMethod,
    },
    Failed(FailureReason),
}

impl ParseOutcome {
    pub fn vector(&self) -> Option<RequirementVector> {
        match self {
            ParseOutcome::Parsed { vector, .. } => Some(*vector),
            ParseOutcome::Failed(_) => None,
        }
    }

    pub fn method(&self) -> Option<ParseMethod> {
        match self {
            ParseOutcome::Parsed { method, .. } => Some(*method),
            ParseOutcome::Failed(_) => None,
        }
    }

    pub fn failure(&self) -> Option<FailureReason> {
        match self {
            ParseOutcome::Failed(reason) => Some(*reason),
            ParseOutcome::Parsed { .. } => None,
        }
    }

    pub fn is_parsed(&self) -> bool {
        matches!(self, ParseOutcome::Parsed { .. })
    }

    /// `bracket`, `step_fallback`, or the failure reason.
    pub fn label(&self) -> String {
        match self {
            ParseOutcome::Parsed { method, .. } => method.to_string(),
            ParseOutcome::Failed(reason) => reason.to_string(),
        }
    }
}

/// Extract a requirement vector from a model response. Never panics.
pub fn parse_response(text: &str) -> ParseOutcome {
    if let Some(vector) = last_bracket_group(text) {
        return ParseOutcome::Parsed {
            vector,
            method: ParseMethod::Bracket,
        };
    }
    match step_answers(text) {
        Ok(vector) => ParseOutcome::Parsed {
            vector,
            method: ParseMethod::StepFallback,
        },
        Err(reason) => ParseOutcome::Failed(reason),
    }
}

fn last_bracket_group(text: &str) -> Option<RequirementVector> {
    let group = BRACKET_GROUP.find_iter(text).last()?;
    let mut flags = [false; NUM_QUESTIONS];
    let digits = group.as_str().bytes().filter(|b| matches!(b, b'0' | b'1'));
    for (flag, digit) in flags.iter_mut().zip(digits) {
        *flag = digit == b'1';
    }
    Some(RequirementVector::new(flags))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum StepAnswer {
    Yes,
    No,
    Unclear,
}

fn step_answers(text: &str) -> Result<RequirementVector, FailureReason> {
    let mut seen: [Vec<StepAnswer>; NUM_QUESTIONS] = Default::default();
    let mut any = false;
    for line in text.lines() {
        let Some(caps) = STEP_LINE.captures(line) else {
            continue;
        };
        let Ok(step) = caps[1].parse::<usize>() else {
            continue;
        };
        if !(1..=NUM_QUESTIONS).contains(&step) {
            continue;
        }
        any = true;
        seen[step - 1].push(classify_answer(&caps[2]));
    }
    if !any {
        return Err(FailureReason::NoBracketNoSteps);
    }
    if let Some(k) = seen.iter().position(|s| s.len() > 1) {
        return Err(FailureReason::DuplicateStep(k as u8 + 1));
    }
    if let Some(k) = seen.iter().position(|s| s.is_empty()) {
        return Err(FailureReason::MissingStep(k as u8 + 1));
    }
    let mut flags = [false; NUM_QUESTIONS];
    for (k, (flag, answers)) in flags.iter_mut().zip(seen.iter()).enumerate() {
        match answers[0] {
            StepAnswer::Yes => *flag = true,
            StepAnswer::No => *flag = false,
            StepAnswer::Unclear => return Err(FailureReason::AmbiguousStep(k as u8 + 1)),
        }
    }
    Ok(RequirementVector::new(flags))
}

fn skip_markup(s: &str) -> &str {
    s.trim_start_matches(|c: char| c.is_whitespace() || c.is_ascii_punctuation())
}

// Matches `word` case-insensitively at the start of `s`, not followed by a
// letter or digit. Returns the remainder.
fn leading_word<'a>(s: &'a str, word: &str) -> Option<&'a str> {
    let head = s.get(..word.len())?;
    if !head.eq_ignore_ascii_case(word) {
        return None;
    }
    let rest = &s[word.len()..];
    match rest.chars().next() {
        Some(c) if c.is_alphanumeric() => None,
        _ => Some(rest),
    }
}

fn classify_answer(remainder: &str) -> StepAnswer {
    let body = skip_markup(remainder);
    let (answer, rest, other) = if let Some(rest) = leading_word(body, "yes") {
        (StepAnswer::Yes, rest, "no")
    } else if let Some(rest) = leading_word(body, "no") {
        (StepAnswer::No, rest, "yes")
    } else {
        return StepAnswer::Unclear;
    };
    // A restated template such as "'Yes' or 'No' <reasoning>" answers nothing.
    if let Some(after_or) = leading_word(skip_markup(rest), "or") {
        if leading_word(skip_markup(after_or), other).is_some() {
            return StepAnswer::Unclear;
        }
    }
    answer
}
