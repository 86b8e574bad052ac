//! Prompt rendering.
//!
//! A [`PromptConfig`] fully determines the system message and the few-shot
//! exchanges; [`build_transcript`] appends the command under test as the
//! final user message. Everything here is a pure function of its inputs.
//!
//! Template files hold the editable text. A section starts with a line
//! `=== name ===`; the required sections are `preamble`, `q1` .. `q8` and
//! `format_instruction`. Any number of `shot` sections may follow, each made
//! of `key: value` lines for `command`, `gold` (an 8-character `0`/`1` mask)
//! and `step1` .. `step8`. Lines starting with `#` are comments outside text
//! sections and inside shot sections.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{ChatMessage, Role, Transcript};
use crate::dataset::{RequirementVector, NUM_QUESTIONS};

/// Shot count used when none is requested.
pub const DEFAULT_SHOT_COUNT: usize = 3;

/// The literal answer pattern the format instruction must contain.
pub const OUTPUT_PATTERN: &str = "[A1 A2 A3 A4 A5 A6 A7 A8]";

const DEFAULT_TEMPLATE: &str = include_str!("../data/default_template.txt");

const ANSWER_FORMAT_HEADER: &str = "Answer the 8 questions using the following format:";
const EXPLANATION_HEADER: &str = "Explanation:";
const CONCLUSION_PREFIX: &str = "Therefore, the output should be : ";

static SECTION_HEADER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^===\s*([A-Za-z0-9_]+)\s*===\s*$").unwrap());

/// How much of the per-question explanation the prompt carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum ExplanationMode {
    /// Task statement and output format only.
    None,
    /// Question explanations as one block of prose.
    Paragraph,
    /// Question explanations as `Step k:` lines.
    Stepwise,
}

impl ExplanationMode {
    pub const ALL: [ExplanationMode; 3] = [
        ExplanationMode::None,
        ExplanationMode::Paragraph,
        ExplanationMode::Stepwise,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExplanationMode::None => "none",
            ExplanationMode::Paragraph => "paragraph",
            ExplanationMode::Stepwise => "stepwise",
        }
    }
}

impl fmt::Display for ExplanationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExplanationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(ExplanationMode::None),
            "paragraph" => Ok(ExplanationMode::Paragraph),
            "stepwise" => Ok(ExplanationMode::Stepwise),
            other => Err(format!(
                "unknown explanation mode {other:?} (expected none, paragraph or stepwise)"
            )),
        }
    }
}

/// A worked example shown to the model before the real command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotExample {
    pub command: String,
    pub gold: RequirementVector,
    pub step_rationales: [String; NUM_QUESTIONS],
}

impl ShotExample {
    /// Checks that every rationale is non-empty and opens with the answer
    /// its gold flag implies (`Yes` for true, `No` for false).
    pub fn validate(&self) -> Result<(), String> {
        if self.command.trim().is_empty() {
            return Err("shot command is empty".into());
        }
        for (k, rationale) in self.step_rationales.iter().enumerate() {
            let text = rationale.trim();
            if text.is_empty() {
                return Err(format!("rationale for step {} is empty", k + 1));
            }
            let expected = if self.gold.get(k) { "yes" } else { "no" };
            let head = text.get(..expected.len()).unwrap_or("");
            let boundary = text[head.len()..].chars().next().is_none_or(|c| !c.is_alphanumeric());
            if !head.eq_ignore_ascii_case(expected) || !boundary {
                return Err(format!(
                    "rationale for step {} must start with {:?} to agree with gold {}",
                    k + 1,
                    if self.gold.get(k) { "Yes" } else { "No" },
                    self.gold.to_mask()
                ));
            }
        }
        Ok(())
    }
}

/// Everything that shapes the rendered prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptConfig {
    pub mode: ExplanationMode,
    pub shots: Vec<ShotExample>,
    pub question_texts: [String; NUM_QUESTIONS],
    pub preamble: String,
    pub format_instruction: String,
}

impl PromptConfig {
    /// Config using the first `shot_count` shots of `template`.
    pub fn from_template(
        template: &PromptTemplate,
        mode: ExplanationMode,
        shot_count: usize,
    ) -> Result<Self, TemplateError> {
        if shot_count > template.shots.len() {
            return Err(TemplateError::NotEnoughShots {
                requested: shot_count,
                available: template.shots.len(),
            });
        }
        Ok(Self {
            mode,
            shots: template.shots[..shot_count].to_vec(),
            question_texts: template.question_texts.clone(),
            preamble: template.preamble.clone(),
            format_instruction: template.format_instruction.clone(),
        })
    }

    /// Same text with a different mode, keeping only the first `shot_count` shots.
    pub fn cell(&self, mode: ExplanationMode, shot_count: usize) -> Result<Self, TemplateError> {
        if shot_count > self.shots.len() {
            return Err(TemplateError::NotEnoughShots {
                requested: shot_count,
                available: self.shots.len(),
            });
        }
        Ok(Self {
            mode,
            shots: self.shots[..shot_count].to_vec(),
            ..self.clone()
        })
    }

    pub fn validate(&self) -> Result<(), TemplateError> {
        let empty = |name: &str, s: &str| {
            if s.trim().is_empty() {
                Err(TemplateError::EmptySection(name.to_string()))
            } else {
                Ok(())
            }
        };
        empty("preamble", &self.preamble)?;
        empty("format_instruction", &self.format_instruction)?;
        for (k, q) in self.question_texts.iter().enumerate() {
            empty(&format!("q{}", k + 1), q)?;
        }
        if self.format_instruction.matches(OUTPUT_PATTERN).count() != 1
            || [&self.preamble]
                .into_iter()
                .chain(self.question_texts.iter())
                .any(|s| s.contains(OUTPUT_PATTERN))
        {
            return Err(TemplateError::OutputPattern);
        }
        for (i, shot) in self.shots.iter().enumerate() {
            shot.validate()
                .map_err(|reason| TemplateError::InvalidShot { index: i + 1, reason })?;
        }
        Ok(())
    }
}

/// Parsed contents of a template file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub preamble: String,
    pub question_texts: [String; NUM_QUESTIONS],
    pub format_instruction: String,
    pub shots: Vec<ShotExample>,
}

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("failed to read template {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("template is missing required section {0:?}")]
    MissingSection(String),
    #[error("line {line}: unknown section {name:?}")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: section {name:?} appears twice")]
    DuplicateSection { line: usize, name: String },
    #[error("line {line}: text outside any section")]
    StrayText { line: usize },
    #[error("section {0:?} is empty")]
    EmptySection(String),
    #[error("format instruction must contain {OUTPUT_PATTERN} exactly once, and no other section may contain it")]
    OutputPattern,
    #[error("shot {index}: {reason}")]
    InvalidShot { index: usize, reason: String },
    #[error("requested {requested} shots but the template has {available}")]
    NotEnoughShots { requested: usize, available: usize },
}

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("command is empty")]
    EmptyCommand,
}

impl PromptTemplate {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, TemplateError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| TemplateError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// The bundled template.
    pub fn default_template() -> Self {
        Self::parse(DEFAULT_TEMPLATE).expect("bundled template is valid")
    }

    /// Raw text of the bundled template file.
    pub fn default_source() -> &'static str {
        DEFAULT_TEMPLATE
    }

    pub fn parse(text: &str) -> Result<Self, TemplateError> {
        let sections = split_sections(text)?;

        let mut preamble = None;
        let mut format_instruction = None;
        let mut questions: [Option<String>; NUM_QUESTIONS] = Default::default();
        let mut shots = Vec::new();

        for section in sections {
            let duplicate = || TemplateError::DuplicateSection {
                line: section.line,
                name: section.name.clone(),
            };
            match section.name.as_str() {
                "preamble" => {
                    if preamble.replace(section.body()).is_some() {
                        return Err(duplicate());
                    }
                }
                "format_instruction" => {
                    if format_instruction.replace(section.body()).is_some() {
                        return Err(duplicate());
                    }
                }
                "shot" => {
                    let index = shots.len() + 1;
                    let shot =
                        parse_shot(&section.lines).map_err(|reason| TemplateError::InvalidShot { index, reason })?;
                    shots.push(shot);
                }
                name => {
                    let k = name
                        .strip_prefix('q')
                        .and_then(|n| n.parse::<usize>().ok())
                        .filter(|k| (1..=NUM_QUESTIONS).contains(k))
                        .ok_or_else(|| TemplateError::UnknownSection {
                            line: section.line,
                            name: name.to_string(),
                        })?;
                    if questions[k - 1].replace(section.body()).is_some() {
                        return Err(duplicate());
                    }
                }
            }
        }

        let require = |value: Option<String>, name: &str| -> Result<String, TemplateError> {
            let value = value.ok_or_else(|| TemplateError::MissingSection(name.to_string()))?;
            if value.trim().is_empty() {
                return Err(TemplateError::EmptySection(name.to_string()));
            }
            Ok(value)
        };
        let preamble = require(preamble, "preamble")?;
        let mut question_texts: [String; NUM_QUESTIONS] = Default::default();
        for (k, q) in questions.into_iter().enumerate() {
            question_texts[k] = require(q, &format!("q{}", k + 1))?;
        }
        let format_instruction = require(format_instruction, "format_instruction")?;

        let template = Self {
            preamble,
            question_texts,
            format_instruction,
            shots,
        };
        PromptConfig::from_template(&template, ExplanationMode::Stepwise, template.shots.len())?.validate()?;
        Ok(template)
    }
}

struct Section {
    name: String,
    line: usize,
    lines: Vec<String>,
}

impl Section {
    fn body(&self) -> String {
        let start = self.lines.iter().position(|l| !l.trim().is_empty());
        let end = self.lines.iter().rposition(|l| !l.trim().is_empty());
        match (start, end) {
            (Some(s), Some(e)) => self.lines[s..=e].join("\n"),
            _ => String::new(),
        }
    }
}

fn split_sections(text: &str) -> Result<Vec<Section>, TemplateError> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if let Some(caps) = SECTION_HEADER.captures(line) {
            sections.push(Section {
                name: caps[1].to_ascii_lowercase(),
                line: idx + 1,
                lines: Vec::new(),
            });
            continue;
        }
        match sections.last_mut() {
            Some(section) => section.lines.push(line.to_string()),
            None if line.trim().is_empty() || line.starts_with('#') => {}
            None => return Err(TemplateError::StrayText { line: idx + 1 }),
        }
    }
    Ok(sections)
}

fn parse_shot(lines: &[String]) -> Result<ShotExample, String> {
    let mut command = None;
    let mut gold = None;
    let mut rationales: [Option<String>; NUM_QUESTIONS] = Default::default();
    for line in lines {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed
            .split_once(':')
            .ok_or_else(|| format!("expected `key: value`, found {trimmed:?}"))?;
        let (key, value) = (key.trim().to_ascii_lowercase(), value.trim().to_string());
        let slot = match key.as_str() {
            "command" => &mut command,
            "gold" => &mut gold,
            other => {
                let k = other
                    .strip_prefix("step")
                    .and_then(|n| n.trim().parse::<usize>().ok())
                    .filter(|k| (1..=NUM_QUESTIONS).contains(k))
                    .ok_or_else(|| format!("unknown shot key {other:?}"))?;
                &mut rationales[k - 1]
            }
        };
        if slot.replace(value).is_some() {
            return Err(format!("key {key:?} given twice"));
        }
    }
    let command = command.ok_or("missing `command`")?;
    let gold = gold.ok_or("missing `gold`")?;
    let gold = RequirementVector::from_mask(&gold).map_err(|e| format!("gold: {e}"))?;
    let mut step_rationales: [String; NUM_QUESTIONS] = Default::default();
    for (k, r) in rationales.into_iter().enumerate() {
        step_rationales[k] = r.ok_or_else(|| format!("missing `step{}`", k + 1))?;
    }
    let shot = ShotExample {
        command,
        gold,
        step_rationales,
    };
    shot.validate()?;
    Ok(shot)
}

/// The conditioning (system) message.
pub fn build_system_prompt(config: &PromptConfig) -> String {
    let mut out = String::new();
    out.push_str(&config.preamble);
    out.push('\n');
    match config.mode {
        ExplanationMode::None => {}
        ExplanationMode::Stepwise => {
            for (k, q) in config.question_texts.iter().enumerate() {
                out.push_str(&format!("Step {}: {q}\n", k + 1));
            }
            out.push_str(ANSWER_FORMAT_HEADER);
            out.push('\n');
            for k in 1..=NUM_QUESTIONS {
                out.push_str(&format!("Step {k}: 'Yes' or 'No' <question {k} reasoning>\n"));
            }
        }
        ExplanationMode::Paragraph => {
            out.push_str(&config.question_texts.join(" "));
            out.push('\n');
            out.push_str(ANSWER_FORMAT_HEADER);
            for k in 1..=NUM_QUESTIONS {
                out.push_str(&format!(" 'Yes' or 'No' <question {k} reasoning>"));
            }
            out.push('\n');
        }
    }
    out.push_str(&config.format_instruction);
    out
}

/// The `(user, assistant)` pair for one few-shot example.
pub fn render_shot(shot: &ShotExample, mode: ExplanationMode) -> (String, String) {
    let mut assistant = String::from(EXPLANATION_HEADER);
    assistant.push('\n');
    match mode {
        ExplanationMode::Stepwise => {
            for (k, r) in shot.step_rationales.iter().enumerate() {
                assistant.push_str(&format!("Step {}: {r}\n", k + 1));
            }
        }
        ExplanationMode::Paragraph | ExplanationMode::None => {
            assistant.push_str(&shot.step_rationales.join(" "));
            assistant.push('\n');
        }
    }
    assistant.push_str(&answer_line(&shot.gold));
    (shot.command.clone(), assistant)
}

/// `Therefore, the output should be : [b1 ... b8]`
pub fn answer_line(vector: &RequirementVector) -> String {
    format!("{CONCLUSION_PREFIX}{vector}")
}

/// System message, then a user/assistant pair per shot, then `command`.
pub fn build_transcript(config: &PromptConfig, command: &str) -> Result<Transcript, PromptError> {
    if command.trim().is_empty() {
        return Err(PromptError::EmptyCommand);
    }
    let mut messages = Vec::with_capacity(2 + 2 * config.shots.len());
    messages.push(ChatMessage::new(Role::System, build_system_prompt(config)));
    for shot in &config.shots {
        let (user, assistant) = render_shot(shot, config.mode);
        messages.push(ChatMessage::new(Role::User, user));
        messages.push(ChatMessage::new(Role::Assistant, assistant));
    }
    messages.push(ChatMessage::new(Role::User, command));
    Ok(Transcript::from_messages(messages))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_response, ParseMethod, ParseOutcome};

    fn config(mode: ExplanationMode, shots: usize) -> PromptConfig {
        PromptConfig::from_template(&PromptTemplate::default_template(), mode, shots).unwrap()
    }

    #[test]
    fn default_template_has_four_valid_shots() {
        let t = PromptTemplate::default_template();
        assert_eq!(t.shots.len(), 4);
        assert_eq!(t.shots[0].command, "Call my friend Carol.");
        assert_eq!(t.shots[0].gold.to_mask(), "01001110");
    }

    #[test]
    fn stepwise_system_prompt() {
        let s = build_system_prompt(&config(ExplanationMode::Stepwise, 0));
        assert!(s.starts_with("You'll receive a command message for a self-driving vehicle"));
        assert!(s.contains("Step 1: First decide whether the external perception system is required"));
        for k in 1..=8 {
            assert!(s.contains(&format!("Step {k}: ")), "step {k}");
        }
        assert!(s.ends_with("Replace A1-A8 with 1 for 'Yes' and 0 for 'No'."));
        assert_eq!(s.matches(OUTPUT_PATTERN).count(), 1);
    }

    #[test]
    fn none_mode_is_preamble_and_format_only() {
        let cfg = config(ExplanationMode::None, 0);
        let s = build_system_prompt(&cfg);
        assert_eq!(s, format!("{}\n{}", cfg.preamble, cfg.format_instruction));
        assert!(!s.contains("Step"));
        assert_eq!(s.matches(OUTPUT_PATTERN).count(), 1);
    }

    fn strip_step_markers(s: &str) -> String {
        let re = Regex::new(r"Step [1-8]:").unwrap();
        re.replace_all(s, "").split_whitespace().collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn paragraph_equals_stepwise_without_markers() {
        let step = build_system_prompt(&config(ExplanationMode::Stepwise, 0));
        let para = build_system_prompt(&config(ExplanationMode::Paragraph, 0));
        assert!(!para.contains("Step "));
        assert_eq!(strip_step_markers(&step), strip_step_markers(&para));

        let t = PromptTemplate::default_template();
        for shot in &t.shots {
            let (_, a) = render_shot(shot, ExplanationMode::Stepwise);
            let (_, b) = render_shot(shot, ExplanationMode::Paragraph);
            assert_eq!(strip_step_markers(&a), strip_step_markers(&b));
        }
    }

    #[test]
    fn carol_shot_rendering() {
        let t = PromptTemplate::default_template();
        let (user, assistant) = render_shot(&t.shots[0], ExplanationMode::Stepwise);
        assert_eq!(user, "Call my friend Carol.");
        assert!(assistant.ends_with("[0 1 0 0 1 1 1 0]"));
        assert!(assistant.contains("Step 2: Yes, it requires to use the in-cabin multimedia to call the people."));
        assert!(assistant.contains("\nTherefore, the output should be : [0 1 0 0 1 1 1 0]"));
    }

    #[test]
    fn all_false_shot() {
        let shot = ShotExample {
            command: "Do nothing.".into(),
            gold: RequirementVector::all_false(),
            step_rationales: std::array::from_fn(|k| format!("No, reason {k}.")),
        };
        shot.validate().unwrap();
        for mode in ExplanationMode::ALL {
            let (_, a) = render_shot(&shot, mode);
            assert_eq!(
                a.lines().last().unwrap(),
                "Therefore, the output should be : [0 0 0 0 0 0 0 0]"
            );
            assert_eq!(a.contains("Step "), mode == ExplanationMode::Stepwise);
        }
    }

    #[test]
    fn shots_parse_back_to_gold() {
        let t = PromptTemplate::default_template();
        for shot in &t.shots {
            for mode in ExplanationMode::ALL {
                let (_, a) = render_shot(shot, mode);
                assert_eq!(
                    parse_response(&a),
                    ParseOutcome::Parsed {
                        vector: shot.gold,
                        method: ParseMethod::Bracket
                    }
                );
            }
            // dropping the answer line leaves the step lines for the fallback
            let (_, a) = render_shot(shot, ExplanationMode::Stepwise);
            let without: String = a
                .lines()
                .filter(|l| !l.starts_with("Therefore"))
                .collect::<Vec<_>>()
                .join("\n");
            assert_eq!(
                parse_response(&without),
                ParseOutcome::Parsed {
                    vector: shot.gold,
                    method: ParseMethod::StepFallback
                }
            );
        }
    }

    #[test]
    fn transcript_layout() {
        let cfg = config(ExplanationMode::Stepwise, 0);
        let t = build_transcript(&cfg, "Open the trunk.").unwrap();
        assert_eq!(t.len(), 2);

        let cfg = config(ExplanationMode::Stepwise, 3);
        let t = build_transcript(&cfg, "Open the trunk.").unwrap();
        let roles: Vec<Role> = t.messages().iter().map(|m| m.role).collect();
        use Role::*;
        assert_eq!(roles, [System, User, Assistant, User, Assistant, User, Assistant, User]);
        assert_eq!(t.messages().last().unwrap().content, "Open the trunk.");

        assert!(matches!(build_transcript(&cfg, "  \n"), Err(PromptError::EmptyCommand)));
    }

    #[test]
    fn transcript_is_deterministic() {
        let cfg = config(ExplanationMode::Paragraph, 4);
        assert_eq!(
            build_transcript(&cfg, "x").unwrap(),
            build_transcript(&cfg, "x").unwrap()
        );
    }

    #[test]
    fn too_many_shots() {
        let err = PromptConfig::from_template(&PromptTemplate::default_template(), ExplanationMode::Stepwise, 5);
        assert!(matches!(
            err,
            Err(TemplateError::NotEnoughShots {
                requested: 5,
                available: 4
            })
        ));
    }

    #[test]
    fn template_missing_sections() {
        let full = PromptTemplate::default_source();
        for name in ["preamble", "q1", "q5", "q8", "format_instruction"] {
            let header = format!("=== {name} ===");
            let start = full.find(&header).unwrap();
            let end = full[start + header.len()..]
                .find("===")
                .map(|e| start + header.len() + e)
                .unwrap();
            let broken = format!("{}{}", &full[..start], &full[end..]);
            match PromptTemplate::parse(&broken) {
                Err(TemplateError::MissingSection(s)) => assert_eq!(s, name),
                other => panic!("{name}: {other:?}"),
            }
        }
    }

    #[test]
    fn template_errors() {
        let minimal = |extra: &str| {
            let mut s = String::from("=== preamble ===\nP\n");
            for k in 1..=8 {
                s.push_str(&format!("=== q{k} ===\nQ{k}\n"));
            }
            s.push_str("=== format_instruction ===\nOutput is [A1 A2 A3 A4 A5 A6 A7 A8].\n");
            s.push_str(extra);
            s
        };
        let t = PromptTemplate::parse(&minimal("")).unwrap();
        assert!(t.shots.is_empty());
        assert_eq!(t.question_texts[7], "Q8");

        assert!(matches!(
            PromptTemplate::parse(&minimal("=== q9 ===\nx\n")),
            Err(TemplateError::UnknownSection { .. })
        ));
        assert!(matches!(
            PromptTemplate::parse(&minimal("=== q2 ===\nx\n")),
            Err(TemplateError::DuplicateSection { .. })
        ));
        assert!(matches!(
            PromptTemplate::parse(&format!("stray\n{}", minimal(""))),
            Err(TemplateError::StrayText { line: 1 })
        ));
        let bad_shot = "=== shot ===\ncommand: c\ngold: 10000000\nstep1: No\nstep2: No\nstep3: No\nstep4: No\nstep5: No\nstep6: No\nstep7: No\nstep8: No\n";
        assert!(matches!(
            PromptTemplate::parse(&minimal(bad_shot)),
            Err(TemplateError::InvalidShot { index: 1, .. })
        ));
        let short_shot = "=== shot ===\ncommand: c\ngold: 00000000\nstep1: No\n";
        assert!(matches!(
            PromptTemplate::parse(&minimal(short_shot)),
            Err(TemplateError::InvalidShot { .. })
        ));
        let no_pattern = minimal("").replace("[A1 A2 A3 A4 A5 A6 A7 A8]", "[A]");
        assert!(matches!(
            PromptTemplate::parse(&no_pattern),
            Err(TemplateError::OutputPattern)
        ));
    }
}
