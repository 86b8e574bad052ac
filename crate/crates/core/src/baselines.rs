//! Non-LLM comparators: seeded random guessing and keyword rules.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_pcg::Pcg32;
use thiserror::Error;

use crate::dataset::{LabeledCommand, RequirementVector, NUM_QUESTIONS};

/// PCG32 stream selector for [`random_classify`]. With this stream, seed 42
/// reproduces the reference sequence of the PCG32 C implementation.
pub const RANDOM_BASELINE_STREAM: u64 = 54;

const EXAMPLE_RULES: &str = include_str!("../data/example_rules.tsv");

/// One fair coin per flag.
///
/// Uses PCG32 (XSH-RR, 64-bit state) initialised as `pcg32_srandom_r(seed,
/// 54)`. Flags are drawn command by command in category order, each from the
/// top bit of one 32-bit output.
pub fn random_classify(seed: u64, commands: &[LabeledCommand]) -> Vec<RequirementVector> {
    let mut rng = Pcg32::new(seed, RANDOM_BASELINE_STREAM);
    commands
        .iter()
        .map(|_| {
            let mut flags = [false; NUM_QUESTIONS];
            for f in flags.iter_mut() {
                *f = rng.next_u32() >> 31 == 1;
            }
            RequirementVector::new(flags)
        })
        .collect()
}

/// A keyword and the flags it turns on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pattern: String,
    folded: String,
    pub sets: RequirementVector,
}

impl Rule {
    pub fn new(pattern: impl Into<String>, sets: RequirementVector) -> Result<Self, RulesError> {
        let pattern = pattern.into();
        if pattern.is_empty() {
            return Err(RulesError::EmptyPattern);
        }
        let folded = pattern.to_lowercase();
        Ok(Self { pattern, folded, sets })
    }

    pub fn pattern(&self) -> &str {
        &self.pattern
    }

    /// Case-insensitive substring test.
    pub fn matches(&self, command: &str) -> bool {
        command.to_lowercase().contains(&self.folded)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub default: RequirementVector,
}

#[derive(Debug, Error)]
pub enum RulesError {
    #[error("failed to read rules {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("rule pattern is empty")]
    EmptyPattern,
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>, default: RequirementVector) -> Self {
        Self { rules, default }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RulesError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| RulesError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// The bundled example rules.
    pub fn example() -> Self {
        Self::parse(EXAMPLE_RULES).expect("bundled rules are valid")
    }

    /// Parse `pattern<TAB>mask` lines. Patterns are taken verbatim, so
    /// surrounding spaces are significant.
    pub fn parse(text: &str) -> Result<Self, RulesError> {
        let mut rules = Vec::new();
        let mut default = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let malformed = |reason: String| RulesError::Malformed { line: idx + 1, reason };
            let (pattern, mask) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected pattern<TAB>mask".into()))?;
            let sets = RequirementVector::from_mask(mask.trim()).map_err(|e| malformed(e.to_string()))?;
            if pattern == "default" {
                if default.replace(sets).is_some() {
                    return Err(malformed("default given twice".into()));
                }
                continue;
            }
            rules.push(Rule::new(pattern, sets).map_err(|e| malformed(e.to_string()))?);
        }
        Ok(Self {
            rules,
            default: default.unwrap_or_default(),
        })
    }
}

/// `default` OR'ed with the mask of every rule whose pattern occurs in
/// `command` (case-insensitive).
pub fn rule_classify(rules: &RuleSet, command: &str) -> RequirementVector {
    let folded = command.to_lowercase();
    rules
        .rules
        .iter()
        .filter(|r| folded.contains(&r.folded))
        .fold(rules.default, |acc, r| acc.union(&r.sets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::toy_dataset;

    fn v(mask: &str) -> RequirementVector {
        RequirementVector::from_mask(mask).unwrap()
    }

    #[test]
    fn pcg32_reference_outputs() {
        // First outputs of the PCG32 reference demo, seeded with (42, 54).
        let mut rng = Pcg32::new(42, 54);
        let got: Vec<u32> = (0..6).map(|_| rng.next_u32()).collect();
        assert_eq!(
            got,
            [0xa15c02b7, 0x7b47f409, 0xba1d3330, 0x83d2f293, 0xbfa4784b, 0xcbed606e]
        );
    }

    #[test]
    fn random_flags_follow_top_bits() {
        let cmds = &toy_dataset()[..1];
        let mut rng = Pcg32::new(42, 54);
        let expected: [bool; 8] = std::array::from_fn(|_| rng.next_u32() & 0x8000_0000 != 0);
        assert_eq!(random_classify(42, cmds)[0].flags(), expected);
        assert_eq!(random_classify(42, cmds)[0].to_mask()[..6], *"101111");
    }

    #[test]
    fn random_is_deterministic() {
        let toy = toy_dataset();
        assert_eq!(random_classify(5, &toy), random_classify(5, &toy));
        assert_eq!(random_classify(5, &toy).len(), toy.len());
        assert_ne!(random_classify(5, &toy), random_classify(6, &toy));
    }

    #[test]
    fn empty_rules_give_default() {
        let rules = RuleSet::default();
        assert_eq!(rule_classify(&rules, "anything at all"), RequirementVector::all_false());
        let rules = RuleSet::new(vec![], v("00000001"));
        assert_eq!(rule_classify(&rules, "anything"), v("00000001"));
    }

    #[test]
    fn call_rule_hits_carol_gold() {
        let rules = RuleSet::new(
            vec![Rule::new("call", v("01001110")).unwrap()],
            RequirementVector::all_false(),
        );
        assert_eq!(rule_classify(&rules, "Call my friend Carol."), v("01001110"));
    }

    #[test]
    fn overlapping_rules_or_together() {
        let rules = RuleSet::new(
            vec![
                Rule::new("u-turn", v("10110000")).unwrap(),
                Rule::new("illegal", v("00000001")).unwrap(),
            ],
            RequirementVector::all_false(),
        );
        let got = rule_classify(&rules, "Make an illegal U-turn here.");
        assert_eq!(got, v("10110001"));
        // bitwise-OR oracle over the matching masks
        let oracle: [bool; 8] = std::array::from_fn(|k| [v("10110000"), v("00000001")].iter().any(|m| m.get(k)));
        assert_eq!(got.flags(), oracle);
    }

    #[test]
    fn parses_rules_file() {
        let rules = RuleSet::parse("# c\ndefault\t00000001\n my \t00000100\nCALL\t01001110\n").unwrap();
        assert_eq!(rules.default, v("00000001"));
        assert_eq!(rules.rules.len(), 2);
        assert_eq!(rules.rules[0].pattern(), " my ");
        assert_eq!(rule_classify(&rules, "call my friend"), v("01001111"));
        assert_eq!(rule_classify(&rules, "myself"), v("00000001"));

        assert!(matches!(
            RuleSet::parse("call 01001110\n"),
            Err(RulesError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            RuleSet::parse("x\t0100111\n"),
            Err(RulesError::Malformed { .. })
        ));
        assert!(matches!(
            RuleSet::parse("\t01001110\n"),
            Err(RulesError::Malformed { .. })
        ));
        assert!(matches!(
            RuleSet::parse("default\t0\n"),
            Err(RulesError::Malformed { .. })
        ));
    }

    #[test]
    fn example_rules_beat_random_on_toy() {
        use crate::metrics::{evaluate, FailurePolicy, PredictionRecord};
        let toy = toy_dataset();
        let rules = RuleSet::example();
        let preds: Vec<_> = toy
            .iter()
            .map(|c| PredictionRecord::from_vector(&c.id, rule_classify(&rules, &c.text)))
            .collect();
        let report = evaluate(&preds, &toy, FailurePolicy::Strict).unwrap();
        assert!(
            report.question_level_accuracy > 0.6,
            "{}",
            report.question_level_accuracy
        );
        assert!(report.command_level_accuracy > 1.0 / 256.0);
    }
}
