//! Labeled command datasets.
//!
//! A dataset file is UTF-8 text with one record per line and three
//! tab-separated fields, `id<TAB>text<TAB>labels`. `labels` is exactly eight
//! `0`/`1` characters in [`Category::ALL`] order. Lines starting with `#` are
//! comments and blank lines are skipped.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::RngExt;
use rand_pcg::Pcg32;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Number of requirement questions asked per command.
pub const NUM_QUESTIONS: usize = 8;

/// Swap budget used by [`stratified_sample`] when none is given.
pub const DEFAULT_SAMPLE_BUDGET: usize = 10_000;

/// Per-question tolerance used by the CLI when none is given.
pub const DEFAULT_SAMPLE_TOLERANCE: f64 = 0.05;

// PCG stream selector for the sampler. Distinct from the random baseline's.
const SAMPLER_STREAM: u64 = 0x5a4d_504c_4552;

const TOY_DATASET: &str = include_str!("../data/toy_commands.tsv");

/// The eight system requirements, in vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Perception,
    InCabinMonitoring,
    Localization,
    VehicleControl,
    Entertainment,
    PersonalData,
    NetworkAccess,
    TrafficLaws,
}

impl Category {
    pub const ALL: [Category; NUM_QUESTIONS] = [
        Category::Perception,
        Category::InCabinMonitoring,
        Category::Localization,
        Category::VehicleControl,
        Category::Entertainment,
        Category::PersonalData,
        Category::NetworkAccess,
        Category::TrafficLaws,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Snake-case identifier used in machine-readable output.
    pub fn key(self) -> &'static str {
        match self {
            Category::Perception => "perception",
            Category::InCabinMonitoring => "in_cabin_monitoring",
            Category::Localization => "localization",
            Category::VehicleControl => "vehicle_control",
            Category::Entertainment => "entertainment",
            Category::PersonalData => "personal_data",
            Category::NetworkAccess => "network_access",
            Category::TrafficLaws => "traffic_laws",
        }
    }

    /// Column header used in report tables.
    pub fn title(self) -> &'static str {
        match self {
            Category::Perception => "Perception",
            Category::InCabinMonitoring => "In-cabin Monitoring",
            Category::Localization => "Localization",
            Category::VehicleControl => "Vehicle Control",
            Category::Entertainment => "Entertainment",
            Category::PersonalData => "Personal Data",
            Category::NetworkAccess => "Network Access",
            Category::TrafficLaws => "Traffic Laws",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.title())
    }
}

/// Eight ordered yes/no answers, one per [`Category`].
///
/// Serializes as the 8-character mask string (`"01001110"`); `Display`
/// renders the bracketed answer format (`[0 1 0 0 1 1 1 0]`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct RequirementVector([bool; NUM_QUESTIONS]);

impl RequirementVector {
    pub const fn new(flags: [bool; NUM_QUESTIONS]) -> Self {
        Self(flags)
    }

    pub const fn all_false() -> Self {
        Self([false; NUM_QUESTIONS])
    }

    pub fn flags(&self) -> [bool; NUM_QUESTIONS] {
        self.0
    }

    pub fn get(&self, index: usize) -> bool {
        self.0[index]
    }

    pub fn category(&self, category: Category) -> bool {
        self.0[category.index()]
    }

    pub fn set(&mut self, index: usize, value: bool) {
        self.0[index] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    /// Bitwise OR of two vectors.
    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.0;
        for (o, b) in out.iter_mut().zip(other.0) {
            *o |= b;
        }
        Self(out)
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    /// Number of positions where `self` and `other` agree.
    pub fn matches(&self, other: &Self) -> usize {
        self.0.iter().zip(other.0.iter()).filter(|(a, b)| a == b).count()
    }

    /// Eight `0`/`1` characters.
    pub fn to_mask(&self) -> String {
        self.0.iter().map(|b| if *b { '1' } else { '0' }).collect()
    }

    /// Parse an 8-character `0`/`1` mask.
    pub fn from_mask(mask: &str) -> Result<Self, MaskError> {
        let chars: Vec<char> = mask.chars().collect();
        if chars.len() != NUM_QUESTIONS {
            return Err(MaskError::Length(chars.len()));
        }
        let mut flags = [false; NUM_QUESTIONS];
        for (flag, c) in flags.iter_mut().zip(chars) {
            *flag = match c {
                '0' => false,
                '1' => true,
                other => return Err(MaskError::NonBinary(other)),
            };
        }
        Ok(Self(flags))
    }
}

impl From<[bool; NUM_QUESTIONS]> for RequirementVector {
    fn from(flags: [bool; NUM_QUESTIONS]) -> Self {
        Self(flags)
    }
}

impl fmt::Display for RequirementVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(if *b { "1" } else { "0" })?;
        }
        f.write_str("]")
    }
}

impl FromStr for RequirementVector {
    type Err = MaskError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_mask(s)
    }
}

impl Serialize for RequirementVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_mask())
    }
}

impl<'de> Deserialize<'de> for RequirementVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Self::from_mask(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaskError {
    #[error("expected 8 label characters, found {0}")]
    Length(usize),
    #[error("label character {0:?} is not 0 or 1")]
    NonBinary(char),
}

/// A command with its gold requirement vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledCommand {
    pub id: String,
    pub text: String,
    pub gold: RequirementVector,
}

impl LabeledCommand {
    pub fn new(id: impl Into<String>, text: impl Into<String>, gold: RequirementVector) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            gold,
        }
    }
}

/// Per-question positive rates of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelDistribution {
    pub positive_counts: [usize; NUM_QUESTIONS],
    pub positive_rate: [f64; NUM_QUESTIONS],
    pub n: usize,
}

impl LabelDistribution {
    /// Largest per-question absolute rate difference.
    pub fn max_deviation(&self, other: &LabelDistribution) -> f64 {
        self.positive_rate
            .iter()
            .zip(other.positive_rate.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("dataset file not found: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("failed to access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("sample size {n} must be between 1 and {available}")]
    InvalidSampleSize { n: usize, available: usize },
    #[error("no sample within tolerance {tolerance}; best max deviation {best_deviation:.4}")]
    InfeasibleSample { tolerance: f64, best_deviation: f64 },
    #[error("record {id:?} cannot be written: {reason}")]
    Unwritable { id: String, reason: String },
}

/// Read a dataset file.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<LabeledCommand>, DatasetError> {
    let path = path.as_ref();
    let contents = fs::read_to_string(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            DatasetError::MissingFile(path.to_path_buf())
        } else {
            DatasetError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })?;
    parse_dataset(&contents)
}

/// Parse dataset text in the line-delimited format.
pub fn parse_dataset(contents: &str) -> Result<Vec<LabeledCommand>, DatasetError> {
    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (idx, raw) in contents.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let malformed = |reason: String| DatasetError::MalformedRecord { line: line_no, reason };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(malformed(format!(
                "expected 3 tab-separated fields, found {}",
                fields.len()
            )));
        }
        let (id, text, labels) = (fields[0].trim(), fields[1], fields[2].trim());
        if id.is_empty() {
            return Err(malformed("empty id".into()));
        }
        if text.trim().is_empty() {
            return Err(malformed("empty command text".into()));
        }
        let gold = RequirementVector::from_mask(labels).map_err(|e| malformed(e.to_string()))?;
        if !seen.insert(id.to_string()) {
            return Err(malformed(format!("duplicate id {id:?}")));
        }
        records.push(LabeledCommand::new(id, text, gold));
    }
    Ok(records)
}

/// Render records in the dataset file format.
pub fn serialize_dataset(data: &[LabeledCommand]) -> Result<String, DatasetError> {
    let mut out = String::new();
    for record in data {
        let bad = |reason: &str| DatasetError::Unwritable {
            id: record.id.clone(),
            reason: reason.into(),
        };
        if record.id.is_empty() || record.id.contains(['\t', '\n', '\r']) || record.id.starts_with('#') {
            return Err(bad(
                "id must be non-empty, must not start with '#' and must not contain tabs or newlines",
            ));
        }
        if record.text.trim().is_empty() || record.text.contains(['\t', '\n', '\r']) {
            return Err(bad("text must be non-empty and must not contain tabs or newlines"));
        }
        out.push_str(&record.id);
        out.push('\t');
        out.push_str(&record.text);
        out.push('\t');
        out.push_str(&record.gold.to_mask());
        out.push('\n');
    }
    Ok(out)
}

pub fn write_dataset(path: impl AsRef<Path>, data: &[LabeledCommand]) -> Result<(), DatasetError> {
    let path = path.as_ref();
    let body = serialize_dataset(data)?;
    fs::write(path, body).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// The bundled 24-command toy dataset.
pub fn toy_dataset() -> Vec<LabeledCommand> {
    parse_dataset(TOY_DATASET).expect("bundled toy dataset is well-formed")
}

/// Raw text of the bundled toy dataset file.
pub fn toy_dataset_source() -> &'static str {
    TOY_DATASET
}

fn positive_counts(data: &[LabeledCommand]) -> [usize; NUM_QUESTIONS] {
    let mut counts = [0usize; NUM_QUESTIONS];
    for record in data {
        for (count, flag) in counts.iter_mut().zip(record.gold.iter()) {
            *count += usize::from(flag);
        }
    }
    counts
}

/// Per-question positive rates.
pub fn distribution(data: &[LabeledCommand]) -> Result<LabelDistribution, DatasetError> {
    if data.is_empty() {
        return Err(DatasetError::EmptyDataset);
    }
    let positive_counts = positive_counts(data);
    let n = data.len();
    Ok(LabelDistribution {
        positive_counts,
        positive_rate: positive_counts.map(|c| c as f64 / n as f64),
        n,
    })
}

/// Tunables for [`stratified_sample_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleOptions {
    pub tolerance: f64,
    pub budget: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_SAMPLE_TOLERANCE,
            budget: DEFAULT_SAMPLE_BUDGET,
        }
    }
}

/// Draw `n` distinct records whose per-question positive rates stay within
/// `tolerance` of the full dataset's.
///
/// Starts from a seeded random subset and then tries random in/out swaps,
/// keeping a swap only when it lowers the (max, total) deviation pair.
/// Records come back in dataset order.
pub fn stratified_sample(
    data: &[LabeledCommand],
    n: usize,
    seed: u64,
    tolerance: f64,
) -> Result<Vec<LabeledCommand>, DatasetError> {
    stratified_sample_with(
        data,
        n,
        seed,
        SampleOptions {
            tolerance,
            ..SampleOptions::default()
        },
    )
}

pub fn stratified_sample_with(
    data: &[LabeledCommand],
    n: usize,
    seed: u64,
    options: SampleOptions,
) -> Result<Vec<LabeledCommand>, DatasetError> {
    let total = data.len();
    if n == 0 || n > total {
        return Err(DatasetError::InvalidSampleSize { n, available: total });
    }
    let full = positive_counts(data);
    let mut rng = Pcg32::new(seed, SAMPLER_STREAM);

    let mut order: Vec<usize> = (0..total).collect();
    for i in 0..n {
        let j = rng.random_range(i..total);
        order.swap(i, j);
    }
    let (chosen, rest) = order.split_at_mut(n);

    let mut counts = [0usize; NUM_QUESTIONS];
    for &idx in chosen.iter() {
        for (c, flag) in counts.iter_mut().zip(data[idx].gold.iter()) {
            *c += usize::from(flag);
        }
    }

    // Deviations are kept as integers over the common denominator n * total.
    let denom = (n * total) as f64;
    let deviation = |counts: &[usize; NUM_QUESTIONS]| -> (usize, usize) {
        let mut max = 0;
        let mut sum = 0;
        for (c, f) in counts.iter().zip(full.iter()) {
            let d = (c * total).abs_diff(n * f);
            max = max.max(d);
            sum += d;
        }
        (max, sum)
    };
    let within = |max: usize| max as f64 / denom <= options.tolerance;

    let mut current = deviation(&counts);
    if !rest.is_empty() {
        for _ in 0..options.budget {
            if within(current.0) {
                break;
            }
            let i = rng.random_range(0..chosen.len());
            let j = rng.random_range(0..rest.len());
            let (out_gold, in_gold) = (data[chosen[i]].gold, data[rest[j]].gold);
            let mut candidate = counts;
            for (k, c) in candidate.iter_mut().enumerate() {
                *c = *c - usize::from(out_gold.get(k)) + usize::from(in_gold.get(k));
            }
            let score = deviation(&candidate);
            if score < current {
                std::mem::swap(&mut chosen[i], &mut rest[j]);
                counts = candidate;
                current = score;
            }
        }
    }

    if !within(current.0) {
        return Err(DatasetError::InfeasibleSample {
            tolerance: options.tolerance,
            best_deviation: current.0 as f64 / denom,
        });
    }
    let mut picked = chosen.to_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| data[i].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(mask: &str) -> RequirementVector {
        RequirementVector::from_mask(mask).unwrap()
    }

    fn cmd(id: &str, mask: &str) -> LabeledCommand {
        LabeledCommand::new(id, format!("command {id}"), v(mask))
    }

    #[test]
    fn parses_carol_record() {
        let data = parse_dataset("c1\tCall my friend Carol.\t01001110\n").unwrap();
        assert_eq!(data.len(), 1);
        assert_eq!(data[0].id, "c1");
        assert_eq!(data[0].text, "Call my friend Carol.");
        assert_eq!(
            data[0].gold.flags(),
            [false, true, false, false, true, true, true, false]
        );
    }

    #[test]
    fn empty_file_is_empty_dataset() {
        assert!(parse_dataset("").unwrap().is_empty());
        assert!(parse_dataset("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn malformed_records_report_line() {
        let cases = [
            ("c1\ttext\t0100111\n", 1),
            ("# c\nc1\ttext\t0100111x\n", 2),
            ("c1\ttext\n", 1),
            ("c1\ta\tb\t01001110\n", 1),
            ("c1\t   \t01001110\n", 1),
            ("c1\tx\t01001110\nc1\ty\t01001110\n", 2),
            ("\tx\t01001110\n", 1),
        ];
        for (text, line) in cases {
            match parse_dataset(text) {
                Err(DatasetError::MalformedRecord { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn missing_file() {
        let err = load_dataset("/nonexistent/cmdreason/data.tsv").unwrap_err();
        assert!(matches!(err, DatasetError::MissingFile(_)));
    }

    #[test]
    fn toy_dataset_contains_worked_examples() {
        let toy = toy_dataset();
        assert_eq!(toy.len(), 24);
        let carol = toy.iter().find(|c| c.text == "Call my friend Carol.").unwrap();
        assert_eq!(carol.gold, v("01001110"));
        let uturn = toy.iter().find(|c| c.text == "Make an illegal U-turn here.").unwrap();
        assert_eq!(uturn.gold, v("10110001"));
    }

    #[test]
    fn distribution_hand_counts() {
        let d = distribution(&[cmd("a", "10000000"), cmd("b", "11000000")]).unwrap();
        assert_eq!(d.n, 2);
        assert_eq!(d.positive_rate, [1.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

        let d = distribution(&[cmd("a", "00000000")]).unwrap();
        assert_eq!(d.positive_rate, [0.0; 8]);

        assert!(matches!(distribution(&[]), Err(DatasetError::EmptyDataset)));
    }

    #[test]
    fn distribution_of_repeated_dataset_is_unchanged() {
        let toy = toy_dataset();
        let base = distribution(&toy).unwrap();
        for k in 2..5 {
            let repeated: Vec<_> = toy.iter().cycle().take(toy.len() * k).cloned().collect();
            let d = distribution(&repeated).unwrap();
            // independent recount over the concatenation
            for q in 0..NUM_QUESTIONS {
                let ones = repeated.iter().filter(|c| c.gold.get(q)).count();
                assert_eq!(d.positive_counts[q], ones);
                assert_eq!(ones, base.positive_counts[q] * k);
            }
            assert_eq!(d.positive_rate, base.positive_rate);
        }
    }

    #[test]
    fn full_size_sample_is_identity() {
        let toy = toy_dataset();
        let sample = stratified_sample(&toy, toy.len(), 7, 0.0).unwrap();
        assert_eq!(sample, toy);
    }

    #[test]
    fn sample_size_bounds() {
        let toy = toy_dataset();
        assert!(matches!(
            stratified_sample(&toy, 0, 1, 0.05),
            Err(DatasetError::InvalidSampleSize { .. })
        ));
        assert!(matches!(
            stratified_sample(&toy, 25, 1, 0.05),
            Err(DatasetError::InvalidSampleSize { .. })
        ));
    }

    fn half_rate_dataset() -> Vec<LabeledCommand> {
        // 40 records; question q is positive on a rotated window of 20.
        (0..40)
            .map(|i| {
                let flags: [bool; 8] = std::array::from_fn(|q| (i + 5 * q) % 40 < 20);
                LabeledCommand::new(format!("s{i:02}"), format!("synthetic {i}"), flags.into())
            })
            .collect()
    }

    #[test]
    fn sample_matches_half_rates() {
        let data = half_rate_dataset();
        let full = distribution(&data).unwrap();
        for q in 0..8 {
            assert_eq!(full.positive_rate[q], 0.5, "question {q}");
        }
        let sample = stratified_sample(&data, 20, 11, 0.05).unwrap();
        assert_eq!(sample.len(), 20);
        let d = distribution(&sample).unwrap();
        for rate in d.positive_rate {
            assert!((0.45..=0.55).contains(&rate), "{rate}");
        }
    }

    #[test]
    fn sample_is_deterministic() {
        let data = half_rate_dataset();
        let a = stratified_sample(&data, 20, 3, 0.05).unwrap();
        let b = stratified_sample(&data, 20, 3, 0.05).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn infeasible_sample_reports_best_deviation() {
        // One positive in three records: no 2-subset has rate within 0.1 of 1/3.
        let data = [cmd("a", "10000000"), cmd("b", "00000000"), cmd("c", "00000000")];
        match stratified_sample(&data, 2, 0, 0.1) {
            Err(DatasetError::InfeasibleSample { best_deviation, .. }) => {
                assert!((best_deviation - 1.0 / 6.0).abs() < 1e-12, "{best_deviation}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn serialize_rejects_tabs() {
        let bad = LabeledCommand::new("x", "a\tb", v("00000000"));
        assert!(serialize_dataset(&[bad]).is_err());
    }
}
