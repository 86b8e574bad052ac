//! Result tables as aligned text, CSV or Markdown.

use std::fmt;
use std::str::FromStr;

use crate::dataset::Category;
use crate::metrics::{format_percent, EvalReport};
use crate::prompt::ExplanationMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Table,
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown format {other:?} (expected table, csv or md)")),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Table => "table",
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
        })
    }
}

/// A named method and its scores.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodResult {
    pub method: String,
    pub report: EvalReport,
}

/// One ablation cell. A cell that could not run keeps its error message.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub mode: ExplanationMode,
    pub shots: usize,
    pub result: Result<EvalReport, String>,
}

fn method_header() -> Vec<String> {
    ["Method", "Command Level", "Overall"]
        .into_iter()
        .map(String::from)
        .chain(Category::ALL.iter().map(|c| c.title().to_string()))
        .collect()
}

fn method_row(m: &MethodResult) -> Vec<String> {
    let r = &m.report;
    [
        m.method.clone(),
        format_percent(r.command_level_accuracy),
        format_percent(r.question_level_accuracy),
    ]
    .into_iter()
    .chain(r.per_question_accuracy.iter().map(|a| format_percent(*a)))
    .collect()
}

fn render(header: Vec<String>, rows: Vec<Vec<String>>, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header).expect("in-memory write");
            for row in &rows {
                w.write_record(row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
        }
        ReportFormat::Markdown => {
            let line = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
            let mut out = line(&header);
            out.push_str(&format!("|{}\n", "---|".repeat(header.len())));
            for row in &rows {
                out.push_str(&line(row));
            }
            out
        }
        ReportFormat::Table => {
            let widths: Vec<usize> = (0..header.len())
                .map(|i| {
                    std::iter::once(&header)
                        .chain(&rows)
                        .map(|r| r[i].chars().count())
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: &[String]| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .enumerate()
                    // first column left-aligned, numbers right-aligned
                    .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                    .collect();
                padded.join("  ").trim_end().to_string() + "\n"
            };
            let mut out = line(&header);
            for row in &rows {
                out.push_str(&line(row));
            }
            out
        }
    }
}

/// Method comparison: command level, overall and one column per category,
/// all as percentages with two decimals.
pub fn render_method_table(results: &[MethodResult], format: ReportFormat) -> String {
    render(method_header(), results.iter().map(method_row).collect(), format)
}

/// Ablation grid, one row per cell in the given order.
pub fn render_ablation_table(rows: &[AblationRow], format: ReportFormat) -> String {
    let header = ["Mode", "Shots", "Command Level", "Question Level"]
        .map(String::from)
        .to_vec();
    let body = rows
        .iter()
        .map(|r| {
            let (cmd, q) = match &r.result {
                Ok(rep) => (
                    format_percent(rep.command_level_accuracy),
                    format_percent(rep.question_level_accuracy),
                ),
                Err(_) => ("error".to_string(), "error".to_string()),
            };
            vec![r.mode.to_string(), r.shots.to_string(), cmd, q]
        })
        .collect();
    render(header, body, format)
}

pub fn emit_report(
    results: &[MethodResult],
    format: ReportFormat,
    out: &mut impl std::io::Write,
) -> std::io::Result<()> {
    out.write_all(render_method_table(results, format).as_bytes())
}

pub fn emit_ablation_report(
    rows: &[AblationRow],
    format: ReportFormat,
    out: &mut impl std::io::Write,
) -> std::io::Result<()> {
    out.write_all(render_ablation_table(rows, format).as_bytes())
}
