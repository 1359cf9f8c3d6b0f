//! Corpus files. The canonical form is JSONL, one report per line:
//! `{"id": ..., "text": ..., "severity": 3 | "potential serious" | null, "source": ...}`.
//! Integer severities are institutional 0-4 scores and strings are SAFRON
//! categories unless a scale is forced.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use triage_core::corpus::{LabeledReport, RawSeverity, Report, Scale, SeverityLabel, Source};

use crate::error::{Error, FormatError, Result};
use crate::formats::{read_text, write_atomic};

/// A report with an optional label; unlabeled reports are valid input for
/// triage but not for training or evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub report: Report,
    pub label: Option<SeverityLabel>,
}

impl From<LabeledReport> for CorpusEntry {
    fn from(r: LabeledReport) -> CorpusEntry {
        CorpusEntry { report: r.report, label: Some(r.label) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Jsonl,
    Csv,
}

#[derive(Deserialize)]
struct InRecord {
    id: Value,
    text: String,
    #[serde(default)]
    severity: Value,
    #[serde(default)]
    source: Option<String>,
}

#[derive(Serialize)]
struct OutRecord<'a> {
    id: &'a str,
    text: &'a str,
    severity: Value,
    source: &'a str,
}

fn invalid(line: usize) -> impl FnOnce(triage_core::Error) -> FormatError {
    move |source| FormatError::Invalid { line, source }
}

fn label_from_str(line: usize, s: &str, scale: Option<Scale>) -> Result<Option<SeverityLabel>, FormatError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(None);
    }
    let scale = scale.unwrap_or(if s.parse::<i64>().is_ok() { Scale::Inst } else { Scale::Safron });
    let raw = RawSeverity::parse(s, scale).map_err(invalid(line))?;
    SeverityLabel::new(raw).map(Some).map_err(invalid(line))
}

fn label_from_json(line: usize, v: &Value, scale: Option<Scale>) -> Result<Option<SeverityLabel>, FormatError> {
    match v {
        Value::Null => Ok(None),
        Value::Number(n) => {
            let n = n.as_i64().ok_or_else(|| FormatError::Malformed {
                line,
                message: format!("severity {n} is not an integer"),
            })?;
            let raw = RawSeverity::from_int(n, scale.unwrap_or(Scale::Inst)).map_err(invalid(line))?;
            SeverityLabel::new(raw).map(Some).map_err(invalid(line))
        }
        Value::String(s) => label_from_str(line, s, scale),
        other => Err(FormatError::Malformed { line, message: format!("unsupported severity value {other}") }),
    }
}

fn entry_source(explicit: Option<&str>, default: Option<Source>, label: Option<SeverityLabel>) -> Source {
    match (explicit, default, label) {
        (Some(s), _, _) if !s.trim().is_empty() => Source::parse(s),
        (_, Some(d), _) => d,
        (_, None, Some(l)) => match l.raw().scale() {
            Scale::Inst => Source::Inst,
            Scale::Safron => Source::Safron,
        },
        _ => Source::Other,
    }
}

fn check_id(line: usize, id: &str, seen: &mut HashSet<String>) -> Result<(), FormatError> {
    if id.is_empty() {
        return Err(FormatError::Malformed { line, message: "empty report id".into() });
    }
    if !seen.insert(id.to_string()) {
        return Err(FormatError::DuplicateId { line, id: id.to_string() });
    }
    Ok(())
}

pub fn parse_corpus_jsonl(text: &str, scale: Option<Scale>, source: Option<Source>) -> Result<Vec<CorpusEntry>, FormatError> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let rec: InRecord =
            serde_json::from_str(raw).map_err(|e| FormatError::Malformed { line, message: e.to_string() })?;
        let id = match rec.id {
            Value::String(s) => s,
            Value::Number(n) => n.to_string(),
            other => return Err(FormatError::Malformed { line, message: format!("unsupported id {other}") }),
        };
        check_id(line, &id, &mut seen)?;
        let label = label_from_json(line, &rec.severity, scale)?;
        let source = entry_source(rec.source.as_deref(), source, label);
        out.push(CorpusEntry { report: Report::new(id, rec.text, source), label });
    }
    Ok(out)
}

/// Header row required; columns `id`, `text`, optional `severity` and
/// `source`, in any order.
pub fn parse_corpus_csv(text: &str, scale: Option<Scale>, source: Option<Source>) -> Result<Vec<CorpusEntry>, FormatError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| FormatError::Malformed { line: 1, message: e.to_string() })?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name));
    let (id_col, text_col) = match (col("id"), col("text")) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(FormatError::Malformed { line: 1, message: "header must name `id` and `text` columns".into() }),
    };
    let (sev_col, src_col) = (col("severity"), col("source"));
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| FormatError::Malformed {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let id = record.get(id_col).unwrap_or("").to_string();
        check_id(line, &id, &mut seen)?;
        let label = match sev_col.and_then(|c| record.get(c)) {
            Some(s) => label_from_str(line, s, scale)?,
            None => None,
        };
        let src = entry_source(src_col.and_then(|c| record.get(c)), source, label);
        out.push(CorpusEntry {
            report: Report::new(id, record.get(text_col).unwrap_or(""), src),
            label,
        });
    }
    Ok(out)
}

pub fn corpus_jsonl_string(entries: &[CorpusEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        let severity = match e.label.map(|l| l.raw()) {
            None => Value::Null,
            Some(RawSeverity::Inst(n)) => Value::from(n),
            Some(RawSeverity::Safron(c)) => Value::from(c.as_str()),
        };
        let rec = OutRecord { id: &e.report.id, text: &e.report.text, severity, source: e.report.source.as_str() };
        out.push_str(&serde_json::to_string(&rec).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn read_corpus(path: &Path) -> Result<Vec<CorpusEntry>> {
    parse_corpus_jsonl(&read_text(path)?, None, None).map_err(|e| Error::format(path, e))
}

pub fn read_input(path: &Path, format: InputFormat, scale: Option<Scale>, source: Option<Source>) -> Result<Vec<CorpusEntry>> {
    let text = read_text(path)?;
    match format {
        InputFormat::Jsonl => parse_corpus_jsonl(&text, scale, source),
        InputFormat::Csv => parse_corpus_csv(&text, scale, source),
    }
    .map_err(|e| Error::format(path, e))
}

/// Every entry must carry a label.
pub fn into_labeled(entries: Vec<CorpusEntry>, path: &Path) -> Result<Vec<LabeledReport>> {
    entries
        .into_iter()
        .map(|e| match e.label {
            Some(label) => Ok(LabeledReport { report: e.report, label }),
            None => Err(Error::format(
                path,
                FormatError::Malformed { line: 0, message: format!("report {} has no severity label", e.report.id) },
            )),
        })
        .collect()
}

pub fn read_labeled(path: &Path) -> Result<Vec<LabeledReport>> {
    into_labeled(read_corpus(path)?, path)
}

pub fn write_corpus(path: &Path, entries: &[CorpusEntry]) -> Result<()> {
    write_atomic(path, corpus_jsonl_string(entries).as_bytes())
}

pub fn write_labeled(path: &Path, reports: &[LabeledReport]) -> Result<()> {
    let entries: Vec<CorpusEntry> = reports.iter().cloned().map(CorpusEntry::from).collect();
    write_corpus(path, &entries)
}
