//! Evaluation reports, ROC points, score tables and training logs.

use std::fmt::Write as _;
use std::path::Path;

use triage_core::corpus::Severity;
use triage_core::eval::{MetricReport, RocCurve};
use triage_core::head::TrainLog;
use triage_core::svm::GridPoint;

use crate::error::{Error, FormatError, Result};

pub const METRICS_MAGIC: &str = "triage-metrics v1";
const UNDEFINED: &str = "undefined";

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| UNDEFINED.to_string(), |x| x.to_string())
}

/// Key/value summary followed by a tab-separated operating-point table.
pub fn metric_report_string(r: &MetricReport) -> String {
    let mut out = String::new();
    writeln!(out, "{METRICS_MAGIC}").unwrap();
    writeln!(out, "n {}", r.n).unwrap();
    writeln!(out, "n_high {}", r.n_high).unwrap();
    writeln!(out, "auroc {}", r.auroc).unwrap();
    writeln!(out, "decision_threshold {}", r.decision_threshold).unwrap();
    let c = r.decision_counts;
    writeln!(out, "decision_counts tp={} fp={} fn={} tn={}", c.tp, c.fp, c.fn_, c.tn).unwrap();
    writeln!(out, "f1_binary {}", opt(r.f1.binary)).unwrap();
    writeln!(out, "f1_micro {}", opt(r.f1.micro)).unwrap();
    writeln!(out, "f1_macro {}", opt(r.f1.macro_)).unwrap();
    writeln!(out, "operating_points {}", r.operating_points.len()).unwrap();
    writeln!(out, "alert_rate\tflagged\tthreshold\ttp\tfp\tfn\ttn\tsensitivity\tspecificity\tppv\tnpv").unwrap();
    for p in &r.operating_points {
        let c = p.counts;
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            p.alert_rate,
            c.tp + c.fp,
            opt(p.threshold),
            c.tp,
            c.fp,
            c.fn_,
            c.tn,
            opt(p.rates.sensitivity),
            opt(p.rates.specificity),
            opt(p.rates.ppv),
            opt(p.rates.npv)
        )
        .unwrap();
    }
    out
}

pub fn roc_csv_string(roc: &RocCurve) -> String {
    let mut out = String::from("fpr,tpr\n");
    for (fpr, tpr) in &roc.points {
        writeln!(out, "{fpr},{tpr}").unwrap();
    }
    out
}

/// One scored report.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredRow {
    pub id: String,
    pub score: f64,
    pub label: Option<Severity>,
}

pub fn parse_label(token: &str) -> Option<Severity> {
    match token.trim().to_ascii_lowercase().as_str() {
        "1" | "high" | "true" => Some(Severity::High),
        "0" | "low" | "false" => Some(Severity::Low),
        _ => None,
    }
}

/// Reads `id,score[,label]` with a header row.
pub fn parse_scores_csv(text: &str) -> Result<Vec<ScoredRow>, FormatError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| FormatError::Malformed { line, message: e.to_string() })?;
        if record.len() < 2 {
            return Err(FormatError::Malformed { line, message: "expected `id,score[,label]`".into() });
        }
        let score = super::parse_finite(line, 2, record[1].trim())?;
        let label = match record.get(2) {
            None => None,
            Some(t) if t.trim().is_empty() => None,
            Some(t) => Some(parse_label(t).ok_or_else(|| FormatError::Malformed {
                line,
                message: format!("unrecognised label `{t}`"),
            })?),
        };
        rows.push(ScoredRow { id: record[0].to_string(), score, label });
    }
    Ok(rows)
}

/// `id,score,flag` rows in the given order; no output at all for no rows.
pub fn triage_csv_string(rows: &[(String, f64, bool)]) -> Result<String> {
    if rows.is_empty() {
        return Ok(String::new());
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Usage(format!("writing triage output: {e}"));
    w.write_record(["id", "score", "flag"]).map_err(err)?;
    for (id, score, flag) in rows {
        w.write_record([id.as_str(), &score.to_string(), if *flag { "1" } else { "0" }]).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Usage(format!("writing triage output: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// One row per epoch: stage, restart, seed, epoch, losses, F1 and whether
/// the epoch was the one kept.
pub fn train_log_string(logs: &[TrainLog], selected: &[bool]) -> String {
    let mut out = String::from("stage\trestart\tseed\tepoch\ttrain_loss\tval_loss\tval_f1\tkept\tselected_restart\n");
    for (log, sel) in logs.iter().zip(selected) {
        for e in 0..log.epochs() {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                if log.stage.is_empty() { "single" } else { &log.stage },
                log.restart,
                log.seed,
                e + 1,
                log.train_loss[e],
                log.val_loss[e],
                log.val_f1[e],
                u8::from(e + 1 == log.selected_epoch),
                u8::from(*sel)
            )
            .unwrap();
        }
    }
    out
}

pub fn grid_log_string(table: &[GridPoint], best_c: f64) -> String {
    let mut out = String::from("c\tval_f1\tselected\terror\n");
    for p in table {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            p.c,
            opt(p.f1),
            u8::from(p.c == best_c && p.error.is_none()),
            p.error.as_ref().map_or(String::new(), |e| e.to_string())
        )
        .unwrap();
    }
    out
}

pub fn read_scores(path: &Path) -> Result<Vec<ScoredRow>> {
    parse_scores_csv(&super::read_text(path)?).map_err(|e| Error::format(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use triage_core::eval::metric_report;

    #[test]
    fn report_lists_every_operating_point() {
        let ids: Vec<String> = (0..10).map(|i| format!("r{i}")).collect();
        let scores: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let labels: Vec<Severity> = (0..10).map(|i| if i >= 6 { Severity::High } else { Severity::Low }).collect();
        let r = metric_report(&ids, &scores, &labels, &[0.2, 0.5, 1.0], 5.5).unwrap();
        let text = metric_report_string(&r);
        assert!(text.starts_with("triage-metrics v1\nn 10\nn_high 4\nauroc 1\n"));
        assert!(text.contains("\n0.2\t2\t8\t2\t0\t2\t6\t0.5\t1\t1\t0.75\n"));
        assert!(text.contains("\n1\t10\t0\t4\t6\t0\t0\t1\t0\t0.4\tundefined\n"));
        let roc = roc_csv_string(&r.roc);
        assert!(roc.starts_with("fpr,tpr\n0,0\n"));
        assert!(roc.ends_with("1,1\n"));
    }

    #[test]
    fn scores_csv_accepts_labels_and_blanks() {
        let rows = parse_scores_csv("id,score,label\na,0.5,HIGH\nb,-1,0\nc,2,\n").unwrap();
        assert_eq!(rows[0].label, Some(Severity::High));
        assert_eq!(rows[1].label, Some(Severity::Low));
        assert_eq!(rows[2].label, None);
        assert!(matches!(parse_scores_csv("id,score\na,x\n"), Err(FormatError::BadNumber { line: 2, .. })));
        assert!(matches!(parse_scores_csv("id,score,label\na,1,maybe\n"), Err(FormatError::Malformed { line: 2, .. })));
    }

    #[test]
    fn empty_triage_output_is_empty() {
        assert_eq!(triage_csv_string(&[]).unwrap(), "");
        let text = triage_csv_string(&[("a".into(), 0.25, true)]).unwrap();
        assert_eq!(text, "id,score,flag\na,0.25,1\n");
    }
}
