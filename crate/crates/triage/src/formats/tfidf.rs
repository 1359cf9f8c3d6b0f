//! `tfidfv1`: a fitted TF-IDF vocabulary.
//!
//! ```text
//! tfidfv1
//! min_df <n>
//! n_docs <n>
//! vocabulary <n_terms>
//! <term>\t<df>\t<idf>
//! ```

use std::fmt::Write as _;

use triage_core::features::TfidfModel;

use super::{fmt_f64, parse_finite, parse_num, Lines};
use crate::error::FormatError;

pub const MAGIC: &str = "tfidfv1";

pub fn write_tfidf_block(out: &mut String, model: &TfidfModel) {
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "min_df {}", model.min_df()).unwrap();
    writeln!(out, "n_docs {}", model.vocabulary().n_docs_fit()).unwrap();
    writeln!(out, "vocabulary {}", model.dim()).unwrap();
    for (term, df, idf) in model.rows() {
        writeln!(out, "{term}\t{df}\t{}", fmt_f64(idf)).unwrap();
    }
}

pub fn read_tfidf_block(lines: &mut Lines<'_>) -> Result<TfidfModel, FormatError> {
    lines.expect_magic(MAGIC)?;
    let min_df = lines.field_num("min_df")?;
    let n_docs = lines.field_num("n_docs")?;
    let (header_line, count) = lines.field("vocabulary")?;
    let count: usize = parse_num(header_line, count)?;
    let mut rows = Vec::with_capacity(count);
    for _ in 0..count {
        let (n, line) = lines.expect_line()?;
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() != 3 {
            return Err(FormatError::Malformed { line: n, message: "expected `<term>\\t<df>\\t<idf>`".into() });
        }
        rows.push((parts[0].to_string(), parse_num(n, parts[1])?, parse_finite(n, 3, parts[2])?));
    }
    TfidfModel::from_parts(min_df, n_docs, rows).map_err(|source| FormatError::Invalid { line: header_line, source })
}

pub fn to_tfidf_string(model: &TfidfModel) -> String {
    let mut out = String::new();
    write_tfidf_block(&mut out, model);
    out
}

pub fn parse_tfidf(text: &str) -> Result<TfidfModel, FormatError> {
    let mut lines = Lines::new(text);
    let model = read_tfidf_block(&mut lines)?;
    lines.finish()?;
    Ok(model)
}
