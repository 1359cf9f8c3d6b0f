//! `embedv1`: the embedding interchange file.
//!
//! ```text
//! embedv1 <dim> <n_rows>
//! <report_id>\t<v1> <v2> ... <v_dim>
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use triage_core::embed::EmbeddingMatrix;

use super::{fmt_f64, parse_finite, parse_num, read_text, write_atomic, Lines};
use crate::error::{Error, FormatError, Result};

pub const MAGIC: &str = "embedv1";
/// Provenance assigned to matrices read from disk; the format carries none.
pub const READ_PROVENANCE: &str = "embedv1";

pub fn to_embedv1_string(m: &EmbeddingMatrix) -> Result<String, FormatError> {
    let mut out = format!("{MAGIC} {} {}\n", m.dim(), m.len());
    for (i, (id, row)) in m.iter().enumerate() {
        if id.is_empty() || id.contains(['\t', '\n', '\r']) {
            return Err(FormatError::Malformed {
                line: i + 2,
                message: format!("report id {id:?} cannot be written"),
            });
        }
        out.push_str(id);
        out.push('\t');
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            write!(out, "{}", fmt_f64(*v)).expect("writing to a String");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_embedv1(text: &str) -> Result<EmbeddingMatrix, FormatError> {
    let mut lines = Lines::new(text);
    let (n, header) = lines.expect_line()?;
    let fields: Vec<&str> = header.split(' ').collect();
    if fields.first() != Some(&MAGIC) {
        return Err(FormatError::BadMagic { line: n, expected: MAGIC, found: header.to_string() });
    }
    if fields.len() != 3 {
        return Err(FormatError::Malformed { line: n, message: "header must be `embedv1 <dim> <n_rows>`".into() });
    }
    let dim: usize = parse_num(n, fields[1])?;
    let n_rows: usize = parse_num(n, fields[2])?;
    let mut m = EmbeddingMatrix::new(dim, READ_PROVENANCE).map_err(|source| FormatError::Invalid { line: n, source })?;

    let mut seen = HashSet::new();
    while let Some((n, line)) = lines.next_line() {
        let (id, values) = line
            .split_once('\t')
            .ok_or_else(|| FormatError::Malformed { line: n, message: "expected `<id><TAB><values>`".into() })?;
        if id.is_empty() {
            return Err(FormatError::Malformed { line: n, message: "empty report id".into() });
        }
        if !seen.insert(id) {
            return Err(FormatError::DuplicateId { line: n, id: id.to_string() });
        }
        let tokens: Vec<&str> = values.split_ascii_whitespace().collect();
        if tokens.len() != dim {
            return Err(FormatError::DimensionMismatch { line: n, expected: dim, found: tokens.len() });
        }
        let row = tokens
            .iter()
            .enumerate()
            .map(|(k, t)| parse_finite(n, k + 1, t))
            .collect::<Result<Vec<f64>, _>>()?;
        m.push(id, row).map_err(|source| FormatError::Invalid { line: n, source })?;
    }
    if m.len() != n_rows {
        return Err(FormatError::RowCountMismatch { declared: n_rows, found: m.len() });
    }
    Ok(m)
}

pub fn write_embeddings(m: &EmbeddingMatrix, path: &Path) -> Result<()> {
    let text = to_embedv1_string(m).map_err(|e| Error::format(path, e))?;
    write_atomic(path, text.as_bytes())
}

pub fn read_embeddings(path: &Path) -> Result<EmbeddingMatrix> {
    parse_embedv1(&read_text(path)?).map_err(|e| Error::format(path, e))
}
