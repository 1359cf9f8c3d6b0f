//! Text file formats. Model files store floats with 17 significant digits
//! so every value reads back bit-for-bit.

pub mod embedv1;
pub mod head;
pub mod report;
pub mod svm;
pub mod tfidf;

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, FormatError, Result};

/// Shortest-form would also round-trip; the fixed width keeps files
/// byte-stable across platforms and readable by other languages.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_num<T: FromStr>(line: usize, token: &str) -> Result<T, FormatError> {
    token.parse().map_err(|_| FormatError::BadNumber { line, token: token.to_string() })
}

pub fn parse_finite(line: usize, field: usize, token: &str) -> Result<f64, FormatError> {
    let v: f64 = parse_num(line, token)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(FormatError::NonFinite { line, field })
    }
}

/// Sequential reader over LF-terminated lines with 1-based numbering.
pub struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str) -> Lines<'a> {
        let mut lines: Vec<&str> = text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).collect();
        if lines.last() == Some(&"") {
            lines.pop();
        }
        Lines { lines, pos: 0 }
    }

    pub fn next_line(&mut self) -> Option<(usize, &'a str)> {
        let line = self.lines.get(self.pos).copied()?;
        self.pos += 1;
        Some((self.pos, line))
    }

    pub fn expect_line(&mut self) -> Result<(usize, &'a str), FormatError> {
        let eof = self.pos + 1;
        self.next_line().ok_or(FormatError::UnexpectedEof { line: eof })
    }

    /// Reads a `key value` line and returns the value text.
    pub fn field(&mut self, key: &str) -> Result<(usize, &'a str), FormatError> {
        let (n, line) = self.expect_line()?;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok((n, v)),
            _ if line == key => Ok((n, "")),
            _ => Err(FormatError::Malformed { line: n, message: format!("expected `{key} ...`") }),
        }
    }

    pub fn field_num<T: FromStr>(&mut self, key: &str) -> Result<T, FormatError> {
        let (n, v) = self.field(key)?;
        parse_num(n, v)
    }

    pub fn field_f64(&mut self, key: &str) -> Result<f64, FormatError> {
        let (n, v) = self.field(key)?;
        parse_finite(n, 1, v)
    }

    pub fn expect_magic(&mut self, magic: &'static str) -> Result<(), FormatError> {
        let (n, line) = self.expect_line()?;
        if line == magic {
            Ok(())
        } else {
            Err(FormatError::BadMagic { line: n, expected: magic, found: line.to_string() })
        }
    }

    pub fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).copied()
    }

    pub fn finish(&mut self) -> Result<(), FormatError> {
        match self.next_line() {
            None => Ok(()),
            Some((n, _)) => Err(FormatError::Malformed { line: n, message: "unexpected trailing content".into() }),
        }
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// First line of a file, used to dispatch on model type.
pub fn magic_of(text: &str) -> &str {
    text.lines().next().unwrap_or("").trim_end()
}
