//! `svmv1`: preprocessing settings, TF-IDF vocabulary and SVM in one file.
//!
//! ```text
//! svmv1
//! token_cap <n>
//! dictionary <n_entries>
//! <abbreviation>\t<expansion>
//! tfidfv1 ... (see the tfidf module)
//! kernel linear | kernel rbf <gamma>
//! c <C>
//! bias <b>
//! dim <n_features>
//! support_vectors <n>
//! <coef>\t<index>:<value> <index>:<value> ...
//! ```

use std::fmt::Write as _;

use triage_core::features::SparseVector;
use triage_core::svm::{Kernel, SvmModel};
use triage_core::textprep::{AcronymDictionary, Preprocessor};

use super::tfidf::{read_tfidf_block, write_tfidf_block};
use super::{fmt_f64, parse_finite, parse_num, Lines};
use crate::error::FormatError;
use crate::pipeline::SvmPipeline;

pub const MAGIC: &str = "svmv1";

pub fn to_svm_string(p: &SvmPipeline) -> String {
    let mut out = String::new();
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "token_cap {}", p.preprocessor.cap()).unwrap();
    let dict = p.preprocessor.dictionary();
    writeln!(out, "dictionary {}", dict.len()).unwrap();
    for (k, v) in dict.entries() {
        writeln!(out, "{k}\t{v}").unwrap();
    }
    write_tfidf_block(&mut out, &p.tfidf);
    match p.svm.kernel {
        Kernel::Linear => writeln!(out, "kernel linear").unwrap(),
        Kernel::Rbf { gamma } => writeln!(out, "kernel rbf {}", fmt_f64(gamma)).unwrap(),
    }
    writeln!(out, "c {}", fmt_f64(p.svm.c)).unwrap();
    writeln!(out, "bias {}", fmt_f64(p.svm.bias)).unwrap();
    writeln!(out, "dim {}", p.svm.dim).unwrap();
    writeln!(out, "support_vectors {}", p.svm.support_vectors.len()).unwrap();
    for (sv, coef) in p.svm.support_vectors.iter().zip(&p.svm.dual_coefs) {
        out.push_str(&fmt_f64(*coef));
        out.push('\t');
        for (k, (i, v)) in sv.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            write!(out, "{i}:{}", fmt_f64(v)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_svm(text: &str) -> Result<SvmPipeline, FormatError> {
    let mut lines = Lines::new(text);
    lines.expect_magic(MAGIC)?;
    let (cap_line, cap) = lines.field("token_cap")?;
    let cap: usize = parse_num(cap_line, cap)?;
    let (dict_line, n_entries) = lines.field("dictionary")?;
    let n_entries: usize = parse_num(dict_line, n_entries)?;
    let mut entries = Vec::with_capacity(n_entries);
    for _ in 0..n_entries {
        let (n, line) = lines.expect_line()?;
        let (k, v) = line
            .split_once('\t')
            .ok_or_else(|| FormatError::Malformed { line: n, message: "expected `<abbreviation>\\t<expansion>`".into() })?;
        entries.push((k, v));
    }
    let dict = AcronymDictionary::new(entries).map_err(|source| FormatError::Invalid { line: dict_line, source })?;
    let preprocessor = Preprocessor::new(dict, cap).map_err(|source| FormatError::Invalid { line: cap_line, source })?;
    let tfidf = read_tfidf_block(&mut lines)?;

    let (kn, kernel) = lines.field("kernel")?;
    let kernel = match kernel.split_once(' ') {
        None if kernel == "linear" => Kernel::Linear,
        Some(("rbf", g)) => Kernel::Rbf { gamma: parse_finite(kn, 2, g)? },
        _ => return Err(FormatError::Malformed { line: kn, message: format!("unknown kernel `{kernel}`") }),
    };
    let c = lines.field_f64("c")?;
    let bias = lines.field_f64("bias")?;
    let dim: usize = lines.field_num("dim")?;
    if dim != tfidf.dim() {
        return Err(FormatError::Malformed {
            line: kn + 3,
            message: format!("svm dim {dim} does not match vocabulary size {}", tfidf.dim()),
        });
    }
    let n_sv: usize = lines.field_num("support_vectors")?;
    let mut support_vectors = Vec::with_capacity(n_sv);
    let mut dual_coefs = Vec::with_capacity(n_sv);
    for _ in 0..n_sv {
        let (n, line) = lines.expect_line()?;
        let (coef, entries) = line
            .split_once('\t')
            .ok_or_else(|| FormatError::Malformed { line: n, message: "expected `<coef>\\t<entries>`".into() })?;
        dual_coefs.push(parse_finite(n, 1, coef)?);
        let mut pairs = Vec::new();
        for (k, token) in entries.split_ascii_whitespace().enumerate() {
            let (i, v) = token
                .split_once(':')
                .ok_or_else(|| FormatError::Malformed { line: n, message: format!("expected `<index>:<value>`, found `{token}`") })?;
            pairs.push((parse_num(n, i)?, parse_finite(n, k + 2, v)?));
        }
        support_vectors.push(SparseVector::from_pairs(dim, pairs).map_err(|source| FormatError::Invalid { line: n, source })?);
    }
    lines.finish()?;
    Ok(SvmPipeline {
        preprocessor,
        tfidf,
        svm: SvmModel { kernel, c, dim, support_vectors, dual_coefs, bias },
    })
}
