//! `headv1`: a trained classification head.
//!
//! ```text
//! headv1
//! dim <d>
//! bias <b>
//! provenance <free text>
//! seed <train seed>
//! weights <w1> <w2> ... <w_d>
//! ```

use triage_core::head::HeadModel;

use super::{fmt_f64, parse_finite, Lines};
use crate::error::FormatError;
use crate::pipeline::HeadArtifact;

pub const MAGIC: &str = "headv1";

pub fn to_head_string(h: &HeadArtifact) -> String {
    let weights: Vec<String> = h.model.weights.iter().map(|w| fmt_f64(*w)).collect();
    format!(
        "{MAGIC}\ndim {}\nbias {}\nprovenance {}\nseed {}\nweights {}\n",
        h.model.dim(),
        fmt_f64(h.model.bias),
        h.provenance.replace(['\n', '\r'], " "),
        h.seed,
        weights.join(" ")
    )
}

pub fn parse_head(text: &str) -> Result<HeadArtifact, FormatError> {
    let mut lines = Lines::new(text);
    lines.expect_magic(MAGIC)?;
    let dim: usize = lines.field_num("dim")?;
    let bias = lines.field_f64("bias")?;
    let (_, provenance) = lines.field("provenance")?;
    let seed = lines.field_num("seed")?;
    let (n, weights) = lines.field("weights")?;
    let weights = weights
        .split_ascii_whitespace()
        .enumerate()
        .map(|(k, t)| parse_finite(n, k + 1, t))
        .collect::<Result<Vec<f64>, _>>()?;
    if weights.len() != dim {
        return Err(FormatError::DimensionMismatch { line: n, expected: dim, found: weights.len() });
    }
    lines.finish()?;
    Ok(HeadArtifact { model: HeadModel { weights, bias }, provenance: provenance.to_string(), seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let h = HeadArtifact {
            model: HeadModel { weights: vec![0.1, -2.5e-9, 3.0], bias: -0.75 },
            provenance: "fallback; transfer".into(),
            seed: 9,
        };
        let text = to_head_string(&h);
        assert!(text.starts_with("headv1\ndim 3\nbias -7.5000000000000000e-1\nprovenance fallback; transfer\nseed 9\n"));
        assert_eq!(parse_head(&text).unwrap(), h);
        let short = text.replace(" 3.0000000000000000e0", "");
        assert!(matches!(parse_head(&short), Err(FormatError::DimensionMismatch { line: 6, expected: 3, found: 2 })));
    }
}
