//! Report data model, severity binarization, seeded splits, corpus statistics
//! and a synthetic two-institution corpus generator.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    Inst,
    Safron,
    Synthetic,
    Other,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Inst => "inst",
            Source::Safron => "safron",
            Source::Synthetic => "synthetic",
            Source::Other => "other",
        }
    }

    /// Case-insensitive; anything unrecognised maps to [`Source::Other`].
    pub fn parse(s: &str) -> Source {
        match s.trim().to_ascii_lowercase().as_str() {
            "inst" => Source::Inst,
            "safron" | "sf" => Source::Safron,
            "synthetic" => Source::Synthetic,
            _ => Source::Other,
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Severity scale a raw label is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scale {
    /// Integer near-miss risk index, 0 through 4.
    Inst,
    /// Six ordered categories, `minor` through `critical`.
    Safron,
}

impl Scale {
    pub fn as_str(self) -> &'static str {
        match self {
            Scale::Inst => "inst",
            Scale::Safron => "safron",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SafronCategory {
    Minor,
    PotentialSerious,
    Serious,
    PotentialMajor,
    Major,
    Critical,
}

impl SafronCategory {
    pub const ALL: [SafronCategory; 6] = [
        SafronCategory::Minor,
        SafronCategory::PotentialSerious,
        SafronCategory::Serious,
        SafronCategory::PotentialMajor,
        SafronCategory::Major,
        SafronCategory::Critical,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SafronCategory::Minor => "minor",
            SafronCategory::PotentialSerious => "potential-serious",
            SafronCategory::Serious => "serious",
            SafronCategory::PotentialMajor => "potential-major",
            SafronCategory::Major => "major",
            SafronCategory::Critical => "critical",
        }
    }

    /// Case-insensitive; runs of spaces, hyphens and underscores are treated
    /// as one separator, so `Potential  Serious` parses as `potential-serious`.
    pub fn parse(s: &str) -> Option<SafronCategory> {
        let lowered = s.to_lowercase();
        let canonical = lowered
            .split(|c: char| c.is_whitespace() || c == '-' || c == '_')
            .filter(|part| !part.is_empty())
            .collect::<Vec<_>>()
            .join("-");
        SafronCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == canonical)
    }
}

/// A severity label exactly as recorded, before binarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RawSeverity {
    Inst(u8),
    Safron(SafronCategory),
}

impl RawSeverity {
    pub fn scale(self) -> Scale {
        match self {
            RawSeverity::Inst(_) => Scale::Inst,
            RawSeverity::Safron(_) => Scale::Safron,
        }
    }

    pub fn from_int(value: i64, scale: Scale) -> Result<RawSeverity> {
        match scale {
            Scale::Inst if (0..=4).contains(&value) => Ok(RawSeverity::Inst(value as u8)),
            _ => Err(Error::InvalidSeverity {
                value: value.to_string(),
                scale: scale.as_str(),
            }),
        }
    }

    /// Parses a textual label. Integer strings are accepted for the
    /// institutional scale.
    pub fn parse(value: &str, scale: Scale) -> Result<RawSeverity> {
        let invalid = || Error::InvalidSeverity {
            value: value.to_string(),
            scale: scale.as_str(),
        };
        match scale {
            Scale::Inst => {
                let n: i64 = value.trim().parse().map_err(|_| invalid())?;
                RawSeverity::from_int(n, scale)
            }
            Scale::Safron => SafronCategory::parse(value)
                .map(RawSeverity::Safron)
                .ok_or_else(invalid),
        }
    }
}

impl fmt::Display for RawSeverity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RawSeverity::Inst(n) => write!(f, "{n}"),
            RawSeverity::Safron(c) => f.write_str(c.as_str()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Low,
    High,
}

impl Severity {
    pub fn is_high(self) -> bool {
        self == Severity::High
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Low => "LOW",
            Severity::High => "HIGH",
        }
    }
}

/// Institutional scores 3 and 4 are HIGH; every SAFRON category except
/// `minor` is HIGH.
pub fn binarize_severity(raw: RawSeverity, scale: Scale) -> Result<Severity> {
    match (raw, scale) {
        (RawSeverity::Inst(n), Scale::Inst) if n <= 2 => Ok(Severity::Low),
        (RawSeverity::Inst(n), Scale::Inst) if n <= 4 => Ok(Severity::High),
        (RawSeverity::Safron(SafronCategory::Minor), Scale::Safron) => Ok(Severity::Low),
        (RawSeverity::Safron(_), Scale::Safron) => Ok(Severity::High),
        _ => Err(Error::InvalidSeverity {
            value: raw.to_string(),
            scale: scale.as_str(),
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeverityLabel {
    raw: RawSeverity,
    binary: Severity,
}

impl SeverityLabel {
    pub fn new(raw: RawSeverity) -> Result<SeverityLabel> {
        let binary = binarize_severity(raw, raw.scale())?;
        Ok(SeverityLabel { raw, binary })
    }

    pub fn raw(&self) -> RawSeverity {
        self.raw
    }

    pub fn binary(&self) -> Severity {
        self.binary
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub id: String,
    pub text: String,
    pub source: Source,
}

impl Report {
    pub fn new(id: impl Into<String>, text: impl Into<String>, source: Source) -> Report {
        Report {
            id: id.into(),
            text: text.into(),
            source,
        }
    }

    pub fn word_count(&self) -> usize {
        self.text.split_whitespace().count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledReport {
    pub report: Report,
    pub label: SeverityLabel,
}

impl LabeledReport {
    pub fn severity(&self) -> Severity {
        self.label.binary()
    }

    pub fn id(&self) -> &str {
        &self.report.id
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_frac: f64,
    pub val_frac: f64,
    pub test_frac: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl SplitSpec {
    pub fn new(train_frac: f64, val_frac: f64, test_frac: f64, seed: u64) -> Result<SplitSpec> {
        let spec = SplitSpec {
            train_frac,
            val_frac,
            test_frac,
            seed,
            stratified: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn stratified(mut self, stratified: bool) -> SplitSpec {
        self.stratified = stratified;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fracs = [self.train_frac, self.val_frac, self.test_frac];
        let sum: f64 = fracs.iter().sum();
        if fracs.iter().any(|f| !(0.0..=1.0).contains(f)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidFractions { sum });
        }
        Ok(())
    }

    /// Part sizes `(train, val, test)` for a corpus of `n` reports. Validation
    /// and test sizes are rounded; the remainder goes to train.
    pub fn sizes(&self, n: usize) -> (usize, usize, usize) {
        let n_val = (libm::round(self.val_frac * n as f64) as usize).min(n);
        let n_test = (libm::round(self.test_frac * n as f64) as usize).min(n - n_val);
        (n - n_val - n_test, n_val, n_test)
    }
}

impl Default for SplitSpec {
    fn default() -> SplitSpec {
        SplitSpec {
            train_frac: 0.70,
            val_frac: 0.15,
            test_frac: 0.15,
            seed: 0,
            stratified: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Split {
    pub train: Vec<LabeledReport>,
    pub val: Vec<LabeledReport>,
    pub test: Vec<LabeledReport>,
}

/// Seeded partition into train / validation / test.
///
/// With `stratified`, validation and test receive `round(p * size)` HIGH
/// reports (p = overall HIGH prevalence), clamped to what is available, and
/// train takes the rest, so each part's prevalence is within `1 / size` of p.
pub fn split_corpus(corpus: &[LabeledReport], spec: &SplitSpec) -> Result<Split> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    spec.validate()?;
    let n = corpus.len();
    let (_, n_val, n_test) = spec.sizes(n);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let take = |idx: &[usize]| -> Vec<LabeledReport> { idx.iter().map(|&i| corpus[i].clone()).collect() };

    if !spec.stratified {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let (val, rest) = order.split_at(n_val);
        let (test, train) = rest.split_at(n_test);
        return Ok(Split {
            train: take(train),
            val: take(val),
            test: take(test),
        });
    }

    let (mut highs, mut lows): (Vec<usize>, Vec<usize>) =
        (0..n).partition(|&i| corpus[i].severity().is_high());
    if highs.is_empty() {
        return Err(Error::NoHighExamples);
    }
    let prevalence = highs.len() as f64 / n as f64;
    highs.shuffle(&mut rng);
    lows.shuffle(&mut rng);

    let mut parts: Vec<Vec<usize>> = Vec::with_capacity(3);
    let (mut h_next, mut l_next) = (0usize, 0usize);
    for size in [n_val, n_test] {
        let h_left = highs.len() - h_next;
        let l_left = lows.len() - l_next;
        let wanted = libm::round(prevalence * size as f64) as usize;
        let n_high = wanted.min(h_left).max(size.saturating_sub(l_left));
        let n_low = size - n_high;
        let mut part: Vec<usize> = highs[h_next..h_next + n_high]
            .iter()
            .chain(&lows[l_next..l_next + n_low])
            .copied()
            .collect();
        part.shuffle(&mut rng);
        parts.push(part);
        h_next += n_high;
        l_next += n_low;
    }
    let mut train: Vec<usize> = highs[h_next..].iter().chain(&lows[l_next..]).copied().collect();
    train.shuffle(&mut rng);

    Ok(Split {
        train: take(&train),
        val: take(&parts[0]),
        test: take(&parts[1]),
    })
}

/// Word-length summary. `std_words` is the population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusStats {
    pub n_reports: usize,
    pub median_words: f64,
    pub std_words: f64,
    pub high_severity_frac: f64,
}

pub fn corpus_stats(corpus: &[LabeledReport]) -> Result<CorpusStats> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let n = corpus.len();
    let mut counts: Vec<usize> = corpus.iter().map(|r| r.report.word_count()).collect();
    counts.sort_unstable();
    let median_words = if n % 2 == 1 {
        counts[n / 2] as f64
    } else {
        (counts[n / 2 - 1] + counts[n / 2]) as f64 / 2.0
    };
    let mean = counts.iter().sum::<usize>() as f64 / n as f64;
    let var = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n as f64;
    // all-equal counts must give exactly zero
    let std_words = if counts[0] == counts[n - 1] { 0.0 } else { libm::sqrt(var) };
    let highs = corpus.iter().filter(|r| r.severity().is_high()).count();
    Ok(CorpusStats {
        n_reports: n,
        median_words,
        std_words,
        high_severity_frac: highs as f64 / n as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Institution {
    A,
    B,
}

impl Institution {
    pub fn as_str(self) -> &'static str {
        match self {
            Institution::A => "A",
            Institution::B => "B",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n_reports: usize,
    pub prevalence: f64,
    /// Fraction of the hazard and routine lexicons that institution B
    /// replaces with its own synonyms.
    pub vocab_shift: f64,
    /// Probability that a binary label is flipped after the text is drawn.
    pub label_noise: f64,
    pub length_median: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> SyntheticSpec {
        SyntheticSpec {
            n_reports: 1000,
            prevalence: 0.2,
            vocab_shift: 0.5,
            label_noise: 0.05,
            length_median: 40,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("prevalence", self.prevalence),
            ("vocab_shift", self.vocab_shift),
            ("label_noise", self.label_noise),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidFraction { name, value });
            }
        }
        if self.length_median == 0 {
            return Err(Error::InvalidConfig("length_median must be at least 1"));
        }
        Ok(())
    }

    /// A prevalence of exactly 0 or 1 yields a single-class corpus, which
    /// stratified splits and every trainer reject.
    pub fn is_single_class(&self) -> bool {
        self.prevalence == 0.0 || self.prevalence == 1.0
    }
}

// (institution A word, institution B synonym)
const HAZARD_LEXICON: [(&str, &str); 24] = [
    ("wrong", "improper"),
    ("overdose", "overdosage"),
    ("misadministration", "maladministration"),
    ("incorrect", "inaccurate"),
    ("mismatch", "discrepancy"),
    ("missed", "skipped"),
    ("error", "fault"),
    ("collision", "impact"),
    ("omitted", "dropped"),
    ("unplanned", "unscheduled"),
    ("exceeded", "surpassed"),
    ("laterality", "sidedness"),
    ("delayed", "postponed"),
    ("repeated", "duplicated"),
    ("overexposure", "overirradiation"),
    ("misaligned", "offset"),
    ("unverified", "unchecked"),
    ("bypassed", "circumvented"),
    ("contaminated", "tainted"),
    ("erroneous", "faulty"),
    ("swapped", "exchanged"),
    ("interlock", "lockout"),
    ("deviation", "departure"),
    ("underdose", "underdosage"),
];

const ROUTINE_LEXICON: [(&str, &str); 24] = [
    ("scheduling", "booking"),
    ("reminder", "notice"),
    ("paperwork", "clerical"),
    ("signature", "initials"),
    ("printer", "copier"),
    ("label", "sticker"),
    ("parking", "garage"),
    ("documentation", "records"),
    ("form", "template"),
    ("login", "signon"),
    ("reschedule", "rebook"),
    ("typo", "misspelling"),
    ("billing", "invoicing"),
    ("courtesy", "politeness"),
    ("supply", "stock"),
    ("cleaning", "housekeeping"),
    ("calendar", "agenda"),
    ("badge", "pass"),
    ("folder", "binder"),
    ("voicemail", "message"),
    ("formatting", "layout"),
    ("checklist", "worksheet"),
    ("whiteboard", "board"),
    ("coffee", "breakroom"),
];

const NEUTRAL_LEXICON: [&str; 48] = [
    "the", "patient", "was", "for", "and", "on", "at", "with", "therapist", "physicist", "plan",
    "treatment", "machine", "room", "day", "noted", "called", "reviewed", "pt", "sim", "tx", "rx",
    "qcl", "mq", "dosi", "fraction", "setup", "chart", "field", "imaging", "couch", "console",
    "morning", "afternoon", "team", "nurse", "physician", "department", "linac", "ct",
    "isocenter", "dose", "beam", "image", "check", "note", "staff", "clinic",
];

/// Probability that a word is drawn from the lexicon matching the report's
/// true class.
const SIGNAL_RATE: f64 = 0.08;
/// Probability that a word is drawn from the opposite class's lexicon.
const CROSS_RATE: f64 = 0.03;
const LENGTH_SIGMA: f64 = 0.6;
const MIN_WORDS: usize = 3;

/// Whether lexicon entry `i` is replaced by its synonym at institution B.
/// Replacements are spread evenly: exactly `floor(len * shift)` entries.
fn is_shifted(i: usize, shift: f64) -> bool {
    libm::floor((i + 1) as f64 * shift) > libm::floor(i as f64 * shift)
}

/// The hazard and routine lexicons as seen by one institution.
pub fn institution_lexicons(institution: Institution, vocab_shift: f64) -> (Vec<&'static str>, Vec<&'static str>) {
    let pick = |lex: &[(&'static str, &'static str)]| -> Vec<&'static str> {
        lex.iter()
            .enumerate()
            .map(|(i, &(a, b))| match institution {
                Institution::B if is_shifted(i, vocab_shift) => b,
                _ => a,
            })
            .collect()
    };
    (pick(&HAZARD_LEXICON), pick(&ROUTINE_LEXICON))
}

/// Fixture corpus: HIGH reports lean on a hazard lexicon, LOW reports on a
/// routine lexicon, everything else is shared filler. Institution-specific
/// text comes from [`institution_lexicons`]. Raw labels are on the
/// institutional 0-4 scale.
pub fn generate_synthetic_corpus(spec: &SyntheticSpec, institution: Institution) -> Result<Vec<LabeledReport>> {
    spec.validate()?;
    let (hazard, routine) = institution_lexicons(institution, spec.vocab_shift);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(match institution {
        Institution::A => 1,
        Institution::B => 2,
    });
    let lengths = LogNormal::new(libm::log(spec.length_median as f64), LENGTH_SIGMA)
        .map_err(|_| Error::InvalidConfig("invalid length distribution"))?;

    let mut out = Vec::with_capacity(spec.n_reports);
    for i in 0..spec.n_reports {
        let high = rng.random_bool(spec.prevalence);
        let (own, other) = if high { (&hazard, &routine) } else { (&routine, &hazard) };
        let n_words = (libm::round(lengths.sample(&mut rng)) as usize).max(MIN_WORDS);
        let mut text = String::new();
        for w in 0..n_words {
            let u: f64 = rng.random();
            let word = if u < SIGNAL_RATE {
                own[rng.random_range(0..own.len())]
            } else if u < SIGNAL_RATE + CROSS_RATE {
                other[rng.random_range(0..other.len())]
            } else {
                NEUTRAL_LEXICON[rng.random_range(0..NEUTRAL_LEXICON.len())]
            };
            if w > 0 {
                text.push(' ');
            }
            text.push_str(word);
        }
        text.push('.');

        let flipped = rng.random_bool(spec.label_noise);
        let label_high = high != flipped;
        let raw = if label_high {
            rng.random_range(3..=4u8)
        } else {
            rng.random_range(0..=2u8)
        };
        out.push(LabeledReport {
            report: Report::new(
                format!("{}{}-{:05}", institution.as_str(), spec.seed, i),
                text,
                Source::Synthetic,
            ),
            label: SeverityLabel::new(RawSeverity::Inst(raw))?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use alloc::vec;
    use proptest::prelude::*;

    fn labeled(id: &str, words: usize, high: bool) -> LabeledReport {
        let text = vec!["word"; words].join(" ");
        LabeledReport {
            report: Report::new(id, text, Source::Other),
            label: SeverityLabel::new(RawSeverity::Inst(if high { 4 } else { 1 })).unwrap(),
        }
    }

    fn corpus(n: usize, every_nth_high: usize) -> Vec<LabeledReport> {
        (0..n)
            .map(|i| labeled(&format!("r{i}"), 5, i % every_nth_high == 0))
            .collect()
    }

    fn ids(reports: &[LabeledReport]) -> BTreeSet<String> {
        reports.iter().map(|r| r.report.id.clone()).collect()
    }

    #[test]
    fn binarize_inst_scale() {
        let expect = [Severity::Low, Severity::Low, Severity::Low, Severity::High, Severity::High];
        for (score, want) in expect.into_iter().enumerate() {
            assert_eq!(binarize_severity(RawSeverity::Inst(score as u8), Scale::Inst).unwrap(), want);
        }
        assert!(binarize_severity(RawSeverity::Inst(5), Scale::Inst).is_err());
        assert!(RawSeverity::from_int(-1, Scale::Inst).is_err());
    }

    #[test]
    fn binarize_safron_scale() {
        for cat in SafronCategory::ALL {
            let want = if cat == SafronCategory::Minor { Severity::Low } else { Severity::High };
            assert_eq!(binarize_severity(RawSeverity::Safron(cat), Scale::Safron).unwrap(), want);
        }
        assert!(binarize_severity(RawSeverity::Safron(SafronCategory::Minor), Scale::Inst).is_err());
    }

    #[test]
    fn safron_parsing_normalizes_case_and_spaces() {
        for s in ["potential serious", "Potential  Serious", "POTENTIAL-serious", " potential_serious "] {
            assert_eq!(SafronCategory::parse(s), Some(SafronCategory::PotentialSerious), "{s}");
        }
        assert_eq!(SafronCategory::parse("catastrophic"), None);
        let err = RawSeverity::parse("catastrophic", Scale::Safron).unwrap_err();
        assert!(matches!(err, Error::InvalidSeverity { ref value, .. } if value == "catastrophic"));
        assert!(RawSeverity::parse("3", Scale::Safron).is_err());
        assert_eq!(RawSeverity::parse("3", Scale::Inst).unwrap(), RawSeverity::Inst(3));
    }

    #[test]
    fn split_sizes_follow_rounding_rule() {
        let spec = SplitSpec::new(0.7, 0.15, 0.15, 7).unwrap();
        assert_eq!(spec.sizes(100), (70, 15, 15));
        // 0.2 * 571 = 114.2 -> 114 for val and test, remainder to train
        let spec = SplitSpec::new(0.6, 0.2, 0.2, 7).unwrap();
        assert_eq!(spec.sizes(571), (343, 114, 114));
    }

    #[test]
    fn split_571_by_direct_count() {
        let c = corpus(571, 3);
        let split = split_corpus(&c, &SplitSpec::new(0.6, 0.2, 0.2, 11).unwrap()).unwrap();
        assert_eq!((split.train.len(), split.val.len(), split.test.len()), (343, 114, 114));
    }

    #[test]
    fn split_is_partition_and_deterministic() {
        let c = corpus(100, 4);
        let spec = SplitSpec::new(0.7, 0.15, 0.15, 7).unwrap();
        let a = split_corpus(&c, &spec).unwrap();
        let b = split_corpus(&c, &spec).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.train.len(), a.val.len(), a.test.len()), (70, 15, 15));
        let (tr, va, te) = (ids(&a.train), ids(&a.val), ids(&a.test));
        assert!(tr.is_disjoint(&va) && tr.is_disjoint(&te) && va.is_disjoint(&te));
        assert_eq!(tr.len() + va.len() + te.len(), 100);
        assert_eq!(&(&tr | &va) | &te, ids(&c));
    }

    #[test]
    fn split_errors() {
        assert_eq!(split_corpus(&[], &SplitSpec::default()), Err(Error::EmptyCorpus));
        let all_low = corpus(10, 1000)[1..].to_vec();
        assert_eq!(
            split_corpus(&all_low, &SplitSpec::default().stratified(true)),
            Err(Error::NoHighExamples)
        );
        assert!(SplitSpec::new(0.7, 0.2, 0.2, 0).is_err());
        assert!(SplitSpec::new(1.2, -0.1, -0.1, 0).is_err());
    }

    #[test]
    fn stratified_split_balances_prevalence() {
        let c = corpus(203, 5);
        let p = c.iter().filter(|r| r.severity().is_high()).count() as f64 / 203.0;
        let split = split_corpus(&c, &SplitSpec::new(0.6, 0.2, 0.2, 3).unwrap().stratified(true)).unwrap();
        for part in [&split.train, &split.val, &split.test] {
            let h = part.iter().filter(|r| r.severity().is_high()).count() as f64;
            let n = part.len() as f64;
            assert!((h / n - p).abs() <= 1.0 / n, "{} vs {p}", h / n);
        }
    }

    #[test]
    fn stats_hand_computed() {
        let c = [labeled("a", 10, false), labeled("b", 44, true), labeled("c", 90, false)];
        let s = corpus_stats(&c).unwrap();
        assert_eq!(s.n_reports, 3);
        assert_eq!(s.median_words, 44.0);
        assert!((s.high_severity_frac - 1.0 / 3.0).abs() < 1e-12);
        // mean 48, deviations -38, -4, 42 -> var = (1444 + 16 + 1764) / 3
        assert!((s.std_words - libm::sqrt(3224.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn stats_single_and_empty() {
        let s = corpus_stats(&[labeled("a", 7, false)]).unwrap();
        assert_eq!((s.median_words, s.std_words, s.high_severity_frac), (7.0, 0.0, 0.0));
        assert_eq!(corpus_stats(&[]), Err(Error::EmptyCorpus));
        let even = [labeled("a", 2, false), labeled("b", 5, false)];
        assert_eq!(corpus_stats(&even).unwrap().median_words, 3.5);
    }

    #[test]
    fn synthetic_prevalence_within_binomial_bound() {
        let spec = SyntheticSpec {
            n_reports: 1000,
            prevalence: 0.2,
            label_noise: 0.0,
            seed: 1,
            ..SyntheticSpec::default()
        };
        let c = generate_synthetic_corpus(&spec, Institution::A).unwrap();
        let frac = c.iter().filter(|r| r.severity().is_high()).count() as f64 / 1000.0;
        let sigma = libm::sqrt(0.2 * 0.8 / 1000.0);
        assert!((frac - 0.2).abs() <= 3.0 * sigma, "{frac}");
    }

    #[test]
    fn synthetic_is_deterministic() {
        let spec = SyntheticSpec { n_reports: 50, seed: 9, ..SyntheticSpec::default() };
        let a = generate_synthetic_corpus(&spec, Institution::B).unwrap();
        let b = generate_synthetic_corpus(&spec, Institution::B).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_shift_shares_lexicons() {
        assert_eq!(
            institution_lexicons(Institution::A, 0.0),
            institution_lexicons(Institution::B, 0.0)
        );
        let (hazard_b, routine_b) = institution_lexicons(Institution::B, 0.5);
        let (hazard_a, routine_a) = institution_lexicons(Institution::A, 0.5);
        let changed = |a: &[&str], b: &[&str]| a.iter().zip(b).filter(|(x, y)| x != y).count();
        assert_eq!(changed(&hazard_a, &hazard_b), 12);
        assert_eq!(changed(&routine_a, &routine_b), 12);
        assert_eq!(changed(&hazard_a, &institution_lexicons(Institution::B, 1.0).0), 24);
    }

    #[test]
    fn synthetic_rejects_bad_fractions() {
        let spec = SyntheticSpec { vocab_shift: 1.5, ..SyntheticSpec::default() };
        assert!(generate_synthetic_corpus(&spec, Institution::A).is_err());
        assert!(SyntheticSpec { prevalence: 0.0, ..SyntheticSpec::default() }.is_single_class());
    }

    proptest! {
        #[test]
        fn binarize_is_total_over_inst(score in 0u8..=4) {
            let label = binarize_severity(RawSeverity::Inst(score), Scale::Inst).unwrap();
            prop_assert_eq!(label.is_high(), score >= 3);
        }

        #[test]
        fn split_always_partitions(
            n in 3usize..200,
            val in 0.0f64..0.5,
            test in 0.0f64..0.5,
            seed in any::<u64>(),
            stratified in any::<bool>(),
        ) {
            let c = corpus(n, 3);
            let spec = SplitSpec { train_frac: 1.0 - val - test, val_frac: val, test_frac: test, seed, stratified };
            let s = split_corpus(&c, &spec).unwrap();
            prop_assert_eq!(s.train.len() + s.val.len() + s.test.len(), n);
            let all: BTreeSet<String> = ids(&s.train).into_iter().chain(ids(&s.val)).chain(ids(&s.test)).collect();
            prop_assert_eq!(all.len(), n);
        }

        #[test]
        fn std_zero_iff_counts_equal(counts in proptest::collection::vec(0usize..30, 1..20)) {
            let c: Vec<_> = counts.iter().enumerate().map(|(i, &w)| labeled(&format!("{i}"), w, false)).collect();
            let s = corpus_stats(&c).unwrap();
            let all_equal = counts.iter().all(|&w| w == counts[0]);
            prop_assert_eq!(s.std_words == 0.0, all_equal);
        }
    }
}
