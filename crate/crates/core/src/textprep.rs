//! Deterministic preprocessing: acronym expansion, lower-casing, tokenization
//! and truncation.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::Report;
use crate::error::{Error, Result};

/// Default token cap applied before featurization.
pub const DEFAULT_TOKEN_CAP: usize = 150;

const DEFAULT_DICTIONARY: &str = include_str!("../data/acronyms.tsv");

pub(crate) fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Splits text into alternating word-character and non-word runs.
fn segments(text: &str) -> Vec<(bool, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut current: Option<bool> = None;
    for (i, c) in text.char_indices() {
        let word = is_word_char(c);
        match current {
            Some(kind) if kind == word => {}
            Some(kind) => {
                out.push((kind, &text[start..i]));
                start = i;
                current = Some(word);
            }
            None => current = Some(word),
        }
    }
    if let Some(kind) = current {
        out.push((kind, &text[start..]));
    }
    out
}

/// Abbreviation to expansion map. Keys may span several space-separated
/// tokens (`h p`); longer keys take precedence during expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcronymDictionary {
    entries: Vec<(String, String)>,
    lookup: BTreeMap<String, usize>,
    max_key_tokens: usize,
}

impl AcronymDictionary {
    pub fn new<K, V, I>(entries: I) -> Result<AcronymDictionary>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut dict = AcronymDictionary {
            entries: Vec::new(),
            lookup: BTreeMap::new(),
            max_key_tokens: 0,
        };
        for (key, expansion) in entries {
            let key = key.as_ref().split_whitespace().collect::<Vec<_>>().join(" ");
            let expansion = expansion.as_ref().trim();
            if key.to_lowercase() != key {
                return Err(Error::NotLowercase(key));
            }
            if expansion.to_lowercase() != expansion {
                return Err(Error::NotLowercase(expansion.to_string()));
            }
            if expansion.is_empty() || key.is_empty() {
                return Err(Error::EmptyExpansion(key));
            }
            if dict.lookup.contains_key(&key) {
                return Err(Error::DuplicateKey(key));
            }
            dict.max_key_tokens = dict.max_key_tokens.max(key.split(' ').count());
            dict.lookup.insert(key.clone(), dict.entries.len());
            dict.entries.push((key, expansion.to_string()));
        }
        Ok(dict)
    }

    /// Parses `abbreviation<TAB>expansion` lines; blank lines and lines
    /// starting with `#` are skipped.
    pub fn from_tsv(text: &str) -> Result<AcronymDictionary> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, expansion) = line
                .split_once('\t')
                .ok_or(Error::MalformedDictionaryLine { line: i + 1 })?;
            if key.trim().is_empty() {
                return Err(Error::MalformedDictionaryLine { line: i + 1 });
            }
            pairs.push((key.trim(), expansion.trim()));
        }
        AcronymDictionary::new(pairs)
    }

    /// The 17-entry radiation-oncology glossary shipped with the crate.
    pub fn default_glossary() -> AcronymDictionary {
        AcronymDictionary::from_tsv(DEFAULT_DICTIONARY).expect("bundled glossary is valid")
    }

    pub fn empty() -> AcronymDictionary {
        AcronymDictionary::new(core::iter::empty::<(&str, &str)>()).expect("empty dictionary")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in insertion order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lookup.get(key).map(|&i| self.entries[i].1.as_str())
    }

    /// Keys whose expansion itself contains a dictionary key. Expansion is
    /// idempotent exactly when this is empty.
    pub fn closure_violations(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(_, expansion)| expand_acronyms_counted(expansion, self).1 > 0)
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

impl Default for AcronymDictionary {
    fn default() -> AcronymDictionary {
        AcronymDictionary::default_glossary()
    }
}

/// Replaces whole-token dictionary keys (case-insensitive) in a single
/// left-to-right pass. Returns the new text and the number of expansions.
pub fn expand_acronyms_counted(text: &str, dict: &AcronymDictionary) -> (String, usize) {
    let segs = segments(text);
    let mut out = String::with_capacity(text.len());
    let mut expansions = 0;
    let mut i = 0;
    'outer: while i < segs.len() {
        let (is_word, s) = segs[i];
        if is_word {
            for n in (1..=dict.max_key_tokens).rev() {
                let last = i + 2 * (n - 1);
                if last >= segs.len() {
                    continue;
                }
                // separators between the key's tokens must be pure whitespace
                let separated = (1..n).all(|k| {
                    let sep = segs[i + 2 * k - 1].1;
                    sep.chars().all(char::is_whitespace)
                });
                if !separated {
                    continue;
                }
                let mut key = String::new();
                for k in 0..n {
                    if k > 0 {
                        key.push(' ');
                    }
                    key.push_str(&segs[i + 2 * k].1.to_lowercase());
                }
                if let Some(expansion) = dict.get(&key) {
                    out.push_str(expansion);
                    expansions += 1;
                    i = last + 1;
                    continue 'outer;
                }
            }
        }
        out.push_str(s);
        i += 1;
    }
    (out, expansions)
}

pub fn expand_acronyms(text: &str, dict: &AcronymDictionary) -> String {
    expand_acronyms_counted(text, dict).0
}

/// Unicode-aware lower-casing; nothing else is touched.
pub fn normalize(text: &str) -> String {
    text.to_lowercase()
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    pub source_id: String,
}

impl TokenSequence {
    pub fn new(source_id: impl Into<String>, tokens: Vec<String>) -> TokenSequence {
        TokenSequence {
            tokens,
            source_id: source_id.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }
}

/// Maximal runs of at least two word characters (letters, digits, `_`).
pub fn tokenize(text: &str) -> TokenSequence {
    let tokens = segments(text)
        .into_iter()
        .filter(|&(is_word, s)| is_word && s.chars().nth(1).is_some())
        .map(|(_, s)| s.to_string())
        .collect();
    TokenSequence::new("", tokens)
}

pub fn truncate_tokens(mut seq: TokenSequence, cap: usize) -> TokenSequence {
    seq.tokens.truncate(cap);
    seq
}

/// Expansion, lower-casing, tokenization and truncation bundled together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preprocessor {
    dict: AcronymDictionary,
    cap: usize,
}

impl Preprocessor {
    pub fn new(dict: AcronymDictionary, cap: usize) -> Result<Preprocessor> {
        if cap == 0 {
            return Err(Error::InvalidConfig("token cap must be at least 1"));
        }
        Ok(Preprocessor { dict, cap })
    }

    pub fn dictionary(&self) -> &AcronymDictionary {
        &self.dict
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Expanded, lower-cased text before tokenization.
    pub fn clean_text(&self, text: &str) -> String {
        normalize(&expand_acronyms(text, &self.dict))
    }

    pub fn apply(&self, report: &Report) -> TokenSequence {
        preprocess(report, &self.dict, self.cap)
    }
}

impl Default for Preprocessor {
    fn default() -> Preprocessor {
        Preprocessor {
            dict: AcronymDictionary::default_glossary(),
            cap: DEFAULT_TOKEN_CAP,
        }
    }
}

pub fn preprocess(report: &Report, dict: &AcronymDictionary, cap: usize) -> TokenSequence {
    let text = normalize(&expand_acronyms(&report.text, dict));
    let mut seq = truncate_tokens(tokenize(&text), cap);
    seq.source_id = report.id.clone();
    seq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Source;
    use alloc::format;
    use alloc::vec;
    use proptest::prelude::*;

    fn toks(seq: &TokenSequence) -> Vec<&str> {
        seq.iter().collect()
    }

    #[test]
    fn default_glossary_has_seventeen_entries_and_is_closed() {
        let dict = AcronymDictionary::default_glossary();
        assert_eq!(dict.len(), 17);
        assert_eq!(dict.get("h p"), Some("history and physical"));
        assert!(dict.closure_violations().is_empty());
    }

    #[test]
    fn expands_glossary_examples() {
        let dict = AcronymDictionary::default_glossary();
        assert_eq!(expand_acronyms("pt arrived for sim", &dict), "patient arrived for simulation");
        assert_eq!(
            expand_acronyms("tbi schedule changed", &dict),
            "total body irradiation schedule changed"
        );
        assert_eq!(expand_acronyms("nothing to see here", &dict), "nothing to see here");
    }

    #[test]
    fn expansion_is_whole_token_and_case_insensitive() {
        let dict = AcronymDictionary::default_glossary();
        assert_eq!(expand_acronyms("Pt, PTS; opt", &dict), "patient, patients; opt");
        assert_eq!(expand_acronyms("sim2 simulator", &dict), "sim2 simulator");
        assert_eq!(expand_acronyms("(rx)", &dict), "(prescription)");
    }

    #[test]
    fn bigram_keys_take_precedence() {
        let dict = AcronymDictionary::default_glossary();
        assert_eq!(expand_acronyms("need H P today", &dict), "need history and physical today");
        // punctuation between the tokens blocks the bigram
        assert_eq!(expand_acronyms("h.p", &dict), "h.p");
        let (text, n) = expand_acronyms_counted("h p pt", &dict);
        assert_eq!((text.as_str(), n), ("history and physical patient", 2));
    }

    #[test]
    fn no_reexpansion_of_inserted_text() {
        let dict = AcronymDictionary::new([("ab", "ab cd"), ("cd", "x")]).unwrap();
        assert_eq!(expand_acronyms("ab", &dict), "ab cd");
        assert_eq!(dict.closure_violations(), vec!["ab"]);
    }

    #[test]
    fn dictionary_validation() {
        assert!(matches!(AcronymDictionary::new([("Pt", "patient")]), Err(Error::NotLowercase(_))));
        assert!(matches!(AcronymDictionary::new([("pt", "")]), Err(Error::EmptyExpansion(_))));
        assert!(matches!(
            AcronymDictionary::new([("pt", "a"), ("pt", "b")]),
            Err(Error::DuplicateKey(_))
        ));
        assert_eq!(
            AcronymDictionary::from_tsv("# c\npt patient\n"),
            Err(Error::MalformedDictionaryLine { line: 2 })
        );
    }

    #[test]
    fn normalize_lowercases() {
        assert_eq!(normalize("ABC Patient"), "abc patient");
        assert_eq!(normalize(""), "");
        assert_eq!(normalize("already lower"), "already lower");
    }

    #[test]
    fn tokenize_rule() {
        assert_eq!(toks(&tokenize("wrong headrest used.")), ["wrong", "headrest", "used"]);
        assert!(tokenize("a x 3").is_empty());
        assert!(tokenize("").is_empty());
        assert_eq!(toks(&tokenize("1.85 - 3.39 mu_s")), ["85", "39", "mu_s"]);
    }

    #[test]
    fn truncation_boundaries() {
        let seq = |n: usize| TokenSequence::new("r", (0..n).map(|i| format!("t{i}")).collect());
        let cut = truncate_tokens(seq(200), 150);
        assert_eq!(cut.len(), 150);
        assert_eq!(cut.tokens[149], "t149");
        assert_eq!(truncate_tokens(seq(150), 150), seq(150));
        assert!(truncate_tokens(seq(0), 150).is_empty());
    }

    #[test]
    fn preprocess_composes() {
        let dict = AcronymDictionary::default_glossary();
        let seq = preprocess(&Report::new("r1", "Pt sim", Source::Inst), &dict, 150);
        assert_eq!(toks(&seq), ["patient", "simulation"]);
        assert_eq!(seq.source_id, "r1");
        assert!(preprocess(&Report::new("r2", "", Source::Inst), &dict, 150).is_empty());
        assert!(Preprocessor::new(dict, 0).is_err());
    }

    #[test]
    fn average_expansions_on_constructed_fixture() {
        // 50 reports, 11 with two keys and 39 with one: 61 / 50 = 1.22
        let dict = AcronymDictionary::default_glossary();
        let texts = (0..50).map(|i| match i {
            0..=10 => "pt and tx",
            _ => "pt only",
        });
        let total: usize = texts.map(|t| expand_acronyms_counted(t, &dict).1).sum();
        assert_eq!(total as f64 / 50.0, 1.22);
    }

    proptest! {
        #[test]
        fn normalize_idempotent(s in "\\PC{0,40}") {
            let once = normalize(&s);
            prop_assert_eq!(normalize(&once), once.clone());
        }

        #[test]
        fn preprocess_respects_cap(s in "[a-zA-Z0-9 .,]{0,300}", cap in 1usize..60) {
            let seq = preprocess(&Report::new("x", s, Source::Other), &AcronymDictionary::default_glossary(), cap);
            prop_assert!(seq.len() <= cap);
        }

        #[test]
        fn expand_then_normalize_commutes(words in proptest::collection::vec(
            prop_oneof![Just("PT"), Just("pt"), Just("Sim"), Just("H"), Just("p"), Just("TBI"),
                        Just("wrong"), Just("Field"), Just("x"), Just("rO")], 0..20),
            seps in proptest::collection::vec(prop_oneof![Just(" "), Just(", "), Just("  "), Just(".")], 20),
        ) {
            let dict = AcronymDictionary::default_glossary();
            let mut text = String::new();
            for (w, sep) in words.iter().zip(&seps) {
                text.push_str(w);
                text.push_str(sep);
            }
            let a = tokenize(&normalize(&expand_acronyms(&text, &dict)));
            let b = tokenize(&expand_acronyms(&normalize(&text), &dict));
            prop_assert_eq!(a, b);
        }

        #[test]
        fn glossary_expansion_idempotent(s in "[a-z ]{0,60}") {
            let dict = AcronymDictionary::default_glossary();
            let once = expand_acronyms(&s, &dict);
            prop_assert_eq!(expand_acronyms(&once, &dict), once.clone());
        }
    }
}
