//! ROC/AUROC, alert-rate operating points, confusion metrics, F1 variants,
//! Krippendorff's alpha and pooled human-rater AUROC.
//!
//! Metrics whose denominator is zero are reported as `None`, never as 0.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::corpus::Severity;
use crate::error::{Error, Result};

/// Alert rates reported by default: 20% and 50% of cases flagged.
pub const DEFAULT_ALERT_RATES: [f64; 2] = [0.20, 0.50];

fn check_scores(scores: &[f64]) -> Result<()> {
    match scores.iter().position(|s| !s.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// `(false-positive rate, true-positive rate)`, from (0,0) to (1,1).
    pub points: Vec<(f64, f64)>,
    /// Score threshold reached at each point after the origin (flag when
    /// `score >= threshold`).
    pub thresholds: Vec<f64>,
    pub auroc: f64,
}

impl RocCurve {
    /// Trapezoidal area under [`RocCurve::points`].
    pub fn trapezoid_area(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
            .sum()
    }
}

fn class_counts(labels: &[Severity]) -> (usize, usize) {
    let pos = labels.iter().filter(|l| l.is_high()).count();
    (pos, labels.len() - pos)
}

/// Tie-aware Mann-Whitney AUROC from mid-ranks.
pub fn auroc(scores: &[f64], labels: &[Severity]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch { left: scores.len(), right: labels.len() });
    }
    check_scores(scores)?;
    let (n_pos, n_neg) = class_counts(labels);
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their mean
        let mid_rank = (i + j + 2) as f64 / 2.0;
        let pos_in_group = order[i..=j].iter().filter(|&&k| labels[k].is_high()).count();
        rank_sum_pos += mid_rank * pos_in_group as f64;
        i = j + 1;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// ROC curve over descending unique score thresholds.
pub fn roc_curve(scores: &[f64], labels: &[Severity]) -> Result<RocCurve> {
    let auroc = auroc(scores, labels)?;
    let (n_pos, n_neg) = class_counts(labels);
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![(0.0, 0.0)];
    let mut thresholds = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if labels[order[i]].is_high() {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
        thresholds.push(threshold);
    }
    Ok(RocCurve { points, thresholds, auroc })
}

/// The top-`k` reports at a requested alert rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AlertThreshold {
    pub alert_rate: f64,
    pub k: usize,
    /// Score of the k-th ranked report; `None` when nothing is flagged.
    pub threshold: Option<f64>,
    /// Indices of flagged reports in rank order.
    pub flagged: Vec<usize>,
}

/// Number of reports flagged at `alert_rate` out of `n`:
/// `floor(alert_rate * n + 0.5)`.
pub fn flag_count(alert_rate: f64, n: usize) -> usize {
    (libm::floor(alert_rate * n as f64 + 0.5) as usize).min(n)
}

/// Ranks by score descending, ties broken by ascending id, and flags the
/// first `flag_count(alert_rate, n)`.
pub fn threshold_for_alert_rate<S: AsRef<str>>(ids: &[S], scores: &[f64], alert_rate: f64) -> Result<AlertThreshold> {
    if scores.is_empty() {
        return Err(Error::EmptyScores);
    }
    if ids.len() != scores.len() {
        return Err(Error::LengthMismatch { left: ids.len(), right: scores.len() });
    }
    if !(0.0..=1.0).contains(&alert_rate) {
        return Err(Error::InvalidFraction { name: "alert_rate", value: alert_rate });
    }
    check_scores(scores)?;
    let order = rank_order(ids, scores);
    let k = flag_count(alert_rate, scores.len());
    let flagged: Vec<usize> = order[..k].to_vec();
    Ok(AlertThreshold {
        alert_rate,
        k,
        threshold: flagged.last().map(|&i| scores[i]),
        flagged,
    })
}

/// Indices sorted by descending score, then ascending id.
pub fn rank_order<S: AsRef<str>>(ids: &[S], scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| match scores[b].total_cmp(&scores[a]) {
        Ordering::Equal => ids[a].as_ref().cmp(ids[b].as_ref()),
        other => other,
    });
    order
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

impl ConfusionCounts {
    pub fn new(tp: usize, fp: usize, fn_: usize, tn: usize) -> ConfusionCounts {
        ConfusionCounts { tp, fp, fn_, tn }
    }

    pub fn record(&mut self, predicted_high: bool, actual_high: bool) {
        match (predicted_high, actual_high) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn alert_rate(&self) -> Option<f64> {
        ratio(self.tp + self.fp, self.total())
    }

    pub fn f1_binary(&self) -> Option<f64> {
        ratio(2 * self.tp, 2 * self.tp + self.fp + self.fn_)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfusionRates {
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub ppv: Option<f64>,
    pub npv: Option<f64>,
}

/// Tallies flagged/unflagged against the labels. `flagged` holds indices
/// into `labels`.
pub fn confusion_at_threshold(labels: &[Severity], flagged: &[usize]) -> Result<ConfusionCounts> {
    let mut mask = vec![false; labels.len()];
    for &i in flagged {
        *mask.get_mut(i).ok_or(Error::IndexOutOfRange { index: i, len: labels.len() })? = true;
    }
    let mut counts = ConfusionCounts::default();
    for (label, flag) in labels.iter().zip(mask) {
        counts.record(flag, label.is_high());
    }
    Ok(counts)
}

pub fn confusion_metrics(c: &ConfusionCounts) -> ConfusionRates {
    ConfusionRates {
        sensitivity: ratio(c.tp, c.tp + c.fn_),
        specificity: ratio(c.tn, c.tn + c.fp),
        ppv: ratio(c.tp, c.tp + c.fp),
        npv: ratio(c.tn, c.tn + c.fn_),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F1Scores {
    /// F1 of the HIGH class.
    pub binary: Option<f64>,
    /// Micro-average over both classes, which equals accuracy.
    pub micro: Option<f64>,
    /// Unweighted mean of the per-class F1 scores.
    pub macro_: Option<f64>,
}

pub fn f1_scores(c: &ConfusionCounts) -> F1Scores {
    let binary = c.f1_binary();
    let negative = ratio(2 * c.tn, 2 * c.tn + c.fp + c.fn_);
    F1Scores {
        binary,
        micro: ratio(c.tp + c.tn, c.total()),
        macro_: binary.zip(negative).map(|(p, n)| (p + n) / 2.0),
    }
}

/// Consensus label plus every individual rater score for one report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatedReport {
    pub consensus: Severity,
    pub scores: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RaterTable {
    reports: BTreeMap<String, RatedReport>,
}

impl RaterTable {
    pub fn new() -> RaterTable {
        RaterTable::default()
    }

    /// Scores are on the 0-4 institutional scale; at least one is required.
    pub fn insert(&mut self, id: impl Into<String>, consensus: Severity, scores: Vec<u8>) -> Result<()> {
        let id = id.into();
        if scores.is_empty() {
            return Err(Error::InvalidConfig("every rated report needs at least one score"));
        }
        if let Some(&bad) = scores.iter().find(|&&s| s > 4) {
            return Err(Error::InvalidSeverity {
                value: alloc::format!("{bad}"),
                scale: "inst",
            });
        }
        if self.reports.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        self.reports.insert(id, RatedReport { consensus, scores });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.reports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reports.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &RatedReport)> {
        self.reports.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Total number of individual rater scores.
    pub fn n_predictions(&self) -> usize {
        self.reports.values().map(|r| r.scores.len()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaMetric {
    Nominal,
    /// Squared difference of mid-ranks in the pooled value distribution.
    Ordinal,
}

/// Krippendorff's alpha from the coincidence matrix of pairable values.
/// Reports with a single score contribute nothing.
pub fn krippendorff_alpha(table: &RaterTable, metric: AlphaMetric) -> Result<f64> {
    let pairable: Vec<&[u8]> = table
        .reports
        .values()
        .map(|r| r.scores.as_slice())
        .filter(|s| s.len() >= 2)
        .collect();
    let categories: Vec<u8> = pairable
        .iter()
        .flat_map(|s| s.iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if categories.is_empty() {
        return Err(Error::NoPairableValues);
    }
    let q = categories.len();
    let slot = |v: u8| categories.binary_search(&v).expect("category present");

    let mut coincidence = vec![vec![0.0f64; q]; q];
    for scores in &pairable {
        let weight = 1.0 / (scores.len() - 1) as f64;
        for (i, &a) in scores.iter().enumerate() {
            for (j, &b) in scores.iter().enumerate() {
                if i != j {
                    coincidence[slot(a)][slot(b)] += weight;
                }
            }
        }
    }
    let marginals: Vec<f64> = coincidence.iter().map(|row| row.iter().sum()).collect();
    let n: f64 = marginals.iter().sum();

    let delta = |c: usize, k: usize| -> f64 {
        match metric {
            AlphaMetric::Nominal => f64::from(u8::from(c != k)),
            AlphaMetric::Ordinal => {
                let (lo, hi) = if c <= k { (c, k) } else { (k, c) };
                let between: f64 = marginals[lo..=hi].iter().sum();
                let d = between - (marginals[lo] + marginals[hi]) / 2.0;
                d * d
            }
        }
    };

    let mut observed = 0.0;
    let mut expected = 0.0;
    for c in 0..q {
        for k in 0..q {
            let d = delta(c, k);
            observed += coincidence[c][k] * d;
            expected += marginals[c] * marginals[k] * d;
        }
    }
    if expected == 0.0 {
        // a single category overall: nothing to disagree about
        return Ok(1.0);
    }
    Ok(1.0 - (n - 1.0) * observed / expected)
}

/// Flattens every rater score into a `(score, consensus)` prediction and
/// computes AUROC over the pooled set.
pub fn pooled_rater_auroc(table: &RaterTable) -> Result<f64> {
    let (scores, labels): (Vec<f64>, Vec<Severity>) = table
        .reports
        .values()
        .flat_map(|r| r.scores.iter().map(move |&s| (f64::from(s), r.consensus)))
        .unzip();
    auroc(&scores, &labels)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatingPoint {
    pub alert_rate: f64,
    pub threshold: Option<f64>,
    pub counts: ConfusionCounts,
    pub rates: ConfusionRates,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub n: usize,
    pub n_high: usize,
    pub auroc: f64,
    pub roc: RocCurve,
    pub operating_points: Vec<OperatingPoint>,
    /// Threshold of the model's own decision rule (flag when `score > t`).
    pub decision_threshold: f64,
    pub decision_counts: ConfusionCounts,
    pub f1: F1Scores,
}

/// AUROC, one operating point per alert rate, and F1 variants at the
/// model's native decision threshold.
pub fn metric_report<S: AsRef<str>>(
    ids: &[S],
    scores: &[f64],
    labels: &[Severity],
    alert_rates: &[f64],
    decision_threshold: f64,
) -> Result<MetricReport> {
    let roc = roc_curve(scores, labels)?;
    if ids.len() != scores.len() {
        return Err(Error::LengthMismatch { left: ids.len(), right: scores.len() });
    }
    let mut operating_points = Vec::with_capacity(alert_rates.len());
    for &rate in alert_rates {
        let alert = threshold_for_alert_rate(ids, scores, rate)?;
        let counts = confusion_at_threshold(labels, &alert.flagged)?;
        operating_points.push(OperatingPoint {
            alert_rate: rate,
            threshold: alert.threshold,
            counts,
            rates: confusion_metrics(&counts),
        });
    }
    let mut decision_counts = ConfusionCounts::default();
    for (s, l) in scores.iter().zip(labels) {
        decision_counts.record(*s > decision_threshold, l.is_high());
    }
    Ok(MetricReport {
        n: scores.len(),
        n_high: class_counts(labels).0,
        auroc: roc.auroc,
        roc,
        operating_points,
        decision_threshold,
        decision_counts,
        f1: f1_scores(&decision_counts),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::ToString;
    use proptest::prelude::*;

    const H: Severity = Severity::High;
    const L: Severity = Severity::Low;

    fn pairwise(scores: &[f64], labels: &[Severity]) -> f64 {
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for (i, li) in labels.iter().enumerate() {
            for (j, lj) in labels.iter().enumerate() {
                if li.is_high() && !lj.is_high() {
                    pairs += 1.0;
                    if scores[i] > scores[j] {
                        wins += 1.0;
                    } else if scores[i] == scores[j] {
                        wins += 0.5;
                    }
                }
            }
        }
        wins / pairs
    }

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("r{i:03}")).collect()
    }

    #[test]
    fn auroc_extremes() {
        assert_eq!(auroc(&[0.1, 0.2, 0.8, 0.9], &[L, L, H, H]).unwrap(), 1.0);
        assert_eq!(auroc(&[0.5; 4], &[L, H, L, H]).unwrap(), 0.5);
        assert_eq!(auroc(&[1.0, 2.0], &[H, H]), Err(Error::SingleClass));
        assert!(matches!(auroc(&[1.0], &[H, L]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(auroc(&[f64::NAN, 1.0], &[H, L]), Err(Error::NonFinite { index: 0 })));
    }

    #[test]
    fn roc_curve_shape() {
        let curve = roc_curve(&[0.9, 0.8, 0.8, 0.1], &[H, L, H, L]).unwrap();
        assert_eq!(curve.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(curve.points.last(), Some(&(1.0, 1.0)));
        assert_eq!(curve.thresholds, [0.9, 0.8, 0.1]);
        assert!((curve.trapezoid_area() - curve.auroc).abs() < 1e-12);
    }

    #[test]
    fn alert_rate_counts_match_published_totals() {
        let scores: Vec<f64> = (0..115).map(|i| (i * 37 % 115) as f64).collect();
        let ids = ids(115);
        assert_eq!(threshold_for_alert_rate(&ids, &scores, 0.20).unwrap().k, 23);
        assert_eq!(threshold_for_alert_rate(&ids, &scores, 0.50).unwrap().k, 58);
        assert_eq!(threshold_for_alert_rate(&ids, &scores, 1.0).unwrap().flagged.len(), 115);
        let none = threshold_for_alert_rate(&ids, &scores, 0.0).unwrap();
        assert_eq!((none.k, none.threshold), (0, None));
        assert_eq!(threshold_for_alert_rate::<&str>(&[], &[], 0.2), Err(Error::EmptyScores));
        assert!(threshold_for_alert_rate(&ids, &scores, 1.5).is_err());
    }

    #[test]
    fn alert_ties_break_by_id() {
        let ids = ["b", "a", "c"];
        let t = threshold_for_alert_rate(&ids, &[1.0, 1.0, 0.0], 0.34).unwrap();
        assert_eq!(t.flagged, [1]);
        assert_eq!(t.threshold, Some(1.0));
    }

    #[test]
    fn confusion_extremes() {
        let labels = [H, H, H];
        assert_eq!(confusion_at_threshold(&labels, &[0, 1, 2]).unwrap(), ConfusionCounts::new(3, 0, 0, 0));
        let none = confusion_at_threshold(&[H, L], &[]).unwrap();
        assert_eq!((none.tp, none.fp), (0, 0));
        assert!(confusion_at_threshold(&labels, &[3]).is_err());
    }

    #[test]
    fn constructed_fixture_reproduces_table_counts() {
        // 39 HIGH, 76 LOW; top 23 by score holds 18 HIGH and 5 LOW
        let mut labels = Vec::new();
        let mut scores = Vec::new();
        for i in 0..115 {
            let (label, score) = match i {
                0..=17 => (H, 0.9),
                18..=22 => (L, 0.8),
                23..=43 => (H, 0.4),
                _ => (L, 0.3),
            };
            labels.push(label);
            scores.push(score - i as f64 * 1e-4);
        }
        let ids = ids(115);
        let t = threshold_for_alert_rate(&ids, &scores, 0.2).unwrap();
        let c = confusion_at_threshold(&labels, &t.flagged).unwrap();
        assert_eq!(c, ConfusionCounts::new(18, 5, 21, 71));
    }

    #[test]
    fn rates_undefined_not_zero() {
        let r = confusion_metrics(&ConfusionCounts::new(0, 0, 0, 5));
        assert_eq!(r.sensitivity, None);
        assert_eq!(r.ppv, None);
        assert_eq!(r.specificity, Some(1.0));
        let r = confusion_metrics(&ConfusionCounts::new(7, 0, 0, 7));
        assert_eq!([r.sensitivity, r.specificity, r.ppv, r.npv], [Some(1.0); 4]);
    }

    #[test]
    fn f1_variants() {
        let f = f1_scores(&ConfusionCounts::new(18, 5, 21, 71));
        assert!((f.binary.unwrap() - 36.0 / 62.0).abs() < 1e-15);
        let perfect = f1_scores(&ConfusionCounts::new(4, 0, 0, 6));
        assert_eq!((perfect.binary, perfect.micro, perfect.macro_), (Some(1.0), Some(1.0), Some(1.0)));
        // predicts LOW for everything, positives rare
        let degenerate = f1_scores(&ConfusionCounts::new(0, 0, 10, 90));
        assert_eq!(degenerate.binary, Some(0.0));
        assert!(degenerate.macro_.unwrap() < degenerate.micro.unwrap());
        assert_eq!(f1_scores(&ConfusionCounts::default()).binary, None);
    }

    #[test]
    fn alpha_perfect_agreement() {
        let mut t = RaterTable::new();
        t.insert("a", H, vec![3, 3, 3]).unwrap();
        t.insert("b", L, vec![1, 1]).unwrap();
        t.insert("c", L, vec![0]).unwrap();
        assert_eq!(krippendorff_alpha(&t, AlphaMetric::Nominal).unwrap(), 1.0);
        assert_eq!(krippendorff_alpha(&t, AlphaMetric::Ordinal).unwrap(), 1.0);
    }

    #[test]
    fn alpha_errors_and_validation() {
        let mut t = RaterTable::new();
        t.insert("a", H, vec![3]).unwrap();
        assert_eq!(krippendorff_alpha(&t, AlphaMetric::Nominal), Err(Error::NoPairableValues));
        assert!(t.insert("b", H, vec![]).is_err());
        assert!(t.insert("c", H, vec![5]).is_err());
        assert_eq!(t.insert("a", H, vec![1]), Err(Error::DuplicateId("a".to_string())));
    }

    #[test]
    fn pooled_auroc() {
        let mut t = RaterTable::new();
        t.insert("hi", H, vec![3, 4]).unwrap();
        t.insert("lo", L, vec![0, 2]).unwrap();
        assert_eq!(pooled_rater_auroc(&t).unwrap(), 1.0);
        let mut flat = RaterTable::new();
        flat.insert("hi", H, vec![2, 2]).unwrap();
        flat.insert("lo", L, vec![2]).unwrap();
        assert_eq!(pooled_rater_auroc(&flat).unwrap(), 0.5);
        let mut one = RaterTable::new();
        one.insert("hi", H, vec![2, 2]).unwrap();
        assert_eq!(pooled_rater_auroc(&one), Err(Error::SingleClass));
        // 4 pairs: (3,H) (1,H) (2,L) (1,L) -> wins 1 + 1 + 0 + 0.5 = 2.5 of 4
        let mut four = RaterTable::new();
        four.insert("a", H, vec![3, 1]).unwrap();
        four.insert("b", L, vec![2, 1]).unwrap();
        assert_eq!(pooled_rater_auroc(&four).unwrap(), 2.5 / 4.0);
        assert_eq!(four.n_predictions(), 4);
    }

    #[test]
    fn metric_report_has_requested_points() {
        let scores = [0.9, 0.7, 0.6, 0.2, 0.1];
        let labels = [H, L, H, L, L];
        let r = metric_report(&ids(5), &scores, &labels, &[0.2, 1.0], 0.5).unwrap();
        assert_eq!(r.operating_points.len(), 2);
        assert_eq!(r.operating_points[1].rates.sensitivity, Some(1.0));
        assert_eq!(r.decision_counts, ConfusionCounts::new(2, 1, 0, 2));
    }

    fn scored_labels() -> impl Strategy<Value = (Vec<f64>, Vec<Severity>)> {
        proptest::collection::vec((0u8..6, any::<bool>()), 2..40).prop_map(|v| {
            let mut scores: Vec<f64> = v.iter().map(|(s, _)| f64::from(*s)).collect();
            let mut labels: Vec<Severity> = v.iter().map(|(_, h)| if *h { H } else { L }).collect();
            labels[0] = H;
            labels[1] = L;
            scores[0] += 0.0;
            (scores, labels)
        })
    }

    proptest! {
        #[test]
        fn auroc_matches_pairwise((scores, labels) in scored_labels()) {
            let a = auroc(&scores, &labels).unwrap();
            prop_assert!((a - pairwise(&scores, &labels)).abs() < 1e-12);
            let curve = roc_curve(&scores, &labels).unwrap();
            prop_assert!((curve.trapezoid_area() - a).abs() < 1e-12);
            prop_assert!(curve.points.windows(2).all(|w| w[1].0 >= w[0].0 && w[1].1 >= w[0].1));
        }

        #[test]
        fn monotone_transform_invariance((scores, labels) in scored_labels(), rate in 0.0f64..=1.0) {
            let transformed: Vec<f64> = scores.iter().map(|s| libm::exp(*s) * 3.0 - 1.0).collect();
            prop_assert_eq!(auroc(&scores, &labels).unwrap(), auroc(&transformed, &labels).unwrap());
            let ids = ids(scores.len());
            prop_assert_eq!(
                threshold_for_alert_rate(&ids, &scores, rate).unwrap().flagged,
                threshold_for_alert_rate(&ids, &transformed, rate).unwrap().flagged
            );
        }

        #[test]
        fn flag_count_identity(n in 1usize..500, rate in 0.0f64..=1.0) {
            let scores: Vec<f64> = (0..n).map(|i| (i % 7) as f64).collect();
            let t = threshold_for_alert_rate(&ids(n), &scores, rate).unwrap();
            prop_assert_eq!(t.flagged.len(), libm::floor(rate * n as f64 + 0.5) as usize);
            prop_assert!((t.flagged.len() as f64 / n as f64 - rate).abs() <= 0.5 / n as f64 + 1e-12);
        }

        #[test]
        fn sensitivity_monotone_in_alert_rate((scores, labels) in scored_labels(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let ids = ids(scores.len());
            let at = |r| {
                let t = threshold_for_alert_rate(&ids, &scores, r).unwrap();
                confusion_metrics(&confusion_at_threshold(&labels, &t.flagged).unwrap())
            };
            let (rl, rh) = (at(lo), at(hi));
            prop_assert!(rh.sensitivity.unwrap() >= rl.sensitivity.unwrap());
            prop_assert!(rh.specificity.unwrap() <= rl.specificity.unwrap());
        }

        #[test]
        fn complement_without_ties(raw in proptest::collection::btree_set(-1000i32..1000, 2..30), bits in any::<u32>()) {
            let scores: Vec<f64> = raw.iter().map(|&s| f64::from(s)).collect();
            let mut labels: Vec<Severity> = (0..scores.len()).map(|i| if bits >> (i % 32) & 1 == 1 { H } else { L }).collect();
            labels[0] = H;
            labels[1] = L;
            let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
            prop_assert!((auroc(&neg, &labels).unwrap() - (1.0 - auroc(&scores, &labels).unwrap())).abs() < 1e-12);
        }

        #[test]
        fn alpha_is_one_iff_units_agree(units in proptest::collection::vec(proptest::collection::vec(0u8..=4, 1..5), 1..8)) {
            let mut t = RaterTable::new();
            for (i, u) in units.iter().enumerate() {
                t.insert(format!("u{i}"), L, u.clone()).unwrap();
            }
            let pairable: Vec<_> = units.iter().filter(|u| u.len() >= 2).collect();
            prop_assume!(!pairable.is_empty());
            let agree = pairable.iter().all(|u| u.iter().all(|&v| v == u[0]));
            let alpha = krippendorff_alpha(&t, AlphaMetric::Nominal).unwrap();
            prop_assert_eq!(alpha == 1.0, agree);
        }
    }
}
