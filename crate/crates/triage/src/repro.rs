//! Two-institution synthetic experiment: an SVM and a head trained on the
//! large source institution, a head trained only on the small shifted
//! target institution, and a head trained on the source then continued on
//! the target. Every arm is scored by AUROC on both test sets.

use std::fmt::Write as _;

use triage_core::corpus::{
    generate_synthetic_corpus, split_corpus, Institution, LabeledReport, Severity, Split, SplitSpec, SyntheticSpec,
};
use triage_core::embed::project_fallback_embeddings;
use triage_core::eval::auroc;
use triage_core::features::fit_tfidf;
use triage_core::head::{select_best_restart, train_head_restarts, transfer_train_restarts, HeadModel, TrainConfig};
use triage_core::svm::{tune_c, SvmConfig, DEFAULT_C_GRID};

use crate::error::{Context, Result};
use crate::pipeline::{default_preprocessor, featurize, fit_features, samples, tokens};

#[derive(Debug, Clone, PartialEq)]
pub struct ReproConfig {
    pub seeds: usize,
    pub base_seed: u64,
    pub n_source: usize,
    pub target_train: usize,
    pub target_val: usize,
    pub target_test: usize,
    pub vocab_shift: f64,
    pub prevalence: f64,
    pub label_noise: f64,
    pub svm_min_df: usize,
    pub embed_min_df: usize,
    pub embed_dim: usize,
    pub c_grid: Vec<f64>,
    pub svm: SvmConfig,
    /// Used for the source stage and for training from scratch.
    pub head_source: TrainConfig,
    /// Used when continuing from the source head.
    pub head_target: TrainConfig,
}

impl Default for ReproConfig {
    fn default() -> ReproConfig {
        ReproConfig {
            seeds: 10,
            base_seed: 0,
            n_source: 2000,
            target_train: 50,
            target_val: 50,
            target_test: 300,
            vocab_shift: 0.5,
            prevalence: 0.2,
            label_noise: 0.05,
            svm_min_df: 10,
            embed_min_df: 2,
            embed_dim: 256,
            c_grid: DEFAULT_C_GRID.to_vec(),
            svm: SvmConfig::default(),
            head_source: TrainConfig { learning_rate: 1e-2, ..TrainConfig::default() },
            head_target: TrainConfig { learning_rate: 1e-3, ..TrainConfig::default() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Arm {
    SvmSource,
    HeadSource,
    HeadTargetOnly,
    HeadTransfer,
}

impl Arm {
    pub const ALL: [Arm; 4] = [Arm::SvmSource, Arm::HeadSource, Arm::HeadTargetOnly, Arm::HeadTransfer];

    pub fn as_str(self) -> &'static str {
        match self {
            Arm::SvmSource => "svm-source",
            Arm::HeadSource => "head-source",
            Arm::HeadTargetOnly => "head-target-only",
            Arm::HeadTransfer => "head-transfer",
        }
    }
}

/// AUROC of one arm on the source (A) and target (B) test sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmScore {
    pub arm: Arm,
    pub source_test: f64,
    pub target_test: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedResult {
    pub seed: u64,
    pub arms: Vec<ArmScore>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReproReport {
    pub config: ReproConfig,
    pub runs: Vec<SeedResult>,
}

impl ReproReport {
    /// Mean (source-test, target-test) AUROC of an arm over seeds.
    pub fn mean(&self, arm: Arm) -> (f64, f64) {
        let n = self.runs.len() as f64;
        self.runs.iter().fold((0.0, 0.0), |(a, b), run| {
            let s = run.arms.iter().find(|s| s.arm == arm).expect("every arm is scored");
            (a + s.source_test / n, b + s.target_test / n)
        })
    }
}

fn labels(reports: &[LabeledReport]) -> Vec<Severity> {
    reports.iter().map(LabeledReport::severity).collect()
}

fn target_split(cfg: &ReproConfig, seed: u64) -> Result<Split> {
    let n = cfg.target_train + cfg.target_val + cfg.target_test;
    let spec = SyntheticSpec {
        n_reports: n,
        prevalence: cfg.prevalence,
        vocab_shift: cfg.vocab_shift,
        label_noise: cfg.label_noise,
        seed,
        ..SyntheticSpec::default()
    };
    let corpus = generate_synthetic_corpus(&spec, Institution::B).context("generating target corpus")?;
    let nf = n as f64;
    let split = SplitSpec::new(
        cfg.target_train as f64 / nf,
        cfg.target_val as f64 / nf,
        cfg.target_test as f64 / nf,
        seed,
    )
    .context("target split")?
    .stratified(true);
    split_corpus(&corpus, &split).context("splitting target corpus")
}

fn source_split(cfg: &ReproConfig, seed: u64) -> Result<Split> {
    let spec = SyntheticSpec {
        n_reports: cfg.n_source,
        prevalence: cfg.prevalence,
        vocab_shift: cfg.vocab_shift,
        label_noise: cfg.label_noise,
        seed,
        ..SyntheticSpec::default()
    };
    let corpus = generate_synthetic_corpus(&spec, Institution::A).context("generating source corpus")?;
    let split = SplitSpec::new(0.7, 0.15, 0.15, seed).context("source split")?.stratified(true);
    split_corpus(&corpus, &split).context("splitting source corpus")
}

fn head_auroc(model: &HeadModel, test: &[(Vec<f64>, Severity)]) -> Result<f64> {
    let scores = test.iter().map(|(x, _)| model.logit(x)).collect::<Result<Vec<_>, _>>().context("scoring")?;
    let labels: Vec<Severity> = test.iter().map(|(_, l)| *l).collect();
    auroc(&scores, &labels).context("AUROC")
}

pub fn run_seed(cfg: &ReproConfig, seed: u64) -> Result<SeedResult> {
    let a = source_split(cfg, seed)?;
    let b = target_split(cfg, seed)?;
    let pre = default_preprocessor();

    // SVM on source TF-IDF
    let tfidf = fit_features(&pre, &a.train, cfg.svm_min_df)?;
    let svm_base = SvmConfig { seed, ..cfg.svm.clone() };
    let tuned = tune_c(
        &featurize(&pre, &tfidf, &a.train),
        &featurize(&pre, &tfidf, &a.val),
        &cfg.c_grid,
        &svm_base,
    )
    .context("tuning SVM")?;
    let svm_auroc = |reports: &[LabeledReport]| -> Result<f64> {
        let scores = featurize(&pre, &tfidf, reports)
            .iter()
            .map(|(x, _)| tuned.best_model.decision_score(x))
            .collect::<Result<Vec<_>, _>>()
            .context("scoring")?;
        auroc(&scores, &labels(reports)).context("AUROC")
    };
    let svm_score = ArmScore { arm: Arm::SvmSource, source_test: svm_auroc(&a.test)?, target_test: svm_auroc(&b.test)? };

    // fallback embeddings fit on both training sets
    let mut fit_docs = tokens(&pre, &a.train);
    fit_docs.extend(tokens(&pre, &b.train));
    let embed_tfidf = fit_tfidf(&fit_docs, cfg.embed_min_df, &triage_core::features::english_stop_words())
        .context("fitting embedding vocabulary")?;
    let mut all_docs = Vec::new();
    for part in [&a.train, &a.val, &a.test, &b.train, &b.val, &b.test] {
        all_docs.extend(tokens(&pre, part));
    }
    let emb = project_fallback_embeddings(&embed_tfidf, &all_docs, cfg.embed_dim, seed).context("embedding")?;
    let [a_train, a_val, a_test, b_train, b_val, b_test] =
        [&a.train, &a.val, &a.test, &b.train, &b.val, &b.test].map(|part| samples(&emb, part));
    let (a_train, a_val, a_test) = (a_train?, a_val?, a_test?);
    let (b_train, b_val, b_test) = (b_train?, b_val?, b_test?);

    let src_cfg = TrainConfig { seed, ..cfg.head_source.clone() };
    let tgt_cfg = TrainConfig { seed, ..cfg.head_target.clone() };

    let source_runs = train_head_restarts(&a_train, &a_val, &src_cfg, None).context("training source head")?;
    let (_, source_head) = select_best_restart(&source_runs, &a_val).context("selecting source head")?;
    let scratch_runs = train_head_restarts(&b_train, &b_val, &src_cfg, None).context("training target-only head")?;
    let (_, scratch_head) = select_best_restart(&scratch_runs, &b_val).context("selecting target-only head")?;
    let transfer = transfer_train_restarts(&a_train, &a_val, &b_train, &b_val, &src_cfg, &tgt_cfg)
        .context("training transfer head")?;

    let mut arms = vec![svm_score];
    for (arm, model) in [
        (Arm::HeadSource, source_head),
        (Arm::HeadTargetOnly, scratch_head),
        (Arm::HeadTransfer, &transfer.model),
    ] {
        arms.push(ArmScore { arm, source_test: head_auroc(model, &a_test)?, target_test: head_auroc(model, &b_test)? });
    }
    Ok(SeedResult { seed, arms })
}

/// Runs seeds `base_seed, base_seed + 1, ...`.
pub fn run_repro(cfg: &ReproConfig) -> Result<ReproReport> {
    let runs = (0..cfg.seeds as u64)
        .map(|i| run_seed(cfg, cfg.base_seed.wrapping_add(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReproReport { config: cfg.clone(), runs })
}

/// Per-seed rows followed by the mean over seeds for each arm.
pub fn repro_table_string(report: &ReproReport) -> String {
    let mut out = String::new();
    let c = &report.config;
    writeln!(
        out,
        "# seeds={} base_seed={} vocab_shift={} target_train={} n_source={}",
        c.seeds, c.base_seed, c.vocab_shift, c.target_train, c.n_source
    )
    .unwrap();
    writeln!(out, "seed\tarm\tauroc_source_test\tauroc_target_test").unwrap();
    for run in &report.runs {
        for s in &run.arms {
            writeln!(out, "{}\t{}\t{:.6}\t{:.6}", run.seed, s.arm.as_str(), s.source_test, s.target_test).unwrap();
        }
    }
    for arm in Arm::ALL {
        let (a, b) = report.mean(arm);
        writeln!(out, "mean\t{}\t{:.6}\t{:.6}", arm.as_str(), a, b).unwrap();
    }
    out
}
