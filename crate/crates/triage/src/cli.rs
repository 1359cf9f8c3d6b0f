//! The `triage` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use triage_core::corpus::{corpus_stats, split_corpus, LabeledReport, Scale, Severity, Source, SplitSpec};
use triage_core::embed::project_fallback_embeddings;
use triage_core::eval::{flag_count, metric_report, rank_order, DEFAULT_ALERT_RATES};
use triage_core::features::{english_stop_words, fit_tfidf};
use triage_core::head::{select_best_restart, train_head_restarts, transfer_train_restarts, TrainConfig};
use triage_core::svm::{tune_c, Gamma, KernelSpec, SvmConfig, DEFAULT_C_GRID};
use triage_core::textprep::{AcronymDictionary, Preprocessor, TokenSequence, DEFAULT_TOKEN_CAP};

use crate::config::apply_config;
use crate::error::{Context, Error, Result};
use crate::formats::embedv1::{read_embeddings, write_embeddings};
use crate::formats::head::{parse_head, to_head_string};
use crate::formats::report::{
    grid_log_string, metric_report_string, read_scores, roc_csv_string, train_log_string, triage_csv_string,
};
use crate::formats::svm::{parse_svm, to_svm_string};
use crate::formats::{magic_of, read_text, write_atomic};
use crate::ingest::{read_corpus, read_input, read_labeled, write_corpus, write_labeled, InputFormat};
use crate::pipeline::{featurize, fit_features, samples, HeadArtifact, SvmPipeline};
use crate::repro::{repro_table_string, run_repro, ReproConfig};

#[derive(Debug, Parser)]
#[command(name = "triage", version, about = "Incident report severity triage")]
pub struct Cli {
    /// Flat key=value file supplying values for flags not given
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a JSONL or CSV export into the canonical corpus file
    Ingest(IngestArgs),
    /// Seeded train/validation/test split
    Split(SplitArgs),
    /// Corpus size, report length and severity balance
    Stats(StatsArgs),
    /// Expand acronyms and lowercase; write id<TAB>text for the exporter
    Preprocess(PreprocessArgs),
    /// Random-projection TF-IDF embeddings in embedv1 format
    EmbedFallback(EmbedFallbackArgs),
    /// TF-IDF + SVM with C tuned on validation F1
    TrainSvm(TrainSvmArgs),
    /// Sigmoid head on embeddings
    TrainHead(TrainHeadArgs),
    /// Head trained on a source institution, then continued on a target
    Transfer(TransferArgs),
    /// AUROC, alert-rate operating points and F1 on a labeled test set
    Evaluate(EvaluateArgs),
    /// Rank reports by score and flag the top fraction
    Triage(TriageArgs),
    /// Two-institution synthetic transfer experiment
    ReproSynthetic(ReproArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScaleArg {
    Inst,
    Safron,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KernelArg {
    Rbf,
    Linear,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub format: FormatArg,
    /// Force the severity scale instead of inferring it per record
    #[arg(long, value_enum)]
    pub scale: Option<ScaleArg>,
    /// Source tag for records that carry none
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 0.7)]
    pub train: f64,
    #[arg(long, default_value_t = 0.15)]
    pub val: f64,
    #[arg(long, default_value_t = 0.15)]
    pub test: f64,
    #[arg(long, env = "TRIAGE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Keep HIGH prevalence equal across the three parts
    #[arg(long)]
    pub stratified: bool,
    /// Receives train.jsonl, val.jsonl and test.jsonl
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub corpus: PathBuf,
}

#[derive(Debug, Args)]
pub struct TextArgs {
    /// Acronym dictionary TSV; defaults to the bundled glossary
    #[arg(long)]
    pub dictionary: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TOKEN_CAP)]
    pub token_cap: usize,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub text: TextArgs,
    #[arg(long)]
    pub export_text: PathBuf,
}

#[derive(Debug, Args)]
pub struct EmbedFallbackArgs {
    /// Corpus files the TF-IDF vocabulary is fit on
    #[arg(long, required = true)]
    pub fit: Vec<PathBuf>,
    /// Corpus files to embed
    #[arg(long, required = true)]
    pub corpus: Vec<PathBuf>,
    #[arg(long, default_value_t = 256)]
    pub dim: usize,
    #[arg(long, default_value_t = triage_core::features::DEFAULT_MIN_DF)]
    pub min_df: usize,
    #[arg(long, env = "TRIAGE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub text: TextArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainSvmArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub val: PathBuf,
    /// Candidate C values
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_C_GRID)]
    pub c: Vec<f64>,
    #[arg(long, value_enum, default_value = "rbf")]
    pub kernel: KernelArg,
    /// RBF width: `scale` or a positive number
    #[arg(long, default_value = "scale")]
    pub gamma: String,
    #[arg(long, default_value_t = triage_core::features::DEFAULT_MIN_DF)]
    pub min_df: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_passes: usize,
    #[arg(long, env = "TRIAGE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub text: TextArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Grid table: C, validation F1, selection
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HeadArgs {
    #[arg(long, default_value_t = 32)]
    pub batch: usize,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 10)]
    pub patience: usize,
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    #[arg(long, env = "TRIAGE_SEED", default_value_t = 0)]
    pub seed: u64,
}

impl HeadArgs {
    fn config(&self, lr: f64) -> TrainConfig {
        TrainConfig {
            learning_rate: lr,
            batch_size: self.batch,
            max_epochs: self.epochs,
            patience: self.patience,
            restarts: self.restarts,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainHeadArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub val: PathBuf,
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long, default_value_t = TrainConfig::SOURCE_LR)]
    pub lr: f64,
    #[command(flatten)]
    pub head: HeadArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Per-epoch losses and F1 for every restart
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    #[arg(long)]
    pub source_train: PathBuf,
    #[arg(long)]
    pub source_val: PathBuf,
    #[arg(long)]
    pub target_train: PathBuf,
    #[arg(long)]
    pub target_val: PathBuf,
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long, default_value_t = TrainConfig::SOURCE_LR)]
    pub source_lr: f64,
    #[arg(long, default_value_t = TrainConfig::TARGET_LR)]
    pub target_lr: f64,
    #[command(flatten)]
    pub head: HeadArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// svmv1 or headv1 model file
    #[arg(long, requires = "test", conflicts_with = "scores")]
    pub model: Option<PathBuf>,
    /// Labeled corpus to score with --model
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Required for head models
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Precomputed scores: CSV with header id,score,label
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_ALERT_RATES)]
    pub alert_rate: Vec<f64>,
    /// Score above which the model's own rule flags a report
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub decision_threshold: f64,
    /// Report file; printed to stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub roc_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TriageArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Corpus file; labels are ignored
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ALERT_RATES[0])]
    pub alert_rate: f64,
    /// CSV file; printed to stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproArgs {
    #[arg(long, default_value_t = 10)]
    pub seeds: usize,
    /// First seed; run i uses seed + i
    #[arg(long, env = "TRIAGE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub vocab_shift: f64,
    #[arg(long, default_value_t = 50)]
    pub target_train: usize,
    #[arg(long, default_value_t = 2000)]
    pub n_source: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run(args: Vec<OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let args = match apply_config(args, &Cli::command()) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    1
                }
            };
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Ingest(a) => cmd_ingest(a, out),
        Command::Split(a) => cmd_split(a, out),
        Command::Stats(a) => cmd_stats(a, out),
        Command::Preprocess(a) => cmd_preprocess(a, out),
        Command::EmbedFallback(a) => cmd_embed_fallback(a, out),
        Command::TrainSvm(a) => cmd_train_svm(a, out),
        Command::TrainHead(a) => cmd_train_head(a, out),
        Command::Transfer(a) => cmd_transfer(a, out),
        Command::Evaluate(a) => cmd_evaluate(a, out),
        Command::Triage(a) => cmd_triage(a, out),
        Command::ReproSynthetic(a) => cmd_repro(a, out),
    }
}

fn say(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| Error::io(Path::new("<stdout>"), e))
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => say(out, text),
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if (0.0..=1.0).contains(&rate) {
        Ok(())
    } else {
        Err(Error::Usage(format!("alert rate {rate} is outside [0, 1]")))
    }
}

fn preprocessor(args: &TextArgs) -> Result<Preprocessor> {
    let dict = match &args.dictionary {
        None => AcronymDictionary::default_glossary(),
        Some(p) => AcronymDictionary::from_tsv(&read_text(p)?).context(format!("dictionary {}", p.display()))?,
    };
    for key in dict.closure_violations() {
        log::warn!("dictionary expansion of `{key}` contains another abbreviation");
    }
    Preprocessor::new(dict, args.token_cap).map_err(|e| Error::Usage(e.to_string()))
}

fn cmd_ingest(a: IngestArgs, out: &mut dyn Write) -> Result<()> {
    let format = match a.format {
        FormatArg::Jsonl => InputFormat::Jsonl,
        FormatArg::Csv => InputFormat::Csv,
    };
    let scale = a.scale.map(|s| match s {
        ScaleArg::Inst => Scale::Inst,
        ScaleArg::Safron => Scale::Safron,
    });
    let entries = read_input(&a.input, format, scale, a.source.as_deref().map(Source::parse))?;
    write_corpus(&a.out, &entries)?;
    let labeled = entries.iter().filter(|e| e.label.is_some()).count();
    say(out, &format!("ingested {} reports ({labeled} labeled)\n", entries.len()))
}

fn cmd_split(a: SplitArgs, out: &mut dyn Write) -> Result<()> {
    let spec = SplitSpec::new(a.train, a.val, a.test, a.seed)
        .map_err(|e| Error::Usage(e.to_string()))?
        .stratified(a.stratified);
    let corpus = read_labeled(&a.corpus)?;
    let split = split_corpus(&corpus, &spec).context(format!("splitting {}", a.corpus.display()))?;
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
    for (name, part) in [("train", &split.train), ("val", &split.val), ("test", &split.test)] {
        write_labeled(&a.out_dir.join(format!("{name}.jsonl")), part)?;
    }
    say(out, &format!("train {} val {} test {}\n", split.train.len(), split.val.len(), split.test.len()))
}

fn cmd_stats(a: StatsArgs, out: &mut dyn Write) -> Result<()> {
    let corpus = read_labeled(&a.corpus)?;
    let s = corpus_stats(&corpus).context(format!("statistics for {}", a.corpus.display()))?;
    say(
        out,
        &format!(
            "n_reports {}\nmedian_words {}\nstd_words {}\nhigh_severity_frac {}\n",
            s.n_reports, s.median_words, s.std_words, s.high_severity_frac
        ),
    )
}

fn cmd_preprocess(a: PreprocessArgs, out: &mut dyn Write) -> Result<()> {
    let pre = preprocessor(&a.text)?;
    let corpus = read_corpus(&a.corpus)?;
    let mut text = String::new();
    for e in &corpus {
        if e.report.id.contains(['\t', '\n', '\r']) {
            return Err(Error::Usage(format!("report id {:?} cannot be exported", e.report.id)));
        }
        let clean = pre.clean_text(&e.report.text).replace(['\t', '\n', '\r'], " ");
        text.push_str(&e.report.id);
        text.push('\t');
        text.push_str(&clean);
        text.push('\n');
    }
    write_atomic(&a.export_text, text.as_bytes())?;
    say(out, &format!("exported {} reports\n", corpus.len()))
}

fn load_docs(pre: &Preprocessor, paths: &[PathBuf]) -> Result<Vec<TokenSequence>> {
    let mut docs = Vec::new();
    for p in paths {
        docs.extend(read_corpus(p)?.iter().map(|e| pre.apply(&e.report)));
    }
    Ok(docs)
}

fn cmd_embed_fallback(a: EmbedFallbackArgs, out: &mut dyn Write) -> Result<()> {
    let pre = preprocessor(&a.text)?;
    let fit_docs = load_docs(&pre, &a.fit)?;
    let model = fit_tfidf(&fit_docs, a.min_df, &english_stop_words()).context("fitting embedding vocabulary")?;
    let docs = load_docs(&pre, &a.corpus)?;
    let emb = project_fallback_embeddings(&model, &docs, a.dim, a.seed).context("projecting embeddings")?;
    write_embeddings(&emb, &a.out)?;
    say(out, &format!("embedded {} reports into {} dimensions (vocabulary {})\n", emb.len(), emb.dim(), model.dim()))
}

fn cmd_train_svm(a: TrainSvmArgs, out: &mut dyn Write) -> Result<()> {
    let pre = preprocessor(&a.text)?;
    let kernel = match a.kernel {
        KernelArg::Linear => KernelSpec::Linear,
        KernelArg::Rbf if a.gamma == "scale" => KernelSpec::Rbf(Gamma::Scale),
        KernelArg::Rbf => KernelSpec::Rbf(Gamma::Value(
            a.gamma.parse().map_err(|_| Error::Usage(format!("--gamma must be `scale` or a number, got `{}`", a.gamma)))?,
        )),
    };
    let base = SvmConfig { c: 1.0, kernel, tol: a.tol, max_passes: a.max_passes, seed: a.seed, class_weights: None };
    base.validate().map_err(|e| Error::Usage(e.to_string()))?;
    let train = read_labeled(&a.train)?;
    let val = read_labeled(&a.val)?;
    let tfidf = fit_features(&pre, &train, a.min_df)?;
    let tuning = tune_c(&featurize(&pre, &tfidf, &train), &featurize(&pre, &tfidf, &val), &a.c, &base)
        .context("training SVM")?;
    if let Some(log) = &a.log {
        write_atomic(log, grid_log_string(&tuning.table, tuning.best_c).as_bytes())?;
    }
    let n_sv = tuning.best_model.support_vectors.len();
    let pipeline = SvmPipeline { preprocessor: pre, tfidf, svm: tuning.best_model };
    write_atomic(&a.out, to_svm_string(&pipeline).as_bytes())?;
    say(out, &format!("selected C {} with {n_sv} support vectors\n", tuning.best_c))
}

fn provenance(embeddings: &Path, what: &str) -> String {
    let name = embeddings.file_name().map_or_else(|| embeddings.display().to_string(), |n| n.to_string_lossy().into_owned());
    format!("{what} embeddings={name}")
}

fn cmd_train_head(a: TrainHeadArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = a.head.config(a.lr);
    cfg.validate().map_err(|e| Error::Usage(e.to_string()))?;
    let emb = read_embeddings(&a.embeddings)?;
    let train = samples(&emb, &read_labeled(&a.train)?)?;
    let val = samples(&emb, &read_labeled(&a.val)?)?;
    let runs = train_head_restarts(&train, &val, &cfg, None).context("training head")?;
    let (best, model) = select_best_restart(&runs, &val).context("selecting restart")?;
    let artifact = HeadArtifact {
        model: model.clone(),
        provenance: provenance(&a.embeddings, &format!("train-head lr={}", a.lr)),
        seed: cfg.seed,
    };
    write_atomic(&a.out, to_head_string(&artifact).as_bytes())?;
    if let Some(log) = &a.log {
        let logs: Vec<_> = runs.iter().map(|(_, l)| l.clone()).collect();
        let selected: Vec<bool> = (0..logs.len()).map(|i| i == best).collect();
        write_atomic(log, train_log_string(&logs, &selected).as_bytes())?;
    }
    say(out, &format!("selected restart {best} of {}\n", runs.len()))
}

fn cmd_transfer(a: TransferArgs, out: &mut dyn Write) -> Result<()> {
    let (src_cfg, tgt_cfg) = (a.head.config(a.source_lr), a.head.config(a.target_lr));
    src_cfg.validate().map_err(|e| Error::Usage(e.to_string()))?;
    tgt_cfg.validate().map_err(|e| Error::Usage(e.to_string()))?;
    let emb = read_embeddings(&a.embeddings)?;
    let load = |p: &Path| -> Result<_> { samples(&emb, &read_labeled(p)?) };
    let (st, sv) = (load(&a.source_train)?, load(&a.source_val)?);
    let (tt, tv) = (load(&a.target_train)?, load(&a.target_val)?);
    let runs = transfer_train_restarts(&st, &sv, &tt, &tv, &src_cfg, &tgt_cfg).context("transfer training")?;
    let artifact = HeadArtifact {
        model: runs.model.clone(),
        provenance: provenance(&a.embeddings, &format!("transfer source-lr={} target-lr={}", a.source_lr, a.target_lr)),
        seed: src_cfg.seed,
    };
    write_atomic(&a.out, to_head_string(&artifact).as_bytes())?;
    if let Some(log) = &a.log {
        let mut logs = runs.source_logs.clone();
        logs.extend(runs.target_logs.iter().cloned());
        let selected: Vec<bool> = (0..runs.source_logs.len())
            .map(|i| i == runs.source_best)
            .chain((0..runs.target_logs.len()).map(|i| i == runs.target_best))
            .collect();
        write_atomic(log, train_log_string(&logs, &selected).as_bytes())?;
    }
    say(out, &format!("source restart {} then target restart {}\n", runs.source_best, runs.target_best))
}

/// A loaded model ready to score reports by id and text.
enum Scorer {
    Svm(SvmPipeline),
    Head(HeadArtifact, triage_core::embed::EmbeddingMatrix),
}

impl Scorer {
    fn load(model: &Path, embeddings: Option<&Path>) -> Result<Scorer> {
        let text = read_text(model)?;
        match magic_of(&text) {
            crate::formats::svm::MAGIC => Ok(Scorer::Svm(parse_svm(&text).map_err(|e| Error::format(model, e))?)),
            crate::formats::head::MAGIC => {
                let head = parse_head(&text).map_err(|e| Error::format(model, e))?;
                let path = embeddings.ok_or_else(|| Error::Usage("head models need --embeddings".into()))?;
                Ok(Scorer::Head(head, read_embeddings(path)?))
            }
            other => Err(Error::format(
                model,
                crate::error::FormatError::BadMagic { line: 1, expected: "svmv1 or headv1", found: other.to_string() },
            )),
        }
    }

    fn score(&self, report: &triage_core::corpus::Report) -> Result<f64> {
        match self {
            Scorer::Svm(p) => p.score(report),
            Scorer::Head(h, emb) => h.score(&report.id, emb),
        }
    }
}

fn cmd_evaluate(a: EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    for &r in &a.alert_rate {
        check_rate(r)?;
    }
    let (ids, scores, labels): (Vec<String>, Vec<f64>, Vec<Severity>) = match (&a.model, &a.test, &a.scores) {
        (Some(model), Some(test), None) => {
            let scorer = Scorer::load(model, a.embeddings.as_deref())?;
            let reports = read_labeled(test)?;
            let scores = reports.iter().map(|r| scorer.score(&r.report)).collect::<Result<Vec<_>>>()?;
            (
                reports.iter().map(|r| r.id().to_string()).collect(),
                scores,
                reports.iter().map(LabeledReport::severity).collect(),
            )
        }
        (None, None, Some(path)) => {
            let rows = read_scores(path)?;
            let mut labels = Vec::with_capacity(rows.len());
            for r in &rows {
                labels.push(r.label.ok_or_else(|| {
                    Error::format(
                        path,
                        crate::error::FormatError::Malformed { line: 0, message: format!("report {} has no label", r.id) },
                    )
                })?);
            }
            (rows.iter().map(|r| r.id.clone()).collect(), rows.iter().map(|r| r.score).collect(), labels)
        }
        _ => return Err(Error::Usage("evaluate needs --model with --test, or --scores".into())),
    };
    let report = metric_report(&ids, &scores, &labels, &a.alert_rate, a.decision_threshold).context("evaluation")?;
    if let Some(path) = &a.roc_csv {
        write_atomic(path, roc_csv_string(&report.roc).as_bytes())?;
    }
    emit(a.out.as_deref(), &metric_report_string(&report), out)
}

fn cmd_triage(a: TriageArgs, out: &mut dyn Write) -> Result<()> {
    check_rate(a.alert_rate)?;
    let entries = read_corpus(&a.input)?;
    let csv = if entries.is_empty() {
        String::new()
    } else {
        let scorer = Scorer::load(&a.model, a.embeddings.as_deref())?;
        let scores = entries.iter().map(|e| scorer.score(&e.report)).collect::<Result<Vec<_>>>()?;
        let ids: Vec<&str> = entries.iter().map(|e| e.report.id.as_str()).collect();
        let k = flag_count(a.alert_rate, entries.len());
        let rows: Vec<(String, f64, bool)> = rank_order(&ids, &scores)
            .into_iter()
            .enumerate()
            .map(|(rank, i)| (ids[i].to_string(), scores[i], rank < k))
            .collect();
        triage_csv_string(&rows)?
    };
    emit(a.out.as_deref(), &csv, out)
}

fn cmd_repro(a: ReproArgs, out: &mut dyn Write) -> Result<()> {
    if !(0.0..=1.0).contains(&a.vocab_shift) {
        return Err(Error::Usage(format!("--vocab-shift {} is outside [0, 1]", a.vocab_shift)));
    }
    if a.seeds == 0 {
        return Err(Error::Usage("--seeds must be at least 1".into()));
    }
    let cfg = ReproConfig {
        seeds: a.seeds,
        base_seed: a.seed,
        vocab_shift: a.vocab_shift,
        target_train: a.target_train,
        n_source: a.n_source,
        ..ReproConfig::default()
    };
    let report = run_repro(&cfg)?;
    emit(a.out.as_deref(), &repro_table_string(&report), out)
}
