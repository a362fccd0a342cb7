//! Command-line front end for the pulsemine pipeline.
//!
//! One subcommand per stage: ingest raw documents, detect entity mentions,
//! train representations and classifiers, classify stored documents, and
//! render reports. Every run is a pure function of its input files, flags
//! and seed: no clock, no network. Diagnostics go to stderr, data to files
//! or stdout.
//!
//! Exit codes: 0 success, 1 usage error (bad flags or flag values),
//! 2 data or config error (unreadable and malformed files, unknown
//! entities, impossible training requests).

use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand};

use pulsemine::analytics::{
    self,
    render::{render_report, Format, Report},
    Bucket,
};
use pulsemine::docstore::{parse_timestamp, DocStore, Document, Heuristics};
use pulsemine::entitykb::{annotate_document, filter_relevant, KnowledgeBase, SurfaceFormMatcher};
use pulsemine::sentiment::{
    self, classifier, classify_document, features::FeatureExtractor, ClassifyConfig, Method,
    SentimentAnnotation,
};
use pulsemine::textnorm;
use pulsemine::wordrep::{brown, skipgram};

#[derive(Parser)]
#[command(name = "pulsemine", version, about = "Opinion mining over stored social-media documents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read documents from a JSONL file into a store, keeping matches.
    Ingest(IngestArgs),
    /// Detect and disambiguate entity mentions in stored documents.
    Detect(DetectArgs),
    /// Learn hierarchical word clusters from a text corpus.
    TrainBrown(TrainBrownArgs),
    /// Learn dense word embeddings from a text corpus.
    TrainEmbeddings(TrainEmbeddingsArgs),
    /// Fit the sentiment classifier on a labeled dataset.
    Train(TrainArgs),
    /// Classify stored documents relevant to one entity.
    Classify(ClassifyArgs),
    /// Render aggregate reports from a store and its annotations.
    #[command(subcommand)]
    Report(ReportCommand),
}

#[derive(Args)]
struct IngestArgs {
    /// JSONL file of candidate documents.
    #[arg(long)]
    source: PathBuf,
    /// JSON file with search/user/geo acceptance clauses.
    #[arg(long)]
    heuristics: PathBuf,
    /// Store directory (created if missing).
    #[arg(long)]
    store: PathBuf,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    store: PathBuf,
    /// Knowledge base JSON file.
    #[arg(long)]
    kb: PathBuf,
    /// Window start, YYYY-MM-DDThh:mm:ssZ (default: everything stored).
    #[arg(long)]
    from: Option<String>,
    /// Window end, inclusive.
    #[arg(long)]
    to: Option<String>,
    /// Output file for mention JSONL (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainBrownArgs {
    /// Plain-text corpus, one document per line.
    #[arg(long)]
    corpus: PathBuf,
    /// Number of clusters to stop at when reading the hierarchy.
    #[arg(long)]
    clusters: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainEmbeddingsArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 25)]
    dim: usize,
    #[arg(long, default_value_t = 5)]
    window: usize,
    #[arg(long, default_value_t = 5)]
    negatives: usize,
    #[arg(long, default_value_t = 5)]
    epochs: usize,
    #[arg(long, default_value_t = 0.025)]
    learning_rate: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Labeled TSV dataset: label<TAB>text per line.
    #[arg(long)]
    data: PathBuf,
    /// full-batch or sgd.
    #[arg(long, default_value = "full-batch")]
    mode: String,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    learning_rate: f64,
    #[arg(long, default_value_t = 0.0)]
    l2: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Brown cluster file adding path-prefix features.
    #[arg(long)]
    brown: Option<PathBuf>,
    /// Comma-separated prefix lengths for Brown features.
    #[arg(long)]
    prefix_lengths: Option<String>,
    /// Embedding file adding mean-vector features.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    /// lexicon or classifier.
    #[arg(long)]
    method: String,
    /// Sentiment lexicon TSV (lexicon method).
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Trained model file (classifier method).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Brown cluster file; required when the model was trained with one.
    #[arg(long)]
    brown: Option<PathBuf>,
    /// Embedding file; required when the model was trained with one.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    kb: PathBuf,
    /// Entity whose relevant documents get classified.
    #[arg(long)]
    entity: String,
    /// Annotation JSONL output (default: <store>/annotations.jsonl).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Relevant-document counts per calendar bucket.
    Volume(VolumeArgs),
    /// Polarity percentages over one window.
    Shares(SharesArgs),
    /// Share movement between two windows.
    Delta(DeltaArgs),
    /// Per-term mention counts with polarity breakdown.
    Aspects(AspectsArgs),
}

#[derive(Args)]
struct VolumeArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    kb: PathBuf,
    #[arg(long)]
    entity: String,
    /// hour or day.
    #[arg(long, default_value = "day")]
    bucket: String,
    #[arg(long)]
    from: Option<String>,
    #[arg(long)]
    to: Option<String>,
    /// csv, json or svg.
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SharesArgs {
    #[arg(long)]
    store: PathBuf,
    /// Annotation JSONL produced by classify.
    #[arg(long)]
    annotations: PathBuf,
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DeltaArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    annotations: PathBuf,
    #[arg(long)]
    before_from: String,
    #[arg(long)]
    before_to: String,
    #[arg(long)]
    after_from: String,
    #[arg(long)]
    after_to: String,
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AspectsArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    kb: PathBuf,
    #[arg(long)]
    entity: String,
    #[arg(long)]
    annotations: PathBuf,
    /// Comma-separated aspect terms, e.g. "preço,app,motorista".
    #[arg(long)]
    aspects: String,
    #[arg(long)]
    from: Option<String>,
    #[arg(long)]
    to: Option<String>,
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Data(anyhow::Error),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Data(err) => write!(f, "{err:#}"),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn data(err: impl Into<anyhow::Error>) -> CliError {
    CliError::Data(err.into())
}

type CliResult = Result<(), CliError>;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap exits 2 by default; the contract reserves 2 for data
            // errors, so usage problems are remapped to 1 here.
            let code = if err.use_stderr() { 1 } else { 0 };
            err.print().expect("diagnostics writable");
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.code());
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Ingest(args) => run_ingest(args),
        Command::Detect(args) => run_detect(args),
        Command::TrainBrown(args) => run_train_brown(args),
        Command::TrainEmbeddings(args) => run_train_embeddings(args),
        Command::Train(args) => run_train(args),
        Command::Classify(args) => run_classify(args),
        Command::Report(ReportCommand::Volume(args)) => run_volume(args),
        Command::Report(ReportCommand::Shares(args)) => run_shares(args),
        Command::Report(ReportCommand::Delta(args)) => run_delta(args),
        Command::Report(ReportCommand::Aspects(args)) => run_aspects(args),
    }
}

fn run_ingest(args: IngestArgs) -> CliResult {
    let heuristics = Heuristics::load(&args.heuristics).map_err(data)?;
    let mut store = DocStore::open(&args.store).map_err(data)?;
    let file = File::open(&args.source)
        .map_err(|e| data(anyhow::anyhow!("cannot open {}: {e}", args.source.display())))?;
    let stats = store.ingest(BufReader::new(file), &heuristics).map_err(data)?;
    log::info!(
        "ingest: read {}, accepted {}, duplicates {}, rejected {}",
        stats.read,
        stats.accepted,
        stats.duplicates,
        stats.rejected
    );
    Ok(())
}

fn run_detect(args: DetectArgs) -> CliResult {
    let store = DocStore::open(&args.store).map_err(data)?;
    let kb = KnowledgeBase::load(&args.kb).map_err(data)?;
    let matcher = SurfaceFormMatcher::build(&kb);
    let docs = scan_window(&store, &args.from, &args.to)?;

    let mut out = Vec::new();
    let mut mention_count = 0usize;
    for doc in &docs {
        for mention in annotate_document(doc, &kb, &matcher) {
            mention_count += 1;
            let line = serde_json::json!({
                "doc_id": mention.doc_id,
                "start": mention.start,
                "end": mention.end,
                "surface": mention.surface,
                "candidates": mention.candidates,
                "resolved": mention.resolved,
                "confidence": mention.confidence(),
            });
            out.extend_from_slice(line.to_string().as_bytes());
            out.push(b'\n');
        }
    }
    log::info!("detect: {} mentions across {} documents", mention_count, docs.len());
    write_output(args.out.as_deref(), &out)
}

fn run_train_brown(args: TrainBrownArgs) -> CliResult {
    let corpus = load_corpus(&args.corpus)?;
    let hierarchy = brown::brown_cluster(&corpus, args.clusters).map_err(data)?;
    brown::save(&hierarchy, &args.out).map_err(data)?;
    log::info!(
        "train-brown: {} words, {} merges, wrote {}",
        hierarchy.vocab_len(),
        hierarchy.merge_log().len(),
        args.out.display()
    );
    Ok(())
}

fn run_train_embeddings(args: TrainEmbeddingsArgs) -> CliResult {
    let corpus = load_corpus(&args.corpus)?;
    let config = skipgram::SkipgramConfig {
        dim: args.dim,
        window: args.window,
        negatives: args.negatives,
        epochs: args.epochs,
        learning_rate: args.learning_rate,
        seed: args.seed,
    };
    let table = skipgram::train_skipgram(&corpus, &config).map_err(data)?;
    skipgram::save(&table, &args.out).map_err(data)?;
    log::info!(
        "train-embeddings: {} vectors of dim {}, wrote {}",
        table.len(),
        table.dim(),
        args.out.display()
    );
    Ok(())
}

fn run_train(args: TrainArgs) -> CliResult {
    let mode = classifier::TrainMode::parse(&args.mode)
        .ok_or_else(|| usage(format!("--mode must be full-batch or sgd, got {:?}", args.mode)))?;
    if args.prefix_lengths.is_some() && args.brown.is_none() {
        return Err(usage("--prefix-lengths requires --brown"));
    }
    let brown_features = match &args.brown {
        Some(path) => {
            let hierarchy = brown::load(path).map_err(data)?;
            let lengths = match &args.prefix_lengths {
                Some(raw) => parse_prefix_lengths(raw)?,
                None => vec![4, 6, 10, 20],
            };
            Some((hierarchy, lengths))
        }
        None => None,
    };
    let embeddings = match &args.embeddings {
        Some(path) => Some(skipgram::load(path).map_err(data)?),
        None => None,
    };

    let dataset = sentiment::load_dataset(&args.data).map_err(data)?;
    let extractor = FeatureExtractor::from_dataset(
        dataset.iter().map(|(tokens, _)| tokens.as_slice()),
        brown_features,
        embeddings,
    );
    let config = classifier::TrainConfig {
        mode,
        epochs: args.epochs,
        learning_rate: args.learning_rate,
        l2: args.l2,
        seed: args.seed,
    };
    let (model, report) = classifier::train(&dataset, &extractor, &config).map_err(data)?;
    classifier::save(&model, &args.out).map_err(data)?;
    log::info!(
        "train: {} examples, {} features, first epoch loss {:.6}, wrote {}",
        dataset.len(),
        model.weights().len(),
        report.epoch_losses.first().copied().unwrap_or(f64::NAN),
        args.out.display()
    );
    Ok(())
}

fn run_classify(args: ClassifyArgs) -> CliResult {
    let store = DocStore::open(&args.store).map_err(data)?;
    let kb = KnowledgeBase::load(&args.kb).map_err(data)?;
    let matcher = SurfaceFormMatcher::build(&kb);

    // Loaded pieces must outlive the borrow-holding config.
    let lexicon;
    let model;
    let extractor;
    let method;
    let mut config = ClassifyConfig::default();
    match args.method.as_str() {
        "lexicon" => {
            let path = args
                .lexicon
                .as_ref()
                .ok_or_else(|| usage("--method lexicon requires --lexicon"))?;
            lexicon = sentiment::lexicon::Lexicon::load(path).map_err(data)?;
            config.lexicon = Some(&lexicon);
            method = Method::Lexicon;
        }
        "classifier" => {
            let path = args
                .model
                .as_ref()
                .ok_or_else(|| usage("--method classifier requires --model"))?;
            model = classifier::load(path).map_err(data)?;
            extractor = rebuild_extractor(&model, &args)?;
            config.model = Some(&model);
            config.extractor = Some(&extractor);
            method = Method::Classifier;
        }
        other => return Err(usage(format!("--method must be lexicon or classifier, got {other:?}"))),
    }

    let mut out = Vec::new();
    let mut relevant = 0usize;
    for doc in store.scan_all() {
        if !filter_relevant(doc, &args.entity, &kb, &matcher).map_err(data)? {
            continue;
        }
        relevant += 1;
        let annotation = classify_document(doc, method, &config).map_err(data)?;
        out.extend_from_slice(serde_json::to_string(&annotation).map_err(data)?.as_bytes());
        out.push(b'\n');
    }
    let out_path = args
        .out
        .clone()
        .unwrap_or_else(|| args.store.join("annotations.jsonl"));
    fs::write(&out_path, out)
        .map_err(|e| data(anyhow::anyhow!("cannot write {}: {e}", out_path.display())))?;
    log::info!(
        "classify: {} of {} documents relevant to {:?}, wrote {}",
        relevant,
        store.len(),
        args.entity,
        out_path.display()
    );
    Ok(())
}

/// The model file records which feature families it was trained with; the
/// matching companion files must be supplied to classify.
fn rebuild_extractor(
    model: &classifier::LinearModel,
    args: &ClassifyArgs,
) -> Result<FeatureExtractor, CliError> {
    let meta = model.meta();
    let brown_features = if meta.prefix_lengths.is_empty() {
        None
    } else {
        let path = args.brown.as_ref().ok_or_else(|| {
            usage("model was trained with Brown features: supply --brown")
        })?;
        let hierarchy = brown::load(path).map_err(data)?;
        Some((hierarchy, meta.prefix_lengths.clone()))
    };
    let embeddings = if meta.emb_dim == 0 {
        None
    } else {
        let path = args.embeddings.as_ref().ok_or_else(|| {
            usage("model was trained with embedding features: supply --embeddings")
        })?;
        let table = skipgram::load(path).map_err(data)?;
        if table.dim() != meta.emb_dim {
            return Err(data(anyhow::anyhow!(
                "embedding dim {} does not match the model's {}",
                table.dim(),
                meta.emb_dim
            )));
        }
        Some(table)
    };
    Ok(FeatureExtractor::new(model.bow_vocab(), brown_features, embeddings))
}

fn run_volume(args: VolumeArgs) -> CliResult {
    let bucket = Bucket::parse(&args.bucket)
        .ok_or_else(|| usage(format!("--bucket must be hour or day, got {:?}", args.bucket)))?;
    let format = parse_format(&args.format)?;
    let store = DocStore::open(&args.store).map_err(data)?;
    let kb = KnowledgeBase::load(&args.kb).map_err(data)?;
    let matcher = SurfaceFormMatcher::build(&kb);
    let docs = scan_window(&store, &args.from, &args.to)?;

    let mut flags = Vec::with_capacity(docs.len());
    for doc in &docs {
        flags.push(filter_relevant(doc, &args.entity, &kb, &matcher).map_err(data)?);
    }
    let series = analytics::volume_series(
        docs.iter().copied().zip(flags),
        &args.entity,
        bucket,
    );
    render_to(&Report::Volume(series), format, args.out.as_deref())
}

fn run_shares(args: SharesArgs) -> CliResult {
    let format = parse_format(&args.format)?;
    let store = DocStore::open(&args.store).map_err(data)?;
    let annotations = load_annotations(&args.annotations)?;
    let (from, to) = parse_window(&args.from, &args.to)?;
    let windowed = window_annotations(&store, &annotations, from, to)?;
    let share = analytics::polarity_share(&windowed, from, to).map_err(analytics_err)?;
    render_to(&Report::Shares(share), format, args.out.as_deref())
}

fn run_delta(args: DeltaArgs) -> CliResult {
    let format = parse_format(&args.format)?;
    let store = DocStore::open(&args.store).map_err(data)?;
    let annotations = load_annotations(&args.annotations)?;

    let (b_from, b_to) = parse_window(&args.before_from, &args.before_to)?;
    let (a_from, a_to) = parse_window(&args.after_from, &args.after_to)?;
    let before = analytics::polarity_share(
        &window_annotations(&store, &annotations, b_from, b_to)?,
        b_from,
        b_to,
    )
    .map_err(analytics_err)?;
    let after = analytics::polarity_share(
        &window_annotations(&store, &annotations, a_from, a_to)?,
        a_from,
        a_to,
    )
    .map_err(analytics_err)?;
    let delta = analytics::share_delta(&before, &after);
    render_to(&Report::Delta(delta), format, args.out.as_deref())
}

fn run_aspects(args: AspectsArgs) -> CliResult {
    let format = parse_format(&args.format)?;
    let store = DocStore::open(&args.store).map_err(data)?;
    let kb = KnowledgeBase::load(&args.kb).map_err(data)?;
    let matcher = SurfaceFormMatcher::build(&kb);
    let annotations = load_annotations(&args.annotations)?;
    let docs = scan_window(&store, &args.from, &args.to)?;

    let terms: Vec<Vec<String>> = args
        .aspects
        .split(',')
        .map(textnorm::normalize_surfaces)
        .collect();
    if terms.iter().any(|t| t.is_empty()) {
        return Err(usage("--aspects has a term that normalizes to nothing"));
    }
    if terms.is_empty() {
        return Err(usage("--aspects needs at least one term"));
    }

    let mut flags = Vec::with_capacity(docs.len());
    for doc in &docs {
        flags.push(filter_relevant(doc, &args.entity, &kb, &matcher).map_err(data)?);
    }
    let report = analytics::aspect_report(
        docs.iter().copied().zip(flags),
        &annotations,
        &terms,
    );
    render_to(&Report::Aspects(report), format, args.out.as_deref())
}

fn parse_format(s: &str) -> Result<Format, CliError> {
    Format::parse(s).ok_or_else(|| usage(format!("--format must be csv, json or svg, got {s:?}")))
}

fn parse_prefix_lengths(raw: &str) -> Result<Vec<usize>, CliError> {
    raw.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| usage(format!("--prefix-lengths has a bad entry {part:?}")))
        })
        .collect()
}

fn parse_instant(s: &str) -> Result<DateTime<Utc>, CliError> {
    parse_timestamp(s).map_err(|_| usage(format!("bad timestamp {s:?}, expected YYYY-MM-DDThh:mm:ssZ")))
}

fn parse_window(from: &str, to: &str) -> Result<(DateTime<Utc>, DateTime<Utc>), CliError> {
    let from = parse_instant(from)?;
    let to = parse_instant(to)?;
    if from > to {
        return Err(usage(format!(
            "window start {from} is after its end {to}"
        )));
    }
    Ok((from, to))
}

/// Documents within the optional flag window, oldest first. Without flags
/// the whole store qualifies; no clock is consulted.
fn scan_window<'a>(
    store: &'a DocStore,
    from: &Option<String>,
    to: &Option<String>,
) -> Result<Vec<&'a Document>, CliError> {
    match (from, to) {
        (None, None) => Ok(store.scan_all()),
        (Some(f), Some(t)) => {
            let (from, to) = parse_window(f, t)?;
            store.scan(from, to).map_err(data)
        }
        _ => Err(usage("--from and --to must be given together")),
    }
}

fn load_annotations(path: &Path) -> Result<Vec<SentimentAnnotation>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| data(anyhow::anyhow!("cannot read {}: {e}", path.display())))?;
    let mut annotations = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let ann: SentimentAnnotation = serde_json::from_str(line).map_err(|e| {
            data(anyhow::anyhow!(
                "{} line {}: bad annotation: {e}",
                path.display(),
                idx + 1
            ))
        })?;
        annotations.push(ann);
    }
    Ok(annotations)
}

/// Keeps annotations whose document falls inside the window. Annotations
/// must reference stored documents; a dangling one is data corruption.
fn window_annotations(
    store: &DocStore,
    annotations: &[SentimentAnnotation],
    from: DateTime<Utc>,
    to: DateTime<Utc>,
) -> Result<Vec<SentimentAnnotation>, CliError> {
    let mut kept = Vec::new();
    for ann in annotations {
        let doc = store.get(&ann.doc_id).ok_or_else(|| {
            data(anyhow::anyhow!(
                "annotation references document {:?} missing from the store",
                ann.doc_id
            ))
        })?;
        if doc.timestamp >= from && doc.timestamp <= to {
            kept.push(ann.clone());
        }
    }
    Ok(kept)
}

fn analytics_err(err: analytics::AnalyticsError) -> CliError {
    match &err {
        // Asking for a rendering the report type does not have is a flag
        // mistake; an empty window depends on the data.
        analytics::AnalyticsError::UnsupportedFormat { .. }
        | analytics::AnalyticsError::BadWindow { .. } => usage(err.to_string()),
        analytics::AnalyticsError::EmptyWindow { .. } => data(err),
    }
}

fn render_to(report: &Report, format: Format, out: Option<&Path>) -> CliResult {
    let bytes = render_report(report, format).map_err(analytics_err)?;
    write_output(out, &bytes)
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> CliResult {
    match out {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| data(anyhow::anyhow!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(data)
        }
    }
}

fn load_corpus(path: &Path) -> Result<Vec<Vec<String>>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| data(anyhow::anyhow!("cannot read {}: {e}", path.display())))?;
    Ok(text
        .lines()
        .map(textnorm::normalize_surfaces)
        .filter(|tokens| !tokens.is_empty())
        .collect())
}
