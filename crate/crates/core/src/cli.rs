//! The `dishrec` command line: argument parsing, config merging and the
//! six subcommands. [`run`] returns the process exit code.

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::cf::{
    recommend_top_k, Baseline, Eq1Center, ItemItemCf, Method, RatingPredictor, SideAffinity, UserItemCf,
    DEFAULT_NEIGHBORHOOD, DEFAULT_SIDE_WEIGHT,
};
use crate::corpus::{load_restaurants, load_reviews, LexiconSet, Polarity, RestaurantProfile};
use crate::document::ModelDocument;
use crate::evalx::{
    render_table, run_benchmark, synth_corpus, train_test_split, BenchCorpus, BenchmarkConfig, Confusion,
    EvalError, EvalReport, GoldFragment, GoldRating, SplitRounding, SynthConfig, DEFAULT_TRAIN_FRACTION,
};
use crate::fm::{FmConfig, FmRecommender};
use crate::fragmenter::{ItemFragment, ItemLexicon};
use crate::pipeline::{
    catalog, labelled_fragments, process_reviews, rating_matrix, restaurant_of_review, score_fragments,
    GoldLabels, LabelMode, ProcessedReview, DEFAULT_BLEND,
};
use crate::sentiment::{classify_fragment, train_sentiment, ModelChoice, SentimentConfig, SentimentModel};
use crate::sides::{
    build_comention_graph, comention_sets, lda_train, louvain, modularity, LdaConfig, Partition, TOP_WORDS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_TRAINING: i32 = 3;
pub const EXIT_QUERY: i32 = 4;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable naming a config file when `--config` is absent.
pub const CONFIG_ENV: &str = "FIDUCIA_CONFIG";

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Display) -> Self {
        CliError { code: EXIT_INPUT, message: message.to_string() }
    }
    fn training(message: impl Display) -> Self {
        CliError { code: EXIT_TRAINING, message: message.to_string() }
    }
    fn query(message: impl Display) -> Self {
        CliError { code: EXIT_QUERY, message: message.to_string() }
    }
    fn usage(message: impl Display) -> Self {
        CliError { code: EXIT_USAGE, message: message.to_string() }
    }
}

/// Flat key-value config file. Every key is optional; unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub reviews: Option<PathBuf>,
    pub restaurants: Option<PathBuf>,
    pub lexicons: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub sentiment_model: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub model: Option<String>,
    pub labels: Option<String>,
    pub method: Option<String>,
    pub methods: Option<String>,
    pub classifier: Option<String>,
    pub top_k: Option<usize>,
    pub side_weight: Option<f64>,
    pub blend: Option<f64>,
    pub neighborhood: Option<usize>,
    pub eq1_center: Option<String>,
    pub train_fraction: Option<f64>,
    pub split_round: Option<String>,
    pub relevance: Option<f64>,
    pub fm_learning_rate: Option<f64>,
    pub fm_iterations: Option<usize>,
    pub fm_kdim: Option<usize>,
    pub lstm_learning_rate: Option<f64>,
    pub lstm_epochs: Option<usize>,
    pub lda_topics: Option<usize>,
    pub lda_sweeps: Option<usize>,
    pub users: Option<usize>,
    pub n_restaurants: Option<usize>,
    pub items: Option<usize>,
    pub noise: Option<f64>,
    pub reviews_per_user: Option<usize>,
    pub format: Option<String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }
}

#[derive(Debug, Parser)]
#[command(name = "dishrec", version, about = "Item-level review sentiment and dish-to-restaurant recommendation")]
struct Cli {
    /// Flat JSON config file; falls back to $FIDUCIA_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load, normalize and fragment a review corpus into a JSON artifact.
    Ingest(IngestArgs),
    /// Train a fragment sentiment classifier on an 80% split and report F on the rest.
    TrainSentiment(TrainArgs),
    /// Rank restaurants for a user and a food item.
    Recommend(RecommendArgs),
    /// Mine side-dish communities (louvain) or restaurant topics (lda).
    Sides(SidesArgs),
    /// Run the benchmark over every selected recommender.
    Evaluate(EvaluateArgs),
    /// Write a seeded synthetic corpus with gold labels and ratings.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct IngestArgs {
    #[arg(long)]
    reviews: Option<PathBuf>,
    #[arg(long)]
    restaurants: Option<PathBuf>,
    /// Directory with stopwords.txt, emoticons.tsv, slang.tsv and items.tsv.
    #[arg(long)]
    lexicons: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    model: Option<ModelChoice>,
    /// Artifact written by `ingest`.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// `manual` or `threshold:T` with T in {2.0, 2.5, 3.0}.
    #[arg(long)]
    labels: Option<LabelMode>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct RecommendArgs {
    #[arg(long)]
    user: String,
    /// Item id or any of its names.
    #[arg(long)]
    item: String,
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    side_weight: Option<f64>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Sentiment model document; fragments score 0 without one.
    #[arg(long)]
    sentiment_model: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum SidesMethod {
    Louvain,
    Lda,
}

#[derive(Debug, Args)]
struct SidesArgs {
    #[arg(long, value_enum)]
    method: SidesMethod,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    topics: Option<usize>,
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum ReportFormat {
    Json,
    Table,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Comma-separated subset of baseline,user,item,fm.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    /// Corpus directory as written by `synth`; gold files are optional.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    classifier: Option<ModelChoice>,
    #[arg(long)]
    labels: Option<LabelMode>,
    #[arg(long, value_enum)]
    format: Option<ReportFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    users: Option<usize>,
    #[arg(long)]
    restaurants: Option<usize>,
    #[arg(long)]
    items: Option<usize>,
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    reviews_per_user: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

/// The normalized, fragmented corpus written by `ingest`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusArtifact {
    pub seed: u64,
    pub n_reviews: usize,
    pub n_fragments: usize,
    pub items: ItemLexicon,
    pub restaurants: Vec<RestaurantProfile>,
    pub reviews: Vec<ProcessedReview>,
}

impl CorpusArtifact {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }

    pub fn fragments(&self) -> Vec<ItemFragment> {
        self.reviews.iter().flat_map(|r| r.fragments.iter().cloned()).collect()
    }
}

fn parsed<T>(value: &Option<String>, key: &str) -> Result<Option<T>, CliError>
where
    T: FromStr,
    T::Err: Display,
{
    value
        .as_deref()
        .map(|v| v.parse::<T>().map_err(|e| CliError::usage(format!("config key `{key}`: {e}"))))
        .transpose()
}

fn require(flag: Option<PathBuf>, config: &Option<PathBuf>, name: &str) -> Result<PathBuf, CliError> {
    flag.or_else(|| config.clone())
        .ok_or_else(|| CliError::usage(format!("missing --{name} (flag or config key)")))
}

/// Input error prefixed with the offending path.
fn at(path: &Path, e: impl Display) -> CliError {
    CliError::input(format!("{}: {e}", path.display()))
}

fn must_exist(path: &Path) -> Result<(), CliError> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::input(format!("{}: no such file or directory", path.display())))
    }
}

/// Writes via a sibling temp file and a rename so readers never see partial output.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::input(format!("{}: {e}", path.display()));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

fn eval_error(e: EvalError) -> CliError {
    match e {
        EvalError::InvalidConfig(_) => CliError::usage(e),
        EvalError::Training(_) => CliError::training(e),
        _ => CliError::input(e),
    }
}

fn cmd_ingest(a: IngestArgs, cfg: &Config) -> Result<String, CliError> {
    let reviews_path = require(a.reviews, &cfg.reviews, "reviews")?;
    let restaurants_path = require(a.restaurants, &cfg.restaurants, "restaurants")?;
    let lexicon_dir = require(a.lexicons, &cfg.lexicons, "lexicons")?;
    let out = require(a.out, &cfg.out, "out")?;
    let seed = a.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let items_path = lexicon_dir.join("items.tsv");
    for p in [&reviews_path, &restaurants_path, &lexicon_dir, &items_path] {
        must_exist(p)?;
    }

    let reviews = load_reviews(&reviews_path).map_err(|e| at(&reviews_path, e))?;
    let restaurants = load_restaurants(&restaurants_path).map_err(|e| at(&restaurants_path, e))?;
    let lexicons = LexiconSet::load_dir(&lexicon_dir).map_err(|e| at(&lexicon_dir, e))?;
    let items = ItemLexicon::load(&items_path).map_err(|e| at(&items_path, e))?;
    if reviews.is_empty() {
        eprintln!("warning: {} contains no reviews", reviews_path.display());
    }

    let processed = process_reviews(&reviews, &lexicons, &items);
    let artifact = CorpusArtifact {
        seed,
        n_reviews: processed.len(),
        n_fragments: processed.iter().map(|r| r.fragments.len()).sum(),
        items,
        restaurants,
        reviews: processed,
    };
    let json = serde_json::to_string_pretty(&artifact).expect("artifact is plain data") + "\n";
    write_atomic(&out, json.as_bytes())?;
    Ok(format!(
        "ingested reviews={} restaurants={} fragments={} seed={seed} out={}\n",
        artifact.n_reviews,
        artifact.restaurants.len(),
        artifact.n_fragments,
        out.display()
    ))
}

fn cmd_train_sentiment(a: TrainArgs, cfg: &Config) -> Result<String, CliError> {
    let corpus = require(a.corpus, &cfg.corpus, "corpus")?;
    let out = require(a.out, &cfg.out, "out")?;
    let choice = match a.model {
        Some(m) => m,
        None => parsed(&cfg.model, "model")?.ok_or_else(|| CliError::usage("missing --model"))?,
    };
    let labels = match a.labels {
        Some(l) => l,
        None => parsed(&cfg.labels, "labels")?.unwrap_or_default(),
    };
    let seed = a.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let fraction = cfg.train_fraction.unwrap_or(DEFAULT_TRAIN_FRACTION);
    let rounding = parsed(&cfg.split_round, "split_round")?.unwrap_or(SplitRounding::Floor);
    must_exist(&corpus)?;
    let artifact = CorpusArtifact::load(&corpus)?;

    let (train, test) = train_test_split(&artifact.reviews, fraction, seed, rounding).map_err(eval_error)?;
    let labelled = labelled_fragments(&train, labels, None);
    let tokens: Vec<Vec<String>> = labelled.iter().map(|(_, f, _)| f.tokens.clone()).collect();
    let gold: Vec<Polarity> = labelled.iter().map(|(_, _, l)| *l).collect();
    let mut config = SentimentConfig::default();
    config.lstm.seed = seed;
    if let Some(lr) = cfg.lstm_learning_rate {
        config.lstm.learning_rate = lr;
    }
    if let Some(epochs) = cfg.lstm_epochs {
        config.lstm.epochs = epochs;
    }
    let model = train_sentiment(choice, &tokens, &gold, &config).map_err(CliError::training)?;

    let held = labelled_fragments(&test, labels, None);
    let predicted: Vec<Polarity> = held.iter().map(|(_, f, _)| classify_fragment(&f.tokens, &model).polarity()).collect();
    let truth: Vec<Polarity> = held.iter().map(|(_, _, l)| *l).collect();
    let f_score = if held.is_empty() {
        "n/a".to_string()
    } else {
        format!("{:.6}", Confusion::from_pairs(&predicted, &truth).map_err(eval_error)?.f1())
    };

    let mut doc = ModelDocument::new(model);
    doc.seed = Some(seed);
    write_atomic(&out, (doc.to_json() + "\n").as_bytes())?;
    Ok(format!(
        "model={} labels={labels} seed={seed} train_fragments={} test_fragments={} f_score={f_score}\n",
        choice.as_str(),
        labelled.len(),
        held.len()
    ))
}

/// Louvain communities of the co-mention graph; empty when nothing is mentioned.
fn communities(fragments: &[ItemFragment]) -> (crate::sides::WeightedGraph, Option<Partition>) {
    let graph = build_comention_graph(&comention_sets(fragments));
    let partition = louvain(&graph).ok();
    (graph, partition)
}

fn cmd_recommend(a: RecommendArgs, cfg: &Config) -> Result<String, CliError> {
    let corpus = require(a.corpus, &cfg.corpus, "corpus")?;
    let sentiment_path = a.sentiment_model.or_else(|| cfg.sentiment_model.clone());
    let method = match a.method {
        Some(m) => m,
        None => parsed(&cfg.method, "method")?.unwrap_or(Method::UserItem),
    };
    let top_k = a.top_k.or(cfg.top_k).unwrap_or(3);
    let side_weight = a.side_weight.or(cfg.side_weight).unwrap_or(DEFAULT_SIDE_WEIGHT);
    let seed = a.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let blend = cfg.blend.unwrap_or(DEFAULT_BLEND);
    let neighborhood = cfg.neighborhood.or(DEFAULT_NEIGHBORHOOD);
    let center = parsed(&cfg.eq1_center, "eq1_center")?.unwrap_or(Eq1Center::User);
    let out = a.out.or_else(|| cfg.out.clone());
    must_exist(&corpus)?;
    if let Some(p) = &sentiment_path {
        must_exist(p)?;
    }

    let artifact = CorpusArtifact::load(&corpus)?;
    let model = match &sentiment_path {
        Some(p) => Some(
            ModelDocument::<SentimentModel>::load(p)
                .map_err(|e| CliError::input(format!("{}: {e}", p.display())))?
                .model,
        ),
        None => None,
    };
    let item = artifact
        .items
        .resolve(&a.item)
        .ok_or_else(|| CliError::query(format!("unknown item `{}`", a.item)))?;
    let scored = score_fragments(&artifact.reviews, model.as_ref());
    let matrix = rating_matrix(&scored, blend).map_err(CliError::input)?;
    if matrix.user_idx(&a.user).is_none() {
        return Err(CliError::query(format!("unknown user `{}`", a.user)));
    }
    let (_, partition) = communities(&artifact.fragments());
    let groups = partition.map(|p| p.assignment().clone()).unwrap_or_default();
    let sides = SideAffinity::new(&groups, &scored);
    let catalog = catalog(&scored);

    let fm_config = fm_config(cfg, seed);
    let baseline;
    let user_item;
    let item_item;
    let fm;
    let predictor: &dyn RatingPredictor = match method {
        Method::Baseline => {
            baseline = Baseline::fit(&scored);
            &baseline
        }
        Method::UserItem => {
            user_item = UserItemCf::new(&matrix, neighborhood, center);
            &user_item
        }
        Method::ItemItem => {
            item_item = ItemItemCf::new(&matrix, neighborhood);
            &item_item
        }
        Method::Fm => {
            fm = FmRecommender::fit(&matrix, Some(groups.clone()), &fm_config).map_err(CliError::training)?;
            &fm
        }
    };
    let recs = recommend_top_k(predictor, &catalog, &sides, &a.user, item, top_k, side_weight)
        .map_err(CliError::query)?;

    let name = artifact.items.name(item).unwrap_or_default();
    let mut text = format!(
        "# user={} item={item}:{name} method={} top_k={top_k} side_weight={side_weight} seed={seed}\nrank\trestaurant\tscore\tpredicted\tside\n",
        a.user,
        method.as_str()
    );
    for (rank, r) in recs.iter().enumerate() {
        text.push_str(&format!(
            "{}\t{}\t{:.6}\t{:.6}\t{:.6}\n",
            rank + 1,
            r.restaurant_id,
            r.score,
            r.predicted_rating,
            r.side_score
        ));
    }
    if let Some(out) = out {
        write_atomic(&out, text.as_bytes())?;
    }
    Ok(text)
}

fn fm_config(cfg: &Config, seed: u64) -> FmConfig {
    let d = FmConfig::default();
    FmConfig {
        learning_rate: cfg.fm_learning_rate.unwrap_or(d.learning_rate),
        iterations: cfg.fm_iterations.unwrap_or(d.iterations),
        kdim: cfg.fm_kdim.unwrap_or(d.kdim),
        seed,
        ..d
    }
}

fn cmd_sides(a: SidesArgs, cfg: &Config) -> Result<String, CliError> {
    let corpus = require(a.corpus, &cfg.corpus, "corpus")?;
    let out = require(a.out, &cfg.out, "out")?;
    let seed = a.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    must_exist(&corpus)?;
    let artifact = CorpusArtifact::load(&corpus)?;
    let fragments = artifact.fragments();

    let (text, summary) = match a.method {
        SidesMethod::Louvain => {
            let (graph, partition) = communities(&fragments);
            let partition = partition.ok_or_else(|| CliError::training("no items mentioned; graph is empty"))?;
            let q = modularity(&graph, &partition);
            let header = format!(
                "# method=louvain seed={seed} communities={} modularity={q:.6}\n",
                partition.n_communities()
            );
            (header + &partition.export_tsv(), format!("communities={}", partition.n_communities()))
        }
        SidesMethod::Lda => {
            let d = LdaConfig::default();
            let config = LdaConfig {
                k: a.topics.or(cfg.lda_topics).unwrap_or(d.k),
                sweeps: a.sweeps.or(cfg.lda_sweeps).unwrap_or(d.sweeps),
                seed,
                ..d
            };
            let docs: Vec<Vec<String>> =
                restaurant_documents_of(&fragments, &artifact).into_values().collect();
            let model = lda_train(&docs, &config).map_err(CliError::training)?;
            let header = format!("# method=lda seed={seed} topics={} sweeps={}\n", config.k, config.sweeps);
            (header + &model.export_tsv(TOP_WORDS), format!("topics={}", config.k))
        }
    };
    write_atomic(&out, text.as_bytes())?;
    Ok(format!("sides {summary} seed={seed} out={}\n", out.display()))
}

fn restaurant_documents_of(
    fragments: &[ItemFragment],
    artifact: &CorpusArtifact,
) -> std::collections::BTreeMap<String, Vec<String>> {
    crate::sides::restaurant_documents(fragments, &restaurant_of_review(&artifact.reviews), &artifact.items)
}

#[derive(Debug, Serialize)]
struct EvaluateDocument<'a> {
    seed: u64,
    classifier: &'a str,
    labels: String,
    reports: &'a [EvalReport],
}

fn cmd_evaluate(a: EvaluateArgs, cfg: &Config) -> Result<String, CliError> {
    let data = require(a.data, &cfg.data, "data")?;
    let out = require(a.out, &cfg.out, "out")?;
    let d = BenchmarkConfig::default();
    let seed = a.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let methods = match a.methods {
        Some(m) => m,
        None => match &cfg.methods {
            Some(list) => list
                .split(',')
                .map(|m| m.trim().parse::<Method>().map_err(|e| CliError::usage(format!("config key `methods`: {e}"))))
                .collect::<Result<_, _>>()?,
            None => d.methods.clone(),
        },
    };
    let classifier = match a.classifier {
        Some(c) => c,
        None => parsed(&cfg.classifier, "classifier")?.unwrap_or(d.classifier),
    };
    let labels = match a.labels {
        Some(l) => l,
        None => parsed(&cfg.labels, "labels")?.unwrap_or(d.labels),
    };
    let format = match a.format {
        Some(f) => f,
        None => match cfg.format.as_deref() {
            None | Some("json") => ReportFormat::Json,
            Some("table") => ReportFormat::Table,
            Some(other) => return Err(CliError::usage(format!("config key `format`: unknown `{other}`"))),
        },
    };
    let mut sentiment = d.sentiment;
    sentiment.lstm.seed = seed;
    let config = BenchmarkConfig {
        seed,
        train_fraction: cfg.train_fraction.unwrap_or(d.train_fraction),
        split_round: parsed(&cfg.split_round, "split_round")?.unwrap_or(d.split_round),
        methods,
        classifier,
        sentiment,
        labels,
        blend: cfg.blend.unwrap_or(d.blend),
        neighborhood: cfg.neighborhood.or(d.neighborhood),
        eq1_center: parsed(&cfg.eq1_center, "eq1_center")?.unwrap_or(d.eq1_center),
        fm: fm_config(cfg, seed),
        top_k: cfg.top_k.unwrap_or(d.top_k),
        relevance: cfg.relevance.unwrap_or(d.relevance),
        side_weight: cfg.side_weight.unwrap_or(d.side_weight),
    };

    let reviews_path = data.join("reviews.jsonl");
    let lexicon_dir = data.join("lexicons");
    let items_path = lexicon_dir.join("items.tsv");
    for p in [&reviews_path, &lexicon_dir, &items_path] {
        must_exist(p)?;
    }
    let reviews = load_reviews(&reviews_path).map_err(|e| at(&reviews_path, e))?;
    let lexicons = LexiconSet::load_dir(&lexicon_dir).map_err(|e| at(&lexicon_dir, e))?;
    let items = ItemLexicon::load(&items_path).map_err(|e| at(&items_path, e))?;
    let gold_fragments_path = data.join("gold_fragments.jsonl");
    let gold_labels: Option<GoldLabels> = if gold_fragments_path.exists() {
        let gold: Vec<GoldFragment> = crate::evalx::read_jsonl(&gold_fragments_path).map_err(CliError::input)?;
        Some(gold.into_iter().map(|g| ((g.review_id, g.item_id), g.label)).collect())
    } else {
        None
    };
    let gold_ratings_path = data.join("gold_ratings.jsonl");
    let gold_ratings: Option<Vec<GoldRating>> = if gold_ratings_path.exists() {
        Some(crate::evalx::read_jsonl(&gold_ratings_path).map_err(CliError::input)?)
    } else {
        None
    };

    let corpus = BenchCorpus {
        reviews: &reviews,
        lexicons: &lexicons,
        items: &items,
        gold_labels: gold_labels.as_ref(),
        gold_ratings: gold_ratings.as_deref(),
    };
    let reports = run_benchmark(&corpus, &config).map_err(eval_error)?;
    let table = render_table(&reports);
    let bytes = match format {
        ReportFormat::Json => {
            let doc = EvaluateDocument {
                seed,
                classifier: classifier.as_str(),
                labels: labels.to_string(),
                reports: &reports,
            };
            serde_json::to_string_pretty(&doc).expect("reports are plain data") + "\n"
        }
        ReportFormat::Table => table.clone(),
    };
    write_atomic(&out, bytes.as_bytes())?;
    Ok(table)
}

fn cmd_synth(a: SynthArgs, cfg: &Config) -> Result<String, CliError> {
    let out = require(a.out, &cfg.out, "out")?;
    let d = SynthConfig::default();
    let config = SynthConfig {
        seed: a.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
        n_users: a.users.or(cfg.users).unwrap_or(d.n_users),
        n_restaurants: a.restaurants.or(cfg.n_restaurants).unwrap_or(d.n_restaurants),
        n_items: a.items.or(cfg.items).unwrap_or(d.n_items),
        noise: a.noise.or(cfg.noise).unwrap_or(d.noise),
        reviews_per_user: a.reviews_per_user.or(cfg.reviews_per_user).unwrap_or(d.reviews_per_user),
    };
    let corpus = synth_corpus(&config).map_err(eval_error)?;
    for (name, bytes) in corpus.files() {
        write_atomic(&out.join(name), &bytes)?;
    }
    let lex = out.join("lexicons");
    corpus
        .lexicons
        .write_dir(&lex)
        .map_err(|e| CliError::input(format!("{}: {e}", lex.display())))?;
    Ok(format!(
        "synth seed={} users={} restaurants={} items={} noise={} reviews={} fragments={} out={}\n",
        config.seed,
        config.n_users,
        config.n_restaurants,
        config.n_items,
        config.noise,
        corpus.reviews.len(),
        corpus.gold_fragments.len(),
        out.display()
    ))
}

/// Parses `args` (program name first), runs the command and returns its
/// stdout text or an error carrying the exit code.
pub fn execute<I, T>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            CliError { code: EXIT_OK, message: e.to_string() }
        }
        _ => CliError::usage(e),
    })?;
    let config_path = cli
        .config
        .or_else(|| std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
    let config = match config_path {
        Some(p) => Config::load(&p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Ingest(a) => cmd_ingest(a, &config),
        Command::TrainSentiment(a) => cmd_train_sentiment(a, &config),
        Command::Recommend(a) => cmd_recommend(a, &config),
        Command::Sides(a) => cmd_sides(a, &config),
        Command::Evaluate(a) => cmd_evaluate(a, &config),
        Command::Synth(a) => cmd_synth(a, &config),
    }
}

/// Runs the CLI, printing output and diagnostics; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match execute(args) {
        Ok(text) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) if e.code == EXIT_OK => {
            print!("{}", e.message);
            EXIT_OK
        }
        Err(e) => {
            let msg = e.message.trim_end();
            eprintln!("error: {}", msg.strip_prefix("error: ").unwrap_or(msg));
            e.code
        }
    }
}
