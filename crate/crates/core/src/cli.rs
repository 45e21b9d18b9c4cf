//! Command-line front end. [`run`] parses arguments, validates every input
//! path before doing any work, and returns the process exit status.

use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::corpus::{
    build_phrase_vocab, mine_phrases, read_corpus, segment_corpus, tokenize_line, NGramCounts, PhraseTable, Vocabulary,
    DEFAULT_MAX_PHRASE_LEN, DEFAULT_MAX_VOCAB, DEFAULT_MIN_COUNT, DEFAULT_PMI_THRESHOLD, DEFAULT_STOPWORDS,
};
use crate::crf::CrfTrainConfig;
use crate::embedder::{eval_analogy, train, AnalogyReport, EmbeddingModel, TrainConfig, DEFAULT_ANALOGY_RESTRICT};
use crate::error::{Error, Result};
use crate::lexicons::{LexiconSet, DEFAULT_NEG_RATE};
use crate::ner::{
    grid_search, read_conll, score_spans, write_tagged, ClusterTable, Document, FeatureConfig, GridConfig, NerModel,
    NerTrainConfig, Resources, DEFAULT_BAG_RADIUS, DEFAULT_NEIGHBOR_RADIUS,
};
use crate::util;

#[derive(Debug, Parser)]
#[command(
    name = "lexemb",
    version,
    about = "Lexicon-infused phrase embeddings and a stacked CRF named-entity tagger",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count unigrams (and known phrases) and write a vocabulary file.
    BuildVocab(BuildVocabArgs),
    /// Mine bigram and trigram phrases by PMI.
    MinePhrases(MinePhrasesArgs),
    /// Train skip-gram phrase embeddings, optionally lexicon-infused.
    TrainEmbeddings(TrainEmbeddingsArgs),
    /// Score embeddings on analogy questions.
    EvalAnalogy(EvalAnalogyArgs),
    /// Train the CRF named-entity tagger.
    TrainNer(TrainNerArgs),
    /// Tag a CoNLL file with a trained model.
    Tag(TagArgs),
    /// Compare predicted and gold CoNLL files by span F1.
    EvalNer(EvalNerArgs),
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// Tokenized corpus: one sentence per line, whitespace-separated.
    #[arg(long)]
    corpus: PathBuf,
    /// Keep token case (corpus text is lowercased by default).
    #[arg(long)]
    keep_case: bool,
}

#[derive(Debug, Args)]
struct BuildVocabArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Phrase table from mine-phrases; phrase occurrences are counted too.
    #[arg(long)]
    phrases: Option<PathBuf>,
    /// Keep at most this many vocabulary entries.
    #[arg(long, default_value_t = DEFAULT_MAX_VOCAB)]
    max_size: usize,
    /// Drop entries seen fewer times.
    #[arg(long, default_value_t = DEFAULT_MIN_COUNT)]
    min_count: u64,
    /// Output vocabulary file (`key<TAB>count` lines).
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct MinePhrasesArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Keep bigrams whose PMI score exceeds this value.
    #[arg(long, default_value_t = DEFAULT_PMI_THRESHOLD)]
    threshold: f64,
    /// Count subtracted from each bigram before scoring.
    #[arg(long, default_value_t = 0.0)]
    discount: f64,
    /// Stopword file, one per line (a built-in English list otherwise).
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Titles added as phrases regardless of score, one per line.
    #[arg(long)]
    titles: Option<PathBuf>,
    /// Output phrase table, one `_`-joined key per line.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct TrainEmbeddingsArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Phrase table from mine-phrases used to segment the corpus.
    #[arg(long)]
    phrases: Option<PathBuf>,
    /// Vocabulary file; built from the corpus when omitted.
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Keep at most this many vocabulary entries.
    #[arg(long, default_value_t = DEFAULT_MAX_VOCAB)]
    max_size: usize,
    /// Drop entries seen fewer times.
    #[arg(long, default_value_t = DEFAULT_MIN_COUNT)]
    min_count: u64,
    /// Embedding dimension.
    #[arg(long, default_value_t = 50)]
    dim: usize,
    /// Context radius; 10 gives a context of length 21.
    #[arg(long, default_value_t = 10)]
    window: usize,
    /// Passes over the training data.
    #[arg(long, default_value_t = 1)]
    epochs: usize,
    /// Lexicon files, one entry per line; the file stem names the lexicon.
    #[arg(long, num_args = 1..)]
    lexicons: Vec<PathBuf>,
    /// Fraction of negative lexicon examples kept.
    #[arg(long, default_value_t = DEFAULT_NEG_RATE)]
    neg_rate: f64,
    /// Training threads; 1 is bit-reproducible.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Seed for all randomness.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Initial learning rate, decayed linearly to 1e-4.
    #[arg(long, default_value_t = 0.025)]
    lr: f32,
    /// Output embedding file; training state goes to `<output>.state`.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct EvalAnalogyArgs {
    /// Embedding file from train-embeddings.
    #[arg(long)]
    embeddings: PathBuf,
    /// Question file: `a b c expected` lines, `:` lines start sections.
    #[arg(long)]
    questions: PathBuf,
    /// Search only the most frequent entries.
    #[arg(long, default_value_t = DEFAULT_ANALOGY_RESTRICT)]
    restrict: usize,
    /// Keep question case (lowercased by default).
    #[arg(long)]
    keep_case: bool,
}

#[derive(Debug, Args)]
struct ResourceArgs {
    /// Embedding file whose vectors become dense features.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Brown cluster file (`bits<TAB>word<TAB>count`).
    #[arg(long)]
    clusters: Option<PathBuf>,
    /// Gazetteer files, one entry per line; the file stem names each.
    #[arg(long, num_args = 1..)]
    gazetteers: Vec<PathBuf>,
    /// Demonym file, one token per line.
    #[arg(long)]
    demonyms: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainNerArgs {
    /// Training CoNLL file.
    #[arg(long)]
    train: PathBuf,
    /// Development set, required with --grid.
    #[arg(long)]
    dev: Option<PathBuf>,
    #[command(flatten)]
    resources: ResourceArgs,
    /// Multiplier applied to embedding vectors.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Also feed the neighbors' embeddings to each token.
    #[arg(long)]
    neighbor_embeddings: bool,
    /// Train a second CRF on top of the first one's predictions.
    #[arg(long)]
    stacked: bool,
    /// Jackknife folds for the stacked layer.
    #[arg(long, default_value_t = crate::crf::DEFAULT_FOLDS)]
    folds: usize,
    /// TOML grid of hyperparameters tuned on --dev.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Passes over the training data.
    #[arg(long, default_value_t = CrfTrainConfig::default().epochs)]
    epochs: usize,
    /// AdaGrad RDA base learning rate.
    #[arg(long, default_value_t = CrfTrainConfig::default().eta)]
    eta: f64,
    /// L1 regularization strength.
    #[arg(long, default_value_t = CrfTrainConfig::default().l1)]
    l1: f64,
    /// L2 regularization strength.
    #[arg(long, default_value_t = CrfTrainConfig::default().l2)]
    l2: f64,
    /// Seed for all randomness.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct TagArgs {
    /// Model file from train-ner.
    #[arg(long)]
    model: PathBuf,
    /// CoNLL file to tag.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    resources: ResourceArgs,
    /// Output CoNLL file: the input columns plus a predicted BIO tag.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct EvalNerArgs {
    /// Gold CoNLL file (tag in the last column).
    #[arg(long)]
    gold: PathBuf,
    /// Predicted CoNLL file (tag in the last column).
    #[arg(long)]
    pred: PathBuf,
}

/// Parses `argv` (program name first), runs the subcommand, and returns
/// the exit status: 0 on success, 1 on a runtime error, 2 on a usage error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut out = std::io::stdout().lock();
    match dispatch(cli.command, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(command: Command, out: &mut impl Write) -> Result<()> {
    match command {
        Command::BuildVocab(a) => build_vocab_cmd(a, out),
        Command::MinePhrases(a) => mine_phrases_cmd(a, out),
        Command::TrainEmbeddings(a) => train_embeddings_cmd(a, out),
        Command::EvalAnalogy(a) => eval_analogy_cmd(a, out),
        Command::TrainNer(a) => train_ner_cmd(a, out),
        Command::Tag(a) => tag_cmd(a, out),
        Command::EvalNer(a) => eval_ner_cmd(a, out),
    }
}

/// Fails unless every input exists and every output's directory exists.
fn check_paths(inputs: &[&Path], outputs: &[&Path]) -> Result<()> {
    for p in inputs {
        if !p.is_file() {
            return Err(Error::io(p, std::io::Error::new(std::io::ErrorKind::NotFound, "input file not found")));
        }
    }
    for p in outputs {
        let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        if !dir.is_dir() {
            return Err(Error::io(p, std::io::Error::new(std::io::ErrorKind::NotFound, "output directory does not exist")));
        }
    }
    Ok(())
}

fn say(out: &mut impl Write, msg: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(msg).and_then(|_| out.write_all(b"\n")).map_err(|e| Error::io("<stdout>", e))
}

fn load_phrases(path: Option<&Path>, max_len: usize) -> Result<PhraseTable> {
    match path {
        Some(p) => PhraseTable::load(p, max_len),
        None => Ok(PhraseTable::new(max_len)),
    }
}

fn named_files(paths: &[PathBuf]) -> Vec<(String, PathBuf)> {
    paths.iter().map(|p| (LexiconSet::name_from_path(p), p.clone())).collect()
}

fn build_vocab_cmd(a: BuildVocabArgs, out: &mut impl Write) -> Result<()> {
    let mut inputs = vec![a.corpus.corpus.as_path()];
    inputs.extend(a.phrases.as_deref());
    check_paths(&inputs, &[&a.output])?;
    let table = load_phrases(a.phrases.as_deref(), DEFAULT_MAX_PHRASE_LEN)?;
    let sentences = read_corpus(&a.corpus.corpus, !a.corpus.keep_case)?;
    let vocab = build_phrase_vocab(&sentences, &table, a.max_size, a.min_count)?;
    vocab.save(&a.output)?;
    say(out, format_args!("wrote {} entries to {}", vocab.len(), a.output.display()))
}

fn mine_phrases_cmd(a: MinePhrasesArgs, out: &mut impl Write) -> Result<()> {
    let mut inputs = vec![a.corpus.corpus.as_path()];
    inputs.extend(a.stopwords.as_deref());
    inputs.extend(a.titles.as_deref());
    check_paths(&inputs, &[&a.output])?;
    let lower = !a.corpus.keep_case;
    let stopwords: HashSet<String> = match &a.stopwords {
        Some(p) => util::read_entries(p)?.into_iter().map(|s| if lower { s.to_lowercase() } else { s }).collect(),
        None => DEFAULT_STOPWORDS.iter().map(|s| s.to_string()).collect(),
    };
    let titles: Vec<String> = match &a.titles {
        Some(p) => util::read_entries(p)?
            .iter()
            .map(|t| tokenize_line(t, lower).join("_"))
            .collect(),
        None => vec![],
    };
    let sentences = read_corpus(&a.corpus.corpus, lower)?;
    let counts = NGramCounts::from_sentences(&sentences);
    let table = mine_phrases(&counts, a.threshold, a.discount, &stopwords, &titles)?;
    table.save(&a.output)?;
    say(out, format_args!("wrote {} phrases to {}", table.len(), a.output.display()))
}

fn train_embeddings_cmd(a: TrainEmbeddingsArgs, out: &mut impl Write) -> Result<()> {
    let mut inputs = vec![a.corpus.corpus.as_path()];
    inputs.extend(a.phrases.as_deref());
    inputs.extend(a.vocab.as_deref());
    inputs.extend(a.lexicons.iter().map(PathBuf::as_path));
    check_paths(&inputs, &[&a.output])?;
    let config = TrainConfig {
        dim: a.dim,
        window_radius: a.window,
        epochs: a.epochs,
        initial_lr: a.lr,
        neg_rate: a.neg_rate,
        seed: a.seed,
        workers: a.workers,
        ..TrainConfig::default()
    };
    config.validate()?;
    let lexicons = if a.lexicons.is_empty() {
        None
    } else {
        Some(LexiconSet::load(&named_files(&a.lexicons))?)
    };
    let table = load_phrases(a.phrases.as_deref(), DEFAULT_MAX_PHRASE_LEN)?;
    let sentences = read_corpus(&a.corpus.corpus, !a.corpus.keep_case)?;
    let vocab = match &a.vocab {
        Some(p) => Vocabulary::load(p)?,
        None => build_phrase_vocab(&sentences, &table, a.max_size, a.min_count)?,
    };
    let segmented = segment_corpus(&sentences, &table, &vocab);
    let start = std::time::Instant::now();
    let model = train(vocab, &segmented, &config, lexicons.as_ref())?;
    model.save(&a.output)?;
    let positions: usize = segmented.iter().map(Vec::len).sum();
    say(
        out,
        format_args!(
            "trained {} x {} embeddings on {} positions in {:.1}s; wrote {}",
            model.vocab().len(),
            model.dim(),
            positions,
            start.elapsed().as_secs_f64(),
            a.output.display()
        ),
    )
}

/// Analogy questions grouped by section, as vocabulary ids; questions with
/// an out-of-vocabulary word are counted separately.
struct QuestionSet {
    sections: Vec<(String, Vec<[u32; 4]>, usize)>,
}

fn read_questions(path: &Path, vocab: &Vocabulary, lower: bool) -> Result<QuestionSet> {
    let source = path.display().to_string();
    let mut sections: Vec<(String, Vec<[u32; 4]>, usize)> = Vec::new();
    for (n, line) in std::io::BufRead::lines(util::open_reader(path)?).enumerate() {
        let line = line.map_err(|e| Error::parse(&source, n + 1, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix(':') {
            sections.push((name.trim().to_owned(), vec![], 0));
            continue;
        }
        let words = tokenize_line(line, lower);
        if words.len() != 4 {
            return Err(Error::parse(&source, n + 1, "expected `a b c expected`"));
        }
        if sections.is_empty() {
            sections.push((String::new(), vec![], 0));
        }
        let section = sections.last_mut().unwrap();
        let ids: Option<Vec<u32>> = words.iter().map(|w| vocab.id(w)).collect();
        match ids {
            Some(ids) => section.1.push([ids[0], ids[1], ids[2], ids[3]]),
            None => section.2 += 1,
        }
    }
    Ok(QuestionSet { sections })
}

fn eval_analogy_cmd(a: EvalAnalogyArgs, out: &mut impl Write) -> Result<()> {
    check_paths(&[&a.embeddings, &a.questions], &[])?;
    let model = EmbeddingModel::load(&a.embeddings)?;
    let questions = read_questions(&a.questions, model.vocab(), !a.keep_case)?;
    let mut total = AnalogyReport::default();
    let mut oov_total = 0;
    for (name, qs, oov) in &questions.sections {
        let report = eval_analogy(&model, qs, a.restrict)?;
        let label = if name.is_empty() { "(unsectioned)" } else { name };
        say(
            out,
            format_args!(
                "{label}: accuracy {:.4} ({} / {} answered, {} skipped, {} out of vocabulary)",
                report.accuracy, report.correct, report.answered, report.skipped, oov
            ),
        )?;
        total.add(&report);
        oov_total += oov;
    }
    say(
        out,
        format_args!(
            "overall: accuracy {:.4} ({} / {} answered, {} skipped, {} out of vocabulary)",
            total.accuracy, total.correct, total.answered, total.skipped, oov_total
        ),
    )
}

fn load_resources(r: &ResourceArgs) -> Result<Resources> {
    let mut res = Resources::new();
    if !r.gazetteers.is_empty() {
        res.gazetteers = LexiconSet::load(&named_files(&r.gazetteers))?;
    }
    if let Some(p) = &r.demonyms {
        res.demonyms = util::read_entries(p)?.into_iter().collect();
    }
    if let Some(p) = &r.clusters {
        res.clusters = Some(ClusterTable::load(p)?);
    }
    if let Some(p) = &r.embeddings {
        res.embeddings = Some(EmbeddingModel::load(p)?);
    }
    Ok(res)
}

fn resource_inputs(r: &ResourceArgs) -> Vec<&Path> {
    let mut v: Vec<&Path> = r.gazetteers.iter().map(PathBuf::as_path).collect();
    v.extend(r.demonyms.as_deref());
    v.extend(r.clusters.as_deref());
    v.extend(r.embeddings.as_deref());
    v
}

fn all_spans(docs: &[Document]) -> Vec<Vec<crate::crf::Span>> {
    docs.iter().flat_map(|d| d.sentences.iter().map(|s| s.spans.clone())).collect()
}

fn train_ner_cmd(a: TrainNerArgs, out: &mut impl Write) -> Result<()> {
    let mut inputs = vec![a.train.as_path()];
    inputs.extend(a.dev.as_deref());
    inputs.extend(a.grid.as_deref());
    inputs.extend(resource_inputs(&a.resources));
    check_paths(&inputs, &[&a.output])?;
    let grid = a.grid.as_deref().map(GridConfig::load).transpose()?;
    if grid.is_some() && a.dev.is_none() {
        return Err(Error::InvalidArgument("--grid requires --dev".into()));
    }
    let resources = load_resources(&a.resources)?;
    let train_docs = read_conll(&a.train)?;
    let dev_docs = a.dev.as_deref().map(read_conll).transpose()?;
    let config = NerTrainConfig {
        features: FeatureConfig {
            neighbor_radius: DEFAULT_NEIGHBOR_RADIUS,
            bag_radius: DEFAULT_BAG_RADIUS,
            scale: a.scale,
            neighbor_embeddings: a.neighbor_embeddings,
        },
        crf: CrfTrainConfig {
            epochs: a.epochs,
            eta: a.eta,
            l1: a.l1,
            l2: a.l2,
            seed: a.seed,
        },
        stacked: a.stacked,
        folds: a.folds,
        ..NerTrainConfig::default()
    };
    let model = match (&grid, &dev_docs) {
        (Some(grid), Some(dev)) => {
            let (model, results) = grid_search(&train_docs, dev, &resources, &config, grid)?;
            for r in &results {
                let c = &r.config;
                say(
                    out,
                    format_args!(
                        "grid eta={} l1={} l2={} epochs={} scale={}: dev F1 {:.4}",
                        c.crf.eta, c.crf.l1, c.crf.l2, c.crf.epochs, c.features.scale, r.dev.overall.f1
                    ),
                )?;
            }
            model
        }
        _ => crate::ner::train_ner(&train_docs, &resources, &config)?,
    };
    if let Some(dev) = &dev_docs {
        let pred: Vec<_> = model.tag_all(dev, &resources)?.into_iter().flatten().collect();
        let report = score_spans(&all_spans(dev), &pred)?;
        say(out, format_args!("dev F1 {:.4}", report.overall.f1))?;
    }
    model.save(&a.output)?;
    say(out, format_args!("wrote model to {}", a.output.display()))
}

fn tag_cmd(a: TagArgs, out: &mut impl Write) -> Result<()> {
    let mut inputs = vec![a.model.as_path(), a.input.as_path()];
    inputs.extend(resource_inputs(&a.resources));
    check_paths(&inputs, &[&a.output])?;
    let model = NerModel::load(&a.model)?;
    let resources = load_resources(&a.resources)?;
    model.check_resources(&resources)?;
    let docs = read_conll(&a.input)?;
    let pred = model.tag_all(&docs, &resources)?;
    let mut w = util::create_writer(&a.output)?;
    write_tagged(&mut w, &docs, &pred).map_err(|e| Error::io(&a.output, e))?;
    util::flush(w, &a.output)?;
    let spans: usize = pred.iter().flatten().map(Vec::len).sum();
    say(out, format_args!("tagged {} documents, {} entities; wrote {}", docs.len(), spans, a.output.display()))
}

fn eval_ner_cmd(a: EvalNerArgs, out: &mut impl Write) -> Result<()> {
    check_paths(&[&a.gold, &a.pred], &[])?;
    let gold = read_conll(&a.gold)?;
    let pred = read_conll(&a.pred)?;
    let (g, p) = (all_spans(&gold), all_spans(&pred));
    if g.len() != p.len() {
        return Err(Error::InvalidArgument(format!(
            "gold has {} sentences but predictions have {}",
            g.len(),
            p.len()
        )));
    }
    let report = score_spans(&g, &p)?;
    write!(out, "{report}").map_err(|e| Error::io("<stdout>", e))?;
    say(out, format_args!("F1 {:.4}", report.overall.f1))
}
