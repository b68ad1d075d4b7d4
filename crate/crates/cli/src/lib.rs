//! The `uzvec` command line: corpus cleaning, vocabulary, co-occurrence,
//! training, conversion and queries.
//!
//! [`run`] is the whole program; `main` only forwards the process
//! arguments and exit code.

pub mod manifest;
pub mod presets;

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use uzvec::config::parse_pairs;
use uzvec::glove::{build_cooccurrence, read_records, write_records};
use uzvec::io::{self as model_io, read_text, Format};
use uzvec::query::{nearest_neighbors, NeighborIndex};
use uzvec::textpipe::{ingest, read_documents, Alphabet};
use uzvec::vocab::{build_vocab, count_tokens, freq_table, DEFAULT_MIN_COUNT};
use uzvec::{Algorithm, Architecture, EncodedCorpus, Loss, Model, TrainConfig, Vocabulary};

use manifest::{digest_file, manifest_path, RunManifest};

/// Exit status for malformed invocations.
pub const EXIT_USAGE: i32 = 1;
/// Exit status for I/O and data errors.
pub const EXIT_DATA: i32 = 2;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "UZVEC_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "uzvec",
    version,
    about = "Word embeddings for Cyrillic Uzbek text"
)]
struct Cli {
    /// Worker threads (default: $UZVEC_WORKERS, else all cores). 1 gives
    /// reproducible output.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Filter and tokenize raw documents into a token stream.
    Clean(CleanArgs),
    /// Count tokens and write the frequency-sorted vocabulary.
    Vocab(VocabArgs),
    /// Print the most and least frequent vocabulary words.
    Stats(StatsArgs),
    /// Write GloVe co-occurrence records for a token stream.
    Cooccur(CooccurArgs),
    /// Train a model.
    Train(Box<TrainArgs>),
    /// Convert a model file between formats.
    Convert(ConvertArgs),
    /// Nearest neighbors of a word by cosine similarity.
    Nn(NnArgs),
    /// Print the vector of a word, composing it from subwords if needed.
    Oov(OovArgs),
    /// List the built-in training presets.
    Presets,
}

#[derive(Debug, Args)]
struct CleanArgs {
    /// A directory of .txt documents or a file with one document per line.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Write document and token counts as JSON.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Treat щ as a letter.
    #[arg(long)]
    allow_shcha: bool,
}

#[derive(Debug, Args)]
struct VocabArgs {
    /// Token stream from `clean`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MIN_COUNT)]
    min_count: u64,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long, default_value_t = 10)]
    top: usize,
    #[arg(long, default_value_t = 10)]
    bottom: usize,
}

#[derive(Debug, Args)]
struct CooccurArgs {
    /// Token stream from `clean`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long, default_value_t = 15)]
    window: usize,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgoArg {
    Word2vec,
    Glove,
    Fasttext,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Word2vec => Algorithm::Word2Vec,
            AlgoArg::Glove => Algorithm::Glove,
            AlgoArg::Fasttext => Algorithm::FastText,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ArchArg {
    Cbow,
    Skipgram,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LossArg {
    Ns,
    Hs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Binary,
    Native,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Binary => Format::Binary,
            FormatArg::Native => Format::Native,
        }
    }
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Required unless a preset or config file names it.
    #[arg(long)]
    algo: Option<AlgoArg>,
    /// Start from a named preset (see `uzvec presets`).
    #[arg(long)]
    preset: Option<String>,
    /// `key=value` file applied after the preset and before flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    arch: Option<ArchArg>,
    #[arg(long)]
    loss: Option<LossArg>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Learning rate; for GloVe, the weighting exponent.
    #[arg(long)]
    alpha: Option<f64>,
    /// Learning rate for every algorithm.
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    negatives: Option<usize>,
    #[arg(long)]
    sample: Option<f64>,
    #[arg(long)]
    minn: Option<usize>,
    #[arg(long)]
    maxn: Option<usize>,
    #[arg(long)]
    bucket: Option<usize>,
    #[arg(long)]
    xmax: Option<f64>,
    /// Token stream, or co-occurrence records for GloVe.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Native)]
    format: FormatArg,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    #[arg(long, value_enum)]
    from: FormatArg,
    #[arg(long, value_enum)]
    to: FormatArg,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// The text input has no "<count> <dim>" line (GloVe style).
    #[arg(long)]
    no_header: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NnFormat {
    Plain,
    Tsv,
    JsonLines,
}

#[derive(Debug, Args)]
struct NnArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    word: String,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, value_enum, default_value_t = NnFormat::Plain)]
    format: NnFormat,
}

#[derive(Debug, Args)]
struct OovArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    word: String,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Data(e)
    }
}

impl From<uzvec::Error> for CliError {
    fn from(e: uzvec::Error) -> Self {
        CliError::Data(e.into())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data(e.into())
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Run the program with `args` (including the program name) and return
/// the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    if argv.len() <= 1 {
        let _ = writeln!(
            stderr,
            "{}",
            <Cli as clap::CommandFactory>::command().render_help()
        );
        return EXIT_USAGE;
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let argv: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match dispatch(cli, &argv, stdout, stderr) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Data(e)) => {
            let _ = writeln!(stderr, "error: {e:#}");
            EXIT_DATA
        }
    }
}

fn dispatch(cli: Cli, argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let globals = Globals {
        workers: cli.workers,
        seed: cli.seed,
    };
    match cli.command {
        Command::Clean(a) => clean(a, err),
        Command::Vocab(a) => vocab(a, err),
        Command::Stats(a) => stats(a, out),
        Command::Cooccur(a) => cooccur(a, err),
        Command::Train(a) => train(*a, &globals, argv, err),
        Command::Convert(a) => convert(a),
        Command::Nn(a) => nn(a, out),
        Command::Oov(a) => oov(a, out),
        Command::Presets => {
            for p in presets::pipeline_presets() {
                writeln!(out, "{}\t{}", p.name, p.description)?;
            }
            Ok(())
        }
    }
}

struct Globals {
    workers: Option<usize>,
    seed: Option<u64>,
}

fn default_workers() -> CliResult<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .ok()
            .filter(|&n: &usize| n >= 1)
            .ok_or_else(|| {
                usage(format!(
                    "{WORKERS_ENV} must be a positive integer, got {v:?}"
                ))
            }),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn clean(a: CleanArgs, err: &mut dyn Write) -> CliResult<()> {
    let alphabet = if a.allow_shcha {
        Alphabet::uzbek_with_shcha()
    } else {
        Alphabet::uzbek()
    };
    let docs =
        read_documents(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let mut stats = None;
    model_io::write_atomic(&a.output, |w| {
        stats = Some(ingest(docs, w, &alphabet)?);
        Ok(())
    })
    .with_context(|| format!("cleaning into {}", a.output.display()))?;
    let stats = stats.expect("ingest ran");
    writeln!(
        err,
        "documents: {} seen, {} rejected; tokens: {}",
        stats.documents_seen, stats.documents_rejected, stats.tokens_emitted
    )?;
    if let Some(path) = a.stats {
        let json = serde_json::json!({
            "documents_seen": stats.documents_seen,
            "documents_rejected": stats.documents_rejected,
            "tokens_emitted": stats.tokens_emitted,
        });
        fs::write(&path, format!("{json:#}\n"))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn vocab(a: VocabArgs, err: &mut dyn Write) -> CliResult<()> {
    if a.min_count < 1 {
        return Err(usage("--min-count must be at least 1"));
    }
    let file = File::open(&a.input).with_context(|| format!("opening {}", a.input.display()))?;
    let counts = count_tokens(BufReader::new(file))?;
    let vocab = build_vocab(&counts, a.min_count)?;
    model_io::write_atomic(&a.output, |w| vocab.write(w))
        .with_context(|| format!("writing {}", a.output.display()))?;
    writeln!(
        err,
        "vocabulary: {} words ({} distinct tokens, {} total)",
        vocab.len(),
        counts.len(),
        vocab.total_tokens()
    )?;
    Ok(())
}

fn read_vocab(path: &Path) -> CliResult<Vocabulary> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(Vocabulary::read(BufReader::new(file))
        .with_context(|| format!("reading {}", path.display()))?)
}

fn stats(a: StatsArgs, out: &mut dyn Write) -> CliResult<()> {
    let vocab = read_vocab(&a.vocab)?;
    let (top, _) = freq_table(&vocab, a.top.min(vocab.len()))?;
    let (_, bottom) = freq_table(&vocab, a.bottom.min(vocab.len()))?;
    writeln!(out, "Word\tFrequency\tWord\tFrequency")?;
    for i in 0..top.len().max(bottom.len()) {
        let cell = |list: &[(String, u64)]| match list.get(i) {
            Some((w, c)) => format!("{w}\t{c}"),
            None => "\t".to_string(),
        };
        writeln!(out, "{}\t{}", cell(&top), cell(&bottom))?;
    }
    Ok(())
}

fn read_corpus(path: &Path, vocab: &Vocabulary) -> CliResult<EncodedCorpus> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(EncodedCorpus::from_reader(BufReader::new(file), vocab)
        .with_context(|| format!("reading {}", path.display()))?)
}

fn cooccur(a: CooccurArgs, err: &mut dyn Write) -> CliResult<()> {
    if a.window < 1 {
        return Err(usage("--window must be at least 1"));
    }
    let vocab = read_vocab(&a.vocab)?;
    let corpus = read_corpus(&a.input, &vocab)?;
    let records = build_cooccurrence(&corpus, a.window);
    model_io::write_atomic(&a.output, |w| write_records(&records, w))
        .with_context(|| format!("writing {}", a.output.display()))?;
    writeln!(err, "co-occurrence: {} records", records.len())?;
    Ok(())
}

/// Defaults, then preset, then config file, then flags.
fn resolve_config(a: &TrainArgs, g: &Globals) -> CliResult<TrainConfig> {
    let preset = match &a.preset {
        Some(name) => Some(presets::preset(name).ok_or_else(|| {
            usage(format!(
                "unknown preset {name:?}; available: {}",
                presets::preset_names().join(", ")
            ))
        })?),
        None => None,
    };
    let file_pairs = match &a.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_pairs(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => Vec::new(),
    };
    let file_algo = file_pairs
        .iter()
        .rev()
        .find(|(k, _)| k == "algorithm")
        .map(|(_, v)| v.parse::<Algorithm>())
        .transpose()
        .map_err(|e| usage(e.to_string()))?;
    let flag_algo = a.algo.map(Algorithm::from);

    let mut config = match &preset {
        Some(p) => p.config.clone(),
        None => {
            let algo = flag_algo.or(file_algo).ok_or_else(|| {
                usage("--algo is required unless --preset or the config file names an algorithm")
            })?;
            TrainConfig::defaults_for(algo)
        }
    };
    let mut workers = default_workers()?;
    for (k, v) in &file_pairs {
        if k == "workers" {
            workers = v
                .parse()
                .map_err(|_| usage(format!("invalid workers value {v:?} in config file")))?;
        } else {
            config.set(k, v).map_err(|e| usage(e.to_string()))?;
        }
    }
    if let Some(algo) = flag_algo {
        if algo != config.algorithm {
            return Err(usage(format!(
                "--algo {algo} conflicts with the {} configuration",
                config.algorithm
            )));
        }
    }
    if config.algorithm == Algorithm::Imported {
        return Err(usage("imported models cannot be trained"));
    }

    if let Some(arch) = a.arch {
        config.architecture = match arch {
            ArchArg::Cbow => Architecture::Cbow,
            ArchArg::Skipgram => Architecture::Skipgram,
        };
    }
    if let Some(loss) = a.loss {
        config.loss = match loss {
            LossArg::Ns => Loss::NegativeSampling,
            LossArg::Hs => Loss::HierarchicalSoftmax,
        };
    }
    macro_rules! take {
        ($($field:ident),*) => {$(
            if let Some(v) = a.$field {
                config.$field = v;
            }
        )*};
    }
    take!(dim, window, epochs, lr, negatives, sample, minn, maxn, bucket, xmax);
    if let Some(alpha) = a.alpha {
        if config.algorithm == Algorithm::Glove {
            config.weight_exponent = alpha;
        } else if a.lr.is_none() {
            config.lr = alpha;
        } else {
            return Err(usage(
                "--alpha and --lr both set the learning rate; pass one",
            ));
        }
    }
    if let Some(seed) = g.seed {
        config.seed = seed;
    }
    config.workers = g.workers.unwrap_or(workers);
    config.validate().map_err(|e| usage(e.to_string()))?;
    Ok(config)
}

fn train(a: TrainArgs, g: &Globals, argv: &[String], err: &mut dyn Write) -> CliResult<()> {
    let config = resolve_config(&a, g)?;
    let vocab = read_vocab(&a.vocab)?;
    if config.algorithm == Algorithm::Word2Vec
        && config.loss == Loss::HierarchicalSoftmax
        && vocab.len() < 2
    {
        return Err(CliError::Data(anyhow!(
            "hierarchical softmax needs at least two vocabulary words, found {}",
            vocab.len()
        )));
    }

    let started = Instant::now();
    let model: Model = match config.algorithm {
        Algorithm::Glove => {
            let file =
                File::open(&a.input).with_context(|| format!("opening {}", a.input.display()))?;
            let records = read_records(&mut BufReader::new(file))
                .with_context(|| format!("reading records from {}", a.input.display()))?;
            uzvec::glove::train_glove(&records, &vocab, &config)?
        }
        Algorithm::Word2Vec => {
            let corpus = read_corpus(&a.input, &vocab)?;
            uzvec::word2vec::train_word2vec(&corpus, &vocab, &config)?
        }
        Algorithm::FastText => {
            let corpus = read_corpus(&a.input, &vocab)?;
            uzvec::fasttext::train_fasttext(&corpus, &vocab, &config)?
        }
        Algorithm::Imported => unreachable!("rejected while resolving the config"),
    };
    let elapsed = started.elapsed();

    let format = Format::from(a.format);
    model_io::save(&model, &a.output, format)
        .with_context(|| format!("writing {}", a.output.display()))?;

    let manifest = RunManifest {
        subcommand: "train".into(),
        toolkit_version: env!("CARGO_PKG_VERSION").into(),
        argv: argv.to_vec(),
        config: config
            .to_pairs()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        inputs: vec![digest_file(&a.input)?, digest_file(&a.vocab)?],
        output: a.output.display().to_string(),
        output_format: format.to_string(),
        seed: config.seed,
        duration_ms: (config.workers > 1).then_some(elapsed.as_millis() as u64),
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| anyhow!(e))?;
    let path = manifest_path(&a.output);
    model_io::write_atomic(&path, |w| {
        w.write_all(json.as_bytes())?;
        w.write_all(b"\n")?;
        Ok(())
    })
    .with_context(|| format!("writing {}", path.display()))?;
    writeln!(
        err,
        "trained {} ({} words, dim {}) in {:.2}s",
        config.algorithm,
        model.vocab.len(),
        model.dim(),
        elapsed.as_secs_f64()
    )?;
    Ok(())
}

fn convert(a: ConvertArgs) -> CliResult<()> {
    let (from, to) = (Format::from(a.from), Format::from(a.to));
    if !a.no_header {
        model_io::convert(&a.input, from, &a.output, to)
            .with_context(|| format!("converting {}", a.input.display()))?;
        return Ok(());
    }
    if from != Format::Text {
        return Err(usage("--no-header applies to text input only"));
    }
    let file = File::open(&a.input).with_context(|| format!("opening {}", a.input.display()))?;
    let model: Model = read_text(BufReader::new(file), false)
        .and_then(|v| v.into_model())
        .with_context(|| format!("reading {}", a.input.display()))?;
    model_io::save(&model, &a.output, to)
        .with_context(|| format!("writing {}", a.output.display()))?;
    Ok(())
}

fn load_model(path: &Path) -> CliResult<Model> {
    Ok(model_io::load_any(path).with_context(|| format!("loading {}", path.display()))?)
}

fn nn(a: NnArgs, out: &mut dyn Write) -> CliResult<()> {
    let model = load_model(&a.model)?;
    let index = NeighborIndex::new(&model.to_word_vectors());
    let neighbors = nearest_neighbors(&model, &index, &a.word, a.k)?;
    let mut out = BufWriter::new(out);
    for n in neighbors {
        match a.format {
            NnFormat::Plain => writeln!(out, "{} ({:.6})", n.word, n.similarity)?,
            NnFormat::Tsv => writeln!(out, "{}\t{:.6}", n.word, n.similarity)?,
            NnFormat::JsonLines => writeln!(
                out,
                "{}",
                serde_json::json!({ "word": n.word, "similarity": n.similarity })
            )?,
        }
    }
    out.flush()?;
    Ok(())
}

fn oov(a: OovArgs, out: &mut dyn Write) -> CliResult<()> {
    let model = load_model(&a.model)?;
    let v = model.vector(&a.word)?;
    let line: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    writeln!(out, "{}", line.join(" "))?;
    Ok(())
}
