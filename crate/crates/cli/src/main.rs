//! `offmask`: command-line front end for the offensive-language mask
//! toolkit.
//!
//! Exit codes: 0 success, 2 usage error, 3 I/O error, 4 data error.

mod cmd;
mod manifest;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use offmask_core::error::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Data(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> CliError {
        CliError::Io(format!("{}: {source}", path.display()))
    }

    pub fn data(msg: impl Into<String>) -> CliError {
        CliError::Data(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 3,
            CliError::Data(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(msg) => write!(f, "io error: {msg}"),
            CliError::Data(msg) => write!(f, "data error: {msg}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> CliError {
        match e {
            CoreError::Io { path, source } => CliError::Io(format!("{path}: {source}")),
            other => CliError::Data(other.to_string()),
        }
    }
}

/// Language mode shared by several subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Lang {
    /// English-like policies: emoji descriptors, @USER collapsing,
    /// lowercased tokenization.
    En,
    /// Persian-like policies: emoji/user/number/link deletion, character
    /// normalization, case left alone.
    Fa,
}

impl Lang {
    pub fn lowercase(self) -> bool {
        matches!(self, Lang::En)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountModeArg {
    Raw,
    Tfidf,
}

impl CountModeArg {
    pub fn to_core(self) -> offmask_core::scoring::CountMode {
        match self {
            CountModeArg::Raw => offmask_core::scoring::CountMode::RawCount,
            CountModeArg::Tfidf => offmask_core::scoring::CountMode::TfIdf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FallbackArg {
    /// Keep the all-zero token span.
    KeepZeros,
    /// Substitute the classic mask when no token clears the threshold.
    Classic,
}

impl FallbackArg {
    pub fn to_core(self) -> offmask_core::masking::DegenerateFallback {
        match self {
            FallbackArg::KeepZeros => offmask_core::masking::DegenerateFallback::KeepZeros,
            FallbackArg::Classic => offmask_core::masking::DegenerateFallback::FallBackToClassic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptimizerArg {
    Sgd,
    Adam,
}

impl OptimizerArg {
    pub fn to_core(self) -> offmask_core::attention::OptimizerKind {
        match self {
            OptimizerArg::Sgd => offmask_core::attention::OptimizerKind::Sgd,
            OptimizerArg::Adam => offmask_core::attention::OptimizerKind::Adam,
        }
    }

    pub fn as_str(self) -> &'static str {
        self.to_core().as_str()
    }
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("threshold must be in (0,1), got {v}"))
    }
}

fn parse_positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be a positive number, got {v}"))
    }
}

fn parse_unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("must be in [0,1], got {v}"))
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "offmask",
    version,
    about = "Per-token offensive scores and attention-mask redistribution",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalize a corpus TSV (emoji, hashtags, mentions, elongation)
    Preprocess(PreprocessArgs),
    /// WordPiece-encode a corpus TSV against a vocabulary
    Tokenize(TokenizeArgs),
    /// Fit naive Bayes token masses and persist the offensive-score table
    BuildScores(BuildScoresArgs),
    /// Print per-token scores of one utterance
    ScoreText(ScoreTextArgs),
    /// Build attention-mask vectors for tokenized documents
    BuildMask(BuildMaskArgs),
    /// Train the toy attention classifier and save its parameters
    TrainToy(TrainToyArgs),
    /// Score predictions against gold labels (text report + JSON)
    Eval(EvalArgs),
    /// Cross-validated comparison of mask strategies
    Compare(CompareArgs),
    /// Grid-search the threshold-mask cutoff
    SweepThreshold(SweepThresholdArgs),
}

#[derive(clap::Args, Debug)]
pub struct PreprocessArgs {
    /// Preprocessing policy family
    #[arg(long, value_enum)]
    pub mode: Lang,
    /// Input corpus TSV (id<TAB>text<TAB>label)
    #[arg(long)]
    pub input: PathBuf,
    /// Output corpus TSV
    #[arg(long)]
    pub output: PathBuf,
    /// Emoji descriptor map TSV (required by --mode en when emoji occur)
    #[arg(long)]
    pub emoji_map: Option<PathBuf>,
    /// Raw-label map TSV (source_label<TAB>NOT|OFF); defaults to the stock
    /// homogenization
    #[arg(long)]
    pub label_map: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct TokenizeArgs {
    /// Vocabulary file, one token per line
    #[arg(long)]
    pub vocab: PathBuf,
    /// Sequence length after [CLS]/[SEP] wrapping and padding
    #[arg(long, default_value_t = 64)]
    pub max_len: usize,
    /// Input corpus TSV
    #[arg(long)]
    pub input: PathBuf,
    /// Output tokenized TSV (id<TAB>tokens<TAB>ids)
    #[arg(long)]
    pub output: PathBuf,
    /// Language mode (en lowercases)
    #[arg(long, value_enum, default_value_t = Lang::En)]
    pub mode: Lang,
}

#[derive(clap::Args, Debug)]
pub struct BuildScoresArgs {
    /// Labeled training corpus TSV
    #[arg(long)]
    pub train: PathBuf,
    /// Vocabulary file
    #[arg(long)]
    pub vocab: PathBuf,
    /// Token mass accumulation mode
    #[arg(long, value_enum, default_value_t = CountModeArg::Tfidf)]
    pub mode: CountModeArg,
    /// Output score table TSV
    #[arg(long)]
    pub out: PathBuf,
    /// Sequence length for tokenization
    #[arg(long, default_value_t = 64)]
    pub max_len: usize,
    /// Language mode (en lowercases)
    #[arg(long, value_enum, default_value_t = Lang::En)]
    pub lang: Lang,
    /// Raw-label map TSV
    #[arg(long)]
    pub label_map: Option<PathBuf>,
    /// Disable idf smoothing (tfidf mode)
    #[arg(long)]
    pub no_idf_smoothing: bool,
    /// Disable per-document L2 normalization (tfidf mode)
    #[arg(long)]
    pub no_l2_normalize: bool,
}

#[derive(clap::Args, Debug)]
pub struct ScoreTextArgs {
    /// Score table TSV
    #[arg(long)]
    pub scores: PathBuf,
    /// Utterance to score
    #[arg(long)]
    pub text: String,
    /// Optional vocabulary; with it the text is WordPiece-split first
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Language mode (en lowercases)
    #[arg(long, value_enum, default_value_t = Lang::En)]
    pub lang: Lang,
}

#[derive(clap::Args, Debug)]
pub struct BuildMaskArgs {
    /// Mask strategy name
    #[arg(long, value_parser = strategy_name_parser())]
    pub strategy: String,
    /// Cutoff for the threshold strategy
    #[arg(long, default_value_t = 0.6, value_parser = parse_threshold)]
    pub threshold: f64,
    /// Degenerate-mask fallback for the threshold strategy
    #[arg(long, value_enum, default_value_t = FallbackArg::KeepZeros)]
    pub fallback: FallbackArg,
    /// Score table TSV
    #[arg(long)]
    pub scores: PathBuf,
    /// Tokenized input TSV (id<TAB>tokens<TAB>ids)
    #[arg(long)]
    pub input: PathBuf,
    /// Output TSV (id<TAB>space-joined mask values)
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(clap::Args, Debug)]
pub struct TrainToyArgs {
    /// Labeled training corpus TSV
    #[arg(long)]
    pub train: PathBuf,
    /// Vocabulary file
    #[arg(long)]
    pub vocab: PathBuf,
    /// Score table TSV
    #[arg(long)]
    pub scores: PathBuf,
    /// Mask strategy name
    #[arg(long, value_parser = strategy_name_parser())]
    pub strategy: String,
    /// Cutoff for the threshold strategy
    #[arg(long, default_value_t = 0.6, value_parser = parse_threshold)]
    pub threshold: f64,
    /// Degenerate-mask fallback for the threshold strategy
    #[arg(long, value_enum, default_value_t = FallbackArg::KeepZeros)]
    pub fallback: FallbackArg,
    /// Training epochs
    #[arg(long, default_value_t = 30)]
    pub epochs: usize,
    /// Learning rate
    #[arg(long, default_value_t = 0.01, value_parser = parse_positive_f64)]
    pub lr: f64,
    /// Minibatch size
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub batch_size: u64,
    /// Seed driving initialization and shuffling
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Update rule
    #[arg(long, value_enum, default_value_t = OptimizerArg::Adam)]
    pub optimizer: OptimizerArg,
    /// Model dimension
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    pub dim: u64,
    /// Sequence length for tokenization
    #[arg(long, default_value_t = 64)]
    pub max_len: usize,
    /// Language mode (en lowercases)
    #[arg(long, value_enum, default_value_t = Lang::En)]
    pub lang: Lang,
    /// Raw-label map TSV
    #[arg(long)]
    pub label_map: Option<PathBuf>,
    /// Where to write the trained parameters
    #[arg(long)]
    pub model_out: PathBuf,
}

#[derive(clap::Args, Debug)]
pub struct EvalArgs {
    /// Predictions TSV (id<TAB>label, or a full corpus TSV)
    #[arg(long)]
    pub pred: PathBuf,
    /// Gold labels TSV (same formats)
    #[arg(long)]
    pub gold: PathBuf,
    /// Also write the report as JSON
    #[arg(long)]
    pub json_out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct CompareArgs {
    /// Labeled corpus TSV
    #[arg(long)]
    pub train: PathBuf,
    /// Vocabulary file
    #[arg(long)]
    pub vocab: PathBuf,
    /// Number of stratified folds
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(2..))]
    pub folds: u64,
    /// Seed for the fold split
    #[arg(long, default_value_t = 0)]
    pub fold_seed: u64,
    /// Training seeds, one cell per fold x seed
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    pub seeds: Vec<u64>,
    /// Strategies to compare
    #[arg(long, value_delimiter = ',', default_value = "classic,additive,threshold",
          value_parser = strategy_name_parser())]
    pub strategies: Vec<String>,
    /// Cutoff for the threshold strategy
    #[arg(long, default_value_t = 0.6, value_parser = parse_threshold)]
    pub threshold: f64,
    /// Degenerate-mask fallback for the threshold strategy
    #[arg(long, value_enum, default_value_t = FallbackArg::KeepZeros)]
    pub fallback: FallbackArg,
    /// Output results TSV
    #[arg(long)]
    pub out: PathBuf,
    /// Token mass mode for the per-fold score tables
    #[arg(long, value_enum, default_value_t = CountModeArg::Raw)]
    pub mode: CountModeArg,
    /// Training epochs per cell
    #[arg(long, default_value_t = 30)]
    pub epochs: usize,
    /// Learning rate
    #[arg(long, default_value_t = 0.01, value_parser = parse_positive_f64)]
    pub lr: f64,
    /// Minibatch size
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub batch_size: u64,
    /// Update rule
    #[arg(long, value_enum, default_value_t = OptimizerArg::Adam)]
    pub optimizer: OptimizerArg,
    /// Model dimension
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    pub dim: u64,
    /// Sequence length for tokenization
    #[arg(long, default_value_t = 64)]
    pub max_len: usize,
    /// Language mode (en lowercases)
    #[arg(long, value_enum, default_value_t = Lang::En)]
    pub lang: Lang,
    /// Raw-label map TSV
    #[arg(long)]
    pub label_map: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct SweepThresholdArgs {
    /// Labeled corpus TSV
    #[arg(long)]
    pub train: PathBuf,
    /// Vocabulary file
    #[arg(long)]
    pub vocab: PathBuf,
    /// Lowest threshold of the grid
    #[arg(long, default_value_t = 0.5, value_parser = parse_threshold)]
    pub min: f64,
    /// Highest threshold of the grid
    #[arg(long, default_value_t = 0.8, value_parser = parse_threshold)]
    pub max: f64,
    /// Grid step
    #[arg(long, default_value_t = 0.05, value_parser = parse_positive_f64)]
    pub step: f64,
    /// Stratified folds for the single train/validation split
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(2..))]
    pub folds: u64,
    /// Seed for the fold split
    #[arg(long, default_value_t = 0)]
    pub fold_seed: u64,
    /// Training seed
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output grid TSV
    #[arg(long)]
    pub out: PathBuf,
    /// Token mass mode for the score table
    #[arg(long, value_enum, default_value_t = CountModeArg::Raw)]
    pub mode: CountModeArg,
    /// Training epochs per grid point
    #[arg(long, default_value_t = 30)]
    pub epochs: usize,
    /// Learning rate
    #[arg(long, default_value_t = 0.01, value_parser = parse_positive_f64)]
    pub lr: f64,
    /// Minibatch size
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub batch_size: u64,
    /// Update rule
    #[arg(long, value_enum, default_value_t = OptimizerArg::Adam)]
    pub optimizer: OptimizerArg,
    /// Model dimension
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    pub dim: u64,
    /// Sequence length for tokenization
    #[arg(long, default_value_t = 64)]
    pub max_len: usize,
    /// Language mode (en lowercases)
    #[arg(long, value_enum, default_value_t = Lang::En)]
    pub lang: Lang,
    /// Raw-label map TSV
    #[arg(long)]
    pub label_map: Option<PathBuf>,
}

fn strategy_name_parser() -> clap::builder::PossibleValuesParser {
    clap::builder::PossibleValuesParser::new(offmask_core::masking::STRATEGY_NAMES)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Preprocess(args) => cmd::preprocess(args),
        Command::Tokenize(args) => cmd::tokenize(args),
        Command::BuildScores(args) => cmd::build_scores(args),
        Command::ScoreText(args) => cmd::score_text(args),
        Command::BuildMask(args) => cmd::build_mask(args),
        Command::TrainToy(args) => cmd::train_toy(args),
        Command::Eval(args) => cmd::eval(args),
        Command::Compare(args) => cmd::compare(args),
        Command::SweepThreshold(args) => cmd::sweep_threshold(args),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("OFFMASK_LOG", "warn")).init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("offmask: {e}");
        std::process::exit(e.exit_code());
    }
}
