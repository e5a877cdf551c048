use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "qe-stack",
    version,
    about = "Word-, sentence- and document-level MT quality estimation"
)]
pub struct Cli {
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    /// Root seed for every randomized step (overrides the config file).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// key=value config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Override a config key, e.g. `--set epochs=5`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Kv,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Score predicted tags or probabilities against gold tags.
    Evaluate(EvaluateArgs),
    /// Derive OK/BAD tags and HTER from post-edits.
    MakeLabels(MakeLabelsArgs),
    /// Linear sequential tagger.
    #[command(subcommand)]
    Linear(LinearCmd),
    /// Word-level ensembles.
    #[command(subcommand)]
    EnsembleWord(EnsembleWordCmd),
    /// Sentence-level ensembles.
    #[command(subcommand)]
    EnsembleSent(EnsembleSentCmd),
    /// Document-level annotations and MQM.
    #[command(subcommand)]
    Doc(DocCmd),
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub gold: PathBuf,
    /// Tags (OK/BAD) or probabilities of BAD.
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub threshold: Option<f64>,
    /// target, words, gaps, source or sentence.
    #[arg(long, default_value = "target")]
    pub stream: String,
}

#[derive(Args, Debug)]
pub struct MakeLabelsArgs {
    #[arg(long)]
    pub mt: PathBuf,
    #[arg(long)]
    pub pe: PathBuf,
    #[arg(long, requires = "align")]
    pub src: Option<PathBuf>,
    #[arg(long, requires = "src")]
    pub align: Option<PathBuf>,
    #[arg(long)]
    pub out_prefix: PathBuf,
}

/// Text inputs shared by the tagger commands.
#[derive(Args, Debug, Clone)]
pub struct TextInputs {
    #[arg(long)]
    pub mt: PathBuf,
    #[arg(long)]
    pub src: Option<PathBuf>,
    #[arg(long)]
    pub align: Option<PathBuf>,
    /// System manifest whose probabilities become stacked features.
    #[arg(long)]
    pub stack: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum LinearCmd {
    /// Train a tagger on gold tags.
    Train {
        #[command(flatten)]
        inputs: TextInputs,
        /// Gold target tags (or source tags for the source stream).
        #[arg(long)]
        tags: PathBuf,
        #[arg(long)]
        stream: Option<String>,
        #[arg(long)]
        model: PathBuf,
    },
    /// Tag text with a trained model.
    Predict {
        #[command(flatten)]
        inputs: TextInputs,
        #[arg(long)]
        model: PathBuf,
        /// P(BAD) per token.
        #[arg(long)]
        out: PathBuf,
        /// Viterbi tags.
        #[arg(long)]
        tags_out: Option<PathBuf>,
    },
    /// Out-of-fold predictions on the training data.
    Jackknife {
        #[command(flatten)]
        inputs: TextInputs,
        #[arg(long)]
        tags: PathBuf,
        #[arg(long)]
        stream: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Inputs shared by the ensemble commands.
#[derive(Args, Debug, Clone)]
pub struct SystemInputs {
    /// `system_id<TAB>kind<TAB>path` lines.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Tokenized MT, for line lengths.
    #[arg(long)]
    pub mt: PathBuf,
    /// Tokenized source, for source-stream lengths.
    #[arg(long)]
    pub src: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum EnsembleWordCmd {
    /// Fit a word-level ensemble on gold tags.
    Fit {
        #[command(flatten)]
        inputs: SystemInputs,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        stream: Option<String>,
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Combine system probabilities with a fitted ensemble.
    Apply {
        #[command(flatten)]
        inputs: SystemInputs,
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        tags_out: Option<PathBuf>,
    },
    /// Cross-validated estimate next to the in-sample score.
    Kfold {
        #[command(flatten)]
        inputs: SystemInputs,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        stream: Option<String>,
        #[arg(long)]
        method: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum EnsembleSentCmd {
    /// Fit the sentence-level ridge ensemble.
    Fit {
        #[command(flatten)]
        inputs: SystemInputs,
        /// Gold HTER, one value per line.
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict sentence scores with a fitted model.
    Apply {
        #[command(flatten)]
        inputs: SystemInputs,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum DocCmd {
    /// Annotations to per-sentence tags.
    Tags {
        #[arg(long)]
        docs: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-sentence tags to annotations.
    Spans {
        #[arg(long)]
        docs: PathBuf,
        #[arg(long)]
        tags: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Closed-form MQM of every document.
    Mqm {
        #[arg(long)]
        docs: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Regression features of every document.
    Features {
        #[arg(long)]
        docs: PathBuf,
        #[arg(long)]
        tags: PathBuf,
        /// Predicted sentence MQM, one per sentence line.
        #[arg(long)]
        sentence_mqm: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the document MQM regression.
    Fit {
        #[arg(long)]
        features: PathBuf,
        /// Gold document MQM, one per document.
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict document MQM from features.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Character-level annotation F1.
    Eval {
        #[arg(long)]
        docs: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
    },
    /// Annotation counts and severity distribution.
    Stats {
        #[arg(long)]
        annotations: PathBuf,
    },
}
