//! First-order sequential OK/BAD tagger over unigram and bigram features,
//! trained with max-loss MIRA.
//!
//! Words, gaps and source tokens are modelled as three independent sequences.
//! Stacked ensembles inject other systems' probabilities as binned features.

mod decode;
mod features;
mod jackknife;
mod mira;
mod model;

pub use decode::{
    logistic, max_marginal_margins, predict_probs, sequence_score, viterbi, viterbi_tables,
};
pub use features::{
    feature_key, feature_names, transition_keys, unigram_names, CompiledInstance, FeatureConfig,
    SequenceInstance, StackedColumn, BOS, EOS,
};
pub use jackknife::{
    jackknife, predict_sequence, MiraTrainer, SequencePrediction, SequenceTrainer,
};
pub use mira::{mira_train, mira_train_with_report, LabeledInstance, MiraConfig, MiraReport};
pub use model::{LinearModel, ScoreTables};
