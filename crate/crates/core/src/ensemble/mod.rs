//! System ensembling.
//!
//! Word level: a convex combination of per-token BAD probabilities whose
//! weights are searched with Powell's method to maximize F1-MULT, with
//! uniform averaging and a stacked linear tagger as alternative strategies
//! (see [`EnsemblerRegistry`]). Sentence level: ridge regression over
//! sentence scores and averaged token probabilities.

mod combine;
mod kfold;
mod powell;
mod registry;
mod ridge;
mod sentence;
mod word;

pub use combine::{combine_word, require_stream, systems_with_stream, SystemStream, WeightVector};
pub use kfold::{in_sample_score, kfold_estimate};
pub use powell::{powell_optimize, PowellConfig, PowellResult};
pub use registry::{
    save_ensemble, stacked_instances, write_ensemble, AverageEnsembler, ConvexEnsemble,
    EnsembleHeader, EnsemblerRegistry, FittedWordEnsemble, PowellEnsembler, StackedLinearEnsemble,
    StackedLinearEnsembler, WordEnsembler,
};
pub use ridge::{ridge_cv, ridge_fit, RidgeCv, RidgeModel};
pub use sentence::{
    apply_sentence_ensemble, fit_sentence_ensemble, sentence_features, FeatureMatrix,
    SentenceFitConfig,
};
pub use word::{
    ensemble_f1_mult, fit_word_ensemble, StackingConfig, WordEnsembleFit, WordFitConfig,
};
