use rayon::prelude::*;

use super::decode::{logistic, max_marginal_margins, viterbi_tables};
use super::features::{CompiledInstance, FeatureConfig, SequenceInstance};
use super::mira::{mira_train, LabeledInstance, MiraConfig};
use super::model::LinearModel;
use crate::corpus::{Stream, Tag};
use crate::error::Result;
use crate::folds::FoldPlan;

/// Hard tags and P(BAD) for one sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct SequencePrediction {
    pub tags: Vec<Tag>,
    pub probs: Vec<f64>,
}

/// Anything that can be trained on labeled sequences and then tag new ones.
pub trait SequenceTrainer: Sync {
    type Model: Send;

    fn train(&self, data: &[LabeledInstance]) -> Result<Self::Model>;

    fn predict(&self, model: &Self::Model, inst: &SequenceInstance) -> SequencePrediction;
}

/// The linear tagger trained with MIRA.
#[derive(Clone, Debug)]
pub struct MiraTrainer {
    pub features: FeatureConfig,
    pub mira: MiraConfig,
    pub stream: Stream,
    pub gamma: f64,
}

impl MiraTrainer {
    pub fn new(features: FeatureConfig, mira: MiraConfig, stream: Stream) -> Self {
        MiraTrainer {
            features,
            mira,
            stream,
            gamma: 1.0,
        }
    }
}

/// Tags and probabilities from a trained model.
pub fn predict_sequence(model: &LinearModel, inst: &SequenceInstance) -> SequencePrediction {
    let compiled = CompiledInstance::new(inst, &model.features);
    let tables = model.score_tables(&compiled);
    let (tags, _) = viterbi_tables(&tables, None);
    let probs = max_marginal_margins(&tables)
        .into_iter()
        .map(|m| logistic(model.gamma * m))
        .collect();
    SequencePrediction { tags, probs }
}

impl SequenceTrainer for MiraTrainer {
    type Model = LinearModel;

    fn train(&self, data: &[LabeledInstance]) -> Result<LinearModel> {
        let mut m = mira_train(data, &self.features, self.stream, &self.mira)?;
        m.gamma = self.gamma;
        if let Some(first) = data.first() {
            m.systems = first
                .inst
                .stacked
                .iter()
                .map(|c| c.system.clone())
                .collect();
        }
        Ok(m)
    }

    fn predict(&self, model: &LinearModel, inst: &SequenceInstance) -> SequencePrediction {
        predict_sequence(model, inst)
    }
}

/// Out-of-fold predictions for every training sequence.
///
/// Folds are contiguous; fold `i` is tagged by a model trained on the other
/// `k - 1` folds. Folds train in parallel; output follows input order.
pub fn jackknife<T: SequenceTrainer>(
    data: &[LabeledInstance],
    k: usize,
    trainer: &T,
) -> Result<Vec<SequencePrediction>> {
    let plan = FoldPlan::contiguous(data.len(), k)?;
    let per_fold: Vec<Vec<(usize, SequencePrediction)>> = (0..k)
        .into_par_iter()
        .map(|f| {
            let (train_idx, held) = plan.split(f);
            let train: Vec<LabeledInstance> = train_idx.iter().map(|&i| data[i].clone()).collect();
            let model = trainer.train(&train)?;
            Ok(held
                .into_iter()
                .map(|i| (i, trainer.predict(&model, &data[i].inst)))
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<Option<SequencePrediction>> = vec![None; data.len()];
    for (i, p) in per_fold.into_iter().flatten() {
        out[i] = Some(p);
    }
    Ok(out
        .into_iter()
        .map(|p| p.expect("every item is held out exactly once"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    struct Constant {
        calls: AtomicUsize,
    }

    impl SequenceTrainer for Constant {
        type Model = f64;

        fn train(&self, data: &[LabeledInstance]) -> Result<f64> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            assert!(!data.is_empty());
            Ok(0.25)
        }

        fn predict(&self, model: &f64, inst: &SequenceInstance) -> SequencePrediction {
            SequencePrediction {
                tags: vec![Tag::Ok; inst.len()],
                probs: vec![*model; inst.len()],
            }
        }
    }

    fn data(n: usize) -> Vec<LabeledInstance> {
        (0..n)
            .map(|i| LabeledInstance {
                inst: SequenceInstance::blank(1 + i % 3),
                gold: vec![Tag::Ok; 1 + i % 3],
            })
            .collect()
    }

    #[test]
    fn constant_trainer_everywhere() {
        let t = Constant {
            calls: AtomicUsize::new(0),
        };
        let d = data(7);
        let out = jackknife(&d, 3, &t).unwrap();
        assert_eq!(out.len(), 7);
        for (p, d) in out.iter().zip(&d) {
            assert_eq!(p.probs, vec![0.25; d.inst.len()]);
        }
        assert_eq!(t.calls.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn leave_one_out() {
        let t = Constant {
            calls: AtomicUsize::new(0),
        };
        let out = jackknife(&data(5), 5, &t).unwrap();
        assert_eq!(out.len(), 5);
        assert_eq!(t.calls.load(Ordering::SeqCst), 5);
        assert!(jackknife(&data(2), 3, &t).is_err());
    }
}
