use rayon::prelude::*;

use super::combine::SystemStream;
use super::registry::WordEnsembler;
use super::word::WordFitConfig;
use crate::corpus::{Stream, Tag};
use crate::error::Result;
use crate::folds::FoldPlan;
use crate::metrics::{threshold, ContingencyTable};

fn subset(systems: &[SystemStream], idx: &[usize]) -> Vec<SystemStream> {
    systems.iter().map(|s| s.subset(idx)).collect()
}

/// Cross-validated F1-MULT of an ensembling strategy.
///
/// Each fold is predicted with an ensemble fitted on all other folds; the
/// score is computed once over the concatenation of these held-out
/// predictions.
pub fn kfold_estimate(
    ensembler: &dyn WordEnsembler,
    systems: &[SystemStream],
    gold: &[Vec<Tag>],
    plan: &FoldPlan,
    stream: Stream,
    cfg: &WordFitConfig,
) -> Result<f64> {
    let tables: Vec<ContingencyTable> = (0..plan.k())
        .into_par_iter()
        .map(|f| {
            let (train, held) = plan.split(f);
            let train_gold: Vec<Vec<Tag>> = train.iter().map(|&i| gold[i].clone()).collect();
            let fitted = ensembler.fit(&subset(systems, &train), &train_gold, stream, cfg)?;
            let probs = fitted.predict(&subset(systems, &held))?;
            let mut table = ContingencyTable::default();
            for (p, &i) in probs.iter().zip(&held) {
                for (&g, t) in gold[i].iter().zip(threshold(p, fitted.threshold())) {
                    table.add(g, t);
                }
            }
            Ok(table)
        })
        .collect::<Result<_>>()?;
    let mut total = ContingencyTable::default();
    for t in &tables {
        total.merge(t);
    }
    Ok(total.f1_scores()?.f1_mult)
}

/// F1-MULT of an ensemble fitted and scored on the same data.
pub fn in_sample_score(
    ensembler: &dyn WordEnsembler,
    systems: &[SystemStream],
    gold: &[Vec<Tag>],
    stream: Stream,
    cfg: &WordFitConfig,
) -> Result<f64> {
    let fitted = ensembler.fit(systems, gold, stream, cfg)?;
    let probs = fitted.predict(systems)?;
    let mut table = ContingencyTable::default();
    for (p, g) in probs.iter().zip(gold) {
        for (&gt, t) in g.iter().zip(threshold(p, fitted.threshold())) {
            table.add(gt, t);
        }
    }
    Ok(table.f1_scores()?.f1_mult)
}
