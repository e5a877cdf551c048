use std::collections::BTreeMap;

use fnv::FnvHashMap;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::decode::{sequence_score, viterbi_tables};
use super::features::{
    prev_index, transition_keys, CompiledInstance, FeatureConfig, SequenceInstance,
};
use super::model::{score_tables_with, LinearModel};
use crate::corpus::{Stream, Tag};
use crate::error::{QeError, Result};

/// A training sequence with its gold labels.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledInstance {
    pub inst: SequenceInstance,
    pub gold: Vec<Tag>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MiraConfig {
    pub epochs: usize,
    /// Upper bound on the step size.
    pub c: f64,
    pub seed: u64,
    /// Return the average of all post-update weight vectors.
    pub average: bool,
}

impl Default for MiraConfig {
    fn default() -> Self {
        MiraConfig {
            epochs: 10,
            c: 1.0,
            seed: 0,
            average: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MiraReport {
    pub updates: usize,
    /// Margin violations with an all-zero feature difference, skipped.
    pub degenerate: usize,
    pub max_tau: f64,
    /// Training mistakes (Hamming) per epoch under the running weights.
    pub epoch_errors: Vec<usize>,
}

fn feature_counts(
    ci: &CompiledInstance,
    tags: &[Tag],
    bigram: bool,
    sign: f64,
    acc: &mut BTreeMap<u64, f64>,
) {
    let tk = transition_keys();
    let mut prev = None;
    for (i, &y) in tags.iter().enumerate() {
        for &k in &ci.emit[i][y.index()] {
            *acc.entry(k).or_insert(0.0) += sign;
        }
        if bigram {
            *acc.entry(tk[prev_index(prev)][y.index()]).or_insert(0.0) += sign;
        }
        prev = Some(y);
    }
}

/// Max-loss MIRA with Hamming loss.
pub fn mira_train(
    data: &[LabeledInstance],
    features: &FeatureConfig,
    stream: Stream,
    cfg: &MiraConfig,
) -> Result<LinearModel> {
    mira_train_with_report(data, features, stream, cfg).map(|(m, _)| m)
}

pub fn mira_train_with_report(
    data: &[LabeledInstance],
    features: &FeatureConfig,
    stream: Stream,
    cfg: &MiraConfig,
) -> Result<(LinearModel, MiraReport)> {
    if cfg.epochs == 0 {
        return Err(QeError::Config("epochs must be at least 1".into()));
    }
    if !(cfg.c > 0.0 && cfg.c.is_finite()) {
        return Err(QeError::Config(format!(
            "C must be positive, got {}",
            cfg.c
        )));
    }
    for (i, d) in data.iter().enumerate() {
        if d.gold.len() != d.inst.len() {
            return Err(QeError::DegenerateInput(format!(
                "instance {i}: {} gold tags for {} positions",
                d.gold.len(),
                d.inst.len()
            )));
        }
    }
    let compiled: Vec<CompiledInstance> = data
        .iter()
        .map(|d| CompiledInstance::new(&d.inst, features))
        .collect();

    let mut w: FnvHashMap<u64, f64> = FnvHashMap::default();
    // Sum of (step - 1) * update, for weight averaging.
    let mut u: FnvHashMap<u64, f64> = FnvHashMap::default();
    let mut step = 0usize;
    let mut report = MiraReport::default();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut errors = 0usize;
        for &idx in &order {
            step += 1;
            let gold = &data[idx].gold;
            let ci = &compiled[idx];
            let tables = score_tables_with(ci, features, |k| w.get(&k).copied().unwrap_or(0.0));
            let (pred, augmented) = viterbi_tables(&tables, Some(gold));
            let loss = pred.iter().zip(gold).filter(|(a, b)| a != b).count();
            errors += loss;
            if loss == 0 {
                continue;
            }
            let pred_score = augmented - loss as f64;
            let gold_score = sequence_score(&tables, gold);
            let violation = pred_score - gold_score + loss as f64;
            if violation <= 0.0 {
                continue;
            }
            let mut delta = BTreeMap::new();
            feature_counts(ci, gold, features.bigram, 1.0, &mut delta);
            feature_counts(ci, &pred, features.bigram, -1.0, &mut delta);
            let norm2: f64 = delta.values().map(|v| v * v).sum();
            if norm2 == 0.0 {
                report.degenerate += 1;
                continue;
            }
            let tau = (violation / norm2).min(cfg.c);
            report.max_tau = report.max_tau.max(tau);
            report.updates += 1;
            let age = (step - 1) as f64;
            for (k, v) in delta {
                if v == 0.0 {
                    continue;
                }
                *w.entry(k).or_insert(0.0) += tau * v;
                *u.entry(k).or_insert(0.0) += age * tau * v;
            }
        }
        report.epoch_errors.push(errors);
    }

    let weights = if cfg.average && step > 0 {
        let t = step as f64;
        w.iter()
            .map(|(&k, &v)| (k, v - u.get(&k).copied().unwrap_or(0.0) / t))
            .filter(|(_, v)| *v != 0.0)
            .collect()
    } else {
        w
    };
    let model = LinearModel {
        weights,
        features: features.clone(),
        c: cfg.c,
        gamma: 1.0,
        stream,
        systems: Vec::new(),
    };
    Ok((model, report))
}
