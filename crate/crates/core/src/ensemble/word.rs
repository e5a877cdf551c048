use super::combine::{mix, normalize, SystemStream, WeightVector};
use super::powell::{powell_optimize, PowellConfig};
use crate::corpus::{Stream, Tag};
use crate::error::{QeError, Result};
use crate::linearqe::{FeatureConfig, MiraConfig};
use crate::metrics::ContingencyTable;

/// Settings shared by the word-level ensemble strategies.
#[derive(Clone, Debug, PartialEq)]
pub struct WordFitConfig {
    pub threshold: f64,
    /// Search the decision threshold as an extra Powell coordinate.
    pub tune_threshold: bool,
    pub powell: PowellConfig,
    /// Used by the stacked linear strategy only.
    pub stacking: StackingConfig,
}

impl Default for WordFitConfig {
    fn default() -> Self {
        WordFitConfig {
            threshold: 0.5,
            tune_threshold: false,
            powell: PowellConfig::default(),
            stacking: StackingConfig::default(),
        }
    }
}

/// Learner settings for the stacked linear ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct StackingConfig {
    pub features: FeatureConfig,
    pub mira: MiraConfig,
    pub gamma: f64,
}

impl Default for StackingConfig {
    fn default() -> Self {
        StackingConfig {
            features: FeatureConfig::stacked_only(),
            mira: MiraConfig::default(),
            gamma: 1.0,
        }
    }
}

/// Token-major view of several systems' probabilities plus gold labels,
/// for fast repeated scoring of weight vectors.
pub(crate) struct FlatStream {
    /// `values[t * n_systems + s]`
    values: Vec<f64>,
    gold: Vec<Tag>,
    n_systems: usize,
}

impl FlatStream {
    pub(crate) fn new(systems: &[SystemStream], gold: &[Vec<Tag>]) -> Result<Self> {
        let n_systems = systems.len();
        let mut values = Vec::new();
        let mut flat_gold = Vec::new();
        for s in systems {
            if s.probs.len() != gold.len() {
                return Err(QeError::DegenerateInput(format!(
                    "system `{}` has {} sentences, gold has {}",
                    s.system_id,
                    s.probs.len(),
                    gold.len()
                )));
            }
        }
        for (i, g) in gold.iter().enumerate() {
            for s in systems {
                if s.probs[i].len() != g.len() {
                    return Err(QeError::DegenerateInput(format!(
                        "system `{}` sentence {}: {} values for {} gold tags",
                        s.system_id,
                        i + 1,
                        s.probs[i].len(),
                        g.len()
                    )));
                }
            }
            for (t, &tag) in g.iter().enumerate() {
                flat_gold.push(tag);
                values.extend(systems.iter().map(|s| s.probs[i][t]));
            }
        }
        Ok(FlatStream {
            values,
            gold: flat_gold,
            n_systems,
        })
    }

    pub(crate) fn table(&self, norm: &[f64], threshold: f64) -> ContingencyTable {
        let mut table = ContingencyTable::default();
        for (t, &g) in self.gold.iter().enumerate() {
            let row = &self.values[t * self.n_systems..(t + 1) * self.n_systems];
            let p = mix(norm, row.iter().copied());
            table.add(g, if p >= threshold { Tag::Bad } else { Tag::Ok });
        }
        table
    }

    pub(crate) fn f1_mult(&self, weights: &[f64], threshold: f64) -> Option<f64> {
        let norm = normalize(weights).ok()?;
        self.table(&norm, threshold)
            .f1_scores()
            .ok()
            .map(|s| s.f1_mult)
    }
}

/// Result of fitting convex-combination weights.
#[derive(Clone, Debug, PartialEq)]
pub struct WordEnsembleFit {
    pub weights: WeightVector,
    pub threshold: f64,
    /// F1-MULT of the fitted combination on the fitting data.
    pub f1_mult: f64,
    /// Index and F1-MULT of the best single system.
    pub best_single: (usize, f64),
}

/// Learns convex-combination weights maximizing F1-MULT of the thresholded
/// combination with Powell's method, starting from the best single system.
pub fn fit_word_ensemble(
    systems: &[SystemStream],
    gold: &[Vec<Tag>],
    stream: Stream,
    cfg: &WordFitConfig,
) -> Result<WordEnsembleFit> {
    if systems.is_empty() {
        return Err(QeError::MissingStream {
            system: "<any>".into(),
            stream: stream.to_string(),
        });
    }
    let flat = FlatStream::new(systems, gold)?;
    if flat.gold.is_empty() {
        return Err(QeError::EmptyInput);
    }
    let n = systems.len();
    let single: Vec<f64> = (0..n)
        .map(|i| {
            let mut w = vec![0.0; n];
            w[i] = 1.0;
            flat.f1_mult(&w, cfg.threshold).unwrap_or(0.0)
        })
        .collect();
    let mut best = 0;
    for (i, &f) in single.iter().enumerate() {
        if f > single[best] {
            best = i;
        }
    }

    let mut init = vec![0.0; n];
    init[best] = 1.0;
    if cfg.tune_threshold {
        init.push(cfg.threshold);
    }
    let objective = |p: &[f64]| -> f64 {
        let (w, t) = if cfg.tune_threshold {
            (&p[..n], p[n])
        } else {
            (p, cfg.threshold)
        };
        match flat.f1_mult(w, t) {
            Some(f) => -f,
            None => f64::INFINITY,
        }
    };
    let result = powell_optimize(&objective, &init, &cfg.powell);
    let (weights, threshold) = if cfg.tune_threshold {
        (result.point[..n].to_vec(), result.point[n])
    } else {
        (result.point.clone(), cfg.threshold)
    };
    Ok(WordEnsembleFit {
        weights: WeightVector {
            systems: systems.iter().map(|s| s.system_id.clone()).collect(),
            weights,
            stream,
        },
        threshold,
        f1_mult: -result.value,
        best_single: (best, single[best]),
    })
}

/// F1-MULT of a weighted combination on labeled data.
pub fn ensemble_f1_mult(
    systems: &[SystemStream],
    gold: &[Vec<Tag>],
    weights: &[f64],
    threshold: f64,
) -> Result<f64> {
    let flat = FlatStream::new(systems, gold)?;
    let norm = normalize(weights)?;
    Ok(flat.table(&norm, threshold).f1_scores()?.f1_mult)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{f1_mult, threshold};

    fn gold() -> Vec<Vec<Tag>> {
        vec![
            vec![Tag::Ok, Tag::Bad, Tag::Ok],
            vec![Tag::Bad, Tag::Ok],
            vec![Tag::Ok, Tag::Ok, Tag::Bad, Tag::Bad],
        ]
    }

    #[test]
    fn single_system_kept() {
        let s = vec![SystemStream::new(
            "a",
            vec![
                vec![0.1, 0.7, 0.6],
                vec![0.2, 0.1],
                vec![0.1, 0.3, 0.9, 0.4],
            ],
        )];
        let fit = fit_word_ensemble(&s, &gold(), Stream::Words, &WordFitConfig::default()).unwrap();
        assert_eq!(fit.weights.weights, vec![1.0]);
        let flat_pred: Vec<Tag> = s[0].probs.iter().flat_map(|r| threshold(r, 0.5)).collect();
        let flat_gold: Vec<Tag> = gold().concat();
        assert_eq!(
            fit.f1_mult,
            f1_mult(&flat_gold, &flat_pred).unwrap().f1_mult
        );
    }

    #[test]
    fn complementary_systems_beat_singles() {
        let g = gold();
        // a is right on sentences 0-1 and wrong on 2; b is right on 2 and undecided elsewhere.
        let truth = |t: Tag| if t.is_bad() { 0.9 } else { 0.1 };
        let wrong = |t: Tag| if t.is_bad() { 0.3 } else { 0.7 };
        let a: Vec<Vec<f64>> = g
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.iter()
                    .map(|&t| if i < 2 { truth(t) } else { wrong(t) })
                    .collect()
            })
            .collect();
        let b: Vec<Vec<f64>> = g
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.iter()
                    .map(|&t| if i == 2 { truth(t) } else { 0.45 })
                    .collect()
            })
            .collect();
        let s = vec![SystemStream::new("a", a), SystemStream::new("b", b)];
        let fit = fit_word_ensemble(&s, &g, Stream::Words, &WordFitConfig::default()).unwrap();
        assert!(fit.f1_mult >= fit.best_single.1);
        let check = ensemble_f1_mult(&s, &g, &fit.weights.weights, fit.threshold).unwrap();
        assert_eq!(check, fit.f1_mult);
    }

    #[test]
    fn no_systems_is_missing_stream() {
        assert!(matches!(
            fit_word_ensemble(&[], &gold(), Stream::Gaps, &WordFitConfig::default()),
            Err(QeError::MissingStream { .. })
        ));
    }

    #[test]
    fn threshold_can_be_tuned() {
        // Every BAD token scores 0.3, every OK token 0.2: only a lower threshold separates them.
        let g = gold();
        let p: Vec<Vec<f64>> = g
            .iter()
            .map(|r| {
                r.iter()
                    .map(|t| if t.is_bad() { 0.3 } else { 0.2 })
                    .collect()
            })
            .collect();
        let s = vec![SystemStream::new("a", p)];
        let cfg = WordFitConfig {
            tune_threshold: true,
            ..Default::default()
        };
        let fit = fit_word_ensemble(&s, &g, Stream::Words, &cfg).unwrap();
        assert_eq!(fit.f1_mult, 1.0);
        assert!(fit.threshold > 0.2 && fit.threshold <= 0.3);
    }
}
