use super::spans::{Annotation, Severity};
use crate::corpus::TargetTags;
use crate::ensemble::{ridge_cv, ridge_fit, RidgeModel};
use crate::error::{QeError, Result};

/// Per-severity penalty weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MqmWeights {
    pub minor: f64,
    pub major: f64,
    pub critical: f64,
}

impl Default for MqmWeights {
    fn default() -> Self {
        MqmWeights {
            minor: 1.0,
            major: 5.0,
            critical: 10.0,
        }
    }
}

impl MqmWeights {
    pub fn get(&self, s: Severity) -> f64 {
        match s {
            Severity::Minor => self.minor,
            Severity::Major => self.major,
            Severity::Critical => self.critical,
        }
    }
}

/// Annotation counts indexed by [`Severity::index`].
pub type SeverityCounts = [usize; 3];

pub fn severity_counts(annotations: &[Annotation]) -> SeverityCounts {
    let mut c = [0; 3];
    for a in annotations {
        c[a.severity.index()] += 1;
    }
    c
}

/// `100 * (1 - penalty / n_words)`, optionally clamped below at `floor`.
pub fn mqm_closed_form(
    counts: SeverityCounts,
    n_words: usize,
    weights: &MqmWeights,
    floor: Option<f64>,
) -> Result<f64> {
    if n_words == 0 {
        return Err(QeError::DegenerateInput(
            "MQM of a document without words".into(),
        ));
    }
    let penalty: f64 = Severity::ALL
        .iter()
        .map(|&s| weights.get(s) * counts[s.index()] as f64)
        .sum();
    let score = 100.0 * (1.0 - penalty / n_words as f64);
    Ok(floor.map_or(score, |f| score.max(f)))
}

pub const DOC_FEATURE_NAMES: [&str; 4] = ["mean_sentence_mqm", "bad_tokens", "bad_gaps", "bad_all"];

/// Mean sentence MQM (unweighted by length) and the BAD fractions among
/// token tags, gap tags and all tags.
pub fn doc_mqm_features(tags: &[TargetTags], sentence_mqm: &[f64]) -> Result<[f64; 4]> {
    if tags.is_empty() || sentence_mqm.is_empty() {
        return Err(QeError::EmptyInput);
    }
    if tags.len() != sentence_mqm.len() {
        return Err(QeError::DegenerateInput(format!(
            "{} tag lines but {} sentence scores",
            tags.len(),
            sentence_mqm.len()
        )));
    }
    let mean = sentence_mqm.iter().sum::<f64>() / sentence_mqm.len() as f64;
    let count = |v: &[crate::corpus::Tag]| v.iter().filter(|t| t.is_bad()).count();
    let (mut bw, mut nw, mut bg, mut ng) = (0, 0, 0, 0);
    for t in tags {
        bw += count(&t.words);
        nw += t.words.len();
        bg += count(&t.gaps);
        ng += t.gaps.len();
    }
    let frac = |b: usize, n: usize| if n == 0 { 0.0 } else { b as f64 / n as f64 };
    Ok([mean, frac(bw, nw), frac(bg, ng), frac(bw + bg, nw + ng)])
}

/// Linear regression from document features to MQM. A single-element grid
/// (default `[0.0]`) is a plain fit; longer grids are cross-validated.
pub fn fit_doc_mqm(
    features: &[[f64; 4]],
    gold: &[f64],
    lambda_grid: &[f64],
    folds: usize,
    seed: u64,
) -> Result<RidgeModel> {
    if features.len() < 5 {
        return Err(QeError::DegenerateInput(format!(
            "need at least 5 documents, got {}",
            features.len()
        )));
    }
    let x: Vec<Vec<f64>> = features.iter().map(|f| f.to_vec()).collect();
    let names = DOC_FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    let model = match lambda_grid {
        [] => ridge_fit(&x, gold, 0.0, true)?,
        [l] => ridge_fit(&x, gold, *l, true)?,
        grid => ridge_cv(&x, gold, grid, folds.min(x.len()), seed, true)?.model,
    };
    Ok(model.with_names(names))
}

pub fn predict_doc_mqm(model: &RidgeModel, features: &[f64; 4]) -> f64 {
    model.predict_row(features)
}
