use super::ridge::{ridge_cv, ridge_fit, RidgeModel};
use crate::corpus::{PredictionSet, Stream};
use crate::error::{QeError, Result};

/// Named columns, one row per sentence.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    /// Reorders columns to `names`; fails if any is absent.
    pub fn select(&self, names: &[String]) -> Result<FeatureMatrix> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.names.iter().position(|m| m == n).ok_or_else(|| {
                    let (system, stream) = n.rsplit_once(':').unwrap_or((n.as_str(), "?"));
                    QeError::MissingStream {
                        system: system.to_owned(),
                        stream: stream.to_owned(),
                    }
                })
            })
            .collect::<Result<_>>()?;
        Ok(FeatureMatrix {
            names: names.to_vec(),
            rows: self
                .rows
                .iter()
                .map(|r| idx.iter().map(|&j| r[j]).collect())
                .collect(),
        })
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Per sentence and system: its sentence score when present, then the mean
/// BAD probability of each stream it provides. A stream a system lacks is
/// left out as a column, never filled in.
pub fn sentence_features(preds: &[PredictionSet]) -> Result<FeatureMatrix> {
    let Some(first) = preds.first() else {
        return Err(QeError::EmptyInput);
    };
    let n = first
        .sentence_scores
        .as_ref()
        .map(Vec::len)
        .or_else(|| first.word_probs.as_ref().map(Vec::len))
        .or_else(|| first.gap_probs.as_ref().map(Vec::len))
        .or_else(|| first.source_probs.as_ref().map(Vec::len))
        .ok_or(QeError::EmptyInput)?;
    let mut names = Vec::new();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for p in preds {
        if let Some(s) = &p.sentence_scores {
            names.push(format!("{}:score", p.system_id));
            cols.push(s.clone());
        }
        for stream in [Stream::Words, Stream::Gaps, Stream::Source] {
            if let Some(probs) = p.stream(stream) {
                names.push(format!("{}:{}", p.system_id, stream));
                cols.push(probs.iter().map(|r| mean(r)).collect());
            }
        }
    }
    for (name, c) in names.iter().zip(&cols) {
        if c.len() != n {
            return Err(QeError::DegenerateInput(format!(
                "feature `{name}` covers {} sentences, expected {n}",
                c.len()
            )));
        }
    }
    let rows = (0..n)
        .map(|i| cols.iter().map(|c| c[i]).collect())
        .collect();
    Ok(FeatureMatrix { names, rows })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SentenceFitConfig {
    pub lambda_grid: Vec<f64>,
    pub folds: usize,
    pub seed: u64,
}

impl Default for SentenceFitConfig {
    fn default() -> Self {
        SentenceFitConfig {
            lambda_grid: vec![0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0],
            folds: 10,
            seed: 0,
        }
    }
}

/// Ridge regression from sentence features to HTER.
pub fn fit_sentence_ensemble(
    features: &FeatureMatrix,
    targets: &[f64],
    cfg: &SentenceFitConfig,
) -> Result<RidgeModel> {
    let model = if cfg.lambda_grid.len() == 1 {
        ridge_fit(&features.rows, targets, cfg.lambda_grid[0], true)?
    } else {
        let k = cfg.folds.min(features.rows.len());
        ridge_cv(&features.rows, targets, &cfg.lambda_grid, k, cfg.seed, true)?.model
    };
    Ok(model.with_names(features.names.clone()))
}

/// Predicted HTER, clamped to [0, 1].
pub fn apply_sentence_ensemble(model: &RidgeModel, features: &FeatureMatrix) -> Result<Vec<f64>> {
    let x = features.select(&model.feature_names)?;
    Ok(model
        .predict(&x.rows)
        .into_iter()
        .map(|v| v.clamp(0.0, 1.0))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feature_counts_and_means() {
        let full = PredictionSet::new("a")
            .with_stream(Stream::Words, vec![vec![0.2, 0.4, 0.6]])
            .with_stream(Stream::Gaps, vec![vec![0.0; 4]])
            .with_stream(Stream::Source, vec![vec![1.0, 0.0]])
            .with_scores(vec![0.3]);
        let partial = PredictionSet::new("b").with_stream(Stream::Words, vec![vec![0.0, 0.0, 0.0]]);
        let f = sentence_features(&[full, partial]).unwrap();
        assert_eq!(
            f.names,
            vec!["a:score", "a:words", "a:gaps", "a:source", "b:words"]
        );
        let row = &f.rows[0];
        assert!((row[1] - 0.4).abs() < 1e-15);
        assert_eq!(row[2], 0.0);
        assert_eq!(row[4], 0.0);
    }

    #[test]
    fn predictions_clamped() {
        let f = FeatureMatrix {
            names: vec!["a:score".into()],
            rows: vec![vec![-1.0], vec![0.5], vec![3.0]],
        };
        let m = RidgeModel {
            coefficients: vec![1.0],
            intercept: 0.0,
            lambda: 0.0,
            feature_names: vec!["a:score".into()],
            fit_intercept: true,
        };
        assert_eq!(
            apply_sentence_ensemble(&m, &f).unwrap(),
            vec![0.0, 0.5, 1.0]
        );
        let other = FeatureMatrix {
            names: vec!["b:score".into()],
            rows: vec![vec![0.0]],
        };
        assert!(matches!(
            apply_sentence_ensemble(&m, &other),
            Err(QeError::MissingStream { .. })
        ));
    }

    #[test]
    fn recovers_linear_targets() {
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| vec![(i % 5) as f64 / 5.0, (i % 7) as f64 / 7.0])
            .collect();
        let y: Vec<f64> = rows.iter().map(|r| 0.1 + 0.3 * r[0] + 0.2 * r[1]).collect();
        let f = FeatureMatrix {
            names: vec!["a:score".into(), "b:words".into()],
            rows,
        };
        let m = fit_sentence_ensemble(&f, &y, &SentenceFitConfig::default()).unwrap();
        assert_eq!(m.lambda, 0.0);
        let p = apply_sentence_ensemble(&m, &f).unwrap();
        assert!(p.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-9));
    }
}
