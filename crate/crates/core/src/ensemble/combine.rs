use std::io::{BufRead, Write};

use crate::corpus::{PredictionSet, Stream};
use crate::error::{QeError, Result};

/// One system's probabilities for one stream.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemStream {
    pub system_id: String,
    pub probs: Vec<Vec<f64>>,
}

impl SystemStream {
    pub fn new(system_id: impl Into<String>, probs: Vec<Vec<f64>>) -> Self {
        SystemStream {
            system_id: system_id.into(),
            probs,
        }
    }

    /// Restriction to the given sentence indices, in that order.
    pub fn subset(&self, idx: &[usize]) -> SystemStream {
        SystemStream {
            system_id: self.system_id.clone(),
            probs: idx.iter().map(|&i| self.probs[i].clone()).collect(),
        }
    }
}

/// The systems that provide `stream`, in input order.
pub fn systems_with_stream(preds: &[PredictionSet], stream: Stream) -> Vec<SystemStream> {
    preds
        .iter()
        .filter_map(|p| {
            p.stream(stream)
                .map(|probs| SystemStream::new(p.system_id.clone(), probs.clone()))
        })
        .collect()
}

/// Every listed system, failing if one lacks `stream`.
pub fn require_stream(preds: &[PredictionSet], stream: Stream) -> Result<Vec<SystemStream>> {
    preds
        .iter()
        .map(|p| {
            p.stream(stream)
                .map(|probs| SystemStream::new(p.system_id.clone(), probs.clone()))
                .ok_or_else(|| QeError::MissingStream {
                    system: p.system_id.clone(),
                    stream: stream.to_string(),
                })
        })
        .collect()
}

/// Nonnegative per-system weights for one stream. Combination uses
/// `w / sum(w)`, so only the direction matters.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    pub systems: Vec<String>,
    pub weights: Vec<f64>,
    pub stream: Stream,
}

impl WeightVector {
    pub fn one_hot(systems: Vec<String>, idx: usize, stream: Stream) -> Self {
        let mut weights = vec![0.0; systems.len()];
        weights[idx] = 1.0;
        WeightVector {
            systems,
            weights,
            stream,
        }
    }

    pub fn uniform(systems: Vec<String>, stream: Stream) -> Self {
        let weights = vec![1.0; systems.len()];
        WeightVector {
            systems,
            weights,
            stream,
        }
    }

    pub fn normalized(&self) -> Result<Vec<f64>> {
        normalize(&self.weights)
    }

    /// `system_id<TAB>weight` lines.
    pub fn write_to(&self, w: &mut dyn Write) -> std::io::Result<()> {
        for (s, v) in self.systems.iter().zip(&self.weights) {
            writeln!(w, "{s}\t{v}")?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut dyn BufRead, stream: Stream, origin: &str) -> Result<Self> {
        let mut systems = Vec::new();
        let mut weights = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| QeError::io(origin, e))?;
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parsed = line.split_once('\t').and_then(|(s, v)| {
                v.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite() && *v >= 0.0)
                    .map(|v| (s.to_owned(), v))
            });
            let (s, v) = parsed.ok_or_else(|| QeError::Parse {
                file: origin.to_owned(),
                line: i + 1,
                detail: "expected system_id<TAB>nonnegative weight".into(),
            })?;
            systems.push(s);
            weights.push(v);
        }
        Ok(WeightVector {
            systems,
            weights,
            stream,
        })
    }
}

pub(crate) fn normalize(weights: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(QeError::ZeroWeights);
    }
    Ok(weights.iter().map(|w| w / total).collect())
}

/// Convex combination of system probabilities: `p = sum_s (w_s / sum w) p_s`.
///
/// Systems are matched to weights by id.
pub fn combine_word(systems: &[SystemStream], weights: &WeightVector) -> Result<Vec<Vec<f64>>> {
    let norm = weights.normalized()?;
    let cols: Vec<&SystemStream> = weights
        .systems
        .iter()
        .map(|id| {
            systems
                .iter()
                .find(|s| &s.system_id == id)
                .ok_or_else(|| QeError::MissingStream {
                    system: id.clone(),
                    stream: weights.stream.to_string(),
                })
        })
        .collect::<Result<_>>()?;
    let Some(first) = cols.first() else {
        return Err(QeError::ZeroWeights);
    };
    let n_sent = first.probs.len();
    for c in &cols {
        if c.probs.len() != n_sent
            || c.probs
                .iter()
                .zip(&first.probs)
                .any(|(a, b)| a.len() != b.len())
        {
            return Err(QeError::DegenerateInput(format!(
                "system `{}` disagrees on stream lengths",
                c.system_id
            )));
        }
    }
    Ok((0..n_sent)
        .map(|s| {
            (0..first.probs[s].len())
                .map(|t| mix(&norm, cols.iter().map(|c| c.probs[s][t])))
                .collect()
        })
        .collect())
}

/// Weighted sum with already-normalized weights, clamped against rounding.
#[inline]
pub(crate) fn mix(norm: &[f64], values: impl Iterator<Item = f64>) -> f64 {
    let mut acc = 0.0;
    for (w, v) in norm.iter().zip(values) {
        acc += w * v;
    }
    acc.clamp(0.0, 1.0)
}
