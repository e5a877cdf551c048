//! Word-level ensemble strategies, selectable by name.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use super::combine::{combine_word, SystemStream, WeightVector};
use super::word::{fit_word_ensemble, WordFitConfig};
use crate::corpus::{Stream, Tag};
use crate::error::{QeError, Result};
use crate::linearqe::{
    predict_sequence, LabeledInstance, LinearModel, MiraTrainer, SequenceInstance, SequenceTrainer,
};

/// A way of learning to combine several systems' probabilities for one stream.
pub trait WordEnsembler: Send + Sync {
    fn name(&self) -> &'static str;

    fn fit(
        &self,
        systems: &[SystemStream],
        gold: &[Vec<Tag>],
        stream: Stream,
        cfg: &WordFitConfig,
    ) -> Result<Box<dyn FittedWordEnsemble>>;

    /// Restores a fitted ensemble from the body written by
    /// [`FittedWordEnsemble::write_body`].
    fn read(
        &self,
        body: &mut dyn BufRead,
        header: &EnsembleHeader,
        origin: &str,
    ) -> Result<Box<dyn FittedWordEnsemble>>;
}

pub trait FittedWordEnsemble: Send + Sync {
    fn method(&self) -> &'static str;

    fn stream(&self) -> Stream;

    /// Tokens whose combined probability reaches this are BAD.
    fn threshold(&self) -> f64;

    /// Combined P(BAD) per sentence and token.
    fn predict(&self, systems: &[SystemStream]) -> Result<Vec<Vec<f64>>>;

    fn write_body(&self, w: &mut dyn Write) -> std::io::Result<()>;

    /// Convex-combination weights, for strategies that have them.
    fn weights(&self) -> Option<&WeightVector> {
        None
    }
}

/// `#key=value` lines at the top of an ensemble file.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleHeader {
    pub method: String,
    pub stream: Stream,
    pub threshold: f64,
}

pub fn write_ensemble(fitted: &dyn FittedWordEnsemble, w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "#method={}", fitted.method())?;
    writeln!(w, "#stream={}", fitted.stream())?;
    writeln!(w, "#threshold={}", fitted.threshold())?;
    fitted.write_body(w)
}

pub fn save_ensemble(fitted: &dyn FittedWordEnsemble, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| QeError::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_ensemble(fitted, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| QeError::io(path, e))
}

/// Convex combination with fixed weights (Powell-fitted or uniform).
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexEnsemble {
    method: &'static str,
    pub weights: WeightVector,
    pub threshold: f64,
}

impl FittedWordEnsemble for ConvexEnsemble {
    fn method(&self) -> &'static str {
        self.method
    }

    fn stream(&self) -> Stream {
        self.weights.stream
    }

    fn threshold(&self) -> f64 {
        self.threshold
    }

    fn predict(&self, systems: &[SystemStream]) -> Result<Vec<Vec<f64>>> {
        combine_word(systems, &self.weights)
    }

    fn write_body(&self, w: &mut dyn Write) -> std::io::Result<()> {
        self.weights.write_to(w)
    }

    fn weights(&self) -> Option<&WeightVector> {
        Some(&self.weights)
    }
}

/// Convex combination with weights tuned by Powell's method on F1-MULT.
pub struct PowellEnsembler;

impl WordEnsembler for PowellEnsembler {
    fn name(&self) -> &'static str {
        "powell"
    }

    fn fit(
        &self,
        systems: &[SystemStream],
        gold: &[Vec<Tag>],
        stream: Stream,
        cfg: &WordFitConfig,
    ) -> Result<Box<dyn FittedWordEnsemble>> {
        let fit = fit_word_ensemble(systems, gold, stream, cfg)?;
        Ok(Box::new(ConvexEnsemble {
            method: self.name(),
            weights: fit.weights,
            threshold: fit.threshold,
        }))
    }

    fn read(
        &self,
        body: &mut dyn BufRead,
        header: &EnsembleHeader,
        origin: &str,
    ) -> Result<Box<dyn FittedWordEnsemble>> {
        Ok(Box::new(ConvexEnsemble {
            method: self.name(),
            weights: WeightVector::read_from(body, header.stream, origin)?,
            threshold: header.threshold,
        }))
    }
}

/// Unweighted mean of all systems.
pub struct AverageEnsembler;

impl WordEnsembler for AverageEnsembler {
    fn name(&self) -> &'static str {
        "average"
    }

    fn fit(
        &self,
        systems: &[SystemStream],
        _gold: &[Vec<Tag>],
        stream: Stream,
        cfg: &WordFitConfig,
    ) -> Result<Box<dyn FittedWordEnsemble>> {
        if systems.is_empty() {
            return Err(QeError::MissingStream {
                system: "<any>".into(),
                stream: stream.to_string(),
            });
        }
        Ok(Box::new(ConvexEnsemble {
            method: self.name(),
            weights: WeightVector::uniform(
                systems.iter().map(|s| s.system_id.clone()).collect(),
                stream,
            ),
            threshold: cfg.threshold,
        }))
    }

    fn read(
        &self,
        body: &mut dyn BufRead,
        header: &EnsembleHeader,
        origin: &str,
    ) -> Result<Box<dyn FittedWordEnsemble>> {
        Ok(Box::new(ConvexEnsemble {
            method: self.name(),
            weights: WeightVector::read_from(body, header.stream, origin)?,
            threshold: header.threshold,
        }))
    }
}

/// The linear sequential tagger trained on the systems' binned
/// probabilities as features.
pub struct StackedLinearEnsembler;

/// Builds stacked-only instances, one per sentence.
pub fn stacked_instances(
    systems: &[SystemStream],
    order: &[String],
) -> Result<Vec<SequenceInstance>> {
    let cols: Vec<&SystemStream> = order
        .iter()
        .map(|id| {
            systems
                .iter()
                .find(|s| &s.system_id == id)
                .ok_or_else(|| QeError::MissingStream {
                    system: id.clone(),
                    stream: "stacked".into(),
                })
        })
        .collect::<Result<_>>()?;
    let n = cols.first().map_or(0, |c| c.probs.len());
    (0..n)
        .map(|i| {
            let len = cols[0].probs[i].len();
            cols.iter()
                .try_fold(SequenceInstance::blank(len), |inst, c| {
                    inst.with_stacked(c.system_id.clone(), c.probs[i].clone())
                })
        })
        .collect()
}

pub struct StackedLinearEnsemble {
    pub model: LinearModel,
}

impl FittedWordEnsemble for StackedLinearEnsemble {
    fn method(&self) -> &'static str {
        "stacked-linear"
    }

    fn stream(&self) -> Stream {
        self.model.stream
    }

    fn threshold(&self) -> f64 {
        0.5
    }

    fn predict(&self, systems: &[SystemStream]) -> Result<Vec<Vec<f64>>> {
        Ok(stacked_instances(systems, &self.model.systems)?
            .iter()
            .map(|inst| predict_sequence(&self.model, inst).probs)
            .collect())
    }

    fn write_body(&self, w: &mut dyn Write) -> std::io::Result<()> {
        self.model.write_to(w)
    }
}

impl WordEnsembler for StackedLinearEnsembler {
    fn name(&self) -> &'static str {
        "stacked-linear"
    }

    fn fit(
        &self,
        systems: &[SystemStream],
        gold: &[Vec<Tag>],
        stream: Stream,
        cfg: &WordFitConfig,
    ) -> Result<Box<dyn FittedWordEnsemble>> {
        if systems.is_empty() {
            return Err(QeError::MissingStream {
                system: "<any>".into(),
                stream: stream.to_string(),
            });
        }
        let order: Vec<String> = systems.iter().map(|s| s.system_id.clone()).collect();
        let data: Vec<LabeledInstance> = stacked_instances(systems, &order)?
            .into_iter()
            .zip(gold)
            .map(|(inst, g)| LabeledInstance {
                inst,
                gold: g.clone(),
            })
            .collect();
        let mut trainer = MiraTrainer::new(
            cfg.stacking.features.clone(),
            cfg.stacking.mira.clone(),
            stream,
        );
        trainer.gamma = cfg.stacking.gamma;
        let mut model = trainer.train(&data)?;
        model.systems = order;
        Ok(Box::new(StackedLinearEnsemble { model }))
    }

    fn read(
        &self,
        body: &mut dyn BufRead,
        _header: &EnsembleHeader,
        origin: &str,
    ) -> Result<Box<dyn FittedWordEnsemble>> {
        Ok(Box::new(StackedLinearEnsemble {
            model: LinearModel::read_from(body, origin)?,
        }))
    }
}

/// Name-indexed collection of word-level ensemble strategies.
#[derive(Clone, Default)]
pub struct EnsemblerRegistry {
    entries: BTreeMap<&'static str, Arc<dyn WordEnsembler>>,
}

impl EnsemblerRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// `powell`, `average` and `stacked-linear`.
    pub fn with_defaults() -> Self {
        let mut r = Self::new();
        r.register(Arc::new(PowellEnsembler));
        r.register(Arc::new(AverageEnsembler));
        r.register(Arc::new(StackedLinearEnsembler));
        r
    }

    pub fn register(&mut self, e: Arc<dyn WordEnsembler>) -> Option<Arc<dyn WordEnsembler>> {
        self.entries.insert(e.name(), e)
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn WordEnsembler>> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| QeError::UnknownMethod(name.to_owned()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    /// Reads an ensemble file, dispatching on its `#method=` header.
    pub fn load(&self, path: &Path) -> Result<Box<dyn FittedWordEnsemble>> {
        let text = fs::read_to_string(path).map_err(|e| QeError::io(path, e))?;
        self.parse(&text, &path.display().to_string())
    }

    pub fn parse(&self, text: &str, origin: &str) -> Result<Box<dyn FittedWordEnsemble>> {
        let mut method = None;
        let mut stream = Stream::Words;
        let mut threshold = 0.5;
        for line in text.lines() {
            let Some(h) = line.strip_prefix('#') else {
                continue;
            };
            let Some((k, v)) = h.split_once('=') else {
                continue;
            };
            match k {
                "method" => method = Some(v.trim().to_owned()),
                "stream" => stream = v.trim().parse()?,
                "threshold" => {
                    threshold = v.trim().parse().map_err(|_| QeError::Parse {
                        file: origin.to_owned(),
                        line: 0,
                        detail: format!("invalid threshold `{v}`"),
                    })?
                }
                _ => {}
            }
        }
        let method = method.ok_or_else(|| QeError::Parse {
            file: origin.to_owned(),
            line: 1,
            detail: "missing #method= header".into(),
        })?;
        let header = EnsembleHeader {
            method: method.clone(),
            stream,
            threshold,
        };
        self.get(&method)?
            .read(&mut text.as_bytes(), &header, origin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> (Vec<SystemStream>, Vec<Vec<Tag>>) {
        let gold = vec![
            vec![Tag::Ok, Tag::Bad, Tag::Ok],
            vec![Tag::Bad, Tag::Ok],
            vec![Tag::Ok, Tag::Bad],
        ];
        let good: Vec<Vec<f64>> = gold
            .iter()
            .map(|r| {
                r.iter()
                    .map(|t| if t.is_bad() { 0.8 } else { 0.3 })
                    .collect()
            })
            .collect();
        let noise: Vec<Vec<f64>> = gold
            .iter()
            .map(|r| r.iter().enumerate().map(|(i, _)| (i % 2) as f64).collect())
            .collect();
        (
            vec![
                SystemStream::new("good", good),
                SystemStream::new("noise", noise),
            ],
            gold,
        )
    }

    #[test]
    fn registry_lookup() {
        let r = EnsemblerRegistry::with_defaults();
        assert_eq!(r.names(), vec!["average", "powell", "stacked-linear"]);
        assert!(matches!(r.get("nope"), Err(QeError::UnknownMethod(_))));
    }

    #[test]
    fn every_strategy_round_trips_through_text() {
        let r = EnsemblerRegistry::with_defaults();
        let (systems, gold) = data();
        let cfg = WordFitConfig::default();
        for name in r.names() {
            let fitted = r
                .get(name)
                .unwrap()
                .fit(&systems, &gold, Stream::Words, &cfg)
                .unwrap();
            let mut buf = Vec::new();
            write_ensemble(fitted.as_ref(), &mut buf).unwrap();
            let text = String::from_utf8(buf).unwrap();
            let back = r.parse(&text, "mem").unwrap();
            assert_eq!(back.method(), name);
            assert_eq!(back.threshold(), fitted.threshold());
            assert_eq!(
                back.predict(&systems).unwrap(),
                fitted.predict(&systems).unwrap()
            );
        }
    }

    #[test]
    fn stacked_linear_learns_the_good_system() {
        let (systems, gold) = data();
        let fitted = StackedLinearEnsembler
            .fit(&systems, &gold, Stream::Words, &WordFitConfig::default())
            .unwrap();
        let probs = fitted.predict(&systems).unwrap();
        for (p, g) in probs.iter().zip(&gold) {
            assert_eq!(&crate::metrics::threshold(p, fitted.threshold()), g);
        }
    }
}
