//! Word-level and sentence-level evaluation metrics.
//!
//! BAD is the positive class throughout.

use crate::corpus::{SourceTags, Tag, TargetTags};
use crate::error::{QeError, Result};

/// `BAD` iff `p >= t`.
pub fn threshold(probs: &[f64], t: f64) -> Vec<Tag> {
    probs
        .iter()
        .map(|&p| if p >= t { Tag::Bad } else { Tag::Ok })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ContingencyTable {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ContingencyTable {
    pub fn from_tags(gold: &[Tag], pred: &[Tag]) -> Result<Self> {
        if gold.len() != pred.len() {
            return Err(QeError::DegenerateInput(format!(
                "gold has {} tags, prediction has {}",
                gold.len(),
                pred.len()
            )));
        }
        let mut t = ContingencyTable::default();
        for (&g, &p) in gold.iter().zip(pred) {
            t.add(g, p);
        }
        Ok(t)
    }

    #[inline]
    pub fn add(&mut self, gold: Tag, pred: Tag) {
        match (gold, pred) {
            (Tag::Bad, Tag::Bad) => self.tp += 1,
            (Tag::Ok, Tag::Bad) => self.fp += 1,
            (Tag::Ok, Tag::Ok) => self.tn += 1,
            (Tag::Bad, Tag::Ok) => self.fn_ += 1,
        }
    }

    pub fn merge(&mut self, other: &ContingencyTable) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.tn += other.tn;
        self.fn_ += other.fn_;
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// F1 of one class from (true positives, predicted count, gold count).
    fn class_f1(hits: u64, predicted: u64, gold: u64) -> f64 {
        if predicted == 0 && gold == 0 {
            return 1.0;
        }
        let precision = if predicted == 0 {
            0.0
        } else {
            hits as f64 / predicted as f64
        };
        let recall = if gold == 0 {
            0.0
        } else {
            hits as f64 / gold as f64
        };
        if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        }
    }

    pub fn f1_scores(&self) -> Result<F1Scores> {
        if self.total() == 0 {
            return Err(QeError::EmptyInput);
        }
        let f1_bad = Self::class_f1(self.tp, self.tp + self.fp, self.tp + self.fn_);
        let f1_ok = Self::class_f1(self.tn, self.tn + self.fn_, self.tn + self.fp);
        Ok(F1Scores {
            f1_ok,
            f1_bad,
            f1_mult: f1_ok * f1_bad,
        })
    }

    pub fn mcc(&self) -> Result<f64> {
        if self.total() == 0 {
            return Err(QeError::EmptyInput);
        }
        let (tp, fp, tn, fn_) = (
            self.tp as f64,
            self.fp as f64,
            self.tn as f64,
            self.fn_ as f64,
        );
        let factors = [tp + fp, tp + fn_, tn + fp, tn + fn_];
        if factors.iter().any(|&f| f == 0.0) {
            return Ok(0.0);
        }
        let denom = factors.iter().product::<f64>().sqrt();
        Ok((tp * tn - fp * fn_) / denom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F1Scores {
    pub f1_ok: f64,
    pub f1_bad: f64,
    pub f1_mult: f64,
}

pub fn f1_mult(gold: &[Tag], pred: &[Tag]) -> Result<F1Scores> {
    ContingencyTable::from_tags(gold, pred)?.f1_scores()
}

pub fn mcc(gold: &[Tag], pred: &[Tag]) -> Result<f64> {
    ContingencyTable::from_tags(gold, pred)?.mcc()
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(QeError::DegenerateInput(format!(
            "vectors of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(QeError::DegenerateInput("fewer than two points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(QeError::DegenerateInput("constant vector".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Which tag stream a word-level evaluation covers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EvalStream {
    /// Interleaved gaps and words, the shared-task "Target" column.
    #[default]
    Target,
    Words,
    Gaps,
    Source,
}

impl std::str::FromStr for EvalStream {
    type Err = QeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "target" => Ok(EvalStream::Target),
            "words" => Ok(EvalStream::Words),
            "gaps" => Ok(EvalStream::Gaps),
            "source" => Ok(EvalStream::Source),
            other => Err(QeError::Config(format!(
                "unknown evaluation stream `{other}`"
            ))),
        }
    }
}

/// Flattens target tags into the requested stream.
pub fn flatten_target(tags: &[TargetTags], stream: EvalStream) -> Vec<Tag> {
    let mut out = Vec::new();
    for t in tags {
        match stream {
            EvalStream::Target => out.extend(t.interleaved()),
            EvalStream::Words => out.extend_from_slice(&t.words),
            EvalStream::Gaps => out.extend_from_slice(&t.gaps),
            EvalStream::Source => {}
        }
    }
    out
}

pub fn flatten_source(tags: &[SourceTags]) -> Vec<Tag> {
    tags.iter().flat_map(|t| t.0.iter().copied()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TagReport {
    pub f1: F1Scores,
    pub mcc: f64,
    pub table: ContingencyTable,
}

/// F1-MULT and MCC over a flat tag stream.
pub fn tag_report(gold: &[Tag], pred: &[Tag]) -> Result<TagReport> {
    let table = ContingencyTable::from_tags(gold, pred)?;
    Ok(TagReport {
        f1: table.f1_scores()?,
        mcc: table.mcc()?,
        table,
    })
}
