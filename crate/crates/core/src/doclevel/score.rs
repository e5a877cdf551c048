use rayon::prelude::*;

use super::spans::{Annotation, Document, Severity};
use crate::error::{QeError, Result};

/// Positive-class counts over character units.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UnitCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl UnitCounts {
    pub fn merge(&mut self, o: &UnitCounts) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.fn_ += o.fn_;
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// `2TP / (2TP + FP + FN)`; 1 when neither side marks anything.
    pub fn f1(&self) -> f64 {
        let d = 2 * self.tp + self.fp + self.fn_;
        if d == 0 {
            1.0
        } else {
            2.0 * self.tp as f64 / d as f64
        }
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Per sentence: `len` character units followed by `len + 1` border units.
fn coverage(doc: &Document, anns: &[Annotation]) -> Result<Vec<Vec<bool>>> {
    let mut cov: Vec<Vec<bool>> = (0..doc.sentences.len())
        .map(|s| vec![false; 2 * doc.sentence_len(s) + 1])
        .collect();
    for a in anns {
        for span in &a.spans {
            doc.check_span(span)?;
            let row = &mut cov[span.sent];
            if span.is_empty() {
                row[doc.sentence_len(span.sent) + span.start] = true;
            } else {
                row[span.start..span.end].iter_mut().for_each(|c| *c = true);
            }
        }
    }
    Ok(cov)
}

pub fn annotation_counts(
    doc: &Document,
    gold: &[Annotation],
    pred: &[Annotation],
) -> Result<UnitCounts> {
    let g = coverage(doc, gold)?;
    let p = coverage(doc, pred)?;
    let mut c = UnitCounts::default();
    for (gr, pr) in g.iter().zip(&p) {
        for (&a, &b) in gr.iter().zip(pr) {
            match (a, b) {
                (true, true) => c.tp += 1,
                (false, true) => c.fp += 1,
                (true, false) => c.fn_ += 1,
                _ => {}
            }
        }
    }
    Ok(c)
}

/// Character-level F1 of one document.
pub fn annotation_f1(gold: &[Annotation], pred: &[Annotation], doc: &Document) -> Result<f64> {
    Ok(annotation_counts(doc, gold, pred)?.f1())
}

/// Micro-averaged over documents.
pub fn corpus_annotation_counts(
    docs: &[Document],
    gold: &[Vec<Annotation>],
    pred: &[Vec<Annotation>],
) -> Result<UnitCounts> {
    if docs.len() != gold.len() || docs.len() != pred.len() {
        return Err(QeError::DegenerateInput(format!(
            "{} documents, {} gold and {} predicted annotation sets",
            docs.len(),
            gold.len(),
            pred.len()
        )));
    }
    let per_doc: Vec<UnitCounts> = docs
        .par_iter()
        .zip(gold)
        .zip(pred)
        .map(|((d, g), p)| annotation_counts(d, g, p))
        .collect::<Result<_>>()?;
    let mut total = UnitCounts::default();
    for c in &per_doc {
        total.merge(c);
    }
    Ok(total)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AnnotationStats {
    pub total: usize,
    pub multi_span: usize,
    /// Multi-span annotations whose spans fall in more than one sentence.
    pub cross_sentence: usize,
    pub severity: [usize; 3],
}

impl AnnotationStats {
    pub fn percent(&self, s: Severity) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.severity[s.index()] as f64 / self.total as f64
        }
    }
}

pub fn annotation_stats<'a>(anns: impl IntoIterator<Item = &'a Annotation>) -> AnnotationStats {
    let mut st = AnnotationStats::default();
    for a in anns {
        st.total += 1;
        st.severity[a.severity.index()] += 1;
        if a.spans.len() > 1 {
            st.multi_span += 1;
            if a.spans.iter().any(|s| s.sent != a.spans[0].sent) {
                st.cross_sentence += 1;
            }
        }
    }
    st
}
