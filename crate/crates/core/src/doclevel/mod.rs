//! Document-level quality: character-span annotations, their conversion to
//! and from token/gap tags, closed-form MQM and its regression from tag
//! statistics.

mod io;
mod mqm;
mod score;
mod spans;

pub use io::{
    format_annotation, load_documents, read_annotation_lines, read_annotations, read_doc_features,
    sentence_token_counts, split_by_docs, write_annotations, write_doc_features, write_documents,
};
pub use mqm::{
    doc_mqm_features, fit_doc_mqm, mqm_closed_form, predict_doc_mqm, severity_counts, MqmWeights,
    SeverityCounts, DOC_FEATURE_NAMES,
};
pub use score::{
    annotation_counts, annotation_f1, annotation_stats, corpus_annotation_counts, AnnotationStats,
    UnitCounts,
};
pub use spans::{
    annotations_to_tags, sort_annotations, tags_to_annotations, tokenize_with_offsets, Annotation,
    Document, Severity, Span,
};

use crate::error::Result;

/// Gold document MQM: annotation counts against the document's token count.
pub fn document_mqm(
    doc: &Document,
    annotations: &[Annotation],
    weights: &MqmWeights,
    floor: Option<f64>,
) -> Result<f64> {
    mqm_closed_form(severity_counts(annotations), doc.n_tokens(), weights, floor)
}
