use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::mqm::DOC_FEATURE_NAMES;
use super::spans::{Annotation, Document, Severity, Span};
use crate::error::{QeError, Result};

fn perr(path: &Path, line: usize, detail: impl Into<String>) -> QeError {
    QeError::Parse {
        file: path.display().to_string(),
        line: line + 1,
        detail: detail.into(),
    }
}

/// Reads a document manifest of `doc_id<TAB>path` lines. Each document file
/// holds one raw sentence per line; relative paths resolve against the
/// manifest's directory.
pub fn load_documents(manifest: &Path) -> Result<Vec<Document>> {
    let text = fs::read_to_string(manifest).map_err(|e| QeError::io(manifest, e))?;
    let base = manifest.parent().unwrap_or_else(|| Path::new("."));
    let mut seen = HashMap::new();
    let mut docs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, p) = line
            .split_once('\t')
            .ok_or_else(|| perr(manifest, i, "expected doc_id<TAB>path"))?;
        if seen.insert(id.to_owned(), i).is_some() {
            return Err(perr(manifest, i, format!("duplicate document `{id}`")));
        }
        let file = base.join(p.trim());
        let body = fs::read_to_string(&file).map_err(|e| QeError::io(&file, e))?;
        let sentences = body
            .lines()
            .map(|l| l.trim_end_matches('\r').to_owned())
            .collect();
        docs.push(Document::new(id, sentences));
    }
    Ok(docs)
}

/// Writes documents as one file per document plus a manifest.
pub fn write_documents(dir: &Path, docs: &[Document]) -> Result<std::path::PathBuf> {
    fs::create_dir_all(dir).map_err(|e| QeError::io(dir, e))?;
    let mut manifest = String::new();
    for d in docs {
        let name = format!("{}.txt", d.id);
        let p = dir.join(&name);
        let mut body = d.sentences.join("\n");
        body.push('\n');
        fs::write(&p, body).map_err(|e| QeError::io(&p, e))?;
        manifest.push_str(&format!("{}\t{}\n", d.id, name));
    }
    let mp = dir.join("docs.tsv");
    fs::write(&mp, manifest).map_err(|e| QeError::io(&mp, e))?;
    Ok(mp)
}

/// Reads `doc_id<TAB>severity<TAB>sent:start-end[,...]` lines in file order.
pub fn read_annotation_lines(path: &Path) -> Result<Vec<(String, Annotation)>> {
    let text = fs::read_to_string(path).map_err(|e| QeError::io(path, e))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            return Err(perr(path, i, "expected doc_id<TAB>severity<TAB>spans"));
        }
        let severity: Severity = f[1].parse().map_err(|e: String| perr(path, i, e))?;
        let spans = f[2]
            .split(',')
            .map(|s| s.parse::<Span>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| perr(path, i, e))?;
        let ann = Annotation::new(severity, spans).map_err(|e| perr(path, i, e))?;
        out.push((f[0].to_owned(), ann));
    }
    Ok(out)
}

/// Groups annotations by document, in the documents' order. Every span is
/// checked against its document.
pub fn read_annotations(path: &Path, docs: &[Document]) -> Result<Vec<Vec<Annotation>>> {
    let index: HashMap<&str, usize> = docs
        .iter()
        .enumerate()
        .map(|(i, d)| (d.id.as_str(), i))
        .collect();
    let mut out = vec![Vec::new(); docs.len()];
    for (id, ann) in read_annotation_lines(path)? {
        let &d = index.get(id.as_str()).ok_or_else(|| {
            QeError::Index(format!("{}: unknown document `{id}`", path.display()))
        })?;
        for s in &ann.spans {
            docs[d].check_span(s)?;
        }
        out[d].push(ann);
    }
    Ok(out)
}

pub fn format_annotation(doc_id: &str, a: &Annotation) -> String {
    let spans: Vec<String> = a.spans.iter().map(|s| s.to_string()).collect();
    format!("{doc_id}\t{}\t{}", a.severity, spans.join(","))
}

pub fn write_annotations(path: &Path, docs: &[Document], anns: &[Vec<Annotation>]) -> Result<()> {
    let mut buf = Vec::new();
    for (d, list) in docs.iter().zip(anns) {
        for a in list {
            writeln!(buf, "{}", format_annotation(&d.id, a)).expect("in-memory write");
        }
    }
    fs::write(path, buf).map_err(|e| QeError::io(path, e))
}

/// Writes `doc_id<TAB>f1<TAB>f2<TAB>f3<TAB>f4` rows under a `#` header.
pub fn write_doc_features(path: &Path, rows: &[(String, [f64; 4])]) -> Result<()> {
    let mut buf = format!("#doc_id\t{}\n", DOC_FEATURE_NAMES.join("\t"));
    for (id, f) in rows {
        buf.push_str(id);
        for v in f {
            buf.push_str(&format!("\t{v}"));
        }
        buf.push('\n');
    }
    fs::write(path, buf).map_err(|e| QeError::io(path, e))
}

pub fn read_doc_features(path: &Path) -> Result<Vec<(String, [f64; 4])>> {
    let text = fs::read_to_string(path).map_err(|e| QeError::io(path, e))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 5 {
            return Err(perr(path, i, "expected doc_id and 4 feature values"));
        }
        let mut row = [0.0; 4];
        for (slot, v) in row.iter_mut().zip(&f[1..]) {
            *slot = v
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| perr(path, i, format!("invalid number `{v}`")))?;
        }
        out.push((f[0].to_owned(), row));
    }
    Ok(out)
}

/// Splits a flat per-sentence list into per-document chunks.
pub fn split_by_docs<T: Clone>(flat: &[T], docs: &[Document]) -> Result<Vec<Vec<T>>> {
    let total: usize = docs.iter().map(|d| d.sentences.len()).sum();
    if flat.len() != total {
        return Err(QeError::DegenerateInput(format!(
            "{} sentence rows for {total} document sentences",
            flat.len()
        )));
    }
    let mut out = Vec::with_capacity(docs.len());
    let mut at = 0;
    for d in docs {
        out.push(flat[at..at + d.sentences.len()].to_vec());
        at += d.sentences.len();
    }
    Ok(out)
}

/// Token counts of every sentence, documents concatenated.
pub fn sentence_token_counts(docs: &[Document]) -> Vec<usize> {
    docs.iter()
        .flat_map(|d| d.token_offsets.iter().map(Vec::len))
        .collect()
}
