use std::fmt;
use std::str::FromStr;

use crate::corpus::{Tag, TargetTags};
use crate::error::{QeError, Result};

/// Token intervals of a sentence in character (not byte) offsets: maximal
/// runs of non-whitespace.
pub fn tokenize_with_offsets(sentence: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    let mut n = 0;
    for (i, c) in sentence.chars().enumerate() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, i));
                start = None;
            }
            _ => {}
        }
        n = i + 1;
    }
    if let Some(s) = start {
        out.push((s, n));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub sentences: Vec<String>,
    pub token_offsets: Vec<Vec<(usize, usize)>>,
    char_lens: Vec<usize>,
}

impl Document {
    pub fn new(id: impl Into<String>, sentences: Vec<String>) -> Self {
        let token_offsets = sentences.iter().map(|s| tokenize_with_offsets(s)).collect();
        let char_lens = sentences.iter().map(|s| s.chars().count()).collect();
        Document {
            id: id.into(),
            sentences,
            token_offsets,
            char_lens,
        }
    }

    pub fn sentence_len(&self, sent: usize) -> usize {
        self.char_lens[sent]
    }

    pub fn n_tokens(&self) -> usize {
        self.token_offsets.iter().map(Vec::len).sum()
    }

    /// Character offsets bounding gap `g` of sentence `sent`: the end of the
    /// token before it (or 0) and the start of the token after it (or the
    /// sentence length).
    pub fn gap_border(&self, sent: usize, g: usize) -> (usize, usize) {
        let toks = &self.token_offsets[sent];
        let left = if g == 0 { 0 } else { toks[g - 1].1 };
        let right = toks.get(g).map_or(self.char_lens[sent], |t| t.0);
        (left, right)
    }

    fn token_text(&self, sent: usize, tok: usize) -> String {
        let (a, b) = self.token_offsets[sent][tok];
        self.sentences[sent].chars().skip(a).take(b - a).collect()
    }

    /// Tokens of every sentence.
    pub fn tokens(&self) -> Vec<Vec<String>> {
        (0..self.sentences.len())
            .map(|s| {
                (0..self.token_offsets[s].len())
                    .map(|t| self.token_text(s, t))
                    .collect()
            })
            .collect()
    }

    /// Checks a span against this document's bounds.
    pub fn check_span(&self, span: &Span) -> Result<()> {
        let oob = |detail: String| QeError::SpanOutOfBounds {
            span: span.to_string(),
            detail: format!("{detail} in document `{}`", self.id),
        };
        if span.sent >= self.sentences.len() {
            return Err(oob(format!("only {} sentences", self.sentences.len())));
        }
        if span.start > span.end || span.end > self.char_lens[span.sent] {
            return Err(oob(format!(
                "sentence has {} characters",
                self.char_lens[span.sent]
            )));
        }
        if span.start == span.end
            && self.token_offsets[span.sent]
                .iter()
                .any(|&(a, b)| a < span.start && span.start < b)
        {
            return Err(oob("zero-width span inside a token".into()));
        }
        Ok(())
    }
}

/// A contiguous block of characters within one sentence, end exclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub sent: usize,
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(sent: usize, start: usize, end: usize) -> Self {
        Span { sent, start, end }
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    fn overlaps(&self, a: usize, b: usize) -> bool {
        self.start.max(a) < self.end.min(b)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}-{}", self.sent, self.start, self.end)
    }
}

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("invalid span `{s}`, expected sent:start-end");
        let (sent, range) = s.trim().split_once(':').ok_or_else(bad)?;
        let (a, b) = range.split_once('-').ok_or_else(bad)?;
        let num = |x: &str| x.parse::<usize>().map_err(|_| bad());
        Ok(Span::new(num(sent)?, num(a)?, num(b)?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Minor,
    Major,
    Critical,
}

impl Severity {
    pub const ALL: [Severity; 3] = [Severity::Minor, Severity::Major, Severity::Critical];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Minor => "minor",
            Severity::Major => "major",
            Severity::Critical => "critical",
        })
    }
}

impl FromStr for Severity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "minor" => Ok(Severity::Minor),
            "major" => Ok(Severity::Major),
            "critical" => Ok(Severity::Critical),
            other => Err(format!("unknown severity `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Annotation {
    pub severity: Severity,
    pub spans: Vec<Span>,
}

impl Annotation {
    /// Sorts the spans; rejects an empty span list and overlapping spans.
    pub fn new(severity: Severity, mut spans: Vec<Span>) -> std::result::Result<Self, String> {
        if spans.is_empty() {
            return Err("annotation without spans".into());
        }
        spans.sort();
        for w in spans.windows(2) {
            if w[0].sent == w[1].sent && w[1].start < w[0].end {
                return Err(format!("overlapping spans {} and {}", w[0], w[1]));
            }
        }
        Ok(Annotation { severity, spans })
    }

    pub fn single(severity: Severity, span: Span) -> Self {
        Annotation {
            severity,
            spans: vec![span],
        }
    }

    fn sort_key(&self) -> (Span, Severity) {
        (self.spans[0], self.severity)
    }
}

/// Sorts annotations by their first span.
pub fn sort_annotations(anns: &mut [Annotation]) {
    anns.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()).then_with(|| a.cmp(b)));
}

/// Token BAD iff some span shares a character with it; gap BAD iff a span
/// starts and ends exactly on its borders.
pub fn annotations_to_tags(doc: &Document, annotations: &[Annotation]) -> Result<Vec<TargetTags>> {
    let mut out: Vec<TargetTags> = doc
        .token_offsets
        .iter()
        .map(|t| TargetTags::all_ok(t.len()))
        .collect();
    for ann in annotations {
        for span in &ann.spans {
            doc.check_span(span)?;
            let tags = &mut out[span.sent];
            for (t, &(a, b)) in doc.token_offsets[span.sent].iter().enumerate() {
                if span.overlaps(a, b) {
                    tags.words[t] = Tag::Bad;
                }
            }
            for g in 0..tags.gaps.len() {
                if doc.gap_border(span.sent, g) == (span.start, span.end) {
                    tags.gaps[g] = Tag::Bad;
                }
            }
        }
    }
    Ok(out)
}

/// Each maximal run of BAD tokens becomes one single-span annotation, each
/// BAD gap its own annotation over the gap's borders. Nothing is merged.
pub fn tags_to_annotations(
    doc: &Document,
    tags: &[TargetTags],
    severity: Severity,
) -> Result<Vec<Annotation>> {
    if tags.len() != doc.sentences.len() {
        return Err(QeError::DegenerateInput(format!(
            "document `{}` has {} sentences but {} tag lines",
            doc.id,
            doc.sentences.len(),
            tags.len()
        )));
    }
    let mut out = Vec::new();
    for (s, t) in tags.iter().enumerate() {
        let toks = &doc.token_offsets[s];
        if t.mt_len() != toks.len() {
            return Err(QeError::DegenerateInput(format!(
                "document `{}` sentence {s}: {} tokens but {} word tags",
                doc.id,
                toks.len(),
                t.mt_len()
            )));
        }
        let mut run: Option<usize> = None;
        for i in 0..=toks.len() {
            let bad = i < toks.len() && t.words[i].is_bad();
            match (bad, run) {
                (true, None) => run = Some(i),
                (false, Some(r)) => {
                    out.push(Annotation::single(
                        severity,
                        Span::new(s, toks[r].0, toks[i - 1].1),
                    ));
                    run = None;
                }
                _ => {}
            }
        }
        for (g, tag) in t.gaps.iter().enumerate() {
            if tag.is_bad() {
                let (a, b) = doc.gap_border(s, g);
                out.push(Annotation::single(severity, Span::new(s, a, b)));
            }
        }
    }
    sort_annotations(&mut out);
    Ok(out)
}
