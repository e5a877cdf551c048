//! Data model and readers/writers for WMT-style QE files.
//!
//! Every file holds one segment per line. Token, tag and probability fields
//! are separated by single spaces. Target tag lines interleave gap and word
//! tags as `g0 w1 g1 ... wN gN`; internally words and gaps are kept apart.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{QeError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Ok,
    Bad,
}

impl Tag {
    pub fn is_bad(self) -> bool {
        self == Tag::Bad
    }

    pub fn index(self) -> usize {
        match self {
            Tag::Ok => 0,
            Tag::Bad => 1,
        }
    }

    pub fn flip(self) -> Tag {
        match self {
            Tag::Ok => Tag::Bad,
            Tag::Bad => Tag::Ok,
        }
    }

    pub const ALL: [Tag; 2] = [Tag::Ok, Tag::Bad];
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tag::Ok => "OK",
            Tag::Bad => "BAD",
        })
    }
}

impl FromStr for Tag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "OK" => Ok(Tag::Ok),
            "BAD" => Ok(Tag::Bad),
            other => Err(format!("invalid tag `{other}`")),
        }
    }
}

/// The three label streams a system may emit, plus the interleaved target view
/// used for evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stream {
    Words,
    Gaps,
    Source,
}

impl Stream {
    pub fn name(self) -> &'static str {
        match self {
            Stream::Words => "words",
            Stream::Gaps => "gaps",
            Stream::Source => "source",
        }
    }
}

impl fmt::Display for Stream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stream {
    type Err = QeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "words" | "word" | "mt" => Ok(Stream::Words),
            "gaps" | "gap" => Ok(Stream::Gaps),
            "source" | "src" => Ok(Stream::Source),
            other => Err(QeError::Config(format!("unknown stream `{other}`"))),
        }
    }
}

/// A tokenized segment. Never empty; tokens never contain whitespace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence(Vec<String>);

impl Sentence {
    pub fn new(tokens: Vec<String>) -> std::result::Result<Self, String> {
        if tokens.is_empty() {
            return Err("empty sentence".into());
        }
        for t in &tokens {
            if t.is_empty() || t.chars().any(char::is_whitespace) {
                return Err(format!("invalid token `{t}`"));
            }
        }
        Ok(Sentence(tokens))
    }

    /// Splits on ASCII/Unicode whitespace.
    pub fn parse(line: &str) -> std::result::Result<Self, String> {
        Sentence::new(line.split_whitespace().map(str::to_owned).collect())
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

/// Word and gap labels for one MT segment: N word tags, N+1 gap tags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetTags {
    pub words: Vec<Tag>,
    pub gaps: Vec<Tag>,
}

impl TargetTags {
    pub fn new(words: Vec<Tag>, gaps: Vec<Tag>) -> std::result::Result<Self, String> {
        if gaps.len() != words.len() + 1 {
            return Err(format!(
                "{} word tags require {} gap tags, got {}",
                words.len(),
                words.len() + 1,
                gaps.len()
            ));
        }
        Ok(TargetTags { words, gaps })
    }

    pub fn all_ok(n: usize) -> Self {
        TargetTags {
            words: vec![Tag::Ok; n],
            gaps: vec![Tag::Ok; n + 1],
        }
    }

    pub fn from_interleaved(tags: &[Tag]) -> std::result::Result<Self, String> {
        if tags.len() % 2 == 0 {
            return Err(format!(
                "interleaved target tags need 2N+1 entries, got {}",
                tags.len()
            ));
        }
        let gaps = tags.iter().step_by(2).copied().collect();
        let words = tags.iter().skip(1).step_by(2).copied().collect();
        Ok(TargetTags { words, gaps })
    }

    pub fn interleaved(&self) -> Vec<Tag> {
        let mut out = Vec::with_capacity(2 * self.words.len() + 1);
        for (i, w) in self.words.iter().enumerate() {
            out.push(self.gaps[i]);
            out.push(*w);
        }
        out.push(self.gaps[self.words.len()]);
        out
    }

    pub fn mt_len(&self) -> usize {
        self.words.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceTags(pub Vec<Tag>);

/// Word alignment as (source index, MT index) pairs, 0-based.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alignments(pub Vec<(usize, usize)>);

impl Alignments {
    pub fn parse(line: &str) -> std::result::Result<Self, String> {
        let mut pairs = Vec::new();
        for field in line.split_whitespace() {
            let (s, t) = field
                .split_once('-')
                .ok_or_else(|| format!("invalid alignment pair `{field}`"))?;
            let s = s
                .parse()
                .map_err(|_| format!("invalid alignment pair `{field}`"))?;
            let t = t
                .parse()
                .map_err(|_| format!("invalid alignment pair `{field}`"))?;
            pairs.push((s, t));
        }
        Ok(Alignments(pairs))
    }

    pub fn check(&self, src_len: usize, mt_len: usize) -> std::result::Result<(), String> {
        for &(s, t) in &self.0 {
            if s >= src_len || t >= mt_len {
                return Err(format!(
                    "alignment {s}-{t} out of range for {src_len} source / {mt_len} MT tokens"
                ));
            }
        }
        Ok(())
    }

    /// Source indices aligned to each MT position, sorted.
    pub fn src_for_mt(&self, mt_len: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); mt_len];
        for &(s, t) in &self.0 {
            if t < mt_len {
                out[t].push(s);
            }
        }
        for v in &mut out {
            v.sort_unstable();
            v.dedup();
        }
        out
    }

    /// MT indices aligned to each source position, sorted.
    pub fn mt_for_src(&self, src_len: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); src_len];
        for &(s, t) in &self.0 {
            if s < src_len {
                out[s].push(t);
            }
        }
        for v in &mut out {
            v.sort_unstable();
            v.dedup();
        }
        out
    }
}

impl fmt::Display for Alignments {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fields: Vec<String> = self.0.iter().map(|(s, t)| format!("{s}-{t}")).collect();
        f.write_str(&fields.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub src: Sentence,
    pub mt: Sentence,
    pub pe: Option<Sentence>,
    pub target_tags: Option<TargetTags>,
    pub source_tags: Option<SourceTags>,
    pub hter: Option<f64>,
    pub alignments: Option<Alignments>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TaggedCorpus {
    pub entries: Vec<Entry>,
}

impl TaggedCorpus {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn shape(&self) -> CorpusShape {
        CorpusShape {
            mt_lens: self.entries.iter().map(|e| e.mt.len()).collect(),
            src_lens: Some(self.entries.iter().map(|e| e.src.len()).collect()),
        }
    }
}

/// Per-segment token counts, used to validate prediction files without a
/// full corpus at hand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusShape {
    pub mt_lens: Vec<usize>,
    pub src_lens: Option<Vec<usize>>,
}

impl CorpusShape {
    pub fn from_target_tags(tags: &[TargetTags]) -> Self {
        CorpusShape {
            mt_lens: tags.iter().map(TargetTags::mt_len).collect(),
            src_lens: None,
        }
    }

    pub fn with_source(mut self, source: &[SourceTags]) -> Self {
        self.src_lens = Some(source.iter().map(|s| s.0.len()).collect());
        self
    }

    pub fn len(&self) -> usize {
        self.mt_lens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mt_lens.is_empty()
    }

    /// Expected per-line field counts for a stream.
    pub fn stream_lens(&self, stream: Stream) -> Option<Vec<usize>> {
        match stream {
            Stream::Words => Some(self.mt_lens.clone()),
            Stream::Gaps => Some(self.mt_lens.iter().map(|n| n + 1).collect()),
            Stream::Source => self.src_lens.clone(),
        }
    }
}

/// How target tag files are laid out on disk.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TagLayout {
    /// `g0 w1 g1 ... wN gN`
    #[default]
    Interleaved,
    /// Word tags only; gaps are read as all OK and not written.
    WordsOnly,
}

impl FromStr for TagLayout {
    type Err = QeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interleaved" => Ok(TagLayout::Interleaved),
            "words" | "words-only" => Ok(TagLayout::WordsOnly),
            other => Err(QeError::Config(format!("unknown tag layout `{other}`"))),
        }
    }
}

/// Which corpus files are present. `src` and `mt` are mandatory.
#[derive(Clone, Debug, Default)]
pub struct CorpusPaths {
    pub src: PathBuf,
    pub mt: PathBuf,
    pub pe: Option<PathBuf>,
    pub tags: Option<PathBuf>,
    pub source_tags: Option<PathBuf>,
    pub hter: Option<PathBuf>,
    pub align: Option<PathBuf>,
}

fn label(path: &Path) -> String {
    path.display().to_string()
}

/// Reads a file into lines, rejecting empty lines.
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| QeError::io(path, e))?;
    let mut lines = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            return Err(QeError::Parse {
                file: label(path),
                line: i + 1,
                detail: "empty line".into(),
            });
        }
        lines.push(line.to_owned());
    }
    Ok(lines)
}

fn parse_err(path: &Path, line: usize, detail: impl Into<String>) -> QeError {
    QeError::Parse {
        file: label(path),
        line: line + 1,
        detail: detail.into(),
    }
}

fn mismatch(path: &Path, line: usize, detail: impl Into<String>) -> QeError {
    QeError::LengthMismatch {
        file: label(path),
        line: line + 1,
        detail: detail.into(),
    }
}

fn check_line_count(path: &Path, got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(mismatch(
            path,
            got.min(expected),
            format!("{got} lines, expected {expected}"),
        ));
    }
    Ok(())
}

pub fn read_sentences(path: &Path) -> Result<Vec<Sentence>> {
    read_lines(path)?
        .iter()
        .enumerate()
        .map(|(i, l)| Sentence::parse(l).map_err(|e| parse_err(path, i, e)))
        .collect()
}

fn parse_tag_line(path: &Path, i: usize, line: &str) -> Result<Vec<Tag>> {
    line.split_whitespace()
        .map(|t| t.parse::<Tag>().map_err(|e| parse_err(path, i, e)))
        .collect()
}

/// Reads a flat tag file (source tags, or any single stream).
pub fn read_tag_lines(path: &Path) -> Result<Vec<Vec<Tag>>> {
    read_lines(path)?
        .iter()
        .enumerate()
        .map(|(i, l)| parse_tag_line(path, i, l))
        .collect()
}

/// Reads target tags; `mt_lens`, when given, must match line by line.
pub fn read_target_tags(
    path: &Path,
    layout: TagLayout,
    mt_lens: Option<&[usize]>,
) -> Result<Vec<TargetTags>> {
    let lines = read_tag_lines(path)?;
    if let Some(lens) = mt_lens {
        check_line_count(path, lines.len(), lens.len())?;
    }
    let mut out = Vec::with_capacity(lines.len());
    for (i, tags) in lines.into_iter().enumerate() {
        let tt = match layout {
            TagLayout::Interleaved => {
                TargetTags::from_interleaved(&tags).map_err(|e| mismatch(path, i, e))?
            }
            TagLayout::WordsOnly => {
                let n = tags.len();
                TargetTags {
                    words: tags,
                    gaps: vec![Tag::Ok; n + 1],
                }
            }
        };
        if let Some(lens) = mt_lens {
            if tt.mt_len() != lens[i] {
                let expected = match layout {
                    TagLayout::Interleaved => 2 * lens[i] + 1,
                    TagLayout::WordsOnly => lens[i],
                };
                return Err(mismatch(
                    path,
                    i,
                    format!(
                        "{} tags for {} MT tokens (expected {expected})",
                        match layout {
                            TagLayout::Interleaved => 2 * tt.mt_len() + 1,
                            TagLayout::WordsOnly => tt.mt_len(),
                        },
                        lens[i]
                    ),
                ));
            }
        }
        out.push(tt);
    }
    Ok(out)
}

pub fn read_source_tags(path: &Path, src_lens: Option<&[usize]>) -> Result<Vec<SourceTags>> {
    let lines = read_tag_lines(path)?;
    if let Some(lens) = src_lens {
        check_line_count(path, lines.len(), lens.len())?;
        for (i, tags) in lines.iter().enumerate() {
            if tags.len() != lens[i] {
                return Err(mismatch(
                    path,
                    i,
                    format!("{} tags for {} source tokens", tags.len(), lens[i]),
                ));
            }
        }
    }
    Ok(lines.into_iter().map(SourceTags).collect())
}

fn parse_unit_value(path: &Path, i: usize, field: &str) -> Result<f64> {
    // Systems that emit hard tags are read as probabilities {OK -> 0, BAD -> 1}.
    let v = match field {
        "OK" => 0.0,
        "BAD" => 1.0,
        _ => field
            .parse::<f64>()
            .map_err(|_| parse_err(path, i, format!("invalid number `{field}`")))?,
    };
    if !(0.0..=1.0).contains(&v) {
        return Err(QeError::Range {
            file: label(path),
            line: i + 1,
            value: v,
        });
    }
    Ok(v)
}

/// One value per token per line. `expected` gives the required field count
/// for every line.
pub fn read_probs(path: &Path, expected: Option<&[usize]>) -> Result<Vec<Vec<f64>>> {
    let lines = read_lines(path)?;
    if let Some(lens) = expected {
        check_line_count(path, lines.len(), lens.len())?;
    }
    let mut out = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        let row = line
            .split_whitespace()
            .map(|f| parse_unit_value(path, i, f))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(lens) = expected {
            if row.len() != lens[i] {
                return Err(mismatch(
                    path,
                    i,
                    format!("{} values, expected {}", row.len(), lens[i]),
                ));
            }
        }
        out.push(row);
    }
    Ok(out)
}

/// One decimal per line.
pub fn read_scores(path: &Path, expected_len: Option<usize>) -> Result<Vec<f64>> {
    let lines = read_lines(path)?;
    if let Some(n) = expected_len {
        check_line_count(path, lines.len(), n)?;
    }
    lines
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let f = l.trim();
            f.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(path, i, format!("invalid score `{f}`")))
        })
        .collect()
}

pub fn read_alignments(path: &Path) -> Result<Vec<Alignments>> {
    let text = fs::read_to_string(path).map_err(|e| QeError::io(path, e))?;
    // Alignment lines may legitimately be empty (nothing aligned).
    text.lines()
        .enumerate()
        .map(|(i, l)| Alignments::parse(l).map_err(|e| parse_err(path, i, e)))
        .collect()
}

/// Loads a corpus and validates every cross-file invariant.
pub fn load_corpus(paths: &CorpusPaths, layout: TagLayout) -> Result<TaggedCorpus> {
    let src = read_sentences(&paths.src)?;
    let mt = read_sentences(&paths.mt)?;
    check_line_count(&paths.mt, mt.len(), src.len())?;
    let n = src.len();
    let mt_lens: Vec<usize> = mt.iter().map(Sentence::len).collect();
    let src_lens: Vec<usize> = src.iter().map(Sentence::len).collect();

    let pe = match &paths.pe {
        Some(p) => {
            let v = read_sentences(p)?;
            check_line_count(p, v.len(), n)?;
            Some(v)
        }
        None => None,
    };
    let tags = match &paths.tags {
        Some(p) => Some(read_target_tags(p, layout, Some(&mt_lens))?),
        None => None,
    };
    let source_tags = match &paths.source_tags {
        Some(p) => Some(read_source_tags(p, Some(&src_lens))?),
        None => None,
    };
    let hter = match &paths.hter {
        Some(p) => Some(read_scores(p, Some(n))?),
        None => None,
    };
    let align = match &paths.align {
        Some(p) => {
            let v = read_alignments(p)?;
            check_line_count(p, v.len(), n)?;
            for (i, a) in v.iter().enumerate() {
                a.check(src_lens[i], mt_lens[i])
                    .map_err(|e| QeError::Index(format!("{}:{}: {e}", label(p), i + 1)))?;
            }
            Some(v)
        }
        None => None,
    };

    let mut pe = pe.map(Vec::into_iter);
    let mut tags = tags.map(Vec::into_iter);
    let mut source_tags = source_tags.map(Vec::into_iter);
    let mut hter = hter.map(Vec::into_iter);
    let mut align = align.map(Vec::into_iter);
    let entries = src
        .into_iter()
        .zip(mt)
        .map(|(src, mt)| Entry {
            src,
            mt,
            pe: pe.as_mut().and_then(Iterator::next),
            target_tags: tags.as_mut().and_then(Iterator::next),
            source_tags: source_tags.as_mut().and_then(Iterator::next),
            hter: hter.as_mut().and_then(Iterator::next),
            alignments: align.as_mut().and_then(Iterator::next),
        })
        .collect();
    Ok(TaggedCorpus { entries })
}

/// Outputs of one upstream system over a corpus.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PredictionSet {
    pub system_id: String,
    pub word_probs: Option<Vec<Vec<f64>>>,
    pub gap_probs: Option<Vec<Vec<f64>>>,
    pub source_probs: Option<Vec<Vec<f64>>>,
    pub sentence_scores: Option<Vec<f64>>,
}

impl PredictionSet {
    pub fn new(system_id: impl Into<String>) -> Self {
        PredictionSet {
            system_id: system_id.into(),
            ..Default::default()
        }
    }

    pub fn stream(&self, stream: Stream) -> Option<&Vec<Vec<f64>>> {
        match stream {
            Stream::Words => self.word_probs.as_ref(),
            Stream::Gaps => self.gap_probs.as_ref(),
            Stream::Source => self.source_probs.as_ref(),
        }
    }

    fn stream_mut(&mut self, stream: Stream) -> &mut Option<Vec<Vec<f64>>> {
        match stream {
            Stream::Words => &mut self.word_probs,
            Stream::Gaps => &mut self.gap_probs,
            Stream::Source => &mut self.source_probs,
        }
    }

    pub fn with_stream(mut self, stream: Stream, probs: Vec<Vec<f64>>) -> Self {
        *self.stream_mut(stream) = Some(probs);
        self
    }

    pub fn with_scores(mut self, scores: Vec<f64>) -> Self {
        self.sentence_scores = Some(scores);
        self
    }
}

/// Reads one stream of a system's predictions, validating it against the
/// corpus it was produced for.
pub fn load_predictions(path: &Path, shape: &CorpusShape, stream: Stream) -> Result<Vec<Vec<f64>>> {
    let lens = shape.stream_lens(stream);
    read_probs(path, lens.as_deref())
}

/// Prediction-file kinds accepted in a manifest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ManifestKind {
    Stream(Stream),
    Sentence,
}

impl FromStr for ManifestKind {
    type Err = QeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sentence" | "score" | "scores" => Ok(ManifestKind::Sentence),
            other => other.parse().map(ManifestKind::Stream),
        }
    }
}

/// Reads a system manifest: one `system_id<TAB>kind<TAB>path` per line, kind
/// being `words`, `gaps`, `source` or `sentence`. Relative paths resolve
/// against the manifest's directory. `#` starts a comment line. Systems keep
/// the order of their first appearance.
pub fn load_manifest(path: &Path, shape: &CorpusShape) -> Result<Vec<PredictionSet>> {
    let text = fs::read_to_string(path).map_err(|e| QeError::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut order: Vec<String> = Vec::new();
    let mut sets: HashMap<String, PredictionSet> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(parse_err(path, i, "expected system_id<TAB>kind<TAB>path"));
        }
        let kind: ManifestKind = fields[1]
            .parse()
            .map_err(|e: QeError| parse_err(path, i, e.to_string()))?;
        let file = base.join(fields[2]);
        let id = fields[0].to_owned();
        if !sets.contains_key(&id) {
            order.push(id.clone());
            sets.insert(id.clone(), PredictionSet::new(id.clone()));
        }
        let set = sets.get_mut(&id).expect("inserted above");
        match kind {
            ManifestKind::Stream(stream) => {
                if stream == Stream::Source && shape.src_lens.is_none() {
                    return Err(QeError::Config(
                        "source predictions listed but source lengths are unknown".into(),
                    ));
                }
                *set.stream_mut(stream) = Some(load_predictions(&file, shape, stream)?);
            }
            ManifestKind::Sentence => {
                set.sentence_scores = Some(read_scores(&file, Some(shape.len()))?);
            }
        }
    }
    Ok(order
        .into_iter()
        .map(|id| sets.remove(&id).expect("present"))
        .collect())
}

// ---------------------------------------------------------------------------
// Writers

pub fn format_target_tags(tags: &TargetTags, layout: TagLayout) -> String {
    let seq = match layout {
        TagLayout::Interleaved => tags.interleaved(),
        TagLayout::WordsOnly => tags.words.clone(),
    };
    join(&seq)
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn write_lines<I, S>(path: &Path, lines: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let file = fs::File::create(path).map_err(|e| QeError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for line in lines {
        writeln!(w, "{}", line.as_ref()).map_err(|e| QeError::io(path, e))?;
    }
    w.flush().map_err(|e| QeError::io(path, e))
}

pub fn write_target_tags(path: &Path, tags: &[TargetTags], layout: TagLayout) -> Result<()> {
    write_lines(path, tags.iter().map(|t| format_target_tags(t, layout)))
}

pub fn write_tag_lines(path: &Path, tags: &[Vec<Tag>]) -> Result<()> {
    write_lines(path, tags.iter().map(|t| join(t)))
}

pub fn write_source_tags(path: &Path, tags: &[SourceTags]) -> Result<()> {
    write_lines(path, tags.iter().map(|t| join(&t.0)))
}

/// Scores and probabilities use the shortest representation that reads
/// back to the identical `f64`.
pub fn write_scores(path: &Path, scores: &[f64]) -> Result<()> {
    write_lines(path, scores.iter().map(|s| s.to_string()))
}

pub fn write_probs(path: &Path, probs: &[Vec<f64>]) -> Result<()> {
    write_lines(path, probs.iter().map(|row| join(row)))
}

pub fn write_alignments(path: &Path, align: &[Alignments]) -> Result<()> {
    write_lines(path, align.iter().map(|a| a.to_string()))
}

pub fn write_sentences(path: &Path, sents: &[Sentence]) -> Result<()> {
    write_lines(path, sents.iter().map(|s| s.to_string()))
}
