//! Word, gap and source labels plus HTER from a post-edit.
//!
//! The alignment is plain Levenshtein over tokens (unit costs, no block
//! shifts). The same code labels human post-edits and pseudo post-edits
//! produced by an APE system.

use rayon::prelude::*;

use crate::corpus::{Alignments, Sentence, SourceTags, Tag, TargetTags};
use crate::error::{QeError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EditKind {
    Match,
    Sub,
    /// A PE token missing from the MT, inserted into the gap before the next MT token.
    InsIntoMtGap,
    /// An MT token absent from the PE.
    DelFromMt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EditOp {
    pub kind: EditKind,
    pub mt_index: Option<usize>,
    pub pe_index: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EditScript {
    pub ops: Vec<EditOp>,
}

impl EditScript {
    pub fn kinds(&self) -> Vec<EditKind> {
        self.ops.iter().map(|o| o.kind).collect()
    }

    pub fn cost(&self) -> usize {
        self.ops
            .iter()
            .filter(|o| o.kind != EditKind::Match)
            .count()
    }
}

/// Minimum-cost edit script turning `mt` into `pe`.
///
/// Backtrace prefers MATCH, then SUB, then DEL_FROM_MT, then INS_INTO_MT_GAP.
pub fn align_edit<S: AsRef<str>>(mt: &[S], pe: &[S]) -> EditScript {
    let (n, m) = (mt.len(), pe.len());
    let w = m + 1;
    let mut dist = vec![0usize; (n + 1) * w];
    for j in 0..=m {
        dist[j] = j;
    }
    for i in 1..=n {
        dist[i * w] = i;
        for j in 1..=m {
            let same = mt[i - 1].as_ref() == pe[j - 1].as_ref();
            let diag = dist[(i - 1) * w + j - 1] + usize::from(!same);
            let del = dist[(i - 1) * w + j] + 1;
            let ins = dist[i * w + j - 1] + 1;
            dist[i * w + j] = diag.min(del).min(ins);
        }
    }

    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dist[i * w + j];
        if i > 0 && j > 0 {
            let diag = dist[(i - 1) * w + j - 1];
            if mt[i - 1].as_ref() == pe[j - 1].as_ref() && diag == here {
                ops.push(EditOp {
                    kind: EditKind::Match,
                    mt_index: Some(i - 1),
                    pe_index: Some(j - 1),
                });
                i -= 1;
                j -= 1;
                continue;
            }
            if diag + 1 == here {
                ops.push(EditOp {
                    kind: EditKind::Sub,
                    mt_index: Some(i - 1),
                    pe_index: Some(j - 1),
                });
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && dist[(i - 1) * w + j] + 1 == here {
            ops.push(EditOp {
                kind: EditKind::DelFromMt,
                mt_index: Some(i - 1),
                pe_index: None,
            });
            i -= 1;
            continue;
        }
        debug_assert!(j > 0 && dist[i * w + j - 1] + 1 == here);
        ops.push(EditOp {
            kind: EditKind::InsIntoMtGap,
            mt_index: None,
            pe_index: Some(j - 1),
        });
        j -= 1;
    }
    ops.reverse();
    EditScript { ops }
}

/// Word tags are BAD for substituted or deleted MT tokens; gap `i` is BAD
/// when anything is inserted between MT tokens `i-1` and `i`.
pub fn tags_from_edits(script: &EditScript, n_mt: usize) -> Result<TargetTags> {
    let mut words = vec![Tag::Ok; n_mt];
    let mut gaps = vec![Tag::Ok; n_mt + 1];
    let mut consumed = 0usize;
    for op in &script.ops {
        match (op.kind, op.mt_index) {
            (EditKind::InsIntoMtGap, None) => gaps[consumed] = Tag::Bad,
            (EditKind::InsIntoMtGap, Some(_)) => {
                return Err(QeError::InconsistentScript(
                    "insertion carries an MT index".into(),
                ))
            }
            (kind, Some(idx)) => {
                if idx != consumed || idx >= n_mt {
                    return Err(QeError::InconsistentScript(format!(
                        "MT index {idx} out of order (expected {consumed} of {n_mt})"
                    )));
                }
                if matches!(kind, EditKind::Sub | EditKind::DelFromMt) {
                    words[idx] = Tag::Bad;
                }
                consumed += 1;
            }
            (kind, None) => {
                return Err(QeError::InconsistentScript(format!(
                    "{kind:?} without an MT index"
                )))
            }
        }
    }
    if consumed != n_mt {
        return Err(QeError::InconsistentScript(format!(
            "script covers {consumed} of {n_mt} MT tokens"
        )));
    }
    Ok(TargetTags { words, gaps })
}

/// Edit operations per post-edit token, clamped to [0, 1] when `cap` is set.
pub fn hter(script: &EditScript, pe_len: usize, cap: bool) -> f64 {
    let rate = script.cost() as f64 / pe_len.max(1) as f64;
    if cap {
        rate.min(1.0)
    } else {
        rate
    }
}

/// Projects target tags onto the source through word alignments.
///
/// A source token is BAD when aligned to a BAD MT word. A BAD gap `i`
/// additionally marks the source tokens strictly between the last source
/// position aligned to MT token `i-1` and the first aligned to MT token `i`.
/// Border gaps and gaps next to unaligned tokens implicate nothing.
pub fn source_tags_from_target(
    target: &TargetTags,
    alignments: &Alignments,
    src_len: usize,
) -> Result<SourceTags> {
    let n_mt = target.mt_len();
    alignments.check(src_len, n_mt).map_err(QeError::Index)?;
    let mut tags = vec![Tag::Ok; src_len];
    for &(s, t) in &alignments.0 {
        if target.words[t].is_bad() {
            tags[s] = Tag::Bad;
        }
    }
    let src_for_mt = alignments.src_for_mt(n_mt);
    for gap in 1..n_mt {
        if !target.gaps[gap].is_bad() {
            continue;
        }
        let (Some(&left), Some(&right)) = (src_for_mt[gap - 1].last(), src_for_mt[gap].first())
        else {
            continue;
        };
        for tag in tags.iter_mut().take(right).skip(left + 1) {
            *tag = Tag::Bad;
        }
    }
    Ok(SourceTags(tags))
}

/// Labels for one segment.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentLabels {
    pub target: TargetTags,
    pub source: Option<SourceTags>,
    pub hter: f64,
}

pub fn label_segment(
    mt: &Sentence,
    pe: &Sentence,
    src: Option<(&Sentence, &Alignments)>,
    cap: bool,
) -> Result<SegmentLabels> {
    let script = align_edit(mt.tokens(), pe.tokens());
    let target = tags_from_edits(&script, mt.len())?;
    let source = match src {
        Some((s, a)) => Some(source_tags_from_target(&target, a, s.len())?),
        None => None,
    };
    Ok(SegmentLabels {
        hter: hter(&script, pe.len(), cap),
        target,
        source,
    })
}

/// Labels a whole corpus. Segments are processed in parallel; output order
/// follows input order.
pub fn label_corpus(
    mt: &[Sentence],
    pe: &[Sentence],
    src: Option<(&[Sentence], &[Alignments])>,
    cap: bool,
) -> Result<Vec<SegmentLabels>> {
    if mt.len() != pe.len() {
        return Err(QeError::DegenerateInput(format!(
            "{} MT segments but {} post-edits",
            mt.len(),
            pe.len()
        )));
    }
    if let Some((s, a)) = src {
        if s.len() != mt.len() || a.len() != mt.len() {
            return Err(QeError::DegenerateInput(
                "source/alignment segment counts differ from MT".into(),
            ));
        }
    }
    (0..mt.len())
        .into_par_iter()
        .map(|i| label_segment(&mt[i], &pe[i], src.map(|(s, a)| (&s[i], &a[i])), cap))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use EditKind::*;
    use Tag::{Bad as B, Ok as O};

    fn toks(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn identical_is_all_match() {
        let s = align_edit(&toks("a b"), &toks("a b"));
        assert_eq!(s.kinds(), vec![Match, Match]);
        let tt = tags_from_edits(&s, 2).unwrap();
        assert_eq!(tt, TargetTags::all_ok(2));
        assert_eq!(hter(&s, 2, true), 0.0);
    }

    #[test]
    fn deletion_example() {
        let s = align_edit(&toks("a b c"), &toks("a c"));
        assert_eq!(s.kinds(), vec![Match, DelFromMt, Match]);
        assert_eq!(s.ops[1].mt_index, Some(1));
        let tt = tags_from_edits(&s, 3).unwrap();
        assert_eq!(tt.words, vec![O, B, O]);
        assert_eq!(tt.gaps, vec![O, O, O, O]);
        assert_eq!(hter(&s, 2, true), 0.5);
    }

    #[test]
    fn insertion_example() {
        let s = align_edit(&toks("a c"), &toks("a b c"));
        assert_eq!(s.kinds(), vec![Match, InsIntoMtGap, Match]);
        assert_eq!(s.ops[1].pe_index, Some(1));
        let tt = tags_from_edits(&s, 2).unwrap();
        assert_eq!(tt.words, vec![O, O]);
        assert_eq!(tt.gaps, vec![O, B, O]);
    }

    #[test]
    fn substitutions_plus_insertion() {
        let s = align_edit(&toks("a b"), &toks("x y z"));
        assert_eq!(s.cost(), 3);
        assert_eq!(hter(&s, 3, true), 1.0);
        let tt = tags_from_edits(&s, 2).unwrap();
        assert_eq!(tt.words, vec![B, B]);
    }

    #[test]
    fn hter_cap() {
        let s = align_edit(&toks("a b c d"), &toks("x"));
        assert_eq!(hter(&s, 1, true), 1.0);
        assert_eq!(hter(&s, 1, false), 4.0);
    }

    #[test]
    fn inconsistent_script_rejected() {
        let s = align_edit(&toks("a b"), &toks("a b"));
        assert!(matches!(
            tags_from_edits(&s, 3),
            Err(QeError::InconsistentScript(_))
        ));
        let mut bad = s.clone();
        bad.ops.swap(0, 1);
        assert!(tags_from_edits(&bad, 2).is_err());
    }

    #[test]
    fn source_projection() {
        let ok = TargetTags::all_ok(2);
        let a = Alignments(vec![(0, 0), (1, 1)]);
        assert_eq!(source_tags_from_target(&ok, &a, 2).unwrap().0, vec![O, O]);

        let tt = TargetTags::new(vec![O, B], vec![O; 3]).unwrap();
        assert_eq!(source_tags_from_target(&tt, &a, 2).unwrap().0, vec![O, B]);

        let gap = TargetTags::new(vec![O, O], vec![O, B, O]).unwrap();
        let a = Alignments(vec![(0, 0), (2, 1)]);
        assert_eq!(
            source_tags_from_target(&gap, &a, 3).unwrap().0,
            vec![O, B, O]
        );

        let bad = Alignments(vec![(5, 0)]);
        assert!(matches!(
            source_tags_from_target(&ok, &bad, 2),
            Err(QeError::Index(_))
        ));
    }

    #[test]
    fn border_gaps_implicate_nothing() {
        let tt = TargetTags::new(vec![O, O], vec![B, O, B]).unwrap();
        let a = Alignments(vec![(1, 0), (2, 1)]);
        assert_eq!(
            source_tags_from_target(&tt, &a, 4).unwrap().0,
            vec![O, O, O, O]
        );
    }
}
