use std::hash::Hasher;
use std::sync::OnceLock;

use fnv::FnvHasher;

use crate::corpus::{Alignments, Tag};
use crate::error::{QeError, Result};

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
const NULL_ALIGN: &str = "<null>";

/// Probabilities of one stacked system at every position of a sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct StackedColumn {
    pub system: String,
    pub probs: Vec<f64>,
}

/// One sequence to tag, with its context already laid out per position.
///
/// The same structure serves MT words, gaps (N+1 positions whose context is
/// the flanking MT words) and source words.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SequenceInstance {
    pub units: Vec<String>,
    pub left: Vec<String>,
    pub right: Vec<String>,
    /// Tokens on the other side of the alignment.
    pub aligned: Vec<Vec<String>>,
    /// Precomputed annotation columns (e.g. POS), one list per position.
    pub extra: Vec<Vec<String>>,
    pub stacked: Vec<StackedColumn>,
}

fn neighbours(tokens: &[String]) -> (Vec<String>, Vec<String>) {
    let n = tokens.len();
    let left = (0..n)
        .map(|i| {
            if i == 0 {
                BOS.to_owned()
            } else {
                tokens[i - 1].clone()
            }
        })
        .collect();
    let right = (0..n)
        .map(|i| {
            if i + 1 == n {
                EOS.to_owned()
            } else {
                tokens[i + 1].clone()
            }
        })
        .collect();
    (left, right)
}

impl SequenceInstance {
    /// MT word positions.
    pub fn words(mt: &[String], src: Option<&[String]>, align: Option<&Alignments>) -> Self {
        let (left, right) = neighbours(mt);
        let aligned = match (src, align) {
            (Some(src), Some(a)) => a
                .src_for_mt(mt.len())
                .into_iter()
                .map(|ix| ix.into_iter().filter_map(|s| src.get(s).cloned()).collect())
                .collect(),
            _ => vec![Vec::new(); mt.len()],
        };
        SequenceInstance {
            units: mt.to_vec(),
            left,
            right,
            aligned,
            extra: vec![Vec::new(); mt.len()],
            stacked: Vec::new(),
        }
    }

    /// Gap positions 0..=N between (and around) MT words.
    pub fn gaps(mt: &[String]) -> Self {
        let n = mt.len();
        let left: Vec<String> = (0..=n)
            .map(|i| {
                if i == 0 {
                    BOS.to_owned()
                } else {
                    mt[i - 1].clone()
                }
            })
            .collect();
        let right: Vec<String> = (0..=n)
            .map(|i| {
                if i == n {
                    EOS.to_owned()
                } else {
                    mt[i].clone()
                }
            })
            .collect();
        let units = left
            .iter()
            .zip(&right)
            .map(|(l, r)| format!("{l}|{r}"))
            .collect();
        SequenceInstance {
            units,
            left,
            right,
            aligned: vec![Vec::new(); n + 1],
            extra: vec![Vec::new(); n + 1],
            stacked: Vec::new(),
        }
    }

    /// Source word positions; aligned context comes from the MT side.
    pub fn source(src: &[String], mt: Option<&[String]>, align: Option<&Alignments>) -> Self {
        let (left, right) = neighbours(src);
        let aligned = match (mt, align) {
            (Some(mt), Some(a)) => a
                .mt_for_src(src.len())
                .into_iter()
                .map(|ix| ix.into_iter().filter_map(|t| mt.get(t).cloned()).collect())
                .collect(),
            _ => vec![Vec::new(); src.len()],
        };
        SequenceInstance {
            units: src.to_vec(),
            left,
            right,
            aligned,
            extra: vec![Vec::new(); src.len()],
            stacked: Vec::new(),
        }
    }

    /// Positions with no lexical content, for models driven only by stacked
    /// system outputs.
    pub fn blank(len: usize) -> Self {
        SequenceInstance {
            units: vec!["_".to_owned(); len],
            left: vec!["_".to_owned(); len],
            right: vec!["_".to_owned(); len],
            aligned: vec![Vec::new(); len],
            extra: vec![Vec::new(); len],
            stacked: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn with_extra(mut self, column: Vec<String>) -> Result<Self> {
        if column.len() != self.len() {
            return Err(QeError::DegenerateInput(format!(
                "extra column has {} values for {} positions",
                column.len(),
                self.len()
            )));
        }
        for (slot, v) in self.extra.iter_mut().zip(column) {
            slot.push(v);
        }
        Ok(self)
    }

    pub fn with_stacked(mut self, system: impl Into<String>, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != self.len() {
            return Err(QeError::DegenerateInput(format!(
                "stacked predictions have {} values for {} positions",
                probs.len(),
                self.len()
            )));
        }
        self.stacked.push(StackedColumn {
            system: system.into(),
            probs,
        });
        Ok(self)
    }
}

/// Feature templates, each toggleable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureConfig {
    pub bias: bool,
    pub word: bool,
    pub context: bool,
    pub aligned: bool,
    pub extra: bool,
    pub stacked: bool,
    pub bigram: bool,
    pub bins: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            bias: true,
            word: true,
            context: true,
            aligned: true,
            extra: true,
            stacked: true,
            bigram: true,
            bins: 10,
        }
    }
}

impl FeatureConfig {
    pub const TEMPLATES: [&'static str; 7] = [
        "bias", "word", "context", "aligned", "extra", "stacked", "bigram",
    ];

    /// Only bias, stacked-probability and bigram templates.
    pub fn stacked_only() -> Self {
        FeatureConfig {
            word: false,
            context: false,
            aligned: false,
            extra: false,
            ..FeatureConfig::default()
        }
    }

    pub fn template_mut(&mut self, name: &str) -> Option<&mut bool> {
        Some(match name {
            "bias" => &mut self.bias,
            "word" => &mut self.word,
            "context" => &mut self.context,
            "aligned" => &mut self.aligned,
            "extra" => &mut self.extra,
            "stacked" => &mut self.stacked,
            "bigram" => &mut self.bigram,
            _ => return None,
        })
    }

    pub fn enabled(&self) -> Vec<&'static str> {
        let flags = [
            self.bias,
            self.word,
            self.context,
            self.aligned,
            self.extra,
            self.stacked,
            self.bigram,
        ];
        Self::TEMPLATES
            .iter()
            .zip(flags)
            .filter(|(_, on)| *on)
            .map(|(n, _)| *n)
            .collect()
    }

    /// Parses a comma-separated list of enabled templates.
    pub fn set_enabled(&mut self, list: &str) -> Result<()> {
        for name in Self::TEMPLATES {
            *self.template_mut(name).expect("known template") = false;
        }
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            *self
                .template_mut(name)
                .ok_or_else(|| QeError::Config(format!("unknown feature template `{name}`")))? =
                true;
        }
        Ok(())
    }

    /// Bin index `floor(bins * p)`, capped at `bins - 1`.
    pub fn bin(&self, p: f64) -> usize {
        let b = (self.bins as f64 * p).floor();
        (b.max(0.0) as usize).min(self.bins.saturating_sub(1))
    }
}

/// Label-free unigram feature names at position `i`.
pub fn unigram_names(inst: &SequenceInstance, i: usize, cfg: &FeatureConfig) -> Vec<String> {
    let mut out = Vec::new();
    if cfg.bias {
        out.push("bias".to_owned());
    }
    if cfg.word {
        out.push(format!("w:{}", inst.units[i]));
    }
    if cfg.context {
        out.push(format!("wl:{}", inst.left[i]));
        out.push(format!("wr:{}", inst.right[i]));
    }
    if cfg.aligned {
        if inst.aligned[i].is_empty() {
            out.push(format!("a:{NULL_ALIGN}"));
        } else {
            for a in &inst.aligned[i] {
                out.push(format!("a:{a}"));
            }
        }
    }
    if cfg.extra {
        for (j, v) in inst.extra[i].iter().enumerate() {
            out.push(format!("x{j}:{v}"));
        }
    }
    if cfg.stacked {
        for col in &inst.stacked {
            out.push(format!("stack:{}:bin{}", col.system, cfg.bin(col.probs[i])));
        }
    }
    out
}

pub fn label_name(tag: Option<Tag>) -> &'static str {
    match tag {
        None => "START",
        Some(Tag::Ok) => "OK",
        Some(Tag::Bad) => "BAD",
    }
}

/// Full feature names (conjoined with labels) firing at position `i`.
pub fn feature_names(
    inst: &SequenceInstance,
    i: usize,
    y: Tag,
    prev: Option<Tag>,
    cfg: &FeatureConfig,
) -> Vec<String> {
    let mut out: Vec<String> = unigram_names(inst, i, cfg)
        .into_iter()
        .map(|n| format!("{n}∧{y}"))
        .collect();
    if cfg.bigram {
        out.push(bigram_name(prev, y));
    }
    out
}

fn bigram_name(prev: Option<Tag>, y: Tag) -> String {
    format!("bigram:{}∧{}", label_name(prev), y)
}

/// Stable 64-bit key of a feature name (FNV-1a).
pub fn feature_key(name: &str) -> u64 {
    let mut h = FnvHasher::default();
    h.write(name.as_bytes());
    h.finish()
}

/// Bigram keys indexed by `[prev][cur]` with prev 0 = START, 1 = OK, 2 = BAD.
pub fn transition_keys() -> &'static [[u64; 2]; 3] {
    static KEYS: OnceLock<[[u64; 2]; 3]> = OnceLock::new();
    KEYS.get_or_init(|| {
        let mut k = [[0u64; 2]; 3];
        for (p, prev) in [None, Some(Tag::Ok), Some(Tag::Bad)]
            .into_iter()
            .enumerate()
        {
            for y in Tag::ALL {
                k[p][y.index()] = feature_key(&bigram_name(prev, y));
            }
        }
        k
    })
}

pub fn prev_index(prev: Option<Tag>) -> usize {
    match prev {
        None => 0,
        Some(t) => 1 + t.index(),
    }
}

/// Hashed emission keys for every position and label.
#[derive(Clone, Debug)]
pub struct CompiledInstance {
    pub emit: Vec<[Vec<u64>; 2]>,
}

impl CompiledInstance {
    pub fn new(inst: &SequenceInstance, cfg: &FeatureConfig) -> Self {
        let emit = (0..inst.len())
            .map(|i| {
                let names = unigram_names(inst, i, cfg);
                let per = |y: Tag| {
                    names
                        .iter()
                        .map(|n| feature_key(&format!("{n}∧{y}")))
                        .collect::<Vec<u64>>()
                };
                [per(Tag::Ok), per(Tag::Bad)]
            })
            .collect();
        CompiledInstance { emit }
    }

    pub fn len(&self) -> usize {
        self.emit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.emit.is_empty()
    }
}
