use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use fnv::FnvHashMap;

use super::features::{transition_keys, CompiledInstance, FeatureConfig};
use crate::corpus::Stream;
use crate::error::{QeError, Result};

/// Weights of the first-order sequential tagger, keyed by hashed feature.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub weights: FnvHashMap<u64, f64>,
    pub features: FeatureConfig,
    /// MIRA aggressiveness the model was trained with.
    pub c: f64,
    /// Calibration slope for probabilities.
    pub gamma: f64,
    pub stream: Stream,
    /// Stacked systems, in the column order the model expects.
    pub systems: Vec<String>,
}

/// Per-position emission scores and the transition matrix of one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreTables {
    pub emit: Vec<[f64; 2]>,
    /// `[prev][cur]`, prev 0 = START, 1 = OK, 2 = BAD.
    pub trans: [[f64; 2]; 3],
}

impl LinearModel {
    pub fn new(features: FeatureConfig, stream: Stream) -> Self {
        LinearModel {
            weights: FnvHashMap::default(),
            features,
            c: 1.0,
            gamma: 1.0,
            stream,
            systems: Vec::new(),
        }
    }

    pub fn weight(&self, key: u64) -> f64 {
        self.weights.get(&key).copied().unwrap_or(0.0)
    }

    pub fn score_tables(&self, inst: &CompiledInstance) -> ScoreTables {
        score_tables_with(inst, &self.features, |k| self.weight(k))
    }

    pub fn write_to(&self, w: &mut dyn Write) -> std::io::Result<()> {
        writeln!(w, "#stream={}", self.stream)?;
        writeln!(w, "#C={}", self.c)?;
        writeln!(w, "#gamma={}", self.gamma)?;
        writeln!(w, "#bins={}", self.features.bins)?;
        writeln!(w, "#templates={}", self.features.enabled().join(","))?;
        writeln!(w, "#systems={}", self.systems.join(","))?;
        let mut entries: Vec<(&u64, &f64)> =
            self.weights.iter().filter(|(_, v)| **v != 0.0).collect();
        entries.sort_unstable_by_key(|(k, _)| **k);
        for (k, v) in entries {
            writeln!(w, "{k:016x}\t{v}")?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut dyn BufRead, origin: &str) -> Result<Self> {
        let mut model = LinearModel::new(FeatureConfig::default(), Stream::Words);
        let perr = |line: usize, detail: String| QeError::Parse {
            file: origin.to_owned(),
            line,
            detail,
        };
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| QeError::io(origin, e))?;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                let Some((key, value)) = header.split_once('=') else {
                    continue;
                };
                let num = |v: &str| {
                    v.parse::<f64>()
                        .map_err(|_| perr(i + 1, format!("invalid number `{v}`")))
                };
                match key {
                    "stream" => model.stream = value.parse()?,
                    "C" => model.c = num(value)?,
                    "gamma" => model.gamma = num(value)?,
                    "bins" => {
                        model.features.bins = value
                            .parse()
                            .map_err(|_| perr(i + 1, format!("invalid bins `{value}`")))?
                    }
                    "templates" => model.features.set_enabled(value)?,
                    "systems" => {
                        model.systems = value
                            .split(',')
                            .filter(|s| !s.is_empty())
                            .map(str::to_owned)
                            .collect()
                    }
                    _ => {}
                }
                continue;
            }
            let (k, v) = line
                .split_once('\t')
                .ok_or_else(|| perr(i + 1, "expected key<TAB>weight".into()))?;
            let key = u64::from_str_radix(k, 16)
                .map_err(|_| perr(i + 1, format!("invalid feature key `{k}`")))?;
            let weight: f64 = v
                .parse()
                .ok()
                .filter(|w: &f64| w.is_finite())
                .ok_or_else(|| perr(i + 1, format!("invalid weight `{v}`")))?;
            model.weights.insert(key, weight);
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|e| QeError::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| QeError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = fs::File::open(path).map_err(|e| QeError::io(path, e))?;
        Self::read_from(&mut BufReader::new(file), &path.display().to_string())
    }
}

pub(crate) fn score_tables_with(
    inst: &CompiledInstance,
    features: &FeatureConfig,
    weight: impl Fn(u64) -> f64,
) -> ScoreTables {
    let emit = inst
        .emit
        .iter()
        .map(|keys| {
            [
                keys[0].iter().map(|&k| weight(k)).sum(),
                keys[1].iter().map(|&k| weight(k)).sum(),
            ]
        })
        .collect();
    let mut trans = [[0.0; 2]; 3];
    if features.bigram {
        let tk = transition_keys();
        for p in 0..3 {
            for y in 0..2 {
                trans[p][y] = weight(tk[p][y]);
            }
        }
    }
    ScoreTables { emit, trans }
}
