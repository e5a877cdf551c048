//! Plain `key=value` run configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{QeError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Int,
    Real,
    OptReal,
    Bool,
    RealList,
    Text,
}

/// Every accepted key, its type and default.
const KEYS: &[(&str, Kind, &str)] = &[
    ("seed", Kind::Int, "0"),
    ("stream", Kind::Text, "words"),
    ("layout", Kind::Text, "interleaved"),
    ("threshold", Kind::Real, "0.5"),
    ("tune_threshold", Kind::Bool, "false"),
    ("hter_cap", Kind::Bool, "true"),
    ("epochs", Kind::Int, "10"),
    ("C", Kind::Real, "1"),
    ("average", Kind::Bool, "true"),
    ("gamma", Kind::Real, "1"),
    ("bins", Kind::Int, "10"),
    (
        "templates",
        Kind::Text,
        "bias,word,context,aligned,extra,stacked,bigram",
    ),
    ("jackknife_folds", Kind::Int, "10"),
    ("method", Kind::Text, "powell"),
    ("folds", Kind::Int, "10"),
    ("powell_tol", Kind::Real, "1e-6"),
    ("powell_max_cycles", Kind::Int, "20"),
    ("powell_line_samples", Kind::Int, "101"),
    ("stack_epochs", Kind::Int, "10"),
    ("stack_C", Kind::Real, "1"),
    ("stack_bins", Kind::Int, "10"),
    (
        "lambda_grid",
        Kind::RealList,
        "0,0.0001,0.001,0.01,0.1,1,10,100",
    ),
    ("sent_folds", Kind::Int, "10"),
    ("mqm_minor", Kind::Real, "1"),
    ("mqm_major", Kind::Real, "5"),
    ("mqm_critical", Kind::Real, "10"),
    ("mqm_floor", Kind::OptReal, "none"),
    ("severity", Kind::Text, "major"),
    ("doc_lambda_grid", Kind::RealList, "0"),
    ("doc_folds", Kind::Int, "5"),
];

fn kind_of(key: &str) -> Option<Kind> {
    KEYS.iter().find(|(k, _, _)| *k == key).map(|(_, t, _)| *t)
}

fn check_value(key: &str, kind: Kind, v: &str) -> Result<()> {
    let ok = match kind {
        Kind::Int => v.parse::<u64>().is_ok(),
        Kind::Real => v.parse::<f64>().is_ok_and(f64::is_finite),
        Kind::OptReal => v == "none" || v.parse::<f64>().is_ok_and(f64::is_finite),
        Kind::Bool => matches!(v, "true" | "false"),
        Kind::RealList => {
            !v.is_empty()
                && v.split(',')
                    .all(|x| x.trim().parse::<f64>().is_ok_and(f64::is_finite))
        }
        Kind::Text => !v.is_empty(),
    };
    if ok {
        Ok(())
    } else {
        Err(QeError::Config(format!("invalid value `{v}` for `{key}`")))
    }
}

/// Effective settings: defaults, then a config file, then overrides.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            values: KEYS
                .iter()
                .map(|(k, _, d)| (k.to_string(), d.to_string()))
                .collect(),
        }
    }
}

impl RunConfig {
    pub fn keys() -> impl Iterator<Item = &'static str> {
        KEYS.iter().map(|(k, _, _)| *k)
    }

    /// Sets a known key after checking its value's type.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let kind = kind_of(key).ok_or_else(|| QeError::Config(format!("unknown key `{key}`")))?;
        let value = value.trim();
        check_value(key, kind, value)?;
        self.values.insert(key.to_owned(), value.to_owned());
        Ok(())
    }

    /// Applies `KEY=VALUE`.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| QeError::Config(format!("expected KEY=VALUE, got `{pair}`")))?;
        self.set(k.trim(), v)
    }

    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            self.set_pair(line)
                .map_err(|e| QeError::Config(format!("{origin}:{}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| QeError::io(path, e))?;
        let mut c = RunConfig::default();
        c.apply_text(&text, &path.display().to_string())?;
        Ok(c)
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values
            .get(key)
            .unwrap_or_else(|| panic!("`{key}` is not a config key"))
    }

    pub fn usize(&self, key: &str) -> usize {
        self.raw(key).parse().expect("validated on set")
    }

    pub fn u64(&self, key: &str) -> u64 {
        self.raw(key).parse().expect("validated on set")
    }

    pub fn f64(&self, key: &str) -> f64 {
        self.raw(key).parse().expect("validated on set")
    }

    pub fn opt_f64(&self, key: &str) -> Option<f64> {
        match self.raw(key) {
            "none" => None,
            v => Some(v.parse().expect("validated on set")),
        }
    }

    pub fn bool(&self, key: &str) -> bool {
        self.raw(key) == "true"
    }

    pub fn f64_list(&self, key: &str) -> Vec<f64> {
        self.raw(key)
            .split(',')
            .map(|x| x.trim().parse().expect("validated on set"))
            .collect()
    }

    /// Parses a text key into any `FromStr` type.
    pub fn parse<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .parse()
            .map_err(|e| QeError::Config(format!("`{key}`: {e}")))
    }

    pub fn to_text(&self) -> String {
        self.values
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    /// Path of the snapshot that accompanies `output`.
    pub fn snapshot_path(output: &Path) -> PathBuf {
        let mut s = output.as_os_str().to_owned();
        s.push(".run.cfg");
        PathBuf::from(s)
    }

    /// Writes the effective configuration next to `output`.
    pub fn write_snapshot(&self, output: &Path, command: &str) -> Result<PathBuf> {
        let p = Self::snapshot_path(output);
        let body = format!("# command: {command}\n{}", self.to_text());
        fs::write(&p, body).map_err(|e| QeError::io(&p, e))?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse() {
        let c = RunConfig::default();
        assert_eq!(c.usize("epochs"), 10);
        assert_eq!(c.f64("powell_tol"), 1e-6);
        assert_eq!(c.opt_f64("mqm_floor"), None);
        assert_eq!(c.f64_list("doc_lambda_grid"), vec![0.0]);
        assert!(c.bool("hter_cap"));
    }

    #[test]
    fn file_and_rejections() {
        let mut c = RunConfig::default();
        c.apply_text("# comment\nepochs = 3\n\nthreshold=0.4\n", "cfg")
            .unwrap();
        assert_eq!(c.usize("epochs"), 3);
        assert_eq!(c.f64("threshold"), 0.4);
        assert!(c.apply_text("nope=1\n", "cfg").is_err());
        assert!(c.set("epochs", "x").is_err());
        assert!(c.set("tune_threshold", "yes").is_err());
        assert!(c.set("lambda_grid", "1,,2").is_err());
        assert!(c.set_pair("epochs").is_err());
    }

    #[test]
    fn snapshot_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = RunConfig::default();
        c.set("seed", "7").unwrap();
        let out = dir.path().join("model.txt");
        let p = c.write_snapshot(&out, "linear train").unwrap();
        assert_eq!(p, dir.path().join("model.txt.run.cfg"));
        assert_eq!(RunConfig::load(&p).unwrap(), c);
    }
}
