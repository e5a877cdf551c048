//! L2-regularized least squares with an unpenalized intercept, and
//! k-fold selection of the penalty.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{QeError, Result};
use crate::folds::FoldPlan;

#[derive(Clone, Debug, PartialEq)]
pub struct RidgeModel {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
    pub feature_names: Vec<String>,
    pub fit_intercept: bool,
}

impl RidgeModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(row)
                .map(|(c, x)| c * x)
                .sum::<f64>()
    }

    pub fn predict(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        rows.iter().map(|r| self.predict_row(r)).collect()
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        self.feature_names = names;
        self
    }

    pub fn write_to(&self, w: &mut dyn Write) -> std::io::Result<()> {
        writeln!(w, "#lambda={}", self.lambda)?;
        writeln!(w, "#fit_intercept={}", self.fit_intercept)?;
        writeln!(w, "#intercept={}", self.intercept)?;
        for (n, c) in self.feature_names.iter().zip(&self.coefficients) {
            writeln!(w, "{n}\t{c}")?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut dyn BufRead, origin: &str) -> Result<Self> {
        let perr = |line: usize, detail: String| QeError::Parse {
            file: origin.to_owned(),
            line,
            detail,
        };
        let mut m = RidgeModel {
            coefficients: Vec::new(),
            intercept: 0.0,
            lambda: 0.0,
            feature_names: Vec::new(),
            fit_intercept: true,
        };
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| QeError::io(origin, e))?;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let num = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| perr(i + 1, format!("invalid number `{v}`")))
            };
            if let Some(h) = line.strip_prefix('#') {
                match h.split_once('=') {
                    Some(("lambda", v)) => m.lambda = num(v)?,
                    Some(("intercept", v)) => m.intercept = num(v)?,
                    Some(("fit_intercept", v)) => m.fit_intercept = v.trim() == "true",
                    _ => {}
                }
                continue;
            }
            let (name, c) = line
                .rsplit_once('\t')
                .ok_or_else(|| perr(i + 1, "expected name<TAB>coefficient".into()))?;
            m.feature_names.push(name.to_owned());
            m.coefficients.push(num(c)?);
        }
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|e| QeError::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| QeError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = fs::File::open(path).map_err(|e| QeError::io(path, e))?;
        Self::read_from(&mut BufReader::new(f), &path.display().to_string())
    }
}

fn check_design(x: &[Vec<f64>], y: &[f64]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(QeError::DegenerateInput(format!(
            "{} rows but {} targets",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(QeError::DegenerateInput("need at least two rows".into()));
    }
    let p = x[0].len();
    if x.iter().any(|r| r.len() != p) {
        return Err(QeError::DegenerateInput("ragged design matrix".into()));
    }
    Ok(p)
}

/// Solves `(Z'Z + lambda P) b = Z'y`, where `Z` is `X` with a trailing
/// column of ones when `fit_intercept` is set and `P` is the identity with
/// a zero on the intercept's diagonal entry.
pub fn ridge_fit(
    x: &[Vec<f64>],
    y: &[f64],
    lambda: f64,
    fit_intercept: bool,
) -> Result<RidgeModel> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(QeError::Config(format!(
            "lambda must be >= 0, got {lambda}"
        )));
    }
    let p = check_design(x, y)?;
    let cols = p + usize::from(fit_intercept);
    if cols == 0 {
        return Err(QeError::DegenerateInput(
            "no features and no intercept".into(),
        ));
    }
    let z = DMatrix::from_fn(x.len(), cols, |r, c| if c < p { x[r][c] } else { 1.0 });
    let mut a = z.transpose() * &z;
    for j in 0..p {
        a[(j, j)] += lambda;
    }
    let b = z.transpose() * DVector::from_column_slice(y);

    let max_diag = (0..cols).map(|j| a[(j, j)].abs()).fold(0.0, f64::max);
    let chol = a
        .clone()
        .cholesky()
        .ok_or(QeError::SingularSystem { lambda })?;
    let l = chol.l();
    let min_pivot = (0..cols)
        .map(|j| l[(j, j)] * l[(j, j)])
        .fold(f64::INFINITY, f64::min);
    if max_diag == 0.0 || min_pivot <= 1e-12 * max_diag {
        return Err(QeError::SingularSystem { lambda });
    }
    let beta = chol.solve(&b);
    Ok(RidgeModel {
        coefficients: beta.iter().take(p).copied().collect(),
        intercept: if fit_intercept { beta[p] } else { 0.0 },
        lambda,
        feature_names: (0..p).map(|j| format!("x{j}")).collect(),
        fit_intercept,
    })
}

/// Outcome of penalty selection.
#[derive(Clone, Debug, PartialEq)]
pub struct RidgeCv {
    pub lambda: f64,
    pub model: RidgeModel,
    /// Held-out mean squared error per grid value (infinite when a fold's
    /// system was singular).
    pub errors: Vec<(f64, f64)>,
}

/// Picks the grid value with the lowest held-out mean squared error (ties
/// go to the larger value), then refits on every row.
pub fn ridge_cv(
    x: &[Vec<f64>],
    y: &[f64],
    lambda_grid: &[f64],
    k: usize,
    seed: u64,
    fit_intercept: bool,
) -> Result<RidgeCv> {
    if lambda_grid.is_empty() {
        return Err(QeError::Config("empty lambda grid".into()));
    }
    check_design(x, y)?;
    let mut perm: Vec<usize> = (0..x.len()).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let plan = FoldPlan::contiguous(x.len(), k)?;

    let mut errors = Vec::with_capacity(lambda_grid.len());
    for &lambda in lambda_grid {
        let mut sse = 0.0;
        let mut failed = false;
        for f in 0..plan.k() {
            let (train, held) = plan.split(f);
            let tx: Vec<Vec<f64>> = train.iter().map(|&i| x[perm[i]].clone()).collect();
            let ty: Vec<f64> = train.iter().map(|&i| y[perm[i]]).collect();
            match ridge_fit(&tx, &ty, lambda, fit_intercept) {
                Ok(m) => {
                    for &i in &held {
                        let r = m.predict_row(&x[perm[i]]) - y[perm[i]];
                        sse += r * r;
                    }
                }
                Err(QeError::SingularSystem { .. }) | Err(QeError::DegenerateInput(_)) => {
                    failed = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        let mse = if failed {
            f64::INFINITY
        } else {
            sse / x.len() as f64
        };
        errors.push((lambda, mse));
    }
    let mut best: Option<(f64, f64)> = None;
    for &(lambda, mse) in &errors {
        if !mse.is_finite() {
            continue;
        }
        best = match best {
            None => Some((lambda, mse)),
            Some((bl, be)) if mse < be || (mse == be && lambda > bl) => Some((lambda, mse)),
            keep => keep,
        };
    }
    let (lambda, _) = best.ok_or(QeError::SingularSystem {
        lambda: lambda_grid[0],
    })?;
    Ok(RidgeCv {
        lambda,
        model: ridge_fit(x, y, lambda, fit_intercept)?,
        errors,
    })
}
