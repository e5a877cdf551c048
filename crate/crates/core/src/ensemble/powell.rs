//! Powell's direction-set minimization on the unit box.
//!
//! Line searches scan a uniform grid over the feasible section of the line,
//! then rescan at ten times the resolution around the best grid point. The
//! objective may be piecewise constant (thresholded F1), so no derivative or
//! bracketing assumption is made.

use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq)]
pub struct PowellConfig {
    /// Stop when a full cycle improves the objective by less than this.
    pub tol: f64,
    pub max_cycles: usize,
    /// Grid points per line search (at least 2).
    pub line_samples: usize,
}

impl Default for PowellConfig {
    fn default() -> Self {
        PowellConfig {
            tol: 1e-6,
            max_cycles: 20,
            line_samples: 101,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowellResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub cycles: usize,
    pub evaluations: usize,
}

struct Search<'a, F> {
    f: &'a F,
    samples: usize,
    evaluations: usize,
}

impl<F: Fn(&[f64]) -> f64 + Sync> Search<'_, F> {
    fn eval_many(&mut self, points: &[Vec<f64>]) -> Vec<f64> {
        self.evaluations += points.len();
        points.par_iter().map(|p| (self.f)(p)).collect()
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        (self.f)(x)
    }

    /// Best point on `x + t d` inside the box; returns the old point unless
    /// the objective strictly improves.
    fn line(&mut self, x: &[f64], fx: f64, d: &[f64]) -> (Vec<f64>, f64) {
        let Some((lo, hi)) = feasible_interval(x, d) else {
            return (x.to_vec(), fx);
        };
        if hi - lo <= f64::EPSILON {
            return (x.to_vec(), fx);
        }
        let at = |t: f64| -> Vec<f64> {
            x.iter()
                .zip(d)
                .map(|(xi, di)| (xi + t * di).clamp(0.0, 1.0))
                .collect()
        };
        let n = self.samples.max(2);
        let step = (hi - lo) / (n - 1) as f64;
        let coarse: Vec<f64> = (0..n).map(|k| lo + step * k as f64).collect();
        let values = self.eval_many(&coarse.iter().map(|&t| at(t)).collect::<Vec<_>>());
        let t_best = pick(&coarse, &values);

        let fine_step = step / 10.0;
        let fine: Vec<f64> = (-10..=10)
            .map(|k| t_best + fine_step * k as f64)
            .filter(|t| *t >= lo && *t <= hi)
            .collect();
        let fine_values = self.eval_many(&fine.iter().map(|&t| at(t)).collect::<Vec<_>>());

        let mut ts = coarse;
        ts.extend(fine);
        let mut vs = values;
        vs.extend(fine_values);
        let (mut best_t, mut best_v): (f64, f64) = (0.0, fx);
        for (&t, &v) in ts.iter().zip(&vs) {
            if v < best_v || (v == best_v && best_t != 0.0 && t.abs() < best_t.abs()) {
                best_t = t;
                best_v = v;
            }
        }
        if best_v < fx {
            (at(best_t), best_v)
        } else {
            (x.to_vec(), fx)
        }
    }
}

/// Lowest value, ties broken toward the smallest step.
fn pick(ts: &[f64], vs: &[f64]) -> f64 {
    let mut best = 0;
    for i in 1..ts.len() {
        if vs[i] < vs[best] || (vs[i] == vs[best] && ts[i].abs() < ts[best].abs()) {
            best = i;
        }
    }
    ts[best]
}

/// Range of `t` keeping `x + t d` inside [0,1]^n.
fn feasible_interval(x: &[f64], d: &[f64]) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut moving = false;
    for (&xi, &di) in x.iter().zip(d) {
        if di.abs() < 1e-15 {
            continue;
        }
        moving = true;
        let a = (0.0 - xi) / di;
        let b = (1.0 - xi) / di;
        lo = lo.max(a.min(b));
        hi = hi.min(a.max(b));
    }
    (moving && lo <= hi).then_some((lo, hi))
}

/// Minimizes `f` over [0,1]^n starting at `init`.
///
/// Directions start as the coordinate basis. After each cycle the direction
/// of largest single decrease is replaced by the net displacement when the
/// classic Powell acceptance test passes. The returned value never exceeds
/// `f(init)`.
pub fn powell_optimize<F>(f: &F, init: &[f64], cfg: &PowellConfig) -> PowellResult
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = init.len();
    let mut search = Search {
        f,
        samples: cfg.line_samples,
        evaluations: 0,
    };
    let mut x: Vec<f64> = init.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let mut fx = search.eval(&x);
    let mut dirs: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut d = vec![0.0; n];
            d[i] = 1.0;
            d
        })
        .collect();

    let mut cycles = 0;
    while cycles < cfg.max_cycles && n > 0 {
        cycles += 1;
        let (x0, f0) = (x.clone(), fx);
        let (mut big_drop, mut big_idx) = (0.0, 0);
        for (i, d) in dirs.iter().enumerate() {
            let (nx, nf) = search.line(&x, fx, d);
            if fx - nf > big_drop {
                big_drop = fx - nf;
                big_idx = i;
            }
            x = nx;
            fx = nf;
        }
        if f0 - fx < cfg.tol {
            break;
        }
        let displacement: Vec<f64> = x.iter().zip(&x0).map(|(a, b)| a - b).collect();
        if displacement.iter().all(|v| v.abs() < 1e-15) {
            continue;
        }
        let extrapolated: Vec<f64> = x
            .iter()
            .zip(&displacement)
            .map(|(a, d)| (a + d).clamp(0.0, 1.0))
            .collect();
        let fe = search.eval(&extrapolated);
        if fe < f0 {
            let t = 2.0 * (f0 - 2.0 * fx + fe) * (f0 - fx - big_drop).powi(2)
                - big_drop * (f0 - fe).powi(2);
            if t < 0.0 {
                let (nx, nf) = search.line(&x, fx, &displacement);
                x = nx;
                fx = nf;
                let last = n - 1;
                dirs[big_idx] = dirs[last].clone();
                dirs[last] = displacement;
            }
        }
    }
    PowellResult {
        point: x,
        value: fx,
        cycles,
        evaluations: search.evaluations,
    }
}
