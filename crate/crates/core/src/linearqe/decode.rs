use super::features::{CompiledInstance, SequenceInstance};
use super::model::{LinearModel, ScoreTables};
use crate::corpus::Tag;

/// Exact first-order Viterbi over {OK, BAD}.
///
/// With `cost_gold`, every position whose label differs from the gold label
/// gains +1 (Hamming loss-augmented decoding); the returned score then
/// includes the loss. Ties resolve toward OK.
pub fn viterbi_tables(tables: &ScoreTables, cost_gold: Option<&[Tag]>) -> (Vec<Tag>, f64) {
    let n = tables.emit.len();
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    let emit = |i: usize, y: usize| {
        let mut s = tables.emit[i][y];
        if let Some(g) = cost_gold {
            if g[i].index() != y {
                s += 1.0;
            }
        }
        s
    };
    let mut delta = vec![[0.0f64; 2]; n];
    let mut back = vec![[0usize; 2]; n];
    for y in 0..2 {
        delta[0][y] = tables.trans[0][y] + emit(0, y);
    }
    for i in 1..n {
        for y in 0..2 {
            let via_ok = delta[i - 1][0] + tables.trans[1][y];
            let via_bad = delta[i - 1][1] + tables.trans[2][y];
            let (best, arg) = if via_bad > via_ok {
                (via_bad, 1)
            } else {
                (via_ok, 0)
            };
            delta[i][y] = best + emit(i, y);
            back[i][y] = arg;
        }
    }
    let mut y = if delta[n - 1][1] > delta[n - 1][0] {
        1
    } else {
        0
    };
    let score = delta[n - 1][y];
    let mut path = vec![Tag::Ok; n];
    for i in (0..n).rev() {
        path[i] = Tag::ALL[y];
        y = back[i][y];
    }
    (path, score)
}

/// Score of a fixed label sequence.
pub fn sequence_score(tables: &ScoreTables, tags: &[Tag]) -> f64 {
    let mut prev = 0usize;
    let mut s = 0.0;
    for (i, t) in tags.iter().enumerate() {
        let y = t.index();
        s += tables.trans[prev][y] + tables.emit[i][y];
        prev = 1 + y;
    }
    s
}

/// Max-marginal margin `m_i(BAD) - m_i(OK)` at every position, where
/// `m_i(y)` is the best score of any sequence with label `y` at `i`.
pub fn max_marginal_margins(tables: &ScoreTables) -> Vec<f64> {
    let n = tables.emit.len();
    if n == 0 {
        return Vec::new();
    }
    let mut fwd = vec![[0.0f64; 2]; n];
    for y in 0..2 {
        fwd[0][y] = tables.trans[0][y] + tables.emit[0][y];
    }
    for i in 1..n {
        for y in 0..2 {
            fwd[i][y] = (fwd[i - 1][0] + tables.trans[1][y])
                .max(fwd[i - 1][1] + tables.trans[2][y])
                + tables.emit[i][y];
        }
    }
    let mut bwd = vec![[0.0f64; 2]; n];
    for i in (0..n - 1).rev() {
        for y in 0..2 {
            bwd[i][y] = (0..2)
                .map(|z| tables.trans[1 + y][z] + tables.emit[i + 1][z] + bwd[i + 1][z])
                .fold(f64::NEG_INFINITY, f64::max);
        }
    }
    (0..n)
        .map(|i| (fwd[i][1] + bwd[i][1]) - (fwd[i][0] + bwd[i][0]))
        .collect()
}

pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Best tag sequence and its score under `model`.
pub fn viterbi(
    inst: &SequenceInstance,
    model: &LinearModel,
    cost_gold: Option<&[Tag]>,
) -> (Vec<Tag>, f64) {
    let compiled = CompiledInstance::new(inst, &model.features);
    viterbi_tables(&model.score_tables(&compiled), cost_gold)
}

/// P(BAD) per position: logistic of `gamma` times the max-marginal margin.
pub fn predict_probs(inst: &SequenceInstance, model: &LinearModel, gamma: f64) -> Vec<f64> {
    let compiled = CompiledInstance::new(inst, &model.features);
    max_marginal_margins(&model.score_tables(&compiled))
        .into_iter()
        .map(|m| logistic(gamma * m))
        .collect()
}
