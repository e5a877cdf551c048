//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the lines always reach stdout.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qe_stack_core::corpus::{Stream, Tag};
use qe_stack_core::doclevel::*;
use qe_stack_core::ensemble::*;
use qe_stack_core::folds::FoldPlan;
use qe_stack_core::labeler::{align_edit, hter, tags_from_edits, EditKind};
use qe_stack_core::linearqe::*;
use qe_stack_core::metrics::{f1_mult, mcc, pearson};

const METRIC_TOL: f64 = 1e-12;
const HAND_TOL: f64 = 1e-9;
const VITERBI_TOL: f64 = 1e-9;
const POWELL_GAP: f64 = 0.005;
const RIDGE_TOL: f64 = 1e-8;
const SHRINK_TOL: f64 = 1e-6;
const MQM_TOL: f64 = 1e-9;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = fn() -> Verdict;

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let e = start.elapsed();
    if e <= limit {
        Ok(())
    } else {
        Err(format!(
            "took {:.1}s, limit {}s",
            e.as_secs_f64(),
            limit.as_secs()
        ))
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Verdict::Fail(format!($($msg)+));
        }
    };
}

fn rand_tags(rng: &mut ChaCha8Rng, n: usize) -> Vec<Tag> {
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.35) {
                Tag::Bad
            } else {
                Tag::Ok
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// 1. metrics

fn oracle_class_f1(g: &[Tag], p: &[Tag], c: Tag) -> f64 {
    let tp = g
        .iter()
        .zip(p)
        .filter(|(a, b)| **a == c && **b == c)
        .count() as f64;
    let np = p.iter().filter(|x| **x == c).count() as f64;
    let ng = g.iter().filter(|x| **x == c).count() as f64;
    if np == 0.0 && ng == 0.0 {
        return 1.0;
    }
    let pr = if np > 0.0 { tp / np } else { 0.0 };
    let rc = if ng > 0.0 { tp / ng } else { 0.0 };
    if pr + rc == 0.0 {
        0.0
    } else {
        2.0 * pr * rc / (pr + rc)
    }
}

fn oracle_mcc(g: &[Tag], p: &[Tag]) -> f64 {
    let count = |a: Tag, b: Tag| {
        g.iter()
            .zip(p)
            .filter(|(x, y)| **x == a && **y == b)
            .count() as f64
    };
    let (tp, tn) = (count(Tag::Bad, Tag::Bad), count(Tag::Ok, Tag::Ok));
    let (fp, fnn) = (count(Tag::Ok, Tag::Bad), count(Tag::Bad, Tag::Ok));
    let d = (tp + fp) * (tp + fnn) * (tn + fp) * (tn + fnn);
    if d == 0.0 {
        0.0
    } else {
        (tp * tn - fp * fnn) / d.sqrt()
    }
}

fn oracle_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    sxy / (sxx * syy).sqrt()
}

fn c1_metrics() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..80);
        let g = rand_tags(&mut rng, n);
        let p = rand_tags(&mut rng, n);
        let s = f1_mult(&g, &p).unwrap();
        let want = oracle_class_f1(&g, &p, Tag::Ok) * oracle_class_f1(&g, &p, Tag::Bad);
        worst = worst.max((s.f1_mult - want).abs());
        worst = worst.max((mcc(&g, &p).unwrap() - oracle_mcc(&g, &p)).abs());
        let m = rng.gen_range(2..60);
        let x: Vec<f64> = (0..m).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let y: Vec<f64> = (0..m).map(|_| rng.gen_range(-10.0..10.0)).collect();
        worst = worst.max((pearson(&x, &y).unwrap() - oracle_pearson(&x, &y)).abs());
    }
    ensure!(worst <= METRIC_TOL, "max deviation {worst:e}");
    use Tag::{Bad as B, Ok as O};
    let f = f1_mult(&[O, B, O, O], &[O, B, B, O]).unwrap().f1_mult;
    ensure!((f - 8.0 / 15.0).abs() < HAND_TOL, "f1_mult {f}");
    let m = mcc(&[O, B, O, O], &[O, B, B, O]).unwrap();
    ensure!((m - 2.0 / 12f64.sqrt()).abs() < HAND_TOL, "mcc {m}");
    let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
    ensure!((r - 0.8).abs() < HAND_TOL, "pearson {r}");
    if let Err(e) = within(Duration::from_secs(5), start) {
        return Verdict::Fail(e);
    }
    Verdict::Pass(format!("1000 random inputs, max deviation {worst:.1e}"))
}

// ---------------------------------------------------------------------------
// 2. edit labeling

fn levenshtein(a: &[String], b: &[String]) -> usize {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

fn words(s: &str) -> Vec<String> {
    s.split(' ').map(String::from).collect()
}

fn c2_labeling() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let vocab = ["a", "b", "c", "d", "e"];
    for k in 0..1000 {
        let sent = |rng: &mut ChaCha8Rng| -> Vec<String> {
            (0..rng.gen_range(1..15))
                .map(|_| vocab[rng.gen_range(0..vocab.len())].to_string())
                .collect()
        };
        let mt = sent(&mut rng);
        let pe = sent(&mut rng);
        let cost = align_edit(&mt, &pe).cost();
        ensure!(
            cost == levenshtein(&mt, &pe),
            "pair {k}: cost {cost} vs oracle"
        );
    }
    let s = align_edit(&words("a b c"), &words("a c"));
    ensure!(hter(&s, 2, true) == 0.5, "hter 0.5 example");
    let t = tags_from_edits(&s, 3).unwrap();
    ensure!(
        t.words == vec![Tag::Ok, Tag::Bad, Tag::Ok] && t.gaps == vec![Tag::Ok; 4],
        "deletion placement"
    );
    let s = align_edit(&words("a c"), &words("a b c"));
    ensure!(
        s.kinds() == vec![EditKind::Match, EditKind::InsIntoMtGap, EditKind::Match],
        "insertion script"
    );
    let t = tags_from_edits(&s, 2).unwrap();
    ensure!(
        t.words == vec![Tag::Ok; 2] && t.gaps == vec![Tag::Ok, Tag::Bad, Tag::Ok],
        "insertion placement"
    );
    let s = align_edit(&words("a b"), &words("x y z"));
    ensure!(hter(&s, 3, true) == 1.0, "hter 1.0 example");
    if let Err(e) = within(Duration::from_secs(10), start) {
        return Verdict::Fail(e);
    }
    Verdict::Pass("1000 pairs equal Levenshtein; worked examples exact".into())
}

// ---------------------------------------------------------------------------
// 3. Viterbi

fn brute_force(t: &ScoreTables) -> f64 {
    let n = t.emit.len();
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..1 << n {
        let mut s = 0.0;
        let mut prev = 0;
        for i in 0..n {
            let y = (mask >> i & 1) as usize;
            s += t.trans[prev][y] + t.emit[i][y];
            prev = y + 1;
        }
        best = best.max(s);
    }
    best
}

fn c3_viterbi() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=12);
        let mut r = || rng.gen_range(-3.0..3.0);
        let t = ScoreTables {
            emit: (0..n).map(|_| [r(), r()]).collect(),
            trans: [[r(), r()], [r(), r()], [r(), r()]],
        };
        let (path, s) = viterbi_tables(&t, None);
        let b = brute_force(&t);
        worst = worst
            .max((s - b).abs())
            .max((sequence_score(&t, &path) - b).abs());
    }
    ensure!(worst <= VITERBI_TOL, "max deviation {worst:e}");
    Verdict::Pass(format!("200 models, max deviation {worst:.1e}"))
}

// ---------------------------------------------------------------------------
// 4. MIRA

fn c4_mira() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let data: Vec<LabeledInstance> = (0..500)
        .map(|_| {
            let len = rng.gen_range(1..15);
            let gold = rand_tags(&mut rng, len);
            let mt: Vec<String> = gold
                .iter()
                .map(|t| {
                    let id = rng.gen_range(0..50);
                    if t.is_bad() {
                        format!("x{id}")
                    } else {
                        format!("w{id}")
                    }
                })
                .collect();
            LabeledInstance {
                inst: SequenceInstance::words(&mt, None, None),
                gold,
            }
        })
        .collect();
    let cfg = MiraConfig {
        epochs: 10,
        ..MiraConfig::default()
    };
    let features = FeatureConfig::default();
    let m = mira_train(&data, &features, Stream::Words, &cfg).unwrap();
    let errors: usize = data
        .iter()
        .map(|d| {
            let (t, _) = viterbi(&d.inst, &m, None);
            t.iter().zip(&d.gold).filter(|(a, b)| a != b).count()
        })
        .sum();
    ensure!(errors == 0, "{errors} training errors after 10 epochs");
    let again = mira_train(&data, &features, Stream::Words, &cfg).unwrap();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    m.write_to(&mut a).unwrap();
    again.write_to(&mut b).unwrap();
    ensure!(a == b, "reruns differ");
    Verdict::Pass(format!(
        "500 sentences, 0 errors, {} weights, reruns identical",
        m.weights.len()
    ))
}

// ---------------------------------------------------------------------------
// 5. Powell vs grid

fn oracle_f1_probs(gold: &[Vec<Tag>], probs: &[Vec<f64>], t: f64) -> f64 {
    let g: Vec<Tag> = gold.concat();
    let p: Vec<Tag> = probs
        .iter()
        .flatten()
        .map(|v| if *v >= t { Tag::Bad } else { Tag::Ok })
        .collect();
    oracle_class_f1(&g, &p, Tag::Ok) * oracle_class_f1(&g, &p, Tag::Bad)
}

fn mix3(systems: &[SystemStream], w: &[f64]) -> Vec<Vec<f64>> {
    let total: f64 = w.iter().sum();
    (0..systems[0].probs.len())
        .map(|i| {
            (0..systems[0].probs[i].len())
                .map(|j| {
                    systems
                        .iter()
                        .zip(w)
                        .map(|(s, x)| x / total * s.probs[i][j])
                        .sum()
                })
                .collect()
        })
        .collect()
}

/// Each system is sharp on a random subset of tokens; `block` > 0 makes
/// the sharp system change every `block` sentences instead.
fn synthetic(seed: u64, n_sent: usize, block: usize) -> (Vec<SystemStream>, Vec<Vec<Tag>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gold = Vec::new();
    let mut probs = vec![Vec::new(); 3];
    let mut favoured = 0;
    for i in 0..n_sent {
        if block > 0 && i % block == 0 {
            favoured = rng.gen_range(0..3);
        }
        let len = rng.gen_range(4..12);
        let g = rand_tags(&mut rng, len);
        for (s, out) in probs.iter_mut().enumerate() {
            let row: Vec<f64> = g
                .iter()
                .map(|t| {
                    let sharp = if block > 0 {
                        s == favoured
                    } else {
                        rng.gen_range(0..3) == s
                    };
                    let mix = if sharp { 0.8 } else { 0.25 };
                    let signal = if t.is_bad() { 1.0 } else { 0.0 };
                    mix * signal + (1.0 - mix) * rng.gen::<f64>()
                })
                .collect();
            out.push(row);
        }
        gold.push(g);
    }
    let systems = probs
        .into_iter()
        .enumerate()
        .map(|(i, p)| SystemStream::new(format!("s{i}"), p))
        .collect();
    (systems, gold)
}

fn c5_powell() -> Verdict {
    let start = Instant::now();
    let mut worst_gap = f64::NEG_INFINITY;
    for seed in 0..20 {
        let (systems, gold) = synthetic(100 + seed, 60, 0);
        let fit =
            fit_word_ensemble(&systems, &gold, Stream::Words, &WordFitConfig::default()).unwrap();
        let mut grid = f64::NEG_INFINITY;
        for a in 0..=20 {
            for b in 0..=20 - a {
                let w = [a as f64, b as f64, (20 - a - b) as f64];
                grid = grid.max(oracle_f1_probs(&gold, &mix3(&systems, &w), 0.5));
            }
        }
        let singles = (0..3)
            .map(|s| oracle_f1_probs(&gold, &systems[s].probs, 0.5))
            .fold(f64::NEG_INFINITY, f64::max);
        let own = oracle_f1_probs(
            &gold,
            &mix3(&systems, &fit.weights.normalized().unwrap()),
            0.5,
        );
        ensure!(
            (own - fit.f1_mult).abs() < 1e-12,
            "seed {seed}: reported score differs"
        );
        ensure!(
            fit.f1_mult >= singles,
            "seed {seed}: below best single system"
        );
        worst_gap = worst_gap.max(grid - fit.f1_mult);
        ensure!(
            fit.f1_mult >= grid - POWELL_GAP,
            "seed {seed}: {:.4} vs grid {grid:.4}",
            fit.f1_mult
        );
    }
    if let Err(e) = within(Duration::from_secs(60), start) {
        return Verdict::Fail(e);
    }
    Verdict::Pass(format!(
        "20 ensembles, worst shortfall vs grid {worst_gap:.4}"
    ))
}

// ---------------------------------------------------------------------------
// 6. k-fold protocol

fn c6_kfold() -> Verdict {
    let cfg = WordFitConfig::default();
    let powell = PowellEnsembler;
    let (systems, gold) = synthetic(600, 80, 0);
    let dup = vec![
        SystemStream::new("a", systems[1].probs.clone()),
        SystemStream::new("b", systems[1].probs.clone()),
    ];
    let plan = FoldPlan::contiguous(gold.len(), 10).unwrap();
    let est = kfold_estimate(&powell, &dup, &gold, &plan, Stream::Words, &cfg).unwrap();
    let single = oracle_f1_probs(&gold, &systems[1].probs, 0.5);
    ensure!(
        est == single,
        "duplicated systems: {est} vs single {single}"
    );

    let mut gaps = Vec::new();
    for seed in 0..50 {
        let (systems, gold) = synthetic(1000 + seed, 50, 5);
        let plan = FoldPlan::contiguous(gold.len(), 10).unwrap();
        let est = kfold_estimate(&powell, &systems, &gold, &plan, Stream::Words, &cfg).unwrap();
        let full = in_sample_score(&powell, &systems, &gold, Stream::Words, &cfg).unwrap();
        gaps.push(full - est);
    }
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    ensure!(mean > 0.0, "mean overfitting gap {mean:.4}");
    Verdict::Pass(format!(
        "duplicates exact; mean gap over 50 seeds {mean:.4}"
    ))
}

// ---------------------------------------------------------------------------
// 7. ridge

fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        x[r] = (b[r] - (r + 1..n).map(|k| a[r][k] * x[k]).sum::<f64>()) / a[r][r];
    }
    x
}

fn c7_ridge() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = rng.gen_range(1..7);
        let n = rng.gen_range(p + 10..60);
        let lambda = [0.0, 0.01, 0.3, 2.0][rng.gen_range(0..4)];
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let q = p + 1;
        let mut a = vec![vec![0.0; q]; q];
        let mut b = vec![0.0; q];
        for (r, yi) in x.iter().zip(&y) {
            let z: Vec<f64> = r.iter().copied().chain([1.0]).collect();
            for i in 0..q {
                b[i] += z[i] * yi;
                for j in 0..q {
                    a[i][j] += z[i] * z[j];
                }
            }
        }
        for (i, row) in a.iter_mut().enumerate().take(p) {
            row[i] += lambda;
        }
        let o = gauss(a, b);
        let m = ridge_fit(&x, &y, lambda, true).unwrap();
        for j in 0..p {
            worst = worst.max((m.coefficients[j] - o[j]).abs());
        }
        worst = worst.max((m.intercept - o[p]).abs());
    }
    ensure!(worst <= RIDGE_TOL, "max deviation {worst:e}");
    let x: Vec<Vec<f64>> = (0..40)
        .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let y: Vec<f64> = x
        .iter()
        .map(|r| 1.0 + 2.0 * r[0] - r[1] + 0.5 * r[2])
        .collect();
    let big = ridge_fit(&x, &y, 1e9, true).unwrap();
    let max_c = big.coefficients.iter().map(|c| c.abs()).fold(0.0, f64::max);
    ensure!(
        max_c < SHRINK_TOL,
        "lambda=1e9 leaves coefficient {max_c:e}"
    );
    let grid = [0.0, 1e-3, 1e-1, 1.0, 10.0];
    let cv = ridge_cv(&x, &y, &grid, 5, 0, true).unwrap();
    ensure!(cv.lambda == grid[0], "ridge_cv chose {}", cv.lambda);
    Verdict::Pass(format!(
        "100 systems, max deviation {worst:.1e}; shrinkage and cv ok"
    ))
}

// ---------------------------------------------------------------------------
// 8. document round trip

fn c8_roundtrip() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for id in 0..500 {
        let sentences: Vec<String> = (0..rng.gen_range(1..5))
            .map(|_| {
                let toks: Vec<String> = (0..rng.gen_range(1..12))
                    .map(|_| {
                        (0..rng.gen_range(1..6))
                            .map(|_| ['a', 'ü', 'q', ','][rng.gen_range(0..4)])
                            .collect()
                    })
                    .collect();
                toks.join(&" ".repeat(rng.gen_range(1..3)))
            })
            .collect();
        let doc = Document::new(format!("d{id}"), sentences);
        let mut gold = Vec::new();
        for (s, toks) in doc.token_offsets.iter().enumerate() {
            let mut i = 0;
            while i < toks.len() {
                if rng.gen_bool(0.3) {
                    let j = (i + rng.gen_range(0..3)).min(toks.len() - 1);
                    let sev = Severity::ALL[rng.gen_range(0..3)];
                    gold.push(Annotation::single(sev, Span::new(s, toks[i].0, toks[j].1)));
                    i = j + 2;
                } else {
                    i += 1;
                }
            }
        }
        let tags = annotations_to_tags(&doc, &gold).unwrap();
        let back = tags_to_annotations(&doc, &tags, Severity::Major).unwrap();
        let mut want: Vec<Annotation> = gold
            .iter()
            .map(|a| Annotation::single(Severity::Major, a.spans[0]))
            .collect();
        sort_annotations(&mut want);
        ensure!(back == want, "document {id} did not round-trip");
    }
    let doc = Document::new("fig", vec!["Les bandes sont parfaits .".into()]);
    let two = Annotation::new(
        Severity::Minor,
        vec![Span::new(0, 4, 10), Span::new(0, 16, 24)],
    )
    .unwrap();
    let back = tags_to_annotations(
        &doc,
        &annotations_to_tags(&doc, &[two]).unwrap(),
        Severity::Major,
    )
    .unwrap();
    ensure!(
        back.len() == 2,
        "two-span annotation gave {} annotations",
        back.len()
    );
    Verdict::Pass("500 documents identical; two-span annotation splits in 2".into())
}

// ---------------------------------------------------------------------------
// 9. MQM

fn c9_mqm() -> Verdict {
    let w = MqmWeights::default();
    let a = mqm_closed_form([1, 2, 0], 100, &w, None).unwrap();
    let b = mqm_closed_form([0, 0, 2], 10, &w, None).unwrap();
    ensure!(
        (a - 89.0).abs() < MQM_TOL && (b + 100.0).abs() < MQM_TOL,
        "examples {a}, {b}"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..1000 {
        let c = [
            rng.gen_range(0..40),
            rng.gen_range(0..40),
            rng.gen_range(0..40),
        ];
        let n = rng.gen_range(1..400);
        let k = rng.gen_range(0..3);
        let f = |c: [usize; 3]| mqm_closed_form(c, n, &w, None).unwrap();
        let mut c1 = c;
        c1[k] += 1;
        let mut c2 = c;
        c2[k] += 2;
        ensure!(
            ((f(c2) - f(c1)) - (f(c1) - f(c))).abs() < MQM_TOL,
            "not affine at {c:?}"
        );
        ensure!(f(c1) <= f(c), "not monotone at {c:?}");
    }
    Verdict::Pass("worked examples exact; 1000 count vectors affine and monotone".into())
}

// ---------------------------------------------------------------------------
// 10. official dataset statistics

fn c10_dataset() -> Verdict {
    let Some(root) = std::env::var_os("QE_STACK_DATA").map(PathBuf::from) else {
        return Verdict::Skip("QE_STACK_DATA not set".into());
    };
    let ann = root.join("doc/annotations.tsv");
    if !ann.exists() {
        return Verdict::Skip(format!("{} missing", ann.display()));
    }
    let lines = read_annotation_lines(&ann).unwrap();
    let st = annotation_stats(lines.iter().map(|(_, a)| a));
    ensure!(
        (st.total, st.multi_span, st.cross_sentence) == (36_242, 4_170, 149),
        "counts {} / {} / {}",
        st.total,
        st.multi_span,
        st.cross_sentence
    );
    let pct = |s| format!("{:.2}", st.percent(s));
    ensure!(
        pct(Severity::Major) == "84.12"
            && pct(Severity::Minor) == "11.74"
            && pct(Severity::Critical) == "4.14",
        "severity split {} / {} / {}",
        pct(Severity::Major),
        pct(Severity::Minor),
        pct(Severity::Critical)
    );
    for (pair, want) in [("en-de", 13_442), ("en-ru", 15_089)] {
        let d = root.join(pair);
        let paths = qe_stack_core::corpus::CorpusPaths {
            src: d.join("train.src"),
            mt: d.join("train.mt"),
            pe: Some(d.join("train.pe")),
            ..Default::default()
        };
        match qe_stack_core::corpus::load_corpus(&paths, Default::default()) {
            Ok(c) => ensure!(c.len() == want, "{pair}: {} triplets", c.len()),
            Err(e) => return Verdict::Fail(format!("{pair}: {e}")),
        }
    }
    Verdict::Pass("annotation and triplet counts match".into())
}

// ---------------------------------------------------------------------------
// 11. end-to-end CLI pipeline

fn qe(dir: &Path, args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qe-stack"))
        .current_dir(dir)
        .args(["--jobs", "1", "--seed", "7", "--format", "kv"])
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "`{}` exited {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn kv(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .and_then(|v| v.parse().ok())
        .unwrap_or(f64::NAN)
}

fn join_rows<T: ToString>(rows: &[Vec<T>]) -> String {
    rows.iter()
        .map(|r| r.iter().map(T::to_string).collect::<Vec<_>>().join(" ") + "\n")
        .collect()
}

/// Writes a 200-sentence corpus and two simulated upstream systems.
fn write_inputs(dir: &Path) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut src, mut mt, mut pe, mut al) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for _ in 0..200 {
        let n = rng.gen_range(3..14);
        let m: Vec<String> = (0..n)
            .map(|_| format!("w{}", rng.gen_range(0..60)))
            .collect();
        let s: Vec<String> = m.iter().map(|w| format!("s{}", &w[1..])).collect();
        let mut p = Vec::new();
        for w in &m {
            match rng.gen_range(0..10) {
                0 => {}
                1 => p.push(format!("w{}", rng.gen_range(0..60))),
                2 => {
                    p.push(w.clone());
                    p.push(format!("w{}", rng.gen_range(0..60)));
                }
                _ => p.push(w.clone()),
            }
        }
        if p.is_empty() {
            p.push("w0".into());
        }
        al.push((0..n).map(|i| format!("{i}-{i}")).collect::<Vec<_>>());
        src.push(s);
        mt.push(m);
        pe.push(p);
    }
    fs::write(dir.join("c.src"), join_rows(&src)).unwrap();
    fs::write(dir.join("c.mt"), join_rows(&mt)).unwrap();
    fs::write(dir.join("c.pe"), join_rows(&pe)).unwrap();
    fs::write(dir.join("c.align"), join_rows(&al)).unwrap();
}

/// Noisy per-word probabilities and sentence scores built from gold labels.
fn write_systems(dir: &Path) {
    let tags = fs::read_to_string(dir.join("c.tags")).unwrap();
    let hter = fs::read_to_string(dir.join("c.hter")).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut manifest = String::from("lin\twords\tlin.oof\n");
    for (k, noise) in [("a", 0.65), ("b", 0.8)] {
        let mut words = Vec::new();
        let mut scores = Vec::new();
        for (line, h) in tags.lines().zip(hter.lines()) {
            let t: Vec<&str> = line.split(' ').collect();
            words.push(
                t.iter()
                    .skip(1)
                    .step_by(2)
                    .map(|x| {
                        let s = if *x == "BAD" { 1.0 } else { 0.0 };
                        let v: f64 = (1.0 - noise) * s + noise * rng.gen::<f64>();
                        format!("{v:.4}")
                    })
                    .collect::<Vec<_>>(),
            );
            let h: f64 = h.parse().unwrap();
            scores.push(format!(
                "{:.4}",
                (1.0 - noise) * h + noise * rng.gen::<f64>()
            ));
        }
        fs::write(dir.join(format!("{k}.words")), join_rows(&words)).unwrap();
        fs::write(dir.join(format!("{k}.scores")), scores.join("\n") + "\n").unwrap();
        manifest.push_str(&format!(
            "{k}\twords\t{k}.words\n{k}\tsentence\t{k}.scores\n"
        ));
    }
    fs::write(dir.join("systems.tsv"), manifest).unwrap();
}

fn pipeline(dir: &Path) -> Result<(f64, f64), String> {
    write_inputs(dir);
    qe(
        dir,
        &[
            "make-labels",
            "--mt",
            "c.mt",
            "--pe",
            "c.pe",
            "--src",
            "c.src",
            "--align",
            "c.align",
            "--out-prefix",
            "c",
        ],
    )?;
    let lin_in = [
        "--mt", "c.mt", "--src", "c.src", "--align", "c.align", "--tags", "c.tags",
    ];
    qe(
        dir,
        &[
            &["linear", "train"],
            &lin_in[..],
            &["--stream", "words", "--model", "lin.model"],
        ]
        .concat(),
    )?;
    qe(
        dir,
        &[
            "linear",
            "predict",
            "--mt",
            "c.mt",
            "--src",
            "c.src",
            "--align",
            "c.align",
            "--model",
            "lin.model",
            "--out",
            "lin.probs",
        ],
    )?;
    qe(
        dir,
        &[
            &["linear", "jackknife"],
            &lin_in[..],
            &[
                "--stream",
                "words",
                "--out",
                "lin.oof",
                "--set",
                "jackknife_folds=5",
            ],
        ]
        .concat(),
    )?;
    write_systems(dir);
    let sys = ["--manifest", "systems.tsv", "--mt", "c.mt"];
    qe(
        dir,
        &[
            &["ensemble-word", "fit"],
            &sys[..],
            &["--gold", "c.tags", "--out", "ens.txt"],
        ]
        .concat(),
    )?;
    qe(
        dir,
        &[
            &["ensemble-word", "apply"],
            &sys[..],
            &["--ensemble", "ens.txt", "--out", "ens.probs"],
        ]
        .concat(),
    )?;
    qe(
        dir,
        &[
            &["ensemble-sent", "fit"],
            &sys[..],
            &["--gold", "c.hter", "--out", "sent.model"],
        ]
        .concat(),
    )?;
    qe(
        dir,
        &[
            &["ensemble-sent", "apply"],
            &sys[..],
            &["--model", "sent.model", "--out", "sent.scores"],
        ]
        .concat(),
    )?;
    let w = qe(
        dir,
        &[
            "evaluate",
            "--gold",
            "c.tags",
            "--pred",
            "ens.probs",
            "--stream",
            "words",
        ],
    )?;
    let s = qe(
        dir,
        &[
            "evaluate",
            "--gold",
            "c.hter",
            "--pred",
            "sent.scores",
            "--stream",
            "sentence",
        ],
    )?;
    Ok((kv(&w, "f1_mult"), kv(&s, "pearson")))
}

fn c11_pipeline() -> Verdict {
    let start = Instant::now();
    let a = tempfile::tempdir().unwrap();
    let (f1, r) = match pipeline(a.path()) {
        Ok(v) => v,
        Err(e) => return Verdict::Fail(e),
    };
    let elapsed = start.elapsed();
    ensure!(
        elapsed < Duration::from_secs(60),
        "pipeline took {:.1}s",
        elapsed.as_secs_f64()
    );
    ensure!(
        f1.is_finite() && f1 > 0.0 && r.is_finite(),
        "f1_mult {f1}, pearson {r}"
    );
    let b = tempfile::tempdir().unwrap();
    if let Err(e) = pipeline(b.path()) {
        return Verdict::Fail(e);
    }
    for f in [
        "c.tags",
        "lin.model",
        "lin.probs",
        "lin.oof",
        "ens.txt",
        "ens.probs",
        "sent.model",
        "sent.scores",
        "ens.txt.run.cfg",
    ] {
        let x = fs::read(a.path().join(f)).unwrap();
        let y = fs::read(b.path().join(f)).unwrap();
        ensure!(x == y, "{f} differs between identical runs");
    }
    Verdict::Pass(format!(
        "200 sentences in {:.1}s, word f1_mult {f1:.4}, sentence pearson {r:.4}, reruns identical",
        elapsed.as_secs_f64()
    ))
}

fn main() {
    let checks: [(u8, &str, Check); 11] = [
        (1, "metric oracle equivalence", c1_metrics),
        (2, "edit labeling", c2_labeling),
        (3, "viterbi exactness", c3_viterbi),
        (4, "mira learning", c4_mira),
        (5, "powell vs grid oracle", c5_powell),
        (6, "k-fold protocol", c6_kfold),
        (7, "ridge", c7_ridge),
        (8, "document round trip", c8_roundtrip),
        (9, "mqm closed form", c9_mqm),
        (10, "dataset statistics", c10_dataset),
        (11, "end-to-end smoke", c11_pipeline),
    ];
    let mut failed = 0;
    for (id, name, check) in checks {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Verdict::Fail("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let (label, detail) = match verdict {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Skip(d) => ("SKIP", d),
            Verdict::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {id:>2} {label} {name}: {detail} [{secs:.2}s]");
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
