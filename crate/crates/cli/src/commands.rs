use std::path::{Path, PathBuf};

use rayon::prelude::*;

use qe_stack_core::config::RunConfig;
use qe_stack_core::corpus::{
    load_manifest, read_alignments, read_probs, read_scores, read_sentences, read_source_tags,
    read_tag_lines, read_target_tags, write_probs, write_scores, write_source_tags,
    write_tag_lines, write_target_tags, Alignments, CorpusShape, PredictionSet, Sentence,
    SourceTags, Stream, Tag, TagLayout, TargetTags,
};
use qe_stack_core::doclevel::{
    annotation_stats, annotations_to_tags, corpus_annotation_counts, doc_mqm_features,
    document_mqm, fit_doc_mqm, load_documents, predict_doc_mqm, read_annotation_lines,
    read_annotations, read_doc_features, sentence_token_counts, split_by_docs, tags_to_annotations,
    write_annotations, write_doc_features, Document, MqmWeights, Severity,
};
use qe_stack_core::ensemble::{
    apply_sentence_ensemble, fit_sentence_ensemble, in_sample_score, kfold_estimate,
    require_stream, save_ensemble, sentence_features, EnsemblerRegistry, PowellConfig, RidgeModel,
    SentenceFitConfig, StackingConfig, SystemStream, WordFitConfig,
};
use qe_stack_core::folds::FoldPlan;
use qe_stack_core::labeler::label_corpus;
use qe_stack_core::linearqe::{
    jackknife, predict_sequence, FeatureConfig, LabeledInstance, LinearModel, MiraConfig,
    MiraTrainer, SequenceInstance, SequenceTrainer,
};
use qe_stack_core::metrics::{f1_mult, pearson, tag_report, threshold};
use qe_stack_core::{QeError, Result};

use crate::args::*;
use crate::report::Report;

pub struct Ctx {
    pub cfg: RunConfig,
    pub report: Report,
}

impl Ctx {
    fn snapshot(&self, out: &Path, command: &str) -> Result<()> {
        self.cfg.write_snapshot(out, command).map(|_| ())
    }

    fn stream(&mut self, flag: &Option<String>) -> Result<Stream> {
        if let Some(s) = flag {
            self.cfg.set("stream", s)?;
        }
        self.cfg.parse("stream")
    }

    fn layout(&self) -> Result<TagLayout> {
        self.cfg.parse("layout")
    }
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

fn lens(sents: &[Sentence]) -> Vec<usize> {
    sents.iter().map(Sentence::len).collect()
}

fn length_error(file: &Path, line: usize, detail: String) -> QeError {
    QeError::LengthMismatch {
        file: file.display().to_string(),
        line,
        detail,
    }
}

pub fn run(cmd: Command, ctx: &mut Ctx) -> Result<()> {
    match cmd {
        Command::Evaluate(a) => evaluate(a, ctx),
        Command::MakeLabels(a) => make_labels(a, ctx),
        Command::Linear(c) => linear(c, ctx),
        Command::EnsembleWord(c) => ensemble_word(c, ctx),
        Command::EnsembleSent(c) => ensemble_sent(c, ctx),
        Command::Doc(c) => doc(c, ctx),
    }
}

// ---------------------------------------------------------------------------
// evaluate

/// Picks the evaluated positions out of one prediction line, which may hold
/// either that stream alone or the full interleaved sequence.
fn select_stream(row: Vec<f64>, n_words: usize, stream: &str) -> Option<Vec<f64>> {
    let full = 2 * n_words + 1;
    match stream {
        "target" if row.len() == full => Some(row),
        "words" if row.len() == n_words => Some(row),
        "words" if row.len() == full => Some(row.into_iter().skip(1).step_by(2).collect()),
        "gaps" if row.len() == n_words + 1 => Some(row),
        "gaps" if row.len() == full => Some(row.into_iter().step_by(2).collect()),
        _ => None,
    }
}

fn evaluate(a: EvaluateArgs, ctx: &mut Ctx) -> Result<()> {
    if let Some(t) = a.threshold {
        ctx.cfg.set("threshold", &t.to_string())?;
    }
    let t = ctx.cfg.f64("threshold");
    let r = &mut ctx.report;
    if a.stream == "sentence" {
        let gold = read_scores(&a.gold, None)?;
        let pred = read_scores(&a.pred, Some(gold.len()))?;
        r.text("n", gold.len())
            .num("pearson", pearson(&gold, &pred)?);
        return Ok(());
    }
    let (gold, pred): (Vec<Tag>, Vec<Tag>) = if a.stream == "source" {
        let gold = read_tag_lines(&a.gold)?;
        let l: Vec<usize> = gold.iter().map(Vec::len).collect();
        let pred = read_probs(&a.pred, Some(&l))?;
        (
            gold.concat(),
            pred.iter().flat_map(|p| threshold(p, t)).collect(),
        )
    } else {
        let layout = ctx.cfg.parse::<TagLayout>("layout")?;
        let gold = read_target_tags(&a.gold, layout, None)?;
        let raw = read_probs(&a.pred, None)?;
        if raw.len() != gold.len() {
            return Err(length_error(
                &a.pred,
                raw.len().min(gold.len()) + 1,
                format!("{} lines, expected {}", raw.len(), gold.len()),
            ));
        }
        let mut g = Vec::new();
        let mut p = Vec::new();
        for (i, (gt, row)) in gold.iter().zip(raw).enumerate() {
            let n = row.len();
            let sel = select_stream(row, gt.mt_len(), &a.stream).ok_or_else(|| {
                if !matches!(a.stream.as_str(), "target" | "words" | "gaps") {
                    QeError::Config(format!("unknown evaluation stream `{}`", a.stream))
                } else {
                    length_error(
                        &a.pred,
                        i + 1,
                        format!(
                            "{n} values for {} MT words ({} stream)",
                            gt.mt_len(),
                            a.stream
                        ),
                    )
                }
            })?;
            match a.stream.as_str() {
                "target" => g.extend(gt.interleaved()),
                "words" => g.extend_from_slice(&gt.words),
                _ => g.extend_from_slice(&gt.gaps),
            }
            p.extend(threshold(&sel, t));
        }
        (g, p)
    };
    let rep = tag_report(&gold, &pred)?;
    r.text("stream", &a.stream)
        .text("tokens", gold.len())
        .num("f1_mult", rep.f1.f1_mult)
        .num("f1_ok", rep.f1.f1_ok)
        .num("f1_bad", rep.f1.f1_bad)
        .num("mcc", rep.mcc);
    Ok(())
}

// ---------------------------------------------------------------------------
// make-labels

fn make_labels(a: MakeLabelsArgs, ctx: &mut Ctx) -> Result<()> {
    let mt = read_sentences(&a.mt)?;
    let pe = read_sentences(&a.pe)?;
    let src = match (&a.src, &a.align) {
        (Some(s), Some(al)) => Some((read_sentences(s)?, read_alignments(al)?)),
        _ => None,
    };
    if let Some((s, al)) = &src {
        for (i, ((s, m), al)) in s.iter().zip(&mt).zip(al).enumerate() {
            al.check(s.len(), m.len()).map_err(|e| QeError::Parse {
                file: a
                    .align
                    .as_ref()
                    .expect("paired with src")
                    .display()
                    .to_string(),
                line: i + 1,
                detail: e,
            })?;
        }
    }
    let labels = label_corpus(
        &mt,
        &pe,
        src.as_ref().map(|(s, al)| (s.as_slice(), al.as_slice())),
        ctx.cfg.bool("hter_cap"),
    )?;
    let target: Vec<TargetTags> = labels.iter().map(|l| l.target.clone()).collect();
    let hter: Vec<f64> = labels.iter().map(|l| l.hter).collect();
    write_target_tags(&with_ext(&a.out_prefix, ".tags"), &target, ctx.layout()?)?;
    write_scores(&with_ext(&a.out_prefix, ".hter"), &hter)?;
    if src.is_some() {
        let source: Vec<SourceTags> = labels.iter().filter_map(|l| l.source.clone()).collect();
        write_source_tags(&with_ext(&a.out_prefix, ".source_tags"), &source)?;
    }
    ctx.snapshot(&a.out_prefix, "make-labels")?;
    let words: Vec<Tag> = target
        .iter()
        .flat_map(|t| t.words.iter().copied())
        .collect();
    let bad = words.iter().filter(|t| t.is_bad()).count();
    ctx.report
        .text("segments", labels.len())
        .num(
            "mean_hter",
            hter.iter().sum::<f64>() / hter.len().max(1) as f64,
        )
        .num("bad_word_ratio", bad as f64 / words.len().max(1) as f64);
    Ok(())
}

// ---------------------------------------------------------------------------
// linear

struct Texts {
    mt: Vec<Sentence>,
    src: Option<Vec<Sentence>>,
    align: Option<Vec<Alignments>>,
    shape: CorpusShape,
}

fn read_texts(inputs: &TextInputs) -> Result<Texts> {
    let mt = read_sentences(&inputs.mt)?;
    let src = inputs.src.as_deref().map(read_sentences).transpose()?;
    let align = inputs.align.as_deref().map(read_alignments).transpose()?;
    for (path, n) in [
        (inputs.src.as_deref(), src.as_ref().map(Vec::len)),
        (inputs.align.as_deref(), align.as_ref().map(Vec::len)),
    ] {
        if let (Some(p), Some(n)) = (path, n) {
            if n != mt.len() {
                return Err(length_error(
                    p,
                    n.min(mt.len()) + 1,
                    format!("{n} lines, expected {}", mt.len()),
                ));
            }
        }
    }
    let shape = CorpusShape {
        mt_lens: lens(&mt),
        src_lens: src.as_deref().map(lens),
    };
    Ok(Texts {
        mt,
        src,
        align,
        shape,
    })
}

/// Sequence instances for `stream`, with stacked columns from the manifest.
/// `order` fixes which systems are stacked; otherwise every system that
/// provides the stream is, in manifest order.
fn instances(
    inputs: &TextInputs,
    t: &Texts,
    stream: Stream,
    order: Option<&[String]>,
) -> Result<(Vec<SequenceInstance>, Vec<String>)> {
    let mut out: Vec<SequenceInstance> = Vec::with_capacity(t.mt.len());
    for i in 0..t.mt.len() {
        let mt = t.mt[i].tokens();
        let src = t.src.as_ref().map(|s| s[i].tokens());
        let al = t.align.as_ref().map(|a| &a[i]);
        out.push(match stream {
            Stream::Words => SequenceInstance::words(mt, src, al),
            Stream::Gaps => SequenceInstance::gaps(mt),
            Stream::Source => SequenceInstance::source(
                src.ok_or_else(|| QeError::Config("the source stream needs --src".into()))?,
                Some(mt),
                al,
            ),
        });
    }
    let systems: Vec<SystemStream> = match &inputs.stack {
        Some(m) => require_stream(&load_manifest(m, &t.shape)?, stream)?,
        None => Vec::new(),
    };
    let ids: Vec<String> = match order {
        Some(o) => o.to_vec(),
        None => systems.iter().map(|s| s.system_id.clone()).collect(),
    };
    for id in &ids {
        let sys =
            systems
                .iter()
                .find(|s| &s.system_id == id)
                .ok_or_else(|| QeError::MissingStream {
                    system: id.clone(),
                    stream: stream.to_string(),
                })?;
        out = out
            .into_iter()
            .zip(&sys.probs)
            .map(|(inst, p)| inst.with_stacked(id.clone(), p.clone()))
            .collect::<Result<_>>()?;
    }
    Ok((out, ids))
}

fn read_gold(
    path: &Path,
    stream: Stream,
    layout: TagLayout,
    shape: &CorpusShape,
) -> Result<Vec<Vec<Tag>>> {
    match stream {
        Stream::Source => {
            let src = shape
                .src_lens
                .as_deref()
                .ok_or_else(|| QeError::Config("the source stream needs --src".into()))?;
            Ok(read_source_tags(path, Some(src))?
                .into_iter()
                .map(|s| s.0)
                .collect())
        }
        Stream::Words | Stream::Gaps => Ok(read_target_tags(path, layout, Some(&shape.mt_lens))?
            .into_iter()
            .map(|t| {
                if stream == Stream::Words {
                    t.words
                } else {
                    t.gaps
                }
            })
            .collect()),
    }
}

fn trainer(cfg: &RunConfig, stream: Stream) -> Result<MiraTrainer> {
    let mut features = FeatureConfig {
        bins: cfg.usize("bins"),
        ..FeatureConfig::default()
    };
    if features.bins == 0 {
        return Err(QeError::Config("bins must be positive".into()));
    }
    features.set_enabled(cfg.raw("templates"))?;
    let mira = MiraConfig {
        epochs: cfg.usize("epochs"),
        c: cfg.f64("C"),
        seed: cfg.u64("seed"),
        average: cfg.bool("average"),
    };
    let mut t = MiraTrainer::new(features, mira, stream);
    t.gamma = cfg.f64("gamma");
    Ok(t)
}

fn labeled(insts: Vec<SequenceInstance>, gold: Vec<Vec<Tag>>) -> Vec<LabeledInstance> {
    insts
        .into_iter()
        .zip(gold)
        .map(|(inst, gold)| LabeledInstance { inst, gold })
        .collect()
}

fn linear(cmd: LinearCmd, ctx: &mut Ctx) -> Result<()> {
    match cmd {
        LinearCmd::Train {
            inputs,
            tags,
            stream,
            model,
        } => {
            let stream = ctx.stream(&stream)?;
            let t = read_texts(&inputs)?;
            let gold = read_gold(&tags, stream, ctx.layout()?, &t.shape)?;
            let (insts, ids) = instances(&inputs, &t, stream, None)?;
            let data = labeled(insts, gold);
            let tr = trainer(&ctx.cfg, stream)?;
            let m = tr.train(&data)?;
            m.save(&model)?;
            ctx.snapshot(&model, "linear train")?;
            let errors: usize = data
                .par_iter()
                .map(|d| {
                    let p = predict_sequence(&m, &d.inst);
                    p.tags.iter().zip(&d.gold).filter(|(a, b)| a != b).count()
                })
                .sum();
            let total: usize = data.iter().map(|d| d.gold.len()).sum();
            ctx.report
                .text("stream", stream)
                .text("sentences", data.len())
                .text("stacked_systems", ids.len())
                .text("weights", m.weights.len())
                .num("train_accuracy", 1.0 - errors as f64 / total.max(1) as f64);
        }
        LinearCmd::Predict {
            inputs,
            model,
            out,
            tags_out,
        } => {
            let m = LinearModel::load(&model)?;
            let t = read_texts(&inputs)?;
            let (insts, _) = instances(&inputs, &t, m.stream, Some(&m.systems))?;
            let preds: Vec<_> = insts.par_iter().map(|i| predict_sequence(&m, i)).collect();
            let probs: Vec<Vec<f64>> = preds.iter().map(|p| p.probs.clone()).collect();
            write_probs(&out, &probs)?;
            if let Some(p) = tags_out {
                let tags: Vec<Vec<Tag>> = preds.into_iter().map(|p| p.tags).collect();
                write_tag_lines(&p, &tags)?;
            }
            ctx.snapshot(&out, "linear predict")?;
            ctx.report
                .text("stream", m.stream)
                .text("sentences", probs.len());
        }
        LinearCmd::Jackknife {
            inputs,
            tags,
            stream,
            out,
        } => {
            let stream = ctx.stream(&stream)?;
            let t = read_texts(&inputs)?;
            let gold = read_gold(&tags, stream, ctx.layout()?, &t.shape)?;
            let (insts, _) = instances(&inputs, &t, stream, None)?;
            let data = labeled(insts, gold);
            let k = ctx.cfg.usize("jackknife_folds").min(data.len());
            let preds = jackknife(&data, k, &trainer(&ctx.cfg, stream)?)?;
            let probs: Vec<Vec<f64>> = preds.iter().map(|p| p.probs.clone()).collect();
            write_probs(&out, &probs)?;
            ctx.snapshot(&out, "linear jackknife")?;
            let g: Vec<Tag> = data.iter().flat_map(|d| d.gold.iter().copied()).collect();
            let p: Vec<Tag> = preds.iter().flat_map(|p| p.tags.iter().copied()).collect();
            ctx.report
                .text("stream", stream)
                .text("folds", k)
                .num("oof_f1_mult", f1_mult(&g, &p)?.f1_mult);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// ensemble-word

fn system_inputs(inputs: &SystemInputs) -> Result<(CorpusShape, Vec<PredictionSet>)> {
    let mt = read_sentences(&inputs.mt)?;
    let src = inputs.src.as_deref().map(read_sentences).transpose()?;
    let shape = CorpusShape {
        mt_lens: lens(&mt),
        src_lens: src.as_deref().map(lens),
    };
    let preds = load_manifest(&inputs.manifest, &shape)?;
    if preds.is_empty() {
        return Err(QeError::EmptyInput);
    }
    Ok((shape, preds))
}

fn word_cfg(cfg: &RunConfig) -> WordFitConfig {
    let mut features = FeatureConfig::stacked_only();
    features.bins = cfg.usize("stack_bins").max(1);
    WordFitConfig {
        threshold: cfg.f64("threshold"),
        tune_threshold: cfg.bool("tune_threshold"),
        powell: PowellConfig {
            tol: cfg.f64("powell_tol"),
            max_cycles: cfg.usize("powell_max_cycles"),
            line_samples: cfg.usize("powell_line_samples").max(3),
        },
        stacking: StackingConfig {
            features,
            mira: MiraConfig {
                epochs: cfg.usize("stack_epochs"),
                c: cfg.f64("stack_C"),
                seed: cfg.u64("seed"),
                average: cfg.bool("average"),
            },
            gamma: cfg.f64("gamma"),
        },
    }
}

fn score(probs: &[Vec<f64>], gold: &[Vec<Tag>], t: f64) -> Result<f64> {
    let p: Vec<Tag> = probs.iter().flat_map(|p| threshold(p, t)).collect();
    Ok(f1_mult(&gold.concat(), &p)?.f1_mult)
}

fn ensemble_word(cmd: EnsembleWordCmd, ctx: &mut Ctx) -> Result<()> {
    let registry = EnsemblerRegistry::with_defaults();
    match cmd {
        EnsembleWordCmd::Fit {
            inputs,
            gold,
            stream,
            method,
            out,
        } => {
            let stream = ctx.stream(&stream)?;
            if let Some(m) = method {
                ctx.cfg.set("method", &m)?;
            }
            let strategy = registry.get(ctx.cfg.raw("method"))?;
            let (shape, preds) = system_inputs(&inputs)?;
            let systems = require_stream(&preds, stream)?;
            let gold = read_gold(&gold, stream, ctx.layout()?, &shape)?;
            let fitted = strategy.fit(&systems, &gold, stream, &word_cfg(&ctx.cfg))?;
            save_ensemble(fitted.as_ref(), &out)?;
            ctx.snapshot(&out, "ensemble-word fit")?;
            let fit_score = score(&fitted.predict(&systems)?, &gold, fitted.threshold())?;
            let r = &mut ctx.report;
            r.text("method", strategy.name())
                .text("stream", stream)
                .num("threshold", fitted.threshold());
            if let Some(w) = fitted.weights() {
                let norm = w.normalized()?;
                for (id, v) in w.systems.iter().zip(norm) {
                    r.num(format!("weight.{id}"), v);
                }
            }
            r.num("train_f1_mult", fit_score);
        }
        EnsembleWordCmd::Apply {
            inputs,
            ensemble,
            out,
            tags_out,
        } => {
            let fitted = registry.load(&ensemble)?;
            let (_, preds) = system_inputs(&inputs)?;
            let systems = require_stream(&preds, fitted.stream())?;
            let probs = fitted.predict(&systems)?;
            write_probs(&out, &probs)?;
            if let Some(p) = tags_out {
                let tags: Vec<Vec<Tag>> = probs
                    .iter()
                    .map(|p| threshold(p, fitted.threshold()))
                    .collect();
                write_tag_lines(&p, &tags)?;
            }
            ctx.snapshot(&out, "ensemble-word apply")?;
            ctx.report
                .text("method", fitted.method())
                .text("stream", fitted.stream())
                .text("sentences", probs.len());
        }
        EnsembleWordCmd::Kfold {
            inputs,
            gold,
            stream,
            method,
        } => {
            let stream = ctx.stream(&stream)?;
            if let Some(m) = method {
                ctx.cfg.set("method", &m)?;
            }
            let strategy = registry.get(ctx.cfg.raw("method"))?;
            let (shape, preds) = system_inputs(&inputs)?;
            let systems = require_stream(&preds, stream)?;
            let gold = read_gold(&gold, stream, ctx.layout()?, &shape)?;
            let wc = word_cfg(&ctx.cfg);
            let plan = FoldPlan::contiguous(gold.len(), ctx.cfg.usize("folds"))?;
            let est = kfold_estimate(strategy.as_ref(), &systems, &gold, &plan, stream, &wc)?;
            let full = in_sample_score(strategy.as_ref(), &systems, &gold, stream, &wc)?;
            let r = &mut ctx.report;
            r.text("method", strategy.name())
                .text("stream", stream)
                .text("folds", plan.k());
            for s in &systems {
                r.num(
                    format!("single.{}", s.system_id),
                    score(&s.probs, &gold, wc.threshold)?,
                );
            }
            r.num("kfold_f1_mult", est)
                .num("in_sample_f1_mult", full)
                .num("overfit_gap", full - est);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// ensemble-sent

fn ensemble_sent(cmd: EnsembleSentCmd, ctx: &mut Ctx) -> Result<()> {
    match cmd {
        EnsembleSentCmd::Fit { inputs, gold, out } => {
            let (shape, preds) = system_inputs(&inputs)?;
            let x = sentence_features(&preds)?;
            let y = read_scores(&gold, Some(shape.len()))?;
            let cfg = SentenceFitConfig {
                lambda_grid: ctx.cfg.f64_list("lambda_grid"),
                folds: ctx.cfg.usize("sent_folds"),
                seed: ctx.cfg.u64("seed"),
            };
            let model = fit_sentence_ensemble(&x, &y, &cfg)?;
            model.save(&out)?;
            ctx.snapshot(&out, "ensemble-sent fit")?;
            let fitted = apply_sentence_ensemble(&model, &x)?;
            ctx.report
                .text("features", x.names.len())
                .num("lambda", model.lambda)
                .num("train_pearson", pearson(&y, &fitted).unwrap_or(0.0));
        }
        EnsembleSentCmd::Apply { inputs, model, out } => {
            let m = RidgeModel::load(&model)?;
            let (_, preds) = system_inputs(&inputs)?;
            let scores = apply_sentence_ensemble(&m, &sentence_features(&preds)?)?;
            write_scores(&out, &scores)?;
            ctx.snapshot(&out, "ensemble-sent apply")?;
            ctx.report.text("sentences", scores.len());
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// doc

fn doc_tags(path: &Path, docs: &[Document], layout: TagLayout) -> Result<Vec<Vec<TargetTags>>> {
    let counts = sentence_token_counts(docs);
    let flat = read_target_tags(path, layout, Some(&counts))?;
    split_by_docs(&flat, docs)
}

fn mqm_weights(cfg: &RunConfig) -> MqmWeights {
    MqmWeights {
        minor: cfg.f64("mqm_minor"),
        major: cfg.f64("mqm_major"),
        critical: cfg.f64("mqm_critical"),
    }
}

fn doc(cmd: DocCmd, ctx: &mut Ctx) -> Result<()> {
    let layout = ctx.layout()?;
    match cmd {
        DocCmd::Tags {
            docs,
            annotations,
            out,
        } => {
            let docs = load_documents(&docs)?;
            let anns = read_annotations(&annotations, &docs)?;
            let per_doc: Vec<Vec<TargetTags>> = docs
                .par_iter()
                .zip(&anns)
                .map(|(d, a)| annotations_to_tags(d, a))
                .collect::<Result<_>>()?;
            let flat = per_doc.concat();
            write_target_tags(&out, &flat, layout)?;
            ctx.snapshot(&out, "doc tags")?;
            let bad_words: usize = flat
                .iter()
                .map(|t| t.words.iter().filter(|x| x.is_bad()).count())
                .sum();
            let bad_gaps: usize = flat
                .iter()
                .map(|t| t.gaps.iter().filter(|x| x.is_bad()).count())
                .sum();
            ctx.report
                .text("documents", docs.len())
                .text("sentences", flat.len())
                .text("bad_tokens", bad_words)
                .text("bad_gaps", bad_gaps);
        }
        DocCmd::Spans { docs, tags, out } => {
            let docs = load_documents(&docs)?;
            let tags = doc_tags(&tags, &docs, layout)?;
            let severity: Severity = ctx.cfg.parse("severity")?;
            let anns: Vec<_> = docs
                .par_iter()
                .zip(&tags)
                .map(|(d, t)| tags_to_annotations(d, t, severity))
                .collect::<Result<_>>()?;
            write_annotations(&out, &docs, &anns)?;
            ctx.snapshot(&out, "doc spans")?;
            ctx.report
                .text("documents", docs.len())
                .text("annotations", anns.iter().map(Vec::len).sum::<usize>());
        }
        DocCmd::Mqm {
            docs,
            annotations,
            out,
        } => {
            let docs = load_documents(&docs)?;
            let anns = read_annotations(&annotations, &docs)?;
            let w = mqm_weights(&ctx.cfg);
            let floor = ctx.cfg.opt_f64("mqm_floor");
            let scores: Vec<f64> = docs
                .iter()
                .zip(&anns)
                .map(|(d, a)| document_mqm(d, a, &w, floor))
                .collect::<Result<_>>()?;
            write_scores(&out, &scores)?;
            ctx.snapshot(&out, "doc mqm")?;
            ctx.report.text("documents", docs.len()).num(
                "mean_mqm",
                scores.iter().sum::<f64>() / scores.len().max(1) as f64,
            );
        }
        DocCmd::Features {
            docs,
            tags,
            sentence_mqm,
            out,
        } => {
            let docs = load_documents(&docs)?;
            let tags = doc_tags(&tags, &docs, layout)?;
            let n: usize = docs.iter().map(|d| d.sentences.len()).sum();
            let smqm = split_by_docs(&read_scores(&sentence_mqm, Some(n))?, &docs)?;
            let rows: Vec<(String, [f64; 4])> = docs
                .iter()
                .zip(tags.iter().zip(&smqm))
                .map(|(d, (t, s))| Ok((d.id.clone(), doc_mqm_features(t, s)?)))
                .collect::<Result<_>>()?;
            write_doc_features(&out, &rows)?;
            ctx.snapshot(&out, "doc features")?;
            ctx.report.text("documents", rows.len());
        }
        DocCmd::Fit {
            features,
            gold,
            out,
        } => {
            let rows = read_doc_features(&features)?;
            let x: Vec<[f64; 4]> = rows.iter().map(|r| r.1).collect();
            let y = read_scores(&gold, Some(x.len()))?;
            let model = fit_doc_mqm(
                &x,
                &y,
                &ctx.cfg.f64_list("doc_lambda_grid"),
                ctx.cfg.usize("doc_folds"),
                ctx.cfg.u64("seed"),
            )?;
            model.save(&out)?;
            ctx.snapshot(&out, "doc fit")?;
            let fitted: Vec<f64> = x.iter().map(|f| predict_doc_mqm(&model, f)).collect();
            ctx.report
                .text("documents", x.len())
                .num("lambda", model.lambda)
                .num("train_pearson", pearson(&y, &fitted).unwrap_or(0.0));
        }
        DocCmd::Predict {
            model,
            features,
            out,
        } => {
            let m = RidgeModel::load(&model)?;
            let rows = read_doc_features(&features)?;
            let scores: Vec<f64> = rows.iter().map(|r| predict_doc_mqm(&m, &r.1)).collect();
            write_scores(&out, &scores)?;
            ctx.snapshot(&out, "doc predict")?;
            ctx.report.text("documents", scores.len());
        }
        DocCmd::Eval { docs, gold, pred } => {
            let docs = load_documents(&docs)?;
            let g = read_annotations(&gold, &docs)?;
            let p = read_annotations(&pred, &docs)?;
            let c = corpus_annotation_counts(&docs, &g, &p)?;
            ctx.report
                .text("documents", docs.len())
                .num("precision", c.precision())
                .num("recall", c.recall())
                .num("f1_ann", c.f1());
        }
        DocCmd::Stats { annotations } => {
            let anns = read_annotation_lines(&annotations)?;
            let st = annotation_stats(anns.iter().map(|(_, a)| a));
            let r = &mut ctx.report;
            r.text("total", st.total)
                .text("multi_span", st.multi_span)
                .text("cross_sentence", st.cross_sentence);
            for s in Severity::ALL {
                r.text(s.to_string(), st.severity[s.index()])
                    .text(format!("{s}_pct"), format!("{:.2}", st.percent(s)));
            }
        }
    }
    Ok(())
}
