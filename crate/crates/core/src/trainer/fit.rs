use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::dataset::LabeledExample;
use crate::error::{Error, Result};
use crate::nn::{accumulate_gradient, add_l2, init_params, Loss, NetSpec, Params};
use crate::rng::{stream, SplitMix64};
use crate::simplex::QVector;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub updates: usize,
    pub eval_every: usize,
    /// Consecutive non-improving validation evaluations tolerated.
    pub patience: usize,
    /// Inputs are `q_i / scale`; normally the sampling bound.
    pub scale: f64,
}

impl TrainConfig {
    pub fn new(updates: usize, scale: f64) -> Self {
        TrainConfig { updates, eval_every: 1000, patience: 10, scale }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalRecord {
    pub update: usize,
    /// Mean per-example loss over the validation set.
    pub val_loss: f64,
    /// Mean per-example loss over batches since the previous evaluation.
    pub train_loss: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    /// Parameters with the lowest validation loss seen.
    pub params: Params,
    pub best_update: usize,
    pub updates_run: usize,
    pub stopped_early: bool,
    pub log: Vec<EvalRecord>,
}

impl TrainOutcome {
    pub fn initial_val_loss(&self) -> f64 {
        self.log[0].val_loss
    }

    pub fn best_val_loss(&self) -> f64 {
        self.log.iter().map(|r| r.val_loss).fold(f64::INFINITY, f64::min)
    }
}

pub fn encode_input(q: &QVector, scale: f64) -> Vec<f64> {
    q.entries().iter().map(|&v| v as f64 / scale).collect()
}

pub fn dense_labels(positives: &[usize], len: usize) -> Vec<f64> {
    let mut y = vec![0.0; len];
    for &p in positives {
        y[p] = 1.0;
    }
    y
}

/// Mean balanced-BCE loss per example; summed in record order.
pub fn mean_loss(p: &Params, examples: &[LabeledExample], scale: f64, beta: f64) -> Result<f64> {
    let out = p.output_dim();
    let losses = examples
        .par_iter()
        .map(|ex| {
            let logits = p.logits(&encode_input(&ex.q, scale))?;
            Ok(Loss::Bce { beta }.value(&logits, &dense_labels(&ex.positives, out)))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(losses.iter().sum::<f64>() / examples.len().max(1) as f64)
}

fn check_shapes(spec: &NetSpec, sets: &[&[LabeledExample]]) -> Result<()> {
    spec.validate()?;
    for ex in sets.iter().flat_map(|s| s.iter()) {
        if ex.q.dim() != spec.input_dim() {
            return Err(Error::DimensionMismatch { expected: spec.input_dim(), actual: ex.q.dim() });
        }
        if let Some(&p) = ex.positives.last() {
            if p >= spec.output_dim() {
                return Err(Error::Shape(format!(
                    "label position {p} does not fit output width {}",
                    spec.output_dim()
                )));
            }
        }
    }
    Ok(())
}

/// Mini-batch SGD on the balanced BCE loss with validation-based early
/// stopping.
///
/// Batches walk seeded permutations of the training set, reshuffled after
/// each pass. Validation loss is recorded at update 0 and every
/// `eval_every` updates; training stops after `patience` evaluations
/// without improvement.
pub fn train(
    spec: &NetSpec,
    train_set: &[LabeledExample],
    val_set: &[LabeledExample],
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    check_shapes(spec, &[train_set, val_set])?;
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::InvalidArgument("training and validation sets must be non-empty".into()));
    }
    if cfg.scale.is_nan() || cfg.scale <= 0.0 || cfg.eval_every == 0 {
        return Err(Error::InvalidArgument("scale and eval_every must be positive".into()));
    }
    let loss = Loss::Bce { beta: spec.beta };
    let out = spec.output_dim();

    let mut params = init_params(spec)?;
    let mut best = params.clone();
    let mut best_loss = mean_loss(&params, val_set, cfg.scale, spec.beta)?;
    let mut best_update = 0;
    let mut log = vec![EvalRecord { update: 0, val_loss: best_loss, train_loss: None }];

    let mut rng = SplitMix64::derived(spec.seed, stream::BATCHES);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    order.shuffle(&mut rng);
    let mut cursor = 0;

    let mut grad = params.zero_gradient();
    let mut since_eval = (0.0, 0usize);
    let mut stale = 0;
    let mut updates_run = 0;
    let mut stopped_early = false;

    while updates_run < cfg.updates {
        grad.clear();
        for _ in 0..spec.batch_size {
            if cursor == order.len() {
                order.shuffle(&mut rng);
                cursor = 0;
            }
            let ex = &train_set[order[cursor]];
            cursor += 1;
            let x = encode_input(&ex.q, cfg.scale);
            let y = dense_labels(&ex.positives, out);
            since_eval.0 += accumulate_gradient(&params, &x, &y, loss, &mut grad)?;
            since_eval.1 += 1;
        }
        grad.scale(1.0 / spec.batch_size as f64);
        add_l2(&mut grad, &params, spec.l2);
        params.descend(&grad, spec.epsilon);
        updates_run += 1;

        if updates_run % cfg.eval_every == 0 || updates_run == cfg.updates {
            let val_loss = mean_loss(&params, val_set, cfg.scale, spec.beta)?;
            let train_loss = Some(since_eval.0 / since_eval.1 as f64);
            since_eval = (0.0, 0);
            log.push(EvalRecord { update: updates_run, val_loss, train_loss });
            if val_loss < best_loss {
                best_loss = val_loss;
                best = params.clone();
                best_update = updates_run;
                stale = 0;
            } else {
                stale += 1;
                if stale >= cfg.patience {
                    stopped_early = true;
                    break;
                }
            }
        }
    }

    Ok(TrainOutcome { params: best, best_update, updates_run, stopped_early, log })
}
