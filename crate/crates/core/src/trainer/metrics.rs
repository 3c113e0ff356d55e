use std::fmt;
use std::io::Write;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use rayon::prelude::*;

use super::dataset::LabeledExample;
use super::predict::{count_above, Predictor};
use crate::binning::supp_tolerant;
use crate::error::{Error, Result};

/// Two-by-two confusion counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConfusionTable {
    pub true_neg: u64,
    pub false_pos: u64,
    pub false_neg: u64,
    pub true_pos: u64,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Ratio with three decimals, or `n/a` when undefined.
pub fn fmt_ratio(r: Option<f64>) -> String {
    r.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3}"))
}

impl ConfusionTable {
    pub fn new(true_neg: u64, false_pos: u64, false_neg: u64, true_pos: u64) -> Self {
        ConfusionTable { true_neg, false_pos, false_neg, true_pos }
    }

    pub fn total(&self) -> u64 {
        self.true_neg + self.false_pos + self.false_neg + self.true_pos
    }

    /// `tn / (tn + fp)`
    pub fn specificity(&self) -> Option<f64> {
        ratio(self.true_neg, self.true_neg + self.false_pos)
    }

    /// `tp / (tp + fn)`
    pub fn sensitivity(&self) -> Option<f64> {
        ratio(self.true_pos, self.true_pos + self.false_neg)
    }

    /// `tp / (tp + fp)`
    pub fn precision(&self) -> Option<f64> {
        ratio(self.true_pos, self.true_pos + self.false_pos)
    }

    pub fn record(&mut self, predicted: bool, actual: bool) {
        match (actual, predicted) {
            (false, false) => self.true_neg += 1,
            (false, true) => self.false_pos += 1,
            (true, false) => self.false_neg += 1,
            (true, true) => self.true_pos += 1,
        }
    }
}

impl Add for ConfusionTable {
    type Output = ConfusionTable;

    fn add(self, o: ConfusionTable) -> ConfusionTable {
        ConfusionTable {
            true_neg: self.true_neg + o.true_neg,
            false_pos: self.false_pos + o.false_pos,
            false_neg: self.false_neg + o.false_neg,
            true_pos: self.true_pos + o.true_pos,
        }
    }
}

impl AddAssign for ConfusionTable {
    fn add_assign(&mut self, o: ConfusionTable) {
        *self = *self + o;
    }
}

impl Sum for ConfusionTable {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ConfusionTable::default(), Add::add)
    }
}

impl fmt::Display for ConfusionTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>10} {:>14} {:>14}", "", "PREDICTED 0", "PREDICTED 1")?;
        writeln!(f, "{:>10} {:>14} {:>14}", "ACTUAL 0", self.true_neg, self.false_pos)?;
        writeln!(f, "{:>10} {:>14} {:>14}", "ACTUAL 1", self.false_neg, self.true_pos)?;
        write!(
            f,
            "specificity {}  sensitivity {}  precision {}",
            fmt_ratio(self.specificity()),
            fmt_ratio(self.sensitivity()),
            fmt_ratio(self.precision())
        )
    }
}

pub fn confusion(pred: &[bool], truth: &[bool]) -> Result<ConfusionTable> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), actual: pred.len() });
    }
    let mut t = ConfusionTable::default();
    for (&p, &a) in pred.iter().zip(truth) {
        t.record(p, a);
    }
    Ok(t)
}

/// Bin-level confusion summed over all examples.
pub fn hib_confusion(model: &Predictor, examples: &[LabeledExample], eta: f64) -> Result<ConfusionTable> {
    let tables = examples
        .par_iter()
        .map(|ex| {
            let pred = model.predict_hib(&ex.q, eta)?;
            confusion(&pred, &ex.positives_dense(model.relevant.len()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tables.into_iter().sum())
}

/// Example-level confusion of predicted vs. exact IDP.
pub fn idp_confusion(model: &Predictor, examples: &[LabeledExample], eta: f64, tau: usize) -> Result<ConfusionTable> {
    let verdicts = examples
        .par_iter()
        .map(|ex| Ok((model.predict_idp(&ex.q, eta, tau)? == 1, ex.is_idp())))
        .collect::<Result<Vec<_>>>()?;
    let mut t = ConfusionTable::default();
    for (p, a) in verdicts {
        t.record(p, a);
    }
    Ok(t)
}

impl LabeledExample {
    pub fn positives_dense(&self, len: usize) -> Vec<bool> {
        let mut v = vec![false; len];
        for &p in &self.positives {
            v[p] = true;
        }
        v
    }
}

/// One `(η, τ)` point: predicted-IDP count, true positives among them,
/// precision over predictions and sensitivity over the exact IDP examples.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub eta: f64,
    pub tau: usize,
    pub predicted: u64,
    pub true_pos: u64,
    pub precision: Option<f64>,
    pub sensitivity: Option<f64>,
}

pub const SWEEP_CSV_HEADER: &str = "eta,tau,predicted,true_pos,precision,sensitivity";

pub fn sweep(model: &Predictor, examples: &[LabeledExample], etas: &[f64], taus: &[usize]) -> Result<Vec<SweepRow>> {
    if etas.is_empty() || taus.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one eta and one tau".into()));
    }
    // positive-bin counts per (example, eta)
    let counts = examples
        .par_iter()
        .map(|ex| {
            let logits = model.logits(&ex.q)?;
            Ok(etas.iter().map(|&eta| count_above(&logits, eta)).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let actual_idp = examples.iter().filter(|e| e.is_idp()).count() as u64;

    let mut rows = Vec::with_capacity(etas.len() * taus.len());
    for (ei, &eta) in etas.iter().enumerate() {
        for &tau in taus {
            let mut predicted = 0;
            let mut true_pos = 0;
            for (ex, c) in examples.iter().zip(&counts) {
                if supp_tolerant(c[ei], tau) == 1 {
                    predicted += 1;
                    true_pos += u64::from(ex.is_idp());
                }
            }
            rows.push(SweepRow {
                eta,
                tau,
                predicted,
                true_pos,
                precision: ratio(true_pos, predicted),
                sensitivity: ratio(true_pos, actual_idp),
            });
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    let cell = |r: Option<f64>| r.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"));
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.eta,
            r.tau,
            r.predicted,
            r.true_pos,
            cell(r.precision),
            cell(r.sensitivity)
        )?;
    }
    out.flush()
}
