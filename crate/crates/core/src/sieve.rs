//! Predict-then-verify scan over the full grid `{1..=bound}^d`.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::is_idp;
use crate::simplex::QVector;
use crate::trainer::{fmt_ratio, Predictor, SieveVerdict};

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub d: usize,
    pub bound: i64,
    pub eta: f64,
    pub tau: usize,
    /// Run the exact test on every predicted positive.
    pub verify: bool,
    /// Run the exact test on the whole grid as well, to report sensitivity.
    pub exhaustive: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub d: usize,
    pub bound: i64,
    pub eta: f64,
    pub tau: usize,
    pub scanned: u64,
    pub predicted_positive: u64,
    pub verified_positive: Option<u64>,
    /// Exact IDP count over the whole grid (exhaustive scans only).
    pub grid_idp: Option<u64>,
    pub seconds: f64,
}

impl ScanReport {
    pub fn precision(&self) -> Option<f64> {
        let v = self.verified_positive?;
        (self.predicted_positive > 0).then(|| v as f64 / self.predicted_positive as f64)
    }

    pub fn sensitivity(&self) -> Option<f64> {
        let total = self.grid_idp?;
        let v = self.verified_positive?;
        (total > 0).then(|| v as f64 / total as f64)
    }
}

impl fmt::Display for ScanReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "grid: d={} bound={}", self.d, self.bound)?;
        writeln!(f, "eta={} tau={}", self.eta, self.tau)?;
        writeln!(f, "scanned: {}", self.scanned)?;
        writeln!(f, "predicted_positive: {}", self.predicted_positive)?;
        if let Some(v) = self.verified_positive {
            writeln!(f, "verified_positive: {v}")?;
            writeln!(f, "precision: {}", fmt_ratio(self.precision()))?;
        }
        if let Some(total) = self.grid_idp {
            writeln!(f, "grid_idp: {total}")?;
            writeln!(f, "sensitivity: {}", fmt_ratio(self.sensitivity()))?;
        }
        write!(f, "seconds: {:.3}", self.seconds)
    }
}

#[derive(Clone, Debug)]
pub struct ScanOutcome {
    pub report: ScanReport,
    /// Predicted positives in grid order.
    pub positives: Vec<SieveVerdict>,
}

fn grid_size(d: usize, bound: i64) -> Result<u64> {
    if bound < 1 || d == 0 {
        return Err(Error::InvalidArgument(format!("empty grid (d={d}, bound={bound})")));
    }
    (bound as u64).checked_pow(d as u32).ok_or_else(|| Error::InvalidArgument(format!("grid {bound}^{d} is too large")))
}

/// The `index`-th q-vector of `{1..=bound}^d` in lexicographic order.
pub fn grid_point(index: u64, d: usize, bound: i64) -> Vec<i64> {
    let mut q = vec![0; d];
    let mut r = index;
    for slot in q.iter_mut().rev() {
        *slot = (r % bound as u64) as i64 + 1;
        r /= bound as u64;
    }
    q
}

/// Lexicographic iterator over `{1..=bound}^d`.
pub fn grid(d: usize, bound: i64) -> Result<impl Iterator<Item = Vec<i64>>> {
    let n = grid_size(d, bound)?;
    Ok((0..n).map(move |i| grid_point(i, d, bound)))
}

pub fn scan(model: &Predictor, cfg: &ScanConfig) -> Result<ScanOutcome> {
    if model.relevant.dim() != cfg.d {
        return Err(Error::DimensionMismatch { expected: model.relevant.dim(), actual: cfg.d });
    }
    let n = grid_size(cfg.d, cfg.bound)?;
    let start = Instant::now();

    let results = (0..n)
        .into_par_iter()
        .map(|i| {
            let q = QVector::new(grid_point(i, cfg.d, cfg.bound))?;
            let mut v = model.verdict(&q, cfg.eta, cfg.tau)?;
            let exact =
                if cfg.exhaustive || (cfg.verify && v.idp_predicted == 1) { Some(u8::from(is_idp(&q))) } else { None };
            let grid_idp = exact == Some(1);
            if v.idp_predicted == 1 && (cfg.verify || cfg.exhaustive) {
                v.idp_exact = exact;
            }
            Ok((v, grid_idp))
        })
        .filter(|r| !matches!(r, Ok((v, false)) if v.idp_predicted == 0))
        .collect::<Result<Vec<_>>>()?;

    let grid_idp = cfg.exhaustive.then(|| results.iter().filter(|(_, idp)| *idp).count() as u64);
    let positives: Vec<SieveVerdict> = results.into_iter().map(|(v, _)| v).filter(|v| v.idp_predicted == 1).collect();
    let verified_positive =
        (cfg.verify || cfg.exhaustive).then(|| positives.iter().filter(|v| v.idp_exact == Some(1)).count() as u64);

    let report = ScanReport {
        d: cfg.d,
        bound: cfg.bound,
        eta: cfg.eta,
        tau: cfg.tau,
        scanned: n,
        predicted_positive: positives.len() as u64,
        verified_positive,
        grid_idp,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok(ScanOutcome { report, positives })
}
