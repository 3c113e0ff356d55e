use super::fit::encode_input;
use crate::binning::{bin_of, supp_tolerant, RelevantSet};
use crate::error::{Error, Result};
use crate::hilbert::{reduce, HilbertBasis};
use crate::nn::{sigmoid, Params};
use crate::simplex::{fpp_points, QVector};

/// Network wired to a relevant set, with the input scaling used in training.
#[derive(Clone, Debug)]
pub struct Predictor<'a> {
    pub params: &'a Params,
    pub relevant: &'a RelevantSet,
    pub scale: f64,
}

impl<'a> Predictor<'a> {
    pub fn new(params: &'a Params, relevant: &'a RelevantSet, scale: f64) -> Result<Self> {
        if params.input_dim() != relevant.dim() {
            return Err(Error::DimensionMismatch { expected: relevant.dim(), actual: params.input_dim() });
        }
        if params.output_dim() != relevant.len() {
            return Err(Error::Shape(format!(
                "model has {} outputs but d={} has {} relevant bins",
                params.output_dim(),
                relevant.dim(),
                relevant.len()
            )));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidArgument(format!("input scale must be positive, got {scale}")));
        }
        Ok(Predictor { params, relevant, scale })
    }

    pub fn logits(&self, q: &QVector) -> Result<Vec<f64>> {
        self.params.logits(&encode_input(q, self.scale))
    }

    /// Coordinate `α` is positive iff `σ(f(q)_α) > η`.
    pub fn predict_hib(&self, q: &QVector, eta: f64) -> Result<Vec<bool>> {
        Ok(self.logits(q)?.into_iter().map(|t| sigmoid(t) > eta).collect())
    }

    pub fn predict_idp(&self, q: &QVector, eta: f64, tau: usize) -> Result<u8> {
        Ok(self.verdict(q, eta, tau)?.idp_predicted)
    }

    pub fn verdict(&self, q: &QVector, eta: f64, tau: usize) -> Result<SieveVerdict> {
        let count = count_above(&self.logits(q)?, eta);
        Ok(SieveVerdict {
            q: q.clone(),
            predicted_positive_bins: count,
            idp_predicted: supp_tolerant(count, tau),
            idp_exact: None,
        })
    }

    /// Reduces the parallelepiped points outside predicted-negative relevant
    /// bins. Points in bins the model does not score are always kept.
    pub fn approx_hilbert_basis(&self, q: &QVector, eta: f64) -> Result<HilbertBasis> {
        let predicted = self.predict_hib(q, eta)?;
        Ok(approx_hilbert_basis_from(q, self.relevant, &predicted))
    }
}

/// Number of logits whose sigmoid exceeds `eta`.
pub fn count_above(logits: &[f64], eta: f64) -> usize {
    logits.iter().filter(|&&t| sigmoid(t) > eta).count()
}

/// Candidate reduction given an explicit 0/1 prediction over the relevant set.
pub fn approx_hilbert_basis_from(q: &QVector, relevant: &RelevantSet, predicted: &[bool]) -> HilbertBasis {
    let candidates: Vec<_> = fpp_points(q)
        .into_iter()
        .filter(|z| match relevant.position(&bin_of(&z.weights, q.dim())) {
            Some(pos) => predicted[pos],
            None => true,
        })
        .collect();
    reduce(q, &candidates)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveVerdict {
    pub q: QVector,
    pub predicted_positive_bins: usize,
    pub idp_predicted: u8,
    pub idp_exact: Option<u8>,
}
