//! Exact Hilbert bases and the integer decomposition property (IDP) for the
//! lattice simplices `Δ(1,q) = conv(e_1, …, e_d, -Σ q_i e_i)`, together with a
//! small feed-forward network trained to predict which bins of the
//! fundamental parallelepiped hold Hilbert basis elements, and a sieve that
//! turns those predictions into cheap IDP verdicts.
//!
//! Module map:
//! - [`simplex`]: q-vectors, cone generators, parallelepiped enumeration, h*-vectors
//! - [`hilbert`]: reduction to the Hilbert basis and both exact IDP tests
//! - [`binning`]: bin indices, relevant bins, sparse labels
//! - [`nn`]: the network, losses, backpropagation, SGD, model files
//! - [`trainer`]: datasets, training, prediction, metrics and sweeps
//! - [`sieve`]: full-grid predict-then-verify scans

pub mod binning;
pub mod error;
pub mod hilbert;
pub mod nn;
pub mod rng;
pub mod sieve;
pub mod simplex;
pub mod trainer;

pub use binning::{bin_of, height_from_bin, hib, relevant_set, supp_tolerant, BinIndex, HibVector, RelevantSet};
pub use error::{Error, Result};
pub use hilbert::{hilbert_basis, is_idp, is_idp_bins, HilbertBasis};
pub use nn::{init_params, load_params, save_params, NetSpec, Params};
pub use sieve::{scan, ScanConfig, ScanReport};
pub use simplex::{
    build_generators, coords_in_cone, fpp_points, hstar, is_unimodal, ConeBasis, FppPoint, QVector, RationalWeights,
};
pub use trainer::{ConfusionTable, Dataset, LabeledExample, Predictor, TrainConfig};
