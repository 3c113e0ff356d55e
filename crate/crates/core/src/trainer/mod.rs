//! Datasets, training protocol, prediction with cutoff and tolerance, and
//! evaluation metrics.

mod dataset;
mod fit;
mod metrics;
mod predict;

pub use dataset::{generate_dataset, split, Dataset, LabeledExample, DATASET_MAGIC};
pub use fit::{dense_labels, encode_input, mean_loss, train, EvalRecord, TrainConfig, TrainOutcome};
pub use metrics::{
    confusion, fmt_ratio, hib_confusion, idp_confusion, sweep, write_sweep_csv, ConfusionTable, SweepRow,
    SWEEP_CSV_HEADER,
};
pub use predict::{approx_hilbert_basis_from, count_above, Predictor, SieveVerdict};
