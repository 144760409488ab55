// SPDX-License-Identifier: Apache-2.0
//! Single-layer classification RBM realized on a resistive crossbar with
//! p-bit neurons: training, weight-to-conductance mapping and stochastic
//! inference into PIR records.

mod crossbar;
mod dataset;
mod model;
mod pir;
mod train;

pub use crossbar::{map_weights, CrossbarConfig};
pub use dataset::{
    format_dataset, generate_patterns, parse_dataset, LabeledImage, BINARY_THRESHOLD, PATTERN_SIDE,
};
pub use model::{RbmModel, MAX_LABELS, MODEL_MAGIC, MODEL_VERSION};
pub use pir::{
    infer_batch, infer_batch_frequencies, infer_frequencies, infer_pir, quantize_batch,
    quantize_pir, PirConfig, MAX_PIR_BITS,
};
pub use train::{train_cd1, visible_vector, TrainConfig, Training};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RbmError {
    #[error("dimension error: {0}")]
    Shape(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset line {line}: {msg}")]
    Dataset { line: usize, msg: String },
    #[error("model file line {line}: {msg}")]
    ModelFile { line: usize, msg: String },
    #[error("conductance bounds must satisfy 0 < g_min < g_max, got {g_min} and {g_max}")]
    Conductance { g_min: f64, g_max: f64 },
    #[error("PIR: {0}")]
    Pir(String),
}
