// SPDX-License-Identifier: Apache-2.0
//! One-step contrastive divergence (CD-1) on joint image ⊕ one-hot label
//! visible vectors.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{LabeledImage, RbmError, RbmModel};
use crate::device::sigmoid;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub hidden: usize,
    pub n_labels: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden: 32,
            n_labels: 3,
            epochs: 30,
            learning_rate: 0.1,
            batch_size: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Training {
    pub model: RbmModel,
    /// Mean squared reconstruction error of the visible layer, per epoch.
    pub reconstruction_error: Vec<f64>,
}

/// Joint visible vector: binarized pixels followed by the one-hot label.
pub fn visible_vector(image: &[u8], label: Option<u8>, n_labels: usize) -> Vec<f64> {
    let mut v: Vec<f64> = image.iter().map(|&b| f64::from(b)).collect();
    v.extend((0..n_labels).map(|k| if label == Some(k as u8) { 1.0 } else { 0.0 }));
    v
}

fn hidden_probs(m: &RbmModel, v: &[f64], out: &mut [f64]) {
    let nh = m.n_hidden();
    out.copy_from_slice(m.hidden_bias());
    for (i, &vi) in v.iter().enumerate() {
        if vi != 0.0 {
            let row = &m.weights()[i * nh..(i + 1) * nh];
            for (o, w) in out.iter_mut().zip(row) {
                *o += vi * w;
            }
        }
    }
    out.iter_mut().for_each(|x| *x = sigmoid(*x));
}

fn visible_probs(m: &RbmModel, h: &[f64], out: &mut [f64]) {
    let nh = m.n_hidden();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &m.weights()[i * nh..(i + 1) * nh];
        let x: f64 = row.iter().zip(h).map(|(w, hj)| w * hj).sum();
        *o = sigmoid(x + m.visible_bias()[i]);
    }
}

pub fn train_cd1(data: &[LabeledImage], cfg: &TrainConfig) -> Result<Training, RbmError> {
    let first = data.first().ok_or(RbmError::EmptyDataset)?;
    let n_pixels = first.pixels.len();
    if let Some(bad) = data.iter().position(|d| d.pixels.len() != n_pixels) {
        return Err(RbmError::Shape(format!(
            "image {bad} has {} pixels, expected {n_pixels}",
            data[bad].pixels.len()
        )));
    }
    if let Some(d) = data.iter().find(|d| usize::from(d.label) >= cfg.n_labels) {
        return Err(RbmError::Shape(format!(
            "label {} outside 0..{}",
            d.label, cfg.n_labels
        )));
    }
    if cfg.batch_size == 0 || !(cfg.learning_rate.is_finite() && cfg.learning_rate > 0.0) {
        return Err(RbmError::Shape(
            "batch size and learning rate must be positive".into(),
        ));
    }
    let nv = n_pixels + cfg.n_labels;
    let nh = cfg.hidden;
    let mut model = RbmModel::zeros(nv, nh, cfg.n_labels)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let init = Normal::new(0.0, 0.01).expect("valid normal");
    model
        .parts_mut()
        .0
        .iter_mut()
        .for_each(|w| *w = init.sample(&mut rng));

    let visibles: Vec<Vec<f64>> = data
        .iter()
        .map(|d| visible_vector(&d.binary(), Some(d.label), cfg.n_labels))
        .collect();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let (mut h0, mut h0s, mut v1, mut h1) =
        (vec![0.0; nh], vec![0.0; nh], vec![0.0; nv], vec![0.0; nh]);
    let mut dw = vec![0.0; nv * nh];
    let (mut dvb, mut dhb) = (vec![0.0; nv], vec![0.0; nh]);
    let mut history = Vec::with_capacity(cfg.epochs);

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut sq_err = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            dw.fill(0.0);
            dvb.fill(0.0);
            dhb.fill(0.0);
            for &idx in batch {
                let v0 = &visibles[idx];
                hidden_probs(&model, v0, &mut h0);
                for (s, &p) in h0s.iter_mut().zip(&h0) {
                    *s = if rng.random::<f64>() < p { 1.0 } else { 0.0 };
                }
                visible_probs(&model, &h0s, &mut v1);
                hidden_probs(&model, &v1, &mut h1);
                for i in 0..nv {
                    let row = &mut dw[i * nh..(i + 1) * nh];
                    for j in 0..nh {
                        row[j] += v0[i] * h0[j] - v1[i] * h1[j];
                    }
                    dvb[i] += v0[i] - v1[i];
                    sq_err += (v0[i] - v1[i]).powi(2);
                }
                for j in 0..nh {
                    dhb[j] += h0[j] - h1[j];
                }
            }
            let step = cfg.learning_rate / batch.len() as f64;
            let (w, vb, hb) = model.parts_mut();
            w.iter_mut().zip(&dw).for_each(|(w, d)| *w += step * d);
            vb.iter_mut().zip(&dvb).for_each(|(b, d)| *b += step * d);
            hb.iter_mut().zip(&dhb).for_each(|(b, d)| *b += step * d);
        }
        history.push(sq_err / (data.len() * nv) as f64);
    }
    Ok(Training {
        model,
        reconstruction_error: history,
    })
}
