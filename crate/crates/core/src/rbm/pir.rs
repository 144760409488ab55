// SPDX-License-Identifier: Apache-2.0
//! Stochastic inference through p-bit neurons with a behavioral
//! probabilistic inference recorder (PIR): each label neuron is read
//! `n_reads` times, the high count becomes a frequency and the frequency is
//! rounded onto a `bits`-bit grid.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{CrossbarConfig, RbmError};
use crate::analyzer::{PirNeuron, PirTestcase};
use crate::device::{p_high_from_drive, EnergyBarrier};

/// Widest supported recorder.
pub const MAX_PIR_BITS: u32 = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct PirConfig {
    bits: u32,
    n_reads: usize,
    energy_fj: BTreeMap<u32, f64>,
}

impl PirConfig {
    pub fn new(bits: u32, n_reads: usize, energy_fj: BTreeMap<u32, f64>) -> Result<Self, RbmError> {
        if !(1..=MAX_PIR_BITS).contains(&bits) || n_reads == 0 {
            return Err(RbmError::Pir(format!(
                "need 1 ≤ bits ≤ {MAX_PIR_BITS} and n_reads ≥ 1, got bits={bits} n_reads={n_reads}"
            )));
        }
        Ok(Self {
            bits,
            n_reads,
            energy_fj,
        })
    }

    /// Energy per classified testcase, in fJ, for 3/4/5-bit recorders.
    pub fn default_energy_table() -> BTreeMap<u32, f64> {
        BTreeMap::from([(3, 90.75), (4, 124.2), (5, 176.0)])
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn n_reads(&self) -> usize {
        self.n_reads
    }

    pub fn energy_table(&self) -> &BTreeMap<u32, f64> {
        &self.energy_fj
    }

    pub fn energy_per_testcase(&self) -> Option<f64> {
        self.energy_fj.get(&self.bits).copied()
    }
}

/// Rounds `p` to the nearest of `k / (2^bits − 1)`; halfway cases round up.
pub fn quantize_pir(p: f64, bits: u32) -> Result<f64, RbmError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(RbmError::Pir(format!("probability {p} outside [0, 1]")));
    }
    if !(1..=MAX_PIR_BITS).contains(&bits) {
        return Err(RbmError::Pir(format!("unsupported precision {bits}")));
    }
    let levels = ((1u64 << bits) - 1) as f64;
    Ok((p * levels + 0.5).floor().min(levels) / levels)
}

fn read(p: f64, rng: &mut impl Rng) -> u8 {
    u8::from(rng.random::<f64>() < p)
}

/// Pre-quantization high-state frequencies of the label neurons.
///
/// Every read samples the hidden p-bits from the image-driven column
/// currents, then samples each label p-bit from the current fed back
/// through the array by that hidden state.
pub fn infer_frequencies<R: Rng>(
    crossbar: &CrossbarConfig,
    e_b: &EnergyBarrier,
    image: &[u8],
    n_reads: usize,
    rng: &mut R,
) -> Result<Vec<f64>, RbmError> {
    if image.len() != crossbar.n_pixels() {
        return Err(RbmError::Shape(format!(
            "image has {} pixels, crossbar expects {}",
            image.len(),
            crossbar.n_pixels()
        )));
    }
    if n_reads == 0 {
        return Err(RbmError::Pir("n_reads must be at least 1".into()));
    }
    let mut visible = image.to_vec();
    visible.resize(crossbar.n_visible(), 0);
    let p_hidden: Vec<f64> = crossbar
        .neuron_drive(&visible)?
        .iter()
        .map(|&i| p_high_from_drive(i, e_b))
        .collect();
    let mut counts = vec![0u32; crossbar.n_labels()];
    let mut hidden = vec![0u8; crossbar.n_hidden()];
    for _ in 0..n_reads {
        for (h, &p) in hidden.iter_mut().zip(&p_hidden) {
            *h = read(p, rng);
        }
        for (c, i) in counts.iter_mut().zip(crossbar.label_drive(&hidden)?) {
            *c += u32::from(read(p_high_from_drive(i, e_b), rng));
        }
    }
    Ok(counts
        .into_iter()
        .map(|c| f64::from(c) / n_reads as f64)
        .collect())
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One recorded testcase. Digits are the label indices.
pub fn infer_pir(
    crossbar: &CrossbarConfig,
    e_b: &EnergyBarrier,
    image: &[u8],
    pir: &PirConfig,
    case_id: &str,
    seed: u64,
) -> Result<PirTestcase, RbmError> {
    let freqs = infer_frequencies(crossbar, e_b, image, pir.n_reads(), &mut stream(seed, 0))?;
    to_testcase(case_id, &freqs, pir.bits())
}

fn to_testcase(case_id: &str, freqs: &[f64], bits: u32) -> Result<PirTestcase, RbmError> {
    let neurons = freqs
        .iter()
        .enumerate()
        .map(|(k, &f)| {
            Ok(PirNeuron {
                digit: k as u8,
                probability: quantize_pir(f, bits)?,
            })
        })
        .collect::<Result<_, RbmError>>()?;
    Ok(PirTestcase {
        case_id: case_id.to_string(),
        neurons,
    })
}

/// Frequencies for a batch of binarized images; image `k` reads from RNG
/// stream `k` of `seed`, so results do not depend on thread scheduling.
pub fn infer_batch_frequencies(
    crossbar: &CrossbarConfig,
    e_b: &EnergyBarrier,
    images: &[Vec<u8>],
    n_reads: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>, RbmError> {
    images
        .par_iter()
        .enumerate()
        .map(|(k, img)| infer_frequencies(crossbar, e_b, img, n_reads, &mut stream(seed, k as u64)))
        .collect()
}

/// Records a batch; testcase ids are the zero-based image positions.
pub fn infer_batch(
    crossbar: &CrossbarConfig,
    e_b: &EnergyBarrier,
    images: &[Vec<u8>],
    pir: &PirConfig,
    seed: u64,
) -> Result<Vec<PirTestcase>, RbmError> {
    quantize_batch(
        &infer_batch_frequencies(crossbar, e_b, images, pir.n_reads(), seed)?,
        pir.bits(),
    )
}

pub fn quantize_batch(freqs: &[Vec<f64>], bits: u32) -> Result<Vec<PirTestcase>, RbmError> {
    freqs
        .iter()
        .enumerate()
        .map(|(k, f)| to_testcase(&k.to_string(), f, bits))
        .collect()
}
