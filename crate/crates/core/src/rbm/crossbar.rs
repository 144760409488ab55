// SPDX-License-Identifier: Apache-2.0
//! Resistive crossbar realization of an RBM.
//!
//! Each signed weight is a differential pair of conductances. A positive
//! weight raises `g_plus` above `g_min` in proportion to `w / w_abs_max`
//! and leaves `g_minus` at `g_min`; negative weights mirror that. Biases
//! use the same scale on their own always-on line. The column current
//! difference times `r_sense` gives the normalized p-bit drive.

use super::{RbmError, RbmModel};
use crate::device::EnergyBarrier;

#[derive(Debug, Clone, PartialEq)]
pub struct CrossbarConfig {
    n_visible: usize,
    n_hidden: usize,
    n_labels: usize,
    /// Row-major `n_visible × n_hidden`.
    pub g_plus: Vec<f64>,
    pub g_minus: Vec<f64>,
    pub hidden_bias_plus: Vec<f64>,
    pub hidden_bias_minus: Vec<f64>,
    pub visible_bias_plus: Vec<f64>,
    pub visible_bias_minus: Vec<f64>,
    pub g_min: f64,
    pub g_max: f64,
    /// Ohms.
    pub r_sense: f64,
}

fn pair(w: f64, scale: f64, g_min: f64) -> (f64, f64) {
    let g = g_min + w.abs() * scale;
    if w >= 0.0 {
        (g, g_min)
    } else {
        (g_min, g)
    }
}

/// Maps weights and biases onto conductance pairs in `[g_min, g_max]`.
/// `r_sense` is set so that the drive equals the model's raw pre-activation;
/// see [`CrossbarConfig::calibrated_for`].
pub fn map_weights(model: &RbmModel, g_min: f64, g_max: f64) -> Result<CrossbarConfig, RbmError> {
    if !(g_min.is_finite() && g_max.is_finite() && 0.0 < g_min && g_min < g_max) {
        return Err(RbmError::Conductance { g_min, g_max });
    }
    let w_max = model.abs_max();
    let span = g_max - g_min;
    let scale = if w_max > 0.0 { span / w_max } else { 0.0 };
    let split = |vals: &[f64]| -> (Vec<f64>, Vec<f64>) {
        vals.iter()
            .map(|&w| {
                let (p, m) = pair(w, scale, g_min);
                (p.min(g_max), m.min(g_max))
            })
            .unzip()
    };
    let (g_plus, g_minus) = split(model.weights());
    let (hidden_bias_plus, hidden_bias_minus) = split(model.hidden_bias());
    let (visible_bias_plus, visible_bias_minus) = split(model.visible_bias());
    Ok(CrossbarConfig {
        n_visible: model.n_visible(),
        n_hidden: model.n_hidden(),
        n_labels: model.n_labels(),
        g_plus,
        g_minus,
        hidden_bias_plus,
        hidden_bias_minus,
        visible_bias_plus,
        visible_bias_minus,
        g_min,
        g_max,
        r_sense: if w_max > 0.0 {
            w_max / span
        } else {
            1.0 / span
        },
    })
}

impl CrossbarConfig {
    /// Builds a crossbar from explicit conductances, checking shapes and bounds.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        n_visible: usize,
        n_hidden: usize,
        n_labels: usize,
        g_plus: Vec<f64>,
        g_minus: Vec<f64>,
        hidden_bias: (Vec<f64>, Vec<f64>),
        visible_bias: (Vec<f64>, Vec<f64>),
        bounds: (f64, f64),
        r_sense: f64,
    ) -> Result<Self, RbmError> {
        let (g_min, g_max) = bounds;
        if !(0.0 < g_min && g_min < g_max) {
            return Err(RbmError::Conductance { g_min, g_max });
        }
        let lens_ok = g_plus.len() == n_visible * n_hidden
            && g_minus.len() == n_visible * n_hidden
            && hidden_bias.0.len() == n_hidden
            && hidden_bias.1.len() == n_hidden
            && visible_bias.0.len() == n_visible
            && visible_bias.1.len() == n_visible
            && n_labels <= n_visible;
        if !lens_ok {
            return Err(RbmError::Shape(
                "crossbar arrays disagree with dimensions".into(),
            ));
        }
        let in_range = g_plus
            .iter()
            .chain(&g_minus)
            .chain(&hidden_bias.0)
            .chain(&hidden_bias.1)
            .chain(&visible_bias.0)
            .chain(&visible_bias.1)
            .all(|g| (g_min..=g_max).contains(g));
        if !in_range || !(r_sense.is_finite() && r_sense > 0.0) {
            return Err(RbmError::Shape(
                "conductance outside bounds or bad r_sense".into(),
            ));
        }
        Ok(Self {
            n_visible,
            n_hidden,
            n_labels,
            g_plus,
            g_minus,
            hidden_bias_plus: hidden_bias.0,
            hidden_bias_minus: hidden_bias.1,
            visible_bias_plus: visible_bias.0,
            visible_bias_minus: visible_bias.1,
            g_min,
            g_max,
            r_sense,
        })
    }

    pub fn n_visible(&self) -> usize {
        self.n_visible
    }

    pub fn n_hidden(&self) -> usize {
        self.n_hidden
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    pub fn n_pixels(&self) -> usize {
        self.n_visible - self.n_labels
    }

    /// Rescales the sense resistance so that a neuron at barrier `design`
    /// reproduces the model's logistic activation, `σ(2·Δ·i) = σ(x)`.
    /// Devices whose barrier differs from `design` then see a sharper or
    /// softer sigmoid than the one the model was trained with.
    pub fn calibrated_for(mut self, design: &EnergyBarrier) -> Result<Self, RbmError> {
        let kt = design.kt_multiple();
        if kt <= 0.0 {
            return Err(RbmError::Shape("design barrier must be positive".into()));
        }
        self.r_sense /= 2.0 * kt;
        Ok(self)
    }

    /// Drives of the hidden neurons for a visible vector (pixels then labels).
    pub fn neuron_drive(&self, visible: &[u8]) -> Result<Vec<f64>, RbmError> {
        if visible.len() != self.n_visible {
            return Err(RbmError::Shape(format!(
                "visible vector has {} entries, crossbar has {} rows",
                visible.len(),
                self.n_visible
            )));
        }
        let nh = self.n_hidden;
        let mut current: Vec<f64> = self
            .hidden_bias_plus
            .iter()
            .zip(&self.hidden_bias_minus)
            .map(|(p, m)| p - m)
            .collect();
        for (k, _) in visible.iter().enumerate().filter(|(_, &v)| v != 0) {
            let (gp, gm) = (
                &self.g_plus[k * nh..(k + 1) * nh],
                &self.g_minus[k * nh..(k + 1) * nh],
            );
            for j in 0..nh {
                current[j] += gp[j] - gm[j];
            }
        }
        Ok(current
            .into_iter()
            .map(|c| (self.r_sense * c).clamp(-1.0, 1.0))
            .collect())
    }

    /// Drives of the label units given a hidden state, read back through the
    /// transposed array.
    pub fn label_drive(&self, hidden: &[u8]) -> Result<Vec<f64>, RbmError> {
        if hidden.len() != self.n_hidden {
            return Err(RbmError::Shape(format!(
                "hidden vector has {} entries, crossbar has {} columns",
                hidden.len(),
                self.n_hidden
            )));
        }
        let nh = self.n_hidden;
        Ok((self.n_pixels()..self.n_visible)
            .map(|k| {
                let row = k * nh..(k + 1) * nh;
                let mut c = self.visible_bias_plus[k] - self.visible_bias_minus[k];
                for ((gp, gm), &h) in self.g_plus[row.clone()]
                    .iter()
                    .zip(&self.g_minus[row])
                    .zip(hidden)
                {
                    if h != 0 {
                        c += gp - gm;
                    }
                }
                (self.r_sense * c).clamp(-1.0, 1.0)
            })
            .collect())
    }
}
