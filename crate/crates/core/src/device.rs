// SPDX-License-Identifier: Apache-2.0
//! Behavioral model of a p-bit neuron built on a stochastic in-plane MTJ.
//!
//! Everything in this module is in CGS units: fields in oersted, saturation
//! magnetization in emu/cm³, lengths in cm, volumes in cm³ and energies in
//! erg (1 Oe·emu = 1 erg). Energy barriers are also carried as multiples of
//! k_B·T because that is the quantity that shapes the activation.
//!
//! The neuron is a two-state telegraph process whose escape rates follow the
//! Néel–Arrhenius law with a bias-tilted barrier. Its stationary probability
//! of sitting in the high state is `σ(2·Δ·i)`, where `Δ = E_b/kT` and `i` is
//! the input voltage mapped onto `[-1, 1]`.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::PI;

/// Boltzmann constant in erg/K.
pub const BOLTZMANN_ERG_PER_K: f64 = 1.380649e-16;
pub const DEFAULT_TEMPERATURE_K: f64 = 300.0;
/// Attempt frequency f0 of the Néel–Arrhenius law, in 1/s.
pub const DEFAULT_ATTEMPT_RATE_HZ: f64 = 1e9;
/// Largest per-step transition probability accepted by the discrete-time
/// telegraph approximation.
pub const MAX_STEP_PROBABILITY: f64 = 0.1;
/// Upper bound (exclusive) on the relative dimension spread for variation sampling.
pub const MAX_SIGMA_REL: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DeviceError {
    #[error("{what} must be strictly positive and finite, got {value}")]
    NotPositive { what: &'static str, value: f64 },
    #[error("{what} must be non-negative and finite, got {value}")]
    Negative { what: &'static str, value: f64 },
    #[error("rails must satisfy 0 < v_th < v_dd, got v_th={v_th} v_dd={v_dd}")]
    InvalidRails { v_th: f64, v_dd: f64 },
    #[error("relative sigma must lie in [0, {MAX_SIGMA_REL}), got {0}")]
    SigmaOutOfRange(f64),
    #[error("time step {dt} s too coarse: rate·dt = {product} exceeds {MAX_STEP_PROBABILITY}")]
    TimeStepTooCoarse { dt: f64, product: f64 },
    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),
}

pub type Result<T> = std::result::Result<T, DeviceError>;

fn positive(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(DeviceError::NotPositive { what, value })
    }
}

fn non_negative(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(DeviceError::Negative { what, value })
    }
}

/// Elliptical free layer: axes and thickness in cm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceGeometry {
    major_axis: f64,
    minor_axis: f64,
    free_layer_thickness: f64,
}

impl DeviceGeometry {
    pub fn new(major_axis: f64, minor_axis: f64, free_layer_thickness: f64) -> Result<Self> {
        Ok(Self {
            major_axis: positive("major axis", major_axis)?,
            minor_axis: positive("minor axis", minor_axis)?,
            free_layer_thickness: positive("free layer thickness", free_layer_thickness)?,
        })
    }

    /// 60 nm × 60 nm × 1 nm.
    pub fn nominal() -> Self {
        Self {
            major_axis: 6e-6,
            minor_axis: 6e-6,
            free_layer_thickness: 1e-7,
        }
    }

    pub fn major_axis(&self) -> f64 {
        self.major_axis
    }

    pub fn minor_axis(&self) -> f64 {
        self.minor_axis
    }

    pub fn free_layer_thickness(&self) -> f64 {
        self.free_layer_thickness
    }

    /// Volume of the elliptical cylinder, `π/4 · a · b · t`, in cm³.
    pub fn volume(&self) -> f64 {
        PI / 4.0 * self.major_axis * self.minor_axis * self.free_layer_thickness
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnetParams {
    /// Anisotropy field H_K in Oe.
    pub h_k: f64,
    /// Saturation magnetization M_S in emu/cm³.
    pub m_s: f64,
    pub temperature: f64,
    pub attempt_rate: f64,
}

impl MagnetParams {
    pub fn new(h_k: f64, m_s: f64, temperature: f64, attempt_rate: f64) -> Result<Self> {
        Ok(Self {
            h_k: non_negative("anisotropy field", h_k)?,
            m_s: positive("saturation magnetization", m_s)?,
            temperature: positive("temperature", temperature)?,
            attempt_rate: positive("attempt rate", attempt_rate)?,
        })
    }

    /// CoFeB-like free layer at room temperature.
    pub fn nominal() -> Self {
        Self {
            h_k: 400.0,
            m_s: 1100.0,
            temperature: DEFAULT_TEMPERATURE_K,
            attempt_rate: DEFAULT_ATTEMPT_RATE_HZ,
        }
    }

    pub fn energy_barrier(&self, geometry: &DeviceGeometry) -> Result<EnergyBarrier> {
        energy_barrier(self.h_k, self.m_s, geometry.volume(), self.temperature)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PbitElectrical {
    v_dd: f64,
    v_th: f64,
}

impl PbitElectrical {
    pub fn new(v_dd: f64, v_th: f64) -> Result<Self> {
        if v_th.is_finite() && v_dd.is_finite() && 0.0 < v_th && v_th < v_dd {
            Ok(Self { v_dd, v_th })
        } else {
            Err(DeviceError::InvalidRails { v_th, v_dd })
        }
    }

    pub fn v_dd(&self) -> f64 {
        self.v_dd
    }

    pub fn v_th(&self) -> f64 {
        self.v_th
    }

    /// Input voltage at which the neuron is equally likely high or low.
    pub fn v_mid(&self) -> f64 {
        (self.v_dd + self.v_th) / 2.0
    }

    /// Maps an input voltage onto the normalized drive `i ∈ [-1, 1]`,
    /// saturating at the NMOS threshold and at the supply.
    pub fn drive(&self, v_in: f64) -> f64 {
        (2.0 * (v_in - self.v_mid()) / (self.v_dd - self.v_th)).clamp(-1.0, 1.0)
    }
}

impl Default for PbitElectrical {
    fn default() -> Self {
        Self {
            v_dd: 1.0,
            v_th: 0.5,
        }
    }
}

/// Energy separating the two free-layer orientations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBarrier {
    erg: f64,
    kt_multiple: f64,
    temperature: f64,
}

impl EnergyBarrier {
    pub fn from_erg(erg: f64, temperature: f64) -> Result<Self> {
        let erg = non_negative("energy barrier", erg)?;
        let temperature = positive("temperature", temperature)?;
        Ok(Self {
            erg,
            kt_multiple: erg / (BOLTZMANN_ERG_PER_K * temperature),
            temperature,
        })
    }

    pub fn from_kt(kt_multiple: f64, temperature: f64) -> Result<Self> {
        let kt_multiple = non_negative("energy barrier", kt_multiple)?;
        let temperature = positive("temperature", temperature)?;
        Ok(Self {
            erg: kt_multiple * BOLTZMANN_ERG_PER_K * temperature,
            kt_multiple,
            temperature,
        })
    }

    pub fn erg(&self) -> f64 {
        self.erg
    }

    pub fn kt_multiple(&self) -> f64 {
        self.kt_multiple
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }
}

/// `E_b = ½ · H_K · M_S · V`.
pub fn energy_barrier(h_k: f64, m_s: f64, volume: f64, temperature: f64) -> Result<EnergyBarrier> {
    let h_k = non_negative("anisotropy field", h_k)?;
    let m_s = positive("saturation magnetization", m_s)?;
    let volume = positive("volume", volume)?;
    EnergyBarrier::from_erg(0.5 * h_k * m_s * volume, temperature)
}

/// Inverse of [`energy_barrier`]: `H_K = 2·E_b / (M_S·V)`.
pub fn anisotropy_from_barrier(e_b: &EnergyBarrier, m_s: f64, volume: f64) -> Result<f64> {
    let m_s = positive("saturation magnetization", m_s)?;
    let volume = positive("volume", volume)?;
    Ok(2.0 * e_b.erg() / (m_s * volume))
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Stationary probability of the high state for a normalized drive.
pub fn p_high_from_drive(drive: f64, e_b: &EnergyBarrier) -> f64 {
    sigmoid(2.0 * e_b.kt_multiple() * drive.clamp(-1.0, 1.0))
}

/// Probability that the p-bit output sits at V_DD for input `v_in`.
pub fn steady_state_p_high(v_in: f64, e_b: &EnergyBarrier, elec: &PbitElectrical) -> f64 {
    p_high_from_drive(elec.drive(v_in), e_b)
}

/// Escape rates of the two-state process, in 1/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelegraphRates {
    /// low → high
    pub rise: f64,
    /// high → low
    pub fall: f64,
}

impl TelegraphRates {
    pub fn new(drive: f64, e_b: &EnergyBarrier, attempt_rate: f64) -> Self {
        let i = drive.clamp(-1.0, 1.0);
        let delta = e_b.kt_multiple();
        Self {
            rise: attempt_rate * (-delta * (1.0 - i)).exp(),
            fall: attempt_rate * (-delta * (1.0 + i)).exp(),
        }
    }

    pub fn max(&self) -> f64 {
        self.rise.max(self.fall)
    }

    /// Largest time step the discrete-time approximation accepts.
    pub fn stable_time_step(&self) -> f64 {
        MAX_STEP_PROBABILITY / self.max()
    }
}

/// Telegraph trace for a normalized drive. The initial state is drawn from
/// the stationary distribution and every recorded step is one `dt` apart.
pub fn telegraph_trace_drive<R: Rng + ?Sized>(
    drive: f64,
    e_b: &EnergyBarrier,
    attempt_rate: f64,
    n_steps: usize,
    dt: f64,
    rng: &mut R,
) -> Result<Vec<bool>> {
    if n_steps == 0 {
        return Err(DeviceError::ZeroCount("n_steps"));
    }
    let dt = positive("time step", dt)?;
    let attempt_rate = positive("attempt rate", attempt_rate)?;
    let rates = TelegraphRates::new(drive, e_b, attempt_rate);
    let product = rates.max() * dt;
    // Tolerate the rounding in `stable_time_step() * max()`.
    if product > MAX_STEP_PROBABILITY * (1.0 + 1e-12) {
        return Err(DeviceError::TimeStepTooCoarse { dt, product });
    }
    let p_rise = (rates.rise * dt).min(1.0);
    let p_fall = (rates.fall * dt).min(1.0);

    let mut state = rng.random::<f64>() < p_high_from_drive(drive, e_b);
    let mut trace = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        trace.push(state);
        let u: f64 = rng.random();
        state = if state { u >= p_fall } else { u < p_rise };
    }
    Ok(trace)
}

/// Telegraph trace of the p-bit output for input voltage `v_in`.
pub fn telegraph_trace<R: Rng + ?Sized>(
    v_in: f64,
    e_b: &EnergyBarrier,
    elec: &PbitElectrical,
    attempt_rate: f64,
    n_steps: usize,
    dt: f64,
    rng: &mut R,
) -> Result<Vec<bool>> {
    telegraph_trace_drive(elec.drive(v_in), e_b, attempt_rate, n_steps, dt, rng)
}

/// Draws `n` barriers from geometries whose three dimensions are perturbed
/// independently by Gaussian noise of relative width `sigma_rel`.
/// Non-positive draws are rejected and redrawn.
pub fn sample_barriers<R: Rng + ?Sized>(
    nominal: &DeviceGeometry,
    magnet: &MagnetParams,
    sigma_rel: f64,
    n: usize,
    rng: &mut R,
) -> Result<Vec<EnergyBarrier>> {
    if !(0.0..MAX_SIGMA_REL).contains(&sigma_rel) {
        return Err(DeviceError::SigmaOutOfRange(sigma_rel));
    }
    if n == 0 {
        return Err(DeviceError::ZeroCount("n"));
    }
    let dims = [
        nominal.major_axis,
        nominal.minor_axis,
        nominal.free_layer_thickness,
    ];
    let dists: Vec<Normal<f64>> = dims
        .iter()
        .map(|&d| Normal::new(d, sigma_rel * d).expect("finite, non-negative std"))
        .collect();
    let draw = |k: usize, rng: &mut R| loop {
        let x = dists[k].sample(rng);
        if x > 0.0 {
            break x;
        }
    };
    (0..n)
        .map(|_| {
            let a = draw(0, rng);
            let b = draw(1, rng);
            let t = draw(2, rng);
            magnet.energy_barrier(&DeviceGeometry::new(a, b, t)?)
        })
        .collect()
}
