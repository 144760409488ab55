// SPDX-License-Identifier: Apache-2.0
//! Behavioral backend: answers the same question as a SPICE run of the
//! neuron deck using the telegraph model from [`crate::device`].

use rand::Rng;

use super::SpiceError;
use crate::device::{self, EnergyBarrier, PbitElectrical, TelegraphRates};

/// `samples_per_point` value that selects the closed-form stationary probability.
pub const EXACT: usize = 0;

/// Time-averaged output of the neuron at one input voltage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityPoint {
    pub v_in: f64,
    pub p_high: f64,
    pub n_samples: usize,
}

/// Estimates `P(output = V_DD)` at every grid voltage, in grid order. Sampled
/// mode averages a telegraph trace of `samples_per_point` steps taken at the
/// coarsest stable time step.
pub fn simulate_internal<R: Rng + ?Sized>(
    e_b: &EnergyBarrier,
    elec: &PbitElectrical,
    attempt_rate: f64,
    v_grid: &[f64],
    samples_per_point: usize,
    rng: &mut R,
) -> Result<Vec<ProbabilityPoint>, SpiceError> {
    if v_grid.is_empty() {
        return Err(SpiceError::EmptyGrid);
    }
    v_grid
        .iter()
        .map(|&v_in| {
            let p_high = if samples_per_point == EXACT {
                device::steady_state_p_high(v_in, e_b, elec)
            } else {
                let dt =
                    TelegraphRates::new(elec.drive(v_in), e_b, attempt_rate).stable_time_step();
                let trace = device::telegraph_trace(
                    v_in,
                    e_b,
                    elec,
                    attempt_rate,
                    samples_per_point,
                    dt,
                    rng,
                )?;
                trace.iter().filter(|&&s| s).count() as f64 / samples_per_point as f64
            };
            Ok(ProbabilityPoint {
                v_in,
                p_high,
                n_samples: samples_per_point,
            })
        })
        .collect()
}
