// SPDX-License-Identifier: Apache-2.0
//! Marker-line extraction from simulator console output.
//!
//! A data line is `<marker> <v_in> <v_out>`; its first whitespace-separated
//! field must equal the marker. All other lines are ignored.

use super::SpiceError;
use crate::fmt::decimal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoltagePoint {
    pub v_in: f64,
    pub v_out: f64,
}

pub fn extract_output_voltages(raw: &str, marker: &str) -> Result<Vec<VoltagePoint>, SpiceError> {
    let mut points = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        let mut fields = line.split_whitespace();
        if fields.next() != Some(marker) {
            continue;
        }
        let bad = || SpiceError::BadDataLine {
            line: idx + 1,
            text: line.to_string(),
        };
        let mut number = || -> Result<f64, SpiceError> {
            fields
                .next()
                .and_then(|f| f.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(bad)
        };
        let v_in = number()?;
        let v_out = number()?;
        if fields.next().is_some() {
            return Err(bad());
        }
        points.push(VoltagePoint { v_in, v_out });
    }
    if points.is_empty() {
        return Err(SpiceError::NoOutput {
            marker: marker.to_string(),
        });
    }
    Ok(points)
}

/// Inverse of [`extract_output_voltages`]; also handy for stub simulators.
pub fn format_marker_lines(points: &[VoltagePoint], marker: &str) -> String {
    points
        .iter()
        .map(|p| format!("{marker} {} {}\n", decimal(p.v_in), decimal(p.v_out)))
        .collect()
}
