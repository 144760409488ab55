// SPDX-License-Identifier: Apache-2.0
//! Bridge to circuit simulation: netlist patching, external simulator runs
//! with console capture, output extraction, and a behavioral fallback.

mod internal;
mod netlist;
mod output;
mod process;

use std::path::PathBuf;
use std::time::Duration;

pub use internal::{simulate_internal, ProbabilityPoint, EXACT};
pub use netlist::{anisotropy_fields, patch_anisotropy, NetlistText, ANISOTROPY_TOKEN};
pub use output::{extract_output_voltages, format_marker_lines, VoltagePoint};
pub use process::{run_external, CommandTemplate, SimJob, NETLIST_PLACEHOLDER};

use crate::device::DeviceError;

#[derive(Debug, thiserror::Error)]
pub enum SpiceError {
    #[error("netlist has no \"HK= \" token to patch")]
    TokenAbsent,
    #[error("line {line}: malformed anisotropy value {text:?} after \"HK= \"")]
    MalformedValue { line: usize, text: String },
    #[error("cannot write non-finite anisotropy value {0}")]
    NonFiniteValue(f64),
    #[error("command template must contain exactly one {{netlist}} placeholder: {0:?}")]
    BadTemplate(String),
    #[error("simulator timeout must be positive")]
    ZeroTimeout,
    #[error("failed to launch {program:?}: {source}")]
    Spawn {
        program: String,
        source: std::io::Error,
    },
    #[error("log file {path:?}: {source}")]
    Log {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("simulator timed out after {timeout:?}; console in {log_path:?}")]
    Timeout {
        timeout: Duration,
        log_path: PathBuf,
        output: Vec<u8>,
    },
    #[error("simulator exited with status {status:?}; console in {log_path:?}")]
    Simulator {
        status: Option<i32>,
        log_path: PathBuf,
        output: Vec<u8>,
    },
    #[error("line {line}: malformed data line {text:?}")]
    BadDataLine { line: usize, text: String },
    #[error("simulator output has no lines starting with marker {marker:?}")]
    NoOutput { marker: String },
    #[error("voltage grid is empty")]
    EmptyGrid,
    #[error(transparent)]
    Device(#[from] DeviceError),
}

impl SpiceError {
    /// True for failures of the environment or the simulator itself, as
    /// opposed to bad data.
    pub fn is_environment(&self) -> bool {
        matches!(
            self,
            SpiceError::Spawn { .. }
                | SpiceError::Log { .. }
                | SpiceError::Timeout { .. }
                | SpiceError::Simulator { .. }
        )
    }
}
