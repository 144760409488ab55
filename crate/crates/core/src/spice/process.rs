// SPDX-License-Identifier: Apache-2.0
//! Running an external circuit simulator with its console captured to a log.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use super::SpiceError;

pub const NETLIST_PLACEHOLDER: &str = "{netlist}";

const POLL_INTERVAL: Duration = Duration::from_millis(5);

/// Argument vector with exactly one `{netlist}` placeholder. It is never
/// handed to a shell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandTemplate(Vec<String>);

impl CommandTemplate {
    pub fn new(args: Vec<String>) -> Result<Self, SpiceError> {
        let n: usize = args
            .iter()
            .map(|a| a.matches(NETLIST_PLACEHOLDER).count())
            .sum();
        if args.is_empty() || n != 1 {
            return Err(SpiceError::BadTemplate(args.join(" ")));
        }
        Ok(Self(args))
    }

    /// Splits `template` into words with POSIX-style quoting rules.
    pub fn parse(template: &str) -> Result<Self, SpiceError> {
        let args =
            shlex::split(template).ok_or_else(|| SpiceError::BadTemplate(template.into()))?;
        Self::new(args)
    }

    pub fn args(&self) -> &[String] {
        &self.0
    }

    fn render(&self, netlist: &Path) -> Vec<String> {
        let path = netlist.to_string_lossy();
        self.0
            .iter()
            .map(|a| a.replace(NETLIST_PLACEHOLDER, &path))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimJob {
    pub netlist_path: PathBuf,
    pub command: CommandTemplate,
    pub log_path: PathBuf,
    pub output_marker: String,
    pub timeout: Duration,
}

impl SimJob {
    pub fn new(
        netlist_path: impl Into<PathBuf>,
        command: CommandTemplate,
        log_path: impl Into<PathBuf>,
        output_marker: impl Into<String>,
        timeout: Duration,
    ) -> Result<Self, SpiceError> {
        if timeout.is_zero() {
            return Err(SpiceError::ZeroTimeout);
        }
        Ok(Self {
            netlist_path: netlist_path.into(),
            command,
            log_path: log_path.into(),
            output_marker: output_marker.into(),
            timeout,
        })
    }
}

/// Runs the job's simulator. Stdout and stderr share one file descriptor, so
/// the log holds the interleaved console output byte for byte; the same
/// bytes are returned on success and carried in the error otherwise.
pub fn run_external(job: &SimJob) -> Result<Vec<u8>, SpiceError> {
    let argv = job.command.render(&job.netlist_path);
    let log_err = |source| SpiceError::Log {
        path: job.log_path.clone(),
        source,
    };
    let log = File::create(&job.log_path).map_err(log_err)?;
    let log_dup = log.try_clone().map_err(log_err)?;

    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::null())
        .stdout(Stdio::from(log))
        .stderr(Stdio::from(log_dup))
        .spawn()
        .map_err(|source| SpiceError::Spawn {
            program: argv[0].clone(),
            source,
        })?;

    let deadline = Instant::now() + job.timeout;
    let status = loop {
        match child.try_wait().map_err(log_err)? {
            Some(status) => break Some(status),
            None if Instant::now() >= deadline => {
                let _ = child.kill();
                let _ = child.wait();
                break None;
            }
            None => std::thread::sleep(POLL_INTERVAL),
        }
    };
    let output = std::fs::read(&job.log_path).map_err(log_err)?;

    match status {
        None => Err(SpiceError::Timeout {
            timeout: job.timeout,
            log_path: job.log_path.clone(),
            output,
        }),
        Some(s) if !s.success() => Err(SpiceError::Simulator {
            status: s.code(),
            log_path: job.log_path.clone(),
            output,
        }),
        Some(_) => Ok(output),
    }
}
