// SPDX-License-Identifier: Apache-2.0
//! Energy-barrier sweeps: for each barrier in a list, derive the anisotropy
//! field, run the neuron through a backend over a voltage grid and collate
//! the results into one CSV.
//!
//! Barriers may be simulated concurrently. Each one draws from its own RNG
//! stream seeded with `seed ^ index`, and rows are emitted in input order,
//! so the results do not depend on scheduling.

use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::device::{
    self, DeviceError, DeviceGeometry, EnergyBarrier, MagnetParams, PbitElectrical,
};
use crate::fmt::decimal;
use crate::spice::{self, CommandTemplate, NetlistText, SimJob, SpiceError};

pub const RESULTS_HEADER: &str = "eb_kt,hk_oe,vin_v,p_high,n_samples";

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("line {line}: invalid energy barrier {text:?}")]
    BadBarrier { line: usize, text: String },
    #[error("barrier list has no entries")]
    EmptyBarrierList,
    #[error("voltage grid is empty")]
    EmptyGrid,
    #[error("voltage grid must be strictly increasing")]
    GridNotIncreasing,
    #[error("no rows to write")]
    EmptyRows,
    #[error("barrier #{index} ({barrier_kt} kT) failed: {source}")]
    Backend {
        index: usize,
        barrier_kt: f64,
        /// Rows of every barrier before `index`.
        partial: Vec<SweepRow>,
        source: SpiceError,
    },
    #[error("{path:?}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("results line {line}: {msg}")]
    BadResults { line: usize, msg: String },
    #[error(transparent)]
    Device(#[from] DeviceError),
}

/// Parses a barrier list: one kT multiple per line, blank lines and lines
/// starting with `#` skipped.
pub fn parse_barrier_list(text: &str, temperature: f64) -> Result<Vec<EnergyBarrier>, SweepError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let barrier = line
            .parse::<f64>()
            .ok()
            .and_then(|kt| EnergyBarrier::from_kt(kt, temperature).ok())
            .ok_or_else(|| SweepError::BadBarrier {
                line: idx + 1,
                text: line.to_string(),
            })?;
        out.push(barrier);
    }
    if out.is_empty() {
        return Err(SweepError::EmptyBarrierList);
    }
    Ok(out)
}

/// Renders barriers in the list format read by [`parse_barrier_list`].
pub fn format_barrier_list(barriers: &[EnergyBarrier]) -> String {
    barriers
        .iter()
        .map(|b| format!("{}\n", decimal(b.kt_multiple())))
        .collect()
}

/// `n` evenly spaced voltages from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|k| {
                if k == n - 1 {
                    stop
                } else {
                    start + (stop - start) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone)]
pub struct ExternalBackend {
    pub netlist: NetlistText,
    pub command: CommandTemplate,
    /// Per-barrier logs and patched decks are written beside this path,
    /// with the barrier index inserted before the extension.
    pub log_path: PathBuf,
    pub marker: String,
    pub timeout: Duration,
}

impl ExternalBackend {
    fn files_for(&self, index: usize) -> (PathBuf, PathBuf) {
        let stem = self
            .log_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "sweep".into());
        let ext = self
            .log_path
            .extension()
            .map(|e| e.to_string_lossy().into_owned())
            .unwrap_or_else(|| "log".into());
        (
            self.log_path.with_file_name(format!("{stem}.{index}.cir")),
            self.log_path
                .with_file_name(format!("{stem}.{index}.{ext}")),
        )
    }
}

#[derive(Debug, Clone)]
pub enum Backend {
    Internal,
    External(ExternalBackend),
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub barriers: Vec<EnergyBarrier>,
    pub magnet: MagnetParams,
    pub geometry: DeviceGeometry,
    pub elec: PbitElectrical,
    pub backend: Backend,
    pub v_grid: Vec<f64>,
    /// `spice::EXACT` (0) selects the closed form.
    pub samples_per_point: usize,
    pub seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.barriers.is_empty() {
            return Err(SweepError::EmptyBarrierList);
        }
        if self.v_grid.is_empty() {
            return Err(SweepError::EmptyGrid);
        }
        if !self.v_grid.windows(2).all(|w| w[0] < w[1])
            || self.v_grid.iter().any(|v| !v.is_finite())
        {
            return Err(SweepError::GridNotIncreasing);
        }
        Ok(())
    }
}

/// One collated record. For the external backend `p_high` carries the
/// simulator's output voltage instead of a probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub eb_kt: f64,
    pub hk_oe: f64,
    pub vin_v: f64,
    pub p_high: f64,
    pub n_samples: u64,
}

fn run_barrier(spec: &SweepSpec, index: usize) -> Result<Vec<SweepRow>, SpiceError> {
    let e_b = &spec.barriers[index];
    let h_k = device::anisotropy_from_barrier(e_b, spec.magnet.m_s, spec.geometry.volume())?;
    let row = |vin_v, p_high, n_samples| SweepRow {
        eb_kt: e_b.kt_multiple(),
        hk_oe: h_k,
        vin_v,
        p_high,
        n_samples,
    };
    match &spec.backend {
        Backend::Internal => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ index as u64);
            let points = spice::simulate_internal(
                e_b,
                &spec.elec,
                spec.magnet.attempt_rate,
                &spec.v_grid,
                spec.samples_per_point,
                &mut rng,
            )?;
            Ok(points
                .into_iter()
                .map(|p| row(p.v_in, p.p_high, p.n_samples as u64))
                .collect())
        }
        Backend::External(ext) => {
            let (netlist_path, log_path) = ext.files_for(index);
            let patched = spice::patch_anisotropy(&ext.netlist, h_k)?;
            std::fs::write(&netlist_path, patched.as_bytes()).map_err(|source| {
                SpiceError::Log {
                    path: netlist_path.clone(),
                    source,
                }
            })?;
            let job = SimJob::new(
                netlist_path,
                ext.command.clone(),
                log_path,
                ext.marker.clone(),
                ext.timeout,
            )?;
            let console = spice::run_external(&job)?;
            let points = spice::extract_output_voltages(
                &String::from_utf8_lossy(&console),
                &job.output_marker,
            )?;
            Ok(points
                .into_iter()
                .map(|p| row(p.v_in, p.v_out, 0))
                .collect())
        }
    }
}

/// Runs every barrier of `spec` and returns rows grouped by barrier in input
/// order, each group in grid (or simulator output) order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    spec.validate()?;
    let per_barrier: Vec<Result<Vec<SweepRow>, SpiceError>> = (0..spec.barriers.len())
        .into_par_iter()
        .map(|k| run_barrier(spec, k))
        .collect();
    let mut rows = Vec::with_capacity(spec.barriers.len() * spec.v_grid.len());
    for (index, result) in per_barrier.into_iter().enumerate() {
        match result {
            Ok(mut r) => rows.append(&mut r),
            Err(source) => {
                return Err(SweepError::Backend {
                    index,
                    barrier_kt: spec.barriers[index].kt_multiple(),
                    partial: rows,
                    source,
                })
            }
        }
    }
    Ok(rows)
}

/// Results CSV text. `preamble` lines (each `#`-prefixed) precede the header.
pub fn results_csv(rows: &[SweepRow], preamble: &str) -> Result<String, SweepError> {
    if rows.is_empty() {
        return Err(SweepError::EmptyRows);
    }
    let mut out = String::from(preamble);
    out.push_str(RESULTS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            decimal(r.eb_kt),
            decimal(r.hk_oe),
            decimal(r.vin_v),
            decimal(r.p_high),
            r.n_samples
        ));
    }
    Ok(out)
}

pub fn write_results(rows: &[SweepRow], path: &Path, preamble: &str) -> Result<(), SweepError> {
    let text = results_csv(rows, preamble)?;
    crate::io::write_atomic(path, text.as_bytes()).map_err(|source| SweepError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a results CSV back, skipping `#` stamp lines.
pub fn read_results(text: &str) -> Result<Vec<SweepRow>, SweepError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#'));
    let bad = |line: usize, msg: &str| SweepError::BadResults {
        line: line + 1,
        msg: msg.to_string(),
    };
    match lines.next() {
        Some((_, h)) if h == RESULTS_HEADER => {}
        Some((i, _)) => return Err(bad(i, "missing header")),
        None => return Err(bad(0, "missing header")),
    }
    lines
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(bad(i, "expected 5 fields"));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| bad(i, "non-numeric field"))
            };
            Ok(SweepRow {
                eb_kt: num(f[0])?,
                hk_oe: num(f[1])?,
                vin_v: num(f[2])?,
                p_high: num(f[3])?,
                n_samples: f[4].parse().map_err(|_| bad(i, "bad sample count"))?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(barriers: &[f64], n_grid: usize) -> SweepSpec {
        let elec = PbitElectrical::default();
        SweepSpec {
            barriers: barriers
                .iter()
                .map(|&kt| EnergyBarrier::from_kt(kt, 300.0).unwrap())
                .collect(),
            magnet: MagnetParams::nominal(),
            geometry: DeviceGeometry::nominal(),
            elec,
            backend: Backend::Internal,
            v_grid: linear_grid(elec.v_th(), elec.v_dd(), n_grid),
            samples_per_point: spice::EXACT,
            seed: 1,
        }
    }

    #[test]
    fn barrier_list_parsing() {
        let kts = |t: &str| -> Vec<f64> {
            parse_barrier_list(t, 300.0)
                .unwrap()
                .iter()
                .map(|b| b.kt_multiple())
                .collect()
        };
        assert_eq!(kts("40\n45\n50\n"), vec![40.0, 45.0, 50.0]);
        assert_eq!(kts("# nominal\n40\n\n45\n"), vec![40.0, 45.0]);
        assert!(matches!(
            parse_barrier_list("forty\n", 300.0),
            Err(SweepError::BadBarrier { line: 1, .. })
        ));
        assert!(matches!(
            parse_barrier_list("# only\n\n", 300.0),
            Err(SweepError::EmptyBarrierList)
        ));
        assert!(parse_barrier_list("40\n-3\n", 300.0).is_err());
    }

    #[test]
    fn grid_endpoints_and_midpoint() {
        let g = linear_grid(0.5, 1.0, 11);
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 0.5);
        assert_eq!(g[5], 0.75);
        assert_eq!(g[10], 1.0);
        assert_eq!(linear_grid(0.3, 0.9, 1), vec![0.3]);
    }

    #[test]
    fn row_count_and_grouping() {
        let rows = run_sweep(&spec(&[40.0, 45.0, 50.0], 11)).unwrap();
        assert_eq!(rows.len(), 33);
        for (k, kt) in [40.0, 45.0, 50.0].iter().enumerate() {
            assert!(rows[k * 11..(k + 1) * 11].iter().all(|r| r.eb_kt == *kt));
        }
        let mid = PbitElectrical::default().v_mid();
        assert!(rows
            .iter()
            .filter(|r| r.vin_v == mid)
            .all(|r| r.p_high == 0.5));
    }

    #[test]
    fn hk_follows_barrier() {
        let rows = run_sweep(&spec(&[40.0], 3)).unwrap();
        let volume = DeviceGeometry::nominal().volume();
        let e = device::energy_barrier(rows[0].hk_oe, 1100.0, volume, 300.0).unwrap();
        assert!((e.kt_multiple() - 40.0).abs() < 1e-9);
    }

    #[test]
    fn spec_validation() {
        let mut s = spec(&[40.0], 3);
        s.v_grid = vec![0.6, 0.6];
        assert!(matches!(run_sweep(&s), Err(SweepError::GridNotIncreasing)));
        s.v_grid.clear();
        assert!(matches!(run_sweep(&s), Err(SweepError::EmptyGrid)));
        let mut s = spec(&[], 3);
        s.barriers.clear();
        assert!(matches!(run_sweep(&s), Err(SweepError::EmptyBarrierList)));
    }

    #[test]
    fn failing_backend_keeps_earlier_rows() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = spec(&[10.0, 20.0, 30.0], 3);
        let hk1 =
            device::anisotropy_from_barrier(&s.barriers[1], 1100.0, s.geometry.volume()).unwrap();
        // Fails only on the deck patched for barrier #1.
        let script = format!(
            "grep -qF 'HK= {}' \"$0\" && exit 1; echo VOUT 0.5 0.4",
            decimal(hk1)
        );
        s.backend = Backend::External(ExternalBackend {
            netlist: NetlistText::from(".param HK= 1\n"),
            command: CommandTemplate::new(vec![
                "sh".into(),
                "-c".into(),
                script,
                "{netlist}".into(),
            ])
            .unwrap(),
            log_path: dir.path().join("run.log"),
            marker: "VOUT".into(),
            timeout: Duration::from_secs(10),
        });
        match run_sweep(&s).unwrap_err() {
            SweepError::Backend {
                index,
                partial,
                source,
                ..
            } => {
                assert_eq!(index, 1);
                assert_eq!(partial.len(), 1);
                assert_eq!(partial[0].eb_kt, 10.0);
                assert_eq!(partial[0].p_high, 0.4);
                assert!(source.is_environment());
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(dir.path().join("run.0.log").exists());
        assert!(dir.path().join("run.1.cir").exists());
    }

    #[test]
    fn results_file_layout() {
        let row = SweepRow {
            eb_kt: 40.0,
            hk_oe: 1065.6,
            vin_v: 0.4,
            p_high: 0.5,
            n_samples: 0,
        };
        let text = results_csv(&[row], "").unwrap();
        assert_eq!(
            text,
            "eb_kt,hk_oe,vin_v,p_high,n_samples\n40,1065.6,0.4,0.5,0\n"
        );
        assert_eq!(text.lines().count(), 2);
        assert!(matches!(results_csv(&[], ""), Err(SweepError::EmptyRows)));
        let stamped = results_csv(&[row], "# pbitsim test\n").unwrap();
        assert_eq!(read_results(&stamped).unwrap(), vec![row]);
        assert!(read_results("x,y\n").is_err());
        assert!(read_results(&format!("{RESULTS_HEADER}\n1,2,3\n")).is_err());
    }
}
