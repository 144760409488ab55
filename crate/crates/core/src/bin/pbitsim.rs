// SPDX-License-Identifier: Apache-2.0
//! `pbitsim` command line.
//!
//! Exit codes: 0 success, 1 data or model error, 2 usage error,
//! 3 environment or simulator error (missing files, failed writes,
//! external simulator failures).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use pbitsim::analyzer::{self, AnalysisReport};
use pbitsim::device::{
    self, DeviceGeometry, EnergyBarrier, MagnetParams, PbitElectrical, DEFAULT_ATTEMPT_RATE_HZ,
    DEFAULT_TEMPERATURE_K,
};
use pbitsim::io::{stamp_line, write_atomic, TOOL_NAME, TOOL_VERSION};
use pbitsim::rbm::{self, PirConfig, RbmError, RbmModel, TrainConfig};
use pbitsim::spice::{CommandTemplate, NetlistText, EXACT};
use pbitsim::sweep::{self, Backend, ExternalBackend, SweepError, SweepSpec};

#[derive(Parser)]
#[command(
    name = "pbitsim",
    version,
    about = "p-bit process-variation and RBM accuracy toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Activation curve p_high(v_in) for one or more energy barriers.
    Sigmoid(SigmoidArgs),
    /// Barrier sweep from a barrier-list file, internal or external backend.
    Sweep(SweepArgs),
    /// Samples barrier variation from device-dimension spread into a barrier list.
    Variation(VariationArgs),
    /// Writes a synthetic labeled 8×8 pattern dataset.
    GenToy(GenToyArgs),
    /// Trains an RBM with CD-1.
    Train(TrainArgs),
    /// Runs p-bit inference and writes a PIR output file.
    Infer(InferArgs),
    /// Judges a PIR output file against dataset labels.
    Analyze(AnalyzeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendKind {
    Internal,
    External,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("expected a non-negative number, got {s:?}")),
    }
}

fn finite(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("expected a finite number, got {s:?}")),
    }
}

#[derive(Args)]
struct DeviceArgs {
    /// Temperature in K.
    #[arg(long, default_value_t = DEFAULT_TEMPERATURE_K, value_parser = positive)]
    temperature: f64,
    /// Saturation magnetization in emu/cm³.
    #[arg(long, default_value_t = 1100.0, value_parser = positive)]
    ms: f64,
    /// Free-layer major axis in nm.
    #[arg(long, default_value_t = 60.0, value_parser = positive)]
    major_nm: f64,
    /// Free-layer minor axis in nm.
    #[arg(long, default_value_t = 60.0, value_parser = positive)]
    minor_nm: f64,
    /// Free-layer thickness in nm.
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    thickness_nm: f64,
    /// Attempt rate in 1/s.
    #[arg(long, default_value_t = DEFAULT_ATTEMPT_RATE_HZ, value_parser = positive)]
    attempt_rate: f64,
}

#[derive(Args)]
struct RailArgs {
    #[arg(long, default_value_t = 1.0, value_parser = finite)]
    v_dd: f64,
    #[arg(long, default_value_t = 0.5, value_parser = finite)]
    v_th: f64,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 0.5, value_parser = finite)]
    vin_start: f64,
    #[arg(long, default_value_t = 1.0, value_parser = finite)]
    vin_stop: f64,
    #[arg(long, default_value_t = 11)]
    vin_steps: usize,
}

#[derive(Args)]
struct SigmoidArgs {
    /// Energy barrier(s) in kT.
    #[arg(long, required = true, num_args = 1.., allow_negative_numbers = true, value_parser = positive)]
    eb: Vec<f64>,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    /// Telegraph steps per grid point in sampled mode.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    rails: RailArgs,
    #[command(flatten)]
    device: DeviceArgs,
    /// Results CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Barrier-list file, one kT multiple per line.
    #[arg(long)]
    barriers: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    /// Telegraph steps per grid point; 0 evaluates the closed form.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "internal")]
    backend: BackendKind,
    /// Netlist template containing `HK= ` fields (external backend).
    #[arg(long)]
    netlist: Option<PathBuf>,
    /// Simulator command with one `{netlist}` placeholder (external backend).
    #[arg(long)]
    spice_cmd: Option<String>,
    /// First token of simulator output lines carrying `v_in v_out`.
    #[arg(long, default_value = "VOUT")]
    marker: String,
    /// Simulator log path; per-barrier logs and decks go beside it.
    #[arg(long)]
    log: Option<PathBuf>,
    /// Per-barrier simulator timeout in seconds.
    #[arg(long, default_value_t = 600.0, value_parser = positive)]
    timeout: f64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    rails: RailArgs,
    #[command(flatten)]
    device: DeviceArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VariationArgs {
    #[arg(long)]
    n: usize,
    /// Relative standard deviation of each dimension, in [0, 0.3).
    #[arg(long, value_parser = non_negative)]
    sigma_rel: f64,
    /// Nominal anisotropy field in Oe.
    #[arg(long, default_value_t = 400.0, value_parser = positive)]
    hk: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    device: DeviceArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenToyArgs {
    #[arg(long, default_value_t = 300)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    classes: usize,
    /// Pixel flip probability.
    #[arg(long, default_value_t = 0.05, value_parser = non_negative)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Number of classes; labels must lie in 0..labels.
    #[arg(long, default_value_t = 3)]
    labels: usize,
    #[arg(long, default_value_t = TrainConfig::default().hidden)]
    hidden: usize,
    #[arg(long, default_value_t = TrainConfig::default().epochs)]
    epochs: usize,
    #[arg(long, default_value_t = TrainConfig::default().learning_rate, value_parser = positive)]
    learning_rate: f64,
    #[arg(long, default_value_t = TrainConfig::default().batch_size)]
    batch_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    dataset: PathBuf,
    /// Barrier the crossbar drive is calibrated for, in kT.
    #[arg(long, default_value_t = 40.0, value_parser = positive)]
    design_kt: f64,
    /// Barrier of the p-bits actually used, in kT; defaults to the design value.
    #[arg(long, value_parser = positive)]
    kt: Option<f64>,
    #[arg(long, default_value_t = 4)]
    bits: u32,
    #[arg(long, default_value_t = 256)]
    reads: usize,
    #[arg(long, default_value_t = 1e-6, value_parser = positive)]
    g_min: f64,
    #[arg(long, default_value_t = 1e-4, value_parser = positive)]
    g_max: f64,
    #[arg(long, default_value_t = DEFAULT_TEMPERATURE_K, value_parser = positive)]
    temperature: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    pir: PathBuf,
    #[arg(long)]
    bits: u32,
    /// `<bits> <fJ>` lines; the built-in table when absent.
    #[arg(long)]
    energy_table: Option<PathBuf>,
    #[arg(long)]
    report: PathBuf,
}

enum Failure {
    Data(String),
    Usage(String),
    Env(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Data(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Env(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Data(m) | Failure::Usage(m) | Failure::Env(m) => m,
        }
    }
}

impl From<RbmError> for Failure {
    fn from(e: RbmError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<analyzer::AnalyzerError> for Failure {
    fn from(e: analyzer::AnalyzerError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<device::DeviceError> for Failure {
    fn from(e: device::DeviceError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        match &e {
            SweepError::Io { .. } => Failure::Env(e.to_string()),
            SweepError::Backend {
                source, partial, ..
            } => {
                let msg = format!(
                    "{e} ({} rows from earlier barriers discarded)",
                    partial.len()
                );
                if source.is_environment() {
                    Failure::Env(msg)
                } else {
                    Failure::Data(msg)
                }
            }
            _ => Failure::Data(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Env(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    write_atomic(path, text.as_bytes())
        .map_err(|e| Failure::Env(format!("{}: {e}", path.display())))
}

fn geometry(d: &DeviceArgs) -> Result<DeviceGeometry, Failure> {
    const NM: f64 = 1e-7;
    Ok(DeviceGeometry::new(
        d.major_nm * NM,
        d.minor_nm * NM,
        d.thickness_nm * NM,
    )?)
}

fn magnet(d: &DeviceArgs, h_k: f64) -> Result<MagnetParams, Failure> {
    Ok(MagnetParams::new(h_k, d.ms, d.temperature, d.attempt_rate)?)
}

fn rails(r: &RailArgs) -> Result<PbitElectrical, Failure> {
    PbitElectrical::new(r.v_dd, r.v_th).map_err(|e| Failure::Usage(e.to_string()))
}

fn grid(g: &GridArgs) -> Result<Vec<f64>, Failure> {
    if g.vin_steps == 0 || (g.vin_steps > 1 && g.vin_start >= g.vin_stop) {
        return Err(Failure::Usage(
            "voltage grid needs --vin-steps ≥ 1 and --vin-start < --vin-stop".into(),
        ));
    }
    Ok(sweep::linear_grid(g.vin_start, g.vin_stop, g.vin_steps))
}

fn cmd_sigmoid(a: SigmoidArgs) -> Outcome {
    let barriers =
        a.eb.iter()
            .map(|&kt| EnergyBarrier::from_kt(kt, a.device.temperature))
            .collect::<Result<Vec<_>, _>>()?;
    if matches!(a.mode, Mode::Sampled) && a.samples == 0 {
        return Err(Failure::Usage("--mode sampled needs --samples ≥ 1".into()));
    }
    let spec = SweepSpec {
        barriers,
        magnet: magnet(&a.device, MagnetParams::nominal().h_k)?,
        geometry: geometry(&a.device)?,
        elec: rails(&a.rails)?,
        backend: Backend::Internal,
        v_grid: grid(&a.grid)?,
        samples_per_point: match a.mode {
            Mode::Exact => EXACT,
            Mode::Sampled => a.samples,
        },
        seed: a.seed,
    };
    let rows = sweep::run_sweep(&spec)?;
    let text = sweep::results_csv(&rows, &stamp_line("sigmoid", Some(a.seed)))?;
    match &a.out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_sweep(a: SweepArgs) -> Outcome {
    let barriers = sweep::parse_barrier_list(&read_text(&a.barriers)?, a.device.temperature)?;
    let backend = match a.backend {
        BackendKind::Internal => {
            if a.netlist.is_some() || a.spice_cmd.is_some() {
                return Err(Failure::Usage(
                    "--netlist and --spice-cmd need --backend external".into(),
                ));
            }
            Backend::Internal
        }
        BackendKind::External => {
            let (Some(netlist), Some(cmd), Some(log)) = (&a.netlist, &a.spice_cmd, &a.log) else {
                return Err(Failure::Usage(
                    "--backend external needs --netlist, --spice-cmd and --log".into(),
                ));
            };
            let command = CommandTemplate::parse(cmd).map_err(|e| Failure::Usage(e.to_string()))?;
            let netlist = std::fs::read(netlist)
                .map_err(|e| Failure::Env(format!("{}: {e}", netlist.display())))?;
            Backend::External(ExternalBackend {
                netlist: NetlistText::new(netlist),
                command,
                log_path: log.clone(),
                marker: a.marker.clone(),
                timeout: Duration::from_secs_f64(a.timeout),
            })
        }
    };
    let spec = SweepSpec {
        barriers,
        magnet: magnet(&a.device, MagnetParams::nominal().h_k)?,
        geometry: geometry(&a.device)?,
        elec: rails(&a.rails)?,
        backend,
        v_grid: grid(&a.grid)?,
        samples_per_point: a.samples,
        seed: a.seed,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| Failure::Env(e.to_string()))?;
    let rows = pool.install(|| sweep::run_sweep(&spec))?;
    sweep::write_results(&rows, &a.out, &stamp_line("sweep", Some(a.seed)))?;
    eprintln!("{} rows written to {}", rows.len(), a.out.display());
    Ok(())
}

fn cmd_variation(a: VariationArgs) -> Outcome {
    let nominal = geometry(&a.device)?;
    let magnet = magnet(&a.device, a.hk)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let barriers = device::sample_barriers(&nominal, &magnet, a.sigma_rel, a.n, &mut rng)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let text = stamp_line("variation", Some(a.seed)) + &sweep::format_barrier_list(&barriers);
    write_file(&a.out, &text)
}

fn cmd_gen_toy(a: GenToyArgs) -> Outcome {
    let images = rbm::generate_patterns(a.n, a.classes, a.noise, a.seed)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    write_file(
        &a.out,
        &(stamp_line("gen-toy", Some(a.seed)) + &rbm::format_dataset(&images)),
    )
}

fn cmd_train(a: TrainArgs) -> Outcome {
    let data = rbm::parse_dataset(&read_text(&a.dataset)?)?;
    let cfg = TrainConfig {
        hidden: a.hidden,
        n_labels: a.labels,
        epochs: a.epochs,
        learning_rate: a.learning_rate,
        batch_size: a.batch_size,
        seed: a.seed,
    };
    let t = rbm::train_cd1(&data, &cfg)?;
    if let Some(err) = t.reconstruction_error.last() {
        eprintln!("final reconstruction error {err:.5}");
    }
    write_file(
        &a.out,
        &(stamp_line("train", Some(a.seed)) + &t.model.to_text()),
    )
}

fn cmd_infer(a: InferArgs) -> Outcome {
    let model = RbmModel::from_text(&read_text(&a.model)?)?;
    let data = rbm::parse_dataset(&read_text(&a.dataset)?)?;
    let design = EnergyBarrier::from_kt(a.design_kt, a.temperature)?;
    let actual = EnergyBarrier::from_kt(a.kt.unwrap_or(a.design_kt), a.temperature)?;
    let pir = PirConfig::new(a.bits, a.reads, PirConfig::default_energy_table())
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let crossbar = rbm::map_weights(&model, a.g_min, a.g_max)
        .map_err(|e| Failure::Usage(e.to_string()))?
        .calibrated_for(&design)?;
    let images: Vec<Vec<u8>> = data.iter().map(|d| d.binary()).collect();
    let cases = rbm::infer_batch(&crossbar, &actual, &images, &pir, a.seed)?;
    let text = stamp_line("infer", Some(a.seed)) + &analyzer::format_pir_output(&cases);
    write_file(&a.out, &text)
}

#[derive(Serialize)]
struct StampedReport<'a> {
    generator: String,
    bits: u32,
    #[serde(flatten)]
    report: &'a AnalysisReport,
}

fn cmd_analyze(a: AnalyzeArgs) -> Outcome {
    let labels = analyzer::read_dataset_labels(&read_text(&a.dataset)?)?;
    let cases = analyzer::parse_pir_output(&read_text(&a.pir)?)?;
    let table = match &a.energy_table {
        Some(path) => analyzer::parse_energy_table(&read_text(path)?)?,
        None => PirConfig::default_energy_table(),
    };
    let config = PirConfig::new(a.bits, 1, table).map_err(|e| Failure::Usage(e.to_string()))?;
    let report = analyzer::analyze(&labels, &cases, &config)?;
    let stamped = StampedReport {
        generator: format!("{TOOL_NAME} {TOOL_VERSION} analyze"),
        bits: a.bits,
        report: &report,
    };
    let mut json =
        serde_json::to_string_pretty(&stamped).map_err(|e| Failure::Data(e.to_string()))?;
    json.push('\n');
    write_file(&a.report, &json)?;
    eprintln!(
        "{} cases, {} pass, {} fail, error rate {}%, energy {} fJ",
        report.n_cases,
        report.n_pass,
        report.n_fail,
        report.error_rate_percent,
        report.energy_total_fj
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sigmoid(a) => cmd_sigmoid(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Variation(a) => cmd_variation(a),
        Command::GenToy(a) => cmd_gen_toy(a),
        Command::Train(a) => cmd_train(a),
        Command::Infer(a) => cmd_infer(a),
        Command::Analyze(a) => cmd_analyze(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{TOOL_NAME}: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
