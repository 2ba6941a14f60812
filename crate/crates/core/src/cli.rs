//! Configuration-driven experiment runner.
//!
//! A run is described by a TOML file; command-line flags override it. Four
//! subcommands share the configuration:
//!
//! * `spectrum`: Schmidt spectrum of the configured kernel (CSV) plus a JSON
//!   summary,
//! * `hom`: output statistics and HOM metrics for two pulses (JSON),
//! * `dip`: coincidence versus delay between the pulses (CSV),
//! * `sweep`: spectrum and efficiency figures versus a kernel parameter (CSV).
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 unphysical kernel,
//! 3 oracle disagreement, 4 partial sweep failure.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::json;

use crate::envelope::{Pulse, TemporalEnvelope};
use crate::error::Error;
use crate::grid::{QuadratureRule, TimeGrid};
use crate::interference::{
    analytic_statistics_with_bound, delay_sweep, fock_oracle_with_bound, hom_metrics,
    oracle_suite, TwoPhotonInput, DEFAULT_TRUNCATION_BOUND, ORACLE_MAX_MODES,
};
use crate::io::{self as kio, fmt_f64};
use crate::kernel::{
    kernel_fast_memory, kernel_gaussian_toy, kernel_ideal, MemoryKernel,
};
use crate::schmidt::{decompose, schmidt_number, SchmidtDecomposition, DEFAULT_CUTOFF};
use crate::units::{DimensionlessParams, UnitsConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_CONFIG: i32 = 1;
pub const EXIT_UNPHYSICAL: i32 = 2;
pub const EXIT_ORACLE: i32 = 3;
pub const EXIT_PARTIAL: i32 = 4;

/// Default agreement required between the closed form and the Fock oracle.
pub const ORACLE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "hom-memory", version, about = "Two-photon interference in a tripod quantum memory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Schmidt spectrum of the configured kernel.
    Spectrum(CommonArgs),
    /// Output photon statistics for the two configured pulses.
    Hom(CommonArgs),
    /// Coincidence probability versus delay between the pulses.
    Dip(CommonArgs),
    /// Spectrum and efficiency versus a kernel parameter.
    Sweep(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Cross-check the statistics against the Fock-space oracle.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridSpec,
    #[serde(default)]
    pub units: Option<UnitsConfig>,
    #[serde(default)]
    pub dimensionless: Option<DimensionlessParams>,
    pub kernel: KernelSpec,
    #[serde(default = "default_cutoff")]
    pub schmidt_cutoff: f64,
    #[serde(default, rename = "envelope")]
    pub envelopes: Vec<EnvelopeSpec>,
    #[serde(default)]
    pub mode_cutoff: Option<usize>,
    #[serde(default = "default_bound")]
    pub truncation_bound: f64,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub oracle: OracleSpec,
}

fn default_cutoff() -> f64 {
    DEFAULT_CUTOFF
}

fn default_bound() -> f64 {
    DEFAULT_TRUNCATION_BOUND
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    #[serde(default)]
    pub rule: QuadratureRule,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelSpec {
    Ideal,
    GaussianToy { sigma: f64, mu1: f64 },
    FastMemory { nz: usize },
    /// Kernel file; its own grid replaces `[grid]`.
    File { path: PathBuf },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnvelopeSpec {
    Gaussian { center: f64, width: f64 },
    Rectangular { start: f64, end: f64 },
    /// One-based Schmidt mode index.
    SchmidtMode { index: usize },
    /// Whitespace-separated samples on the grid nodes: one real value or a
    /// `re im` pair per line.
    SampledFile { path: PathBuf },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    #[serde(default)]
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    /// Additional randomized instances checked with `--oracle`.
    #[serde(default)]
    pub trials: usize,
    #[serde(default = "default_oracle_modes")]
    pub max_modes: usize,
    #[serde(default = "default_oracle_tolerance")]
    pub tolerance: f64,
}

fn default_oracle_modes() -> usize {
    4
}

fn default_oracle_tolerance() -> f64 {
    ORACLE_TOLERANCE
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self { trials: 0, max_modes: default_oracle_modes(), tolerance: ORACLE_TOLERANCE }
    }
}

/// A failed run: exit code and a diagnostic naming what went wrong.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        Self { code: EXIT_INVALID_CONFIG, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Unphysical { .. } | Error::DegenerateKernel(_) | Error::NonSymmetric { .. } => {
                EXIT_UNPHYSICAL
            }
            _ => EXIT_INVALID_CONFIG,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::config(format!("i/o error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Configuration plus the directory relative paths are resolved against.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub config: ExperimentConfig,
    base_dir: PathBuf,
}

impl Experiment {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, base_dir)
    }

    pub fn from_toml(text: &str, base_dir: PathBuf) -> CliResult<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| CliError::config(format!("invalid config: {e}")))?;
        let exp = Self { config, base_dir };
        exp.validate()?;
        Ok(exp)
    }

    fn validate(&self) -> CliResult<()> {
        let c = &self.config;
        if c.units.is_some() == c.dimensionless.is_some() {
            return Err(CliError::config(
                "exactly one of [units] or [dimensionless] must be given",
            ));
        }
        self.params()?;
        for env in &c.envelopes {
            if let EnvelopeSpec::SampledFile { path } = env {
                let p = self.resolve(path);
                if !p.is_file() {
                    return Err(CliError::config(format!("sample file {} not found", p.display())));
                }
            }
        }
        if let KernelSpec::File { path } = &c.kernel {
            let p = self.resolve(path);
            if !p.is_file() {
                return Err(CliError::config(format!("kernel file {} not found", p.display())));
            }
        }
        if !(c.truncation_bound >= 0.0) {
            return Err(CliError::config("truncation_bound must be non-negative"));
        }
        Ok(())
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn params(&self) -> CliResult<DimensionlessParams> {
        match (&self.config.units, &self.config.dimensionless) {
            (Some(u), None) => Ok(u.to_dimensionless()?),
            (None, Some(d)) => Ok(DimensionlessParams::new(d.write_time, d.length)?),
            _ => Err(CliError::config("exactly one of [units] or [dimensionless] must be given")),
        }
    }

    pub fn build_kernel(&self) -> CliResult<MemoryKernel> {
        let params = self.params()?;
        let grid = || -> CliResult<Arc<TimeGrid>> {
            Ok(Arc::new(TimeGrid::new(self.config.grid.n, params.write_time, self.config.grid.rule)?))
        };
        Ok(match &self.config.kernel {
            KernelSpec::Ideal => kernel_ideal(grid()?),
            KernelSpec::GaussianToy { sigma, mu1 } => kernel_gaussian_toy(grid()?, *sigma, *mu1)?,
            KernelSpec::FastMemory { nz } => kernel_fast_memory(grid()?, params.length, *nz)?,
            KernelSpec::File { path } => {
                let file = fs::File::open(self.resolve(path))?;
                kio::read_kernel(BufReader::new(file))?
            }
        })
    }

    pub fn decompose(&self, kernel: &MemoryKernel) -> CliResult<SchmidtDecomposition> {
        Ok(decompose(kernel, self.config.schmidt_cutoff)?)
    }

    pub fn envelope(
        &self,
        spec: &EnvelopeSpec,
        dec: &SchmidtDecomposition,
    ) -> CliResult<TemporalEnvelope> {
        let grid = dec.grid().clone();
        Ok(match spec {
            EnvelopeSpec::Gaussian { center, width } => {
                TemporalEnvelope::from_pulse(grid, &Pulse::Gaussian { center: *center, width: *width })?
            }
            EnvelopeSpec::Rectangular { start, end } => {
                TemporalEnvelope::from_pulse(grid, &Pulse::Rectangular { start: *start, end: *end })?
            }
            EnvelopeSpec::SchmidtMode { index } => {
                if *index == 0 {
                    return Err(CliError::config("Schmidt mode indices start at 1"));
                }
                dec.mode_envelope(index - 1)?
            }
            EnvelopeSpec::SampledFile { path } => {
                let text = fs::read_to_string(self.resolve(path))?;
                TemporalEnvelope::normalized(grid, parse_samples(&text)?)?
            }
        })
    }

    pub fn pulse(&self, spec: &EnvelopeSpec, dec: &SchmidtDecomposition) -> CliResult<Pulse> {
        Ok(match spec {
            EnvelopeSpec::Gaussian { center, width } => Pulse::Gaussian { center: *center, width: *width },
            EnvelopeSpec::Rectangular { start, end } => Pulse::Rectangular { start: *start, end: *end },
            other => Pulse::from_envelope(&self.envelope(other, dec)?),
        })
    }

    fn two_envelopes(
        &self,
        dec: &SchmidtDecomposition,
    ) -> CliResult<(TemporalEnvelope, TemporalEnvelope)> {
        match self.config.envelopes.as_slice() {
            [a, b] => Ok((self.envelope(a, dec)?, self.envelope(b, dec)?)),
            other => Err(CliError::config(format!(
                "two [[envelope]] entries required, found {}",
                other.len()
            ))),
        }
    }

    fn mode_cutoff(&self, dec: &SchmidtDecomposition) -> usize {
        self.config.mode_cutoff.unwrap_or(dec.retained())
    }

    fn with_parameter(&self, name: &str, value: f64) -> CliResult<Experiment> {
        let mut next = self.clone();
        let c = &mut next.config;
        match (name, &mut c.kernel) {
            ("L", _) | ("T_W", _) => {
                let mut p = match (&c.units, &c.dimensionless) {
                    (None, Some(d)) => *d,
                    _ => {
                        return Err(CliError::config(format!(
                            "sweeping {name} needs [dimensionless] parameters"
                        )))
                    }
                };
                if name == "L" {
                    p.length = value;
                } else {
                    p.write_time = value;
                }
                c.dimensionless = Some(p);
            }
            ("sigma", KernelSpec::GaussianToy { sigma, .. }) => *sigma = value,
            ("mu1", KernelSpec::GaussianToy { mu1, .. }) => *mu1 = value,
            (other, _) => {
                return Err(CliError::config(format!(
                    "cannot sweep `{other}` for this kernel (use L, T_W, sigma or mu1)"
                )))
            }
        }
        Ok(next)
    }
}

fn parse_samples(text: &str) -> CliResult<Vec<num_complex::Complex64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|line| {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| {
                s.parse::<f64>().map_err(|e| CliError::config(format!("bad sample `{s}`: {e}")))
            };
            match parts.as_slice() {
                [re] => Ok(num_complex::Complex64::new(num(re)?, 0.0)),
                [re, im] => Ok(num_complex::Complex64::new(num(re)?, num(im)?)),
                _ => Err(CliError::config(format!("bad sample line `{line}`"))),
            }
        })
        .collect()
}

/// Writes to `<path>.partial` and renames on [`commit`](Self::commit), so a
/// failed run never leaves a file that looks complete.
struct Artifact {
    target: Option<PathBuf>,
    buffer: Vec<u8>,
}

impl Artifact {
    fn new(target: Option<PathBuf>) -> Self {
        Self { target, buffer: Vec::new() }
    }

    fn commit(self) -> CliResult<()> {
        match self.target {
            Some(path) => {
                let partial = partial_path(&path);
                fs::write(&partial, &self.buffer)?;
                fs::rename(&partial, &path)?;
            }
            None => io::stdout().write_all(&self.buffer)?,
        }
        Ok(())
    }
}

fn partial_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(OsString::from).unwrap_or_default();
    name.push(".partial");
    path.with_file_name(name)
}

fn write_json(artifact: &mut Artifact, value: &serde_json::Value) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut artifact.buffer, value)
        .map_err(|e| CliError::config(format!("json encoding failed: {e}")))?;
    artifact.buffer.push(b'\n');
    Ok(())
}

fn thread_pool(jobs: Option<usize>) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::config(format!("cannot start worker pool: {e}")))
}

/// Parses arguments and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

type Handler = fn(&Experiment, &CommonArgs) -> CliResult<i32>;

pub fn execute(command: &Command) -> CliResult<i32> {
    let (args, f): (&CommonArgs, Handler) = match command {
        Command::Spectrum(a) => (a, cmd_spectrum),
        Command::Hom(a) => (a, cmd_hom),
        Command::Dip(a) => (a, cmd_dip),
        Command::Sweep(a) => (a, cmd_sweep),
    };
    let mut exp = Experiment::load(&args.config)?;
    if let Some(seed) = args.seed {
        exp.config.seed = seed;
    }
    if let Some(out) = &args.out {
        exp.config.output.path = Some(out.clone());
    }
    f(&exp, args)
}

fn summary_path(path: &Path) -> PathBuf {
    path.with_extension("summary.json")
}

pub fn cmd_spectrum(exp: &Experiment, _args: &CommonArgs) -> CliResult<i32> {
    let params = exp.params()?;
    let kernel = exp.build_kernel()?;
    let dec = exp.decompose(&kernel)?;
    let mut csv = Artifact::new(exp.config.output.path.clone());
    kio::write_spectrum_csv(&dec, &mut csv.buffer)?;

    let lambda = dec.eigenvalues();
    let summary = json!({
        "kernel": kernel.kind().to_string(),
        "n": kernel.len(),
        "T_W": params.write_time,
        "L": params.length,
        "retained": dec.retained(),
        "lambda_1": lambda.first().copied(),
        "lambda_2": lambda.get(1).copied(),
        "schmidt_number": schmidt_number(&dec).ok(),
        "commutator_min_eigenvalue": kernel.commutator_min_eigenvalue(),
        "orthonormality_error": dec.orthonormality_error(),
    });
    match &exp.config.output.path {
        Some(path) => {
            let mut s = Artifact::new(Some(summary_path(path)));
            write_json(&mut s, &summary)?;
            csv.commit()?;
            s.commit()?;
        }
        None => {
            csv.commit()?;
            eprintln!("{summary}");
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_hom(exp: &Experiment, args: &CommonArgs) -> CliResult<i32> {
    let kernel = exp.build_kernel()?;
    let dec = exp.decompose(&kernel)?;
    let (e1, e2) = exp.two_envelopes(&dec)?;
    let k = exp.mode_cutoff(&dec);
    let bound = exp.config.truncation_bound;
    let input = TwoPhotonInput::new(&dec, e1, e2)?;
    let stats = analytic_statistics_with_bound(&input, k, bound)?;
    let metrics = hom_metrics(&stats);
    let mut doc = kio::statistics_json(&stats, &metrics);
    doc["mode_cutoff"] = json!(k);
    doc["kernel"] = json!(kernel.kind().to_string());

    let mut code = EXIT_OK;
    if args.oracle {
        if k > ORACLE_MAX_MODES {
            return Err(CliError::config(format!(
                "--oracle needs mode_cutoff <= {ORACLE_MAX_MODES}, got {k}"
            )));
        }
        let oracle = fock_oracle_with_bound(&input, k, bound)?;
        let direct = stats.max_deviation(&oracle);
        let o = &exp.config.oracle;
        let random = oracle_suite(exp.config.seed, o.trials, o.max_modes)?;
        let worst = direct.max(random);
        doc["oracle"] = json!({
            "max_deviation": worst,
            "direct_deviation": direct,
            "random_trials": o.trials,
            "seed": exp.config.seed,
            "tolerance": o.tolerance,
        });
        if worst > o.tolerance {
            eprintln!("error: oracle deviation {worst:e} exceeds tolerance {:e}", o.tolerance);
            code = EXIT_ORACLE;
        }
    }
    let mut out = Artifact::new(exp.config.output.path.clone());
    write_json(&mut out, &doc)?;
    out.commit()?;
    Ok(code)
}

pub fn cmd_dip(exp: &Experiment, args: &CommonArgs) -> CliResult<i32> {
    let sweep = exp
        .config
        .sweep
        .as_ref()
        .filter(|s| s.parameter == "delay")
        .ok_or_else(|| CliError::config("dip needs a [sweep] with parameter = \"delay\""))?;
    let kernel = exp.build_kernel()?;
    let dec = exp.decompose(&kernel)?;
    let base = exp
        .config
        .envelopes
        .first()
        .ok_or_else(|| CliError::config("dip needs an [[envelope]] for the base pulse"))?;
    let pulse = exp.pulse(base, &dec)?;
    let k = exp.mode_cutoff(&dec);
    let pool = thread_pool(args.jobs)?;
    let points = pool.install(|| {
        delay_sweep(&dec, &pulse, &sweep.values, k, exp.config.truncation_bound)
    })?;
    let mut out = Artifact::new(exp.config.output.path.clone());
    kio::write_dip_csv(&points, &mut out.buffer)?;
    out.commit()?;
    Ok(EXIT_OK)
}

pub const SWEEP_HEADER: &str =
    "value,status,lambda_1,lambda_2,schmidt_number,total_efficiency,noon_fidelity,message";

struct SweepRow {
    lambda_1: f64,
    lambda_2: f64,
    schmidt_number: f64,
    total_efficiency: f64,
    noon_fidelity: Option<f64>,
}

fn sweep_point(exp: &Experiment) -> CliResult<SweepRow> {
    let kernel = exp.build_kernel()?;
    let dec = exp.decompose(&kernel)?;
    let lambda = dec.eigenvalues();
    let specs = if exp.config.envelopes.is_empty() {
        vec![EnvelopeSpec::SchmidtMode { index: 1 }; 2]
    } else {
        exp.config.envelopes.clone()
    };
    let (e1, e2) = match specs.as_slice() {
        [a] => (exp.envelope(a, &dec)?, exp.envelope(a, &dec)?),
        [a, b] => (exp.envelope(a, &dec)?, exp.envelope(b, &dec)?),
        _ => return Err(CliError::config("sweep takes one or two [[envelope]] entries")),
    };
    let input = TwoPhotonInput::new(&dec, e1, e2)?;
    let stats = analytic_statistics_with_bound(&input, exp.mode_cutoff(&dec), exp.config.truncation_bound)?;
    let metrics = hom_metrics(&stats);
    Ok(SweepRow {
        lambda_1: lambda[0],
        lambda_2: lambda.get(1).copied().unwrap_or(0.0),
        schmidt_number: schmidt_number(&dec)?,
        total_efficiency: metrics.total_efficiency,
        noon_fidelity: metrics.noon_fidelity,
    })
}

pub fn cmd_sweep(exp: &Experiment, args: &CommonArgs) -> CliResult<i32> {
    let sweep = exp
        .config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::config("sweep needs a [sweep] section"))?;
    // reject unknown parameters before doing any work
    if let Some(&v) = sweep.values.first() {
        exp.with_parameter(&sweep.parameter, v)?;
    } else {
        exp.with_parameter(&sweep.parameter, 1.0)?;
    }
    let pool = thread_pool(args.jobs)?;
    let rows: Vec<(f64, CliResult<SweepRow>)> = pool.install(|| {
        sweep
            .values
            .par_iter()
            .map(|&v| (v, exp.with_parameter(&sweep.parameter, v).and_then(|e| sweep_point(&e))))
            .collect()
    });

    let mut out = Artifact::new(exp.config.output.path.clone());
    writeln!(out.buffer, "{SWEEP_HEADER}")?;
    let mut failed = 0;
    for (value, row) in rows {
        match row {
            Ok(r) => writeln!(
                out.buffer,
                "{},ok,{},{},{},{},{},",
                fmt_f64(value),
                fmt_f64(r.lambda_1),
                fmt_f64(r.lambda_2),
                fmt_f64(r.schmidt_number),
                fmt_f64(r.total_efficiency),
                r.noon_fidelity.map(fmt_f64).unwrap_or_else(|| "nan".into()),
            )?,
            Err(e) => {
                failed += 1;
                let message = e.message.replace([',', '\n'], ";");
                eprintln!("warning: sweep point {value}: {}", e.message);
                writeln!(out.buffer, "{},error,nan,nan,nan,nan,nan,{message}", fmt_f64(value))?;
            }
        }
    }
    out.commit()?;
    Ok(if failed > 0 { EXIT_PARTIAL } else { EXIT_OK })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
        [grid]
        n = 16
        [dimensionless]
        T_W = 1.0
        L = 1.0
        [kernel]
        kind = "ideal"
    "#;

    #[test]
    fn config_requires_exactly_one_parameter_block() {
        assert!(Experiment::from_toml(BASE, PathBuf::new()).is_ok());
        let none = BASE.replace("[dimensionless]\n        T_W = 1.0\n        L = 1.0", "");
        assert_eq!(Experiment::from_toml(&none, PathBuf::new()).unwrap_err().code, 1);
        let both = format!(
            "{BASE}\n[units]\nrabi_frequency = 1.0\ncoupling_constant = 1.0\nlinear_concentration = 1.0\ncell_length = 1.0\nwrite_time = 1.0\nrelaxation_rate = 0.01\n"
        );
        assert_eq!(Experiment::from_toml(&both, PathBuf::new()).unwrap_err().code, 1);
    }

    #[test]
    fn units_block_is_converted() {
        let text = r#"
            [grid]
            n = 8
            [units]
            rabi_frequency = 2.0
            coupling_constant = 1.0
            linear_concentration = 1.0
            cell_length = 4.0
            write_time = 3.0
            relaxation_rate = 0.01
            [kernel]
            kind = "ideal"
        "#;
        let exp = Experiment::from_toml(text, PathBuf::new()).unwrap();
        let p = exp.params().unwrap();
        assert_eq!((p.write_time, p.length), (6.0, 4.0));
    }

    #[test]
    fn unknown_keys_and_missing_files_are_rejected() {
        let typo = BASE.replace("kind = \"ideal\"", "kind = \"gaussian-toy\"\nsigma = 0.1\nmu1 = 0.5\nsigmaa = 1.0");
        assert!(Experiment::from_toml(&typo, PathBuf::new()).is_err());
        let typo = BASE.replace("n = 16", "n = 16\npoints = 3");
        assert!(Experiment::from_toml(&typo, PathBuf::new()).is_err());
        let missing = format!("{BASE}\n[[envelope]]\nshape = \"sampled-file\"\npath = \"/no/such/file\"\n");
        assert_eq!(Experiment::from_toml(&missing, PathBuf::new()).unwrap_err().code, 1);
    }

    #[test]
    fn sample_files_parse_real_and_complex_lines() {
        let s = parse_samples("# header\n1.0\n0.5 -0.5\n\n2\n").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s[1], num_complex::Complex64::new(0.5, -0.5));
        assert!(parse_samples("1 2 3").is_err());
    }

    #[test]
    fn sweep_parameters_are_checked() {
        let exp = Experiment::from_toml(BASE, PathBuf::new()).unwrap();
        assert!(exp.with_parameter("L", 2.0).is_ok());
        assert!(exp.with_parameter("sigma", 2.0).is_err());
        assert!(exp.with_parameter("nz", 2.0).is_err());
    }

    #[test]
    fn library_errors_map_to_exit_codes() {
        let e: CliError = Error::Unphysical { invariant: "x".into(), value: 2.0 }.into();
        assert_eq!(e.code, EXIT_UNPHYSICAL);
        let e: CliError = Error::InsufficientModes { weight: 0.1, bound: 1e-6 }.into();
        assert_eq!(e.code, EXIT_INVALID_CONFIG);
        assert!(e.message.contains("1.000e-1"));
    }

    #[test]
    fn partial_suffix() {
        assert_eq!(partial_path(Path::new("/tmp/a.csv")), PathBuf::from("/tmp/a.csv.partial"));
    }
}
