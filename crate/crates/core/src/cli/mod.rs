//! Command-line front end: each subcommand reads a TOML scenario and writes
//! CSV tables plus `manifest.json` into the output directory.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 unreadable or malformed
//! configuration, 3 invalid parameters, 4 caustic, 5 insufficient resolution.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde_json::json;

use crate::chains::{build_z, decompose};
use crate::error::Error;
use crate::ladder::{
    end_to_end_map, first_maxima, forced_response, scaled_times, transition_map, TransitionMap,
};
use crate::propagator::{evolve_wavefunction, kernel_eval, propagator, EvolveOptions, GridState, ModeDrive};

use config::{ChainEigsConfig, EvolveStateConfig, ForcedChainConfig, LayoutConfig, MapConfig, PropagateConfig};
use output::{fmt_f64, Csv, Manifest, Outputs};

#[derive(Debug, Parser)]
#[command(name = "quadprop", version, about = "Propagators of quadratic Hamiltonians and harmonic chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Directory receiving the CSV files and manifest.json.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kernel K(q, t | q′, 0) along a line: kernel.csv, kernel_params.json.
    Propagate(RunArgs),
    /// Normal modes of a harmonic chain: chain_eigs.csv.
    ChainEigs(RunArgs),
    /// Transition probabilities P(row, τ): excitation_map.csv.
    ExcitationMap(RunArgs),
    /// First maxima τ*(row) and their line fit: first_maxima.csv, first_maxima_fit.csv.
    FirstMaxima(RunArgs),
    /// Gaussian state evolved on a normal-mode grid: state_NNN.csv, evolve_state.csv.
    EvolveState(RunArgs),
    /// Occupations of a chain driven on site 1: forced_chain.csv.
    ForcedChain(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Propagate(_) => "propagate",
            Command::ChainEigs(_) => "chain-eigs",
            Command::ExcitationMap(_) => "excitation-map",
            Command::FirstMaxima(_) => "first-maxima",
            Command::EvolveState(_) => "evolve-state",
            Command::ForcedChain(_) => "forced-chain",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Propagate(a)
            | Command::ChainEigs(a)
            | Command::ExcitationMap(a)
            | Command::FirstMaxima(a)
            | Command::EvolveState(a)
            | Command::ForcedChain(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Other,
    Parse,
    Validation,
    Caustic,
    Resolution,
}

impl ExitKind {
    pub fn code(self) -> i32 {
        match self {
            ExitKind::Other => 1,
            ExitKind::Parse => 2,
            ExitKind::Validation => 3,
            ExitKind::Caustic => 4,
            ExitKind::Resolution => 5,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::Caustic { .. } => ExitKind::Caustic,
            Error::Resolution(_) | Error::Truncation { .. } => ExitKind::Resolution,
            Error::SingularFundamental { .. } => ExitKind::Other,
            Error::Dimension { .. }
            | Error::InvalidInput(_)
            | Error::OutOfRange { .. }
            | Error::NotSymmetric { .. }
            | Error::NoMaximum { .. } => ExitKind::Validation,
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            kind: ExitKind::Other,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn parse<T: DeserializeOwned>(text: &str, path: &Path) -> CliResult<T> {
    toml::from_str(text).map_err(|e| CliError {
        kind: ExitKind::Parse,
        message: format!("{}: {e}", path.display()),
    })
}

/// Runs one subcommand and returns the manifest it wrote.
pub fn run(cli: &Cli) -> CliResult<Manifest> {
    let args = cli.command.args();
    let bytes = std::fs::read(&args.config).map_err(|e| CliError {
        kind: ExitKind::Other,
        message: format!("cannot read {}: {e}", args.config.display()),
    })?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError {
        kind: ExitKind::Parse,
        message: format!("{}: {e}", args.config.display()),
    })?;
    let path = args.config.as_path();
    let work = || -> CliResult<Outputs> {
        match &cli.command {
            Command::Propagate(_) => run_propagate(&parse(&text, path)?),
            Command::ChainEigs(_) => run_chain_eigs(&parse(&text, path)?),
            Command::ExcitationMap(_) => run_excitation_map(&parse(&text, path)?),
            Command::FirstMaxima(_) => run_first_maxima(&parse(&text, path)?),
            Command::EvolveState(_) => run_evolve_state(&parse(&text, path)?),
            Command::ForcedChain(_) => run_forced_chain(&parse(&text, path)?),
        }
    };
    let outputs = match args.threads {
        Some(0) => {
            return Err(CliError {
                kind: ExitKind::Validation,
                message: "--threads must be at least 1".into(),
            })
        }
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError {
                kind: ExitKind::Other,
                message: e.to_string(),
            })?
            .install(work)?,
        None => work()?,
    };
    Ok(outputs.write(&args.out, cli.command.name(), &bytes)?)
}

/// Parses `args` (program name first), runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitKind::Parse.code() } else { 0 };
        }
    };
    match run(&cli) {
        Ok(manifest) => {
            log::info!(
                "{}: wrote {} to {}",
                manifest.scenario,
                manifest.outputs.join(", "),
                cli.command.args().out.display()
            );
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.kind.code()
        }
    }
}

fn matrix_json(m: &DMatrix<f64>) -> serde_json::Value {
    json!((0..m.nrows()).map(|i| m.row(i).iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn vector_json(v: &DVector<f64>) -> serde_json::Value {
    json!(v.iter().copied().collect::<Vec<_>>())
}

fn run_propagate(cfg: &PropagateConfig) -> CliResult<Outputs> {
    cfg.validate()?;
    let h = cfg.hamiltonian.build()?;
    let params = propagator(&h, cfg.t, cfg.step)?;
    let dir = cfg.direction();
    let qs = cfg.q.points();
    let qps = cfg.q_prime.unwrap_or(cfg.q).points();
    let rows: Vec<Vec<Complex64>> = qs
        .par_iter()
        .map(|&s| {
            qps.iter()
                .map(|&sp| kernel_eval(&params, &(&dir * s), &(&dir * sp)))
                .collect::<crate::Result<Vec<_>>>()
        })
        .collect::<crate::Result<_>>()?;
    let mut csv = Csv::new(&["q", "q_prime", "re", "im"]);
    for (s, row) in qs.iter().zip(&rows) {
        for (sp, k) in qps.iter().zip(row) {
            csv.push([fmt_f64(*s), fmt_f64(*sp), fmt_f64(k.re), fmt_f64(k.im)]);
        }
    }
    let summary = json!({
        "t": params.t,
        "n": params.n,
        "hbar": params.hbar,
        "direction": vector_json(&dir),
        "theta": params.theta_phase,
        "log_amp": params.log_amp,
        "DBinv": matrix_json(&params.dbinv),
        "BinvA": matrix_json(&params.binva),
        "Binv": matrix_json(&params.binv),
        "zeta": vector_json(&params.zeta),
        "eta": vector_json(&params.eta),
        "Binv_eta": vector_json(&params.binv_eta),
    });
    let mut out = Outputs::default();
    out.add("kernel.csv", csv.as_str());
    out.add(
        "kernel_params.json",
        serde_json::to_string_pretty(&summary).expect("finite JSON") + "\n",
    );
    Ok(out)
}

fn run_chain_eigs(cfg: &ChainEigsConfig) -> CliResult<Outputs> {
    let spec = cfg.chain.build()?;
    let modes = decompose(&build_z(&spec)?, spec.m)?;
    let n = modes.n();
    let mut header = vec!["k".to_string(), "z_k".into(), "omega_k".into()];
    header.extend((1..=n).map(|j| format!("v_k{j}")));
    let mut csv = Csv::new(&header);
    for k in 0..n {
        let mut row = vec![(k + 1).to_string(), fmt_f64(modes.z[k]), fmt_f64(modes.omega[k])];
        row.extend(modes.v.column(k).iter().map(|x| fmt_f64(*x)));
        csv.push(row);
    }
    let mut out = Outputs::default();
    out.add("chain_eigs.csv", csv.as_str());
    Ok(out)
}

fn build_map(cfg: &MapConfig) -> CliResult<TransitionMap> {
    let taus = scaled_times(cfg.tau_max, cfg.dtau)?;
    let rows = cfg.rows()?;
    let map = match cfg.layout {
        LayoutConfig::Sites => transition_map(&cfg.chain.build()?, &rows, &taus)?,
        LayoutConfig::EndToEnd => end_to_end_map(cfg.chain.omega0, cfg.chain.g, &rows, &taus)?,
    };
    Ok(map)
}

fn run_excitation_map(cfg: &MapConfig) -> CliResult<Outputs> {
    let map = build_map(cfg)?;
    let mut csv = Csv::new(&["tau", "site", "P"]);
    for (c, tau) in map.taus.iter().enumerate() {
        for (r, row) in map.rows.iter().enumerate() {
            csv.push([fmt_f64(*tau), row.to_string(), fmt_f64(map.p[(r, c)])]);
        }
    }
    let mut out = Outputs::default();
    out.add("excitation_map.csv", csv.as_str());
    Ok(out)
}

fn run_first_maxima(cfg: &MapConfig) -> CliResult<Outputs> {
    let maxima = first_maxima(&build_map(cfg)?)?;
    let mut points = Csv::new(&["site", "tau_star"]);
    for (row, tau) in &maxima.points {
        points.push([row.to_string(), fmt_f64(*tau)]);
    }
    let mut fit = Csv::new(&["slope", "intercept", "r2"]);
    if let Some(f) = maxima.fit {
        fit.push([fmt_f64(f.slope), fmt_f64(f.intercept), fmt_f64(f.r2)]);
    }
    let mut out = Outputs::default();
    out.add("first_maxima.csv", points.as_str());
    out.add("first_maxima_fit.csv", fit.as_str());
    Ok(out)
}

fn run_evolve_state(cfg: &EvolveStateConfig) -> CliResult<Outputs> {
    cfg.validate()?;
    let spec = cfg.chain.build()?;
    let h = spec.hamiltonian(cfg.hbar)?;
    let modes = decompose(&build_z(&spec)?, spec.m)?;
    let n = modes.n();
    let mut factors = Vec::with_capacity(n);
    for (k, g) in cfg.initial.iter().enumerate() {
        let width = match g.width {
            Some(w) => w,
            None if modes.omega[k] > 0.0 => (cfg.hbar / (spec.m * modes.omega[k])).sqrt(),
            None => {
                return Err(Error::InvalidInput(format!(
                    "mode {} has zero frequency; give its width explicitly",
                    k + 1
                ))
                .into())
            }
        };
        factors.push((g.center, width, g.momentum));
    }
    let hbar = cfg.hbar;
    let psi0 = GridState::from_fn(cfg.axes(), |x| {
        factors
            .iter()
            .zip(x)
            .map(|(&(c, w, p), &xk)| {
                let norm = (std::f64::consts::PI * w * w).powf(-0.25);
                Complex64::new(-(xk - c).powi(2) / (2.0 * w * w), p * xk / hbar).exp() * norm
            })
            .product()
    })?;
    let opts = EvolveOptions {
        hbar,
        norm_tolerance: cfg.norm_tolerance.unwrap_or(EvolveOptions::default().norm_tolerance),
    };

    let mut out = Outputs::default();
    let mut header = vec!["t".to_string(), "norm".into()];
    header.extend((1..=n).map(|k| format!("mean_{k}")));
    let mut summary = Csv::new(&header);
    let mut state_header: Vec<String> = (0..n).map(|k| format!("i{k}")).collect();
    state_header.extend(["re".into(), "im".into()]);
    for (idx, &t) in cfg.times.iter().enumerate() {
        let drive = if h.has_sources() {
            ModeDrive::from_hamiltonian(&h, &modes, t, cfg.step)?
        } else {
            ModeDrive::none(n)
        };
        let psi = evolve_wavefunction(&modes, &drive, &psi0, t, &opts)?;
        let mut row = vec![fmt_f64(t), fmt_f64(psi.norm())];
        row.extend((0..n).map(|k| fmt_f64(psi.mean(k))));
        summary.push(row);
        let mut csv = Csv::new(&state_header);
        for (flat, v) in psi.values().iter().enumerate() {
            let mut cells: Vec<String> = psi.multi_index(flat).iter().map(|i| i.to_string()).collect();
            cells.push(fmt_f64(v.re));
            cells.push(fmt_f64(v.im));
            csv.push(cells);
        }
        out.add(format!("state_{idx:03}.csv"), csv.as_str());
    }
    out.add("evolve_state.csv", summary.as_str());
    Ok(out)
}

fn run_forced_chain(cfg: &ForcedChainConfig) -> CliResult<Outputs> {
    cfg.validate()?;
    let chain = cfg.chain.build()?.with_drive(cfg.drive.to_scalar("drive")?);
    let times = scaled_times(cfg.t_max, cfg.dt)?;
    let responses = times
        .par_iter()
        .map(|&t| forced_response(&chain, t, cfg.step))
        .collect::<crate::Result<Vec<_>>>()?;
    let mut csv = Csv::new(&["t", "site", "occupation"]);
    for r in &responses {
        for (i, occ) in r.occupations.iter().enumerate() {
            csv.push([fmt_f64(r.t), (i + 1).to_string(), fmt_f64(*occ)]);
        }
    }
    let mut out = Outputs::default();
    out.add("forced_chain.csv", csv.as_str());
    Ok(out)
}
