//! Command-line frontend for `qubit-track`.
//!
//! Commands: `solve`, `entropy-curve`, `simulate`, `verify`. Exit codes are
//! 0 on success, 1 when a verification check fails, 2 on usage errors.

pub mod manifest;
pub mod output;
pub mod parse;
pub mod verify;

use std::ffi::OsString;
use std::fs;
use std::io;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use qubit_track::scheme::scheme_for_family;
use qubit_track::trajectory::EnsembleStats;
use qubit_track::{
    entropy_curve, find_schemes, simulate_batch, Family, Policy, PureState, SimConfig, SystemParams,
};

use crate::manifest::{manifest_path_for, RunManifest};
use crate::output::{
    entropy_csv, scheme_table, trajectory_csv, EnsembleJson, SchemeJson, SolveJson,
};
use crate::parse::{parse_policy, PolicySpec};

#[derive(Debug, Parser)]
#[command(
    name = "qubit-track",
    version,
    about = "Quantum-jump tracking of a driven two-level atom"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Where to write the run manifest (default: next to the main output).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List every two-state jumping scheme at one drive strength.
    Solve(SolveArgs),
    /// Tabulate scheme entropies over a range of drive strengths.
    EntropyCurve(CurveArgs),
    /// Simulate monitored trajectories.
    Simulate(SimulateArgs),
    /// Run the invariant self-test at one drive strength.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// JSON listing of the schemes.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub omega_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub omega_max: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Restrict to one family.
    #[arg(long)]
    pub family: Option<String>,
    /// CSV path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitialState {
    Excited,
    Ground,
    Psi1,
    Psi2,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: f64,
    /// `fixed:re,im` or `adaptive:real|imag-large|imag-small`.
    #[arg(long, value_parser = parse_policy)]
    pub policy: PolicySpec,
    #[arg(long, default_value_t = 100.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.1)]
    pub dt_record: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "n-traj", default_value_t = 1)]
    pub n_traj: usize,
    /// Initial state; `excited` for fixed policies, `psi1` for adaptive.
    #[arg(long, value_enum)]
    pub initial: Option<InitialState>,
    /// Trajectory CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Ensemble statistics JSON path (default `<out>.stats.json`).
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: f64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0} verification check(s) failed")]
    Verification(usize),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Core(qubit_track::Error),
}

impl From<qubit_track::Error> for CliError {
    fn from(e: qubit_track::Error) -> Self {
        use qubit_track::Error as E;
        match e {
            E::InvalidParams(_) | E::OmegaZero | E::InvalidConfig(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Files and console text produced by a command, written after it finishes.
struct Emission {
    files: Vec<(PathBuf, Vec<u8>)>,
    stdout: String,
    parameters: serde_json::Map<String, serde_json::Value>,
    seed: Option<u64>,
    failed_checks: usize,
}

impl Emission {
    fn new(parameters: serde_json::Value) -> Self {
        let parameters = match parameters {
            serde_json::Value::Object(map) => map,
            _ => serde_json::Map::new(),
        };
        Self {
            files: Vec::new(),
            stdout: String::new(),
            parameters,
            seed: None,
            failed_checks: 0,
        }
    }
}

fn params(gamma: f64, omega: f64) -> Result<SystemParams, CliError> {
    Ok(SystemParams::new(gamma, omega)?)
}

fn solve(args: &SolveArgs) -> Result<Emission, CliError> {
    let p = params(args.gamma, args.omega)?;
    let schemes = find_schemes(&p)?;
    let mut em = Emission::new(json!({
        "gamma": args.gamma,
        "omega": args.omega,
        "format": format!("{:?}", args.format).to_lowercase(),
    }));
    let listing = SolveJson {
        gamma: args.gamma,
        omega: args.omega,
        schemes: schemes.iter().map(SchemeJson::from).collect(),
    };
    let listing_json = serde_json::to_string_pretty(&listing).expect("plain data") + "\n";
    em.stdout = match args.format {
        Format::Table => scheme_table(&schemes),
        Format::Json => listing_json.clone(),
        Format::Csv => {
            let rows: Vec<_> = schemes
                .iter()
                .map(|s| qubit_track::EntropyRow {
                    omega_over_gamma: p.ratio(),
                    family: s.family(),
                    mu: s.mu.mu,
                    p1: s.p1,
                    p2: s.p2,
                    entropy_bits: s.entropy_bits,
                    pr_residual: s.pr_residual,
                })
                .collect();
            entropy_csv(&rows)
        }
    };
    if let Some(out) = &args.out {
        em.files.push((out.clone(), listing_json.into_bytes()));
    }
    Ok(em)
}

/// `steps` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    let span = hi - lo;
    (0..steps)
        .map(|i| lo + span * i as f64 / (steps - 1) as f64)
        .collect()
}

fn curve(args: &CurveArgs) -> Result<Emission, CliError> {
    let valid = args.omega_min.is_finite()
        && args.omega_max.is_finite()
        && args.omega_min > 0.0
        && args.omega_max > args.omega_min
        && args.steps >= 1;
    if !valid {
        return Err(CliError::Usage(
            "need 0 < omega-min < omega-max and steps >= 1".into(),
        ));
    }
    params(args.gamma, args.omega_min)?;
    let family = match &args.family {
        Some(name) => Some(
            Family::from_name(name)
                .ok_or_else(|| CliError::Usage(format!("unknown family {name:?}")))?,
        ),
        None => None,
    };
    let grid = linspace(args.omega_min, args.omega_max, args.steps);
    let rows = entropy_curve(args.gamma, &grid, family)?;
    let csv = entropy_csv(&rows);
    let mut em = Emission::new(json!({
        "gamma": args.gamma,
        "omega_min": args.omega_min,
        "omega_max": args.omega_max,
        "steps": args.steps,
        "family": args.family,
    }));
    match &args.out {
        Some(out) => em.files.push((out.clone(), csv.into_bytes())),
        None => em.stdout = csv,
    }
    Ok(em)
}

fn simulate(args: &SimulateArgs) -> Result<Emission, CliError> {
    let p = params(args.gamma, args.omega)?;
    let policy = match args.policy {
        PolicySpec::Fixed(mu) => Policy::Fixed(mu),
        PolicySpec::Adaptive(family) => {
            let scheme = scheme_for_family(&p, family)?.ok_or_else(|| {
                CliError::Usage(format!(
                    "no {family} scheme exists at omega/gamma = {}",
                    p.ratio()
                ))
            })?;
            Policy::AdaptiveTwoState(scheme)
        }
    };
    let cfg = SimConfig {
        params: p,
        policy,
        t_max: args.t_max,
        dt_record: args.dt_record,
        seed: args.seed,
        n_trajectories: args.n_traj,
    };
    cfg.validate()?;
    let initial = match (args.initial, &policy) {
        (None, _) => cfg.default_initial(),
        (Some(InitialState::Excited), _) => PureState::excited(),
        (Some(InitialState::Ground), _) => PureState::ground(),
        (Some(InitialState::Psi1), Policy::AdaptiveTwoState(s)) => s.pair.psi1,
        (Some(InitialState::Psi2), Policy::AdaptiveTwoState(s)) => s.pair.psi2,
        (Some(_), Policy::Fixed(_)) => {
            return Err(CliError::Usage(
                "psi1/psi2 initial states need an adaptive policy".into(),
            ))
        }
    };

    let records = simulate_batch(&cfg, &initial)?;
    let stats = EnsembleStats::from_records(&records, &cfg.policy);
    let stats_path = args.stats.clone().unwrap_or_else(|| {
        let mut name = args.out.as_os_str().to_owned();
        name.push(".stats.json");
        PathBuf::from(name)
    });

    let mut em = Emission::new(json!({
        "gamma": args.gamma,
        "omega": args.omega,
        "policy": args.policy.to_string(),
        "t_max": args.t_max,
        "dt_record": args.dt_record,
        "n_traj": args.n_traj,
        "initial": args.initial.map(|i| format!("{i:?}").to_lowercase()),
    }));
    em.seed = Some(args.seed);
    em.files
        .push((args.out.clone(), trajectory_csv(&records).into_bytes()));
    let stats_json = serde_json::to_string_pretty(&EnsembleJson::from(&stats)).expect("plain data");
    em.files
        .push((stats_path, (stats_json + "\n").into_bytes()));
    em.stdout = format!(
        "{} trajectories, mean jumps {:.3}{}\n",
        stats.n_trajectories,
        stats.jump_count_mean,
        match stats.occupancy {
            Some([a, b]) => format!(", occupancy psi1 {a:.4} psi2 {b:.4}"),
            None => String::new(),
        }
    );
    Ok(em)
}

fn verify(args: &VerifyArgs) -> Result<Emission, CliError> {
    let p = params(args.gamma, args.omega)?;
    let checks = verify::run_checks(&p)?;
    let mut em = Emission::new(json!({ "gamma": args.gamma, "omega": args.omega }));
    for c in &checks {
        em.stdout.push_str(&c.line());
        em.stdout.push('\n');
    }
    em.failed_checks = checks.iter().filter(|c| !c.passed).count();
    Ok(em)
}

fn execute(cli: &Cli, argv: Vec<String>, started: Instant) -> Result<(), CliError> {
    let (name, em) = match &cli.command {
        Command::Solve(a) => ("solve", solve(a)?),
        Command::EntropyCurve(a) => ("entropy-curve", curve(a)?),
        Command::Simulate(a) => ("simulate", simulate(a)?),
        Command::Verify(a) => ("verify", verify(a)?),
    };

    for (path, bytes) in &em.files {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, bytes)?;
    }
    print!("{}", em.stdout);

    let manifest_path = cli
        .manifest
        .clone()
        .or_else(|| em.files.first().map(|(p, _)| manifest_path_for(p)));
    if let Some(path) = manifest_path {
        let manifest = RunManifest {
            command: name.to_string(),
            argv,
            parameters: em.parameters,
            seed: em.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: em
                .files
                .iter()
                .map(|(p, _)| p.display().to_string())
                .collect(),
            wall_clock_seconds: started.elapsed().as_secs_f64(),
        };
        fs::write(path, manifest.to_json())?;
    }

    if em.failed_checks > 0 {
        return Err(CliError::Verification(em.failed_checks));
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let started = Instant::now();
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let recorded = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match execute(&cli, recorded, started) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_includes_endpoints() {
        let g = linspace(0.01, 0.25, 100);
        assert_eq!(g.len(), 100);
        assert_eq!(g[0], 0.01);
        assert!((g[99] - 0.25).abs() < 1e-16);
        assert_eq!(linspace(0.3, 0.5, 1), vec![0.3]);
    }

    #[test]
    fn core_errors_map_to_exit_codes() {
        assert_eq!(CliError::from(qubit_track::Error::OmegaZero).exit_code(), 2);
        assert_eq!(
            CliError::from(qubit_track::Error::InvalidParams("x")).exit_code(),
            2
        );
        assert_eq!(CliError::from(qubit_track::Error::ZeroRate).exit_code(), 1);
        assert_eq!(CliError::Verification(1).exit_code(), 1);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
