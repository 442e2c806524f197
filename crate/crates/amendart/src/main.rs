use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use amendart::sweeps::{
    convergence, damping_map, distribution_report, sweep_gamma, sweep_omega, trajectories, ConvergenceRun, DampingMap,
    DistributionReport, GammaSweep, OmegaSweep, TrajectoryRun,
};
use amendart::{RawConfig, Result, Table};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "amendart",
    version,
    about = "Steady-state excitations of the dissipative Rabi model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// ⟨n⟩, ⟨E⟩ and I_af against the atomic frequency.
    SweepOmega(Options),
    /// ⟨n⟩, ⟨E⟩ and I_af against the dephasing rate.
    SweepGamma(Options),
    /// log10(⟨n⟩+⟨E⟩) on a log grid of cavity and atom damping rates.
    DampingMap(Options),
    /// Photon distribution against a thermal one of the same mean.
    Distribution(Options),
    /// Quantum-jump ensemble averages next to the master equation.
    Trajectories(Options),
    /// Steady-state observables as the Fock cutoff grows.
    Convergence(Options),
}

/// Every option can also be set as `key = value` in the config file; flags win.
#[derive(Args, Default)]
struct Options {
    /// Config file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path (stdout if absent).
    #[arg(long)]
    out: Option<String>,
    /// bare, a, b, c or d.
    #[arg(long)]
    scenario: Option<String>,
    /// full or rwa.
    #[arg(long)]
    coupling: Option<String>,
    /// Fock cutoff, or a comma-separated list for sweeps.
    #[arg(long)]
    cutoff: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    omega: Option<String>,
    #[arg(long)]
    g: Option<String>,
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    /// Dephasing rate; overrides --gamma-ratio.
    #[arg(long)]
    gamma_rate: Option<String>,
    /// Dephasing rate as a multiple of lambda.
    #[arg(long)]
    gamma_ratio: Option<String>,
    /// Thermal occupation of all reservoirs (experimental).
    #[arg(long)]
    nbar: Option<String>,
    /// `start:stop:count` or a comma-separated list.
    #[arg(long)]
    omega_grid: Option<String>,
    #[arg(long)]
    gamma_grid: Option<String>,
    #[arg(long)]
    log10_kappa: Option<String>,
    #[arg(long)]
    log10_lambda: Option<String>,
    #[arg(long)]
    omega_list: Option<String>,
    #[arg(long)]
    kappa_list: Option<String>,
    #[arg(long)]
    n_traj: Option<String>,
    #[arg(long)]
    t_max: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    /// ground, photon or excited.
    #[arg(long)]
    initial: Option<String>,
}

impl Options {
    fn resolve(&self) -> Result<RawConfig> {
        let file = match &self.config {
            Some(p) => RawConfig::from_file(p)?,
            None => RawConfig::default(),
        };
        let mut flags = RawConfig::default();
        let pairs = [
            ("out", &self.out),
            ("scenario", &self.scenario),
            ("coupling", &self.coupling),
            ("cutoff", &self.cutoff),
            ("seed", &self.seed),
            ("omega", &self.omega),
            ("g", &self.g),
            ("kappa", &self.kappa),
            ("lambda", &self.lambda),
            ("gamma-rate", &self.gamma_rate),
            ("gamma-ratio", &self.gamma_ratio),
            ("nbar", &self.nbar),
            ("omega-grid", &self.omega_grid),
            ("gamma-grid", &self.gamma_grid),
            ("log10-kappa", &self.log10_kappa),
            ("log10-lambda", &self.log10_lambda),
            ("omega-list", &self.omega_list),
            ("kappa-list", &self.kappa_list),
            ("n-traj", &self.n_traj),
            ("t-max", &self.t_max),
            ("dt", &self.dt),
            ("initial", &self.initial),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                flags.set(key, v.as_str())?;
            }
        }
        Ok(file.merged(&flags))
    }
}

fn emit(table: &Table, out: Option<&str>) -> Result<()> {
    match out {
        Some(path) => table.write_csv(BufWriter::new(File::create(path)?)),
        None => table.write_csv(io::stdout().lock()),
    }
}

fn run(cli: Cli) -> Result<usize> {
    let (opts, build): (&Options, fn(&RawConfig) -> Result<Table>) = match &cli.command {
        Command::SweepOmega(o) => (o, |c| Ok(sweep_omega(&OmegaSweep::from_config(c)?))),
        Command::SweepGamma(o) => (o, |c| Ok(sweep_gamma(&GammaSweep::from_config(c)?))),
        Command::DampingMap(o) => (o, |c| Ok(damping_map(&DampingMap::from_config(c)?))),
        Command::Distribution(o) => (o, |c| Ok(distribution_report(&DistributionReport::from_config(c)?))),
        Command::Trajectories(o) => (o, |c| trajectories(&TrajectoryRun::from_config(c)?)),
        Command::Convergence(o) => (o, |c| convergence(&ConvergenceRun::from_config(c)?)),
    };
    let config = opts.resolve()?;
    let table = build(&config)?;
    emit(&table, config.get("out"))?;
    Ok(table.failures())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("amendart: {n} row(s) failed; see the error column");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("amendart: {e}");
            ExitCode::from(2)
        }
    }
}
