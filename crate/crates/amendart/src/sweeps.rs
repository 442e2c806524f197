//! Parameter sweeps producing [`Table`]s. Grid points run on the rayon pool;
//! rows come back in grid order.

use amendart_core::analytic::{amendart_one_photon, thermal_distribution};
use amendart_core::liouvillian::model_generator;
use amendart_core::models::{build_dissipators, build_hamiltonian, build_space};
use amendart_core::observables::{report, ObservableReport};
use amendart_core::steady_state::{convergence_scan, evolve, solve_model, Tolerances};
use amendart_core::trajectories::{reduce, run_stream, unravel};
use amendart_core::{CouplingForm, DensityMatrix, ModelSpec, Parasitic, RabiParams, Scenario, C64};
use rayon::prelude::*;

use crate::config::RawConfig;
use crate::error::{CliError, Result};
use crate::table::{Cell, Table};

/// `γ = ratio · λ` unless `gamma-rate` is given.
pub const DEFAULT_GAMMA_RATIO: f64 = 0.25;

/// Steady-state observables of one model.
pub fn solve_point(spec: &ModelSpec) -> Result<ObservableReport> {
    let ss = solve_model(spec)?;
    let mut r = report(spec, &ss.rho)?;
    let floor = Tolerances::default().psd;
    for v in r
        .n_mean
        .iter_mut()
        .chain(r.e_mean.iter_mut())
        .chain([&mut r.photons, &mut r.excitation])
    {
        if *v < 0.0 && *v >= -floor {
            *v = 0.0;
        }
    }
    Ok(r)
}

fn analytic_columns(spec: &ModelSpec) -> (Cell, Cell) {
    let applies = spec.parasitic == Parasitic::None && spec.coupling == CouplingForm::Full && spec.params.nbar == 0.0;
    match applies.then(|| amendart_one_photon(&spec.params)) {
        Some(Ok(a)) => (Cell::Num(a.n1), Cell::Num(a.e1)),
        _ => (Cell::Empty, Cell::Empty),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmegaSweep {
    pub scenario: Scenario,
    pub coupling: CouplingForm,
    pub params: RabiParams,
    pub omegas: Vec<f64>,
    pub cutoffs: Vec<usize>,
}

impl OmegaSweep {
    pub fn from_config(c: &RawConfig) -> Result<Self> {
        Ok(OmegaSweep {
            scenario: c.scenario_or(Scenario::Bare)?,
            coupling: c.coupling()?,
            params: c.params(RabiParams::circuit_qed(), DEFAULT_GAMMA_RATIO)?,
            omegas: c.grid_or("omega-grid", &[0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3])?,
            cutoffs: c.cutoffs_or(&[1, 2])?,
        })
    }
}

const SWEEP_HEADER: [&str; 9] = [
    "scenario",
    "coupling",
    "omega",
    "gamma",
    "cutoff",
    "n_mean",
    "e_mean",
    "n1_analytic",
    "e1_analytic",
];

fn sweep_rows(scenario: Scenario, coupling: CouplingForm, points: Vec<(RabiParams, usize)>) -> Table {
    let mut header = SWEEP_HEADER.to_vec();
    header.push("i_af");
    let mut table = Table::new(header);
    let results: Vec<_> = points
        .par_iter()
        .map(|&(p, cutoff)| {
            let spec = ModelSpec::scenario(scenario, p, coupling, cutoff);
            (spec.clone(), solve_point(&spec))
        })
        .collect();
    for (spec, res) in results {
        let keys = vec![
            Cell::from(scenario.label()),
            Cell::Text(coupling.to_string()),
            Cell::Num(spec.params.omega),
            Cell::Num(spec.params.gamma),
            Cell::from(spec.cutoff),
        ];
        match res {
            Ok(r) => {
                let (n1, e1) = if spec.cutoff == 1 {
                    analytic_columns(&spec)
                } else {
                    (Cell::Empty, Cell::Empty)
                };
                let mut cells = keys;
                cells.extend([
                    r.photons.into(),
                    r.excitation.into(),
                    n1,
                    e1,
                    r.mutual_information.into(),
                ]);
                table.push(cells);
            }
            Err(e) => table.push_error(keys, e.to_string()),
        }
    }
    table
}

pub fn sweep_omega(s: &OmegaSweep) -> Table {
    let points = s
        .omegas
        .iter()
        .flat_map(|&omega| s.cutoffs.iter().map(move |&c| (RabiParams { omega, ..s.params }, c)))
        .collect();
    sweep_rows(s.scenario, s.coupling, points)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaSweep {
    pub scenario: Scenario,
    pub coupling: CouplingForm,
    pub params: RabiParams,
    pub gammas: Vec<f64>,
    pub cutoffs: Vec<usize>,
}

impl GammaSweep {
    pub fn from_config(c: &RawConfig) -> Result<Self> {
        let params = c.params(RabiParams::circuit_qed(), DEFAULT_GAMMA_RATIO)?;
        let l = params.lambda;
        let gammas = c.grid_or("gamma-grid", &[0.0, l / 4.0, l, 4.0 * l])?;
        if gammas.iter().any(|&g| g < 0.0) {
            return Err(CliError::Config("gamma-grid must be non-negative".into()));
        }
        Ok(GammaSweep {
            scenario: c.scenario_or(Scenario::Bare)?,
            coupling: c.coupling()?,
            params,
            gammas,
            cutoffs: c.cutoffs_or(&[1, 2])?,
        })
    }
}

pub fn sweep_gamma(s: &GammaSweep) -> Table {
    let points = s
        .gammas
        .iter()
        .flat_map(|&gamma| s.cutoffs.iter().map(move |&c| (RabiParams { gamma, ..s.params }, c)))
        .collect();
    sweep_rows(s.scenario, s.coupling, points)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DampingMap {
    pub scenario: Scenario,
    pub coupling: CouplingForm,
    pub params: RabiParams,
    pub omegas: Vec<f64>,
    pub log10_kappa: Vec<f64>,
    pub log10_lambda: Vec<f64>,
    /// `γ = gamma_ratio · λ` at every grid point.
    pub gamma_ratio: f64,
    pub cutoff: usize,
}

impl DampingMap {
    pub fn from_config(c: &RawConfig) -> Result<Self> {
        let cutoffs = c.cutoffs_or(&[2])?;
        if cutoffs.len() != 1 {
            return Err(CliError::Config("damping-map takes a single cutoff".into()));
        }
        Ok(DampingMap {
            scenario: c.scenario_or(Scenario::C)?,
            coupling: c.coupling()?,
            params: c.params(RabiParams::circuit_qed(), DEFAULT_GAMMA_RATIO)?,
            omegas: c.grid_or("omega-list", &[0.7, 1.0])?,
            log10_kappa: c.grid_or("log10-kappa", &[-7.0, -6.5, -6.0, -5.5, -5.0])?,
            log10_lambda: c.grid_or("log10-lambda", &[-7.0, -6.5, -6.0, -5.5, -5.0])?,
            gamma_ratio: c.f64_or("gamma-ratio", DEFAULT_GAMMA_RATIO)?,
            cutoff: cutoffs[0],
        })
    }
}

/// Rows ordered by `Ω`, then `log10 κ`, then `log10 λ`.
pub fn damping_map(m: &DampingMap) -> Table {
    let mut table = Table::new(vec![
        "omega",
        "log10_kappa",
        "log10_lambda",
        "n_mean",
        "e_mean",
        "log10_total_excitation",
    ]);
    let points: Vec<(f64, f64, f64)> = m
        .omegas
        .iter()
        .flat_map(|&o| {
            m.log10_kappa
                .iter()
                .flat_map(move |&k| m.log10_lambda.iter().map(move |&l| (o, k, l)))
        })
        .collect();
    let results: Vec<_> = points
        .par_iter()
        .map(|&(omega, lk, ll)| {
            let lambda = 10f64.powf(ll);
            let p = RabiParams {
                omega,
                kappa: 10f64.powf(lk),
                lambda,
                gamma: m.gamma_ratio * lambda,
                ..m.params
            };
            solve_point(&ModelSpec::scenario(m.scenario, p, m.coupling, m.cutoff))
        })
        .collect();
    for (&(o, k, l), res) in points.iter().zip(results) {
        let keys = vec![Cell::Num(o), Cell::Num(k), Cell::Num(l)];
        match res {
            Ok(r) => {
                let mut cells = keys;
                cells.extend([
                    r.photons.into(),
                    r.excitation.into(),
                    (r.photons + r.excitation).log10().into(),
                ]);
                table.push(cells);
            }
            Err(e) => table.push_error(keys, e.to_string()),
        }
    }
    table
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionReport {
    pub scenario: Scenario,
    pub coupling: CouplingForm,
    pub params: RabiParams,
    /// `(κ, Ω)` panels.
    pub panels: Vec<(f64, f64)>,
    pub cutoff: usize,
}

impl DistributionReport {
    pub fn from_config(c: &RawConfig) -> Result<Self> {
        let kappas = c.grid_or("kappa-list", &[1e-6, 1e-7])?;
        let omegas = c.grid_or("omega-list", &[1.0, 0.7])?;
        if kappas.len() != omegas.len() {
            return Err(CliError::Config(
                "kappa-list and omega-list must have the same length".into(),
            ));
        }
        let cutoffs = c.cutoffs_or(&[2])?;
        if cutoffs.len() != 1 {
            return Err(CliError::Config("distribution takes a single cutoff".into()));
        }
        Ok(DistributionReport {
            scenario: c.scenario_or(Scenario::C)?,
            coupling: c.coupling()?,
            params: c.params(RabiParams::circuit_qed(), DEFAULT_GAMMA_RATIO)?,
            panels: kappas.into_iter().zip(omegas).collect(),
            cutoff: cutoffs[0],
        })
    }
}

/// Photon distribution of the true mode next to the thermal distribution of
/// equal mean, with atom-field mutual information with and without the
/// parasitic element.
pub fn distribution_report(d: &DistributionReport) -> Table {
    let mut table = Table::new(vec![
        "kappa",
        "omega",
        "n",
        "p_amendart",
        "p_thermal",
        "n_mean",
        "i_af",
        "i_af_bare",
    ]);
    let results: Vec<_> = d
        .panels
        .par_iter()
        .map(|&(kappa, omega)| -> Result<(ObservableReport, f64)> {
            let p = RabiParams {
                kappa,
                omega,
                ..d.params
            };
            let spec = ModelSpec::scenario(d.scenario, p, d.coupling, d.cutoff);
            let r = solve_point(&spec)?;
            let bare = solve_point(&ModelSpec::scenario(Scenario::Bare, p, d.coupling, d.cutoff))?;
            Ok((r, bare.mutual_information))
        })
        .collect();
    for (&(kappa, omega), res) in d.panels.iter().zip(results) {
        let keys = || vec![Cell::Num(kappa), Cell::Num(omega)];
        match res.and_then(|(r, bare)| {
            let thermal = thermal_distribution(r.photons, d.cutoff)?;
            Ok((r, bare, thermal))
        }) {
            Ok((r, bare, thermal)) => {
                let p = &r.true_distribution;
                for (n, (pa, pt)) in p.iter().zip(&thermal).enumerate() {
                    let mut cells = keys();
                    cells.extend([
                        Cell::from(n),
                        (*pa).into(),
                        (*pt).into(),
                        r.photons.into(),
                        r.mutual_information.into(),
                        bare.into(),
                    ]);
                    table.push(cells);
                }
            }
            Err(e) => table.push_error(keys(), e.to_string()),
        }
    }
    table
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    Ground,
    Photon,
    Excited,
}

impl std::str::FromStr for InitialState {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ground" => Ok(InitialState::Ground),
            "photon" => Ok(InitialState::Photon),
            "excited" => Ok(InitialState::Excited),
            other => Err(CliError::Config(format!(
                "unknown initial state `{other}` (ground, photon, excited)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRun {
    pub scenario: Scenario,
    pub coupling: CouplingForm,
    pub params: RabiParams,
    pub cutoff: usize,
    pub n_traj: usize,
    pub t_max: f64,
    pub dt: f64,
    pub seed: u64,
    pub initial: InitialState,
}

impl TrajectoryRun {
    pub fn from_config(c: &RawConfig) -> Result<Self> {
        let defaults = RabiParams {
            kappa: 0.05,
            lambda: 0.05,
            ..RabiParams::circuit_qed()
        };
        let cutoffs = c.cutoffs_or(&[1])?;
        if cutoffs.len() != 1 {
            return Err(CliError::Config("trajectories take a single cutoff".into()));
        }
        Ok(TrajectoryRun {
            scenario: c.scenario_or(Scenario::Bare)?,
            coupling: c.coupling()?,
            params: c.params(defaults, DEFAULT_GAMMA_RATIO)?,
            cutoff: cutoffs[0],
            n_traj: c.u64_or("n-traj", 1000)? as usize,
            t_max: c.f64_or("t-max", 200.0)?,
            dt: c.f64_or("dt", 0.5)?,
            seed: c.u64_or("seed", 0)?,
            initial: c.get("initial").unwrap_or("photon").parse()?,
        })
    }
}

fn initial_index(spec: &ModelSpec, initial: InitialState) -> usize {
    let strides = build_space(spec).strides();
    let layout = spec.layout();
    match initial {
        InitialState::Ground => 0,
        InitialState::Photon => strides[layout.mode],
        InitialState::Excited => strides[layout.atom],
    }
}

/// Ensemble averages of `⟨n⟩` and `⟨E⟩` with standard errors, next to the
/// master-equation values on the same grid.
pub fn trajectories(run: &TrajectoryRun) -> Result<Table> {
    if run.n_traj == 0 {
        return Err(CliError::Config("n-traj must be positive".into()));
    }
    let spec = ModelSpec::scenario(run.scenario, run.params, run.coupling, run.cutoff);
    let h = build_hamiltonian(&spec)?;
    let unr = unravel(&h, &build_dissipators(&spec)?)?;
    let d = h.dim();
    let k0 = initial_index(&spec, run.initial);
    let mut psi = vec![C64::new(0.0, 0.0); d];
    psi[k0] = C64::new(1.0, 0.0);
    let observables = [spec.photon_number()?, spec.atom_excitation()?];
    let records = (0..run.n_traj as u64)
        .into_par_iter()
        .map(|k| run_stream(&unr, &psi, run.t_max, run.dt, run.seed, k, &observables))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let avg = reduce(&records)?;

    let l = model_generator(&spec)?;
    let mut rho = DensityMatrix::basis_state(l.space().clone(), k0)?;
    let mut table = Table::new(vec![
        "t", "n_mean", "n_stderr", "e_mean", "e_stderr", "n_master", "e_master",
    ]);
    for (k, &t) in avg.times.iter().enumerate() {
        if k > 0 {
            rho = evolve(&l, &rho, t - avg.times[k - 1], 1e-10)?.rho;
        }
        let n = amendart_core::hilbert::expectation(&observables[0], &rho)?.re;
        let e = amendart_core::hilbert::expectation(&observables[1], &rho)?.re;
        table.push(vec![
            t.into(),
            avg.mean[0][k].into(),
            avg.std_err[0][k].into(),
            avg.mean[1][k].into(),
            avg.std_err[1][k].into(),
            n.into(),
            e.into(),
        ]);
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRun {
    pub scenario: Scenario,
    pub coupling: CouplingForm,
    pub params: RabiParams,
    pub cutoffs: Vec<usize>,
}

impl ConvergenceRun {
    pub fn from_config(c: &RawConfig) -> Result<Self> {
        Ok(ConvergenceRun {
            scenario: c.scenario_or(Scenario::Bare)?,
            coupling: c.coupling()?,
            params: c.params(RabiParams::circuit_qed(), DEFAULT_GAMMA_RATIO)?,
            cutoffs: c.cutoffs_or(&[1, 2, 3, 4])?,
        })
    }
}

pub fn convergence(run: &ConvergenceRun) -> Result<Table> {
    let spec = ModelSpec::scenario(run.scenario, run.params, run.coupling, run.cutoffs[0]);
    let scan = convergence_scan(&spec, &run.cutoffs)?;
    let mut table = Table::new(vec!["cutoff", "n_mean", "e_mean", "relative_change", "converged"]);
    for r in scan.rows {
        table.push(vec![
            r.cutoff.into(),
            r.n_mean.into(),
            r.e_mean.into(),
            Cell::opt(r.relative_change),
            Cell::Text(r.converged.to_string()),
        ]);
    }
    Ok(table)
}
