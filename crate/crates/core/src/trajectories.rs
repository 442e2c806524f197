//! Quantum-jump unraveling of the master equation.
//!
//! Between jumps a state evolves under `H_eff = H − (i/2)Σ rate·Φ†Φ`, so its
//! squared norm decays; a jump fires when the norm drops below a uniform
//! random threshold. Trajectory `k` of an ensemble draws from a ChaCha8
//! stream seeded with `base_seed` and stream number `k`, so results do not
//! depend on the order in which trajectories run.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hilbert::{CompositeSpace, Operator};
use crate::linalg::{c64, compensated_sum, expm, CMatrix, CsrMatrix, C64};
use crate::liouvillian::SuperOperator;
use crate::models::LindbladTerm;
use alloc::sync::Arc;

/// Bisection stops once the jump time is bracketed to `dt` times this.
pub const JUMP_TIME_RESOLUTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct Unraveling {
    space: Arc<CompositeSpace>,
    h_eff: CMatrix,
    jumps: Vec<CMatrix>,
}

impl Unraveling {
    pub fn space(&self) -> &Arc<CompositeSpace> {
        &self.space
    }

    /// Non-hermitian drift `H − (i/2)Σ rate·Φ†Φ`.
    pub fn h_eff(&self) -> &CMatrix {
        &self.h_eff
    }

    /// Jump operators `√rate·Φ`.
    pub fn jumps(&self) -> &[CMatrix] {
        &self.jumps
    }

    /// `ρ ↦ −i(H_eff ρ − ρ H_eff†) + Σ J ρ J†` as a superoperator.
    pub fn recombine(&self) -> SuperOperator {
        let d = self.h_eff.rows();
        let id = CMatrix::identity(d);
        let minus_i = c64(0.0, -1.0);
        // ρ H_eff† → conj(H_eff) ⊗ I
        let mut m = CsrMatrix::kron_dense(&id, &self.h_eff)
            .scale(minus_i)
            .add_scaled(&CsrMatrix::kron_dense(&self.h_eff.conj(), &id), c64(0.0, 1.0));
        for j in &self.jumps {
            m = m.add_scaled(&CsrMatrix::kron_dense(&j.conj(), j), c64(1.0, 0.0));
        }
        SuperOperator::new(self.space.clone(), m).expect("dimensions agree by construction")
    }
}

pub fn unravel(h: &Operator, terms: &[LindbladTerm]) -> Result<Unraveling> {
    let d = h.dim();
    let mut h_eff = h.matrix().clone();
    let mut jumps = Vec::with_capacity(terms.len());
    for t in terms {
        if t.jump.dim() != d {
            return Err(Error::Dimension(format!(
                "jump operator of dimension {} with H of dimension {d}",
                t.jump.dim()
            )));
        }
        if t.rate < 0.0 || t.rate.is_nan() {
            return Err(Error::NegativeRate(t.rate));
        }
        let phi = t.jump.matrix();
        h_eff -= &(&phi.adjoint() * phi).scale(c64(0.0, 0.5 * t.rate));
        jumps.push(phi.scale_real(t.rate.sqrt()));
    }
    Ok(Unraveling {
        space: h.space().clone(),
        h_eff,
        jumps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub stream: u64,
    pub jump_times: Vec<f64>,
    pub jump_channels: Vec<usize>,
    /// Sample times `k·dt`, ending at `t_max`.
    pub times: Vec<f64>,
    /// `samples[k][o]` is observable `o` at `times[k]`.
    pub samples: Vec<Vec<f64>>,
    /// Largest deviation from unit norm right after a jump.
    pub max_renormalization_error: f64,
}

fn norm_sqr(v: &[C64]) -> f64 {
    compensated_sum(v.iter().map(|z| z.norm_sqr()))
}

fn propagator(h_eff: &CMatrix, tau: f64) -> CMatrix {
    expm(&h_eff.scale(c64(0.0, -tau)))
}

fn sample(observables: &[Operator], psi: &[C64]) -> Vec<f64> {
    let n = norm_sqr(psi);
    observables
        .iter()
        .map(|o| {
            let opsi = o.matrix().mul_vec(psi);
            let num: C64 = psi.iter().zip(&opsi).map(|(a, b)| a.conj() * b).sum();
            num.re / n
        })
        .collect()
}

fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) || !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::Usage(format!(
            "need dt > 0 and t_max ≥ 0, got dt = {dt}, t_max = {t_max}"
        )));
    }
    if dt < f64::EPSILON * t_max {
        return Err(Error::StepSizeUnderflow { t: 0.0 });
    }
    let steps = (t_max / dt * (1.0 + 1e-12)).floor() as usize;
    let mut grid: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    if t_max - grid[steps] > 1e-12 * t_max {
        grid.push(t_max);
    } else {
        grid[steps] = t_max;
    }
    Ok(grid)
}

/// Single trajectory from `psi0` drawing from stream 0 of `seed`.
pub fn run_trajectory(
    unr: &Unraveling,
    psi0: &[C64],
    t_max: f64,
    dt: f64,
    seed: u64,
    observables: &[Operator],
) -> Result<TrajectoryRecord> {
    run_stream(unr, psi0, t_max, dt, seed, 0, observables)
}

/// Trajectory `stream` of an ensemble seeded by `base_seed`.
pub fn run_stream(
    unr: &Unraveling,
    psi0: &[C64],
    t_max: f64,
    dt: f64,
    base_seed: u64,
    stream: u64,
    observables: &[Operator],
) -> Result<TrajectoryRecord> {
    let d = unr.h_eff.rows();
    if psi0.len() != d || observables.iter().any(|o| o.dim() != d) {
        return Err(Error::Dimension(
            "state or observable does not match the unraveling".into(),
        ));
    }
    let n0 = norm_sqr(psi0);
    if (n0 - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!("initial state has squared norm {n0}")));
    }
    let grid = time_grid(t_max, dt)?;
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(stream);
    let step = propagator(&unr.h_eff, dt);

    let mut psi = psi0.to_vec();
    let mut threshold: f64 = rng.gen();
    let mut t = 0.0f64;
    let mut record = TrajectoryRecord {
        seed: base_seed,
        stream,
        jump_times: Vec::new(),
        jump_channels: Vec::new(),
        times: grid.clone(),
        samples: vec![sample(observables, &psi)],
        max_renormalization_error: 0.0,
    };
    let bracket = dt * JUMP_TIME_RESOLUTION;

    for &target in &grid[1..] {
        loop {
            let h = target - t;
            let next = if h == dt {
                step.mul_vec(&psi)
            } else {
                propagator(&unr.h_eff, h).mul_vec(&psi)
            };
            if norm_sqr(&next) >= threshold {
                psi = next;
                t = target;
                break;
            }
            let (mut lo, mut hi) = (0.0f64, h);
            while hi - lo > bracket {
                let mid = 0.5 * (lo + hi);
                if norm_sqr(&propagator(&unr.h_eff, mid).mul_vec(&psi)) >= threshold {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            psi = propagator(&unr.h_eff, hi).mul_vec(&psi);
            t = if hi == h { target } else { t + hi };

            let candidates: Vec<Vec<C64>> = unr.jumps.iter().map(|j| j.mul_vec(&psi)).collect();
            let weights: Vec<f64> = candidates.iter().map(|v| norm_sqr(v)).collect();
            let total = compensated_sum(weights.iter().copied());
            if total > 0.0 {
                let mut pick = rng.gen::<f64>() * total;
                let mut channel = weights.len() - 1;
                for (k, w) in weights.iter().enumerate() {
                    if pick < *w {
                        channel = k;
                        break;
                    }
                    pick -= w;
                }
                let new = &candidates[channel];
                let norm = norm_sqr(new).sqrt();
                psi = new.iter().map(|z| z / norm).collect();
                record.max_renormalization_error = record.max_renormalization_error.max((norm_sqr(&psi) - 1.0).abs());
                record.jump_times.push(t);
                record.jump_channels.push(channel);
            }
            threshold = rng.gen();
            if t >= target {
                break;
            }
        }
        record.samples.push(sample(observables, &psi));
    }
    Ok(record)
}

/// Per-time ensemble statistics; `mean[o][k]` for observable `o` at time `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleAverage {
    pub times: Vec<f64>,
    pub mean: Vec<Vec<f64>>,
    /// Standard error of the mean; NaN when only one trajectory was run.
    pub std_err: Vec<Vec<f64>>,
    pub n_traj: usize,
    /// Set when error bars are undefined.
    pub degenerate: bool,
}

/// Mean and standard error over records sharing a time grid, summed in
/// record order with compensation.
pub fn reduce(records: &[TrajectoryRecord]) -> Result<EnsembleAverage> {
    let first = records
        .first()
        .ok_or_else(|| Error::Usage("no trajectories to average".into()))?;
    let n = records.len();
    if records.iter().any(|r| r.times != first.times) {
        return Err(Error::Dimension("trajectories use different time grids".into()));
    }
    let n_obs = first.samples.first().map_or(0, Vec::len);
    let n_t = first.times.len();
    let mut mean = vec![vec![0.0; n_t]; n_obs];
    let mut std_err = vec![vec![f64::NAN; n_t]; n_obs];
    for o in 0..n_obs {
        for k in 0..n_t {
            let m = compensated_sum(records.iter().map(|r| r.samples[k][o])) / n as f64;
            mean[o][k] = m;
            if n > 1 {
                let var = compensated_sum(records.iter().map(|r| (r.samples[k][o] - m).powi(2))) / (n - 1) as f64;
                std_err[o][k] = (var / n as f64).sqrt();
            }
        }
    }
    Ok(EnsembleAverage {
        times: first.times.clone(),
        mean,
        std_err,
        n_traj: n,
        degenerate: n < 2,
    })
}

/// Runs `n_traj` trajectories sequentially and reduces them.
pub fn ensemble_average(
    unr: &Unraveling,
    psi0: &[C64],
    t_max: f64,
    dt: f64,
    n_traj: usize,
    base_seed: u64,
    observables: &[Operator],
) -> Result<EnsembleAverage> {
    if n_traj == 0 {
        return Err(Error::Usage("n_traj must be at least 1".into()));
    }
    let records = (0..n_traj as u64)
        .map(|k| run_stream(unr, psi0, t_max, dt, base_seed, k, observables))
        .collect::<Result<Vec<_>>>()?;
    reduce(&records)
}

/// Fock or basis state vector `|k⟩` of dimension `d`.
pub fn basis_vector(d: usize, k: usize) -> Result<Vec<C64>> {
    if k >= d {
        return Err(Error::Dimension(format!(
            "basis index {k} out of range for dimension {d}"
        )));
    }
    let mut v = vec![C64::zero(); d];
    v[k] = c64(1.0, 0.0);
    Ok(v)
}
