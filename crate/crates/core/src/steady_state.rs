//! Null space of the generator, plus a time integrator used as a cross-check.
//!
//! The vectorized generator is first split into the connected components of
//! its sparsity graph. Symmetries of the model (parity for the Rabi coupling,
//! excitation number under the RWA) make the generator block diagonal, and the
//! stationary state lives in the block holding the populations. That block is
//! solved densely with one population equation replaced by `Tr ρ = 1`; the
//! other blocks are only probed for extra null vectors.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hilbert::{expectation, DensityMatrix, Operator};
use crate::linalg::{c64, complete_pivot_magnitudes, CMatrix, CsrMatrix, DenseLu, C64};
use crate::liouvillian::{devectorize, model_generator, vectorize, SuperOperator};
use crate::models::ModelSpec;

/// Numerical acceptance thresholds for computed density matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub trace: f64,
    pub hermitian: f64,
    pub psd: f64,
    /// Bound on `‖L·vec(ρ)‖₂ / ‖L‖_F`.
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            trace: 1e-10,
            hermitian: 1e-10,
            psd: 1e-10,
            residual: 1e-10,
        }
    }
}

/// Pivots below this fraction of the largest pivot count towards the nullity.
pub const NULLITY_PIVOT_RATIO: f64 = 1e-12;

const MAX_REFINEMENT_STEPS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverDiagnostics {
    /// Number of independent blocks of the generator.
    pub blocks: usize,
    /// Size of the block that carries the populations.
    pub solved_block_size: usize,
    pub refinement_steps: usize,
    /// Hermiticity deviation of the raw solution, before symmetrization.
    pub raw_hermitian_deviation: f64,
    pub min_eigenvalue: f64,
    pub trace_error: f64,
    /// Smallest pivot ratio seen outside the expected null direction.
    pub spectral_gap_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateResult {
    pub rho: DensityMatrix,
    pub residual: f64,
    pub nullity_estimate: usize,
    pub diagnostics: SolverDiagnostics,
}

impl SteadyStateResult {
    pub fn expectation(&self, op: &Operator) -> Result<f64> {
        Ok(expectation(op, &self.rho)?.re)
    }
}

/// Stationary state of `l` with the default [`Tolerances`].
pub fn steady_state(l: &SuperOperator) -> Result<SteadyStateResult> {
    steady_state_with(l, &Tolerances::default())
}

/// Stationary state of the model described by `spec`.
pub fn solve_model(spec: &ModelSpec) -> Result<SteadyStateResult> {
    steady_state(&model_generator(spec)?)
}

pub fn steady_state_with(l: &SuperOperator, tol: &Tolerances) -> Result<SteadyStateResult> {
    let d = l.hilbert_dim();
    let n = d * d;
    let mat = l.matrix();
    let blocks = connected_blocks(mat);
    let is_population = |k: usize| k.is_multiple_of(d + 1);

    let population_blocks: Vec<usize> = blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| b.iter().any(|&k| is_population(k)))
        .map(|(i, _)| i)
        .collect();
    if population_blocks.len() != 1 {
        // each block holding populations conserves its own share of the trace
        return Err(Error::NonUniqueSteadyState {
            nullity: population_blocks.len(),
        });
    }
    let main = population_blocks[0];

    let mut nullity = 0usize;
    let mut gap = f64::INFINITY;
    for (bi, block) in blocks.iter().enumerate() {
        let dense = dense_block(mat, block);
        let pivots = complete_pivot_magnitudes(&dense);
        let largest = pivots.first().copied().unwrap_or(0.0);
        let small = pivots.iter().filter(|&&p| p <= NULLITY_PIVOT_RATIO * largest).count();
        nullity += small;
        // the population block is expected to contribute exactly one
        let expected_zero = usize::from(bi == main);
        if pivots.len() > expected_zero && largest > 0.0 {
            gap = gap.min(pivots[pivots.len() - 1 - expected_zero] / largest);
        }
    }
    if nullity > 1 {
        return Err(Error::NonUniqueSteadyState { nullity });
    }

    // population block with the first population row replaced by the trace row
    let block = &blocks[main];
    let local_of = local_index(n, block);
    let trace_row = block.iter().position(|&k| is_population(k)).expect("population block");
    let mut system = dense_block(mat, block);
    for (j, &k) in block.iter().enumerate() {
        system[(trace_row, j)] = if is_population(k) { c64(1.0, 0.0) } else { C64::zero() };
    }
    let mut triplets: Vec<(usize, usize, C64)> = Vec::new();
    for i in 0..system.rows() {
        for j in 0..system.cols() {
            let v = system[(i, j)];
            if !v.is_zero() {
                triplets.push((i, j, v));
            }
        }
    }
    let sparse_system = CsrMatrix::from_triplets(system.rows(), system.cols(), triplets);
    let mut rhs = vec![C64::zero(); block.len()];
    rhs[trace_row] = c64(1.0, 0.0);

    let lu = DenseLu::factor(system).map_err(|_| Error::NonUniqueSteadyState { nullity: 2 })?;
    let mut x = lu.solve(&rhs);
    let mut steps = 0;
    for _ in 0..MAX_REFINEMENT_STEPS {
        let r = sparse_system.residual_compensated(&x, &rhs);
        let dx = lu.solve(&r);
        let dx_norm = dx.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let x_norm = x.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
        steps += 1;
        if dx_norm <= 1e-17 * x_norm {
            break;
        }
    }

    let mut full = vec![C64::zero(); n];
    for (&k, v) in block.iter().zip(&x) {
        full[k] = *v;
    }
    let _ = local_of;
    let raw = devectorize(&full, d)?;
    let raw_dev = raw.hermitian_deviation();
    let rho_m = raw.hermitian_part();

    let l_rho = mat.mul_vec(&vectorize(&rho_m));
    let residual = l_rho.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / mat.frobenius_norm().max(f64::MIN_POSITIVE);
    if !(residual <= tol.residual) {
        return Err(Error::NoConvergence {
            residual,
            tolerance: tol.residual,
        });
    }
    let op = Operator::new(l.space().clone(), rho_m)?;
    let trace_error = (op.matrix().trace() - c64(1.0, 0.0)).norm();
    let rho = DensityMatrix::new(op, tol)?;
    let min_eigenvalue = rho.min_eigenvalue();

    Ok(SteadyStateResult {
        rho,
        residual,
        nullity_estimate: nullity.max(1),
        diagnostics: SolverDiagnostics {
            blocks: blocks.len(),
            solved_block_size: block.len(),
            refinement_steps: steps,
            raw_hermitian_deviation: raw_dev,
            min_eigenvalue,
            trace_error,
            spectral_gap_ratio: gap,
        },
    })
}

/// Weakly connected components of the sparsity graph, each sorted ascending,
/// ordered by their smallest index.
fn connected_blocks(m: &CsrMatrix) -> Vec<Vec<usize>> {
    let n = m.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, j, _) in m.triplets() {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
            parent[hi] = lo;
        }
    }
    let mut root_to_block = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        let r = find(&mut parent, k);
        if root_to_block[r] == usize::MAX {
            root_to_block[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[root_to_block[r]].push(k);
    }
    blocks
}

fn local_index(n: usize, block: &[usize]) -> Vec<usize> {
    let mut local = vec![usize::MAX; n];
    for (i, &k) in block.iter().enumerate() {
        local[k] = i;
    }
    local
}

fn dense_block(m: &CsrMatrix, block: &[usize]) -> CMatrix {
    let local = local_index(m.rows(), block);
    let mut out = CMatrix::zeros(block.len(), block.len());
    for (li, &gi) in block.iter().enumerate() {
        for (gj, v) in m.row_iter(gi) {
            let lj = local[gj];
            debug_assert!(lj != usize::MAX, "block is not closed");
            out[(li, lj)] = v;
        }
    }
    out
}

/// Result of [`evolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub rho: DensityMatrix,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// `|Tr ρ(t) − Tr ρ(0)|`.
    pub trace_drift: f64,
}

// Dormand–Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B_LOW: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `dρ/dt = Lρ` from `rho0` to `t_final` with an adaptive
/// Dormand–Prince 5(4) scheme; `tolerance` is used as both the absolute and
/// relative local error target.
pub fn evolve(l: &SuperOperator, rho0: &DensityMatrix, t_final: f64, tolerance: f64) -> Result<Evolution> {
    let d = l.hilbert_dim();
    if rho0.space().dim() != d {
        return Err(Error::Dimension("initial state does not match the generator".into()));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) || !(tolerance > 0.0) {
        return Err(Error::Usage(format!(
            "evolve needs t_final ≥ 0 and tolerance > 0, got {t_final}, {tolerance}"
        )));
    }
    let m = l.matrix();
    let mut y = vectorize(rho0.matrix());
    let trace0 = rho0.matrix().trace();
    let n = y.len();

    let scale = (0..m.rows())
        .map(|i| m.row_iter(i).map(|(_, v)| v.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut h = if scale > 0.0 { 0.01 / scale } else { t_final };
    let mut t = 0.0f64;
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut k: [Vec<C64>; 7] = core::array::from_fn(|_| vec![C64::zero(); n]);
    k[0] = m.mul_vec(&y);
    let mut stage = vec![C64::zero(); n];

    while t < t_final {
        if t + h > t_final {
            h = t_final - t;
        }
        if h <= 1e-14 * t.abs().max(1.0) && t_final - t > 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t });
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, a) in DP_A[s][..s].iter().enumerate() {
                    if *a != 0.0 {
                        acc += k[j][i] * (h * a);
                    }
                }
                stage[i] = acc;
            }
            let _ = DP_C[s];
            k[s] = m.mul_vec(&stage);
        }
        // stage 7 evaluated at the 5th-order solution, which is `stage` now
        let mut err_acc = 0.0f64;
        for i in 0..n {
            let mut e = C64::zero();
            for j in 0..7 {
                let w = DP_B[j] - DP_B_LOW[j];
                if w != 0.0 {
                    e += k[j][i] * (h * w);
                }
            }
            let sc = tolerance + tolerance * y[i].norm().max(stage[i].norm());
            err_acc += (e.norm() / sc).powi(2);
        }
        let err = (err_acc / n as f64).sqrt();
        if err <= 1.0 {
            t += h;
            y.copy_from_slice(&stage);
            k[0] = core::mem::take(&mut k[6]);
            k[6] = vec![C64::zero(); n];
            accepted += 1;
        } else {
            rejected += 1;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }

    let rho_m = devectorize(&y, d)?;
    let trace_drift = (rho_m.trace() - trace0).norm();
    if trace_drift > Tolerances::default().trace {
        return Err(Error::InvalidDensityMatrix(format!("trace drifted by {trace_drift:e}")));
    }
    let rho = DensityMatrix::new_unchecked(Operator::new(l.space().clone(), rho_m)?);
    Ok(Evolution {
        rho,
        accepted_steps: accepted,
        rejected_steps: rejected,
        trace_drift,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub cutoff: usize,
    pub n_mean: f64,
    pub e_mean: f64,
    /// Largest relative change of ⟨n⟩ or ⟨E⟩ with respect to the previous cutoff.
    pub relative_change: Option<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceScan {
    pub rows: Vec<ConvergenceRow>,
    /// Whether the last cutoff changed the observables by less than 1%.
    pub converged: bool,
}

/// Relative change below which two successive cutoffs count as converged.
pub const CONVERGENCE_THRESHOLD: f64 = 0.01;

/// Steady-state ⟨n⟩ and ⟨E⟩ of the true mode and atom for each cutoff.
pub fn convergence_scan(spec: &ModelSpec, cutoffs: &[usize]) -> Result<ConvergenceScan> {
    if cutoffs.is_empty() {
        return Err(Error::Usage("convergence scan needs at least one cutoff".into()));
    }
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Usage("cutoffs must be strictly ascending".into()));
    }
    let rel = |new: f64, old: f64| {
        let diff = (new - old).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / new.abs().max(old.abs())
        }
    };
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(cutoffs.len());
    for &cutoff in cutoffs {
        let s = ModelSpec { cutoff, ..spec.clone() };
        let result = solve_model(&s)?;
        let n_mean = result.expectation(&s.photon_number()?)?;
        let e_mean = result.expectation(&s.atom_excitation()?)?;
        let relative_change = rows
            .last()
            .map(|prev| rel(n_mean, prev.n_mean).max(rel(e_mean, prev.e_mean)));
        let converged = relative_change.is_some_and(|c| c < CONVERGENCE_THRESHOLD);
        rows.push(ConvergenceRow {
            cutoff,
            n_mean,
            e_mean,
            relative_change,
            converged,
        });
    }
    let converged = rows.last().is_some_and(|r| r.converged);
    Ok(ConvergenceScan { rows, converged })
}
