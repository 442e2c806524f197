//! Populations, photon distributions, entropies and mutual information.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hilbert::{partial_trace, DensityMatrix, SubsystemKind};
use crate::models::ModelSpec;

/// Eigenvalues at or below this are dropped from entropy sums.
pub const ENTROPY_EIGENVALUE_FLOOR: f64 = 1e-14;

/// Slack allowed below zero for a computed mutual information.
pub const MUTUAL_INFORMATION_TOLERANCE: f64 = 1e-10;

/// Fock-basis populations of the boson at `mode`.
pub fn photon_distribution(rho: &DensityMatrix, mode: usize) -> Result<Vec<f64>> {
    match rho.space().subsystems().get(mode).map(|s| s.kind) {
        Some(SubsystemKind::Boson { .. }) => {}
        Some(SubsystemKind::Qubit) => return Err(Error::Dimension(format!("subsystem {mode} is not a mode"))),
        None => return Err(Error::Dimension(format!("no subsystem at position {mode}"))),
    }
    let reduced = partial_trace(rho, &[mode])?;
    Ok(reduced.matrix().diagonal().iter().map(|z| z.re).collect())
}

/// Mean of a distribution over `0, 1, 2, …`.
pub fn distribution_mean(p: &[f64]) -> f64 {
    crate::linalg::compensated_sum(p.iter().enumerate().map(|(n, v)| n as f64 * v))
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let s = crate::linalg::compensated_sum(
        rho.eigenvalues()
            .into_iter()
            .filter(|&l| l > ENTROPY_EIGENVALUE_FLOOR)
            .map(|l| -l * l.log2()),
    );
    s.max(0.0)
}

/// `S(ρ_A) + S(ρ_B) − S(ρ_AB)` for disjoint subsystem sets `a` and `b`; anything
/// outside `a ∪ b` is traced out first.
pub fn mutual_information(rho: &DensityMatrix, a: &[usize], b: &[usize]) -> Result<f64> {
    let n = rho.space().len();
    if a.is_empty() || b.is_empty() {
        return Err(Error::Partition("both parties need at least one subsystem".into()));
    }
    if a.iter().chain(b).any(|&k| k >= n) {
        return Err(Error::Partition(format!(
            "subsystem index out of range for {n} subsystems"
        )));
    }
    let mut joint: Vec<usize> = a.iter().chain(b).copied().collect();
    joint.sort_unstable();
    if joint.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Partition("parties overlap or repeat a subsystem".into()));
    }
    let s_a = von_neumann_entropy(&partial_trace(rho, a)?);
    let s_b = von_neumann_entropy(&partial_trace(rho, b)?);
    let s_ab = if joint.len() == n {
        von_neumann_entropy(rho)
    } else {
        von_neumann_entropy(&partial_trace(rho, &joint)?)
    };
    Ok(s_a + s_b - s_ab)
}

/// Observables of a model state. Per-mode and per-atom entries follow the
/// subsystem order of the model space.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableReport {
    pub n_mean: Vec<f64>,
    pub e_mean: Vec<f64>,
    pub distributions: Vec<Vec<f64>>,
    /// Entropy of the true atom.
    pub entropy_atom: f64,
    /// Entropy of the true mode.
    pub entropy_field: f64,
    /// Entropy of the true atom and mode together, parasitic element traced out.
    pub entropy_joint: f64,
    pub mutual_information: f64,
    /// `⟨n⟩` of the true mode.
    pub photons: f64,
    /// `⟨E⟩` of the true atom.
    pub excitation: f64,
    /// Photon distribution of the true mode.
    pub true_distribution: Vec<f64>,
}

pub fn report(spec: &ModelSpec, rho: &DensityMatrix) -> Result<ObservableReport> {
    let space = rho.space();
    if space.dims() != crate::models::build_space(spec).dims() {
        return Err(Error::Dimension("state does not belong to this model".into()));
    }
    let layout = spec.layout();
    let mut n_mean = Vec::new();
    let mut e_mean = Vec::new();
    let mut distributions = Vec::new();
    let mut photons = 0.0;
    let mut excitation = 0.0;
    let mut true_distribution = Vec::new();
    for (k, sub) in space.subsystems().iter().enumerate() {
        match sub.kind {
            SubsystemKind::Boson { .. } => {
                let p = photon_distribution(rho, k)?;
                let mean = distribution_mean(&p);
                if k == layout.mode {
                    photons = mean;
                    true_distribution = p.clone();
                }
                n_mean.push(mean);
                distributions.push(p);
            }
            SubsystemKind::Qubit => {
                let e = partial_trace(rho, &[k])?.matrix()[(1, 1)].re;
                if k == layout.atom {
                    excitation = e;
                }
                e_mean.push(e);
            }
        }
    }
    let atom = partial_trace(rho, &[layout.atom])?;
    let field = partial_trace(rho, &[layout.mode])?;
    let joint = partial_trace(rho, &[layout.atom, layout.mode])?;
    let entropy_atom = von_neumann_entropy(&atom);
    let entropy_field = von_neumann_entropy(&field);
    let entropy_joint = von_neumann_entropy(&joint);
    Ok(ObservableReport {
        n_mean,
        e_mean,
        distributions,
        entropy_atom,
        entropy_field,
        entropy_joint,
        mutual_information: entropy_atom + entropy_field - entropy_joint,
        photons,
        excitation,
        true_distribution,
    })
}
