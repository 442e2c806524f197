//! Master-equation generators as sparse superoperators.
//!
//! With column stacking, `vec(AρB) = (Bᵀ ⊗ A)·vec(ρ)`, so left multiplication
//! by `A` is `I ⊗ A` and right multiplication by `B` is `Bᵀ ⊗ I`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hilbert::{embed, quadratures, CompositeSpace, Operator, SubsystemSpec};
use crate::linalg::{c64, CMatrix, CsrMatrix, C64};
use crate::models::{build_dissipators, build_hamiltonian, LindbladTerm, ModelSpec};

/// Hermiticity tolerance applied to Hamiltonians before building `-i[H, ·]`.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;

/// Linear map on vectorized density matrices of a [`CompositeSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    space: Arc<CompositeSpace>,
    matrix: CsrMatrix,
}

impl SuperOperator {
    pub fn new(space: Arc<CompositeSpace>, matrix: CsrMatrix) -> Result<Self> {
        let d2 = space.dim() * space.dim();
        if matrix.rows() != d2 || matrix.cols() != d2 {
            return Err(Error::Dimension(format!(
                "{}x{} superoperator on a space of dimension {}",
                matrix.rows(),
                matrix.cols(),
                space.dim()
            )));
        }
        Ok(SuperOperator { space, matrix })
    }

    pub fn zero(space: Arc<CompositeSpace>) -> Self {
        let d2 = space.dim() * space.dim();
        SuperOperator {
            space,
            matrix: CsrMatrix::zeros(d2, d2),
        }
    }

    pub fn space(&self) -> &Arc<CompositeSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// Hilbert-space dimension `D`; the matrix is `D² × D²`.
    pub fn hilbert_dim(&self) -> usize {
        self.space.dim()
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        let v = vectorize(rho);
        if v.len() != self.matrix.cols() {
            return Err(Error::Dimension(
                "density matrix does not match the superoperator".into(),
            ));
        }
        devectorize(&self.matrix.mul_vec(&v), self.hilbert_dim())
    }

    pub fn add(&self, other: &SuperOperator) -> Result<SuperOperator> {
        self.check_same_space(other)?;
        Ok(SuperOperator {
            space: self.space.clone(),
            matrix: self.matrix.add_scaled(&other.matrix, c64(1.0, 0.0)),
        })
    }

    pub fn scale(&self, s: f64) -> SuperOperator {
        SuperOperator {
            space: self.space.clone(),
            matrix: self.matrix.scale(c64(s, 0.0)),
        }
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &SuperOperator) -> Result<SuperOperator> {
        self.check_same_space(other)?;
        Ok(SuperOperator {
            space: self.space.clone(),
            matrix: self.matrix.matmul(&other.matrix),
        })
    }

    pub fn max_abs_diff(&self, other: &SuperOperator) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// `max_j |Σ_i L[(i,i), j]| / max|L|`: zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let d = self.hilbert_dim();
        let mut col_sums = alloc::vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for (j, v) in self.matrix.row_iter(i + d * i) {
                col_sums[j] += v;
            }
        }
        let scale = self.matrix.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        col_sums.iter().fold(0.0f64, |m, z| m.max(z.norm())) / scale
    }

    fn check_same_space(&self, other: &SuperOperator) -> Result<()> {
        if self.space.dim() != other.space.dim() {
            return Err(Error::Dimension("superoperators act on different spaces".into()));
        }
        Ok(())
    }
}

/// Column stacking: `v[i + D·j] = ρ[i, j]`.
pub fn vectorize(rho: &CMatrix) -> Vec<C64> {
    let (r, c) = (rho.rows(), rho.cols());
    let mut v = Vec::with_capacity(r * c);
    for j in 0..c {
        for i in 0..r {
            v.push(rho[(i, j)]);
        }
    }
    v
}

/// Inverse of [`vectorize`] for a `dim × dim` matrix.
pub fn devectorize(v: &[C64], dim: usize) -> Result<CMatrix> {
    if v.len() != dim * dim {
        return Err(Error::Dimension(format!("vector of length {} is not {dim}²", v.len())));
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| v[i + dim * j]))
}

/// `ρ ↦ Aρ`
fn left(a: &CMatrix) -> CsrMatrix {
    CsrMatrix::kron_dense(&CMatrix::identity(a.rows()), a)
}

/// `ρ ↦ ρA`
fn right(a: &CMatrix) -> CsrMatrix {
    CsrMatrix::kron_dense(&a.transpose(), &CMatrix::identity(a.rows()))
}

/// `ρ ↦ [A, ρ]`
fn commutator_map(a: &CMatrix) -> CsrMatrix {
    left(a).add_scaled(&right(a), c64(-1.0, 0.0))
}

/// `ρ ↦ {A, ρ}`
fn anticommutator_map(a: &CMatrix) -> CsrMatrix {
    left(a).add_scaled(&right(a), c64(1.0, 0.0))
}

/// `ρ ↦ −i[H, ρ]`.
pub fn hamiltonian_superop(h: &Operator) -> Result<SuperOperator> {
    let deviation = h.matrix().hermitian_deviation();
    if deviation > HERMITICITY_TOLERANCE {
        return Err(Error::NonHermitian { deviation });
    }
    let matrix = commutator_map(h.matrix()).scale(c64(0.0, -1.0));
    Ok(SuperOperator {
        space: h.space().clone(),
        matrix,
    })
}

/// `ρ ↦ rate·(ΦρΦ† − ½Φ†Φρ − ½ρΦ†Φ)`.
pub fn dissipator_superop(term: &LindbladTerm) -> Result<SuperOperator> {
    if term.rate < 0.0 || term.rate.is_nan() {
        return Err(Error::NegativeRate(term.rate));
    }
    let phi = term.jump.matrix();
    let phi_dag_phi = &phi.adjoint() * phi;
    // ΦρΦ† → conj(Φ) ⊗ Φ
    let jump = CsrMatrix::kron_dense(&phi.conj(), phi);
    let matrix = jump
        .add_scaled(&anticommutator_map(&phi_dag_phi), c64(-0.5, 0.0))
        .scale(c64(term.rate, 0.0));
    Ok(SuperOperator {
        space: term.jump.space().clone(),
        matrix,
    })
}

/// Full generator `−i[H, ·] + Σ rate·D[Φ]`.
pub fn assemble(h: &Operator, terms: &[LindbladTerm]) -> Result<SuperOperator> {
    let mut total = hamiltonian_superop(h)?;
    for t in terms {
        if t.jump.dim() != h.dim() {
            return Err(Error::Dimension(format!(
                "jump operator of dimension {} with Hamiltonian of dimension {}",
                t.jump.dim(),
                h.dim()
            )));
        }
        total = total.add(&dissipator_superop(t)?)?;
    }
    Ok(total)
}

/// Generator of a [`ModelSpec`].
pub fn model_generator(spec: &ModelSpec) -> Result<SuperOperator> {
    assemble(&build_hamiltonian(spec)?, &build_dissipators(spec)?)
}

/// Coefficients of the most general bilinear single-mode Markovian kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearKernelParams {
    /// Squeezing-like drift, enters as `(μ/4){x, p}` in the Hamiltonian.
    pub mu: f64,
    pub kappa: f64,
    pub dx: f64,
    pub dp: f64,
    pub dz: f64,
}

impl BilinearKernelParams {
    /// Coefficients equivalent to `κ(n̄+1)D[a] + κn̄D[a†]`.
    pub fn thermal(kappa: f64, nbar: f64) -> Self {
        let d = kappa * (1.0 + 2.0 * nbar) / 4.0;
        BilinearKernelParams {
            mu: 0.0,
            kappa,
            dx: d,
            dp: d,
            dz: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityCheck {
    pub admissible: bool,
    /// `D_p D_x − D_z² − (κ/4)²`.
    pub margin: f64,
}

/// Lindblad-reducibility of a bilinear kernel: `D_x ≥ 0`, `D_p ≥ 0` and
/// `D_p D_x − D_z² ≥ (κ/4)²`.
pub fn check_positivity_condition(params: &BilinearKernelParams) -> PositivityCheck {
    let q = params.kappa / 4.0;
    let margin = params.dp * params.dx - params.dz * params.dz - q * q;
    PositivityCheck {
        admissible: params.dx >= 0.0 && params.dp >= 0.0 && margin >= 0.0,
        margin,
    }
}

/// Dissipative part of the bilinear kernel for given quadratures:
/// `(iκ/4)([p,{x,ρ}] − [x,{p,ρ}]) − D_p[x,[x,ρ]] − D_x[p,[p,ρ]] + D_z([x,[p,ρ]] + [p,[x,ρ]])`.
fn bilinear_dissipative_part(x: &CMatrix, p: &CMatrix, k: &BilinearKernelParams) -> CsrMatrix {
    let cx = commutator_map(x);
    let cp = commutator_map(p);
    let ax = anticommutator_map(x);
    let ap = anticommutator_map(p);
    let drift = cp.matmul(&ax).add_scaled(&cx.matmul(&ap), c64(-1.0, 0.0));
    let mut out = drift.scale(c64(0.0, k.kappa / 4.0));
    out = out.add_scaled(&cx.matmul(&cx), c64(-k.dp, 0.0));
    out = out.add_scaled(&cp.matmul(&cp), c64(-k.dx, 0.0));
    let cross = cx.matmul(&cp).add_scaled(&cp.matmul(&cx), c64(1.0, 0.0));
    out.add_scaled(&cross, c64(k.dz, 0.0))
}

/// Single-mode generator `−i[n + (μ/4){x,p}, ·] + L′_κ` at Fock cutoff `cutoff`.
pub fn bilinear_kernel_superop(params: &BilinearKernelParams, cutoff: usize) -> SuperOperator {
    let space = Arc::new(CompositeSpace::single(SubsystemSpec::boson("mode", cutoff)));
    let (x, p) = quadratures(cutoff);
    let n = CMatrix::from_real_diagonal(&(0..=cutoff).map(|k| k as f64).collect::<Vec<_>>());
    let h = &n + &x.matrix().anticommutator(p.matrix()).scale_real(params.mu / 4.0);
    let unitary = commutator_map(&h).scale(c64(0.0, -1.0));
    let matrix = unitary.add_scaled(
        &bilinear_dissipative_part(x.matrix(), p.matrix(), params),
        c64(1.0, 0.0),
    );
    SuperOperator { space, matrix }
}

/// Joint generator `−i[H₀ + (μ/4){x,p}, ·] + L′_κ`, with the kernel acting on
/// the bosonic factor at `mode` and nothing else dissipating.
pub fn bilinear_kernel_on(h0: &Operator, mode: usize, params: &BilinearKernelParams) -> Result<SuperOperator> {
    let space = h0.space().clone();
    let cutoff = match space.subsystems().get(mode).map(|s| s.kind) {
        Some(crate::hilbert::SubsystemKind::Boson { cutoff }) => cutoff,
        _ => return Err(Error::Usage(format!("subsystem {mode} is not a bosonic mode"))),
    };
    let (x, p) = quadratures(cutoff);
    let x = embed(&x, &space, mode)?;
    let p = embed(&p, &space, mode)?;
    let squeeze = x.matrix().anticommutator(p.matrix()).scale_real(params.mu / 4.0);
    let h = Operator::new(space.clone(), h0.matrix() + &squeeze)?;
    let unitary = hamiltonian_superop(&h)?;
    let matrix = unitary.matrix.add_scaled(
        &bilinear_dissipative_part(x.matrix(), p.matrix(), params),
        c64(1.0, 0.0),
    );
    Ok(SuperOperator { space, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{annihilation, qubit_ops};
    use alloc::vec;

    fn pseudo_random(n: usize, seed: u64) -> CMatrix {
        let mut state = seed;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        CMatrix::from_fn(n, n, |_, _| c64(next(), next()))
    }

    fn op_on(m: CMatrix) -> Operator {
        let space = Arc::new(CompositeSpace::single(SubsystemSpec::boson("m", m.rows() - 1)));
        Operator::new(space, m).unwrap()
    }

    #[test]
    fn vectorization_convention() {
        let rho = CMatrix::from_row_major(2, 2, vec![c64(1.0, 0.0), c64(2.0, 0.0), c64(3.0, 0.0), c64(4.0, 0.0)]);
        let v = vectorize(&rho);
        assert_eq!(v.len(), 4);
        assert_eq!(v[1], rho[(1, 0)]);
        assert_eq!(devectorize(&v, 2).unwrap(), rho);
        assert!(matches!(devectorize(&v, 3), Err(Error::Dimension(_))));
    }

    #[test]
    fn sandwich_identity_against_direct_product() {
        let a = pseudo_random(3, 1);
        let b = pseudo_random(3, 2);
        let rho = pseudo_random(3, 3);
        let direct = vectorize(&(&(&a * &rho) * &b));
        let via_kron = b.transpose().kron(&a).mul_vec(&vectorize(&rho));
        for (x, y) in direct.iter().zip(&via_kron) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn hamiltonian_superop_matches_dense_commutator() {
        let r = pseudo_random(4, 7);
        let h = op_on(r.hermitian_part());
        let l = hamiltonian_superop(&h).unwrap();
        let rho = pseudo_random(4, 8);
        let expect = h.matrix().commutator(&rho).scale(c64(0.0, -1.0));
        assert!(l.apply(&rho).unwrap().max_abs_diff(&expect) < 1e-13);
    }

    #[test]
    fn hamiltonian_superop_structure() {
        let h = op_on(CMatrix::from_real_diagonal(&[0.0, 1.0, 2.5]));
        let l = hamiltonian_superop(&h).unwrap();
        for (i, j, _) in l.matrix().triplets() {
            assert_eq!(i, j);
        }
        let rho = CMatrix::from_real_diagonal(&[0.2, 0.3, 0.5]);
        assert_eq!(l.apply(&rho).unwrap().max_abs(), 0.0);

        let nh = op_on(pseudo_random(3, 4));
        assert!(matches!(hamiltonian_superop(&nh), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn dissipator_matches_dense_formula() {
        let phi = pseudo_random(4, 11);
        let term = LindbladTerm {
            jump: op_on(phi.clone()),
            rate: 0.7,
        };
        let l = dissipator_superop(&term).unwrap();
        let rho = pseudo_random(4, 12);
        let pd = phi.adjoint();
        let pdp = &pd * &phi;
        let mut expect = &(&phi * &rho) * &pd;
        expect -= &(&pdp * &rho).scale_real(0.5);
        expect -= &(&rho * &pdp).scale_real(0.5);
        assert!(l.apply(&rho).unwrap().max_abs_diff(&expect.scale_real(0.7)) < 1e-13);
        assert!(l.trace_defect() < 1e-14);
    }

    #[test]
    fn dissipator_examples() {
        let a = annihilation(1);
        let l = dissipator_superop(&LindbladTerm { jump: a, rate: 1.0 }).unwrap();
        let one = CMatrix::from_real_diagonal(&[0.0, 1.0]);
        assert_eq!(l.apply(&one).unwrap(), CMatrix::from_real_diagonal(&[1.0, -1.0]));

        let sz = qubit_ops().sigma_z;
        let l = dissipator_superop(&LindbladTerm {
            jump: sz.clone(),
            rate: 1.0,
        })
        .unwrap();
        assert_eq!(
            l.apply(&CMatrix::from_real_diagonal(&[0.3, 0.7])).unwrap().max_abs(),
            0.0
        );

        assert!(matches!(
            dissipator_superop(&LindbladTerm { jump: sz, rate: -0.1 }),
            Err(Error::NegativeRate(_))
        ));
    }

    #[test]
    fn dissipator_is_linear_in_rate() {
        let phi = op_on(pseudo_random(3, 5));
        let l1 = dissipator_superop(&LindbladTerm {
            jump: phi.clone(),
            rate: 1.0,
        })
        .unwrap();
        let l3 = dissipator_superop(&LindbladTerm { jump: phi, rate: 3.0 }).unwrap();
        assert!(l1.scale(3.0).max_abs_diff(&l3) < 1e-14);
    }

    #[test]
    fn empty_model_is_zero() {
        let h = op_on(CMatrix::zeros(3, 3));
        assert_eq!(assemble(&h, &[]).unwrap().matrix().nnz(), 0);
    }

    #[test]
    fn vacuum_is_dark_for_a_damped_cavity() {
        let a = annihilation(3);
        let n = &a.adjoint() * &a;
        let l = assemble(&n, &[LindbladTerm { jump: a, rate: 0.3 }]).unwrap();
        let mut vac = CMatrix::zeros(4, 4);
        vac[(0, 0)] = c64(1.0, 0.0);
        assert_eq!(l.apply(&vac).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn positivity_condition_examples() {
        let k = 1e-3;
        let eq = check_positivity_condition(&BilinearKernelParams {
            mu: 0.0,
            kappa: k,
            dx: k / 4.0,
            dp: k / 4.0,
            dz: 0.0,
        });
        assert!(eq.admissible);
        assert_eq!(eq.margin, 0.0);
        let wide = check_positivity_condition(&BilinearKernelParams {
            mu: 0.0,
            kappa: k,
            dx: k / 2.0,
            dp: k / 2.0,
            dz: 0.0,
        });
        assert!(wide.admissible);
        assert!((wide.margin - 3.0 * k * k / 16.0).abs() < 1e-22);
        let mu = 0.3 * k;
        let vac = check_positivity_condition(&BilinearKernelParams {
            mu,
            kappa: k,
            dx: (k - mu) / 4.0,
            dp: (k + mu) / 4.0,
            dz: 0.0,
        });
        assert!(!vac.admissible);
        let neg = check_positivity_condition(&BilinearKernelParams {
            mu: 0.0,
            kappa: 0.0,
            dx: -1.0,
            dp: -1.0,
            dz: 0.0,
        });
        assert!(!neg.admissible && neg.margin > 0.0);
    }

    #[test]
    fn zero_kernel_is_free_rotation() {
        let zero = BilinearKernelParams {
            mu: 0.0,
            kappa: 0.0,
            dx: 0.0,
            dp: 0.0,
            dz: 0.0,
        };
        let l = bilinear_kernel_superop(&zero, 4);
        let n = op_on(CMatrix::from_real_diagonal(&[0.0, 1.0, 2.0, 3.0, 4.0]));
        assert!(l.max_abs_diff(&hamiltonian_superop(&n).unwrap()) < 1e-15);
    }

    #[test]
    fn thermal_kernel_matches_standard_cavity_damping() {
        for nbar in [0.0, 0.5] {
            let kappa = 0.3;
            let l = bilinear_kernel_superop(&BilinearKernelParams::thermal(kappa, nbar), 5);
            let a = annihilation(5);
            let n = &a.adjoint() * &a;
            let terms = [
                LindbladTerm {
                    jump: a.clone(),
                    rate: kappa * (nbar + 1.0),
                },
                LindbladTerm {
                    jump: a.adjoint(),
                    rate: kappa * nbar,
                },
            ];
            let sme = assemble(&n, &terms).unwrap();
            assert!(l.max_abs_diff(&sme) < 1e-12, "nbar = {nbar}");
        }
    }

    #[test]
    fn joint_kernel_reduces_to_single_mode_kernel() {
        let a = annihilation(2);
        let n = &a.adjoint() * &a;
        let k = BilinearKernelParams {
            mu: 0.2,
            kappa: 0.1,
            dx: 0.05,
            dp: 0.04,
            dz: 0.01,
        };
        let joint = bilinear_kernel_on(&n, 0, &k).unwrap();
        let single = bilinear_kernel_superop(&k, 2);
        assert!(joint.max_abs_diff(&single) < 1e-15);
        let q = qubit_ops().sigma_z;
        assert!(matches!(bilinear_kernel_on(&q, 0, &k), Err(Error::Usage(_))));
    }
}
