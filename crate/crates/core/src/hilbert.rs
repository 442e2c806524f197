//! Truncated tensor-product Hilbert spaces and the operators acting on them.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{c64, hermitian_eigenvalues, CMatrix, C64};
use crate::steady_state::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubsystemKind {
    /// Bosonic mode keeping Fock levels `|0⟩..|cutoff⟩`.
    Boson { cutoff: usize },
    /// Two-level system with basis `(|g⟩, |e⟩)`.
    Qubit,
}

impl SubsystemKind {
    pub fn dim(self) -> usize {
        match self {
            SubsystemKind::Boson { cutoff } => cutoff + 1,
            SubsystemKind::Qubit => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemSpec {
    pub kind: SubsystemKind,
    pub label: String,
}

impl SubsystemSpec {
    pub fn boson(label: &str, cutoff: usize) -> Self {
        SubsystemSpec {
            kind: SubsystemKind::Boson { cutoff },
            label: label.into(),
        }
    }

    pub fn qubit(label: &str) -> Self {
        SubsystemSpec {
            kind: SubsystemKind::Qubit,
            label: label.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }
}

/// Ordered tensor product of subsystems. The first factor is the
/// slowest-varying index of the product basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompositeSpace {
    subsystems: Vec<SubsystemSpec>,
    dim: usize,
}

impl CompositeSpace {
    pub fn new(subsystems: Vec<SubsystemSpec>) -> Result<Self> {
        for (i, s) in subsystems.iter().enumerate() {
            if subsystems[..i].iter().any(|t| t.label == s.label) {
                return Err(Error::Usage(format!("duplicate subsystem label `{}`", s.label)));
            }
        }
        let dim = subsystems.iter().map(SubsystemSpec::dim).product();
        Ok(CompositeSpace { subsystems, dim })
    }

    pub fn single(spec: SubsystemSpec) -> Self {
        let dim = spec.dim();
        CompositeSpace {
            subsystems: alloc::vec![spec],
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn subsystems(&self) -> &[SubsystemSpec] {
        &self.subsystems
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(SubsystemSpec::dim).collect()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.subsystems.iter().position(|s| s.label == label)
    }

    /// Product-basis strides: index = Σ digit[k]·stride[k].
    pub fn strides(&self) -> Vec<usize> {
        let dims = self.dims();
        let mut strides = alloc::vec![1usize; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        strides
    }

    /// Space made of the subsystems at `positions` (kept in the given order).
    pub fn subspace(&self, positions: &[usize]) -> Result<Self> {
        let mut subs = Vec::with_capacity(positions.len());
        for &p in positions {
            let s = self
                .subsystems
                .get(p)
                .ok_or_else(|| Error::Dimension(format!("subsystem index {p} out of range")))?;
            subs.push(s.clone());
        }
        CompositeSpace::new(subs)
    }
}

/// A linear operator on a [`CompositeSpace`].
///
/// Arithmetic through `+`, `-`, `*` panics if the operands live on different
/// spaces; use [`Operator::new`] and the fallible helpers when the spaces come
/// from user input.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: Arc<CompositeSpace>,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(space: Arc<CompositeSpace>, matrix: CMatrix) -> Result<Self> {
        if matrix.rows() != space.dim() || matrix.cols() != space.dim() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix on a space of dimension {}",
                matrix.rows(),
                matrix.cols(),
                space.dim()
            )));
        }
        Ok(Operator { space, matrix })
    }

    pub fn identity(space: Arc<CompositeSpace>) -> Self {
        let matrix = CMatrix::identity(space.dim());
        Operator { space, matrix }
    }

    pub fn zero(space: Arc<CompositeSpace>) -> Self {
        let matrix = CMatrix::zeros(space.dim(), space.dim());
        Operator { space, matrix }
    }

    pub fn space(&self) -> &Arc<CompositeSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, s: f64) -> Operator {
        Operator {
            space: self.space.clone(),
            matrix: self.matrix.scale_real(s),
        }
    }

    pub fn scale_complex(&self, s: C64) -> Operator {
        Operator {
            space: self.space.clone(),
            matrix: self.matrix.scale(s),
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.matrix.is_hermitian(tol)
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        self.assert_same_space(other);
        Operator {
            space: self.space.clone(),
            matrix: self.matrix.commutator(&other.matrix),
        }
    }

    pub fn same_space(&self, other: &Operator) -> bool {
        Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space
    }

    fn assert_same_space(&self, other: &Operator) {
        assert!(self.same_space(other), "operators act on different spaces");
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.assert_same_space(rhs);
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.assert_same_space(rhs);
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.assert_same_space(rhs);
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

/// Unit-trace, hermitian, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    /// Validates `op` against the trace, hermiticity and positivity tolerances.
    pub fn new(op: Operator, tol: &Tolerances) -> Result<Self> {
        let tr = op.matrix.trace();
        if (tr - c64(1.0, 0.0)).norm() > tol.trace {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} differs from 1")));
        }
        let dev = op.matrix.hermitian_deviation();
        if dev > tol.hermitian {
            return Err(Error::InvalidDensityMatrix(format!("hermiticity deviation {dev:e}")));
        }
        let min_ev = hermitian_eigenvalues(&op.matrix).first().copied().unwrap_or(0.0);
        if min_ev < -tol.psd {
            return Err(Error::InvalidDensityMatrix(format!("minimum eigenvalue {min_ev:e}")));
        }
        Ok(DensityMatrix { op })
    }

    pub(crate) fn new_unchecked(op: Operator) -> Self {
        DensityMatrix { op }
    }

    /// `|ψ⟩⟨ψ|` for a state vector, normalized here.
    pub fn pure(space: Arc<CompositeSpace>, psi: &[C64]) -> Result<Self> {
        if psi.len() != space.dim() {
            return Err(Error::Dimension(format!(
                "state of length {} on dimension {}",
                psi.len(),
                space.dim()
            )));
        }
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidDensityMatrix("zero or non-finite state vector".into()));
        }
        let unit: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Ok(DensityMatrix {
            op: Operator {
                space,
                matrix: CMatrix::outer(&unit, &unit),
            },
        })
    }

    /// Product-basis projector `|k⟩⟨k|`.
    pub fn basis_state(space: Arc<CompositeSpace>, k: usize) -> Result<Self> {
        let mut psi = alloc::vec![C64::zero(); space.dim()];
        *psi.get_mut(k)
            .ok_or_else(|| Error::Dimension(format!("basis index {k} out of range")))? = c64(1.0, 0.0);
        Self::pure(space, &psi)
    }

    pub fn maximally_mixed(space: Arc<CompositeSpace>) -> Self {
        let d = space.dim();
        let matrix = CMatrix::identity(d).scale_real(1.0 / d as f64);
        DensityMatrix {
            op: Operator { space, matrix },
        }
    }

    /// Tensor product, `self` on the leading factors.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        let mut subs = self.space().subsystems().to_vec();
        subs.extend(other.space().subsystems().iter().cloned());
        let space = Arc::new(CompositeSpace::new(subs)?);
        let matrix = self.matrix().kron(other.matrix());
        Ok(DensityMatrix {
            op: Operator { space, matrix },
        })
    }

    pub fn as_operator(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.op.matrix
    }

    pub fn space(&self) -> &Arc<CompositeSpace> {
        &self.op.space
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.op.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Trace distance `½‖ρ - σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.space().dim() != other.space().dim() {
            return Err(Error::Dimension("trace distance between different spaces".into()));
        }
        let diff = &self.op.matrix - &other.op.matrix;
        Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|v| v.abs()).sum::<f64>())
    }
}

fn single_space(spec: SubsystemSpec) -> Arc<CompositeSpace> {
    Arc::new(CompositeSpace::single(spec))
}

/// Bosonic annihilation operator on a single mode with Fock cutoff `n`.
pub fn annihilation(cutoff: usize) -> Operator {
    let d = cutoff + 1;
    let matrix = CMatrix::from_fn(d, d, |i, j| {
        if j == i + 1 {
            c64((j as f64).sqrt(), 0.0)
        } else {
            C64::zero()
        }
    });
    Operator {
        space: single_space(SubsystemSpec::boson("mode", cutoff)),
        matrix,
    }
}

/// Field quadratures `x = (a† + a)/√2`, `p = i(a† − a)/√2`.
pub fn quadratures(cutoff: usize) -> (Operator, Operator) {
    let a = annihilation(cutoff);
    let ad = a.adjoint();
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let x = (&ad + &a).scale(s);
    let p = (&ad - &a).scale_complex(c64(0.0, s));
    (x, p)
}

/// Two-level operators in the `(|g⟩, |e⟩)` basis.
#[derive(Debug, Clone)]
pub struct QubitOps {
    pub sigma_minus: Operator,
    pub sigma_plus: Operator,
    pub sigma_y: Operator,
    pub sigma_z: Operator,
    /// Excited-state projector `|e⟩⟨e|`.
    pub excited: Operator,
}

pub fn qubit_ops() -> QubitOps {
    let space = single_space(SubsystemSpec::qubit("qubit"));
    let z = C64::zero();
    let one = c64(1.0, 0.0);
    let mk = |m: [C64; 4]| Operator {
        space: space.clone(),
        matrix: CMatrix::from_row_major(2, 2, m.to_vec()),
    };
    // σ+ = |e⟩⟨g| has its entry at (row e=1, col g=0)
    let sigma_plus = mk([z, z, one, z]);
    let sigma_minus = sigma_plus.adjoint();
    let sigma_y = (&sigma_minus - &sigma_plus).scale_complex(c64(0.0, 1.0));
    let excited = mk([z, z, z, one]);
    let sigma_z = mk([-one, z, z, one]);
    QubitOps {
        sigma_minus,
        sigma_plus,
        sigma_y,
        sigma_z,
        excited,
    }
}

/// Lifts a single-subsystem operator to `space`, acting at `position`.
pub fn embed(op: &Operator, space: &Arc<CompositeSpace>, position: usize) -> Result<Operator> {
    let target = space
        .subsystems()
        .get(position)
        .ok_or_else(|| Error::Dimension(format!("position {position} out of range for {} factors", space.len())))?;
    if op.dim() != target.dim() {
        return Err(Error::Dimension(format!(
            "operator of dimension {} cannot act on `{}` of dimension {}",
            op.dim(),
            target.label,
            target.dim()
        )));
    }
    let mut matrix = CMatrix::identity(1);
    for (k, sub) in space.subsystems().iter().enumerate() {
        let factor = if k == position {
            op.matrix.clone()
        } else {
            CMatrix::identity(sub.dim())
        };
        matrix = matrix.kron(&factor);
    }
    Ok(Operator {
        space: space.clone(),
        matrix,
    })
}

/// `Tr(op · ρ)`.
pub fn expectation(op: &Operator, rho: &DensityMatrix) -> Result<C64> {
    if op.dim() != rho.space().dim() {
        return Err(Error::Dimension(format!(
            "operator of dimension {} against a state of dimension {}",
            op.dim(),
            rho.space().dim()
        )));
    }
    let d = op.dim();
    let a = &op.matrix;
    let r = rho.matrix();
    let mut acc = C64::zero();
    for i in 0..d {
        for j in 0..d {
            acc += a[(i, j)] * r[(j, i)];
        }
    }
    Ok(acc)
}

/// Reduced state on the subsystems listed in `keep`.
///
/// The result's factors appear in ascending position order regardless of the
/// order given.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::Usage(
            "partial trace needs at least one subsystem to keep".into(),
        ));
    }
    let space = rho.space();
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&k| k >= space.len()) {
        return Err(Error::Dimension(format!("subsystem index {bad} out of range")));
    }
    let dims = space.dims();
    let strides = space.strides();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let reduced_space = Arc::new(space.subspace(&keep)?);
    let reduced_strides = reduced_space.strides();
    let rd = reduced_space.dim();
    let digit = |idx: usize, k: usize| (idx / strides[k]) % dims[k];
    let reduced_index = |idx: usize| {
        keep.iter()
            .zip(&reduced_strides)
            .map(|(&k, &s)| digit(idx, k) * s)
            .sum::<usize>()
    };

    let d = space.dim();
    let m = rho.matrix();
    let mut out = CMatrix::zeros(rd, rd);
    for i in 0..d {
        let ri = reduced_index(i);
        for j in 0..d {
            if traced.iter().all(|&k| digit(i, k) == digit(j, k)) {
                out[(ri, reduced_index(j))] += m[(i, j)];
            }
        }
    }
    Ok(DensityMatrix::new_unchecked(Operator {
        space: reduced_space,
        matrix: out,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn r(x: f64) -> C64 {
        c64(x, 0.0)
    }

    #[test]
    fn ladder_matrix_elements() {
        let a1 = annihilation(1);
        assert_eq!(
            a1.matrix(),
            &CMatrix::from_row_major(2, 2, vec![r(0.0), r(1.0), r(0.0), r(0.0)])
        );
        let a2 = annihilation(2);
        assert_eq!(a2.matrix()[(0, 1)], r(1.0));
        assert_eq!(a2.matrix()[(1, 2)], r(2f64.sqrt()));
        assert_eq!(annihilation(0).matrix(), &CMatrix::zeros(1, 1));
    }

    #[test]
    fn number_operator_is_exactly_diagonal() {
        for n in 0..6 {
            let a = annihilation(n);
            let num = &a.adjoint() * &a;
            for i in 0..=n {
                for j in 0..=n {
                    let expect = if i == j { r(i as f64) } else { r(0.0) };
                    assert!((num.matrix()[(i, j)] - expect).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn quadratures_at_cutoff_one() {
        let (x, p) = quadratures(1);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(
            x.matrix(),
            &CMatrix::from_row_major(2, 2, vec![r(0.0), r(s), r(s), r(0.0)])
        );
        assert!(x.is_hermitian(0.0) && p.is_hermitian(0.0));
    }

    #[test]
    fn canonical_commutator_with_cutoff_artifact() {
        // direct evaluation at N = 3: [x, p] = i on |0..2⟩ and −iN on |3⟩
        let (x, p) = quadratures(3);
        let c = x.commutator(&p);
        for i in 0..4 {
            let expect = if i < 3 { c64(0.0, 1.0) } else { c64(0.0, -3.0) };
            assert!((c.matrix()[(i, i)] - expect).norm() < 1e-14, "entry {i}");
        }
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(c.matrix()[(i, j)].norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn pauli_identities() {
        let q = qubit_ops();
        let id = Operator::identity(q.sigma_y.space().clone());
        assert_eq!(&q.sigma_y * &q.sigma_y, id);
        assert_eq!(q.excited, (&q.sigma_z + &id).scale(0.5));
        assert_eq!(&q.sigma_plus * &q.sigma_minus, q.excited);
    }

    #[test]
    fn embed_dimensions_and_commutation() {
        let space =
            Arc::new(CompositeSpace::new(vec![SubsystemSpec::qubit("atom"), SubsystemSpec::boson("mode", 2)]).unwrap());
        let a = embed(&annihilation(2), &space, 1).unwrap();
        assert_eq!(a.dim(), 6);
        let sm = embed(&qubit_ops().sigma_minus, &space, 0).unwrap();
        assert!(a.commutator(&sm).matrix().max_abs() == 0.0);
        let id = embed(&Operator::identity(single_space(SubsystemSpec::qubit("q"))), &space, 0).unwrap();
        assert_eq!(id, Operator::identity(space.clone()));
        assert!(matches!(embed(&annihilation(3), &space, 1), Err(Error::Dimension(_))));
        assert!(matches!(embed(&annihilation(2), &space, 5), Err(Error::Dimension(_))));
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        let r = CompositeSpace::new(vec![SubsystemSpec::qubit("a"), SubsystemSpec::boson("a", 1)]);
        assert!(matches!(r, Err(Error::Usage(_))));
    }

    #[test]
    fn expectation_basics() {
        let space = single_space(SubsystemSpec::boson("mode", 4));
        let vac = DensityMatrix::basis_state(space.clone(), 0).unwrap();
        let a = annihilation(4);
        let n = Operator::new(space.clone(), (&a.adjoint() * &a).into_matrix()).unwrap();
        assert_eq!(expectation(&Operator::identity(space.clone()), &vac).unwrap(), r(1.0));
        assert_eq!(expectation(&n, &vac).unwrap(), r(0.0));
        assert!(matches!(expectation(&annihilation(2), &vac), Err(Error::Dimension(_))));
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let space = Arc::new(CompositeSpace::new(vec![SubsystemSpec::qubit("a"), SubsystemSpec::qubit("b")]).unwrap());
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityMatrix::pure(space, &[r(s), r(0.0), r(0.0), r(s)]).unwrap();
        let red = partial_trace(&bell, &[1]).unwrap();
        assert!(red.matrix().max_abs_diff(&CMatrix::identity(2).scale_real(0.5)) < 1e-15);
        assert!(matches!(partial_trace(&bell, &[]), Err(Error::Usage(_))));
        let all = partial_trace(&bell, &[0, 1]).unwrap();
        assert_eq!(all.matrix(), bell.matrix());
    }

    #[test]
    fn partial_trace_of_product_state() {
        let qa = DensityMatrix::new_unchecked(
            Operator::new(
                single_space(SubsystemSpec::qubit("a")),
                CMatrix::from_row_major(2, 2, vec![r(0.7), c64(0.1, 0.2), c64(0.1, -0.2), r(0.3)]),
            )
            .unwrap(),
        );
        let mb = DensityMatrix::new_unchecked(
            Operator::new(
                single_space(SubsystemSpec::boson("b", 2)),
                CMatrix::from_real_diagonal(&[0.5, 0.3, 0.2]),
            )
            .unwrap(),
        );
        let prod = qa.tensor(&mb).unwrap();
        let back_a = partial_trace(&prod, &[0]).unwrap();
        let back_b = partial_trace(&prod, &[1]).unwrap();
        assert!(back_a.matrix().max_abs_diff(qa.matrix()) < 1e-15);
        assert!(back_b.matrix().max_abs_diff(mb.matrix()) < 1e-15);
    }

    #[test]
    fn density_matrix_validation() {
        let space = single_space(SubsystemSpec::qubit("q"));
        let tol = Tolerances::default();
        let bad_trace = Operator::new(space.clone(), CMatrix::identity(2)).unwrap();
        assert!(DensityMatrix::new(bad_trace, &tol).is_err());
        let negative = Operator::new(space.clone(), CMatrix::from_real_diagonal(&[1.5, -0.5])).unwrap();
        assert!(DensityMatrix::new(negative, &tol).is_err());
        let ok = Operator::new(space, CMatrix::from_real_diagonal(&[0.25, 0.75])).unwrap();
        assert!(DensityMatrix::new(ok, &tol).is_ok());
    }
}
