//! Rabi-type Hamiltonians and Lindblad dissipators.
//!
//! Frequencies are in units of the cavity frequency, which is fixed to 1.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::hilbert::{annihilation, embed, quadratures, qubit_ops, CompositeSpace, Operator, SubsystemSpec};

/// Physical parameters of the atom–cavity system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiParams {
    /// Atomic transition frequency.
    pub omega: f64,
    /// Atom–field coupling constant.
    pub g: f64,
    /// Cavity relaxation rate.
    pub kappa: f64,
    /// Atomic relaxation rate.
    pub lambda: f64,
    /// Pure dephasing rate.
    pub gamma: f64,
    /// Mean thermal photon number of the reservoirs.
    pub nbar: f64,
}

impl RabiParams {
    /// Resonant weak-coupling regime: κ = λ = 1e-6, γ = λ/4, g = 0.05, n̄ = 0.
    pub fn circuit_qed() -> Self {
        RabiParams {
            omega: 1.0,
            g: 0.05,
            kappa: 1e-6,
            lambda: 1e-6,
            gamma: 2.5e-7,
            nbar: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("omega", self.omega),
            ("g", self.g),
            ("kappa", self.kappa),
            ("lambda", self.lambda),
            ("gamma", self.gamma),
            ("nbar", self.nbar),
        ];
        for (name, v) in named {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} is not finite")));
            }
        }
        for (name, v) in &named[2..] {
            if *v < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be non-negative")));
            }
        }
        Ok(())
    }
}

impl Default for RabiParams {
    fn default() -> Self {
        Self::circuit_qed()
    }
}

/// Extra element coupled to the true atom–mode pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Parasitic {
    None,
    /// Second cavity mode of frequency ν̃, coupled with √ν̃·g and damped at ν̃κ.
    Mode {
        nu_tilde: f64,
    },
    /// Second atom of frequency Ω̃, coupled to the same quadrature with g.
    Atom {
        omega_tilde: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingForm {
    /// Keeps the anti-rotating term.
    Full,
    /// Drops the anti-rotating term.
    Rwa,
}

impl FromStr for CouplingForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(CouplingForm::Full),
            "rwa" => Ok(CouplingForm::Rwa),
            other => Err(Error::InvalidParameter(format!("unknown coupling form `{other}`"))),
        }
    }
}

impl fmt::Display for CouplingForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CouplingForm::Full => "full",
            CouplingForm::Rwa => "rwa",
        })
    }
}

/// Named configurations: the bare system and the four parasitic set-ups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Bare,
    /// Parasitic mode at twice the cavity frequency.
    A,
    /// Parasitic mode at half the cavity frequency.
    B,
    /// Parasitic atom at Ω̃ = 0.2.
    C,
    /// Parasitic atom at Ω̃ = 1.8.
    D,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [Scenario::Bare, Scenario::A, Scenario::B, Scenario::C, Scenario::D];

    pub fn parasitic(self) -> Parasitic {
        match self {
            Scenario::Bare => Parasitic::None,
            Scenario::A => Parasitic::Mode { nu_tilde: 2.0 },
            Scenario::B => Parasitic::Mode { nu_tilde: 0.5 },
            Scenario::C => Parasitic::Atom { omega_tilde: 0.2 },
            Scenario::D => Parasitic::Atom { omega_tilde: 1.8 },
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scenario::Bare => "bare",
            Scenario::A => "a",
            Scenario::B => "b",
            Scenario::C => "c",
            Scenario::D => "d",
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bare" => Ok(Scenario::Bare),
            "a" => Ok(Scenario::A),
            "b" => Ok(Scenario::B),
            "c" => Ok(Scenario::C),
            "d" => Ok(Scenario::D),
            other => Err(Error::InvalidParameter(format!("unknown scenario `{other}`"))),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One `rate · D[jump]` contribution to the generator.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladTerm {
    pub jump: Operator,
    pub rate: f64,
}

/// Positions of the physical parties inside the model's tensor product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelLayout {
    pub atom: usize,
    pub mode: usize,
    pub parasitic: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub params: RabiParams,
    pub parasitic: Parasitic,
    pub coupling: CouplingForm,
    /// Fock cutoff applied to every bosonic mode.
    pub cutoff: usize,
}

impl ModelSpec {
    pub fn new(params: RabiParams, parasitic: Parasitic, coupling: CouplingForm, cutoff: usize) -> Self {
        ModelSpec {
            params,
            parasitic,
            coupling,
            cutoff,
        }
    }

    pub fn scenario(scenario: Scenario, params: RabiParams, coupling: CouplingForm, cutoff: usize) -> Self {
        Self::new(params, scenario.parasitic(), coupling, cutoff)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        match self.parasitic {
            Parasitic::Mode { nu_tilde } if !(nu_tilde > 0.0 && nu_tilde.is_finite()) => Err(Error::InvalidParameter(
                format!("parasitic mode frequency {nu_tilde} must be positive"),
            )),
            Parasitic::Atom { omega_tilde } if !omega_tilde.is_finite() => Err(Error::InvalidParameter(format!(
                "parasitic atom frequency {omega_tilde} is not finite"
            ))),
            _ => Ok(()),
        }
    }

    /// `atom ⊗ mode`, `atom ⊗ mode ⊗ parasitic_mode` or `atom ⊗ parasitic_atom ⊗ mode`.
    pub fn layout(&self) -> ModelLayout {
        match self.parasitic {
            Parasitic::None => ModelLayout {
                atom: 0,
                mode: 1,
                parasitic: None,
            },
            Parasitic::Mode { .. } => ModelLayout {
                atom: 0,
                mode: 1,
                parasitic: Some(2),
            },
            Parasitic::Atom { .. } => ModelLayout {
                atom: 0,
                mode: 2,
                parasitic: Some(1),
            },
        }
    }

    /// Total excitation number: photons plus atomic excitations of every party.
    pub fn total_excitation(&self) -> Result<Operator> {
        let space = build_space(self);
        let layout = self.layout();
        let mut total = number_on(&space, layout.mode, self.cutoff)?;
        total = &total + &embed(&qubit_ops().excited, &space, layout.atom)?;
        match (self.parasitic, layout.parasitic) {
            (Parasitic::Mode { .. }, Some(p)) => total = &total + &number_on(&space, p, self.cutoff)?,
            (Parasitic::Atom { .. }, Some(p)) => total = &total + &embed(&qubit_ops().excited, &space, p)?,
            _ => {}
        }
        Ok(total)
    }

    /// Photon number of the true mode.
    pub fn photon_number(&self) -> Result<Operator> {
        number_on(&build_space(self), self.layout().mode, self.cutoff)
    }

    /// Excited-state projector of the true atom.
    pub fn atom_excitation(&self) -> Result<Operator> {
        embed(&qubit_ops().excited, &build_space(self), self.layout().atom)
    }
}

fn number_on(space: &Arc<CompositeSpace>, position: usize, cutoff: usize) -> Result<Operator> {
    let a = annihilation(cutoff);
    embed(&(&a.adjoint() * &a), space, position)
}

pub fn build_space(spec: &ModelSpec) -> Arc<CompositeSpace> {
    let k = spec.cutoff;
    let subs = match spec.parasitic {
        Parasitic::None => vec![SubsystemSpec::qubit("atom"), SubsystemSpec::boson("mode", k)],
        Parasitic::Mode { .. } => vec![
            SubsystemSpec::qubit("atom"),
            SubsystemSpec::boson("mode", k),
            SubsystemSpec::boson("parasitic_mode", k),
        ],
        Parasitic::Atom { .. } => vec![
            SubsystemSpec::qubit("atom"),
            SubsystemSpec::qubit("parasitic_atom"),
            SubsystemSpec::boson("mode", k),
        ],
    };
    Arc::new(CompositeSpace::new(subs).expect("model labels are distinct"))
}

/// Coupling of the mode at `mode_pos` with the qubit at `qubit_pos`, strength `g`.
///
/// `Full` is `g·p·σ_y`. Expanding `p σ_y = (a†σ+ + aσ− − a†σ− − aσ+)/√2`, `Rwa`
/// keeps only the excitation-conserving part `−(g/√2)(a†σ− + aσ+)`.
fn coupling_term(
    space: &Arc<CompositeSpace>,
    mode_pos: usize,
    qubit_pos: usize,
    g: f64,
    cutoff: usize,
    form: CouplingForm,
) -> Result<Operator> {
    let q = qubit_ops();
    match form {
        CouplingForm::Full => {
            let (_, p) = quadratures(cutoff);
            let p = embed(&p, space, mode_pos)?;
            let sy = embed(&q.sigma_y, space, qubit_pos)?;
            Ok((&p * &sy).scale(g))
        }
        CouplingForm::Rwa => {
            let a = embed(&annihilation(cutoff), space, mode_pos)?;
            let sm = embed(&q.sigma_minus, space, qubit_pos)?;
            let sp = embed(&q.sigma_plus, space, qubit_pos)?;
            let rotating = &(&a.adjoint() * &sm) + &(&a * &sp);
            Ok(rotating.scale(-g * core::f64::consts::FRAC_1_SQRT_2))
        }
    }
}

/// Hamiltonian `n + ΩE + g p σ_y` plus the parasitic element, if any.
pub fn build_hamiltonian(spec: &ModelSpec) -> Result<Operator> {
    spec.validate()?;
    let space = build_space(spec);
    let layout = spec.layout();
    let p = &spec.params;
    let q = qubit_ops();

    let mut h = number_on(&space, layout.mode, spec.cutoff)?;
    h = &h + &embed(&q.excited, &space, layout.atom)?.scale(p.omega);
    h = &h + &coupling_term(&space, layout.mode, layout.atom, p.g, spec.cutoff, spec.coupling)?;

    match (spec.parasitic, layout.parasitic) {
        (Parasitic::Mode { nu_tilde }, Some(pm)) => {
            h = &h + &number_on(&space, pm, spec.cutoff)?.scale(nu_tilde);
            let gc = nu_tilde.sqrt() * p.g;
            h = &h + &coupling_term(&space, pm, layout.atom, gc, spec.cutoff, spec.coupling)?;
        }
        (Parasitic::Atom { omega_tilde }, Some(pa)) => {
            h = &h + &embed(&q.excited, &space, pa)?.scale(omega_tilde);
            h = &h + &coupling_term(&space, layout.mode, pa, p.g, spec.cutoff, spec.coupling)?;
        }
        _ => {}
    }
    Ok(h)
}

/// Jump operators with their rates. Zero-rate channels are omitted.
///
/// The true mode and atom see thermal reservoirs with occupation n̄ and the
/// atom dephases at γ/2·D[σz]. A parasitic mode is damped at ν̃κ at zero
/// temperature; a parasitic atom gets λ·D[σ̃−] + γ/2·D[σ̃z].
pub fn build_dissipators(spec: &ModelSpec) -> Result<Vec<LindbladTerm>> {
    spec.validate()?;
    let space = build_space(spec);
    let layout = spec.layout();
    let p = &spec.params;
    let q = qubit_ops();
    let a = embed(&annihilation(spec.cutoff), &space, layout.mode)?;
    let sm = embed(&q.sigma_minus, &space, layout.atom)?;
    let sz = embed(&q.sigma_z, &space, layout.atom)?;

    let mut terms = vec![
        LindbladTerm {
            jump: a.clone(),
            rate: p.kappa * (p.nbar + 1.0),
        },
        LindbladTerm {
            jump: a.adjoint(),
            rate: p.kappa * p.nbar,
        },
        LindbladTerm {
            jump: sm.clone(),
            rate: p.lambda * (p.nbar + 1.0),
        },
        LindbladTerm {
            jump: sm.adjoint(),
            rate: p.lambda * p.nbar,
        },
        LindbladTerm {
            jump: sz,
            rate: p.gamma / 2.0,
        },
    ];
    match (spec.parasitic, layout.parasitic) {
        (Parasitic::Mode { nu_tilde }, Some(pm)) => {
            let at = embed(&annihilation(spec.cutoff), &space, pm)?;
            terms.push(LindbladTerm {
                jump: at,
                rate: nu_tilde * p.kappa,
            });
        }
        (Parasitic::Atom { .. }, Some(pa)) => {
            terms.push(LindbladTerm {
                jump: embed(&q.sigma_minus, &space, pa)?,
                rate: p.lambda,
            });
            terms.push(LindbladTerm {
                jump: embed(&q.sigma_z, &space, pa)?,
                rate: p.gamma / 2.0,
            });
        }
        _ => {}
    }
    terms.retain(|t| t.rate > 0.0);
    Ok(terms)
}
