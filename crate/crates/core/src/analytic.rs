//! Closed-form one-photon results and related reference formulas.
//!
//! Everything is evaluated in double-double arithmetic: at circuit-QED rates
//! the denominator `T` is a sum of products spanning many orders of
//! magnitude.

use alloc::format;
use alloc::vec::Vec;

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::liouvillian::{check_positivity_condition, BilinearKernelParams, PositivityCheck};
use crate::models::RabiParams;

/// Auxiliary quantities of the one-photon formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticIntermediates {
    pub delta: f64,
    pub gamma_total: f64,
    pub big_g: f64,
    pub s: f64,
    pub alpha: f64,
    pub beta: f64,
    pub t: f64,
}

struct DdIntermediates {
    delta: Dd,
    gamma_total: Dd,
    big_g: Dd,
    s: Dd,
    alpha: Dd,
    beta: Dd,
    t: Dd,
}

fn dd_intermediates(p: &RabiParams) -> DdIntermediates {
    let omega = Dd::new(p.omega);
    let kappa = Dd::new(p.kappa);
    let lambda = Dd::new(p.lambda);
    let delta = omega + (-1.0);
    let gamma_total = Dd::new(p.gamma) + (kappa + lambda) * 0.5;
    let big_g = Dd::from_prod(p.g, p.g) * gamma_total;
    let s = delta.square() + gamma_total.square();
    let alpha = s + omega * 2.0;
    // α² − 4Ω² factored to avoid cancellation near s → 0
    let beta = s * (s + omega * 4.0);
    let t = big_g * 2.0 * (alpha * (kappa + lambda) + big_g * 2.0) + lambda * kappa * beta;
    DdIntermediates {
        delta,
        gamma_total,
        big_g,
        s,
        alpha,
        beta,
        t,
    }
}

pub fn intermediates(p: &RabiParams) -> AnalyticIntermediates {
    let d = dd_intermediates(p);
    AnalyticIntermediates {
        delta: d.delta.to_f64(),
        gamma_total: d.gamma_total.to_f64(),
        big_g: d.big_g.to_f64(),
        s: d.s.to_f64(),
        alpha: d.alpha.to_f64(),
        beta: d.beta.to_f64(),
        t: d.t.to_f64(),
    }
}

/// One-photon asymptotic photon number, atomic excitation and `⟨nσz⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnePhotonAmendart {
    pub n1: f64,
    pub e1: f64,
    pub nsz1: f64,
    pub intermediates: AnalyticIntermediates,
}

/// Closed-form one-photon values for zero-temperature reservoirs.
pub fn amendart_one_photon(p: &RabiParams) -> Result<OnePhotonAmendart> {
    p.validate()?;
    if p.nbar != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "closed forms need nbar = 0, got {}",
            p.nbar
        )));
    }
    let d = dd_intermediates(p);
    if d.t.is_zero() {
        return Err(Error::DegenerateParameters("T vanishes".into()));
    }
    let kl = Dd::new(p.kappa) + Dd::new(p.lambda);
    if kl.is_zero() {
        return Err(Error::DivisionByZero("kappa + lambda = 0 in the nσz prefactor".into()));
    }
    let ratio = d.big_g / d.t;
    let n1 = ratio * (d.big_g * 2.0 + d.s * p.lambda);
    let e1 = ratio * (d.big_g * 2.0 + d.s * p.kappa);
    let nsz1 = Dd::new(p.lambda) / kl * (e1 - n1);
    Ok(OnePhotonAmendart {
        n1: n1.to_f64(),
        e1: e1.to_f64(),
        nsz1: nsz1.to_f64(),
        intermediates: intermediates(p),
    })
}

/// Auxiliary quantities of the general-kernel formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelDerived {
    pub dxp: f64,
    pub nu_plus: f64,
    pub nu_minus: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOnePhoton {
    pub n1: f64,
    pub e1: f64,
    /// Both values strictly positive.
    pub positive: bool,
    pub derived: KernelDerived,
}

/// One-photon asymptotics of the Rabi model with the cavity damped by a
/// general bilinear kernel and a dissipation-free atom.
pub fn general_kernel_one_photon(omega: f64, g: f64, k: &BilinearKernelParams) -> Result<KernelOnePhoton> {
    if g == 0.0 {
        return Err(Error::DegenerateKernel("g = 0".into()));
    }
    if omega == 0.0 {
        return Err(Error::DegenerateKernel("Omega = 0".into()));
    }
    if k.dp == 0.0 {
        return Err(Error::DegenerateKernel("Dp = 0".into()));
    }
    let (dx, dp, dz) = (Dd::new(k.dx), Dd::new(k.dp), Dd::new(k.dz));
    let om = Dd::new(omega);
    let dxp = dx + dp;
    let nu_plus = dz * 2.0 + 1.0;
    let nu_minus = -(dz * 2.0) + 1.0;
    let phi_inv = om.square() + dx.square() * 4.0 + nu_plus * nu_minus * dx / dp;
    if phi_inv.is_zero() {
        return Err(Error::DegenerateKernel("phi diverges".into()));
    }
    let phi = phi_inv.recip();
    let q = dxp + Dd::from_prod(g, g) * 2.0 * dx * phi;
    if q.is_zero() {
        return Err(Error::DegenerateKernel("Dxp + 2g²Dxφ = 0".into()));
    }
    let kappa = Dd::new(k.kappa);
    let n1 = (Dd::ONE - kappa * 0.5 / q) * 0.5;
    let e1 = (Dd::ONE - kappa * 0.5 * om * phi * nu_plus * (dxp / dp) / q) * 0.5;
    let (n1, e1) = (n1.to_f64(), e1.to_f64());
    Ok(KernelOnePhoton {
        n1,
        e1,
        positive: n1 > 0.0 && e1 > 0.0,
        derived: KernelDerived {
            dxp: dxp.to_f64(),
            nu_plus: nu_plus.to_f64(),
            nu_minus: nu_minus.to_f64(),
            phi: phi.to_f64(),
        },
    })
}

/// A member of the vacuum-preserving kernel family and its admissibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumCandidate {
    pub params: BilinearKernelParams,
    pub check: PositivityCheck,
}

/// Kernel coefficients `D′_p = (κ+μ)/4`, `D′_x = (κ−μ)/4`, `D′_z = 0`, which keep
/// the vacuum stationary; only `μ = 0` passes the positivity condition.
pub fn vacuum_coefficients(kappa: f64, mu: f64) -> VacuumCandidate {
    let params = BilinearKernelParams {
        mu,
        kappa,
        dx: (kappa - mu) / 4.0,
        dp: (kappa + mu) / 4.0,
        dz: 0.0,
    };
    VacuumCandidate {
        params,
        check: check_positivity_condition(&params),
    }
}

/// Geometric photon distribution with mean `nbar`, renormalized on `0..=cutoff`.
pub fn thermal_distribution(nbar: f64, cutoff: usize) -> Result<Vec<f64>> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "nbar must be finite and ≥ 0, got {nbar}"
        )));
    }
    let r = nbar / (1.0 + nbar);
    let mut p: Vec<f64> = (0..=cutoff).map(|n| r.powi(n as i32)).collect();
    let z = crate::linalg::compensated_sum(p.iter().copied());
    for v in &mut p {
        *v /= z;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circuit(omega: f64) -> RabiParams {
        RabiParams {
            omega,
            ..RabiParams::circuit_qed()
        }
    }

    #[test]
    fn resonance_values() {
        let r = amendart_one_photon(&circuit(1.0)).unwrap();
        assert!((r.n1 - 7.800312012477e-4).abs() < 1e-15);
        assert_eq!(r.n1, r.e1);
        assert_eq!(r.nsz1, 0.0);
    }

    #[test]
    fn detuned_values_decrease_with_omega() {
        let lo = amendart_one_photon(&circuit(0.7)).unwrap().n1;
        let hi = amendart_one_photon(&circuit(1.3)).unwrap().n1;
        assert!((lo - 1.0789814415186e-3).abs() < 1e-15);
        assert!((hi - 5.900401227282e-4).abs() < 1e-15);
        assert!(lo > hi);
    }

    #[test]
    fn zero_coupling_gives_zero() {
        let p = RabiParams {
            g: 0.0,
            ..RabiParams::circuit_qed()
        };
        let r = amendart_one_photon(&p).unwrap();
        assert_eq!((r.n1, r.e1), (0.0, 0.0));
    }

    #[test]
    fn degenerate_inputs() {
        let p = RabiParams {
            kappa: 0.0,
            lambda: 0.0,
            gamma: 0.0,
            ..RabiParams::circuit_qed()
        };
        assert!(matches!(amendart_one_photon(&p), Err(Error::DegenerateParameters(_))));
        let p = RabiParams {
            kappa: 0.0,
            lambda: 0.0,
            ..RabiParams::circuit_qed()
        };
        assert!(matches!(amendart_one_photon(&p), Err(Error::DivisionByZero(_))));
        let p = RabiParams {
            nbar: 0.1,
            ..RabiParams::circuit_qed()
        };
        assert!(matches!(amendart_one_photon(&p), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn kernel_with_master_equation_coefficients() {
        let k = BilinearKernelParams::thermal(1e-6, 0.0);
        let r = general_kernel_one_photon(1.0, 0.05, &k).unwrap();
        assert!((r.n1 - 6.2421972534324e-4).abs() < 1e-15);
        assert!((r.e1 - 6.2421972540566e-4).abs() < 1e-15);
        assert!(r.positive);
        assert!((r.derived.phi - 1.0 / (2.0 + 1e-12 / 4.0)).abs() < 1e-15);
    }

    #[test]
    fn kernel_small_coupling_and_guards() {
        let k = BilinearKernelParams::thermal(1e-6, 0.0);
        assert!(general_kernel_one_photon(1.0, 1e-6, &k).unwrap().n1 < 1e-9);
        assert!(matches!(
            general_kernel_one_photon(1.0, 0.0, &k),
            Err(Error::DegenerateKernel(_))
        ));
        let flat = BilinearKernelParams { dp: 0.0, ..k };
        assert!(matches!(
            general_kernel_one_photon(1.0, 0.05, &flat),
            Err(Error::DegenerateKernel(_))
        ));
    }

    #[test]
    fn vacuum_family() {
        let k = 1e-6;
        let c = vacuum_coefficients(k, 0.0);
        assert!(c.check.admissible);
        assert_eq!(c.check.margin, 0.0);
        assert!(!vacuum_coefficients(k, k / 2.0).check.admissible);
        assert!(!vacuum_coefficients(k, -k / 2.0).check.admissible);
    }

    #[test]
    fn thermal_distributions() {
        assert_eq!(
            thermal_distribution(0.0, 4).unwrap(),
            alloc::vec![1.0, 0.0, 0.0, 0.0, 0.0]
        );
        let p = thermal_distribution(0.5, 20).unwrap();
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-4 && (p[1] - 2.0 / 9.0).abs() < 1e-4);
        let p = thermal_distribution(0.5, 30).unwrap();
        let mean: f64 = p.iter().enumerate().map(|(n, v)| n as f64 * v).sum();
        assert!((mean - 0.5).abs() < 1e-6);
        assert!(thermal_distribution(-1.0, 3).is_err());
    }
}
