//! Closed forms checked against an exact rational evaluation, plus algebraic
//! properties sampled at random.

use amendart_core::analytic::{
    amendart_one_photon, general_kernel_one_photon, intermediates, thermal_distribution, vacuum_coefficients,
};
use amendart_core::{BilinearKernelParams, RabiParams};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

fn q(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite input")
}

fn rational_one_photon(p: &RabiParams) -> (BigRational, BigRational) {
    let two = BigRational::from_integer(BigInt::from(2));
    let four = BigRational::from_integer(BigInt::from(4));
    let (omega, g, kappa, lambda, gamma) = (q(p.omega), q(p.g), q(p.kappa), q(p.lambda), q(p.gamma));
    let delta = &omega - BigRational::one();
    let gt = &gamma + (&kappa + &lambda) / &two;
    let big_g = &g * &g * &gt;
    let s = &delta * &delta + &gt * &gt;
    let alpha = &s + &two * &omega;
    let beta = &alpha * &alpha - &four * &omega * &omega;
    let t = &two * &big_g * (&alpha * (&kappa + &lambda) + &two * &big_g) + &lambda * &kappa * &beta;
    let n1 = &big_g / &t * (&two * &big_g + &lambda * &s);
    let e1 = &big_g / &t * (&two * &big_g + &kappa * &s);
    (n1, e1)
}

fn rational_kernel(omega: f64, g: f64, k: &BilinearKernelParams) -> (BigRational, BigRational) {
    let one = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    let four = BigRational::from_integer(BigInt::from(4));
    let half = &one / &two;
    let (om, g, kappa, dx, dp, dz) = (q(omega), q(g), q(k.kappa), q(k.dx), q(k.dp), q(k.dz));
    let dxp = &dx + &dp;
    let nu_p = &one + &two * &dz;
    let nu_m = &one - &two * &dz;
    let phi = &one / (&om * &om + &four * &dx * &dx + &nu_p * &nu_m * &dx / &dp);
    let den = &dxp + &two * &g * &g * &dx * &phi;
    let n1 = &half * (&one - &half * &kappa / &den);
    let e1 = &half * (&one - &half * &kappa * &om * &phi * &nu_p * (&dxp / &dp) / &den);
    (n1, e1)
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn circuit(omega: f64) -> RabiParams {
    RabiParams {
        omega,
        ..RabiParams::circuit_qed()
    }
}

#[test]
fn one_photon_values_match_exact_rationals() {
    for omega in [0.7, 0.85, 1.0, 1.15, 1.3] {
        let p = circuit(omega);
        let (n, e) = rational_one_photon(&p);
        let r = amendart_one_photon(&p).unwrap();
        assert!(rel(r.n1, n.to_f64().unwrap()) < 1e-14, "Omega = {omega}");
        assert!(rel(r.e1, e.to_f64().unwrap()) < 1e-14, "Omega = {omega}");
    }
    let r = amendart_one_photon(&circuit(1.0)).unwrap();
    assert!(rel(r.n1, 7.800312012477e-4) < 1e-12);
    assert!(rel(amendart_one_photon(&circuit(0.7)).unwrap().n1, 1.0789814415186e-3) < 1e-12);
    assert!(rel(amendart_one_photon(&circuit(1.3)).unwrap().n1, 5.900401227282e-4) < 1e-12);
}

#[test]
fn intermediates_at_resonance() {
    let i = intermediates(&circuit(1.0));
    assert_eq!(i.delta, 0.0);
    assert!(rel(i.gamma_total, 1.25e-6) < 1e-15);
    assert!(rel(i.s, 1.5625e-12) < 1e-15);
    assert!(i.t > 0.0);
}

#[test]
fn kernel_values_match_exact_rationals() {
    let cases = [
        (1.0, 0.05, BilinearKernelParams::thermal(1e-6, 0.0)),
        (
            1.0,
            0.05,
            BilinearKernelParams {
                mu: 0.0,
                kappa: 1e-2,
                dx: 5e-3,
                dp: 3e-3,
                dz: 1e-3,
            },
        ),
        (
            0.8,
            0.1,
            BilinearKernelParams {
                mu: 0.0,
                kappa: 0.1,
                dx: 0.05,
                dp: 0.04,
                dz: 0.01,
            },
        ),
    ];
    for (omega, g, k) in cases {
        let (n, e) = rational_kernel(omega, g, &k);
        let r = general_kernel_one_photon(omega, g, &k).unwrap();
        assert!(rel(r.n1, n.to_f64().unwrap()) < 1e-14);
        assert!(rel(r.e1, e.to_f64().unwrap()) < 1e-14);
    }
}

#[test]
fn kernel_with_master_equation_coefficients_matches_cavity_only_damping() {
    let k = BilinearKernelParams::thermal(1e-6, 0.0);
    let kernel = general_kernel_one_photon(1.0, 0.05, &k).unwrap();
    let p = RabiParams {
        lambda: 0.0,
        gamma: 0.0,
        ..circuit(1.0)
    };
    // λ = 0 leaves the nσz prefactor at 0/κ, which is fine
    let rabi = amendart_one_photon(&p).unwrap();
    assert!(rel(kernel.n1, rabi.n1) < 1e-10);
    assert!(rel(kernel.e1, rabi.e1) < 1e-10);
    assert!(rel(kernel.n1, 6.2421972534324e-4) < 1e-12);
    assert!(rel(kernel.e1, 6.2421972540566e-4) < 1e-12);
}

#[test]
fn vacuum_family_admits_only_zero_squeezing() {
    let kappa = 1e-3;
    for mu in [-kappa, -kappa / 2.0, -1e-9, 1e-9, kappa / 2.0, kappa] {
        assert!(!vacuum_coefficients(kappa, mu).check.admissible, "mu = {mu}");
    }
    let c = vacuum_coefficients(kappa, 0.0);
    assert!(c.check.admissible);
    assert_eq!(c.params, BilinearKernelParams::thermal(kappa, 0.0));
}

#[test]
fn thermal_distribution_is_geometric() {
    let p = thermal_distribution(0.5, 30).unwrap();
    for w in p.windows(2) {
        assert!(rel(w[1] / w[0], 1.0 / 3.0) < 1e-12);
    }
    let total: f64 = p.iter().sum();
    assert!((total - 1.0).abs() < 1e-14);
}

fn rates() -> impl Strategy<Value = f64> {
    prop_oneof![1e-8..1e-4f64, 1e-4..1e-1f64]
}

proptest! {
    #[test]
    fn difference_identity(omega in 0.2..2.0f64, g in 1e-3..0.2f64, kappa in rates(), lambda in rates(), gamma in 0.0..1e-3f64) {
        let p = RabiParams { omega, g, kappa, lambda, gamma, nbar: 0.0 };
        let r = amendart_one_photon(&p).unwrap();
        let i = r.intermediates;
        let expected = i.big_g / i.t * i.s * (kappa - lambda);
        let diff = r.e1 - r.n1;
        prop_assert!((diff - expected).abs() <= 1e-9 * r.e1.abs().max(r.n1.abs()) + 1e-12 * expected.abs());
        if kappa > lambda {
            prop_assert!(diff >= 0.0);
        }
        if kappa < lambda {
            prop_assert!(diff <= 0.0);
        }
    }

    #[test]
    fn swapping_rates_swaps_observables(omega in 0.2..2.0f64, g in 1e-3..0.2f64, kappa in rates(), lambda in rates(), gamma in 0.0..1e-3f64) {
        let p = RabiParams { omega, g, kappa, lambda, gamma, nbar: 0.0 };
        let s = RabiParams { kappa: lambda, lambda: kappa, ..p };
        let a = amendart_one_photon(&p).unwrap();
        let b = amendart_one_photon(&s).unwrap();
        prop_assert!(rel(a.n1, b.e1) < 1e-13);
        prop_assert!(rel(a.e1, b.n1) < 1e-13);
    }

    #[test]
    fn dephasing_increases_excitations(omega in 0.5..1.5f64, g in 1e-3..0.1f64, kappa in rates(), lambda in rates(), f1 in 0.0..10.0f64, f2 in 0.0..10.0f64) {
        let (lo, hi) = if f1 < f2 { (f1, f2) } else { (f2, f1) };
        prop_assume!(hi - lo > 1e-6);
        let at = |gamma: f64| amendart_one_photon(&RabiParams { omega, g, kappa, lambda, gamma, nbar: 0.0 }).unwrap();
        let (a, b) = (at(lo * kappa), at(hi * kappa));
        prop_assert!(b.n1 >= a.n1 * (1.0 - 1e-13));
        prop_assert!(b.e1 >= a.e1 * (1.0 - 1e-13));
    }

    #[test]
    fn admissible_kernels_give_values_in_open_half_interval(
        omega in 0.2..2.0f64, g in 1e-3..0.3f64, kappa in 1e-6..1e-1f64,
        ex in 0.0..1.0f64, ep in 0.0..1.0f64, z in -1.0..1.0f64,
    ) {
        let quarter = kappa / 4.0;
        let dx = quarter * (1.0 + 4.0 * ex);
        let dp = quarter * (1.0 + 4.0 * ep);
        // largest |Dz| keeping Dp·Dx − Dz² ≥ (κ/4)²
        let dz = z * (dp * dx - quarter * quarter).max(0.0).sqrt() * 0.999;
        let k = BilinearKernelParams { mu: 0.0, kappa, dx, dp, dz };
        prop_assume!(amendart_core::liouvillian::check_positivity_condition(&k).admissible);
        let r = general_kernel_one_photon(omega, g, &k).unwrap();
        prop_assert!(r.n1 > 0.0 && r.n1 < 0.5);
        prop_assert!(r.e1 > 0.0 && r.e1 < 0.5);
        prop_assert!(r.positive);
    }

    #[test]
    fn rational_oracle_agrees_everywhere(omega in 0.2..2.0f64, g in 1e-3..0.2f64, kappa in rates(), lambda in rates(), gamma in 0.0..1e-3f64) {
        let p = RabiParams { omega, g, kappa, lambda, gamma, nbar: 0.0 };
        let (n, e) = rational_one_photon(&p);
        prop_assume!(!n.is_zero());
        let r = amendart_one_photon(&p).unwrap();
        prop_assert!(rel(r.n1, n.to_f64().unwrap()) < 1e-13);
        prop_assert!(rel(r.e1, e.to_f64().unwrap()) < 1e-13);
    }
}
