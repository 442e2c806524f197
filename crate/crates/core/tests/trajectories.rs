use amendart_core::hilbert::{annihilation, expectation, DensityMatrix};
use amendart_core::linalg::C64;
use amendart_core::liouvillian::model_generator;
use amendart_core::models::{build_dissipators, build_hamiltonian};
use amendart_core::steady_state::evolve;
use amendart_core::trajectories::{basis_vector, ensemble_average, run_stream, unravel};
use amendart_core::{CouplingForm, LindbladTerm, ModelSpec, Parasitic, RabiParams};

#[test]
fn first_jump_law_of_a_single_photon() {
    let kappa = 1.0;
    let a = annihilation(1);
    let n = &a.adjoint() * &a;
    let unr = unravel(&n, &[LindbladTerm { jump: a, rate: kappa }]).unwrap();
    let psi = basis_vector(2, 1).unwrap();
    let n_traj = 10_000;
    let records: Vec<_> = (0..n_traj)
        .map(|k| run_stream(&unr, &psi, 3.0, 0.05, 2024, k, std::slice::from_ref(&n)).unwrap())
        .collect();
    assert!(records.iter().all(|r| r.jump_times.len() <= 1));
    for t in [0.25, 0.5, 1.0, 2.0, 3.0] {
        let p = 1.0 - (-kappa * t).exp();
        let jumped = records
            .iter()
            .filter(|r| r.jump_times.first().is_some_and(|&s| s <= t))
            .count();
        let freq = jumped as f64 / n_traj as f64;
        let sigma = (p * (1.0 - p) / n_traj as f64).sqrt();
        assert!((freq - p).abs() < 3.0 * sigma, "t = {t}: {freq} vs {p}");
    }
}

#[test]
fn ensemble_mean_follows_the_decay_law() {
    let kappa = 0.5;
    let a = annihilation(1);
    let n = &a.adjoint() * &a;
    let unr = unravel(&n, &[LindbladTerm { jump: a, rate: kappa }]).unwrap();
    let psi = basis_vector(2, 1).unwrap();
    let avg = ensemble_average(&unr, &psi, 6.0, 0.1, 10_000, 7, &[n]).unwrap();
    assert!(!avg.degenerate);
    for (k, &t) in avg.times.iter().enumerate() {
        let exact = (-kappa * t).exp();
        let binomial = (exact * (1.0 - exact) / 1e4).sqrt();
        assert!((avg.mean[0][k] - exact).abs() <= 3.0 * binomial + 1e-12, "t = {t}");
    }
}

#[test]
fn standard_error_shrinks_with_ensemble_size() {
    let a = annihilation(1);
    let n = &a.adjoint() * &a;
    let unr = unravel(&n, &[LindbladTerm { jump: a, rate: 1.0 }]).unwrap();
    let psi = basis_vector(2, 1).unwrap();
    let small = ensemble_average(&unr, &psi, 1.0, 0.25, 2000, 1, std::slice::from_ref(&n)).unwrap();
    let large = ensemble_average(&unr, &psi, 1.0, 0.25, 4000, 1, &[n]).unwrap();
    for k in 1..small.times.len() {
        let ratio = small.std_err[0][k] / large.std_err[0][k];
        let target = 2f64.sqrt();
        assert!(ratio > target / 1.5 && ratio < target * 1.5, "ratio {ratio}");
    }
}

#[test]
fn rabi_ensemble_agrees_with_the_master_equation() {
    let p = RabiParams {
        omega: 1.0,
        g: 0.3,
        kappa: 0.2,
        lambda: 0.2,
        gamma: 0.05,
        nbar: 0.0,
    };
    let spec = ModelSpec::new(p, Parasitic::None, CouplingForm::Full, 1);
    let h = build_hamiltonian(&spec).unwrap();
    let terms = build_dissipators(&spec).unwrap();
    let unr = unravel(&h, &terms).unwrap();
    let observables = [spec.photon_number().unwrap(), spec.atom_excitation().unwrap()];
    // atom excited, cavity empty
    let excited = spec.layout().atom;
    assert_eq!(excited, 0);
    let psi: Vec<C64> = basis_vector(4, 2).unwrap();
    let dt = 0.5;
    let avg = ensemble_average(&unr, &psi, 10.0, dt, 4000, 99, &observables).unwrap();

    let l = model_generator(&spec).unwrap();
    let mut rho = DensityMatrix::basis_state(l.space().clone(), 2).unwrap();
    for (k, &t) in avg.times.iter().enumerate() {
        if k > 0 {
            rho = evolve(&l, &rho, t - avg.times[k - 1], 1e-11).unwrap().rho;
        }
        for (o, op) in observables.iter().enumerate() {
            let exact = expectation(op, &rho).unwrap().re;
            let tol = 3.0 * avg.std_err[o][k] + 1e-9;
            assert!(
                (avg.mean[o][k] - exact).abs() <= tol,
                "t = {t}, observable {o}: {} vs {exact}",
                avg.mean[o][k]
            );
        }
    }
}
