use cascade_core::dynamics::{evolve_with, EvolveOptions};
use cascade_core::gksl::heff_coefficients;
use cascade_core::{
    build_theta, cascade_generator, coupling_matrix, coupling_matrix_oracle, design_pruned,
    gksl_decompose, gksl_generator, transfer_matrix, xi_profile, xi_profile_closed, BeamSplitter, DimensionCap,
    NetworkSpec, RegularSpec, TruncatedState, C64,
};
use core::f64::consts::{FRAC_PI_2, TAU};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_network(rng: &mut ChaCha8Rng, sites: usize, loss: f64) -> NetworkSpec {
    let mut pairs = Vec::new();
    for m in 1..sites {
        for mp in m + 1..=sites {
            let bs = BeamSplitter::new(rng.gen_range(0.0..=1.0), rng.gen_range(0.0..TAU)).unwrap();
            pairs.push((m, mp, bs));
        }
    }
    NetworkSpec::from_elements(sites, rng.gen_range(0.2..2.0), loss, pairs).unwrap()
}

/// Reversing the site order of the first-neighbour Hamiltonian flips its sign.
#[test]
fn pruned_first_neighbour_hamiltonian_is_chiral() {
    for tau in [0.75, 0.8, 0.93] {
        let sites = 7;
        let design = design_pruned(1, tau, -FRAC_PI_2, sites - 1).unwrap();
        let net = design.to_regular(0.0, 1.3).unwrap().expand();
        let zeta = coupling_matrix(&net);
        let h = heff_coefficients(&zeta, net.gamma());
        let mut flipped = h.clone();
        for i in 0..sites {
            for j in 0..sites {
                flipped[(i, j)] = h[(sites - 1 - i, sites - 1 - j)];
            }
        }
        assert!((flipped + &h).norm() < 1e-12, "tau = {tau}");

        let form = gksl_decompose(&build_theta(&zeta, net.gamma()), &zeta).unwrap();
        assert!((form.heff.clone() - h).norm() < 1e-12);
    }
}

#[test]
fn designed_network_runs_through_every_stage() {
    let design = design_pruned(1, 0.8, 0.4, 3).unwrap();
    let net = design.to_regular(0.0, 1.0).unwrap().expand();
    let zeta = coupling_matrix(&net);
    assert!(zeta.max_abs_diff(&coupling_matrix_oracle(&net).unwrap()) < 1e-12);
    assert!((zeta.get(1, 2).norm() - 0.2f64.sqrt()).abs() < 1e-10);
    assert!(zeta.get(1, 3).norm() < 1e-10 && zeta.get(1, 4).norm() < 1e-10);

    let form = gksl_decompose(&build_theta(&zeta, 1.0), &zeta).unwrap();
    let cascade = cascade_generator(&net, 2, DimensionCap::default()).unwrap();
    let gksl = gksl_generator(&form, 2, DimensionCap::default()).unwrap();
    assert!(cascade.frobenius_distance(&gksl) < 1e-10);

    let rho0 = TruncatedState::excited(2, 4, &[1]).unwrap();
    let options = EvolveOptions {
        sample_every: 50,
        ..EvolveOptions::default()
    };
    let traj = evolve_with(&gksl, &rho0, 2.0, 1e-2, &options).unwrap();
    for state in &traj.states {
        let total: f64 = state.populations().iter().sum();
        assert!(total <= 1.0 + 1e-12);
    }
    assert!(traj.error_estimate.unwrap() < 1e-6);
}

#[test]
fn seeded_generator_equivalence_with_loss() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let sites = rng.gen_range(2..=4);
        let loss = if rng.gen_bool(0.5) { rng.gen_range(0.0..0.5) } else { 0.0 };
        let net = random_network(&mut rng, sites, loss);
        let zeta = coupling_matrix(&net);
        let form = gksl_decompose(&build_theta(&zeta, net.gamma()), &zeta).unwrap();
        let a = cascade_generator(&net, 2, DimensionCap::default()).unwrap();
        let b = gksl_generator(&form, 2, DimensionCap::default()).unwrap();
        assert!(a.frobenius_distance(&b) < 1e-10);
        assert!(a.trace_preservation_defect() < 1e-10);
    }
}

/// A regular network cut at order K is reproduced by powers of its transfer matrix.
#[test]
fn seeded_transfer_matrix_matches_engine() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let channels = rng.gen_range(1..=4);
        let mut taus: Vec<f64> = (0..channels - 1).map(|_| rng.gen_range(0.0..=1.0)).collect();
        taus.push(0.0);
        let phis: Vec<f64> = (0..channels).map(|_| rng.gen_range(0.0..TAU)).collect();
        let kmax = 12;
        let closed = xi_profile_closed(&transfer_matrix(&taus[..channels - 1], &phis).unwrap(), kmax).unwrap();

        let mut all_taus = taus.clone();
        all_taus.resize(kmax, 1.0);
        let mut all_phis = phis.clone();
        all_phis.resize(kmax, 0.0);
        let spec = RegularSpec::new(kmax + 1, &all_taus, &all_phis, 0.0, 1.0).unwrap();
        let engine = xi_profile(&spec, kmax).unwrap();
        for k in 1..=kmax {
            let diff: C64 = closed.get(k) - engine.get(k);
            assert!(diff.norm() < 1e-10, "K = {channels}, k = {k}");
        }
    }
}
