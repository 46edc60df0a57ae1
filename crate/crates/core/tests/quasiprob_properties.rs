use daemonic_core::quantum::linalg::real_diag;
use daemonic_core::quantum::random::random_density_with;
use daemonic_core::quantum::{
    random_unitary, rng_stream, DensityMatrix, Hamiltonian, Unitary,
};
use daemonic_core::quasiprob::{
    expected_utility, mean_work, prefer_sets, work_quasiprob, Atom, WorkQuasiprobability,
};
use daemonic_core::utility::{Utility, UtilityFunction};
use proptest::prelude::*;
use rand::Rng;

fn random_hamiltonian<R: Rng>(dim: usize, rng: &mut R) -> Hamiltonian {
    let mut energies: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
    energies.sort_by(f64::total_cmp);
    for k in 1..dim {
        if energies[k] - energies[k - 1] < 1e-3 {
            energies[k] = energies[k - 1] + 1e-3;
        }
    }
    let basis = random_unitary(dim, rng.random()).matrix().clone();
    Hamiltonian::new(energies, basis).unwrap()
}

struct Instance {
    rho: DensityMatrix,
    u: Unitary,
    h: Hamiltonian,
}

fn instance(seed: u64, index: u64) -> Instance {
    let mut rng = rng_stream(seed, index);
    let dim = 2 + (index % 3) as usize;
    let h = random_hamiltonian(dim, &mut rng);
    let rho = random_density_with(dim, dim, &mut rng);
    let u = random_unitary(dim, rng.random());
    Instance { rho, u, h }
}

#[test]
fn normalization_and_first_moment_on_random_instances() {
    let mut rng = rng_stream(7, u64::MAX);
    for index in 0..1000 {
        let Instance { rho, u, h } = instance(7, index);
        let q: f64 = rng.random_range(0.0..=1.0);
        let q2: f64 = rng.random_range(0.0..=1.0);
        let p = work_quasiprob(&rho, &u, &h, q).unwrap();
        let p2 = work_quasiprob(&rho, &u, &h, q2).unwrap();
        assert!((p.total_weight() - 1.0).abs() <= 1e-10, "instance {index}");
        assert!(p.atoms().len() <= h.dim().pow(3));
        assert!(p.atoms().windows(2).all(|w| w[0].work < w[1].work));
        assert!((mean_work(&p) - mean_work(&p2)).abs() <= 1e-9, "instance {index}");
    }
}

#[test]
fn incoherent_states_have_nonnegative_weights() {
    for index in 0..1000 {
        let Instance { rho, u, h } = instance(11, index);
        // Keep only the energy-basis populations.
        let pops: Vec<f64> = (0..h.dim())
            .map(|k| h.to_energy_basis(rho.matrix())[(k, k)].re)
            .collect();
        let incoherent = DensityMatrix::new(h.from_energy_basis(&real_diag(&pops))).unwrap();
        let p = work_quasiprob(&incoherent, &u, &h, 0.5).unwrap();
        assert!(p.atoms().iter().all(|a| a.weight >= -1e-15), "instance {index}");
    }
}

#[test]
fn q_and_one_minus_q_give_the_same_atoms() {
    let mut rng = rng_stream(13, u64::MAX);
    for index in 0..300 {
        let Instance { rho, u, h } = instance(13, index);
        let q: f64 = rng.random_range(0.0..=1.0);
        let a = work_quasiprob(&rho, &u, &h, q).unwrap();
        let b = work_quasiprob(&rho, &u, &h, 1.0 - q).unwrap();
        assert_eq!(a.atoms().len(), b.atoms().len(), "instance {index}");
        for (x, y) in a.atoms().iter().zip(b.atoms()) {
            assert!((x.work - y.work).abs() <= 1e-12);
            assert!((x.weight - y.weight).abs() <= 1e-12);
        }
    }
}

fn random_lottery<R: Rng>(rng: &mut R) -> WorkQuasiprobability {
    let n = rng.random_range(1..5);
    let mut weights: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..1.0)).collect();
    let sum: f64 = weights.iter().sum();
    let fix = 1.0 - sum;
    weights[0] += fix;
    let atoms = weights
        .into_iter()
        .map(|weight| Atom {
            work: rng.random_range(-2.0..2.0),
            weight,
        })
        .collect();
    WorkQuasiprobability::from_atoms(atoms, 1e-12)
}

fn random_set<R: Rng>(rng: &mut R, pool: &[WorkQuasiprobability]) -> Vec<WorkQuasiprobability> {
    let n = rng.random_range(1..5);
    (0..n)
        .map(|_| {
            // Shared members make ties between sets common.
            if rng.random_bool(0.3) {
                pool[rng.random_range(0..pool.len())].clone()
            } else {
                random_lottery(rng)
            }
        })
        .collect()
}

/// Every member of the first set beats some member of the second.
fn for_all_exists(first: &[WorkQuasiprobability], second: &[WorkQuasiprobability], u: &dyn Utility) -> bool {
    first.iter().all(|p1| {
        let v1 = expected_utility(p1, u);
        second.iter().any(|p2| v1 > expected_utility(p2, u))
    })
}

#[test]
fn set_ordering_matches_exhaustive_definition() {
    let mut rng = rng_stream(17, 0);
    let pool: Vec<_> = (0..4).map(|_| random_lottery(&mut rng)).collect();
    let mut verdicts = [0usize; 2];
    for trial in 0..1000 {
        let u = UtilityFunction::exponential(rng.random_range(-2.0..2.0));
        let a = random_set(&mut rng, &pool);
        let b = random_set(&mut rng, &pool);
        let fast = prefer_sets(&a, &b, &u).unwrap();
        assert_eq!(fast, for_all_exists(&a, &b, &u), "trial {trial}");
        verdicts[fast as usize] += 1;
    }
    assert!(verdicts[0] > 100 && verdicts[1] > 100);
}

#[test]
fn set_ordering_is_transitive() {
    let mut rng = rng_stream(19, 0);
    let pool: Vec<_> = (0..4).map(|_| random_lottery(&mut rng)).collect();
    let mut chains = 0;
    for _ in 0..1000 {
        let u = UtilityFunction::exponential(rng.random_range(-2.0..2.0));
        let sets: Vec<_> = (0..3).map(|_| random_set(&mut rng, &pool)).collect();
        if prefer_sets(&sets[0], &sets[1], &u).unwrap() && prefer_sets(&sets[1], &sets[2], &u).unwrap() {
            chains += 1;
            assert!(prefer_sets(&sets[0], &sets[2], &u).unwrap());
        }
    }
    assert!(chains > 50);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn preference_survives_affine_maps(seed in any::<u64>(), r in -2.0f64..2.0, a in 0.01f64..100.0, b in -10.0f64..10.0) {
        let mut rng = rng_stream(seed, 0);
        let p1 = random_lottery(&mut rng);
        let p2 = random_lottery(&mut rng);
        let u = UtilityFunction::exponential(r);
        let v = |w: f64| a * u.eval(w) + b;
        let before = expected_utility(&p1, &u) - expected_utility(&p2, &u);
        let after = expected_utility(&p1, &v) - expected_utility(&p2, &v);
        prop_assume!(before.abs() > 1e-9);
        prop_assert_eq!(before > 0.0, after > 0.0);
    }
}
