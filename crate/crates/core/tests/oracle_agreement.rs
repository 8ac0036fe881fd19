use contextua::ksverify::{catalog_by_name, BasisMode, ProjectorKsSet};
use contextua::oracle::{oracle_abl, oracle_weak_value, projector_matrix, CMatrix, DenseState};
use contextua::ppsengine::{abl_probabilities, weak_value, PpsPair};
use contextua::stabilizer::random_stabilizer_state;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_pps(n: usize, rng: &mut ChaCha8Rng) -> PpsPair {
    loop {
        let pre = random_stabilizer_state(n, rng);
        let post = random_stabilizer_state(n, rng);
        if let Ok(pps) = PpsPair::from_stabilizers(pre, post) {
            return pps;
        }
    }
}

fn agree_on(name: &str, mode: BasisMode, trials: usize) {
    let obs = catalog_by_name(name).unwrap();
    let set = ProjectorKsSet::from_observable_set(&obs, mode).unwrap();
    let mats: Vec<CMatrix> = set
        .projectors
        .iter()
        .map(|p| projector_matrix(obs.n_qubits, p.as_stabilizer().unwrap().generators()))
        .collect();
    for (p, m) in set.projectors.iter().zip(&mats) {
        assert!((p.dense_matrix().unwrap() - m).norm() < 1e-9, "{name}: {p}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(name.len() as u64);
    for _ in 0..trials {
        let pps = random_pps(obs.n_qubits, &mut rng);
        let pre = DenseState::from_slice(&pps.pre).unwrap();
        let post = DenseState::from_slice(&pps.post).unwrap();
        for (p, m) in set.projectors.iter().zip(&mats) {
            let sym = weak_value(p, &pps).unwrap();
            let dense = oracle_weak_value(&pre, &post, m).unwrap();
            assert!((sym - dense).norm() < 1e-9, "{name} {p}: {sym} vs {dense}");
        }
        for b in &set.bases {
            let members: Vec<_> = b.iter().map(|&k| &set.projectors[k]).collect();
            let basis: Vec<CMatrix> = b.iter().map(|&k| mats[k].clone()).collect();
            match (abl_probabilities(&members, &pps), oracle_abl(&pre, &post, &basis)) {
                (Ok(a), Ok(o)) => assert!(a.iter().zip(&o).all(|(x, y)| (x - y).abs() < 1e-9), "{name}: {a:?} vs {o:?}"),
                (Err(_), Err(_)) => {}
                (a, o) => panic!("{name}: engine {a:?}, oracle {o:?}"),
            }
        }
    }
}

#[test]
fn square3_with_hybrids() {
    agree_on("square3", BasisMode::WithHybrids, 40);
}

#[test]
fn square2_with_hybrids() {
    agree_on("square2", BasisMode::WithHybrids, 40);
}

#[test]
fn ghz_star_with_hybrids() {
    agree_on("ghz_star", BasisMode::WithHybrids, 20);
}

#[test]
fn wheels() {
    agree_on("wheel4", BasisMode::Eigen, 10);
    agree_on("wheel5", BasisMode::Eigen, 5);
}

#[test]
fn stabilizer_vectors_are_fixed_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 1..=4 {
        for _ in 0..20 {
            let s = random_stabilizer_state(n, &mut rng);
            let v = DenseState::from_slice(&s.dense_vector().unwrap()).unwrap();
            let p = projector_matrix(n, s.generators());
            assert!((&p * v.amplitudes() - v.amplitudes()).norm() < 1e-9, "{s}");
        }
    }
}
