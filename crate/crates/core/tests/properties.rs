use contextua::ksverify::{catalog, BasisMode, CatalogName, ProjectorKsSet};
use contextua::meanking::{haar_vector, king_witness, king_witness_set, povm_integrality_set, yu_oh_projectors, KingVerdict, KING_TOL};
use contextua::oracle::{pauli_matrix, CMatrix};
use contextua::pauli::{commutation_sign, id_sign, multiply, Letter, PauliObservable, Sign, SignedGroup};
use contextua::ppsengine::{abl_probabilities, propagate, weak_value, weak_value_report, PpsPair};
use contextua::dense;
use contextua::stabilizer::{random_stabilizer_state, StabilizerProjector};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![Just(Letter::I), Just(Letter::X), Just(Letter::Y), Just(Letter::Z)]
}

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

fn pauli(n: usize) -> impl Strategy<Value = PauliObservable> {
    (prop::collection::vec(letter(), n), sign()).prop_map(|(l, s)| PauliObservable::from_letters(&l, s))
}

fn pauli_pair() -> impl Strategy<Value = (PauliObservable, PauliObservable)> {
    (1usize..=4).prop_flat_map(|n| (pauli(n), pauli(n)))
}

fn square() -> ProjectorKsSet {
    ProjectorKsSet::from_observable_set(&catalog(&CatalogName::Square3).unwrap(), BasisMode::WithHybrids).unwrap()
}

/// A stabilizer PPS with non-vanishing overlap drawn from `seed`.
fn stabilizer_pps(n: usize, seed: u64) -> PpsPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let pre = random_stabilizer_state(n, &mut rng);
        let post = random_stabilizer_state(n, &mut rng);
        if let Ok(pps) = PpsPair::from_stabilizers(pre, post) {
            return pps;
        }
    }
}

fn matrix_close(a: &CMatrix, b: &CMatrix) -> bool {
    (a - b).norm() < 1e-9
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn multiply_matches_matrices((p, q) in pauli_pair()) {
        let prod = multiply(&p, &q).unwrap();
        let sym = pauli_matrix(&prod.observable) * prod.phase.to_complex();
        prop_assert!(matrix_close(&sym, &(pauli_matrix(&p) * pauli_matrix(&q))));
    }

    #[test]
    fn commutation_is_symmetric_and_matches_matrices((p, q) in pauli_pair()) {
        let s = commutation_sign(&p, &q).unwrap();
        prop_assert_eq!(s, commutation_sign(&q, &p).unwrap());
        let (mp, mq) = (pauli_matrix(&p), pauli_matrix(&q));
        let want = &mq * &mp * C64::new(s.to_f64(), 0.0);
        prop_assert!(matrix_close(&(&mp * &mq), &want));
    }

    #[test]
    fn product_with_inverse_is_identity(p in (1usize..=5).prop_flat_map(pauli)) {
        let prod = multiply(&p, &p).unwrap();
        prop_assert!(prod.observable.is_identity());
        prop_assert_eq!(prod.phase.as_sign(), Some(Sign::Plus));
    }

    #[test]
    fn id_sign_of_closed_triple((p, q) in pauli_pair()) {
        prop_assume!(p.commutes_with(&q));
        let prod = multiply(&p, &q).unwrap();
        let r = prod.hermitian().unwrap();
        prop_assume!(!r.is_identity());
        // P·Q·(PQ) = (PQ)² = I with the product's own sign folded in.
        prop_assert_eq!(id_sign(&[p, q, r]).unwrap(), Sign::Plus);
    }

    #[test]
    fn group_is_insertion_order_independent(gens in (2usize..=4).prop_flat_map(|n| prop::collection::vec(pauli(n), 1..4))) {
        let n = gens[0].n_qubits();
        let mut fwd = SignedGroup::new(n);
        let mut rev = SignedGroup::new(n);
        let ok_f = gens.iter().all(|g| fwd.insert(g.clone()).is_ok());
        let ok_r = gens.iter().rev().all(|g| rev.insert(g.clone()).is_ok());
        prop_assume!(ok_f && ok_r);
        prop_assert_eq!(fwd.rows(), rev.rows());
    }

    #[test]
    fn canonicalized_stabilizer_vectors_agree(seed in any::<u64>(), phase in 0.0f64..std::f64::consts::TAU) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_stabilizer_state(3, &mut rng);
        let v = s.dense_vector().unwrap();
        let rotated: Vec<C64> = v.iter().map(|a| a * C64::from_polar(1.0, phase)).collect();
        let a = dense::canonicalize(&v).unwrap();
        let b = dense::canonicalize(&rotated).unwrap();
        prop_assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-9));
    }

    #[test]
    fn sum_rule_on_square(seed in any::<u64>()) {
        let report = weak_value_report(&square(), &stabilizer_pps(3, seed)).unwrap();
        prop_assert!(report.max_sum_residual() < 1e-9);
    }

    #[test]
    fn forced_ones_have_unit_weak_value(seed in any::<u64>()) {
        let set = square();
        let pps = stabilizer_pps(3, seed);
        let Ok(asg) = propagate(&set, &pps) else { return Ok(()) };
        for k in asg.forced_ones() {
            let w = weak_value(&set.projectors[k], &pps).unwrap();
            prop_assert!((w - 1.0).norm() < 1e-9, "projector {} weak value {}", k, w);
        }
    }

    #[test]
    fn abl_probabilities_are_distributions(seed in any::<u64>()) {
        let set = square();
        let pps = stabilizer_pps(3, seed);
        for b in &set.bases {
            let members: Vec<_> = b.iter().map(|&k| &set.projectors[k]).collect();
            let Ok(p) = abl_probabilities(&members, &pps) else { continue };
            prop_assert!(p.iter().all(|x| (-1e-12..=1.0 + 1e-12).contains(x)));
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn ks_sets_always_leave_a_witness(seed in any::<u64>()) {
        let set = square();
        let w = king_witness_set(&set, &stabilizer_pps(3, seed), KING_TOL).unwrap();
        prop_assert_eq!(w.verdict, KingVerdict::Witness);
    }

    #[test]
    fn stabilizer_orthogonality_matches_matrices(a in any::<u64>(), b in any::<u64>()) {
        let mut ra = ChaCha8Rng::seed_from_u64(a);
        let mut rb = ChaCha8Rng::seed_from_u64(b);
        let p = random_stabilizer_state(2, &mut ra);
        let q = random_stabilizer_state(2, &mut rb);
        let trace = (p.dense_matrix().unwrap() * q.dense_matrix().unwrap()).trace().norm();
        prop_assert_eq!(p.orthogonal(&q), trace < 1e-9);
    }
}

#[test]
fn povm_certificate_implies_witness() {
    let rays = yu_oh_projectors();
    let report = povm_integrality_set(&rays).unwrap();
    assert!(report.certifies_impossibility());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let pps = PpsPair::from_vectors(haar_vector(3, &mut rng), haar_vector(3, &mut rng)).unwrap();
        assert_eq!(king_witness(&rays, &pps, KING_TOL).unwrap().verdict, KingVerdict::Witness);
    }
}

#[test]
fn pure_refinement_lies_inside_projector() {
    let p = StabilizerProjector::parse("+ZZI,+ZIZ").unwrap();
    assert_eq!(p.rank(), 2);
    let fine = StabilizerProjector::parse("+ZZI,+ZIZ,+ZII").unwrap();
    assert!(fine.is_pure());
    assert!(p.contains(&fine));
}

#[test]
fn completed_even_wheels_are_ks() {
    use contextua::ksverify::{complete_substabilizers, verify_observable_ks, verify_observable_ks_with, VerifyMode};
    for n in [4, 6] {
        let wheel = catalog(&CatalogName::Wheel(n)).unwrap();
        assert!(!verify_observable_ks(&wheel).unwrap().verdict.is_ks());
        let completed = complete_substabilizers(&wheel);
        let parity = verify_observable_ks(&completed).unwrap().verdict;
        let exhaustive = verify_observable_ks_with(&completed, VerifyMode::Exhaustive).unwrap().verdict;
        println!("wheel{n}: {} observables, {} contexts, parity {parity}, exhaustive {exhaustive}", completed.observables.len(), completed.contexts.len());
        assert!(exhaustive.is_ks());
    }
}

#[test]
fn all_zero_conflict_bases_stay_below_half() {
    use contextua::ppsengine::ConflictReason;
    let set = square();
    let mut worst = f64::NEG_INFINITY;
    let mut seen = 0;
    for seed in 0..400 {
        let pps = stabilizer_pps(3, seed);
        let Ok(asg) = propagate(&set, &pps) else { continue };
        for c in asg.conflict_bases.iter().filter(|c| c.reason == ConflictReason::AllZero) {
            for &k in &set.bases[c.basis] {
                let w = weak_value(&set.projectors[k], &pps).unwrap();
                worst = worst.max(w.norm());
            }
            seen += 1;
        }
    }
    println!("{seen} all-zero conflict bases, largest |weak value| {worst}");
    assert!(seen > 0);
    assert!(worst <= 0.5 + 1e-9);
}
