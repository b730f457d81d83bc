use genent::partition::factorize;
use genent::random::random_unitary;
use genent::*;
use proptest::prelude::*;

fn haar(n: usize, seed: u64) -> PureState {
    haar_random_state(n, &mut RngSeed(seed).rng()).unwrap()
}

/// Moves qubit `q` of `state` to position `perm[q - 1]`.
fn permute(state: &PureState, perm: &[usize]) -> PureState {
    let n = state.n_qubits();
    let mut out = vec![num_complex::Complex64::new(0.0, 0.0); state.dim()];
    for (i, a) in state.amplitudes().iter().enumerate() {
        let mut j = 0;
        for q in 1..=n {
            let bit = (i >> (n - q)) & 1;
            j |= bit << (n - perm[q - 1]);
        }
        out[j] = *a;
    }
    PureState::new(n, out).unwrap()
}

fn subset(mask: u64, n: usize) -> QubitSubset {
    QubitSubset::new(mask, n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn purity_lies_between_mixed_and_pure(seed in any::<u64>(), n in 2usize..=6, raw in 1u64..64) {
        let s = haar(n, seed);
        let mask = raw % ((1 << n) - 1) + 1;
        prop_assume!(mask != (1 << n) - 1);
        let sub = subset(mask, n);
        let p = s.reduced_purity(&sub).unwrap();
        let smaller = sub.len().min(n - sub.len());
        prop_assert!(p <= 1.0 + 1e-12);
        prop_assert!(p >= 1.0 / (1u64 << smaller) as f64 - 1e-12);
    }

    #[test]
    fn complementary_purities_agree(seed in any::<u64>(), n in 2usize..=7, raw in any::<u64>()) {
        let s = haar(n, seed);
        let mask = raw % ((1 << n) - 2) + 1;
        let sub = subset(mask, n);
        let a = s.reduced_purity(&sub).unwrap();
        let b = s.reduced_purity(&sub.complement()).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn purity_is_multiplicative_on_products(sa in any::<u64>(), sb in any::<u64>(), ma in 1u64..8, mb in 1u64..4) {
        let a = haar(3, sa);
        let b = haar(2, sb);
        let joint = tensor_product(&[a.clone(), b.clone()]).unwrap();
        // joint qubits 1..3 come from a, 4..5 from b
        let mask = ma | (mb << 3);
        prop_assume!(mask != 31);
        let direct = joint.reduced_purity(&subset(mask, 5)).unwrap();
        let pa = if ma == 7 { 1.0 } else { a.reduced_purity(&subset(ma, 3)).unwrap() };
        let pb = if mb == 3 { 1.0 } else { b.reduced_purity(&subset(mb, 2)).unwrap() };
        prop_assert!((direct - pa * pb).abs() < 1e-12);
    }

    #[test]
    fn local_unitaries_leave_everything_unchanged(seed in any::<u64>(), target in 1usize..=4) {
        let s = haar(4, seed);
        let u = random_unitary(&mut RngSeed(seed ^ 0x9e37).rng());
        let (t, q) = s.apply_local(&LocalOperator::new(target, u)).unwrap();
        prop_assert!((q - 1.0).abs() < 1e-12);
        prop_assert!((entanglement_value(&s).unwrap() - entanglement_value(&t).unwrap()).abs() < 1e-10);
        for mask in 1..15u64 {
            let sub = subset(mask, 4);
            prop_assert!((s.reduced_purity(&sub).unwrap() - t.reduced_purity(&sub).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn relabeling_qubits_leaves_e_unchanged(seed in any::<u64>(), perm in Just(vec![1usize, 2, 3, 4, 5, 6]).prop_shuffle()) {
        let s = haar(6, seed);
        let e = entanglement_value(&s).unwrap();
        let e_perm = entanglement_value(&permute(&s, &perm)).unwrap();
        prop_assert!((e - e_perm).abs() < 1e-10);
    }

    #[test]
    fn products_of_entangled_factors_are_recovered(seed in any::<u64>(), sizes in prop::collection::vec(1usize..=3, 1..=3)) {
        let factors: Vec<PureState> = sizes.iter().enumerate().map(|(i, &k)| haar(k, seed.wrapping_add(i as u64))).collect();
        let joint = tensor_product(&factors).unwrap();
        let f = factorize(&joint, DEFAULT_FACTOR_TOL).unwrap();
        let mut start = 1;
        let mut expected = Vec::new();
        for &k in &sizes {
            if k == 1 {
                expected.push(vec![start]);
            } else {
                expected.push((start..start + k).collect::<Vec<_>>());
            }
            start += k;
        }
        prop_assert_eq!(f.labels(), expected);
        if joint.n_qubits() % 2 == 0 && sizes.len() > 1 {
            prop_assert!(entanglement_value(&joint).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn looser_tolerance_never_merges_factors(seed in any::<u64>(), eps in 1e-6f64..1e-4) {
        // Bell pair times a random pair, blurred by a small random admixture
        let base = tensor_product(&[ghz(2).unwrap(), haar(2, seed)]).unwrap();
        let noise = haar(4, seed ^ 0x5151);
        let amps = base.amplitudes().iter().zip(noise.amplitudes()).map(|(a, b)| a + b * eps).collect();
        let st = PureState::new(4, amps).unwrap();
        let tight = factorize(&st, 1e-12).unwrap();
        let loose = factorize(&st, 9e-4).unwrap();
        prop_assert!(loose.factors.len() >= tight.factors.len());
        prop_assert_eq!(loose.labels(), vec![vec![1, 2], vec![3, 4]]);
        let again = factorize(&st, 9e-4).unwrap();
        prop_assert_eq!(loose, again);
    }

    #[test]
    fn determinant_one_filtering_scales_e(seed in any::<u64>(), target in 1usize..=4) {
        let s = haar(4, seed);
        let op = genent::slocc::random_sl2_op(target, &mut RngSeed(seed).stream(1));
        let c = check_slocc_covariance(&s, &op).unwrap();
        prop_assert!(c.residual < 1e-9, "{:?}", c);
    }
}
