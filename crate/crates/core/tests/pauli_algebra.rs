use proptest::prelude::*;
use ruby_tcc::gf2::BitVec;
use ruby_tcc::PauliOperator;

const N: usize = 10;

fn pauli() -> impl Strategy<Value = PauliOperator> {
    (
        prop::collection::vec(any::<bool>(), N),
        prop::collection::vec(any::<bool>(), N),
        0i64..4,
    )
        .prop_map(|(x, z, p)| {
            PauliOperator::from_parts(BitVec::from_bools(&x), BitVec::from_bools(&z), p).unwrap()
        })
}

proptest! {
    #[test]
    fn text_round_trips(a in pauli()) {
        prop_assert_eq!(PauliOperator::parse(N, &a.to_text()).unwrap(), a);
    }

    #[test]
    fn identity_and_inverse(a in pauli()) {
        let id = PauliOperator::identity(N);
        prop_assert_eq!(&a * &id, a.clone());
        prop_assert!((&a * &a.adjoint()).is_identity());
    }

    #[test]
    fn adjoint_reverses_products(a in pauli(), b in pauli()) {
        prop_assert_eq!((&a * &b).adjoint(), &b.adjoint() * &a.adjoint());
    }

    #[test]
    fn swapping_factors_costs_the_commutation_sign(a in pauli(), b in pauli()) {
        let ab = &a * &b;
        let ba = &b * &a;
        if a.commutes(&b).unwrap() {
            prop_assert_eq!(ab, ba);
        } else {
            prop_assert_eq!(ab, ba.negate());
        }
    }

    #[test]
    fn apply_is_a_signed_permutation(a in pauli(), j in 0u64..(1 << N)) {
        let (k, _) = a.apply(j).unwrap();
        prop_assert_eq!(k ^ j, (0..N).filter(|&i| a.xbits().get(i)).map(|i| 1u64 << i).sum::<u64>());
        let (back, phase) = a.adjoint().apply(k).unwrap();
        let (_, fwd) = a.apply(j).unwrap();
        prop_assert_eq!(back, j);
        prop_assert_eq!((fwd * phase).exp(), 0);
    }
}
