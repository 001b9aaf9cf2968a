use hochops::finset::{FinSetMap, Morphism};
use hochops::loday::{descent_count, l_op, lambda_op, sh_op, sh_op_via_shuffles, Permutation};
use hochops::scalar::{binomial, Field};
use hochops::Scalar;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn field() -> impl Strategy<Value = Field> {
    prop_oneof![
        Just(Field::Rational),
        prop::sample::select(vec![2u64, 3, 5, 7, 101, 65521]).prop_map(|p| Field::prime(p).unwrap()),
    ]
}

fn scalar_in(f: Field) -> impl Strategy<Value = Scalar> {
    (-50i64..50, 1i64..12).prop_map(move |(n, d)| match f {
        Field::Rational => f.from_rational(&BigRational::new(n.into(), d.into())).unwrap(),
        _ => f.from_i64(n * d),
    })
}

fn triple() -> impl Strategy<Value = (Scalar, Scalar, Scalar)> {
    field().prop_flat_map(|f| (scalar_in(f), scalar_in(f), scalar_in(f)))
}

fn map(source: usize, target: usize) -> impl Strategy<Value = FinSetMap> {
    prop::collection::vec(1..=target, source).prop_map(move |img| FinSetMap::new(target, &img).unwrap())
}

fn morphism(source: usize, target: usize) -> impl Strategy<Value = Morphism> {
    prop::collection::vec((map(source, target), -3i64..4), 0..4).prop_map(move |ts| {
        let mut m = Morphism::zero(source, target, Field::Rational);
        for (f, c) in ts {
            m.add_term(f, Field::Rational.from_i64(c));
        }
        m
    })
}

proptest! {
    #[test]
    fn field_axioms((a, b, c) in triple()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert!((&a + &(-&a)).is_zero());
        if !b.is_zero() {
            prop_assert_eq!(a.checked_div(&b).unwrap().checked_mul(&b).unwrap(), a.clone());
            prop_assert!((&b * &b.inv().unwrap()).is_one());
        } else {
            prop_assert!(b.inv().is_err());
        }
    }

    #[test]
    fn scalar_text_round_trip((a, _, _) in triple()) {
        let back: Scalar = a.to_string().parse::<Scalar>().unwrap().to_field(a.field()).unwrap();
        prop_assert_eq!(back, a.clone());
        let json = serde_json::to_string(&a).unwrap();
        let field_json = serde_json::to_string(&a.field()).unwrap();
        prop_assert_eq!(serde_json::from_str::<Field>(&field_json).unwrap(), a.field());
        prop_assert!(json.starts_with('"'));
    }

    #[test]
    fn reduction_mod_p_is_a_ring_map(x in -40i64..40, y in -40i64..40, p in prop::sample::select(vec![3u64, 5, 13])) {
        let fp = Field::prime(p).unwrap();
        let q = Field::Rational;
        let red = |s: Scalar| s.to_field(fp).unwrap();
        prop_assert_eq!(red(&q.from_i64(x) * &q.from_i64(y)), &fp.from_i64(x) * &fp.from_i64(y));
        prop_assert_eq!(red(&q.from_i64(x) + &q.from_i64(y)), &fp.from_i64(x) + &fp.from_i64(y));
    }

    #[test]
    fn pascal_rule(n in 0i64..30, k in -3i64..30) {
        prop_assert_eq!(binomial(n + 1, k + 1), binomial(n, k) + binomial(n, k + 1));
        if k < 0 || k > n {
            prop_assert_eq!(binomial(n, k), BigInt::from(0));
        }
    }

    #[test]
    fn map_composition_is_associative(
        (f, g, h) in (0usize..5, 1usize..5, 1usize..5, 1usize..5)
            .prop_flat_map(|(a, b, c, d)| (map(a, b), map(b, c), map(c, d)))
    ) {
        prop_assert_eq!(f.then(&g).then(&h), f.then(&g.then(&h)));
        prop_assert_eq!(f.then(&FinSetMap::identity(f.target())), f.clone());
        prop_assert_eq!(FinSetMap::identity(f.source()).then(&f), f.clone());
        for i in 1..=f.source() {
            prop_assert_eq!(f.then(&g).apply(i), g.apply(f.apply(i)));
        }
    }

    #[test]
    fn map_tensor_interchange(
        (f, g, f2, g2) in (0usize..4, 1usize..4, 1usize..4, 0usize..4, 1usize..4, 1usize..4)
            .prop_flat_map(|(a, b, c, x, y, z)| (map(a, b), map(b, c), map(x, y), map(y, z)))
    ) {
        prop_assert_eq!(f.tensor(&f2).then(&g.tensor(&g2)), f.then(&g).tensor(&f2.then(&g2)));
    }

    #[test]
    fn linear_composition(
        (a, b, c, d) in (1usize..4, 1usize..4, 1usize..4, 1usize..4)
            .prop_flat_map(|(s, t, u, v)| (morphism(s, t), morphism(t, u), morphism(u, v), morphism(s, t)))
    ) {
        let assoc_l = a.compose(&b).unwrap().compose(&c).unwrap();
        let assoc_r = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(assoc_l, assoc_r);
        let dist_l = a.add(&d).unwrap().compose(&b).unwrap();
        let dist_r = a.compose(&b).unwrap().add(&d.compose(&b).unwrap()).unwrap();
        prop_assert_eq!(dist_l, dist_r);
        prop_assert!(a.sub(&a).unwrap().is_zero());
        prop_assert!(a.compose(&Morphism::zero(a.target(), 2, Field::Rational)).unwrap().is_zero());
    }

    #[test]
    fn linear_tensor_interchange(
        (a, b, c, d) in (1usize..3, 1usize..3, 1usize..3, 1usize..3, 1usize..3, 1usize..3)
            .prop_flat_map(|(s, t, u, x, y, z)| (morphism(s, t), morphism(t, u), morphism(x, y), morphism(y, z)))
    ) {
        let lhs = a.tensor(&c).unwrap().compose(&b.tensor(&d).unwrap()).unwrap();
        let rhs = a.compose(&b).unwrap().tensor(&c.compose(&d).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sign_is_multiplicative((x, y) in (1usize..7).prop_flat_map(|n| {
        let p = Just((1..=n).collect::<Vec<_>>()).prop_shuffle();
        (p.clone(), p)
    })) {
        let sx = Permutation::new(&x).unwrap();
        let sy = Permutation::new(&y).unwrap();
        let comp: Vec<usize> = x.iter().map(|&i| y[i - 1]).collect();
        let sxy = Permutation::new(&comp).unwrap();
        prop_assert_eq!(sxy.sign(), sx.sign() * sy.sign());
        prop_assert_eq!(sx.embed().then(&sy.embed()), sxy.embed());
        prop_assert!(descent_count(&sx) < x.len());
    }

    #[test]
    fn sh_matches_shuffle_sum(n in 1usize..7, k in 0usize..8) {
        prop_assert_eq!(sh_op(n, k, Field::Rational), sh_op_via_shuffles(n, k, Field::Rational));
    }
}

#[test]
fn eulerian_pieces_partition_the_signed_group() {
    for n in 1..=6usize {
        let mut all = Morphism::zero(n + 1, n + 1, Field::Rational);
        let mut count = 0;
        for k in 1..=n {
            let l = l_op(n, k, Field::Rational);
            count += l.len();
            all = all.add(&l).unwrap();
        }
        let fact: usize = (1..=n).product();
        assert_eq!(count, fact);
        assert_eq!(all.len(), fact);
        for p in Permutation::all(n) {
            assert_eq!(all.coeff(&p.embed()), Field::Rational.from_i64(p.sign()));
        }
    }
}

#[test]
fn sh_one_is_identity_and_extremes_vanish() {
    let q = Field::Rational;
    for n in 1..=5usize {
        assert_eq!(sh_op(n, 1, q), Morphism::identity(n + 1, q));
        assert!(sh_op(n, n + 1, q).is_zero());
        // λ^0 is l^0 = 0 for n >= 1
        assert!(lambda_op(n, 0, q).is_zero());
    }
}
