use std::collections::BTreeSet;
use std::sync::Arc;

use hochops::algebra::{connes_b, GradedCommutativeAlgebra, HochschildChain};
use hochops::finset::{FinSetMap, Morphism};
use hochops::formal::*;
use hochops::loday::{bk_family, sh_family};
use hochops::Field;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const Q: Field = Field::Rational;

fn spec(json: &str) -> OperationSpec {
    serde_json::from_str(json).unwrap()
}

fn multidegrees(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v: Vec<usize>| (0..=max).map(move |a| [v.clone(), vec![a]].concat())).collect();
    }
    out
}

fn signatures_up_to(top: [usize; 4]) -> Vec<Signature> {
    let mut out = Vec::new();
    for n1 in 0..=top[0] {
        for m1 in 0..=top[1] {
            for n2 in 0..=top[2] {
                for m2 in 0..=top[3] {
                    out.push(Signature::new(n1, m1, n2, m2));
                }
            }
        }
    }
    out
}

/// Random operation with a few random maps in every component of degree `l`.
fn random_op(rng: &mut ChaCha8Rng, sig: Signature, l: i64, k: usize) -> MultiOperation {
    let mut x = MultiOperation::zero(sig, l, k, Q);
    for j in multidegrees(sig.n1, k) {
        for h in multidegrees(sig.n2, k + 1) {
            if h.iter().sum::<usize>() as i64 - j.iter().sum::<usize>() as i64 != l {
                continue;
            }
            let (s, t) = (sig.source_size(&j), sig.target_size(&h));
            if t == 0 && s > 0 {
                continue;
            }
            let mut m = Morphism::zero(s, t, Q);
            for _ in 0..3 {
                let img: Vec<usize> = (0..s).map(|_| rng.gen_range(1..=t)).collect();
                m.add_term(FinSetMap::new(t, &img).unwrap(), Q.from_i64(rng.gen_range(-3..=3)));
            }
            x.insert(j.clone(), h.clone(), m).unwrap();
        }
    }
    x
}

#[test]
fn signature_1010_is_sh_and_b() {
    for k in 0..=4 {
        let basis = enumerate_a_basis(Signature::new(1, 0, 1, 0), &[k]).unwrap();
        assert_eq!(basis.len(), 2);
        for b in &basis {
            let x = build_x_fs(b, 5, Q).unwrap();
            let expected = if b.s[&1] == 0 { sh_family(5, k, Q) } else { bk_family(5, k, Q) };
            assert_eq!(x, MultiOperation::from_family(&expected), "{b:?}");
        }
    }
}

#[test]
fn basis_counts() {
    let count = |sig: [usize; 4], k: &[usize]| enumerate_a_basis(Signature::from(sig), k).unwrap().len();
    assert_eq!(count([2, 0, 1, 0], &[0, 0]), 4);
    // f(1) = 1 is forced; f(2) = 1 gives four s, f(2) = 2 gives two
    assert_eq!(count([1, 1, 1, 1], &[1]), 6);
    // k = 0 also allows f(1) = 2 with s empty on it
    assert_eq!(count([1, 1, 1, 1], &[0]), 9);
    assert_eq!(count([0, 2, 0, 1], &[]), 1);
    assert_eq!(count([1, 0, 0, 1], &[2]), 0);
    for b in enumerate_a_basis(Signature::new(2, 2, 2, 1), &[1, 0]).unwrap() {
        b.validate().unwrap();
    }
}

#[test]
fn spec_validation() {
    assert!(spec(r#"{"sig":[1,0,0,1],"f":[1],"s":{},"k":[1]}"#).validate().is_err());
    assert!(spec(r#"{"sig":[1,0,1,0],"f":[1],"s":{},"k":[0]}"#).validate().is_err());
    assert!(spec(r#"{"sig":[1,0,1,1],"f":[2],"s":{"1":0},"k":[0]}"#).validate().is_err());
    assert!(spec(r#"{"sig":[1,0,1,0],"f":[1],"s":{"1":2},"k":[0]}"#).validate().is_err());
    assert!(spec(r#"{"sig":[1,0,1,0],"f":[2],"s":{"1":0},"k":[0]}"#).validate().is_err());
    let s = spec(r#"{"sig":[2,2,2,1],"f":[3,2,3,2],"s":{"2":0,"4":1},"k":[0,2]}"#);
    s.validate().unwrap();
    assert_eq!(serde_json::from_str::<OperationSpec>(&serde_json::to_string(&s).unwrap()).unwrap(), s);
    assert_eq!(s.degree(), 1);
}

#[test]
fn differential_squares_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for sig in [[1, 0, 1, 0], [2, 0, 1, 0], [1, 1, 2, 0], [2, 1, 1, 1], [0, 2, 2, 1]] {
        for l in [-1, 0, 1] {
            let x = random_op(&mut rng, Signature::from(sig), l, 2);
            let d = x.differential();
            assert_eq!(d, x.differential_reference(), "{sig:?} {l}");
            // the top input degree loses its cofaces, so compare below it
            let dd = d.differential();
            assert!(dd.components().all(|(j, _, _)| j.iter().any(|&a| a >= 2)), "{sig:?} {l}");
        }
    }
}

#[test]
fn random_operations_are_not_cycles() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = random_op(&mut rng, Signature::new(2, 0, 1, 0), 0, 2);
    assert!(!x.is_cycle());
    assert!(!x.differential_reference().reduce_outputs().is_zero());
}

#[test]
fn generators_are_cycles() {
    for r in 0..=3 {
        assert!(MultiOperation::shuffle(r, 3, Q).is_cycle());
        assert!(MultiOperation::multiplication(r, Q).is_cycle());
    }
    assert!(MultiOperation::projection(3, Q).is_cycle());
    assert!(MultiOperation::inclusion(0, Q).is_cycle());
    assert!(MultiOperation::inclusion(1, Q).is_cycle());
    assert!(MultiOperation::algebra_identity(Q).is_cycle());
}

#[test]
fn shuffle_is_associative_and_commutative() {
    let m2 = MultiOperation::shuffle(2, 3, Q);
    let id = MultiOperation::shuffle(1, 3, Q);
    let outer = MultiOperation::shuffle(2, 6, Q);
    let direct = MultiOperation::shuffle(3, 3, Q);
    assert_eq!(m2.tensor(&id).unwrap().then(&outer).unwrap(), direct);
    assert_eq!(id.tensor(&m2).unwrap().then(&outer).unwrap(), direct);
    // m^{1,2} precomposed with the signed block swap is m^{1,2}
    for (j, h, m) in m2.components() {
        let (a, b) = (j[0], j[1]);
        let mut img: Vec<usize> = (1..=a + 1).map(|q| b + 1 + q).collect();
        img.extend(1..=b + 1);
        let swap = FinSetMap::new(a + b + 2, &img).unwrap();
        let sign = if a * b % 2 == 1 { -1 } else { 1 };
        let swapped = Morphism::from_map(swap, Q.from_i64(sign)).compose(m2.component(&[b, a], h).unwrap()).unwrap();
        assert_eq!(&swapped, m, "{j:?}");
    }
}

#[test]
fn shuffle_merge_of_one_and_two() {
    // one letter against two: three maps, first points merged
    let m = MultiOperation::shuffle(2, 2, Q);
    let c = m.component(&[1, 2], &[3]).unwrap();
    let maps: BTreeSet<Vec<u8>> = c.terms().map(|(f, _)| f.image().to_vec()).collect();
    let expected: BTreeSet<Vec<u8>> =
        [vec![1, 2, 1, 3, 4], vec![1, 3, 1, 2, 4], vec![1, 4, 1, 2, 3]].into_iter().collect();
    assert_eq!(maps, expected);
    assert!(c.terms().all(|(_, s)| s.is_one() || s.scale_i64(-1).is_one()));
}

#[test]
fn tensor_leibniz_and_interchange() {
    let a = MultiOperation::from_family(&bk_family(2, 1, Q));
    let b = MultiOperation::from_family(&sh_family(2, 2, Q));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let r = random_op(&mut rng, Signature::new(1, 1, 1, 0), 1, 2);
    let s = random_op(&mut rng, Signature::new(1, 0, 1, 1), 0, 2);
    for (x, y) in [(&a, &b), (&b, &a), (&a, &a), (&r, &s), (&s, &r), (&r, &a)] {
        let lhs = x.tensor(y).unwrap().differential();
        let sign = if x.degree() % 2 == 0 { 1 } else { -1 };
        let rhs =
            x.differential().tensor(y).unwrap().add(&x.tensor(&y.differential()).unwrap().scale_i64(sign)).unwrap();
        // the truncated coface at input degree 2 is missing on both sides
        let keep = |m: &MultiOperation| -> Vec<_> {
            m.components()
                .filter(|(j, _, _)| j.iter().all(|&v| v < 2))
                .map(|(j, h, m)| (j.clone(), h.clone(), m.clone()))
                .collect()
        };
        assert_eq!(keep(&lhs), keep(&rhs));
    }
    // interchange for degree-0 pieces
    let p = MultiOperation::from_family(&sh_family(2, 2, Q));
    let i = MultiOperation::inclusion(0, Q);
    let m = MultiOperation::shuffle(2, 4, Q);
    let lhs = p.tensor(&i).unwrap().then(&m).unwrap();
    let pid = p.then(&MultiOperation::shuffle(1, 4, Q)).unwrap();
    let rhs = pid.tensor(&i).unwrap().then(&m).unwrap();
    assert_eq!(lhs, rhs);
}

#[test]
fn composite_differential_splits() {
    // D(x2 ∘ x1) = D(x2) ∘ x1 + x2 ∘ D(x1), with x2 built on every
    // intermediate degree so that nothing is truncated
    for json in [
        r#"{"sig":[2,0,1,0],"f":[1,1],"s":{"1":1,"2":0},"k":[1,0]}"#,
        r#"{"sig":[1,1,1,1],"f":[1,1],"s":{"1":0,"2":1},"k":[2]}"#,
        r#"{"sig":[2,1,2,1],"f":[2,3,2],"s":{"1":1,"3":1},"k":[0,0]}"#,
    ] {
        let sp = spec(json);
        let x1 = build_x1(&sp, 2, Q).unwrap();
        let c = x1.signature().n2;
        let x2 = build_x2(&sp, &multidegrees(c, 3), Q).unwrap();
        let x = build_x_fs(&sp, 2, Q).unwrap();
        assert_eq!(x, x1.then(&x2).unwrap());
        let rhs = x1.then(&x2.differential()).unwrap().add(&x1.differential().then(&x2).unwrap()).unwrap();
        assert_eq!(x.differential(), rhs, "{json}");
    }
}

#[test]
fn x_fs_cycles_small_truncation() {
    let mut checker = CycleChecker::new(2, Q);
    let mut n = 0;
    for sig in signatures_up_to([2, 2, 2, 1]) {
        for k in multidegrees(sig.n1, 2) {
            for b in enumerate_a_basis(sig, &k).unwrap() {
                assert!(x_fs_is_cycle_direct(&b, 2, Q).unwrap(), "{}", serde_json::to_string(&b).unwrap());
                assert!(checker.check(&b).unwrap());
                n += 1;
            }
        }
    }
    assert!(n > 5000);
}

#[test]
fn distinct_generators_are_independent() {
    for sig in [[2, 0, 1, 0], [1, 1, 1, 1], [0, 2, 1, 0], [1, 0, 1, 1], [2, 0, 2, 0], [1, 1, 2, 0]] {
        let sig = Signature::from(sig);
        for k in multidegrees(sig.n1, 2) {
            let basis = enumerate_a_basis(sig, &k).unwrap();
            for l in 0..=sig.n1 + sig.m1 {
                let ops: Vec<MultiOperation> =
                    basis.iter().filter(|b| b.degree() == l as i64).map(|b| build_x_fs(b, 2, Q).unwrap()).collect();
                assert_eq!(span_rank(&ops), ops.len(), "{sig:?} {k:?} degree {l}");
            }
        }
    }
}

#[test]
fn projection_vanishes_above_length_one() {
    let p = MultiOperation::projection(3, Q);
    assert_eq!(p.components().count(), 1);
    assert!(p.component(&[0], &[]).is_some());
}

#[test]
fn identity_spec_on_length_one() {
    let x = build_x1(&spec(r#"{"sig":[1,1,1,1],"f":[1,2],"s":{"1":0},"k":[0]}"#), 2, Q).unwrap();
    assert_eq!(x.components().count(), 1);
    assert_eq!(x.component(&[0], &[0]).unwrap(), &Morphism::identity(2, Q));
}

#[test]
fn evaluation_matches_chain_operations() {
    let alg = Arc::new(GradedCommutativeAlgebra::truncated_polynomial(4, Q).unwrap());
    // B⁰ = B∘sh⁰ only sees word length 1; B¹ = B∘sh¹ is B above that
    let b0 = build_x_fs(&spec(r#"{"sig":[1,0,1,0],"f":[1],"s":{"1":1},"k":[0]}"#), 3, Q).unwrap();
    let b1 = build_x_fs(&spec(r#"{"sig":[1,0,1,0],"f":[1],"s":{"1":1},"k":[1]}"#), 3, Q).unwrap();
    let c = MultiChain::from_labels(alg.clone(), &[&["t", "t^2"]], &[]).unwrap();
    assert!(b0.evaluate(&c).unwrap().is_empty());
    let r = b1.evaluate(&c).unwrap();
    let expected = connes_b(&HochschildChain::word(alg.clone(), &["t", "t^2"]).unwrap());
    assert_eq!(r.len(), expected.len());
    for (w, s) in expected.terms() {
        assert_eq!(&r.coeff(&MultiWord { blocks: vec![w.clone()], letters: vec![] }), s);
    }
    // two algebra slots into one Hochschild output: the product as a word
    let m = build_x_fs(&spec(r#"{"sig":[0,2,1,0],"f":[1,1],"s":{"1":0,"2":0},"k":[]}"#), 0, Q).unwrap();
    let r = m.evaluate(&MultiChain::from_labels(alg.clone(), &[], &["t", "t"]).unwrap()).unwrap();
    let t2 = alg.index_of("t^2").unwrap();
    assert_eq!(r.coeff(&MultiWord { blocks: vec![vec![t2]], letters: vec![] }), Q.one());
    assert_eq!(r.len(), 1);
    let too_long = MultiChain::from_labels(alg, &[&["t", "t", "t", "t", "t"]], &[]).unwrap();
    assert!(b0.evaluate(&too_long).is_err());
}

#[test]
fn worked_example() {
    let sp = spec(r#"{"sig":[2,2,2,1],"f":[3,2,3,2],"s":{"2":0,"4":1},"k":[0,2]}"#);
    let x1 = build_x1(&sp, 2, Q).unwrap();
    // the (0,2)-component is p ⊗ (sh²)₂ ⊗ id ⊗ B⁰
    let sh2 = sh_family(2, 2, Q);
    let mut expected = Morphism::identity(1, Q).tensor(sh2.component(2).unwrap()).unwrap();
    expected = expected.tensor(&Morphism::identity(1, Q)).unwrap();
    expected = expected.tensor(&Morphism::from_map(FinSetMap::new(2, &[2]).unwrap(), Q.one())).unwrap();
    // x1 orders Hochschild outputs (sh², B⁰) before algebra outputs (p, id)
    let reorder = FinSetMap::new(7, &[6, 1, 2, 3, 7, 4, 5]).unwrap();
    let expected = expected.compose(&Morphism::from_map(reorder, Q.one())).unwrap();
    assert_eq!(x1.component(&[0, 2], &[2, 1]).unwrap(), &expected);

    let alg = Arc::new(GradedCommutativeAlgebra::builtin("free2:q0,r0,r1,r2,g,h", Q).unwrap());
    let x = build_x_fs(&sp, 2, Q).unwrap();
    let c = MultiChain::from_labels(alg.clone(), &[&["q0"], &["r0", "r1", "r2"]], &["g", "h"]).unwrap();
    let r = x.evaluate(&c).unwrap();
    let one = alg.index_of("1").unwrap();
    let q0g = alg.index_of("q0·g").unwrap();
    for word in [["r0", "h", "r2", "r1"], ["r0", "r2", "h", "r1"], ["r0", "r2", "r1", "h"]] {
        let block: Vec<usize> = word.iter().map(|l| alg.index_of(l).unwrap()).collect();
        let w = MultiWord { blocks: vec![vec![one], block], letters: vec![q0g] };
        let coeff = r.coeff(&w);
        assert!(coeff.is_one() || coeff.scale_i64(-1).is_one(), "{}", r.render(&w));
    }
    assert_eq!(r.len(), 6);
}
