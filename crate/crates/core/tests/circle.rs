use hochops::circle::*;
use hochops::loday::{sh_combination, Permutation};
use hochops::{Field, Scalar};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const Q: Field = Field::Rational;

fn all_simplices(level: usize, m: usize) -> Vec<ProductSimplex> {
    let mut out = Vec::new();
    let mut pts = vec![1usize; m];
    loop {
        out.push(ProductSimplex::new(level, pts.clone()).unwrap());
        let mut i = 0;
        while i < m && pts[i] == level + 1 {
            pts[i] = 1;
            i += 1;
        }
        if i == m {
            return out;
        }
        pts[i] += 1;
    }
}

#[test]
fn simplicial_identities() {
    for n in 0..=8usize {
        for j in 1..=n + 1 {
            for i in 0..=n {
                // d_i s_i = d_{i+1} s_i = id
                let s = circle_degeneracy(n, i, j).unwrap();
                assert_eq!(circle_face(n + 1, i, s).unwrap(), j);
                assert_eq!(circle_face(n + 1, i + 1, s).unwrap(), j);
                for k in 0..=n + 1 {
                    if n >= 1 && k < i {
                        // d_k s_i = s_{i-1} d_k for k < i
                        let l = circle_face(n + 1, k, s).unwrap();
                        let r = circle_degeneracy(n - 1, i - 1, circle_face(n, k, j).unwrap()).unwrap();
                        assert_eq!(l, r);
                    }
                    // d_k s_i = s_i d_{k-1} for k > i + 1
                    if n >= 1 && k > i + 1 {
                        let l = circle_face(n + 1, k, s).unwrap();
                        let r = circle_degeneracy(n - 1, i, circle_face(n, k - 1, j).unwrap()).unwrap();
                        assert_eq!(l, r);
                    }
                }
                for k in 0..=i {
                    // s_i s_k = s_k s_{i-1} for k < i
                    if k < i {
                        let l = circle_degeneracy(n + 1, i, circle_degeneracy(n, k, j).unwrap()).unwrap();
                        let r = circle_degeneracy(n + 1, k, circle_degeneracy(n, i - 1, j).unwrap()).unwrap();
                        assert_eq!(l, r);
                    }
                }
            }
            if n >= 2 {
                for i in 0..=n {
                    for k in i + 1..=n {
                        // d_i d_k = d_{k-1} d_i
                        let l = circle_face(n - 1, i, circle_face(n, k, j).unwrap()).unwrap();
                        let r = circle_face(n - 1, k - 1, circle_face(n, i, j).unwrap()).unwrap();
                        assert_eq!(l, r, "n={n} i={i} k={k} j={j}");
                    }
                }
            }
        }
    }
}

#[test]
fn face_examples() {
    assert_eq!(circle_face(1, 0, 2).unwrap(), 1);
    assert_eq!(CircleSimplex::new(3, 4).unwrap().face(3).unwrap(), CircleSimplex { level: 2, point: 1 });
    assert!(CircleSimplex::new(3, 5).is_err());
    assert!(circle_face(0, 0, 1).is_err());
}

#[test]
fn aw_vanishes_off_identity() {
    for n in 0..=5 {
        for p in Permutation::all(n) {
            let s = ProductSimplex::from_map(&p.embed()).unwrap();
            let r = aw(&[(s, Q.one())]).unwrap();
            if p == Permutation::identity(n) {
                assert_eq!(r.len(), 1);
                assert_eq!(r[0].letters.iter().filter(|l| **l == Letter::Y).count(), n);
            } else {
                assert!(r.is_empty(), "{:?}", p.one_line());
            }
        }
    }
}

#[test]
fn aw_vanishes_on_shifted_non_identity() {
    for n in 1..=5 {
        for p in Permutation::all(n) {
            let pts: Vec<usize> = p.one_line().iter().map(|&t| t as usize + 1).collect();
            let r = aw(&[(ProductSimplex::new(n, pts).unwrap(), Q.one())]).unwrap();
            assert_eq!(r.is_empty(), p != Permutation::identity(n));
        }
    }
}

#[test]
fn aw_kills_degenerate_simplices() {
    for n in 0..=4 {
        for m in 1..=4 {
            for s in all_simplices(n, m) {
                for i in 0..=n {
                    let d = s.degeneracy(i).unwrap();
                    assert!(aw(&[(d, Q.one())]).unwrap().is_empty());
                }
            }
        }
    }
}

#[test]
fn aw_is_a_chain_map() {
    for n in 1..=5 {
        for m in 1..=n + 1 {
            for s in all_simplices(n, m) {
                let dx: Vec<_> =
                    (0..=n).map(|i| (s.face(i).unwrap(), Q.from_i64(if i % 2 == 0 { 1 } else { -1 }))).collect();
                assert!(aw(&dx).unwrap().is_empty(), "{s:?}");
            }
        }
    }
}

#[test]
fn q_binomial_table_entries() {
    let t = q_binomial_table(8, Q);
    assert_eq!(t[0], vec![Q.one()]);
    assert_eq!(t[5][2], Q.from_i64(4));
    assert_eq!(t[8][4], Q.from_i64(35));
    for (n, row) in t.iter().enumerate().skip(1) {
        assert!(row[0].is_zero());
        assert!(row[n].is_one());
    }
}

#[test]
fn unitriangular_up_to_twelve() {
    for size in 1..=12 {
        for e in 0..size {
            let mut f = vec![Q.zero(); size];
            f[e] = Q.one();
            let c = triangular_solve(&f).unwrap();
            assert_eq!(triangular_apply(&c).unwrap(), f);
            assert_eq!(triangular_solve(&triangular_apply(&f).unwrap()).unwrap(), f);
        }
    }
}

#[test]
fn round_trip_through_q_at_length_ten() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f: Vec<Scalar> = (0..10)
        .map(|_| {
            Q.from_rational(&BigRational::new(rng.gen_range(-50..50i64).into(), rng.gen_range(1..20i64).into()))
                .unwrap()
        })
        .collect();
    let c = triangular_solve(&f).unwrap();
    let family = sh_combination(9, &c, Q);
    assert_eq!(q_map(&family).unwrap(), f);
}

proptest! {
    #[test]
    fn solve_inverts_apply(v in prop::collection::vec(-1000i64..1000, 0..13)) {
        let f: Vec<Scalar> = v.iter().map(|&x| Q.from_i64(x)).collect();
        prop_assert_eq!(triangular_apply(&triangular_solve(&f).unwrap()).unwrap(), f.clone());
        let p = Field::prime(101).unwrap();
        let g: Vec<Scalar> = v.iter().map(|&x| p.from_i64(x)).collect();
        prop_assert_eq!(triangular_solve(&triangular_apply(&g).unwrap()).unwrap(), g);
    }
}
