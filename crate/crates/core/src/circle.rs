//! The simplicial circle `S¹_n = FinSet(1, n+1)`, its products, and the
//! reduced Alexander–Whitney map.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::finset::{face_point, FinSetMap, Morphism};
use crate::loday::OperationFamily;
use crate::scalar::{binomial, Field, Scalar};

/// A point `j ∈ {1..n+1}` of `S¹_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CircleSimplex {
    pub level: usize,
    pub point: usize,
}

impl CircleSimplex {
    pub fn new(level: usize, point: usize) -> Result<CircleSimplex> {
        if point < 1 || point > level + 1 {
            return Err(Error::IndexOutOfRange(format!("point {point} at level {level}")));
        }
        Ok(CircleSimplex { level, point })
    }

    pub fn face(self, i: usize) -> Result<CircleSimplex> {
        Ok(CircleSimplex { level: self.level - 1, point: circle_face(self.level, i, self.point)? })
    }

    pub fn degeneracy(self, i: usize) -> Result<CircleSimplex> {
        Ok(CircleSimplex { level: self.level + 1, point: circle_degeneracy(self.level, i, self.point)? })
    }
}

/// `d_i: S¹_n -> S¹_{n-1}`.
pub fn circle_face(n: usize, i: usize, j: usize) -> Result<usize> {
    if n < 1 || i > n || j < 1 || j > n + 1 {
        return Err(Error::IndexOutOfRange(format!("d_{i} of {j} at level {n}")));
    }
    Ok(face_point(n, i, j as u8) as usize)
}

/// `s_i: S¹_n -> S¹_{n+1}`.
pub fn circle_degeneracy(n: usize, i: usize, j: usize) -> Result<usize> {
    if i > n || j < 1 || j > n + 1 {
        return Err(Error::IndexOutOfRange(format!("s_{i} of {j} at level {n}")));
    }
    Ok(if j <= i + 1 { j } else { j + 1 })
}

/// A simplex of `(S¹)^{×m}` at level `n`, i.e. a map `{1..m} -> {1..n+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductSimplex {
    pub level: usize,
    pub points: Vec<usize>,
}

impl ProductSimplex {
    pub fn new(level: usize, points: Vec<usize>) -> Result<ProductSimplex> {
        if let Some(p) = points.iter().find(|&&p| p < 1 || p > level + 1) {
            return Err(Error::IndexOutOfRange(format!("point {p} at level {level}")));
        }
        Ok(ProductSimplex { level, points })
    }

    pub fn from_map(map: &FinSetMap) -> Result<ProductSimplex> {
        if map.target() == 0 {
            return Err(Error::InvalidArgument("maps into the empty set are not simplices".into()));
        }
        Ok(ProductSimplex { level: map.target() - 1, points: map.image().iter().map(|&p| p as usize).collect() })
    }

    pub fn factors(&self) -> usize {
        self.points.len()
    }

    pub fn face(&self, i: usize) -> Result<ProductSimplex> {
        let points = self.points.iter().map(|&p| circle_face(self.level, i, p)).collect::<Result<_>>()?;
        Ok(ProductSimplex { level: self.level - 1, points })
    }

    pub fn degeneracy(&self, i: usize) -> Result<ProductSimplex> {
        let points = self.points.iter().map(|&p| circle_degeneracy(self.level, i, p)).collect::<Result<_>>()?;
        Ok(ProductSimplex { level: self.level + 1, points })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Letter {
    One,
    Y,
}

/// A linear combination of words in `{1, y}`: the basis of
/// `C̄(S¹)^{⊗m}`.
pub type ReducedChain = BTreeMap<Vec<Letter>, Scalar>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReducedTensor {
    pub letters: Vec<Letter>,
    pub coefficient: Scalar,
}

impl fmt::Display for ReducedTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<&str> = self.letters.iter().map(|l| if *l == Letter::One { "1" } else { "y" }).collect();
        write!(f, "{}·{}", self.coefficient, w.join("⊗"))
    }
}

/// The front/back face composite applied to a single point, reduced to
/// `{1, y}`; `None` when the resulting simplex is degenerate.
fn aw_factor(level: usize, point: u8, s: usize, k: usize) -> Option<Letter> {
    let mut p = point;
    let mut lvl = level;
    // d_{s+1} ∘ ... ∘ d_n, applying d_n first
    while lvl > s {
        p = face_point(lvl, lvl, p);
        lvl -= 1;
    }
    // then d_0 repeated s - k times
    for _ in 0..s - k {
        p = face_point(lvl, 0, p);
        lvl -= 1;
    }
    match (k, p) {
        (0, _) => Some(Letter::One),
        (1, 2) => Some(Letter::Y),
        _ => None,
    }
}

/// Adds `coeff · AW(simplex)` to `out`. Only compositions with entries in
/// `{0, 1}` are enumerated; all others vanish in the reduced complex.
fn aw_simplex_into(level: usize, points: &[u8], coeff: &Scalar, out: &mut ReducedChain) {
    let m = points.len();
    if level > m {
        return;
    }
    // choose which `level` of the m factors get k = 1
    let mut ks = vec![0usize; m];
    fn rec(
        idx: usize,
        ones_left: usize,
        ks: &mut Vec<usize>,
        level: usize,
        points: &[u8],
        coeff: &Scalar,
        out: &mut ReducedChain,
    ) {
        let m = ks.len();
        if m - idx < ones_left {
            return;
        }
        if idx == m {
            let mut s = 0;
            let mut word = Vec::with_capacity(m);
            for j in 0..m {
                s += ks[j];
                match aw_factor(level, points[j], s, ks[j]) {
                    Some(l) => word.push(l),
                    None => return,
                }
            }
            out.entry(word).and_modify(|c| *c += coeff).or_insert_with(|| coeff.clone());
            return;
        }
        ks[idx] = 0;
        rec(idx + 1, ones_left, ks, level, points, coeff, out);
        if ones_left > 0 {
            ks[idx] = 1;
            rec(idx + 1, ones_left - 1, ks, level, points, coeff, out);
            ks[idx] = 0;
        }
    }
    rec(0, level, &mut ks, level, points, coeff, out);
}

/// The reduced Alexander–Whitney map on a linear combination of product
/// simplices of equal level and factor count.
pub fn aw(x: &[(ProductSimplex, Scalar)]) -> Result<Vec<ReducedTensor>> {
    let mut out = ReducedChain::new();
    if let Some((first, _)) = x.first() {
        for (s, c) in x {
            if s.level != first.level || s.factors() != first.factors() {
                return Err(Error::SizeMismatch("simplices of different shapes".into()));
            }
            let pts: Vec<u8> = s.points.iter().map(|&p| p as u8).collect();
            aw_simplex_into(s.level, &pts, c, &mut out);
        }
    }
    Ok(out
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(letters, coefficient)| ReducedTensor { letters, coefficient })
        .collect())
}

/// `AW` of a morphism read as a chain on `(S¹)^{×m}` at level `n - 1`.
pub fn aw_morphism(x: &Morphism) -> ReducedChain {
    let mut out = ReducedChain::new();
    if x.target() == 0 {
        return out;
    }
    for (m, c) in x.terms() {
        aw_simplex_into(x.target() - 1, m.image(), c, &mut out);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Coefficient of `a^n = 1 ⊗ y^{⊗n}` (degree 0) or `b^n = y^{⊗ n+1}`
/// (degree 1) in `AW(x_n)`, for each component.
pub fn q_map(x: &OperationFamily) -> Result<Vec<Scalar>> {
    let l = x.degree();
    if l != 0 && l != 1 {
        return Err(Error::InvalidArgument(format!("Q vanishes in degree {l}; only 0 and 1 are supported")));
    }
    let field = x.field();
    Ok(x.components()
        .map(|(n, m)| {
            let mut word = vec![Letter::Y; n + 1];
            if l == 0 {
                word[0] = Letter::One;
            }
            aw_morphism(m).remove(&word).unwrap_or_else(|| field.zero())
        })
        .collect())
}

/// `binom(n-1, n-k)`: the coefficient of `a^n` in `Q(sh^k)_n` (and of
/// `b^n` in `Q(B^k)_n`), with the `n = 0` entry equal to `[k = 0]`.
pub fn q_binomial_coefficient(n: usize, k: usize) -> num_bigint::BigInt {
    if n == 0 {
        return num_bigint::BigInt::from((k == 0) as i64);
    }
    binomial(n as i64 - 1, n as i64 - k as i64)
}

/// Solves `Q(Σ c_k sh^k)_n = f_n a^n` for the coefficients `c`.
pub fn triangular_solve(f: &[Scalar]) -> Result<Vec<Scalar>> {
    let mut c: Vec<Scalar> = Vec::with_capacity(f.len());
    for (n, fv) in f.iter().enumerate() {
        let mut v = fv.clone();
        for (k, ck) in c.iter().enumerate().skip(1) {
            let b = fv.field().from_bigint(&q_binomial_coefficient(n, k));
            v = v.checked_sub(&ck.checked_mul(&b)?)?;
        }
        c.push(v);
    }
    Ok(c)
}

/// The inverse of [`triangular_solve`]: `f_n = Σ_k c_k binom(n-1, n-k)`.
pub fn triangular_apply(c: &[Scalar]) -> Result<Vec<Scalar>> {
    let mut f = Vec::with_capacity(c.len());
    for n in 0..c.len() {
        let field = c[n].field();
        let mut acc = field.zero();
        for (k, ck) in c.iter().enumerate().take(n + 1) {
            acc = acc.checked_add(&ck.checked_mul(&field.from_bigint(&q_binomial_coefficient(n, k)))?)?;
        }
        f.push(acc);
    }
    Ok(f)
}

/// The triangular table `binom(n-1, n-k)` for `0 <= k <= n <= max_n`.
pub fn q_binomial_table(max_n: usize, field: Field) -> Vec<Vec<Scalar>> {
    (0..=max_n).map(|n| (0..=n).map(|k| field.from_bigint(&q_binomial_coefficient(n, k))).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loday::{bk_family, sh_family};

    const Q: Field = Field::Rational;

    #[test]
    fn faces_of_points() {
        assert_eq!(circle_face(1, 0, 2).unwrap(), 1);
        for n in 1..6 {
            assert_eq!(circle_face(n, n, n + 1).unwrap(), 1);
            for i in 0..=n {
                assert_eq!(circle_face(n, i, 1).unwrap(), 1);
            }
        }
        assert!(circle_face(2, 3, 1).is_err());
        assert!(circle_face(2, 0, 4).is_err());
    }

    #[test]
    fn aw_of_identity_and_shift() {
        for n in 0..6 {
            let id = ProductSimplex::new(n, (1..=n + 1).collect()).unwrap();
            let r = aw(&[(id, Q.one())]).unwrap();
            let mut w = vec![Letter::Y; n + 1];
            w[0] = Letter::One;
            assert_eq!(r, vec![ReducedTensor { letters: w, coefficient: Q.one() }]);
            let shift = ProductSimplex::new(n, (2..=n + 1).collect()).unwrap();
            if n >= 1 {
                let r = aw(&[(shift, Q.one())]).unwrap();
                assert_eq!(r, vec![ReducedTensor { letters: vec![Letter::Y; n], coefficient: Q.one() }]);
            }
        }
    }

    #[test]
    fn q_of_families() {
        let sh = (0..=5).map(|k| q_map(&sh_family(6, k, Q)).unwrap()).collect::<Vec<_>>();
        for (k, row) in sh.iter().enumerate() {
            for (n, c) in row.iter().enumerate() {
                assert_eq!(c, &Q.from_bigint(&q_binomial_coefficient(n, k)), "sh^{k} at {n}");
            }
        }
        let id = sh_family(6, 0, Q).add(&sh_family(6, 1, Q)).unwrap();
        assert!(q_map(&id).unwrap().iter().all(Scalar::is_one));
        for k in 0..=4 {
            let q = q_map(&bk_family(6, k, Q)).unwrap();
            for (n, c) in q.iter().enumerate() {
                assert_eq!(c, &Q.from_bigint(&q_binomial_coefficient(n, k)), "B^{k} at {n}");
            }
        }
    }

    #[test]
    fn triangular_examples() {
        let ones = vec![Q.one(); 6];
        let c = triangular_solve(&ones).unwrap();
        assert_eq!(c[0], Q.one());
        assert_eq!(c[1], Q.one());
        assert!(c[2..].iter().all(Scalar::is_zero));
        let zeros = vec![Q.zero(); 6];
        assert!(triangular_solve(&zeros).unwrap().iter().all(Scalar::is_zero));
        assert_eq!(triangular_apply(&c).unwrap(), ones);
    }
}
