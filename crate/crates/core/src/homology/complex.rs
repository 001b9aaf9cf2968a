//! Finite chain complexes and their homology.

use serde::Serialize;

use super::linalg::{kernel, rank, with_engine, Echelon, Engine, SparseMatrix, SparseVec};
use crate::error::{Error, Result};
use crate::scalar::Field;

/// Graded spaces `C_l`, `lmin <= l <= lmax`, with labeled bases and
/// differentials `d_l: C_l -> C_{l-1}`. Spaces outside the window are zero.
#[derive(Clone, Debug)]
pub struct FiniteChainComplex<L> {
    field: Field,
    lmin: i64,
    bases: Vec<Vec<L>>,
    diffs: Vec<SparseMatrix>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyDegree {
    pub degree: i64,
    pub dim: usize,
    /// Cycle representatives as coordinate vectors in the degree's basis.
    pub representatives: Vec<SparseVec>,
}

impl<L> FiniteChainComplex<L> {
    /// `diffs[i]` is `d_{lmin+i}`; `diffs[0]` must have zero rows. Checks
    /// shapes and `d ∘ d = 0`.
    pub fn new(field: Field, lmin: i64, bases: Vec<Vec<L>>, diffs: Vec<SparseMatrix>) -> Result<Self> {
        let c = Self::new_unchecked(field, lmin, bases, diffs)?;
        for i in 1..c.diffs.len() {
            if !c.diffs[i - 1].compose(&c.diffs[i])?.is_zero() {
                return Err(Error::InvalidArgument(format!("d∘d ≠ 0 in degree {}", lmin + i as i64)));
            }
        }
        Ok(c)
    }

    /// Checks shapes only.
    pub fn new_unchecked(field: Field, lmin: i64, bases: Vec<Vec<L>>, diffs: Vec<SparseMatrix>) -> Result<Self> {
        if bases.len() != diffs.len() {
            return Err(Error::SizeMismatch("one differential per degree required".into()));
        }
        for (i, d) in diffs.iter().enumerate() {
            let rows = if i == 0 { 0 } else { bases[i - 1].len() };
            if d.ncols != bases[i].len() || d.nrows != rows {
                return Err(Error::SizeMismatch(format!(
                    "d_{} is {}x{}, expected {}x{}",
                    lmin + i as i64,
                    d.nrows,
                    d.ncols,
                    rows,
                    bases[i].len()
                )));
            }
        }
        Ok(FiniteChainComplex { field, lmin, bases, diffs })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn lmin(&self) -> i64 {
        self.lmin
    }

    pub fn lmax(&self) -> i64 {
        self.lmin + self.bases.len() as i64 - 1
    }

    fn idx(&self, l: i64) -> Option<usize> {
        (l >= self.lmin && l <= self.lmax()).then(|| (l - self.lmin) as usize)
    }

    pub fn dim(&self, l: i64) -> usize {
        self.idx(l).map_or(0, |i| self.bases[i].len())
    }

    pub fn basis(&self, l: i64) -> &[L] {
        self.idx(l).map_or(&[], |i| &self.bases[i])
    }

    /// `d_l`, or `None` outside the window.
    pub fn differential(&self, l: i64) -> Option<&SparseMatrix> {
        self.idx(l).map(|i| &self.diffs[i])
    }

    pub fn rank_d(&self, l: i64) -> usize {
        self.differential(l).map_or(0, |d| rank(d, self.field))
    }

    /// `dim H_l` for every degree, from ranks only.
    pub fn homology_dims(&self) -> Vec<(i64, usize)> {
        let ranks: Vec<usize> = (self.lmin..=self.lmax() + 1).map(|l| self.rank_d(l)).collect();
        (self.lmin..=self.lmax())
            .map(|l| {
                let i = (l - self.lmin) as usize;
                (l, self.dim(l) - ranks[i] - ranks[i + 1])
            })
            .collect()
    }

    /// Homology with cycle representatives.
    pub fn homology(&self) -> Vec<HomologyDegree> {
        (self.lmin..=self.lmax())
            .map(|l| {
                let reps = self.representatives(l);
                HomologyDegree { degree: l, dim: reps.len(), representatives: reps }
            })
            .collect()
    }

    fn boundaries(&self, l: i64) -> Vec<SparseVec> {
        self.differential(l + 1).map_or_else(Vec::new, |d| d.cols.clone())
    }

    fn representatives(&self, l: i64) -> Vec<SparseVec> {
        let cycles = match self.differential(l) {
            Some(d) => kernel(d, self.field),
            None => return Vec::new(),
        };
        let bounds = self.boundaries(l);
        fn go<En: Engine>(en: En, bounds: &[SparseVec], cycles: Vec<SparseVec>) -> Vec<SparseVec> {
            let mut ech = Echelon::new(en, false);
            for b in bounds {
                let v = ech.lift(b);
                ech.insert(v);
            }
            let mut reps = Vec::new();
            for z in cycles {
                let v = ech.lift(&z);
                if ech.insert(v).is_none() {
                    reps.push(z);
                }
            }
            reps
        }
        with_engine(self.field, |e| go(e, &bounds, cycles.clone()), |e| go(e, &bounds, cycles.clone()))
    }

    pub fn is_cycle(&self, l: i64, v: &SparseVec) -> bool {
        self.differential(l).is_none_or(|d| d.apply(v).is_empty())
    }

    /// Coordinates of the class of the cycle `v` with respect to the
    /// representatives returned by [`homology`](Self::homology).
    pub fn class_coords(&self, l: i64, v: &SparseVec) -> Result<Vec<crate::scalar::Scalar>> {
        if !self.is_cycle(l, v) {
            return Err(Error::NotACycle);
        }
        let reps = self.representatives(l);
        let bounds = self.boundaries(l);
        fn go<En: Engine>(
            en: En,
            bounds: &[SparseVec],
            reps: &[SparseVec],
            v: &SparseVec,
        ) -> Option<Vec<(u32, crate::scalar::Scalar)>> {
            let mut ech = Echelon::new(en, true);
            for b in bounds.iter().chain(reps) {
                let x = ech.lift(b);
                ech.insert(x);
            }
            let x = ech.lift(v);
            ech.solve(x).map(|s| ech.lower(&s))
        }
        let sol = with_engine(self.field, |e| go(e, &bounds, &reps, v), |e| go(e, &bounds, &reps, v))
            .ok_or_else(|| Error::InvalidArgument("cycle outside the computed span".into()))?;
        let mut coords = vec![self.field.zero(); reps.len()];
        for (id, c) in sol {
            if let Some(k) = (id as usize).checked_sub(bounds.len()) {
                coords[k] = c;
            }
        }
        Ok(coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_term(field: Field, d: i64) -> FiniteChainComplex<&'static str> {
        let col = if d == 0 { vec![] } else { vec![(0, field.from_i64(d))] };
        FiniteChainComplex::new(
            field,
            0,
            vec![vec!["a"], vec!["b"]],
            vec![SparseMatrix::zero(0, 1), SparseMatrix::from_cols(1, vec![col])],
        )
        .unwrap()
    }

    #[test]
    fn two_term_complexes() {
        for field in [Field::Rational, Field::Prime(11)] {
            assert_eq!(two_term(field, 0).homology_dims(), vec![(0, 1), (1, 1)]);
            assert_eq!(two_term(field, 1).homology_dims(), vec![(0, 0), (1, 0)]);
            let h = two_term(field, 0).homology();
            assert_eq!(h[1].representatives.len(), 1);
        }
    }

    #[test]
    fn rejects_non_complex() {
        let f = Field::Rational;
        let one = |r| vec![(r, f.one())];
        let r = FiniteChainComplex::new(
            f,
            0,
            vec![vec![0], vec![1], vec![2]],
            vec![
                SparseMatrix::zero(0, 1),
                SparseMatrix::from_cols(1, vec![one(0)]),
                SparseMatrix::from_cols(1, vec![one(0)]),
            ],
        );
        assert!(r.is_err());
    }

    #[test]
    fn class_coordinates() {
        let f = Field::Rational;
        // C_1 = <a, b>, C_0 = <c>, d(a) = c, d(b) = c: H_1 = <a - b>
        let c = FiniteChainComplex::new(
            f,
            0,
            vec![vec!["c"], vec!["a", "b"]],
            vec![SparseMatrix::zero(0, 1), SparseMatrix::from_cols(1, vec![vec![(0, f.one())], vec![(0, f.one())]])],
        )
        .unwrap();
        let h = c.homology();
        assert_eq!(h[1].dim, 1);
        let z = vec![(0, f.from_i64(3)), (1, f.from_i64(-3))];
        let coords = c.class_coords(1, &z).unwrap();
        let rep = &h[1].representatives[0];
        let scaled: SparseVec = rep.iter().map(|(r, x)| (*r, x * &coords[0])).collect();
        assert_eq!(scaled, z);
        assert!(matches!(c.class_coords(1, &vec![(0, f.one())]), Err(Error::NotACycle)));
        assert!(c.class_coords(1, &vec![]).unwrap().iter().all(|x| x.is_zero()));
    }
}
