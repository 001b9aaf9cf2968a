//! Sparse exact elimination over `ℚ` or `F_p`.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{inv_mod, Field, Scalar};

/// Sparse column: `(row, value)` pairs sorted by row, no zeros.
pub type SparseVec = Vec<(u32, Scalar)>;

/// A sparse matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zero(nrows: usize, ncols: usize) -> SparseMatrix {
        SparseMatrix { nrows, ncols, cols: vec![Vec::new(); ncols] }
    }

    pub fn from_cols(nrows: usize, cols: Vec<SparseVec>) -> SparseMatrix {
        SparseMatrix { nrows, ncols: cols.len(), cols }
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut acc: std::collections::BTreeMap<u32, Scalar> = std::collections::BTreeMap::new();
        for (c, x) in v {
            for (r, a) in &self.cols[*c as usize] {
                let p = a * x;
                acc.entry(*r).and_modify(|e| *e += &p).or_insert(p);
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    /// `self ∘ rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        if rhs.nrows != self.ncols {
            return Err(Error::SizeMismatch(format!(
                "{}x{} after {}x{}",
                self.nrows, self.ncols, rhs.nrows, rhs.ncols
            )));
        }
        Ok(SparseMatrix::from_cols(self.nrows, rhs.cols.iter().map(|c| self.apply(c)).collect()))
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    /// Submatrix on the given column and row index sets (rows renumbered
    /// in the given order).
    pub fn select(&self, cols: &[usize], rows: &[usize]) -> SparseMatrix {
        let mut row_map = vec![u32::MAX; self.nrows];
        for (new, &old) in rows.iter().enumerate() {
            row_map[old] = new as u32;
        }
        let cols = cols
            .iter()
            .map(|&c| {
                let mut v: SparseVec = self.cols[c]
                    .iter()
                    .filter(|(r, _)| row_map[*r as usize] != u32::MAX)
                    .map(|(r, x)| (row_map[*r as usize], x.clone()))
                    .collect();
                v.sort_by_key(|(r, _)| *r);
                v
            })
            .collect();
        SparseMatrix::from_cols(rows.len(), cols)
    }
}

/// Field arithmetic specialized for elimination.
pub(crate) trait Engine {
    type E: Clone;
    fn lift(&self, s: &Scalar) -> Self::E;
    fn lower(&self, e: &Self::E) -> Scalar;
    fn is_zero(&self, a: &Self::E) -> bool;
    /// `a - c*b`
    fn sub_mul(&self, a: &Self::E, c: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
    fn one(&self) -> Self::E;
}

pub(crate) struct ModP(pub u64);

impl Engine for ModP {
    type E = u64;
    fn lift(&self, s: &Scalar) -> u64 {
        match s.to_field(Field::Prime(self.0)).expect("scalar not representable mod p") {
            Scalar::Prime { value, .. } => value,
            Scalar::Rational(_) => unreachable!(),
        }
    }
    fn lower(&self, e: &u64) -> Scalar {
        Scalar::Prime { value: *e, modulus: self.0 }
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn sub_mul(&self, a: &u64, c: &u64, b: &u64) -> u64 {
        (a + self.0 - c * b % self.0) % self.0
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.0
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.0 - a) % self.0
    }
    fn inv(&self, a: &u64) -> u64 {
        inv_mod(*a, self.0)
    }
    fn one(&self) -> u64 {
        1
    }
}

pub(crate) struct Rat;

impl Engine for Rat {
    type E = BigRational;
    fn lift(&self, s: &Scalar) -> BigRational {
        s.as_rational().cloned().expect("prime-field scalar in a rational computation")
    }
    fn lower(&self, e: &BigRational) -> Scalar {
        Scalar::Rational(e.clone())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn sub_mul(&self, a: &BigRational, c: &BigRational, b: &BigRational) -> BigRational {
        a - c * b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
}

type Vec2<E> = Vec<(u32, E)>;

/// `a - c*b` on sorted sparse vectors.
fn axpy<En: Engine>(en: &En, a: &Vec2<En::E>, c: &En::E, b: &Vec2<En::E>) -> Vec2<En::E> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, en.neg(&en.mul(c, &b[j].1))));
            j += 1;
        } else {
            let v = en.sub_mul(&a[i].1, c, &b[j].1);
            if !en.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Incremental column echelon form keyed by the largest row index of each
/// stored vector. Optionally records, for every stored vector, its
/// expression in terms of the inserted vectors.
pub(crate) struct Echelon<En: Engine> {
    en: En,
    pivots: std::collections::HashMap<u32, usize>,
    vecs: Vec<Vec2<En::E>>,
    traces: Option<Vec<Vec2<En::E>>>,
    inserted: usize,
}

impl<En: Engine> Echelon<En> {
    pub fn new(en: En, track: bool) -> Echelon<En> {
        Echelon { en, pivots: Default::default(), vecs: Vec::new(), traces: track.then(Vec::new), inserted: 0 }
    }

    pub fn rank(&self) -> usize {
        self.vecs.len()
    }

    pub fn lift(&self, v: &SparseVec) -> Vec2<En::E> {
        v.iter().map(|(r, s)| (*r, self.en.lift(s))).filter(|(_, e)| !self.en.is_zero(e)).collect()
    }

    pub fn lower(&self, v: &Vec2<En::E>) -> SparseVec {
        v.iter().map(|(r, e)| (*r, self.en.lower(e))).collect()
    }

    /// Reduces `v` against the stored vectors. Returns the residual and the
    /// combination (over inserted ids) that was subtracted.
    pub fn reduce(&self, mut v: Vec2<En::E>, want_trace: bool) -> (Vec2<En::E>, Vec2<En::E>) {
        let mut trace: Vec2<En::E> = Vec::new();
        while let Some((low, c)) = v.last().cloned() {
            let Some(&p) = self.pivots.get(&low) else { break };
            // stored vectors are normalized to 1 at their pivot
            v = axpy(&self.en, &v, &c, &self.vecs[p]);
            if want_trace {
                if let Some(tr) = &self.traces {
                    trace = axpy(&self.en, &trace, &self.en.neg(&c), &tr[p]);
                }
            }
        }
        (v, trace)
    }

    /// Fully reduces `v` (not only at its lowest entry).
    fn reduce_full(&self, v: Vec2<En::E>, want_trace: bool) -> (Vec2<En::E>, Vec2<En::E>) {
        let (mut v, mut trace) = self.reduce(v, want_trace);
        let mut idx = v.len();
        while idx > 0 {
            idx -= 1;
            let (row, c) = v[idx].clone();
            if let Some(&p) = self.pivots.get(&row) {
                let keep = v[idx + 1..].to_vec();
                let head: Vec2<En::E> = v[..=idx].to_vec();
                let reduced = axpy(&self.en, &head, &c, &self.vecs[p]);
                if want_trace {
                    if let Some(tr) = &self.traces {
                        trace = axpy(&self.en, &trace, &self.en.neg(&c), &tr[p]);
                    }
                }
                v = reduced;
                idx = v.len();
                v.extend(keep);
            }
        }
        (v, trace)
    }

    /// Inserts `v`; returns `Some(kernel_trace)` if it was dependent (the
    /// trace expresses a linear relation among inserted vectors, including
    /// the new one), `None` otherwise.
    pub fn insert(&mut self, v: Vec2<En::E>) -> Option<Vec2<En::E>> {
        let id = self.inserted as u32;
        self.inserted += 1;
        let track = self.traces.is_some();
        let (v, trace) = self.reduce(v, track);
        // the relation is: original - Σ c_p stored_p = residual
        // residual = e_id - trace in inserted coordinates
        let mut full_trace: Vec2<En::E> = trace.iter().map(|(r, e)| (*r, self.en.neg(e))).collect();
        if track {
            full_trace.push((id, self.en.one()));
        }
        match v.last() {
            None => Some(full_trace),
            Some((low, c)) => {
                let inv = self.en.inv(c);
                let v: Vec2<En::E> = v.iter().map(|(r, e)| (*r, self.en.mul(e, &inv))).collect();
                self.pivots.insert(*low, self.vecs.len());
                self.vecs.push(v);
                if let Some(tr) = &mut self.traces {
                    tr.push(full_trace.iter().map(|(r, e)| (*r, self.en.mul(e, &inv))).collect());
                }
                None
            }
        }
    }

    /// Expresses `v` in terms of inserted vectors, if it lies in the span.
    pub fn solve(&self, v: Vec2<En::E>) -> Option<Vec2<En::E>> {
        let (res, trace) = self.reduce_full(v, true);
        if res.is_empty() {
            Some(trace)
        } else {
            None
        }
    }
}

/// Which elimination engine to use for a field.
pub(crate) fn with_engine<R>(field: Field, f_p: impl FnOnce(ModP) -> R, f_q: impl FnOnce(Rat) -> R) -> R {
    match field {
        Field::Prime(p) => f_p(ModP(p)),
        Field::Rational => f_q(Rat),
    }
}

/// Rank of a sparse matrix over `field`.
pub fn rank(m: &SparseMatrix, field: Field) -> usize {
    fn go<En: Engine>(en: En, m: &SparseMatrix) -> usize {
        let mut ech = Echelon::new(en, false);
        for c in &m.cols {
            let v = ech.lift(c);
            ech.insert(v);
        }
        ech.rank()
    }
    with_engine(field, |e| go(e, m), |e| go(e, m))
}

/// Rank of the span of `extra` modulo the column space of `m`: the number
/// of `extra` vectors independent of `im(m)` and of each other.
pub fn relative_rank(m: &SparseMatrix, extra: &[SparseVec], field: Field) -> usize {
    fn go<En: Engine>(en: En, m: &SparseMatrix, extra: &[SparseVec]) -> usize {
        let mut ech = Echelon::new(en, false);
        for c in &m.cols {
            let v = ech.lift(c);
            ech.insert(v);
        }
        let base = ech.rank();
        for c in extra {
            let v = ech.lift(c);
            ech.insert(v);
        }
        ech.rank() - base
    }
    with_engine(field, |e| go(e, m, extra), |e| go(e, m, extra))
}

/// A basis of the kernel of `m`, as sparse coordinate vectors.
pub fn kernel(m: &SparseMatrix, field: Field) -> Vec<SparseVec> {
    fn go<En: Engine>(en: En, m: &SparseMatrix) -> Vec<SparseVec> {
        let mut ech = Echelon::new(en, true);
        let mut out = Vec::new();
        for c in &m.cols {
            let v = ech.lift(c);
            if let Some(rel) = ech.insert(v) {
                out.push(ech.lower(&rel));
            }
        }
        out
    }
    with_engine(field, |e| go(e, m), |e| go(e, m))
}

/// Writes `v` as a combination of the columns of `m`, if possible.
pub fn solve(m: &SparseMatrix, v: &SparseVec, field: Field) -> Option<SparseVec> {
    fn go<En: Engine>(en: En, m: &SparseMatrix, v: &SparseVec) -> Option<SparseVec> {
        let mut ech = Echelon::new(en, true);
        for c in &m.cols {
            let x = ech.lift(c);
            ech.insert(x);
        }
        let x = ech.lift(v);
        ech.solve(x).map(|s| ech.lower(&s))
    }
    with_engine(field, |e| go(e, m, v), |e| go(e, m, v))
}
