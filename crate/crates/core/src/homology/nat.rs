//! The reduced, truncated complex of formal operations from the Hochschild
//! complex to itself.
//!
//! A degree-`l` element is a family `x_j ∈ Com(j+1, j+l+1)`. Its
//! differential is
//!
//! ```text
//! D(x)_j = d_h(x_j) - (-1)^l d_co(x_{j-1})
//! d_h(y)  = Σ_{i=0}^{h} (-1)^{i+1} face_i ∘ y        (post-composition, h = target - 1)
//! d_co(y) = Σ_{i=0}^{j} (-1)^{i+1} y ∘ face(j,0,i)    (pre-composition, j = source of y)
//! ```
//!
//! Only maps hitting every target point except the basepoint are kept
//! (the reduced quotient), and indices `j > K` are discarded (the
//! truncation quotient). Both quotients are compatible with `D`.

use std::collections::HashMap;

use serde::Serialize;

use super::complex::FiniteChainComplex;
use super::linalg::{rank, relative_rank, SparseMatrix, SparseVec};
use crate::error::{Error, Result};
use crate::finset::{face_map, face_point, FinSetMap, Image, Morphism};
use crate::loday::{bk_family, sh_family, OperationFamily};
use crate::scalar::{sign, Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NatBasisIndex {
    pub j: usize,
    pub degree: i64,
    pub map: FinSetMap,
}

/// Maps `{1..j+1} -> {1..j+l+1}` hitting every point of `{2..j+l+1}`, in
/// lexicographic order.
pub fn nat_basis(j: usize, l: i64) -> Vec<FinSetMap> {
    let t = j as i64 + l + 1;
    if t < 1 || t - 1 > j as i64 + 1 {
        return Vec::new();
    }
    let t = t as usize;
    let m = j + 1;
    let mut out = Vec::new();
    let mut cur: Image = std::iter::repeat_n(1u8, m).collect();
    loop {
        let mut count = [0u8; 256];
        for &v in &cur {
            count[v as usize] += 1;
        }
        if (2..=t).all(|p| count[p] > 0) {
            out.push(FinSetMap::from_raw(t, cur.clone()));
        }
        // odometer, last position fastest
        let mut pos = m;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if (cur[pos] as usize) < t {
                cur[pos] += 1;
                break;
            }
            cur[pos] = 1;
        }
    }
}

fn is_reduced(map: &FinSetMap) -> bool {
    map.hits_all(2)
}

/// `Σ_{i=0}^{h} (-1)^{i+1} face_i ∘ y` with `h = target(y) - 1`.
pub fn d_h(y: &Morphism) -> Morphism {
    let n = y.target();
    if n <= 1 {
        return Morphism::zero(y.source(), n.saturating_sub(1), y.field());
    }
    let h = n - 1;
    let mut out = Morphism::zero(y.source(), h, y.field());
    for i in 0..=h {
        for (m, c) in y.terms() {
            let im: Image = m.image().iter().map(|&t| face_point(h, i, t)).collect();
            out.add_term(FinSetMap::from_raw(h, im), c.scale_i64(sign(i as i64 + 1)));
        }
    }
    out
}

/// `Σ_{i=0}^{j} (-1)^{i+1} y ∘ face(j,0,i)` with `j = source(y)`; the result
/// has source `j + 1`.
pub fn d_co(y: &Morphism) -> Morphism {
    let j = y.source();
    let mut out = Morphism::zero(j + 1, y.target(), y.field());
    if j == 0 {
        return out;
    }
    for i in 0..=j {
        let f = face_map(j, 0, i).expect("face in range");
        for (m, c) in y.terms() {
            out.add_term(f.then(m), c.scale_i64(sign(i as i64 + 1)));
        }
    }
    out
}

/// The (unreduced) differential of a truncated family.
pub fn nat_differential(x: &OperationFamily) -> OperationFamily {
    let l = x.degree();
    OperationFamily::from_fn(l - 1, x.truncation(), x.field(), |j| {
        let t = (j as i64 + l) as usize;
        let mut acc = match x.component(j) {
            Some(xj) => d_h(xj),
            None => Morphism::zero(j + 1, t, x.field()),
        };
        if j >= 1 {
            if let Some(prev) = x.component(j - 1) {
                acc = acc.add(&d_co(prev).scale_i64(-sign(l))).expect("shapes agree");
            }
        }
        acc
    })
    .expect("component shapes")
}

/// Projection to the reduced quotient: drop maps missing a non-basepoint.
pub fn reduce_family(x: &OperationFamily) -> OperationFamily {
    OperationFamily::from_fn(x.degree(), x.truncation(), x.field(), |j| {
        let c = x.component(j).unwrap();
        let terms: Vec<_> = c.terms().filter(|(m, _)| is_reduced(m)).map(|(m, s)| (m.clone(), s.clone())).collect();
        Morphism::from_terms(c.source(), c.target(), c.field(), terms).unwrap()
    })
    .unwrap()
}

/// The truncated reduced complex together with basis lookup tables.
pub struct NatComplex {
    complex: FiniteChainComplex<NatBasisIndex>,
    truncation: usize,
    index: Vec<HashMap<FinSetMap, u32>>,
}

fn column(
    j: usize,
    l: i64,
    map: &FinSetMap,
    truncation: usize,
    rows: &HashMap<FinSetMap, u32>,
    field: Field,
) -> SparseVec {
    let mut acc: Vec<(u32, i64)> = Vec::new();
    let h = j as i64 + l;
    if h >= 1 {
        let h = h as usize;
        for i in 0..=h {
            let m = map.map_target(h, |t| face_point(h, i, t));
            if is_reduced(&m) {
                acc.push((rows[&m], sign(i as i64 + 1)));
            }
        }
    }
    if j < truncation {
        for i in 0..=j + 1 {
            let m = face_map(j + 1, 0, i).unwrap().then(map);
            acc.push((rows[&m], sign(l + i as i64)));
        }
    }
    acc.sort_by_key(|(r, _)| *r);
    let mut out: SparseVec = Vec::with_capacity(acc.len());
    let mut k = 0;
    while k < acc.len() {
        let r = acc[k].0;
        let mut c = 0;
        while k < acc.len() && acc[k].0 == r {
            c += acc[k].1;
            k += 1;
        }
        if c != 0 {
            out.push((r, field.from_i64(c)));
        }
    }
    out
}

/// Builds the reduced Nat complex truncated at `j <= truncation` in degrees
/// `lmin..=lmax`, checking `D ∘ D = 0`.
pub fn nat_complex(truncation: usize, lmin: i64, lmax: i64, field: Field) -> Result<NatComplex> {
    build(truncation, lmin, lmax, field, true)
}

pub(crate) fn build(truncation: usize, lmin: i64, lmax: i64, field: Field, check: bool) -> Result<NatComplex> {
    if lmin > lmax {
        return Err(Error::InvalidArgument(format!("empty degree window {lmin}..{lmax}")));
    }
    let mut bases = Vec::new();
    let mut index = Vec::new();
    for l in lmin..=lmax {
        let mut basis = Vec::new();
        for j in 0..=truncation {
            basis.extend(nat_basis(j, l).into_iter().map(|map| NatBasisIndex { j, degree: l, map }));
        }
        let idx: HashMap<FinSetMap, u32> = basis.iter().enumerate().map(|(i, b)| (b.map.clone(), i as u32)).collect();
        bases.push(basis);
        index.push(idx);
    }
    let mut diffs = Vec::new();
    for (i, l) in (lmin..=lmax).enumerate() {
        if i == 0 {
            diffs.push(SparseMatrix::zero(0, bases[0].len()));
            continue;
        }
        let rows = &index[i - 1];
        let cols = bases[i].iter().map(|b| column(b.j, l, &b.map, truncation, rows, field)).collect();
        diffs.push(SparseMatrix::from_cols(bases[i - 1].len(), cols));
    }
    let complex = if check {
        FiniteChainComplex::new(field, lmin, bases, diffs)?
    } else {
        FiniteChainComplex::new_unchecked(field, lmin, bases, diffs)?
    };
    Ok(NatComplex { complex, truncation, index })
}

impl NatComplex {
    pub fn complex(&self) -> &FiniteChainComplex<NatBasisIndex> {
        &self.complex
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Coordinates of the reduced truncation of `x`.
    pub fn family_vector(&self, x: &OperationFamily) -> Result<SparseVec> {
        let l = x.degree();
        if l < self.complex.lmin() || l > self.complex.lmax() {
            return Err(Error::InvalidArgument(format!("degree {l} outside the window")));
        }
        if x.field() != self.complex.field() {
            return Err(Error::FieldMismatch(x.field().to_string(), self.complex.field().to_string()));
        }
        let idx = &self.index[(l - self.complex.lmin()) as usize];
        let mut v: Vec<(u32, Scalar)> = Vec::new();
        for (j, m) in x.components() {
            if j > self.truncation {
                continue;
            }
            for (map, c) in m.terms() {
                if let Some(&r) = idx.get(map) {
                    v.push((r, c.clone()));
                }
            }
        }
        v.sort_by_key(|(r, _)| *r);
        Ok(v)
    }

    /// Whether the reduced truncation of `x` is a cycle. Degrees at the
    /// lower window edge are treated as cycles.
    pub fn is_cycle(&self, x: &OperationFamily) -> Result<bool> {
        let v = self.family_vector(x)?;
        Ok(self.complex.is_cycle(x.degree(), &v))
    }

    pub fn class_coords(&self, x: &OperationFamily) -> Result<Vec<Scalar>> {
        let v = self.family_vector(x)?;
        self.complex.class_coords(x.degree(), &v)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NatHomologyRow {
    pub degree: i64,
    /// `dim H_l` of the truncation at `K`.
    pub dim: usize,
    /// Rank of `H_l(trunc_{K+1}) -> H_l(trunc_K)`, when requested.
    pub stable_dim: Option<usize>,
    /// `dim - stable_dim`: classes that do not lift one step further.
    pub boundary_dim: Option<usize>,
    /// In degree 0 (resp. 1): the number of independent classes among
    /// `sh^0..sh^K` (resp. `B^0..B^K`).
    pub class_rank: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NatHomologyReport {
    pub truncation: usize,
    pub field: String,
    pub rows: Vec<NatHomologyRow>,
}

impl NatHomologyReport {
    pub fn row(&self, l: i64) -> Option<&NatHomologyRow> {
        self.rows.iter().find(|r| r.degree == l)
    }
}

/// Homology of the truncation at `K` in degrees `lmin..=lmax`, with class
/// ranks of `sh^k`/`B^k`, and optionally the stable part computed against
/// the truncation at `K + 1`.
pub fn nat_homology_report(
    truncation: usize,
    lmin: i64,
    lmax: i64,
    field: Field,
    stability: bool,
) -> Result<NatHomologyReport> {
    let k = truncation;
    let big = if stability { k + 1 } else { k };
    let nat = build(big, lmin - 1, lmax + 1, field, true)?;
    let c = nat.complex();
    let sel = |l: i64, pred: &dyn Fn(usize) -> bool| -> Vec<usize> {
        c.basis(l).iter().enumerate().filter(|(_, b)| pred(b.j)).map(|(i, _)| i).collect()
    };
    let low = |l: i64| sel(l, &|j| j <= k);
    let top = |l: i64| sel(l, &|j| j == k + 1);
    // rank of D restricted to indices <= K (the truncation at K)
    let rank_k = |l: i64| -> usize {
        match c.differential(l) {
            Some(d) if l > c.lmin() => rank(&d.select(&low(l), &low(l - 1)), field),
            _ => 0,
        }
    };
    let mut rows = Vec::new();
    for l in lmin..=lmax {
        let dim_k = low(l).len();
        let r_l = rank_k(l);
        let r_next = rank_k(l + 1);
        let dim = dim_k - r_l - r_next;
        let (stable_dim, boundary_dim) = if stability {
            let d = c.differential(l).unwrap();
            let z_big = c.dim(l) - rank(d, field);
            let s = top(l);
            let z_top = s.len() - rank(&d.select(&s, &top(l - 1)), field);
            let stable = z_big - z_top - r_next;
            (Some(stable), Some(dim - stable))
        } else {
            (None, None)
        };
        let class_rank = if l == 0 || l == 1 {
            let fams: Vec<OperationFamily> =
                (0..=k).map(|i| if l == 0 { sh_family(k, i, field) } else { bk_family(k, i, field) }).collect();
            let restrict = |v: SparseVec| -> SparseVec {
                let lows = low(l);
                let pos: HashMap<u32, u32> = lows.iter().enumerate().map(|(n, &o)| (o as u32, n as u32)).collect();
                v.into_iter().filter_map(|(r, x)| pos.get(&r).map(|&n| (n, x))).collect()
            };
            let vecs: Vec<SparseVec> =
                fams.iter().map(|f| nat.family_vector(f).map(restrict)).collect::<Result<_>>()?;
            let bounds = match c.differential(l + 1) {
                Some(d) => d.select(&low(l + 1), &low(l)),
                None => SparseMatrix::zero(dim_k, 0),
            };
            Some(relative_rank(&bounds, &vecs, field))
        } else {
            None
        };
        rows.push(NatHomologyRow { degree: l, dim, stable_dim, boundary_dim, class_rank });
    }
    Ok(NatHomologyReport { truncation: k, field: field.to_string(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loday::{b_family, l_op, lambda_family};

    const Q: Field = Field::Rational;

    #[test]
    fn basis_sizes() {
        // (j, l) = (1, 1): bijections {1,2} -> {2,3}
        let b = nat_basis(1, 1);
        assert_eq!(b.len(), 2);
        assert!(b.iter().all(|m| m.image().iter().all(|&t| t >= 2)));
        assert_eq!(nat_basis(5, 0).len(), 2520);
        assert_eq!(nat_basis(5, -1).len(), 3360);
        assert_eq!(nat_basis(3, 1).len(), 24);
        assert!(nat_basis(3, 2).is_empty());
        assert_eq!(nat_basis(0, -1).len(), 0);
    }

    #[test]
    fn eulerian_relation_small() {
        for n in 1..=5 {
            for k in 0..=n + 1 {
                let prev = match k {
                    0 => l_op(n - 1, 0, Q),
                    _ => l_op(n - 1, k, Q).sub(&l_op(n - 1, k - 1, Q)).unwrap(),
                };
                assert_eq!(d_h(&l_op(n, k, Q)), d_co(&prev), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn families_are_cycles() {
        for k in 0..=4 {
            assert!(nat_differential(&sh_family(5, k, Q)).is_zero(), "sh^{k}");
            assert!(nat_differential(&lambda_family(5, k, Q)).is_zero(), "λ^{k}");
            assert!(nat_differential(&bk_family(5, k, Q)).is_zero(), "B^{k}");
        }
        assert!(nat_differential(&b_family(5, Q)).is_zero());
    }

    #[test]
    fn complex_matches_family_differential() {
        let nat = nat_complex(4, -1, 1, Q).unwrap();
        let x = b_family(4, Q).add(&bk_family(4, 2, Q).scale_i64(3)).unwrap();
        let d = nat_differential(&x);
        let v = nat.family_vector(&x).unwrap();
        let dv = nat.complex().differential(1).unwrap().apply(&v);
        assert_eq!(dv, nat.family_vector(&reduce_family(&d)).unwrap());
        let y = OperationFamily::from_fn(0, 4, Q, |j| l_op(j, 1.min(j), Q)).unwrap();
        let dy = nat.complex().differential(0).unwrap().apply(&nat.family_vector(&y).unwrap());
        assert_eq!(dy, nat.family_vector(&reduce_family(&nat_differential(&y))).unwrap());
    }

    #[test]
    fn small_homology_over_both_fields() {
        for field in [Q, Field::Prime(crate::scalar::DEFAULT_PRIME)] {
            let r = nat_homology_report(3, -1, 1, field, true).unwrap();
            assert_eq!(r.row(0).unwrap().class_rank, Some(4));
            assert_eq!(r.row(1).unwrap().class_rank, Some(4));
            assert_eq!(r.row(0).unwrap().stable_dim, Some(4));
            assert_eq!(r.row(1).unwrap().stable_dim, Some(4));
            assert_eq!(r.row(-1).unwrap().stable_dim, Some(0));
        }
    }
}
