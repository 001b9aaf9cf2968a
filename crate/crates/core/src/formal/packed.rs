//! Maps packed four bits per point into a `u64`, with machine-word
//! coefficients (checked integers over Q, residues over F_p). Used for the
//! large compositions and differentials; everything falls back to the
//! `Morphism` path when a map or a coefficient does not fit.

use num_traits::ToPrimitive;
use rustc_hash::FxHashMap;

use super::{block_face, MultiOperation, Multidegree, Signature};
use crate::finset::{FinSetMap, Morphism};
use crate::scalar::{Field, Scalar};

const MAX_POINTS: usize = 16;

type Key = (Multidegree, Multidegree);

#[derive(Clone, Copy, Debug)]
pub(super) struct Ring {
    modulus: Option<u64>,
}

impl Ring {
    pub(super) fn of(field: Field) -> Ring {
        match field {
            Field::Rational => Ring { modulus: None },
            Field::Prime(p) => Ring { modulus: Some(p) },
        }
    }

    fn lift(&self, s: &Scalar) -> Option<i64> {
        match (self.modulus, s) {
            (None, Scalar::Rational(q)) if q.is_integer() => q.numer().to_i64(),
            (Some(_), Scalar::Prime { value, .. }) => Some(*value as i64),
            _ => None,
        }
    }

    fn add(&self, a: i64, b: i64) -> Option<i64> {
        match self.modulus {
            None => a.checked_add(b),
            Some(p) => Some((a + b).rem_euclid(p as i64)),
        }
    }

    fn mul(&self, a: i64, b: i64) -> Option<i64> {
        match self.modulus {
            None => a.checked_mul(b),
            Some(p) => Some(((a as i128 * b as i128).rem_euclid(p as i128)) as i64),
        }
    }
}

#[inline]
fn nib(code: u64, q: usize) -> usize {
    ((code >> (4 * q)) & 15) as usize
}

fn pack(m: &FinSetMap) -> Option<u64> {
    if m.source() > MAX_POINTS || m.target() > MAX_POINTS {
        return None;
    }
    Some(m.image().iter().enumerate().fold(0u64, |c, (q, &t)| c | ((t as u64 - 1) << (4 * q))))
}

fn unpack(code: u64, source: usize, target: usize) -> FinSetMap {
    let img: Vec<usize> = (0..source).map(|q| nib(code, q) + 1).collect();
    FinSetMap::new(target, &img).expect("packed map in range")
}

pub(super) fn pack_morphism(m: &Morphism, ring: Ring) -> Option<Vec<(u64, i64)>> {
    m.terms().map(|(f, c)| Some((pack(f)?, ring.lift(c)?))).collect()
}

/// Sparse operation with components interned by `(j, h)`.
pub(super) struct Packed {
    pub(super) sig: Signature,
    ring: Ring,
    keys: Vec<Key>,
    index: FxHashMap<Key, u32>,
    terms: FxHashMap<(u32, u64), i64>,
}

impl Packed {
    pub(super) fn new(sig: Signature, ring: Ring) -> Packed {
        Packed { sig, ring, keys: Vec::new(), index: FxHashMap::default(), terms: FxHashMap::default() }
    }

    fn key_id(&mut self, key: &Key) -> Option<u32> {
        if let Some(&k) = self.index.get(key) {
            return Some(k);
        }
        if self.sig.source_size(&key.0) > MAX_POINTS || self.sig.target_size(&key.1) > MAX_POINTS {
            return None;
        }
        let k = self.keys.len() as u32;
        self.keys.push(key.clone());
        self.index.insert(key.clone(), k);
        Some(k)
    }

    #[inline]
    fn push(&mut self, id: u32, code: u64, c: i64) -> Option<()> {
        let e = self.terms.entry((id, code)).or_insert(0);
        *e = self.ring.add(*e, c)?;
        Some(())
    }

    pub(super) fn from_op(x: &MultiOperation) -> Option<Packed> {
        let mut p = Packed::new(x.sig, Ring::of(x.field));
        for ((j, h), m) in &x.components {
            let id = p.key_id(&(j.clone(), h.clone()))?;
            for (code, c) in pack_morphism(m, p.ring)? {
                p.push(id, code, c)?;
            }
        }
        Some(p)
    }

    /// Adds `Σ a.then(b)` over the given packed terms to component `key`.
    pub(super) fn add_composites(
        &mut self,
        key: &Key,
        source: usize,
        first: &[(u64, i64)],
        second: &[(u64, i64)],
    ) -> Option<()> {
        let id = self.key_id(key)?;
        for &(a, ca) in first {
            for &(b, cb) in second {
                let mut code = 0u64;
                for q in 0..source {
                    code |= (nib(b, nib(a, q)) as u64) << (4 * q);
                }
                let c = self.ring.mul(ca, cb)?;
                self.push(id, code, c)?;
            }
        }
        Some(())
    }

    pub(super) fn into_op(self, degree: i64, truncation: usize, field: Field) -> MultiOperation {
        let mut by_key: Vec<Vec<(FinSetMap, Scalar)>> = vec![Vec::new(); self.keys.len()];
        for ((id, code), c) in self.terms {
            if c != 0 {
                let (j, h) = &self.keys[id as usize];
                let m = unpack(code, self.sig.source_size(j), self.sig.target_size(h));
                by_key[id as usize].push((m, field.from_i64(c)));
            }
        }
        let mut out = MultiOperation::zero(self.sig, degree, truncation, field);
        for (key, terms) in self.keys.into_iter().zip(by_key) {
            if !terms.is_empty() {
                let m = Morphism::from_terms(self.sig.source_size(&key.0), self.sig.target_size(&key.1), field, terms)
                    .expect("packed shapes");
                out.components.insert(key, m);
            }
        }
        out
    }

    pub(super) fn is_zero(&self) -> bool {
        self.terms.values().all(|&c| c == 0)
    }
}

/// Output key, sign, source size, transform, required-hit mask.
type PlanStep = (u32, i64, usize, Transform, u32);

enum Transform {
    /// Post-compose with a point map on the target.
    Post([u8; MAX_POINTS]),
    /// Pre-compose: new source point `q` reads old source point `table[q]`.
    Pre(Vec<u8>),
}

/// The nondegenerate-output mask: every non-first point of each output
/// Hochschild block must be hit.
fn required_mask(h: &[usize]) -> u32 {
    let mut mask = 0u32;
    let mut off = 0;
    for &ht in h {
        for q in 2..=ht + 1 {
            mask |= 1 << (off + q - 1);
        }
        off += ht + 1;
    }
    mask
}

/// `D(x)` in packed form, optionally keeping only nondegenerate outputs.
pub(super) fn differential(x: &Packed, degree: i64, truncation: usize, reduced: bool) -> Option<Packed> {
    let sig = x.sig;
    let ring = x.ring;
    let mut out = Packed::new(sig, ring);
    let mut plans: Vec<Vec<PlanStep>> = Vec::with_capacity(x.keys.len());
    for (j, h) in &x.keys {
        let mut plan = Vec::new();
        let source = sig.source_size(j);
        let mut offset = 0;
        let mut before = 0;
        for t in 0..sig.n2 {
            let ht = h[t];
            if ht >= 1 {
                let mut h2 = h.clone();
                h2[t] -= 1;
                let id = out.key_id(&(j.clone(), h2.clone()))?;
                let mask = if reduced { required_mask(&h2) } else { 0 };
                for i in 0..=ht {
                    let mut table = [0u8; MAX_POINTS];
                    for (p, slot) in table.iter_mut().enumerate().take(sig.target_size(h)) {
                        *slot = (block_face(offset, ht, i, p + 1) - 1) as u8;
                    }
                    plan.push((id, crate::scalar::sign((before + i + 1) as i64), source, Transform::Post(table), mask));
                }
            }
            before += ht;
            offset += ht + 1;
        }
        let mask = if reduced { required_mask(h) } else { 0 };
        let mut offset = 0;
        let mut before = 0;
        for t in 0..sig.n1 {
            let jt = j[t] + 1;
            if jt <= truncation {
                let mut j2 = j.clone();
                j2[t] = jt;
                let id = out.key_id(&(j2.clone(), h.clone()))?;
                let source2 = sig.source_size(&j2);
                for i in 0..=jt {
                    let table: Vec<u8> = (1..=source2).map(|p| (block_face(offset, jt, i, p) - 1) as u8).collect();
                    let s = -crate::scalar::sign(degree) * crate::scalar::sign((before + i + 1) as i64);
                    plan.push((id, s, source2, Transform::Pre(table), mask));
                }
            }
            before += j[t];
            offset += j[t] + 1;
        }
        plans.push(plan);
    }
    let neg = |c: i64| -> Option<i64> {
        match ring.modulus {
            None => c.checked_neg(),
            Some(p) => Some((-c).rem_euclid(p as i64)),
        }
    };
    for (&(id, code), &c) in &x.terms {
        if c == 0 {
            continue;
        }
        let source = sig.source_size(&x.keys[id as usize].0);
        let minus = neg(c)?;
        for (nid, s, nsource, tr, mask) in &plans[id as usize] {
            let mut new = 0u64;
            let mut hit = 0u32;
            match tr {
                Transform::Post(table) => {
                    for q in 0..source {
                        let v = table[nib(code, q)] as u64;
                        hit |= 1 << v;
                        new |= v << (4 * q);
                    }
                }
                Transform::Pre(table) => {
                    for (q, &old) in table.iter().enumerate().take(*nsource) {
                        let v = nib(code, old as usize) as u64;
                        hit |= 1 << v;
                        new |= v << (4 * q);
                    }
                }
            }
            if hit & mask != *mask {
                continue;
            }
            out.push(*nid, new, if *s > 0 { c } else { minus })?;
        }
    }
    Some(out)
}
