//! Operations with several Hochschild and algebra inputs and outputs, and
//! the generators `x_{f,s}` built from `sh^k`, `B^k`, projections,
//! inclusions, shuffle products and multiplications.
//!
//! A component of a [`MultiOperation`] is indexed by an input multidegree
//! `j` (Hochschild blocks of sizes `j_i + 1`, followed by `m1` algebra
//! slots) and an output multidegree `h`; it is a morphism
//! `Com(Σ(j_i+1) + m1, Σ(h_t+1) + m2)`. The differential is
//! `d_out ∘ x - (-1)^l x ∘ d_in`, where on each side
//! `d = Σ_t (-1)^{Σ_{s<t} h_s} Σ_i (-1)^{i+1} face_i(block t)`.

mod packed;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{evaluate_word, shuffle_morphism, GradedCommutativeAlgebra, Word};
use crate::error::{Error, Result};
use crate::finset::{face_point, FinSetMap, Morphism};
use crate::homology::linalg::rank;
use crate::homology::SparseMatrix;
use crate::loday::{bk_family, sh_family, OperationFamily};
use crate::scalar::{sign, Field, Scalar};
use packed::{pack_morphism, Packed, Ring};

pub type Multidegree = Vec<usize>;

/// `(n1, m1, n2, m2)`: Hochschild and algebra inputs, then outputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 4]", into = "[usize; 4]")]
pub struct Signature {
    pub n1: usize,
    pub m1: usize,
    pub n2: usize,
    pub m2: usize,
}

impl From<[usize; 4]> for Signature {
    fn from(a: [usize; 4]) -> Signature {
        Signature { n1: a[0], m1: a[1], n2: a[2], m2: a[3] }
    }
}

impl From<Signature> for [usize; 4] {
    fn from(s: Signature) -> [usize; 4] {
        [s.n1, s.m1, s.n2, s.m2]
    }
}

impl Signature {
    pub fn new(n1: usize, m1: usize, n2: usize, m2: usize) -> Signature {
        Signature { n1, m1, n2, m2 }
    }

    pub fn source_size(&self, j: &[usize]) -> usize {
        j.iter().map(|x| x + 1).sum::<usize>() + self.m1
    }

    pub fn target_size(&self, h: &[usize]) -> usize {
        h.iter().map(|x| x + 1).sum::<usize>() + self.m2
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiOperation {
    sig: Signature,
    degree: i64,
    truncation: usize,
    field: Field,
    components: BTreeMap<(Multidegree, Multidegree), Morphism>,
}

/// All multidegrees of length `n` with entries `<= max`, lexicographic.
pub fn multidegrees(n: usize, max: usize) -> Vec<Multidegree> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (0..=max).map(move |a| [v.clone(), vec![a]].concat())).collect();
    }
    out
}

/// Every signature below `top` entrywise.
pub fn signatures_up_to(top: Signature) -> Vec<Signature> {
    let mut out = Vec::new();
    for n1 in 0..=top.n1 {
        for m1 in 0..=top.m1 {
            for n2 in 0..=top.n2 {
                for m2 in 0..=top.m2 {
                    out.push(Signature::new(n1, m1, n2, m2));
                }
            }
        }
    }
    out
}

#[derive(Serialize)]
struct ComponentRepr<'a> {
    j: &'a Multidegree,
    h: &'a Multidegree,
    morphism: &'a Morphism,
}

#[derive(Serialize)]
struct OperationRepr<'a> {
    sig: Signature,
    degree: i64,
    truncation: usize,
    field: Field,
    components: Vec<ComponentRepr<'a>>,
}

impl Serialize for MultiOperation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperationRepr {
            sig: self.sig,
            degree: self.degree,
            truncation: self.truncation,
            field: self.field,
            components: self.components.iter().map(|((j, h), morphism)| ComponentRepr { j, h, morphism }).collect(),
        }
        .serialize(s)
    }
}

fn ksign(odd: bool) -> i64 {
    if odd {
        -1
    } else {
        1
    }
}

/// The bijection moving Hochschild blocks and algebra slots into a new
/// order (`hperm[new] = old`, `aperm[new] = old`), as a map from the old
/// layout to the new one, with the Koszul sign of the block move.
fn block_permutation(sizes: &[usize], hperm: &[usize], m: usize, aperm: &[usize]) -> (FinSetMap, i64) {
    let total = sizes.iter().map(|s| s + 1).sum::<usize>();
    let mut old_start = vec![0usize; sizes.len()];
    for b in 1..sizes.len() {
        old_start[b] = old_start[b - 1] + sizes[b - 1] + 1;
    }
    let mut image = vec![0u8; total + m];
    let mut pos = 0;
    for &b in hperm {
        for q in 0..=sizes[b] {
            image[old_start[b] + q] = (pos + 1) as u8;
            pos += 1;
        }
    }
    for (new, &old) in aperm.iter().enumerate() {
        image[total + old] = (total + new + 1) as u8;
    }
    let mut odd = false;
    for a in 0..hperm.len() {
        for b in a + 1..hperm.len() {
            if hperm[a] > hperm[b] && sizes[hperm[a]] % 2 == 1 && sizes[hperm[b]] % 2 == 1 {
                odd = !odd;
            }
        }
    }
    let image: Vec<usize> = image.into_iter().map(usize::from).collect();
    (FinSetMap::new(total + m, &image).expect("bijection"), ksign(odd))
}

impl MultiOperation {
    pub fn zero(sig: Signature, degree: i64, truncation: usize, field: Field) -> MultiOperation {
        MultiOperation { sig, degree, truncation, field, components: BTreeMap::new() }
    }

    /// Adds `m` to the component `(j, h)` after checking sizes and degree.
    pub fn insert(&mut self, j: Multidegree, h: Multidegree, m: Morphism) -> Result<()> {
        let sig = self.sig;
        if j.len() != sig.n1 || h.len() != sig.n2 {
            return Err(Error::SizeMismatch(format!(
                "multidegrees {j:?} -> {h:?} for signature {:?}",
                <[usize; 4]>::from(sig)
            )));
        }
        if j.iter().any(|&x| x > self.truncation) {
            return Err(Error::TruncationExceeded(format!("input {j:?} above {}", self.truncation)));
        }
        if h.iter().sum::<usize>() as i64 - j.iter().sum::<usize>() as i64 != self.degree {
            return Err(Error::InvalidArgument(format!("{j:?} -> {h:?} is not of degree {}", self.degree)));
        }
        if m.source() != sig.source_size(&j) || m.target() != sig.target_size(&h) || m.field() != self.field {
            return Err(Error::SizeMismatch(format!(
                "component {j:?} -> {h:?} has shape Com({},{})",
                m.source(),
                m.target()
            )));
        }
        if m.is_zero() {
            return Ok(());
        }
        let key = (j, h);
        let merged = match self.components.remove(&key) {
            Some(prev) => prev.add(&m)?,
            None => m,
        };
        if !merged.is_zero() {
            self.components.insert(key, merged);
        }
        Ok(())
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Multidegree, &Multidegree, &Morphism)> {
        self.components.iter().map(|((j, h), m)| (j, h, m))
    }

    pub fn component(&self, j: &[usize], h: &[usize]) -> Option<&Morphism> {
        self.components.get(&(j.to_vec(), h.to_vec()))
    }

    /// All components with input multidegree `j`.
    pub fn components_at<'a>(&'a self, j: &'a [usize]) -> impl Iterator<Item = (&'a Multidegree, &'a Morphism)> + 'a {
        self.components.range((j.to_vec(), vec![])..).take_while(move |((jj, _), _)| jj == j).map(|((_, h), m)| (h, m))
    }

    /// Total number of map terms over all components.
    pub fn term_count(&self) -> usize {
        self.components.values().map(Morphism::len).sum()
    }

    /// A single-input, single-output family as a signature `(1,0,1,0)`
    /// operation.
    pub fn from_family(x: &OperationFamily) -> MultiOperation {
        let mut out = MultiOperation::zero(Signature::new(1, 0, 1, 0), x.degree(), x.truncation(), x.field());
        for (n, m) in x.components() {
            let h = (n as i64 + x.degree()) as usize;
            out.insert(vec![n], vec![h], m.clone()).expect("family shapes");
        }
        out
    }

    /// The projection `p` onto word length 1, signature `(1,0,0,1)`.
    pub fn projection(truncation: usize, field: Field) -> MultiOperation {
        let mut out = MultiOperation::zero(Signature::new(1, 0, 0, 1), 0, truncation, field);
        out.insert(vec![0], vec![], Morphism::identity(1, field)).unwrap();
        out
    }

    /// `sh⁰` (`s = 0`, the inclusion of the algebra as word length 1) or
    /// `B⁰` (`s = 1`, the inclusion followed by Connes' boundary),
    /// signature `(0,1,1,0)`.
    pub fn inclusion(s: u8, field: Field) -> MultiOperation {
        let mut out = MultiOperation::zero(Signature::new(0, 1, 1, 0), s as i64, 0, field);
        let m = if s == 0 {
            Morphism::identity(1, field)
        } else {
            Morphism::from_map(FinSetMap::new(2, &[2]).unwrap(), field.one())
        };
        out.insert(vec![], vec![s as usize], m).unwrap();
        out
    }

    /// The identity on one algebra slot.
    pub fn algebra_identity(field: Field) -> MultiOperation {
        let mut out = MultiOperation::zero(Signature::new(0, 1, 0, 1), 0, 0, field);
        out.insert(vec![], vec![], Morphism::identity(1, field)).unwrap();
        out
    }

    /// `m^{1,..,r}` at every input multidegree up to `truncation`: the
    /// signed sum over `(j_1,..,j_r)`-shuffles. For `r = 0` this is the
    /// unit word.
    pub fn shuffle(r: usize, truncation: usize, field: Field) -> MultiOperation {
        let mut out = MultiOperation::zero(Signature::new(r, 0, 1, 0), 0, truncation, field);
        for j in multidegrees(r, truncation) {
            let total = j.iter().sum();
            out.insert(j.clone(), vec![total], multi_shuffle(&j, field)).unwrap();
        }
        out
    }

    /// `m̄^{1,..,r}`: the product of `r` algebra slots.
    pub fn multiplication(r: usize, field: Field) -> MultiOperation {
        let mut out = MultiOperation::zero(Signature::new(0, r, 0, 1), 0, 0, field);
        out.insert(vec![], vec![], Morphism::from_map(FinSetMap::new(1, &vec![1; r]).unwrap(), field.one())).unwrap();
        out
    }

    pub fn add(&self, other: &MultiOperation) -> Result<MultiOperation> {
        if self.sig != other.sig || self.degree != other.degree || self.field != other.field {
            return Err(Error::InvalidArgument("operations of different shape".into()));
        }
        let mut out = self.clone();
        out.truncation = self.truncation.min(other.truncation);
        out.components.retain(|(j, _), _| j.iter().all(|&x| x <= out.truncation));
        for ((j, h), m) in &other.components {
            if j.iter().all(|&x| x <= out.truncation) {
                out.insert(j.clone(), h.clone(), m.clone())?;
            }
        }
        Ok(out)
    }

    pub fn scale_i64(&self, c: i64) -> MultiOperation {
        let mut out = MultiOperation::zero(self.sig, self.degree, self.truncation, self.field);
        if c != 0 {
            out.components = self.components.iter().map(|(k, m)| (k.clone(), m.scale_i64(c))).collect();
        }
        out
    }

    /// `self ⊗ other`, with inputs and outputs ordered Hochschild blocks
    /// first (`self`'s, then `other`'s), then algebra slots. Koszul sign
    /// `(-1)^{|other|·|j_self|}`.
    pub fn tensor(&self, other: &MultiOperation) -> Result<MultiOperation> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.to_string(), other.field.to_string()));
        }
        let (a, b) = (self.sig, other.sig);
        let sig = Signature::new(a.n1 + b.n1, a.m1 + b.m1, a.n2 + b.n2, a.m2 + b.m2);
        let truncation = match (a.n1, b.n1) {
            (0, _) => other.truncation,
            (_, 0) => self.truncation,
            _ => self.truncation.min(other.truncation),
        };
        let mut out = MultiOperation::zero(sig, self.degree + other.degree, truncation, self.field);
        for ((ja, ha), ma) in &self.components {
            if ja.iter().any(|&x| x > truncation) {
                continue;
            }
            for ((jb, hb), mb) in &other.components {
                if jb.iter().any(|&x| x > truncation) {
                    continue;
                }
                let (sa, sb) = (a.source_size(ja) - a.m1, b.source_size(jb) - b.m1);
                let (ta, tb) = (a.target_size(ha) - a.m2, b.target_size(hb) - b.m2);
                // new input layout [aH bH aA bA] -> disjoint-union layout [aH aA bH bA]
                let mut pre = Vec::with_capacity(sa + sb + a.m1 + b.m1);
                pre.extend(1..=sa);
                pre.extend((1..=sb).map(|q| sa + a.m1 + q));
                pre.extend((1..=a.m1).map(|q| sa + q));
                pre.extend((1..=b.m1).map(|q| sa + a.m1 + sb + q));
                let pre = FinSetMap::new(pre.len(), &pre)?;
                // disjoint-union output layout [aH aA bH bA] -> [aH bH aA bA]
                let mut post = Vec::with_capacity(ta + tb + a.m2 + b.m2);
                post.extend(1..=ta);
                post.extend((1..=a.m2).map(|q| ta + tb + q));
                post.extend((1..=tb).map(|q| ta + q));
                post.extend((1..=b.m2).map(|q| ta + tb + a.m2 + q));
                let post = FinSetMap::new(post.len(), &post)?;
                let s = ksign(other.degree.rem_euclid(2) == 1 && ja.iter().sum::<usize>() % 2 == 1);
                let mut m = Morphism::zero(pre.source(), post.target(), self.field);
                for (x, cx) in ma.terms() {
                    for (y, cy) in mb.terms() {
                        m.add_term(pre.then(&x.tensor(y)).then(&post), (cx * cy).scale_i64(s));
                    }
                }
                out.insert([ja.clone(), jb.clone()].concat(), [ha.clone(), hb.clone()].concat(), m)?;
            }
        }
        Ok(out)
    }

    /// `next ∘ self`; `next` must cover every output multidegree of `self`.
    pub fn then(&self, next: &MultiOperation) -> Result<MultiOperation> {
        let (a, b) = (self.sig, next.sig);
        if a.n2 != b.n1 || a.m2 != b.m1 {
            return Err(Error::SizeMismatch("signatures do not compose".into()));
        }
        self.then_with(Signature::new(a.n1, a.m1, b.n2, b.m2), self.degree + next.degree, |g| {
            if g.iter().any(|&x| x > next.truncation) && b.n1 > 0 {
                return Err(Error::TruncationExceeded(format!(
                    "intermediate multidegree {g:?} above {}",
                    next.truncation
                )));
            }
            Ok(next.components_at(g).map(|(h, m)| (h.clone(), m.clone())).collect())
        })
    }

    fn then_with(
        &self,
        sig: Signature,
        degree: i64,
        mut next: impl FnMut(&[usize]) -> Result<Vec<(Multidegree, Morphism)>>,
    ) -> Result<MultiOperation> {
        let mut out = MultiOperation::zero(sig, degree, self.truncation, self.field);
        for ((j, g), m1) in &self.components {
            for (h, m2) in next(g)? {
                out.insert(j.clone(), h, m1.compose(&m2)?)?;
            }
        }
        Ok(out)
    }

    /// The differential, truncated to input multidegrees `<= K`.
    pub fn differential(&self) -> MultiOperation {
        match Packed::from_op(self).and_then(|p| packed::differential(&p, self.degree, self.truncation, false)) {
            Some(d) => d.into_op(self.degree - 1, self.truncation, self.field),
            None => self.differential_reference(),
        }
    }

    /// The differential computed directly on `Morphism`s, without the
    /// packed fast path.
    pub fn differential_reference(&self) -> MultiOperation {
        let sig = self.sig;
        let k = self.truncation;
        let field = self.field;
        let mut acc: HashMap<(Multidegree, Multidegree), Morphism> = HashMap::new();
        let slot = |j: &Multidegree, h: &Multidegree| -> Morphism {
            Morphism::zero(sig.source_size(j), sig.target_size(h), field)
        };
        let push = |acc: &mut HashMap<(Multidegree, Multidegree), Morphism>,
                    j: Multidegree,
                    h: Multidegree,
                    map: FinSetMap,
                    c: Scalar| {
            let e = acc.entry((j.clone(), h.clone())).or_insert_with(|| slot(&j, &h));
            e.add_term(map, c);
        };
        for ((j, h), m) in &self.components {
            // output faces
            let mut offset = 0usize;
            let mut before = 0usize;
            for t in 0..sig.n2 {
                let ht = h[t];
                if ht >= 1 {
                    let mut h2 = h.clone();
                    h2[t] -= 1;
                    let e = acc.entry((j.clone(), h2.clone())).or_insert_with(|| slot(j, &h2));
                    for i in 0..=ht {
                        m.accumulate_mapped(e, sign((before + i + 1) as i64), |p| {
                            block_face(offset, ht, i, p as usize) as u8
                        });
                    }
                }
                before += ht;
                offset += ht + 1;
            }
            // input cofaces, landing at j + e_t
            let mut offset = 0usize;
            let mut before = 0usize;
            for t in 0..sig.n1 {
                let jt = j[t] + 1;
                if jt <= k {
                    let mut j2 = j.clone();
                    j2[t] = jt;
                    let source = sig.source_size(&j2);
                    for i in 0..=jt {
                        let s = -sign(self.degree) * sign((before + i + 1) as i64);
                        let face: Vec<u8> = (1..=source).map(|p| block_face(offset, jt, i, p) as u8).collect();
                        for (map, c) in m.terms() {
                            let img: Vec<usize> = face.iter().map(|&q| map.apply(q as usize)).collect();
                            let pre = FinSetMap::new(map.target(), &img).expect("valid composite");
                            push(&mut acc, j2.clone(), h.clone(), pre, c.scale_i64(s));
                        }
                    }
                }
                before += j[t];
                offset += j[t] + 1;
            }
        }
        let mut out = MultiOperation::zero(sig, self.degree - 1, k, field);
        for ((j, h), m) in acc {
            if !m.is_zero() {
                out.components.insert((j, h), m);
            }
        }
        out
    }

    /// Projection to the normalized quotient on the output side: drop maps
    /// that miss a non-first point of some output Hochschild block.
    pub fn reduce_outputs(&self) -> MultiOperation {
        let mut out = MultiOperation::zero(self.sig, self.degree, self.truncation, self.field);
        for ((j, h), m) in &self.components {
            let mut starts = Vec::with_capacity(h.len());
            let mut off = 0;
            for &ht in h {
                starts.push((off, ht));
                off += ht + 1;
            }
            let terms: Vec<(FinSetMap, Scalar)> = m
                .terms()
                .filter(|(map, _)| {
                    let mut hit = vec![false; map.target() + 1];
                    for &q in map.image() {
                        hit[q as usize] = true;
                    }
                    starts.iter().all(|&(o, ht)| (2..=ht + 1).all(|q| hit[o + q]))
                })
                .map(|(map, c)| (map.clone(), c.clone()))
                .collect();
            if !terms.is_empty() {
                let r = Morphism::from_terms(m.source(), m.target(), m.field(), terms).expect("same shape");
                out.components.insert((j.clone(), h.clone()), r);
            }
        }
        out
    }

    /// Whether the differential vanishes in the normalized, truncated
    /// complex.
    pub fn is_cycle(&self) -> bool {
        match Packed::from_op(self).and_then(|p| packed::differential(&p, self.degree, self.truncation, true)) {
            Some(d) => d.is_zero(),
            None => self.differential_reference().reduce_outputs().is_zero(),
        }
    }

    /// Applies the operation to `C(A)^{⊗n1} ⊗ A^{⊗m1}`.
    pub fn evaluate(&self, c: &MultiChain) -> Result<MultiChain> {
        if c.algebra.field() != self.field {
            return Err(Error::FieldMismatch(self.field.to_string(), c.algebra.field().to_string()));
        }
        let mut out = MultiChain::zero(c.algebra.clone());
        for (w, coeff) in &c.terms {
            if w.blocks.len() != self.sig.n1 || w.letters.len() != self.sig.m1 {
                return Err(Error::SizeMismatch("input tensor does not match the signature".into()));
            }
            let j: Multidegree = w.blocks.iter().map(|b| b.len() - 1).collect();
            if j.iter().any(|&x| x > self.truncation) {
                return Err(Error::TruncationExceeded(format!("input multidegree {j:?} above {}", self.truncation)));
            }
            let flat: Word = w.blocks.iter().flatten().chain(&w.letters).copied().collect();
            for (h, m) in self.components_at(&j) {
                let r = evaluate_word(&c.algebra, m, &flat)?;
                for (word, s) in r.terms() {
                    let mut blocks = Vec::with_capacity(h.len());
                    let mut off = 0;
                    for &ht in h {
                        blocks.push(word[off..off + ht + 1].to_vec());
                        off += ht + 1;
                    }
                    out.add_term(MultiWord { blocks, letters: word[off..].to_vec() }, s * coeff);
                }
            }
        }
        Ok(out)
    }
}

/// Face `i` of the Hochschild block occupying points `offset+1 ..=
/// offset+len+1`, on a 1-based point `p` of the whole layout.
fn block_face(offset: usize, len: usize, i: usize, p: usize) -> usize {
    let end = offset + len + 1;
    if p > offset && p <= end {
        offset + face_point(len, i, (p - offset) as u8) as usize
    } else if p > end {
        p - 1
    } else {
        p
    }
}

fn multi_shuffle(js: &[usize], field: Field) -> Morphism {
    if js.is_empty() {
        return Morphism::from_map(FinSetMap::new(1, &[]).unwrap(), field.one());
    }
    shuffle_morphism(js, field)
}

/// The rank of the span of the given operations (all of one signature and
/// degree), computed over the common field.
pub fn span_rank(ops: &[MultiOperation]) -> usize {
    let Some(first) = ops.first() else { return 0 };
    let mut index: HashMap<(Multidegree, Multidegree, FinSetMap), u32> = HashMap::new();
    let mut cols = Vec::with_capacity(ops.len());
    for op in ops {
        let mut col = Vec::new();
        for ((j, h), m) in &op.components {
            for (map, c) in m.terms() {
                let n = index.len() as u32;
                let r = *index.entry((j.clone(), h.clone(), map.clone())).or_insert(n);
                col.push((r, c.clone()));
            }
        }
        col.sort_by_key(|(r, _)| *r);
        cols.push(col);
    }
    rank(&SparseMatrix::from_cols(index.len(), cols), first.field)
}

/// A tensor `w_1 ⊗ .. ⊗ w_{n} ⊗ a_1 ⊗ .. ⊗ a_m` of Hochschild words and
/// algebra letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiWord {
    pub blocks: Vec<Word>,
    pub letters: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiChain {
    algebra: Arc<GradedCommutativeAlgebra>,
    terms: BTreeMap<MultiWord, Scalar>,
}

impl MultiChain {
    pub fn zero(algebra: Arc<GradedCommutativeAlgebra>) -> MultiChain {
        MultiChain { algebra, terms: BTreeMap::new() }
    }

    /// A single tensor from labels, coefficient 1.
    pub fn from_labels(
        algebra: Arc<GradedCommutativeAlgebra>,
        blocks: &[&[&str]],
        letters: &[&str],
    ) -> Result<MultiChain> {
        let idx = |l: &&str| algebra.index_of(l);
        let blocks = blocks
            .iter()
            .map(|b| {
                if b.is_empty() {
                    Err(Error::InvalidArgument("empty Hochschild word".into()))
                } else {
                    b.iter().map(idx).collect()
                }
            })
            .collect::<Result<Vec<Word>>>()?;
        let letters = letters.iter().map(idx).collect::<Result<Vec<usize>>>()?;
        let one = algebra.field().one();
        let mut c = MultiChain::zero(algebra);
        c.add_term(MultiWord { blocks, letters }, one);
        Ok(c)
    }

    pub fn algebra(&self) -> &Arc<GradedCommutativeAlgebra> {
        &self.algebra
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiWord, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &MultiWord) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(|| self.algebra.field().zero())
    }

    pub fn add_term(&mut self, w: MultiWord, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(x) => {
                *x += &c;
                if x.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    /// Renders one tensor with labels, e.g. `(1)⊗(r0⊗h)⊗q0*g`.
    pub fn render(&self, w: &MultiWord) -> String {
        let a = &self.algebra;
        let mut parts: Vec<String> = w
            .blocks
            .iter()
            .map(|b| format!("({})", b.iter().map(|&l| a.label(l)).collect::<Vec<_>>().join("⊗")))
            .collect();
        parts.extend(w.letters.iter().map(|&l| a.label(l).to_string()));
        parts.join("⊗")
    }
}

/// The data `(f, s, k)` of a generator `x_{f,s}` in `A_{k_1..k_{n1}}`.
/// `f` and the keys of `s` are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OperationSpec {
    pub sig: Signature,
    pub f: Vec<usize>,
    pub s: BTreeMap<usize, u8>,
    pub k: Vec<usize>,
}

impl OperationSpec {
    pub fn validate(&self) -> Result<()> {
        let sig = self.sig;
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.f.len() != sig.n1 + sig.m1 || self.k.len() != sig.n1 {
            return bad("f needs n1 + m1 entries and k needs n1".into());
        }
        for (i, &fi) in self.f.iter().enumerate() {
            if fi < 1 || fi > sig.n2 + sig.m2 {
                return bad(format!("f({}) = {fi} out of range", i + 1));
            }
            if i < sig.n1 && self.k[i] > 0 && fi > sig.n2 {
                return bad(format!("f({}) must be <= n2 since k_{} > 0", i + 1, i + 1));
            }
            match (fi <= sig.n2, self.s.get(&(i + 1))) {
                (true, Some(0 | 1)) | (false, None) => {}
                (true, _) => return bad(format!("s({}) must be 0 or 1", i + 1)),
                (false, Some(_)) => return bad(format!("s is not defined at {}", i + 1)),
            }
        }
        if self.s.keys().any(|&i| i < 1 || i > self.f.len()) {
            return bad("s has keys outside the domain of f".into());
        }
        Ok(())
    }

    /// Degree of `x_{f,s}`: the number of `B`-type factors.
    pub fn degree(&self) -> i64 {
        self.s.values().filter(|&&v| v == 1).count() as i64
    }
}

/// `z_1 ⊗ .. ⊗ z_{n1+m1}` with each `z_i` one of `sh^k`, `B^k`, `p`, `sh⁰`,
/// `B⁰` or the identity.
pub fn build_x1(spec: &OperationSpec, truncation: usize, field: Field) -> Result<MultiOperation> {
    spec.validate()?;
    let sig = spec.sig;
    let mut acc: Option<MultiOperation> = None;
    for (i, &fi) in spec.f.iter().enumerate() {
        let to_hochschild = fi <= sig.n2;
        let z = if i < sig.n1 {
            match (to_hochschild, spec.s.get(&(i + 1))) {
                (true, Some(0)) => MultiOperation::from_family(&sh_family(truncation, spec.k[i], field)),
                (true, _) => MultiOperation::from_family(&bk_family(truncation, spec.k[i], field)),
                (false, _) => MultiOperation::projection(truncation, field),
            }
        } else {
            match (to_hochschild, spec.s.get(&(i + 1))) {
                (true, Some(&s)) => MultiOperation::inclusion(s, field),
                _ => MultiOperation::algebra_identity(field),
            }
        };
        acc = Some(match acc {
            None => z,
            Some(a) => a.tensor(&z)?,
        });
    }
    let mut x = acc.unwrap_or_else(|| {
        let mut u = MultiOperation::zero(Signature::new(0, 0, 0, 0), 0, truncation, field);
        u.insert(vec![], vec![], Morphism::identity(0, field)).unwrap();
        u
    });
    x.truncation = truncation;
    Ok(x)
}

/// The component of `x_2` at an intermediate multidegree `g` (ordered as
/// the Hochschild outputs of `x_1`): regroup blocks by their value under
/// `f`, then shuffle within each Hochschild output and multiply within
/// each algebra output.
fn x2_component(spec: &OperationSpec, g: &[usize], field: Field) -> Result<(Multidegree, Morphism)> {
    let sig = spec.sig;
    let hin: Vec<usize> = (0..spec.f.len()).filter(|&i| spec.f[i] <= sig.n2).collect();
    let ain: Vec<usize> = (0..spec.f.len()).filter(|&i| spec.f[i] > sig.n2).collect();
    if g.len() != hin.len() {
        return Err(Error::SizeMismatch(format!("x2 expects {} Hochschild inputs", hin.len())));
    }
    let mut hperm: Vec<usize> = (0..hin.len()).collect();
    hperm.sort_by_key(|&b| spec.f[hin[b]]);
    let mut aperm: Vec<usize> = (0..ain.len()).collect();
    aperm.sort_by_key(|&b| spec.f[ain[b]]);
    let (perm, psign) = block_permutation(g, &hperm, ain.len(), &aperm);
    let mut merged = Morphism::identity(0, field);
    let mut h = Vec::with_capacity(sig.n2);
    for t in 1..=sig.n2 {
        let js: Vec<usize> = hperm.iter().filter(|&&b| spec.f[hin[b]] == t).map(|&b| g[b]).collect();
        h.push(js.iter().sum());
        merged = merged.tensor(&multi_shuffle(&js, field))?;
    }
    for u in sig.n2 + 1..=sig.n2 + sig.m2 {
        let r = ain.iter().filter(|&&i| spec.f[i] == u).count();
        merged = merged.tensor(&Morphism::from_map(FinSetMap::new(1, &vec![1; r]).unwrap(), field.one()))?;
    }
    let pre = Morphism::from_map(perm, field.from_i64(psign));
    Ok((h, pre.compose(&merged)?))
}

/// `x_2` restricted to the given intermediate multidegrees.
pub fn build_x2(spec: &OperationSpec, multidegrees: &[Multidegree], field: Field) -> Result<MultiOperation> {
    spec.validate()?;
    let sig = spec.sig;
    let c = spec.f.iter().filter(|&&fi| fi <= sig.n2).count();
    let k = multidegrees.iter().flatten().copied().max().unwrap_or(0);
    let mut out = MultiOperation::zero(Signature::new(c, sig.n1 + sig.m1 - c, sig.n2, sig.m2), 0, k, field);
    for g in multidegrees {
        let (h, m) = x2_component(spec, g, field)?;
        out.insert(g.clone(), h, m)?;
    }
    Ok(out)
}

/// `x_{f,s} = x_2 ∘ x_1`, truncated at input multidegree `K`.
pub fn build_x_fs(spec: &OperationSpec, truncation: usize, field: Field) -> Result<MultiOperation> {
    if let Some(p) = packed_x_fs(spec, truncation, field)? {
        return Ok(p.into_op(spec.degree(), truncation, field));
    }
    let x1 = build_x1(spec, truncation, field)?;
    let mut cache: HashMap<Multidegree, (Multidegree, Morphism)> = HashMap::new();
    x1.then_with(spec.sig, spec.degree(), |g| {
        if let Some(v) = cache.get(g) {
            return Ok(vec![v.clone()]);
        }
        let v = x2_component(spec, g, field)?;
        cache.insert(g.to_vec(), v.clone());
        Ok(vec![v])
    })
}

/// Whether `x_{f,s}` (truncated at `K`) is a cycle in the normalized
/// complex, computed on the composite itself.
pub fn x_fs_is_cycle_direct(spec: &OperationSpec, truncation: usize, field: Field) -> Result<bool> {
    if let Some(p) = packed_x_fs(spec, truncation, field)? {
        if let Some(d) = packed::differential(&p, spec.degree(), truncation, true) {
            return Ok(d.is_zero());
        }
    }
    Ok(build_x_fs(spec, truncation, field)?.is_cycle())
}

/// Cycle test for many `x_{f,s}` at one truncation. Since `x_2` has degree
/// 0, `D(x_2∘x_1) = D(x_2)∘x_1 + x_2∘D(x_1)`, and both factors carry
/// degenerate outputs to degenerate outputs; so it suffices that `D(x_1)`
/// vanishes and `D(x_2)` vanishes at every intermediate multidegree `x_1`
/// reaches. The `x_2` checks are cached; when a factor is not a cycle the
/// composite is checked directly.
pub struct CycleChecker {
    truncation: usize,
    field: Field,
    x2_cache: HashMap<(Signature, Vec<usize>, Multidegree), bool>,
}

impl CycleChecker {
    pub fn new(truncation: usize, field: Field) -> CycleChecker {
        CycleChecker { truncation, field, x2_cache: HashMap::new() }
    }

    pub fn check(&mut self, spec: &OperationSpec) -> Result<bool> {
        let x1 = build_x1(spec, self.truncation, self.field)?;
        let mut ok = x1.is_cycle();
        if ok {
            let gs: std::collections::BTreeSet<&Multidegree> = x1.components().map(|(_, g, _)| g).collect();
            for g in gs {
                let key = (spec.sig, spec.f.clone(), g.clone());
                let good = match self.x2_cache.get(&key) {
                    Some(&v) => v,
                    None => {
                        let v = x2_is_cycle_at(spec, g, self.field)?;
                        self.x2_cache.insert(key, v);
                        v
                    }
                };
                if !good {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(true);
        }
        x_fs_is_cycle_direct(spec, self.truncation, self.field)
    }
}

/// Whether `x_{f,s}` (truncated at `K`) is a cycle in the normalized
/// complex.
pub fn x_fs_is_cycle(spec: &OperationSpec, truncation: usize, field: Field) -> Result<bool> {
    CycleChecker::new(truncation, field).check(spec)
}

/// `D(x_2)` at input multidegree `g` vanishes in the normalized complex.
fn x2_is_cycle_at(spec: &OperationSpec, g: &[usize], field: Field) -> Result<bool> {
    let mut degrees = vec![g.to_vec()];
    for t in 0..g.len() {
        if g[t] >= 1 {
            let mut lower = g.to_vec();
            lower[t] -= 1;
            degrees.push(lower);
        }
    }
    let x2 = build_x2(spec, &degrees, field)?;
    let d = match Packed::from_op(&x2).and_then(|p| packed::differential(&p, 0, x2.truncation, true)) {
        Some(d) => d.into_op(-1, x2.truncation, field),
        None => x2.differential_reference().reduce_outputs(),
    };
    let vanishes = d.components_at(g).next().is_none();
    Ok(vanishes)
}

fn packed_x_fs(spec: &OperationSpec, truncation: usize, field: Field) -> Result<Option<Packed>> {
    let x1 = build_x1(spec, truncation, field)?;
    let ring = Ring::of(field);
    let mut cache: HashMap<Multidegree, (Multidegree, Vec<(u64, i64)>)> = HashMap::new();
    let mut out = Packed::new(spec.sig, ring);
    for ((j, g), m1) in &x1.components {
        let Some(first) = pack_morphism(m1, ring) else { return Ok(None) };
        if !cache.contains_key(g) {
            let (h, m2) = x2_component(spec, g, field)?;
            let Some(second) = pack_morphism(&m2, ring) else { return Ok(None) };
            cache.insert(g.clone(), (h, second));
        }
        let (h, second) = &cache[g];
        if out.add_composites(&(j.clone(), h.clone()), spec.sig.source_size(j), &first, second).is_none() {
            return Ok(None);
        }
    }
    Ok(Some(out))
}

/// Every admissible `(f, s)` for the given signature and `k`, in
/// lexicographic order of `f` then `s`.
pub fn enumerate_a_basis(sig: Signature, k: &[usize]) -> Result<Vec<OperationSpec>> {
    if k.len() != sig.n1 {
        return Err(Error::SizeMismatch("k needs n1 entries".into()));
    }
    let n = sig.n1 + sig.m1;
    let outs = sig.n2 + sig.m2;
    let mut out = Vec::new();
    if outs == 0 && n > 0 {
        return Ok(out);
    }
    let mut f = vec![1usize; n];
    loop {
        let ok = (0..sig.n1).all(|i| k[i] == 0 || f[i] <= sig.n2);
        if ok {
            let dom: Vec<usize> = (0..n).filter(|&i| f[i] <= sig.n2).collect();
            for bits in 0..1u32 << dom.len() {
                let s =
                    dom.iter().enumerate().map(|(b, &i)| (i + 1, ((bits >> (dom.len() - 1 - b)) & 1) as u8)).collect();
                out.push(OperationSpec { sig, f: f.clone(), s, k: k.to_vec() });
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if f[i] < outs {
                f[i] += 1;
                break;
            }
            f[i] = 1;
        }
    }
}
