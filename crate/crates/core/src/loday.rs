//! Permutation combinatorics and the operation families `l`, `sh`, `λ`,
//! Connes' `B`, `R` and `B^k`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finset::{FinSetMap, Image, Morphism};
use crate::scalar::{binomial, binomial_i64, sign, Field, Scalar};

/// A bijection of `{1..n}` in one-line notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Permutation {
    one_line: Vec<u8>,
}

impl Permutation {
    pub fn new(one_line: &[usize]) -> Result<Permutation> {
        let n = one_line.len();
        let mut seen = vec![false; n + 1];
        for &v in one_line {
            if v == 0 || v > n || seen[v] {
                return Err(Error::InvalidArgument(format!("{one_line:?} is not a permutation")));
            }
            seen[v] = true;
        }
        Ok(Permutation { one_line: one_line.iter().map(|&v| v as u8).collect() })
    }

    pub fn identity(n: usize) -> Permutation {
        Permutation { one_line: (1..=n as u8).collect() }
    }

    pub fn n(&self) -> usize {
        self.one_line.len()
    }

    pub fn one_line(&self) -> &[u8] {
        &self.one_line
    }

    pub fn descent_count(&self) -> usize {
        descents(&self.one_line)
    }

    pub fn sign(&self) -> i64 {
        pattern_sign(&self.one_line)
    }

    /// The bijection of `{1..n+1}` fixing 1 and acting by `self` on
    /// `{2..n+1}`.
    pub fn embed(&self) -> FinSetMap {
        embed(&self.one_line)
    }

    /// All permutations of `{1..n}` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        Lexicographic::new(n).map(|one_line| Permutation { one_line })
    }
}

pub fn descent_count(sigma: &Permutation) -> usize {
    sigma.descent_count()
}

fn descents(s: &[u8]) -> usize {
    s.windows(2).filter(|w| w[0] > w[1]).count()
}

/// `(-1)^{inversions}` of a sequence of distinct values.
pub(crate) fn pattern_sign(s: &[u8]) -> i64 {
    let mut inv = 0usize;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if s[i] > s[j] {
                inv += 1;
            }
        }
    }
    sign(inv as i64)
}

fn embed(s: &[u8]) -> FinSetMap {
    let mut image: Image = Image::with_capacity(s.len() + 1);
    image.push(1);
    image.extend(s.iter().map(|&v| v + 1));
    FinSetMap::from_raw(s.len() + 1, image)
}

/// In-place lexicographic successor; `false` once the last permutation is
/// reached.
pub(crate) fn next_permutation(s: &mut [u8]) -> bool {
    let n = s.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && s[i - 1] >= s[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while s[j] <= s[i - 1] {
        j -= 1;
    }
    s.swap(i - 1, j);
    s[i..].reverse();
    true
}

struct Lexicographic {
    cur: Option<Vec<u8>>,
}

impl Lexicographic {
    fn new(n: usize) -> Lexicographic {
        Lexicographic { cur: Some((1..=n as u8).collect()) }
    }
}

impl Iterator for Lexicographic {
    type Item = Vec<u8>;
    fn next(&mut self) -> Option<Vec<u8>> {
        let cur = self.cur.take()?;
        let mut nxt = cur.clone();
        if next_permutation(&mut nxt) {
            self.cur = Some(nxt);
        }
        Some(cur)
    }
}

/// The Eulerian set: permutations of `{1..n}` with `k-1` descents, embedded
/// as bijections of `{1..n+1}` fixing 1, each with its sign.
pub fn eulerian_embedded(n: usize, k: usize) -> Vec<(FinSetMap, i64)> {
    if n < 1 || k < 1 || k > n {
        return Vec::new();
    }
    Lexicographic::new(n).filter(|s| descents(s) == k - 1).map(|s| (embed(&s), pattern_sign(&s))).collect()
}

/// Builds `Σ_σ sgn(σ) c(des(σ)+1) σ` over all of `Σ_n` embedded fixing 1,
/// where `coeff(i)` is the coefficient of `l_n^i`.
pub(crate) fn eulerian_combination(n: usize, field: Field, coeff: impl Fn(usize) -> Scalar) -> Morphism {
    let mut out = Morphism::zero(n + 1, n + 1, field);
    if n == 0 {
        out.add_term(FinSetMap::identity(1), coeff(0));
        return out;
    }
    let cs: Vec<Scalar> = (0..=n).map(|i| coeff(i + 1)).collect();
    let mut s: Vec<u8> = (1..=n as u8).collect();
    loop {
        let c = &cs[descents(&s)];
        if !c.is_zero() {
            let c = if pattern_sign(&s) < 0 { -c } else { c.clone() };
            out.add_term(embed(&s), c);
        }
        if !next_permutation(&mut s) {
            break;
        }
    }
    out
}

/// `l_n^k`: the signed Eulerian sum, with `l_0^0 = id_1` and zero outside
/// `1 <= k <= n`.
pub fn l_op(n: usize, k: usize, field: Field) -> Morphism {
    if n == 0 {
        return if k == 0 { Morphism::identity(1, field) } else { Morphism::zero(1, 1, field) };
    }
    Morphism::from_i64_terms(n + 1, n + 1, field, eulerian_embedded(n, k))
}

fn sh_coeff(n: usize, k: usize, i: usize) -> BigInt {
    if i == 0 {
        return BigInt::from(0);
    }
    binomial(n as i64 - i as i64, k as i64 - i as i64)
}

fn lambda_coeff(n: usize, k: usize, i: usize) -> BigInt {
    binomial((n + k) as i64 - i as i64, n as i64)
}

/// `sh_n^k = Σ_{i=1}^k binom(n-i, k-i) l_n^i`, with `sh_0^0 = id`.
pub fn sh_op(n: usize, k: usize, field: Field) -> Morphism {
    if n == 0 {
        return if k == 0 { Morphism::identity(1, field) } else { Morphism::zero(1, 1, field) };
    }
    eulerian_combination(n, field, |i| if i <= k { field.from_bigint(&sh_coeff(n, k, i)) } else { field.zero() })
}

/// `λ_n^k = Σ_{i=0}^k binom(n+k-i, n) l_n^i`.
pub fn lambda_op(n: usize, k: usize, field: Field) -> Morphism {
    if n == 0 {
        return Morphism::identity(1, field);
    }
    eulerian_combination(n, field, |i| if i <= k { field.from_bigint(&lambda_coeff(n, k, i)) } else { field.zero() })
}

fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 0 {
            if n == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for p in 1..=n.saturating_sub(k - 1) {
            prefix.push(p);
            rec(n - p, k - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::new(), &mut out);
    out
}

/// All permutations of `{1..n}` that increase on each consecutive block of
/// positions with the given sizes.
pub fn block_shuffles(blocks: &[usize]) -> Vec<Vec<u8>> {
    let n: usize = blocks.iter().sum();
    let mut out = Vec::new();
    // label[v] = block receiving value v
    fn rec(v: usize, n: usize, remaining: &mut [usize], label: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if v > n {
            out.push(label.clone());
            return;
        }
        for b in 0..remaining.len() {
            if remaining[b] > 0 {
                remaining[b] -= 1;
                label.push(b);
                rec(v + 1, n, remaining, label, out);
                label.pop();
                remaining[b] += 1;
            }
        }
    }
    let mut labels = Vec::new();
    rec(1, n, &mut blocks.to_vec(), &mut Vec::new(), &mut labels);
    let mut starts = vec![0usize; blocks.len()];
    for b in 1..blocks.len() {
        starts[b] = starts[b - 1] + blocks[b - 1];
    }
    for label in labels {
        let mut next = starts.clone();
        let mut s = vec![0u8; n];
        for (v, &b) in label.iter().enumerate() {
            s[next[b]] = (v + 1) as u8;
            next[b] += 1;
        }
        out.push(s);
    }
    out
}

/// `sh_n^k` as the signed sum over all `(p_1..p_k)`-shuffles with
/// `p_1 + .. + p_k = n`, every `p_j >= 1`. Falls back to [`sh_op`] for
/// `n = 0` or `k < 2`.
pub fn sh_op_via_shuffles(n: usize, k: usize, field: Field) -> Morphism {
    if n == 0 || k < 2 {
        return sh_op(n, k, field);
    }
    let mut terms = Vec::new();
    for comp in compositions(n, k) {
        for s in block_shuffles(&comp) {
            terms.push((embed(&s), pattern_sign(&s)));
        }
    }
    Morphism::from_i64_terms(n + 1, n + 1, field, terms)
}

/// Component `n` of Connes' `B`: the signed cyclic rotations of
/// `{1..n+1}` shifted away from the basepoint of `{1..n+2}`.
pub fn connes_b_component(n: usize, field: Field) -> Morphism {
    let m = n + 1;
    let terms = (0..m).map(|r| {
        let image: Image = (0..m).map(|t| (2 + (t + m - r) % m) as u8).collect();
        (FinSetMap::from_raw(n + 2, image), sign((r * n) as i64))
    });
    Morphism::from_i64_terms(n + 1, n + 2, field, terms)
}

/// `R_n^l`: every `g = shift ∘ rot_r ∘ σ` for `σ` in the embedded Eulerian
/// set `(n, l)` and `r = 0..n`, weighted by the sign of `g`'s image pattern.
/// At `n = 0` only `l = 1` contributes, giving `1 ↦ 2`.
pub fn r_op(n: usize, l: usize, field: Field) -> Morphism {
    let sigmas = if n == 0 {
        if l == 1 {
            vec![(FinSetMap::identity(1), 1)]
        } else {
            vec![]
        }
    } else {
        eulerian_embedded(n, l)
    };
    let m = n + 1;
    let mut terms = Vec::with_capacity(sigmas.len() * m);
    for (sigma, _) in &sigmas {
        for r in 0..m {
            let image: Image = sigma.image().iter().map(|&t| (2 + (t as usize - 1 + m - r) % m) as u8).collect();
            let s = pattern_sign(&image);
            terms.push((FinSetMap::from_raw(n + 2, image), s));
        }
    }
    Morphism::from_i64_terms(n + 1, n + 2, field, terms)
}

/// A truncated family `k ↦ Com(k+1, k+l+1)`, `0 <= k <= K`. Components
/// whose target would be empty are absent.
#[derive(Clone, PartialEq, Eq)]
pub struct OperationFamily {
    degree: i64,
    truncation: usize,
    field: Field,
    components: BTreeMap<usize, Morphism>,
}

#[derive(Clone, Debug)]
pub enum FamilyOp {
    Add,
    Sub,
    Scale(Scalar),
    Compose,
}

impl OperationFamily {
    pub fn zero(degree: i64, truncation: usize, field: Field) -> OperationFamily {
        let components = (0..=truncation)
            .filter_map(|k| {
                let t = k as i64 + degree + 1;
                (t >= 0).then(|| (k, Morphism::zero(k + 1, t as usize, field)))
            })
            .collect();
        OperationFamily { degree, truncation, field, components }
    }

    /// Builds a family from a component generator, validating sizes.
    pub fn from_fn(
        degree: i64,
        truncation: usize,
        field: Field,
        mut f: impl FnMut(usize) -> Morphism,
    ) -> Result<OperationFamily> {
        let mut fam = OperationFamily::zero(degree, truncation, field);
        for (k, slot) in fam.components.iter_mut() {
            let m = f(*k);
            if (m.source(), m.target()) != (slot.source(), slot.target()) || m.field() != field {
                return Err(Error::SizeMismatch(format!(
                    "component {k}: expected Com({},{}), got Com({},{})",
                    slot.source(),
                    slot.target(),
                    m.source(),
                    m.target()
                )));
            }
            *slot = m;
        }
        Ok(fam)
    }

    pub fn identity(truncation: usize, field: Field) -> OperationFamily {
        OperationFamily::from_fn(0, truncation, field, |k| Morphism::identity(k + 1, field)).unwrap()
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

    pub fn component(&self, k: usize) -> Option<&Morphism> {
        self.components.get(&k)
    }

    pub fn components(&self) -> impl Iterator<Item = (usize, &Morphism)> {
        self.components.iter().map(|(k, m)| (*k, m))
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(Morphism::is_zero)
    }

    /// Restriction to indices `<= k`.
    pub fn truncate(&self, k: usize) -> OperationFamily {
        let components = self.components.range(..=k).map(|(i, m)| (*i, m.clone())).collect();
        OperationFamily { truncation: k.min(self.truncation), components, ..*self }.fix_truncation()
    }

    fn fix_truncation(mut self) -> OperationFamily {
        self.truncation = self.truncation.min(self.components.keys().next_back().copied().unwrap_or(0));
        self
    }

    fn check_compatible(&self, other: &OperationFamily) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::SizeMismatch(format!("degrees {} and {}", self.degree, other.degree)));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.to_string(), other.field.to_string()));
        }
        Ok(())
    }

    fn zip(
        &self,
        other: &OperationFamily,
        f: impl Fn(&Morphism, &Morphism) -> Result<Morphism>,
    ) -> Result<OperationFamily> {
        self.check_compatible(other)?;
        let truncation = self.truncation.min(other.truncation);
        let mut out = OperationFamily::zero(self.degree, truncation, self.field);
        for (k, slot) in out.components.iter_mut() {
            *slot = f(&self.components[k], &other.components[k])?;
        }
        Ok(out)
    }

    pub fn add(&self, other: &OperationFamily) -> Result<OperationFamily> {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &OperationFamily) -> Result<OperationFamily> {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, c: &Scalar) -> OperationFamily {
        let components = self.components.iter().map(|(k, m)| (*k, m.scale(c))).collect();
        OperationFamily { components, ..*self }
    }

    pub fn scale_i64(&self, c: i64) -> OperationFamily {
        self.scale(&self.field.from_i64(c))
    }

    /// First `self`, then `next`: component `k` is `next_{k+l} ∘ self_k`.
    /// The result is truncated where `next` runs out.
    pub fn then(&self, next: &OperationFamily) -> Result<OperationFamily> {
        if self.field != next.field {
            return Err(Error::FieldMismatch(self.field.to_string(), next.field.to_string()));
        }
        let top = next.truncation as i64 - self.degree;
        if top < 0 {
            return Err(Error::TruncationExceeded("composition has no components".into()));
        }
        let truncation = self.truncation.min(top as usize);
        let mut out = OperationFamily::zero(self.degree + next.degree, truncation, self.field);
        for (k, slot) in out.components.iter_mut() {
            let mid = (*k as i64 + self.degree) as usize;
            if let (Some(a), Some(b)) = (self.components.get(k), next.components.get(&mid)) {
                *slot = a.compose(b)?;
            }
        }
        Ok(out)
    }

    pub fn to_field(&self, field: Field) -> Result<OperationFamily> {
        let mut components = BTreeMap::new();
        for (k, m) in &self.components {
            components.insert(*k, m.to_field(field)?);
        }
        Ok(OperationFamily { field, components, ..*self })
    }
}

/// Componentwise arithmetic. `Compose` applies `a` first, then `b`; `Scale`
/// ignores `b`.
pub fn family_arith(a: &OperationFamily, b: &OperationFamily, op: FamilyOp) -> Result<OperationFamily> {
    match op {
        FamilyOp::Add => a.add(b),
        FamilyOp::Sub => a.sub(b),
        FamilyOp::Scale(c) => Ok(a.scale(&c)),
        FamilyOp::Compose => a.then(b),
    }
}

impl fmt::Debug for OperationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "OperationFamily(degree {}, K {})", self.degree, self.truncation)?;
        for (k, m) in &self.components {
            writeln!(f, "  {k}: {m:?}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ComponentRepr {
    k: usize,
    morphism: Morphism,
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    degree: i64,
    truncation: usize,
    components: Vec<ComponentRepr>,
}

impl Serialize for OperationFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyRepr {
            degree: self.degree,
            truncation: self.truncation,
            components: self.components.iter().map(|(k, m)| ComponentRepr { k: *k, morphism: m.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperationFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<OperationFamily, D::Error> {
        use serde::de::Error as _;
        let r = FamilyRepr::deserialize(d)?;
        let field = r
            .components
            .iter()
            .flat_map(|c| c.morphism.terms().map(|(_, s)| s.field()).next())
            .next()
            .unwrap_or(Field::Rational);
        let mut given: BTreeMap<usize, Morphism> = BTreeMap::new();
        for c in r.components {
            given.insert(c.k, c.morphism.to_field(field).map_err(D::Error::custom)?);
        }
        OperationFamily::from_fn(r.degree, r.truncation, field, |k| {
            given.remove(&k).unwrap_or_else(|| Morphism::zero(k + 1, (k as i64 + r.degree + 1) as usize, field))
        })
        .map_err(D::Error::custom)
    }
}

pub fn sh_family(truncation: usize, k: usize, field: Field) -> OperationFamily {
    OperationFamily::from_fn(0, truncation, field, |n| sh_op(n, k, field)).unwrap()
}

pub fn lambda_family(truncation: usize, k: usize, field: Field) -> OperationFamily {
    OperationFamily::from_fn(0, truncation, field, |n| lambda_op(n, k, field)).unwrap()
}

/// `Σ_k c_k sh^k`, built in a single pass over each symmetric group.
pub fn sh_combination(truncation: usize, coeffs: &[Scalar], field: Field) -> OperationFamily {
    OperationFamily::from_fn(0, truncation, field, |n| {
        if n == 0 {
            let c = coeffs.first().cloned().unwrap_or_else(|| field.zero());
            return Morphism::from_map(FinSetMap::identity(1), c);
        }
        eulerian_combination(n, field, |i| {
            let mut acc = field.zero();
            for (k, c) in coeffs.iter().enumerate().skip(i.max(1)) {
                acc += &c.scale_i64(binomial_i64(n as i64 - i as i64, k as i64 - i as i64));
            }
            acc
        })
    })
    .unwrap()
}

pub fn b_family(truncation: usize, field: Field) -> OperationFamily {
    OperationFamily::from_fn(1, truncation, field, |n| connes_b_component(n, field)).unwrap()
}

/// `B^k = B ∘ sh^k`.
pub fn bk_family(truncation: usize, k: usize, field: Field) -> OperationFamily {
    OperationFamily::from_fn(1, truncation, field, |n| {
        sh_op(n, k, field).compose(&connes_b_component(n, field)).unwrap()
    })
    .unwrap()
}

/// `(B^k)_n = Σ_{l=1}^k binom(n-l, k-l) R_n^l`, with `(B^0)_0 = R_0^1`.
pub fn bk_via_r(truncation: usize, k: usize, field: Field) -> OperationFamily {
    OperationFamily::from_fn(1, truncation, field, |n| {
        if n == 0 && k == 0 {
            return r_op(0, 1, field);
        }
        let mut acc = Morphism::zero(n + 1, n + 2, field);
        for l in 1..=k {
            let c = binomial_i64(n as i64 - l as i64, (k - l) as i64);
            if c != 0 {
                acc = acc.add(&r_op(n, l, field).scale_i64(c)).unwrap();
            }
        }
        acc
    })
    .unwrap()
}

/// Eulerian number `A(n, m)`: permutations of `{1..n}` with `m` descents.
pub fn eulerian_number(n: usize, m: usize) -> BigInt {
    // A(n,m) = Σ_{j=0}^{m} (-1)^j binom(n+1, j) (m+1-j)^n
    let mut acc = BigInt::from(0);
    for j in 0..=m {
        let term = binomial(n as i64 + 1, j as i64) * BigInt::from(m + 1 - j).pow(n as u32);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rational;

    fn map(n: usize, im: &[usize]) -> FinSetMap {
        FinSetMap::new(n, im).unwrap()
    }

    #[test]
    fn descents_and_eulerian_sets() {
        assert_eq!(Permutation::identity(4).descent_count(), 0);
        assert_eq!(Permutation::new(&[2, 1, 3]).unwrap().descent_count(), 1);
        assert_eq!(Permutation::all(3).filter(|p| p.descent_count() == 1).count(), 4);
        assert_eq!(eulerian_embedded(1, 1), vec![(map(2, &[1, 2]), 1)]);
        assert_eq!(eulerian_embedded(2, 2), vec![(map(3, &[1, 3, 2]), -1)]);
        assert_eq!(eulerian_embedded(3, 2).len(), 4);
        assert!(eulerian_embedded(3, 4).is_empty());
        assert!(eulerian_embedded(0, 0).is_empty());
    }

    #[test]
    fn l_examples() {
        assert_eq!(l_op(0, 0, Q), Morphism::identity(1, Q));
        assert_eq!(l_op(2, 1, Q), Morphism::identity(3, Q));
        assert_eq!(l_op(2, 2, Q), Morphism::from_map(map(3, &[1, 3, 2]), Q.from_i64(-1)));
        assert!(l_op(2, 3, Q).is_zero());
        assert!(l_op(2, 0, Q).is_zero());
    }

    #[test]
    fn sh_and_lambda_examples() {
        for n in 1..5 {
            assert_eq!(sh_op(n, 1, Q), Morphism::identity(n + 1, Q));
            assert!(sh_op(n, 0, Q).is_zero());
        }
        assert_eq!(sh_op(0, 0, Q), Morphism::identity(1, Q));
        assert!(sh_op(0, 2, Q).is_zero());
        assert_eq!(lambda_op(1, 2, Q), Morphism::identity(2, Q).scale_i64(2));
        let sh22 = sh_op(2, 2, Q);
        assert_eq!(sh22.len(), 2);
        assert_eq!(sh22, l_op(2, 1, Q).add(&l_op(2, 2, Q)).unwrap());
        assert_eq!(sh_op_via_shuffles(2, 2, Q), sh22);
        assert_eq!(sh_op_via_shuffles(3, 3, Q).len(), 6);
        // (sh^2)_3 = 2 id + l_3^2 has five distinct maps
        assert_eq!(sh_op(3, 2, Q).len(), 5);
    }

    #[test]
    fn connes_b_low_components() {
        assert_eq!(connes_b_component(0, Q), Morphism::from_map(map(2, &[2]), Q.one()));
        let b1 = connes_b_component(1, Q);
        assert_eq!(b1.coeff(&map(3, &[2, 3])), Q.one());
        assert_eq!(b1.coeff(&map(3, &[3, 2])), Q.from_i64(-1));
        assert_eq!(r_op(0, 1, Q), connes_b_component(0, Q));
    }

    #[test]
    fn b_splits_into_b0_and_b1() {
        let b = b_family(6, Q);
        assert_eq!(bk_family(6, 0, Q).add(&bk_family(6, 1, Q)).unwrap(), b);
    }

    #[test]
    fn r_term_counts() {
        for n in 1..6 {
            for l in 1..=n {
                assert_eq!(r_op(n, l, Q).len(), (n + 1) * eulerian_embedded(n, l).len());
            }
        }
    }

    #[test]
    fn bk_from_r_matches_composition() {
        for k in 0..=4 {
            assert_eq!(bk_via_r(6, k, Q), bk_family(6, k, Q), "k = {k}");
        }
    }

    #[test]
    fn family_composition() {
        let l2 = lambda_family(5, 2, Q);
        assert_eq!(l2.then(&l2).unwrap(), lambda_family(5, 4, Q));
        let s1 = sh_family(5, 1, Q);
        let c = s1.then(&s1).unwrap();
        for n in 1..=5 {
            assert_eq!(c.component(n).unwrap(), &Morphism::identity(n + 1, Q));
        }
        let b = b_family(4, Q);
        assert_eq!(b.then(&b).unwrap().degree(), 2);
        assert_eq!(b.then(&b).unwrap().truncation(), 3);
    }

    #[test]
    fn sh_combination_matches_sum() {
        let cs: Vec<Scalar> = [3, -1, 2, 5].iter().map(|&c| Q.from_i64(c)).collect();
        let mut sum = OperationFamily::zero(0, 5, Q);
        for (k, c) in cs.iter().enumerate() {
            sum = sum.add(&sh_family(5, k, Q).scale(c)).unwrap();
        }
        assert_eq!(sh_combination(5, &cs, Q), sum);
    }

    #[test]
    fn eulerian_numbers() {
        assert_eq!(eulerian_number(3, 1), BigInt::from(4));
        assert_eq!(eulerian_number(4, 1), BigInt::from(11));
        assert_eq!(eulerian_number(5, 2), BigInt::from(66));
    }

    #[test]
    fn family_json_round_trip() {
        let f = bk_family(3, 2, Q);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<OperationFamily>(&s).unwrap(), f);
    }
}
