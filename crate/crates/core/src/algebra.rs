//! Finite-dimensional graded commutative algebras, the action of
//! `Com`-morphisms on their tensor powers, and Hochschild chains.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finset::{face_map, FinSetMap, Morphism};
use crate::loday::{b_family, block_shuffles, pattern_sign, OperationFamily};
use crate::scalar::{Field, Scalar};

/// A sparse linear combination of basis elements.
pub type Element = Vec<(usize, Scalar)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedCommutativeAlgebra {
    name: String,
    field: Field,
    labels: Vec<String>,
    degrees: Vec<i64>,
    unit: usize,
    table: Vec<Vec<Element>>,
}

impl GradedCommutativeAlgebra {
    /// Builds an algebra from its nonzero basis products `(a, b, a·b)` and
    /// checks the unit law, degree additivity, graded commutativity and
    /// associativity.
    pub fn new(
        name: &str,
        field: Field,
        labels: Vec<String>,
        degrees: Vec<i64>,
        unit: usize,
        products: Vec<(usize, usize, Element)>,
    ) -> Result<GradedCommutativeAlgebra> {
        let n = labels.len();
        if degrees.len() != n || unit >= n {
            return Err(Error::SizeMismatch("labels, degrees and unit disagree".into()));
        }
        let mut table = vec![vec![Element::new(); n]; n];
        for (a, b, v) in products {
            if a >= n || b >= n || v.iter().any(|(e, _)| *e >= n) {
                return Err(Error::IndexOutOfRange(format!("product ({a},{b})")));
            }
            if v.iter().any(|(_, c)| c.field() != field) {
                return Err(Error::FieldMismatch(field.to_string(), "structure constant".into()));
            }
            table[a][b] = normalize(v);
        }
        let alg = GradedCommutativeAlgebra { name: name.into(), field, labels, degrees, unit, table };
        alg.check()?;
        Ok(alg)
    }

    fn check(&self) -> Result<()> {
        let n = self.dim();
        let bad = |what: &str| Err(Error::InvalidArgument(format!("{}: {what}", self.name)));
        for a in 0..n {
            let unit_a = vec![(a, self.field.one())];
            if self.table[self.unit][a] != unit_a || self.table[a][self.unit] != unit_a {
                return bad("unit law fails");
            }
            for b in 0..n {
                let ab = &self.table[a][b];
                if ab.iter().any(|(e, _)| self.degrees[*e] != self.degrees[a] + self.degrees[b]) {
                    return bad("product is not degree-additive");
                }
                let s = if self.degrees[a] * self.degrees[b] % 2 == 0 { 1 } else { -1 };
                let ba: Element = self.table[b][a].iter().map(|(e, c)| (*e, c.scale_i64(s))).collect();
                if *ab != ba {
                    return bad("not graded commutative");
                }
                for c in 0..n {
                    let l = self.mul(&self.table[a][b], &[(c, self.field.one())]);
                    let r = self.mul(&[(a, self.field.one())], &self.table[b][c]);
                    if l != r {
                        return bad("not associative");
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Parse(format!("no basis element {label:?} in {}", self.name)))
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn product(&self, a: usize, b: usize) -> &[(usize, Scalar)] {
        &self.table[a][b]
    }

    pub fn mul(&self, x: &[(usize, Scalar)], y: &[(usize, Scalar)]) -> Element {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (a, ca) in x {
            for (b, cb) in y {
                let cab = ca * cb;
                for (e, ce) in &self.table[*a][*b] {
                    *acc.entry(*e).or_insert_with(|| self.field.zero()) += &(&cab * ce);
                }
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// The ordered product of basis letters; the empty product is the unit.
    pub fn multiply_letters(&self, letters: &[usize]) -> Element {
        let mut acc = vec![(self.unit, self.field.one())];
        for &l in letters {
            if acc.is_empty() {
                break;
            }
            acc = if acc.len() == 1 && acc[0].0 == self.unit && acc[0].1.is_one() {
                vec![(l, self.field.one())]
            } else {
                self.mul(&acc, &[(l, self.field.one())])
            };
        }
        acc
    }

    /// `H*(S¹)` with basis `1`, `x`, where `x` sits in degree `-1` and
    /// `x² = 0`.
    pub fn circle_cohomology(field: Field) -> GradedCommutativeAlgebra {
        Self::new(
            "hs1",
            field,
            vec!["1".into(), "x".into()],
            vec![0, -1],
            0,
            vec![(0, 0, vec![(0, field.one())]), (0, 1, vec![(1, field.one())]), (1, 0, vec![(1, field.one())])],
        )
        .expect("valid builtin")
    }

    /// `F[t]/t^m` concentrated in degree 0.
    pub fn truncated_polynomial(m: usize, field: Field) -> Result<GradedCommutativeAlgebra> {
        if m < 1 {
            return Err(Error::InvalidArgument("F[t]/t^m needs m >= 1".into()));
        }
        let labels = (0..m)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            })
            .collect();
        let mut products = Vec::new();
        for a in 0..m {
            for b in 0..m - a {
                products.push((a, b, vec![(a + b, field.one())]));
            }
        }
        Self::new(&format!("poly{m}"), field, labels, vec![0; m], 0, products)
    }

    /// The free commutative algebra on degree-0 generators, modulo
    /// monomials of total degree above `max_degree`. Monomials are labelled
    /// like `q0·g` and `g^2`.
    pub fn truncated_free(gens: &[&str], max_degree: usize, field: Field) -> Result<GradedCommutativeAlgebra> {
        if gens.is_empty() || gens.iter().any(|g| g.is_empty() || g.contains(['·', '^', ',']) || *g == "1") {
            return Err(Error::InvalidArgument("generators must be distinct nonempty names other than 1".into()));
        }
        if gens.iter().collect::<std::collections::BTreeSet<_>>().len() != gens.len() {
            return Err(Error::InvalidArgument("generators must be distinct".into()));
        }
        fn exponents(n: usize, budget: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            (0..=budget)
                .flat_map(|e| exponents(n - 1, budget - e).into_iter().map(move |rest| [vec![e], rest].concat()))
                .collect()
        }
        let mut monomials = exponents(gens.len(), max_degree);
        monomials.sort_by(|a, b| a.iter().sum::<usize>().cmp(&b.iter().sum::<usize>()).then(b.cmp(a)));
        let index: BTreeMap<Vec<usize>, usize> = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let labels = monomials
            .iter()
            .map(|m| {
                let parts: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(g, &e)| if e == 1 { gens[g].to_string() } else { format!("{}^{e}", gens[g]) })
                    .collect();
                if parts.is_empty() {
                    "1".to_string()
                } else {
                    parts.join("·")
                }
            })
            .collect();
        let mut products = Vec::new();
        for (a, ma) in monomials.iter().enumerate() {
            for (b, mb) in monomials.iter().enumerate() {
                let m: Vec<usize> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                if let Some(&c) = index.get(&m) {
                    products.push((a, b, vec![(c, field.one())]));
                }
            }
        }
        let name = format!("free{max_degree}:{}", gens.join(","));
        Self::new(&name, field, labels, vec![0; monomials.len()], 0, products)
    }

    /// The group algebra `F[Z/2]` with basis `1`, `g`.
    pub fn group_algebra_z2(field: Field) -> GradedCommutativeAlgebra {
        let one = field.one();
        Self::new(
            "z2",
            field,
            vec!["1".into(), "g".into()],
            vec![0, 0],
            0,
            vec![
                (0, 0, vec![(0, one.clone())]),
                (0, 1, vec![(1, one.clone())]),
                (1, 0, vec![(1, one.clone())]),
                (1, 1, vec![(0, one)]),
            ],
        )
        .expect("valid builtin")
    }

    /// Looks up a builtin by name: `hs1`, `z2`, `poly<m>` or `free<d>:<gens>`.
    pub fn builtin(name: &str, field: Field) -> Result<GradedCommutativeAlgebra> {
        match name {
            "hs1" => Ok(Self::circle_cohomology(field)),
            "z2" => Ok(Self::group_algebra_z2(field)),
            _ => {
                if let Some(m) = name.strip_prefix("poly").and_then(|m| m.parse().ok()) {
                    return Self::truncated_polynomial(m, field);
                }
                if let Some((d, gens)) = name.strip_prefix("free").and_then(|r| r.split_once(':')) {
                    if let Ok(d) = d.parse() {
                        return Self::truncated_free(&gens.split(',').collect::<Vec<_>>(), d, field);
                    }
                }
                Err(Error::Parse(format!("unknown algebra {name:?} (expected hs1, z2, poly<m> or free<d>:<gens>)")))
            }
        }
    }
}

fn normalize(v: Element) -> Element {
    let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
    for (e, c) in v {
        match acc.get_mut(&e) {
            Some(x) => *x += &c,
            None => {
                acc.insert(e, c);
            }
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

pub type Word = Vec<usize>;

/// A finite linear combination of tensor words `a_1 ⊗ .. ⊗ a_w`, `w >= 1`,
/// in a fixed algebra. Homological degree of a word is
/// `(w - 1) + Σ |a_i|`.
#[derive(Clone, PartialEq, Eq)]
pub struct HochschildChain {
    algebra: Arc<GradedCommutativeAlgebra>,
    terms: BTreeMap<Word, Scalar>,
}

impl fmt::Debug for HochschildChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for HochschildChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let letters: Vec<&str> = w.iter().map(|&l| self.algebra.label(l)).collect();
            write!(f, "({c})·{}", letters.join("⊗"))?;
        }
        Ok(())
    }
}

impl HochschildChain {
    pub fn zero(algebra: Arc<GradedCommutativeAlgebra>) -> HochschildChain {
        HochschildChain { algebra, terms: BTreeMap::new() }
    }

    pub fn from_terms(algebra: Arc<GradedCommutativeAlgebra>, terms: Vec<(Word, Scalar)>) -> Result<HochschildChain> {
        let mut c = Self::zero(algebra);
        for (w, s) in terms {
            if w.is_empty() {
                return Err(Error::InvalidArgument("words must have length at least 1".into()));
            }
            if let Some(l) = w.iter().find(|&&l| l >= c.algebra.dim()) {
                return Err(Error::IndexOutOfRange(format!("letter {l}")));
            }
            if s.field() != c.algebra.field() {
                return Err(Error::FieldMismatch(c.algebra.field().to_string(), s.field().to_string()));
            }
            c.add_term(w, s);
        }
        Ok(c)
    }

    /// A single word given by basis labels, with coefficient 1.
    pub fn word(algebra: Arc<GradedCommutativeAlgebra>, labels: &[&str]) -> Result<HochschildChain> {
        let w = labels.iter().map(|l| algebra.index_of(l)).collect::<Result<Word>>()?;
        let one = algebra.field().one();
        Self::from_terms(algebra, vec![(w, one)])
    }

    pub fn algebra(&self) -> &Arc<GradedCommutativeAlgebra> {
        &self.algebra
    }

    pub fn field(&self) -> Field {
        self.algebra.field()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &[usize]) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(|| self.field().zero())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: Scalar) {
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

    pub fn word_degree(&self, w: &[usize]) -> i64 {
        w.len() as i64 - 1 + w.iter().map(|&l| self.algebra.degree(l)).sum::<i64>()
    }

    /// The common homological degree, if the chain is nonzero and
    /// homogeneous.
    pub fn degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|w| self.word_degree(w));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn max_word_length(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    fn same_algebra(&self, other: &HochschildChain) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::InvalidArgument(format!(
                "chains over different algebras ({}, {})",
                self.algebra.name(),
                other.algebra.name()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &HochschildChain) -> Result<HochschildChain> {
        self.same_algebra(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &HochschildChain) -> Result<HochschildChain> {
        self.add(&other.scale_i64(-1))
    }

    pub fn scale(&self, c: &Scalar) -> HochschildChain {
        let terms = self.terms.iter().map(|(w, x)| (w.clone(), x * c)).filter(|(_, x)| !x.is_zero()).collect();
        HochschildChain { algebra: self.algebra.clone(), terms }
    }

    pub fn scale_i64(&self, c: i64) -> HochschildChain {
        self.scale(&self.field().from_i64(c))
    }

    pub fn to_json(&self) -> ChainJson {
        ChainJson {
            algebra: self.algebra.name().to_string(),
            terms: self
                .terms
                .iter()
                .map(|(w, c)| ChainTermJson {
                    word: w.iter().map(|&l| self.algebra.label(l).to_string()).collect(),
                    coeff: c.clone(),
                })
                .collect(),
        }
    }

    /// Reads the JSON chain format, resolving the algebra among the
    /// builtins over `field`.
    pub fn from_json(json: &ChainJson, field: Field) -> Result<HochschildChain> {
        let alg = Arc::new(GradedCommutativeAlgebra::builtin(&json.algebra, field)?);
        let mut terms = Vec::with_capacity(json.terms.len());
        for t in &json.terms {
            let w = t.word.iter().map(|l| alg.index_of(l)).collect::<Result<Word>>()?;
            terms.push((w, t.coeff.to_field(field)?));
        }
        Self::from_terms(alg, terms)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainJson {
    pub algebra: String,
    pub terms: Vec<ChainTermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainTermJson {
    pub word: Vec<String>,
    pub coeff: Scalar,
}

/// `g(a_1 ⊗ .. ⊗ a_m)` for a single map: letters are stably sorted by
/// output slot (Koszul sign from their degrees) and multiplied within each
/// slot in input order. Empty slots receive the unit.
fn eval_map(
    alg: &GradedCommutativeAlgebra,
    g: &FinSetMap,
    word: &[usize],
    coeff: &Scalar,
    out: &mut HashMap<Word, Scalar>,
) {
    let img = g.image();
    let mut odd = false;
    for i in 0..word.len() {
        if alg.degree(word[i]) % 2 == 0 {
            continue;
        }
        for j in i + 1..word.len() {
            if img[i] > img[j] && alg.degree(word[j]) % 2 != 0 {
                odd = !odd;
            }
        }
    }
    let mut slots: Vec<Vec<usize>> = vec![Vec::new(); g.target()];
    for (i, &t) in img.iter().enumerate() {
        slots[t as usize - 1].push(word[i]);
    }
    let mut acc: Vec<(Word, Scalar)> = vec![(Vec::with_capacity(g.target()), if odd { -coeff } else { coeff.clone() })];
    for s in &slots {
        let v = alg.multiply_letters(s);
        if v.is_empty() {
            return;
        }
        if v.len() == 1 && v[0].1.is_one() {
            for (w, _) in acc.iter_mut() {
                w.push(v[0].0);
            }
            continue;
        }
        let mut next = Vec::with_capacity(acc.len() * v.len());
        for (w, c) in &acc {
            for (e, ce) in &v {
                let mut w2 = w.clone();
                w2.push(*e);
                next.push((w2, c * ce));
            }
        }
        acc = next;
    }
    for (w, c) in acc {
        match out.get_mut(&w) {
            Some(x) => *x += &c,
            None => {
                out.insert(w, c);
            }
        }
    }
}

fn collect(algebra: Arc<GradedCommutativeAlgebra>, acc: HashMap<Word, Scalar>) -> HochschildChain {
    HochschildChain { algebra, terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
}

/// Applies `g: Com(m, n)` to a single word of length `m`.
pub fn evaluate_word(alg: &Arc<GradedCommutativeAlgebra>, g: &Morphism, word: &[usize]) -> Result<HochschildChain> {
    let mut acc = HashMap::new();
    eval_word_into(alg, g, word, &alg.field().one(), &mut acc)?;
    Ok(collect(alg.clone(), acc))
}

fn eval_word_into(
    alg: &GradedCommutativeAlgebra,
    g: &Morphism,
    word: &[usize],
    c: &Scalar,
    acc: &mut HashMap<Word, Scalar>,
) -> Result<()> {
    if g.source() != word.len() {
        return Err(Error::SizeMismatch(format!(
            "morphism on {} inputs applied to a word of length {}",
            g.source(),
            word.len()
        )));
    }
    if g.field() != alg.field() {
        return Err(Error::FieldMismatch(g.field().to_string(), alg.field().to_string()));
    }
    for (m, s) in g.terms() {
        eval_map(alg, m, word, &(c * s), acc);
    }
    Ok(())
}

/// Bilinear extension of [`evaluate_word`]: every word of `c` must have
/// length `g.source()`.
pub fn evaluate(g: &Morphism, c: &HochschildChain) -> Result<HochschildChain> {
    let mut acc = HashMap::new();
    for (w, s) in c.terms() {
        eval_word_into(&c.algebra, g, w, s, &mut acc)?;
    }
    Ok(collect(c.algebra.clone(), acc))
}

/// `d(x) = (-1)^{|x|} Σ_{i=1}^{k} (-1)^i m_{i,i+1}(x)` on words of length
/// `k`, with `m_{k,k+1}` the wraparound product of the last letter into
/// the first. Words of length 1 are cycles.
pub fn hochschild_differential(c: &HochschildChain) -> HochschildChain {
    let alg = &c.algebra;
    let mut faces: HashMap<usize, Vec<FinSetMap>> = HashMap::new();
    let mut acc = HashMap::new();
    for (w, s) in c.terms() {
        let k = w.len();
        if k < 2 {
            continue;
        }
        let fs = faces.entry(k).or_insert_with(|| (0..k).map(|i| face_map(k - 1, 0, i).unwrap()).collect());
        let outer = if c.word_degree(w) % 2 == 0 { s.clone() } else { -s };
        for (i, f) in fs.iter().enumerate() {
            let si = if i % 2 == 0 { -&outer } else { outer.clone() };
            eval_map(alg, f, w, &si, &mut acc);
        }
    }
    collect(alg.clone(), acc)
}

/// Projection to the normalized complex: drop every word with the unit in
/// positions `2..w`.
pub fn reduce(c: &HochschildChain) -> HochschildChain {
    let u = c.algebra.unit();
    HochschildChain {
        algebra: c.algebra.clone(),
        terms: c.terms.iter().filter(|(w, _)| !w[1..].contains(&u)).map(|(w, s)| (w.clone(), s.clone())).collect(),
    }
}

/// Applies the family componentwise: words of length `j + 1` are sent
/// through `x_j`.
pub fn act(x: &OperationFamily, c: &HochschildChain) -> Result<HochschildChain> {
    if x.field() != c.field() {
        return Err(Error::FieldMismatch(x.field().to_string(), c.field().to_string()));
    }
    if c.max_word_length() > x.truncation() + 1 {
        return Err(Error::TruncationExceeded(format!(
            "word length {} needs truncation at least {}, family has {}",
            c.max_word_length(),
            c.max_word_length() - 1,
            x.truncation()
        )));
    }
    let mut acc = HashMap::new();
    for (w, s) in c.terms() {
        if let Some(m) = x.component(w.len() - 1) {
            eval_word_into(&c.algebra, m, w, s, &mut acc)?;
        }
    }
    Ok(collect(c.algebra.clone(), acc))
}

/// Connes' boundary on chains.
pub fn connes_b(c: &HochschildChain) -> HochschildChain {
    let k = c.max_word_length().saturating_sub(1);
    act(&b_family(k, c.field()), c).expect("truncation covers the chain")
}

/// `m^{1,..,r}` at word lengths `j_i + 1`: the signed sum over all
/// `(j_1, .., j_r)`-shuffles of the maps sending every first letter to
/// slot 1 and the remaining letters to `1 + σ(position)`.
pub fn shuffle_morphism(js: &[usize], field: Field) -> Morphism {
    let total: usize = js.iter().sum();
    let source = total + js.len();
    let mut terms = Vec::new();
    for s in block_shuffles(js) {
        let mut image = Vec::with_capacity(source);
        let mut pos = 0;
        for &j in js {
            image.push(1u8);
            for _ in 0..j {
                image.push(1 + s[pos]);
                pos += 1;
            }
        }
        terms.push((FinSetMap::from_raw(total + 1, image.into()), pattern_sign(&s)));
    }
    Morphism::from_i64_terms(source, total + 1, field, terms)
}

/// The shuffle product, twisted by `(-1)^{(w_x - 1)·|y|}` so that
/// `d(x·y) = dx·y + (-1)^{|x|} x·dy` for [`hochschild_differential`].
pub fn shuffle_product(x: &HochschildChain, y: &HochschildChain) -> Result<HochschildChain> {
    x.same_algebra(y)?;
    let alg = &x.algebra;
    let mut cache: HashMap<(usize, usize), Morphism> = HashMap::new();
    let mut acc = HashMap::new();
    for (wx, cx) in x.terms() {
        for (wy, cy) in y.terms() {
            let (p, q) = (wx.len() - 1, wy.len() - 1);
            let m = cache.entry((p, q)).or_insert_with(|| shuffle_morphism(&[p, q], alg.field()));
            let mut w = wx.clone();
            w.extend_from_slice(wy);
            let twist = if p as i64 * y.word_degree(wy) % 2 == 0 { 1 } else { -1 };
            eval_word_into(alg, m, &w, &(cx * cy).scale_i64(twist), &mut acc)?;
        }
    }
    Ok(collect(alg.clone(), acc))
}

/// Words of length `len` with no unit after the first letter, in
/// lexicographic order.
pub fn reduced_words(alg: &GradedCommutativeAlgebra, len: usize) -> Vec<Word> {
    if len == 0 {
        return Vec::new();
    }
    let u = alg.unit();
    let mut out: Vec<Word> = (0..alg.dim()).map(|a| vec![a]).collect();
    for _ in 1..len {
        out = out
            .into_iter()
            .flat_map(|w| (0..alg.dim()).filter(move |&a| a != u).map(move |a| [w.clone(), vec![a]].concat()))
            .collect();
    }
    out
}

/// One entry of the normalized Hochschild homology, split by word length
/// and homological degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReducedHomologyCell {
    pub length: usize,
    pub degree: i64,
    pub dim: usize,
}

/// Homology of the normalized complex at word lengths `1..=max_len`.
/// The differential lowers the length by one and preserves the sum of
/// letter degrees, so each (length, degree) cell is computed separately.
pub fn reduced_homology(alg: &Arc<GradedCommutativeAlgebra>, max_len: usize) -> Vec<ReducedHomologyCell> {
    use crate::homology::linalg::{rank, SparseMatrix, SparseVec};
    let field = alg.field();
    let probe = HochschildChain::zero(alg.clone());
    // words by (length, degree)
    let mut cells: BTreeMap<(usize, i64), Vec<Word>> = BTreeMap::new();
    for len in 1..=max_len + 1 {
        for w in reduced_words(alg, len) {
            cells.entry((len, probe.word_degree(&w))).or_default().push(w);
        }
    }
    let rank_d = |len: usize, deg: i64| -> usize {
        let (Some(src), Some(dst)) = (cells.get(&(len, deg)), cells.get(&(len - 1, deg - 1))) else {
            return 0;
        };
        let pos: HashMap<&Word, u32> = dst.iter().enumerate().map(|(i, w)| (w, i as u32)).collect();
        let cols: Vec<SparseVec> = src
            .iter()
            .map(|w| {
                let c = HochschildChain::from_terms(alg.clone(), vec![(w.clone(), field.one())]).expect("valid word");
                let mut v: SparseVec =
                    reduce(&hochschild_differential(&c)).terms().map(|(w, s)| (pos[w], s.clone())).collect();
                v.sort_by_key(|(r, _)| *r);
                v
            })
            .collect();
        rank(&SparseMatrix::from_cols(dst.len(), cols), field)
    };
    cells
        .iter()
        .filter(|((len, _), _)| *len <= max_len)
        .map(|(&(length, degree), words)| {
            let out = if length > 1 { rank_d(length, degree) } else { 0 };
            let dim = words.len() - out - rank_d(length + 1, degree + 1);
            ReducedHomologyCell { length, degree, dim }
        })
        .collect()
}
