//! Linearized finite-set maps: the PROP `Com`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

pub type Image = SmallVec<[u8; 16]>;

/// A map `{1..m} -> {1..n}`, stored by its (1-based) image sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinSetMap {
    target: u8,
    image: Image,
}

impl FinSetMap {
    pub fn new(target: usize, image: &[usize]) -> Result<FinSetMap> {
        if target > u8::MAX as usize || image.len() > u8::MAX as usize {
            return Err(Error::InvalidArgument(format!("sets larger than {} are not supported", u8::MAX)));
        }
        if let Some(&bad) = image.iter().find(|&&t| t == 0 || t > target) {
            return Err(Error::IndexOutOfRange(format!("image entry {bad} outside 1..{target}")));
        }
        Ok(FinSetMap { target: target as u8, image: image.iter().map(|&t| t as u8).collect() })
    }

    /// Unchecked constructor for internal hot paths.
    pub(crate) fn from_raw(target: usize, image: Image) -> FinSetMap {
        debug_assert!(image.iter().all(|&t| t >= 1 && t as usize <= target));
        FinSetMap { target: target as u8, image }
    }

    pub fn identity(n: usize) -> FinSetMap {
        FinSetMap::from_raw(n, (1..=n as u8).collect())
    }

    pub fn source(&self) -> usize {
        self.image.len()
    }

    pub fn target(&self) -> usize {
        self.target as usize
    }

    pub fn image(&self) -> &[u8] {
        &self.image
    }

    /// Image of the 1-based point `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.image[i - 1] as usize
    }

    /// `g ∘ self`: first `self`, then `g`.
    pub fn then(&self, g: &FinSetMap) -> FinSetMap {
        debug_assert_eq!(self.target(), g.source());
        FinSetMap { target: g.target, image: self.image.iter().map(|&t| g.image[t as usize - 1]).collect() }
    }

    /// Post-composes with a pointwise map on the target.
    pub(crate) fn map_target(&self, target: usize, f: impl Fn(u8) -> u8) -> FinSetMap {
        FinSetMap { target: target as u8, image: self.image.iter().map(|&t| f(t)).collect() }
    }

    pub fn tensor(&self, other: &FinSetMap) -> FinSetMap {
        let mut image = self.image.clone();
        image.extend(other.image.iter().map(|&t| t + self.target));
        FinSetMap { target: self.target + other.target, image }
    }

    pub fn is_bijection(&self) -> bool {
        self.source() == self.target() && self.hits_all(1)
    }

    /// Whether every target point `>= from` has a preimage.
    pub fn hits_all(&self, from: usize) -> bool {
        let mut seen = [false; 256];
        for &t in &self.image {
            seen[t as usize] = true;
        }
        (from..=self.target()).all(|t| seen[t])
    }
}

impl fmt::Debug for FinSetMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}->{}", self.image.as_slice(), self.target)
    }
}

#[derive(Serialize, Deserialize)]
struct MapRepr {
    m: usize,
    n: usize,
    image: Vec<usize>,
}

impl Serialize for FinSetMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MapRepr { m: self.source(), n: self.target(), image: self.image.iter().map(|&t| t as usize).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinSetMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<FinSetMap, D::Error> {
        let r = MapRepr::deserialize(d)?;
        if r.m != r.image.len() {
            return Err(serde::de::Error::custom("image length differs from m"));
        }
        FinSetMap::new(r.n, &r.image).map_err(serde::de::Error::custom)
    }
}

/// The map `{1..k} -> {1..k-1}` identifying `i` and `j` (`i < j`): delete
/// slot `j` and renumber the rest in order.
pub fn mult_map(k: usize, i: usize, j: usize) -> Result<FinSetMap> {
    if k < 2 || i < 1 || i >= j || j > k {
        return Err(Error::IndexOutOfRange(format!("mult_map({k},{i},{j})")));
    }
    let image = (1..=k).map(|t| if t == j { i } else if t > j { t - 1 } else { t } as u8).collect();
    Ok(FinSetMap::from_raw(k - 1, image))
}

/// The `i`-th Hochschild face on `{1..h+1}`, as a map on points: merge
/// `i+1` and `i+2`, or for `i = h` merge `h+1` into the basepoint.
#[inline]
pub fn face_point(h: usize, i: usize, t: u8) -> u8 {
    if i == h {
        if t as usize == h + 1 {
            1
        } else {
            t
        }
    } else if t as usize <= i + 1 {
        t
    } else {
        t - 1
    }
}

/// `m^{k+1}_{i+1,i+2} ⊗ id_n` as a map, with the wraparound `i = k`.
pub fn face_map(k: usize, n: usize, i: usize) -> Result<FinSetMap> {
    if k < 1 || i > k {
        return Err(Error::IndexOutOfRange(format!("face({k},{n},{i})")));
    }
    let image = (1..=k + 1 + n).map(|t| if t <= k + 1 { face_point(k, i, t as u8) } else { (t - 1) as u8 }).collect();
    Ok(FinSetMap::from_raw(k + n, image))
}

pub fn face(k: usize, n: usize, i: usize, field: Field) -> Result<Morphism> {
    Ok(Morphism::from_map(face_map(k, n, i)?, field.one()))
}

/// The order-preserving injection `{1..k-1+n} -> {1..k+n}` missing `i+1`.
pub fn unit_insertion(k: usize, n: usize, i: usize) -> Result<FinSetMap> {
    if i < 1 || i + 1 > k {
        return Err(Error::IndexOutOfRange(format!("unit_insertion({k},{n},{i})")));
    }
    let image = (1..k + n).map(|t| if t <= i { t } else { t + 1 } as u8).collect();
    Ok(FinSetMap::from_raw(k + n, image))
}

/// A linear combination of maps `{1..m} -> {1..n}`. Zero coefficients are
/// never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct Morphism {
    source: usize,
    target: usize,
    field: Field,
    terms: BTreeMap<FinSetMap, Scalar>,
}

impl Morphism {
    pub fn zero(source: usize, target: usize, field: Field) -> Morphism {
        Morphism { source, target, field, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize, field: Field) -> Morphism {
        Morphism::from_map(FinSetMap::identity(n), field.one())
    }

    pub fn from_map(map: FinSetMap, coeff: Scalar) -> Morphism {
        let mut m = Morphism::zero(map.source(), map.target(), coeff.field());
        m.add_term(map, coeff);
        m
    }

    /// Builds a morphism from `(map, coefficient)` pairs, summing repeats.
    pub fn from_terms(
        source: usize,
        target: usize,
        field: Field,
        terms: impl IntoIterator<Item = (FinSetMap, Scalar)>,
    ) -> Result<Morphism> {
        let mut m = Morphism::zero(source, target, field);
        for (map, c) in terms {
            if map.source() != source || map.target() != target {
                return Err(Error::SizeMismatch(format!("term {map:?} in Com({source},{target})")));
            }
            if c.field() != field {
                return Err(Error::FieldMismatch(c.field().to_string(), field.to_string()));
            }
            m.add_term(map, c);
        }
        Ok(m)
    }

    /// Internal builder from integer-coefficient pairs with known sizes.
    pub(crate) fn from_i64_terms(
        source: usize,
        target: usize,
        field: Field,
        terms: impl IntoIterator<Item = (FinSetMap, i64)>,
    ) -> Morphism {
        let mut acc: HashMap<FinSetMap, i64> = HashMap::new();
        for (map, c) in terms {
            debug_assert_eq!((map.source(), map.target()), (source, target));
            *acc.entry(map).or_insert(0) += c;
        }
        let terms = acc.into_iter().filter(|(_, c)| *c != 0).map(|(m, c)| (m, field.from_i64(c))).collect();
        Morphism { source, target, field, terms }
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FinSetMap, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, map: &FinSetMap) -> Scalar {
        self.terms.get(map).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn add_term(&mut self, map: FinSetMap, coeff: Scalar) {
        debug_assert_eq!((map.source(), map.target()), (self.source, self.target));
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(map) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same_shape(&self, other: &Morphism) -> Result<()> {
        if (self.source, self.target) != (other.source, other.target) {
            return Err(Error::SizeMismatch(format!(
                "Com({},{}) vs Com({},{})",
                self.source, self.target, other.source, other.target
            )));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.to_string(), other.field.to_string()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Morphism) -> Result<Morphism> {
        self.check_same_shape(other)?;
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn sub(&self, other: &Morphism) -> Result<Morphism> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Morphism {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        Morphism { source: self.source, target: self.target, field: self.field, terms }
    }

    pub fn scale(&self, c: &Scalar) -> Morphism {
        let mut r = Morphism::zero(self.source, self.target, self.field);
        for (m, v) in &self.terms {
            r.add_term(m.clone(), v * c);
        }
        r
    }

    pub fn scale_i64(&self, c: i64) -> Morphism {
        self.scale(&self.field.from_i64(c))
    }

    /// `g ∘ self` (first `self`, then `g`), extended bilinearly.
    pub fn compose(&self, g: &Morphism) -> Result<Morphism> {
        if self.target != g.source {
            return Err(Error::SizeMismatch(format!(
                "cannot compose Com({},{}) with Com({},{})",
                self.source, self.target, g.source, g.target
            )));
        }
        if self.field != g.field {
            return Err(Error::FieldMismatch(self.field.to_string(), g.field.to_string()));
        }
        let mut acc: HashMap<FinSetMap, Scalar> = HashMap::with_capacity(self.len() * g.len());
        for (a, ca) in &self.terms {
            for (b, cb) in &g.terms {
                let c = ca * cb;
                match acc.entry(a.then(b)) {
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                    std::collections::hash_map::Entry::Occupied(mut o) => *o.get_mut() += &c,
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(Morphism { source: self.source, target: g.target, field: self.field, terms })
    }

    pub fn tensor(&self, other: &Morphism) -> Result<Morphism> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.to_string(), other.field.to_string()));
        }
        let mut r = Morphism::zero(self.source + other.source, self.target + other.target, self.field);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                r.add_term(a.tensor(b), ca * cb);
            }
        }
        Ok(r)
    }

    /// Post-composes every term with a pointwise map on the target, scaling
    /// by `c`, and accumulates into `out`.
    pub(crate) fn accumulate_mapped(&self, out: &mut Morphism, c: i64, f: impl Fn(u8) -> u8) {
        for (m, v) in &self.terms {
            out.add_term(m.map_target(out.target, &f), v.scale_i64(c));
        }
    }

    pub fn to_field(&self, field: Field) -> Result<Morphism> {
        let mut r = Morphism::zero(self.source, self.target, field);
        for (m, c) in &self.terms {
            r.add_term(m.clone(), c.to_field(field)?);
        }
        Ok(r)
    }
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Com({},{})[", self.source, self.target)?;
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*{:?}", m.image())?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    map: FinSetMap,
    coeff: Scalar,
}

#[derive(Serialize, Deserialize)]
struct MorphismRepr {
    m: usize,
    n: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for Morphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MorphismRepr {
            m: self.source,
            n: self.target,
            terms: self.terms.iter().map(|(m, c)| TermRepr { map: m.clone(), coeff: c.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Morphism {
    /// The field is taken from the first coefficient; an empty term list
    /// yields a rational zero.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Morphism, D::Error> {
        let r = MorphismRepr::deserialize(d)?;
        let field = r.terms.first().map(|t| t.coeff.field()).unwrap_or(Field::Rational);
        Morphism::from_terms(r.m, r.n, field, r.terms.into_iter().map(|t| (t.map, t.coeff)))
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rational;

    fn map(n: usize, im: &[usize]) -> FinSetMap {
        FinSetMap::new(n, im).unwrap()
    }

    #[test]
    fn mult_maps() {
        assert_eq!(mult_map(3, 1, 2).unwrap(), map(2, &[1, 1, 2]));
        assert_eq!(mult_map(3, 2, 3).unwrap(), map(2, &[1, 2, 2]));
        assert_eq!(mult_map(4, 1, 3).unwrap(), map(3, &[1, 2, 1, 3]));
        assert!(mult_map(3, 2, 2).is_err());
        assert!(mult_map(3, 1, 4).is_err());
    }

    #[test]
    fn faces() {
        assert_eq!(face_map(1, 0, 0).unwrap(), map(1, &[1, 1]));
        assert_eq!(face_map(1, 0, 1).unwrap(), map(1, &[1, 1]));
        assert_eq!(face_map(2, 1, 1).unwrap(), map(3, &[1, 2, 2, 3]));
        assert_eq!(face_map(2, 0, 2).unwrap(), map(2, &[1, 2, 1]));
        assert!(face_map(2, 0, 3).is_err());
        assert!(face_map(0, 0, 0).is_err());
    }

    #[test]
    fn unit_insertions() {
        assert_eq!(unit_insertion(2, 0, 1).unwrap(), map(2, &[1]));
        assert_eq!(unit_insertion(3, 0, 2).unwrap(), map(3, &[1, 2]));
        assert_eq!(unit_insertion(3, 1, 1).unwrap(), map(4, &[1, 3, 4]));
        assert!(unit_insertion(2, 0, 2).is_err());
    }

    #[test]
    fn composition_examples() {
        let id2 = Morphism::identity(2, Q);
        assert_eq!(id2.compose(&id2).unwrap(), id2);
        let m3 = Morphism::from_map(mult_map(3, 1, 2).unwrap(), Q.one());
        let m2 = Morphism::from_map(mult_map(2, 1, 2).unwrap(), Q.one());
        assert_eq!(m3.compose(&m2).unwrap(), Morphism::from_map(map(1, &[1, 1, 1]), Q.one()));
        let two = id2.scale_i64(2);
        assert_eq!(two.compose(&two).unwrap(), id2.scale_i64(4));
        assert!(m2.compose(&m3).is_err());
    }

    #[test]
    fn tensor_examples() {
        let id1 = Morphism::identity(1, Q);
        assert_eq!(id1.tensor(&id1).unwrap(), Morphism::identity(2, Q));
        let m2 = Morphism::from_map(mult_map(2, 1, 2).unwrap(), Q.one());
        assert_eq!(m2.tensor(&id1).unwrap(), Morphism::from_map(map(2, &[1, 1, 2]), Q.one()));
    }

    #[test]
    fn cancellation_keeps_canonical_form() {
        let id2 = Morphism::identity(2, Q);
        let z = id2.sub(&id2).unwrap();
        assert!(z.is_zero());
        assert_eq!(z, Morphism::zero(2, 2, Q));
    }

    #[test]
    fn json_shape() {
        let j = serde_json::to_string(&map(2, &[1, 2, 2])).unwrap();
        assert_eq!(j, r#"{"m":3,"n":2,"image":[1,2,2]}"#);
        let m = Morphism::identity(2, Q).scale_i64(-3);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"m":2,"n":2,"terms":[{"map":{"m":2,"n":2,"image":[1,2]},"coeff":"-3"}]}"#);
        assert_eq!(serde_json::from_str::<Morphism>(&s).unwrap(), m);
        assert!(serde_json::from_str::<FinSetMap>(r#"{"m":2,"n":2,"image":[1,3]}"#).is_err());
    }
}
