//! Finite binary words, cones of the Cantor set, and prefix-substitution
//! partial bijections.
//!
//! A [`TableMap`] is a finite set of rows `(dom, img)`; the row `(γ, μ)` sends
//! every infinite string `γω` to `μω`.  Rows have pairwise-incomparable
//! domain prefixes and pairwise-incomparable image prefixes, so the domain and
//! the image are disjoint unions of cones.  Tables are kept in a canonical
//! form: rows sorted by domain prefix and fully reduced (sibling rows
//! `(γ0, μ0), (γ1, μ1)` merged into `(γ, μ)` until no merge applies), which
//! makes extensional equality a row-set comparison.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A finite word over {0,1}.  The empty word is written `ε` and serialized as
/// the empty string.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "alphabet is {{0,1}}");
        Word(bits.to_vec())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// Neither word a prefix of the other; the corresponding cones are
    /// disjoint exactly in this case.
    pub fn incomparable(&self, other: &Word) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }

    /// `self` with `prefix` removed from the front.  Panics if `prefix` is not
    /// a prefix; callers check first.
    pub fn strip_prefix(&self, prefix: &Word) -> Word {
        assert!(prefix.is_prefix_of(self));
        Word(self.0[prefix.0.len()..].to_vec())
    }

    pub fn concat(&self, tail: &Word) -> Word {
        let mut bits = self.0.clone();
        bits.extend_from_slice(&tail.0);
        Word(bits)
    }

    pub fn child(&self, bit: u8) -> Word {
        assert!(bit <= 1);
        let mut bits = self.0.clone();
        bits.push(bit);
        Word(bits)
    }

    /// Parent word (one symbol shorter), or None at the root.
    pub fn parent(&self) -> Option<Word> {
        if self.0.is_empty() {
            None
        } else {
            Some(Word(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn last(&self) -> Option<u8> {
        self.0.last().copied()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "ε")
        } else {
            write!(f, "{self}")
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("word must consist of the symbols 0 and 1, got {0:?}")]
pub struct BadWord(pub String);

impl FromStr for Word {
    type Err = BadWord;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => return Err(BadWord(s.to_string())),
            }
        }
        Ok(Word(bits))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Convenience constructor used all over the test-suite.
pub fn w(s: &str) -> Word {
    s.parse().expect("literal word")
}

/// The cone `X_α`: all infinite binary strings extending the prefix `α`.
/// `Cone(ε)` is the whole Cantor set.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Cone(pub Word);

impl Cone {
    pub fn all() -> Self {
        Cone(Word::empty())
    }

    pub fn disjoint(&self, other: &Cone) -> bool {
        self.0.incomparable(&other.0)
    }

    pub fn contains(&self, other: &Cone) -> bool {
        self.0.is_prefix_of(&other.0)
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X_{:?}", self.0)
    }
}

/// The basic prefix replacement `σ_{dom}^{img}`, together with the
/// distinguished zero value that absorbs composition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PrefixMap {
    Zero,
    Sigma { dom: Word, img: Word },
}

impl PrefixMap {
    pub fn sigma(dom: Word, img: Word) -> Self {
        PrefixMap::Sigma { dom, img }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PrefixMap::Zero)
    }

    /// Composition on overlaps: apply `other` first, then `self`.  Returns
    /// zero when the image of `other` misses the domain of `self`.
    pub fn compose(&self, other: &PrefixMap) -> PrefixMap {
        let (PrefixMap::Sigma { dom: d1, img: m1 }, PrefixMap::Sigma { dom: d2, img: m2 }) =
            (self, other)
        else {
            return PrefixMap::Zero;
        };
        if d1.is_prefix_of(m2) {
            // every output of `other` lands inside dom(self)
            PrefixMap::Sigma {
                dom: d2.clone(),
                img: m1.concat(&m2.strip_prefix(d1)),
            }
        } else if m2.is_prefix_of(d1) {
            // only inputs mapping into the deeper cone survive
            PrefixMap::Sigma {
                dom: d2.concat(&d1.strip_prefix(m2)),
                img: m1.clone(),
            }
        } else {
            PrefixMap::Zero
        }
    }

    pub fn inverse(&self) -> PrefixMap {
        match self {
            PrefixMap::Zero => PrefixMap::Zero,
            PrefixMap::Sigma { dom, img } => PrefixMap::Sigma {
                dom: img.clone(),
                img: dom.clone(),
            },
        }
    }
}

impl From<PrefixMap> for TableMap {
    fn from(p: PrefixMap) -> TableMap {
        match p {
            PrefixMap::Zero => TableMap::zero(),
            PrefixMap::Sigma { dom, img } => {
                TableMap::new(vec![(dom, img)]).expect("single row is always valid")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("domain cones overlap: X_{0:?} and X_{1:?}")]
    DomOverlap(Word, Word),
    #[error("image cones overlap: X_{0:?} and X_{1:?}")]
    ImgOverlap(Word, Word),
}

/// A partial bijection of the Cantor set given by finitely many prefix rows.
/// The empty table is the zero element.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct TableMap {
    rows: Vec<(Word, Word)>,
}

impl TableMap {
    /// Builds a table from rows, checking pairwise incomparability on both
    /// sides, then sorting and reducing to canonical form.
    pub fn new(rows: Vec<(Word, Word)>) -> Result<Self, MapError> {
        for (i, (d1, m1)) in rows.iter().enumerate() {
            for (d2, m2) in rows.iter().skip(i + 1) {
                if !d1.incomparable(d2) {
                    return Err(MapError::DomOverlap(d1.clone(), d2.clone()));
                }
                if !m1.incomparable(m2) {
                    return Err(MapError::ImgOverlap(m1.clone(), m2.clone()));
                }
            }
        }
        let mut t = TableMap { rows };
        t.normalize();
        Ok(t)
    }

    pub fn zero() -> Self {
        TableMap { rows: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn identity() -> Self {
        TableMap {
            rows: vec![(Word::empty(), Word::empty())],
        }
    }

    pub fn sigma(dom: &str, img: &str) -> Self {
        TableMap::new(vec![(w(dom), w(img))]).expect("single row is always valid")
    }

    pub fn rows(&self) -> &[(Word, Word)] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn normalize(&mut self) {
        self.rows.sort();
        // Sibling merge: (γ0, μ0) and (γ1, μ1) collapse to (γ, μ).  After a
        // sort the two rows are adjacent, and each row has at most one merge
        // partner, so a scan-until-fixpoint is confluent.
        loop {
            let mut merged = false;
            let mut out: Vec<(Word, Word)> = Vec::with_capacity(self.rows.len());
            let mut i = 0;
            while i < self.rows.len() {
                if i + 1 < self.rows.len() {
                    let (d0, m0) = &self.rows[i];
                    let (d1, m1) = &self.rows[i + 1];
                    if d0.last() == Some(0)
                        && d1.last() == Some(1)
                        && d0.parent() == d1.parent()
                        && m0.last() == Some(0)
                        && m1.last() == Some(1)
                        && m0.parent() == m1.parent()
                    {
                        out.push((d0.parent().unwrap(), m0.parent().unwrap()));
                        merged = true;
                        i += 2;
                        continue;
                    }
                }
                out.push(self.rows[i].clone());
                i += 1;
            }
            self.rows = out;
            if !merged {
                break;
            }
        }
    }

    /// Composition on overlaps: `self ∘ other` (apply `other` first).  The
    /// result is defined on the inputs of `other` whose outputs land in the
    /// domain of `self`; an empty overlap yields the zero table.
    pub fn compose(&self, other: &TableMap) -> TableMap {
        let mut rows = Vec::new();
        for (d2, m2) in &other.rows {
            for (d1, m1) in &self.rows {
                if d1.is_prefix_of(m2) {
                    rows.push((d2.clone(), m1.concat(&m2.strip_prefix(d1))));
                } else if m2.is_prefix_of(d1) {
                    let tail = d1.strip_prefix(m2);
                    rows.push((d2.concat(&tail), m1.clone()));
                }
            }
        }
        // overlap rows inherit incomparability from the factors
        TableMap::new(rows).expect("composition preserves row incomparability")
    }

    pub fn inverse(&self) -> TableMap {
        let rows = self.rows.iter().map(|(d, m)| (m.clone(), d.clone())).collect();
        TableMap::new(rows).expect("inverse swaps the two valid sides")
    }

    /// Restriction to a set of domain cones, realized as `self ∘ id_D`.
    pub fn restrict(&self, cones: &[Cone]) -> TableMap {
        let id_rows = cones.iter().map(|c| (c.0.clone(), c.0.clone())).collect();
        let id_d = TableMap::new(id_rows).expect("restriction cones must be pairwise disjoint");
        self.compose(&id_d)
    }

    /// Disjoint union of finitely many tables.  Errors if two parts share
    /// domain points or image points.
    pub fn disjoint_union(parts: &[TableMap]) -> Result<TableMap, MapError> {
        let mut rows = Vec::new();
        for p in parts {
            rows.extend(p.rows.iter().cloned());
        }
        TableMap::new(rows)
    }

    /// Extensional equality.  Tables are canonical, so this is a row-set
    /// comparison.
    pub fn equal_extensional(&self, other: &TableMap) -> bool {
        self.rows == other.rows
    }

    pub fn domain_cones(&self) -> Vec<Cone> {
        self.rows.iter().map(|(d, _)| Cone(d.clone())).collect()
    }

    /// Image cones in increasing prefix order; for canonical elements this is
    /// the support.
    pub fn image_cones(&self) -> Vec<Cone> {
        let mut imgs: Vec<Cone> = self.rows.iter().map(|(_, m)| Cone(m.clone())).collect();
        imgs.sort();
        imgs
    }

    /// Applies the map to a finite word: the word must be long enough to
    /// select a unique row.  Returns None outside the domain or when the word
    /// is too short to decide.
    pub fn eval(&self, input: &Word) -> Option<Word> {
        for (d, m) in &self.rows {
            if d.is_prefix_of(input) {
                return Some(m.concat(&input.strip_prefix(d)));
            }
        }
        None
    }

    /// True if the domain cones partition the whole Cantor set.
    pub fn is_full_domain(&self) -> bool {
        words_partition_all(self.rows.iter().map(|(d, _)| d.clone()).collect())
    }

    /// True if the image cones partition the whole Cantor set (the map is
    /// onto); for canonical elements this is the full-support test.
    pub fn is_full_image(&self) -> bool {
        words_partition_all(self.rows.iter().map(|(_, m)| m.clone()).collect())
    }
}

impl fmt::Display for TableMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (d, m)) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d:?}→{m:?}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    rows: Vec<[String; 2]>,
}

impl Serialize for TableMap {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let repr = TableRepr {
            rows: self
                .rows
                .iter()
                .map(|(d, m)| [d.to_string(), m.to_string()])
                .collect(),
        };
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for TableMap {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = TableRepr::deserialize(de)?;
        let mut rows = Vec::with_capacity(repr.rows.len());
        for [d, m] in repr.rows {
            let d: Word = d.parse().map_err(D::Error::custom)?;
            let m: Word = m.parse().map_err(D::Error::custom)?;
            rows.push((d, m));
        }
        TableMap::new(rows).map_err(D::Error::custom)
    }
}

/// True if the given words are the leaves of a complete finite binary tree,
/// i.e. the cones they name partition the whole Cantor set.
pub fn words_partition_all(mut leaves: Vec<Word>) -> bool {
    leaves.sort();
    for (a, b) in leaves.iter().zip(leaves.iter().skip(1)) {
        if !a.incomparable(b) {
            return false;
        }
    }
    // repeatedly merge sibling leaves; a complete tree collapses to ε
    loop {
        if leaves.len() == 1 {
            return leaves[0].is_empty();
        }
        let before = leaves.len();
        let mut out: Vec<Word> = Vec::with_capacity(leaves.len());
        let mut i = 0;
        while i < leaves.len() {
            if i + 1 < leaves.len()
                && leaves[i].last() == Some(0)
                && leaves[i + 1].last() == Some(1)
                && leaves[i].parent() == leaves[i + 1].parent()
            {
                out.push(leaves[i].parent().unwrap());
                i += 2;
            } else {
                out.push(leaves[i].clone());
                i += 1;
            }
        }
        leaves = out;
        if leaves.len() == before {
            return false;
        }
    }
}

/// A finite union of cones in canonical form: the (unique) set of maximal
/// cones contained in the region, which is a disjoint decomposition.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ConeSet {
    cones: Vec<Cone>,
}

impl ConeSet {
    pub fn new(mut cones: Vec<Cone>) -> Self {
        // drop cones contained in others, then merge siblings to fixpoint
        cones.sort();
        cones.dedup();
        let mut kept: Vec<Cone> = Vec::new();
        for c in cones {
            if !kept.iter().any(|k| k.contains(&c)) {
                kept.push(c);
            }
        }
        let mut words: Vec<Word> = kept.into_iter().map(|c| c.0).collect();
        loop {
            words.sort();
            let mut merged = false;
            let mut out: Vec<Word> = Vec::with_capacity(words.len());
            let mut i = 0;
            while i < words.len() {
                if i + 1 < words.len()
                    && words[i].last() == Some(0)
                    && words[i + 1].last() == Some(1)
                    && words[i].parent() == words[i + 1].parent()
                {
                    out.push(words[i].parent().unwrap());
                    merged = true;
                    i += 2;
                } else {
                    out.push(words[i].clone());
                    i += 1;
                }
            }
            words = out;
            if !merged {
                break;
            }
        }
        ConeSet {
            cones: words.into_iter().map(Cone).collect(),
        }
    }

    pub fn empty() -> Self {
        ConeSet { cones: Vec::new() }
    }

    pub fn all() -> Self {
        ConeSet {
            cones: vec![Cone::all()],
        }
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn is_all(&self) -> bool {
        self.cones.len() == 1 && self.cones[0].0.is_empty()
    }

    pub fn disjoint(&self, other: &ConeSet) -> bool {
        self.cones
            .iter()
            .all(|a| other.cones.iter().all(|b| a.disjoint(b)))
    }

    pub fn subset_of(&self, other: &ConeSet) -> bool {
        // canonical cones are disjoint, so a cone of self must sit inside a
        // single cone of other
        self.cones
            .iter()
            .all(|a| other.cones.iter().any(|b| b.contains(a)))
    }

    pub fn union(&self, other: &ConeSet) -> ConeSet {
        let mut cones = self.cones.clone();
        cones.extend(other.cones.iter().cloned());
        ConeSet::new(cones)
    }

    pub fn union_all<'a>(sets: impl IntoIterator<Item = &'a ConeSet>) -> ConeSet {
        let mut cones = Vec::new();
        for s in sets {
            cones.extend(s.cones.iter().cloned());
        }
        ConeSet::new(cones)
    }

    /// Stable serialization used as a sort/dedup key for supports.
    pub fn key(&self) -> String {
        let parts: Vec<String> = self.cones.iter().map(|c| c.0.to_string()).collect();
        parts.join("|")
    }

    /// The maximal cones of the complement region, in word order.
    pub fn complement_cones(&self) -> Vec<Cone> {
        let mut out = Vec::new();
        self.complement_under(&Word::empty(), &mut out);
        out
    }

    fn complement_under(&self, prefix: &Word, out: &mut Vec<Cone>) {
        let cone = Cone(prefix.clone());
        if self.cones.iter().any(|c| c.contains(&cone)) {
            return;
        }
        if self.cones.iter().all(|c| c.disjoint(&cone)) {
            out.push(cone);
            return;
        }
        self.complement_under(&prefix.child(0), out);
        self.complement_under(&prefix.child(1), out);
    }
}

impl fmt::Display for ConeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cones.is_empty() {
            return write!(f, "∅");
        }
        for (i, c) in self.cones.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_order_and_prefixes() {
        assert!(w("0").is_prefix_of(&w("010")));
        assert!(!w("01").is_prefix_of(&w("0")));
        assert!(w("01").incomparable(&w("001")));
        assert_eq!(w("0110").strip_prefix(&w("01")), w("10"));
        assert_eq!(w("").to_string(), "");
    }

    #[test]
    fn table_rejects_overlapping_rows() {
        let err = TableMap::new(vec![(w("0"), w("0")), (w("01"), w("1"))]).unwrap_err();
        assert_eq!(err, MapError::DomOverlap(w("0"), w("01")));
        let err = TableMap::new(vec![(w("0"), w("1")), (w("1"), w("10"))]).unwrap_err();
        assert_eq!(err, MapError::ImgOverlap(w("1"), w("10")));
    }

    #[test]
    fn sibling_rows_merge_to_parent() {
        let t = TableMap::new(vec![(w("0"), w("00")), (w("1"), w("01"))]).unwrap();
        assert_eq!(t, TableMap::sigma("", "0"));
    }

    #[test]
    fn non_sibling_images_do_not_merge() {
        let t = TableMap::new(vec![(w("0"), w("10")), (w("1"), w("0"))]).unwrap();
        assert_eq!(t.rows().len(), 2);
    }

    #[test]
    fn zero_absorbs_composition() {
        let s = PrefixMap::sigma(w(""), w("1"));
        assert!(PrefixMap::Zero.compose(&s).is_zero());
        assert!(s.compose(&PrefixMap::Zero).is_zero());
    }

    #[test]
    fn cone_set_canonical_form_merges_and_dedups() {
        let s = ConeSet::new(vec![Cone(w("00")), Cone(w("01")), Cone(w("1"))]);
        assert!(s.is_all());
        let s = ConeSet::new(vec![Cone(w("0")), Cone(w("01"))]);
        assert_eq!(s.cones(), &[Cone(w("0"))]);
        let s = ConeSet::new(vec![Cone(w("00")), Cone(w("100")), Cone(w("101"))]);
        assert_eq!(s.key(), "00|10");
    }

    #[test]
    fn full_domain_detection() {
        assert!(TableMap::identity().is_full_domain());
        let g = TableMap::new(vec![(w("0"), w("101")), (w("10"), w("00")), (w("11"), w("100"))])
            .unwrap();
        assert!(g.is_full_domain());
        assert!(!g.is_full_image());
        assert!(!TableMap::sigma("0", "0").is_full_domain());
    }
}
