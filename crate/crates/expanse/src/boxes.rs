//! Dyadic boxes in a finite power of the Cantor set and box-wise
//! prefix-substitution maps.
//!
//! An [`NBox`] is a product of cones, one per coordinate; a [`BoxMap`] row
//! `(d, m)` replaces the prefix `d_i` by `m_i` on every axis at once.  Unlike
//! the one-dimensional case, sibling-block merging of box rows is *not*
//! confluent, so [`BoxMap`] keeps a deterministic policy-reduced presentation
//! and all equality is extensional (via common refinements).  Regions are
//! canonicalized by [`BoxSet`] using a depth-cycled binary-space partition,
//! which is unique for the underlying point set.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::cantor::Word;

/// A product of cones `X_{w_1} × … × X_{w_n}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NBox {
    words: Vec<Word>,
}

impl NBox {
    pub fn new(words: Vec<Word>) -> Self {
        assert!(!words.is_empty(), "dimension must be at least 1");
        NBox { words }
    }

    pub fn root(n: usize) -> Self {
        NBox::new(vec![Word::empty(); n])
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word(&self, axis: usize) -> &Word {
        &self.words[axis]
    }

    /// Boxes are disjoint iff they are incomparable on some axis.
    pub fn disjoint(&self, other: &NBox) -> bool {
        assert_eq!(self.dim(), other.dim());
        self.words
            .iter()
            .zip(&other.words)
            .any(|(a, b)| a.incomparable(b))
    }

    /// Containment as sets: prefix on every axis.
    pub fn contains(&self, other: &NBox) -> bool {
        assert_eq!(self.dim(), other.dim());
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a.is_prefix_of(b))
    }

    /// Intersection (the axiswise deeper prefix), or None when disjoint.
    pub fn intersect(&self, other: &NBox) -> Option<NBox> {
        let mut words = Vec::with_capacity(self.dim());
        for (a, b) in self.words.iter().zip(&other.words) {
            if a.is_prefix_of(b) {
                words.push(b.clone());
            } else if b.is_prefix_of(a) {
                words.push(a.clone());
            } else {
                return None;
            }
        }
        Some(NBox::new(words))
    }

    pub fn child(&self, axis: usize, bit: u8) -> NBox {
        let mut words = self.words.clone();
        words[axis] = words[axis].child(bit);
        NBox::new(words)
    }

    pub fn total_depth(&self) -> usize {
        self.words.iter().map(|w| w.len()).sum()
    }

    /// `self` written relative to a containing box: the per-axis tails.
    fn tails_in(&self, outer: &NBox) -> Vec<Word> {
        self.words
            .iter()
            .zip(&outer.words)
            .map(|(w, o)| w.strip_prefix(o))
            .collect()
    }

    fn append_tails(&self, tails: &[Word]) -> NBox {
        NBox::new(
            self.words
                .iter()
                .zip(tails)
                .map(|(w, t)| w.concat(t))
                .collect(),
        )
    }
}

impl fmt::Display for NBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.words.iter().enumerate() {
            if i > 0 {
                write!(f, "×")?;
            }
            write!(f, "X_{w:?}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoxError {
    #[error("domain boxes overlap: {0} and {1}")]
    DomOverlap(NBox, NBox),
    #[error("image boxes overlap: {0} and {1}")]
    ImgOverlap(NBox, NBox),
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
}

/// A partial bijection of `Xⁿ` given by finitely many box rows.  Rows are kept
/// sorted by domain box and policy-reduced; use [`BoxMap::equal_extensional`]
/// for equality, never row comparison.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BoxMap {
    n: usize,
    rows: Vec<(NBox, NBox)>,
}

impl BoxMap {
    pub fn new(n: usize, rows: Vec<(NBox, NBox)>) -> Result<Self, BoxError> {
        for (d, m) in &rows {
            if d.dim() != n {
                return Err(BoxError::Dimension(n, d.dim()));
            }
            if m.dim() != n {
                return Err(BoxError::Dimension(n, m.dim()));
            }
        }
        for (i, (d1, m1)) in rows.iter().enumerate() {
            for (d2, m2) in rows.iter().skip(i + 1) {
                if !d1.disjoint(d2) {
                    return Err(BoxError::DomOverlap(d1.clone(), d2.clone()));
                }
                if !m1.disjoint(m2) {
                    return Err(BoxError::ImgOverlap(m1.clone(), m2.clone()));
                }
            }
        }
        let mut map = BoxMap { n, rows };
        map.policy_reduce();
        Ok(map)
    }

    pub fn zero(n: usize) -> Self {
        BoxMap { n, rows: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        BoxMap {
            n,
            rows: vec![(NBox::root(n), NBox::root(n))],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[(NBox, NBox)] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Deterministic sibling-block merging.  Box-row merging is not
    /// confluent in general, so this fixes one order — sort rows, then
    /// repeatedly apply the first merge found scanning axes in index order —
    /// purely to stabilize the presentation.  Semantics never depend on it.
    fn policy_reduce(&mut self) {
        self.rows.sort();
        'outer: loop {
            for axis in 0..self.n {
                for i in 0..self.rows.len() {
                    for j in 0..self.rows.len() {
                        if i == j {
                            continue;
                        }
                        let (di, mi) = &self.rows[i];
                        let (dj, mj) = &self.rows[j];
                        if Self::merge_along(axis, di, dj).is_some()
                            && Self::merge_along(axis, mi, mj).is_some()
                        {
                            let d = Self::merge_along(axis, di, dj).unwrap();
                            let m = Self::merge_along(axis, mi, mj).unwrap();
                            let (lo, hi) = (i.min(j), i.max(j));
                            self.rows.remove(hi);
                            self.rows.remove(lo);
                            self.rows.push((d, m));
                            self.rows.sort();
                            continue 'outer;
                        }
                    }
                }
            }
            break;
        }
    }

    /// The merged parent if `a` and `b` are the 0/1 siblings along `axis`
    /// (equal on every other axis).
    fn merge_along(axis: usize, a: &NBox, b: &NBox) -> Option<NBox> {
        for (k, (wa, wb)) in a.words.iter().zip(&b.words).enumerate() {
            if k == axis {
                if wa.last() != Some(0) || wb.last() != Some(1) || wa.parent() != wb.parent() {
                    return None;
                }
            } else if wa != wb {
                return None;
            }
        }
        let mut words = a.words.clone();
        words[axis] = words[axis].parent().unwrap();
        Some(NBox::new(words))
    }

    /// `self ∘ other` on overlaps (apply `other` first).
    pub fn compose(&self, other: &BoxMap) -> BoxMap {
        assert_eq!(self.n, other.n);
        let mut rows = Vec::new();
        for (d2, m2) in &other.rows {
            for (d1, m1) in &self.rows {
                let Some(overlap) = m2.intersect(d1) else {
                    continue;
                };
                // pull the overlap back through `other`, push forward
                // through `self`
                let dom = d2.append_tails(&overlap.tails_in(m2));
                let img = m1.append_tails(&overlap.tails_in(d1));
                rows.push((dom, img));
            }
        }
        BoxMap::new(self.n, rows).expect("composition preserves row disjointness")
    }

    pub fn inverse(&self) -> BoxMap {
        let rows = self.rows.iter().map(|(d, m)| (m.clone(), d.clone())).collect();
        BoxMap::new(self.n, rows).expect("inverse swaps the two valid sides")
    }

    /// Restriction to a set of domain boxes, realized as `self ∘ id_D`.
    pub fn restrict(&self, boxes: &[NBox]) -> BoxMap {
        let id_rows = boxes.iter().map(|b| (b.clone(), b.clone())).collect();
        let id_d =
            BoxMap::new(self.n, id_rows).expect("restriction boxes must be pairwise disjoint");
        self.compose(&id_d)
    }

    /// Disjoint union; errors if parts share domain or image points.
    pub fn disjoint_union(parts: &[BoxMap]) -> Result<BoxMap, BoxError> {
        assert!(!parts.is_empty());
        let n = parts[0].n;
        let mut rows = Vec::new();
        for p in parts {
            if p.n != n {
                return Err(BoxError::Dimension(n, p.n));
            }
            rows.extend(p.rows.iter().cloned());
        }
        BoxMap::new(n, rows)
    }

    /// Applies the map to a tuple of finite words, each long enough to select
    /// a unique row.  None outside the domain or when undecidable at this
    /// depth.
    pub fn eval(&self, input: &[Word]) -> Option<Vec<Word>> {
        assert_eq!(input.len(), self.n);
        for (d, m) in &self.rows {
            if d.words.iter().zip(input).all(|(p, w)| p.is_prefix_of(w)) {
                return Some(
                    m.words
                        .iter()
                        .zip(d.words.iter().zip(input))
                        .map(|(mi, (di, w))| mi.concat(&w.strip_prefix(di)))
                        .collect(),
                );
            }
        }
        None
    }

    /// Extensional equality: equal domain regions and equal values on every
    /// overlap of rows.
    pub fn equal_extensional(&self, other: &BoxMap) -> bool {
        if self.n != other.n {
            return false;
        }
        if self.domain_region() != other.domain_region() {
            return false;
        }
        for (d1, m1) in &self.rows {
            for (d2, m2) in &other.rows {
                let Some(overlap) = d1.intersect(d2) else {
                    continue;
                };
                let img1 = m1.append_tails(&overlap.tails_in(d1));
                let img2 = m2.append_tails(&overlap.tails_in(d2));
                if img1 != img2 {
                    return false;
                }
            }
        }
        true
    }

    pub fn domain_boxes(&self) -> Vec<NBox> {
        self.rows.iter().map(|(d, _)| d.clone()).collect()
    }

    pub fn image_boxes(&self) -> Vec<NBox> {
        let mut imgs: Vec<NBox> = self.rows.iter().map(|(_, m)| m.clone()).collect();
        imgs.sort();
        imgs
    }

    pub fn domain_region(&self) -> BoxSet {
        BoxSet::new(self.n, self.domain_boxes())
    }

    pub fn image_region(&self) -> BoxSet {
        BoxSet::new(self.n, self.image_boxes())
    }

    /// True if the domain boxes partition all of `Xⁿ`.  Rows are pairwise
    /// disjoint by the type invariant, so this is a covering test.
    pub fn is_full_domain(&self) -> bool {
        self.domain_region().is_all()
    }

    pub fn is_full_image(&self) -> bool {
        self.image_region().is_all()
    }
}

impl fmt::Display for BoxMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (d, m)) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}→{m}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct BoxMapRepr {
    rows: Vec<[Vec<String>; 2]>,
}

impl Serialize for BoxMap {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let repr = BoxMapRepr {
            rows: self
                .rows
                .iter()
                .map(|(d, m)| {
                    [
                        d.words.iter().map(|w| w.to_string()).collect(),
                        m.words.iter().map(|w| w.to_string()).collect(),
                    ]
                })
                .collect(),
        };
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BoxMap {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = BoxMapRepr::deserialize(de)?;
        let mut rows = Vec::with_capacity(repr.rows.len());
        let mut n = None;
        for [d, m] in repr.rows {
            let dom = parse_box(&d).map_err(D::Error::custom)?;
            let img = parse_box(&m).map_err(D::Error::custom)?;
            match n {
                None => n = Some(dom.dim()),
                Some(k) if k == dom.dim() => {}
                Some(k) => return Err(D::Error::custom(BoxError::Dimension(k, dom.dim()))),
            }
            rows.push((dom, img));
        }
        let n = n.ok_or_else(|| D::Error::custom("cannot infer dimension from an empty row set"))?;
        BoxMap::new(n, rows).map_err(D::Error::custom)
    }
}

fn parse_box(words: &[String]) -> Result<NBox, String> {
    if words.is_empty() {
        return Err("a box needs at least one axis word".to_string());
    }
    let mut out = Vec::with_capacity(words.len());
    for s in words {
        out.push(s.parse::<Word>().map_err(|e| e.to_string())?);
    }
    Ok(NBox::new(out))
}

/// A finite union of boxes in canonical form: the cells of the binary-space
/// partition that splits axis `depth mod n` at each level.  The cell list is
/// determined by the underlying point set, so region equality is cell-list
/// equality.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BoxSet {
    n: usize,
    cells: Vec<NBox>,
}

impl BoxSet {
    pub fn new(n: usize, boxes: Vec<NBox>) -> Self {
        for b in &boxes {
            assert_eq!(b.dim(), n, "box dimension mismatch");
        }
        let mut cells = Vec::new();
        if !boxes.is_empty() {
            decompose(&NBox::root(n), 0, &boxes, &mut cells);
        }
        BoxSet { n, cells }
    }

    pub fn empty(n: usize) -> Self {
        BoxSet { n, cells: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &[NBox] {
        &self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn is_all(&self) -> bool {
        self.cells.len() == 1 && self.cells[0] == NBox::root(self.n)
    }

    pub fn disjoint(&self, other: &BoxSet) -> bool {
        self.cells
            .iter()
            .all(|a| other.cells.iter().all(|b| a.disjoint(b)))
    }

    pub fn subset_of(&self, other: &BoxSet) -> bool {
        self.cells.iter().all(|c| covered(c, &other.cells))
    }

    pub fn union(&self, other: &BoxSet) -> BoxSet {
        let mut boxes = self.cells.clone();
        boxes.extend(other.cells.iter().cloned());
        BoxSet::new(self.n, boxes)
    }

    pub fn union_all<'a>(n: usize, sets: impl IntoIterator<Item = &'a BoxSet>) -> BoxSet {
        let mut boxes = Vec::new();
        for s in sets {
            boxes.extend(s.cells.iter().cloned());
        }
        BoxSet::new(n, boxes)
    }

    /// Stable serialization used as a sort/dedup key for supports.
    pub fn key(&self) -> String {
        let parts: Vec<String> = self
            .cells
            .iter()
            .map(|c| {
                c.words
                    .iter()
                    .map(|w| w.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        parts.join("|")
    }
}

impl fmt::Display for BoxSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cells.is_empty() {
            return write!(f, "∅");
        }
        for (i, c) in self.cells.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// The complement of a disjoint box family inside the unit box, as a list of
/// disjoint cells: any region neither covered by nor disjoint from the family
/// is split along an axis where some family box cuts deeper.
pub fn complement(n: usize, boxes: &[NBox]) -> Vec<NBox> {
    let mut out = Vec::new();
    fill_complement(&NBox::root(n), boxes, &mut out);
    out
}

fn fill_complement(region: &NBox, boxes: &[NBox], out: &mut Vec<NBox>) {
    let live: Vec<&NBox> = boxes.iter().filter(|b| !b.disjoint(region)).collect();
    if live.is_empty() {
        out.push(region.clone());
        return;
    }
    if covered(region, boxes) {
        return;
    }
    let axis = (0..region.dim())
        .find(|&a| live.iter().any(|b| b.word(a).len() > region.word(a).len()))
        .expect("a partially covered region admits a refining axis");
    fill_complement(&region.child(axis, 0), boxes, out);
    fill_complement(&region.child(axis, 1), boxes, out);
}

/// True if `target` is covered by the union of `boxes` (exact, via
/// sequential box subtraction).
pub fn covered(target: &NBox, boxes: &[NBox]) -> bool {
    let mut remainder = vec![target.clone()];
    for b in boxes {
        let mut next = Vec::new();
        for r in remainder {
            subtract(&r, b, &mut next);
        }
        remainder = next;
        if remainder.is_empty() {
            return true;
        }
    }
    remainder.is_empty()
}

/// Appends the pieces of `a \ b` to `out` as disjoint boxes.
fn subtract(a: &NBox, b: &NBox, out: &mut Vec<NBox>) {
    if a.disjoint(b) {
        out.push(a.clone());
        return;
    }
    if b.contains(a) {
        return;
    }
    // a strictly shallower than b on some axis: split there and recurse
    for axis in 0..a.dim() {
        if a.word(axis).is_prefix_of(b.word(axis)) && a.word(axis) != b.word(axis) {
            let bit = b.word(axis).bits()[a.word(axis).len()];
            subtract(&a.child(axis, bit), b, out);
            out.push(a.child(axis, 1 - bit));
            return;
        }
    }
    unreachable!("overlapping, not contained, but nowhere shallower");
}

fn decompose(cell: &NBox, depth: usize, boxes: &[NBox], out: &mut Vec<NBox>) {
    if covered(cell, boxes) {
        out.push(cell.clone());
        return;
    }
    if boxes.iter().all(|b| cell.disjoint(b)) {
        return;
    }
    let axis = depth % cell.dim();
    decompose(&cell.child(axis, 0), depth + 1, boxes, out);
    decompose(&cell.child(axis, 1), depth + 1, boxes, out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::w;

    fn bx(words: &[&str]) -> NBox {
        NBox::new(words.iter().map(|s| w(s)).collect())
    }

    #[test]
    fn box_disjointness_needs_one_incomparable_axis() {
        assert!(bx(&["0", ""]).disjoint(&bx(&["1", "0"])));
        assert!(!bx(&["0", ""]).disjoint(&bx(&["01", "1"])));
    }

    #[test]
    fn quarters_of_identity_reduce_to_identity() {
        let rows = vec![
            (bx(&["0", "0"]), bx(&["0", "0"])),
            (bx(&["0", "1"]), bx(&["0", "1"])),
            (bx(&["1", "0"]), bx(&["1", "0"])),
            (bx(&["1", "1"]), bx(&["1", "1"])),
        ];
        let m = BoxMap::new(2, rows).unwrap();
        assert_eq!(m, BoxMap::identity(2));
    }

    #[test]
    fn policy_reduce_only_merges_matching_axes() {
        // domain splits along axis 0, images along axis 1: no merge
        let rows = vec![
            (bx(&["0", ""]), bx(&["", "0"])),
            (bx(&["1", ""]), bx(&["", "1"])),
        ];
        let m = BoxMap::new(2, rows).unwrap();
        assert_eq!(m.rows().len(), 2);
    }

    #[test]
    fn compose_threads_tails_through_both_axes() {
        // f: X_0×X ↦ X_01×X_0 on one row
        let f = BoxMap::new(2, vec![(bx(&["0", ""]), bx(&["01", "0"]))]).unwrap();
        let g = f.inverse();
        let id_on_img = f.compose(&g);
        assert!(id_on_img.equal_extensional(
            &BoxMap::new(2, vec![(bx(&["01", "0"]), bx(&["01", "0"]))]).unwrap()
        ));
    }

    #[test]
    fn extensional_equality_sees_through_presentations() {
        let a = BoxMap::identity(2);
        let b = BoxMap::new(
            2,
            vec![
                (bx(&["0", ""]), bx(&["0", ""])),
                (bx(&["1", "0"]), bx(&["1", "0"])),
                (bx(&["1", "1"]), bx(&["1", "1"])),
            ],
        )
        .unwrap();
        assert!(a.equal_extensional(&b));
        let c = BoxMap::new(
            2,
            vec![
                (bx(&["0", ""]), bx(&["1", ""])),
                (bx(&["1", ""]), bx(&["0", ""])),
            ],
        )
        .unwrap();
        assert!(!a.equal_extensional(&c));
    }

    #[test]
    fn box_set_canonical_cells() {
        // bottom half of the square, presented as two quarters
        let s = BoxSet::new(2, vec![bx(&["0", "0"]), bx(&["1", "0"])]);
        let t = BoxSet::new(2, vec![bx(&["", "0"])]);
        assert_eq!(s, t);
        assert!(!s.is_all());
        let full = BoxSet::new(2, vec![bx(&["", "0"]), bx(&["1", "1"]), bx(&["0", "1"])]);
        assert!(full.is_all());
    }

    #[test]
    fn covered_is_exact() {
        // L-shape does not cover the square
        assert!(!covered(
            &NBox::root(2),
            &[bx(&["0", "0"]), bx(&["0", "1"]), bx(&["1", "0"])],
        ));
        assert!(covered(
            &bx(&["0", "0"]),
            &[bx(&["", "00"]), bx(&["00", ""]), bx(&["010", ""]), bx(&["011", ""])],
        ));
    }
}
