//! The Nekrashevych–Röver group as an expansion set: elements are prefix
//! tables whose rows carry Grigorchuk-group decorations — the row
//! (γ, μ, g) is the partial map σ_ε^μ g σ_γ^ε — and two tables present the
//! same element when they differ by precomposition with a member of the
//! Klein subgroup K = {1, b, c, d}.
//!
//! ℰ(b) is the four-node square: untwisted halves on one side, the
//! a-twisted right half on the other, and the three-fold subdivision on
//! top.  The twisting is undone by one further left-right subdivision,
//! which is what makes the twisted side sit below the top vertex.
//!
//! Tables are stored exactly as constructed.  Picking a privileged
//! K-translate as the stored form would break re-expansion checks: the
//! sections of b and c contain a ∉ K, so restrictions of a translated
//! table land in different K-classes than the untranslated ones.  All
//! element comparisons therefore go through [`RoverInstance::equal`],
//! which quantifies over the four translates.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cantor::{Cone, ConeSet, Word};
use crate::core::{
    vertex_equal, CoreError, ExpansionInstance, ExpansionPoset, Kind, Stabilizer, Support, Vertex,
};
use crate::grig::{gw, k_mul, GrigWord, KElement};

/// A decorated prefix table: finitely many rows (γ, μ, g), pairwise
/// incomparable on domains and on images, each acting as σ_ε^μ g σ_γ^ε.
/// Decorations are kept in canonical form, so syntactic row equality is
/// sound; table equality as a map still needs [`RoverTable::equal_extensional`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RoverTable {
    rows: Vec<(Word, Word, GrigWord)>,
}

impl RoverTable {
    pub fn new(rows: Vec<(Word, Word, GrigWord)>) -> Result<Self, String> {
        for (i, (d1, m1, _)) in rows.iter().enumerate() {
            for (d2, m2, _) in rows.iter().skip(i + 1) {
                if !d1.incomparable(d2) {
                    return Err(format!("domain prefixes {d1:?} and {d2:?} overlap"));
                }
                if !m1.incomparable(m2) {
                    return Err(format!("image prefixes {m1:?} and {m2:?} overlap"));
                }
            }
        }
        let mut rows: Vec<(Word, Word, GrigWord)> = rows
            .into_iter()
            .map(|(d, m, g)| (d, m, g.canonical_form()))
            .collect();
        rows.sort();
        Ok(RoverTable { rows })
    }

    pub fn identity() -> Self {
        RoverTable {
            rows: vec![(Word::empty(), Word::empty(), GrigWord::identity())],
        }
    }

    /// The full map given by a single Grigorchuk word at the root.
    pub fn from_grig(g: GrigWord) -> Self {
        RoverTable {
            rows: vec![(Word::empty(), Word::empty(), g.canonical_form())],
        }
    }

    pub fn rows(&self) -> &[(Word, Word, GrigWord)] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn domain_cones(&self) -> Vec<Cone> {
        self.rows.iter().map(|(d, _, _)| Cone(d.clone())).collect()
    }

    pub fn image_cones(&self) -> Vec<Cone> {
        self.rows.iter().map(|(_, m, _)| Cone(m.clone())).collect()
    }

    pub fn is_full_domain(&self) -> bool {
        ConeSet::new(self.domain_cones()).is_all()
    }

    pub fn is_full_image(&self) -> bool {
        ConeSet::new(self.image_cones()).is_all()
    }

    /// The restriction of the map to the part of its domain inside the given
    /// cones; the cones need not be aligned with the rows.
    pub fn restrict(&self, cones: &[Cone]) -> RoverTable {
        let mut rows = Vec::new();
        for c in cones {
            for (d, m, g) in self.cone_section(&c.0).rows() {
                rows.push((c.0.concat(d), m.clone(), g.clone()));
            }
        }
        RoverTable::new(rows).expect("restriction rows inherit disjointness")
    }

    /// Applies the table to a finite word long enough to select a row.
    pub fn eval(&self, u: &Word) -> Option<Word> {
        for (d, m, g) in &self.rows {
            if d.is_prefix_of(u) {
                return Some(m.concat(&g.act(&u.strip_prefix(d))));
            }
        }
        None
    }

    /// The restriction to `X_w`, re-rooted to a full tree: the table of
    /// the composite `self ∘ σ_ε^w`.  Rows over `X_w` are kept with the
    /// prefix stripped; a row whose domain cone properly contains `X_w`
    /// contributes its wreath section along the rest of the path.
    pub fn cone_section(&self, w: &Word) -> RoverTable {
        let mut rows = Vec::new();
        for (d, m, g) in &self.rows {
            if w.is_prefix_of(d) {
                rows.push((d.strip_prefix(w), m.clone(), g.clone()));
            } else if d.is_prefix_of(w) {
                let delta = w.strip_prefix(d);
                rows.push((Word::empty(), m.concat(&g.act(&delta)), section_at(g, &delta)));
            }
        }
        RoverTable::new(rows).expect("sections of disjoint rows stay disjoint")
    }

    /// `self ∘ other` on overlaps (apply `other` first).  Decorations are
    /// threaded through the wreath recursion at the overlap granularity,
    /// so no refinement loop is needed.
    pub fn compose(&self, other: &RoverTable) -> RoverTable {
        let mut rows = Vec::new();
        for (d2, m2, g2) in &other.rows {
            for (d1, m1, g1) in &self.rows {
                if d1.is_prefix_of(m2) {
                    let delta = m2.strip_prefix(d1);
                    rows.push((
                        d2.clone(),
                        m1.concat(&g1.act(&delta)),
                        section_at(g1, &delta).mul(g2),
                    ));
                } else if m2.is_prefix_of(d1) {
                    let delta = d1.strip_prefix(m2);
                    let pulled = g2.inverse().act(&delta);
                    rows.push((
                        d2.concat(&pulled),
                        m1.clone(),
                        g1.mul(&section_at(g2, &pulled)),
                    ));
                }
            }
        }
        RoverTable::new(rows).expect("composites of disjoint rows stay disjoint")
    }

    pub fn inverse(&self) -> RoverTable {
        let rows = self
            .rows
            .iter()
            .map(|(d, m, g)| (m.clone(), d.clone(), g.inverse()))
            .collect();
        RoverTable::new(rows).expect("inverse swaps the two valid sides")
    }

    /// Extensional equality: equal domain regions and equal values on the
    /// common refinement of the two row partitions.
    pub fn equal_extensional(&self, other: &RoverTable) -> bool {
        if ConeSet::new(self.domain_cones()) != ConeSet::new(other.domain_cones()) {
            return false;
        }
        for (d1, m1, g1) in &self.rows {
            for (d2, m2, g2) in &other.rows {
                let common = if d1.is_prefix_of(d2) {
                    d2
                } else if d2.is_prefix_of(d1) {
                    d1
                } else {
                    continue;
                };
                let (da, db) = (common.strip_prefix(d1), common.strip_prefix(d2));
                if m1.concat(&g1.act(&da)) != m2.concat(&g2.act(&db)) {
                    return false;
                }
                if !section_at(g1, &da).equal(&section_at(g2, &db)) {
                    return false;
                }
            }
        }
        true
    }
}

/// The iterated wreath section g|_path, canonicalized.
fn section_at(g: &GrigWord, path: &Word) -> GrigWord {
    let mut cur = g.clone();
    for &t in path.bits() {
        cur = cur.section(t);
    }
    cur.canonical_form()
}

impl fmt::Display for RoverTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (d, m, g)) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d:?}→{m:?}|{g}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct RoverRowRepr {
    dom: String,
    img: String,
    decoration: String,
}

#[derive(Serialize, Deserialize)]
struct RoverTableRepr {
    rows: Vec<RoverRowRepr>,
}

impl Serialize for RoverTable {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let repr = RoverTableRepr {
            rows: self
                .rows
                .iter()
                .map(|(d, m, g)| RoverRowRepr {
                    dom: d.to_string(),
                    img: m.to_string(),
                    decoration: g.to_string(),
                })
                .collect(),
        };
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for RoverTable {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = RoverTableRepr::deserialize(de)?;
        let mut rows = Vec::with_capacity(repr.rows.len());
        for r in repr.rows {
            let d: Word = r.dom.parse().map_err(D::Error::custom)?;
            let m: Word = r.img.parse().map_err(D::Error::custom)?;
            let g: GrigWord = r.decoration.parse().map_err(D::Error::custom)?;
            rows.push((d, m, g));
        }
        RoverTable::new(rows).map_err(D::Error::custom)
    }
}

/// A canonical element [f, X]: a decorated table with full domain, stored
/// as constructed.  Equality is modulo precomposition with K.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "RoverTable", into = "RoverTable")]
pub struct RoverElement {
    table: RoverTable,
}

impl TryFrom<RoverTable> for RoverElement {
    type Error = String;

    fn try_from(table: RoverTable) -> Result<Self, String> {
        RoverElement::new(table)
    }
}

impl From<RoverElement> for RoverTable {
    fn from(e: RoverElement) -> RoverTable {
        e.table
    }
}

impl RoverElement {
    pub fn new(table: RoverTable) -> Result<Self, String> {
        if table.is_zero() {
            return Err("an element needs a nonempty table".into());
        }
        if !table.is_full_domain() {
            return Err("element domains must partition X".into());
        }
        Ok(RoverElement { table })
    }

    pub fn table(&self) -> &RoverTable {
        &self.table
    }

    /// The identity element [id, X].
    pub fn top() -> Self {
        RoverElement {
            table: RoverTable::identity(),
        }
    }

    /// The re-rooted restriction to `X_w`.
    pub fn restrict(&self, w: &Word) -> RoverElement {
        RoverElement::new(self.table.cone_section(w)).expect("restrictions keep full domain")
    }

    /// Precomposition with the generator a at the root: the twisted
    /// variant appearing in the right-hand vertex of the expansion square.
    pub fn twist(&self) -> RoverElement {
        let a = RoverTable::from_grig(gw("a"));
        RoverElement::new(self.table.compose(&a)).expect("twisting keeps full domain")
    }

    /// Precomposition with k ∈ K at the root; yields an equal element.
    pub fn translate(&self, k: KElement) -> RoverElement {
        let kt = RoverTable::from_grig(k.word());
        RoverElement::new(self.table.compose(&kt)).expect("translation keeps full domain")
    }

    /// Glues two elements into the candidate whose untwisted subdivision
    /// yields them in this order: prefix the first's domains with 0, the
    /// second's with 1.  None when the images overlap.
    pub fn glue(first: &RoverElement, second: &RoverElement) -> Option<RoverElement> {
        let mut rows = Vec::new();
        for (d, m, g) in first.table.rows() {
            rows.push((Word::from_bits(&[0]).concat(d), m.clone(), g.clone()));
        }
        for (d, m, g) in second.table.rows() {
            rows.push((Word::from_bits(&[1]).concat(d), m.clone(), g.clone()));
        }
        let table = RoverTable::new(rows).ok()?;
        RoverElement::new(table).ok()
    }
}

impl fmt::Display for RoverElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.table)
    }
}

/// The Röver instance with constants C0 = 3 and C1 = 2.
#[derive(Clone, Copy, Debug, Default)]
pub struct RoverInstance;

impl ExpansionInstance for RoverInstance {
    type Elem = RoverElement;
    type Map = RoverTable;

    fn id(&self) -> String {
        "rover".into()
    }

    fn kind(&self) -> Kind {
        Kind::Permutational
    }

    fn c0(&self) -> usize {
        3
    }

    fn c1(&self) -> usize {
        2
    }

    /// The undecorated single-row class onto one cone: the fully expanded
    /// form every element decays into.  Decorations vanish because sections
    /// of tree automorphisms eventually land in the nucleus, whose twisting
    /// part is absorbed by one more split.
    fn pattern_element(&self, piece: &Support) -> Option<RoverElement> {
        let Support::Cones(cs) = piece else {
            return None;
        };
        if cs.cones().len() != 1 {
            return None;
        }
        let beta = cs.cones()[0].0.clone();
        let table = RoverTable::new(vec![(Word::empty(), beta, gw(""))]).ok()?;
        RoverElement::new(table).ok()
    }

    fn support(&self, b: &RoverElement) -> Support {
        Support::Cones(ConeSet::new(b.table.image_cones()))
    }

    fn expansions(&self, b: &RoverElement) -> Result<ExpansionPoset<RoverElement>, CoreError> {
        let half0 = b.restrict(&Word::from_bits(&[0]));
        let half1 = b.restrict(&Word::from_bits(&[1]));
        let bottom = Vertex::singleton(self, b.clone());
        let left = Vertex::new(self, vec![half0.clone(), half1.clone()])
            .expect("halves have disjoint supports");
        let right = Vertex::new(self, vec![half0.clone(), half1.twist()])
            .expect("twisting preserves the support");
        let top = Vertex::new(
            self,
            vec![
                half0,
                b.restrict(&Word::from_bits(&[1, 0])),
                b.restrict(&Word::from_bits(&[1, 1])),
            ],
        )
        .expect("the three-fold pieces have disjoint supports");
        Ok(ExpansionPoset::new(
            vec![bottom, left, right, top],
            vec![
                vec![true, true, true, true],
                vec![false, true, false, true],
                vec![false, false, true, true],
                vec![false, false, false, true],
            ],
        ))
    }

    fn contractions(&self, parts: &Vertex<RoverElement>) -> Vec<RoverElement> {
        let mut out: Vec<RoverElement> = Vec::new();
        let mut push = |cand: RoverElement, node: usize, inst: &Self| {
            let poset = inst.expansions(&cand).expect("the square is finite");
            if vertex_equal(inst, poset.node(node), parts)
                && !out.iter().any(|e| inst.equal(e, &cand))
            {
                out.push(cand);
            }
        };
        match parts.height() {
            2 => {
                let (x, y) = (&parts.elems()[0], &parts.elems()[1]);
                for (a, b) in [(x, y), (y, x)] {
                    // untwisted halves, then the a-twisted right half
                    if let Some(cand) = RoverElement::glue(a, b) {
                        push(cand, 1, self);
                    }
                    if let Some(cand) = RoverElement::glue(a, &b.twist()) {
                        push(cand, 2, self);
                    }
                }
            }
            3 => {
                let e = parts.elems();
                for (i, j, k) in [
                    (0, 1, 2),
                    (0, 2, 1),
                    (1, 0, 2),
                    (1, 2, 0),
                    (2, 0, 1),
                    (2, 1, 0),
                ] {
                    let Some(inner) = RoverElement::glue(&e[j], &e[k]) else {
                        continue;
                    };
                    if let Some(cand) = RoverElement::glue(&e[i], &inner) {
                        push(cand, 3, self);
                    }
                }
            }
            _ => {}
        }
        out
    }

    fn equal(&self, a: &RoverElement, b: &RoverElement) -> bool {
        if a.table == b.table {
            return true;
        }
        KElement::ALL
            .into_iter()
            .any(|k| a.table.equal_extensional(&b.translate(k).table))
    }

    fn elem_label(&self, b: &RoverElement) -> String {
        b.table.to_string()
    }

    fn elem_json(&self, b: &RoverElement) -> serde_json::Value {
        serde_json::to_value(b).expect("decorated tables serialize")
    }

    fn elem_from_json(&self, v: &serde_json::Value) -> Result<RoverElement, String> {
        serde_json::from_value(v.clone()).map_err(|e| e.to_string())
    }

    fn act(&self, s: &RoverTable, b: &RoverElement) -> Option<RoverElement> {
        let supp = ConeSet::new(b.table.image_cones());
        let dom = ConeSet::new(s.domain_cones());
        if !supp.subset_of(&dom) {
            return None;
        }
        RoverElement::new(s.compose(&b.table)).ok()
    }

    fn elem_map(&self, b: &RoverElement) -> RoverTable {
        b.table.clone()
    }

    /// Both full-image or both proper-image: the forced map on the supports,
    /// padded on proper images by an undecorated bijection of the
    /// complements.  Mixed classes admit no full-support witness.
    fn translator(&self, from: &RoverElement, to: &RoverElement) -> Option<RoverTable> {
        if from.table.is_full_image() != to.table.is_full_image() {
            return None;
        }
        let forced = to.table.compose(&from.table.inverse());
        if from.table.is_full_image() {
            return Some(forced);
        }
        let c1 = ConeSet::new(from.table.image_cones()).complement_cones();
        let c2 = ConeSet::new(to.table.image_cones()).complement_cones();
        let pad = crate::instances::v::balanced_bijection(&c1, &c2);
        let mut rows = forced.rows().to_vec();
        rows.extend(
            pad.rows()
                .iter()
                .map(|(d, m)| (d.clone(), m.clone(), gw(""))),
        );
        Some(RoverTable::new(rows).expect("forced part and padding occupy disjoint regions"))
    }

    fn stabilizer(&self, b: &RoverElement) -> Stabilizer<RoverTable> {
        let inv = b.table.inverse();
        let elements = KElement::ALL
            .into_iter()
            .map(|k| {
                b.table
                    .compose(&RoverTable::from_grig(k.word()))
                    .compose(&inv)
            })
            .collect();
        let table = KElement::ALL
            .into_iter()
            .map(|x| {
                KElement::ALL
                    .into_iter()
                    .map(|y| {
                        let z = k_mul(x, y);
                        KElement::ALL.into_iter().position(|k| k == z).unwrap()
                    })
                    .collect()
            })
            .collect();
        Stabilizer {
            elements,
            table,
            description: "klein-four".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{check_expansion_axioms, edge_leq, is_simplex};

    fn row(d: &str, m: &str, g: &str) -> (Word, Word, GrigWord) {
        (d.parse().unwrap(), m.parse().unwrap(), g.parse().unwrap())
    }

    fn elem(rows: &[(&str, &str, &str)]) -> RoverElement {
        let rows = rows.iter().map(|(d, m, g)| row(d, m, g)).collect();
        RoverElement::new(RoverTable::new(rows).unwrap()).unwrap()
    }

    /// A decorated element exercising every row shape: a shifted cone, a
    /// decoration with nontrivial sections, and a plain dyadic move.
    fn decorated() -> RoverElement {
        elem(&[("0", "10", "ab"), ("10", "0", "d"), ("11", "11", "")])
    }

    #[test]
    fn the_expansion_poset_is_a_square() {
        let inst = RoverInstance;
        for b in [RoverElement::top(), decorated()] {
            let poset = inst.expansions(&b).unwrap();
            assert_eq!(poset.len(), 4);
            let heights: Vec<usize> = poset.nodes().iter().map(|v| v.height()).collect();
            assert_eq!(heights, vec![1, 2, 2, 3]);
            check_expansion_axioms(&inst, &b).unwrap();
            // the two middle vertices have equal support partitions but
            // differ by the twist, so they are genuinely distinct
            assert!(!vertex_equal(&inst, poset.node(1), poset.node(2)));
            assert_eq!(poset.node(1).supports(), poset.node(2).supports());
        }
    }

    #[test]
    fn one_more_subdivision_undoes_the_twisting() {
        let inst = RoverInstance;
        let b = decorated();
        let twisted = b.restrict(&Word::from_bits(&[1])).twist();
        let halves = inst.expansions(&twisted).unwrap();
        let target = Vertex::new(
            &inst,
            vec![
                b.restrict(&Word::from_bits(&[1, 0])),
                b.restrict(&Word::from_bits(&[1, 1])),
            ],
        )
        .unwrap();
        assert!(vertex_equal(&inst, halves.node(1), &target));
    }

    #[test]
    fn k_translates_are_equal_but_the_a_twist_is_not() {
        let inst = RoverInstance;
        for b in [RoverElement::top(), decorated()] {
            for k in KElement::ALL {
                let t = b.translate(k);
                assert!(inst.equal(&b, &t));
                assert!(inst.equal(&t, &b));
            }
            assert!(!inst.equal(&b, &b.twist()));
            assert!(inst.equal(&b.twist().twist(), &b));
        }
    }

    #[test]
    fn pairs_contract_in_four_ways_and_triples_in_six() {
        let inst = RoverInstance;
        let b = decorated();
        let poset = inst.expansions(&b).unwrap();

        let pairs = inst.contractions(poset.node(1));
        assert_eq!(pairs.len(), 4);
        assert!(pairs.iter().any(|c| inst.equal(c, &b)));

        let twisted_pairs = inst.contractions(poset.node(2));
        assert_eq!(twisted_pairs.len(), 4);
        assert!(twisted_pairs.iter().any(|c| inst.equal(c, &b)));

        let triples = inst.contractions(poset.node(3));
        assert_eq!(triples.len(), 6);
        assert!(triples.iter().any(|c| inst.equal(c, &b)));

        let quarters = Vertex::new(
            &inst,
            vec![
                b.restrict(&Word::from_bits(&[0, 0])),
                b.restrict(&Word::from_bits(&[0, 1])),
                b.restrict(&Word::from_bits(&[1, 0])),
                b.restrict(&Word::from_bits(&[1, 1])),
            ],
        )
        .unwrap();
        assert!(inst.contractions(&quarters).is_empty());
    }

    #[test]
    fn square_edges_force_the_diagonal() {
        let inst = RoverInstance;
        let b = decorated();
        let poset = inst.expansions(&b).unwrap();
        let (bottom, left, right, top) = (
            poset.node(0).clone(),
            poset.node(1).clone(),
            poset.node(2).clone(),
            poset.node(3).clone(),
        );
        assert!(edge_leq(&inst, &bottom, &left));
        assert!(edge_leq(&inst, &left, &top));
        assert!(edge_leq(&inst, &bottom, &top));
        assert!(!edge_leq(&inst, &left, &right));
        assert!(!edge_leq(&inst, &right, &left));
        assert!(is_simplex(&inst, &[bottom.clone(), left.clone(), top.clone()]));
        assert!(is_simplex(&inst, &[bottom.clone(), right.clone(), top]));
        // left and right have equal heights, so the triple is no chain
        assert!(!is_simplex(&inst, &[bottom, left, right]));
    }

    #[test]
    fn stabilizers_are_klein_four() {
        let inst = RoverInstance;
        for b in [RoverElement::top(), decorated()] {
            let stab = inst.stabilizer(&b);
            assert_eq!(stab.order(), 4);
            assert_eq!(stab.description, "klein-four");
            for (i, s) in stab.elements.iter().enumerate() {
                let moved = inst.act(s, &b).unwrap();
                assert!(inst.equal(&moved, &b));
                for t in stab.elements.iter().skip(i + 1) {
                    assert!(!s.equal_extensional(t));
                }
            }
            for (i, s) in stab.elements.iter().enumerate() {
                for (j, t) in stab.elements.iter().enumerate() {
                    let product = s.compose(t);
                    assert!(product.equal_extensional(&stab.elements[stab.table[i][j]]));
                }
            }
        }
    }

    #[test]
    fn the_action_moves_supports() {
        let inst = RoverInstance;
        let shift = RoverTable::new(vec![row("", "0", "a")]).unwrap();
        let b = elem(&[("", "0", "a")]);
        assert_eq!(inst.support(&b).key(), "0");
        // the shift maps X_0 into X_01: its decoration a flips the next bit
        let moved = inst.act(&shift, &b).unwrap();
        assert_eq!(inst.support(&moved).key(), "01");

        let partial = RoverTable::new(vec![row("0", "0", "")]).unwrap();
        assert!(inst.act(&partial, &RoverElement::top()).is_none());
        assert!(inst.act(&partial, &b).is_some());
    }

    #[test]
    fn sections_follow_the_wreath_recursion() {
        let ab = elem(&[("", "", "ab")]);
        // ab sends 0ω to 1·a(ω): the section at 0 is a, the image prefix 1
        let left = ab.restrict(&Word::from_bits(&[0]));
        assert_eq!(
            left.table().rows(),
            &[row("", "1", "a")],
            "section rows: {}",
            left
        );
        let g: GrigWord = "ab".parse().unwrap();
        for len in 0..=5 {
            for u in all_words(len) {
                assert_eq!(ab.table().eval(&u), Some(g.act(&u)));
            }
        }
        for u in all_words(5) {
            let shifted = Word::from_bits(&[0]).concat(&u);
            assert_eq!(left.table().eval(&u), ab.table().eval(&shifted));
        }
    }

    #[test]
    fn composition_inverts_cleanly() {
        let b = elem(&[("0", "10", "ab"), ("10", "0", "d"), ("11", "11", "")]);
        let inv = b.table().inverse();
        let round = inv.compose(b.table());
        assert!(round.equal_extensional(&RoverTable::identity()));
        let other_round = b.table().compose(&inv);
        let on_image = RoverTable::new(vec![
            row("10", "10", ""),
            row("0", "0", ""),
            row("11", "11", ""),
        ])
        .unwrap();
        assert!(other_round.equal_extensional(&on_image));
    }

    #[test]
    fn tables_roundtrip_through_json() {
        let inst = RoverInstance;
        let b = decorated();
        let v = inst.elem_json(&b);
        assert_eq!(v["rows"][0]["decoration"], "ab");
        let back = inst.elem_from_json(&v).unwrap();
        assert!(inst.equal(&b, &back));
        assert_eq!(inst.elem_label(&b), inst.elem_label(&back));

        let overlapping = serde_json::json!({
            "rows": [
                {"dom": "", "img": "0", "decoration": ""},
                {"dom": "1", "img": "1", "decoration": "a"},
            ]
        });
        assert!(inst.elem_from_json(&overlapping).is_err());
    }

    fn all_words(len: usize) -> Vec<Word> {
        (0..1u32 << len)
            .map(|bits| {
                let v: Vec<u8> = (0..len).map(|i| ((bits >> i) & 1) as u8).collect();
                Word::from_bits(&v)
            })
            .collect()
    }

    #[test]
    fn letters_section_as_documented() {
        // keep the wreath data in one visible place: b = (a, c), c = (a, d),
        // d = (1, b), and a has trivial sections
        let pairs = [("b", "a", "c"), ("c", "a", "d"), ("d", "1", "b")];
        for (l, at0, at1) in pairs {
            let g = gw(l);
            assert_eq!(g.section(0).canonical_form(), gw(at0).canonical_form());
            assert_eq!(g.section(1).canonical_form(), gw(at1).canonical_form());
        }
        assert!(gw("a").section(0).is_identity());
        assert!(gw("a").section(1).is_identity());
    }
}
