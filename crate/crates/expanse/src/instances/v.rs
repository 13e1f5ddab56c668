//! Thompson's group V as an expansion set: elements are canonical prefix
//! tables whose domains partition the Cantor set, supports are image
//! regions, and ℰ(b) is the two-vertex poset {b} < {left half, right half}.

use serde::{Deserialize, Serialize};

use crate::cantor::{Cone, ConeSet, TableMap, Word};
use crate::core::{
    vertex_equal, CoreError, ExpansionInstance, ExpansionPoset, Kind, Stabilizer, Support, Vertex,
};

/// A canonical element [g, X]: a prefix table with full domain.  Tables are
/// reduced, and for full-domain tables the reduced form is unique to the
/// extensional map, so syntactic equality decides equality of elements.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "TableMap", into = "TableMap")]
pub struct VElement {
    table: TableMap,
}

impl TryFrom<TableMap> for VElement {
    type Error = String;

    fn try_from(table: TableMap) -> Result<Self, String> {
        VElement::new(table)
    }
}

impl From<VElement> for TableMap {
    fn from(e: VElement) -> TableMap {
        e.table
    }
}

impl VElement {
    pub fn new(table: TableMap) -> Result<Self, String> {
        if table.is_zero() {
            return Err("an element needs a nonempty table".into());
        }
        if !table.is_full_domain() {
            return Err("element domains must partition X".into());
        }
        Ok(VElement { table })
    }

    pub fn table(&self) -> &TableMap {
        &self.table
    }

    /// The identity element [id, X].
    pub fn top() -> Self {
        VElement {
            table: TableMap::identity(),
        }
    }

    pub fn support_cones(&self) -> Vec<Cone> {
        self.table.image_cones()
    }

    /// The two halves of the expansion: restrict to each half of the domain
    /// tree and re-root.  A single ε-row is split on its image first.
    pub fn split(&self) -> (VElement, VElement) {
        let rows = self.table.rows();
        if rows.len() == 1 && rows[0].0.is_empty() {
            let (_, img) = &rows[0];
            let left = TableMap::new(vec![(Word::empty(), img.child(0))])
                .expect("single rows are always valid");
            let right = TableMap::new(vec![(Word::empty(), img.child(1))])
                .expect("single rows are always valid");
            return (
                VElement { table: left },
                VElement { table: right },
            );
        }
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (dom, img) in rows {
            let head = dom.bits()[0];
            let tail = Word::from_bits(&dom.bits()[1..]);
            if head == 0 {
                left.push((tail, img.clone()));
            } else {
                right.push((tail, img.clone()));
            }
        }
        let left = TableMap::new(left).expect("halves of a reduced table stay reduced");
        let right = TableMap::new(right).expect("halves of a reduced table stay reduced");
        (
            VElement::new(left).expect("halves have full domain"),
            VElement::new(right).expect("halves have full domain"),
        )
    }

    /// Glues two elements into the candidate whose split yields them in this
    /// order: prefix the first's domains with 0, the second's with 1.
    pub fn glue(first: &VElement, second: &VElement) -> Option<VElement> {
        let mut rows = Vec::new();
        for (dom, img) in first.table.rows() {
            rows.push((Word::from_bits(&[0]).concat(dom), img.clone()));
        }
        for (dom, img) in second.table.rows() {
            rows.push((Word::from_bits(&[1]).concat(dom), img.clone()));
        }
        let table = TableMap::new(rows).ok()?;
        VElement::new(table).ok()
    }
}

impl std::fmt::Display for VElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.table)
    }
}

/// The V instance with constants C0 = C1 = 2.
#[derive(Clone, Copy, Debug, Default)]
pub struct VInstance;

impl ExpansionInstance for VInstance {
    type Elem = VElement;
    type Map = TableMap;

    fn id(&self) -> String {
        "v".into()
    }

    fn kind(&self) -> Kind {
        Kind::Permutational
    }

    fn c0(&self) -> usize {
        2
    }

    fn c1(&self) -> usize {
        2
    }

    fn support(&self, b: &VElement) -> Support {
        Support::Cones(ConeSet::new(b.support_cones()))
    }

    /// The single-row class onto one cone: the fully expanded form every
    /// element decays into, which remembers only its support.
    fn pattern_element(&self, piece: &Support) -> Option<VElement> {
        let Support::Cones(cs) = piece else {
            return None;
        };
        if cs.cones().len() != 1 {
            return None;
        }
        let beta = cs.cones()[0].0.clone();
        let table = TableMap::new(vec![(Word::empty(), beta)]).ok()?;
        VElement::new(table).ok()
    }

    fn expansions(&self, b: &VElement) -> Result<ExpansionPoset<VElement>, CoreError> {
        let (l, r) = b.split();
        let bottom = Vertex::singleton(self, b.clone());
        let top = Vertex::new(self, vec![l, r]).expect("split halves have disjoint supports");
        Ok(ExpansionPoset::new(
            vec![bottom, top],
            vec![vec![true, true], vec![false, true]],
        ))
    }

    fn contractions(&self, parts: &Vertex<VElement>) -> Vec<VElement> {
        if parts.height() != 2 {
            return Vec::new();
        }
        let (x, y) = (&parts.elems()[0], &parts.elems()[1]);
        let mut out = Vec::new();
        for (a, b) in [(x, y), (y, x)] {
            if let Some(cand) = VElement::glue(a, b) {
                // verified by re-expansion
                let top = self
                    .expansions(&cand)
                    .expect("V posets are finite")
                    .node(1)
                    .clone();
                if vertex_equal(self, &top, parts) {
                    out.push(cand);
                }
            }
        }
        out
    }

    fn equal(&self, a: &VElement, b: &VElement) -> bool {
        a.table == b.table
    }

    fn elem_label(&self, b: &VElement) -> String {
        b.table.to_string()
    }

    fn elem_json(&self, b: &VElement) -> serde_json::Value {
        serde_json::to_value(b).expect("tables serialize")
    }

    fn elem_from_json(&self, v: &serde_json::Value) -> Result<VElement, String> {
        serde_json::from_value(v.clone()).map_err(|e| e.to_string())
    }

    fn act(&self, s: &TableMap, b: &VElement) -> Option<VElement> {
        let supp = ConeSet::new(b.support_cones());
        let dom = ConeSet::new(s.domain_cones());
        if !supp.subset_of(&dom) {
            return None;
        }
        VElement::new(s.compose(&b.table)).ok()
    }

    fn elem_map(&self, b: &VElement) -> TableMap {
        b.table.clone()
    }

    fn translator(&self, from: &VElement, to: &VElement) -> Option<TableMap> {
        same_orbit_witness(from, to)
    }

    fn stabilizer(&self, b: &VElement) -> Stabilizer<TableMap> {
        let id_on_supp = TableMap::identity().restrict(&b.support_cones());
        Stabilizer {
            elements: vec![id_on_supp],
            table: vec![vec![0]],
            description: "trivial".into(),
        }
    }
}

/// The two orbit classes of the V action: elements whose image partitions
/// all of X, and those with proper support.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitClass {
    Full,
    Proper,
}

pub fn orbit_class(b: &VElement) -> OrbitClass {
    if b.table().is_full_image() {
        OrbitClass::Full
    } else {
        OrbitClass::Proper
    }
}

/// A full bijection X → X translating b1 to b2 (act(w, b1) = b2), when the
/// two lie in the same orbit: the forced map supp(b1) → supp(b2) extended by
/// a balanced bijection of the complements.
pub fn same_orbit_witness(b1: &VElement, b2: &VElement) -> Option<TableMap> {
    if orbit_class(b1) != orbit_class(b2) {
        return None;
    }
    let forced = b2.table().compose(&b1.table().inverse());
    let c1 = ConeSet::new(b1.support_cones()).complement_cones();
    let c2 = ConeSet::new(b2.support_cones()).complement_cones();
    let mut rows: Vec<(Word, Word)> = forced.rows().to_vec();
    if !c1.is_empty() {
        let pad = balanced_bijection(&c1, &c2);
        rows.extend(pad.rows().iter().cloned());
    }
    let witness = TableMap::new(rows).expect("witness parts occupy disjoint regions");
    debug_assert!(witness.is_full_domain() && witness.is_full_image());
    Some(witness)
}

/// A prefix bijection between two nonempty disjoint-cone lists, equalizing
/// counts by repeatedly splitting the first cone of the shorter side.
pub fn balanced_bijection(from: &[Cone], to: &[Cone]) -> TableMap {
    assert!(!from.is_empty() && !to.is_empty());
    let mut a: Vec<Word> = from.iter().map(|c| c.0.clone()).collect();
    let mut b: Vec<Word> = to.iter().map(|c| c.0.clone()).collect();
    while a.len() < b.len() {
        let w = a.remove(0);
        a.insert(0, w.child(1));
        a.insert(0, w.child(0));
    }
    while b.len() < a.len() {
        let w = b.remove(0);
        b.insert(0, w.child(1));
        b.insert(0, w.child(0));
    }
    TableMap::new(a.into_iter().zip(b).collect()).expect("cone lists are disjoint")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::w;
    use crate::core;

    fn fig_g() -> VElement {
        let table = TableMap::new(vec![
            (w("0"), w("101")),
            (w("10"), w("00")),
            (w("11"), w("100")),
        ])
        .unwrap();
        VElement::new(table).unwrap()
    }

    #[test]
    fn support_lists_image_cones_verbatim() {
        let g = fig_g();
        let cones: Vec<String> = g.support_cones().iter().map(|c| c.0.to_string()).collect();
        assert_eq!(cones, vec!["00", "100", "101"]);
    }

    #[test]
    fn split_of_identity() {
        let (l, r) = VElement::top().split();
        assert_eq!(l.table(), &TableMap::sigma("", "0"));
        assert_eq!(r.table(), &TableMap::sigma("", "1"));
    }

    #[test]
    fn split_recovers_by_glue() {
        let g = fig_g();
        let (l, r) = g.split();
        let glued = VElement::glue(&l, &r).unwrap();
        assert_eq!(&glued, &g);
    }

    #[test]
    fn exactly_two_contractions_for_a_pair() {
        let inst = VInstance;
        let g = fig_g();
        let (l, r) = g.split();
        let pair = Vertex::new(&inst, vec![l, r]).unwrap();
        let cs = inst.contractions(&pair);
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().any(|c| inst.equal(c, &g)));
        // the swapped gluing is a different element
        assert!(!inst.equal(&cs[0], &cs[1]));
    }

    #[test]
    fn expansion_axioms_hold() {
        let inst = VInstance;
        core::check_expansion_axioms(&inst, &fig_g()).unwrap();
        core::check_expansion_axioms(&inst, &VElement::top()).unwrap();
    }

    #[test]
    fn act_transforms_support() {
        let inst = VInstance;
        let g = fig_g();
        // swap the halves of X: 00 ↦ 10, 100 ↦ 000, 101 ↦ 001
        let s = TableMap::new(vec![(w("0"), w("1")), (w("1"), w("0"))]).unwrap();
        let moved = inst.act(&s, &g).unwrap();
        let got: Vec<Word> = moved.support_cones().iter().map(|c| c.0.clone()).collect();
        assert_eq!(got, vec![w("000"), w("001"), w("10")]);
    }

    #[test]
    fn orbit_witness_round_trips() {
        let inst = VInstance;
        let g = fig_g();
        let h = {
            let t = TableMap::new(vec![(w("0"), w("11")), (w("1"), w("00"))]).unwrap();
            VElement::new(t).unwrap()
        };
        assert_eq!(orbit_class(&g), OrbitClass::Proper);
        assert_eq!(orbit_class(&h), OrbitClass::Proper);
        let wtn = same_orbit_witness(&g, &h).unwrap();
        let moved = inst.act(&wtn, &g).unwrap();
        assert!(inst.equal(&moved, &h));
        // full and proper classes never mix
        assert!(same_orbit_witness(&g, &VElement::top()).is_none());
    }

    #[test]
    fn stabilizer_is_identity_on_support() {
        let inst = VInstance;
        let g = fig_g();
        let st = inst.stabilizer(&g);
        assert_eq!(st.order(), 1);
        let fixed = inst.act(&st.elements[0], &g).unwrap();
        assert!(inst.equal(&fixed, &g));
    }
}
