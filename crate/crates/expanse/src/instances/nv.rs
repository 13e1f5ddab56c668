//! The Brin–Thompson groups nV as expansion sets: elements are box maps
//! whose domains partition the n-cube, supports are image regions, and
//! ℰ(b) is the Boolean lattice of coordinate bisections — the node for an
//! axis set A restricts b to the 2^|A| corner boxes cut along A.
//!
//! Box presentations are not canonical (sibling merging is not confluent
//! in dimension ≥ 2), so element equality is extensional throughout.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::boxes::{BoxMap, NBox};
use crate::cantor::Word;
use crate::core::{
    vertex_equal, CoreError, ExpansionInstance, ExpansionPoset, Kind, Stabilizer, Support, Vertex,
};

/// A canonical element [f, Xⁿ]: a box map with full domain.  The stored
/// presentation is policy-reduced but only extensionally unique, so use
/// [`NVInstance::equal`], never `==`, for element equality.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "BoxMap", into = "BoxMap")]
pub struct NVElement {
    table: BoxMap,
}

impl TryFrom<BoxMap> for NVElement {
    type Error = String;

    fn try_from(table: BoxMap) -> Result<Self, String> {
        NVElement::new(table)
    }
}

impl From<NVElement> for BoxMap {
    fn from(e: NVElement) -> BoxMap {
        e.table
    }
}

impl NVElement {
    pub fn new(table: BoxMap) -> Result<Self, String> {
        if table.is_zero() {
            return Err("an element needs a nonempty box table".into());
        }
        if !table.is_full_domain() {
            return Err("element domains must partition Xⁿ".into());
        }
        Ok(NVElement { table })
    }

    pub fn table(&self) -> &BoxMap {
        &self.table
    }

    pub fn dim(&self) -> usize {
        self.table.dim()
    }

    /// The identity element [id, Xⁿ].
    pub fn top(n: usize) -> Self {
        NVElement {
            table: BoxMap::identity(n),
        }
    }

    /// Rows refined until every domain box has depth ≥ 1 on each axis in
    /// `axes`.  A row splits into its two children along the axis, domain
    /// and image together, which leaves the map unchanged extensionally.
    fn refine_rows(&self, axes: &[usize]) -> Vec<(NBox, NBox)> {
        let mut rows: Vec<(NBox, NBox)> = self.table.rows().to_vec();
        for &a in axes {
            let mut next = Vec::new();
            for (d, m) in rows {
                if d.word(a).is_empty() {
                    next.push((d.child(a, 0), m.child(a, 0)));
                    next.push((d.child(a, 1), m.child(a, 1)));
                } else {
                    next.push((d, m));
                }
            }
            rows = next;
        }
        rows
    }

    /// The corner pieces of the expansion along `axes`: restrict to each
    /// corner box of the grid cut along those axes and re-root the domain.
    /// Piece k has corner bit `(k >> i) & 1` on `axes[i]`.
    pub fn expand(&self, axes: &[usize]) -> Vec<NVElement> {
        let mut parts: Vec<Vec<(NBox, NBox)>> = vec![Vec::new(); 1 << axes.len()];
        for (d, m) in self.refine_rows(axes) {
            let mut corner = 0usize;
            let mut words: Vec<Word> = d.words().to_vec();
            for (i, &a) in axes.iter().enumerate() {
                let bits = words[a].bits();
                corner |= (bits[0] as usize) << i;
                words[a] = Word::from_bits(&bits[1..]);
            }
            parts[corner].push((NBox::new(words), m));
        }
        parts
            .into_iter()
            .map(|rows| {
                let table =
                    BoxMap::new(self.dim(), rows).expect("corner rows inherit disjointness");
                NVElement::new(table).expect("corner pieces cover the re-rooted cube")
            })
            .collect()
    }

    /// Glues one element per corner of the grid along `axes` into the
    /// candidate whose expansion yields them: prefix the domain of the piece
    /// at corner k with bit `(k >> i) & 1` on `axes[i]`, images untouched.
    /// None when the glued rows overlap.
    pub fn glue(n: usize, axes: &[usize], parts: &[&NVElement]) -> Option<NVElement> {
        assert_eq!(parts.len(), 1 << axes.len(), "one piece per corner");
        let mut rows = Vec::new();
        for (corner, part) in parts.iter().enumerate() {
            for (d, m) in part.table.rows() {
                let mut words = d.words().to_vec();
                for (i, &a) in axes.iter().enumerate() {
                    let bit = ((corner >> i) & 1) as u8;
                    words[a] = Word::from_bits(&[bit]).concat(&words[a]);
                }
                rows.push((NBox::new(words), m.clone()));
            }
        }
        let table = BoxMap::new(n, rows).ok()?;
        NVElement::new(table).ok()
    }
}

impl std::fmt::Display for NVElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.table)
    }
}

/// The nV instance with constants C0 = 2ⁿ and C1 = 2.  Shipped scales are
/// n ∈ {2, 3}; larger n works through the same code but the cube posets
/// grow as 2ⁿ.
#[derive(Clone, Copy, Debug)]
pub struct NVInstance {
    n: usize,
}

impl NVInstance {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        NVInstance { n }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Axis subsets of size `size` in increasing mask order.
    fn axis_subsets(&self, size: usize) -> Vec<Vec<usize>> {
        (0..self.n).combinations(size).collect()
    }
}

impl ExpansionInstance for NVInstance {
    type Elem = NVElement;
    type Map = BoxMap;

    fn id(&self) -> String {
        format!("{}v", self.n)
    }

    fn kind(&self) -> Kind {
        Kind::Permutational
    }

    fn c0(&self) -> usize {
        1 << self.n
    }

    fn c1(&self) -> usize {
        2
    }

    fn support(&self, b: &NVElement) -> Support {
        Support::Boxes(b.table.image_region())
    }

    /// The single-row class onto one box: the fully expanded form every
    /// element decays into, which remembers only its support.
    fn pattern_element(&self, piece: &Support) -> Option<NVElement> {
        let Support::Boxes(bs) = piece else {
            return None;
        };
        if bs.cells().len() != 1 {
            return None;
        }
        let target = bs.cells()[0].clone();
        let table = BoxMap::new(self.n, vec![(NBox::root(self.n), target)]).ok()?;
        NVElement::new(table).ok()
    }

    fn expansions(&self, b: &NVElement) -> Result<ExpansionPoset<NVElement>, CoreError> {
        assert_eq!(b.dim(), self.n, "element dimension mismatch");
        // nodes in (popcount, mask) order put ∅ first; leq is mask inclusion
        let mut masks: Vec<usize> = (0..1usize << self.n).collect();
        masks.sort_by_key(|&m| (m.count_ones(), m));
        let mut nodes = Vec::with_capacity(masks.len());
        for &mask in &masks {
            let axes: Vec<usize> = (0..self.n).filter(|a| mask >> a & 1 == 1).collect();
            let parts = b.expand(&axes);
            nodes.push(Vertex::new(self, parts).expect("corner supports are disjoint"));
        }
        let leq = masks
            .iter()
            .map(|&mi| masks.iter().map(|&mj| mi & mj == mi).collect())
            .collect();
        Ok(ExpansionPoset::new(nodes, leq))
    }

    fn contractions(&self, parts: &Vertex<NVElement>) -> Vec<NVElement> {
        let h = parts.height();
        if h < 2 || !h.is_power_of_two() || h > 1 << self.n {
            return Vec::new();
        }
        let j = h.trailing_zeros() as usize;
        let mut out: Vec<NVElement> = Vec::new();
        for axes in self.axis_subsets(j) {
            for perm in (0..h).permutations(h) {
                let assigned: Vec<&NVElement> =
                    perm.iter().map(|&i| &parts.elems()[i]).collect();
                let Some(cand) = NVElement::glue(self.n, &axes, &assigned) else {
                    continue;
                };
                // verified by re-expansion
                let pieces = cand.expand(&axes);
                let Ok(vert) = Vertex::new(self, pieces) else {
                    continue;
                };
                if vertex_equal(self, &vert, parts)
                    && !out.iter().any(|e| self.equal(e, &cand))
                {
                    out.push(cand);
                }
            }
        }
        out
    }

    fn equal(&self, a: &NVElement, b: &NVElement) -> bool {
        a.table.equal_extensional(&b.table)
    }

    fn elem_label(&self, b: &NVElement) -> String {
        b.table.to_string()
    }

    fn elem_json(&self, b: &NVElement) -> serde_json::Value {
        serde_json::to_value(b).expect("box tables serialize")
    }

    fn elem_from_json(&self, v: &serde_json::Value) -> Result<NVElement, String> {
        let e: NVElement = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
        if e.dim() != self.n {
            return Err(format!("expected dimension {}, got {}", self.n, e.dim()));
        }
        Ok(e)
    }

    fn act(&self, s: &BoxMap, b: &NVElement) -> Option<NVElement> {
        if !b.table.image_region().subset_of(&s.domain_region()) {
            return None;
        }
        NVElement::new(s.compose(&b.table)).ok()
    }

    fn elem_map(&self, b: &NVElement) -> BoxMap {
        b.table.clone()
    }

    /// Both full-image or both proper-image: the forced map on the supports,
    /// padded on proper images by a balanced bijection of the complement
    /// cells.  Mixed classes admit no full-support witness.
    fn translator(&self, from: &NVElement, to: &NVElement) -> Option<BoxMap> {
        if from.table.is_full_image() != to.table.is_full_image() {
            return None;
        }
        let forced = to.table.compose(&from.table.inverse());
        if from.table.is_full_image() {
            return Some(forced);
        }
        let c1 = crate::boxes::complement(self.n, &from.table.image_boxes());
        let c2 = crate::boxes::complement(self.n, &to.table.image_boxes());
        let mut rows = forced.rows().to_vec();
        rows.extend(balanced_box_rows(c1, c2));
        Some(BoxMap::new(self.n, rows).expect("forced part and padding occupy disjoint regions"))
    }

    fn stabilizer(&self, b: &NVElement) -> Stabilizer<BoxMap> {
        let id_on_supp = BoxMap::identity(self.n).restrict(&b.table.image_boxes());
        Stabilizer {
            elements: vec![id_on_supp],
            table: vec![vec![0]],
            description: "trivial".into(),
        }
    }
}

/// A box bijection between two nonempty disjoint-cell lists, equalizing
/// counts by repeatedly splitting the first cell of the shorter side along
/// its first axis.
fn balanced_box_rows(mut from: Vec<NBox>, mut to: Vec<NBox>) -> Vec<(NBox, NBox)> {
    assert!(!from.is_empty() && !to.is_empty());
    while from.len() < to.len() {
        let b = from.remove(0);
        from.push(b.child(0, 0));
        from.push(b.child(0, 1));
    }
    while to.len() < from.len() {
        let b = to.remove(0);
        to.push(b.child(0, 0));
        to.push(b.child(0, 1));
    }
    from.sort_by(|a, b| a.words().cmp(b.words()));
    to.sort_by(|a, b| a.words().cmp(b.words()));
    from.into_iter().zip(to).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{ascending_link, check_expansion_axioms, relative_ascending_link};
    use crate::topology::{order_complex, reduced_homology};

    fn nbox(words: &[&str]) -> NBox {
        NBox::new(words.iter().map(|s| s.parse().expect("literal word")).collect())
    }

    fn elem(n: usize, rows: &[(&[&str], &[&str])]) -> NVElement {
        let rows = rows
            .iter()
            .map(|(d, m)| (nbox(d), nbox(m)))
            .collect();
        NVElement::new(BoxMap::new(n, rows).expect("test rows are disjoint"))
            .expect("test rows have full domain")
    }

    /// The three-row element moving X_0×X → X_01×X_0, X_1×X_1 → X_11×X,
    /// and X_1×X_0 → X_0×X_1.
    fn three_piece() -> NVElement {
        elem(
            2,
            &[
                (&["0", ""], &["01", "0"]),
                (&["1", "1"], &["11", ""]),
                (&["1", "0"], &["0", "1"]),
            ],
        )
    }

    #[test]
    fn three_piece_support_is_the_expected_box_set() {
        let f = three_piece();
        let imgs = f.table().image_boxes();
        assert_eq!(
            imgs,
            vec![nbox(&["0", "1"]), nbox(&["01", "0"]), nbox(&["11", ""])]
        );
        // one quarter-of-a-quarter is missed, so the support is proper
        assert!(!f.table().is_full_image());
        let supp = f.table().image_region();
        assert!(nbox(&["00", "0"]).disjoint(&imgs[0]));
        assert!(!supp.is_all());
    }

    #[test]
    fn expansion_poset_is_the_square_with_heights_1_2_2_4() {
        let inst = NVInstance::new(2);
        let poset = inst.expansions(&NVElement::top(2)).unwrap();
        assert_eq!(poset.len(), 4);
        let heights: Vec<usize> = (0..4).map(|i| poset.node(i).height()).collect();
        assert_eq!(heights, vec![1, 2, 2, 4]);
        // the two bisections are incomparable; everything else is ordered
        assert!(poset.leq(0, 1) && poset.leq(0, 2) && poset.leq(0, 3));
        assert!(poset.leq(1, 3) && poset.leq(2, 3));
        assert!(!poset.leq(1, 2) && !poset.leq(2, 1));
        check_expansion_axioms(&inst, &NVElement::top(2)).unwrap();

        // simplicial realization: two triangles glued along the long chain
        let labels = (0..4).map(|i| i.to_string()).collect();
        let real = order_complex(labels, |i, j| i != j && poset.leq(i, j), 10_000).unwrap();
        let maximal = real.maximal_simplices();
        assert_eq!(maximal, vec![vec![0, 1, 3], vec![0, 2, 3]]);
    }

    #[test]
    fn expansion_axioms_hold_for_a_proper_support_element() {
        let inst = NVInstance::new(2);
        check_expansion_axioms(&inst, &three_piece()).unwrap();
    }

    #[test]
    fn cube_poset_for_three_dimensions() {
        let inst = NVInstance::new(3);
        let poset = inst.expansions(&NVElement::top(3)).unwrap();
        assert_eq!(poset.len(), 8);
        let heights: Vec<usize> = (0..8).map(|i| poset.node(i).height()).collect();
        assert_eq!(heights, vec![1, 2, 2, 2, 4, 4, 4, 8]);
        check_expansion_axioms(&inst, &NVElement::top(3)).unwrap();
    }

    #[test]
    fn expand_then_glue_is_the_identity_on_presentations() {
        let f = three_piece();
        for axes in [vec![0], vec![1], vec![0, 1]] {
            let pieces = f.expand(&axes);
            assert_eq!(pieces.len(), 1 << axes.len());
            let refs: Vec<&NVElement> = pieces.iter().collect();
            let glued = NVElement::glue(2, &axes, &refs).expect("pieces reglue");
            assert!(glued.table().equal_extensional(f.table()));
        }
    }

    #[test]
    fn a_disjoint_pair_has_two_contractions_per_axis() {
        let inst = NVInstance::new(2);
        // translations onto the lower-left and upper-right quarters
        let a = elem(2, &[(&["", ""], &["0", "0"])]);
        let b = elem(2, &[(&["", ""], &["1", "1"])]);
        let v = Vertex::new(&inst, vec![a, b]).unwrap();
        let found = inst.contractions(&v);
        assert_eq!(found.len(), 4);
        for c in &found {
            assert!(c.table().is_full_domain());
        }
        // in three dimensions the same pair shape has six
        let inst3 = NVInstance::new(3);
        let a3 = elem(3, &[(&["", "", ""], &["0", "0", "0"])]);
        let b3 = elem(3, &[(&["", "", ""], &["1", "1", "1"])]);
        let v3 = Vertex::new(&inst3, vec![a3, b3]).unwrap();
        assert_eq!(inst3.contractions(&v3).len(), 6);
    }

    #[test]
    fn the_four_quarters_contract_to_every_quarter_permutation() {
        let inst = NVInstance::new(2);
        let top = NVElement::top(2);
        let poset = inst.expansions(&top).unwrap();
        let quarters = poset.node(3).clone();
        let found = inst.contractions(&quarters);
        assert_eq!(found.len(), 24);
        assert!(found.iter().any(|c| inst.equal(c, &top)));
        // sets of size three never sit inside a cube poset
        let trio = Vertex::new(&inst, quarters.elems()[..3].to_vec()).unwrap();
        assert!(inst.contractions(&trio).is_empty());
    }

    #[test]
    fn ascending_link_of_a_single_element_is_a_two_edge_path() {
        let inst = NVInstance::new(2);
        let v = Vertex::singleton(&inst, three_piece());
        let link = ascending_link(&inst, &v, 100_000).unwrap();
        let c = &link.chain.complex;
        assert_eq!(c.vertex_count(), 3);
        assert_eq!(c.simplices_of_dim(1).len(), 2);
        let report = reduced_homology(c, 1);
        assert!(report.homologically_connected_through(1));
    }

    #[test]
    fn relative_ascending_link_toward_the_quarters_is_the_path() {
        let inst = NVInstance::new(2);
        let b = Vertex::singleton(&inst, NVElement::top(2));
        let quarters = inst.expansions(&NVElement::top(2)).unwrap().node(3).clone();
        let link = relative_ascending_link(&inst, &b, &quarters, 100_000).unwrap();
        let c = &link.chain.complex;
        assert_eq!(c.vertex_count(), 3);
        assert_eq!(c.simplices_of_dim(1).len(), 2);
        assert!(reduced_homology(c, 1).homologically_connected_through(1));
    }

    #[test]
    fn action_translates_supports() {
        let inst = NVInstance::new(2);
        let b = elem(2, &[(&["", ""], &["0", "0"])]);
        // swap the two vertical halves
        let s = BoxMap::new(
            2,
            vec![
                (nbox(&["0", ""]), nbox(&["1", ""])),
                (nbox(&["1", ""]), nbox(&["0", ""])),
            ],
        )
        .unwrap();
        let moved = inst.act(&s, &b).expect("support lies in the domain");
        assert_eq!(moved.table().image_boxes(), vec![nbox(&["1", "0"])]);
        // a map defined only off the support cannot act
        let off = BoxMap::new(2, vec![(nbox(&["1", ""]), nbox(&["1", ""]))]).unwrap();
        assert!(inst.act(&off, &b).is_none());
    }

    #[test]
    fn stabilizer_is_the_identity_on_the_support() {
        let inst = NVInstance::new(2);
        let b = three_piece();
        let stab = inst.stabilizer(&b);
        assert_eq!(stab.order(), 1);
        for s in &stab.elements {
            assert!(inst
                .act(s, &b)
                .is_some_and(|moved| inst.equal(&moved, &b)));
        }
    }

    #[test]
    fn json_embedding_checks_the_dimension() {
        let inst2 = NVInstance::new(2);
        let inst3 = NVInstance::new(3);
        let f = three_piece();
        let json = inst2.elem_json(&f);
        let back = inst2.elem_from_json(&json).unwrap();
        assert!(inst2.equal(&back, &f));
        assert!(inst3.elem_from_json(&json).is_err());
    }
}
