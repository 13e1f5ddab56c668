//! Synthetic ordered instances over interval supports.
//!
//! The group instances shipped by this crate are all permutational, so the
//! linear and cyclic standard covers and descending-link thresholds would
//! otherwise go unexercised.  This module provides two small expansion sets
//! whose elements are *runs* — unions of consecutive depth-`d` cones, in the
//! lexicographic (linear) or wrap-around (cyclic) order — together with two
//! deliberately degenerate instances used to cover the error paths for
//! incomplete contraction oracles and unbounded expansion posets.
//!
//! A run carries no map data: it is the class of the identity on its own
//! support, so equality is equality of index intervals and every run is its
//! own pattern element.  Expansion splits a run into two shorter runs at any
//! interior cut; contraction merges two adjacent runs.  Both instances have
//! `C0 = 2` (only pairs contract) and `C1 = 2` (every run of length ≥ 2
//! splits).

use serde::{Deserialize, Serialize};

use crate::cantor::{Cone, ConeSet, Word};
use crate::core::{
    CoreError, ExpansionInstance, ExpansionPoset, Kind, Stabilizer, Support, Vertex,
};

/// A run of `len` consecutive depth-`d` atoms starting at atom index `start`.
/// In the cyclic instance the indices are taken modulo the number of atoms,
/// so a run may wrap past the last atom; the full circle is canonicalized to
/// `start = 0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Run {
    pub start: usize,
    pub len: usize,
}

impl Run {
    /// End index, not reduced modulo the atom count.
    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

fn atom_word(depth: usize, index: usize) -> Word {
    let bits: Vec<u8> = (0..depth)
        .rev()
        .map(|k| ((index >> k) & 1) as u8)
        .collect();
    Word::from_bits(&bits)
}

fn run_support(depth: usize, atoms: usize, r: &Run) -> Support {
    assert!(r.len >= 1 && r.len <= atoms, "run length out of range");
    let cones = (0..r.len)
        .map(|k| Cone(atom_word(depth, (r.start + k) % atoms)))
        .collect();
    Support::Cones(ConeSet::new(cones))
}

fn run_json(r: &Run) -> serde_json::Value {
    serde_json::json!({ "start": r.start, "len": r.len })
}

fn run_from_json(v: &serde_json::Value) -> Result<Run, String> {
    let obj = v.as_object().ok_or("run JSON must be an object")?;
    let get = |k: &str| -> Result<usize, String> {
        obj.get(k)
            .and_then(|x| x.as_u64())
            .map(|x| x as usize)
            .ok_or_else(|| format!("run JSON needs a numeric \"{k}\""))
    };
    Ok(Run {
        start: get("start")?,
        len: get("len")?,
    })
}

/// A partial order-preserving shift of runs: finitely many rows, each carrying
/// a domain run onto an image run of the same length atom-by-atom.  This is
/// the map flavour for both synthetic instances; on the cyclic instance the
/// rows may wrap.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RunMap {
    pub rows: Vec<(Run, Run)>,
}

impl RunMap {
    pub fn identity_on(r: Run) -> Self {
        RunMap { rows: vec![(r, r)] }
    }

    /// Where the sub-run `r` of a domain row lands, if some row covers it.
    /// `atoms` is the modulus; containment and shifting are interval
    /// arithmetic on unreduced indices, with wrapping handled by lifting the
    /// query run by one full turn.
    pub fn image_of(&self, r: &Run, atoms: usize) -> Option<Run> {
        for (dom, img) in &self.rows {
            debug_assert_eq!(dom.len, img.len, "run map rows must preserve length");
            for lift in [0usize, atoms] {
                let s = r.start + lift;
                if s >= dom.start && s + r.len <= dom.end() {
                    let offset = s - dom.start;
                    let start = (img.start + offset) % atoms.max(1);
                    return Some(Run { start, len: r.len });
                }
            }
        }
        None
    }
}

/// Shared machinery for the linear and cyclic run instances.
#[derive(Clone, Debug)]
struct RunWorld {
    depth: usize,
}

impl RunWorld {
    fn atoms(&self) -> usize {
        1usize << self.depth
    }

    fn canon(&self, start: usize, len: usize) -> Run {
        let n = self.atoms();
        assert!(len >= 1 && len <= n, "run length out of range");
        if len == n {
            Run { start: 0, len }
        } else {
            Run {
                start: start % n,
                len,
            }
        }
    }
}

/// The linear run instance: atoms are the depth-`d` cones in lexicographic
/// order, runs never wrap, and only consecutive runs merge.
#[derive(Clone, Debug)]
pub struct SyntheticLinear {
    world: RunWorld,
}

impl SyntheticLinear {
    pub fn new(depth: usize) -> Self {
        assert!((1..=12).contains(&depth), "depth must be in 1..=12");
        SyntheticLinear {
            world: RunWorld { depth },
        }
    }

    pub fn atoms(&self) -> usize {
        self.world.atoms()
    }

    /// The full-support base run.
    pub fn base(&self) -> Run {
        Run {
            start: 0,
            len: self.atoms(),
        }
    }

    pub fn run(&self, start: usize, len: usize) -> Run {
        assert!(start + len <= self.atoms(), "linear runs must not wrap");
        assert!(len >= 1, "runs are nonempty");
        Run { start, len }
    }

    fn check(&self, r: &Run) {
        assert!(
            r.len >= 1 && r.end() <= self.atoms(),
            "malformed linear run {r:?}"
        );
    }
}

impl ExpansionInstance for SyntheticLinear {
    type Elem = Run;
    type Map = RunMap;

    fn id(&self) -> String {
        format!("toy-line-{}", self.world.depth)
    }

    fn kind(&self) -> Kind {
        Kind::Linear
    }

    fn c0(&self) -> usize {
        2
    }

    fn c1(&self) -> usize {
        2
    }

    fn support(&self, b: &Run) -> Support {
        self.check(b);
        run_support(self.world.depth, self.atoms(), b)
    }

    fn expansions(&self, b: &Run) -> Result<ExpansionPoset<Run>, CoreError> {
        self.check(b);
        let mut nodes = vec![Vertex::singleton(self, b.clone())];
        for cut in 1..b.len {
            let left = Run {
                start: b.start,
                len: cut,
            };
            let right = Run {
                start: b.start + cut,
                len: b.len - cut,
            };
            nodes.push(Vertex::new(self, vec![left, right]).expect("split halves are disjoint"));
        }
        let m = nodes.len();
        let leq = (0..m)
            .map(|i| (0..m).map(|j| i == 0 || i == j).collect())
            .collect();
        Ok(ExpansionPoset::new(nodes, leq))
    }

    fn contractions(&self, parts: &Vertex<Run>) -> Vec<Run> {
        if parts.height() != 2 {
            return Vec::new();
        }
        let (a, b) = (&parts.elems()[0], &parts.elems()[1]);
        let mut out = Vec::new();
        for (x, y) in [(a, b), (b, a)] {
            if x.end() == y.start {
                out.push(Run {
                    start: x.start,
                    len: x.len + y.len,
                });
            }
        }
        out
    }

    fn equal(&self, a: &Run, b: &Run) -> bool {
        a == b
    }

    fn elem_label(&self, b: &Run) -> String {
        format!("[{}..{})", b.start, b.end())
    }

    fn elem_json(&self, b: &Run) -> serde_json::Value {
        run_json(b)
    }

    fn elem_from_json(&self, v: &serde_json::Value) -> Result<Run, String> {
        let r = run_from_json(v)?;
        if r.len == 0 || r.end() > self.atoms() {
            return Err(format!("linear run out of range: {r:?}"));
        }
        Ok(r)
    }

    fn act(&self, s: &RunMap, b: &Run) -> Option<Run> {
        self.check(b);
        let img = s.image_of(b, self.atoms())?;
        if img.end() > self.atoms() {
            return None;
        }
        Some(img)
    }

    fn elem_map(&self, b: &Run) -> RunMap {
        RunMap::identity_on(b.clone())
    }

    fn stabilizer(&self, b: &Run) -> Stabilizer<RunMap> {
        Stabilizer {
            elements: vec![RunMap::identity_on(b.clone())],
            table: vec![vec![0]],
            description: "trivial".into(),
        }
    }

    fn pattern_element(&self, piece: &Support) -> Option<Run> {
        support_to_run(&self.world, piece, false)
    }

    fn translator(&self, from: &Run, to: &Run) -> Option<RunMap> {
        if from.len == to.len {
            Some(RunMap {
                rows: vec![(from.clone(), to.clone())],
            })
        } else {
            None
        }
    }
}

/// The cyclic run instance: the same atoms in their natural cyclic order.
/// Runs may wrap past the last atom, the full circle is a legal element, and
/// merges are modulo the atom count, so a complementary pair of arcs
/// contracts to the full circle (once — the two ways round give the same
/// element).
#[derive(Clone, Debug)]
pub struct SyntheticCyclic {
    world: RunWorld,
}

impl SyntheticCyclic {
    pub fn new(depth: usize) -> Self {
        assert!((1..=12).contains(&depth), "depth must be in 1..=12");
        SyntheticCyclic {
            world: RunWorld { depth },
        }
    }

    pub fn atoms(&self) -> usize {
        self.world.atoms()
    }

    pub fn base(&self) -> Run {
        Run {
            start: 0,
            len: self.atoms(),
        }
    }

    pub fn run(&self, start: usize, len: usize) -> Run {
        self.world.canon(start, len)
    }

    fn check(&self, r: &Run) {
        let n = self.atoms();
        assert!(r.len >= 1 && r.len <= n && r.start < n, "malformed arc {r:?}");
        assert!(r.len < n || r.start == 0, "full circle must start at 0");
    }
}

impl ExpansionInstance for SyntheticCyclic {
    type Elem = Run;
    type Map = RunMap;

    fn id(&self) -> String {
        format!("toy-circle-{}", self.world.depth)
    }

    fn kind(&self) -> Kind {
        Kind::Cyclic
    }

    fn c0(&self) -> usize {
        2
    }

    fn c1(&self) -> usize {
        2
    }

    fn support(&self, b: &Run) -> Support {
        self.check(b);
        run_support(self.world.depth, self.atoms(), b)
    }

    fn expansions(&self, b: &Run) -> Result<ExpansionPoset<Run>, CoreError> {
        self.check(b);
        let n = self.atoms();
        let mut nodes = vec![Vertex::singleton(self, b.clone())];
        if b.len < n {
            // an arc splits at interior cuts, exactly like a linear run
            for cut in 1..b.len {
                let left = self.world.canon(b.start, cut);
                let right = self.world.canon(b.start + cut, b.len - cut);
                nodes
                    .push(Vertex::new(self, vec![left, right]).expect("arc halves are disjoint"));
            }
        } else {
            // the full circle splits at any unordered pair of cut positions
            for c1 in 0..n {
                for c2 in (c1 + 1)..n {
                    let first = self.world.canon(c1, c2 - c1);
                    let second = self.world.canon(c2, n - (c2 - c1));
                    nodes.push(
                        Vertex::new(self, vec![first, second])
                            .expect("complementary arcs are disjoint"),
                    );
                }
            }
        }
        let m = nodes.len();
        let leq = (0..m)
            .map(|i| (0..m).map(|j| i == 0 || i == j).collect())
            .collect();
        Ok(ExpansionPoset::new(nodes, leq))
    }

    fn contractions(&self, parts: &Vertex<Run>) -> Vec<Run> {
        if parts.height() != 2 {
            return Vec::new();
        }
        let n = self.atoms();
        let (a, b) = (&parts.elems()[0], &parts.elems()[1]);
        let mut out: Vec<Run> = Vec::new();
        for (x, y) in [(a, b), (b, a)] {
            if x.len + y.len <= n && x.end() % n == y.start {
                let merged = self.world.canon(x.start, x.len + y.len);
                if !out.contains(&merged) {
                    out.push(merged);
                }
            }
        }
        out
    }

    fn equal(&self, a: &Run, b: &Run) -> bool {
        a == b
    }

    fn elem_label(&self, b: &Run) -> String {
        format!("[{}+{})", b.start, b.len)
    }

    fn elem_json(&self, b: &Run) -> serde_json::Value {
        run_json(b)
    }

    fn elem_from_json(&self, v: &serde_json::Value) -> Result<Run, String> {
        let r = run_from_json(v)?;
        let n = self.atoms();
        if r.len == 0 || r.len > n || r.start >= n || (r.len == n && r.start != 0) {
            return Err(format!("arc out of range: {r:?}"));
        }
        Ok(r)
    }

    fn act(&self, s: &RunMap, b: &Run) -> Option<Run> {
        self.check(b);
        let img = s.image_of(b, self.atoms())?;
        Some(self.world.canon(img.start, img.len))
    }

    fn elem_map(&self, b: &Run) -> RunMap {
        RunMap::identity_on(b.clone())
    }

    fn stabilizer(&self, b: &Run) -> Stabilizer<RunMap> {
        if b.len == self.atoms() {
            // the full circle is stabilized by all rotations
            let n = self.atoms();
            let elements: Vec<RunMap> = (0..n)
                .map(|k| RunMap {
                    rows: vec![(
                        Run { start: 0, len: n },
                        Run {
                            start: k % n.max(1),
                            len: n,
                        },
                    )],
                })
                .collect();
            let table = (0..n)
                .map(|i| (0..n).map(|j| (i + j) % n).collect())
                .collect();
            Stabilizer {
                elements,
                table,
                description: format!("cyclic-{n}"),
            }
        } else {
            Stabilizer {
                elements: vec![RunMap::identity_on(b.clone())],
                table: vec![vec![0]],
                description: "trivial".into(),
            }
        }
    }

    fn pattern_element(&self, piece: &Support) -> Option<Run> {
        support_to_run(&self.world, piece, true)
    }

    fn translator(&self, from: &Run, to: &Run) -> Option<RunMap> {
        if from.len == to.len {
            Some(RunMap {
                rows: vec![(from.clone(), to.clone())],
            })
        } else {
            None
        }
    }
}

/// Recovers the run whose support equals the given cone set, if there is one:
/// the cones must tile a consecutive (or, when `wrap` is set, cyclically
/// consecutive) block of depth-`d` atoms.
fn support_to_run(world: &RunWorld, piece: &Support, wrap: bool) -> Option<Run> {
    let cones = match piece {
        Support::Cones(cs) => cs,
        Support::Boxes(_) => return None,
    };
    let n = world.atoms();
    let mut atoms_hit = vec![false; n];
    for c in cones.cones() {
        let word = &c.0;
        if word.len() > world.depth {
            return None;
        }
        // a short cone covers a full dyadic block of atoms
        let span = 1usize << (world.depth - word.len());
        let mut first = 0usize;
        for &bit in word.bits() {
            first = (first << 1) | bit as usize;
        }
        first <<= world.depth - word.len();
        for a in first..first + span {
            if atoms_hit[a] {
                return None;
            }
            atoms_hit[a] = true;
        }
    }
    let count = atoms_hit.iter().filter(|h| **h).count();
    if count == 0 {
        return None;
    }
    if count == n {
        return Some(Run { start: 0, len: n });
    }
    // find the unique start: a hit atom whose predecessor is not hit
    let mut start = None;
    for a in 0..n {
        let prev = (a + n - 1) % n;
        if atoms_hit[a] && !atoms_hit[prev] {
            if start.is_some() {
                return None; // more than one block
            }
            start = Some(a);
        }
    }
    let start = start?;
    if !wrap && start + count > n {
        return None;
    }
    // confirm the block is consecutive from the start
    for k in 0..count {
        if !atoms_hit[(start + k) % n] {
            return None;
        }
    }
    Some(Run { start, len: count })
}

/// A linear instance that declares its contraction oracle incomplete, for
/// exercising the descending-link error path.
#[derive(Clone, Debug)]
pub struct ShyOracle {
    inner: SyntheticLinear,
}

impl ShyOracle {
    pub fn new(depth: usize) -> Self {
        ShyOracle {
            inner: SyntheticLinear::new(depth),
        }
    }

    pub fn atoms(&self) -> usize {
        self.inner.atoms()
    }

    pub fn base(&self) -> Run {
        self.inner.base()
    }
}

impl ExpansionInstance for ShyOracle {
    type Elem = Run;
    type Map = RunMap;

    fn id(&self) -> String {
        "toy-shy".into()
    }

    fn kind(&self) -> Kind {
        Kind::Linear
    }

    fn c0(&self) -> usize {
        2
    }

    fn c1(&self) -> usize {
        2
    }

    fn complete_contractions(&self) -> bool {
        false
    }

    fn support(&self, b: &Run) -> Support {
        self.inner.support(b)
    }

    fn expansions(&self, b: &Run) -> Result<ExpansionPoset<Run>, CoreError> {
        // the posets agree with the linear instance, but the node vertices
        // must be rebuilt so their supports come from this instance
        let poset = self.inner.expansions(b)?;
        let nodes = poset
            .nodes()
            .iter()
            .map(|v| Vertex::new(self, v.elems().to_vec()).expect("nodes stay disjoint"))
            .collect();
        let leq = (0..poset.len())
            .map(|i| (0..poset.len()).map(|j| poset.leq(i, j)).collect())
            .collect();
        Ok(ExpansionPoset::new(nodes, leq))
    }

    fn contractions(&self, _parts: &Vertex<Run>) -> Vec<Run> {
        Vec::new()
    }

    fn equal(&self, a: &Run, b: &Run) -> bool {
        a == b
    }

    fn elem_label(&self, b: &Run) -> String {
        self.inner.elem_label(b)
    }

    fn elem_json(&self, b: &Run) -> serde_json::Value {
        run_json(b)
    }

    fn elem_from_json(&self, v: &serde_json::Value) -> Result<Run, String> {
        self.inner.elem_from_json(v)
    }

    fn act(&self, s: &RunMap, b: &Run) -> Option<Run> {
        self.inner.act(s, b)
    }

    fn elem_map(&self, b: &Run) -> RunMap {
        RunMap::identity_on(b.clone())
    }

    fn stabilizer(&self, b: &Run) -> Stabilizer<RunMap> {
        self.inner.stabilizer(b)
    }
}

/// An instance whose expansion posets are unbounded, for exercising the
/// infinite-poset error path.  No finite poset exists, so `expansions`
/// always fails.
#[derive(Clone, Debug)]
pub struct BottomlessWell;

impl ExpansionInstance for BottomlessWell {
    type Elem = Run;
    type Map = RunMap;

    fn id(&self) -> String {
        "toy-bottomless".into()
    }

    fn kind(&self) -> Kind {
        Kind::Linear
    }

    fn c0(&self) -> usize {
        2
    }

    fn c1(&self) -> usize {
        2
    }

    fn support(&self, b: &Run) -> Support {
        run_support(1, 2, b)
    }

    fn expansions(&self, b: &Run) -> Result<ExpansionPoset<Run>, CoreError> {
        Err(CoreError::InfinitePoset(format!("run {b:?}")))
    }

    fn contractions(&self, _parts: &Vertex<Run>) -> Vec<Run> {
        Vec::new()
    }

    fn equal(&self, a: &Run, b: &Run) -> bool {
        a == b
    }

    fn elem_label(&self, b: &Run) -> String {
        format!("[{}..{})", b.start, b.end())
    }

    fn elem_json(&self, b: &Run) -> serde_json::Value {
        run_json(b)
    }

    fn elem_from_json(&self, v: &serde_json::Value) -> Result<Run, String> {
        run_from_json(v)
    }

    fn act(&self, _s: &RunMap, _b: &Run) -> Option<Run> {
        None
    }

    fn elem_map(&self, b: &Run) -> RunMap {
        RunMap::identity_on(b.clone())
    }

    fn stabilizer(&self, b: &Run) -> Stabilizer<RunMap> {
        Stabilizer {
            elements: vec![RunMap::identity_on(b.clone())],
            table: vec![vec![0]],
            description: "trivial".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{
        check_expansion_axioms, descending_link, edge_leq, standard_cover, vertex_equal,
    };
    use crate::topology::default_budget;

    #[test]
    fn linear_runs_split_at_every_cut_and_satisfy_the_axioms() {
        let inst = SyntheticLinear::new(3);
        let base = inst.base();
        let poset = inst.expansions(&base).unwrap();
        assert_eq!(poset.len(), 8); // bottom + 7 cuts
        assert_eq!(poset.node(0).height(), 1);
        for i in 1..poset.len() {
            assert_eq!(poset.node(i).height(), 2);
            assert!(poset.leq(0, i));
            for j in 1..poset.len() {
                assert_eq!(poset.leq(i, j), i == j);
            }
        }
        check_expansion_axioms(&inst, &base).unwrap();
        check_expansion_axioms(&inst, &inst.run(2, 3)).unwrap();
    }

    #[test]
    fn adjacent_runs_merge_and_gaps_do_not() {
        let inst = SyntheticLinear::new(3);
        let touching = Vertex::new(&inst, vec![inst.run(0, 2), inst.run(2, 3)]).unwrap();
        let merged = inst.contractions(&touching);
        assert_eq!(merged, vec![inst.run(0, 5)]);
        let gapped = Vertex::new(&inst, vec![inst.run(0, 2), inst.run(3, 2)]).unwrap();
        assert!(inst.contractions(&gapped).is_empty());
        // non-sibling merges are still merges: [1..2) ∪ [2..3) spans a
        // non-dyadic block and must contract anyway
        let skew = Vertex::new(&inst, vec![inst.run(1, 1), inst.run(2, 1)]).unwrap();
        assert_eq!(inst.contractions(&skew), vec![inst.run(1, 2)]);
    }

    #[test]
    fn the_descending_link_of_five_atoms_is_connected_but_four_is_not() {
        // with C0 = C1 = 2 the linear threshold (n + 2)·C1 + (n + 1)·C0 − (n + 1)
        // at n = 0 is 5: the height-5 full vertex has connected descending
        // link, the height-4 one does not
        let inst = SyntheticLinear::new(3);
        let five = Vertex::new(
            &inst,
            (0..5).map(|i| inst.run(i, 1)).collect::<Vec<_>>(),
        )
        .unwrap();
        let link5 = descending_link(&inst, &five, default_budget()).unwrap();
        let four = Vertex::new(
            &inst,
            (0..4).map(|i| inst.run(i, 1)).collect::<Vec<_>>(),
        )
        .unwrap();
        let link4 = descending_link(&inst, &four, default_budget()).unwrap();
        assert_eq!(link5.complex.components(), 1);
        assert!(link4.complex.components() > 1);
    }

    #[test]
    fn arcs_wrap_and_complementary_arcs_merge_once() {
        let inst = SyntheticCyclic::new(2);
        // a wrapping arc covers atoms 3, 0: cones 11 and 00
        let wrap = inst.run(3, 2);
        assert_eq!(inst.support(&wrap).key(), "00|11");
        check_expansion_axioms(&inst, &wrap).unwrap();
        // complementary arcs merge to the full circle exactly once
        let pair = Vertex::new(&inst, vec![inst.run(1, 2), inst.run(3, 2)]).unwrap();
        let merged = inst.contractions(&pair);
        assert_eq!(merged, vec![inst.base()]);
        // the full circle's poset lists the bottom and every 2-cut split
        let poset = inst.expansions(&inst.base()).unwrap();
        assert_eq!(poset.len(), 1 + 6); // C(4,2) splits
        check_expansion_axioms(&inst, &inst.base()).unwrap();
        // the pair above is one of those splits
        assert!(poset
            .nodes()
            .iter()
            .any(|node| vertex_equal(&inst, node, &pair)));
    }

    #[test]
    fn cyclic_stabilizer_of_the_circle_is_the_rotation_group() {
        let inst = SyntheticCyclic::new(2);
        let stab = inst.stabilizer(&inst.base());
        assert_eq!(stab.order(), 4);
        assert_eq!(stab.description, "cyclic-4");
        // every rotation fixes the full circle as an element
        for rot in &stab.elements {
            assert_eq!(inst.act(rot, &inst.base()), Some(inst.base()));
        }
        // but moves a proper arc
        let arc = inst.run(0, 2);
        assert_eq!(inst.act(&stab.elements[1], &arc), Some(inst.run(1, 2)));
    }

    #[test]
    fn standard_covers_align_with_run_adjacency() {
        // the element order inside a vertex of atoms is the spatial order, so
        // the interval blocks of the linear cover are runs of adjacent atoms
        // and their nontrivial blocks contract
        let lin = SyntheticLinear::new(3);
        let v6 = Vertex::new(&lin, (0..6).map(|i| lin.run(i, 1)).collect::<Vec<_>>()).unwrap();
        let cover = standard_cover(6, 2, 2, Kind::Linear).unwrap();
        assert!(!cover.is_empty());
        for part in &cover {
            part.validate(6).unwrap();
            for block in part.blocks() {
                if block.len() == 2 {
                    let sub = Vertex::new(
                        &lin,
                        block.iter().map(|&i| v6.elems()[i].clone()).collect(),
                    )
                    .unwrap();
                    if block[1] == block[0] + 1 {
                        assert!(
                            !lin.contractions(&sub).is_empty(),
                            "adjacent cover block must contract: {block:?}"
                        );
                    }
                }
            }
        }
        // on the full circle, the cyclic cover's wrap block pairs the last
        // atom with the first, which is exactly the merge the cyclic
        // instance allows
        let cyc = SyntheticCyclic::new(2);
        let w4 = Vertex::new(&cyc, (0..4).map(|i| cyc.run(i, 1)).collect::<Vec<_>>()).unwrap();
        let cover = standard_cover(4, 2, 2, Kind::Cyclic).unwrap();
        let has_wrap = cover.iter().any(|part| {
            part.blocks()
                .iter()
                .any(|b| b.contains(&0) && b.contains(&3))
        });
        assert!(has_wrap, "cyclic covers must include a wrap block");
        let wrap_pair =
            Vertex::new(&cyc, vec![w4.elems()[3].clone(), w4.elems()[0].clone()]).unwrap();
        assert_eq!(cyc.contractions(&wrap_pair), vec![cyc.run(3, 2)]);
    }

    #[test]
    fn patterns_round_trip_through_supports() {
        let lin = SyntheticLinear::new(3);
        let r = lin.run(2, 3);
        assert_eq!(lin.pattern_element(&lin.support(&r)), Some(r));
        let cyc = SyntheticCyclic::new(2);
        let wrap = cyc.run(3, 2);
        assert_eq!(cyc.pattern_element(&cyc.support(&wrap)), Some(wrap));
        assert_eq!(
            cyc.pattern_element(&cyc.support(&cyc.base())),
            Some(cyc.base())
        );
        // a split support is not a run
        let lin4 = SyntheticLinear::new(2);
        let split = Support::Cones(ConeSet::new(vec![
            Cone(crate::cantor::w("00")),
            Cone(crate::cantor::w("10")),
        ]));
        assert_eq!(lin4.pattern_element(&split), None);
    }

    #[test]
    fn degenerate_instances_reach_their_error_paths() {
        let shy = ShyOracle::new(2);
        let v = Vertex::new(&shy, vec![shy.inner.run(0, 2), shy.inner.run(2, 2)]).unwrap();
        match descending_link(&shy, &v, default_budget()) {
            Err(CoreError::OracleIncomplete(id)) => assert_eq!(id, "toy-shy"),
            other => panic!("expected an oracle-incomplete error, got {other:?}"),
        }
        let well = BottomlessWell;
        let b = Run { start: 0, len: 1 };
        assert!(matches!(
            well.expansions(&b),
            Err(CoreError::InfinitePoset(_))
        ));
    }

    #[test]
    fn runs_order_spatially_inside_vertices() {
        let inst = SyntheticLinear::new(3);
        let v = Vertex::new(
            &inst,
            vec![inst.run(5, 2), inst.run(0, 3), inst.run(3, 2)],
        )
        .unwrap();
        let starts: Vec<usize> = v.elems().iter().map(|r| r.start).collect();
        assert_eq!(starts, vec![0, 3, 5]);
        // edge relation: a coarser vertex sits below a finer one
        let fine = Vertex::new(
            &inst,
            vec![
                inst.run(0, 3),
                inst.run(3, 1),
                inst.run(4, 1),
                inst.run(5, 2),
            ],
        )
        .unwrap();
        assert!(edge_leq(&inst, &v, &fine));
        assert!(!edge_leq(&inst, &fine, &v));
    }
}
