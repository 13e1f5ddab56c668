//! The theorem harness: executable checks for the finiteness-template
//! hypotheses and the surrounding structural results.
//!
//! Every check produces a [`CheckReport`] whose witness replays through the
//! public API: pass verdicts carry a sample certificate, fail verdicts carry
//! a concrete counterexample, and `inconclusive` is reserved for
//! collapsibility certificates that did not complete and for budget
//! overruns.
//!
//! The six check families:
//! - [`check_template`] — the five template hypotheses: directedness of the
//!   full-support vertices, contractible relative ascending links, finite
//!   stabilizers and expansion posets, finitely many orbits, and the
//!   contraction constants C₀/C₁.
//! - [`check_descending_bound`] — the height thresholds that force
//!   descending links to be homologically n-connected.
//! - [`check_cover_and_nerve`] — the partition cover of a descending link,
//!   the intersection formula, and the nerve shape.
//! - [`check_join_lemma`] — the join connectivity bound on random complexes.
//! - [`check_ascending_factorizations`] — the product structure of ascending
//!   stars and the join model of (relative) ascending links.
//! - [`check_action`] — sampled partial bijections act by simplicial
//!   automorphisms, preserve the filtration slices, and equal type vectors
//!   yield glued translators.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::boxes::{BoxMap, BoxSet, NBox};
use crate::cantor::{Cone, ConeSet, TableMap};
use crate::core::{
    check_expansion_axioms, dedup_vertices, descending_link, expansion_leq, filtration_slice,
    is_simplex, partition_meet, partitioned_from_full, relative_ascending_link, respects_partition,
    standard_cover, vertex_equal, vertex_label, CoreError, ExpansionInstance, Kind, Support,
    Vertex,
};
use crate::core::{ascending_link, ascending_star};
use crate::instances::{
    orbit_class, NVElement, NVInstance, OrbitClass, RoverElement, RoverInstance, RoverTable,
    VElement, VInstance,
};
use crate::sampling::{
    self, random_complex, random_expansion_walk, random_nv_element, random_nv_map,
    random_rover_element, random_v_element, random_v_map,
};
use crate::synthetic::{Run, RunMap, ShyOracle, SyntheticCyclic, SyntheticLinear};
use crate::topology::{nerve, reduced_homology, BudgetExceeded, CollapseVerdict, Complex};

/// Outcome of a single check.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// A machine-readable check result.  Fail verdicts always carry a
/// counterexample in `witness` that replays through public operations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub instance: String,
    pub params: Value,
    pub verdict: Verdict,
    pub witness: Value,
    pub ms: u128,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    fn finish(
        check: &str,
        instance: &str,
        params: &Value,
        verdict: Verdict,
        witness: Value,
        started: Instant,
    ) -> CheckReport {
        CheckReport {
            check: check.to_string(),
            instance: instance.to_string(),
            params: params.clone(),
            verdict,
            witness,
            ms: started.elapsed().as_millis(),
        }
    }
}

/// The extra structure the harness needs on top of [`ExpansionInstance`]:
/// deterministic sampling, an orbit classifier backed by translators, and
/// restriction/union of maps for the type-vector gluing argument.
pub trait Checkable: ExpansionInstance + Sized {
    /// A full-support element to grow vertices from.
    fn base_elem(&self) -> Self::Elem;

    /// A random element; `full_image` selects the full-image class where the
    /// instance distinguishes one.
    fn sample_elem(&self, rng: &mut ChaCha8Rng, full_image: bool) -> Self::Elem;

    /// A random full-support member of Γ, as a map.
    fn sample_map(&self, rng: &mut ChaCha8Rng) -> Self::Map;

    /// Orbit classifier: equal keys must mean same Γ-orbit (each same-key
    /// pair is re-verified through [`ExpansionInstance::translator`]), and
    /// distinct keys must mean distinct orbits.
    fn orbit_key(&self, b: &Self::Elem) -> String;

    /// Restricts a map to the given piece of its domain; `None` if the piece
    /// is not covered by the domain.
    fn restrict_map(&self, s: &Self::Map, piece: &Support) -> Option<Self::Map>;

    /// The support of the image of `s`.
    fn image_support(&self, s: &Self::Map) -> Support;

    /// Glues maps with pairwise disjoint domains into one.
    fn union_maps(&self, parts: &[Self::Map]) -> Option<Self::Map>;

    fn invert_map(&self, s: &Self::Map) -> Self::Map;

    /// How `s` transports a piece of support: the image of the restriction.
    fn map_support(&self, s: &Self::Map, piece: &Support) -> Option<Support> {
        Some(self.image_support(&self.restrict_map(s, piece)?))
    }
}

impl Checkable for VInstance {
    fn base_elem(&self) -> VElement {
        VElement::top()
    }

    fn sample_elem(&self, rng: &mut ChaCha8Rng, full_image: bool) -> VElement {
        let leaves = rng.gen_range(1..=4);
        random_v_element(rng, leaves, full_image)
    }

    fn sample_map(&self, rng: &mut ChaCha8Rng) -> TableMap {
        let leaves = rng.gen_range(1..=4);
        random_v_map(rng, leaves)
    }

    fn orbit_key(&self, b: &VElement) -> String {
        match orbit_class(b) {
            OrbitClass::Full => "full".into(),
            OrbitClass::Proper => "proper".into(),
        }
    }

    fn restrict_map(&self, s: &TableMap, piece: &Support) -> Option<TableMap> {
        let Support::Cones(cs) = piece else {
            return None;
        };
        let restricted = s.restrict(cs.cones());
        let dom = Support::Cones(ConeSet::new(restricted.domain_cones()));
        (dom.key() == piece.key()).then_some(restricted)
    }

    fn image_support(&self, s: &TableMap) -> Support {
        Support::Cones(ConeSet::new(s.image_cones()))
    }

    fn union_maps(&self, parts: &[TableMap]) -> Option<TableMap> {
        TableMap::disjoint_union(parts).ok()
    }

    fn invert_map(&self, s: &TableMap) -> TableMap {
        s.inverse()
    }
}

impl Checkable for NVInstance {
    fn base_elem(&self) -> NVElement {
        NVElement::top(self.dim())
    }

    fn sample_elem(&self, rng: &mut ChaCha8Rng, full_image: bool) -> NVElement {
        let cells = rng.gen_range(1..=3);
        random_nv_element(rng, self.dim(), cells, full_image)
    }

    fn sample_map(&self, rng: &mut ChaCha8Rng) -> BoxMap {
        let cells = rng.gen_range(1..=3);
        random_nv_map(rng, self.dim(), cells)
    }

    fn orbit_key(&self, b: &NVElement) -> String {
        if b.table().is_full_image() {
            "full".into()
        } else {
            "proper".into()
        }
    }

    fn restrict_map(&self, s: &BoxMap, piece: &Support) -> Option<BoxMap> {
        let Support::Boxes(bs) = piece else {
            return None;
        };
        let restricted = s.restrict(bs.cells());
        let dom_cells: Vec<NBox> = restricted.rows().iter().map(|(d, _)| d.clone()).collect();
        let dom = Support::Boxes(BoxSet::new(self.dim(), dom_cells));
        (dom.key() == piece.key()).then_some(restricted)
    }

    fn image_support(&self, s: &BoxMap) -> Support {
        Support::Boxes(s.image_region())
    }

    fn union_maps(&self, parts: &[BoxMap]) -> Option<BoxMap> {
        BoxMap::disjoint_union(parts).ok()
    }

    fn invert_map(&self, s: &BoxMap) -> BoxMap {
        s.inverse()
    }
}

impl Checkable for RoverInstance {
    fn base_elem(&self) -> RoverElement {
        RoverElement::top()
    }

    fn sample_elem(&self, rng: &mut ChaCha8Rng, full_image: bool) -> RoverElement {
        let leaves = rng.gen_range(1..=3);
        random_rover_element(rng, leaves, 2, full_image)
    }

    fn sample_map(&self, rng: &mut ChaCha8Rng) -> RoverTable {
        let leaves = rng.gen_range(1..=3);
        random_rover_element(rng, leaves, 2, true).table().clone()
    }

    fn orbit_key(&self, b: &RoverElement) -> String {
        if b.table().is_full_image() {
            "full".into()
        } else {
            "proper".into()
        }
    }

    fn restrict_map(&self, s: &RoverTable, piece: &Support) -> Option<RoverTable> {
        let Support::Cones(cs) = piece else {
            return None;
        };
        let restricted = s.restrict(cs.cones());
        let dom = Support::Cones(ConeSet::new(restricted.domain_cones()));
        (dom.key() == piece.key()).then_some(restricted)
    }

    fn image_support(&self, s: &RoverTable) -> Support {
        Support::Cones(ConeSet::new(s.image_cones()))
    }

    fn union_maps(&self, parts: &[RoverTable]) -> Option<RoverTable> {
        let mut rows = Vec::new();
        for p in parts {
            rows.extend(p.rows().iter().cloned());
        }
        RoverTable::new(rows).ok()
    }

    fn invert_map(&self, s: &RoverTable) -> RoverTable {
        s.inverse()
    }
}

/// Shared toy-instance plumbing: a single interval run per map row.
macro_rules! toy_checkable_body {
    () => {
        fn sample_map(&self, rng: &mut ChaCha8Rng) -> RunMap {
            let st = self.stabilizer(&self.base());
            st.elements[rng.gen_range(0..st.elements.len())].clone()
        }

        fn orbit_key(&self, b: &Run) -> String {
            format!("len{}", b.len)
        }

        fn restrict_map(&self, s: &RunMap, piece: &Support) -> Option<RunMap> {
            let r = self.pattern_element(piece)?;
            let img = s.image_of(&r, self.atoms())?;
            // `image_of` works on unreduced indices; re-canonicalize so full
            // circles start at 0
            let img = self.run(img.start, img.len);
            Some(RunMap {
                rows: vec![(r, img)],
            })
        }

        fn image_support(&self, s: &RunMap) -> Support {
            let mut sup: Option<Support> = None;
            for (_, img) in &s.rows {
                let img = self.run(img.start, img.len);
                let piece = self.support(&img);
                sup = Some(match sup {
                    None => piece,
                    Some(acc) => acc.union(&piece),
                });
            }
            sup.expect("maps have at least one row")
        }

        fn union_maps(&self, parts: &[RunMap]) -> Option<RunMap> {
            let mut rows = Vec::new();
            for p in parts {
                rows.extend(p.rows.iter().cloned());
            }
            Some(RunMap { rows })
        }

        fn invert_map(&self, s: &RunMap) -> RunMap {
            RunMap {
                rows: s
                    .rows
                    .iter()
                    .map(|(a, b)| (self.run(b.start, b.len), self.run(a.start, a.len)))
                    .collect(),
            }
        }
    };
}

impl Checkable for SyntheticLinear {
    fn base_elem(&self) -> Run {
        self.base()
    }

    fn sample_elem(&self, rng: &mut ChaCha8Rng, full_image: bool) -> Run {
        if full_image {
            return self.base();
        }
        let n = self.atoms();
        let len = rng.gen_range(1..=n);
        let start = rng.gen_range(0..=n - len);
        self.run(start, len)
    }

    toy_checkable_body!();
}

impl Checkable for SyntheticCyclic {
    fn base_elem(&self) -> Run {
        self.base()
    }

    fn sample_elem(&self, rng: &mut ChaCha8Rng, full_image: bool) -> Run {
        if full_image {
            return self.base();
        }
        let n = self.atoms();
        let len = rng.gen_range(1..=n);
        let start = rng.gen_range(0..n);
        self.run(start, len)
    }

    toy_checkable_body!();
}

impl Checkable for ShyOracle {
    fn base_elem(&self) -> Run {
        self.base()
    }

    fn sample_elem(&self, rng: &mut ChaCha8Rng, full_image: bool) -> Run {
        if full_image {
            return self.base();
        }
        let n = self.atoms();
        let len = rng.gen_range(1..=n);
        let start = rng.gen_range(0..=n - len);
        Run { start, len }
    }

    fn sample_map(&self, rng: &mut ChaCha8Rng) -> RunMap {
        let st = self.stabilizer(&self.base());
        st.elements[rng.gen_range(0..st.elements.len())].clone()
    }

    fn orbit_key(&self, b: &Run) -> String {
        format!("len{}", b.len)
    }

    fn restrict_map(&self, _s: &RunMap, _piece: &Support) -> Option<RunMap> {
        None
    }

    fn image_support(&self, s: &RunMap) -> Support {
        let mut sup: Option<Support> = None;
        for (_, img) in &s.rows {
            let piece = self.support(img);
            sup = Some(match sup {
                None => piece,
                Some(acc) => acc.union(&piece),
            });
        }
        sup.expect("maps have at least one row")
    }

    fn union_maps(&self, _parts: &[RunMap]) -> Option<RunMap> {
        None
    }

    fn invert_map(&self, s: &RunMap) -> RunMap {
        RunMap {
            rows: s.rows.iter().map(|(a, b)| (*b, *a)).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Directedness: common upper bounds via pattern decay.
// ---------------------------------------------------------------------------

/// A certified common upper bound: `seq1` walks `v1` up to `upper` and
/// `seq2` walks `v2` up to `upper` (inclusive chains; empty when the start
/// already equals the bound).
#[derive(Clone, Debug)]
pub struct CommonBound<E> {
    pub upper: Vertex<E>,
    pub seq1: Vec<Vertex<E>>,
    pub seq2: Vec<Vertex<E>>,
}

/// Expands every element of `v` until it equals the canonical pattern
/// element on its support, so the vertex decays into pure support data.
/// Returns `None` when an element can neither certify nor expand.
fn pattern_vertex<I>(
    inst: &I,
    v: &Vertex<I::Elem>,
    fuel: &mut usize,
    budget: usize,
) -> Result<Option<Vertex<I::Elem>>, CoreError>
where
    I: ExpansionInstance,
{
    let mut work: Vec<I::Elem> = v.elems().to_vec();
    let mut done: Vec<I::Elem> = Vec::new();
    while let Some(e) = work.pop() {
        let sup = inst.support(&e);
        if let Some(p) = inst.pattern_element(&sup) {
            if inst.equal(&e, &p) {
                done.push(p);
                continue;
            }
        }
        if *fuel == 0 {
            return Err(CoreError::Budget(BudgetExceeded { budget }));
        }
        *fuel -= 1;
        let poset = inst.expansions(&e)?;
        let Some(node) = poset.nodes().iter().skip(1).max_by_key(|w| w.height()) else {
            return Ok(None);
        };
        work.extend(node.elems().iter().cloned());
    }
    Ok(Some(Vertex::new(inst, done)?))
}

fn cone_intersection(a: &Cone, b: &Cone) -> Option<Cone> {
    if a.0.is_prefix_of(&b.0) {
        Some(b.clone())
    } else if b.0.is_prefix_of(&a.0) {
        Some(a.clone())
    } else {
        None
    }
}

/// The intersection of two supports of the same shape, `None` when empty.
fn support_intersection(a: &Support, b: &Support) -> Option<Support> {
    match (a, b) {
        (Support::Cones(x), Support::Cones(y)) => {
            let mut out: Vec<Cone> = Vec::new();
            for c1 in x.cones() {
                for c2 in y.cones() {
                    if let Some(c) = cone_intersection(c1, c2) {
                        out.push(c);
                    }
                }
            }
            (!out.is_empty()).then(|| Support::Cones(ConeSet::new(out)))
        }
        (Support::Boxes(x), Support::Boxes(y)) => {
            let mut out: Vec<NBox> = Vec::new();
            for b1 in x.cells() {
                for b2 in y.cells() {
                    if let Some(c) = b1.intersect(b2) {
                        out.push(c);
                    }
                }
            }
            let n = x.dim();
            (!out.is_empty()).then(|| Support::Boxes(BoxSet::new(n, out)))
        }
        _ => None,
    }
}

/// One support per cone/cell, used when an intersection has no pattern form
/// as a whole (e.g. a non-contiguous union of interval atoms).
fn split_support(piece: &Support) -> Vec<Support> {
    match piece {
        Support::Cones(cs) => cs
            .cones()
            .iter()
            .map(|c| Support::Cones(ConeSet::new(vec![c.clone()])))
            .collect(),
        Support::Boxes(bs) => bs
            .cells()
            .iter()
            .map(|b| Support::Boxes(BoxSet::new(bs.dim(), vec![b.clone()])))
            .collect(),
    }
}

/// Searches for a common upper bound of `v1` and `v2` in the expansion
/// order, with replayable expansion sequences.
///
/// Strategy: handle equality and one-sided comparability directly; otherwise
/// decay both vertices to pattern form, take the common refinement of the
/// two support partitions (splitting non-pattern intersection pieces
/// per-cone), realize it as a vertex of pattern elements, and certify both
/// legs with [`expansion_leq`].  `Ok(None)` means no bound was found —
/// either the support unions differ (no bound exists) or the instance lacks
/// pattern forms.
pub fn common_upper_bound<I>(
    inst: &I,
    v1: &Vertex<I::Elem>,
    v2: &Vertex<I::Elem>,
    budget: usize,
) -> Result<Option<CommonBound<I::Elem>>, CoreError>
where
    I: ExpansionInstance,
{
    if v1.support_union().key() != v2.support_union().key() {
        return Ok(None);
    }
    if vertex_equal(inst, v1, v2) {
        return Ok(Some(CommonBound {
            upper: v1.clone(),
            seq1: Vec::new(),
            seq2: Vec::new(),
        }));
    }
    if let Some(seq) = expansion_leq(inst, v1, v2, budget)? {
        return Ok(Some(CommonBound {
            upper: v2.clone(),
            seq1: seq,
            seq2: Vec::new(),
        }));
    }
    if let Some(seq) = expansion_leq(inst, v2, v1, budget)? {
        return Ok(Some(CommonBound {
            upper: v1.clone(),
            seq1: Vec::new(),
            seq2: seq,
        }));
    }
    let mut fuel = budget;
    let Some(p1) = pattern_vertex(inst, v1, &mut fuel, budget)? else {
        return Ok(None);
    };
    let Some(p2) = pattern_vertex(inst, v2, &mut fuel, budget)? else {
        return Ok(None);
    };
    let mut elems: Vec<I::Elem> = Vec::new();
    for s1 in p1.supports() {
        for s2 in p2.supports() {
            let Some(piece) = support_intersection(s1, s2) else {
                continue;
            };
            match inst.pattern_element(&piece) {
                Some(e) => elems.push(e),
                None => {
                    for part in split_support(&piece) {
                        match inst.pattern_element(&part) {
                            Some(e) => elems.push(e),
                            None => return Ok(None),
                        }
                    }
                }
            }
        }
    }
    let upper = Vertex::new(inst, elems)?;
    let Some(seq1) = expansion_leq(inst, v1, &upper, budget)? else {
        return Ok(None);
    };
    let Some(seq2) = expansion_leq(inst, v2, &upper, budget)? else {
        return Ok(None);
    };
    Ok(Some(CommonBound { upper, seq1, seq2 }))
}

// ---------------------------------------------------------------------------
// Vertex generation.
// ---------------------------------------------------------------------------

/// All distinct vertices reachable from `v0` by at most `steps` elementary
/// expansions (including `v0` itself, first).
fn reachable_up<I>(
    inst: &I,
    v0: &Vertex<I::Elem>,
    steps: usize,
    budget: usize,
) -> Result<Vec<Vertex<I::Elem>>, CoreError>
where
    I: ExpansionInstance,
{
    let mut seen: Vec<Vertex<I::Elem>> = vec![v0.clone()];
    let mut frontier: Vec<Vertex<I::Elem>> = vec![v0.clone()];
    let mut used = 0usize;
    for _ in 0..steps {
        let mut next: Vec<Vertex<I::Elem>> = Vec::new();
        for v in &frontier {
            for (i, e) in v.elems().iter().enumerate() {
                let poset = inst.expansions(e)?;
                for node in poset.nodes().iter().skip(1) {
                    used += 1;
                    if used > budget {
                        return Err(CoreError::Budget(BudgetExceeded { budget }));
                    }
                    let mut elems: Vec<I::Elem> = Vec::new();
                    for (j, f) in v.elems().iter().enumerate() {
                        if j == i {
                            elems.extend(node.elems().iter().cloned());
                        } else {
                            elems.push(f.clone());
                        }
                    }
                    let w = Vertex::new(inst, elems)?;
                    if !seen.iter().any(|s| vertex_equal(inst, s, &w)) {
                        seen.push(w.clone());
                        next.push(w);
                    }
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(seen)
}

/// Grows a full-support vertex of height exactly `k` from the base element
/// by random elementary expansions that never overshoot.
pub fn grow_to_height<I>(
    inst: &I,
    k: usize,
    rng: &mut ChaCha8Rng,
    budget: usize,
) -> Result<Vertex<I::Elem>, CoreError>
where
    I: Checkable,
{
    let mut v = Vertex::singleton(inst, inst.base_elem());
    let mut used = 0usize;
    while v.height() < k {
        used += 1;
        if used > budget {
            return Err(CoreError::Budget(BudgetExceeded { budget }));
        }
        let gap = k - v.height();
        let mut moves: Vec<(usize, usize)> = Vec::new();
        for (i, e) in v.elems().iter().enumerate() {
            let poset = inst.expansions(e)?;
            for (j, node) in poset.nodes().iter().enumerate().skip(1) {
                if node.height() - 1 <= gap {
                    moves.push((i, j));
                }
            }
        }
        assert!(
            !moves.is_empty(),
            "the instance cannot reach height {k} from its base element"
        );
        let (i, j) = moves[rng.gen_range(0..moves.len())];
        let poset = inst.expansions(&v.elems()[i])?;
        let mut elems: Vec<I::Elem> = Vec::new();
        for (x, e) in v.elems().iter().enumerate() {
            if x == i {
                elems.extend(poset.node(j).elems().iter().cloned());
            } else {
                elems.push(e.clone());
            }
        }
        v = Vertex::new(inst, elems)?;
    }
    Ok(v)
}

fn move_vertex<I>(inst: &I, s: &I::Map, v: &Vertex<I::Elem>) -> Option<Vertex<I::Elem>>
where
    I: ExpansionInstance,
{
    let mut elems = Vec::with_capacity(v.height());
    for e in v.elems() {
        elems.push(inst.act(s, e)?);
    }
    Vertex::new(inst, elems).ok()
}

/// A random simplex of Δ: walks to a random vertex, then expands distinct
/// elements of it one production each, so every restriction chain stays
/// inside a single ℰ(b).  (Walk endpoints alone are only paths in the
/// 1-skeleton — the edge relation is not transitive.)
fn random_simplex<I>(inst: &I, rng: &mut ChaCha8Rng) -> Result<Vec<Vertex<I::Elem>>, CoreError>
where
    I: Checkable,
{
    let base = Vertex::singleton(inst, inst.base_elem());
    let walk = random_expansion_walk(inst, &base, rng.gen_range(0..=2), rng)?;
    let v = walk.last().expect("walks are nonempty").clone();
    let mut order: Vec<usize> = (0..v.height()).collect();
    for i in (1..order.len()).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let mut remaining = rng.gen_range(1..=v.height().min(3));
    let mut chain = vec![v.clone()];
    let mut cur = v.clone();
    for &pos in &order {
        if remaining == 0 {
            break;
        }
        let b = v.elems()[pos].clone();
        let poset = inst.expansions(&b)?;
        let Some(node) = poset.nodes().iter().skip(1).max_by_key(|w| w.height()) else {
            continue; // unsplittable element; try another
        };
        let key = inst.support(&b).key();
        let mut elems: Vec<I::Elem> = Vec::new();
        for e in cur.elems() {
            if inst.support(e).key() == key && inst.equal(e, &b) {
                elems.extend(node.elems().iter().cloned());
            } else {
                elems.push(e.clone());
            }
        }
        cur = Vertex::new(inst, elems)?;
        chain.push(cur.clone());
        remaining -= 1;
    }
    Ok(chain)
}

// ---------------------------------------------------------------------------
// The template bundle.
// ---------------------------------------------------------------------------

/// Runs the five template sub-checks and returns their reports sorted by
/// check id.  `depth` bounds the exhaustive enumeration from the base
/// element; `samples` sizes the random part.
///
/// Errors with [`CoreError::OracleIncomplete`] when the instance declares
/// its contraction oracle incomplete.
pub fn check_template<I>(
    inst: &I,
    depth: usize,
    samples: usize,
    seed: u64,
    budget: usize,
) -> Result<Vec<CheckReport>, CoreError>
where
    I: Checkable,
{
    if !inst.complete_contractions() {
        return Err(CoreError::OracleIncomplete(inst.id()));
    }
    let params = json!({"depth": depth, "samples": samples, "seed": seed, "budget": budget});
    let mut rng = sampling::rng(seed);
    let base = Vertex::singleton(inst, inst.base_elem());
    let reach = reachable_up(inst, &base, depth, budget)?;
    let mut reports = vec![
        template_directed(inst, &reach, samples, &mut rng, budget, &params)?,
        template_links(inst, &reach, samples, &mut rng, budget, &params)?,
        template_finite(inst, &reach, samples, &mut rng, &params)?,
        template_orbits(inst, samples, &mut rng, &params)?,
        template_constants(inst, &reach, &mut rng, budget, &params)?,
    ];
    reports.sort_by(|a, b| a.check.cmp(&b.check));
    Ok(reports)
}

/// Template (1): sampled full-support vertex pairs have a certified common
/// upper bound, replayed through `is_simplex` edge by edge.
fn template_directed<I>(
    inst: &I,
    reach: &[Vertex<I::Elem>],
    samples: usize,
    rng: &mut ChaCha8Rng,
    budget: usize,
    params: &Value,
) -> Result<CheckReport, CoreError>
where
    I: Checkable,
{
    let started = Instant::now();
    let id = inst.id();
    let mut pairs: Vec<(Vertex<I::Elem>, Vertex<I::Elem>)> = Vec::new();
    for v in reach.iter().take(6) {
        for w in reach.iter().take(6) {
            pairs.push((v.clone(), w.clone()));
        }
    }
    for _ in 0..samples {
        let a = random_expansion_walk(inst, &reach[0], rng.gen_range(0..=3), rng)?;
        let b = random_expansion_walk(inst, &reach[0], rng.gen_range(0..=3), rng)?;
        pairs.push((
            a.last().expect("walks are nonempty").clone(),
            b.last().expect("walks are nonempty").clone(),
        ));
    }
    let mut inconclusive = 0usize;
    let mut example = Value::Null;
    for (a, b) in &pairs {
        let bound = match common_upper_bound(inst, a, b, budget) {
            Ok(found) => found,
            Err(CoreError::Budget(_)) => {
                inconclusive += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let Some(bound) = bound else {
            let witness = json!({
                "reason": "no common upper bound found",
                "v1": inst.vertex_json(a),
                "v2": inst.vertex_json(b),
            });
            return Ok(CheckReport::finish(
                "template.directed",
                &id,
                params,
                Verdict::Fail,
                witness,
                started,
            ));
        };
        for (start, seq) in [(a, &bound.seq1), (b, &bound.seq2)] {
            if seq.is_empty() {
                continue;
            }
            let mut ok = vertex_equal(inst, &seq[0], start)
                && vertex_equal(inst, seq.last().expect("nonempty"), &bound.upper);
            for pair in seq.windows(2) {
                ok &= is_simplex(inst, &[pair[0].clone(), pair[1].clone()]);
            }
            if !ok {
                let witness = json!({
                    "reason": "expansion sequence failed replay",
                    "v1": inst.vertex_json(a),
                    "v2": inst.vertex_json(b),
                    "upper": inst.vertex_json(&bound.upper),
                });
                return Ok(CheckReport::finish(
                    "template.directed",
                    &id,
                    params,
                    Verdict::Fail,
                    witness,
                    started,
                ));
            }
        }
        if example.is_null() && !bound.seq1.is_empty() && !bound.seq2.is_empty() {
            example = json!({
                "v1": inst.vertex_json(a),
                "v2": inst.vertex_json(b),
                "upper": inst.vertex_json(&bound.upper),
                "seq1_len": bound.seq1.len(),
                "seq2_len": bound.seq2.len(),
            });
        }
    }
    let verdict = if inconclusive > 0 {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    let witness = json!({
        "pairs": pairs.len(),
        "budget_overruns": inconclusive,
        "example": example,
    });
    Ok(CheckReport::finish(
        "template.directed",
        &id,
        params,
        verdict,
        witness,
        started,
    ))
}

/// Template (2): for sampled pairs {b} ↗ v with {b} ≠ v, the relative
/// ascending link is contractible; passing requires a collapse certificate.
fn template_links<I>(
    inst: &I,
    reach: &[Vertex<I::Elem>],
    samples: usize,
    rng: &mut ChaCha8Rng,
    budget: usize,
    params: &Value,
) -> Result<CheckReport, CoreError>
where
    I: Checkable,
{
    let started = Instant::now();
    let id = inst.id();
    let base = &reach[0];
    let mut pairs: Vec<(Vertex<I::Elem>, Vertex<I::Elem>)> = Vec::new();
    for v in reach.iter().skip(1).take(12) {
        pairs.push((base.clone(), v.clone()));
    }
    for s in 0..samples {
        let b = inst.sample_elem(rng, s % 2 == 0);
        let sv = Vertex::singleton(inst, b);
        let walk = random_expansion_walk(inst, &sv, rng.gen_range(1..=2), rng)?;
        let v = walk.last().expect("walks are nonempty").clone();
        if !vertex_equal(inst, &sv, &v) {
            pairs.push((sv, v));
        }
    }
    let mut uncertified = 0usize;
    let mut checked = 0usize;
    for (sv, v) in &pairs {
        let link = relative_ascending_link(inst, sv, v, budget)?;
        let deg = link.chain.complex.dim().unwrap_or(0);
        let report = reduced_homology(&link.chain.complex, deg);
        let contractible_homology = !report.empty
            && report.components == 1
            && report.reduced_betti_gf2.iter().all(|&b| b == 0)
            && report.reduced_betti_q.iter().all(|&b| b == 0);
        if !contractible_homology {
            let witness = json!({
                "reason": "relative ascending link is not contractible",
                "b": inst.vertex_json(sv),
                "v": inst.vertex_json(v),
                "components": report.components,
                "reduced_betti_gf2": report.reduced_betti_gf2,
            });
            return Ok(CheckReport::finish(
                "template.links",
                &id,
                params,
                Verdict::Fail,
                witness,
                started,
            ));
        }
        if report.collapsible != CollapseVerdict::Collapsible {
            uncertified += 1;
        }
        checked += 1;
    }
    let verdict = if checked == 0 || uncertified > 0 {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    let witness = json!({
        "pairs": checked,
        "collapse_uncertified": uncertified,
    });
    Ok(CheckReport::finish(
        "template.links",
        &id,
        params,
        verdict,
        witness,
        started,
    ))
}

/// Template (3): expansion posets are finite and well-formed, and
/// stabilizers are finite groups (verified multiplication table) whose
/// elements fix the element.
fn template_finite<I>(
    inst: &I,
    reach: &[Vertex<I::Elem>],
    samples: usize,
    rng: &mut ChaCha8Rng,
    params: &Value,
) -> Result<CheckReport, CoreError>
where
    I: Checkable,
{
    let started = Instant::now();
    let id = inst.id();
    let mut elems: Vec<I::Elem> = Vec::new();
    for v in reach.iter().take(8) {
        elems.extend(v.elems().iter().cloned());
    }
    for s in 0..samples {
        elems.push(inst.sample_elem(rng, s % 2 == 0));
    }
    let mut max_poset = 0usize;
    let mut stab_kinds: BTreeMap<String, usize> = BTreeMap::new();
    for b in &elems {
        if let Err(msg) = check_expansion_axioms(inst, b) {
            let witness = json!({
                "reason": msg,
                "element": inst.elem_json(b),
            });
            return Ok(CheckReport::finish(
                "template.finite",
                &id,
                params,
                Verdict::Fail,
                witness,
                started,
            ));
        }
        let poset = inst.expansions(b)?;
        max_poset = max_poset.max(poset.len());
        let st = inst.stabilizer(b);
        let n = st.order();
        let mut law_violation: Option<String> = None;
        if st.table.len() != n || st.table.iter().any(|row| row.len() != n) {
            law_violation = Some("multiplication table is not square".into());
        }
        for i in 0..n {
            if law_violation.is_some() {
                break;
            }
            if st.table[0][i] != i || st.table[i][0] != i {
                law_violation = Some("element 0 is not an identity".into());
                break;
            }
            let row: BTreeSet<usize> = st.table[i].iter().copied().collect();
            let col: BTreeSet<usize> = (0..n).map(|j| st.table[j][i]).collect();
            if row.len() != n || col.len() != n {
                law_violation = Some("table is not a Latin square".into());
                break;
            }
        }
        'assoc: for i in 0..n {
            if law_violation.is_some() {
                break;
            }
            for j in 0..n {
                for k in 0..n {
                    if st.table[st.table[i][j]][k] != st.table[i][st.table[j][k]] {
                        law_violation = Some(format!("associativity fails at ({i},{j},{k})"));
                        break 'assoc;
                    }
                }
            }
        }
        if law_violation.is_none() {
            for (gi, g) in st.elements.iter().enumerate() {
                let fixed = inst.act(g, b).map(|c| inst.equal(&c, b));
                if fixed != Some(true) {
                    law_violation = Some(format!("stabilizer element {gi} does not fix b"));
                    break;
                }
            }
        }
        if let Some(reason) = law_violation {
            let witness = json!({
                "reason": reason,
                "element": inst.elem_json(b),
                "stabilizer": st.description,
            });
            return Ok(CheckReport::finish(
                "template.finite",
                &id,
                params,
                Verdict::Fail,
                witness,
                started,
            ));
        }
        *stab_kinds.entry(format!("{} (order {})", st.description, n)).or_insert(0) += 1;
    }
    let witness = json!({
        "elements": elems.len(),
        "max_poset_size": max_poset,
        "stabilizers": stab_kinds,
    });
    Ok(CheckReport::finish(
        "template.finite",
        &id,
        params,
        Verdict::Pass,
        witness,
        started,
    ))
}

/// Template (4): the orbit classifier is consistent — every same-key pair
/// gets a translator that demonstrably carries one element to the other, and
/// no translator crosses keys.
fn template_orbits<I>(
    inst: &I,
    samples: usize,
    rng: &mut ChaCha8Rng,
    params: &Value,
) -> Result<CheckReport, CoreError>
where
    I: Checkable,
{
    let started = Instant::now();
    let id = inst.id();
    let mut by_key: BTreeMap<String, Vec<I::Elem>> = BTreeMap::new();
    by_key
        .entry(inst.orbit_key(&inst.base_elem()))
        .or_default()
        .push(inst.base_elem());
    for s in 0..samples.max(4) {
        let b = inst.sample_elem(rng, s % 2 == 0);
        by_key.entry(inst.orbit_key(&b)).or_default().push(b);
    }
    let mut verified_pairs = 0usize;
    let mut missing: Option<Value> = None;
    for (key, members) in &by_key {
        for pair in members.windows(2).take(20) {
            let (a, b) = (&pair[0], &pair[1]);
            match inst.translator(a, b) {
                None => {
                    missing = Some(json!({
                        "key": key,
                        "from": inst.elem_json(a),
                        "to": inst.elem_json(b),
                    }));
                }
                Some(t) => {
                    let carried = inst.act(&t, a).map(|c| inst.equal(&c, b));
                    if carried != Some(true) {
                        let witness = json!({
                            "reason": "translator does not carry the element",
                            "key": key,
                            "from": inst.elem_json(a),
                            "to": inst.elem_json(b),
                        });
                        return Ok(CheckReport::finish(
                            "template.orbits",
                            &id,
                            params,
                            Verdict::Fail,
                            witness,
                            started,
                        ));
                    }
                    verified_pairs += 1;
                }
            }
        }
    }
    // distinct keys must not be translatable into each other
    let keys: Vec<&String> = by_key.keys().collect();
    for i in 0..keys.len() {
        for j in (i + 1)..keys.len() {
            let a = &by_key[keys[i]][0];
            let b = &by_key[keys[j]][0];
            if let Some(t) = inst.translator(a, b) {
                if inst.act(&t, a).map(|c| inst.equal(&c, b)) == Some(true) {
                    let witness = json!({
                        "reason": "translator crosses orbit keys",
                        "keys": [keys[i], keys[j]],
                        "from": inst.elem_json(a),
                        "to": inst.elem_json(b),
                    });
                    return Ok(CheckReport::finish(
                        "template.orbits",
                        &id,
                        params,
                        Verdict::Fail,
                        witness,
                        started,
                    ));
                }
            }
        }
    }
    let histogram: BTreeMap<&String, usize> =
        by_key.iter().map(|(k, v)| (k, v.len())).collect();
    let verdict = if missing.is_some() {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    let witness = json!({
        "count": by_key.len(),
        "orbits": histogram,
        "translated_pairs": verified_pairs,
        "missing_translator": missing,
    });
    Ok(CheckReport::finish(
        "template.orbits",
        &id,
        params,
        verdict,
        witness,
        started,
    ))
}

/// Template (5): expansion posets respect the bound C₀ on vertex sizes, and
/// every reachable vertex of height ≥ C₁ has a nonempty descending link.
fn template_constants<I>(
    inst: &I,
    reach: &[Vertex<I::Elem>],
    _rng: &mut ChaCha8Rng,
    budget: usize,
    params: &Value,
) -> Result<CheckReport, CoreError>
where
    I: Checkable,
{
    let started = Instant::now();
    let id = inst.id();
    let c0 = inst.c0();
    let c1 = inst.c1();
    let mut max_height = 0usize;
    let mut contraction_example = Value::Null;
    for v in reach.iter().take(10) {
        for b in v.elems() {
            let poset = inst.expansions(b)?;
            for node in poset.nodes() {
                max_height = max_height.max(node.height());
                if node.height() > c0 {
                    let witness = json!({
                        "reason": "expansion node exceeds C0",
                        "element": inst.elem_json(b),
                        "node_height": node.height(),
                        "c0": c0,
                    });
                    return Ok(CheckReport::finish(
                        "template.constants",
                        &id,
                        params,
                        Verdict::Fail,
                        witness,
                        started,
                    ));
                }
            }
            if contraction_example.is_null() {
                if let Some(node) = poset.nodes().iter().skip(1).max_by_key(|w| w.height()) {
                    let back = inst.contractions(node);
                    if back.iter().any(|c| inst.equal(c, b)) {
                        contraction_example = json!({
                            "vertex": inst.vertex_json(node),
                            "contracts_to": inst.elem_json(b),
                        });
                    }
                }
            }
        }
    }
    let mut rich_checked = 0usize;
    for v in reach.iter().filter(|v| v.height() >= c1).take(10) {
        let link = descending_link(inst, v, budget)?;
        if link.vertices.is_empty() {
            let witness = json!({
                "reason": "vertex at or above C1 has empty descending link",
                "vertex": inst.vertex_json(v),
                "c1": c1,
            });
            return Ok(CheckReport::finish(
                "template.constants",
                &id,
                params,
                Verdict::Fail,
                witness,
                started,
            ));
        }
        rich_checked += 1;
    }
    let witness = json!({
        "c0": c0,
        "c1": c1,
        "max_expansion_height": max_height,
        "rich_vertices_checked": rich_checked,
        "contraction_example": contraction_example,
    });
    Ok(CheckReport::finish(
        "template.constants",
        &id,
        params,
        Verdict::Pass,
        witness,
        started,
    ))
}

// ---------------------------------------------------------------------------
// Descending-link connectivity bounds.
// ---------------------------------------------------------------------------

/// The height threshold above which the descending link of a height-k vertex
/// is guaranteed homologically n-connected, per the instance kind.  `None`
/// when the theorem makes no claim for this n.
pub fn descending_threshold(kind: Kind, n: i64, c0: usize, c1: usize) -> Option<i64> {
    let c0 = c0 as i64;
    let c1 = c1 as i64;
    match kind {
        Kind::Linear => (n >= -1).then(|| (n + 2) * c1 + (n + 1) * c0 - (n + 1)),
        Kind::Cyclic => (n >= 0).then(|| (n + 2) * c1 + (n + 2) * c0 - (n + 2)),
        Kind::Permutational => (n >= 0).then(|| (2 * n + 2) * c0 + c1),
    }
}

/// Builds the descending link of a sampled height-`k` full-support vertex
/// and asserts the connectivity bound whenever `k` meets the threshold for
/// `n`; below the threshold the connectivity is only reported.  The link
/// must be nonempty whenever k ≥ C₁.
pub fn check_descending_bound<I>(
    inst: &I,
    k: usize,
    n: i64,
    seed: u64,
    budget: usize,
) -> Result<CheckReport, CoreError>
where
    I: Checkable,
{
    let started = Instant::now();
    let id = inst.id();
    let params = json!({"k": k, "n": n, "seed": seed, "budget": budget});
    let mut rng = sampling::rng(seed);
    let v = grow_to_height(inst, k, &mut rng, budget)?;
    let link = descending_link(inst, &v, budget)?;
    let threshold = descending_threshold(inst.kind(), n, inst.c0(), inst.c1());
    let asserted = matches!(threshold, Some(t) if (k as i64) >= t);
    let deg = (n.max(0) as usize) + 1;
    let report = reduced_homology(&link.complex, deg);
    if k >= inst.c1() && report.empty {
        let witness = json!({
            "reason": "descending link is empty at height >= C1",
            "vertex": inst.vertex_json(&v),
        });
        return Ok(CheckReport::finish(
            "bound", &id, &params, Verdict::Fail, witness, started,
        ));
    }
    if asserted && !report.homologically_connected_through(n) {
        let witness = json!({
            "reason": "link misses the asserted connectivity",
            "vertex": inst.vertex_json(&v),
            "threshold": threshold,
            "components": report.components,
            "reduced_betti_gf2": report.reduced_betti_gf2,
            "reduced_betti_q": report.reduced_betti_q,
        });
        return Ok(CheckReport::finish(
            "bound", &id, &params, Verdict::Fail, witness, started,
        ));
    }
    let witness = json!({
        "vertex_height": k,
        "link_vertices": link.vertices.len(),
        "threshold": threshold,
        "asserted": asserted,
        "components": report.components,
        "reduced_betti_gf2": report.reduced_betti_gf2,
        "reduced_betti_q": report.reduced_betti_q,
        "nonempty": !report.empty,
    });
    Ok(CheckReport::finish(
        "bound", &id, &params, Verdict::Pass, witness, started,
    ))
}

// ---------------------------------------------------------------------------
// Covers and nerves.
// ---------------------------------------------------------------------------

/// Verifies, for a sampled height-`k` vertex: every descending-link vertex
/// respects some standard cover partition; each partitioned link equals the
/// respect-filter of the full link; intersections of cover members obey the
/// partition-meet formula; and (permutational case) the nerve is a full
/// simplex.  Requires k > C₀.
pub fn check_cover_and_nerve<I>(
    inst: &I,
    k: usize,
    samples: usize,
    seed: u64,
    budget: usize,
) -> Result<CheckReport, CoreError>
where
    I: Checkable,
{
    let started = Instant::now();
    let id = inst.id();
    let params = json!({"k": k, "samples": samples, "seed": seed, "budget": budget});
    if k <= inst.c0() {
        return Err(CoreError::TooSmall { k, c0: inst.c0() });
    }
    let mut rng = sampling::rng(seed);
    let v = grow_to_height(inst, k, &mut rng, budget)?;
    let link = descending_link(inst, &v, budget)?;
    let cover = standard_cover(k, inst.c0(), inst.c1(), inst.kind())?;
    for u in &link.vertices {
        if !cover.iter().any(|p| respects_partition(inst, u, &v, p)) {
            let witness = json!({
                "reason": "link vertex respects no cover partition",
                "vertex": inst.vertex_json(&v),
                "link_vertex": inst.vertex_json(u),
            });
            return Ok(CheckReport::finish(
                "cover", &id, &params, Verdict::Fail, witness, started,
            ));
        }
    }
    let mut members: Vec<Complex> = Vec::new();
    let mut member_labels: Vec<BTreeSet<String>> = Vec::new();
    for p in &cover {
        let pl = partitioned_from_full(inst, &v, &link, p)?;
        let labels: BTreeSet<String> = pl.complex.labels().iter().cloned().collect();
        for u in &link.vertices {
            let respected = respects_partition(inst, u, &v, p);
            let kept = labels.contains(&vertex_label(inst, u));
            if respected != kept {
                let witness = json!({
                    "reason": "partitioned link disagrees with the respect filter",
                    "vertex": inst.vertex_json(&v),
                    "link_vertex": inst.vertex_json(u),
                    "partition": p.blocks(),
                });
                return Ok(CheckReport::finish(
                    "cover", &id, &params, Verdict::Fail, witness, started,
                ));
            }
        }
        member_labels.push(labels);
        members.push(pl.complex);
    }
    // intersection formula against partition meets, on all or sampled pairs
    let mut pair_indices: Vec<(usize, usize)> = Vec::new();
    if cover.len() <= 10 {
        for i in 0..cover.len() {
            for j in (i + 1)..cover.len() {
                pair_indices.push((i, j));
            }
        }
    } else {
        for _ in 0..samples.max(1) {
            let i = rng.gen_range(0..cover.len());
            let j = rng.gen_range(0..cover.len());
            if i != j {
                pair_indices.push((i.min(j), i.max(j)));
            }
        }
    }
    let mut meets_checked = 0usize;
    for (i, j) in pair_indices {
        let meet = partition_meet(&cover[i], &cover[j])?;
        let ml = partitioned_from_full(inst, &v, &link, &meet)?;
        let meet_labels: BTreeSet<String> = ml.complex.labels().iter().cloned().collect();
        let expected: BTreeSet<String> = member_labels[i]
            .intersection(&member_labels[j])
            .cloned()
            .collect();
        if meet_labels != expected {
            let witness = json!({
                "reason": "intersection formula fails",
                "vertex": inst.vertex_json(&v),
                "partitions": [cover[i].blocks(), cover[j].blocks()],
            });
            return Ok(CheckReport::finish(
                "cover", &id, &params, Verdict::Fail, witness, started,
            ));
        }
        meets_checked += 1;
    }
    let nerve_cx = nerve(&members, None, budget).map_err(CoreError::Budget)?;
    let nonempty_members = members.iter().filter(|m| !m.is_empty()).count();
    let full_simplex = nonempty_members > 0
        && nerve_cx.maximal_simplices().len() == 1
        && nerve_cx.dim() == Some(nonempty_members - 1);
    // guaranteed nerve shape: every member is nonempty once k ≥ C0 + C1 (a
    // complementary block of ≥ C1 elements survives)
    if k >= inst.c0() + inst.c1() && nonempty_members != members.len() {
        let empty_at = members.iter().position(Complex::is_empty);
        let witness = json!({
            "reason": "cover member is empty despite k >= C0 + C1",
            "vertex": inst.vertex_json(&v),
            "partition": empty_at.map(|i| cover[i].blocks().to_vec()),
        });
        return Ok(CheckReport::finish(
            "cover", &id, &params, Verdict::Fail, witness, started,
        ));
    }
    // t-fold intersections are nonempty whenever k ≥ tC0 + C1
    // (permutational) or the partitions leave a common tail of ≥ C1
    // elements (linear, where k ≥ C0 + 2C1 − 1 makes the nerve a full
    // simplex); certify by replaying sampled collections through meets
    let mut skeleton_checked = 0usize;
    if inst.kind() == Kind::Permutational && inst.c0() > 0 {
        let t_max = ((k - inst.c1()) / inst.c0()).min(cover.len());
        for t in 2..=t_max.min(4) {
            for _ in 0..samples.max(1).min(8) {
                let mut picks: Vec<usize> = (0..cover.len()).collect();
                for i in (1..picks.len()).rev() {
                    let j = rng.gen_range(0..=i);
                    picks.swap(i, j);
                }
                picks.truncate(t);
                let mut meet = cover[picks[0]].clone();
                for &i in &picks[1..] {
                    meet = partition_meet(&meet, &cover[i])?;
                }
                let ml = partitioned_from_full(inst, &v, &link, &meet)?;
                if ml.complex.is_empty() {
                    let witness = json!({
                        "reason": "guaranteed nerve simplex has empty intersection",
                        "vertex": inst.vertex_json(&v),
                        "partitions": picks.iter().map(|&i| cover[i].blocks().to_vec()).collect::<Vec<_>>(),
                    });
                    return Ok(CheckReport::finish(
                        "cover", &id, &params, Verdict::Fail, witness, started,
                    ));
                }
                skeleton_checked += 1;
            }
        }
    }
    if inst.kind() == Kind::Linear && k + 1 >= inst.c0() + 2 * inst.c1() {
        // total intersection is nonempty: the common tail has ≥ C1 elements,
        // so the nerve must be the full simplex on the cover
        let mut meet = cover[0].clone();
        for p in &cover[1..] {
            meet = partition_meet(&meet, p)?;
        }
        let ml = partitioned_from_full(inst, &v, &link, &meet)?;
        if ml.complex.is_empty() || !full_simplex {
            let witness = json!({
                "reason": "linear nerve is not a full simplex despite k >= C0 + 2C1 - 1",
                "vertex": inst.vertex_json(&v),
                "total_meet_empty": ml.complex.is_empty(),
            });
            return Ok(CheckReport::finish(
                "cover", &id, &params, Verdict::Fail, witness, started,
            ));
        }
        skeleton_checked += 1;
    }
    let witness = json!({
        "vertex_height": k,
        "cover_size": cover.len(),
        "link_vertices": link.vertices.len(),
        "meets_checked": meets_checked,
        "skeleton_checked": skeleton_checked,
        "nerve_full_simplex": full_simplex,
        "nerve_components": nerve_cx.components(),
    });
    Ok(CheckReport::finish(
        "cover", &id, &params, Verdict::Pass, witness, started,
    ))
}

// ---------------------------------------------------------------------------
// Join connectivity.
// ---------------------------------------------------------------------------

/// The largest n ≤ `cap` through which the complex is homologically
/// connected (−2 for the empty complex).
fn homological_connectivity(cx: &Complex, cap: i64) -> i64 {
    if cx.is_empty() {
        return -2;
    }
    let deg = (cap.max(0) as usize) + 1;
    let report = reduced_homology(cx, deg);
    let mut n = -2i64;
    while n < cap && report.homologically_connected_through(n + 1) {
        n += 1;
    }
    n
}

/// Random join trials: factors with measured homological connectivity nᵢ
/// joined together must be (Σnᵢ + 2m − 2)-connected.
pub fn check_join_lemma(trials: usize, seed: u64, budget: usize) -> CheckReport {
    let started = Instant::now();
    let params = json!({"trials": trials, "seed": seed, "budget": budget});
    let mut rng = sampling::rng(seed);
    let mut overruns = 0usize;
    let mut max_bound = i64::MIN;
    for _ in 0..trials {
        let m = rng.gen_range(2..=3);
        let factors: Vec<Complex> = (0..m).map(|_| random_complex(&mut rng, 4)).collect();
        let conns: Vec<i64> = factors
            .iter()
            .map(|f| homological_connectivity(f, 1))
            .collect();
        let bound = conns.iter().sum::<i64>() + 2 * (m as i64) - 2;
        let join = match Complex::join_all(&factors, budget) {
            Ok(j) => j,
            Err(_) => {
                overruns += 1;
                continue;
            }
        };
        let deg = (bound.max(0) as usize) + 1;
        let report = reduced_homology(&join, deg);
        if !report.homologically_connected_through(bound) {
            let witness = json!({
                "reason": "join misses the connectivity bound",
                "factors": factors.iter().map(|f| f.maximal_simplices()).collect::<Vec<_>>(),
                "factor_connectivities": conns,
                "bound": bound,
                "join_components": report.components,
                "join_betti_gf2": report.reduced_betti_gf2,
            });
            return CheckReport::finish(
                "join", "synthetic", &params, Verdict::Fail, witness, started,
            );
        }
        max_bound = max_bound.max(bound);
    }
    let verdict = if overruns > 0 {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    let witness = json!({
        "trials": trials,
        "budget_overruns": overruns,
        "max_bound_checked": if max_bound == i64::MIN { Value::Null } else { json!(max_bound) },
    });
    CheckReport::finish("join", "synthetic", &params, verdict, witness, started)
}

// ---------------------------------------------------------------------------
// Ascending factorizations.
// ---------------------------------------------------------------------------

/// Certifies the product structure of sampled ascending stars (the
/// order-isomorphism onto the product of the element posets), compares the
/// ascending-link chain complex with its abstract join model homologically,
/// and spot-checks relative links.
pub fn check_ascending_factorizations<I>(
    inst: &I,
    samples: usize,
    seed: u64,
    budget: usize,
) -> Result<CheckReport, CoreError>
where
    I: Checkable,
{
    let started = Instant::now();
    let id = inst.id();
    let params = json!({"samples": samples, "seed": seed, "budget": budget});
    let mut rng = sampling::rng(seed);
    let base = Vertex::singleton(inst, inst.base_elem());
    let mut largest = json!(null);
    let mut relative_checked = 0usize;
    for s in 0..samples.max(1) {
        let steps = if s == 0 { 2 } else { rng.gen_range(0..=2) };
        let walk = random_expansion_walk(inst, &base, steps, &mut rng)?;
        let v = walk.last().expect("walks are nonempty").clone();
        // skip vertices with unexpandable elements: their punctured factor is
        // empty and the join model degenerates
        let mut expandable = true;
        for e in v.elems() {
            if inst.expansions(e)?.len() == 1 {
                expandable = false;
            }
        }
        if !expandable {
            continue;
        }
        let star = ascending_star(inst, &v, budget)?;
        if let Err(reason) = star.certificate_ok(inst) {
            let witness = json!({
                "reason": reason,
                "vertex": inst.vertex_json(&v),
            });
            return Ok(CheckReport::finish(
                "ascend", &id, &params, Verdict::Fail, witness, started,
            ));
        }
        let expected: usize = star.factors.iter().map(|f| f.len()).product();
        if star.nodes.len() != expected {
            let witness = json!({
                "reason": "star size differs from the product of poset sizes",
                "vertex": inst.vertex_json(&v),
                "nodes": star.nodes.len(),
                "expected": expected,
            });
            return Ok(CheckReport::finish(
                "ascend", &id, &params, Verdict::Fail, witness, started,
            ));
        }
        if largest.is_null() || star.nodes.len() > largest["nodes"].as_u64().unwrap_or(0) as usize
        {
            largest = json!({
                "height": v.height(),
                "nodes": star.nodes.len(),
                "factor_sizes": star.factors.iter().map(|f| f.len()).collect::<Vec<_>>(),
            });
        }
        let link = ascending_link(inst, &v, budget)?;
        let deg = 3usize;
        let chain_h = reduced_homology(&link.chain.complex, deg);
        let model_h = reduced_homology(&link.join_model, deg);
        let agree = chain_h.components == model_h.components
            && chain_h.reduced_betti_gf2 == model_h.reduced_betti_gf2
            && chain_h.reduced_betti_q == model_h.reduced_betti_q
            && chain_h.empty == model_h.empty;
        if !agree {
            let witness = json!({
                "reason": "ascending link disagrees with its join model",
                "vertex": inst.vertex_json(&v),
                "chain_betti_gf2": chain_h.reduced_betti_gf2,
                "model_betti_gf2": model_h.reduced_betti_gf2,
            });
            return Ok(CheckReport::finish(
                "ascend", &id, &params, Verdict::Fail, witness, started,
            ));
        }
        // relative variant: expand v further and compare against the target
        let upwalk = random_expansion_walk(inst, &v, rng.gen_range(1..=2), &mut rng)?;
        let vpp = upwalk.last().expect("walks are nonempty").clone();
        if !vertex_equal(inst, &v, &vpp) {
            let rel = relative_ascending_link(inst, &v, &vpp, budget)?;
            for u in rel.chain.vertices.iter().take(4) {
                if expansion_leq(inst, u, &vpp, budget)?.is_none() {
                    let witness = json!({
                        "reason": "relative link node does not expand to the target",
                        "vertex": inst.vertex_json(&v),
                        "target": inst.vertex_json(&vpp),
                        "node": inst.vertex_json(u),
                    });
                    return Ok(CheckReport::finish(
                        "ascend", &id, &params, Verdict::Fail, witness, started,
                    ));
                }
            }
            let rel_chain = reduced_homology(&rel.chain.complex, deg);
            let rel_model = reduced_homology(&rel.join_model, deg);
            let agree = rel_chain.components == rel_model.components
                && rel_chain.reduced_betti_gf2 == rel_model.reduced_betti_gf2
                && rel_chain.reduced_betti_q == rel_model.reduced_betti_q
                && rel_chain.empty == rel_model.empty;
            if !agree {
                let witness = json!({
                    "reason": "relative ascending link disagrees with its join model",
                    "vertex": inst.vertex_json(&v),
                    "target": inst.vertex_json(&vpp),
                });
                return Ok(CheckReport::finish(
                    "ascend", &id, &params, Verdict::Fail, witness, started,
                ));
            }
            relative_checked += 1;
        }
    }
    let witness = json!({
        "samples": samples.max(1),
        "largest_star": largest,
        "relative_checked": relative_checked,
    });
    Ok(CheckReport::finish(
        "ascend", &id, &params, Verdict::Pass, witness, started,
    ))
}

// ---------------------------------------------------------------------------
// The action.
// ---------------------------------------------------------------------------

/// Verifies that sampled full-support maps act by simplicial automorphisms:
/// simplices map to simplices with heights preserved, supports transform as
/// the map image, inverses round-trip, filtration slices stay within
/// dimension and are preserved, and equal type vectors admit a glued
/// translator carrying one vertex to the other.
pub fn check_action<I>(
    inst: &I,
    samples: usize,
    seed: u64,
    budget: usize,
) -> Result<CheckReport, CoreError>
where
    I: Checkable,
{
    let started = Instant::now();
    let id = inst.id();
    let params = json!({"samples": samples, "seed": seed, "budget": budget});
    let mut rng = sampling::rng(seed);
    let base = Vertex::singleton(inst, inst.base_elem());
    let mut glued = 0usize;
    let mut skipped_type_vectors = 0usize;
    let mut missing_translators = 0usize;
    for s in 0..samples.max(1) {
        let map = inst.sample_map(&mut rng);
        let chain = dedup_vertices(inst, random_simplex(inst, &mut rng)?);
        if !is_simplex(inst, &chain) {
            let witness = json!({
                "reason": "constructed chain is not a simplex",
                "vertices": chain.iter().map(|v| inst.vertex_json(v)).collect::<Vec<_>>(),
            });
            return Ok(CheckReport::finish(
                "action", &id, &params, Verdict::Fail, witness, started,
            ));
        }
        let mut moved: Vec<Vertex<I::Elem>> = Vec::with_capacity(chain.len());
        for v in &chain {
            match move_vertex(inst, &map, v) {
                Some(w) => moved.push(w),
                None => {
                    let witness = json!({
                        "reason": "full-support map failed to act on a vertex",
                        "map": format!("{map:?}"),
                        "vertex": inst.vertex_json(v),
                    });
                    return Ok(CheckReport::finish(
                        "action", &id, &params, Verdict::Fail, witness, started,
                    ));
                }
            }
        }
        let heights_ok = chain
            .iter()
            .zip(&moved)
            .all(|(a, b)| a.height() == b.height());
        if !heights_ok || !is_simplex(inst, &moved) {
            let witness = json!({
                "reason": "image of a simplex is not a height-preserving simplex",
                "map": format!("{map:?}"),
                "vertices": chain.iter().map(|v| inst.vertex_json(v)).collect::<Vec<_>>(),
                "images": moved.iter().map(|v| inst.vertex_json(v)).collect::<Vec<_>>(),
            });
            return Ok(CheckReport::finish(
                "action", &id, &params, Verdict::Fail, witness, started,
            ));
        }
        let inv = inst.invert_map(&map);
        for (v, w) in chain.iter().zip(&moved) {
            for (e, f) in v.elems().iter().zip(w.elems()) {
                let expected = inst.map_support(&map, &inst.support(e));
                if expected.map(|s| s.key()) != Some(inst.support(f).key()) {
                    let witness = json!({
                        "reason": "support does not transform as the map image",
                        "map": format!("{map:?}"),
                        "element": inst.elem_json(e),
                        "image": inst.elem_json(f),
                    });
                    return Ok(CheckReport::finish(
                        "action", &id, &params, Verdict::Fail, witness, started,
                    ));
                }
                let back = inst.act(&inv, f).map(|c| inst.equal(&c, e));
                if back != Some(true) {
                    let witness = json!({
                        "reason": "inverse does not round-trip",
                        "map": format!("{map:?}"),
                        "element": inst.elem_json(e),
                    });
                    return Ok(CheckReport::finish(
                        "action", &id, &params, Verdict::Fail, witness, started,
                    ));
                }
            }
        }
        // filtration slice: bounded dimension and preserved by the action
        let top = chain.last().expect("chains are nonempty");
        let n_cap = top.height();
        let slice = filtration_slice(inst, &[top.clone()], n_cap, 1, budget)?;
        if let Some(d) = slice.complex.dim() {
            if d + 1 > n_cap {
                let witness = json!({
                    "reason": "filtration slice exceeds its dimension bound",
                    "vertex": inst.vertex_json(top),
                    "dim": d,
                    "n": n_cap,
                });
                return Ok(CheckReport::finish(
                    "action", &id, &params, Verdict::Fail, witness, started,
                ));
            }
        }
        for u in slice.vertices.iter().take(6) {
            match move_vertex(inst, &map, u) {
                Some(w) if w.height() <= n_cap => {}
                _ => {
                    let witness = json!({
                        "reason": "action does not preserve the filtration slice",
                        "map": format!("{map:?}"),
                        "vertex": inst.vertex_json(u),
                    });
                    return Ok(CheckReport::finish(
                        "action", &id, &params, Verdict::Fail, witness, started,
                    ));
                }
            }
        }
        // type vectors: equal orbit-key multisets admit a glued translator
        let w1 = top.clone();
        let w2 = if s % 2 == 0 {
            move_vertex(inst, &map, &w1).expect("already acted on this vertex")
        } else {
            let other = random_expansion_walk(inst, &base, w1.height() - 1, &mut rng)?;
            other.last().expect("walks are nonempty").clone()
        };
        let mut k1: Vec<(String, usize)> = w1
            .elems()
            .iter()
            .enumerate()
            .map(|(i, e)| (inst.orbit_key(e), i))
            .collect();
        let mut k2: Vec<(String, usize)> = w2
            .elems()
            .iter()
            .enumerate()
            .map(|(i, e)| (inst.orbit_key(e), i))
            .collect();
        k1.sort();
        k2.sort();
        let t1: Vec<&String> = k1.iter().map(|(k, _)| k).collect();
        let t2: Vec<&String> = k2.iter().map(|(k, _)| k).collect();
        if t1 != t2 {
            skipped_type_vectors += 1;
            continue;
        }
        let mut parts: Vec<I::Map> = Vec::new();
        let mut pairs_ok = true;
        let mut translators_found = true;
        for ((_, i), (_, j)) in k1.iter().zip(&k2) {
            let a = &w1.elems()[*i];
            let b = &w2.elems()[*j];
            let Some(t) = inst.translator(a, b) else {
                translators_found = false;
                break;
            };
            if inst.act(&t, a).map(|c| inst.equal(&c, b)) != Some(true) {
                pairs_ok = false;
                break;
            }
            let Some(r) = inst.restrict_map(&t, &inst.support(a)) else {
                pairs_ok = false;
                break;
            };
            parts.push(r);
        }
        if !translators_found {
            missing_translators += 1;
            continue;
        }
        let glued_map = if pairs_ok { inst.union_maps(&parts) } else { None };
        let carried = glued_map
            .as_ref()
            .and_then(|g| move_vertex(inst, g, &w1))
            .map(|w| vertex_equal(inst, &w, &w2));
        if carried != Some(true) {
            let witness = json!({
                "reason": "equal type vectors but no glued translator carries v1 to v2",
                "v1": inst.vertex_json(&w1),
                "v2": inst.vertex_json(&w2),
                "type_vector": t1,
            });
            return Ok(CheckReport::finish(
                "action", &id, &params, Verdict::Fail, witness, started,
            ));
        }
        glued += 1;
    }
    let witness = json!({
        "samples": samples.max(1),
        "glued_type_vector_pairs": glued,
        "skipped_type_vectors": skipped_type_vectors,
        "missing_translators": missing_translators,
    });
    let verdict = if glued == 0 {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(CheckReport::finish(
        "action", &id, &params, verdict, witness, started,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::default_budget;

    fn budget() -> usize {
        default_budget()
    }

    #[test]
    fn common_upper_bound_trivial_and_one_sided() {
        let inst = VInstance;
        let v = Vertex::singleton(&inst, VElement::top());
        let same = common_upper_bound(&inst, &v, &v, budget())
            .unwrap()
            .expect("equal vertices have themselves as bound");
        assert!(vertex_equal(&inst, &same.upper, &v));
        assert!(same.seq1.is_empty() && same.seq2.is_empty());

        let (l, r) = VElement::top().split();
        let split = Vertex::new(&inst, vec![l, r]).unwrap();
        let bound = common_upper_bound(&inst, &v, &split, budget())
            .unwrap()
            .expect("one step below");
        assert!(vertex_equal(&inst, &bound.upper, &split));
        assert_eq!(bound.seq1.len(), 2);
        assert!(bound.seq2.is_empty());
    }

    #[test]
    fn common_upper_bound_random_v_pairs() {
        let inst = VInstance;
        let mut rng = sampling::rng(11);
        let base = Vertex::singleton(&inst, VElement::top());
        for _ in 0..6 {
            let a = random_expansion_walk(&inst, &base, 2, &mut rng).unwrap();
            let b = random_expansion_walk(&inst, &base, 2, &mut rng).unwrap();
            let (a, b) = (a.last().unwrap().clone(), b.last().unwrap().clone());
            let bound = common_upper_bound(&inst, &a, &b, budget())
                .unwrap()
                .expect("full-support pairs are directed");
            for seq in [&bound.seq1, &bound.seq2] {
                for pair in seq.windows(2) {
                    assert!(is_simplex(&inst, &[pair[0].clone(), pair[1].clone()]));
                }
            }
        }
    }

    #[test]
    fn common_upper_bound_mismatched_supports() {
        let inst = VInstance;
        let (l, r) = VElement::top().split();
        let left = Vertex::singleton(&inst, l);
        let right = Vertex::singleton(&inst, r);
        assert!(common_upper_bound(&inst, &left, &right, budget())
            .unwrap()
            .is_none());
    }

    #[test]
    fn template_bundle_passes_for_v() {
        let inst = VInstance;
        let reports = check_template(&inst, 2, 6, 0, budget()).unwrap();
        assert_eq!(reports.len(), 5);
        let ids: Vec<&str> = reports.iter().map(|r| r.check.as_str()).collect();
        assert_eq!(
            ids,
            vec![
                "template.constants",
                "template.directed",
                "template.finite",
                "template.links",
                "template.orbits"
            ]
        );
        for r in &reports {
            assert_eq!(r.verdict, Verdict::Pass, "{}: {}", r.check, r.witness);
        }
        let orbits = &reports[4];
        assert_eq!(orbits.witness["count"], json!(2));
    }

    #[test]
    fn template_requires_complete_oracle() {
        let shy = ShyOracle::new(2);
        match check_template(&shy, 1, 1, 0, budget()) {
            Err(CoreError::OracleIncomplete(id)) => assert_eq!(id, "toy-shy"),
            other => panic!("expected OracleIncomplete, got {other:?}"),
        }
    }

    #[test]
    fn descending_bound_at_linear_threshold() {
        let toy = SyntheticLinear::new(3);
        // threshold for n = 0: 2*C1 + 1*C0 - 1 = 5
        assert_eq!(descending_threshold(Kind::Linear, 0, 2, 2), Some(5));
        let at = check_descending_bound(&toy, 5, 0, 0, budget()).unwrap();
        assert_eq!(at.verdict, Verdict::Pass, "{}", at.witness);
        assert_eq!(at.witness["asserted"], json!(true));
        let below = check_descending_bound(&toy, 4, 0, 0, budget()).unwrap();
        assert_eq!(below.verdict, Verdict::Pass);
        assert_eq!(below.witness["asserted"], json!(false));
    }

    #[test]
    fn descending_bound_for_v() {
        let inst = VInstance;
        // k = 2 = C1: nonempty but below any threshold for n = -1
        let small = check_descending_bound(&inst, 2, -1, 0, budget()).unwrap();
        assert_eq!(small.verdict, Verdict::Pass);
        assert_eq!(small.witness["nonempty"], json!(true));
        assert_eq!(small.witness["asserted"], json!(false));
    }

    #[test]
    fn cover_and_nerve_for_v() {
        let inst = VInstance;
        let report = check_cover_and_nerve(&inst, 4, 10, 0, budget()).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{}", report.witness);
        // C(4,1) + C(4,2) = 10 two-block partitions; the meet of e.g.
        // 𝒫_{1,2} and 𝒫_{1,3} is discrete with empty link, so the nerve is
        // connected but not a full simplex
        assert_eq!(report.witness["cover_size"], json!(10));
        assert_eq!(report.witness["nerve_full_simplex"], json!(false));
        assert_eq!(report.witness["nerve_components"], json!(1));
        match check_cover_and_nerve(&inst, 2, 10, 0, budget()) {
            Err(CoreError::TooSmall { k: 2, c0: 2 }) => {}
            other => panic!("expected TooSmall, got {other:?}"),
        }
    }

    #[test]
    fn cover_and_nerve_linear_toy_full_simplex() {
        // at k ≥ C0 + 2C1 − 1 = 5 the linear nerve must be a full simplex:
        // every principal interval starts at position < C1 = 2 with length
        // ≤ 2, so positions 3.. stay in one common block of every partition
        let toy = SyntheticLinear::new(3);
        let report = check_cover_and_nerve(&toy, 5, 10, 0, budget()).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{}", report.witness);
        assert_eq!(report.witness["nerve_full_simplex"], json!(true));
    }

    #[test]
    fn cover_and_nerve_cyclic_toy() {
        let toy = SyntheticCyclic::new(3);
        let report = check_cover_and_nerve(&toy, 5, 10, 0, budget()).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{}", report.witness);
    }

    #[test]
    fn join_lemma_random_trials() {
        let report = check_join_lemma(8, 0, budget());
        assert_eq!(report.verdict, Verdict::Pass, "{}", report.witness);
    }

    #[test]
    fn ascending_factorizations_for_v() {
        let inst = VInstance;
        let report = check_ascending_factorizations(&inst, 4, 0, budget()).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{}", report.witness);
        // the first sample walks two steps up from the base, giving a
        // height-3 vertex whose star is the 2×2×2 cube
        assert_eq!(report.witness["largest_star"]["nodes"], json!(8));
    }

    #[test]
    fn action_check_for_v() {
        let inst = VInstance;
        let report = check_action(&inst, 6, 0, budget()).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{}", report.witness);
        assert!(report.witness["glued_type_vector_pairs"].as_u64().unwrap() > 0);
    }

    #[test]
    fn action_check_for_cyclic_toy() {
        let toy = SyntheticCyclic::new(2);
        let report = check_action(&toy, 5, 3, budget()).unwrap();
        assert_eq!(report.verdict, Verdict::Pass, "{}", report.witness);
    }
}
