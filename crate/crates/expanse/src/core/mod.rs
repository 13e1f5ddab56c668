//! The abstract expansion-set machinery: the instance contract, vertices,
//! expansion posets, partitions, the simplex predicate, ascending and
//! descending stars/links (with relative and partitioned variants), meets of
//! partitions, standard covers, and bounded filtration slices.
//!
//! An instance assigns each element a support region and a finite poset of
//! expansions ℰ(b) whose vertices partition that support.  A vertex is a
//! finite set of elements with pairwise-disjoint supports; its height is its
//! cardinality.  Two global relations matter and must not be confused:
//!
//! * the *edge relation*: u ≤ v iff supports agree and r_b(v) ∈ ℰ(b) for
//!   every b ∈ u — this is what makes {u, v} a simplex;
//! * the *expansion order* ↗: reachability by sequences of elementary
//!   expansions.  It is strictly coarser: a composite of two splits can
//!   leave ℰ(b) entirely, so ↗-comparable vertices need not span an edge.

mod ascend;
mod axioms;
mod cover;
mod links;
mod simplex;
mod slice;

pub use ascend::{
    ascending_link, ascending_star, expansion_leq, relative_ascending_link, AscendingLink,
    AscendingStar,
};
pub use axioms::{check_expansion_axioms, check_vertex_axioms, validate_poset};
pub use cover::{partition_meet, standard_cover, Partition};
pub use links::{
    descending_link, link_membership, partitioned_descending_link, partitioned_from_full,
    productions_rel, respects_partition, Link,
};
pub use simplex::{
    canonical_order, dedup_vertices, edge_leq, induced_partition, is_simplex, restriction,
    restriction_vertex, vertex_equal, vertex_label,
};
pub use slice::filtration_slice;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boxes::BoxSet;
use crate::cantor::ConeSet;
use crate::topology::BudgetExceeded;

/// The order flavour of an instance; it only affects which standard covers
/// apply.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Linear,
    Cyclic,
    Permutational,
}

/// A support region: a canonical union of cones (one-dimensional instances)
/// or of boxes (products).  The two variants never mix within an instance.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Support {
    Cones(ConeSet),
    Boxes(BoxSet),
}

impl Support {
    pub fn disjoint(&self, other: &Support) -> bool {
        match (self, other) {
            (Support::Cones(a), Support::Cones(b)) => a.disjoint(b),
            (Support::Boxes(a), Support::Boxes(b)) => a.disjoint(b),
            _ => panic!("mixed support flavours"),
        }
    }

    pub fn subset_of(&self, other: &Support) -> bool {
        match (self, other) {
            (Support::Cones(a), Support::Cones(b)) => a.subset_of(b),
            (Support::Boxes(a), Support::Boxes(b)) => a.subset_of(b),
            _ => panic!("mixed support flavours"),
        }
    }

    pub fn union(&self, other: &Support) -> Support {
        match (self, other) {
            (Support::Cones(a), Support::Cones(b)) => Support::Cones(a.union(b)),
            (Support::Boxes(a), Support::Boxes(b)) => Support::Boxes(a.union(b)),
            _ => panic!("mixed support flavours"),
        }
    }

    pub fn is_all(&self) -> bool {
        match self {
            Support::Cones(a) => a.is_all(),
            Support::Boxes(a) => a.is_all(),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Support::Cones(a) => a.is_empty(),
            Support::Boxes(a) => a.is_empty(),
        }
    }

    /// Canonical serialization; equal regions get equal keys, so this is a
    /// sound sort and bucket key.
    pub fn key(&self) -> String {
        match self {
            Support::Cones(a) => a.key(),
            Support::Boxes(a) => a.key(),
        }
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Support::Cones(a) => a.fmt(f),
            Support::Boxes(a) => a.fmt(f),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoreError {
    #[error("the given vertices admit no refinement ordering")]
    NotAChain,
    #[error("instance reports an unbounded expansion poset for {0}")]
    InfinitePoset(String),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("vertices are not comparable under the expansion order")]
    NotComparable,
    #[error("instance {0} declares its contraction oracle incomplete")]
    OracleIncomplete(String),
    #[error("blocks do not partition the vertex: {0}")]
    NotAPartition(String),
    #[error("partitions have different ground vertices")]
    DifferentGround,
    #[error("standard covers need height k > C0, got k = {k}, C0 = {c0}")]
    TooSmall { k: usize, c0: usize },
    #[error("supports overlap inside a vertex: {0} and {1}")]
    SupportOverlap(String, String),
    #[error("a vertex needs at least one element")]
    EmptyVertex,
}

/// A finite nonempty set of elements with pairwise-disjoint supports, stored
/// sorted by canonical support key so equal vertices align position-wise.
#[derive(Clone, Debug)]
pub struct Vertex<E> {
    elems: Vec<E>,
    supports: Vec<Support>,
}

impl<E: Clone> Vertex<E> {
    pub fn new<I>(inst: &I, elems: Vec<E>) -> Result<Self, CoreError>
    where
        I: ExpansionInstance<Elem = E> + ?Sized,
    {
        if elems.is_empty() {
            return Err(CoreError::EmptyVertex);
        }
        let mut pairs: Vec<(Support, E)> =
            elems.into_iter().map(|e| (inst.support(&e), e)).collect();
        for (s, _) in &pairs {
            assert!(!s.is_empty(), "supports are nonempty by contract");
        }
        pairs.sort_by(|a, b| a.0.key().cmp(&b.0.key()));
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                if !pairs[i].0.disjoint(&pairs[j].0) {
                    return Err(CoreError::SupportOverlap(
                        pairs[i].0.to_string(),
                        pairs[j].0.to_string(),
                    ));
                }
            }
        }
        let (supports, elems) = pairs.into_iter().map(|(s, e)| (s, e)).unzip();
        Ok(Vertex { elems, supports })
    }

    pub fn singleton<I>(inst: &I, elem: E) -> Self
    where
        I: ExpansionInstance<Elem = E> + ?Sized,
    {
        Vertex::new(inst, vec![elem]).expect("a singleton vertex is always valid")
    }

}

impl<E> Vertex<E> {
    pub fn height(&self) -> usize {
        self.elems.len()
    }

    pub fn elems(&self) -> &[E] {
        &self.elems
    }

    pub fn supports(&self) -> &[Support] {
        &self.supports
    }

    pub fn support_union(&self) -> Support {
        let mut it = self.supports.iter();
        let first = it.next().expect("vertices are nonempty").clone();
        it.fold(first, |acc, s| acc.union(s))
    }

    pub fn full_support(&self) -> bool {
        self.support_union().is_all()
    }

    /// Bucketing signature: equal vertices always share it (their supports
    /// are equal regions), distinct vertices may collide and are told apart
    /// by [`vertex_equal`].
    pub fn support_signature(&self) -> String {
        let parts: Vec<String> = self.supports.iter().map(|s| s.key()).collect();
        parts.join(";")
    }
}

/// The finite poset ℰ(b).  Node 0 is the least vertex {b}; `leq` is the full
/// order relation.
#[derive(Clone, Debug)]
pub struct ExpansionPoset<E> {
    nodes: Vec<Vertex<E>>,
    leq: Vec<Vec<bool>>,
}

impl<E: Clone> ExpansionPoset<E> {
    /// Builds a poset after checking reflexivity, antisymmetry, transitivity
    /// and that node 0 is the unique least element.
    pub fn new(nodes: Vec<Vertex<E>>, leq: Vec<Vec<bool>>) -> Self {
        let n = nodes.len();
        assert!(n > 0, "a poset has at least the least vertex");
        assert_eq!(leq.len(), n);
        for row in &leq {
            assert_eq!(row.len(), n);
        }
        for i in 0..n {
            assert!(leq[i][i], "order must be reflexive");
            assert!(leq[0][i], "node 0 must be the least element");
            if i != 0 {
                assert!(!leq[i][0], "node 0 must be strictly least");
            }
            for j in 0..n {
                if i != j {
                    assert!(!(leq[i][j] && leq[j][i]), "order must be antisymmetric");
                }
                for k in 0..n {
                    if leq[i][j] && leq[j][k] {
                        assert!(leq[i][k], "order must be transitive");
                    }
                }
            }
        }
        ExpansionPoset { nodes, leq }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, i: usize) -> &Vertex<E> {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[Vertex<E>] {
        &self.nodes
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    /// Index of the node equal (element-wise) to the given vertex.
    pub fn find<I>(&self, inst: &I, v: &Vertex<E>) -> Option<usize>
    where
        I: ExpansionInstance<Elem = E> + ?Sized,
    {
        (0..self.nodes.len()).find(|&i| vertex_equal(inst, &self.nodes[i], v))
    }
}

/// A finite stabilizer, listed explicitly with its multiplication table:
/// `table[i][j] = k` means elements[i]∘elements[j] = elements[k];
/// `elements[0]` is the identity.
#[derive(Clone, Debug)]
pub struct Stabilizer<M> {
    pub elements: Vec<M>,
    pub table: Vec<Vec<usize>>,
    /// Declared isomorphism type, e.g. "trivial" or "klein-four".
    pub description: String,
}

impl<M> Stabilizer<M> {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// The contract a concrete group instance implements.  All operations are
/// pure; instances are immutable and shareable across threads.
pub trait ExpansionInstance: Sync {
    /// One element of the expansion set (a canonical equivalence class).
    type Elem: Clone + Send + Sync + fmt::Debug;
    /// One element of the ambient inverse semigroup Ŝ (a partial map); used
    /// for actions and stabilizers.
    type Map: Clone + Send + Sync + fmt::Debug;

    fn id(&self) -> String;
    fn kind(&self) -> Kind;
    fn c0(&self) -> usize;
    fn c1(&self) -> usize;

    /// Whether `contractions` is complete (returns every element whose
    /// expansion poset contains the given vertex).
    fn complete_contractions(&self) -> bool {
        true
    }

    fn support(&self, b: &Self::Elem) -> Support;

    /// The full finite poset ℰ(b), least vertex first.
    fn expansions(&self, b: &Self::Elem) -> Result<ExpansionPoset<Self::Elem>, CoreError>;

    /// All elements b′ such that the given set of elements, as a vertex, is a
    /// vertex of ℰ(b′).
    fn contractions(&self, parts: &Vertex<Self::Elem>) -> Vec<Self::Elem>;

    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool;

    /// Stable display form; equal presentations imply equal elements, so
    /// labels are unique within any concretely constructed vertex list.
    fn elem_label(&self, b: &Self::Elem) -> String;

    fn elem_json(&self, b: &Self::Elem) -> serde_json::Value;
    fn elem_from_json(&self, v: &serde_json::Value) -> Result<Self::Elem, String>;

    /// The action ŝ·b, defined when the domain of ŝ covers supp(b).
    fn act(&self, s: &Self::Map, b: &Self::Elem) -> Option<Self::Elem>;

    /// The canonical map-free element supported exactly on the given piece,
    /// when the instance has one.  These are the elements that fully expanded
    /// vertices decay into: once a piece is this small, the element class no
    /// longer remembers any map data, only its support.  Instances without a
    /// usable pattern form return `None` and lose access to the generic
    /// upper-bound search.
    fn pattern_element(&self, piece: &Support) -> Option<Self::Elem> {
        let _ = piece;
        None
    }

    /// A witness ŝ with ŝ·from = to, when one exists and the instance can
    /// build it.  `None` means no witness was produced, which callers must
    /// treat as "unknown", not as a proof of distinct orbits.
    fn translator(&self, from: &Self::Elem, to: &Self::Elem) -> Option<Self::Map> {
        let _ = (from, to);
        None
    }

    /// The underlying partial map of an element (domain = all of X or Xⁿ).
    fn elem_map(&self, b: &Self::Elem) -> Self::Map;

    fn stabilizer(&self, b: &Self::Elem) -> Stabilizer<Self::Map>;

    /// Parses a vertex from `{"elements":[...]}`.
    fn vertex_from_json(&self, v: &serde_json::Value) -> Result<Vertex<Self::Elem>, String>
    where
        Self: Sized,
    {
        let obj = v.as_object().ok_or("vertex JSON must be an object")?;
        let elems = obj
            .get("elements")
            .and_then(|e| e.as_array())
            .ok_or("vertex JSON needs an \"elements\" array")?;
        let mut parsed = Vec::with_capacity(elems.len());
        for e in elems {
            parsed.push(self.elem_from_json(e)?);
        }
        Vertex::new(self, parsed).map_err(|e| e.to_string())
    }

    /// Serializes a vertex as `{"elements":[...]}`.
    fn vertex_json(&self, v: &Vertex<Self::Elem>) -> serde_json::Value
    where
        Self: Sized,
    {
        serde_json::json!({
            "elements": v.elems().iter().map(|e| self.elem_json(e)).collect::<Vec<_>>()
        })
    }
}
