//! Mechanical checks of the defining axioms of an expansion poset and of
//! structural poset invariants.  These run in tests and in the template
//! verifier over sampled elements.

use super::simplex::{restriction_by_support, vertex_equal};
use super::{ExpansionInstance, ExpansionPoset, Vertex};

/// Structural validation: node 0 is the singleton {b} and every node
/// partitions supp(b).
pub fn validate_poset<I>(
    inst: &I,
    b: &I::Elem,
    poset: &ExpansionPoset<I::Elem>,
) -> Result<(), String>
where
    I: ExpansionInstance,
{
    let bottom = poset.node(0);
    if bottom.height() != 1 || !inst.equal(&bottom.elems()[0], b) {
        return Err("node 0 must be the singleton {b}".into());
    }
    let sb = inst.support(b);
    for (i, node) in poset.nodes().iter().enumerate() {
        if node.support_union().key() != sb.key() {
            return Err(format!("node {i} does not partition supp(b)"));
        }
    }
    Ok(())
}

/// The three poset axioms for ℰ(b):
///
/// 1. {b} is the unique least vertex;
/// 2. strict comparability properly refines support partitions;
/// 3. v1 ≤ v2 exactly when r_{b′}(v2) ∈ ℰ(b′) for every b′ ∈ v1.
pub fn check_expansion_axioms<I>(inst: &I, b: &I::Elem) -> Result<(), String>
where
    I: ExpansionInstance,
{
    let poset = inst.expansions(b).map_err(|e| e.to_string())?;
    validate_poset(inst, b, &poset)?;
    let n = poset.len();
    for i in 0..n {
        if !poset.leq(0, i) {
            return Err(format!("node 0 is not below node {i}"));
        }
        if i != 0 && poset.leq(i, 0) {
            return Err(format!("node {i} sits below the least vertex"));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && poset.leq(i, j) && !properly_refines(poset.node(j), poset.node(i)) {
                return Err(format!("node {j} does not properly refine node {i}"));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let blockwise = blockwise_below(inst, poset.node(i), poset.node(j))?;
            if blockwise != poset.leq(i, j) {
                return Err(format!(
                    "order and restriction disagree on nodes {i}, {j}: \
                     blockwise {blockwise}, declared {}",
                    poset.leq(i, j)
                ));
            }
        }
    }
    Ok(())
}

fn properly_refines<E>(fine: &Vertex<E>, coarse: &Vertex<E>) -> bool {
    let nested = fine
        .supports()
        .iter()
        .all(|t| coarse.supports().iter().any(|s| t.subset_of(s)));
    nested && fine.supports() != coarse.supports()
}

/// The right side of axiom (3): every element of v1 sees its restriction of
/// v2 inside its own expansion poset.
fn blockwise_below<I>(
    inst: &I,
    v1: &Vertex<I::Elem>,
    v2: &Vertex<I::Elem>,
) -> Result<bool, String>
where
    I: ExpansionInstance,
{
    for t in v2.supports() {
        if !v1.supports().iter().any(|s| t.subset_of(s)) {
            return Ok(false);
        }
    }
    for (bi, b) in v1.elems().iter().enumerate() {
        let r = restriction_by_support(&v1.supports()[bi], v2);
        if r.is_empty() {
            return Ok(false);
        }
        let rv = Vertex::new(inst, r).map_err(|e| e.to_string())?;
        let sub = inst.expansions(b).map_err(|e| e.to_string())?;
        if sub.find(inst, &rv).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Axiom sanity for a whole vertex: every element passes the axiom check.
pub fn check_vertex_axioms<I>(inst: &I, v: &Vertex<I::Elem>) -> Result<(), String>
where
    I: ExpansionInstance,
{
    for b in v.elems() {
        check_expansion_axioms(inst, b)?;
    }
    Ok(())
}

impl<E: Clone> ExpansionPoset<E> {
    /// Convenience for tests: whether a vertex appears among the nodes.
    pub fn contains_vertex<I>(&self, inst: &I, v: &Vertex<E>) -> bool
    where
        I: ExpansionInstance<Elem = E> + ?Sized,
    {
        self.nodes().iter().any(|n| vertex_equal(inst, n, v))
    }
}
