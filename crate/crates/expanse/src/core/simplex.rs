//! Restrictions, vertex equality, the edge relation and the simplex
//! predicate of the complex Δ.

use super::{CoreError, ExpansionInstance, Support, Vertex};

/// Elements of `v` whose support lies inside supp(b), in canonical order.
pub fn restriction<I>(inst: &I, b: &I::Elem, v: &Vertex<I::Elem>) -> Vec<I::Elem>
where
    I: ExpansionInstance + ?Sized,
{
    let sb = inst.support(b);
    restriction_by_support(&sb, v)
}

pub(crate) fn restriction_by_support<E: Clone>(sb: &Support, v: &Vertex<E>) -> Vec<E> {
    v.supports()
        .iter()
        .zip(v.elems())
        .filter(|(s, _)| s.subset_of(sb))
        .map(|(_, e)| e.clone())
        .collect()
}

/// The restriction r_b(v) as a vertex, or None when no element of `v` lands
/// inside supp(b).
pub fn restriction_vertex<I>(
    inst: &I,
    b: &I::Elem,
    v: &Vertex<I::Elem>,
) -> Option<Vertex<I::Elem>>
where
    I: ExpansionInstance + ?Sized,
{
    let elems = restriction(inst, b, v);
    if elems.is_empty() {
        None
    } else {
        Some(Vertex::new(inst, elems).expect("a subset of a vertex is a vertex"))
    }
}

/// The partition of supp(v2) induced by grouping the supports of v2 under the
/// elements of v1; entry i collects the support union of r_{b_i}(v2).
/// Elements of v2 straddling several supports of v1 are reported as `None`.
pub fn induced_partition<I>(
    _inst: &I,
    v1: &Vertex<I::Elem>,
    v2: &Vertex<I::Elem>,
) -> Vec<Option<Support>>
where
    I: ExpansionInstance + ?Sized,
{
    v1.supports()
        .iter()
        .map(|s| {
            let mut acc: Option<Support> = None;
            for (t, _) in v2.supports().iter().zip(v2.elems()) {
                if t.subset_of(s) {
                    acc = Some(match acc {
                        None => t.clone(),
                        Some(a) => a.union(t),
                    });
                }
            }
            acc
        })
        .collect()
}

/// Semantic equality of vertices.  Both sides are sorted by support key and
/// equal vertices have identical support regions position-wise, so a single
/// element-wise pass decides.
pub fn vertex_equal<I>(inst: &I, a: &Vertex<I::Elem>, b: &Vertex<I::Elem>) -> bool
where
    I: ExpansionInstance + ?Sized,
{
    a.height() == b.height()
        && a.supports() == b.supports()
        && a.elems()
            .iter()
            .zip(b.elems())
            .all(|(x, y)| inst.equal(x, y))
}

/// Deterministic display form `{label,…}`.
pub fn vertex_label<I>(inst: &I, v: &Vertex<I::Elem>) -> String
where
    I: ExpansionInstance + ?Sized,
{
    let parts: Vec<String> = v.elems().iter().map(|e| inst.elem_label(e)).collect();
    format!("{{{}}}", parts.join(","))
}

/// Removes semantic duplicates, keeping first occurrences in order.
pub fn dedup_vertices<I>(inst: &I, vs: Vec<Vertex<I::Elem>>) -> Vec<Vertex<I::Elem>>
where
    I: ExpansionInstance + ?Sized,
{
    use std::collections::HashMap;
    let mut buckets: HashMap<String, Vec<usize>> = HashMap::new();
    let mut keep: Vec<Vertex<I::Elem>> = Vec::new();
    for v in vs {
        let sig = v.support_signature();
        let bucket = buckets.entry(sig).or_default();
        if !bucket.iter().any(|&i| vertex_equal(inst, &keep[i], &v)) {
            bucket.push(keep.len());
            keep.push(v);
        }
    }
    keep
}

/// The edge relation: u ≤ v iff supports agree and r_b(v) ∈ ℰ(b) for every
/// b ∈ u.  Such a pair spans a 1-simplex of Δ; the relation is *not*
/// transitive, so chains of edges need not be simplices.
pub fn edge_leq<I>(inst: &I, u: &Vertex<I::Elem>, v: &Vertex<I::Elem>) -> bool
where
    I: ExpansionInstance + ?Sized,
{
    if u.support_union().key() != v.support_union().key() {
        return false;
    }
    // every element of v must land inside a single support of u
    let mut assigned = 0usize;
    for t in v.supports() {
        if u.supports().iter().any(|s| t.subset_of(s)) {
            assigned += 1;
        }
    }
    if assigned != v.height() {
        return false;
    }
    for b in u.elems() {
        let r = restriction(inst, b, v);
        if r.is_empty() {
            return false;
        }
        let rv = Vertex::new(inst, r).expect("a subset of a vertex is a vertex");
        let poset = match inst.expansions(b) {
            Ok(p) => p,
            Err(_) => return false,
        };
        if poset.find(inst, &rv).is_none() {
            return false;
        }
    }
    true
}

/// Orders a set of vertices by height so that the support partition of each
/// refines that of all earlier ones.  The order is unique when it exists
/// because distinct vertices of equal height never refine one another.
/// Duplicate vertices are collapsed first.
pub fn canonical_order<I>(
    inst: &I,
    vs: &[Vertex<I::Elem>],
) -> Result<Vec<Vertex<I::Elem>>, CoreError>
where
    I: ExpansionInstance + ?Sized,
{
    let mut vs = dedup_vertices(inst, vs.to_vec());
    vs.sort_by_key(|v| v.height());
    for w in vs.windows(2) {
        if w[0].height() == w[1].height() {
            return Err(CoreError::NotAChain);
        }
    }
    // refinement is transitive, so consecutive checks decide the whole chain
    for w in vs.windows(2) {
        if !refines(&w[1], &w[0]) {
            return Err(CoreError::NotAChain);
        }
    }
    Ok(vs)
}

/// Whether the support partition of `fine` refines that of `coarse` (same
/// total support, every block nested in a block of `coarse`).
fn refines<E>(fine: &Vertex<E>, coarse: &Vertex<E>) -> bool {
    fine.supports()
        .iter()
        .all(|t| coarse.supports().iter().any(|s| t.subset_of(s)))
        && fine.support_union().key() == coarse.support_union().key()
}

/// Whether a set of vertices spans a simplex of Δ: after canonical ordering,
/// the restrictions (r_b(v_1), …, r_b(v_n)) form a chain in ℰ(b) for every b
/// in the first vertex.
pub fn is_simplex<I>(inst: &I, vs: &[Vertex<I::Elem>]) -> bool
where
    I: ExpansionInstance + ?Sized,
{
    let ordered = match canonical_order(inst, vs) {
        Ok(o) => o,
        Err(_) => return false,
    };
    if ordered.len() <= 1 {
        return true;
    }
    let first = &ordered[0];
    for b in first.elems() {
        let poset = match inst.expansions(b) {
            Ok(p) => p,
            Err(_) => return false,
        };
        let mut prev = 0usize; // r_b(v_1) = {b}, the least node
        for v in &ordered[1..] {
            let r = restriction(inst, b, v);
            let rv = match Vertex::new(inst, r) {
                Ok(rv) => rv,
                Err(_) => return false,
            };
            let Some(idx) = poset.find(inst, &rv) else {
                return false;
            };
            if !poset.leq(prev, idx) {
                return false;
            }
            prev = idx;
        }
    }
    true
}
