//! Bounded slices of the filtration stage Δ^{h ≤ n}: the subcomplex reached
//! from seed vertices by a limited number of elementary expansion and
//! contraction moves, with all heights capped at n.

use super::links::{build_link, Link};
use super::{dedup_vertices, CoreError, ExpansionInstance, Vertex};
use crate::topology::BudgetExceeded;

/// Explores out to `radius` elementary moves from the seeds, keeping every
/// vertex of height ≤ n, and assembles the induced subcomplex.  All
/// simplices have dimension < n because chain heights are distinct.
pub fn filtration_slice<I>(
    inst: &I,
    seeds: &[Vertex<I::Elem>],
    n: usize,
    radius: usize,
    budget: usize,
) -> Result<Link<I::Elem>, CoreError>
where
    I: ExpansionInstance,
{
    for s in seeds {
        assert!(s.height() <= n, "seeds must respect the height cap");
    }
    let mut frontier: Vec<Vertex<I::Elem>> = dedup_vertices(inst, seeds.to_vec());
    let mut all: Vec<Vertex<I::Elem>> = frontier.clone();
    for _ in 0..radius {
        let mut next: Vec<Vertex<I::Elem>> = Vec::new();
        for v in &frontier {
            neighbours(inst, v, n, &mut next)?;
        }
        let mut merged = all.clone();
        let before = all.len();
        merged.extend(next);
        merged = dedup_vertices(inst, merged);
        if merged.len() > budget {
            return Err(CoreError::Budget(BudgetExceeded { budget }));
        }
        frontier = merged[before..].to_vec();
        all = merged;
        if frontier.is_empty() {
            break;
        }
    }
    let link = build_link(inst, all, budget)?;
    debug_assert!(link.complex.dim().map_or(true, |d| d < n));
    Ok(link)
}

/// Single elementary moves from `v`: expand one element along its poset, or
/// contract one subset of size 2..=C0.
fn neighbours<I>(
    inst: &I,
    v: &Vertex<I::Elem>,
    n: usize,
    out: &mut Vec<Vertex<I::Elem>>,
) -> Result<(), CoreError>
where
    I: ExpansionInstance,
{
    let k = v.height();
    for (bi, b) in v.elems().iter().enumerate() {
        let poset = inst.expansions(b)?;
        for w in poset.nodes().iter().skip(1) {
            if k - 1 + w.height() > n {
                continue;
            }
            let mut elems: Vec<I::Elem> = Vec::new();
            for (i, e) in v.elems().iter().enumerate() {
                if i == bi {
                    elems.extend(w.elems().iter().cloned());
                } else {
                    elems.push(e.clone());
                }
            }
            out.push(Vertex::new(inst, elems).expect("expansions stay inside supp(b)"));
        }
    }
    let c0 = inst.c0();
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    super::links::collect_index_subsets(k, c0, &mut subsets);
    for s in &subsets {
        let sub = Vertex::new(
            inst,
            s.iter().map(|&i| v.elems()[i].clone()).collect(),
        )
        .expect("a subset of a vertex is a vertex");
        for b in inst.contractions(&sub) {
            let mut elems: Vec<I::Elem> = vec![b];
            for i in 0..k {
                if !s.contains(&i) {
                    elems.push(v.elems()[i].clone());
                }
            }
            out.push(Vertex::new(inst, elems).expect("contractions cover the same support"));
        }
    }
    Ok(())
}
