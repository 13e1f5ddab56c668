//! Descending links: the subcomplex of Δ spanned by the vertices strictly
//! edge-below a given vertex, and its partitioned variants.

use std::collections::HashMap;

use super::cover::Partition;
use super::simplex::restriction_by_support;
use super::{vertex_equal, vertex_label, CoreError, ExpansionInstance, ExpansionPoset, Vertex};
use crate::exec;
use crate::topology::{BudgetExceeded, Complex};

/// A link complex together with the vertices behind its labels: label `i`
/// of `complex` describes `vertices[i]`.
#[derive(Clone, Debug)]
pub struct Link<E> {
    pub complex: Complex,
    pub vertices: Vec<Vertex<E>>,
}

/// The descending link of `v`: vertices are the u ≠ v with r_b(v) ∈ ℰ(b)
/// for every b ∈ u, i.e. the results of contracting disjoint subsets of v
/// of size 2..=C0.  Simplices are the sets of pairwise edge-comparable
/// vertices; pairwise comparability is equivalent to the chain condition
/// because restrictions to the minimal vertex stay inside one poset.
pub fn descending_link<I>(
    inst: &I,
    v: &Vertex<I::Elem>,
    budget: usize,
) -> Result<Link<I::Elem>, CoreError>
where
    I: ExpansionInstance,
{
    if !inst.complete_contractions() {
        return Err(CoreError::OracleIncomplete(inst.id()));
    }
    let vertices = descending_vertices(inst, v, budget)?;
    build_link(inst, vertices, budget)
}

/// Enumerates the vertices strictly below `v` by contracting families of
/// disjoint subsets.
fn descending_vertices<I>(
    inst: &I,
    v: &Vertex<I::Elem>,
    budget: usize,
) -> Result<Vec<Vertex<I::Elem>>, CoreError>
where
    I: ExpansionInstance,
{
    let k = v.height();
    let c0 = inst.c0();
    // contractions of every subset of size 2..=C0, keyed by index set
    let mut by_subset: HashMap<Vec<usize>, Vec<I::Elem>> = HashMap::new();
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    collect_index_subsets(k, c0, &mut subsets);
    for s in &subsets {
        let elems: Vec<I::Elem> = s.iter().map(|&i| v.elems()[i].clone()).collect();
        let sub = Vertex::new(inst, elems).expect("a subset of a vertex is a vertex");
        by_subset.insert(s.clone(), inst.contractions(&sub));
    }

    let mut out: Vec<Vertex<I::Elem>> = Vec::new();
    let mut family: Vec<Vec<usize>> = Vec::new();
    enumerate_families(inst, v, &by_subset, &mut family, 0, c0, &mut out, budget)?;
    Ok(super::dedup_vertices(inst, out))
}

/// All sorted index subsets of {0..k} with 2..=c0 elements.
pub(crate) fn collect_index_subsets(k: usize, c0: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(start: usize, k: usize, c0: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() >= 2 {
            out.push(cur.clone());
        }
        if cur.len() == c0 {
            return;
        }
        for i in start..k {
            cur.push(i);
            rec(i + 1, k, c0, cur, out);
            cur.pop();
        }
    }
    let mut cur = Vec::new();
    rec(0, k, c0, &mut cur, out);
}

/// Recursively partitions the index set into kept singletons and contracted
/// blocks, emitting one vertex per family and per choice of contractions.
#[allow(clippy::too_many_arguments)]
fn enumerate_families<I>(
    inst: &I,
    v: &Vertex<I::Elem>,
    by_subset: &HashMap<Vec<usize>, Vec<I::Elem>>,
    family: &mut Vec<Vec<usize>>,
    next: usize,
    c0: usize,
    out: &mut Vec<Vertex<I::Elem>>,
    budget: usize,
) -> Result<(), CoreError>
where
    I: ExpansionInstance,
{
    let k = v.height();
    // find the smallest index not yet placed in a block
    let mut idx = next;
    while idx < k && family.iter().any(|b| b.contains(&idx)) {
        idx += 1;
    }
    if idx == k {
        if family.is_empty() {
            return Ok(());
        }
        let in_block: Vec<bool> = {
            let mut m = vec![false; k];
            for b in family.iter().flatten() {
                m[*b] = true;
            }
            m
        };
        let kept: Vec<I::Elem> = (0..k)
            .filter(|&i| !in_block[i])
            .map(|i| v.elems()[i].clone())
            .collect();
        let choices: Vec<&Vec<I::Elem>> = family.iter().map(|b| &by_subset[b]).collect();
        if choices.iter().any(|c| c.is_empty()) {
            return Ok(());
        }
        let mut pick = vec![0usize; choices.len()];
        loop {
            let mut elems = kept.clone();
            for (ci, &c) in pick.iter().enumerate() {
                elems.push(choices[ci][c].clone());
            }
            out.push(Vertex::new(inst, elems).expect("contractions have disjoint supports"));
            if out.len() > budget {
                return Err(CoreError::Budget(BudgetExceeded { budget }));
            }
            // advance the mixed-radix counter over contraction choices
            let mut ci = 0;
            loop {
                if ci == pick.len() {
                    return Ok(());
                }
                pick[ci] += 1;
                if pick[ci] < choices[ci].len() {
                    break;
                }
                pick[ci] = 0;
                ci += 1;
            }
        }
    }
    // idx stays a kept singleton
    enumerate_families(inst, v, by_subset, family, idx + 1, c0, out, budget)?;
    // or idx opens a new block with 1..c0 further indices
    let free: Vec<usize> = (idx + 1..k)
        .filter(|i| !family.iter().any(|b| b.contains(i)))
        .collect();
    let mut extra: Vec<usize> = Vec::new();
    grow_block(
        inst, v, by_subset, family, idx, &free, 0, &mut extra, c0, out, budget,
    )
}

#[allow(clippy::too_many_arguments)]
fn grow_block<I>(
    inst: &I,
    v: &Vertex<I::Elem>,
    by_subset: &HashMap<Vec<usize>, Vec<I::Elem>>,
    family: &mut Vec<Vec<usize>>,
    anchor: usize,
    free: &[usize],
    start: usize,
    extra: &mut Vec<usize>,
    c0: usize,
    out: &mut Vec<Vertex<I::Elem>>,
    budget: usize,
) -> Result<(), CoreError>
where
    I: ExpansionInstance,
{
    if !extra.is_empty() {
        let mut block = vec![anchor];
        block.extend_from_slice(extra);
        family.push(block);
        enumerate_families(inst, v, by_subset, family, anchor + 1, c0, out, budget)?;
        family.pop();
    }
    if extra.len() + 1 == c0 {
        return Ok(());
    }
    for i in start..free.len() {
        extra.push(free[i]);
        grow_block(
            inst,
            v,
            by_subset,
            family,
            anchor,
            free,
            i + 1,
            extra,
            c0,
            out,
            budget,
        )?;
        extra.pop();
    }
    Ok(())
}

/// Assembles the flag complex of the edge relation on a vertex list.
pub(crate) fn build_link<I>(
    inst: &I,
    mut vertices: Vec<Vertex<I::Elem>>,
    budget: usize,
) -> Result<Link<I::Elem>, CoreError>
where
    I: ExpansionInstance,
{
    let labels: Vec<String> = {
        let mut tagged: Vec<(usize, String)> = vertices
            .iter()
            .enumerate()
            .map(|(i, u)| (i, vertex_label(inst, u)))
            .collect();
        tagged.sort_by(|a, b| {
            (vertices[a.0].height(), &a.1).cmp(&(vertices[b.0].height(), &b.1))
        });
        let order: Vec<usize> = tagged.iter().map(|(i, _)| *i).collect();
        let mut sorted = Vec::with_capacity(vertices.len());
        for &i in &order {
            sorted.push(vertices[i].clone());
        }
        vertices = sorted;
        tagged.into_iter().map(|(_, l)| l).collect()
    };

    // every element's poset, fetched once per distinct presentation
    let mut pool: Vec<ExpansionPoset<I::Elem>> = Vec::new();
    let mut pool_idx: HashMap<String, usize> = HashMap::new();
    let mut elem_posets: Vec<Vec<usize>> = Vec::with_capacity(vertices.len());
    for u in &vertices {
        let mut row = Vec::with_capacity(u.height());
        for b in u.elems() {
            let key = inst.elem_label(b);
            let idx = match pool_idx.get(&key) {
                Some(&i) => i,
                None => {
                    let p = inst.expansions(b)?;
                    pool.push(p);
                    pool_idx.insert(key, pool.len() - 1);
                    pool.len() - 1
                }
            };
            row.push(idx);
        }
        elem_posets.push(row);
    }

    let n = vertices.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| vertices[i].height() < vertices[j].height())
        .collect();
    let verts = &vertices;
    let posets = &pool;
    let rows = &elem_posets;
    let flags: Vec<bool> = exec::map_batch(pairs.clone(), |(i, j)| {
        pooled_edge_leq(inst, verts, posets, rows, i, j)
    });
    let mut adj = vec![vec![false; n]; n];
    for (&(i, j), &f) in pairs.iter().zip(&flags) {
        if f {
            adj[i][j] = true;
        }
    }

    // simplices = cliques; extend by index order, which respects heights
    let mut simplices: Vec<Vec<u32>> = Vec::new();
    let mut stack: Vec<u32> = Vec::new();
    for s in 0..n {
        stack.push(s as u32);
        clique_dfs(&adj, s, &mut stack, &mut simplices, budget)?;
        stack.pop();
    }
    let complex = Complex::from_maximal(labels, &simplices, budget)?;
    Ok(Link { complex, vertices })
}

fn clique_dfs(
    adj: &[Vec<bool>],
    last: usize,
    stack: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
    budget: usize,
) -> Result<(), CoreError> {
    out.push(stack.clone());
    if out.len() > budget {
        return Err(CoreError::Budget(BudgetExceeded { budget }));
    }
    for next in last + 1..adj.len() {
        if stack.iter().all(|&m| adj[m as usize][next]) {
            stack.push(next as u32);
            clique_dfs(adj, next, stack, out, budget)?;
            stack.pop();
        }
    }
    Ok(())
}

/// The edge test using pre-fetched posets.
fn pooled_edge_leq<I>(
    inst: &I,
    vertices: &[Vertex<I::Elem>],
    pool: &[ExpansionPoset<I::Elem>],
    elem_posets: &[Vec<usize>],
    i: usize,
    j: usize,
) -> bool
where
    I: ExpansionInstance,
{
    let (u, w) = (&vertices[i], &vertices[j]);
    for t in w.supports() {
        if !u.supports().iter().any(|s| t.subset_of(s)) {
            return false;
        }
    }
    for bi in 0..u.height() {
        let poset = &pool[elem_posets[i][bi]];
        let r = restriction_by_support(&u.supports()[bi], w);
        if r.is_empty() {
            return false;
        }
        let rv = Vertex::new(inst, r).expect("a subset of a vertex is a vertex");
        if poset.find(inst, &rv).is_none() {
            return false;
        }
    }
    true
}

/// For each element of `u`, the indices of the elements of `v` lying inside
/// its support (its production relative to `v`).
pub fn productions_rel<I>(inst: &I, u: &Vertex<I::Elem>, v: &Vertex<I::Elem>) -> Vec<Vec<usize>>
where
    I: ExpansionInstance + ?Sized,
{
    let _ = inst;
    u.supports()
        .iter()
        .map(|s| {
            v.supports()
                .iter()
                .enumerate()
                .filter(|(_, t)| t.subset_of(s))
                .map(|(i, _)| i)
                .collect()
        })
        .collect()
}

/// The partitioned descending link lk^P: the full subcomplex of the
/// descending link on the vertices all of whose nontrivial productions stay
/// inside a single block of `partition`.  Membership of a simplex only
/// depends on its minimal vertex, because qualifying is upward closed along
/// the edge relation, so the induced subcomplex is the right notion.
pub fn partitioned_descending_link<I>(
    inst: &I,
    v: &Vertex<I::Elem>,
    partition: &Partition,
    budget: usize,
) -> Result<Link<I::Elem>, CoreError>
where
    I: ExpansionInstance,
{
    partition.validate(v.height())?;
    let link = descending_link(inst, v, budget)?;
    partitioned_from_full(inst, v, &link, partition)
}

/// Restricts an already-computed full descending link to one partition.
pub fn partitioned_from_full<I>(
    inst: &I,
    v: &Vertex<I::Elem>,
    link: &Link<I::Elem>,
    partition: &Partition,
) -> Result<Link<I::Elem>, CoreError>
where
    I: ExpansionInstance,
{
    partition.validate(v.height())?;
    let keep: Vec<u32> = link
        .vertices
        .iter()
        .enumerate()
        .filter(|(_, u)| respects_partition(inst, u, v, partition))
        .map(|(i, _)| i as u32)
        .collect();
    let complex = link.complex.induced(&keep);
    let vertices = keep.iter().map(|&i| link.vertices[i as usize].clone()).collect();
    Ok(Link { complex, vertices })
}

/// Whether every nontrivial production of `u` relative to `v` lies inside a
/// single block of the partition.
pub fn respects_partition<I>(
    inst: &I,
    u: &Vertex<I::Elem>,
    v: &Vertex<I::Elem>,
    partition: &Partition,
) -> bool
where
    I: ExpansionInstance + ?Sized,
{
    productions_rel(inst, u, v).iter().all(|p| {
        p.len() <= 1
            || partition
                .blocks()
                .iter()
                .any(|blk| p.iter().all(|i| blk.contains(i)))
    })
}

/// Sanity check used in tests: a vertex of the full link is recovered by the
/// spec membership condition (restriction into ℰ for each of its elements).
pub fn link_membership<I>(inst: &I, u: &Vertex<I::Elem>, v: &Vertex<I::Elem>) -> bool
where
    I: ExpansionInstance,
{
    !vertex_equal(inst, u, v) && super::edge_leq(inst, u, v)
}
