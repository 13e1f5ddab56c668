//! Ascending stars and links, their product/join factorizations, and the
//! expansion order (reachability by sequences of elementary expansions).

use std::collections::HashMap;

use super::links::Link;
use super::simplex::{restriction_by_support, vertex_equal, vertex_label};
use super::{edge_leq, is_simplex, CoreError, ExpansionInstance, ExpansionPoset, Vertex};
use crate::topology::{order_complex, BudgetExceeded, Complex};

/// The ascending star of `v` with its factorization certificate: `nodes[t]`
/// is the vertex assembled from `tuples[t]`, where `tuples[t][i]` indexes a
/// node of `factors[i]` = ℰ(b_i).  Node 0 is the bottom tuple, i.e. `v`
/// itself.
#[derive(Clone, Debug)]
pub struct AscendingStar<E> {
    pub complex: Complex,
    pub nodes: Vec<Vertex<E>>,
    pub tuples: Vec<Vec<usize>>,
    pub factors: Vec<ExpansionPoset<E>>,
}

impl<E: Clone + Send + Sync + std::fmt::Debug> AscendingStar<E> {
    /// Verifies that tuple assembly is a bijection matching restrictions and
    /// that the product order agrees with the edge relation on vertices.
    pub fn certificate_ok<I>(&self, inst: &I) -> Result<(), String>
    where
        I: ExpansionInstance<Elem = E>,
    {
        let n = self.nodes.len();
        for s in 0..n {
            for t in s + 1..n {
                if vertex_equal(inst, &self.nodes[s], &self.nodes[t]) {
                    return Err(format!("tuples {s} and {t} assemble the same vertex"));
                }
            }
        }
        // p(w) recovers the tuple: restriction along each factor support
        for (t, node) in self.nodes.iter().enumerate() {
            for (i, factor) in self.factors.iter().enumerate() {
                let support = factor.node(0).support_union();
                let r = restriction_by_support(&support, node);
                let rv = Vertex::new(inst, r).map_err(|e| e.to_string())?;
                if !vertex_equal(inst, &rv, factor.node(self.tuples[t][i])) {
                    return Err(format!("restriction of node {t} misses its tuple entry {i}"));
                }
            }
        }
        for s in 0..n {
            for t in 0..n {
                if s == t {
                    continue;
                }
                let product = (0..self.factors.len())
                    .all(|i| self.factors[i].leq(self.tuples[s][i], self.tuples[t][i]));
                let edge = edge_leq(inst, &self.nodes[s], &self.nodes[t]);
                if product != edge {
                    return Err(format!(
                        "order mismatch between tuples {s} and {t}: product {product}, edge {edge}"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// An ascending link in both of its incarnations: the chain complex of the
/// punctured product poset, and the abstract join of the punctured factor
/// posets' order complexes.  The two are compared homologically.
#[derive(Clone, Debug)]
pub struct AscendingLink<E> {
    pub chain: Link<E>,
    pub join_model: Complex,
}

/// The ascending star of `v`: the order complex of the product poset
/// Π ℰ(b_i), with nodes assembled by uniting one expansion per element.
pub fn ascending_star<I>(
    inst: &I,
    v: &Vertex<I::Elem>,
    budget: usize,
) -> Result<AscendingStar<I::Elem>, CoreError>
where
    I: ExpansionInstance,
{
    let factors = poset_factors(inst, v)?;
    let tuples = cartesian(&factors.iter().map(|f| f.len()).collect::<Vec<_>>(), budget)?;
    let mut nodes = Vec::with_capacity(tuples.len());
    for t in &tuples {
        nodes.push(assemble(inst, &factors, t));
    }
    let labels: Vec<String> = tuples.iter().map(|t| tuple_label(t)).collect();
    let leq = |s: usize, t: usize| {
        (0..factors.len()).all(|i| factors[i].leq(tuples[s][i], tuples[t][i]))
    };
    let complex = order_complex(labels, |s, t| s != t && leq(s, t), budget)?;
    Ok(AscendingStar {
        complex,
        nodes,
        tuples,
        factors,
    })
}

/// The ascending link of `v`: the punctured star (all tuples except the
/// bottom) plus the abstract join model.
pub fn ascending_link<I>(
    inst: &I,
    v: &Vertex<I::Elem>,
    budget: usize,
) -> Result<AscendingLink<I::Elem>, CoreError>
where
    I: ExpansionInstance,
{
    let factors = poset_factors(inst, v)?;
    let keep: Vec<Vec<usize>> = factors.iter().map(|f| (0..f.len()).collect()).collect();
    punctured_product(inst, factors, &keep, budget)
}

/// The relative ascending link lk_↑(v, v″): the subcomplex of lk_↑(v)
/// spanned by the vertices that expand up to v″.  Requires v ↗ v″.
pub fn relative_ascending_link<I>(
    inst: &I,
    v: &Vertex<I::Elem>,
    vprime: &Vertex<I::Elem>,
    budget: usize,
) -> Result<AscendingLink<I::Elem>, CoreError>
where
    I: ExpansionInstance,
{
    if expansion_leq(inst, v, vprime, budget)?.is_none() {
        return Err(CoreError::NotComparable);
    }
    let factors = poset_factors(inst, v)?;
    let mut keep = Vec::with_capacity(factors.len());
    for factor in &factors {
        let support = factor.node(0).support_union();
        let target = restriction_by_support(&support, vprime);
        let tv = Vertex::new(inst, target).expect("v′ restricts onto each factor");
        let mut kept = Vec::new();
        for (i, w) in factor.nodes().iter().enumerate() {
            if expansion_leq(inst, w, &tv, budget)?.is_some() {
                kept.push(i);
            }
        }
        keep.push(kept);
    }
    punctured_product(inst, factors, &keep, budget)
}

/// Chain complex of the product of the kept sub-posets minus its bottom,
/// together with the join of the punctured kept factors.
fn punctured_product<I>(
    inst: &I,
    factors: Vec<ExpansionPoset<I::Elem>>,
    keep: &[Vec<usize>],
    budget: usize,
) -> Result<AscendingLink<I::Elem>, CoreError>
where
    I: ExpansionInstance,
{
    for kept in keep {
        assert!(kept.contains(&0), "each kept sub-poset retains the bottom");
    }
    let sizes: Vec<usize> = keep.iter().map(|k| k.len()).collect();
    let all = cartesian(&sizes, budget)?;
    let tuples: Vec<Vec<usize>> = all
        .into_iter()
        .map(|t| {
            t.iter()
                .enumerate()
                .map(|(i, &x)| keep[i][x])
                .collect::<Vec<usize>>()
        })
        .filter(|t| t.iter().any(|&x| x != 0))
        .collect();
    let mut vertices = Vec::with_capacity(tuples.len());
    for t in &tuples {
        vertices.push(assemble(inst, &factors, t));
    }
    let labels: Vec<String> = tuples.iter().map(|t| tuple_label(t)).collect();
    let leq = |s: usize, t: usize| {
        (0..factors.len()).all(|i| factors[i].leq(tuples[s][i], tuples[t][i]))
    };
    let complex = order_complex(labels, |s, t| s != t && leq(s, t), budget)?;

    let mut factor_complexes = Vec::with_capacity(factors.len());
    for (i, factor) in factors.iter().enumerate() {
        let kept: Vec<usize> = keep[i].iter().copied().filter(|&x| x != 0).collect();
        let labels: Vec<String> = kept
            .iter()
            .map(|&x| vertex_label(inst, factor.node(x)))
            .collect();
        let fc = order_complex(
            labels,
            |s, t| kept[s] != kept[t] && factor.leq(kept[s], kept[t]),
            budget,
        )?;
        factor_complexes.push(fc);
    }
    let join_model = Complex::join_all(&factor_complexes, budget)?;
    Ok(AscendingLink {
        chain: Link { complex, vertices },
        join_model,
    })
}

fn poset_factors<I>(
    inst: &I,
    v: &Vertex<I::Elem>,
) -> Result<Vec<ExpansionPoset<I::Elem>>, CoreError>
where
    I: ExpansionInstance,
{
    v.elems().iter().map(|b| inst.expansions(b)).collect()
}

fn assemble<I>(
    inst: &I,
    factors: &[ExpansionPoset<I::Elem>],
    tuple: &[usize],
) -> Vertex<I::Elem>
where
    I: ExpansionInstance,
{
    let mut elems = Vec::new();
    for (i, &x) in tuple.iter().enumerate() {
        elems.extend(factors[i].node(x).elems().iter().cloned());
    }
    Vertex::new(inst, elems).expect("factor vertices occupy disjoint supports")
}

fn tuple_label(t: &[usize]) -> String {
    let parts: Vec<String> = t.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn cartesian(sizes: &[usize], budget: usize) -> Result<Vec<Vec<usize>>, BudgetExceeded> {
    let total: usize = sizes.iter().product();
    if total > budget {
        return Err(BudgetExceeded { budget });
    }
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0usize; sizes.len()];
    loop {
        out.push(cur.clone());
        let mut i = 0;
        loop {
            if i == sizes.len() {
                return Ok(out);
            }
            cur[i] += 1;
            if cur[i] < sizes[i] {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Decides v1 ↗ v2 and, when comparable, returns a witness expansion
/// sequence from v1 to v2 whose consecutive pairs are re-validated as
/// simplices.  `Ok(None)` means definitely incomparable; running out of
/// budget is reported separately.
pub fn expansion_leq<I>(
    inst: &I,
    v1: &Vertex<I::Elem>,
    v2: &Vertex<I::Elem>,
    budget: usize,
) -> Result<Option<Vec<Vertex<I::Elem>>>, CoreError>
where
    I: ExpansionInstance,
{
    if v1.support_union().key() != v2.support_union().key() {
        return Ok(None);
    }
    for t in v2.supports() {
        if !v1.supports().iter().any(|s| t.subset_of(s)) {
            return Ok(None);
        }
    }
    let mut moves: Vec<(Vertex<I::Elem>, Vertex<I::Elem>)> = Vec::new();
    let mut fuel = Fuel {
        left: budget,
        budget,
    };
    let mut failed: HashMap<(String, String), ()> = HashMap::new();
    for (bi, b) in v1.elems().iter().enumerate() {
        let target = restriction_by_support(&v1.supports()[bi], v2);
        let tv = Vertex::new(inst, target).expect("restriction of a vertex is a vertex");
        match elem_witness(inst, b, &tv, &mut fuel, &mut failed)? {
            Some(ms) => moves.extend(ms),
            None => return Ok(None),
        }
    }
    // replay the elementary moves to produce the vertex sequence
    let mut seq = vec![v1.clone()];
    for (from, to) in moves {
        let cur = seq.last().expect("sequence starts nonempty");
        let b = &from.elems()[0];
        let mut elems: Vec<I::Elem> = Vec::new();
        let mut replaced = false;
        for (s, e) in cur.supports().iter().zip(cur.elems()) {
            if !replaced && s == &from.supports()[0] && inst.equal(e, b) {
                elems.extend(to.elems().iter().cloned());
                replaced = true;
            } else {
                elems.push(e.clone());
            }
        }
        assert!(replaced, "witness moves apply in order");
        let next = Vertex::new(inst, elems).expect("elementary expansions preserve disjointness");
        assert!(
            is_simplex(inst, &[cur.clone(), next.clone()]),
            "witness steps must span simplices"
        );
        seq.push(next);
    }
    debug_assert!(vertex_equal(inst, seq.last().unwrap(), v2));
    Ok(Some(seq))
}

struct Fuel {
    left: usize,
    budget: usize,
}

/// Moves expanding {b} to the target vertex, each of the form
/// (singleton {c}, vertex of ℰ(c) replacing it), in application order.
#[allow(clippy::type_complexity)]
fn elem_witness<I>(
    inst: &I,
    b: &I::Elem,
    target: &Vertex<I::Elem>,
    fuel: &mut Fuel,
    failed: &mut HashMap<(String, String), ()>,
) -> Result<Option<Vec<(Vertex<I::Elem>, Vertex<I::Elem>)>>, CoreError>
where
    I: ExpansionInstance,
{
    let singleton = Vertex::singleton(inst, b.clone());
    if vertex_equal(inst, &singleton, target) {
        return Ok(Some(Vec::new()));
    }
    if fuel.left == 0 {
        return Err(CoreError::Budget(BudgetExceeded {
            budget: fuel.budget,
        }));
    }
    fuel.left -= 1;
    let memo_key = (inst.elem_label(b), target_signature(inst, target));
    if failed.contains_key(&memo_key) {
        return Ok(None);
    }
    let poset = inst.expansions(b)?;
    'candidates: for w in poset.nodes().iter().skip(1) {
        // the target must refine w block-wise for w to lie on a path
        for t in target.supports() {
            if !w.supports().iter().any(|s| t.subset_of(s)) {
                continue 'candidates;
            }
        }
        let mut moves = vec![(singleton.clone(), w.clone())];
        let mut ok = true;
        for (ci, c) in w.elems().iter().enumerate() {
            let sub = restriction_by_support(&w.supports()[ci], target);
            let sv = Vertex::new(inst, sub).expect("restriction of a vertex is a vertex");
            match elem_witness(inst, c, &sv, fuel, failed)? {
                Some(ms) => moves.extend(ms),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(Some(moves));
        }
    }
    failed.insert(memo_key, ());
    Ok(None)
}

fn target_signature<I>(inst: &I, v: &Vertex<I::Elem>) -> String
where
    I: ExpansionInstance,
{
    format!("{}#{}", v.support_signature(), vertex_label(inst, v))
}
