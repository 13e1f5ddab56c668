//! Exact finite simplicial-complex engine.
//!
//! A [`Complex`] stores every simplex explicitly (face-closed, sorted vertex
//! indices), which keeps homology, joins, order complexes and nerves exact
//! and deterministic.  Construction is guarded by a simplex budget
//! (default 2·10⁶, overridable via the `EXPANSE_BUDGET` environment
//! variable) so runaway inputs fail loudly instead of thrashing.

mod collapse;
mod homology;

pub use collapse::{greedy_collapse, CollapseOutcome, CollapseStep, CollapseVerdict};
pub use homology::{reduced_homology, HomologyReport};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const DEFAULT_BUDGET: usize = 2_000_000;

/// The simplex budget: `EXPANSE_BUDGET` if set and parseable, else the
/// default.  Read once per process.
pub fn default_budget() -> usize {
    static BUDGET: OnceLock<usize> = OnceLock::new();
    *BUDGET.get_or_init(|| {
        std::env::var("EXPANSE_BUDGET")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(DEFAULT_BUDGET)
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("simplex budget exceeded: complex needs more than {budget} simplices")]
pub struct BudgetExceeded {
    pub budget: usize,
}

/// A finite abstract simplicial complex on labelled vertices.  `simplices`
/// holds every nonempty simplex as a strictly increasing index vector; the
/// set is face-closed and every label is a vertex (a 0-simplex).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Complex {
    labels: Vec<String>,
    simplices: BTreeSet<Vec<u32>>,
}

impl Complex {
    pub fn empty() -> Self {
        Complex::default()
    }

    /// Builds a complex from maximal simplices (faces are added
    /// automatically; every label becomes a vertex even if isolated).
    pub fn from_maximal(
        labels: Vec<String>,
        maximal: &[Vec<u32>],
        budget: usize,
    ) -> Result<Self, BudgetExceeded> {
        let mut c = Complex {
            labels,
            simplices: BTreeSet::new(),
        };
        for i in 0..c.labels.len() as u32 {
            c.insert_closed(&[i], budget)?;
        }
        for s in maximal {
            c.insert_closed(s, budget)?;
        }
        Ok(c)
    }

    /// A single point.
    pub fn point(label: &str) -> Self {
        Complex::from_maximal(vec![label.to_string()], &[], usize::MAX)
            .expect("a point is within any budget")
    }

    /// Inserts a simplex together with all of its faces.
    pub fn insert_closed(&mut self, simplex: &[u32], budget: usize) -> Result<(), BudgetExceeded> {
        let mut s = simplex.to_vec();
        s.sort_unstable();
        s.dedup();
        assert!(!s.is_empty(), "simplices are nonempty");
        assert!(
            *s.last().unwrap() < self.labels.len() as u32,
            "vertex index out of range"
        );
        if self.simplices.contains(&s) {
            return Ok(());
        }
        // closure by subset enumeration; dimensions here are small
        let k = s.len();
        for mask in 1u64..(1 << k) {
            let face: Vec<u32> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect();
            if self.simplices.insert(face) && self.simplices.len() > budget {
                return Err(BudgetExceeded { budget });
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn simplex_count(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, simplex: &[u32]) -> bool {
        let mut s = simplex.to_vec();
        s.sort_unstable();
        self.simplices.contains(&s)
    }

    pub fn simplices(&self) -> impl Iterator<Item = &Vec<u32>> {
        self.simplices.iter()
    }

    /// Dimension of the complex, or None when empty.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.iter().map(|s| s.len() - 1).max()
    }

    pub fn simplices_of_dim(&self, d: usize) -> Vec<&Vec<u32>> {
        self.simplices.iter().filter(|s| s.len() == d + 1).collect()
    }

    /// Simplices with no proper coface, in lexicographic order.
    pub fn maximal_simplices(&self) -> Vec<Vec<u32>> {
        self.simplices
            .iter()
            .filter(|s| {
                !(0..self.labels.len() as u32).any(|v| {
                    if s.binary_search(&v).is_ok() {
                        return false;
                    }
                    let mut bigger = s.to_vec();
                    bigger.push(v);
                    bigger.sort_unstable();
                    self.simplices.contains(&bigger)
                })
            })
            .cloned()
            .collect()
    }

    /// Number of path components (isolated vertices count).
    pub fn components(&self) -> usize {
        let n = self.labels.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for s in self.simplices.iter().filter(|s| s.len() == 2) {
            let (a, b) = (
                find(&mut parent, s[0] as usize),
                find(&mut parent, s[1] as usize),
            );
            if a != b {
                parent[a] = b;
            }
        }
        (0..n).filter(|&i| find(&mut parent, i) == i).count()
    }

    /// Alternating sum over all simplices (unreduced).
    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .map(|s| if s.len() % 2 == 1 { 1 } else { -1 })
            .sum()
    }

    /// The full subcomplex on the vertices selected by `keep` (indices into
    /// this complex), with vertices renumbered in the order given.
    pub fn induced(&self, keep: &[u32]) -> Complex {
        let index: BTreeMap<u32, u32> = keep
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new as u32))
            .collect();
        assert_eq!(index.len(), keep.len(), "duplicate vertex in selection");
        let labels = keep
            .iter()
            .map(|&i| self.labels[i as usize].clone())
            .collect();
        let simplices = self
            .simplices
            .iter()
            .filter(|s| s.iter().all(|v| index.contains_key(v)))
            .map(|s| {
                let mut t: Vec<u32> = s.iter().map(|v| index[v]).collect();
                t.sort_unstable();
                t
            })
            .collect();
        Complex { labels, simplices }
    }

    /// The abstract join: vertices are namespaced by factor as `i|label`, and
    /// simplices are all unions of one (possibly empty) simplex per factor.
    pub fn join_all(factors: &[Complex], budget: usize) -> Result<Complex, BudgetExceeded> {
        let mut labels = Vec::new();
        let mut offsets = Vec::with_capacity(factors.len());
        for (i, f) in factors.iter().enumerate() {
            offsets.push(labels.len() as u32);
            for l in &f.labels {
                labels.push(format!("{i}|{l}"));
            }
        }
        let mut out = Complex {
            labels,
            simplices: BTreeSet::new(),
        };
        // product over factors of (simplices + empty), skipping all-empty
        let mut stack: Vec<Vec<u32>> = vec![Vec::new()];
        for (i, f) in factors.iter().enumerate() {
            let mut next = Vec::new();
            for partial in &stack {
                next.push(partial.clone()); // empty choice in this factor
                for s in &f.simplices {
                    let mut ext = partial.clone();
                    ext.extend(s.iter().map(|v| v + offsets[i]));
                    next.push(ext);
                }
            }
            if next.len() > budget.saturating_add(1) {
                return Err(BudgetExceeded { budget });
            }
            stack = next;
        }
        for s in stack {
            if s.is_empty() {
                continue;
            }
            if out.simplices.insert(s) && out.simplices.len() > budget {
                return Err(BudgetExceeded { budget });
            }
        }
        Ok(out)
    }

    pub fn join(&self, other: &Complex, budget: usize) -> Result<Complex, BudgetExceeded> {
        Complex::join_all(&[self.clone(), other.clone()], budget)
    }

    /// Deterministic DOT rendering of the 1-skeleton.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph complex {\n");
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(&format!("  v{i} [label=\"{}\"];\n", l.replace('"', "'")));
        }
        for s in self.simplices.iter().filter(|s| s.len() == 2) {
            out.push_str(&format!("  v{} -- v{};\n", s[0], s[1]));
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "complex with {} vertices, {} simplices",
            self.labels.len(),
            self.simplices.len()
        )
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexRepr {
    vertices: Vec<String>,
    maximal_simplices: Vec<Vec<u32>>,
}

impl Serialize for Complex {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let repr = ComplexRepr {
            vertices: self.labels.clone(),
            maximal_simplices: self.maximal_simplices(),
        };
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Complex {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = ComplexRepr::deserialize(de)?;
        for s in &repr.maximal_simplices {
            for &v in s {
                if v as usize >= repr.vertices.len() {
                    return Err(D::Error::custom(format!(
                        "simplex vertex index {v} out of range"
                    )));
                }
            }
        }
        Complex::from_maximal(repr.vertices, &repr.maximal_simplices, default_budget())
            .map_err(D::Error::custom)
    }
}

/// The order complex of a finite poset: vertices are the nodes, simplices the
/// nonempty strictly ascending chains.  `less` must be the strict order.
pub fn order_complex(
    labels: Vec<String>,
    less: impl Fn(usize, usize) -> bool,
    budget: usize,
) -> Result<Complex, BudgetExceeded> {
    let n = labels.len();
    let mut c = Complex {
        labels,
        simplices: BTreeSet::new(),
    };
    // grow chains by their unique linear extension: each chain is produced
    // exactly once, extended only past its top element
    let mut stack: Vec<Vec<u32>> = (0..n as u32).map(|i| vec![i]).collect();
    while let Some(chain) = stack.pop() {
        let mut sorted = chain.clone();
        sorted.sort_unstable();
        if c.simplices.insert(sorted) && c.simplices.len() > budget {
            return Err(BudgetExceeded { budget });
        }
        let top = *chain.last().unwrap() as usize;
        for j in 0..n {
            if less(top, j) {
                let mut ext = chain.clone();
                ext.push(j as u32);
                stack.push(ext);
            }
        }
    }
    Ok(c)
}

/// The nerve of a cover, with cover members given as subcomplexes of one
/// common complex (matched by vertex label).  A set of members spans a
/// simplex iff the members share a vertex, so the nerve is generated by one
/// full simplex per shared vertex; `max_dim` caps the stored skeleton for
/// large covers.  Empty members are dropped; nerve vertices are labelled by
/// the surviving member indices.
pub fn nerve(
    members: &[Complex],
    max_dim: Option<usize>,
    budget: usize,
) -> Result<Complex, BudgetExceeded> {
    let kept: Vec<(usize, &Complex)> = members
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .collect();
    let labels: Vec<String> = kept.iter().map(|(i, _)| i.to_string()).collect();
    let mut generators: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut all_vertex_labels: BTreeSet<&String> = BTreeSet::new();
    for (_, m) in &kept {
        all_vertex_labels.extend(m.labels.iter());
    }
    for label in all_vertex_labels {
        let holder: Vec<u32> = kept
            .iter()
            .enumerate()
            .filter(|(_, (_, m))| m.labels.iter().any(|l| l == label))
            .map(|(new, _)| new as u32)
            .collect();
        if !holder.is_empty() {
            generators.insert(holder);
        }
    }
    let mut c = Complex {
        labels,
        simplices: BTreeSet::new(),
    };
    for i in 0..c.labels.len() as u32 {
        c.insert_closed(&[i], budget)?;
    }
    for g in generators {
        match max_dim {
            None => c.insert_closed(&g, budget)?,
            Some(cap) => {
                // insert only the faces of g with ≤ cap+1 vertices
                insert_skeleton(&mut c, &g, cap + 1, budget)?;
            }
        }
    }
    Ok(c)
}

fn insert_skeleton(
    c: &mut Complex,
    simplex: &[u32],
    max_len: usize,
    budget: usize,
) -> Result<(), BudgetExceeded> {
    fn go(
        c: &mut Complex,
        simplex: &[u32],
        start: usize,
        cur: &mut Vec<u32>,
        max_len: usize,
        budget: usize,
    ) -> Result<(), BudgetExceeded> {
        if !cur.is_empty() {
            if c.simplices.insert(cur.clone()) && c.simplices.len() > budget {
                return Err(BudgetExceeded { budget });
            }
        }
        if cur.len() == max_len {
            return Ok(());
        }
        for i in start..simplex.len() {
            cur.push(simplex[i]);
            go(c, simplex, i + 1, cur, max_len, budget)?;
            cur.pop();
        }
        Ok(())
    }
    let mut cur = Vec::new();
    go(c, simplex, 0, &mut cur, max_len, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> usize {
        default_budget()
    }

    #[test]
    fn face_closure_and_maximality() {
        let c = Complex::from_maximal(
            vec!["a".into(), "b".into(), "c".into()],
            &[vec![0, 1, 2]],
            budget(),
        )
        .unwrap();
        assert_eq!(c.simplex_count(), 7);
        assert_eq!(c.maximal_simplices(), vec![vec![0, 1, 2]]);
        assert_eq!(c.components(), 1);
        assert_eq!(c.euler_characteristic(), 1);
    }

    #[test]
    fn join_of_two_zero_spheres_is_a_circle() {
        let s0 = Complex::from_maximal(vec!["p".into(), "q".into()], &[], budget()).unwrap();
        let j = s0.join(&s0, budget()).unwrap();
        assert_eq!(j.vertex_count(), 4);
        assert_eq!(j.simplices_of_dim(1).len(), 4);
        assert_eq!(j.dim(), Some(1));
        assert_eq!(j.euler_characteristic(), 0);
    }

    #[test]
    fn order_complex_of_square_poset_is_two_triangles() {
        // bottom < left,right < top, left and right incomparable
        let less = |i: usize, j: usize| {
            matches!(
                (i, j),
                (0, 1) | (0, 2) | (0, 3) | (1, 3) | (2, 3)
            )
        };
        let labels = vec!["bot".into(), "left".into(), "right".into(), "top".into()];
        let c = order_complex(labels, less, budget()).unwrap();
        let max = c.maximal_simplices();
        assert_eq!(max, vec![vec![0, 1, 3], vec![0, 2, 3]]);
        assert!(c.contains(&[0, 3]));
    }

    #[test]
    fn nerve_basics() {
        let path = Complex::from_maximal(
            vec!["x".into(), "y".into(), "z".into()],
            &[vec![0, 1], vec![1, 2]],
            budget(),
        )
        .unwrap();
        let whole = nerve(&[path.clone()], None, budget()).unwrap();
        assert_eq!(whole.vertex_count(), 1);
        let e1 = path.induced(&[0, 1]);
        let e2 = path.induced(&[1, 2]);
        let n = nerve(&[e1, e2], None, budget()).unwrap();
        assert_eq!(n.maximal_simplices(), vec![vec![0, 1]]);
    }

    #[test]
    fn nerve_skeleton_cap() {
        let pt = Complex::point("shared");
        let members: Vec<Complex> = (0..10).map(|_| pt.clone()).collect();
        let n = nerve(&members, Some(2), budget()).unwrap();
        assert_eq!(n.dim(), Some(2));
        assert_eq!(n.simplices_of_dim(2).len(), 120);
    }

    #[test]
    fn budget_is_enforced() {
        let labels: Vec<String> = (0..25).map(|i| i.to_string()).collect();
        let big: Vec<u32> = (0..25).collect();
        let err = Complex::from_maximal(labels, &[big], 1000).unwrap_err();
        assert_eq!(err.budget, 1000);
    }

    #[test]
    fn json_round_trip() {
        let c = Complex::from_maximal(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            &[vec![0, 1, 2], vec![2, 3]],
            budget(),
        )
        .unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: Complex = serde_json::from_str(&text).unwrap();
        assert_eq!(c, back);
        assert!(text.contains("\"vertices\""));
        assert!(text.contains("\"maximal_simplices\""));
    }

    #[test]
    fn dot_is_stable() {
        let c = Complex::from_maximal(
            vec!["a".into(), "b".into()],
            &[vec![0, 1]],
            budget(),
        )
        .unwrap();
        assert_eq!(c.to_dot(), c.to_dot());
        assert!(c.to_dot().contains("v0 -- v1"));
    }
}
