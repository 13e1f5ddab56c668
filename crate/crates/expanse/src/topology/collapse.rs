//! Greedy free-face collapsing.
//!
//! A simplex is *free* when it has exactly one proper coface; removing the
//! pair is an elementary collapse and preserves homotopy type.  Greedily
//! collapsing until nothing is free either reaches a single vertex — a
//! certificate of contractibility — or stalls, which proves nothing (the
//! verdict is `Inconclusive`, never "not contractible").  The greedy order is
//! deterministic: always the lexicographically least free simplex.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::Complex;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CollapseVerdict {
    Collapsible,
    Inconclusive,
}

/// One elementary collapse: `free` had `coface` as its unique coface.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CollapseStep {
    pub free: Vec<u32>,
    pub coface: Vec<u32>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CollapseOutcome {
    pub verdict: CollapseVerdict,
    pub steps: Vec<CollapseStep>,
    /// Simplices left when the collapse stalled (1 when collapsible).
    pub remaining: usize,
}

pub fn greedy_collapse(complex: &Complex) -> CollapseOutcome {
    let mut live: HashSet<Vec<u32>> = complex.simplices().cloned().collect();
    // count codim-1 cofaces; a unique proper coface is necessarily codim 1,
    // because a deeper coface would contribute two intermediate ones
    let mut cnt: HashMap<Vec<u32>, usize> = live.iter().map(|s| (s.clone(), 0)).collect();
    for s in &live {
        if s.len() >= 2 {
            for f in codim1_faces(s) {
                *cnt.get_mut(&f).expect("complex is face-closed") += 1;
            }
        }
    }
    let vertex_ids: Vec<u32> = (0..complex.vertex_count() as u32).collect();
    let mut candidates: BTreeSet<Vec<u32>> = cnt
        .iter()
        .filter(|(_, &c)| c == 1)
        .map(|(s, _)| s.clone())
        .collect();
    let mut steps = Vec::new();
    while let Some(free) = candidates.pop_first() {
        if !live.contains(&free) || cnt[&free] != 1 {
            continue;
        }
        let coface = unique_coface(&free, &vertex_ids, &live);
        for removed in [&free, &coface] {
            live.remove(removed);
            cnt.remove(removed);
            if removed.len() >= 2 {
                for f in codim1_faces(removed) {
                    if let Some(c) = cnt.get_mut(&f) {
                        *c -= 1;
                        if *c == 1 {
                            candidates.insert(f);
                        }
                    }
                }
            }
        }
        steps.push(CollapseStep {
            free,
            coface,
        });
    }
    let verdict = if live.len() == 1 {
        CollapseVerdict::Collapsible
    } else {
        CollapseVerdict::Inconclusive
    };
    CollapseOutcome {
        verdict,
        steps,
        remaining: live.len(),
    }
}

fn codim1_faces(s: &[u32]) -> impl Iterator<Item = Vec<u32>> + '_ {
    (0..s.len()).map(move |i| {
        let mut f = s.to_vec();
        f.remove(i);
        f
    })
}

fn unique_coface(free: &[u32], vertex_ids: &[u32], live: &HashSet<Vec<u32>>) -> Vec<u32> {
    for &v in vertex_ids {
        if free.binary_search(&v).is_ok() {
            continue;
        }
        let mut bigger = free.to_vec();
        bigger.push(v);
        bigger.sort_unstable();
        if live.contains(&bigger) {
            return bigger;
        }
    }
    unreachable!("a free simplex always has its coface live");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::default_budget;

    fn complex(labels: usize, maximal: &[Vec<u32>]) -> Complex {
        let labels = (0..labels).map(|i| i.to_string()).collect();
        Complex::from_maximal(labels, maximal, default_budget()).unwrap()
    }

    #[test]
    fn single_simplex_collapses() {
        let out = greedy_collapse(&complex(3, &[vec![0, 1, 2]]));
        assert_eq!(out.verdict, CollapseVerdict::Collapsible);
        assert_eq!(out.remaining, 1);
        assert_eq!(out.steps.len(), 3);
    }

    #[test]
    fn two_edge_path_collapses() {
        let out = greedy_collapse(&complex(3, &[vec![0, 1], vec![1, 2]]));
        assert_eq!(out.verdict, CollapseVerdict::Collapsible);
        // deterministic greedy: the least free simplex [0] goes first
        assert_eq!(out.steps[0].free, vec![0]);
        assert_eq!(out.steps[0].coface, vec![0, 1]);
    }

    #[test]
    fn hollow_triangle_is_inconclusive() {
        let out = greedy_collapse(&complex(3, &[vec![0, 1], vec![1, 2], vec![0, 2]]));
        assert_eq!(out.verdict, CollapseVerdict::Inconclusive);
        assert!(out.steps.is_empty());
        assert_eq!(out.remaining, 6);
    }

    #[test]
    fn empty_and_point() {
        assert_eq!(
            greedy_collapse(&Complex::empty()).verdict,
            CollapseVerdict::Inconclusive
        );
        let out = greedy_collapse(&Complex::point("p"));
        assert_eq!(out.verdict, CollapseVerdict::Collapsible);
        assert!(out.steps.is_empty());
    }

    #[test]
    fn disjoint_union_never_reaches_a_point() {
        let out = greedy_collapse(&complex(4, &[vec![0, 1], vec![2, 3]]));
        assert_eq!(out.verdict, CollapseVerdict::Inconclusive);
        assert_eq!(out.remaining, 2);
    }
}
