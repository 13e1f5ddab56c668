//! Seeded random generators for trees, subdivisions, elements, vertices, and
//! small complexes.  Every generator takes an explicit ChaCha8 state, so a
//! single `u64` seed reproduces a whole run byte-for-byte on any platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boxes::{BoxMap, NBox};
use crate::cantor::{TableMap, Word};
use crate::core::{CoreError, ExpansionInstance, Vertex};
use crate::grig::{gw, GrigWord};
use crate::instances::{NVElement, RoverElement, RoverTable, VElement};
use crate::topology::Complex;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The leaves of a random finite binary tree with exactly `leaves` leaves,
/// grown by repeatedly splitting a uniformly chosen leaf.  Sorted.
pub fn random_tree_leaves(rng: &mut ChaCha8Rng, leaves: usize) -> Vec<Word> {
    assert!(leaves >= 1, "trees have at least one leaf");
    let mut out = vec![Word::empty()];
    while out.len() < leaves {
        let i = rng.gen_range(0..out.len());
        let w = out.swap_remove(i);
        out.push(w.child(0));
        out.push(w.child(1));
    }
    out.sort();
    out
}

/// A full-domain, full-image prefix bijection on `leaves` cones: a group
/// element when viewed as a map, and the generic V element otherwise.
pub fn random_v_map(rng: &mut ChaCha8Rng, leaves: usize) -> TableMap {
    let dom = random_tree_leaves(rng, leaves);
    let mut img = random_tree_leaves(rng, leaves);
    img.shuffle(rng);
    let rows = dom.into_iter().zip(img).collect();
    TableMap::new(rows).expect("tree leaves form a valid table")
}

/// A random V element.  With `full_image` the element is the class of a
/// group element; otherwise its image misses part of the space.
pub fn random_v_element(rng: &mut ChaCha8Rng, leaves: usize, full_image: bool) -> VElement {
    let table = if full_image {
        random_v_map(rng, leaves)
    } else {
        let dom = random_tree_leaves(rng, leaves);
        let extra = rng.gen_range(1..=2);
        let mut pool = random_tree_leaves(rng, leaves + extra);
        pool.shuffle(rng);
        let rows = dom.into_iter().zip(pool.into_iter().take(leaves)).collect();
        TableMap::new(rows).expect("distinct tree leaves are pairwise incomparable")
    };
    VElement::new(table).expect("sampled tables are nonzero and full-domain")
}

/// A random dyadic subdivision of the `n`-dimensional unit box into exactly
/// `cells` boxes, grown by splitting a uniformly chosen cell along a
/// uniformly chosen axis.
pub fn random_box_partition(rng: &mut ChaCha8Rng, n: usize, cells: usize) -> Vec<NBox> {
    assert!(cells >= 1, "partitions have at least one cell");
    let mut out = vec![NBox::root(n)];
    while out.len() < cells {
        let i = rng.gen_range(0..out.len());
        let b = out.swap_remove(i);
        let axis = rng.gen_range(0..n);
        out.push(b.child(axis, 0));
        out.push(b.child(axis, 1));
    }
    out.sort_by_key(|b| b.words().to_vec());
    out
}

/// A full-domain, full-image box bijection on `cells` cells.
pub fn random_nv_map(rng: &mut ChaCha8Rng, n: usize, cells: usize) -> BoxMap {
    let dom = random_box_partition(rng, n, cells);
    let mut img = random_box_partition(rng, n, cells);
    img.shuffle(rng);
    let rows = dom.into_iter().zip(img).collect();
    BoxMap::new(n, rows).expect("subdivision cells form a valid box map")
}

/// A random nV element, full-image or not, mirroring `random_v_element`.
pub fn random_nv_element(
    rng: &mut ChaCha8Rng,
    n: usize,
    cells: usize,
    full_image: bool,
) -> NVElement {
    let table = if full_image {
        random_nv_map(rng, n, cells)
    } else {
        let dom = random_box_partition(rng, n, cells);
        let extra = rng.gen_range(1..=2);
        let mut pool = random_box_partition(rng, n, cells + extra);
        pool.shuffle(rng);
        let rows = dom.into_iter().zip(pool.into_iter().take(cells)).collect();
        BoxMap::new(n, rows).expect("subdivision cells are pairwise disjoint")
    };
    NVElement::new(table).expect("sampled box maps are nonzero and full-domain")
}

/// A random word over the four tree-automorphism generators, canonicalized.
pub fn random_grig_word(rng: &mut ChaCha8Rng, max_len: usize) -> GrigWord {
    let len = rng.gen_range(0..=max_len);
    let letters = ["a", "b", "c", "d"];
    let s: String = (0..len).map(|_| letters[rng.gen_range(0..4)]).collect();
    gw(&s).canonical_form()
}

/// A random decorated table: tree pair plus a decoration on every row.
pub fn random_rover_element(
    rng: &mut ChaCha8Rng,
    leaves: usize,
    max_dec: usize,
    full_image: bool,
) -> RoverElement {
    let dom = random_tree_leaves(rng, leaves);
    let mut img = if full_image {
        random_tree_leaves(rng, leaves)
    } else {
        let extra = rng.gen_range(1..=2);
        let mut pool = random_tree_leaves(rng, leaves + extra);
        pool.shuffle(rng);
        pool.truncate(leaves);
        pool
    };
    img.shuffle(rng);
    let rows = dom
        .into_iter()
        .zip(img)
        .map(|(d, m)| (d, m, random_grig_word(rng, max_dec)))
        .collect();
    let table = RoverTable::new(rows).expect("distinct tree leaves are pairwise incomparable");
    RoverElement::new(table).expect("sampled tables are nonzero and full-domain")
}

/// A random ascending walk: starting from `start`, repeatedly replace a
/// uniformly chosen element by a uniformly chosen non-bottom node of its
/// expansion poset.  Elements with singleton posets are skipped, so a step
/// may leave the vertex unchanged.  Returns the whole trajectory, `start`
/// first; consecutive distinct vertices differ by one elementary expansion.
pub fn random_expansion_walk<I>(
    inst: &I,
    start: &Vertex<I::Elem>,
    steps: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vertex<I::Elem>>, CoreError>
where
    I: ExpansionInstance,
{
    let mut path = vec![start.clone()];
    for _ in 0..steps {
        let cur = path.last().expect("path is nonempty").clone();
        let i = rng.gen_range(0..cur.elems().len());
        let poset = inst.expansions(&cur.elems()[i])?;
        if poset.len() == 1 {
            continue;
        }
        let node = poset.node(rng.gen_range(1..poset.len()));
        let mut elems: Vec<I::Elem> = Vec::with_capacity(cur.elems().len() + node.height());
        for (j, e) in cur.elems().iter().enumerate() {
            if j != i {
                elems.push(e.clone());
            }
        }
        elems.extend(node.elems().iter().cloned());
        path.push(Vertex::new(inst, elems)?);
    }
    Ok(path)
}

/// A random small complex on `1..=max_vertices` labelled points with a few
/// random maximal simplices (plus every isolated vertex).
pub fn random_complex(rng: &mut ChaCha8Rng, max_vertices: usize) -> Complex {
    let nv = rng.gen_range(1..=max_vertices.max(1));
    let labels: Vec<String> = (0..nv).map(|i| format!("p{i}")).collect();
    let nsimp = rng.gen_range(1..=4);
    let mut maximal: Vec<Vec<u32>> = Vec::new();
    let mut idx: Vec<u32> = (0..nv as u32).collect();
    for _ in 0..nsimp {
        let size = rng.gen_range(1..=nv.min(4));
        idx.shuffle(rng);
        let mut s = idx[..size].to_vec();
        s.sort_unstable();
        maximal.push(s);
    }
    Complex::from_maximal(labels, &maximal, usize::MAX).expect("small complexes fit any budget")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::words_partition_all;
    use crate::core::check_vertex_axioms;
    use crate::instances::{NVInstance, RoverInstance, VInstance};

    #[test]
    fn seeded_generators_are_deterministic() {
        let a = random_v_map(&mut rng(7), 5);
        let b = random_v_map(&mut rng(7), 5);
        assert_eq!(a, b);
        let c = random_rover_element(&mut rng(9), 4, 3, true);
        let d = random_rover_element(&mut rng(9), 4, 3, true);
        assert_eq!(c.table(), d.table());
    }

    #[test]
    fn sampled_trees_partition_the_space() {
        let mut r = rng(3);
        for leaves in [1, 2, 5, 9] {
            let t = random_tree_leaves(&mut r, leaves);
            assert_eq!(t.len(), leaves);
            assert!(words_partition_all(t));
        }
        for cells in [1, 3, 6] {
            let p = random_box_partition(&mut r, 2, cells);
            assert_eq!(p.len(), cells);
            for i in 0..p.len() {
                for j in (i + 1)..p.len() {
                    assert!(p[i].disjoint(&p[j]), "cells must be pairwise disjoint");
                }
            }
            // a cell at total depth d covers 2^-d of the square, so the
            // measures must add up to one
            let deepest = p.iter().map(|b| b.total_depth()).max().unwrap();
            let measure: usize = p.iter().map(|b| 1usize << (deepest - b.total_depth())).sum();
            assert_eq!(measure, 1usize << deepest, "cells must tile the square");
        }
    }

    #[test]
    fn sampled_elements_pass_the_vertex_axioms() {
        let v_inst = VInstance;
        let nv_inst = NVInstance::new(2);
        let rover = RoverInstance;
        let mut r = rng(11);
        for _ in 0..5 {
            let e = random_v_element(&mut r, 4, false);
            let vert = Vertex::singleton(&v_inst, e);
            check_vertex_axioms(&v_inst, &vert).unwrap();
            let e = random_nv_element(&mut r, 2, 3, true);
            let vert = Vertex::singleton(&nv_inst, e);
            check_vertex_axioms(&nv_inst, &vert).unwrap();
            let e = random_rover_element(&mut r, 3, 2, true);
            let vert = Vertex::singleton(&rover, e);
            check_vertex_axioms(&rover, &vert).unwrap();
        }
    }

    #[test]
    fn walks_expand_one_element_at_a_time() {
        let inst = VInstance;
        let mut r = rng(21);
        let start = Vertex::singleton(&inst, random_v_element(&mut r, 3, true));
        let path = random_expansion_walk(&inst, &start, 6, &mut r).unwrap();
        assert_eq!(path[0].height(), 1);
        for w in windows2(&path) {
            let (prev, next) = w;
            assert!(next.height() >= prev.height());
            assert_eq!(
                prev.support_union().key(),
                next.support_union().key(),
                "expansion preserves the support union"
            );
        }
        assert!(path.last().unwrap().height() > 1, "six steps should split");
    }

    fn windows2<T>(xs: &[T]) -> impl Iterator<Item = (&T, &T)> {
        xs.iter().zip(xs.iter().skip(1))
    }

    #[test]
    fn random_complexes_are_well_formed() {
        let mut r = rng(5);
        for _ in 0..10 {
            let c = random_complex(&mut r, 10);
            let maximal = c.maximal_simplices();
            assert!(!maximal.is_empty());
            // components and euler characteristic agree on the point count
            // when the complex happens to be discrete
            if maximal.iter().all(|s| s.len() == 1) {
                assert_eq!(c.components() as i64, c.euler_characteristic());
            }
        }
    }
}
