//! Core machinery exercised against the V instance: simplex predicates,
//! descending links and their partitioned variants, ascending stars and
//! links, and the expansion order.

use expanse::cantor::{TableMap, w};
use expanse::core::{
    self, ascending_link, ascending_star, canonical_order, descending_link, expansion_leq,
    is_simplex, partition_meet, partitioned_from_full, relative_ascending_link, standard_cover,
    CoreError, ExpansionInstance, Kind, Partition, Vertex,
};
use expanse::instances::{VElement, VInstance};
use expanse::topology::reduced_homology;

const BUDGET: usize = 2_000_000;

fn v_id() -> VElement {
    VElement::top()
}

/// The full-support vertex obtained by splitting the identity down to the
/// complete depth-d tree, 2^d elements.
fn uniform_vertex(inst: &VInstance, d: u32) -> Vertex<VElement> {
    let mut elems = vec![v_id()];
    for _ in 0..d {
        elems = elems
            .iter()
            .flat_map(|b| {
                let (l, r) = b.split();
                [l, r]
            })
            .collect();
    }
    Vertex::new(inst, elems).unwrap()
}

/// A full-support vertex of any height: split the last element repeatedly.
fn staircase_vertex(inst: &VInstance, k: usize) -> Vertex<VElement> {
    let mut elems = vec![v_id()];
    while elems.len() < k {
        let b = elems.pop().unwrap();
        let (l, r) = b.split();
        elems.push(l);
        elems.push(r);
    }
    Vertex::new(inst, elems).unwrap()
}

#[test]
fn canonical_order_rejects_equal_height_twins() {
    let inst = VInstance;
    let a = Vertex::singleton(&inst, v_id());
    let b = {
        // same support (all of X), different map
        let t = TableMap::new(vec![(w("0"), w("1")), (w("1"), w("0"))]).unwrap();
        Vertex::singleton(&inst, VElement::new(t).unwrap())
    };
    assert!(matches!(
        canonical_order(&inst, &[a, b]),
        Err(CoreError::NotAChain)
    ));
}

#[test]
fn simultaneous_splits_make_a_simplex_but_grandchildren_do_not() {
    let inst = VInstance;
    let v = uniform_vertex(&inst, 1); // {left, right}
    let both_split = uniform_vertex(&inst, 2);
    assert!(is_simplex(&inst, &[v.clone(), both_split.clone()]));

    // splitting one element twice leaves the expansion poset of the original
    let single = Vertex::singleton(&inst, v_id());
    let (l, r) = v_id().split();
    let (ll, lr) = l.split();
    let grandchildren = Vertex::new(&inst, vec![ll, lr, r]).unwrap();
    assert!(!is_simplex(&inst, &[single.clone(), grandchildren.clone()]));
    // ... but the two are still comparable in the expansion order
    let seq = expansion_leq(&inst, &single, &grandchildren, BUDGET)
        .unwrap()
        .expect("two splits reach the grandchildren");
    assert_eq!(seq.len(), 3);

    // through the intermediate vertex each hop is a simplex
    assert!(is_simplex(&inst, &[v.clone(), grandchildren.clone()]));
    assert!(is_simplex(&inst, &[single, v]));
}

#[test]
fn descending_link_heights_two_and_three() {
    let inst = VInstance;
    // k = 2: one pair, two contraction choices, no edges
    let v2 = uniform_vertex(&inst, 1);
    let link = descending_link(&inst, &v2, BUDGET).unwrap();
    assert_eq!(link.complex.vertex_count(), 2);
    assert_eq!(link.complex.simplices_of_dim(1).len(), 0);
    let h = reduced_homology(&link.complex, 1);
    assert_eq!(h.components, 2);

    // k = 3: three pairs × two signs, all isolated
    let v3 = staircase_vertex(&inst, 3);
    let link = descending_link(&inst, &v3, BUDGET).unwrap();
    assert_eq!(link.complex.vertex_count(), 6);
    assert_eq!(link.complex.simplices_of_dim(1).len(), 0);
}

#[test]
fn descending_link_height_four_components() {
    let inst = VInstance;
    let v4 = uniform_vertex(&inst, 2);
    let link = descending_link(&inst, &v4, BUDGET).unwrap();
    // 6 single pairs × 2 signs + 3 pairings × 4 sign choices
    assert_eq!(link.complex.vertex_count(), 24);
    assert_eq!(link.complex.simplices_of_dim(1).len(), 24);
    assert_eq!(link.complex.simplices_of_dim(2).len(), 0);
    // three components: one per perfect pairing of the four elements
    assert_eq!(link.complex.components(), 3);
}

#[test]
fn descending_link_height_six_is_connected() {
    let inst = VInstance;
    let v6 = staircase_vertex(&inst, 6);
    let link = descending_link(&inst, &v6, BUDGET).unwrap();
    assert_eq!(link.complex.vertex_count(), 330);
    assert_eq!(link.complex.simplices_of_dim(1).len(), 1080);
    assert_eq!(link.complex.simplices_of_dim(2).len(), 720);
    let h = reduced_homology(&link.complex, 0);
    assert_eq!(h.components, 1);
    assert_eq!(h.reduced_betti_gf2[0], 0);
    assert_eq!(h.reduced_betti_q[0], 0);
}

#[test]
fn link_vertices_satisfy_the_membership_condition() {
    let inst = VInstance;
    let v = uniform_vertex(&inst, 2);
    let link = descending_link(&inst, &v, BUDGET).unwrap();
    for u in &link.vertices {
        assert!(core::link_membership(&inst, u, &v));
    }
}

#[test]
fn partitioned_links_and_the_intersection_formula() {
    let inst = VInstance;
    let v = uniform_vertex(&inst, 2);
    let link = descending_link(&inst, &v, BUDGET).unwrap();

    let p1 = Partition::new(vec![vec![0, 1], vec![2, 3]]).unwrap();
    let l1 = partitioned_from_full(&inst, &v, &link, &p1).unwrap();
    // the {0,1},{2,3} component: 4 single contractions + 4 double ones
    assert_eq!(l1.complex.vertex_count(), 8);
    assert_eq!(l1.complex.components(), 1);

    let p2 = Partition::new(vec![vec![0, 1], vec![2], vec![3]]).unwrap();
    let l2 = partitioned_from_full(&inst, &v, &link, &p2).unwrap();

    let meet = partition_meet(&p1, &p2).unwrap();
    let lm = partitioned_from_full(&inst, &v, &link, &meet).unwrap();

    // the intersection formula: vertex sets (hence induced complexes) agree
    let set1: std::collections::BTreeSet<String> =
        l1.complex.labels().iter().cloned().collect();
    let set2: std::collections::BTreeSet<String> =
        l2.complex.labels().iter().cloned().collect();
    let inter: std::collections::BTreeSet<String> =
        set1.intersection(&set2).cloned().collect();
    let setm: std::collections::BTreeSet<String> =
        lm.complex.labels().iter().cloned().collect();
    assert_eq!(inter, setm);
}

#[test]
fn cover_catches_every_link_vertex() {
    let inst = VInstance;
    let v = staircase_vertex(&inst, 5);
    let link = descending_link(&inst, &v, BUDGET).unwrap();
    let cover = standard_cover(5, inst.c0(), inst.c1(), Kind::Permutational).unwrap();
    assert_eq!(cover.len(), 5 + 10);
    for u in &link.vertices {
        assert!(
            cover
                .iter()
                .any(|p| core::respects_partition(&inst, u, &v, p)),
            "uncovered link vertex"
        );
    }
}

#[test]
fn ascending_link_of_a_single_element_is_a_point() {
    let inst = VInstance;
    let v = Vertex::singleton(&inst, v_id());
    let link = ascending_link(&inst, &v, BUDGET).unwrap();
    assert_eq!(link.chain.complex.vertex_count(), 1);
    assert_eq!(link.join_model.vertex_count(), 1);
}

#[test]
fn ascending_star_certificate_height_two() {
    let inst = VInstance;
    let v = uniform_vertex(&inst, 1);
    let star = ascending_star(&inst, &v, BUDGET).unwrap();
    assert_eq!(star.nodes.len(), 4);
    star.certificate_ok(&inst).unwrap();
}

#[test]
fn ascending_link_matches_join_model_homologically() {
    let inst = VInstance;
    let v = uniform_vertex(&inst, 1);
    let link = ascending_link(&inst, &v, BUDGET).unwrap();
    // join of two points: an edge (contractible); the chain complex is its
    // subdivision
    let hc = reduced_homology(&link.chain.complex, 2);
    let hj = reduced_homology(&link.join_model, 2);
    assert_eq!(hc.reduced_betti_gf2, hj.reduced_betti_gf2);
    assert_eq!(hc.reduced_betti_q, hj.reduced_betti_q);
    assert_eq!(hc.components, hj.components);
}

#[test]
fn relative_ascending_link_of_element_below_its_split_is_a_point() {
    let inst = VInstance;
    let v = Vertex::singleton(&inst, v_id());
    let vprime = uniform_vertex(&inst, 1);
    let link = relative_ascending_link(&inst, &v, &vprime, BUDGET).unwrap();
    assert_eq!(link.chain.complex.vertex_count(), 1);
    let h = reduced_homology(&link.chain.complex, 1);
    assert!(h.homologically_connected_through(-1));
}

#[test]
fn relative_link_rejects_incomparable_targets() {
    let inst = VInstance;
    let v = Vertex::singleton(&inst, v_id());
    let other = {
        let t = TableMap::new(vec![(w("0"), w("1")), (w("1"), w("0"))]).unwrap();
        Vertex::singleton(&inst, VElement::new(t).unwrap())
    };
    assert!(matches!(
        relative_ascending_link(&inst, &v, &other, BUDGET),
        Err(CoreError::NotComparable)
    ));
}

#[test]
fn expansion_order_is_decided_with_witnesses() {
    let inst = VInstance;
    let bottom = Vertex::singleton(&inst, v_id());
    let deep = uniform_vertex(&inst, 2);
    let seq = expansion_leq(&inst, &bottom, &deep, BUDGET)
        .unwrap()
        .expect("the uniform vertex expands from the identity");
    assert!(seq.len() >= 2);
    for pair in seq.windows(2) {
        assert!(is_simplex(&inst, pair));
    }
    // reverse direction fails
    assert!(expansion_leq(&inst, &deep, &bottom, BUDGET).unwrap().is_none());
}

#[test]
fn filtration_slice_from_the_identity() {
    let inst = VInstance;
    let seed = Vertex::singleton(&inst, v_id());
    let slice = core::filtration_slice(&inst, &[seed], 3, 2, BUDGET).unwrap();
    assert!(slice.complex.vertex_count() > 1);
    assert!(slice.complex.dim().unwrap() <= 2);
}

#[test]
fn axioms_hold_on_sampled_elements() {
    let inst = VInstance;
    let g = {
        let t = TableMap::new(vec![
            (w("0"), w("101")),
            (w("10"), w("00")),
            (w("11"), w("100")),
        ])
        .unwrap();
        VElement::new(t).unwrap()
    };
    core::check_expansion_axioms(&inst, &g).unwrap();
    let v = uniform_vertex(&inst, 2);
    core::check_vertex_axioms(&inst, &v).unwrap();
}
