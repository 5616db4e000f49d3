mod common;

use proptest::prelude::*;
use subdiv_core::iso::is_isomorphic;
use subdiv_core::library::{builtin_spec, get_rule, Mode};
use subdiv_core::{cover, refinement_check, RefinementWitness, Tiling, TilingBuilder, TilingError};

#[test]
fn cube_boundary_builds() {
    let t = common::cube();
    assert_eq!((t.face_count(), t.edge_count(), t.vertex_count()), (6, 12, 8));
    assert_eq!(t.euler_characteristic(), 2);
    assert!(t.is_sphere());
}

#[test]
fn square_torus_builds() {
    let t = common::square_torus();
    assert_eq!((t.face_count(), t.edge_count(), t.vertex_count()), (1, 2, 1));
    assert_eq!(t.euler_characteristic(), 0);
    assert!(!t.is_sphere());
}

#[test]
fn faces_sharing_three_edges_the_same_way_are_rejected() {
    let mut b = TilingBuilder::new(1);
    b.add_face_by_vertices("tri", &[0, 1, 2]).unwrap();
    b.add_face_by_vertices("tri", &[0, 1, 2]).unwrap();
    assert!(matches!(b.build(), Err(TilingError::InconsistentOrientation { .. })));
}

#[test]
fn edge_on_three_faces_is_rejected() {
    let mut b = TilingBuilder::new(1);
    b.add_face_by_vertices("sq", &[0, 1, 2, 3]).unwrap();
    b.add_face_by_vertices("sq", &[1, 0, 4, 5]).unwrap();
    b.add_face_by_vertices("tri", &[0, 1, 6]).unwrap();
    assert!(matches!(b.build(), Err(TilingError::NonManifoldEdge { uses: 3, .. })));
}

#[test]
fn third_cube_stage_matches_lattice_boundary() {
    let spec = builtin_spec("cube").unwrap();
    let mut state = cover::ball(&spec, 3).unwrap();
    let t = state.boundary().unwrap();
    let (v, e, f) = common::boundary_counts(&common::lattice_ball(3));
    assert_eq!((t.vertex_count(), t.edge_count(), t.face_count()), (v, e, f));
    assert_eq!(t.euler_characteristic(), 2);
    assert_eq!(v as i64 - e as i64 + f as i64, 2);
}

#[test]
fn two_disjoint_cubes_are_not_a_sphere() {
    let mut b = TilingBuilder::new(1);
    for off in [0, 8] {
        for face in [[0, 3, 2, 1], [4, 5, 6, 7], [0, 1, 5, 4], [1, 2, 6, 5], [2, 3, 7, 6], [3, 0, 4, 7]] {
            let f: Vec<usize> = face.iter().map(|x| x + off).collect();
            b.add_face_by_vertices("sq", &f).unwrap();
        }
    }
    let t = b.build().unwrap();
    assert!(!t.is_sphere());
    assert_eq!(t.euler_characteristic(), 4);
}

#[test]
fn identity_witness_refines_every_catalog_stage() {
    for name in ["torus3", "nxs1", "barycentric", "s2xr"] {
        let entry = get_rule(name).unwrap();
        for t in entry.stages(2, entry.modes()[0]).unwrap() {
            assert!(refinement_check(&t, &t, &RefinementWitness::identity(&t)).unwrap(), "{name}");
        }
    }
}

/// The two-triangle sphere and its barycentric subdivision, written out by hand.
#[test]
fn hand_built_barycentric_subdivision_refines() {
    let mut coarse = TilingBuilder::new(1);
    coarse.add_face_by_vertices("tri", &[0, 1, 2]).unwrap();
    coarse.add_face_by_vertices("tri", &[0, 2, 1]).unwrap();
    let coarse = coarse.build().unwrap();

    // Corners 0..3, midpoints m01 = 3, m12 = 4, m20 = 5, centres 6 and 7.
    let mut fine = TilingBuilder::new(2);
    for tri in [[0, 3, 6], [3, 1, 6], [1, 4, 6], [4, 2, 6], [2, 5, 6], [5, 0, 6]] {
        fine.add_face_by_vertices("tri", &tri).unwrap();
    }
    for tri in [[0, 5, 7], [5, 2, 7], [2, 4, 7], [4, 1, 7], [1, 3, 7], [3, 0, 7]] {
        fine.add_face_by_vertices("tri", &tri).unwrap();
    }
    let fine = fine.build().unwrap();
    assert_eq!(fine.face_count(), 12);

    let path = |a: usize, b: usize| -> usize {
        (0..fine.edge_count())
            .find(|&e| {
                let (u, v) = fine.edge_endpoints(e);
                (u, v) == (a, b) || (u, v) == (b, a)
            })
            .unwrap()
    };
    let mut edge_map = Vec::new();
    for e in 0..coarse.edge_count() {
        let (u, v) = coarse.edge_endpoints(e);
        let mid = match (u.min(v), u.max(v)) {
            (0, 1) => 3,
            (1, 2) => 4,
            (0, 2) => 5,
            other => panic!("unexpected edge {other:?}"),
        };
        edge_map.push(vec![path(u, mid), path(mid, v)]);
    }
    let witness = RefinementWitness {
        vertex_map: vec![Some(0), Some(1), Some(2)],
        edge_map,
        face_map: vec![(0..6).collect(), (6..12).collect()],
    };
    assert!(refinement_check(&coarse, &fine, &witness).unwrap());

    let mut moved = witness.clone();
    moved.face_map[0].push(6);
    moved.face_map[1].remove(0);
    assert!(!refinement_check(&coarse, &fine, &moved).unwrap());
}

#[test]
fn witness_naming_missing_cells_is_an_error() {
    let t = common::cube();
    let mut w = RefinementWitness::identity(&t);
    w.edge_map[0] = vec![99];
    assert!(matches!(refinement_check(&t, &t, &w), Err(TilingError::UnknownId { kind: "edge", id: 99 })));
}

#[test]
fn replacement_step_that_erases_a_loaded_edge_is_not_a_refinement() {
    let entry = get_rule("torus3").unwrap();
    let stages = entry.stages(2, Mode::Replacement).unwrap();
    let step = entry.step(&stages[1], Mode::Replacement).unwrap();
    assert!(!refinement_check(&stages[1], &step.tiling, &step.witness).unwrap());
}

#[test]
fn json_round_trip_of_a_stage() {
    let entry = get_rule("nxs1").unwrap();
    let t = entry.stages(2, Mode::Replacement).unwrap().pop().unwrap();
    let back = Tiling::from_json(&t.to_json()).unwrap();
    assert_eq!(back, t);
}

/// Rebuilds `t` with vertex ids permuted by `perm` and faces in `order`.
fn relabel(t: &Tiling, perm: &[usize], order: &[usize]) -> Tiling {
    let mut b = TilingBuilder::new(t.stage());
    b.ensure_vertices(t.vertex_count());
    for &f in order {
        let cycle: Vec<usize> = t.face_vertices(f).iter().map(|&v| perm[v]).collect();
        b.add_face_by_vertices(t.face_label(f).to_string(), &cycle).unwrap();
    }
    b.build().unwrap()
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    let mut s = seed;
    for i in (1..n).rev() {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        v.swap(i, (s >> 33) as usize % (i + 1));
    }
    v
}

proptest! {
    #[test]
    fn euler_characteristic_ignores_ids(seed in any::<u64>(), stage in 1u32..4) {
        let entry = get_rule("torus3").unwrap();
        let t = entry.stages(stage, Mode::Replacement).unwrap().pop().unwrap();
        let plain = relabel(&t, &(0..t.vertex_count()).collect::<Vec<_>>(), &(0..t.face_count()).collect::<Vec<_>>());
        let moved = relabel(&t, &shuffled(t.vertex_count(), seed), &shuffled(t.face_count(), seed ^ 0x9e37));
        prop_assert_eq!(moved.euler_characteristic(), t.euler_characteristic());
        prop_assert!(is_isomorphic(&moved, &plain));
    }
}
