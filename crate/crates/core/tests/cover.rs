mod common;

use subdiv_core::cover::{self, face_count_series, CoverState, FoldOrder};
use subdiv_core::glue::{GlueError, GluingSpec};
use subdiv_core::iso::is_isomorphic;
use subdiv_core::library::{builtin_spec, builtin_spec_text};
use subdiv_core::EdgeStatus;

fn cycle_between(spec: &GluingSpec, u: &str, v: &str) -> u32 {
    spec.cycle_of_edge(spec.edge_between(u, v).unwrap())
}

#[test]
fn cube_has_three_orbits_of_cycle_length_four() {
    let spec = builtin_spec("cube").unwrap();
    assert_eq!(spec.orbit_count(), 3);
    assert!(spec.orbit_cycle.iter().all(|&c| c == 4));
}

#[test]
fn prism_vertical_edges_have_cycle_three_and_horizontal_four() {
    for name in ["prism12", "utn"] {
        let spec = builtin_spec(name).unwrap();
        for i in 0..12 {
            assert_eq!(cycle_between(&spec, &format!("t{i}"), &format!("b{i}")), 3, "{name} vertical {i}");
            let j = (i + 1) % 12;
            assert_eq!(cycle_between(&spec, &format!("t{i}"), &format!("t{j}")), 4, "{name} top {i}");
            assert_eq!(cycle_between(&spec, &format!("b{i}"), &format!("b{j}")), 4, "{name} bottom {i}");
        }
    }
}

#[test]
fn prism_dodecagon_vertices_fall_in_four_classes_of_three() {
    let spec = builtin_spec("prism12").unwrap();
    let mut sizes = std::collections::BTreeMap::new();
    for i in 0..12 {
        let v = spec.vertex_names.iter().position(|n| n == &format!("t{i}")).unwrap();
        *sizes.entry(spec.vertex_class[v]).or_insert(0) += 1;
    }
    assert_eq!(sizes.len(), 4);
    assert!(sizes.values().all(|&n| n == 3));
    assert_eq!(spec.quotient_euler_characteristic(), 0);
}

#[test]
fn cube_with_an_unpaired_face_is_rejected() {
    let text: String = builtin_spec_text("cube")
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with("pair z0"))
        .map(|l| format!("{l}\n"))
        .collect();
    assert!(matches!(GluingSpec::parse(&text), Err(GlueError::NotTotal(_))));
}

#[test]
fn first_expansions() {
    let cube = builtin_spec("cube").unwrap();
    assert_eq!(cover::ball(&cube, 2).unwrap().cell_count(), 7);
    let mut b3 = cover::ball(&cube, 3).unwrap();
    assert_eq!(b3.cell_count(), 25);
    assert_eq!(b3.boundary().unwrap().face_count(), 78);
    let prism = builtin_spec("prism12").unwrap();
    assert_eq!(cover::ball(&prism, 2).unwrap().cell_count(), 15);
}

#[test]
fn cube_first_boundary_is_plain() {
    let cube = builtin_spec("cube").unwrap();
    let t = CoverState::new(&cube).boundary().unwrap();
    assert_eq!(t.face_count(), 6);
    assert!(t.edges().iter().all(|e| e.status == EdgeStatus::Plain));
}

#[test]
fn cube_cover_matches_lattice_enumeration() {
    let cube = builtin_spec("cube").unwrap();
    let mut state = CoverState::new(&cube);
    for n in 1..=6u32 {
        if n > 1 {
            state.expand().unwrap();
        }
        let ball = common::lattice_ball(n);
        assert_eq!(state.cell_count(), ball.len(), "cells at stage {n}");
        assert_eq!(state.cell_count() as u64, common::l1_ball_size(n as u64 - 1));
        let t = state.boundary().unwrap();
        let (v, e, f) = common::boundary_counts(&ball);
        assert_eq!((t.vertex_count(), t.edge_count(), t.face_count()), (v, e, f), "stage {n}");
        assert_eq!(f as u64, common::cube_face_count(n as u64));
        assert_eq!(t.loaded_edges().len(), common::loaded_edge_count(&ball), "loaded edges at stage {n}");
        assert_eq!(t.loaded_vertices().len(), common::loaded_vertex_count(&ball), "loaded vertices at stage {n}");
        assert!(t.is_sphere());
    }
}

#[test]
fn cube_second_boundary_has_twelve_loaded_edges() {
    let cube = builtin_spec("cube").unwrap();
    let t = cover::ball(&cube, 2).unwrap().boundary().unwrap();
    assert_eq!(t.face_count(), 30);
    assert_eq!(t.loaded_edges().len(), 12);
}

#[test]
fn face_count_series_examples() {
    assert_eq!(face_count_series(&builtin_spec("cube").unwrap(), 4).unwrap(), vec![6, 30, 78, 150]);
    let s2 = face_count_series(&builtin_spec("s2").unwrap(), 4).unwrap();
    assert!(s2.windows(2).all(|w| w[0] == w[1]), "{s2:?}");
    let prism = face_count_series(&builtin_spec("prism12").unwrap(), 4).unwrap();
    assert!(prism.windows(2).all(|w| w[1] > w[0]), "{prism:?}");
    assert!(prism[1..].windows(2).all(|w| w[1] as f64 / w[0] as f64 > 1.0));
}

#[test]
fn builtin_boundaries_stay_spheres() {
    for (name, n) in [("cube", 5), ("prism12", 5), ("utn", 5)] {
        let spec = builtin_spec(name).unwrap();
        let mut state = CoverState::new(&spec);
        for k in 1..=n {
            if k > 1 {
                state.expand().unwrap();
            }
            let t = state.boundary().unwrap();
            assert!(t.is_sphere(), "{name} stage {k}");
            for e in t.edges() {
                assert!(e.status.incidence(e.cycle).is_none_or(|i| i <= e.cycle));
            }
        }
    }
    let s2 = builtin_spec("s2").unwrap();
    let t = cover::ball(&s2, 5).unwrap().boundary().unwrap();
    assert_eq!(t.component_count(), 2);
    assert!(t.components().iter().all(|c| c.is_sphere()));
}

#[test]
fn loaded_vertices_are_covered_at_the_next_stage() {
    let cube = builtin_spec("cube").unwrap();
    let mut state = CoverState::new(&cube);
    let mut checked = 0;
    for _ in 1..5 {
        let t = state.boundary().unwrap();
        let cells = state.boundary_vertex_cells();
        let loaded: Vec<(usize, usize)> = t.loaded_vertices().into_iter().map(|v| cells[v]).collect();
        state.expand().unwrap();
        let next = state.boundary_vertex_cells();
        for &old in &loaded {
            assert!(next.iter().all(|&v| !state.same_vertex(old, v)));
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn fold_order_does_not_change_the_result() {
    for name in ["prism12", "utn"] {
        let spec = builtin_spec(name).unwrap();
        let mut up = CoverState::new(&spec);
        let mut down = CoverState::new(&spec).with_fold_order(FoldOrder::Descending);
        for _ in 0..3 {
            up.expand().unwrap();
            down.expand().unwrap();
        }
        let (a, b) = (up.boundary().unwrap(), down.boundary().unwrap());
        assert_eq!(up.cell_count(), down.cell_count());
        assert!(is_isomorphic(&a, &b), "{name}");
    }
}

#[test]
fn repeated_runs_serialize_identically() {
    let spec = builtin_spec("prism12").unwrap();
    let a = cover::ball(&spec, 3).unwrap().boundary().unwrap().to_json();
    let b = cover::ball(&spec, 3).unwrap().boundary().unwrap().to_json();
    assert_eq!(a, b);
}

#[test]
fn cell_limit_is_enforced() {
    let spec = builtin_spec("cube").unwrap();
    let mut state = CoverState::new(&spec).with_cell_limit(20);
    state.expand().unwrap();
    assert!(matches!(state.expand(), Err(cover::CoverError::CellLimit(20))));
}
