mod common;

use subdiv_core::cayley::{
    almost_convexity_profile, ball, ball_with_limit, cone_type_count, interior_cone_type_count,
    rule_matches_cayley_ball, CayleyError, ConeEquivalence, GroupSpec,
};
use subdiv_core::library::get_rule;

fn group(name: &str) -> GroupSpec {
    GroupSpec::builtin(name).unwrap()
}

#[test]
fn ball_sizes_match_closed_forms() {
    let z = ball(&group("Z"), 10).unwrap();
    for r in 0..=10 {
        assert_eq!(z.ball_size(r), 2 * r as usize + 1);
    }
    let z3 = ball(&group("Z3"), 6).unwrap();
    for r in 0..=6 {
        assert_eq!(z3.ball_size(r) as u64, common::l1_ball_size(r as u64));
    }
}

#[test]
fn heisenberg_and_sol_ball_sizes() {
    let heis = ball(&group("heis"), 5).unwrap();
    assert_eq!((0..=5).map(|r| heis.ball_size(r)).collect::<Vec<_>>(), vec![1, 5, 17, 53, 135, 299]);
    let sol = ball(&group("sol"), 4).unwrap();
    assert_eq!((0..=4).map(|r| sol.ball_size(r)).collect::<Vec<_>>(), vec![1, 7, 33, 103, 273]);
}

#[test]
fn group_laws_hold_on_words() {
    for name in ["Z", "Z3", "heis", "sol"] {
        let g = group(name);
        let b = ball(&g, 3).unwrap();
        for &x in &b.elements {
            assert_eq!(g.multiply(x, g.inverse(x)), g.identity(), "{name}");
            for &y in b.elements.iter().take(20) {
                let z = b.elements[b.len() / 2];
                assert_eq!(g.multiply(g.multiply(x, y), z), g.multiply(x, g.multiply(y, z)), "{name}");
            }
        }
    }
    let heis = group("heis");
    let commutator = heis.eval("xyXY").unwrap();
    assert_ne!(commutator, heis.identity());
    assert_eq!(heis.multiply(commutator, heis.eval("x").unwrap()), heis.multiply(heis.eval("x").unwrap(), commutator));
    assert!(matches!(heis.eval("xq"), Err(CayleyError::BadLetter('q'))));
}

#[test]
fn word_lengths_in_z3_are_l1_norms() {
    let g = group("Z3");
    let b = ball(&g, 4).unwrap();
    for &x in &b.elements {
        assert_eq!(b.length_of(&x).unwrap() as i64, x[0].abs() + x[1].abs() + x[2].abs());
    }
}

#[test]
fn z3_is_almost_convex() {
    let rows = almost_convexity_profile(&group("Z3"), 6, 2).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.k == Some(2)), "{rows:?}");
}

#[test]
fn sol_needs_longer_and_longer_detours() {
    let rows = almost_convexity_profile(&group("sol"), 6, 2).unwrap();
    let ks: Vec<u32> = rows.iter().map(|r| r.k.unwrap()).collect();
    assert_eq!(ks, vec![2, 3, 3, 4, 4, 4]);
    assert!(ks.windows(2).all(|w| w[0] <= w[1]));
    assert!(ks[5] > 2);
}

#[test]
fn z_has_no_close_pairs_beyond_the_first_sphere() {
    let rows = almost_convexity_profile(&group("Z"), 4, 2).unwrap();
    assert_eq!(rows.iter().map(|r| r.k).collect::<Vec<_>>(), vec![Some(2), None, None, None]);
    assert!(rows.iter().all(|r| r.running_max == Some(2)));
}

#[test]
fn k_grows_with_m() {
    let g = group("sol");
    let k2: Vec<u32> = almost_convexity_profile(&g, 4, 2).unwrap().iter().map(|r| r.k.unwrap()).collect();
    let k3: Vec<u32> = almost_convexity_profile(&g, 4, 3).unwrap().iter().map(|r| r.k.unwrap_or(0)).collect();
    assert!(k2.iter().zip(&k3).all(|(a, b)| a <= b), "{k2:?} {k3:?}");
    assert!(matches!(almost_convexity_profile(&g, 3, 0), Err(CayleyError::Argument(_))));
}

#[test]
fn z3_cone_types_match_brute_force() {
    let g = group("Z3");
    for n in 3..=5 {
        let report = cone_type_count(&g, n, 2, ConeEquivalence::Labeled).unwrap();
        assert_eq!(report.classes, common::z3_cone_classes(n as i64, 2), "radius {n}");
        assert_eq!(report.population, report.class_sizes.iter().sum::<usize>());
    }
    let r4 = cone_type_count(&g, 4, 2, ConeEquivalence::Labeled).unwrap().classes;
    let r5 = cone_type_count(&g, 5, 2, ConeEquivalence::Labeled).unwrap().classes;
    assert_eq!(r4, r5);
}

#[test]
fn inversion_merges_mirror_cones() {
    let g = group("Z3");
    let labeled = cone_type_count(&g, 4, 2, ConeEquivalence::Labeled).unwrap().classes;
    let merged = cone_type_count(&g, 4, 2, ConeEquivalence::UpToInversion).unwrap().classes;
    assert!(merged < labeled);
    assert_eq!(cone_type_count(&group("Z"), 4, 3, ConeEquivalence::UpToInversion).unwrap().classes, 1);
    assert_eq!(cone_type_count(&group("Z"), 4, 3, ConeEquivalence::Labeled).unwrap().classes, 2);
    assert_eq!(interior_cone_type_count(&group("Z"), 4, 3, ConeEquivalence::Labeled).unwrap().classes, 3);
}

#[test]
fn deeper_shadows_never_merge_classes() {
    let g = group("heis");
    for n in 3..=5 {
        let shallow = cone_type_count(&g, n, 1, ConeEquivalence::Labeled).unwrap().classes;
        let deep = cone_type_count(&g, n, 2, ConeEquivalence::Labeled).unwrap().classes;
        assert!(shallow <= deep, "radius {n}: {shallow} > {deep}");
    }
}

#[test]
fn heisenberg_cone_types_keep_growing() {
    let g = group("heis");
    let r4 = cone_type_count(&g, 4, 2, ConeEquivalence::Labeled).unwrap().classes;
    let r8 = cone_type_count(&g, 8, 2, ConeEquivalence::Labeled).unwrap().classes;
    assert!(r8 > r4, "{r4} vs {r8}");
}

#[test]
fn element_limit_is_enforced() {
    assert!(matches!(ball_with_limit(&group("sol"), 6, 100), Err(CayleyError::Cap(100))));
    assert!(matches!(GroupSpec::builtin("F2"), Err(CayleyError::UnknownGroup(_))));
}

#[test]
fn torus3_cells_form_the_z3_ball() {
    let entry = get_rule("torus3").unwrap();
    let g = group("Z3");
    for n in 1..=4 {
        assert!(rule_matches_cayley_ball(entry, &g, n).unwrap(), "stage {n}");
    }
    assert!(!rule_matches_cayley_ball(entry, &group("heis"), 3).unwrap());
}
