mod common;

use std::collections::BTreeMap;

use subdiv_core::iso::is_isomorphic;
use subdiv_core::library::{get_rule, triangle_pillow, Mode};
use subdiv_core::rule::{
    apply_replacement, apply_subdivision, validate_rule, ReplacementRule, Rule, RuleError, SubdivisionRule,
    ViolationKind,
};
use subdiv_core::{refinement_check, EdgeStatus, Tiling, TilingBuilder};

fn subdivision_rule(text: &str) -> SubdivisionRule {
    match Rule::from_toml(text).unwrap() {
        Rule::Subdivision(s) => s,
        Rule::Replacement(_) => panic!("expected a subdivision rule"),
    }
}

fn compose(outer: &[Vec<usize>], inner: &[Vec<usize>]) -> Vec<Vec<usize>> {
    outer.iter().map(|fs| fs.iter().flat_map(|&f| inner[f].iter().copied()).collect()).collect()
}

#[test]
fn barycentric_cuts_each_triangle_into_six_then_thirty_six() {
    let rule = get_rule("barycentric").unwrap().subdivision.clone().unwrap();
    let pillow = triangle_pillow();
    let (once, w1) = apply_subdivision(&rule, &pillow).unwrap();
    assert_eq!(once.face_count(), 12);
    assert!(w1.face_map.iter().all(|fs| fs.len() == 6));
    assert!(refinement_check(&pillow, &once, &w1).unwrap());

    let (twice, w2) = apply_subdivision(&rule, &once).unwrap();
    assert_eq!(twice.face_count(), 72);
    assert!(compose(&w1.face_map, &w2.face_map).iter().all(|fs| fs.len() == 36));
    assert!(twice.is_sphere());
    assert!((0..twice.face_count()).all(|f| twice.face_len(f) == 3));
}

#[test]
fn square_rule_on_the_square_torus_gives_five_squares() {
    let rule = ReplacementRule::single_face_subdivision();
    let torus = common::square_torus();
    let (t, w) = apply_subdivision(&rule, &torus).unwrap();
    assert_eq!(t.face_count(), 5);
    assert!((0..5).all(|f| t.face_len(f) == 4));
    assert_eq!(t.euler_characteristic(), 0);
    assert_eq!(t.stage(), 2);
    assert!(refinement_check(&torus, &t, &w).unwrap());
}

#[test]
fn torus3_first_step_matches_the_second_cube_stage() {
    let entry = get_rule("torus3").unwrap();
    let step = entry.step(&entry.initial, Mode::Replacement).unwrap();
    assert_eq!(step.tiling.face_count(), 30);
    assert_eq!(step.tiling.loaded_edges().len(), 12);
    assert_eq!(step.collapses, 0);
    let oracle = entry.oracle_stages(2).unwrap();
    assert!(is_isomorphic(&step.tiling, &oracle[1]));
}

#[test]
fn torus3_replacement_reproduces_the_cube_cover() {
    let entry = get_rule("torus3").unwrap();
    let stages = entry.stages(5, Mode::Replacement).unwrap();
    let oracle = entry.oracle_stages(5).unwrap();
    for (n, (s, o)) in stages.iter().zip(&oracle).enumerate() {
        assert!(is_isomorphic(s, o), "stage {}", n + 1);
        let (v, e, f) = common::boundary_counts(&common::lattice_ball(n as u32 + 1));
        assert_eq!((s.vertex_count(), s.edge_count(), s.face_count()), (v, e, f));
    }
}

#[test]
fn nxs1_reproduces_the_prism_cover() {
    let entry = get_rule("nxs1").unwrap();
    let stages = entry.stages(4, Mode::Replacement).unwrap();
    let oracle = entry.oracle_stages(4).unwrap();
    for (n, (s, o)) in stages.iter().zip(&oracle).enumerate() {
        assert!(s.is_sphere(), "stage {}", n + 1);
        assert!(is_isomorphic(s, o), "stage {}", n + 1);
    }
}

#[test]
fn sl2r_reproduces_the_unit_tangent_cover() {
    let entry = get_rule("sl2r").unwrap();
    let stages = entry.stages(3, Mode::Replacement).unwrap();
    let oracle = entry.oracle_stages(3).unwrap();
    for (s, o) in stages.iter().zip(&oracle) {
        assert!(is_isomorphic(s, o));
    }
}

#[test]
fn s2xr_is_the_identity_up_to_stage() {
    let entry = get_rule("s2xr").unwrap();
    let step = entry.step(&entry.initial, Mode::Subdivision).unwrap();
    assert_eq!(step.tiling.stage(), entry.initial.stage() + 1);
    assert!(is_isomorphic(&step.tiling, &entry.initial));
    assert_eq!(step.tiling.component_count(), 2);
}

#[test]
fn every_catalog_stage_is_a_union_of_spheres() {
    for name in ["torus3", "nxs1", "barycentric", "s2xr"] {
        let entry = get_rule(name).unwrap();
        for mode in entry.modes() {
            for t in entry.stages(3, mode).unwrap() {
                assert!(t.components().iter().all(Tiling::is_sphere), "{name} {mode} stage {}", t.stage());
            }
        }
    }
}

#[test]
fn builtin_rules_validate() {
    for name in ["torus3", "nxs1", "barycentric", "s2xr", "s3"] {
        for rule in get_rule(name).unwrap().rules() {
            assert_eq!(validate_rule(&rule), vec![], "{name}");
        }
    }
    assert!(validate_rule(&Rule::Subdivision(ReplacementRule::single_face_subdivision())).is_empty());
}

#[test]
fn two_vertex_tile_is_reported() {
    let rule = Rule::from_toml(
        r#"
name = "bigon"
kind = "subdivision"

[[tile]]
label = "two"
corners = ["a", "b"]
faces = ["two: a b"]
"#,
    );
    let violations = match rule {
        Ok(rule) => validate_rule(&rule),
        Err(e) => panic!("bigon should parse so it can be validated: {e}"),
    };
    let v = violations.iter().find(|v| v.kind == ViolationKind::TooFewVertices).expect("violation");
    assert_eq!(v.item, "two");
    assert!(v.message.contains("three vertices"), "{}", v.message);
}

#[test]
fn checkerboard_rule_without_singletons_violates_partition() {
    let rule = Rule::from_toml(
        r#"
name = "checker"
kind = "replacement"

[[group]]
name = "pair"
pattern = ["black: a b c d", "white: b a e f"]
template = ["black: d a e g", "white: f b c h", "black: c d g h", "white: e f h g"]
"#,
    )
    .unwrap();
    let violations = validate_rule(&rule);
    let partition: Vec<_> = violations.iter().filter(|v| v.kind == ViolationKind::Partition).collect();
    assert_eq!(partition.len(), 2, "{violations:?}");
    assert!(partition.iter().any(|v| v.message.contains("black")));
    assert!(partition.iter().any(|v| v.message.contains("white")));
}

#[test]
fn unknown_label_is_an_error() {
    let rule = get_rule("barycentric").unwrap().subdivision.clone().unwrap();
    let err = apply_subdivision(&rule, &common::cube()).unwrap_err();
    assert!(matches!(err, RuleError::UnknownLabel { ref label, .. } if label == "sq"));
}

#[test]
fn tile_length_mismatch_is_an_error() {
    let rule = ReplacementRule::single_face_subdivision();
    let mut b = TilingBuilder::new(1);
    b.add_face_by_vertices("sq", &[0, 1, 2]).unwrap();
    b.add_face_by_vertices("sq", &[0, 2, 1]).unwrap();
    let t = b.build().unwrap();
    assert!(matches!(apply_subdivision(&rule, &t), Err(RuleError::LengthMismatch { expected: 4, found: 3, .. })));
}

#[test]
fn templates_that_cut_a_shared_edge_differently_are_rejected() {
    let rule = subdivision_rule(
        r#"
name = "uneven"
kind = "subdivision"

[[tile]]
label = "x"
corners = ["a", "b", "c"]
sides = ["a ab b", "b c", "c a"]
faces = ["x: a ab b c"]

[[tile]]
label = "y"
corners = ["a", "b", "c"]
faces = ["y: a b c"]
"#,
    );
    let mut b = TilingBuilder::new(1);
    b.add_face_by_vertices("x", &[0, 1, 2]).unwrap();
    b.add_face_by_vertices("y", &[0, 2, 1]).unwrap();
    let t = b.build().unwrap();
    assert!(matches!(apply_subdivision(&rule, &t), Err(RuleError::SharedEdgeMismatch { .. })));
}

#[test]
fn faces_outside_every_pattern_are_reported() {
    let rule = get_rule("torus3").unwrap().replacement.clone().unwrap();
    let err = apply_replacement(&rule, &triangle_pillow()).unwrap_err();
    assert!(matches!(err, RuleError::UnmatchedFace { ref label, .. } if label == "tri"));
}

type PatchSignature = (usize, Vec<(String, usize)>, BTreeMap<String, usize>);

/// What a group's image looks like from inside: labels and lengths of the new
/// faces, and the statuses of the edges shared by two of them.
fn patch_signature(t: &Tiling, faces: &[usize]) -> PatchSignature {
    let mut shape: Vec<(String, usize)> = faces.iter().map(|&f| (t.face_label(f).to_string(), t.face_len(f))).collect();
    shape.sort();
    let mut statuses = BTreeMap::new();
    for e in 0..t.edge_count() {
        let [a, b] = t.edge_faces(e);
        if a != b && faces.contains(&a) && faces.contains(&b) {
            let status = match t.edge(e).status {
                EdgeStatus::Plain => "plain",
                EdgeStatus::Loaded => "loaded",
                EdgeStatus::Fragile => "fragile",
            };
            *statuses.entry(status.to_string()).or_insert(0) += 1;
        }
    }
    (faces.len(), shape, statuses)
}

#[test]
fn replacement_depends_only_on_the_matched_group() {
    let entry = get_rule("torus3").unwrap();
    let rule = entry.refining.clone().unwrap();
    let stages = entry.stages(4, Mode::Subdivision).unwrap();
    let mut seen: BTreeMap<String, PatchSignature> = BTreeMap::new();
    let mut compared = 0;
    for t in &stages[2..] {
        let r = apply_replacement(&rule, t).unwrap();
        for m in &r.matches {
            let image: Vec<usize> = m.faces.iter().flat_map(|&f| r.witness.face_map[f].iter().copied()).collect();
            let sig = patch_signature(&r.tiling, &image);
            let group = rule.groups[m.group].name.clone();
            match seen.get(&group) {
                Some(prev) => {
                    assert_eq!(prev, &sig, "group {group} at stage {}", t.stage());
                    compared += 1;
                }
                None => {
                    seen.insert(group, sig);
                }
            }
        }
    }
    assert!(seen.len() >= 2);
    assert!(compared > 100);
}
