mod common;

use subdiv_core::growth::{classify_growth, growth_report, growth_series, Growth, GrowthError, Source};
use subdiv_core::library::{get_rule, Mode};

#[test]
fn torus3_face_counts_follow_the_closed_form() {
    let entry = get_rule("torus3").unwrap();
    let report = growth_report(entry, 6, Source::Engine(Mode::Replacement)).unwrap();
    let expected: Vec<u64> = (1..=6).map(common::cube_face_count).collect();
    assert_eq!(report.face_counts(), expected);
    assert_eq!(report.classification, Growth::Polynomial { degree: 2 });
    assert!(report.evidence.differences[2].iter().all(|&d| d == 24));
    assert!(report.recheck());
}

#[test]
fn torus3_is_quadratic_for_every_window() {
    let series: Vec<u64> = (1..=6).map(common::cube_face_count).collect();
    for n in 4..=6 {
        let (g, _) = classify_growth(&series[..n]).unwrap();
        assert_eq!(g, Growth::Polynomial { degree: 2 }, "first {n}");
    }
    let (g, _) = classify_growth(&series[1..]).unwrap();
    assert_eq!(g, Growth::Polynomial { degree: 2 });
}

#[test]
fn engine_and_cover_series_agree() {
    let entry = get_rule("torus3").unwrap();
    let engine = growth_series(entry, 4, Source::Engine(Mode::Replacement)).unwrap();
    let cover = growth_series(entry, 4, Source::Cover).unwrap();
    assert_eq!(engine, cover);
}

#[test]
fn s2xr_is_constant() {
    let report = growth_report(get_rule("s2xr").unwrap(), 5, Source::Engine(Mode::Subdivision)).unwrap();
    assert_eq!(report.classification, Growth::Constant { value: 4 });
}

#[test]
fn s3_is_empty() {
    let report = growth_report(get_rule("s3").unwrap(), 4, Source::Engine(Mode::Subdivision)).unwrap();
    assert_eq!(report.face_counts(), vec![0, 0, 0, 0]);
    assert_eq!(report.classification, Growth::Empty);
    assert_eq!(classify_growth(&[0, 0, 0]), Err(GrowthError::TooShort(3)));
}

#[test]
fn nxs1_is_exponential() {
    let report = growth_report(get_rule("nxs1").unwrap(), 5, Source::Engine(Mode::Replacement)).unwrap();
    match report.classification {
        Growth::Exponential { ratio } => assert!(ratio > 1.05, "{ratio}"),
        other => panic!("{other:?}"),
    }
    let counts = report.face_counts();
    assert!(counts[1..].windows(2).all(|w| w[1] as f64 / w[0] as f64 > 1.05), "{counts:?}");
    assert!(report.recheck());
}

#[test]
fn barycentric_mesh_statistics() {
    let report = growth_report(get_rule("barycentric").unwrap(), 4, Source::Engine(Mode::Subdivision)).unwrap();
    assert_eq!(report.face_counts(), vec![2, 12, 72, 432]);
    assert!(matches!(report.classification, Growth::Exponential { ratio } if (ratio - 6.0).abs() < 1e-9));
    let mesh = report.mesh.unwrap();
    let last = mesh.last().unwrap();
    assert_eq!((last.min_descendants, last.max_descendants), (216, 216));
}

#[test]
fn tampered_evidence_fails_recheck() {
    let mut report = growth_report(get_rule("torus3").unwrap(), 4, Source::Engine(Mode::Replacement)).unwrap();
    report.evidence.differences[0][3] += 1;
    assert!(!report.recheck());
}

#[test]
fn classification_of_synthetic_series() {
    assert_eq!(classify_growth(&[3, 3, 3, 3]).unwrap().0, Growth::Constant { value: 3 });
    assert_eq!(classify_growth(&[1, 4, 7, 10, 13]).unwrap().0, Growth::Polynomial { degree: 1 });
    assert_eq!(classify_growth(&[1, 8, 27, 64, 125, 216]).unwrap().0, Growth::Polynomial { degree: 3 });
    match classify_growth(&[1, 2, 4, 8, 16, 32]).unwrap().0 {
        Growth::Exponential { ratio } => assert!((ratio - 2.0).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
}
