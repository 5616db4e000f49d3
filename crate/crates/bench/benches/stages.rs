use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use subdiv_core::cayley::{almost_convexity_profile, cone_type_count, ConeEquivalence, GroupSpec};
use subdiv_core::cover;
use subdiv_core::iso::is_isomorphic;
use subdiv_core::library::{builtin_spec, get_rule, Mode};
use subdiv_core::pack::{pack, triangulate};

fn replacement(c: &mut Criterion) {
    let mut group = c.benchmark_group("replacement");
    for (name, n) in [("torus3", 5), ("nxs1", 3)] {
        let entry = get_rule(name).unwrap();
        group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
            b.iter(|| entry.stages(n, Mode::Replacement).unwrap())
        });
    }
    group.finish();
}

fn cover_balls(c: &mut Criterion) {
    let mut group = c.benchmark_group("cover");
    for (name, n) in [("cube", 5), ("prism12", 3)] {
        let spec = builtin_spec(name).unwrap();
        group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
            b.iter(|| cover::ball(&spec, n).unwrap().boundary().unwrap())
        });
    }
    group.finish();
}

fn isomorphism(c: &mut Criterion) {
    let entry = get_rule("torus3").unwrap();
    let a = entry.stages(5, Mode::Replacement).unwrap().pop().unwrap();
    let b = entry.oracle_stages(5).unwrap().pop().unwrap();
    c.bench_function("isomorphism/torus3 S(5)", |bench| bench.iter(|| is_isomorphic(black_box(&a), black_box(&b))));
}

fn cayley(c: &mut Criterion) {
    let sol = GroupSpec::builtin("sol").unwrap();
    let heis = GroupSpec::builtin("heis").unwrap();
    c.bench_function("cayley/sol K(2,n) n<=5", |b| b.iter(|| almost_convexity_profile(&sol, 5, 2).unwrap()));
    c.bench_function("cayley/heis cones r=5 k=2", |b| {
        b.iter(|| cone_type_count(&heis, 5, 2, ConeEquivalence::Labeled).unwrap())
    });
}

fn packing(c: &mut Criterion) {
    let t = get_rule("torus3").unwrap().stages(4, Mode::Replacement).unwrap().pop().unwrap();
    let p = triangulate(&t, 0).unwrap();
    c.bench_function("pack/torus3 S(4)", |b| b.iter(|| pack(black_box(&p), 1e-8).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = replacement, cover_balls, isomorphism, cayley, packing
}
criterion_main!(benches);
