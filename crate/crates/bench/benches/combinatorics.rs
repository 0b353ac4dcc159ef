use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use treelab_bench::exact_witness;
use treelab_core::antichains::{DEFAULT_MAXIMAL_DEPTH_CAP, DEFAULT_SUBSET_CAP};
use treelab_core::patterns::DEFAULT_VERIFY_CAP;
use treelab_core::qftype::DEFAULT_PAIR_CAP;
use treelab_core::*;

fn antichains(c: &mut Criterion) {
    let mut g = c.benchmark_group("antichains");
    g.bench_function("alpha(20)", |b| b.iter(|| alpha(black_box(20))));
    for n in [4, 5] {
        g.bench_with_input(BenchmarkId::new("maximal_recursive", n), &n, |b, &n| {
            b.iter(|| maximal_antichains(n, DEFAULT_MAXIMAL_DEPTH_CAP).unwrap())
        });
    }
    let d4 = TreeDomain::binary(4).unwrap();
    g.bench_function("enumerate_scan/4", |b| {
        b.iter(|| enumerate_antichains(&d4, true, DEFAULT_SUBSET_CAP).unwrap())
    });
    g.finish();
}

fn synthesis(c: &mut Criterion) {
    let mut g = c.benchmark_group("synth");
    g.sample_size(20);
    let spec = pattern_for(PatternKind::Atp, 2, 5).unwrap();
    let family = exact_family(&spec).unwrap();
    g.bench_function("skolem_atp/5", |b| b.iter(|| synth_skolem(&family).unwrap()));
    g.bench_function("boolean_atp/5", |b| b.iter(|| synth_boolean(&family).unwrap()));
    for backend in [Backend::Skolem, Backend::Boolean] {
        let (spec, w) = exact_witness(PatternKind::Atp, 4, backend);
        g.bench_function(format!("verify_exhaustive_atp/4/{backend}"), |b| {
            b.iter(|| verify(&w, &spec, VerifyMode::Exhaustive, DEFAULT_VERIFY_CAP).unwrap())
        });
    }
    g.finish();
}

fn lemmas(c: &mut Criterion) {
    let mut g = c.benchmark_group("lemmas");
    g.sample_size(10);
    g.bench_function("ss_ll/3/3", |b| b.iter(|| verify_ss_ll(2, 3, 3, DEFAULT_PAIR_CAP).unwrap()));
    let seed = NodeSet::singleton(Node::from([0]));
    g.bench_function("scaffold/3", |b| {
        b.iter(|| build_onevar_scaffold(3, &seed).unwrap().check().unwrap())
    });
    g.finish();
}

criterion_group!(benches, antichains, synthesis, lemmas);
criterion_main!(benches);
