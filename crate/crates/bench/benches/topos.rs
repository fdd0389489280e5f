use criterion::{black_box, criterion_group, criterion_main, Criterion};
use dectopos::builtins::builtin;
use dectopos::corpus::{enumerate_presheaves, uniform_bounds};
use dectopos::decidable::{check_dqo_bounded, check_ns, pi, separated_reflection};
use dectopos::forcing::has_pneumoconnected_fibers;
use dectopos::harness::lemma_harness;
use dectopos::precohesion::{check_precohesive, theorem_c_harness};
use dectopos::presheaf::{exponential, power_object};
use dectopos::search::{search_counterexample, Property};
use dectopos::sublattice::subobjects;
use dectopos_bench::{base, corpus};

fn construction(c: &mut Criterion) {
    let b = base("refgraph");
    let p3 = builtin(&b, "P3").unwrap();
    let l2 = builtin(&b, "L2").unwrap();
    c.bench_function("subobjects P3", |bn| bn.iter(|| subobjects(black_box(&p3)).unwrap()));
    c.bench_function("power object P2", |bn| {
        let p2 = builtin(&b, "P2").unwrap();
        bn.iter(|| power_object(black_box(&p2)).unwrap())
    });
    c.bench_function("exponential L^P2", |bn| {
        let (l, p2) = (builtin(&b, "L").unwrap(), builtin(&b, "P2").unwrap());
        bn.iter(|| exponential(&p2, black_box(&l)).unwrap())
    });
    c.bench_function("pi P3", |bn| bn.iter(|| pi(black_box(&p3)).unwrap()));
    c.bench_function("separated reflection fibers L2", |bn| {
        bn.iter(|| {
            let (_, m) = separated_reflection(black_box(&l2)).unwrap();
            has_pneumoconnected_fibers(&m).unwrap()
        })
    });
}

fn corpora(c: &mut Criterion) {
    let b = base("refgraph");
    c.bench_function("enumerate refgraph bound 3", |bn| {
        bn.iter(|| enumerate_presheaves(&b, &uniform_bounds(&b, 3)).unwrap())
    });
    let g = base("graph");
    c.bench_function("enumerate graph bound 2", |bn| {
        bn.iter(|| enumerate_presheaves(&g, &uniform_bounds(&g, 2)).unwrap())
    });
}

fn harnesses(c: &mut Criterion) {
    let rc = corpus("refgraph", 2);
    let gc = corpus("graph", 2);
    c.bench_function("check ns graph", |bn| bn.iter(|| check_ns(black_box(&gc.base)).unwrap()));
    c.bench_function("dqo bounded refgraph 2", |bn| bn.iter(|| check_dqo_bounded(black_box(&rc)).unwrap()));
    c.bench_function("search dqo graph 2", |bn| {
        bn.iter(|| search_counterexample(Property::DqoUniqueness, black_box(&gc)).unwrap())
    });
    c.bench_function("lemma refgraph 2", |bn| bn.iter(|| lemma_harness(black_box(&rc)).unwrap()));
    c.bench_function("precohesion refgraph 2", |bn| bn.iter(|| check_precohesive(black_box(&rc)).unwrap()));
    c.bench_function("theorem c refgraph 2", |bn| bn.iter(|| theorem_c_harness(black_box(&rc), None).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = construction, corpora, harnesses
}
criterion_main!(benches);
