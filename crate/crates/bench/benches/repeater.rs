use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use hamrep::rate::{self, SeparationPolicy, DEFAULT_ALPHA};
use hamrep::{linalg, loss, repeater, BuiltinCode, ChainState, FockBasis};
use hamrep_bench::{code, context, region_grids, segment, serial};

fn repeaters(c: &mut Criterion) {
    let three = code(BuiltinCode::ThreeMode);
    c.bench_function("build_direct/three-mode", |b| {
        b.iter(|| repeater::build_direct(&three, 1).unwrap())
    });
    c.bench_function("build_swap/three-mode", |b| {
        b.iter(|| repeater::build_swap(&three).unwrap())
    });
    let h = repeater::build_direct(&three, 1)
        .unwrap()
        .hamiltonian()
        .clone();
    c.bench_function("hermitian_eigen/256", |b| {
        b.iter(|| linalg::hermitian_eigen(&h))
    });
}

fn channels(c: &mut Criterion) {
    let basis = FockBasis::new(1, 3).unwrap();
    c.bench_function("equivalence_report/single-mode", |b| {
        b.iter(|| loss::representation_equivalence_report(basis, 0.5, 20, 1).unwrap())
    });
    let ctx = context(BuiltinCode::ThreeMode);
    let model = segment(0.95, 3.0);
    c.bench_function("segment_channel/three-mode", |b| {
        b.iter(|| ctx.segment_channel(&model).unwrap())
    });
}

fn chains(c: &mut Criterion) {
    let ctx = context(BuiltinCode::SingleMode);
    let channel = ctx.segment_channel(&segment(0.999, 0.05)).unwrap();
    c.bench_function("chain_steps/single-mode/100", |b| {
        b.iter_batched(
            || ChainState::initial(ctx.code()),
            |mut state| {
                for _ in 0..100 {
                    state.step(&channel).unwrap();
                }
                state
            },
            BatchSize::SmallInput,
        )
    });
}

fn scans(c: &mut Criterion) {
    let (eta_c, sep) = region_grids();
    let three = code(BuiltinCode::ThreeMode);
    c.bench_function("region_scan/three-mode", |b| {
        b.iter(|| rate::region_scan(&three, eta_c, sep, DEFAULT_ALPHA, &serial()).unwrap())
    });
    c.bench_function("rate_curve/three-mode/optimized", |b| {
        b.iter(|| {
            rate::rate_vs_distance(
                &three,
                0.9,
                DEFAULT_ALPHA,
                600.0,
                SeparationPolicy::Optimized,
                true,
            )
            .unwrap()
        })
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = repeaters, channels, chains, scans
}
criterion_main!(benches);
