use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dualform_core::dual_form::{normalize_duality, recognize_dual_form, to_dual_form_stage6};
use dualform_core::group::parse_cyclic;
use dualform_core::intmat::smith_normal_form;
use dualform_core::{cyclic_group, lens_complex, lens_duality_map};
use std::hint::black_box;

fn group_ring_mul(c: &mut Criterion) {
    let mut g = c.benchmark_group("gr_mul");
    for n in [8usize, 32, 128] {
        let grp = cyclic_group(n).unwrap();
        let a = parse_cyclic(&grp, "1 + 2t - 3t^2 + t^5").unwrap();
        let b = parse_cyclic(&grp, "t^-1 - t^3 + 4t^4").unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |bch, _| bch.iter(|| black_box(&a) * black_box(&b)));
    }
    g.finish();
}

fn smith(c: &mut Criterion) {
    let mut g = c.benchmark_group("snf_expanded_boundary");
    for n in [5usize, 13, 25] {
        let m = lens_complex(n).unwrap().boundary(4).expand();
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |bch, m| bch.iter(|| smith_normal_form(black_box(m))));
    }
    g.finish();
}

fn stage6(c: &mut Criterion) {
    let mut g = c.benchmark_group("stage6");
    g.sample_size(20);
    for n in [3usize, 5, 7] {
        let a = lens_complex(n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |bch, a| bch.iter(|| to_dual_form_stage6(black_box(a)).unwrap()));
    }
    g.finish();
}

fn normalize(c: &mut Criterion) {
    let mut g = c.benchmark_group("normalize");
    for n in [5usize, 9, 17] {
        let v = recognize_dual_form(&lens_complex(n).unwrap()).unwrap();
        let phi = lens_duality_map(n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &(v, phi), |bch, (v, phi)| {
            bch.iter(|| normalize_duality(black_box(v), black_box(phi)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, group_ring_mul, smith, stage6, normalize);
criterion_main!(benches);
