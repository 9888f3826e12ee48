use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qwire::gates::{apply_1q, apply_cnot, apply_hadamard_range, StandardGate};
use qwire::measure::sample_counts;
use qwire::transforms::{apply_diffusion, apply_modexp, apply_oracle, apply_qft};
use qwire::{ClassicalOracle, QubitRange, RngStream, StateVector};
use qwire_bench::fixture_state;

const SIZES: [usize; 3] = [12, 16, 20];

fn single_qubit(c: &mut Criterion) {
    let mut g = c.benchmark_group("apply_1q");
    let h = StandardGate::H.matrix();
    for n in SIZES {
        let mut s = fixture_state(n);
        // Middle qubit: neither the contiguous nor the widest stride.
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| apply_1q(&mut s, &h, n / 2).unwrap()));
    }
    g.finish();
}

fn cnot(c: &mut Criterion) {
    let mut g = c.benchmark_group("apply_cnot");
    for n in SIZES {
        let mut s = fixture_state(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| apply_cnot(&mut s, 0, n - 1).unwrap())
        });
    }
    g.finish();
}

fn hadamard(c: &mut Criterion) {
    let mut g = c.benchmark_group("hadamard_range");
    for n in SIZES {
        let mut s = fixture_state(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| apply_hadamard_range(&mut s, QubitRange::leading(n - 2)).unwrap())
        });
    }
    g.finish();
}

fn qft(c: &mut Criterion) {
    let mut g = c.benchmark_group("qft");
    for n in SIZES {
        let mut s = fixture_state(n);
        g.bench_with_input(BenchmarkId::new("leading", n), &n, |b, &n| {
            b.iter(|| apply_qft(&mut s, QubitRange::leading(n - 4), false).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("trailing", n), &n, |b, &n| {
            b.iter(|| apply_qft(&mut s, QubitRange::new(4, n - 4), false).unwrap())
        });
    }
    g.finish();
}

fn diffusion(c: &mut Criterion) {
    let mut g = c.benchmark_group("diffusion");
    for n in SIZES {
        let mut s = fixture_state(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| apply_diffusion(&mut s, QubitRange::leading(n - 1)).unwrap())
        });
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    for n in SIZES {
        let half = n / 2;
        let f = ClassicalOracle::from_fn(half, n - half, |j| j.wrapping_mul(0x9e37_79b9) % (1 << (n - half))).unwrap();
        let mut s = fixture_state(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| apply_oracle(&mut s, &f).unwrap()));
    }
    g.finish();
}

fn modexp(c: &mut Criterion) {
    let mut g = c.benchmark_group("modexp");
    g.sample_size(10);
    // The order-finding register for N = 217: 16 + 8 qubits.
    let mut s = StateVector::zero(24).unwrap();
    apply_hadamard_range(&mut s, QubitRange::leading(16)).unwrap();
    g.bench_function("217", |b| b.iter(|| apply_modexp(&mut s, 5, 217, 16, 8).unwrap()));
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let s = fixture_state(16);
    c.bench_function("sample_counts/16/10000", |b| {
        b.iter(|| black_box(sample_counts(&s, 10_000, &mut RngStream::new(1)).unwrap()))
    });
}

criterion_group!(benches, single_qubit, cnot, hadamard, qft, diffusion, oracle, modexp, sampling);
criterion_main!(benches);
