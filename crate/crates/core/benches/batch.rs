//! Sequential vs data-parallel evaluation of the same batches.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use phigamma_core::characters::PadicCharacter;
use phigamma_core::cohomology::{h1_rank_one, Truncation};
use phigamma_core::padic::PrecisionPolicy;
use phigamma_core::par::Execution;
use phigamma_core::selmer::{primes_below, random_instance, semicontinuity_experiment, SelmerInstance};

const P: u32 = 5;
const N: i64 = 20;

fn characters() -> Vec<PadicCharacter> {
    [
        "p^-1*(0+1*sqrt(5)) ; tors=0 ; princ=1",
        "p^-1*(0+2*sqrt(5)) ; tors=1 ; princ=1",
        "p^-1*(0+3*sqrt(-5)) ; tors=2 ; princ=1",
        "p^-1*(0+1*sqrt(10)) ; tors=0 ; princ=1",
        "2 ; tors=0 ; princ=1",
        "p^1*2 ; tors=0 ; princ=1",
        "1 ; tors=1 ; princ=1",
        "p^3 ; tors=1 ; princ=1",
    ]
    .iter()
    .map(|s| PadicCharacter::parse(s, P, N + 10).unwrap())
    .collect()
}

fn bench_h1(c: &mut Criterion) {
    let chars = characters();
    let t = Truncation { k: 40, n: N };
    let policy = PrecisionPolicy::new(N, 5, 100).unwrap();
    let mut g = c.benchmark_group("h1_batch");
    g.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| exec.map(&chars, |ch| h1_rank_one(ch, t, &policy, Execution::Sequential).unwrap()))
        });
    }
    g.finish();
}

fn bench_selmer(c: &mut Criterion) {
    let insts: Vec<SelmerInstance<_>> = (0..100).map(random_instance).collect();
    let primes = primes_below(200);
    let mut g = c.benchmark_group("selmer_corpus");
    g.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| exec.map(&insts, |i| semicontinuity_experiment(i, &primes).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_h1, bench_selmer);
criterion_main!(benches);
