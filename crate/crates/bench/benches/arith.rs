use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hecke_core::{gauss_sum_bruteforce, gauss_sum_closed, is_squarefree, primary_normalize, symbol, symbol_fast, Character, FieldId};
use std::hint::black_box;

fn symbols(c: &mut Criterion) {
    let mut g = c.benchmark_group("symbol");
    for d in [-1, -7, -163] {
        let k = FieldId::new(d).unwrap();
        let elems = hecke_core::enumerate_c(k, 0.0, 400.0);
        g.bench_with_input(BenchmarkId::new("reference", d), &elems, |b, elems| {
            b.iter(|| elems.iter().zip(elems.iter().rev()).map(|(m, n)| symbol(m, n).unwrap() as i64).sum::<i64>())
        });
        if k.is_norm_euclidean() {
            g.bench_with_input(BenchmarkId::new("fast", d), &elems, |b, elems| {
                b.iter(|| elems.iter().zip(elems.iter().rev()).map(|(m, n)| symbol_fast(m, n).unwrap() as i64).sum::<i64>())
            });
        }
    }
    g.finish();
}

fn normalization(c: &mut Criterion) {
    let k = FieldId::new(-3).unwrap();
    let elems: Vec<_> = k.elements_up_to(500).into_iter().filter(|x| x.is_odd()).collect();
    c.bench_function("primary_normalize d=-3", |b| {
        b.iter(|| elems.iter().map(|x| primary_normalize(x).unwrap().1.a).sum::<i64>())
    });
    c.bench_function("is_squarefree d=-3", |b| b.iter(|| elems.iter().filter(|x| is_squarefree(x).unwrap()).count()));
}

fn gauss(c: &mut Criterion) {
    let k = FieldId::new(-7).unwrap();
    let n = *hecke_core::enumerate_c(k, 400.0, 1000.0).last().unwrap();
    let chi = Character::lower(&n).unwrap();
    c.bench_function("gauss_sum_bruteforce N~1000", |b| {
        b.iter(|| gauss_sum_bruteforce(black_box(&k.one()), &chi, &n).unwrap())
    });
    c.bench_function("gauss_sum_closed N~1000", |b| b.iter(|| gauss_sum_closed(black_box(&n)).unwrap()));
}

criterion_group!(benches, symbols, normalization, gauss);
criterion_main!(benches);
