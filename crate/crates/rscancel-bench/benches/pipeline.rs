use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rscancel::dehn::{build_index, dehn_reduce, Gate};
use rscancel::genericity::{count_pattern_exact, mc_presentation, PatternQuery};
use rscancel::graph::gamma_syllable;
use rscancel::{max_piece_syllable, Rational, Word};
use rscancel_bench::{exponent_cycle, pg27_gamma, random_gamma};

fn pieces(c: &mut Criterion) {
    let small = random_gamma(12, 1);
    let pg = pg27_gamma();
    let mut g = c.benchmark_group("max_piece_syllable");
    g.sample_size(10);
    g.bench_function("random n=12", |b| b.iter(|| max_piece_syllable(black_box(&small.graph)).unwrap()));
    g.bench_function("pg27", |b| b.iter(|| max_piece_syllable(black_box(&pg.graph)).unwrap()));
    g.finish();
}

fn gamma(c: &mut Criterion) {
    let pg = pg27_gamma();
    let mut g = c.benchmark_group("gamma_syllable");
    g.sample_size(10);
    g.bench_function("pg27", |b| b.iter(|| gamma_syllable(black_box(&pg.graph), 64)));
    g.finish();
}

fn dehn(c: &mut Criterion) {
    let l = Rational::new(1, 8);
    let idx = build_index(&exponent_cycle(21), 42, Gate::Certified(l)).unwrap();
    let r = idx.relators[0].clone();
    let conj: Word = "a^3 b^-2 a".parse().unwrap();
    let w = conj.concat(&r).concat(&conj.inverse()).concat(&r.inverse());
    c.bench_function("dehn_reduce two conjugates", |b| b.iter(|| dehn_reduce(black_box(&w), &idx, l)));
    let pg = pg27_gamma();
    let mut g = c.benchmark_group("build_index");
    g.sample_size(10);
    g.bench_function("pg27 cap 6", |b| b.iter(|| build_index(black_box(&pg.graph), 6, Gate::Unsafe).unwrap()));
    g.finish();
}

fn genericity(c: &mut Criterion) {
    c.bench_function("count_pattern_exact t=64", |b| b.iter(|| count_pattern_exact(black_box(64)).unwrap()));
    c.bench_function("mc_presentation t=20 10^4", |b| {
        b.iter(|| mc_presentation(PatternQuery { t: 20, n: 1, trials: 10_000, seed: 1 }))
    });
}

criterion_group!(benches, pieces, gamma, dehn, genericity);
criterion_main!(benches);
