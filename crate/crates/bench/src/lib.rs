use criterion::{black_box, BenchmarkId, Criterion, Throughput};
use pancake_core::constructive::{compose, parity4_coloring, upper_bound_table, BlockScheme};
use pancake_core::perm::factorial;
use pancake_core::quotient::{lift, quotient_coloring_is_proper};
use pancake_core::solver::{complete_search, heuristic_search, SearchBudget, SimpleGraph};
use pancake_core::{verify_proper, PancakeView, Permutation, Rank};

pub fn benchmarks(c: &mut Criterion) {
    permutations(c);
    streaming(c);
    colorings(c);
    solver(c);
}

fn permutations(c: &mut Criterion) {
    let mut g = c.benchmark_group("perm");
    for n in [8usize, 12, 20] {
        let total = factorial(n);
        g.bench_with_input(BenchmarkId::new("rank_roundtrip", n), &n, |b, &n| {
            let mut r = 0u64;
            b.iter(|| {
                r = (r + 7919) % total;
                let p = Permutation::lex_unrank(Rank(r), n).unwrap();
                black_box(p.lex_rank())
            })
        });
    }
    let p = Permutation::identity(12);
    g.bench_function("neighbors_12", |b| {
        let view = PancakeView::full(12).unwrap();
        b.iter(|| {
            let mut acc = 0u32;
            view.for_each_neighbor(black_box(&p), |q, _| acc += q.first() as u32);
            acc
        })
    });
    g.finish();
}

fn streaming(c: &mut Criterion) {
    let mut g = c.benchmark_group("stream");
    g.sample_size(10);
    for n in [7usize, 8] {
        let view = PancakeView::full(n).unwrap();
        g.throughput(Throughput::Elements(factorial(n) * (n as u64 - 1) / 2));
        g.bench_with_input(BenchmarkId::new("edges", n), &view, |b, view| {
            b.iter(|| {
                view.stream_edges(|e| {
                    black_box(e);
                })
            })
        });
    }
    g.finish();
}

fn colorings(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    let p8 = PancakeView::full(8).unwrap();
    let cases = [
        ("equitable-nm1", lift(8).unwrap()),
        (
            "compose-4-4",
            compose(&BlockScheme::from_sizes(&[4, 4]).unwrap()).unwrap(),
        ),
    ];
    for (name, coloring) in &cases {
        g.bench_function(BenchmarkId::new(*name, 8), |b| {
            b.iter(|| verify_proper(&p8, coloring).unwrap())
        });
    }
    let p7 = PancakeView::full(7).unwrap();
    let parity4 = parity4_coloring(7).unwrap();
    g.bench_function(BenchmarkId::new("parity4", 7), |b| {
        b.iter(|| verify_proper(&p7, &parity4).unwrap())
    });
    g.bench_function("quotient_proper_200", |b| {
        b.iter(|| quotient_coloring_is_proper(black_box(200)).unwrap())
    });
    g.bench_function("bounds_sweep_10000", |b| {
        b.iter(|| {
            (2..=10_000)
                .map(|n| upper_bound_table(n).unwrap().best)
                .sum::<i64>()
        })
    });
    g.finish();
}

fn solver(c: &mut Criterion) {
    let mut g = c.benchmark_group("solver");
    g.sample_size(10);
    let budget = SearchBudget::default();
    for (n, k) in [(5usize, 3u32), (6, 4)] {
        let (graph, _) = SimpleGraph::from_view(&PancakeView::full(n).unwrap()).unwrap();
        g.bench_with_input(
            BenchmarkId::new(format!("complete_k{k}"), n),
            &graph,
            |b, graph| b.iter(|| complete_search(graph, k, &budget).unwrap()),
        );
        g.bench_with_input(
            BenchmarkId::new(format!("tabu_k{k}"), n),
            &graph,
            |b, graph| b.iter(|| heuristic_search(graph, k, &budget).unwrap()),
        );
    }
    g.finish();
}
