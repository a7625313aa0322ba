use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use periodic_zeta::oracle::census_with;
use periodic_zeta::quadrature::QuadratureOptions;
use periodic_zeta::zeta::det_gamma_numeric;
use periodic_zeta::{Execution, VoltageGraph};

fn load(name: &str) -> VoltageGraph {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name);
    VoltageGraph::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn strategies() -> Vec<(&'static str, Execution)> {
    let mut v = vec![("sequential", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("parallel", Execution::Parallel));
    v
}

fn census(c: &mut Criterion) {
    let mut group = c.benchmark_group("census");
    group.sample_size(10);
    for (file, n) in [("example.json", 14), ("square.json", 14)] {
        let g = load(file);
        for (label, exec) in strategies() {
            group.bench_with_input(BenchmarkId::new(label, format!("{file}/N={n}")), &n, |b, &n| {
                b.iter(|| census_with(&g, n, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn quadrature(c: &mut Criterion) {
    let mut group = c.benchmark_group("det-quadrature");
    group.sample_size(10);
    for file in ["example.json", "square.json", "honeycomb.json"] {
        let g = load(file);
        for (label, exec) in strategies() {
            let opts = QuadratureOptions {
                exec,
                ..Default::default()
            };
            group.bench_function(BenchmarkId::new(label, file), |b| {
                b.iter(|| det_gamma_numeric(&g, 2.0, &opts).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, census, quadrature);
criterion_main!(benches);
