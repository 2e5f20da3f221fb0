//! Sequential against rayon-parallel evaluation of the grid workloads.

use std::collections::BTreeMap;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jetvar::fields::Section;
use jetvar::numerics::{quadrature, residual_grid, Exec, IntegrationDomain};
use jetvar::symcore::{parse_expr, Coord};
use jetvar::varcalc::{euler_lagrange, first_variation_check, poincare_cartan, LagrangianProblem};

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn bench_quadrature(c: &mut Criterion) {
    let prob = LagrangianProblem::parse(2, 1, 1, "1/2*(y(1;1)^2 + y(1;2)^2)").unwrap();
    let integrand = parse_expr("sin(x(1))*exp(x(2)) + x(1)^3*x(2)^2 - cos(x(1)*x(2))", prob.ctx()).unwrap();
    let mut group = c.benchmark_group("quadrature");
    for res in [101, 401] {
        let d = IntegrationDomain::unit(2, res).unwrap();
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, res * res), &d, |b, d| {
                b.iter(|| quadrature(&integrand, d, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_residual(c: &mut Criterion) {
    let prob = LagrangianProblem::parse(2, 1, 1, "1/2*(y(1;1)^2 + y(1;2)^2) + y(1)^4").unwrap();
    let el: Vec<(String, _)> =
        euler_lagrange(&prob).unwrap().into_iter().map(|(s, e)| (format!("E({s})"), e)).collect();
    let gamma = Section::from_gamma(2, BTreeMap::from([(1, parse_expr("sin(x(1))*cos(x(2))", prob.ctx()).unwrap())]))
        .unwrap()
        .prolong(2);
    let binding: BTreeMap<Coord, _> = gamma.components().clone();
    let d = IntegrationDomain::unit(2, 301).unwrap();
    let mut group = c.benchmark_group("euler_lagrange_residual");
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| b.iter(|| residual_grid(&el, &binding, &d, exec).unwrap()));
    }
    group.finish();
}

fn bench_first_variation(c: &mut Criterion) {
    let prob = LagrangianProblem::parse(1, 1, 2, "1/2*y(1;1,1)^2 + y(1)^2*y(1;1)").unwrap();
    let rho = poincare_cartan(&prob).unwrap();
    let gamma = Section::from_gamma(1, BTreeMap::from([(1, parse_expr("sin(x(1))", prob.ctx()).unwrap())])).unwrap();
    let xi = BTreeMap::from([(1, parse_expr("1 + x(1)^2", prob.ctx()).unwrap())]);
    let d = IntegrationDomain::unit(1, 100_001).unwrap();
    let mut group = c.benchmark_group("first_variation");
    group.sample_size(20);
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| {
            b.iter(|| first_variation_check(&prob, &rho, &xi, &gamma, &d, 1e-5, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_quadrature, bench_residual, bench_first_variation);
criterion_main!(benches);
