use criterion::{black_box, criterion_group, criterion_main, Criterion};

use clpencil::appendix::ParamPoint;
use clpencil::chains::{chain_extend, involution_matrix};
use clpencil::liepoisson::builtin;
use clpencil_bench::{family, point};

fn polynomials(c: &mut Criterion) {
    let gl3 = builtin("gl3").unwrap();
    let c2 = gl3.casimir("C2").unwrap();
    let c3 = gl3.casimir("C3").unwrap();
    c.bench_function("poly/mul C2*C3", |b| b.iter(|| black_box(&c2 * &c3)));
    c.bench_function("poly/pow C2^3", |b| b.iter(|| black_box(c2.pow(3))));
}

fn brackets(c: &mut Criterion) {
    let fam = family();
    let p = fam.sl3().poisson().clone();
    c.bench_function("schouten/[P,P] sl3", |b| b.iter(|| black_box(p.schouten(&p).unwrap())));
    let x = fam.appendix.x_b(&ParamPoint::Symbolic);
    let pi = x.lie_derivative(&p).unwrap();
    c.bench_function("schouten/[pi,pi] symbolic b", |b| b.iter(|| black_box(pi.schouten(&pi).unwrap())));
    let pencil = fam.pencil(&ParamPoint::Symbolic);
    c.bench_function("schouten/[pi2,pi2] symbolic b", |b| {
        b.iter(|| black_box(pencil.pi2.schouten(&pencil.pi2).unwrap()))
    });
}

fn solving(c: &mut Criterion) {
    let fam = family();
    let pencil = fam.pencil(&point());
    let x0 = pencil.chart.coord("x0").unwrap();
    let mut g = c.benchmark_group("chains");
    g.sample_size(10);
    g.bench_function("chain x0, 2 steps", |b| b.iter(|| black_box(chain_extend(&pencil, &x0, 2).unwrap())));
    let sl3 = fam.sl3();
    let funcs = vec![
        ("Q".to_string(), fam.appendix.q_b(&ParamPoint::Symbolic)),
        ("M".to_string(), fam.appendix.m_b(&ParamPoint::Symbolic)),
        ("C3".to_string(), sl3.casimir("C3").unwrap()),
    ];
    g.bench_function("involution symbolic b", |b| b.iter(|| black_box(involution_matrix(&funcs, sl3.poisson()))));
    g.finish();
}

criterion_group!(benches, polynomials, brackets, solving);
criterion_main!(benches);
