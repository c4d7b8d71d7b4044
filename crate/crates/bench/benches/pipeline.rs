use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mgroupoid::connection::{material_connection, torsion};
use mgroupoid::constitutive::ProbeSet;
use mgroupoid::groupoid::random_groupoid;
use mgroupoid::iso_solver::{solve_isomorphism, symmetry_group_estimate, SolverOptions};
use mgroupoid::uniformity::{assemble_material_groupoid, UniformityOptions};
use mgroupoid::{FiniteGroup, FiniteGroupoid, Mat3};
use mgroupoid_bench::sheared_body;

fn groupoids(c: &mut Criterion) {
    let d3 = FiniteGroup::dihedral(3);
    let g = FiniteGroupoid::trivial(4, &d3);
    c.bench_function("validate_axioms trivial 4x D3 x 4", |b| b.iter(|| black_box(&g).validate_axioms()));
    let r = random_groupoid(7, 50);
    c.bench_function("orbit_decomposition random 50", |b| b.iter(|| black_box(&r).orbit_decomposition()));
}

fn solver(c: &mut Criterion) {
    let m = sheared_body(11, 0.1, 0.2);
    let probes = ProbeSet::default();
    let p = Mat3::identity();
    c.bench_function("iso_residual svk", |b| b.iter(|| m.iso_residual(0, 1330, black_box(&p), &probes)));
    let opts = SolverOptions::default();
    c.bench_function("solve_isomorphism corner to corner", |b| b.iter(|| solve_isomorphism(&m, 0, 1330, &opts)));
    c.bench_function("symmetry_group_estimate svk", |b| b.iter(|| symmetry_group_estimate(&m, 665, &opts)));
}

fn pipeline(c: &mut Criterion) {
    let m = sheared_body(7, 0.1, 0.2);
    let opts = UniformityOptions::default();
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    group.bench_function("assemble 7^3 sheared", |b| b.iter(|| assemble_material_groupoid(&m, &opts)));
    let report = assemble_material_groupoid(&m, &opts).expect("uniform body");
    group.bench_function("connection and torsion 7^3", |b| {
        b.iter(|| torsion(&material_connection(&report.gauge).expect("valid gauge")))
    });
    group.finish();
}

criterion_group!(benches, groupoids, solver, pipeline);
criterion_main!(benches);
