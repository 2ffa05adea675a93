use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mubgme::correlations::{i3, i4, outcome_distribution};
use mubgme::locc::sweep;
use mubgme::states::{bell, random_pure};
use mubgme::{BasisAssignment, SweepGrid};

fn criteria(c: &mut Criterion) {
    let r3 = random_pure(&[2, 2, 2], 1).unwrap().density();
    let r4 = random_pure(&[2, 2, 2, 2], 1).unwrap().density();
    let h4 = BasisAssignment::hadamard(4);
    c.bench_function("i3", |b| b.iter(|| i3(black_box(&r3)).unwrap()));
    c.bench_function("i4", |b| b.iter(|| i4(black_box(&r4)).unwrap()));
    c.bench_function("outcome_distribution_4q", |b| b.iter(|| outcome_distribution(black_box(&r4), &h4).unwrap()));
}

fn locc(c: &mut Criterion) {
    let rho = bell().density();
    let grid = SweepGrid::cube(11).unwrap();
    c.bench_function("omega_sweep_11^3", |b| b.iter(|| sweep(black_box(&rho), &grid, 0.0).unwrap()));
}

criterion_group!(benches, criteria, locc);
criterion_main!(benches);
