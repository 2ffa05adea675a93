//! Numerical probe of `I_2` monotonicity under local two-outcome POVMs.
//!
//! The POVM elements are `E_k = D_k V` with
//! `D_1 = diag(sin χ, sin ζ)`, `D_2 = diag(cos χ, cos ζ)` and
//! `V = [[cos ξ, −e^{iΘ} sin ξ], [sin ξ, e^{iΘ} cos ξ]]`, so
//! `E_1†E_1 + E_2†E_2 = I` holds identically. For a state `ρ` the residual
//!
//! `Ω = I_2(ρ) − p_1 I_2(ρ_1) − p_2 I_2(ρ_2)`
//!
//! is non-negative whenever the measurement cannot raise `I_2` on average.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::{mutual_predictability, BasisAssignment};
use crate::error::{invalid, Error, Result};
use crate::mub::{fourier_pair, MubFamily};
use crate::qla::{embed_local, DensityMatrix, Operator};

/// Branches with probability below this are dropped.
pub const BRANCH_CUTOFF: f64 = 1e-12;

/// The four angles parameterizing a POVM, each in `[−π, π]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PovmParams {
    pub chi: f64,
    pub zeta: f64,
    pub xi: f64,
    pub theta_cap: f64,
}

impl PovmParams {
    pub fn new(chi: f64, zeta: f64, xi: f64, theta_cap: f64) -> Result<Self> {
        for (name, v) in [("chi", chi), ("zeta", zeta), ("xi", xi), ("theta_cap", theta_cap)] {
            if !v.is_finite() || v.abs() > PI + 1e-12 {
                return invalid(format!("{name} = {v} outside [-π, π]"));
            }
        }
        Ok(Self { chi, zeta, xi, theta_cap })
    }

    /// `E_1 = I`, `E_2 = 0`.
    pub fn identity() -> Self {
        Self { chi: PI / 2.0, zeta: PI / 2.0, xi: 0.0, theta_cap: 0.0 }
    }
}

/// Which side of the bipartite state the POVM acts on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    #[default]
    A,
    B,
}

impl Party {
    fn index(self) -> usize {
        match self {
            Party::A => 0,
            Party::B => 1,
        }
    }
}

/// `(E_1, E_2)` for the given angles.
pub fn build_povm(p: &PovmParams) -> (Operator, Operator) {
    let re = |x: f64| Complex64::new(x, 0.0);
    let phase = Complex64::from_polar(1.0, p.theta_cap);
    let (sx, cx) = p.xi.sin_cos();
    let v = Operator::from_rows(&[&[re(cx), -phase * sx], &[re(sx), phase * cx]]);
    let d1 = Operator::diagonal(&[re(p.chi.sin()), re(p.zeta.sin())]);
    let d2 = Operator::diagonal(&[re(p.chi.cos()), re(p.zeta.cos())]);
    (d1.matmul(&v).expect("2×2"), d2.matmul(&v).expect("2×2"))
}

/// `‖E_1†E_1 + E_2†E_2 − I‖_max`.
pub fn completeness_residual(e1: &Operator, e2: &Operator) -> f64 {
    let sum = e1.dagger().matmul(e1).and_then(|a| a.add(&e2.dagger().matmul(e2)?)).expect("matching shapes");
    sum.max_abs_diff(&Operator::identity(e1.cols()))
}

/// Branch probability `p = Tr[(E⊗I)ρ(E⊗I)†]` and normalized post-measurement
/// state for `E` acting on party A; the state is `None` when `p` falls below
/// [`BRANCH_CUTOFF`].
pub fn apply_branch(rho: &DensityMatrix, e: &Operator) -> Result<(f64, Option<DensityMatrix>)> {
    apply_branch_on(rho, e, Party::A)
}

pub fn apply_branch_on(rho: &DensityMatrix, e: &Operator, party: Party) -> Result<(f64, Option<DensityMatrix>)> {
    if rho.parties() != 2 {
        return invalid("POVM branches are defined for bipartite states");
    }
    let d = rho.dims()[party.index()];
    if e.rows() != d || e.cols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: e.rows() });
    }
    let k = embed_local(rho.dims(), party.index(), e)?;
    let (out, p) = rho.conjugate_by(&k)?;
    if p < BRANCH_CUTOFF {
        return Ok((p.max(0.0), None));
    }
    let out = out.scale(Complex64::new(1.0 / p, 0.0));
    Ok((p, Some(DensityMatrix::from_parts(rho.dims().to_vec(), out))))
}

/// Precomputed settings for repeated `I_2` evaluation.
struct I2Eval {
    settings: Vec<BasisAssignment>,
}

impl I2Eval {
    fn new(family: &MubFamily) -> Result<Self> {
        let settings = family.bases().iter().map(|b| BasisAssignment::uniform(b, 2)).collect::<Result<_>>()?;
        Ok(Self { settings })
    }

    fn eval(&self, rho: &DensityMatrix) -> Result<f64> {
        self.settings.iter().map(|s| mutual_predictability(rho, s)).sum()
    }

    fn omega(&self, rho: &DensityMatrix, base: f64, p: &PovmParams, party: Party) -> Result<f64> {
        let (e1, e2) = build_povm(p);
        let mut omega = base;
        for e in [&e1, &e2] {
            if let (pk, Some(branch)) = apply_branch_on(rho, e, party)? {
                omega -= pk * self.eval(&branch)?;
            }
        }
        Ok(omega)
    }
}

fn check_qubit_pair(rho: &DensityMatrix, family: &MubFamily) -> Result<()> {
    if rho.dims() != [2, 2] {
        return invalid(format!("LOCC probe needs a two-qubit state, got dims {:?}", rho.dims()));
    }
    if family.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: family.dim() });
    }
    Ok(())
}

/// `Ω` for a POVM on party A measured against `family` (typically the
/// computational/Hadamard pair).
pub fn omega(rho: &DensityMatrix, p: &PovmParams, family: &MubFamily) -> Result<f64> {
    omega_on(rho, p, family, Party::A)
}

pub fn omega_on(rho: &DensityMatrix, p: &PovmParams, family: &MubFamily, party: Party) -> Result<f64> {
    check_qubit_pair(rho, family)?;
    let eval = I2Eval::new(family)?;
    let base = eval.eval(rho)?;
    eval.omega(rho, base, p, party)
}

/// `steps` evenly spaced values from `lo` to `hi` inclusive. A single step
/// pins the axis at `lo`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AxisSpec {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl AxisSpec {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return invalid("grid axis has zero steps");
        }
        if !lo.is_finite() || !hi.is_finite() {
            return invalid("grid bounds must be finite");
        }
        Ok(Self { lo, hi, steps })
    }

    pub fn fixed(value: f64) -> Self {
        Self { lo: value, hi: value, steps: 1 }
    }

    /// `[−π, π]` with `steps` points.
    pub fn full_circle(steps: usize) -> Result<Self> {
        Self::new(-PI, PI, steps)
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.steps == 1 {
            return self.lo;
        }
        // hit the upper end exactly
        if i + 1 == self.steps {
            return self.hi;
        }
        self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.value(i)).collect()
    }
}

/// Grid over `(χ, ζ, ξ)`; `χ` is the slowest axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepGrid {
    pub chi: AxisSpec,
    pub zeta: AxisSpec,
    pub xi: AxisSpec,
}

impl SweepGrid {
    /// `steps` points per axis over `[−π, π]³`.
    pub fn cube(steps: usize) -> Result<Self> {
        let axis = AxisSpec::full_circle(steps)?;
        Ok(Self { chi: axis, zeta: axis, xi: axis })
    }

    pub fn len(&self) -> usize {
        self.chi.steps * self.zeta.steps * self.xi.steps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn point(&self, index: usize, theta_cap: f64) -> PovmParams {
        let xi = index % self.xi.steps;
        let zeta = (index / self.xi.steps) % self.zeta.steps;
        let chi = index / (self.xi.steps * self.zeta.steps);
        PovmParams { chi: self.chi.value(chi), zeta: self.zeta.value(zeta), xi: self.xi.value(xi), theta_cap }
    }
}

/// `Ω` over a full grid, in grid order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PovmSweepResult {
    pub grid: SweepGrid,
    pub theta_cap: f64,
    pub party: Party,
    pub omega: Vec<f64>,
    pub min_omega: f64,
    pub argmin: PovmParams,
}

impl PovmSweepResult {
    pub fn params(&self, index: usize) -> PovmParams {
        self.grid.point(index, self.theta_cap)
    }

    /// Rows `(χ, ζ, min_ξ Ω)` in `(χ, ζ)` grid order.
    pub fn density_map(&self) -> Vec<(f64, f64, f64)> {
        let nx = self.grid.xi.steps;
        self.omega
            .chunks(nx)
            .enumerate()
            .map(|(cell, chunk)| {
                let p = self.params(cell * nx);
                (p.chi, p.zeta, chunk.iter().copied().fold(f64::INFINITY, f64::min))
            })
            .collect()
    }
}

/// Sweep with the qubit computational/Hadamard pair, POVM on party A.
pub fn sweep(rho: &DensityMatrix, grid: &SweepGrid, theta_cap: f64) -> Result<PovmSweepResult> {
    sweep_with(rho, grid, theta_cap, &fourier_pair(2)?, Party::A)
}

/// Evaluates `Ω` at every grid point. Evaluation may run in parallel; the
/// result is in grid order and the argmin is the first minimum in that
/// order, i.e. the lexicographically smallest `(χ, ζ, ξ)` among ties.
pub fn sweep_with(
    rho: &DensityMatrix,
    grid: &SweepGrid,
    theta_cap: f64,
    family: &MubFamily,
    party: Party,
) -> Result<PovmSweepResult> {
    check_qubit_pair(rho, family)?;
    if grid.is_empty() {
        return invalid("empty sweep grid");
    }
    for axis in [grid.chi, grid.zeta, grid.xi] {
        PovmParams::new(axis.lo, axis.hi, 0.0, theta_cap)?;
    }
    let eval = I2Eval::new(family)?;
    let base = eval.eval(rho)?;
    let omega: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| eval.omega(rho, base, &grid.point(i, theta_cap), party))
        .collect::<Result<_>>()?;
    let (arg, min_omega) =
        omega
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |(bi, bv), (i, v)| if v < bv { (i, v) } else { (bi, bv) });
    Ok(PovmSweepResult { grid: *grid, theta_cap, party, argmin: grid.point(arg, theta_cap), omega, min_omega })
}

/// `max_w |I_2(wρ₁ + (1−w)ρ₂) − w I_2(ρ₁) − (1−w) I_2(ρ₂)|`.
pub fn convexity_probe(rho1: &DensityMatrix, rho2: &DensityMatrix, weights: &[f64], family: &MubFamily) -> Result<f64> {
    if rho1.dims() != rho2.dims() {
        return invalid("convexity probe needs states of equal dims");
    }
    if weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
        return invalid("mixing weights must lie in [0, 1]");
    }
    let eval = I2Eval::new(family)?;
    let (a, b) = (eval.eval(rho1)?, eval.eval(rho2)?);
    let mut worst = 0.0f64;
    for &w in weights {
        let mix = DensityMatrix::mixture(&[(w, rho1), (1.0 - w, rho2)])?;
        worst = worst.max((eval.eval(&mix)? - w * a - (1.0 - w) * b).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell, psi_lambda, random_pure_with, seeded_rng, zero_product};
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn pair() -> MubFamily {
        fourier_pair(2).unwrap()
    }

    fn random_params<R: Rng>(rng: &mut R) -> PovmParams {
        let mut a = || rng.random_range(-PI..=PI);
        PovmParams { chi: a(), zeta: a(), xi: a(), theta_cap: a() }
    }

    #[test]
    fn povm_examples() {
        let (e1, e2) = build_povm(&PovmParams::identity());
        assert!(e1.max_abs_diff(&Operator::identity(2)) < 1e-15);
        assert!(e2.max_abs_diff(&Operator::zeros(2, 2)) < 1e-15);
        let (e1, e2) = build_povm(&PovmParams::new(FRAC_PI_4, FRAC_PI_4, 0.0, 0.0).unwrap());
        let half = Operator::identity(2).scale(Complex64::new(FRAC_1_SQRT_2, 0.0));
        assert!(e1.max_abs_diff(&half) < 1e-15);
        assert!(e2.max_abs_diff(&half) < 1e-15);
        assert!(PovmParams::new(4.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn povm_completeness_on_random_draws() {
        let mut rng = seeded_rng(1);
        for _ in 0..10_000 {
            let (e1, e2) = build_povm(&random_params(&mut rng));
            assert!(completeness_residual(&e1, &e2) <= 1e-12);
        }
    }

    #[test]
    fn branch_examples() {
        let b = bell().density();
        let (p, out) = apply_branch(&b, &Operator::identity(2)).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-15);
        assert!(out.unwrap().matrix().max_abs_diff(b.matrix()) < 1e-15);
        let proj0 = Operator::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let (p, out) = apply_branch(&b, &proj0).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-15);
        assert!(out.unwrap().matrix().max_abs_diff(zero_product(2).density().matrix()) < 1e-15);
        let (p, out) = apply_branch(&b, &Operator::zeros(2, 2)).unwrap();
        assert_eq!(p, 0.0);
        assert!(out.is_none());
        assert!(apply_branch(&b, &Operator::identity(3)).is_err());
    }

    #[test]
    fn branch_probabilities_sum_to_one() {
        let mut rng = seeded_rng(2);
        for _ in 0..500 {
            let rho = random_pure_with(&[2, 2], &mut rng).unwrap().density();
            let (e1, e2) = build_povm(&random_params(&mut rng));
            for party in [Party::A, Party::B] {
                let p1 = apply_branch_on(&rho, &e1, party).unwrap().0;
                let p2 = apply_branch_on(&rho, &e2, party).unwrap().0;
                assert_abs_diff_eq!(p1 + p2, 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn omega_examples() {
        let mut rng = seeded_rng(3);
        for _ in 0..100 {
            let rho = random_pure_with(&[2, 2], &mut rng).unwrap().density();
            assert_abs_diff_eq!(omega(&rho, &PovmParams::identity(), &pair()).unwrap(), 0.0, epsilon = 1e-11);
        }
        let p = random_params(&mut rng);
        assert!(omega(&zero_product(2).density(), &p, &pair()).unwrap().is_finite());
        assert!(omega(&zero_product(3).density(), &p, &pair()).is_err());
    }

    #[test]
    fn small_sweeps_stay_non_negative() {
        let grid = SweepGrid::cube(9).unwrap();
        for rho in [bell().density(), psi_lambda(0.3).unwrap().density()] {
            let r = sweep(&rho, &grid, 0.0).unwrap();
            assert_eq!(r.omega.len(), 729);
            assert!(r.min_omega >= -1e-9, "min {}", r.min_omega);
            assert_eq!(r.min_omega, r.omega.iter().copied().fold(f64::INFINITY, f64::min));
            let mirrored = sweep_with(&rho, &grid, 0.0, &pair(), Party::B).unwrap();
            assert!(mirrored.min_omega >= -1e-9);
        }
    }

    #[test]
    fn single_point_sweep_at_identity() {
        let id = PovmParams::identity();
        let grid = SweepGrid { chi: AxisSpec::fixed(id.chi), zeta: AxisSpec::fixed(id.zeta), xi: AxisSpec::fixed(0.0) };
        let r = sweep(&bell().density(), &grid, 0.0).unwrap();
        assert_abs_diff_eq!(r.min_omega, 0.0, epsilon = 1e-12);
        assert_eq!(r.argmin, id);
        assert_eq!(r.density_map().len(), 1);
        assert!(AxisSpec::new(0.0, 1.0, 0).is_err());
        let bad = SweepGrid { chi: AxisSpec::fixed(5.0), ..grid };
        assert!(sweep(&bell().density(), &bad, 0.0).is_err());
    }

    #[test]
    fn sweep_argmin_and_density_map_follow_grid_order() {
        let grid = SweepGrid::cube(5).unwrap();
        let r = sweep(&psi_lambda(0.2).unwrap().density(), &grid, 0.0).unwrap();
        let first = r.omega.iter().position(|&v| v == r.min_omega).unwrap();
        assert_eq!(r.argmin, r.params(first));
        let map = r.density_map();
        assert_eq!(map.len(), 25);
        assert_eq!((map[0].0, map[0].1), (-PI, -PI));
        assert_eq!((map[1].0, map[1].1), (-PI, -PI / 2.0));
        assert_eq!(map[0].2, r.omega[..5].iter().copied().fold(f64::INFINITY, f64::min));
    }

    #[test]
    fn sweep_is_deterministic_across_thread_counts() {
        let grid = SweepGrid::cube(7).unwrap();
        let rho = psi_lambda(0.3).unwrap().density();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let a = one.install(|| sweep(&rho, &grid, 0.3).unwrap());
        let b = sweep(&rho, &grid, 0.3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn convexity_examples() {
        let weights = [0.0, 0.25, 0.5, 0.75, 1.0];
        let (b, z) = (bell().density(), zero_product(2).density());
        assert!(convexity_probe(&b, &z, &weights, &pair()).unwrap() <= 1e-10);
        assert_eq!(convexity_probe(&b, &b, &weights, &pair()).unwrap(), 0.0);
        assert!(convexity_probe(&b, &z, &[1.5], &pair()).is_err());
    }
}
