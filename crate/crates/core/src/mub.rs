//! Orthonormal bases and families of mutually unbiased bases.
//!
//! Two bases `{|b_i⟩}` and `{|c_j⟩}` of `C^d` are mutually unbiased when
//! `|⟨b_i|c_j⟩|² = 1/d` for every pair of vectors.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::qla::Operator;
use crate::CONSTRUCTION_TOL;

/// An orthonormal basis of `C^d`; `vectors[k]` is the `k`-th basis vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    d: usize,
    vectors: Vec<Vec<Complex64>>,
}

impl Basis {
    /// Validates orthonormality at [`CONSTRUCTION_TOL`].
    pub fn new(vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        let d = vectors.len();
        if d < 2 {
            return invalid("a basis needs at least two vectors");
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: v.len() });
        }
        let basis = Self { d, vectors };
        let err = basis.orthonormality_error();
        if err > CONSTRUCTION_TOL {
            return invalid(format!("basis is not orthonormal (max error {err:e})"));
        }
        Ok(basis)
    }

    pub fn computational(d: usize) -> Self {
        let vectors =
            (0..d).map(|k| (0..d).map(|j| Complex64::new(if j == k { 1.0 } else { 0.0 }, 0.0)).collect()).collect();
        Self { d, vectors }
    }

    /// Discrete Fourier basis, `|f_k⟩ = d^{-1/2} Σ_j ω^{jk} |j⟩`.
    pub fn fourier(d: usize) -> Self {
        let amp = 1.0 / (d as f64).sqrt();
        let vectors = (0..d).map(|k| (0..d).map(|j| root_of_unity(d, j * k) * amp).collect()).collect();
        Self { d, vectors }
    }

    /// `{|+⟩, |−⟩}`, the qubit Fourier basis.
    pub fn hadamard() -> Self {
        Self::fourier(2)
    }

    /// `{(|0⟩ + i|1⟩)/√2, (|0⟩ − i|1⟩)/√2}`.
    pub fn circular() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            d: 2,
            vectors: vec![
                vec![Complex64::new(h, 0.0), Complex64::new(0.0, h)],
                vec![Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
            ],
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> &[Complex64] {
        &self.vectors[k]
    }

    /// Matrix whose `k`-th column is the `k`-th basis vector.
    pub fn to_operator(&self) -> Operator {
        let d = self.d;
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for (k, v) in self.vectors.iter().enumerate() {
            for (j, z) in v.iter().enumerate() {
                data[j * d + k] = *z;
            }
        }
        Operator::new(d, d, data).expect("basis entries are finite")
    }

    /// `max_ij |⟨v_i|v_j⟩ − δ_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let delta = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((inner(a, b) - delta).norm());
            }
        }
        worst
    }

    /// Multiplies each vector by a phase, `phases[k]` in radians.
    pub fn with_phases(&self, phases: &[f64]) -> Result<Basis> {
        if phases.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: phases.len() });
        }
        let vectors = self
            .vectors
            .iter()
            .zip(phases)
            .map(|(v, &p)| v.iter().map(|z| z * Complex64::from_polar(1.0, p)).collect())
            .collect();
        Ok(Basis { d: self.d, vectors })
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn root_of_unity(d: usize, power: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * ((power % d) as f64) / d as f64)
}

/// True iff `||⟨b_i|c_j⟩|² − 1/d| ≤ tol` for all `i, j`.
pub fn is_unbiased(b1: &Basis, b2: &Basis, tol: f64) -> Result<bool> {
    if b1.d != b2.d {
        return Err(Error::DimensionMismatch { expected: b1.d, found: b2.d });
    }
    let target = 1.0 / b1.d as f64;
    Ok(b1.vectors.iter().all(|b| b2.vectors.iter().all(|c| (inner(b, c).norm_sqr() - target).abs() <= tol)))
}

/// A collection of pairwise mutually unbiased bases of `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct MubFamily {
    d: usize,
    bases: Vec<Basis>,
}

impl MubFamily {
    /// Validates pairwise unbiasedness at [`CONSTRUCTION_TOL`].
    pub fn new(bases: Vec<Basis>) -> Result<Self> {
        let d = match bases.first() {
            Some(b) => b.d,
            None => return invalid("a MUB family needs at least one basis"),
        };
        for (i, a) in bases.iter().enumerate() {
            for b in &bases[i + 1..] {
                if !is_unbiased(a, b, CONSTRUCTION_TOL)? {
                    return invalid("bases in the family are not mutually unbiased");
                }
            }
        }
        Ok(Self { d, bases })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    /// True when the family has the maximal `d + 1` members.
    pub fn is_complete(&self) -> bool {
        self.bases.len() == self.d + 1
    }
}

/// Eigenbases of `σ_z`, `σ_x`, `σ_y`, in that order.
pub fn qubit_mub_triple() -> MubFamily {
    MubFamily::new(vec![Basis::computational(2), Basis::hadamard(), Basis::circular()])
        .expect("Pauli eigenbases are mutually unbiased")
}

/// Complete family of `d + 1` MUBs for an odd prime `d`: the computational
/// basis plus, for each `b` in `0..d`, the vectors with components
/// `d^{-1/2} ω^{b j² + k j}`.
pub fn prime_mub_family(d: usize) -> Result<MubFamily> {
    if d.is_multiple_of(2) || !is_prime(d) {
        return invalid(format!("{d} is not an odd prime"));
    }
    let amp = 1.0 / (d as f64).sqrt();
    let mut bases = vec![Basis::computational(d)];
    for b in 0..d {
        let vectors = (0..d).map(|k| (0..d).map(|j| root_of_unity(d, b * j * j + k * j) * amp).collect()).collect();
        bases.push(Basis::new(vectors)?);
    }
    MubFamily::new(bases)
}

/// Computational basis and its Fourier transform; unbiased for every `d ≥ 2`.
pub fn fourier_pair(d: usize) -> Result<MubFamily> {
    if d < 2 {
        return invalid("Fourier pair needs d ≥ 2");
    }
    MubFamily::new(vec![Basis::computational(d), Basis::fourier(d)])
}

/// The largest family this crate knows how to build for `d`: the Pauli
/// triple for `d = 2`, the complete prime family for odd primes and the
/// Fourier pair otherwise.
pub fn best_family(d: usize) -> Result<MubFamily> {
    match d {
        2 => Ok(qubit_mub_triple()),
        d if d % 2 == 1 && is_prime(d) => prime_mub_family(d),
        d => fourier_pair(d),
    }
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}
