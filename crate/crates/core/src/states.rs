//! State families used throughout the crate, seeded random states for
//! property campaigns, and the JSON state-file schema.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qla::{DensityMatrix, Operator, StateVector};

fn real_state(dims: Vec<usize>, amps: &[(usize, f64)]) -> StateVector {
    let total: usize = dims.iter().product();
    let mut v = vec![Complex64::new(0.0, 0.0); total];
    for &(i, a) in amps {
        v[i] += Complex64::new(a, 0.0);
    }
    StateVector::new(dims, v).expect("family amplitudes are finite and non-zero")
}

/// `√λ |00⟩ + √(1−λ) |11⟩`.
pub fn psi_lambda(lambda: f64) -> Result<StateVector> {
    if !(0.0..=1.0).contains(&lambda) {
        return invalid(format!("λ = {lambda} outside [0, 1]"));
    }
    Ok(real_state(vec![2, 2], &[(0b00, lambda.sqrt()), (0b11, (1.0 - lambda).sqrt())]))
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn bell() -> StateVector {
    psi_lambda(0.5).expect("0.5 is in range")
}

/// `cos θ |000⟩ + sin θ |111⟩`.
pub fn ghz3(theta: f64) -> StateVector {
    real_state(vec![2; 3], &[(0b000, theta.cos()), (0b111, theta.sin())])
}

/// `cos θ |001⟩ + cos α sin θ |010⟩ + sin α sin θ |100⟩`.
pub fn w3(theta: f64, alpha: f64) -> StateVector {
    let (st, ct) = theta.sin_cos();
    let (sa, ca) = alpha.sin_cos();
    real_state(vec![2; 3], &[(0b001, ct), (0b010, ca * st), (0b100, sa * st)])
}

/// Five-term canonical form of a three-qubit pure state:
/// `λ0|000⟩ + e^{iφ}λ1|001⟩ + λ2|010⟩ + λ3|100⟩ + λ4|111⟩`, renormalized.
///
/// Passing `λ4 = λ0` gives the variant with a shared weight on `|000⟩` and
/// `|111⟩`.
pub fn acin_canonical(weights: [f64; 5], phi: f64) -> Result<StateVector> {
    if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
        return invalid("canonical weights must be finite and non-negative");
    }
    if !(0.0..=std::f64::consts::PI).contains(&phi) {
        return invalid(format!("phase φ = {phi} outside [0, π]"));
    }
    if weights.iter().all(|w| *w == 0.0) {
        return invalid("canonical weights are all zero");
    }
    let mut v = vec![Complex64::new(0.0, 0.0); 8];
    v[0b000] = weights[0].into();
    v[0b001] = Complex64::from_polar(weights[1], phi);
    v[0b010] = weights[2].into();
    v[0b100] = weights[3].into();
    v[0b111] = weights[4].into();
    StateVector::new(vec![2; 3], v)
}

/// Computational indices carrying the canonical-form support.
pub const ACIN_SUPPORT: [usize; 5] = [0b000, 0b001, 0b010, 0b100, 0b111];

/// `cos θ |0000⟩ + sin θ |1111⟩`.
pub fn ghz4(theta: f64) -> StateVector {
    real_state(vec![2; 4], &[(0b0000, theta.cos()), (0b1111, theta.sin())])
}

/// Four-qubit generalized W family
/// `cos θ |0001⟩ + sin μ sin θ |0010⟩ + cos μ sin ν sin θ |0100⟩ + sin μ sin ν sin θ |1000⟩`.
///
/// The coefficients are not unit-norm in general; the state is renormalized
/// and the norm of the printed coefficients is returned alongside it.
pub fn wg4(theta: f64, mu: f64, nu: f64) -> (StateVector, f64) {
    let (st, ct) = theta.sin_cos();
    let (sm, cm) = mu.sin_cos();
    let sn = nu.sin();
    let amps = [(0b0001, ct), (0b0010, sm * st), (0b0100, cm * sn * st), (0b1000, sm * sn * st)];
    let mut v = vec![Complex64::new(0.0, 0.0); 16];
    for (i, a) in amps {
        v[i] = a.into();
    }
    StateVector::with_norm(vec![2; 4], v).expect("cos θ and sin θ never vanish together")
}

/// `|0…0⟩` on `n` qubits.
pub fn zero_product(n: usize) -> StateVector {
    StateVector::basis_state(vec![2; n], 0).expect("n ≥ 1 qubits")
}

/// A split of `n` parties into `block` and its (nonempty) complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    parties: usize,
    block: Vec<usize>,
}

impl Bipartition {
    pub fn new(parties: usize, block: &[usize]) -> Result<Self> {
        let mut block = block.to_vec();
        block.sort_unstable();
        block.dedup();
        if let Some(&p) = block.iter().find(|&&p| p >= parties) {
            return Err(Error::PartyOutOfRange { index: p, parties });
        }
        if block.is_empty() || block.len() == parties {
            return invalid("both sides of a bipartition must be nonempty");
        }
        Ok(Self { parties, block })
    }

    /// Every inequivalent cut of `n` parties: 3 for `n = 3`, 7 for `n = 4`.
    pub fn all(parties: usize) -> Vec<Bipartition> {
        let mut cuts = Vec::new();
        for mask in 1u32..(1 << parties) - 1 {
            let block: Vec<usize> = (0..parties).filter(|p| mask & (1 << p) != 0).collect();
            let k = block.len();
            // one representative per unordered pair {S, S^c}
            if 2 * k < parties || (2 * k == parties && block[0] == 0) {
                cuts.push(Bipartition { parties, block });
            }
        }
        cuts.sort_by(|a, b| a.block.len().cmp(&b.block.len()).then(a.block.cmp(&b.block)));
        cuts
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn block(&self) -> &[usize] {
        &self.block
    }

    pub fn complement(&self) -> Vec<usize> {
        (0..self.parties).filter(|p| !self.block.contains(p)).collect()
    }

    /// Places `left ⊗ right` (on `block` and the complement respectively)
    /// into natural party order.
    pub fn join(&self, left: &StateVector, right: &StateVector) -> Result<StateVector> {
        let rest = self.complement();
        if left.parties() != self.block.len() || right.parties() != rest.len() {
            return invalid("factor party counts do not match the bipartition");
        }
        let concat: Vec<usize> = self.block.iter().chain(&rest).copied().collect();
        let order: Vec<usize> =
            (0..self.parties).map(|p| concat.iter().position(|&q| q == p).expect("covers all parties")).collect();
        left.tensor(right).permute_parties(&order)
    }
}

impl std::fmt::Display for Bipartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let side = |ps: &[usize]| ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{{{}}}|{{{}}}", side(&self.block), side(&self.complement()))
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state drawn from `rng`.
pub fn random_pure_with<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<StateVector> {
    let total: usize = dims.iter().product();
    let amps = (0..total).map(|_| complex_normal(rng)).collect();
    StateVector::new(dims.to_vec(), amps)
}

/// Haar-random pure state, deterministic in `seed`.
pub fn random_pure(dims: &[usize], seed: u64) -> Result<StateVector> {
    random_pure_with(dims, &mut seeded_rng(seed))
}

/// Product of independent Haar-random single-party states.
pub fn random_product_with<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<StateVector> {
    let factors = dims.iter().map(|&d| random_pure_with(&[d], rng)).collect::<Result<Vec<_>>>()?;
    StateVector::product(&factors)
}

/// Haar-random unitary (Gram–Schmidt on a complex Ginibre matrix).
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Operator {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<Complex64> = (0..d).map(|_| complex_normal(rng)).collect();
        for c in &cols {
            let proj: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= proj * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    let mut data = vec![Complex64::new(0.0, 0.0); d * d];
    for (k, c) in cols.iter().enumerate() {
        for (j, z) in c.iter().enumerate() {
            data[j * d + k] = *z;
        }
    }
    Operator::new(d, d, data).expect("finite entries")
}

/// Flat Dirichlet weights of length `k`.
pub fn dirichlet_weights<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Pure product `|φ⟩ ⊗ |χ⟩` across `cut`, with Haar-random qubit factors.
pub fn random_cut_product_with<R: Rng + ?Sized>(cut: &Bipartition, rng: &mut R) -> Result<StateVector> {
    let left = random_pure_with(&vec![2; cut.block().len()], rng)?;
    let right = random_pure_with(&vec![2; cut.parties() - cut.block().len()], rng)?;
    cut.join(&left, &right)
}

/// Mixture of `terms` random products across `cut` with flat Dirichlet
/// weights.
pub fn random_biseparable_with<R: Rng + ?Sized>(cut: &Bipartition, terms: usize, rng: &mut R) -> Result<DensityMatrix> {
    if terms == 0 {
        return invalid("a mixture needs at least one term");
    }
    let states =
        (0..terms).map(|_| random_cut_product_with(cut, rng).map(|s| s.density())).collect::<Result<Vec<_>>>()?;
    let weights = dirichlet_weights(terms, rng);
    let pairs: Vec<(f64, &DensityMatrix)> = weights.into_iter().zip(&states).collect();
    DensityMatrix::mixture(&pairs)
}

/// Random biseparable `n`-qubit state across `cut`: 2 to 5 product terms,
/// deterministic in `seed`.
pub fn random_biseparable(n: usize, cut: &Bipartition, seed: u64) -> Result<DensityMatrix> {
    if cut.parties() != n {
        return invalid(format!("cut is over {} parties, expected {n}", cut.parties()));
    }
    let mut rng = seeded_rng(seed);
    let terms = rng.random_range(2..=5);
    random_biseparable_with(cut, terms, &mut rng)
}

/// Mixture of `terms` random bipartite products on `C^d ⊗ C^d`.
pub fn random_separable_bipartite<R: Rng + ?Sized>(d: usize, terms: usize, rng: &mut R) -> Result<DensityMatrix> {
    if terms == 0 {
        return invalid("a mixture needs at least one term");
    }
    let states =
        (0..terms).map(|_| random_product_with(&[d, d], rng).map(|s| s.density())).collect::<Result<Vec<_>>>()?;
    let weights = dirichlet_weights(terms, rng);
    let pairs: Vec<(f64, &DensityMatrix)> = weights.into_iter().zip(&states).collect();
    DensityMatrix::mixture(&pairs)
}

/// On-disk state: `{"dims":[2,2], "amplitudes":[[re,im],...]}`, row-major.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state(psi: &StateVector) -> Self {
        Self { dims: psi.dims().to_vec(), amplitudes: psi.amplitudes().iter().map(|z| [z.re, z.im]).collect() }
    }

    /// Converts to a normalized state, returning the norm found in the file.
    pub fn into_state(self) -> Result<(StateVector, f64)> {
        let amps = self.amplitudes.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
        StateVector::with_norm(self.dims, amps)
    }

    pub fn parse(json: &str) -> Result<(StateVector, f64)> {
        serde_json::from_str::<StateFile>(json)?.into_state()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}
