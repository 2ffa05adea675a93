//! Joint outcome probabilities in product measurement settings, mutual
//! predictability, and the MUB-based entanglement criteria.
//!
//! A criterion value is the sum of two correlation terms, each measured in a
//! product setting. For two parties the term is the mutual predictability
//! `Σ_i P(i, i)`. For three and four parties the term is the probability mass
//! on a local-bases product-state (LBPS) pattern set, maximized over the
//! candidate sets. Patterns are index masks applied in whatever product basis
//! the setting specifies, so in the Hadamard setting outcome `0` stands for
//! `|+⟩` and `1` for `|−⟩`.
//!
//! | criterion | first setting | second setting | bound |
//! |-----------|---------------|----------------|-------|
//! | `I_m`     | basis 1 on both | bases 2..m on both | `1 + (m − 1)/d` |
//! | `I_3`     | all computational | all Hadamard | `13/8` |
//! | `I_4`     | all computational | all Hadamard | `7/4` |

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::mub::{qubit_mub_triple, Basis, MubFamily};
use crate::qla::{digits_of, DensityMatrix, Operator};
use crate::VIOLATION_SLACK;

/// Bound on `I_3` for biseparable three-qubit states.
pub const TRIPARTITE_BOUND: f64 = 13.0 / 8.0;
/// Bound on `I_4` for biseparable four-qubit states.
pub const QUADRIPARTITE_BOUND: f64 = 7.0 / 4.0;

/// One local basis per party.
#[derive(Clone, Debug)]
pub struct BasisAssignment {
    bases: Vec<Basis>,
    // columns are the product vectors, indexed row-major by outcome string
    product: Operator,
}

impl BasisAssignment {
    pub fn new(bases: Vec<Basis>) -> Result<Self> {
        let (first, rest) = bases.split_first().ok_or_else(|| Error::InvalidInput("empty setting".into()))?;
        let product = rest.iter().fold(first.to_operator(), |acc, b| acc.kron(&b.to_operator()));
        Ok(Self { bases, product })
    }

    pub fn uniform(basis: &Basis, parties: usize) -> Result<Self> {
        Self::new(vec![basis.clone(); parties])
    }

    pub fn computational(parties: usize) -> Self {
        Self::uniform(&Basis::computational(2), parties).expect("nonempty")
    }

    pub fn hadamard(parties: usize) -> Self {
        Self::uniform(&Basis::hadamard(), parties).expect("nonempty")
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    pub fn parties(&self) -> usize {
        self.bases.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(Basis::dim).collect()
    }

    fn check(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.parties() != self.parties() {
            return Err(Error::DimensionMismatch { expected: self.parties(), found: rho.parties() });
        }
        if rho.dims() != self.dims().as_slice() {
            return invalid(format!("setting dims {:?} do not match state dims {:?}", self.dims(), rho.dims()));
        }
        Ok(())
    }
}

/// An outcome string, one index per party.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IndexPattern(pub Vec<usize>);

impl IndexPattern {
    /// Parses a bit string such as `"0110"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        bits.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => invalid(format!("invalid outcome digit {other:?}")),
            })
            .collect::<Result<Vec<_>>>()
            .map(IndexPattern)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Row-major flat index in the product basis over `dims`.
    pub fn flat_index(&self, dims: &[usize]) -> Result<usize> {
        if self.0.len() != dims.len() {
            return Err(Error::DimensionMismatch { expected: dims.len(), found: self.0.len() });
        }
        let mut index = 0;
        for (&s, &d) in self.0.iter().zip(dims) {
            if s >= d {
                return invalid(format!("outcome {s} out of range for local dimension {d}"));
            }
            index = index * d + s;
        }
        Ok(index)
    }
}

impl std::fmt::Display for IndexPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{s}"))
    }
}

/// A named set of outcome strings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LbpsPatternSet {
    name: String,
    patterns: Vec<IndexPattern>,
}

impl LbpsPatternSet {
    /// Patterns must be distinct and of equal arity.
    pub fn new(name: impl Into<String>, patterns: Vec<IndexPattern>) -> Result<Self> {
        let arity = patterns.first().map(IndexPattern::len).unwrap_or(0);
        if arity == 0 {
            return invalid("pattern set must contain nonempty patterns");
        }
        if patterns.iter().any(|p| p.len() != arity) {
            return invalid("patterns in a set must share one arity");
        }
        let unique: HashSet<&IndexPattern> = patterns.iter().collect();
        if unique.len() != patterns.len() {
            return invalid("patterns in a set must be distinct");
        }
        Ok(Self { name: name.into(), patterns })
    }

    pub fn from_bits(name: impl Into<String>, bits: &[&str]) -> Result<Self> {
        let patterns = bits.iter().map(|b| IndexPattern::from_bits(b)).collect::<Result<Vec<_>>>()?;
        Self::new(name, patterns)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn patterns(&self) -> &[IndexPattern] {
        &self.patterns
    }

    pub fn arity(&self) -> usize {
        self.patterns[0].len()
    }

    pub fn contains(&self, p: &IndexPattern) -> bool {
        self.patterns.contains(p)
    }
}

/// The six five-pattern three-qubit sets, in their customary order.
pub fn lbps_tripartite() -> Vec<LbpsPatternSet> {
    const SETS: [[&str; 5]; 6] = [
        ["000", "001", "100", "110", "111"],
        ["000", "001", "011", "100", "111"],
        ["000", "010", "100", "101", "111"],
        ["000", "100", "101", "110", "111"],
        ["000", "010", "011", "110", "111"],
        ["000", "001", "110", "101", "111"],
    ];
    SETS.iter()
        .enumerate()
        .map(|(i, bits)| LbpsPatternSet::from_bits(format!("tri{}", i + 1), bits).expect("static sets are valid"))
        .collect()
}

/// The twelve-pattern four-qubit set.
pub fn lbps_quadripartite() -> LbpsPatternSet {
    LbpsPatternSet::from_bits(
        "quad",
        &["0000", "0100", "0101", "0110", "1000", "1001", "1010", "1011", "1100", "1101", "1110", "1111"],
    )
    .expect("static set is valid")
}

/// Probability of every outcome string in `setting`, indexed row-major.
pub fn outcome_distribution(rho: &DensityMatrix, setting: &BasisAssignment) -> Result<Vec<f64>> {
    setting.check(rho)?;
    let u = &setting.product;
    let n = u.rows();
    let m = rho.matrix();
    Ok((0..n)
        .map(|s| {
            // ⟨v_s| ρ |v_s⟩ with v_s the s-th column of U
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for j in 0..n {
                let vj = u.get(j, s);
                if vj.norm_sqr() == 0.0 {
                    continue;
                }
                let row: num_complex::Complex64 = (0..n).map(|k| m.get(j, k) * u.get(k, s)).sum();
                acc += vj.conj() * row;
            }
            acc.re
        })
        .collect())
}

/// `⟨v|ρ|v⟩` for the product vector `v` selected by `outcome`.
pub fn joint_probability(rho: &DensityMatrix, setting: &BasisAssignment, outcome: &IndexPattern) -> Result<f64> {
    setting.check(rho)?;
    let index = outcome.flat_index(&setting.dims())?;
    let u = &setting.product;
    let n = u.rows();
    let v: Vec<_> = (0..n).map(|j| u.get(j, index)).collect();
    let rv = rho.matrix().apply(&v)?;
    Ok(v.iter().zip(&rv).map(|(a, b)| a.conj() * b).sum::<num_complex::Complex64>().re)
}

fn require_bipartite_equal(rho: &DensityMatrix) -> Result<usize> {
    if rho.parties() != 2 {
        return invalid(format!("mutual predictability needs 2 parties, got {}", rho.parties()));
    }
    let d = rho.dims()[0];
    if rho.dims()[1] != d {
        return invalid("mutual predictability needs equal local dimensions");
    }
    Ok(d)
}

/// `C = Σ_i P(i, i)` with both parties measured in `setting`.
pub fn mutual_predictability(rho: &DensityMatrix, setting: &BasisAssignment) -> Result<f64> {
    let d = require_bipartite_equal(rho)?;
    let p = outcome_distribution(rho, setting)?;
    Ok((0..d).map(|i| p[i * d + i]).sum())
}

/// Which criterion a report belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Criterion {
    Bipartite { mubs: usize, dim: usize },
    Tripartite,
    Quadripartite,
    Custom,
}

/// Outcome of evaluating a criterion on a state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificationReport {
    pub criterion: Criterion,
    /// Term from the first setting.
    pub c_first: f64,
    /// Sum of the remaining terms (a single term except for `I_m`, `m > 2`).
    pub c_second: f64,
    /// Every term in setting order.
    pub terms: Vec<f64>,
    pub i_value: f64,
    pub bound: f64,
    pub violated: bool,
    pub attaining_set_first: Option<String>,
    pub attaining_set_second: Option<String>,
    /// Local basis labels of the two settings when they were searched.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settings: Option<[String; 2]>,
}

impl CertificationReport {
    fn build(criterion: Criterion, terms: Vec<f64>, bound: f64, sets: [Option<String>; 2]) -> Self {
        let c_first = terms[0];
        let c_second: f64 = terms[1..].iter().sum();
        let i_value = c_first + c_second;
        let [attaining_set_first, attaining_set_second] = sets;
        Self {
            criterion,
            c_first,
            c_second,
            terms,
            i_value,
            bound,
            violated: i_value > bound + VIOLATION_SLACK,
            attaining_set_first,
            attaining_set_second,
            settings: None,
        }
    }
}

/// `I_m = Σ_k C_k` over the bases of `family`, each measured on both parties.
/// Separable states satisfy `I_m ≤ 1 + (m − 1)/d`.
pub fn i_m_bipartite(rho: &DensityMatrix, family: &MubFamily) -> Result<CertificationReport> {
    let d = require_bipartite_equal(rho)?;
    if family.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: family.dim() });
    }
    let m = family.len();
    if m < 2 {
        return invalid("I_m needs at least two bases");
    }
    let terms = family
        .bases()
        .iter()
        .map(|b| mutual_predictability(rho, &BasisAssignment::uniform(b, 2)?))
        .collect::<Result<Vec<_>>>()?;
    let bound = 1.0 + (m - 1) as f64 / d as f64;
    Ok(CertificationReport::build(Criterion::Bipartite { mubs: m, dim: d }, terms, bound, [None, None]))
}

fn pattern_sum(p: &[f64], dims: &[usize], set: &LbpsPatternSet) -> Result<f64> {
    set.patterns().iter().map(|pat| pat.flat_index(dims).map(|i| p[i])).sum()
}

/// Probability mass on the patterns of `set` in `setting`.
pub fn c_pattern_sum(rho: &DensityMatrix, setting: &BasisAssignment, set: &LbpsPatternSet) -> Result<f64> {
    if set.arity() != rho.parties() {
        return Err(Error::DimensionMismatch { expected: rho.parties(), found: set.arity() });
    }
    let p = outcome_distribution(rho, setting)?;
    pattern_sum(&p, rho.dims(), set)
}

fn max_over_sets(p: &[f64], dims: &[usize], sets: &[LbpsPatternSet]) -> Result<(f64, String)> {
    let mut best: Option<(f64, &str)> = None;
    for set in sets {
        if set.arity() != dims.len() {
            return Err(Error::DimensionMismatch { expected: dims.len(), found: set.arity() });
        }
        let v = pattern_sum(p, dims, set)?;
        // ties (up to round-off) keep the earlier set
        if best.is_none_or(|(b, _)| v > b + 1e-12) {
            best = Some((v, set.name()));
        }
    }
    best.map(|(v, n)| (v, n.to_string())).ok_or_else(|| Error::InvalidInput("no pattern sets given".into()))
}

/// Largest [`c_pattern_sum`] over `sets` and the first set attaining it.
pub fn c_max(rho: &DensityMatrix, setting: &BasisAssignment, sets: &[LbpsPatternSet]) -> Result<(f64, String)> {
    let p = outcome_distribution(rho, setting)?;
    max_over_sets(&p, rho.dims(), sets)
}

/// Criterion value `C^max(first) + C^max(second)` over `sets`.
pub fn certify_patterns(
    rho: &DensityMatrix,
    first: &BasisAssignment,
    second: &BasisAssignment,
    sets: &[LbpsPatternSet],
    bound: f64,
    criterion: Criterion,
) -> Result<CertificationReport> {
    let (c1, s1) = c_max(rho, first, sets)?;
    let (c2, s2) = c_max(rho, second, sets)?;
    Ok(CertificationReport::build(criterion, vec![c1, c2], bound, [Some(s1), Some(s2)]))
}

fn require_qubits(rho: &DensityMatrix, n: usize) -> Result<()> {
    if rho.parties() != n || rho.dims().iter().any(|&d| d != 2) {
        return invalid(format!("expected {n} qubits, got dims {:?}", rho.dims()));
    }
    Ok(())
}

/// `I_3` with computational and Hadamard settings over the six tripartite
/// sets. Bound `13/8`.
pub fn i3(rho: &DensityMatrix) -> Result<CertificationReport> {
    require_qubits(rho, 3)?;
    certify_patterns(
        rho,
        &BasisAssignment::computational(3),
        &BasisAssignment::hadamard(3),
        &lbps_tripartite(),
        TRIPARTITE_BOUND,
        Criterion::Tripartite,
    )
}

/// `I_4` with computational and Hadamard settings on the twelve-pattern set.
/// Bound `7/4`.
pub fn i4(rho: &DensityMatrix) -> Result<CertificationReport> {
    require_qubits(rho, 4)?;
    certify_patterns(
        rho,
        &BasisAssignment::computational(4),
        &BasisAssignment::hadamard(4),
        &[lbps_quadripartite()],
        QUADRIPARTITE_BOUND,
        Criterion::Quadripartite,
    )
}

/// Like [`i3`]/[`i4`] but searching every per-party choice of two distinct
/// bases from the qubit MUB triple (`6^n` setting pairs), keeping the
/// largest value. Ties keep the earliest choice in enumeration order.
pub fn certify_with_basis_search(rho: &DensityMatrix) -> Result<CertificationReport> {
    let (sets, bound, criterion) = match rho.parties() {
        3 => (lbps_tripartite(), TRIPARTITE_BOUND, Criterion::Tripartite),
        4 => (vec![lbps_quadripartite()], QUADRIPARTITE_BOUND, Criterion::Quadripartite),
        n => return invalid(format!("basis search supports 3 or 4 qubits, got {n} parties")),
    };
    require_qubits(rho, rho.parties())?;
    let n = rho.parties();
    let triple = qubit_mub_triple();
    const LABELS: [char; 3] = ['z', 'x', 'y'];
    let pairs: Vec<(usize, usize)> =
        (0..3).flat_map(|a| (0..3).filter(move |&b| b != a).map(move |b| (a, b))).collect();

    // distributions per uniform-per-party choice are cached by basis index string
    let mut cache = std::collections::HashMap::new();
    let mut term = |choice: Vec<usize>| -> Result<(f64, String)> {
        if let Some(hit) = cache.get(&choice) {
            return Ok(Clone::clone(hit));
        }
        let setting = BasisAssignment::new(choice.iter().map(|&k| triple.bases()[k].clone()).collect())?;
        let r = c_max(rho, &setting, &sets)?;
        cache.insert(choice, r.clone());
        Ok(r)
    };

    let mut best: Option<CertificationReport> = None;
    let total = pairs.len().pow(n as u32);
    for code in 0..total {
        let digits = digits_of(code, &vec![pairs.len(); n]);
        let first: Vec<usize> = digits.iter().map(|&k| pairs[k].0).collect();
        let second: Vec<usize> = digits.iter().map(|&k| pairs[k].1).collect();
        let (c1, s1) = term(first.clone())?;
        let (c2, s2) = term(second.clone())?;
        if best.as_ref().is_none_or(|b| c1 + c2 > b.i_value + 1e-12) {
            let mut r = CertificationReport::build(criterion, vec![c1, c2], bound, [Some(s1), Some(s2)]);
            let label = |v: &[usize]| v.iter().map(|&k| LABELS[k]).collect::<String>();
            r.settings = Some([label(&first), label(&second)]);
            best = Some(r);
        }
    }
    Ok(best.expect("at least one setting pair"))
}

/// Brute-force re-derivation of a criterion value. Each product vector is
/// assembled component by component from the local bases and its probability
/// is taken as an explicit double sum over `ρ`; pattern membership is a hash
/// lookup. Shares no code with [`c_pattern_sum`].
pub fn i_value_oracle(
    rho: &DensityMatrix,
    first: &BasisAssignment,
    second: &BasisAssignment,
    sets: &[LbpsPatternSet],
) -> Result<f64> {
    if sets.is_empty() {
        return invalid("no pattern sets given");
    }
    let term = |setting: &BasisAssignment| -> Result<f64> {
        let dims: Vec<usize> = setting.bases().iter().map(|b| b.dim()).collect();
        if dims.as_slice() != rho.dims() {
            return invalid("setting does not match the state");
        }
        let total: usize = dims.iter().product();
        let n = dims.len();
        let mut probs = std::collections::HashMap::with_capacity(total);
        let mut outcome = vec![0usize; n];
        for _ in 0..total {
            // v[j] = Π_p basis_p[outcome_p][j_p]
            let mut component = vec![0usize; n];
            let mut v = Vec::with_capacity(total);
            for _ in 0..total {
                let mut z = num_complex::Complex64::new(1.0, 0.0);
                for p in 0..n {
                    z *= setting.bases()[p].vector(outcome[p])[component[p]];
                }
                v.push(z);
                increment(&mut component, &dims);
            }
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for (j, vj) in v.iter().enumerate() {
                for (k, vk) in v.iter().enumerate() {
                    acc += vj.conj() * rho.get(j, k) * vk;
                }
            }
            probs.insert(outcome.clone(), acc.re);
            increment(&mut outcome, &dims);
        }
        let mut best = f64::NEG_INFINITY;
        for set in sets {
            let members: HashSet<&Vec<usize>> = set.patterns().iter().map(|p| &p.0).collect();
            let mass: f64 = probs.iter().filter(|(k, _)| members.contains(k)).map(|(_, v)| v).sum();
            best = best.max(mass);
        }
        Ok(best)
    };
    Ok(term(first)? + term(second)?)
}

/// Odometer increment over the mixed radix `dims`, last digit fastest.
fn increment(digits: &mut [usize], dims: &[usize]) {
    for p in (0..digits.len()).rev() {
        digits[p] += 1;
        if digits[p] < dims[p] {
            return;
        }
        digits[p] = 0;
    }
}

/// Closed-form reference curves for the standard families. These are kept
/// as comparison columns; where they disagree with the direct computation
/// the direct computation wins.
pub mod closed_form {
    /// `I_2` of `√λ|00⟩ + √(1−λ)|11⟩`: `3/2 + √(λ(1−λ))`.
    pub fn i2_psi_lambda(lambda: f64) -> f64 {
        1.5 + (lambda * (1.0 - lambda)).sqrt()
    }

    /// `I_3` of the generalized GHZ state: `(13 + sin 2θ)/8`.
    pub fn i3_ghz(theta: f64) -> f64 {
        (13.0 + (2.0 * theta).sin()) / 8.0
    }

    /// Reference `I_3` curve for the generalized W state.
    pub fn i3_w(theta: f64, alpha: f64) -> f64 {
        let (sa, ca) = alpha.sin_cos();
        (13.0 - 2.0 * sa * ca * theta.sin().powi(2) + (2.0 * theta).sin() * (3.0 * sa + ca)) / 8.0
    }

    /// Reference `I_4` curve for the four-qubit GHZ state: `(25 + 7 sin θ)/16`.
    pub fn i4_ghz_reference(theta: f64) -> f64 {
        (25.0 + 7.0 * theta.sin()) / 16.0
    }

    /// `I_4` of the four-qubit GHZ state from the pattern sums:
    /// `1 + (12 + 2 sin 2θ)/16`.
    pub fn i4_ghz_direct(theta: f64) -> f64 {
        1.0 + (12.0 + 2.0 * (2.0 * theta).sin()) / 16.0
    }

    /// Triangle measure of the generalized GHZ state: `4(1 − sin⁴θ − cos⁴θ)²`.
    pub fn tau_ghz(theta: f64) -> f64 {
        4.0 * (1.0 - theta.sin().powi(4) - theta.cos().powi(4)).powi(2)
    }

    /// Global measure of the four-qubit GHZ state: `sin² 2θ`.
    pub fn q_ghz(theta: f64) -> f64 {
        (2.0 * theta).sin().powi(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mub::{fourier_pair, prime_mub_family};
    use crate::qla::StateVector;
    use crate::states::{bell, ghz3, ghz4, psi_lambda, random_pure, w3, zero_product};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn joint_probability_examples() {
        let zero = zero_product(3).density();
        let had = BasisAssignment::hadamard(3);
        let p = joint_probability(&zero, &had, &IndexPattern(vec![0, 0, 0])).unwrap();
        assert_abs_diff_eq!(p, 0.125, epsilon = 1e-15);
        let comp = BasisAssignment::computational(3);
        assert_abs_diff_eq!(joint_probability(&zero, &comp, &IndexPattern(vec![0, 0, 0])).unwrap(), 1.0);
        let zero4 = zero_product(4).density();
        for s in 0..16 {
            let pat = IndexPattern(digits_of(s, &[2; 4]));
            let p = joint_probability(&zero4, &BasisAssignment::hadamard(4), &pat).unwrap();
            assert_abs_diff_eq!(p, 1.0 / 16.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn joint_probability_shape_errors() {
        let zero = zero_product(3).density();
        assert!(joint_probability(&zero, &BasisAssignment::hadamard(2), &IndexPattern(vec![0, 0])).is_err());
        assert!(joint_probability(&zero, &BasisAssignment::hadamard(3), &IndexPattern(vec![0, 0])).is_err());
        assert!(joint_probability(&zero, &BasisAssignment::hadamard(3), &IndexPattern(vec![0, 2, 0])).is_err());
    }

    #[test]
    fn distribution_agrees_with_pointwise_probability() {
        let rho = random_pure(&[2, 3], 8).unwrap().density();
        let setting = BasisAssignment::new(vec![Basis::hadamard(), Basis::fourier(3)]).unwrap();
        let p = outcome_distribution(&rho, &setting).unwrap();
        for (s, ps) in p.iter().enumerate() {
            let q = joint_probability(&rho, &setting, &IndexPattern(digits_of(s, &[2, 3]))).unwrap();
            assert_abs_diff_eq!(*ps, q, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mutual_predictability_examples() {
        let b = bell().density();
        assert_abs_diff_eq!(
            mutual_predictability(&b, &BasisAssignment::computational(2)).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(mutual_predictability(&b, &BasisAssignment::hadamard(2)).unwrap(), 1.0, epsilon = 1e-15);
        let zz = zero_product(2).density();
        assert_abs_diff_eq!(mutual_predictability(&zz, &BasisAssignment::hadamard(2)).unwrap(), 0.5, epsilon = 1e-15);
        assert!(mutual_predictability(&zero_product(3).density(), &BasisAssignment::hadamard(3)).is_err());
    }

    #[test]
    fn i2_examples() {
        let pair = fourier_pair(2).unwrap();
        for lambda in [0.0, 0.1, 0.3, 0.5, 0.9] {
            let r = i_m_bipartite(&psi_lambda(lambda).unwrap().density(), &pair).unwrap();
            assert_abs_diff_eq!(r.i_value, closed_form::i2_psi_lambda(lambda), epsilon = 1e-12);
            assert_eq!(r.bound, 1.5);
        }
        let r = i_m_bipartite(&zero_product(2).density(), &pair).unwrap();
        assert_abs_diff_eq!(r.i_value, 1.5, epsilon = 1e-15);
        assert!(!r.violated);
        let r = i_m_bipartite(&bell().density(), &pair).unwrap();
        assert!(r.violated);
        assert!(i_m_bipartite(&bell().density(), &fourier_pair(3).unwrap()).is_err());
    }

    #[test]
    fn complete_family_bound_is_two() {
        let fam = prime_mub_family(3).unwrap();
        let rho = StateVector::basis_state(vec![3, 3], 0).unwrap().density();
        let r = i_m_bipartite(&rho, &fam).unwrap();
        assert_eq!(r.bound, 2.0);
        assert_eq!(r.terms.len(), 4);
        assert_abs_diff_eq!(r.i_value, r.c_first + r.c_second, epsilon = 1e-15);
        assert_abs_diff_eq!(r.i_value, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn tripartite_sets() {
        let sets = lbps_tripartite();
        assert_eq!(sets.len(), 6);
        let p000 = IndexPattern::from_bits("000").unwrap();
        let p111 = IndexPattern::from_bits("111").unwrap();
        for s in &sets {
            assert_eq!(s.patterns().len(), 5);
            assert!(s.contains(&p000) && s.contains(&p111));
        }
        assert!(sets[4].contains(&IndexPattern::from_bits("011").unwrap()));
    }

    #[test]
    fn quadripartite_set() {
        let q = lbps_quadripartite();
        assert_eq!(q.patterns().len(), 12);
        assert!(q.contains(&IndexPattern::from_bits("0000").unwrap()));
        assert!(q.contains(&IndexPattern::from_bits("1111").unwrap()));
        assert!(!q.contains(&IndexPattern::from_bits("0001").unwrap()));
    }

    #[test]
    fn pattern_set_validation() {
        assert!(LbpsPatternSet::from_bits("dup", &["00", "00"]).is_err());
        assert!(LbpsPatternSet::from_bits("ragged", &["00", "000"]).is_err());
        assert!(LbpsPatternSet::from_bits("empty", &[]).is_err());
        assert!(IndexPattern::from_bits("012").is_err());
    }

    #[test]
    fn pattern_sum_examples() {
        let had3 = BasisAssignment::hadamard(3);
        let rho = zero_product(3).density();
        for set in lbps_tripartite() {
            assert_abs_diff_eq!(c_pattern_sum(&rho, &had3, &set).unwrap(), 0.625, epsilon = 1e-14);
        }
        let t = 0.37;
        let g = ghz3(t).density();
        let sets = lbps_tripartite();
        assert_abs_diff_eq!(
            c_pattern_sum(&g, &BasisAssignment::computational(3), &sets[4]).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        let q =
            c_pattern_sum(&zero_product(4).density(), &BasisAssignment::hadamard(4), &lbps_quadripartite()).unwrap();
        assert_abs_diff_eq!(q, 0.75, epsilon = 1e-14);
        assert!(c_pattern_sum(&zero_product(4).density(), &BasisAssignment::hadamard(4), &sets[0]).is_err());
    }

    #[test]
    fn c_max_examples() {
        let sets = lbps_tripartite();
        let t = 0.6;
        let (v, name) = c_max(&ghz3(t).density(), &BasisAssignment::hadamard(3), &sets).unwrap();
        assert_abs_diff_eq!(v, (5.0 + (2.0 * t).sin()) / 8.0, epsilon = 1e-14);
        assert!(["tri4", "tri5", "tri6"].contains(&name.as_str()), "{name}");
        let (v, name) = c_max(&zero_product(3).density(), &BasisAssignment::hadamard(3), &sets).unwrap();
        assert_abs_diff_eq!(v, 0.625, epsilon = 1e-14);
        assert_eq!(name, "tri1");
        let (v, _) = c_max(&ghz3(t).density(), &BasisAssignment::computational(3), &sets).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-14);
        assert!(c_max(&ghz3(t).density(), &BasisAssignment::computational(3), &[]).is_err());
    }

    #[test]
    fn i3_examples() {
        let r = i3(&ghz3(FRAC_PI_4).density()).unwrap();
        assert_abs_diff_eq!(r.i_value, 1.75, epsilon = 1e-14);
        assert!(r.violated);
        assert_eq!(r.bound, 1.625);
        let r = i3(&zero_product(3).density()).unwrap();
        assert_abs_diff_eq!(r.i_value, 1.625, epsilon = 1e-14);
        assert!(!r.violated);
        assert!(i3(&zero_product(4).density()).is_err());
    }

    #[test]
    fn i4_examples() {
        let r = i4(&zero_product(4).density()).unwrap();
        assert_abs_diff_eq!(r.i_value, 1.75, epsilon = 1e-14);
        assert!(!r.violated);
        for t in [0.0, 0.2, 0.9, 1.4] {
            let r = i4(&ghz4(t).density()).unwrap();
            assert_abs_diff_eq!(r.i_value, closed_form::i4_ghz_direct(t), epsilon = 1e-13);
        }
        assert!(i4(&ghz4(FRAC_PI_4).density()).unwrap().violated);
        assert!(i4(&zero_product(3).density()).is_err());
    }

    #[test]
    fn oracle_matches_fast_path() {
        let sets = lbps_tripartite();
        let (c, h) = (BasisAssignment::computational(3), BasisAssignment::hadamard(3));
        let rho = ghz3(0.3).density();
        let r = i3(&rho).unwrap();
        assert_abs_diff_eq!(i_value_oracle(&rho, &c, &h, &sets).unwrap(), r.i_value, epsilon = 1e-12);
        let q = [lbps_quadripartite()];
        let o = i_value_oracle(
            &zero_product(4).density(),
            &BasisAssignment::computational(4),
            &BasisAssignment::hadamard(4),
            &q,
        );
        assert_abs_diff_eq!(o.unwrap(), 1.75, epsilon = 1e-12);
    }

    #[test]
    fn basis_search_never_lowers_the_value() {
        for rho in [ghz3(0.4).density(), w3(1.0, FRAC_PI_4).density(), random_pure(&[2; 3], 2).unwrap().density()] {
            let fixed = i3(&rho).unwrap();
            let searched = certify_with_basis_search(&rho).unwrap();
            assert!(searched.i_value >= fixed.i_value - 1e-12);
            assert!(searched.settings.is_some());
        }
        let r = certify_with_basis_search(&ghz4(0.4).density()).unwrap();
        assert!(r.i_value >= i4(&ghz4(0.4).density()).unwrap().i_value - 1e-12);
        assert!(certify_with_basis_search(&bell().density()).is_err());
    }

    #[test]
    fn report_invariants() {
        let r = i3(&random_pure(&[2; 3], 4).unwrap().density()).unwrap();
        assert_abs_diff_eq!(r.i_value, r.c_first + r.c_second, epsilon = 1e-12);
        assert_eq!(r.violated, r.i_value > r.bound + 1e-9);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["criterion"]["kind"], "tripartite");
    }
}
