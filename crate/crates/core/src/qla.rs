//! Dense complex linear algebra for small multipartite systems.
//!
//! Party 0 is the leftmost tensor factor and all flattening is row-major, so
//! the computational index of an outcome string `(s_0, .., s_{n-1})` is
//! `Σ s_p · Π_{q>p} d_q`.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::{CONSTRUCTION_TOL, EQUALITY_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Eigenvalues below this are treated as a numerical breach of positivity.
pub const PSD_TOL: f64 = 1e-9;

/// A dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Operator {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return invalid("operator must have positive dimensions");
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("operator entries must be finite");
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows. Panics on ragged input, so only use
    /// it with literal data.
    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged operator rows");
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self { rows: rows.len(), cols, data }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged operator rows");
        let data = rows.iter().flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0))).collect();
        Self { rows: rows.len(), cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut op = Self::zeros(n, n);
        for i in 0..n {
            op.data[i * n + i] = ONE;
        }
        op
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut op = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            op.data[i * n + i] = z;
        }
        op
    }

    /// Column operator `|v⟩`.
    pub fn column(v: &[Complex64]) -> Self {
        Self { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    fn set(&mut self, r: usize, c: usize, z: Complex64) {
        self.data[r * self.cols + c] = z;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Kronecker product: entry `(i·rb + k, j·cb + l)` is `a(i,j)·b(k,l)`.
    pub fn kron(&self, other: &Operator) -> Operator {
        let (rb, cb) = (other.rows, other.cols);
        let rows = self.rows * rb;
        let cols = self.cols * cb;
        let mut data = vec![ZERO; rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == ZERO {
                    continue;
                }
                for k in 0..rb {
                    let row = (i * rb + k) * cols + j * cb;
                    for l in 0..cb {
                        data[row + l] = a * other.get(k, l);
                    }
                }
            }
        }
        Operator { rows, cols, data }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Operator {
        let mut out = Operator::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Operator::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.data.len(), found: other.data.len() });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Operator { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, s: Complex64) -> Operator {
        Operator { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.dagger()) <= tol
    }

    /// `‖A†A − I‖_max`, the residual used for unitarity and completeness checks.
    pub fn unitarity_residual(&self) -> f64 {
        let gram = self.dagger().matmul(self).expect("square by construction");
        gram.max_abs_diff(&Operator::identity(self.cols))
    }

    /// Eigenvalues of a Hermitian matrix in descending order.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_hermitian(EQUALITY_TOL) {
            return invalid("eigenvalues requested for a non-Hermitian operator");
        }
        Ok(hermitian_eigenvalues(self))
    }
}

/// Eigenvalues of a Hermitian `H = A + iB` through the real symmetric
/// embedding `[[A, -B], [B, A]]`, whose spectrum is that of `H` with every
/// eigenvalue doubled.
fn hermitian_eigenvalues(h: &Operator) -> Vec<f64> {
    let n = h.rows;
    let m = 2 * n;
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            // symmetrize away round-off before embedding
            let z = (h.get(i, j) + h.get(j, i).conj()) * 0.5;
            a[i * m + j] = z.re;
            a[(i + n) * m + (j + n)] = z.re;
            a[i * m + (j + n)] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    let mut eig = symmetric_jacobi_eigenvalues(a, m);
    eig.sort_by(|x, y| y.total_cmp(x));
    eig.into_iter().step_by(2).collect()
}

/// Cyclic Jacobi sweeps on a dense real symmetric matrix (row-major).
fn symmetric_jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale == 0.0 {
        return vec![0.0; n];
    }
    for _ in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q] * a[p * n + q])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return invalid("at least one party is required");
    }
    if let Some(&d) = dims.iter().find(|&&d| d < 2) {
        return invalid(format!("local dimension {d} is below 2"));
    }
    Ok(dims.iter().product())
}

/// A normalized pure state over `dims`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state, renormalizing the amplitudes.
    pub fn new(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::with_norm(dims, amplitudes).map(|(s, _)| s)
    }

    /// Like [`StateVector::new`] but also returns the norm of the input.
    pub fn with_norm(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<(Self, f64)> {
        let total = check_dims(&dims)?;
        if amplitudes.len() != total {
            return Err(Error::DimensionMismatch { expected: total, found: amplitudes.len() });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("amplitudes must be finite");
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= f64::EPSILON {
            return invalid("state has zero norm");
        }
        let amplitudes = amplitudes.into_iter().map(|z| z / norm).collect();
        Ok((Self { dims, amplitudes }, norm))
    }

    pub fn from_real(dims: Vec<usize>, amplitudes: &[f64]) -> Result<Self> {
        Self::new(dims, amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis state with the given flat index.
    pub fn basis_state(dims: Vec<usize>, index: usize) -> Result<Self> {
        let total = check_dims(&dims)?;
        if index >= total {
            return invalid(format!("basis index {index} out of range for dimension {total}"));
        }
        let mut amplitudes = vec![ZERO; total];
        amplitudes[index] = ONE;
        Ok(Self { dims, amplitudes })
    }

    /// Tensor product of the factors, first factor leftmost.
    pub fn product(factors: &[StateVector]) -> Result<Self> {
        let (first, rest) = factors.split_first().ok_or_else(|| Error::InvalidInput("empty product".into()))?;
        let mut out = first.clone();
        for f in rest {
            out = out.tensor(f);
        }
        Ok(out)
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let amplitudes = self.amplitudes.iter().flat_map(|a| other.amplitudes.iter().map(move |b| a * b)).collect();
        let dims = self.dims.iter().chain(&other.dims).copied().collect();
        StateVector { dims, amplitudes }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DensityMatrix {
        let n = self.dim();
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        DensityMatrix { dims: self.dims.clone(), matrix: Operator { rows: n, cols: n, data } }
    }

    /// Applies `op` on a single party, identity elsewhere, and renormalizes.
    pub fn apply_local(&self, party: usize, op: &Operator) -> Result<StateVector> {
        let full = embed_local(&self.dims, party, op)?;
        StateVector::new(self.dims.clone(), full.apply(&self.amplitudes)?)
    }

    /// Reorders the tensor factors: party `p` of the output is party
    /// `order[p]` of `self`.
    pub fn permute_parties(&self, order: &[usize]) -> Result<StateVector> {
        let n = self.parties();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return invalid("party order must be a permutation");
        }
        let dims: Vec<usize> = order.iter().map(|&p| self.dims[p]).collect();
        let old_strides = strides(&self.dims);
        let mut amplitudes = vec![ZERO; self.dim()];
        for (new_index, amp) in amplitudes.iter_mut().enumerate() {
            let digits = digits_of(new_index, &dims);
            let old_index: usize = digits.iter().zip(order).map(|(&d, &p)| d * old_strides[p]).sum();
            *amp = self.amplitudes[old_index];
        }
        Ok(StateVector { dims, amplitudes })
    }
}

/// A density matrix over `dims`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: Operator,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(dims: Vec<usize>, matrix: Operator) -> Result<Self> {
        let total = check_dims(&dims)?;
        if matrix.rows != total || matrix.cols != total {
            return Err(Error::DimensionMismatch { expected: total, found: matrix.rows });
        }
        if !matrix.is_hermitian(CONSTRUCTION_TOL) {
            return invalid("density matrix is not Hermitian");
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > CONSTRUCTION_TOL || tr.im.abs() > CONSTRUCTION_TOL {
            return invalid(format!("density matrix trace is {tr}, expected 1"));
        }
        let min_eig = hermitian_eigenvalues(&matrix).last().copied().unwrap_or(0.0);
        if min_eig < -PSD_TOL {
            return invalid(format!("density matrix has negative eigenvalue {min_eig:e}"));
        }
        Ok(Self { dims, matrix })
    }

    /// Unchecked constructor for matrices that are valid by construction.
    pub(crate) fn from_parts(dims: Vec<usize>, matrix: Operator) -> Self {
        debug_assert_eq!(matrix.rows, dims.iter().product::<usize>());
        Self { dims, matrix }
    }

    /// Convex combination `Σ w_k ρ_k`. Weights must be non-negative and sum
    /// to one.
    pub fn mixture(terms: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let (_, first) = terms.first().ok_or_else(|| Error::InvalidInput("empty mixture".into()))?;
        if terms.iter().any(|(w, r)| *w < 0.0 || !w.is_finite() || r.dims != first.dims) {
            return invalid("mixture weights must be non-negative and states must share dims");
        }
        let total: f64 = terms.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > CONSTRUCTION_TOL {
            return invalid(format!("mixture weights sum to {total}, expected 1"));
        }
        let n = first.dim();
        let mut data = vec![ZERO; n * n];
        for (w, r) in terms {
            for (acc, z) in data.iter_mut().zip(&r.matrix.data) {
                *acc += z * *w;
            }
        }
        Ok(Self::from_parts(first.dims.clone(), Operator { rows: n, cols: n, data }))
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let total = check_dims(&dims)?;
        let matrix = Operator::identity(total).scale(Complex64::new(1.0 / total as f64, 0.0));
        Ok(Self { dims, matrix })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.matrix.get(r, c)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// `K ρ K†` without renormalization, paired with its trace.
    pub(crate) fn conjugate_by(&self, k: &Operator) -> Result<(Operator, f64)> {
        let out = k.matmul(&self.matrix)?.matmul(&k.dagger())?;
        let p = out.trace().re;
        Ok((out, p))
    }
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for p in (0..dims.len().saturating_sub(1)).rev() {
        s[p] = s[p + 1] * dims[p + 1];
    }
    s
}

/// Row-major digits of `index` in the mixed radix `dims`.
pub(crate) fn digits_of(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for p in (0..dims.len()).rev() {
        digits[p] = index % dims[p];
        index /= dims[p];
    }
    digits
}

/// `I ⊗ .. ⊗ op ⊗ .. ⊗ I` with `op` on `party`.
pub fn embed_local(dims: &[usize], party: usize, op: &Operator) -> Result<Operator> {
    if party >= dims.len() {
        return Err(Error::PartyOutOfRange { index: party, parties: dims.len() });
    }
    if op.rows != dims[party] || op.cols != dims[party] {
        return Err(Error::DimensionMismatch { expected: dims[party], found: op.rows });
    }
    let left: usize = dims[..party].iter().product();
    let right: usize = dims[party + 1..].iter().product();
    Ok(Operator::identity(left).kron(op).kron(&Operator::identity(right)))
}

/// Reduced state on the parties in `keep` (returned in ascending order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.parties();
    if keep.is_empty() {
        return invalid("partial trace must keep at least one party");
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&p| p >= n) {
        return Err(Error::PartyOutOfRange { index: bad, parties: n });
    }
    let traced: Vec<usize> = (0..n).filter(|p| !kept.contains(p)).collect();
    let st = strides(&rho.dims);
    let kept_dims: Vec<usize> = kept.iter().map(|&p| rho.dims[p]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&p| rho.dims[p]).collect();

    let offsets = |parties: &[usize], sub_dims: &[usize]| -> Vec<usize> {
        let count: usize = sub_dims.iter().product();
        (0..count).map(|i| digits_of(i, sub_dims).iter().zip(parties).map(|(&d, &p)| d * st[p]).sum()).collect()
    };
    let kept_off = offsets(&kept, &kept_dims);
    let traced_off = if traced.is_empty() { vec![0] } else { offsets(&traced, &traced_dims) };

    let dk = kept_off.len();
    let mut data = vec![ZERO; dk * dk];
    for (a, &ra) in kept_off.iter().enumerate() {
        for (b, &cb) in kept_off.iter().enumerate() {
            data[a * dk + b] = traced_off.iter().map(|&t| rho.matrix.get(ra + t, cb + t)).sum();
        }
    }
    Ok(DensityMatrix::from_parts(kept_dims, Operator { rows: dk, cols: dk, data }))
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    // Tr ρ² = Σ_ij |ρ_ij|² for Hermitian ρ
    rho.matrix.data.iter().map(|z| z.norm_sqr()).sum()
}

/// Schmidt coefficients of a bipartite pure state, descending.
pub fn schmidt_coefficients(psi: &StateVector) -> Result<Vec<f64>> {
    if psi.parties() != 2 {
        return invalid(format!("Schmidt decomposition needs 2 parties, got {}", psi.parties()));
    }
    let (da, db) = (psi.dims[0], psi.dims[1]);
    let m = Operator { rows: da, cols: db, data: psi.amplitudes.clone() };
    let gram = if da <= db { m.matmul(&m.dagger())? } else { m.dagger().matmul(&m)? };
    Ok(hermitian_eigenvalues(&gram).into_iter().map(|l| l.max(0.0).sqrt()).collect())
}

/// Number of eigenvalues of `rho` above `tol`.
pub fn reduced_rank(rho: &DensityMatrix, tol: f64) -> Result<usize> {
    if tol <= 0.0 || !tol.is_finite() {
        return invalid("rank tolerance must be positive");
    }
    Ok(rho.eigenvalues().into_iter().filter(|&l| l > tol).count())
}
