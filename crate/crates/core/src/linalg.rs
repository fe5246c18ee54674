//! Dense complex matrices, bases, observables and density operators.
//!
//! Everything here is small and dense: the intended dimensions are 2 to 16,
//! so matrices are plain row-major `Vec`s and the Hermitian eigensolver is a
//! cyclic Jacobi sweep on the real symmetric embedding.

use std::f64::consts::TAU;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64 as C64;

use crate::error::{KdError, Result};

/// Global comparison thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Hermiticity, trace, orthonormality and PSD slack.
    pub structural: f64,
    /// Minimum separation between eigenvalues of an observable.
    pub distinct: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            structural: 1e-10,
            distinct: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_fn(
            d,
            d,
            |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) },
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from row-major entries; `data.len()` must equal `rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(KdError::DimensionMismatch {
                what: "matrix entries",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * m);
        for row in rows {
            if row.len() != m {
                return Err(KdError::DimensionMismatch {
                    what: "matrix row length",
                    expected: m,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { rows: n, cols: m, data })
    }

    /// Square matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let d = columns.len();
        for c in columns {
            if c.len() != d {
                return Err(KdError::DimensionMismatch {
                    what: "basis vector length",
                    expected: d,
                    found: c.len(),
                });
            }
        }
        Ok(Self::from_fn(d, d, |i, j| columns[j][i]))
    }

    /// `u v^dagger`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let d = values.len();
        Self::from_fn(d, d, |i, j| if i == j { values[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// Entrywise product.
    pub fn hadamard(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|k| self[(i, k)] * v[k]).sum())
            .collect()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Only the Hermitian part `(M + M^dagger)/2` is used.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        assert!(self.is_square(), "eigenvalues of a non-square matrix");
        let d = self.rows;
        // [[X, -Y], [Y, X]] has the spectrum of X + iY, each value twice.
        let n = 2 * d;
        let mut a = vec![0.0; n * n];
        for i in 0..d {
            for j in 0..d {
                let h = 0.5 * (self[(i, j)] + self[(j, i)].conj());
                a[i * n + j] = h.re;
                a[(i + d) * n + (j + d)] = h.re;
                a[i * n + (j + d)] = -h.im;
                a[(i + d) * n + j] = h.im;
            }
        }
        let mut ev = jacobi_symmetric_eigenvalues(&mut a, n);
        ev.sort_by(f64::total_cmp);
        ev.into_iter().step_by(2).collect()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// Cyclic Jacobi on a dense real symmetric `n x n` matrix (destroys `a`).
fn jacobi_symmetric_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    const MAX_SWEEPS: usize = 100;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q] * a[p * n + q])
            .sum();
        let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
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

/// An orthonormal basis of `C^d`, stored as the columns of a unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    label: String,
    vectors: CMatrix,
}

impl Basis {
    /// Wrap a unitary whose columns are the basis vectors.
    pub fn new(label: impl Into<String>, vectors: CMatrix) -> Result<Self> {
        Self::with_tolerance(label, vectors, Tolerances::default().structural)
    }

    pub fn with_tolerance(label: impl Into<String>, vectors: CMatrix, tol: f64) -> Result<Self> {
        if !vectors.is_square() {
            return Err(KdError::DimensionMismatch {
                what: "basis matrix columns",
                expected: vectors.rows(),
                found: vectors.cols(),
            });
        }
        if vectors.rows() == 0 {
            return Err(KdError::InvalidDimension {
                dim: 0,
                reason: "basis must be non-empty",
            });
        }
        let basis = Self {
            label: label.into(),
            vectors,
        };
        let defect = basis.orthonormality_defect();
        if !(defect <= tol) {
            return Err(KdError::NonOrthonormalBasis { defect });
        }
        Ok(basis)
    }

    pub fn from_columns(label: impl Into<String>, columns: &[Vec<C64>]) -> Result<Self> {
        Self::new(label, CMatrix::from_columns(columns)?)
    }

    pub fn computational(d: usize) -> Self {
        Self {
            label: "computational".into(),
            vectors: CMatrix::identity(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.rows()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn vector(&self, j: usize) -> Vec<C64> {
        self.vectors.column(j)
    }

    pub fn projector(&self, j: usize) -> CMatrix {
        let v = self.vector(j);
        CMatrix::outer(&v, &v)
    }

    /// `<self_j | other_i>`.
    pub fn overlap(&self, j: usize, other: &Basis, i: usize) -> C64 {
        (0..self.dim())
            .map(|k| self.vectors[(k, j)].conj() * other.vectors[(k, i)])
            .sum()
    }

    /// `max |V^dagger V - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = self.vectors.adjoint().matmul(&self.vectors);
        gram.max_abs_diff(&CMatrix::identity(self.dim()))
    }
}

/// Discrete Fourier basis: `F[i][j] = exp(2 pi i ij / d) / sqrt(d)`.
pub fn fourier_basis(d: usize) -> Result<Basis> {
    if d < 2 {
        return Err(KdError::InvalidDimension {
            dim: d,
            reason: "Fourier basis needs d >= 2",
        });
    }
    let norm = 1.0 / (d as f64).sqrt();
    let vectors = CMatrix::from_fn(d, d, |i, j| {
        // reduce ij mod d before scaling to keep the phase exact for large d
        let phase = TAU * ((i * j) % d) as f64 / d as f64;
        C64::from_polar(norm, phase)
    });
    Ok(Basis {
        label: "fourier".into(),
        vectors,
    })
}

/// A non-degenerate observable `A = sum_i a_i |a_i><a_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSpec {
    eigenvalues: Vec<f64>,
    basis: Basis,
}

impl ObservableSpec {
    pub fn new(eigenvalues: Vec<f64>, basis: Basis) -> Result<Self> {
        Self::with_tolerances(eigenvalues, basis, &Tolerances::default())
    }

    pub fn with_tolerances(eigenvalues: Vec<f64>, basis: Basis, tol: &Tolerances) -> Result<Self> {
        if eigenvalues.len() != basis.dim() {
            return Err(KdError::DimensionMismatch {
                what: "observable eigenvalues",
                expected: basis.dim(),
                found: eigenvalues.len(),
            });
        }
        if let Some(bad) = eigenvalues.iter().position(|a| !a.is_finite()) {
            return Err(KdError::InvalidState(format!("eigenvalue {bad} is not finite")));
        }
        for i in 0..eigenvalues.len() {
            for k in (i + 1)..eigenvalues.len() {
                if (eigenvalues[i] - eigenvalues[k]).abs() <= tol.distinct {
                    return Err(KdError::DegenerateObservable { i, k });
                }
            }
        }
        Ok(Self { eigenvalues, basis })
    }

    /// `sigma_z` with `a_0 = +1` on `|0>` and `a_1 = -1` on `|1>`.
    pub fn pauli_z() -> Self {
        Self {
            eigenvalues: vec![1.0, -1.0],
            basis: Basis::computational(2),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn projector(&self, i: usize) -> CMatrix {
        self.basis.projector(i)
    }

    pub fn matrix(&self) -> CMatrix {
        let v = self.basis.matrix();
        let diag: Vec<C64> = self.eigenvalues.iter().map(|&a| C64::new(a, 0.0)).collect();
        v.matmul(&CMatrix::diagonal(&diag)).matmul(&v.adjoint())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A density operator in the computational basis.
///
/// Construction only checks shape; use [`validate_density`] or
/// [`DensityOperator::new_checked`] for the physical invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(KdError::DimensionMismatch {
                what: "density matrix columns",
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        if matrix.rows() == 0 {
            return Err(KdError::InvalidDimension {
                dim: 0,
                reason: "density matrix must be non-empty",
            });
        }
        Ok(Self { matrix })
    }

    pub fn new_checked(matrix: CMatrix) -> Result<Self> {
        let rho = Self::new(matrix)?;
        let report = validate_density(&rho);
        if !report.passes {
            return Err(KdError::InvalidState(report.to_string()));
        }
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Matrix elements `<b_k|rho|b_l>` in another basis.
    pub fn in_basis(&self, basis: &Basis) -> CMatrix {
        let v = basis.matrix();
        v.adjoint().matmul(&self.matrix).matmul(v)
    }

    /// `Tr(rho P)`.
    pub fn expectation_of(&self, op: &CMatrix) -> C64 {
        self.matrix.matmul(op).trace()
    }

    pub(crate) fn check_dim(&self, what: &'static str, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(KdError::DimensionMismatch {
                what,
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

/// Normalized `|psi><psi|`.
pub fn pure_state(amplitudes: &[C64]) -> Result<DensityOperator> {
    if amplitudes.is_empty() {
        return Err(KdError::InvalidDimension {
            dim: 0,
            reason: "state vector must be non-empty",
        });
    }
    let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 1e-12) || !norm.is_finite() {
        return Err(KdError::DegenerateState { norm });
    }
    let psi: Vec<C64> = amplitudes.iter().map(|z| z / norm).collect();
    Ok(DensityOperator::from_matrix_unchecked(CMatrix::outer(&psi, &psi)))
}

/// Qubit state `(I + x sigma_x + y sigma_y + z sigma_z) / 2`.
pub fn bloch_state(x: f64, y: f64, z: f64) -> Result<DensityOperator> {
    let r2 = x * x + y * y + z * z;
    if !r2.is_finite() || r2 > 1.0 + 1e-12 {
        return Err(KdError::InvalidState(format!(
            "Bloch vector length {} exceeds 1",
            r2.sqrt()
        )));
    }
    let m = CMatrix::from_rows(&[
        vec![C64::new((1.0 + z) / 2.0, 0.0), C64::new(x / 2.0, -y / 2.0)],
        vec![C64::new(x / 2.0, y / 2.0), C64::new((1.0 - z) / 2.0, 0.0)],
    ])?;
    Ok(DensityOperator::from_matrix_unchecked(m))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DensityReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
    pub passes: bool,
}

impl std::fmt::Display for DensityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "hermiticity defect {:e}, trace defect {:e}, min eigenvalue {:e} ({})",
            self.hermiticity_defect,
            self.trace_defect,
            self.min_eigenvalue,
            if self.passes { "pass" } else { "fail" }
        )
    }
}

pub fn validate_density(rho: &DensityOperator) -> DensityReport {
    validate_density_with(rho, &Tolerances::default())
}

pub fn validate_density_with(rho: &DensityOperator, tol: &Tolerances) -> DensityReport {
    let m = rho.matrix();
    let hermiticity_defect = m.hermiticity_defect();
    let trace_defect = (m.trace() - C64::new(1.0, 0.0)).norm();
    let min_eigenvalue = m.hermitian_eigenvalues().first().copied().unwrap_or(f64::NAN);
    let finite = m.as_slice().iter().all(|z| z.re.is_finite() && z.im.is_finite());
    let passes = finite
        && hermiticity_defect <= tol.structural
        && trace_defect <= tol.structural
        && min_eigenvalue >= -tol.structural;
    DensityReport {
        hermiticity_defect,
        trace_defect,
        min_eigenvalue,
        passes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn fourier_qubit_columns() {
        let f = fourier_basis(2).unwrap();
        let s = FRAC_1_SQRT_2;
        assert!((f.vector(0)[0] - c(s, 0.0)).norm() < 1e-15);
        assert!((f.vector(0)[1] - c(s, 0.0)).norm() < 1e-15);
        assert!((f.vector(1)[0] - c(s, 0.0)).norm() < 1e-15);
        assert!((f.vector(1)[1] - c(-s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn fourier_is_unbiased_to_computational() {
        for d in 2..=7 {
            let f = fourier_basis(d).unwrap();
            let e = Basis::computational(d);
            assert!(f.orthonormality_defect() <= 1e-10);
            for i in 0..d {
                for j in 0..d {
                    let m = f.overlap(j, &e, i).norm_sqr();
                    assert!((m - 1.0 / d as f64).abs() < 1e-12);
                }
            }
        }
        let f3 = fourier_basis(3).unwrap();
        let e3 = Basis::computational(3);
        assert!((f3.overlap(2, &e3, 1).norm() - 0.577_350_269_189_625_8).abs() < 1e-12);
    }

    #[test]
    fn fourier_columns_diagonalize_cyclic_shift() {
        let d = 5;
        let shift = CMatrix::from_fn(d, d, |i, j| if i == (j + 1) % d { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let f = fourier_basis(d).unwrap();
        for j in 0..d {
            let v = f.vector(j);
            let sv = shift.mat_vec(&v);
            // eigenvalue from the first nonzero component
            let lambda = sv[0] / v[0];
            assert!((lambda.norm() - 1.0).abs() < 1e-12);
            for k in 0..d {
                assert!((sv[k] - lambda * v[k]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fourier_rejects_small_dimension() {
        assert!(matches!(
            fourier_basis(1),
            Err(KdError::InvalidDimension { dim: 1, .. })
        ));
        assert!(fourier_basis(0).is_err());
    }

    #[test]
    fn pure_state_examples() {
        let r = pure_state(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(r.matrix().max_abs_diff(&CMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 0.0)])) < 1e-15);

        let plus = pure_state(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        for z in plus.matrix().as_slice() {
            assert!((z - c(0.5, 0.0)).norm() < 1e-15);
        }

        let phased = pure_state(&[c(1.0, 0.0), C64::from_polar(1.0, PI / 4.0)]).unwrap();
        let expected = C64::from_polar(0.5, -PI / 4.0);
        assert!((phased.matrix()[(0, 1)] - expected).norm() < 1e-15);
        let sq = phased.matrix().matmul(phased.matrix());
        assert!(sq.max_abs_diff(phased.matrix()) < 1e-10);
    }

    #[test]
    fn pure_state_rejects_zero_vector() {
        assert!(matches!(
            pure_state(&[c(0.0, 0.0), c(0.0, 0.0)]),
            Err(KdError::DegenerateState { .. })
        ));
    }

    #[test]
    fn bloch_examples() {
        let north = bloch_state(0.0, 0.0, 1.0).unwrap();
        assert!(
            north
                .matrix()
                .max_abs_diff(&CMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 0.0)]))
                < 1e-15
        );
        let mixed = bloch_state(0.0, 0.0, 0.0).unwrap();
        assert!(mixed.matrix().max_abs_diff(&CMatrix::identity(2).scale(c(0.5, 0.0))) < 1e-15);

        let s = FRAC_1_SQRT_2;
        let r = bloch_state(-s, 0.0, -s).unwrap();
        assert!((r.matrix()[(0, 0)].re - 0.146_446_609_406_726_24).abs() < 1e-12);
        assert!((r.matrix()[(0, 1)].re + 0.353_553_390_593_273_8).abs() < 1e-12);
        assert!(validate_density(&r).passes);
    }

    #[test]
    fn bloch_eigenvalues_are_one_plus_minus_r_over_two() {
        for &(x, y, z) in &[(0.3f64, -0.2f64, 0.5f64), (0.0, 0.6, 0.0), (0.6, 0.0, -0.8)] {
            let r = (x * x + y * y + z * z).sqrt();
            let ev = bloch_state(x, y, z).unwrap().matrix().hermitian_eigenvalues();
            assert!((ev[0] - (1.0 - r) / 2.0).abs() < 1e-10);
            assert!((ev[1] - (1.0 + r) / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn bloch_rejects_outside_ball() {
        assert!(matches!(bloch_state(1.0, 0.1, 0.0), Err(KdError::InvalidState(_))));
    }

    #[test]
    fn validate_density_examples() {
        let pass = DensityOperator::new(CMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 0.0)])).unwrap();
        assert!(validate_density(&pass).passes);

        let bad = DensityOperator::new(
            CMatrix::from_rows(&[vec![c(0.5, 0.0), c(0.6, 0.0)], vec![c(0.6, 0.0), c(0.5, 0.0)]]).unwrap(),
        )
        .unwrap();
        let report = validate_density(&bad);
        assert!(!report.passes);
        assert!((report.min_eigenvalue + 0.1).abs() < 1e-12);

        let mix = DensityOperator::new(CMatrix::diagonal(&[c(0.7, 0.0), c(0.3, 0.0)])).unwrap();
        assert!(validate_density(&mix).passes);
    }

    #[test]
    fn validate_flags_trace_and_hermiticity() {
        let m = CMatrix::from_rows(&[vec![c(0.6, 0.0), c(0.1, 0.2)], vec![c(0.1, 0.2), c(0.5, 0.0)]]).unwrap();
        let r = validate_density(&DensityOperator::new(m).unwrap());
        assert!(!r.passes);
        assert!((r.trace_defect - 0.1).abs() < 1e-12);
        assert!((r.hermiticity_defect - 0.4).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_complex_hermitian() {
        // sigma_y has eigenvalues -1, +1
        let sy = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]).unwrap();
        let ev = sy.hermitian_eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn observable_rejects_degenerate_spectrum() {
        let e = Basis::computational(3);
        assert!(matches!(
            ObservableSpec::new(vec![1.0, 0.0, 1.0], e.clone()),
            Err(KdError::DegenerateObservable { i: 0, k: 2 })
        ));
        assert!(ObservableSpec::new(vec![1.0, 0.0], e).is_err());
    }

    #[test]
    fn basis_rejects_non_orthonormal_columns() {
        let cols = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(1.0, 0.0), c(1.0, 0.0)]];
        assert!(matches!(
            Basis::from_columns("bad", &cols),
            Err(KdError::NonOrthonormalBasis { .. })
        ));
    }

    #[test]
    fn pauli_z_matrix() {
        let z = ObservableSpec::pauli_z().matrix();
        assert!(z.max_abs_diff(&CMatrix::diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)])) < 1e-15);
    }
}
