//! Kirkwood-Dirac tables, marginals, reconstruction and the split of each
//! entry into a sequential-measurement (Wigner) probability plus real and
//! imaginary disturbance corrections.
//!
//! Tables are oriented with rows over the `A` eigenbasis `{|a_i>}` and
//! columns over the postselection basis `{|f_j>}`:
//!
//! ```text
//! Q_ij = Tr(P_{a_i} rho P_{f_j}) = <a_i|rho|f_j><f_j|a_i>
//! ```

use num_complex::Complex64 as C64;

use crate::error::{KdError, Result};
use crate::linalg::{Basis, CMatrix, DensityOperator, ObservableSpec};

/// Marginal imaginary residue above which a table is treated as corrupt.
pub const MARGINAL_RESIDUE_LIMIT: f64 = 1e-8;

/// Minimum `|<f_j|a_i>|` accepted by [`reconstruct_state`].
pub const RECONSTRUCTION_OVERLAP_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct KdTable {
    entries: CMatrix,
    a_basis: Basis,
    f_basis: Basis,
}

impl KdTable {
    pub fn from_entries(entries: CMatrix, a_basis: Basis, f_basis: Basis) -> Result<Self> {
        let d = a_basis.dim();
        if f_basis.dim() != d {
            return Err(KdError::DimensionMismatch {
                what: "postselection basis",
                expected: d,
                found: f_basis.dim(),
            });
        }
        if entries.rows() != d || entries.cols() != d {
            return Err(KdError::DimensionMismatch {
                what: "KD table entries",
                expected: d,
                found: if entries.rows() != d {
                    entries.rows()
                } else {
                    entries.cols()
                },
            });
        }
        Ok(Self {
            entries,
            a_basis,
            f_basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.a_basis.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[(i, j)]
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn a_basis(&self) -> &Basis {
        &self.a_basis
    }

    pub fn f_basis(&self) -> &Basis {
        &self.f_basis
    }

    pub fn column_sum(&self, j: usize) -> C64 {
        (0..self.dim()).map(|i| self.entries[(i, j)]).sum()
    }

    pub fn row_sum(&self, i: usize) -> C64 {
        (0..self.dim()).map(|j| self.entries[(i, j)]).sum()
    }

    /// True when `other` is defined over the same pair of bases.
    pub fn shares_bases(&self, other: &KdTable) -> bool {
        self.a_basis.matrix() == other.a_basis.matrix() && self.f_basis.matrix() == other.f_basis.matrix()
    }
}

fn check_bases(rho: &DensityOperator, a: &Basis, f: &Basis) -> Result<()> {
    rho.check_dim("observable basis", a.dim())?;
    rho.check_dim("postselection basis", f.dim())
}

fn check_index(index: usize, dim: usize) -> Result<()> {
    if index >= dim {
        return Err(KdError::IndexOutOfRange { index, dim });
    }
    Ok(())
}

pub fn kd_table(rho: &DensityOperator, a: &ObservableSpec, f: &Basis) -> Result<KdTable> {
    kd_table_in_bases(rho, a.basis(), f)
}

/// `Q_ij = <a_i|rho|f_j><f_j|a_i>` for an explicit pair of bases.
pub fn kd_table_in_bases(rho: &DensityOperator, a: &Basis, f: &Basis) -> Result<KdTable> {
    check_bases(rho, a, f)?;
    let av = a.matrix();
    let fv = f.matrix();
    // rho_af[i][j] = <a_i|rho|f_j>, overlap[j][i] = <f_j|a_i>
    let rho_af = av.adjoint().matmul(rho.matrix()).matmul(fv);
    let overlap = fv.adjoint().matmul(av);
    let d = rho.dim();
    let entries = CMatrix::from_fn(d, d, |i, j| rho_af[(i, j)] * overlap[(j, i)]);
    Ok(KdTable {
        entries,
        a_basis: a.clone(),
        f_basis: f.clone(),
    })
}

/// The reversed operator ordering `P_ij = Tr(rho P_{a_i} P_{f_j})`, which is
/// the complex conjugate of [`kd_table`].
pub fn kd_table_reversed_order(rho: &DensityOperator, a: &ObservableSpec, f: &Basis) -> Result<KdTable> {
    check_bases(rho, a.basis(), f)?;
    let d = rho.dim();
    let entries = CMatrix::from_fn(d, d, |i, j| {
        let pa = a.projector(i);
        let pf = f.projector(j);
        rho.matrix().matmul(&pa).matmul(&pf).trace()
    });
    Ok(KdTable {
        entries,
        a_basis: a.basis().clone(),
        f_basis: f.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct KdMarginals {
    /// `p(a_i|rho)`.
    pub row_sums: Vec<f64>,
    /// `p(f_j|rho)`.
    pub col_sums: Vec<f64>,
    pub total: f64,
    /// Largest `|Im|` over all row sums.
    pub row_imag_residue: f64,
    /// Largest `|Im|` over all column sums.
    pub col_imag_residue: f64,
}

pub fn kd_marginals(q: &KdTable) -> Result<KdMarginals> {
    let d = q.dim();
    let rows: Vec<C64> = (0..d).map(|i| q.row_sum(i)).collect();
    let cols: Vec<C64> = (0..d).map(|j| q.column_sum(j)).collect();
    let row_imag_residue = rows.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let col_imag_residue = cols.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let residual = row_imag_residue.max(col_imag_residue);
    if !(residual <= MARGINAL_RESIDUE_LIMIT) {
        return Err(KdError::CorruptTable { residual });
    }
    let total: C64 = q.entries().as_slice().iter().sum();
    Ok(KdMarginals {
        row_sums: rows.iter().map(|z| z.re).collect(),
        col_sums: cols.iter().map(|z| z.re).collect(),
        total: total.re,
        row_imag_residue,
        col_imag_residue,
    })
}

/// Invert the table: `rho = sum_ij Q_ij |a_i><f_j| / <f_j|a_i>`.
pub fn reconstruct_state(q: &KdTable) -> Result<DensityOperator> {
    reconstruct_state_with(q, RECONSTRUCTION_OVERLAP_LIMIT)
}

pub fn reconstruct_state_with(q: &KdTable, min_overlap: f64) -> Result<DensityOperator> {
    let d = q.dim();
    let a = q.a_basis();
    let f = q.f_basis();
    let overlap = f.matrix().adjoint().matmul(a.matrix());
    for i in 0..d {
        for j in 0..d {
            let o = overlap[(j, i)].norm();
            if !(o > min_overlap) {
                return Err(KdError::NonInvertible { i, j, overlap: o });
            }
        }
    }
    // rho = V_a C V_f^dagger with C_ij = Q_ij / <f_j|a_i>
    let coeffs = CMatrix::from_fn(d, d, |i, j| q.entry(i, j) / overlap[(j, i)]);
    let m = a.matrix().matmul(&coeffs).matmul(&f.matrix().adjoint());
    DensityOperator::new(m)
}

/// State after the non-selective binary measurement `{P_{a_i}, 1 - P_{a_i}}`.
pub fn binary_dephase(rho: &DensityOperator, a: &ObservableSpec, i: usize) -> Result<DensityOperator> {
    rho.check_dim("observable basis", a.dim())?;
    check_index(i, a.dim())?;
    let p = a.projector(i);
    let q = CMatrix::identity(a.dim()).sub(&p);
    let r = rho.matrix();
    let m = p.matmul(r).matmul(&p).add(&q.matmul(r).matmul(&q));
    Ok(DensityOperator::from_matrix_unchecked(m))
}

/// State after the complete non-selective measurement of `A`:
/// `sum_i P_{a_i} rho P_{a_i}`.
pub fn full_dephase(rho: &DensityOperator, a: &ObservableSpec) -> Result<DensityOperator> {
    rho.check_dim("observable basis", a.dim())?;
    let d = a.dim();
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        let p = a.projector(i);
        m = m.add(&p.matmul(rho.matrix()).matmul(&p));
    }
    Ok(DensityOperator::from_matrix_unchecked(m))
}

/// `P_{f_j}` conjugated by the selective phase rotation
/// `R = 1 + (e^{-i pi/2} - 1) P_{a_i}`, i.e. `R P_{f_j} R^dagger`.
///
/// The quarter-turn is taken clockwise so that
/// `Im Q_ij = -1/2 Tr((rho - rho'_i) P^{pi/2}_{f_j})` holds for the
/// `Tr(P_a rho P_f)` ordering used by [`kd_table`].
pub fn phase_rotated_projector(f: &Basis, j: usize, a: &ObservableSpec, i: usize) -> Result<CMatrix> {
    let d = a.dim();
    if f.dim() != d {
        return Err(KdError::DimensionMismatch {
            what: "postselection basis",
            expected: d,
            found: f.dim(),
        });
    }
    check_index(i, d)?;
    check_index(j, d)?;
    let phase = C64::new(0.0, -1.0) - C64::new(1.0, 0.0);
    let r = CMatrix::identity(d).add(&a.projector(i).scale(phase));
    Ok(r.matmul(&f.projector(j)).matmul(&r.adjoint()))
}

/// Per-entry split `Q_ij = wigner + real_corr + i * imag_corr`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct JohansenParts {
    /// `Tr(rho P_a P_f P_a)`.
    pub wigner: Vec<Vec<f64>>,
    /// `1/2 Tr((rho - rho'_i) P_f)`.
    pub real_corr: Vec<Vec<f64>>,
    /// `-1/2 Tr((rho - rho'_i) P_f^{pi/2})`.
    pub imag_corr: Vec<Vec<f64>>,
}

impl JohansenParts {
    pub fn dim(&self) -> usize {
        self.wigner.len()
    }

    pub fn recombined(&self, i: usize, j: usize) -> C64 {
        C64::new(self.wigner[i][j] + self.real_corr[i][j], self.imag_corr[i][j])
    }
}

/// Evaluates every term through operator traces, independently of the
/// amplitude products used by [`kd_table`].
pub fn johansen_decompose(rho: &DensityOperator, a: &ObservableSpec, f: &Basis) -> Result<JohansenParts> {
    check_bases(rho, a.basis(), f)?;
    let d = rho.dim();
    let mut wigner = vec![vec![0.0; d]; d];
    let mut real_corr = vec![vec![0.0; d]; d];
    let mut imag_corr = vec![vec![0.0; d]; d];
    let f_proj: Vec<CMatrix> = (0..d).map(|j| f.projector(j)).collect();
    for i in 0..d {
        let pa = a.projector(i);
        let disturbance = rho.matrix().sub(binary_dephase(rho, a, i)?.matrix());
        for j in 0..d {
            let pf = &f_proj[j];
            wigner[i][j] = rho.matrix().matmul(&pa).matmul(pf).matmul(&pa).trace().re;
            real_corr[i][j] = 0.5 * disturbance.matmul(pf).trace().re;
            let rotated = phase_rotated_projector(f, j, a, i)?;
            imag_corr[i][j] = -0.5 * disturbance.matmul(&rotated).trace().re;
        }
    }
    Ok(JohansenParts {
        wigner,
        real_corr,
        imag_corr,
    })
}

/// Sequential projective joint probabilities `p(a_i|rho) p(f_j|a_i)`.
///
/// Built from the product form, so rows with `p(a_i|rho) = 0` are zero and
/// nothing is ever divided.
pub fn wigner_table(rho: &DensityOperator, a: &ObservableSpec, f: &Basis) -> Result<Vec<Vec<f64>>> {
    wigner_table_in_bases(rho, a.basis(), f)
}

pub fn wigner_table_in_bases(rho: &DensityOperator, a: &Basis, f: &Basis) -> Result<Vec<Vec<f64>>> {
    check_bases(rho, a, f)?;
    let d = rho.dim();
    let diag = rho.in_basis(a);
    let overlap = f.matrix().adjoint().matmul(a.matrix());
    Ok((0..d)
        .map(|i| {
            let p_a = diag[(i, i)].re;
            (0..d).map(|j| p_a * overlap[(j, i)].norm_sqr()).collect()
        })
        .collect())
}
