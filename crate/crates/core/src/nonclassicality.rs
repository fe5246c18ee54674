//! KD non-classicality: summed magnitudes of the real and imaginary
//! disturbance corrections, and its decay under pointer decoherence.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::dynamics::{decoherence_factors, reduced_state_with_factors, PointerConfig};
use crate::error::Result;
use crate::kd::{binary_dephase, full_dephase, phase_rotated_projector, JohansenParts, KdTable};
use crate::linalg::{Basis, CMatrix, DensityOperator, ObservableSpec};

/// Which non-selective measurement defines the disturbed state `rho'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DephasingConvention {
    /// `rho'_i = P_i rho P_i + (1 - P_i) rho (1 - P_i)`, one per row `i`.
    Binary,
    /// `rho' = sum_k P_k rho P_k` for every row.
    Full,
}

impl DephasingConvention {
    pub fn as_str(&self) -> &'static str {
        match self {
            DephasingConvention::Binary => "binary",
            DephasingConvention::Full => "full",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonclassicalityReport {
    pub total: f64,
    pub real_part_sum: f64,
    pub imag_part_sum: f64,
    /// `|real_corr_ij| + |imag_corr_ij|`.
    pub per_pair: Vec<Vec<f64>>,
}

impl NonclassicalityReport {
    fn from_terms(real: &[Vec<f64>], imag: &[Vec<f64>]) -> Self {
        let d = real.len();
        let mut real_part_sum = 0.0;
        let mut imag_part_sum = 0.0;
        let mut per_pair = vec![vec![0.0; d]; d];
        for i in 0..d {
            for j in 0..d {
                let (r, m) = (real[i][j].abs(), imag[i][j].abs());
                real_part_sum += r;
                imag_part_sum += m;
                per_pair[i][j] = r + m;
            }
        }
        Self {
            total: real_part_sum + imag_part_sum,
            real_part_sum,
            imag_part_sum,
            per_pair,
        }
    }
}

/// `1/2 sum_ij |Tr((rho - rho'_i) P_f)| + 1/2 sum_ij |Tr((rho - rho'_i) P_f^{pi/2})|`
/// with the binary dephasing.
pub fn nonclassicality(rho: &DensityOperator, a: &ObservableSpec, f: &Basis) -> Result<NonclassicalityReport> {
    nonclassicality_with(rho, a, f, DephasingConvention::Binary)
}

pub fn nonclassicality_with(
    rho: &DensityOperator,
    a: &ObservableSpec,
    f: &Basis,
    convention: DephasingConvention,
) -> Result<NonclassicalityReport> {
    rho.check_dim("observable basis", a.dim())?;
    rho.check_dim("postselection basis", f.dim())?;
    let d = rho.dim();
    let full = match convention {
        DephasingConvention::Full => Some(full_dephase(rho, a)?),
        DephasingConvention::Binary => None,
    };
    let mut real = vec![vec![0.0; d]; d];
    let mut imag = vec![vec![0.0; d]; d];
    for i in 0..d {
        let disturbed = match &full {
            Some(m) => m.clone(),
            None => binary_dephase(rho, a, i)?,
        };
        let diff = rho.matrix().sub(disturbed.matrix());
        for j in 0..d {
            real[i][j] = 0.5 * diff.matmul(&f.projector(j)).trace().re;
            imag[i][j] = 0.5 * diff.matmul(&phase_rotated_projector(f, j, a, i)?).trace().re;
        }
    }
    Ok(NonclassicalityReport::from_terms(&real, &imag))
}

pub fn nonclassicality_from_parts(parts: &JohansenParts) -> NonclassicalityReport {
    NonclassicalityReport::from_terms(&parts.real_corr, &parts.imag_corr)
}

/// Same measure read off a table and its Wigner part:
/// `sum_ij |Re Q_ij - W_ij| + |Im Q_ij|`.
pub fn nonclassicality_from_tables(q: &KdTable, w: &[Vec<f64>]) -> NonclassicalityReport {
    let d = q.dim();
    let real: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| q.entry(i, j).re - w[i][j]).collect())
        .collect();
    let imag: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| q.entry(i, j).im).collect()).collect();
    NonclassicalityReport::from_terms(&real, &imag)
}

/// `Q0 - W`, the part of the table damped by decoherence.
pub fn delta_q(q0: &KdTable, w: &[Vec<f64>]) -> CMatrix {
    let d = q0.dim();
    CMatrix::from_fn(d, d, |i, j| q0.entry(i, j) - C64::new(w[i][j], 0.0))
}

/// Coherence terms `<a_i|rho|a_k><a_k|f_j><f_j|a_i>` indexed `[i][k][j]`,
/// zero for `k = i`. Summing over `k` gives `Q_ij - W_ij`.
pub fn coherence_terms(rho: &DensityOperator, a: &ObservableSpec, f: &Basis) -> Result<Vec<Vec<Vec<C64>>>> {
    rho.check_dim("observable basis", a.dim())?;
    rho.check_dim("postselection basis", f.dim())?;
    let d = rho.dim();
    let in_a = rho.in_basis(a.basis());
    let overlap = f.matrix().adjoint().matmul(a.basis().matrix());
    Ok((0..d)
        .map(|i| {
            (0..d)
                .map(|k| {
                    (0..d)
                        .map(|j| {
                            if k == i {
                                C64::new(0.0, 0.0)
                            } else {
                                in_a[(i, k)] * overlap[(j, k)].conj() * overlap[(j, i)]
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayPoint {
    pub t: f64,
    /// Scalar factor `min_{i != k} F_ik` (the only factor when `d = 2`).
    pub decoherence: f64,
    pub n_t: f64,
    pub predicted: f64,
    pub residual: f64,
    /// The linear law is exact only with a single eigenvalue gap (`d = 2`).
    pub law_is_exact: bool,
}

/// Compare `N[rho(t)]` with `F N[rho(0)]` along a set of pointer configs.
/// Residuals for `d > 2` are reported, not judged.
pub fn decay_check(
    rho: &DensityOperator,
    a: &ObservableSpec,
    f: &Basis,
    configs: &[PointerConfig],
) -> Result<Vec<DecayPoint>> {
    let n0 = nonclassicality(rho, a, f)?.total;
    let law_is_exact = a.dim() == 2;
    configs
        .iter()
        .map(|cfg| {
            let factors = decoherence_factors(cfg, a);
            let scalar = factors.min_off_diagonal();
            let state = reduced_state_with_factors(rho, a, &factors)?;
            let n_t = nonclassicality(&state, a, f)?.total;
            let predicted = scalar * n0;
            Ok(DecayPoint {
                t: cfg.t(),
                decoherence: scalar,
                n_t,
                predicted,
                residual: (n_t - predicted).abs(),
                law_is_exact,
            })
        })
        .collect()
}
