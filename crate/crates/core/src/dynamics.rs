//! Gaussian-pointer von Neumann measurement and the weak-to-strong
//! transition of the KD table.
//!
//! The coupling `g A (x) P` shifts the pointer packet attached to `|a_i>` by
//! `g a_i t`. Tracing the pointer out multiplies each coherence `rho_ik` by
//! the packet overlap
//!
//! ```text
//! F_ik = exp(-[g (a_i - a_k) t]^2 / (8 sigma^2))
//! ```
//!
//! and leaves populations untouched. Pointer free evolution is ignored.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{KdError, Result};
use crate::kd::{kd_table, wigner_table, KdTable};
use crate::linalg::{Basis, CMatrix, DensityOperator, ObservableSpec};
use crate::nonclassicality::{nonclassicality, nonclassicality_from_tables};

/// Gaussian exponent past which the pointer is treated as fully decohering
/// (`F < 5e-18`).
pub const STRONG_LIMIT_EXPONENT: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointerConfig {
    sigma: f64,
    g: f64,
    t: f64,
}

impl PointerConfig {
    pub fn new(sigma: f64, g: f64, t: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(KdError::InvalidPointer(format!("sigma must be positive, got {sigma}")));
        }
        if !(g > 0.0 && g.is_finite()) {
            return Err(KdError::InvalidPointer(format!("g must be positive, got {g}")));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(KdError::InvalidPointer(format!("t must be non-negative, got {t}")));
        }
        Ok(Self { sigma, g, t })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn at_time(&self, t: f64) -> Result<Self> {
        Self::new(self.sigma, self.g, t)
    }

    /// `[g (a_i - a_k) t]^2 / (8 sigma^2)`.
    pub fn exponent(&self, a_i: f64, a_k: f64) -> f64 {
        let dx = self.g * (a_i - a_k) * self.t;
        dx * dx / (8.0 * self.sigma * self.sigma)
    }
}

pub fn pointer_overlap(cfg: &PointerConfig, a_i: f64, a_k: f64) -> f64 {
    (-cfg.exponent(a_i, a_k)).exp()
}

/// Time at which `F_ik` falls to `1/e`: `2 sqrt(2) sigma / (g |a_i - a_k|)`.
///
/// Infinite for equal eigenvalues.
pub fn decoherence_time(sigma: f64, g: f64, a_i: f64, a_k: f64) -> f64 {
    2.0 * std::f64::consts::SQRT_2 * sigma / (g * (a_i - a_k).abs())
}

/// Interaction time at which the overlap for an eigenvalue gap reaches `f`.
pub fn time_for_overlap(sigma: f64, g: f64, gap: f64, f: f64) -> Result<f64> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(KdError::InvalidDecoherence(f));
    }
    if !(gap != 0.0 && gap.is_finite()) {
        return Err(KdError::InvalidPointer("eigenvalue gap must be non-zero".into()));
    }
    Ok((-8.0 * sigma * sigma * f.ln()).sqrt() / (g * gap.abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoherenceFactors {
    pairwise: Vec<Vec<f64>>,
}

impl DecoherenceFactors {
    pub fn dim(&self) -> usize {
        self.pairwise.len()
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.pairwise[i][k]
    }

    pub fn pairwise(&self) -> &[Vec<f64>] {
        &self.pairwise
    }

    /// `min_{i != k} F_ik`; the scalar `F` reported for pairwise evolution.
    pub fn min_off_diagonal(&self) -> f64 {
        let d = self.dim();
        let mut m: f64 = 1.0;
        for i in 0..d {
            for k in 0..d {
                if i != k {
                    m = m.min(self.pairwise[i][k]);
                }
            }
        }
        m
    }
}

pub fn decoherence_factors(cfg: &PointerConfig, a: &ObservableSpec) -> DecoherenceFactors {
    let ev = a.eigenvalues();
    let pairwise = ev
        .iter()
        .map(|&ai| ev.iter().map(|&ak| pointer_overlap(cfg, ai, ak)).collect())
        .collect();
    DecoherenceFactors { pairwise }
}

/// System state after the pointer is traced out.
pub fn reduced_state(rho: &DensityOperator, a: &ObservableSpec, cfg: &PointerConfig) -> Result<DensityOperator> {
    reduced_state_with_factors(rho, a, &decoherence_factors(cfg, a))
}

pub fn reduced_state_with_factors(
    rho: &DensityOperator,
    a: &ObservableSpec,
    factors: &DecoherenceFactors,
) -> Result<DensityOperator> {
    rho.check_dim("observable basis", a.dim())?;
    rho.check_dim("decoherence factors", factors.dim())?;
    let d = a.dim();
    let v = a.basis().matrix();
    let in_a = rho.in_basis(a.basis());
    let kernel = CMatrix::from_fn(d, d, |i, k| {
        if i == k {
            C64::new(1.0, 0.0)
        } else {
            C64::new(factors.get(i, k), 0.0)
        }
    });
    let damped = in_a.hadamard(&kernel);
    let mut m = v.matmul(&damped).matmul(&v.adjoint());
    // the result is Hermitian by construction; remove rounding asymmetry
    let h = m.adjoint();
    m = m.add(&h).scale(C64::new(0.5, 0.0));
    Ok(DensityOperator::from_matrix_unchecked(m))
}

/// `Q_ij(rho(t)) = Tr(P_{a_i} rho(t) P_{f_j})` with exact pairwise damping.
pub fn dynamical_kd_exact(
    rho: &DensityOperator,
    a: &ObservableSpec,
    f: &Basis,
    cfg: &PointerConfig,
) -> Result<KdTable> {
    kd_table(&reduced_state(rho, a, cfg)?, a, f)
}

/// Single-factor interpolation `F Q0 + (1 - F) W`.
pub fn dynamical_kd_interp(q0: &KdTable, w: &[Vec<f64>], f: f64) -> Result<KdTable> {
    if !(0.0..=1.0).contains(&f) {
        return Err(KdError::InvalidDecoherence(f));
    }
    let d = q0.dim();
    if w.len() != d || w.iter().any(|row| row.len() != d) {
        return Err(KdError::DimensionMismatch {
            what: "Wigner table",
            expected: d,
            found: w.len(),
        });
    }
    let entries = CMatrix::from_fn(d, d, |i, j| q0.entry(i, j) * f + C64::new((1.0 - f) * w[i][j], 0.0));
    KdTable::from_entries(entries, q0.a_basis().clone(), q0.f_basis().clone())
}

/// `A_T = sum_i a_i Qt_ij / sum_i Qt_ij`.
pub fn general_value(qt: &KdTable, a: &ObservableSpec, j: usize) -> Result<C64> {
    let d = qt.dim();
    if a.dim() != d {
        return Err(KdError::DimensionMismatch {
            what: "observable",
            expected: d,
            found: a.dim(),
        });
    }
    if j >= d {
        return Err(KdError::IndexOutOfRange { index: j, dim: d });
    }
    let denom = qt.column_sum(j);
    if !(denom.norm() > crate::values::POSTSELECTION_FLOOR) {
        return Err(KdError::ImpossiblePostselection {
            probability: denom.norm(),
        });
    }
    let num: C64 = (0..d).map(|i| qt.entry(i, j) * a.eigenvalues()[i]).sum();
    Ok(num / denom)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepGrid {
    /// Scalar decoherence factors in `[0, 1]`, evaluated by interpolation.
    Decoherence(Vec<f64>),
    /// Interaction times for a fixed pointer, evaluated exactly.
    Time { sigma: f64, g: f64, times: Vec<f64> },
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        match self {
            SweepGrid::Decoherence(v) => v.len(),
            SweepGrid::Time { times, .. } => times.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mode(&self) -> &'static str {
        match self {
            SweepGrid::Decoherence(_) => "F",
            SweepGrid::Time { .. } => "t",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionPoint {
    pub index: usize,
    /// Scalar `F`; `min_{i != k} F_ik` in time mode.
    pub decoherence: f64,
    pub time: Option<f64>,
    pub table: KdTable,
    pub value: C64,
    pub nonclassicality: f64,
    /// Time mode only: `max_ij |Q_exact - (F Q0 + (1 - F) W)|`.
    pub max_interp_residual: Option<f64>,
}

/// Evaluate the transition along a grid. Per-point failures are returned in
/// place, tagged with their grid index; points come back in grid order.
pub fn transition_sweep(
    rho: &DensityOperator,
    a: &ObservableSpec,
    f: &Basis,
    j: usize,
    grid: &SweepGrid,
) -> Result<Vec<Result<TransitionPoint>>> {
    let q0 = kd_table(rho, a, f)?;
    let w = wigner_table(rho, a, f)?;
    if j >= a.dim() {
        return Err(KdError::IndexOutOfRange { index: j, dim: a.dim() });
    }
    let tag = |index: usize| {
        move |e: KdError| KdError::AtGridPoint {
            index,
            source: Box::new(e),
        }
    };
    let points = match grid {
        SweepGrid::Decoherence(values) => values
            .iter()
            .enumerate()
            .map(|(index, &fv)| {
                let table = dynamical_kd_interp(&q0, &w, fv).map_err(tag(index))?;
                let value = general_value(&table, a, j).map_err(tag(index))?;
                let nonclassicality = nonclassicality_from_tables(&table, &w).total;
                Ok(TransitionPoint {
                    index,
                    decoherence: fv,
                    time: None,
                    table,
                    value,
                    nonclassicality,
                    max_interp_residual: None,
                })
            })
            .collect(),
        SweepGrid::Time { sigma, g, times } => times
            .iter()
            .enumerate()
            .map(|(index, &t)| {
                let cfg = PointerConfig::new(*sigma, *g, t).map_err(tag(index))?;
                let factors = decoherence_factors(&cfg, a);
                let scalar = factors.min_off_diagonal();
                let state = reduced_state_with_factors(rho, a, &factors).map_err(tag(index))?;
                let table = kd_table(&state, a, f).map_err(tag(index))?;
                let interp = dynamical_kd_interp(&q0, &w, scalar).map_err(tag(index))?;
                let residual = table.entries().max_abs_diff(interp.entries());
                let value = general_value(&table, a, j).map_err(tag(index))?;
                let nonclassicality = nonclassicality(&state, a, f).map_err(tag(index))?.total;
                Ok(TransitionPoint {
                    index,
                    decoherence: scalar,
                    time: Some(t),
                    table,
                    value,
                    nonclassicality,
                    max_interp_residual: Some(residual),
                })
            })
            .collect(),
    };
    Ok(points)
}
