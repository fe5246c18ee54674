//! Expectation, ABL conditional and weak values read off KD data.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{KdError, Result};
use crate::kd::{full_dephase, johansen_decompose, kd_table, wigner_table, JohansenParts, KdTable};
use crate::linalg::{Basis, DensityOperator, ObservableSpec};

/// Postselection probabilities at or below this are treated as zero.
pub const POSTSELECTION_FLOOR: f64 = 1e-12;

/// `<A> = sum_i a_i Tr(rho P_{a_i})`.
pub fn expectation(rho: &DensityOperator, a: &ObservableSpec) -> Result<f64> {
    rho.check_dim("observable basis", a.dim())?;
    let diag = rho.in_basis(a.basis());
    Ok(a.eigenvalues()
        .iter()
        .enumerate()
        .map(|(i, ai)| ai * diag[(i, i)].re)
        .sum())
}

/// ABL value `sum_i a_i W_ij / sum_i W_ij` for postselection on `|f_j>`.
pub fn conditional_value(rho: &DensityOperator, a: &ObservableSpec, f: &Basis, j: usize) -> Result<f64> {
    let w = wigner_table(rho, a, f)?;
    conditional_value_from_wigner(&w, a, j)
}

pub fn conditional_value_from_wigner(w: &[Vec<f64>], a: &ObservableSpec, j: usize) -> Result<f64> {
    let d = a.dim();
    if w.len() != d {
        return Err(KdError::DimensionMismatch {
            what: "Wigner table",
            expected: d,
            found: w.len(),
        });
    }
    if j >= d {
        return Err(KdError::IndexOutOfRange { index: j, dim: d });
    }
    let denom: f64 = (0..d).map(|i| w[i][j]).sum();
    if !(denom > POSTSELECTION_FLOOR) {
        return Err(KdError::ImpossiblePostselection { probability: denom });
    }
    let num: f64 = (0..d).map(|i| a.eigenvalues()[i] * w[i][j]).sum();
    Ok(num / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeakValueResult {
    pub value: C64,
    /// `sum_i a_i Q_ij`.
    pub numerator: C64,
    /// `p(f_j|rho)`.
    pub denominator: f64,
    /// `sum_i a_i W_ij / p(f_j|rho)`.
    pub wigner_part: f64,
    /// `sum_i a_i (real_corr_ij + i imag_corr_ij) / p(f_j|rho)`.
    pub correction_part: C64,
}

impl WeakValueResult {
    pub fn is_anomalous(&self, a: &ObservableSpec) -> bool {
        self.value.im.abs() > 1e-10
            || self.value.re < a.min_eigenvalue() - 1e-10
            || self.value.re > a.max_eigenvalue() + 1e-10
    }
}

pub fn weak_value(rho: &DensityOperator, a: &ObservableSpec, f: &Basis, j: usize) -> Result<WeakValueResult> {
    let q = kd_table(rho, a, f)?;
    let parts = johansen_decompose(rho, a, f)?;
    weak_value_from_parts(&q, &parts, a, j)
}

/// Weak value from precomputed tables; identical to [`weak_value`] for the
/// same inputs.
pub fn weak_value_from_parts(
    q: &KdTable,
    parts: &JohansenParts,
    a: &ObservableSpec,
    j: usize,
) -> Result<WeakValueResult> {
    let d = q.dim();
    if a.dim() != d || parts.dim() != d {
        return Err(KdError::DimensionMismatch {
            what: "KD data",
            expected: a.dim(),
            found: if parts.dim() != d { parts.dim() } else { d },
        });
    }
    if j >= d {
        return Err(KdError::IndexOutOfRange { index: j, dim: d });
    }
    // column sums of Q are real up to rounding
    let denominator = q.column_sum(j).re;
    if !(denominator > POSTSELECTION_FLOOR) {
        return Err(KdError::OrthogonalPostselection {
            probability: denominator,
        });
    }
    let ev = a.eigenvalues();
    let numerator: C64 = (0..d).map(|i| q.entry(i, j) * ev[i]).sum();
    let wigner_num: f64 = (0..d).map(|i| ev[i] * parts.wigner[i][j]).sum();
    let corr_num: C64 = (0..d)
        .map(|i| C64::new(parts.real_corr[i][j], parts.imag_corr[i][j]) * ev[i])
        .sum();
    Ok(WeakValueResult {
        value: numerator / denominator,
        numerator,
        denominator,
        wigner_part: wigner_num / denominator,
        correction_part: corr_num / denominator,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DenominatorComparison {
    /// `Tr(rho' P_{f_j})` with `rho'` fully dephased in the `A` basis.
    pub strong_prob: f64,
    /// `Tr(rho P_{f_j})`.
    pub weak_prob: f64,
    /// `weak_prob - strong_prob`.
    pub gap: f64,
}

pub fn denominator_compare(
    rho: &DensityOperator,
    a: &ObservableSpec,
    f: &Basis,
    j: usize,
) -> Result<DenominatorComparison> {
    rho.check_dim("postselection basis", f.dim())?;
    if j >= f.dim() {
        return Err(KdError::IndexOutOfRange { index: j, dim: f.dim() });
    }
    let pf = f.projector(j);
    let strong_prob = full_dephase(rho, a)?.expectation_of(&pf).re;
    let weak_prob = rho.expectation_of(&pf).re;
    Ok(DenominatorComparison {
        strong_prob,
        weak_prob,
        gap: weak_prob - strong_prob,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{bloch_state, fourier_basis, pure_state, CMatrix};
    use crate::random::{random_basis, random_observable, random_state, seeded};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rotated_basis(theta: f64) -> Basis {
        Basis::from_columns(
            "rotated",
            &[
                vec![c(theta.cos(), 0.0), c(theta.sin(), 0.0)],
                vec![c(-theta.sin(), 0.0), c(theta.cos(), 0.0)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn expectation_examples() {
        let z = ObservableSpec::pauli_z();
        assert!((expectation(&bloch_state(0.0, 0.0, 1.0).unwrap(), &z).unwrap() - 1.0).abs() < 1e-15);
        assert!(expectation(&bloch_state(0.0, 0.0, 0.0).unwrap(), &z).unwrap().abs() < 1e-15);

        let plus = pure_state(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let x = fourier_basis(2).unwrap();
        let q = kd_table(&plus, &z, &x).unwrap();
        let via_kd: f64 = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| (q.entry(i, j) * z.eigenvalues()[i]).re)
            .sum();
        assert!(expectation(&plus, &z).unwrap().abs() < 1e-15);
        assert!(via_kd.abs() < 1e-12);
    }

    #[test]
    fn conditional_value_examples() {
        let z = ObservableSpec::pauli_z();
        let x = fourier_basis(2).unwrap();
        let up = bloch_state(0.0, 0.0, 1.0).unwrap();
        assert!((conditional_value(&up, &z, &x, 1).unwrap() - 1.0).abs() < 1e-12);
        let plus = pure_state(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(conditional_value(&plus, &z, &x, 0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn conditional_value_impossible_postselection() {
        let z = ObservableSpec::pauli_z();
        let up = bloch_state(0.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            conditional_value(&up, &z, &Basis::computational(2), 1),
            Err(KdError::ImpossiblePostselection { .. })
        ));
    }

    #[test]
    fn weak_value_of_eigenstate_is_eigenvalue() {
        let z = ObservableSpec::pauli_z();
        let up = bloch_state(0.0, 0.0, 1.0).unwrap();
        let f = random_basis(2, &mut seeded(4));
        for j in 0..2 {
            let w = weak_value(&up, &z, &f, j).unwrap();
            assert!((w.value - c(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn anomalous_weak_value() {
        let theta = 0.7 * PI;
        let oracle = (theta.cos() - theta.sin()) / (theta.cos() + theta.sin());
        let plus = pure_state(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let z = ObservableSpec::pauli_z();
        let w = weak_value(&plus, &z, &rotated_basis(theta), 0).unwrap();
        assert!((w.value.re - oracle).abs() < 1e-10);
        assert!(w.value.im.abs() < 1e-10);
        assert!((w.value.re + 6.3137).abs() < 1e-4);
        assert!(w.is_anomalous(&z));
    }

    #[test]
    fn imaginary_weak_value_from_corrections() {
        let psi = [c(1.0, 0.0), C64::from_polar(1.0, PI / 4.0)];
        let rho = pure_state(&psi).unwrap();
        let z = ObservableSpec::pauli_z();
        let x = fourier_basis(2).unwrap();
        let w = weak_value(&rho, &z, &x, 0).unwrap();
        let parts = johansen_decompose(&rho, &z, &x).unwrap();
        let p0 = rho.expectation_of(&x.projector(0)).re;
        let expected_im: f64 = (0..2).map(|i| z.eigenvalues()[i] * parts.imag_corr[i][0]).sum::<f64>() / p0;
        assert!(w.value.im.abs() > 1e-3);
        assert!((w.value.im - expected_im).abs() < 1e-10);
        assert!((w.value.re - (w.wigner_part + w.correction_part.re)).abs() < 1e-10);
        assert!((w.value - (w.numerator / w.denominator)).norm() < 1e-15);
    }

    #[test]
    fn weak_value_orthogonal_postselection() {
        let z = ObservableSpec::pauli_z();
        let plus = pure_state(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let x = fourier_basis(2).unwrap();
        assert!(matches!(
            weak_value(&plus, &z, &x, 1),
            Err(KdError::OrthogonalPostselection { .. })
        ));
    }

    #[test]
    fn precomputed_path_is_bit_identical() {
        let mut rng = seeded(31);
        let rho = random_state(3, &mut rng);
        let a = random_observable(3, &mut rng);
        let f = random_basis(3, &mut rng);
        let q = kd_table(&rho, &a, &f).unwrap();
        let parts = johansen_decompose(&rho, &a, &f).unwrap();
        let w = wigner_table(&rho, &a, &f).unwrap();
        for j in 0..3 {
            assert_eq!(
                weak_value(&rho, &a, &f, j).unwrap(),
                weak_value_from_parts(&q, &parts, &a, j).unwrap()
            );
            assert_eq!(
                conditional_value(&rho, &a, &f, j).unwrap(),
                conditional_value_from_wigner(&w, &a, j).unwrap()
            );
        }
    }

    #[test]
    fn denominator_examples() {
        let z = ObservableSpec::pauli_z();
        let x = fourier_basis(2).unwrap();
        let diag = DensityOperator::new(CMatrix::diagonal(&[c(0.3, 0.0), c(0.7, 0.0)])).unwrap();
        assert!(denominator_compare(&diag, &z, &x, 0).unwrap().gap.abs() < 1e-15);

        let plus = pure_state(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let cmp = denominator_compare(&plus, &z, &x, 0).unwrap();
        assert!((cmp.strong_prob - 0.5).abs() < 1e-12);
        assert!((cmp.weak_prob - 1.0).abs() < 1e-12);
        assert!((cmp.gap - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gap_equals_summed_real_corrections() {
        let mut rng = seeded(37);
        for d in 2..=4 {
            let rho = random_state(d, &mut rng);
            let a = random_observable(d, &mut rng);
            let f = random_basis(d, &mut rng);
            let parts = johansen_decompose(&rho, &a, &f).unwrap();
            for j in 0..d {
                let cmp = denominator_compare(&rho, &a, &f, j).unwrap();
                let summed: f64 = (0..d).map(|i| parts.real_corr[i][j]).sum();
                assert!((cmp.gap - summed).abs() < 1e-10);
                assert!(cmp.gap.abs() <= 1.0);
            }
        }
    }
}
