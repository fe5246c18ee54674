//! Seeded random states, bases and observables for sweeps, benches and
//! property checks.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{Basis, CMatrix, DensityOperator, ObservableSpec};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityOperator {
    let psi = random_unit_vector(d, rng);
    DensityOperator::from_matrix_unchecked(CMatrix::outer(&psi, &psi))
}

pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| gaussian_c64(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Full-rank mixed state from the Ginibre ensemble, `G G^dagger / Tr`.
pub fn random_mixed_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityOperator {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian_c64(rng));
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    let mut m = m.scale(C64::new(1.0 / tr, 0.0));
    // symmetrize away rounding
    let h = m.adjoint();
    m = m.add(&h).scale(C64::new(0.5, 0.0));
    DensityOperator::from_matrix_unchecked(m)
}

/// Pure with probability one half, otherwise Ginibre-mixed.
pub fn random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityOperator {
    if rng.random_bool(0.5) {
        random_pure_state(d, rng)
    } else {
        random_mixed_state(d, rng)
    }
}

/// Haar-random orthonormal basis via Gram-Schmidt on a Ginibre matrix.
pub fn random_basis<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Basis {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<C64> = (0..d).map(|_| gaussian_c64(rng)).collect();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for u in &cols {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vk, uk) in v.iter_mut().zip(u) {
                    *vk -= proj * uk;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    Basis::from_columns("random", &cols).expect("Gram-Schmidt output is orthonormal")
}

/// Random observable with eigenvalues drawn uniformly from `[-2, 2]`
/// (re-drawn until pairwise separated by at least 0.05) and a Haar basis.
pub fn random_observable<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ObservableSpec {
    let eigenvalues = loop {
        let ev: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let separated = (0..d).all(|i| ((i + 1)..d).all(|k| (ev[i] - ev[k]).abs() >= 0.05));
        if separated {
            break ev;
        }
    };
    ObservableSpec::new(eigenvalues, random_basis(d, rng)).expect("separated spectrum")
}
