//! Kirkwood-Dirac quasiprobabilities for finite-dimensional systems.
//!
//! The crate builds KD tables `Q_ij = <a_i|rho|f_j><f_j|a_i>` for a state and
//! a pair of bases, splits them into a classical sequential-measurement part
//! plus quantum corrections, reads expectation, ABL and weak values off them,
//! and follows the table as a Gaussian pointer decoheres the system.
//!
//! ```
//! use kdq_core::{fourier_basis, kd_table, pure_state, weak_value, ObservableSpec};
//! use num_complex::Complex64 as C64;
//!
//! let plus = pure_state(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
//! let z = ObservableSpec::pauli_z();
//! let x = fourier_basis(2).unwrap();
//! let q = kd_table(&plus, &z, &x).unwrap();
//! assert!((q.entry(0, 0).re - 0.5).abs() < 1e-12);
//! assert!(weak_value(&plus, &z, &x, 0).unwrap().value.norm() < 1e-12);
//! ```

// negated float comparisons are used so that NaN inputs are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod io;
pub mod kd;
pub mod linalg;
pub mod nonclassicality;
pub mod random;
pub mod values;

pub use dynamics::{
    decoherence_factors, decoherence_time, dynamical_kd_exact, dynamical_kd_interp, general_value, pointer_overlap,
    reduced_state, time_for_overlap, transition_sweep, DecoherenceFactors, PointerConfig, SweepGrid, TransitionPoint,
};
pub use error::{KdError, Result};
pub use kd::{
    binary_dephase, full_dephase, johansen_decompose, kd_marginals, kd_table, kd_table_reversed_order,
    phase_rotated_projector, reconstruct_state, wigner_table, JohansenParts, KdMarginals, KdTable,
};
pub use linalg::{
    bloch_state, fourier_basis, pure_state, validate_density, validate_density_with, Basis, CMatrix, DensityOperator,
    DensityReport, ObservableSpec, Tolerances,
};
pub use nonclassicality::{
    coherence_terms, decay_check, delta_q, nonclassicality, nonclassicality_from_parts, nonclassicality_from_tables,
    nonclassicality_with, DecayPoint, DephasingConvention, NonclassicalityReport,
};
pub use values::{
    conditional_value, denominator_compare, expectation, weak_value, weak_value_from_parts, DenominatorComparison,
    WeakValueResult,
};
