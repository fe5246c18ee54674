//! Scenario files: one JSON document naming the state, the measured
//! observable, the postselection basis and optional pointer/grid settings.
//!
//! ```json
//! {
//!   "dim": 2,
//!   "state": { "pure": [[1, 0], [1, 0]] },
//!   "a_observable": { "eigenvalues": [1, -1], "basis": "identity" },
//!   "f_basis": "fourier",
//!   "postselect_index": 0,
//!   "pointer": { "sigma": 1.0, "g": 1.0 },
//!   "grid": { "t_values": [0.0, 0.5, 1.0] }
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs; explicit bases are lists of columns.

use std::path::Path;

use kdq_core::{
    bloch_state, fourier_basis, pure_state, validate_density, Basis, CMatrix, DensityOperator, ObservableSpec,
    PointerConfig, SweepGrid,
};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type Pair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub dim: usize,
    pub state: StateSpec,
    pub a_observable: ObservableDef,
    pub f_basis: BasisDef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub postselect_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pointer: Option<PointerDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pure: Option<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Vec<Vec<Pair>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableDef {
    pub eigenvalues: Vec<f64>,
    #[serde(default = "identity_basis")]
    pub basis: BasisDef,
}

fn identity_basis() -> BasisDef {
    BasisDef::Named("identity".into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisDef {
    /// `identity` (alias `computational`) or `fourier`.
    Named(String),
    Columns(Vec<Vec<Pair>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointerDef {
    pub sigma: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_values: Option<Vec<f64>>,
}

/// A scenario with every object constructed and checked.
#[derive(Debug, Clone)]
pub struct Setup {
    pub scenario: Scenario,
    pub rho: DensityOperator,
    pub a: ObservableSpec,
    pub f: Basis,
}

fn c(p: &Pair) -> C64 {
    C64::new(p[0], p[1])
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        parse_json(path, &read_text(path)?)
    }

    pub fn build(self) -> Result<Setup, CliError> {
        let d = self.dim;
        if d < 2 {
            return Err(CliError::validation("dim", format!("must be at least 2, got {d}")));
        }
        let rho = build_state(&self.state, d)?;
        let a_basis = build_basis(&self.a_observable.basis, d, "a_observable.basis")?;
        if self.a_observable.eigenvalues.len() != d {
            return Err(CliError::validation(
                "a_observable.eigenvalues",
                format!(
                    "expected {d} eigenvalues, found {}",
                    self.a_observable.eigenvalues.len()
                ),
            ));
        }
        let a = ObservableSpec::new(self.a_observable.eigenvalues.clone(), a_basis)
            .map_err(|e| CliError::validation("a_observable.eigenvalues", e))?;
        let f = build_basis(&self.f_basis, d, "f_basis")?;
        if let Some(j) = self.postselect_index {
            if j >= d {
                return Err(CliError::validation(
                    "postselect_index",
                    format!("{j} out of range for dimension {d}"),
                ));
            }
        }
        if let Some(p) = &self.pointer {
            PointerConfig::new(p.sigma, p.g, 0.0).map_err(|e| CliError::validation("pointer", e))?;
        }
        if let Some(g) = &self.grid {
            match (&g.f_values, &g.t_values) {
                (Some(_), Some(_)) | (None, None) => {
                    return Err(CliError::validation(
                        "grid",
                        "exactly one of `f_values` or `t_values` is required",
                    ))
                }
                (Some(v), None) => {
                    if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
                        return Err(CliError::validation("grid.f_values", format!("non-finite value {bad}")));
                    }
                }
                (None, Some(v)) => {
                    if let Some(bad) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
                        return Err(CliError::validation("grid.t_values", format!("invalid time {bad}")));
                    }
                }
            }
        }
        Ok(Setup {
            scenario: self,
            rho,
            a,
            f,
        })
    }
}

impl Setup {
    pub fn postselect_index(&self) -> Result<usize, CliError> {
        self.scenario
            .postselect_index
            .ok_or_else(|| CliError::validation("postselect_index", "required by this command"))
    }

    pub fn pointer(&self) -> Result<PointerDef, CliError> {
        self.scenario
            .pointer
            .ok_or_else(|| CliError::validation("pointer", "required by this command"))
    }

    pub fn sweep_grid(&self) -> Result<SweepGrid, CliError> {
        let grid = self
            .scenario
            .grid
            .as_ref()
            .ok_or_else(|| CliError::validation("grid", "required by this command"))?;
        if let Some(f) = &grid.f_values {
            return Ok(SweepGrid::Decoherence(f.clone()));
        }
        let times = grid.t_values.clone().unwrap_or_default();
        let p = self
            .pointer()
            .map_err(|_| CliError::validation("pointer", "required for a `t_values` grid"))?;
        Ok(SweepGrid::Time {
            sigma: p.sigma,
            g: p.g,
            times,
        })
    }

    /// Pointer configurations for each time in a `t_values` grid.
    pub fn time_configs(&self) -> Result<Vec<PointerConfig>, CliError> {
        let p = self.pointer()?;
        let times = self
            .scenario
            .grid
            .as_ref()
            .and_then(|g| g.t_values.clone())
            .ok_or_else(|| CliError::validation("grid.t_values", "required by this command"))?;
        times
            .iter()
            .map(|&t| PointerConfig::new(p.sigma, p.g, t).map_err(|e| CliError::validation("grid.t_values", e)))
            .collect()
    }
}

fn build_state(spec: &StateSpec, d: usize) -> Result<DensityOperator, CliError> {
    let present = [spec.bloch.is_some(), spec.pure.is_some(), spec.density.is_some()]
        .iter()
        .filter(|p| **p)
        .count();
    if present != 1 {
        return Err(CliError::validation(
            "state",
            format!("exactly one of `bloch`, `pure`, `density` is required, found {present}"),
        ));
    }
    let rho = if let Some([x, y, z]) = spec.bloch {
        if d != 2 {
            return Err(CliError::validation(
                "state.bloch",
                format!("Bloch states need dim 2, got {d}"),
            ));
        }
        bloch_state(x, y, z).map_err(|e| CliError::validation("state.bloch", e))?
    } else if let Some(amps) = &spec.pure {
        if amps.len() != d {
            return Err(CliError::validation(
                "state.pure",
                format!("expected {d} amplitudes, found {}", amps.len()),
            ));
        }
        let v: Vec<C64> = amps.iter().map(c).collect();
        pure_state(&v).map_err(|e| CliError::validation("state.pure", e))?
    } else {
        let rows = spec.density.as_ref().expect("one form present");
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(CliError::validation(
                "state.density",
                format!("expected a {d}x{d} matrix"),
            ));
        }
        let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(c).collect()).collect();
        let m = CMatrix::from_rows(&rows).map_err(|e| CliError::validation("state.density", e))?;
        DensityOperator::new(m).map_err(|e| CliError::validation("state.density", e))?
    };
    let report = validate_density(&rho);
    if !report.passes {
        return Err(CliError::validation("state", report));
    }
    Ok(rho)
}

fn build_basis(def: &BasisDef, d: usize, field: &str) -> Result<Basis, CliError> {
    match def {
        BasisDef::Named(name) => match name.as_str() {
            "identity" | "computational" => Ok(Basis::computational(d)),
            "fourier" => fourier_basis(d).map_err(|e| CliError::validation(field, e)),
            other => Err(CliError::validation(
                field,
                format!("unknown basis `{other}` (expected identity, computational, fourier or a column list)"),
            )),
        },
        BasisDef::Columns(cols) => {
            if cols.len() != d || cols.iter().any(|col| col.len() != d) {
                return Err(CliError::validation(
                    field,
                    format!("expected {d} columns of length {d}"),
                ));
            }
            let cols: Vec<Vec<C64>> = cols.iter().map(|col| col.iter().map(c).collect()).collect();
            Basis::from_columns("explicit", &cols).map_err(|e| CliError::validation(field, e))
        }
    }
}

/// Rebuild a basis from a table label, when the label names one.
pub fn basis_from_label(label: &str, d: usize) -> Option<Basis> {
    match label {
        "computational" | "identity" => Some(Basis::computational(d)),
        "fourier" => fourier_basis(d).ok(),
        _ => None,
    }
}
