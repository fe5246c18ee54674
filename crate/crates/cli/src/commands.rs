use std::fmt::Write as _;
use std::path::Path;

use kdq_core::io::{format_f64, write_kd_csv, KdTableRecord};
use kdq_core::{
    conditional_value, decay_check, decoherence_time, denominator_compare, expectation, johansen_decompose,
    kd_marginals, kd_table, nonclassicality_from_parts, reconstruct_state, transition_sweep, validate_density,
    weak_value_from_parts, DensityOperator, KdError, KdTable, ObservableSpec, SweepGrid,
};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::scenario::{basis_from_label, parse_json, read_text, Scenario, Setup};

/// Structural tolerance applied by runtime invariant checks.
const TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A rendered payload plus an optional failure to report after it is written.
#[derive(Debug)]
pub struct RunOutput {
    pub text: String,
    pub failure: Option<CliError>,
}

impl RunOutput {
    fn ok(text: String) -> Self {
        Self { text, failure: None }
    }
}

fn num(x: f64) -> String {
    format_f64(x)
}

fn metadata(command: &str, setup: &Setup, extra: Value) -> Value {
    let mut meta = json!({
        "tool": "kdq",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "conventions": {
            "kd_ordering": "Tr(P_a rho P_f)",
            "dephasing": "binary",
            "scalar_f_time_mode": "min_pairwise",
        },
        "scenario": serde_json::to_value(&setup.scenario).expect("scenario serializes"),
        "a_basis": setup.a.basis().label(),
        "f_basis": setup.f.label(),
        "eigenvalues": setup.a.eigenvalues(),
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut meta, extra) {
        m.extend(e);
    }
    meta
}

fn csv_header_line(meta: &Value) -> String {
    format!("# {}\n", serde_json::to_string(meta).expect("metadata serializes"))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

fn decoherence_times(setup: &Setup) -> Value {
    let Some(p) = setup.scenario.pointer else {
        return Value::Null;
    };
    let ev = setup.a.eigenvalues();
    let mut pairs = Vec::new();
    for i in 0..ev.len() {
        for k in (i + 1)..ev.len() {
            pairs.push(json!({"i": i, "k": k, "tau_d": decoherence_time(p.sigma, p.g, ev[i], ev[k])}));
        }
    }
    Value::Array(pairs)
}

pub fn load(path: &Path) -> Result<Setup, CliError> {
    Scenario::load(path)?.build()
}

struct MarginalCheck {
    row_sums: Vec<f64>,
    col_sums: Vec<f64>,
    total: f64,
    max_born_error: f64,
    residue: f64,
    pass: bool,
}

fn check_marginals(q: &KdTable, rho: &DensityOperator, a: &ObservableSpec) -> Result<MarginalCheck, CliError> {
    let m = kd_marginals(q).map_err(|e| CliError::from_core("table", e))?;
    let d = q.dim();
    let mut max_born_error: f64 = 0.0;
    for i in 0..d {
        let p = rho.expectation_of(&a.projector(i)).re;
        max_born_error = max_born_error.max((m.row_sums[i] - p).abs());
    }
    for j in 0..d {
        let p = rho.expectation_of(&q.f_basis().projector(j)).re;
        max_born_error = max_born_error.max((m.col_sums[j] - p).abs());
    }
    let residue = m.row_imag_residue.max(m.col_imag_residue);
    let pass = max_born_error <= TOL && residue <= TOL && (m.total - 1.0).abs() <= TOL;
    Ok(MarginalCheck {
        row_sums: m.row_sums,
        col_sums: m.col_sums,
        total: m.total,
        max_born_error,
        residue,
        pass,
    })
}

pub fn cmd_table(setup: &Setup, format: Format, reconstruct: bool) -> Result<RunOutput, CliError> {
    let q = kd_table(&setup.rho, &setup.a, &setup.f).map_err(|e| CliError::from_core("f_basis", e))?;
    let check = check_marginals(&q, &setup.rho, &setup.a)?;

    let reconstruction = if reconstruct {
        match reconstruct_state(&q) {
            Ok(back) => {
                let err = back.matrix().max_abs_diff(setup.rho.matrix());
                json!({"status": "ok", "max_abs_error": err})
            }
            Err(e @ KdError::NonInvertible { .. }) => {
                eprintln!("kdq: warning: reconstruction unavailable: {e}");
                json!({"status": "non_invertible", "message": e.to_string()})
            }
            Err(e) => return Err(CliError::from_core("table", e)),
        }
    } else {
        Value::Null
    };

    let meta = metadata("table", setup, json!({}));
    let text = match format {
        Format::Json => {
            let record = KdTableRecord::from_table(&q);
            let mut v = serde_json::to_value(&record).expect("record serializes");
            let obj = v.as_object_mut().expect("record is an object");
            obj.insert("metadata".into(), meta);
            obj.insert(
                "marginals".into(),
                json!({
                    "row_sums": check.row_sums,
                    "col_sums": check.col_sums,
                    "total": check.total,
                    "max_born_error": check.max_born_error,
                    "imag_residue": check.residue,
                    "pass": check.pass,
                }),
            );
            if reconstruct {
                obj.insert("reconstruction".into(), reconstruction);
            }
            pretty(&v)
        }
        Format::Csv => {
            let mut out = csv_header_line(&meta);
            let mut buf = Vec::new();
            write_kd_csv(&q, &mut buf)?;
            out.push_str(std::str::from_utf8(&buf).expect("CSV is UTF-8"));
            let join = |v: &[f64]| v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(",");
            let _ = writeln!(out, "# row_sums,{}", join(&check.row_sums));
            let _ = writeln!(out, "# col_sums,{}", join(&check.col_sums));
            let _ = writeln!(out, "# total,{}", num(check.total));
            let _ = writeln!(out, "# max_born_error,{}", num(check.max_born_error));
            let _ = writeln!(out, "# marginal_check,{}", if check.pass { "PASS" } else { "FAIL" });
            if reconstruct {
                let status = reconstruction["status"].as_str().unwrap_or("unknown");
                let _ = writeln!(out, "# reconstruction,{status}");
            }
            out
        }
    };
    let failure = (!check.pass).then(|| {
        CliError::Invariant(format!(
            "KD marginals off by {:e} (imag residue {:e}, total {})",
            check.max_born_error, check.residue, check.total
        ))
    });
    Ok(RunOutput { text, failure })
}

pub fn cmd_decompose(setup: &Setup, format: Format) -> Result<RunOutput, CliError> {
    let q = kd_table(&setup.rho, &setup.a, &setup.f).map_err(|e| CliError::from_core("f_basis", e))?;
    let parts = johansen_decompose(&setup.rho, &setup.a, &setup.f).map_err(|e| CliError::from_core("f_basis", e))?;
    let report = nonclassicality_from_parts(&parts);
    let d = q.dim();
    let mut max_err: f64 = 0.0;
    let mut max_imag_marginal: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            max_err = max_err.max((parts.recombined(i, j) - q.entry(i, j)).norm());
        }
        let row: f64 = parts.imag_corr[i].iter().sum();
        let col: f64 = (0..d).map(|k| parts.imag_corr[k][i]).sum();
        max_imag_marginal = max_imag_marginal.max(row.abs()).max(col.abs());
    }
    let pass = max_err <= TOL && max_imag_marginal <= TOL;
    let meta = metadata("decompose", setup, json!({}));
    let text = match format {
        Format::Json => pretty(&json!({
            "metadata": meta,
            "parts": parts,
            "nonclassicality": report,
            "max_recombination_error": max_err,
            "max_imag_marginal": max_imag_marginal,
            "pass": pass,
        })),
        Format::Csv => {
            let mut out = csv_header_line(&meta);
            out.push_str("i,j,wigner,real_corr,imag_corr,re_q,im_q\n");
            for i in 0..d {
                for j in 0..d {
                    let z = q.entry(i, j);
                    let _ = writeln!(
                        out,
                        "{i},{j},{},{},{},{},{}",
                        num(parts.wigner[i][j]),
                        num(parts.real_corr[i][j]),
                        num(parts.imag_corr[i][j]),
                        num(z.re),
                        num(z.im)
                    );
                }
            }
            let _ = writeln!(
                out,
                "# nonclassicality,{},{},{}",
                num(report.total),
                num(report.real_part_sum),
                num(report.imag_part_sum)
            );
            let _ = writeln!(out, "# max_recombination_error,{}", num(max_err));
            let _ = writeln!(out, "# decomposition_check,{}", if pass { "PASS" } else { "FAIL" });
            out
        }
    };
    let failure = (!pass).then(|| {
        CliError::Invariant(format!(
            "decomposition error {max_err:e}, imaginary marginal {max_imag_marginal:e}"
        ))
    });
    Ok(RunOutput { text, failure })
}

pub fn cmd_values(setup: &Setup, format: Format) -> Result<RunOutput, CliError> {
    let j = setup.postselect_index()?;
    let (rho, a, f) = (&setup.rho, &setup.a, &setup.f);
    let core = |e| CliError::from_core("postselect_index", e);
    let q = kd_table(rho, a, f).map_err(core)?;
    let parts = johansen_decompose(rho, a, f).map_err(core)?;
    let exp = expectation(rho, a).map_err(core)?;
    let wv = weak_value_from_parts(&q, &parts, a, j).map_err(core)?;
    let abl = conditional_value(rho, a, f, j).map_err(core)?;
    let den = denominator_compare(rho, a, f, j).map_err(core)?;
    let anomalous = wv.is_anomalous(a);
    let meta = metadata("values", setup, json!({}));
    let text = match format {
        Format::Json => pretty(&json!({
            "metadata": meta,
            "postselect_index": j,
            "expectation": exp,
            "conditional_value": abl,
            "weak_value": {"re": wv.value.re, "im": wv.value.im},
            "weak_value_split": {
                "numerator": {"re": wv.numerator.re, "im": wv.numerator.im},
                "denominator": wv.denominator,
                "wigner_part": wv.wigner_part,
                "correction_part": {"re": wv.correction_part.re, "im": wv.correction_part.im},
            },
            "denominators": den,
            "anomalous": anomalous,
        })),
        Format::Csv => {
            let mut out = csv_header_line(&meta);
            out.push_str("quantity,value\n");
            let rows = [
                ("expectation", exp),
                ("conditional_value", abl),
                ("weak_value_re", wv.value.re),
                ("weak_value_im", wv.value.im),
                ("wigner_part", wv.wigner_part),
                ("correction_part_re", wv.correction_part.re),
                ("correction_part_im", wv.correction_part.im),
                ("numerator_re", wv.numerator.re),
                ("numerator_im", wv.numerator.im),
                ("denominator", wv.denominator),
                ("strong_prob", den.strong_prob),
                ("weak_prob", den.weak_prob),
                ("gap", den.gap),
            ];
            for (k, v) in rows {
                let _ = writeln!(out, "{k},{}", num(v));
            }
            let _ = writeln!(out, "anomalous,{anomalous}");
            out
        }
    };
    Ok(RunOutput::ok(text))
}

pub fn cmd_transition(setup: &Setup, format: Format) -> Result<RunOutput, CliError> {
    let j = setup.postselect_index()?;
    let grid = setup.sweep_grid()?;
    let points =
        transition_sweep(&setup.rho, &setup.a, &setup.f, j, &grid).map_err(|e| CliError::from_core("grid", e))?;
    let times: Vec<Option<f64>> = match &grid {
        SweepGrid::Decoherence(v) => vec![None; v.len()],
        SweepGrid::Time { times, .. } => times.iter().copied().map(Some).collect(),
    };
    let factors: Vec<Option<f64>> = match &grid {
        SweepGrid::Decoherence(v) => v.iter().copied().map(Some).collect(),
        SweepGrid::Time { .. } => vec![None; grid.len()],
    };
    let meta = metadata(
        "transition",
        setup,
        json!({
            "mode": grid.mode(),
            "pointer": setup.scenario.pointer,
            "decoherence_times": decoherence_times(setup),
        }),
    );
    let text = match format {
        Format::Json => {
            let rows: Vec<Value> = points
                .iter()
                .enumerate()
                .map(|(idx, p)| match p {
                    Ok(p) => json!({
                        "index": p.index,
                        "F": p.decoherence,
                        "t": p.time,
                        "A_T": {"re": p.value.re, "im": p.value.im},
                        "N_t": p.nonclassicality,
                        "max_interp_residual": p.max_interp_residual,
                        "error": null,
                    }),
                    Err(e) => json!({
                        "index": idx,
                        "F": factors[idx],
                        "t": times[idx],
                        "error": e.to_string(),
                    }),
                })
                .collect();
            pretty(&json!({"metadata": meta, "points": rows}))
        }
        Format::Csv => {
            let mut out = csv_header_line(&meta);
            out.push_str("index,F,t,re_AT,im_AT,N_t,max_interp_residual,error\n");
            let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
            for (idx, p) in points.iter().enumerate() {
                match p {
                    Ok(p) => {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},{},{},",
                            p.index,
                            num(p.decoherence),
                            opt(p.time),
                            num(p.value.re),
                            num(p.value.im),
                            num(p.nonclassicality),
                            opt(p.max_interp_residual)
                        );
                    }
                    Err(e) => {
                        let msg = e.to_string().replace([',', '\n'], ";");
                        let _ = writeln!(out, "{idx},{},{},,,,,{msg}", opt(factors[idx]), opt(times[idx]));
                    }
                }
            }
            out
        }
    };
    Ok(RunOutput::ok(text))
}

pub fn cmd_decay(setup: &Setup, format: Format) -> Result<RunOutput, CliError> {
    let configs = setup.time_configs()?;
    let points = decay_check(&setup.rho, &setup.a, &setup.f, &configs).map_err(|e| CliError::from_core("grid", e))?;
    let n0 = kdq_core::nonclassicality(&setup.rho, &setup.a, &setup.f)
        .map_err(|e| CliError::from_core("state", e))?
        .total;
    let flag = |p: &kdq_core::DecayPoint| {
        if !p.law_is_exact {
            "REPORT"
        } else if p.residual <= TOL {
            "PASS"
        } else {
            "FAIL"
        }
    };
    let meta = metadata(
        "decay",
        setup,
        json!({
            "mode": "t",
            "pointer": setup.scenario.pointer,
            "decoherence_times": decoherence_times(setup),
            "n_0": n0,
            "law_is_exact": setup.a.dim() == 2,
        }),
    );
    let text = match format {
        Format::Json => {
            let rows: Vec<Value> = points
                .iter()
                .enumerate()
                .map(|(idx, p)| {
                    json!({
                        "index": idx, "t": p.t, "F": p.decoherence, "N_t": p.n_t,
                        "predicted": p.predicted, "residual": p.residual, "flag": flag(p),
                    })
                })
                .collect();
            pretty(&json!({"metadata": meta, "points": rows}))
        }
        Format::Csv => {
            let mut out = csv_header_line(&meta);
            out.push_str("index,t,F,N_t,predicted,residual,flag\n");
            for (idx, p) in points.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{idx},{},{},{},{},{},{}",
                    num(p.t),
                    num(p.decoherence),
                    num(p.n_t),
                    num(p.predicted),
                    num(p.residual),
                    flag(p)
                );
            }
            out
        }
    };
    let failed = points.iter().filter(|p| flag(p) == "FAIL").count();
    let failure = (failed > 0).then(|| CliError::Invariant(format!("{failed} decay rows exceed residual {TOL:e}")));
    Ok(RunOutput { text, failure })
}

/// Check either a scenario file or a KD table JSON (anything with `entries`).
pub fn cmd_validate(path: &Path, format: Format) -> Result<RunOutput, CliError> {
    let text = read_text(path)?;
    let value: Value = parse_json(path, &text)?;
    if value.get("entries").is_some() {
        validate_table(path, &text, format)
    } else {
        let setup = Scenario::load(path)?.build()?;
        let report = validate_density(&setup.rho);
        let meta = metadata("validate", &setup, json!({"kind": "scenario"}));
        let text = match format {
            Format::Json => pretty(&json!({"metadata": meta, "density": report, "pass": report.passes})),
            Format::Csv => {
                let mut out = csv_header_line(&meta);
                out.push_str("check,value,status\n");
                let _ = writeln!(out, "hermiticity_defect,{},", num(report.hermiticity_defect));
                let _ = writeln!(out, "trace_defect,{},", num(report.trace_defect));
                let _ = writeln!(out, "min_eigenvalue,{},", num(report.min_eigenvalue));
                let _ = writeln!(out, "overall,,{}", if report.passes { "PASS" } else { "FAIL" });
                out
            }
        };
        Ok(RunOutput::ok(text))
    }
}

fn validate_table(path: &Path, text: &str, format: Format) -> Result<RunOutput, CliError> {
    let record: KdTableRecord = parse_json(path, text)?;
    if record.dim < 2 || record.entries.len() != record.dim * record.dim {
        return Err(CliError::validation(
            "entries",
            format!(
                "expected {} entries for dim {}, found {}",
                record.dim * record.dim,
                record.dim,
                record.entries.len()
            ),
        ));
    }
    let d = record.dim;
    let m = record.matrix().map_err(|e| CliError::validation("entries", e))?;
    let mut checks: Vec<(&str, f64, bool)> = Vec::new();

    let row: Vec<num_complex::Complex64> = (0..d).map(|i| (0..d).map(|j| m[(i, j)]).sum()).collect();
    let col: Vec<num_complex::Complex64> = (0..d).map(|j| (0..d).map(|i| m[(i, j)]).sum()).collect();
    let residue = row.iter().chain(&col).map(|z| z.im.abs()).fold(0.0, f64::max);
    checks.push(("marginal_imag_residue", residue, residue <= TOL));
    let total: num_complex::Complex64 = m.as_slice().iter().sum();
    let total_err = (total - num_complex::Complex64::new(1.0, 0.0)).norm();
    checks.push(("total_defect", total_err, total_err <= TOL));
    let out_of_range = row
        .iter()
        .chain(&col)
        .map(|z| (-z.re).max(z.re - 1.0).max(0.0))
        .fold(0.0, f64::max);
    checks.push(("marginal_probability_range", out_of_range, out_of_range <= TOL));

    let a_basis = basis_from_label(&record.a_basis_label, d);
    let f_basis = basis_from_label(&record.f_basis_label, d);
    let mut reconstruction = "skipped";
    if let (Some(a), Some(f)) = (a_basis, f_basis) {
        let q = KdTable::from_entries(m.clone(), a, f).map_err(|e| CliError::validation("entries", e))?;
        match reconstruct_state(&q) {
            Ok(rho) => {
                let report = validate_density(&rho);
                reconstruction = "ok";
                checks.push(("reconstructed_min_eigenvalue", report.min_eigenvalue, report.passes));
            }
            Err(KdError::NonInvertible { .. }) => reconstruction = "non_invertible",
            Err(e) => return Err(CliError::validation("entries", e)),
        }
    }
    let pass = checks.iter().all(|c| c.2);
    let meta = json!({
        "tool": "kdq",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "validate",
        "kind": "kd_table",
        "dim": d,
        "a_basis": record.a_basis_label,
        "f_basis": record.f_basis_label,
        "reconstruction": reconstruction,
    });
    let text = match format {
        Format::Json => {
            let rows: Vec<Value> = checks
                .iter()
                .map(|(k, v, ok)| json!({"check": k, "value": v, "pass": ok}))
                .collect();
            pretty(&json!({"metadata": meta, "checks": rows, "pass": pass}))
        }
        Format::Csv => {
            let mut out = csv_header_line(&meta);
            out.push_str("check,value,status\n");
            for (k, v, ok) in &checks {
                let _ = writeln!(out, "{k},{},{}", num(*v), if *ok { "PASS" } else { "FAIL" });
            }
            let _ = writeln!(out, "overall,,{}", if pass { "PASS" } else { "FAIL" });
            out
        }
    };
    let failure = (!pass).then(|| CliError::Invariant("KD table failed validation".into()));
    Ok(RunOutput { text, failure })
}
