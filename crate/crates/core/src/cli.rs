//! Machine-readable command layer behind the `entcost` binary.
//!
//! Every command produces a [`RunReport`] that serializes to JSON with a
//! fixed field order, so identical invocations are byte-identical. CSV
//! output renders tables directly and flattens everything else into
//! `key,value` rows with floats at nine significant digits.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::channels::{eb_certify, trace_out_map, EbVerdict, QuantumChannel};
use crate::ef::{additivity_gap, ef_upper_bound, OptimizerConfig};
use crate::error::{Error, Result};
use crate::measures::{constant_entanglement_check, ec_bell_mix, ed_hashing, ef_two_qubit};
use crate::states::{bell_mix, subspace_basis, BellMixParam, DensityMatrix, StateJson};

/// Version tag carried by every report.
pub const SCHEMA_VERSION: u32 = 1;

/// Output format of the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// One command execution: what ran, with which inputs and seed, and what
/// came out. `wall_time` is informational only and never serialized, so
/// reruns stay byte-identical.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub outputs: Value,
    pub seed: u64,
    #[serde(skip)]
    pub wall_time: f64,
}

impl RunReport {
    fn new(command: &str, seed: u64) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            inputs: BTreeMap::new(),
            outputs: Value::Null,
            seed,
            wall_time: 0.0,
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut text =
                    serde_json::to_string_pretty(self).expect("reports always serialize");
                text.push('\n');
                text
            }
            OutputFormat::Csv => self.to_csv(),
        }
    }

    /// Tables (outputs with `columns` + `table`) render directly; anything
    /// else flattens into `key,value` rows.
    fn to_csv(&self) -> String {
        let mut out = String::new();
        if let (Some(columns), Some(rows)) = (
            self.outputs.get("columns").and_then(Value::as_array),
            self.outputs.get("table").and_then(Value::as_array),
        ) {
            let names: Vec<&str> = columns.iter().filter_map(Value::as_str).collect();
            out.push_str(&names.join(","));
            out.push('\n');
            for row in rows {
                let cells: Vec<String> = names
                    .iter()
                    .map(|name| csv_scalar(row.get(*name).unwrap_or(&Value::Null)))
                    .collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        } else {
            out.push_str("key,value\n");
            let mut rows = Vec::new();
            flatten_value("", &self.outputs, &mut rows);
            for (key, value) in rows {
                out.push_str(&format!("{key},{value}\n"));
            }
        }
        out
    }
}

/// Nine significant digits, the CSV float format.
fn fmt9(x: f64) -> String {
    format!("{:.8e}", x)
}

fn csv_scalar(v: &Value) -> String {
    match v {
        Value::Null => "null".to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.to_string()
            } else {
                fmt9(n.as_f64().unwrap_or(f64::NAN))
            }
        }
        Value::String(s) => s.clone(),
        _ => String::new(),
    }
}

fn flatten_value(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (key, value) in map {
                let path = if prefix.is_empty() {
                    key.clone()
                } else {
                    format!("{prefix}.{key}")
                };
                flatten_value(&path, value, rows);
            }
        }
        Value::Array(items) => {
            if items
                .iter()
                .all(|i| !matches!(i, Value::Object(_) | Value::Array(_)))
            {
                let joined: Vec<String> = items.iter().map(csv_scalar).collect();
                rows.push((prefix.to_string(), joined.join(";")));
            } else {
                rows.push((format!("{prefix}.len"), items.len().to_string()));
            }
        }
        scalar => rows.push((prefix.to_string(), csv_scalar(scalar))),
    }
}

/// Table of cost, distillation and formation values for the two-component
/// Bell mixture: one row per grid point (default 101 points on [0, 1/2]),
/// or a single row when `p` is given.
pub fn cmd_bell_mix(p: Option<f64>, grid: Option<usize>, seed: u64) -> Result<RunReport> {
    let mut report = RunReport::new("bell-mix", seed);
    let points: Vec<f64> = match (p, grid) {
        (Some(_), Some(_)) => {
            return Err(Error::Domain(
                "give either a single weight or a grid size, not both".into(),
            ))
        }
        (Some(p), None) => {
            report.inputs.insert("p".into(), json!(p));
            vec![p]
        }
        (None, grid) => {
            let n = grid.unwrap_or(101);
            if n < 2 {
                return Err(Error::Domain(format!(
                    "grid needs at least 2 points, got {n}"
                )));
            }
            report.inputs.insert("grid".into(), json!(n));
            (0..n).map(|i| 0.5 * i as f64 / (n - 1) as f64).collect()
        }
    };

    let mut table = Vec::with_capacity(points.len());
    for &p in &points {
        let param = BellMixParam::new(p)?;
        let ec = ec_bell_mix(param).value();
        let ed = ed_hashing(param).value();
        let ef = ef_two_qubit(&bell_mix(param))?.value();
        table.push(json!({
            "p": p,
            "ec": ec,
            "ed": ed,
            "ef": ef,
            "gap": ec - ed,
        }));
    }
    report.outputs = json!({
        "columns": ["p", "ec", "ed", "ef", "gap"],
        "table": table,
    });
    Ok(report)
}

/// Full report on one reference subspace: orthonormality, the
/// constant-entanglement verdict with its spectrum, the
/// entanglement-breaking certificate of the trace-out channel, and the
/// formation/cost values where they are determined.
pub fn cmd_example(id: u8, samples: usize, seed: u64) -> Result<RunReport> {
    let mut report = RunReport::new("example", seed);
    report.inputs.insert("id".into(), json!(id));
    report.inputs.insert("samples".into(), json!(samples));

    let basis = subspace_basis(id)?;
    let check = constant_entanglement_check(&basis, samples, seed)?;
    let channel = trace_out_map(&basis)?;
    let cert = eb_certify(&channel)?;

    let breaking = cert.verdict == EbVerdict::Breaking;
    let ef = check.is_constant.then(|| check.value.value());
    let ec = if breaking { ef } else { None };
    let note = match (check.is_constant, breaking) {
        (true, true) => {
            "trace-out channel is entanglement breaking: cost equals the constant formation value"
        }
        (true, false) => "entanglement cost unknown (additivity criterion inapplicable)",
        (false, true) => {
            "formation varies across the subspace; the breaking channel still makes cost equal formation for every supported state"
        }
        (false, false) => "no closed-form claims apply to this subspace",
    };

    report.outputs = json!({
        "ambient": [basis.ambient().da, basis.ambient().db],
        "basis_size": basis.len(),
        "orthonormal": true,
        "constant_entanglement": check.is_constant,
        "spectrum": check.spectrum,
        "ef_ebits": ef,
        "ec_ebits": ec,
        "eb_certificate": serde_json::to_value(&cert).expect("certificates serialize"),
        "note": note,
    });
    Ok(report)
}

/// Optimizer settings shared by the `ef` and `additivity` commands.
#[derive(Clone, Debug)]
pub struct EfArgs {
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    pub step_tol: f64,
    pub value_tol: f64,
}

impl Default for EfArgs {
    fn default() -> Self {
        let cfg = OptimizerConfig::default();
        Self {
            ensemble_size: cfg.ensemble_size,
            restarts: cfg.restarts,
            max_iters: cfg.max_iters,
            step_tol: cfg.step_tol,
            value_tol: cfg.value_tol,
        }
    }
}

impl EfArgs {
    fn to_config(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            ensemble_size: self.ensemble_size,
            restarts: self.restarts,
            max_iters: self.max_iters,
            step_tol: self.step_tol,
            value_tol: self.value_tol,
            seed,
        }
    }

    fn describe(&self, inputs: &mut BTreeMap<String, Value>) {
        if let Some(m) = self.ensemble_size {
            inputs.insert("ensemble_size".into(), json!(m));
        }
        inputs.insert("restarts".into(), json!(self.restarts));
        inputs.insert("max_iters".into(), json!(self.max_iters));
        inputs.insert("step_tol".into(), json!(self.step_tol));
        inputs.insert("value_tol".into(), json!(self.value_tol));
    }
}

/// Variational formation bound for a density matrix loaded from a JSON
/// document.
pub fn cmd_ef(input: &Path, args: &EfArgs, seed: u64) -> Result<RunReport> {
    let mut report = RunReport::new("ef", seed);
    report
        .inputs
        .insert("input".into(), json!(input.display().to_string()));
    args.describe(&mut report.inputs);

    let rho = load_density(input)?;
    let result = ef_upper_bound(&rho, &args.to_config(seed))?;
    let residual = result.decomposition.reconstruction_residual(&rho);
    report.outputs = json!({
        "dims": [rho.split().da, rho.split().db],
        "result": serde_json::to_value(result.to_json()).expect("results serialize"),
        "reconstruction_residual": residual,
    });
    Ok(report)
}

/// Additivity gap of a pair of Bell mixtures: the joint variational bound
/// minus the closed-form single-copy values.
pub fn cmd_additivity(p: f64, q: f64, args: &EfArgs, seed: u64) -> Result<RunReport> {
    let mut report = RunReport::new("additivity", seed);
    report.inputs.insert("p".into(), json!(p));
    report.inputs.insert("q".into(), json!(q));
    args.describe(&mut report.inputs);

    let rho = bell_mix(BellMixParam::new(p)?);
    let sigma = bell_mix(BellMixParam::new(q)?);
    let ref_rho = ef_two_qubit(&rho)?.value();
    let ref_sigma = ef_two_qubit(&sigma)?.value();
    let (gap, joint) = additivity_gap(&rho, &sigma, &args.to_config(seed))?;
    report.outputs = json!({
        "gap": gap,
        "ref_sum": ref_rho + ref_sigma,
        "ref_rho": ref_rho,
        "ref_sigma": ref_sigma,
        "joint": serde_json::to_value(joint.to_json()).expect("results serialize"),
    });
    Ok(report)
}

/// Input selector for the entanglement-breaking check.
#[derive(Clone, Debug)]
pub enum EbInput {
    /// One of the reference subspaces.
    Example(u8),
    /// A Choi state loaded from a JSON document; the split annotates
    /// (input dimension, output dimension).
    ChoiFile(std::path::PathBuf),
}

/// Entanglement-breaking certificate; the second value is the process exit
/// code (0 breaking, 1 not breaking, 4 indeterminate).
pub fn cmd_eb(input: &EbInput, seed: u64) -> Result<(RunReport, i32)> {
    let mut report = RunReport::new("eb-check", seed);
    let channel = match input {
        EbInput::Example(id) => {
            report.inputs.insert("example".into(), json!(id));
            trace_out_map(&subspace_basis(*id)?)?
        }
        EbInput::ChoiFile(path) => {
            report
                .inputs
                .insert("choi".into(), json!(path.display().to_string()));
            let choi = load_density(path)?;
            QuantumChannel::from_choi(&choi)?
        }
    };
    let cert = eb_certify(&channel)?;
    let code = match cert.verdict {
        EbVerdict::Breaking => 0,
        EbVerdict::NotBreaking => 1,
        EbVerdict::Indeterminate => 4,
    };
    report.outputs = json!({
        "din": channel.din(),
        "dout": channel.dout(),
        "certificate": serde_json::to_value(&cert).expect("certificates serialize"),
    });
    Ok((report, code))
}

fn load_density(path: &Path) -> Result<DensityMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let doc: StateJson = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("invalid state JSON: {e}")))?;
    DensityMatrix::from_json(&doc)
}

/// Process exit code for a failed command: 2 for unusable input, 3 for
/// violated state invariants.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Parse(_) | Error::Domain(_) | Error::Dimension(_) | Error::TooLarge { .. } => 2,
        Error::NotHermitian(_)
        | Error::NotPsd(_)
        | Error::Invariant(_)
        | Error::NoConvergence(_) => 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_mix_reference_rows() {
        let report = cmd_bell_mix(Some(0.0), None, 0).unwrap();
        let row = &report.outputs["table"][0];
        assert_eq!(row["p"], json!(0.0));
        assert!((row["ec"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!((row["ed"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!((row["ef"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert!(row["gap"].as_f64().unwrap().abs() < 1e-12);

        let report = cmd_bell_mix(Some(0.5), None, 0).unwrap();
        let row = &report.outputs["table"][0];
        assert!(row["ec"].as_f64().unwrap().abs() < 1e-12);
        assert!(row["ed"].as_f64().unwrap().abs() < 1e-12);

        let report = cmd_bell_mix(Some(0.25), None, 0).unwrap();
        let row = &report.outputs["table"][0];
        assert!((row["ec"].as_f64().unwrap() - 0.354579).abs() < 1e-5);
        assert!((row["ed"].as_f64().unwrap() - 0.188722).abs() < 1e-5);
        assert!((row["gap"].as_f64().unwrap() - 0.165857).abs() < 1e-5);
    }

    #[test]
    fn bell_mix_grid_and_errors() {
        let report = cmd_bell_mix(None, Some(11), 0).unwrap();
        assert_eq!(report.outputs["table"].as_array().unwrap().len(), 11);
        assert!(cmd_bell_mix(None, Some(1), 0).is_err());
        assert!(cmd_bell_mix(Some(0.7), None, 0).is_err());
        assert!(cmd_bell_mix(Some(0.1), Some(5), 0).is_err());
    }

    #[test]
    fn example_reports_match_reference_values() {
        let report = cmd_example(3, 16, 0).unwrap();
        let out = &report.outputs;
        assert_eq!(out["constant_entanglement"], json!(true));
        assert!((out["ef_ebits"].as_f64().unwrap() - 0.918296).abs() < 1e-5);
        assert!((out["ec_ebits"].as_f64().unwrap() - 0.918296).abs() < 1e-5);
        assert_eq!(out["eb_certificate"]["verdict"], json!("breaking"));

        let report = cmd_example(2, 16, 0).unwrap();
        let out = &report.outputs;
        assert!((out["ef_ebits"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(out["ec_ebits"], Value::Null);
        assert_eq!(out["eb_certificate"]["verdict"], json!("not_breaking"));

        let report = cmd_example(4, 16, 0).unwrap();
        let out = &report.outputs;
        assert!((out["ef_ebits"].as_f64().unwrap() - 1.5).abs() < 1e-9);
        assert_eq!(
            out["eb_certificate"]["method"],
            json!("design_decomposition")
        );

        // Diagonal two-qubit subspace: breaking but not constant, so no
        // single formation value is reported.
        let report = cmd_example(1, 16, 0).unwrap();
        let out = &report.outputs;
        assert_eq!(out["constant_entanglement"], json!(false));
        assert_eq!(out["ef_ebits"], Value::Null);
        assert_eq!(out["eb_certificate"]["verdict"], json!("breaking"));

        assert!(cmd_example(7, 16, 0).is_err());
    }

    #[test]
    fn reports_are_byte_identical_across_runs() {
        let a = cmd_example(3, 16, 9).unwrap().render(OutputFormat::Json);
        let b = cmd_example(3, 16, 9).unwrap().render(OutputFormat::Json);
        assert_eq!(a, b);
    }

    #[test]
    fn csv_table_rendering() {
        let report = cmd_bell_mix(None, Some(3), 0).unwrap();
        let csv = report.render(OutputFormat::Csv);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("p,ec,ed,ef,gap"));
        let first = lines.next().unwrap();
        assert!(first.starts_with("0.00000000e0,1.00000000e0,1.00000000e0,"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn csv_flatten_rendering() {
        let (report, code) = cmd_eb(&EbInput::Example(2), 0).unwrap();
        assert_eq!(code, 1);
        let csv = report.render(OutputFormat::Csv);
        assert!(csv.starts_with("key,value\n"));
        assert!(csv.contains("certificate.verdict,not_breaking"));
    }

    #[test]
    fn eb_exit_codes() {
        for (id, want) in [(1u8, 0), (2, 1), (3, 0), (4, 0)] {
            let (_, code) = cmd_eb(&EbInput::Example(id), 0).unwrap();
            assert_eq!(code, want, "subspace {id}");
        }
    }

    #[test]
    fn ef_command_round_trip() {
        let rho = bell_mix(BellMixParam::new(0.25).unwrap());
        let dir = std::env::temp_dir().join("entcost-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bell-quarter.json");
        std::fs::write(&path, serde_json::to_string(&rho.to_json()).unwrap()).unwrap();

        let args = EfArgs {
            restarts: 4,
            max_iters: 150,
            ..EfArgs::default()
        };
        let report = cmd_ef(&path, &args, 3).unwrap();
        let value = report.outputs["result"]["value"].as_f64().unwrap();
        assert!((value - 0.354579).abs() < 5e-3);
        assert!(report.outputs["reconstruction_residual"].as_f64().unwrap() < 1e-8);

        // A maximally entangled pure state costs exactly one ebit.
        let phi = crate::states::bell_state(crate::states::BellKind::PhiPlus).to_density();
        let phi_path = dir.join("phi-plus.json");
        std::fs::write(&phi_path, serde_json::to_string(&phi.to_json()).unwrap()).unwrap();
        let report = cmd_ef(&phi_path, &args, 0).unwrap();
        let value = report.outputs["result"]["value"].as_f64().unwrap();
        assert!((value - 1.0).abs() < 1e-9);

        // Malformed input surfaces as a parse error (exit code 2).
        let bad = dir.join("bad.json");
        std::fs::write(&bad, "{ not json").unwrap();
        let err = cmd_ef(&bad, &args, 0).unwrap_err();
        assert_eq!(exit_code_for(&err), 2);

        // Structurally valid JSON that is not a state: invariant error
        // (exit code 3).
        let not_state = dir.join("not-state.json");
        std::fs::write(
            &not_state,
            r#"{"dims":[2,1],"re":[[1.0,0.0],[0.0,1.0]],"im":[[0.0,0.0],[0.0,0.0]]}"#,
        )
        .unwrap();
        let err = cmd_ef(&not_state, &args, 0).unwrap_err();
        assert_eq!(exit_code_for(&err), 3);
    }

    #[test]
    fn additivity_command_reports_gap() {
        let args = EfArgs {
            restarts: 2,
            max_iters: 100,
            ..EfArgs::default()
        };
        let report = cmd_additivity(0.0, 0.0, &args, 0).unwrap();
        let gap = report.outputs["gap"].as_f64().unwrap();
        assert!(gap.abs() < 1e-6);
        assert!((report.outputs["ref_sum"].as_f64().unwrap() - 2.0).abs() < 1e-9);
        assert!(cmd_additivity(0.9, 0.1, &args, 0).is_err());
    }
}
