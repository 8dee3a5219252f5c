//! File formats: marginal datasets (JSON and CSV), fit output, oracle curves,
//! simulation reports and scenario files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::{validate_design, AveragedData};
use crate::map::{MapFit, PriorConfig, Tau2Source};
use crate::simulation::{test_component, ReportRow, ScenarioConfig, ScenarioReport, SpamLambda};
use crate::spam::OracleLambda;

fn invalid(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::InvalidDataset { field: field.into(), message: message.into() }
}

fn real(value: &Value, field: &str) -> Result<f64> {
    value.as_f64().ok_or_else(|| invalid(field, format!("expected a number, found {value}")))
}

/// Parses the JSON dataset schema
/// `{"grid_sizes": [...], "marginals": [[...], ...], "overall_mean": x, "tau2": x | null}`.
pub fn dataset_from_json(text: &str) -> Result<AveragedData> {
    let root: Value = serde_json::from_str(text).map_err(|e| invalid("<document>", e.to_string()))?;
    let obj = root.as_object().ok_or_else(|| invalid("<document>", "expected a JSON object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "grid_sizes" | "marginals" | "overall_mean" | "tau2") {
            return Err(invalid(key.as_str(), "unknown field"));
        }
    }
    let get = |name: &str| obj.get(name).ok_or_else(|| invalid(name, "missing"));

    let grid_sizes = get("grid_sizes")?
        .as_array()
        .ok_or_else(|| invalid("grid_sizes", "expected an array of integers"))?
        .iter()
        .enumerate()
        .map(|(j, v)| {
            v.as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| invalid(format!("grid_sizes[{j}]"), format!("expected a positive integer, found {v}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let design = validate_design(&grid_sizes)?;

    let rows = get("marginals")?
        .as_array()
        .ok_or_else(|| invalid("marginals", "expected an array of arrays"))?;
    let marginals = rows
        .iter()
        .enumerate()
        .map(|(j, row)| {
            row.as_array()
                .ok_or_else(|| invalid(format!("marginals[{j}]"), "expected an array of numbers"))?
                .iter()
                .enumerate()
                .map(|(i, v)| real(v, &format!("marginals[{j}][{i}]")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let overall_mean = real(get("overall_mean")?, "overall_mean")?;
    let tau2 = match obj.get("tau2") {
        None | Some(Value::Null) => None,
        Some(v) => Some(real(v, "tau2")?),
    };
    AveragedData::new(design, marginals, overall_mean, tau2)
}

/// Parses the CSV dataset schema: header `x1,...,xd`, one column per axis, one row per
/// grid point.
pub fn dataset_from_csv(text: &str, overall_mean: f64, tau2: Option<f64>) -> Result<AveragedData> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| invalid("header", e.to_string()))?.clone();
    if headers.is_empty() {
        return Err(invalid("header", "no columns"));
    }
    for (j, h) in headers.iter().enumerate() {
        if h != format!("x{}", j + 1) {
            return Err(invalid("header", format!("column {} is named {h:?}, expected \"x{}\"", j + 1, j + 1)));
        }
    }
    let d = headers.len();
    let mut marginals = vec![Vec::new(); d];
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| invalid(format!("row {}", row + 1), e.to_string()))?;
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| invalid(format!("x{} row {}", j + 1, row + 1), format!("not a number: {cell:?}")))?;
            marginals[j].push(v);
        }
    }
    let n = marginals[0].len();
    let design = validate_design(&vec![n; d])?;
    AveragedData::new(design, marginals, overall_mean, tau2)
}

/// Serializes a dataset in the JSON schema read by [`dataset_from_json`].
pub fn dataset_to_json(data: &AveragedData) -> String {
    let value = json!({
        "grid_sizes": data.design().grid_sizes(),
        "marginals": data.marginals(),
        "overall_mean": data.overall_mean(),
        "tau2": data.tau2(),
    });
    serde_json::to_string_pretty(&value).expect("finite values")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffArrays {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// On-disk form of a [`MapFit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapFitFile {
    pub a0_hat: f64,
    pub selected: Vec<usize>,
    pub cutpoints: BTreeMap<usize, usize>,
    /// Positive-frequency coefficients `k = 1..=(n_j - 1)/2` per axis.
    pub coeffs: Vec<CoeffArrays>,
    pub tau2: f64,
    pub tau2_source: Tau2Source,
    pub objective: f64,
}

impl From<&MapFit> for MapFitFile {
    fn from(fit: &MapFit) -> Self {
        Self {
            a0_hat: fit.a0_hat,
            selected: fit.selected.clone(),
            cutpoints: fit.cutpoints.clone(),
            coeffs: fit
                .coeffs
                .iter()
                .map(|s| CoeffArrays {
                    re: s.coeffs().iter().map(|c| c.re).collect(),
                    im: s.coeffs().iter().map(|c| c.im).collect(),
                })
                .collect(),
            tau2: fit.tau2,
            tau2_source: fit.tau2_source,
            objective: fit.objective,
        }
    }
}

pub fn map_fit_to_json(fit: &MapFit) -> String {
    serde_json::to_string_pretty(&MapFitFile::from(fit)).expect("serializable")
}

pub fn oracle_to_json(oracle: &OracleLambda) -> String {
    serde_json::to_string_pretty(oracle).expect("serializable")
}

/// `%g`-style formatting with six significant digits.
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let exp = v.abs().log10().floor() as i32;
    // rounding may carry into the next decade
    let rounded: f64 = format!("{v:.5e}").parse().expect("float");
    let exp = exp.max(rounded.abs().log10().floor() as i32);
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{v:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent");
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{e}")
    }
}

/// Table-shaped CSV: `snr,method,lambda,amse,amse_1..amse_m,amse_0,d0_hat`.
pub fn report_to_csv(rows: &[ReportRow]) -> String {
    let active = rows.iter().map(|r| r.amse_per_active.len()).max().unwrap_or(0);
    let mut out = String::from("snr,method,lambda,amse");
    for i in 1..=active {
        write!(out, ",amse_{i}").expect("string write");
    }
    out.push_str(",amse_0,d0_hat\n");
    for r in rows {
        let lambda = r.lambda.map(format_sig6).unwrap_or_default();
        write!(out, "{},{},{},{}", format_sig6(r.snr), r.method.as_str(), lambda, format_sig6(r.amse_global))
            .expect("string write");
        for i in 0..active {
            let v = r.amse_per_active.get(i).map(|&v| format_sig6(v)).unwrap_or_default();
            write!(out, ",{v}").expect("string write");
        }
        writeln!(out, ",{},{}", format_sig6(r.amse_zero_avg), format_sig6(r.d0_hat_mean)).expect("string write");
    }
    out
}

/// JSON mirror of the report; per-replication records only with `detail`.
pub fn report_to_json(report: &ScenarioReport, detail: bool) -> String {
    let mut value = json!({ "rows": report.rows });
    if report.oracle.iter().any(Option::is_some) {
        value["oracle"] = json!(report.oracle);
    }
    if detail {
        value["replications"] = json!(report.replications);
    }
    serde_json::to_string_pretty(&value).expect("serializable")
}

/// Scenario file: every field optional, defaults as in [`ScenarioConfig::default`].
/// Active components are given as test-function ids.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub active: Option<Vec<usize>>,
    pub snr_levels: Option<Vec<f64>>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub prior: Option<PriorConfig>,
    pub lambda_grid: Option<Vec<f64>>,
    pub spam: Option<SpamLambda>,
    pub known_noise: Option<bool>,
    pub tau2_override: Option<f64>,
    pub a0: Option<f64>,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidScenario(e.to_string()))
    }

    pub fn into_config(self) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::default();
        if let Some(ids) = self.active {
            cfg.active_components = ids.into_iter().map(test_component).collect::<Result<_>>()?;
        }
        macro_rules! take {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$target = v; })*
            };
        }
        take!(d => d, n => n, snr_levels => snr_levels, reps => reps, seed => seed, prior => prior,
              lambda_grid => lambda_grid, known_noise => known_noise, a0 => a0);
        if self.spam.is_some() {
            cfg.spam = self.spam;
        }
        if self.tau2_override.is_some() {
            cfg.tau2_override = self.tau2_override;
        }
        Ok(cfg)
    }
}
