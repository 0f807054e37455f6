//! Output files of a run.
//!
//! Every file is a pure function of the inputs and the seed: no
//! timestamps, host names or output paths are written.

use std::fs;
use std::path::Path;

use pevgrid::harness::{AssessmentReport, ScenarioReport};
use serde::Serialize;

use crate::error::CliError;
use crate::params::ParamEntry;
use crate::RunConfig;

pub const SUMMARY_FILE: &str = "summary.csv";
pub const COSTS_FILE: &str = "costs.csv";
pub const REGULATORS_FILE: &str = "regulators.csv";
pub const REPORT_FILE: &str = "report.json";
pub const MANIFEST_FILE: &str = "run_manifest.json";
pub const TIMESERIES_DIR: &str = "timeseries";

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct InputDigest {
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct Inputs {
    pub feeder: InputDigest,
    pub base_load: InputDigest,
}

/// Everything needed to reproduce a run. The `config` section can be fed
/// back to `run --config`.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    pub iterations: u32,
    pub config_hash: String,
    pub inputs: Inputs,
    pub parameters: Vec<ParamEntry>,
    pub config: RunConfig,
}

fn rows(report: &AssessmentReport) -> impl Iterator<Item = &ScenarioReport> {
    std::iter::once(&report.benchmark).chain(&report.scenarios)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    csv::Writer::from_path(path).map_err(|source| CliError::Csv { path: path.into(), source })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |source| CliError::Csv { path: path.into(), source }
}

pub fn write_summary(path: &Path, report: &AssessmentReport) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record([
        "scenario",
        "yearly_lol_pct",
        "lifetime_yr",
        "eps_flag",
        "vr_ops",
        "vr_lol",
        "tco_conventional",
        "tco_reestablished",
        "vehicles",
        "pl_percent",
        "cumulative_lol",
        "peak_k",
        "mean_k",
        "v_min",
        "v_max",
    ])
    .map_err(&err)?;
    for r in rows(report) {
        w.write_record([
            r.label.clone(),
            r.yearly_lol_pct.to_string(),
            r.lifetime_yr.to_string(),
            r.eps_flag.to_string(),
            r.total_vr_ops().to_string(),
            r.max_vr_lol().to_string(),
            r.tco_conventional.total.to_string(),
            r.tco_reestablished.total.to_string(),
            r.vehicles.to_string(),
            r.pl_percent.to_string(),
            r.cumulative_lol.to_string(),
            r.peak_k.to_string(),
            r.mean_k.to_string(),
            r.v_min.to_string(),
            r.v_max.to_string(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_costs(path: &Path, report: &AssessmentReport) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record(["scenario", "component", "term", "window_start_yr", "window_end_yr", "dollars"]).map_err(&err)?;
    for r in rows(report) {
        for (component, b) in [("transformer_conventional", &r.tco_conventional), ("transformer_reestablished", &r.tco_reestablished)] {
            for (term, dollars) in b.terms() {
                w.write_record([
                    r.label.as_str(),
                    component,
                    term,
                    &b.window_start_yr.to_string(),
                    &b.window_end_yr.to_string(),
                    &dollars.to_string(),
                ])
                .map_err(&err)?;
            }
        }
        let window_end = r.tco_conventional.window_end_yr.to_string();
        for vr in &r.regulators {
            let component = match vr.phase {
                Some(p) => format!("regulator_bus{}_phase{}", vr.bus, p),
                None => format!("regulator_bus{}", vr.bus),
            };
            w.write_record([r.label.as_str(), &component, "op_wear", "0", &window_end, &vr.tco.to_string()])
                .map_err(&err)?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_regulators(path: &Path, report: &AssessmentReport) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record(["scenario", "regulator", "bus", "phase", "annual_ops", "yearly_lol", "horizon_lol", "tco"])
        .map_err(&err)?;
    for r in rows(report) {
        for vr in &r.regulators {
            w.write_record([
                r.label.clone(),
                vr.regulator.to_string(),
                vr.bus.to_string(),
                vr.phase.map(|p| p.to_string()).unwrap_or_default(),
                vr.annual_ops.to_string(),
                vr.yearly_lol.to_string(),
                vr.horizon_lol.to_string(),
                vr.tco.to_string(),
            ])
            .map_err(&err)?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Per-slot plot data: mean loading, hot-spot temperature, accumulated loss
/// of life, tap positions and monitored voltages.
pub fn write_timeseries(path: &Path, row: &ScenarioReport, resolution_h: f64) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    let s = &row.series;
    let mut header = vec!["slot".to_string(), "hour".into(), "mean_k".into(), "theta_hst".into(), "accumulated_lol".into()];
    for vr in &row.regulators {
        header.push(match vr.phase {
            Some(p) => format!("tap_bus{}_phase{}", vr.bus, p),
            None => format!("tap_bus{}", vr.bus),
        });
    }
    header.extend(s.monitored_buses.iter().map(|b| format!("v_bus{b}")));
    w.write_record(&header).map_err(&err)?;
    for t in 0..s.mean_k.len() {
        let mut record = vec![
            t.to_string(),
            (t as f64 * resolution_h).to_string(),
            s.mean_k[t].to_string(),
            s.theta_hst[t].to_string(),
            s.accumulated_lol[t].to_string(),
        ];
        record.extend(s.taps.iter().map(|taps| taps[t].to_string()));
        record.extend(s.voltages.iter().map(|v| v[t].to_string()));
        w.write_record(&record).map_err(&err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// File-name-safe form of a scenario label.
pub fn file_stem(label: &str) -> String {
    label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' }).collect()
}

pub fn emit(out: &Path, report: &AssessmentReport, manifest: &RunManifest, resolution_h: f64) -> Result<(), CliError> {
    let series_dir = out.join(TIMESERIES_DIR);
    fs::create_dir_all(&series_dir).map_err(|e| CliError::io(&series_dir, e))?;
    write_summary(&out.join(SUMMARY_FILE), report)?;
    write_costs(&out.join(COSTS_FILE), report)?;
    write_regulators(&out.join(REGULATORS_FILE), report)?;
    for row in rows(report) {
        write_timeseries(&series_dir.join(format!("{}.csv", file_stem(&row.label))), row, resolution_h)?;
    }
    write_json(&out.join(REPORT_FILE), report)?;
    write_json(&out.join(MANIFEST_FILE), manifest)
}
