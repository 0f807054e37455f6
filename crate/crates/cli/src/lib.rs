//! Configuration, ingestion, run dispatch and report emission for the
//! `pevgrid` command-line tool.

pub mod config;
pub mod error;
pub mod ingest;
pub mod params;
pub mod report;

use std::path::{Path, PathBuf};

use pevgrid::harness::{AssessmentReport, Fleet, McsConfig, ModelParams, Study};
use pevgrid::network::{BaseLoad, RadialFeeder};
use sha2::{Digest, Sha256};

pub use config::{RunConfig, Selection};
pub use error::CliError;
use ingest::{BaseLoadSpec, FeederSettings};
use params::ParamSet;
use report::{InputDigest, Inputs, RunManifest};

/// Validated inputs of one run.
#[derive(Debug, Clone)]
pub struct Prepared {
    /// Configuration with absolute input paths, inlined parameter overrides
    /// and a single resolved selection.
    pub config: RunConfig,
    pub params: ParamSet,
    pub feeder: RadialFeeder,
    pub base: BaseLoad,
    pub fleets: Vec<Fleet>,
    pub mcs: McsConfig,
    pub model: ModelParams,
    pub inputs: Inputs,
}

fn digest(path: &Path) -> Result<InputDigest, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(InputDigest { sha256: hex::encode(Sha256::digest(&bytes)), bytes: bytes.len() as u64 })
}

fn absolute(path: &Path) -> Result<PathBuf, CliError> {
    std::fs::canonicalize(path).map_err(|e| CliError::io(path, e))
}

fn load_params(config: &RunConfig) -> Result<ParamSet, CliError> {
    let mut pairs: Vec<(String, f64)> = Vec::new();
    if let Some(path) = &config.params {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let table: toml::Table =
            text.parse().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let from_file = ParamSet::from_toml(&table)
            .map_err(|source| CliError::Params { file: path.display().to_string(), source })?;
        pairs.extend(from_file.overrides());
    }
    pairs.extend(config.param_overrides.iter().map(|(k, v)| (k.clone(), *v)));
    ParamSet::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), *v)))
        .map_err(|source| CliError::Params { file: "param_overrides".into(), source })
}

/// Reads and validates every input. `selection` replaces the selection in
/// the configuration when given.
pub fn prepare(config: &RunConfig, selection: Option<Selection>) -> Result<Prepared, CliError> {
    let params = load_params(config)?;
    let selection = match selection {
        Some(s) => s,
        None => config.selection()?.ok_or_else(|| {
            CliError::Config("no fleet selected: set `scenario`, `[mixed]` or `[custom]`".into())
        })?,
    };
    if !(config.resolution_h > 0.0 && (24.0 / config.resolution_h).fract().abs() < 1e-9) {
        return Err(CliError::Config(format!("resolution_h {} does not divide a day", config.resolution_h)));
    }

    let settings = FeederSettings {
        rating_kva: params.get("s_r"),
        v_source_pu: config.v_source_pu,
        v_base_kv: config.v_base_kv,
        regulator: params.regulator(),
    };
    let feeder = ingest::read_feeder(&config.feeder, &settings)?;
    for &bus in &config.monitored_buses {
        if feeder.bus_index(bus).is_none() {
            return Err(CliError::Config(format!("monitored bus {bus} is not in the feeder")));
        }
    }
    let spec = BaseLoadSpec {
        resolution_h: config.resolution_h,
        horizon_days: config.horizon_days,
        power_factor: params.get("base_power_factor"),
    };
    let base = ingest::read_base_load(&config.base_load, &spec)?;

    let behavior = params.behavior();
    let anxiety = params.get("anxiety_threshold");
    let mut fleets = selection.fleets(base.peak_kw())?;
    for group in fleets.iter_mut().flat_map(|f| f.groups.iter_mut()) {
        group.behavior = behavior.clone();
        group.anxiety_threshold = anxiety;
    }
    for fleet in &fleets {
        fleet.validate()?;
    }

    let mcs = McsConfig {
        iterations: config.iterations,
        master_seed: config.seed,
        horizon_days: config.horizon_days,
        resolution_h: config.resolution_h,
        expectation_mode: config.expectation_mode,
        pev_power_factor: params.get("pev_power_factor"),
        phase_shares: config.phase_shares,
        monitored_buses: config.monitored_buses.clone(),
    };
    mcs.validate()?;
    let model = ModelParams {
        thermal: params.thermal(),
        aging: params.aging(),
        tco: params.tco(),
        vr_capital_cost: params.get("vr_capital_cost"),
        calendar_floor: config.calendar_floor,
    };

    let inputs = Inputs {
        feeder: digest(&config.feeder)?,
        base_load: digest(&config.base_load)?,
    };
    let mut resolved = config.clone();
    resolved.feeder = absolute(&config.feeder)?;
    resolved.base_load = absolute(&config.base_load)?;
    resolved.params = None;
    resolved.param_overrides = params.overrides();
    resolved.out = None;
    resolved.set_selection(selection);

    Ok(Prepared { config: resolved, params, feeder, base, fleets, mcs, model, inputs })
}

impl Prepared {
    /// SHA-256 over the resolved configuration with input paths replaced by
    /// the digests of their contents.
    pub fn config_hash(&self) -> String {
        let mut hashed = self.config.clone();
        hashed.feeder = PathBuf::from(&self.inputs.feeder.sha256);
        hashed.base_load = PathBuf::from(&self.inputs.base_load.sha256);
        let json = serde_json::to_string(&hashed).expect("configuration serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn study(&self) -> Study<'_> {
        Study { feeder: &self.feeder, base: &self.base, params: &self.model, config: &self.mcs }
    }

    pub fn run(&self) -> Result<AssessmentReport, CliError> {
        let mut report = self.study().assess(&self.fleets)?;
        report.provenance.config_hash = Some(self.config_hash());
        Ok(report)
    }

    pub fn manifest(&self, command: &str) -> RunManifest {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed: self.mcs.master_seed,
            iterations: self.mcs.iterations,
            config_hash: self.config_hash(),
            inputs: self.inputs.clone(),
            parameters: self.params.entries(),
            config: self.config.clone(),
        }
    }

    /// Runs the study and writes every output file into `out`.
    pub fn run_and_emit(&self, command: &str, out: &Path) -> Result<AssessmentReport, CliError> {
        let report = self.run()?;
        report::emit(out, &report, &self.manifest(command), self.mcs.resolution_h)?;
        Ok(report)
    }
}
