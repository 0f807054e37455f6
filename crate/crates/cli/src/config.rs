//! Run configuration: a TOML file, or the `config` section of a previous
//! run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use pevgrid::charging::{ChargingScenario, VehicleClass};
use pevgrid::harness::{area_fleet, Area, ExpectationMode, Fleet};
use pevgrid::network::BusId;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedSelection {
    pub pl: OneOrMany<f64>,
    #[serde(default = "default_area")]
    pub area: Area,
}

fn default_area() -> Area {
    Area::Suburban
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassName {
    Commuter,
    RideService,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSelection {
    #[serde(default = "default_custom_label")]
    pub label: String,
    pub class: ClassName,
    pub count: u32,
    pub charge_kw: f64,
    pub battery_kwh: f64,
}

fn default_custom_label() -> String {
    "custom".into()
}

/// What to simulate besides the always-present benchmark.
#[derive(Debug, Clone, PartialEq)]
pub enum Selection {
    /// Catalog scenarios by index; empty means the benchmark alone.
    Scenarios(Vec<u8>),
    Mixed { pl: Vec<f64>, area: Area },
    Custom(CustomSelection),
}

impl Selection {
    pub fn fleets(&self, base_peak_kw: f64) -> Result<Vec<Fleet>, CliError> {
        let fleets = match self {
            Selection::Scenarios(indices) => {
                indices.iter().map(|&i| Fleet::scenario(i)).collect::<Result<Vec<_>, _>>()?
            }
            Selection::Mixed { pl, area } => {
                pl.iter().map(|&p| area_fleet(*area, p, base_peak_kw)).collect::<Result<Vec<_>, _>>()?
            }
            Selection::Custom(c) => {
                let class = match c.class {
                    ClassName::Commuter => VehicleClass::Commuter,
                    ClassName::RideService => VehicleClass::RideService,
                };
                vec![Fleet::single(c.label.clone(), ChargingScenario::custom(class, c.count, c.charge_kw, c.battery_kwh))]
            }
        };
        Ok(fleets)
    }
}

/// Run configuration as written by users. Relative paths resolve against
/// the directory of the file that contains them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub feeder: PathBuf,
    pub base_load: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<PathBuf>,
    /// Parameter values applied on top of the parameter file.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub param_overrides: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_iterations")]
    pub iterations: u32,
    #[serde(default = "default_horizon_days")]
    pub horizon_days: u32,
    #[serde(default = "default_resolution_h")]
    pub resolution_h: f64,
    #[serde(default)]
    pub monitored_buses: Vec<BusId>,
    #[serde(default)]
    pub expectation_mode: ExpectationMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_shares: Option<[f64; 3]>,
    #[serde(default = "default_true")]
    pub calendar_floor: bool,
    #[serde(default = "default_v_source")]
    pub v_source_pu: f64,
    #[serde(default = "default_v_base")]
    pub v_base_kv: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<OneOrMany<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixed: Option<MixedSelection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomSelection>,
}

fn default_seed() -> u64 {
    2020
}
fn default_iterations() -> u32 {
    100
}
fn default_horizon_days() -> u32 {
    365
}
fn default_resolution_h() -> f64 {
    0.25
}
fn default_true() -> bool {
    true
}
fn default_v_source() -> f64 {
    1.0
}
fn default_v_base() -> f64 {
    12.47
}

impl RunConfig {
    /// Loads a TOML configuration, or the resolved configuration stored in a
    /// JSON run manifest.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config: RunConfig = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            #[derive(Deserialize)]
            struct ManifestView {
                config: RunConfig,
            }
            serde_json::from_str::<ManifestView>(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
                .config
        } else {
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        };
        let dir = path.parent().unwrap_or_else(|| Path::new("."));
        config.resolve_paths(dir);
        Ok(config)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        join(&mut self.feeder);
        join(&mut self.base_load);
        if let Some(p) = self.params.as_mut() {
            join(p);
        }
        if let Some(p) = self.out.as_mut() {
            join(p);
        }
    }

    /// The single selection form present, if any.
    pub fn selection(&self) -> Result<Option<Selection>, CliError> {
        let present = [self.scenario.is_some(), self.mixed.is_some(), self.custom.is_some()];
        match present.iter().filter(|&&p| p).count() {
            0 => Ok(None),
            1 => Ok(Some(if let Some(s) = &self.scenario {
                Selection::Scenarios(s.to_vec())
            } else if let Some(m) = &self.mixed {
                Selection::Mixed { pl: m.pl.to_vec(), area: m.area }
            } else {
                Selection::Custom(self.custom.clone().expect("checked above"))
            })),
            _ => Err(CliError::Config("select exactly one of `scenario`, `[mixed]` or `[custom]`".into())),
        }
    }

    pub fn set_selection(&mut self, selection: Selection) {
        self.scenario = None;
        self.mixed = None;
        self.custom = None;
        match selection {
            Selection::Scenarios(s) => self.scenario = Some(OneOrMany::Many(s)),
            Selection::Mixed { pl, area } => self.mixed = Some(MixedSelection { pl: OneOrMany::Many(pl), area }),
            Selection::Custom(c) => self.custom = Some(c),
        }
    }
}
