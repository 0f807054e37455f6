//! Flat `key = value` parameter file with per-key provenance.
//!
//! Every model constant has a built-in default tagged as either a published
//! value or a modelling default. A value read from a file that differs from
//! the built-in default is reported as an override.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use pevgrid::charging::{BehaviorDistributions, NormalSpec, SpeedPeriod};
use pevgrid::economics::TcoParams;
use pevgrid::regulator::VrConfig;
use pevgrid::thermal::{AgingParams, Ambient, ThermalParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Published reference value.
    Paper,
    /// Modelling default chosen where no reference value exists.
    Default,
    /// Computed from other parameters.
    Derived,
    /// Set by the user to something other than the built-in default.
    Override,
}

impl Provenance {
    fn tag(self) -> &'static str {
        match self {
            Provenance::Paper => "[PAPER]",
            Provenance::Default => "[DEFAULT]",
            Provenance::Derived => "[DERIVED]",
            Provenance::Override => "[OVERRIDE]",
        }
    }
}

pub struct ParamDef {
    pub key: &'static str,
    pub default: f64,
    pub provenance: Provenance,
    pub unit: &'static str,
    pub description: &'static str,
}

const fn def(
    key: &'static str,
    default: f64,
    provenance: Provenance,
    unit: &'static str,
    description: &'static str,
) -> ParamDef {
    ParamDef { key, default, provenance, unit, description }
}

use Provenance::{Default as D, Paper as P};

/// Loss ratio is derived from `ll / cl` unless set explicitly.
pub const LOSS_RATIO_KEY: &str = "loss_ratio_r";

pub const GROUPS: &[(&str, &[ParamDef])] = &[
    (
        "Transformer cost data",
        &[
            def("s_r", 10_000.0, P, "kVA", "substation transformer rating"),
            def("c_o", 70_000.0, P, "$", "transformer capital cost"),
            def("cl", 13.2, P, "kW", "core (no-load) loss"),
            def("ll", 53.0, P, "kW", "load loss at rated load"),
            def("dc", 120.0, P, "$/kW-yr", "levelized demand cost"),
            def("rf", 0.81, P, "-", "responsibility factor"),
            def("ec", 0.05, P, "$/kWh", "energy cost"),
            def("gamma", 0.2, P, "-", "dynamic load factor constant"),
            def("i", 0.05, P, "1/yr", "interest rate"),
            def("n_hours", 8760.0, P, "h/yr", "hours per year"),
            def("t_ins_years", 15.41, P, "yr", "evaluation period and lifetime cap"),
        ],
    ),
    (
        "Transformer thermal model",
        &[
            def("dtheta_to_rated", 55.0, D, "K", "top-oil rise at rated load"),
            def("dtheta_h_rated", 25.0, D, "K", "hot-spot rise over top oil at rated load"),
            def("tau_to", 3.5, D, "h", "top-oil time constant"),
            def("tau_h", 0.08, D, "h", "hot-spot time constant"),
            def("oil_exponent_x", 0.8, D, "-", "oil exponent"),
            def("winding_exponent_y", 1.6, D, "-", "winding exponent"),
            def("theta_ambient", 30.0, D, "degC", "ambient temperature"),
        ],
    ),
    (
        "Insulation aging",
        &[
            def("alpha", 15_000.0 / 383.0, D, "-", "aging law constant"),
            def("beta", 15_000.0, D, "K", "aging law constant"),
            def("omega", 273.0, D, "K", "aging law offset"),
            def("t_ins_hours", 135_000.0, P, "h", "normal insulation life"),
        ],
    ),
    (
        "Voltage regulators",
        &[
            def("kappa", 0.0065, P, "pu", "voltage step per tap"),
            def("v_regulated", 1.0, D, "pu", "regulation target"),
            def("deadband_half_width", 0.0065, D, "pu", "half width of the no-action band"),
            def("h_min", -16.0, D, "-", "lowest tap"),
            def("h_max", 16.0, D, "-", "highest tap"),
            def("n_op_max", 1.0e6, D, "ops", "lifetime tap-operation budget"),
            def("vr_capital_cost", 60_000.0, D, "$", "regulator capital cost"),
        ],
    ),
    (
        "Charging behavior",
        &[
            def("anxiety_threshold", 0.30, D, "-", "state of charge that triggers an en-route charge"),
            def("depart_mean", 7.5, D, "h", "mean departure time"),
            def("depart_sd", 1.0, D, "h", "departure time spread"),
            def("arrive_mean", 17.5, D, "h", "mean arrival time"),
            def("arrive_sd", 1.0, D, "h", "arrival time spread"),
            def("miles_mean", 32.0, D, "mi", "mean daily distance"),
            def("miles_sd", 12.0, D, "mi", "daily distance spread"),
            def("energy_per_mile", 0.30, D, "kWh/mi", "driving consumption"),
            def("service_start", 7.0, P, "h", "ride-service shift start"),
            def("service_end", 21.0, P, "h", "ride-service shift end"),
            def("speed_07_10", 22.0, D, "mph", "ride-service speed 7-10 h"),
            def("speed_10_16", 28.0, D, "mph", "ride-service speed 10-16 h"),
            def("speed_16_19", 20.0, D, "mph", "ride-service speed 16-19 h"),
            def("speed_19_21", 26.0, D, "mph", "ride-service speed 19-21 h"),
            def("ride_speed_scale_sd", 0.10, D, "-", "day-to-day spread of ride-service speeds"),
        ],
    ),
    (
        "Loads",
        &[
            def("pev_power_factor", 0.95, D, "-", "lagging power factor of charging load"),
            def("base_power_factor", 0.95, D, "-", "power factor used when q_kvar is absent"),
        ],
    ),
];

pub fn definitions() -> impl Iterator<Item = &'static ParamDef> {
    GROUPS.iter().flat_map(|(_, defs)| defs.iter())
}

pub fn definition(key: &str) -> Option<&'static ParamDef> {
    definitions().find(|d| d.key == key)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamEntry {
    pub key: String,
    pub value: f64,
    pub provenance: Provenance,
}

/// Fully resolved parameter values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    values: BTreeMap<String, f64>,
    explicit_loss_ratio: bool,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ParamError {
    #[error("unknown parameter '{0}'")]
    Unknown(String),
    #[error("parameter '{key}' must be a number")]
    NotANumber { key: String },
    #[error("parameter '{key}' = {value}: {reason}")]
    Invalid { key: String, value: f64, reason: String },
}

impl Default for ParamSet {
    fn default() -> Self {
        Self {
            values: definitions().map(|d| (d.key.to_string(), d.default)).collect(),
            explicit_loss_ratio: false,
        }
    }
}

impl ParamSet {
    /// Applies `key = value` pairs on top of the defaults.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self, ParamError> {
        let mut set = Self::default();
        for (key, value) in pairs {
            set.set(key, value)?;
        }
        set.check()?;
        Ok(set)
    }

    /// Parses a TOML table of numbers.
    pub fn from_toml(table: &toml::Table) -> Result<Self, ParamError> {
        let mut pairs = Vec::with_capacity(table.len());
        for (key, v) in table {
            let value = match v {
                toml::Value::Float(f) => *f,
                toml::Value::Integer(n) => *n as f64,
                _ => return Err(ParamError::NotANumber { key: key.clone() }),
            };
            pairs.push((key.as_str(), value));
        }
        Self::from_pairs(pairs)
    }

    fn set(&mut self, key: &str, value: f64) -> Result<(), ParamError> {
        if key == LOSS_RATIO_KEY {
            self.explicit_loss_ratio = true;
        } else if definition(key).is_none() {
            return Err(ParamError::Unknown(key.to_string()));
        }
        if !value.is_finite() {
            return Err(ParamError::Invalid { key: key.into(), value, reason: "not finite".into() });
        }
        self.values.insert(key.to_string(), value);
        Ok(())
    }

    pub fn get(&self, key: &str) -> f64 {
        if key == LOSS_RATIO_KEY && !self.explicit_loss_ratio {
            return self.get("ll") / self.get("cl");
        }
        self.values[key]
    }

    fn check(&self) -> Result<(), ParamError> {
        let invalid = |key: &str, reason: &str| {
            Err(ParamError::Invalid { key: key.into(), value: self.get(key), reason: reason.into() })
        };
        for key in ["h_min", "h_max"] {
            if self.get(key).fract() != 0.0 {
                return invalid(key, "tap limits are whole steps");
            }
        }
        for key in ["pev_power_factor", "base_power_factor"] {
            let pf = self.get(key);
            if !(pf > 0.0 && pf <= 1.0) {
                return invalid(key, "power factor must lie in (0, 1]");
            }
        }
        if !(self.get("cl") > 0.0) && !self.explicit_loss_ratio {
            return invalid("cl", "core loss must be positive to derive the loss ratio");
        }
        if self.get("deadband_half_width") < 0.0 {
            return invalid("deadband_half_width", "must be non-negative");
        }
        Ok(())
    }

    /// Every parameter with its provenance, in definition order.
    pub fn entries(&self) -> Vec<ParamEntry> {
        let mut out: Vec<ParamEntry> = definitions()
            .map(|d| {
                let value = self.get(d.key);
                let provenance = if value == d.default { d.provenance } else { Provenance::Override };
                ParamEntry { key: d.key.into(), value, provenance }
            })
            .collect();
        out.push(ParamEntry {
            key: LOSS_RATIO_KEY.into(),
            value: self.get(LOSS_RATIO_KEY),
            provenance: if self.explicit_loss_ratio { Provenance::Override } else { Provenance::Derived },
        });
        out
    }

    /// Values differing from the built-in defaults.
    pub fn overrides(&self) -> BTreeMap<String, f64> {
        self.entries()
            .into_iter()
            .filter(|e| e.provenance == Provenance::Override)
            .map(|e| (e.key, e.value))
            .collect()
    }

    pub fn thermal(&self) -> ThermalParams {
        ThermalParams {
            s_r: self.get("s_r"),
            dtheta_to_rated: self.get("dtheta_to_rated"),
            dtheta_h_rated: self.get("dtheta_h_rated"),
            tau_to: self.get("tau_to"),
            tau_h: self.get("tau_h"),
            loss_ratio_r: self.get(LOSS_RATIO_KEY),
            oil_exponent_x: self.get("oil_exponent_x"),
            winding_exponent_y: self.get("winding_exponent_y"),
            theta_ambient: Ambient::Constant(self.get("theta_ambient")),
        }
    }

    pub fn aging(&self) -> AgingParams {
        AgingParams {
            alpha: self.get("alpha"),
            beta: self.get("beta"),
            omega: self.get("omega"),
            t_ins_hours: self.get("t_ins_hours"),
        }
    }

    pub fn tco(&self) -> TcoParams {
        TcoParams {
            c_o: self.get("c_o"),
            cl: self.get("cl"),
            ll: self.get("ll"),
            dc: self.get("dc"),
            rf: self.get("rf"),
            ec: self.get("ec"),
            gamma: self.get("gamma"),
            i: self.get("i"),
            n_hours: self.get("n_hours"),
            t_ins_years: self.get("t_ins_years"),
            p_hat: 1.0,
        }
    }

    pub fn regulator(&self) -> VrConfig {
        let v = self.get("v_regulated");
        let half = self.get("deadband_half_width");
        VrConfig {
            v_regulated: v,
            kappa: self.get("kappa"),
            deadband: (v - half, v + half),
            h_min: self.get("h_min") as i32,
            h_max: self.get("h_max") as i32,
            n_op_max: self.get("n_op_max"),
        }
    }

    pub fn behavior(&self) -> BehaviorDistributions {
        let speed = |start_h, end_h, key| SpeedPeriod { start_h, end_h, mph: self.get(key) };
        BehaviorDistributions {
            depart_time: NormalSpec::new(self.get("depart_mean"), self.get("depart_sd")),
            arrive_time: NormalSpec::new(self.get("arrive_mean"), self.get("arrive_sd")),
            daily_miles: NormalSpec::new(self.get("miles_mean"), self.get("miles_sd")),
            energy_per_mile: self.get("energy_per_mile"),
            service_window: (self.get("service_start"), self.get("service_end")),
            avg_speed_by_period: vec![
                speed(7.0, 10.0, "speed_07_10"),
                speed(10.0, 16.0, "speed_10_16"),
                speed(16.0, 19.0, "speed_16_19"),
                speed(19.0, 21.0, "speed_19_21"),
            ],
            ride_speed_scale_sd: self.get("ride_speed_scale_sd"),
        }
    }
}

/// The shipped parameter file: every key at its default, grouped and tagged.
pub fn render_default_file() -> String {
    let mut out = String::from(
        "# Model parameters. Tags mark published values [PAPER] and modelling\n\
         # defaults [DEFAULT]; any edited value is reported as an override.\n",
    );
    for (title, defs) in GROUPS {
        let _ = write!(out, "\n# {title}\n");
        for d in *defs {
            let value = format!("{:?}", d.default);
            let _ = writeln!(out, "{:<22}= {:<20}# {} {} ({})", d.key, value, d.provenance.tag(), d.description, d.unit);
        }
    }
    let _ = write!(
        out,
        "\n# Rated load-loss to core-loss ratio; derived as ll / cl when absent.\n# {LOSS_RATIO_KEY} = 4.015\n"
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_reproduce_core_defaults() {
        let p = ParamSet::default();
        assert_eq!(p.tco(), TcoParams::default());
        assert_eq!(p.thermal(), ThermalParams::default());
        assert_eq!(p.aging(), AgingParams::default());
        assert_eq!(p.regulator(), VrConfig::default());
        assert_eq!(p.behavior(), BehaviorDistributions::default());
    }

    #[test]
    fn shipped_file_parses_to_defaults() {
        let table: toml::Table = render_default_file().parse().unwrap();
        let p = ParamSet::from_toml(&table).unwrap();
        assert_eq!(p, ParamSet::default());
        assert!(p.overrides().is_empty());
    }

    #[test]
    fn provenance_tracks_overrides() {
        let p = ParamSet::from_pairs([("ec", 0.08), ("kappa", 0.0065)]).unwrap();
        let entries = p.entries();
        let find = |k: &str| entries.iter().find(|e| e.key == k).unwrap().provenance;
        assert_eq!(find("ec"), Provenance::Override);
        assert_eq!(find("kappa"), Provenance::Paper);
        assert_eq!(find("tau_to"), Provenance::Default);
        assert_eq!(find(LOSS_RATIO_KEY), Provenance::Derived);
    }

    #[test]
    fn loss_ratio_follows_losses() {
        let p = ParamSet::from_pairs([("ll", 66.0)]).unwrap();
        assert!((p.thermal().loss_ratio_r - 5.0).abs() < 1e-12);
        let p = ParamSet::from_pairs([(LOSS_RATIO_KEY, 3.0)]).unwrap();
        assert_eq!(p.thermal().loss_ratio_r, 3.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(ParamSet::from_pairs([("zeta", 1.0)]), Err(ParamError::Unknown("zeta".into())));
        assert!(ParamSet::from_pairs([("h_min", -15.5)]).is_err());
        let table: toml::Table = "ec = \"cheap\"".parse().unwrap();
        assert!(matches!(ParamSet::from_toml(&table), Err(ParamError::NotANumber { .. })));
    }
}
