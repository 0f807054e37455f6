use serde::{Deserialize, Serialize};

use crate::charging::{ChargingError, ChargingScenario, FAST_CHARGE_KW, SHORT_RANGE_KWH, SLOW_CHARGE_KW};
use crate::charging::VehicleClass;

/// A set of vehicle groups simulated together on one feeder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fleet {
    pub label: String,
    pub groups: Vec<ChargingScenario>,
}

impl Fleet {
    /// No vehicles: the recorded base load alone.
    pub fn benchmark() -> Self {
        Self { label: "benchmark".into(), groups: Vec::new() }
    }

    pub fn scenario(index: u8) -> Result<Self, ChargingError> {
        Ok(Self { label: format!("scenario-{index}"), groups: vec![ChargingScenario::catalog(index)?] })
    }

    pub fn single(label: impl Into<String>, scenario: ChargingScenario) -> Self {
        Self { label: label.into(), groups: vec![scenario] }
    }

    /// Slow home chargers and fast en-route chargers in the given counts.
    pub fn mixed(label: impl Into<String>, slow: u32, fast: u32) -> Self {
        let slow = ChargingScenario::custom(VehicleClass::Commuter, slow, SLOW_CHARGE_KW, SHORT_RANGE_KWH);
        let fast = ChargingScenario::custom(VehicleClass::Commuter, fast, FAST_CHARGE_KW, SHORT_RANGE_KWH);
        Self { label: label.into(), groups: vec![slow, fast] }
    }

    pub fn vehicle_count(&self) -> u32 {
        self.groups.iter().map(|g| g.fleet_count).sum()
    }

    /// Σ rated charger power (kW).
    pub fn rated_kw(&self) -> f64 {
        self.groups.iter().map(|g| f64::from(g.fleet_count) * g.charge_power_kw).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.vehicle_count() == 0
    }

    pub fn validate(&self) -> Result<(), ChargingError> {
        self.groups.iter().try_for_each(ChargingScenario::validate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Area {
    Urban,
    Suburban,
    Rural,
}

impl Area {
    /// (slow, fast) composition of the charging population.
    pub fn shares(self) -> (f64, f64) {
        match self {
            Area::Suburban => (0.6, 0.4),
            Area::Urban => (0.7, 0.3),
            Area::Rural => (0.8, 0.2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Area::Urban => "urban",
            Area::Suburban => "suburban",
            Area::Rural => "rural",
        }
    }
}

impl std::str::FromStr for Area {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "urban" => Ok(Area::Urban),
            "suburban" => Ok(Area::Suburban),
            "rural" => Ok(Area::Rural),
            other => Err(format!("unknown area '{other}' (expected urban, suburban or rural)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedFleetSpec {
    pub pl_percent: f64,
    pub slow_share: f64,
    pub fast_share: f64,
    pub base_peak_kw: f64,
}

impl MixedFleetSpec {
    pub fn for_area(area: Area, pl_percent: f64, base_peak_kw: f64) -> Self {
        let (slow_share, fast_share) = area.shares();
        Self { pl_percent, slow_share, fast_share, base_peak_kw }
    }

    pub fn validate(&self) -> Result<(), ChargingError> {
        let bad = |name, value| Err(ChargingError::InvalidParameter { name, value });
        if !(self.pl_percent.is_finite() && self.pl_percent >= 0.0) {
            return bad("pl_percent", self.pl_percent);
        }
        for (name, v) in [("slow_share", self.slow_share), ("fast_share", self.fast_share)] {
            if !(0.0..=1.0).contains(&v) {
                return bad(name, v);
            }
        }
        if (self.slow_share + self.fast_share - 1.0).abs() > 1e-9 {
            return bad("slow_share + fast_share", self.slow_share + self.fast_share);
        }
        if !(self.base_peak_kw > 0.0 && self.base_peak_kw.is_finite()) {
            return bad("base_peak_kw", self.base_peak_kw);
        }
        Ok(())
    }
}

/// Penetration level (%): Σ rated charger power over peak base load.
pub fn penetration_level(fleet: &Fleet, base_peak_kw: f64) -> f64 {
    if fleet.is_empty() {
        return 0.0;
    }
    fleet.rated_kw() / base_peak_kw * 100.0
}

/// Slow and fast charger counts that realize the requested penetration level.
pub fn build_mixed_fleet(spec: &MixedFleetSpec) -> Result<(u32, u32), ChargingError> {
    spec.validate()?;
    let target_kw = spec.pl_percent * spec.base_peak_kw / 100.0;
    let slow = (spec.slow_share * target_kw / SLOW_CHARGE_KW).round();
    let fast = (spec.fast_share * target_kw / FAST_CHARGE_KW).round();
    Ok((slow as u32, fast as u32))
}

/// Mixed fleet for an area at a penetration level, labelled `"<area>-pl<PL>"`.
pub fn area_fleet(area: Area, pl_percent: f64, base_peak_kw: f64) -> Result<Fleet, ChargingError> {
    let (slow, fast) = build_mixed_fleet(&MixedFleetSpec::for_area(area, pl_percent, base_peak_kw))?;
    Ok(Fleet::mixed(format!("{}-pl{}", area.name(), pl_percent), slow, fast))
}

/// Penetration levels of the standard sweep, benchmark first.
pub const PL_SWEEP: [f64; 5] = [0.0, 50.0, 100.0, 200.0, 300.0];
