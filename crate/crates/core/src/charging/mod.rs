//! PEV charging behavior, per-vehicle session sampling and fleet load profiles.
//!
//! Three behaviors are modeled:
//!
//! - slow-charging commuters plug in at home on arrival every evening and
//!   replenish the day's driving energy;
//! - fast-charging commuters carry their state of charge across days and charge
//!   en route (on the morning or evening trip, equally likely) once it drops
//!   below the range-anxiety threshold;
//! - ride-service vehicles drive through a service window and charge en route
//!   whenever the threshold is crossed.
//!
//! Every charge is a constant-power rectangular pulse lasting
//! `battery_kwh * (1 - soc) / power_kw` hours.

mod profile;
mod sampling;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use profile::{generate_fleet_profile, rasterize_session, LoadProfile};
pub use sampling::{
    fast_commuter_day, ride_service_day, sample_commute_day, sample_commuter_fast,
    sample_commuter_slow_day, sample_ride_service_day, slow_commuter_session, vehicle_sessions,
    CommuteDay, TripLeg,
};

/// Residential "expedited" home charging level.
pub const SLOW_CHARGE_KW: f64 = 19.2;
/// DC public fast-charging level.
pub const FAST_CHARGE_KW: f64 = 120.0;
pub const SHORT_RANGE_KWH: f64 = 40.0;
pub const LONG_RANGE_KWH: f64 = 60.0;
pub const DEFAULT_ANXIETY_THRESHOLD: f64 = 0.30;

#[derive(Debug, Error, PartialEq)]
pub enum ChargingError {
    #[error("invalid {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("resolution {0} h does not divide 24 h evenly")]
    Resolution(f64),
    #[error("scenario index {0} is outside the catalog (1..=10)")]
    UnknownScenario(u8),
    #[error("{0}")]
    Scenario(String),
}

fn check(name: &'static str, value: f64, ok: bool) -> Result<(), ChargingError> {
    if value.is_finite() && ok {
        Ok(())
    } else {
        Err(ChargingError::InvalidParameter { name, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VehicleClass {
    Commuter,
    RideService,
}

/// Mean and standard deviation of a normal variate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalSpec {
    pub mean: f64,
    pub sd: f64,
}

impl NormalSpec {
    pub const fn new(mean: f64, sd: f64) -> Self {
        Self { mean, sd }
    }
}

/// Average driving speed over a time-of-day interval `[start_h, end_h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedPeriod {
    pub start_h: f64,
    pub end_h: f64,
    pub mph: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorDistributions {
    /// Morning departure time of day (h).
    pub depart_time: NormalSpec,
    /// Evening arrival time of day (h).
    pub arrive_time: NormalSpec,
    /// Daily driven distance (mi), truncated at zero.
    pub daily_miles: NormalSpec,
    /// kWh per mile.
    pub energy_per_mile: f64,
    /// Ride-service working hours `[start, end]`.
    pub service_window: (f64, f64),
    pub avg_speed_by_period: Vec<SpeedPeriod>,
    /// Standard deviation of the per-day multiplier applied to every
    /// ride-service speed. The multiplier is clamped to `[0.5, 1.5]`.
    pub ride_speed_scale_sd: f64,
}

impl Default for BehaviorDistributions {
    fn default() -> Self {
        Self {
            depart_time: NormalSpec::new(7.5, 1.0),
            arrive_time: NormalSpec::new(17.5, 1.0),
            daily_miles: NormalSpec::new(32.0, 12.0),
            energy_per_mile: 0.30,
            service_window: (7.0, 21.0),
            avg_speed_by_period: vec![
                SpeedPeriod { start_h: 7.0, end_h: 10.0, mph: 22.0 },
                SpeedPeriod { start_h: 10.0, end_h: 16.0, mph: 28.0 },
                SpeedPeriod { start_h: 16.0, end_h: 19.0, mph: 20.0 },
                SpeedPeriod { start_h: 19.0, end_h: 21.0, mph: 26.0 },
            ],
            ride_speed_scale_sd: 0.10,
        }
    }
}

impl BehaviorDistributions {
    pub fn validate(&self) -> Result<(), ChargingError> {
        for (name, n) in [
            ("depart_time.sd", self.depart_time),
            ("arrive_time.sd", self.arrive_time),
            ("daily_miles.sd", self.daily_miles),
        ] {
            check(name, n.sd, n.sd > 0.0)?;
            check(name, n.mean, true)?;
        }
        if self.arrive_time.mean <= self.depart_time.mean {
            return Err(ChargingError::Scenario(format!(
                "arrival mean {} h must follow departure mean {} h",
                self.arrive_time.mean, self.depart_time.mean
            )));
        }
        check("energy_per_mile", self.energy_per_mile, self.energy_per_mile > 0.0)?;
        let (s, e) = self.service_window;
        check("service_window.end", e, s.is_finite() && s < e)?;
        for p in &self.avg_speed_by_period {
            check("avg_speed_by_period.mph", p.mph, p.mph >= 0.0)?;
            check("avg_speed_by_period.end_h", p.end_h, p.start_h.is_finite() && p.start_h < p.end_h)?;
        }
        check("ride_speed_scale_sd", self.ride_speed_scale_sd, self.ride_speed_scale_sd >= 0.0)
    }
}

/// One fleet of identical-behavior vehicles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargingScenario {
    pub vehicle_class: VehicleClass,
    pub fleet_count: u32,
    pub charge_power_kw: f64,
    pub battery_kwh: f64,
    pub anxiety_threshold: f64,
    pub behavior: BehaviorDistributions,
    /// Catalog index 1..=10, `None` for a custom fleet.
    pub scenario_index: Option<u8>,
}

impl ChargingScenario {
    /// Catalog of the ten simulated scenarios: commuters (1-8) over
    /// {500, 1000} vehicles x {slow, fast} x {40, 60 kWh}, then ride-service
    /// fleets of 500 (9) and 1000 (10) on 120 kW / 60 kWh.
    pub fn catalog(index: u8) -> Result<Self, ChargingError> {
        let (class, count, power, battery) = match index {
            1..=8 => {
                let i = index - 1;
                let count = if i < 4 { 500 } else { 1000 };
                let power = if i % 4 < 2 { SLOW_CHARGE_KW } else { FAST_CHARGE_KW };
                let battery = if i.is_multiple_of(2) { SHORT_RANGE_KWH } else { LONG_RANGE_KWH };
                (VehicleClass::Commuter, count, power, battery)
            }
            9 => (VehicleClass::RideService, 500, FAST_CHARGE_KW, LONG_RANGE_KWH),
            10 => (VehicleClass::RideService, 1000, FAST_CHARGE_KW, LONG_RANGE_KWH),
            other => return Err(ChargingError::UnknownScenario(other)),
        };
        Ok(Self {
            vehicle_class: class,
            fleet_count: count,
            charge_power_kw: power,
            battery_kwh: battery,
            anxiety_threshold: DEFAULT_ANXIETY_THRESHOLD,
            behavior: BehaviorDistributions::default(),
            scenario_index: Some(index),
        })
    }

    pub fn custom(class: VehicleClass, fleet_count: u32, charge_power_kw: f64, battery_kwh: f64) -> Self {
        Self {
            vehicle_class: class,
            fleet_count,
            charge_power_kw,
            battery_kwh,
            anxiety_threshold: DEFAULT_ANXIETY_THRESHOLD,
            behavior: BehaviorDistributions::default(),
            scenario_index: None,
        }
    }

    pub fn with_fleet_count(mut self, n: u32) -> Self {
        self.fleet_count = n;
        self
    }

    /// Slow commuters charge at home every night; everything else waits for
    /// the anxiety threshold.
    pub fn is_home_charging(&self) -> bool {
        self.vehicle_class == VehicleClass::Commuter && self.charge_power_kw < FAST_CHARGE_KW
    }

    pub fn validate(&self) -> Result<(), ChargingError> {
        check("charge_power_kw", self.charge_power_kw, self.charge_power_kw > 0.0)?;
        check("battery_kwh", self.battery_kwh, self.battery_kwh > 0.0)?;
        check(
            "anxiety_threshold",
            self.anxiety_threshold,
            self.anxiety_threshold > 0.0 && self.anxiety_threshold < 1.0,
        )?;
        self.behavior.validate()?;
        if self.scenario_index.is_some() {
            let catalog_power = [SLOW_CHARGE_KW, FAST_CHARGE_KW].contains(&self.charge_power_kw);
            let catalog_battery = [SHORT_RANGE_KWH, LONG_RANGE_KWH].contains(&self.battery_kwh);
            if !catalog_power || !catalog_battery {
                return Err(ChargingError::Scenario(
                    "catalog scenarios use 19.2/120 kW chargers and 40/60 kWh batteries".into(),
                ));
            }
            if self.vehicle_class == VehicleClass::RideService
                && (self.charge_power_kw != FAST_CHARGE_KW || self.battery_kwh != LONG_RANGE_KWH)
            {
                return Err(ChargingError::Scenario(
                    "ride-service catalog scenarios are 120 kW / 60 kWh".into(),
                ));
            }
        }
        Ok(())
    }
}

/// A constant-power charge event. Times are hours from the start of the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargingSession {
    pub start_h: f64,
    pub duration_h: f64,
    pub power_kw: f64,
    pub vehicle_id: u32,
}

impl ChargingSession {
    pub fn end_h(&self) -> f64 {
        self.start_h + self.duration_h
    }

    pub fn energy_kwh(&self) -> f64 {
        self.duration_h * self.power_kw
    }
}

/// Hours needed to charge from `soc` to full.
pub fn charge_duration(battery_kwh: f64, soc: f64, power_kw: f64) -> Result<f64, ChargingError> {
    check("battery_kwh", battery_kwh, battery_kwh > 0.0)?;
    check("soc", soc, (0.0..=1.0).contains(&soc))?;
    check("power_kw", power_kw, power_kw > 0.0)?;
    Ok(battery_kwh * (1.0 - soc) / power_kw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charge_duration_examples() {
        assert_eq!(charge_duration(40.0, 1.0, 19.2).unwrap(), 0.0);
        assert!((charge_duration(60.0, 0.30, 120.0).unwrap() - 0.35).abs() < 1e-12);
        // DC level-2 charging of a 25 kWh pack at 96 kW lands in the 0.2-0.58 h band.
        let dc2 = charge_duration(25.0, 0.0, 96.0).unwrap();
        assert!((dc2 - 0.2604).abs() < 1e-4);
        assert!((0.2..=0.58).contains(&dc2));
    }

    #[test]
    fn charge_duration_rejects_bad_inputs() {
        assert!(charge_duration(40.0, 1.2, 19.2).is_err());
        assert!(charge_duration(40.0, -0.1, 19.2).is_err());
        assert!(charge_duration(0.0, 0.5, 19.2).is_err());
        assert!(charge_duration(40.0, 0.5, 0.0).is_err());
        assert!(charge_duration(f64::NAN, 0.5, 19.2).is_err());
        assert!(charge_duration(40.0, 0.5, f64::INFINITY).is_err());
    }

    #[test]
    fn catalog_matches_scenario_table() {
        let expected = [
            (1, VehicleClass::Commuter, 500, 19.2, 40.0),
            (2, VehicleClass::Commuter, 500, 19.2, 60.0),
            (3, VehicleClass::Commuter, 500, 120.0, 40.0),
            (4, VehicleClass::Commuter, 500, 120.0, 60.0),
            (5, VehicleClass::Commuter, 1000, 19.2, 40.0),
            (6, VehicleClass::Commuter, 1000, 19.2, 60.0),
            (7, VehicleClass::Commuter, 1000, 120.0, 40.0),
            (8, VehicleClass::Commuter, 1000, 120.0, 60.0),
            (9, VehicleClass::RideService, 500, 120.0, 60.0),
            (10, VehicleClass::RideService, 1000, 120.0, 60.0),
        ];
        for (i, class, n, p, c) in expected {
            let s = ChargingScenario::catalog(i).unwrap();
            assert_eq!((s.vehicle_class, s.fleet_count, s.charge_power_kw, s.battery_kwh), (class, n, p, c));
            assert_eq!(s.anxiety_threshold, 0.30);
            s.validate().unwrap();
        }
        assert!(ChargingScenario::catalog(0).is_err());
        assert!(ChargingScenario::catalog(11).is_err());
    }

    #[test]
    fn catalog_invariants_are_enforced() {
        let mut s = ChargingScenario::catalog(9).unwrap();
        s.battery_kwh = 40.0;
        assert!(s.validate().is_err());
        let mut s = ChargingScenario::catalog(1).unwrap();
        s.charge_power_kw = 50.0;
        assert!(s.validate().is_err());
        s.scenario_index = None;
        s.validate().unwrap();
        let mut b = BehaviorDistributions::default();
        b.arrive_time.mean = 6.0;
        assert!(b.validate().is_err());
    }
}
