use serde::{Deserialize, Serialize};

use super::{vehicle_sessions, ChargingError, ChargingScenario, ChargingSession};
use crate::seed;

/// Fixed-resolution power series (kW per slot).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadProfile {
    pub resolution_h: f64,
    pub values: Vec<f64>,
}

impl LoadProfile {
    pub fn zeros(resolution_h: f64, horizon_slots: usize) -> Self {
        Self { resolution_h, values: vec![0.0; horizon_slots] }
    }

    pub fn horizon_slots(&self) -> usize {
        self.values.len()
    }

    pub fn horizon_h(&self) -> f64 {
        self.resolution_h * self.values.len() as f64
    }

    /// Σ value · resolution, in kWh.
    pub fn energy_kwh(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.resolution_h
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn add_assign(&mut self, other: &LoadProfile) {
        debug_assert_eq!(self.values.len(), other.values.len());
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }
}

/// Number of slots per day, if `resolution_h` tiles 24 h exactly.
pub(crate) fn slots_per_day(resolution_h: f64) -> Result<usize, ChargingError> {
    if !(resolution_h.is_finite() && resolution_h > 0.0) {
        return Err(ChargingError::Resolution(resolution_h));
    }
    let n = (24.0 / resolution_h).round();
    if n < 1.0 || (n * resolution_h - 24.0).abs() > 1e-9 {
        return Err(ChargingError::Resolution(resolution_h));
    }
    Ok(n as usize)
}

/// Adds a session's power to the slots it overlaps, prorated by the overlapped
/// fraction of each slot. The horizon is treated as periodic: a session
/// running past the last slot continues from slot zero, so the profile
/// always holds the session's full energy.
pub fn rasterize_session(profile: &mut LoadProfile, session: &ChargingSession) {
    let n = profile.values.len();
    if n == 0 || session.duration_h <= 0.0 {
        return;
    }
    let res = profile.resolution_h;
    let horizon = res * n as f64;
    let mut start = session.start_h.rem_euclid(horizon);
    let mut slot = ((start / res).floor() as usize).min(n - 1);
    if (slot + 1) as f64 * res <= start && slot + 1 < n {
        slot += 1;
    }
    let mut remaining = session.duration_h;
    loop {
        let slot_end = (slot + 1) as f64 * res;
        let span = (slot_end - start).clamp(0.0, remaining);
        profile.values[slot] += session.power_kw * span / res;
        remaining -= span;
        if remaining <= 0.0 {
            break;
        }
        slot = (slot + 1) % n;
        start = slot as f64 * res;
    }
}

/// Aggregated charging profile of a whole fleet. Vehicle `v` samples from
/// its own stream derived from `seed`, so the result does not depend on
/// evaluation order.
pub fn generate_fleet_profile(
    scenario: &ChargingScenario,
    horizon_days: u32,
    resolution_h: f64,
    seed: u64,
) -> Result<LoadProfile, ChargingError> {
    let per_day = slots_per_day(resolution_h)?;
    scenario.validate()?;
    let mut profile = LoadProfile::zeros(resolution_h, per_day * horizon_days as usize);
    for v in 0..scenario.fleet_count {
        let mut rng = seed::stream(seed, seed::TAG_VEHICLE, u64::from(v));
        for s in vehicle_sessions(scenario, v, horizon_days, &mut rng) {
            rasterize_session(&mut profile, &s);
        }
    }
    Ok(profile)
}
