//! Step-voltage regulator: dead-band tap control and operation-count wear.
//!
//! Raising the tap by one step boosts the regulated voltage by `kappa` pu.
//! Outside the dead-band the controller moves
//! `round((v - v_regulated) / kappa)` steps against the deviation, saturating
//! at the tap limits. Wear is the cumulative number of steps moved.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RegulatorError {
    #[error("invalid regulator setting {name}: {value}")]
    InvalidSetting { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VrConfig {
    pub v_regulated: f64,
    /// Voltage change per tap step (pu).
    pub kappa: f64,
    /// Inclusive `[lower, upper]` band in which no action is taken.
    pub deadband: (f64, f64),
    pub h_min: i32,
    pub h_max: i32,
    /// Lifetime budget of tap steps.
    pub n_op_max: f64,
}

impl Default for VrConfig {
    fn default() -> Self {
        Self::with_target(1.0, 0.0065)
    }
}

impl VrConfig {
    /// Standard ±16 step regulator with a ±1 step dead-band around `v_regulated`.
    pub fn with_target(v_regulated: f64, kappa: f64) -> Self {
        Self {
            v_regulated,
            kappa,
            deadband: (v_regulated - kappa, v_regulated + kappa),
            h_min: -16,
            h_max: 16,
            n_op_max: 1.0e6,
        }
    }

    pub fn validate(&self) -> Result<(), RegulatorError> {
        let bad = |name, value| Err(RegulatorError::InvalidSetting { name, value });
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return bad("kappa", self.kappa);
        }
        let (lo, hi) = self.deadband;
        if !(lo <= self.v_regulated && self.v_regulated <= hi) {
            return bad("v_regulated", self.v_regulated);
        }
        if !(self.h_min < 0 && 0 < self.h_max) {
            return bad("h_min/h_max", f64::from(self.h_min));
        }
        if !(self.n_op_max.is_finite() && self.n_op_max > 0.0) {
            return bad("n_op_max", self.n_op_max);
        }
        Ok(())
    }

    pub fn in_deadband(&self, v: f64) -> bool {
        self.deadband.0 <= v && v <= self.deadband.1
    }

    /// Multiplicative voltage ratio applied downstream at tap `h`.
    pub fn ratio(&self, h: i32) -> f64 {
        1.0 + f64::from(h) * self.kappa
    }
}

/// Recorded tap position, effective from `slot` onward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TapChange {
    pub slot: usize,
    pub h: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VrState {
    pub h: i32,
    /// Cumulative tap steps, Σ|Δh|.
    pub op_count: u64,
    /// Number of control actions that moved the tap (each may span several steps).
    pub actions: u64,
    /// Initial position followed by every change.
    pub history: Vec<TapChange>,
}

impl Default for VrState {
    fn default() -> Self {
        Self::at(0)
    }
}

impl VrState {
    pub fn at(h: i32) -> Self {
        Self { h, op_count: 0, actions: 0, history: vec![TapChange { slot: 0, h }] }
    }

    /// Applies one control decision in place and returns the step change.
    pub fn apply(&mut self, v_measured: f64, config: &VrConfig, slot: usize) -> i32 {
        let dh = tap_delta(self.h, v_measured, config);
        if dh != 0 {
            self.h += dh;
            self.op_count += dh.unsigned_abs() as u64;
            self.actions += 1;
            self.history.push(TapChange { slot, h: self.h });
        }
        dh
    }

    /// Σ|h(n) − h(n−1)| recomputed from the history.
    pub fn telescoped_ops(&self) -> u64 {
        self.history.windows(2).map(|w| (w[1].h - w[0].h).unsigned_abs() as u64).sum()
    }

    /// Tap position in force at every slot `0..n_slots`.
    pub fn positions(&self, n_slots: usize) -> Vec<i32> {
        let mut out = Vec::with_capacity(n_slots);
        let mut idx = 0;
        let mut h = self.history.first().map_or(self.h, |c| c.h);
        for slot in 0..n_slots {
            while idx < self.history.len() && self.history[idx].slot <= slot {
                h = self.history[idx].h;
                idx += 1;
            }
            out.push(h);
        }
        out
    }
}

/// Step change chosen for a measured voltage at current tap `h`.
pub fn tap_delta(h: i32, v_measured: f64, config: &VrConfig) -> i32 {
    if config.in_deadband(v_measured) {
        return 0;
    }
    let steps = ((v_measured - config.v_regulated) / config.kappa).round();
    let target = (f64::from(h) - steps).clamp(f64::from(config.h_min), f64::from(config.h_max));
    target as i32 - h
}

/// Functional form of one control step.
pub fn decide_tap(state: &VrState, v_measured: f64, config: &VrConfig, slot: usize) -> VrState {
    let mut next = state.clone();
    next.apply(v_measured, config, slot);
    next
}

/// Folds the controller over a measured-voltage series, one decision per sample.
pub fn run_series(v_series: &[f64], config: &VrConfig) -> VrState {
    let mut state = VrState::default();
    for (slot, &v) in v_series.iter().enumerate() {
        state.apply(v, config, slot);
    }
    state
}

/// Fraction of the tap-operation budget consumed.
pub fn vr_lol(state: &VrState, config: &VrConfig) -> f64 {
    state.op_count as f64 / config.n_op_max
}

/// Cost of the consumed operating life.
pub fn tco_vr(lol: f64, capital_cost: f64) -> f64 {
    lol * capital_cost
}
