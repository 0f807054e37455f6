//! Transformer top-oil and hot-spot temperatures, insulation aging and loss of life.
//!
//! Both temperature components follow first-order dynamics toward targets set
//! by the load factor K. With K held constant over a slot the response is
//! integrated exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ThermalError {
    #[error("invalid thermal parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("hot-spot temperature {0} °C is at or below the aging-law pole")]
    Pole(f64),
    #[error("ambient series has {got} slots, load series {expected}")]
    AmbientLength { got: usize, expected: usize },
    #[error("yearly loss of life must be non-negative, got {0}%")]
    NegativeLol(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Ambient {
    Constant(f64),
    Series(Vec<f64>),
}

impl Ambient {
    pub fn at(&self, slot: usize) -> f64 {
        match self {
            Ambient::Constant(t) => *t,
            Ambient::Series(s) => s[slot],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    pub s_r: f64,
    pub dtheta_to_rated: f64,
    pub dtheta_h_rated: f64,
    pub tau_to: f64,
    pub tau_h: f64,
    /// Rated load loss over no-load loss.
    pub loss_ratio_r: f64,
    pub oil_exponent_x: f64,
    pub winding_exponent_y: f64,
    pub theta_ambient: Ambient,
}

impl Default for ThermalParams {
    fn default() -> Self {
        Self {
            s_r: 10_000.0,
            dtheta_to_rated: 55.0,
            dtheta_h_rated: 25.0,
            tau_to: 3.5,
            tau_h: 0.08,
            loss_ratio_r: 53.0 / 13.2,
            oil_exponent_x: 0.8,
            winding_exponent_y: 1.6,
            theta_ambient: Ambient::Constant(30.0),
        }
    }
}

impl ThermalParams {
    pub fn validate(&self) -> Result<(), ThermalError> {
        let checks = [
            ("s_r", self.s_r),
            ("dtheta_to_rated", self.dtheta_to_rated),
            ("dtheta_h_rated", self.dtheta_h_rated),
            ("tau_to", self.tau_to),
            ("tau_h", self.tau_h),
            ("loss_ratio_r", self.loss_ratio_r),
            ("oil_exponent_x", self.oil_exponent_x),
            ("winding_exponent_y", self.winding_exponent_y),
        ];
        for (name, value) in checks {
            if !(value.is_finite() && value > 0.0) {
                return Err(ThermalError::InvalidParameter { name, value });
            }
        }
        if self.tau_h >= self.tau_to {
            return Err(ThermalError::InvalidParameter { name: "tau_h", value: self.tau_h });
        }
        Ok(())
    }

    fn top_oil_rise_target(&self, k: f64) -> f64 {
        let r = self.loss_ratio_r;
        self.dtheta_to_rated * ((1.0 + r * k * k) / (1.0 + r)).powf(self.oil_exponent_x)
    }

    fn hot_spot_rise_target(&self, k: f64) -> f64 {
        self.dtheta_h_rated * k.powf(self.winding_exponent_y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgingParams {
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
    /// Normal insulation life (h).
    pub t_ins_hours: f64,
}

impl Default for AgingParams {
    fn default() -> Self {
        Self { alpha: 15_000.0 / 383.0, beta: 15_000.0, omega: 273.0, t_ins_hours: 135_000.0 }
    }
}

impl AgingParams {
    pub fn t_ins_years(&self) -> f64 {
        self.t_ins_hours / HOURS_PER_YEAR
    }
}

pub const HOURS_PER_YEAR: f64 = 8760.0;

/// Normal insulation life expressed in years, rounded as conventionally reported.
pub const T_INS_YEARS: f64 = 15.41;

/// Lifetimes below this many years are reported as the ε class.
pub const EPS_LIFETIME_YEARS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalState {
    pub theta_to: f64,
    pub dtheta_h: f64,
    pub theta_hst: f64,
}

impl ThermalState {
    pub fn new(theta_to: f64, dtheta_h: f64) -> Self {
        Self { theta_to, dtheta_h, theta_hst: theta_to + dtheta_h }
    }
}

/// Equilibrium temperatures under constant load factor `k` and ambient `theta_a`.
pub fn steady_state_at(k: f64, theta_a: f64, params: &ThermalParams) -> ThermalState {
    ThermalState::new(theta_a + params.top_oil_rise_target(k), params.hot_spot_rise_target(k))
}

/// Equilibrium temperatures at the ambient of slot 0.
pub fn steady_state_temps(k: f64, params: &ThermalParams) -> ThermalState {
    steady_state_at(k, params.theta_ambient.at(0), params)
}

/// Advances the state by `dt_h` with `k` and `theta_a` held constant.
pub fn step_thermal_at(state: &ThermalState, k: f64, theta_a: f64, dt_h: f64, params: &ThermalParams) -> ThermalState {
    let target = steady_state_at(k, theta_a, params);
    let relax = |current: f64, target: f64, tau: f64| target + (current - target) * (-dt_h / tau).exp();
    ThermalState::new(
        relax(state.theta_to, target.theta_to, params.tau_to),
        relax(state.dtheta_h, target.dtheta_h, params.tau_h),
    )
}

/// Advances the state by `dt_h` at the ambient of slot 0.
pub fn step_thermal(state: &ThermalState, k: f64, dt_h: f64, params: &ThermalParams) -> ThermalState {
    step_thermal_at(state, k, params.theta_ambient.at(0), dt_h, params)
}

/// Hot-spot series for a load-factor series, one state per slot start. The
/// rollout starts in equilibrium with the first slot's load.
pub fn rollout(k_series: &[f64], dt_h: f64, params: &ThermalParams) -> Result<Vec<ThermalState>, ThermalError> {
    params.validate()?;
    if let Ambient::Series(s) = &params.theta_ambient {
        if s.len() != k_series.len() {
            return Err(ThermalError::AmbientLength { got: s.len(), expected: k_series.len() });
        }
    }
    let Some(&k0) = k_series.first() else {
        return Ok(Vec::new());
    };
    let mut state = steady_state_at(k0, params.theta_ambient.at(0), params);
    let mut out = Vec::with_capacity(k_series.len());
    for (t, &k) in k_series.iter().enumerate() {
        out.push(state);
        state = step_thermal_at(&state, k, params.theta_ambient.at(t), dt_h, params);
    }
    Ok(out)
}

/// Accelerated aging factor.
pub fn faa(theta_hst: f64, aging: &AgingParams) -> Result<f64, ThermalError> {
    let denom = theta_hst + aging.omega;
    if !(denom > 0.0) {
        return Err(ThermalError::Pole(theta_hst));
    }
    Ok((aging.alpha - aging.beta / denom).exp())
}

/// Fraction of normal insulation life consumed over the series.
pub fn accumulate_lol(theta_series: &[f64], dt_h: f64, aging: &AgingParams) -> Result<f64, ThermalError> {
    let mut total = 0.0;
    for &theta in theta_series {
        total += faa(theta, aging)? * dt_h;
    }
    Ok(total / aging.t_ins_hours)
}

/// Running loss of life after each slot.
pub fn cumulative_lol(theta_series: &[f64], dt_h: f64, aging: &AgingParams) -> Result<Vec<f64>, ThermalError> {
    let mut total = 0.0;
    theta_series
        .iter()
        .map(|&theta| {
            total += faa(theta, aging)? * dt_h / aging.t_ins_hours;
            Ok(total)
        })
        .collect()
}

/// Years until end of insulation life at a constant yearly loss of life (%),
/// capped at the normal life.
pub fn estimated_lifetime(yearly_lol_percent: f64, t_ins_years: f64) -> Result<f64, ThermalError> {
    if !(yearly_lol_percent >= 0.0) {
        return Err(ThermalError::NegativeLol(yearly_lol_percent));
    }
    if yearly_lol_percent == 0.0 {
        return Ok(t_ins_years);
    }
    Ok((100.0 / yearly_lol_percent).min(t_ins_years))
}

pub fn is_eps_lifetime(lifetime_years: f64) -> bool {
    lifetime_years < EPS_LIFETIME_YEARS
}
