//! Monte Carlo assessment: fleets are placed on the feeder, simulated over the
//! horizon for every iteration, and the averaged loading drives the asset
//! aging and cost models.

mod fleet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charging::{rasterize_session, vehicle_sessions, ChargingError, LoadProfile};
use crate::economics::{self, EconomicsError, ReestablishedOptions, TcoBreakdown, TcoParams};
use crate::network::{run_timeseries, BaseLoad, BusId, NetworkError, RadialFeeder, TimeSeriesOptions};
use crate::regulator::{self, VrConfig};
use crate::seed;
use crate::thermal::{self, AgingParams, ThermalError, ThermalParams, HOURS_PER_YEAR};

pub use fleet::{
    area_fleet, build_mixed_fleet, penetration_level, Area, Fleet, MixedFleetSpec, PL_SWEEP,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Charging(#[from] ChargingError),
    #[error("iteration {iteration}: {source}")]
    Network { iteration: u32, source: NetworkError },
    #[error(transparent)]
    Thermal(#[from] ThermalError),
    #[error(transparent)]
    Economics(#[from] EconomicsError),
}

impl HarnessError {
    pub fn is_non_convergence(&self) -> bool {
        matches!(self, HarnessError::Network { source, .. } if source.is_non_convergence())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ExpectationMode {
    /// Average the load factor over iterations, then run the thermal model once.
    #[default]
    MeanKThenModel,
    /// Run the thermal model per iteration and average the loss of life.
    PerIterationModelThenMean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McsConfig {
    pub iterations: u32,
    pub master_seed: u64,
    pub horizon_days: u32,
    pub resolution_h: f64,
    pub expectation_mode: ExpectationMode,
    pub pev_power_factor: f64,
    pub phase_shares: Option<[f64; 3]>,
    pub monitored_buses: Vec<BusId>,
}

impl Default for McsConfig {
    fn default() -> Self {
        Self {
            iterations: 100,
            master_seed: 2020,
            horizon_days: 365,
            resolution_h: 0.25,
            expectation_mode: ExpectationMode::MeanKThenModel,
            pev_power_factor: 0.95,
            phase_shares: None,
            monitored_buses: Vec::new(),
        }
    }
}

impl McsConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.iterations == 0 {
            return Err(HarnessError::Config("iterations must be at least 1".into()));
        }
        if self.horizon_days == 0 {
            return Err(HarnessError::Config("horizon_days must be at least 1".into()));
        }
        if !(self.pev_power_factor > 0.0 && self.pev_power_factor <= 1.0) {
            return Err(HarnessError::Config(format!("PEV power factor {} outside (0, 1]", self.pev_power_factor)));
        }
        Ok(())
    }

    pub fn horizon_slots(&self) -> usize {
        (f64::from(self.horizon_days) * 24.0 / self.resolution_h).round() as usize
    }
}

/// Asset and cost models applied to the simulated loading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub thermal: ThermalParams,
    pub aging: AgingParams,
    pub tco: TcoParams,
    /// Capital cost of one regulator ($).
    pub vr_capital_cost: f64,
    /// Charge at least the calendar share of the insulation life in the
    /// re-established capital term.
    pub calendar_floor: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            thermal: ThermalParams::default(),
            aging: AgingParams::default(),
            tco: TcoParams::default(),
            vr_capital_cost: 60_000.0,
            calendar_floor: true,
        }
    }
}

/// Everything one iteration produces that the report needs.
#[derive(Debug, Clone)]
pub struct IterationOutput {
    pub k: Vec<f64>,
    /// Tap steps per regulator trace over the simulated horizon.
    pub regulator_ops: Vec<u64>,
    /// Tap positions per regulator trace.
    pub taps: Vec<Vec<i32>>,
    /// Voltage series per monitored bus.
    pub voltages: Vec<Vec<f64>>,
    pub v_min: f64,
    pub v_max: f64,
}

/// Feeder, base load, models and Monte Carlo settings of one study.
#[derive(Debug, Clone)]
pub struct Study<'a> {
    pub feeder: &'a RadialFeeder,
    pub base: &'a BaseLoad,
    pub params: &'a ModelParams,
    pub config: &'a McsConfig,
}

impl Study<'_> {
    fn check(&self) -> Result<(), HarnessError> {
        self.config.validate()?;
        self.params.thermal.validate()?;
        self.params.tco.validate()?;
        let slots = self.config.horizon_slots();
        if self.base.horizon_slots() < slots {
            return Err(HarnessError::Config(format!(
                "base load has {} slots, horizon needs {}",
                self.base.horizon_slots(),
                slots
            )));
        }
        if (self.base.resolution_h - self.config.resolution_h).abs() > 1e-12 {
            return Err(HarnessError::Config(format!(
                "base load resolution {} h differs from configured {} h",
                self.base.resolution_h, self.config.resolution_h
            )));
        }
        Ok(())
    }

    fn timeseries_options(&self) -> TimeSeriesOptions {
        TimeSeriesOptions {
            pev_power_factor: self.config.pev_power_factor,
            monitored_buses: self.config.monitored_buses.clone(),
            phase_shares: self.config.phase_shares,
        }
    }

    /// Per-bus PEV profiles of one iteration. Vehicles are numbered across
    /// groups; each draws its bus from the allocation stream and its sessions
    /// from its own stream.
    pub fn pev_profiles(&self, fleet: &Fleet, iteration_seed: u64) -> Result<Vec<LoadProfile>, HarnessError> {
        let n_bus = self.feeder.bus_count();
        let slots = self.config.horizon_slots();
        let mut profiles = vec![LoadProfile::zeros(self.config.resolution_h, slots); n_bus];
        if fleet.is_empty() {
            return Ok(profiles);
        }
        let weights = WeightedIndex::new(self.feeder.load_shares())
            .map_err(|e| HarnessError::Config(format!("bus load shares cannot place vehicles: {e}")))?;
        let mut alloc = seed::stream(iteration_seed, seed::TAG_ALLOCATION, 0);
        let mut vehicle = 0u32;
        for group in &fleet.groups {
            for _ in 0..group.fleet_count {
                let bus = weights.sample(&mut alloc);
                let mut rng = seed::stream(iteration_seed, seed::TAG_VEHICLE, u64::from(vehicle));
                for s in vehicle_sessions(group, vehicle, self.config.horizon_days, &mut rng) {
                    rasterize_session(&mut profiles[bus], &s);
                }
                vehicle += 1;
            }
        }
        Ok(profiles)
    }

    /// One Monte Carlo iteration with its own seed.
    pub fn run_iteration(&self, fleet: &Fleet, iteration: u32) -> Result<IterationOutput, HarnessError> {
        let iteration_seed = seed::iteration_seed(self.config.master_seed, u64::from(iteration));
        let pev = self.pev_profiles(fleet, iteration_seed)?;
        let base = self.base.truncated(self.config.horizon_slots());
        let ts = run_timeseries(self.feeder, &base, if fleet.is_empty() { &[] } else { &pev }, &self.timeseries_options())
            .map_err(|source| HarnessError::Network { iteration, source })?;
        Ok(IterationOutput {
            regulator_ops: ts.regulators.iter().map(|t| t.state.op_count).collect(),
            taps: ts.regulators.into_iter().map(|t| t.taps).collect(),
            voltages: ts.voltages,
            k: ts.k,
            v_min: ts.v_min,
            v_max: ts.v_max,
        })
    }

    /// Full Monte Carlo run of one fleet.
    pub fn run_mcs(&self, fleet: &Fleet) -> Result<ScenarioReport, HarnessError> {
        self.check()?;
        fleet.validate()?;
        // Without vehicles every iteration is the same deterministic run.
        let iterations = if fleet.is_empty() { 1 } else { self.config.iterations };
        let per_iteration: Vec<IterationOutput> = (0..iterations)
            .into_par_iter()
            .map(|k| self.run_iteration(fleet, k))
            .collect::<Result<_, _>>()?;
        self.summarize(fleet, &per_iteration)
    }

    fn summarize(&self, fleet: &Fleet, runs: &[IterationOutput]) -> Result<ScenarioReport, HarnessError> {
        let p = self.params;
        let dt = self.config.resolution_h;
        let slots = runs[0].k.len();
        let n = runs.len() as f64;
        let mut mean_k = vec![0.0; slots];
        for run in runs {
            for (m, k) in mean_k.iter_mut().zip(&run.k) {
                *m += k;
            }
        }
        mean_k.iter_mut().for_each(|m| *m /= n);

        let states = thermal::rollout(&mean_k, dt, &p.thermal)?;
        let theta: Vec<f64> = states.iter().map(|s| s.theta_hst).collect();
        let accumulated_lol = thermal::cumulative_lol(&theta, dt, &p.aging)?;
        let simulated_hours = slots as f64 * dt;
        let annualize = HOURS_PER_YEAR / simulated_hours;
        let horizon_lol = match self.config.expectation_mode {
            ExpectationMode::MeanKThenModel => accumulated_lol.last().copied().unwrap_or(0.0),
            ExpectationMode::PerIterationModelThenMean => {
                let mut total = 0.0;
                for run in runs {
                    let own = thermal::rollout(&run.k, dt, &p.thermal)?;
                    let th: Vec<f64> = own.iter().map(|s| s.theta_hst).collect();
                    total += thermal::accumulate_lol(&th, dt, &p.aging)?;
                }
                total / n
            }
        };
        let yearly_lol_pct = 100.0 * horizon_lol * annualize;
        let eval_years = p.tco.t_ins_years;
        let lifetime_yr = thermal::estimated_lifetime(yearly_lol_pct, eval_years)?;
        let cumulative_lol = yearly_lol_pct / 100.0 * eval_years;

        let configs: Vec<VrConfig> = self.feeder.regulator_configs().cloned().collect();
        let traces_per_reg = runs[0].regulator_ops.len() / configs.len().max(1);
        let regulators = (0..runs[0].regulator_ops.len())
            .map(|t| {
                let r = t / traces_per_reg.max(1);
                let mean_ops = runs.iter().map(|run| run.regulator_ops[t] as f64).sum::<f64>() / n;
                let annual_ops = mean_ops * annualize;
                let budget = configs[r].n_op_max;
                let horizon_lol = annual_ops * eval_years / budget;
                RegulatorSummary {
                    regulator: r,
                    phase: (traces_per_reg > 1).then_some((t % traces_per_reg) as u8),
                    bus: self.feeder.model.buses[self.feeder.regulator_buses()[r]].id,
                    annual_ops,
                    yearly_lol: annual_ops / budget,
                    horizon_lol,
                    tco: regulator::tco_vr(horizon_lol, p.vr_capital_cost),
                }
            })
            .collect();

        let rating = self.feeder.rating_kva();
        let peak_k = mean_k.iter().copied().fold(0.0, f64::max);
        let avg_k = mean_k.iter().sum::<f64>() / slots as f64;
        let tco_params = TcoParams { p_hat: peak_k, ..p.tco.clone() };
        let tco_conventional = economics::tco_conventional(&tco_params, avg_k * rating, peak_k * rating)?;
        let tco_reestablished = economics::tco_transformer_reestablished(
            &tco_params,
            cumulative_lol,
            &mean_k,
            0.0,
            eval_years,
            ReestablishedOptions { calendar_floor: p.calendar_floor },
        )?;

        Ok(ScenarioReport {
            label: fleet.label.clone(),
            vehicles: fleet.vehicle_count(),
            pl_percent: penetration_level(fleet, self.base.peak_kw()),
            iterations: runs.len() as u32,
            yearly_lol_pct,
            lifetime_yr,
            eps_flag: thermal::is_eps_lifetime(lifetime_yr),
            cumulative_lol,
            regulators,
            tco_conventional,
            tco_reestablished,
            peak_k,
            mean_k: avg_k,
            v_min: runs.iter().map(|r| r.v_min).fold(f64::INFINITY, f64::min),
            v_max: runs.iter().map(|r| r.v_max).fold(f64::NEG_INFINITY, f64::max),
            delta_lol_pct: None,
            delta_vr_ops: None,
            series: PlotSeries {
                mean_k,
                theta_hst: theta,
                accumulated_lol,
                taps: runs[0].taps.clone(),
                monitored_buses: self.config.monitored_buses.clone(),
                voltages: runs[0].voltages.clone(),
            },
        })
    }

    /// Benchmark plus every fleet, with deltas against the benchmark.
    pub fn assess(&self, fleets: &[Fleet]) -> Result<AssessmentReport, HarnessError> {
        let benchmark = self.run_mcs(&Fleet::benchmark())?;
        let mut scenarios = Vec::with_capacity(fleets.len());
        for fleet in fleets {
            let mut row = if fleet.is_empty() { benchmark.clone() } else { self.run_mcs(fleet)? };
            row.label = fleet.label.clone();
            row.delta_lol_pct = Some(row.yearly_lol_pct - benchmark.yearly_lol_pct);
            row.delta_vr_ops = Some(row.total_vr_ops() - benchmark.total_vr_ops());
            scenarios.push(row);
        }
        Ok(AssessmentReport {
            provenance: Provenance {
                master_seed: self.config.master_seed,
                iterations: self.config.iterations,
                config_hash: None,
            },
            benchmark,
            scenarios,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegulatorSummary {
    pub regulator: usize,
    pub phase: Option<u8>,
    pub bus: BusId,
    /// Mean tap steps per year across iterations.
    pub annual_ops: f64,
    /// Share of the operation budget used per year.
    pub yearly_lol: f64,
    /// Share of the budget used over the evaluation period.
    pub horizon_lol: f64,
    /// Cost of that consumption ($).
    pub tco: f64,
}

/// Per-slot series behind the plots.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PlotSeries {
    pub mean_k: Vec<f64>,
    pub theta_hst: Vec<f64>,
    pub accumulated_lol: Vec<f64>,
    /// Tap positions of the first iteration, per regulator trace.
    pub taps: Vec<Vec<i32>>,
    pub monitored_buses: Vec<BusId>,
    /// Voltages of the first iteration, per monitored bus.
    pub voltages: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub label: String,
    pub vehicles: u32,
    pub pl_percent: f64,
    pub iterations: u32,
    pub yearly_lol_pct: f64,
    pub lifetime_yr: f64,
    pub eps_flag: bool,
    /// Insulation life consumed over the evaluation period (fraction of one life).
    pub cumulative_lol: f64,
    pub regulators: Vec<RegulatorSummary>,
    pub tco_conventional: TcoBreakdown,
    pub tco_reestablished: TcoBreakdown,
    pub peak_k: f64,
    pub mean_k: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub delta_lol_pct: Option<f64>,
    pub delta_vr_ops: Option<f64>,
    #[serde(skip)]
    pub series: PlotSeries,
}

impl ScenarioReport {
    /// Annual tap steps summed over all regulators.
    pub fn total_vr_ops(&self) -> f64 {
        self.regulators.iter().map(|r| r.annual_ops).sum()
    }

    /// Largest yearly budget share among the regulators.
    pub fn max_vr_lol(&self) -> f64 {
        self.regulators.iter().map(|r| r.yearly_lol).fold(0.0, f64::max)
    }

    /// Annual tap steps of regulator `r`, summed over phases.
    pub fn regulator_ops(&self, r: usize) -> f64 {
        self.regulators.iter().filter(|s| s.regulator == r).map(|s| s.annual_ops).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub master_seed: u64,
    pub iterations: u32,
    pub config_hash: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentReport {
    pub provenance: Provenance,
    pub benchmark: ScenarioReport,
    pub scenarios: Vec<ScenarioReport>,
}
