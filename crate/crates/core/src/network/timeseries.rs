use serde::{Deserialize, Serialize};

use super::{BusId, BusLoad, NetworkError, RadialFeeder, SweepSolver};
use crate::charging::LoadProfile;
use crate::regulator::VrState;

/// Feeder-head base load, spread over load buses by their shares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseLoad {
    pub resolution_h: f64,
    pub p_kw: Vec<f64>,
    pub q_kvar: Vec<f64>,
}

impl BaseLoad {
    /// Reactive power filled in from a lagging power factor.
    pub fn from_real_power(resolution_h: f64, p_kw: Vec<f64>, power_factor: f64) -> Self {
        let tan = power_factor.acos().tan();
        let q_kvar = p_kw.iter().map(|p| p * tan).collect();
        Self { resolution_h, p_kw, q_kvar }
    }

    pub fn horizon_slots(&self) -> usize {
        self.p_kw.len()
    }

    pub fn peak_kw(&self) -> f64 {
        self.p_kw.iter().copied().fold(0.0, f64::max)
    }

    /// First `slots` slots.
    pub fn truncated(&self, slots: usize) -> Self {
        let n = slots.min(self.p_kw.len());
        Self {
            resolution_h: self.resolution_h,
            p_kw: self.p_kw[..n].to_vec(),
            q_kvar: self.q_kvar[..n].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesOptions {
    /// Lagging power factor of PEV load.
    pub pev_power_factor: f64,
    /// Buses whose voltage series are recorded.
    pub monitored_buses: Vec<BusId>,
    /// Phase load shares; each phase is solved with loads scaled by `3·share`.
    pub phase_shares: Option<[f64; 3]>,
}

impl Default for TimeSeriesOptions {
    fn default() -> Self {
        Self { pev_power_factor: 0.95, monitored_buses: Vec::new(), phase_shares: None }
    }
}

/// Tap trace of one regulator (on one phase when phases are modelled).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegulatorTrace {
    pub regulator: usize,
    pub phase: Option<u8>,
    pub bus: BusId,
    pub state: VrState,
    /// Tap in force at each slot.
    pub taps: Vec<i32>,
    /// Solved voltage at the regulated bus at each slot.
    pub voltage: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesResult {
    pub resolution_h: f64,
    /// Load factor per slot (mean over phases when phases are modelled).
    pub k: Vec<f64>,
    pub monitored_buses: Vec<BusId>,
    /// Voltage series per monitored bus (first phase when phases are modelled).
    pub voltages: Vec<Vec<f64>>,
    pub regulators: Vec<RegulatorTrace>,
    pub v_min: f64,
    pub v_max: f64,
}

impl TimeSeriesResult {
    pub fn horizon_slots(&self) -> usize {
        self.k.len()
    }

    /// Σ tap steps over every trace of regulator `r`.
    pub fn regulator_ops(&self, r: usize) -> u64 {
        self.regulators.iter().filter(|t| t.regulator == r).map(|t| t.state.op_count).sum()
    }
}

/// Quasi-static simulation over the horizon of `base`. `pev` holds one
/// profile per bus (or is empty for a PEV-free run).
///
/// Each slot assembles bus loads, lets every regulator react head to tail to
/// the voltage solved in the previous slot, then solves the snapshot.
pub fn run_timeseries(
    feeder: &RadialFeeder,
    base: &BaseLoad,
    pev: &[LoadProfile],
    options: &TimeSeriesOptions,
) -> Result<TimeSeriesResult, NetworkError> {
    let n_slots = base.horizon_slots();
    if base.q_kvar.len() != n_slots {
        return Err(NetworkError::ProfileMismatch("base p and q lengths differ".into()));
    }
    if !pev.is_empty() && pev.len() != feeder.bus_count() {
        return Err(NetworkError::ProfileMismatch(format!(
            "{} PEV profiles for {} buses",
            pev.len(),
            feeder.bus_count()
        )));
    }
    for p in pev {
        if p.horizon_slots() != n_slots || (p.resolution_h - base.resolution_h).abs() > 1e-12 {
            return Err(NetworkError::ProfileMismatch(format!(
                "PEV profile {} slots at {} h vs base {} slots at {} h",
                p.horizon_slots(),
                p.resolution_h,
                n_slots,
                base.resolution_h
            )));
        }
    }
    let monitored = options
        .monitored_buses
        .iter()
        .map(|id| {
            feeder.bus_index(*id).ok_or(NetworkError::ProfileMismatch(format!("monitored bus {id} not in feeder")))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let phases: Vec<(Option<u8>, f64)> = match options.phase_shares {
        None => vec![(None, 1.0)],
        Some(shares) => {
            let total: f64 = shares.iter().sum();
            if !(shares.iter().all(|s| s.is_finite() && *s >= 0.0) && (total - 1.0).abs() < 1e-9) {
                return Err(NetworkError::InvalidValue { what: "phase share sum".into(), value: total });
            }
            shares.iter().enumerate().map(|(p, s)| (Some(p as u8), 3.0 * s)).collect()
        }
    };

    let mut result = TimeSeriesResult {
        resolution_h: base.resolution_h,
        k: vec![0.0; n_slots],
        monitored_buses: options.monitored_buses.clone(),
        voltages: Vec::new(),
        regulators: Vec::new(),
        v_min: f64::INFINITY,
        v_max: f64::NEG_INFINITY,
    };
    let weight = 1.0 / phases.len() as f64;
    for (i, &(phase, multiplier)) in phases.iter().enumerate() {
        let run = single_phase(feeder, base, pev, options.pev_power_factor, multiplier, &monitored)?;
        for (k, kp) in result.k.iter_mut().zip(&run.k) {
            *k += weight * kp;
        }
        if i == 0 {
            result.voltages = run.voltages;
        }
        result.v_min = result.v_min.min(run.v_min);
        result.v_max = result.v_max.max(run.v_max);
        result.regulators.extend(run.traces.into_iter().map(|mut t| {
            t.phase = phase;
            t
        }));
    }
    Ok(result)
}

struct PhaseRun {
    k: Vec<f64>,
    voltages: Vec<Vec<f64>>,
    traces: Vec<RegulatorTrace>,
    v_min: f64,
    v_max: f64,
}

fn single_phase(
    feeder: &RadialFeeder,
    base: &BaseLoad,
    pev: &[LoadProfile],
    pev_pf: f64,
    multiplier: f64,
    monitored: &[usize],
) -> Result<PhaseRun, NetworkError> {
    let n_slots = base.horizon_slots();
    let n_bus = feeder.bus_count();
    let shares = feeder.load_shares();
    let pev_tan = pev_pf.acos().tan();
    let configs: Vec<_> = feeder.model.regulators.iter().map(|r| r.config.clone()).collect();

    let mut states: Vec<VrState> = configs.iter().map(|_| VrState::default()).collect();
    let mut taps: Vec<i32> = states.iter().map(|s| s.h).collect();
    let mut traces: Vec<RegulatorTrace> = configs
        .iter()
        .enumerate()
        .map(|(r, _)| RegulatorTrace {
            regulator: r,
            phase: None,
            bus: feeder.model.buses[feeder.regulator_bus[r]].id,
            state: VrState::default(),
            taps: Vec::with_capacity(n_slots),
            voltage: Vec::with_capacity(n_slots),
        })
        .collect();
    let mut k = Vec::with_capacity(n_slots);
    let mut voltages = vec![Vec::with_capacity(n_slots); monitored.len()];
    let (mut v_min, mut v_max) = (f64::INFINITY, f64::NEG_INFINITY);

    let mut solver = SweepSolver::new(feeder);
    solver.set_taps(&taps);
    solver.reset();
    let mut loads = vec![BusLoad::default(); n_bus];
    let rating = feeder.rating_kva();
    let s_base = feeder.model.base.s_base_kva;

    for t in 0..n_slots {
        if t > 0 {
            let mut moved = false;
            for &r in &feeder.regulator_order {
                let bus = feeder.regulator_bus[r];
                let old = states[r].h;
                let v = solver.voltage_magnitude(bus);
                if states[r].apply(v, &configs[r], t) != 0 {
                    let factor = configs[r].ratio(states[r].h) / configs[r].ratio(old);
                    solver.scale_subtree(bus, factor);
                    taps[r] = states[r].h;
                    moved = true;
                }
            }
            if moved {
                solver.set_taps(&taps);
            }
        }

        for (b, load) in loads.iter_mut().enumerate() {
            let pev_kw = pev.get(b).map_or(0.0, |p| p.values[t]);
            load.p_kw = multiplier * (shares[b] * base.p_kw[t] + pev_kw);
            load.q_kvar = multiplier * (shares[b] * base.q_kvar[t] + pev_kw * pev_tan);
        }
        let s = solver
            .solve(&loads)
            .map_err(|e| NetworkError::AtSlot { slot: t, source: Box::new(e) })?;
        k.push(s.norm() * s_base / rating);
        for (series, &b) in voltages.iter_mut().zip(monitored) {
            series.push(solver.voltage_magnitude(b));
        }
        for v in solver.voltages() {
            let m = v.norm();
            v_min = v_min.min(m);
            v_max = v_max.max(m);
        }
        for (r, trace) in traces.iter_mut().enumerate() {
            trace.taps.push(taps[r]);
            trace.voltage.push(solver.voltage_magnitude(feeder.regulator_bus[r]));
        }
    }
    for (trace, state) in traces.iter_mut().zip(states) {
        trace.state = state;
    }
    Ok(PhaseRun { k, voltages, traces, v_min, v_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{BaseValues, Branch, Bus, FeederModel, RegulatorSite, SourceBus};
    use crate::regulator::VrConfig;

    fn line(n: u32, regulator_at: Option<usize>) -> RadialFeeder {
        RadialFeeder::new(FeederModel {
            buses: (0..n).map(|id| Bus { id, load_share: if id == 0 { 0.0 } else { 1.0 } }).collect(),
            branches: (1..n).map(|to| Branch { from: to - 1, to, r_pu: 0.01, x_pu: 0.02 }).collect(),
            source: SourceBus { bus: 0, v_source_pu: 1.0, rating_kva: 10_000.0 },
            base: BaseValues { s_base_kva: 10_000.0, v_base_kv: 12.47 },
            regulators: regulator_at
                .map(|branch| vec![RegulatorSite { branch, config: VrConfig::default() }])
                .unwrap_or_default(),
        })
        .unwrap()
    }

    #[test]
    fn constant_load_settles_taps() {
        let f = line(4, Some(1));
        let base = BaseLoad::from_real_power(0.25, vec![6000.0; 40], 0.95);
        let r = run_timeseries(&f, &base, &[], &TimeSeriesOptions::default()).unwrap();
        let trace = &r.regulators[0];
        assert!(trace.state.actions >= 1);
        let last = trace.taps[39];
        assert!(trace.taps[5..].iter().all(|&h| h == last));
        assert!(VrConfig::default().in_deadband(trace.voltage[39]));
    }

    #[test]
    fn zero_pev_matches_base_only() {
        let f = line(4, None);
        let base = BaseLoad::from_real_power(0.25, (0..96).map(|t| 3000.0 + 20.0 * t as f64).collect(), 0.95);
        let a = run_timeseries(&f, &base, &[], &TimeSeriesOptions::default()).unwrap();
        let zeros = vec![LoadProfile::zeros(0.25, 96); 4];
        let b = run_timeseries(&f, &base, &zeros, &TimeSeriesOptions::default()).unwrap();
        assert_eq!(a.k, b.k);
    }

    #[test]
    fn balanced_phases_match_single_phase() {
        let f = line(4, Some(1));
        let base = BaseLoad::from_real_power(0.25, (0..48).map(|t| 2000.0 + 90.0 * t as f64).collect(), 0.95);
        let single = run_timeseries(&f, &base, &[], &TimeSeriesOptions::default()).unwrap();
        let opts = TimeSeriesOptions { phase_shares: Some([1.0 / 3.0; 3]), ..Default::default() };
        let three = run_timeseries(&f, &base, &[], &opts).unwrap();
        assert_eq!(three.regulators.len(), 3);
        for (a, b) in single.k.iter().zip(&three.k) {
            assert!((a - b).abs() < 1e-9);
        }
        assert_eq!(three.regulator_ops(0), 3 * single.regulator_ops(0));
    }

    #[test]
    fn mismatched_profiles_are_rejected() {
        let f = line(3, None);
        let base = BaseLoad::from_real_power(0.25, vec![1.0; 10], 0.95);
        let pev = vec![LoadProfile::zeros(0.25, 9); 3];
        assert!(matches!(
            run_timeseries(&f, &base, &pev, &TimeSeriesOptions::default()),
            Err(NetworkError::ProfileMismatch(_))
        ));
    }
}
