use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{NetworkError, RadialFeeder};

/// Convergence threshold on the largest per-bus voltage change between sweeps (pu).
pub const SWEEP_TOLERANCE: f64 = 1e-9;
pub const MAX_SWEEPS: usize = 100;

/// Constant-power demand at one bus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BusLoad {
    pub p_kw: f64,
    pub q_kvar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotResult {
    /// Voltage magnitude per bus, in feeder bus order.
    pub v_pu: Vec<f64>,
    #[serde(skip)]
    pub v: Vec<Complex64>,
    /// Complex power entering each branch at its upstream end (pu), in branch order.
    #[serde(skip)]
    pub branch_flow: Vec<Complex64>,
    /// Complex power delivered by the source (pu).
    #[serde(skip)]
    pub source_power: Complex64,
    /// Total series losses Σ|I|²Z (pu).
    #[serde(skip)]
    pub losses: Complex64,
    /// Apparent power through the substation transformer (kVA).
    pub substation_s: f64,
    /// Load factor K = s / s_R.
    pub load_factor_k: f64,
    pub sweeps: usize,
}

/// Forward-backward sweep solver with reusable buffers. Voltages from the
/// previous solve are kept as the starting point of the next one.
#[derive(Debug, Clone)]
pub struct SweepSolver<'a> {
    feeder: &'a RadialFeeder,
    z: Vec<Complex64>,
    ratio: Vec<f64>,
    v: Vec<Complex64>,
    s_load: Vec<Complex64>,
    /// Current drawn into each bus's feeding branch at its upstream end.
    i_in: Vec<Complex64>,
    acc: Vec<Complex64>,
    root_current: Complex64,
    sweeps: usize,
}

impl<'a> SweepSolver<'a> {
    pub fn new(feeder: &'a RadialFeeder) -> Self {
        let n = feeder.bus_count();
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            if let Some(k) = feeder.feeding_branch[j] {
                let br = &feeder.model.branches[k];
                z[j] = Complex64::new(br.r_pu, br.x_pu);
            }
        }
        let mut solver = Self {
            feeder,
            z,
            ratio: vec![1.0; n],
            v: vec![Complex64::new(0.0, 0.0); n],
            s_load: vec![Complex64::new(0.0, 0.0); n],
            i_in: vec![Complex64::new(0.0, 0.0); n],
            acc: vec![Complex64::new(0.0, 0.0); n],
            root_current: Complex64::new(0.0, 0.0),
            sweeps: 0,
        };
        solver.reset();
        solver
    }

    /// Restores the no-load voltage profile for the current taps.
    pub fn reset(&mut self) {
        let f = self.feeder;
        for &j in &f.order {
            self.v[j] = match f.parent[j] {
                Some(p) => self.v[p] * self.ratio[j],
                None => Complex64::new(f.model.source.v_source_pu, 0.0),
            };
        }
    }

    /// Sets regulator tap positions, indexed like `FeederModel::regulators`.
    pub fn set_taps(&mut self, taps: &[i32]) {
        let f = self.feeder;
        for (r, (&bus, site)) in f.regulator_bus.iter().zip(&f.model.regulators).enumerate() {
            let h = taps.get(r).copied().unwrap_or(0);
            self.ratio[bus] = site.config.ratio(h);
        }
    }

    /// Multiplies the stored voltage of every bus below `root` (inclusive) by `factor`.
    pub(crate) fn scale_subtree(&mut self, root: usize, factor: f64) {
        for j in 0..self.v.len() {
            if self.feeder.is_downstream_of(j, root) {
                self.v[j] *= factor;
            }
        }
    }

    pub fn voltages(&self) -> &[Complex64] {
        &self.v
    }

    pub fn voltage_magnitude(&self, bus: usize) -> f64 {
        self.v[bus].norm()
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    fn backward(&mut self) {
        let f = self.feeder;
        self.acc.iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        for &j in f.order.iter().rev() {
            let total = (self.s_load[j] / self.v[j]).conj() + self.acc[j];
            match f.parent[j] {
                Some(p) => {
                    self.i_in[j] = total * self.ratio[j];
                    self.acc[p] += self.i_in[j];
                }
                None => self.root_current = total,
            }
        }
    }

    /// Solves one snapshot for the given per-bus loads and returns the complex
    /// power delivered by the source (pu).
    pub fn solve(&mut self, loads: &[BusLoad]) -> Result<Complex64, NetworkError> {
        let f = self.feeder;
        let s_base = f.model.base.s_base_kva;
        for (s, l) in self.s_load.iter_mut().zip(loads) {
            *s = Complex64::new(l.p_kw, l.q_kvar) / s_base;
        }
        if self.v.iter().any(|v| !v.norm().is_finite() || v.norm() == 0.0) {
            self.reset();
        }
        let mut residual = f64::INFINITY;
        self.sweeps = 0;
        while self.sweeps < MAX_SWEEPS {
            self.backward();
            residual = 0.0;
            for &j in &f.order {
                if let Some(p) = f.parent[j] {
                    let next = (self.v[p] - self.z[j] * self.i_in[j]) * self.ratio[j];
                    residual = f64::max(residual, (next - self.v[j]).norm());
                    self.v[j] = next;
                }
            }
            self.sweeps += 1;
            if !residual.is_finite() {
                self.reset();
                return Err(NetworkError::Diverged);
            }
            if residual < SWEEP_TOLERANCE {
                self.backward();
                return Ok(self.source_voltage() * self.root_current.conj());
            }
        }
        self.reset();
        Err(NetworkError::NonConvergence { sweeps: self.sweeps, residual })
    }

    fn source_voltage(&self) -> Complex64 {
        Complex64::new(self.feeder.model.source.v_source_pu, 0.0)
    }

    /// Full result of the most recent successful solve.
    pub fn snapshot(&self) -> SnapshotResult {
        let f = self.feeder;
        let mut branch_flow = vec![Complex64::new(0.0, 0.0); f.model.branches.len()];
        let mut losses = Complex64::new(0.0, 0.0);
        for j in 0..f.bus_count() {
            if let (Some(p), Some(k)) = (f.parent[j], f.feeding_branch[j]) {
                branch_flow[k] = self.v[p] * self.i_in[j].conj();
                losses += self.z[j] * self.i_in[j].norm_sqr();
            }
        }
        let source_power = self.source_voltage() * self.root_current.conj();
        let substation_s = source_power.norm() * f.model.base.s_base_kva;
        SnapshotResult {
            v_pu: self.v.iter().map(|v| v.norm()).collect(),
            v: self.v.clone(),
            branch_flow,
            source_power,
            losses,
            substation_s,
            load_factor_k: substation_s / f.rating_kva(),
            sweeps: self.sweeps,
        }
    }
}

/// Solves one power-flow snapshot from a flat start.
pub fn solve_snapshot(
    feeder: &RadialFeeder,
    bus_loads: &[BusLoad],
    taps: &[i32],
) -> Result<SnapshotResult, NetworkError> {
    if bus_loads.len() != feeder.bus_count() {
        return Err(NetworkError::ProfileMismatch(format!(
            "{} bus loads for {} buses",
            bus_loads.len(),
            feeder.bus_count()
        )));
    }
    if let Some(l) = bus_loads.iter().find(|l| !(l.p_kw.is_finite() && l.q_kvar.is_finite())) {
        return Err(NetworkError::InvalidValue { what: "bus load".into(), value: l.p_kw + l.q_kvar });
    }
    let mut solver = SweepSolver::new(feeder);
    solver.set_taps(taps);
    solver.reset();
    solver.solve(bus_loads)?;
    Ok(solver.snapshot())
}
