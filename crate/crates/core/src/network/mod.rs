//! Radial distribution feeder and quasi-static power flow.
//!
//! A [`FeederModel`] is validated into a [`RadialFeeder`], which carries the
//! source-rooted ordering used by the forward-backward sweep in
//! [`SweepSolver`]. Regulators sit on branches as ideal autotransformers at the
//! receiving end: the series impedance is on the upstream side and the
//! downstream voltage is scaled by `1 + h·kappa`.

mod sweep;
mod timeseries;

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::regulator::{RegulatorError, VrConfig};

pub use sweep::{solve_snapshot, BusLoad, SnapshotResult, SweepSolver, MAX_SWEEPS, SWEEP_TOLERANCE};
pub use timeseries::{run_timeseries, BaseLoad, RegulatorTrace, TimeSeriesOptions, TimeSeriesResult};

pub type BusId = u32;

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("feeder has no buses")]
    Empty,
    #[error("duplicate bus id {0}")]
    DuplicateBus(BusId),
    #[error("branch {branch} references undeclared bus {bus}")]
    UndeclaredBus { branch: usize, bus: BusId },
    #[error("branch {branch} closes a cycle between buses {from} and {to}")]
    Cycle { branch: usize, from: BusId, to: BusId },
    #[error("bus {0} is not connected to the substation")]
    Disconnected(BusId),
    #[error("invalid {what}: {value}")]
    InvalidValue { what: String, value: f64 },
    #[error("regulator on branch {branch}: {source}")]
    Regulator { branch: usize, source: RegulatorError },
    #[error("power flow did not converge after {sweeps} sweeps (max ΔV {residual:e} pu)")]
    NonConvergence { sweeps: usize, residual: f64 },
    #[error("power flow diverged to a non-finite voltage")]
    Diverged,
    #[error("slot {slot}: {source}")]
    AtSlot { slot: usize, source: Box<NetworkError> },
    #[error("profile mismatch: {0}")]
    ProfileMismatch(String),
}

impl NetworkError {
    /// True for solver failures, as opposed to malformed input.
    pub fn is_non_convergence(&self) -> bool {
        match self {
            NetworkError::NonConvergence { .. } | NetworkError::Diverged => true,
            NetworkError::AtSlot { source, .. } => source.is_non_convergence(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: BusId,
    /// Relative weight of this bus in the base load and in PEV placement.
    /// Zero means no load is attached.
    pub load_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub from: BusId,
    pub to: BusId,
    pub r_pu: f64,
    pub x_pu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceBus {
    pub bus: BusId,
    pub v_source_pu: f64,
    /// Substation transformer rating s_R (kVA).
    pub rating_kva: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseValues {
    pub s_base_kva: f64,
    pub v_base_kv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegulatorSite {
    /// Index into `FeederModel::branches`.
    pub branch: usize,
    pub config: VrConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeederModel {
    pub buses: Vec<Bus>,
    pub branches: Vec<Branch>,
    pub source: SourceBus,
    pub base: BaseValues,
    pub regulators: Vec<RegulatorSite>,
}

/// A validated feeder with its source-rooted tree ordering.
#[derive(Debug, Clone)]
pub struct RadialFeeder {
    pub model: FeederModel,
    index: HashMap<BusId, usize>,
    /// Bus indices in breadth-first order from the source.
    pub(crate) order: Vec<usize>,
    /// Parent bus index, `None` at the source.
    pub(crate) parent: Vec<Option<usize>>,
    /// Branch feeding each bus from its parent.
    pub(crate) feeding_branch: Vec<Option<usize>>,
    /// Downstream bus of each regulator.
    pub(crate) regulator_bus: Vec<usize>,
    /// Regulator indices sorted head to tail.
    pub(crate) regulator_order: Vec<usize>,
    /// Tree depth of each bus.
    depth: Vec<usize>,
    /// Normalized load shares (sum 1 over load buses).
    pub(crate) shares: Vec<f64>,
}

impl RadialFeeder {
    pub fn new(model: FeederModel) -> Result<Self, NetworkError> {
        validate_radial(&model)?;
        let n = model.buses.len();
        let index: HashMap<BusId, usize> = model.buses.iter().enumerate().map(|(i, b)| (b.id, i)).collect();

        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (k, br) in model.branches.iter().enumerate() {
            let (a, b) = (index[&br.from], index[&br.to]);
            adj[a].push((b, k));
            adj[b].push((a, k));
        }
        let root = index[&model.source.bus];
        let mut order = Vec::with_capacity(n);
        let mut parent = vec![None; n];
        let mut feeding_branch = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &(v, k) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    feeding_branch[v] = Some(k);
                    depth[v] = depth[u] + 1;
                    queue.push_back(v);
                }
            }
        }

        let mut regulator_bus = Vec::with_capacity(model.regulators.len());
        for site in &model.regulators {
            let br = &model.branches[site.branch];
            let (a, b) = (index[&br.from], index[&br.to]);
            let downstream = if parent[b] == Some(a) { b } else { a };
            regulator_bus.push(downstream);
        }
        let mut regulator_order: Vec<usize> = (0..regulator_bus.len()).collect();
        regulator_order.sort_by_key(|&r| (depth[regulator_bus[r]], r));

        let total: f64 = model.buses.iter().map(|b| b.load_share).sum();
        let shares = model
            .buses
            .iter()
            .map(|b| if total > 0.0 { b.load_share / total } else { 0.0 })
            .collect();

        Ok(Self {
            model,
            index,
            order,
            parent,
            feeding_branch,
            regulator_bus,
            regulator_order,
            depth,
            shares,
        })
    }

    pub fn bus_count(&self) -> usize {
        self.model.buses.len()
    }

    pub fn bus_index(&self, id: BusId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn rating_kva(&self) -> f64 {
        self.model.source.rating_kva
    }

    /// Load share of each bus, normalized to sum to one.
    pub fn load_shares(&self) -> &[f64] {
        &self.shares
    }

    /// Downstream bus index of each regulator.
    pub fn regulator_buses(&self) -> &[usize] {
        &self.regulator_bus
    }

    pub fn regulator_configs(&self) -> impl Iterator<Item = &VrConfig> {
        self.model.regulators.iter().map(|r| &r.config)
    }

    /// Whether bus `b` lies in the subtree below `ancestor` (inclusive).
    pub(crate) fn is_downstream_of(&self, mut b: usize, ancestor: usize) -> bool {
        while self.depth[b] > self.depth[ancestor] {
            match self.parent[b] {
                Some(p) => b = p,
                None => return false,
            }
        }
        b == ancestor
    }

    /// Whether a bus sits below any regulator.
    pub fn is_regulated(&self, b: usize) -> bool {
        self.regulator_bus.iter().any(|&r| self.is_downstream_of(b, r))
    }
}

fn invalid(what: impl Into<String>, value: f64) -> NetworkError {
    NetworkError::InvalidValue { what: what.into(), value }
}

/// Checks that the branch graph is a tree spanning every bus from the source,
/// with non-negative impedances and positive ratings. Returns the first violation.
pub fn validate_radial(feeder: &FeederModel) -> Result<(), NetworkError> {
    if feeder.buses.is_empty() {
        return Err(NetworkError::Empty);
    }
    let mut index = HashMap::with_capacity(feeder.buses.len());
    for (i, b) in feeder.buses.iter().enumerate() {
        if index.insert(b.id, i).is_some() {
            return Err(NetworkError::DuplicateBus(b.id));
        }
        if !(b.load_share.is_finite() && b.load_share >= 0.0) {
            return Err(invalid(format!("load share of bus {}", b.id), b.load_share));
        }
    }
    let src = &feeder.source;
    if !(src.rating_kva.is_finite() && src.rating_kva > 0.0) {
        return Err(invalid("transformer rating (kVA)", src.rating_kva));
    }
    if !(src.v_source_pu.is_finite() && src.v_source_pu > 0.0) {
        return Err(invalid("source voltage (pu)", src.v_source_pu));
    }
    if !(feeder.base.s_base_kva.is_finite() && feeder.base.s_base_kva > 0.0) {
        return Err(invalid("base power (kVA)", feeder.base.s_base_kva));
    }
    if !index.contains_key(&src.bus) {
        return Err(NetworkError::Disconnected(src.bus));
    }

    // Union-find over undirected branches.
    let mut uf: Vec<usize> = (0..feeder.buses.len()).collect();
    fn find(uf: &mut [usize], mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    for (k, br) in feeder.branches.iter().enumerate() {
        for bus in [br.from, br.to] {
            if !index.contains_key(&bus) {
                return Err(NetworkError::UndeclaredBus { branch: k, bus });
            }
        }
        for (name, v) in [("r_pu", br.r_pu), ("x_pu", br.x_pu)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(format!("{name} of branch {k}"), v));
            }
        }
        let (a, b) = (find(&mut uf, index[&br.from]), find(&mut uf, index[&br.to]));
        if a == b {
            return Err(NetworkError::Cycle { branch: k, from: br.from, to: br.to });
        }
        uf[a] = b;
    }
    let root = find(&mut uf, index[&src.bus]);
    for (i, bus) in feeder.buses.iter().enumerate() {
        if find(&mut uf, i) != root {
            return Err(NetworkError::Disconnected(bus.id));
        }
    }
    let mut seen_branch = std::collections::HashSet::new();
    for site in &feeder.regulators {
        if site.branch >= feeder.branches.len() || !seen_branch.insert(site.branch) {
            return Err(invalid("regulator branch index", site.branch as f64));
        }
        site.config
            .validate()
            .map_err(|source| NetworkError::Regulator { branch: site.branch, source })?;
    }
    Ok(())
}
