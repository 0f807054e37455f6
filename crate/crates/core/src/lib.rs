//! Stochastic PEV charging and its depreciation of distribution-grid assets.
//!
//! The crate chains five models into one Monte Carlo pipeline:
//!
//! - [`charging`]: seeded per-vehicle charging sessions and aggregated load profiles
//! - [`network`]: radial feeder model with a forward-backward sweep power flow
//! - [`thermal`]: transformer top-oil / hot-spot dynamics and insulation loss of life
//! - [`regulator`]: tap-changer state machine and operation-count loss of life
//! - [`economics`]: conventional and time-series total cost of ownership
//!
//! [`harness`] runs the iterations, averages the load factor and assembles an
//! [`harness::AssessmentReport`].

pub mod charging;
pub mod economics;
pub mod fixtures;
pub mod harness;
pub mod network;
pub mod regulator;
pub mod seed;
pub mod thermal;

pub use charging::{ChargingScenario, ChargingSession, LoadProfile, VehicleClass};
pub use economics::{TcoBreakdown, TcoParams};
pub use harness::{AssessmentReport, Fleet, McsConfig, ModelParams};
pub use network::{FeederModel, SnapshotResult, TimeSeriesResult};
pub use regulator::{VrConfig, VrState};
pub use thermal::{AgingParams, ThermalParams, ThermalState};
