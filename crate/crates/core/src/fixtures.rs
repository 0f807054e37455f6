//! Synthetic 12-bus feeder and yearly base load used by tests, examples and
//! the sample data set.
//!
//! The feeder is a five-section main line with six laterals and two
//! regulators at 40% and 60% of the main-line impedance. The base load has
//! morning and evening peaks, a summer bump, lighter weekends and a little
//! seeded noise.

use rand::Rng;

use crate::network::{BaseLoad, BaseValues, Branch, Bus, FeederModel, RegulatorSite, SourceBus};
use crate::regulator::VrConfig;
use crate::seed;

pub const FIXTURE_RATING_KVA: f64 = 10_000.0;
pub const FIXTURE_BASE_PEAK_KW: f64 = 10_500.0;
pub const FIXTURE_POWER_FACTOR: f64 = 0.95;
const NOISE_SEED: u64 = 0x005e_ed0f_10ad;

/// Main-line bus ids from the substation outward.
pub const MAIN_LINE: [u32; 6] = [0, 1, 2, 3, 4, 5];

pub fn twelve_bus_feeder() -> FeederModel {
    let main = |from, to| Branch { from, to, r_pu: 0.018, x_pu: 0.036 };
    let lateral = |from, to| Branch { from, to, r_pu: 0.0225, x_pu: 0.030 };
    let shares = [0.0, 0.05, 0.05, 0.05, 0.05, 0.05, 0.12, 0.12, 0.12, 0.12, 0.12, 0.15];
    FeederModel {
        buses: shares.iter().enumerate().map(|(id, &load_share)| Bus { id: id as u32, load_share }).collect(),
        branches: vec![
            main(0, 1),
            main(1, 2),
            main(2, 3),
            main(3, 4),
            main(4, 5),
            lateral(1, 6),
            lateral(2, 7),
            lateral(3, 8),
            lateral(4, 9),
            lateral(5, 10),
            lateral(5, 11),
        ],
        source: SourceBus { bus: 0, v_source_pu: 1.0, rating_kva: FIXTURE_RATING_KVA },
        base: BaseValues { s_base_kva: FIXTURE_RATING_KVA, v_base_kv: 12.47 },
        regulators: vec![
            RegulatorSite { branch: 1, config: VrConfig::default() },
            RegulatorSite { branch: 2, config: VrConfig::default() },
        ],
    }
}

fn bump(x: f64, center: f64, width: f64) -> f64 {
    (-0.5 * ((x - center) / width).powi(2)).exp()
}

/// Relative demand at hour-of-day `h` on day `d` (before scaling and noise).
fn shape(d: usize, h: f64) -> f64 {
    let daily = 0.48 + 0.16 * bump(h, 8.0, 1.6) + 0.40 * bump(h, 18.0, 2.0) + 0.10 * bump(h, 13.5, 3.0);
    let summer = 1.0 + 0.16 * bump(d as f64, 197.0, 38.0);
    let weekend = if d % 7 >= 5 { 0.92 } else { 1.0 };
    daily * summer * weekend
}

/// Base load over `days` at `resolution_h`, scaled so the yearly peak is
/// [`FIXTURE_BASE_PEAK_KW`]. Shorter horizons reuse the first days of the year.
pub fn synthetic_base_load(days: u32, resolution_h: f64) -> BaseLoad {
    let per_day = (24.0 / resolution_h).round() as usize;
    let mut rng = seed::stream(NOISE_SEED, 0, 0);
    let year: Vec<f64> = (0..365 * per_day)
        .map(|t| {
            let h = (t % per_day) as f64 * resolution_h;
            shape(t / per_day, h) * (1.0 + 0.02 * (rng.random::<f64>() - 0.5))
        })
        .collect();
    let peak = year.iter().copied().fold(0.0, f64::max);
    let n = days as usize * per_day;
    let p_kw = (0..n).map(|t| year[t % year.len()] * FIXTURE_BASE_PEAK_KW / peak).collect();
    BaseLoad::from_real_power(resolution_h, p_kw, FIXTURE_POWER_FACTOR)
}
