use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{BehaviorDistributions, ChargingScenario, ChargingSession, NormalSpec, VehicleClass};

const HOURS_PER_DAY: f64 = 24.0;
const MAX_ARRIVAL_REDRAWS: usize = 10;
/// Latest representable time of day; samples past midnight are pulled back.
const LAST_INSTANT: f64 = HOURS_PER_DAY - 1e-9;

fn draw<R: Rng + ?Sized>(n: NormalSpec, rng: &mut R) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    n.mean + n.sd * z
}

fn clamp_time(t: f64) -> f64 {
    t.clamp(0.0, LAST_INSTANT)
}

/// One commuter's sampled day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommuteDay {
    pub depart_h: f64,
    pub arrive_h: f64,
    pub miles: f64,
}

/// Which commute trip an en-route fast charge is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripLeg {
    Departure,
    Arrival,
}

/// Samples departure, arrival and mileage. Negative values clamp to zero,
/// times are kept inside the day, and an arrival before the departure is
/// re-drawn up to ten times and then swapped.
pub fn sample_commute_day<R: Rng + ?Sized>(b: &BehaviorDistributions, rng: &mut R) -> CommuteDay {
    let depart = clamp_time(draw(b.depart_time, rng));
    let mut arrive = clamp_time(draw(b.arrive_time, rng));
    let mut redraws = 0;
    while arrive < depart && redraws < MAX_ARRIVAL_REDRAWS {
        arrive = clamp_time(draw(b.arrive_time, rng));
        redraws += 1;
    }
    let (depart_h, arrive_h) = if arrive < depart { (arrive, depart) } else { (depart, arrive) };
    let miles = draw(b.daily_miles, rng).max(0.0);
    CommuteDay { depart_h, arrive_h, miles }
}

/// Home charge on arrival replenishing the day's driving, capped at a full
/// battery. Days without driving produce no session.
pub fn slow_commuter_session(
    scenario: &ChargingScenario,
    vehicle_id: u32,
    day_index: u32,
    day: &CommuteDay,
) -> Option<ChargingSession> {
    let energy = day.miles * scenario.behavior.energy_per_mile;
    if energy <= 0.0 {
        return None;
    }
    let duration = (energy / scenario.charge_power_kw).min(scenario.battery_kwh / scenario.charge_power_kw);
    Some(ChargingSession {
        start_h: f64::from(day_index) * HOURS_PER_DAY + day.arrive_h,
        duration_h: duration,
        power_kw: scenario.charge_power_kw,
        vehicle_id,
    })
}

pub fn sample_commuter_slow_day<R: Rng + ?Sized>(
    scenario: &ChargingScenario,
    vehicle_id: u32,
    day_index: u32,
    rng: &mut R,
) -> Option<ChargingSession> {
    let day = sample_commute_day(&scenario.behavior, rng);
    slow_commuter_session(scenario, vehicle_id, day_index, &day)
}

/// Depletes the carried state of charge by the day's driving. When it ends
/// strictly below the anxiety threshold the vehicle recharges to full on the
/// given trip leg. Returns the session (if any) and the end-of-day SoC.
pub fn fast_commuter_day(
    scenario: &ChargingScenario,
    soc: f64,
    vehicle_id: u32,
    day_index: u32,
    day: &CommuteDay,
    leg: TripLeg,
) -> (Option<ChargingSession>, f64) {
    let used = day.miles * scenario.behavior.energy_per_mile / scenario.battery_kwh;
    let after = (soc - used).max(0.0);
    if after >= scenario.anxiety_threshold {
        return (None, after);
    }
    let at = match leg {
        TripLeg::Departure => day.depart_h,
        TripLeg::Arrival => day.arrive_h,
    };
    let session = ChargingSession {
        start_h: f64::from(day_index) * HOURS_PER_DAY + at,
        duration_h: scenario.battery_kwh * (1.0 - after) / scenario.charge_power_kw,
        power_kw: scenario.charge_power_kw,
        vehicle_id,
    };
    (Some(session), 1.0)
}

pub fn sample_commuter_fast<R: Rng + ?Sized>(
    scenario: &ChargingScenario,
    soc_carryover: f64,
    vehicle_id: u32,
    day_index: u32,
    rng: &mut R,
) -> (Option<ChargingSession>, f64) {
    let day = sample_commute_day(&scenario.behavior, rng);
    let leg = if rng.random_bool(0.5) { TripLeg::Departure } else { TripLeg::Arrival };
    fast_commuter_day(scenario, soc_carryover, vehicle_id, day_index, &day, leg)
}

/// Walks the service window period by period. Driving at `mph * speed_scale`
/// drains the battery continuously; the instant SoC reaches the threshold the
/// vehicle stops, recharges to full, and resumes once the charge completes.
pub fn ride_service_day(
    scenario: &ChargingScenario,
    soc: f64,
    vehicle_id: u32,
    day_index: u32,
    speed_scale: f64,
) -> (Vec<ChargingSession>, f64) {
    let b = &scenario.behavior;
    let (window_start, window_end) = b.service_window;
    let tau = scenario.anxiety_threshold;
    let day0 = f64::from(day_index) * HOURS_PER_DAY;

    let mut periods: Vec<_> = b.avg_speed_by_period.iter().collect();
    periods.sort_by(|a, b| a.start_h.total_cmp(&b.start_h));

    let mut sessions = Vec::new();
    let mut soc = soc;
    let mut t = window_start;
    for p in periods {
        let end = p.end_h.min(window_end);
        t = t.max(p.start_h);
        let rate = p.mph * speed_scale * b.energy_per_mile / scenario.battery_kwh;
        while t < end {
            if rate <= 0.0 {
                t = end;
                break;
            }
            let to_threshold = ((soc - tau) / rate).max(0.0);
            if t + to_threshold < end {
                t += to_threshold;
                let at = soc.min(tau);
                let duration = scenario.battery_kwh * (1.0 - at) / scenario.charge_power_kw;
                sessions.push(ChargingSession {
                    start_h: day0 + t,
                    duration_h: duration,
                    power_kw: scenario.charge_power_kw,
                    vehicle_id,
                });
                t += duration;
                soc = 1.0;
            } else {
                soc -= rate * (end - t);
                t = end;
            }
        }
    }
    (sessions, soc)
}

pub fn sample_ride_service_day<R: Rng + ?Sized>(
    scenario: &ChargingScenario,
    soc_carryover: f64,
    vehicle_id: u32,
    day_index: u32,
    rng: &mut R,
) -> (Vec<ChargingSession>, f64) {
    let z: f64 = StandardNormal.sample(rng);
    let scale = (1.0 + scenario.behavior.ride_speed_scale_sd * z).clamp(0.5, 1.5);
    ride_service_day(scenario, soc_carryover, vehicle_id, day_index, scale)
}

/// All sessions of one vehicle over `horizon_days`, in time order.
///
/// Vehicles that carry SoC across days start from a uniform draw in
/// `[threshold, 1]` so a fleet does not begin synchronized.
pub fn vehicle_sessions<R: Rng + ?Sized>(
    scenario: &ChargingScenario,
    vehicle_id: u32,
    horizon_days: u32,
    rng: &mut R,
) -> Vec<ChargingSession> {
    let mut out = Vec::new();
    if scenario.is_home_charging() {
        for d in 0..horizon_days {
            out.extend(sample_commuter_slow_day(scenario, vehicle_id, d, rng));
        }
        return out;
    }
    let mut soc = rng.random_range(scenario.anxiety_threshold..=1.0);
    for d in 0..horizon_days {
        match scenario.vehicle_class {
            VehicleClass::Commuter => {
                let (s, next) = sample_commuter_fast(scenario, soc, vehicle_id, d, rng);
                out.extend(s);
                soc = next;
            }
            VehicleClass::RideService => {
                let (s, next) = sample_ride_service_day(scenario, soc, vehicle_id, d, rng);
                out.extend(s);
                soc = next;
            }
        }
    }
    out
}
