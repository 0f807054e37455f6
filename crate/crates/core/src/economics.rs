//! Total cost of ownership of a distribution transformer.
//!
//! The conventional evaluation prices a fixed loading shape over the whole
//! evaluation period. The re-established evaluation charges capital in
//! proportion to the insulation life actually consumed and prices load losses
//! from the simulated loading series.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EconomicsError {
    #[error("invalid cost parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("average load {s_avg} exceeds peak load {s_hat}")]
    AverageAbovePeak { s_avg: f64, s_hat: f64 },
    #[error("window end {t2} yr precedes start {t1} yr")]
    Window { t1: f64, t2: f64 },
    #[error("empty loading series")]
    EmptySeries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcoParams {
    /// Capital cost ($).
    pub c_o: f64,
    /// Core (no-load) loss (kW).
    pub cl: f64,
    /// Load loss at rated load (kW).
    pub ll: f64,
    /// Levelized demand cost ($/kW-yr).
    pub dc: f64,
    /// Responsibility factor.
    pub rf: f64,
    /// Energy cost ($/kWh).
    pub ec: f64,
    /// Dynamic load factor constant.
    pub gamma: f64,
    /// Interest rate per year.
    pub i: f64,
    /// Hours per year.
    pub n_hours: f64,
    /// Evaluation period (yr).
    pub t_ins_years: f64,
    /// Peak loading over rating.
    pub p_hat: f64,
}

impl Default for TcoParams {
    fn default() -> Self {
        Self {
            c_o: 70_000.0,
            cl: 13.2,
            ll: 53.0,
            dc: 120.0,
            rf: 0.81,
            ec: 0.05,
            gamma: 0.2,
            i: 0.05,
            n_hours: 8760.0,
            t_ins_years: 15.41,
            p_hat: 1.0,
        }
    }
}

impl TcoParams {
    pub fn validate(&self) -> Result<(), EconomicsError> {
        let bad = |name, value| Err(EconomicsError::InvalidParameter { name, value });
        for (name, v) in [
            ("c_o", self.c_o),
            ("cl", self.cl),
            ("ll", self.ll),
            ("dc", self.dc),
            ("ec", self.ec),
            ("p_hat", self.p_hat),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(name, v);
            }
        }
        if !(self.rf > 0.0 && self.rf <= 1.0) {
            return bad("rf", self.rf);
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad("gamma", self.gamma);
        }
        if !(self.i.is_finite() && self.i > 0.0) {
            return bad("i", self.i);
        }
        if !(self.n_hours > 0.0 && self.n_hours.is_finite()) {
            return bad("n_hours", self.n_hours);
        }
        if !(self.t_ins_years > 0.0 && self.t_ins_years.is_finite()) {
            return bad("t_ins_years", self.t_ins_years);
        }
        Ok(())
    }
}

/// Cost split of one TCO evaluation. `total` is the sum of the three terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcoBreakdown {
    pub window_start_yr: f64,
    pub window_end_yr: f64,
    /// Capital charge ($).
    pub capital: f64,
    /// CL·A ($).
    pub core_loss: f64,
    /// LL·B ($).
    pub load_loss: f64,
    pub total: f64,
    /// Core-loss cost rate A ($/kW).
    pub a: f64,
    /// Load-loss cost rate B ($/kW).
    pub b: f64,
    pub loss_factor: f64,
    /// Transformer purchases after the initial one within the window.
    pub replacements: u32,
    /// Times (yr) at which those purchases fall.
    pub replacement_times_yr: Vec<f64>,
}

impl TcoBreakdown {
    fn new(window: (f64, f64), capital: f64, params: &TcoParams, a: f64, b: f64, loss_factor: f64) -> Self {
        let core_loss = params.cl * a;
        let load_loss = params.ll * b;
        Self {
            window_start_yr: window.0,
            window_end_yr: window.1,
            capital,
            core_loss,
            load_loss,
            total: capital + core_loss + load_loss,
            a,
            b,
            loss_factor,
            replacements: 0,
            replacement_times_yr: Vec::new(),
        }
    }

    /// `(term, dollars)` pairs in reporting order.
    pub fn terms(&self) -> [(&'static str, f64); 4] {
        [
            ("capital", self.capital),
            ("core_loss", self.core_loss),
            ("load_loss", self.load_loss),
            ("total", self.total),
        ]
    }
}

/// Present value of a unit-per-year energy cost stream over `t_years`.
pub fn pec(ec: f64, i: f64, t_years: f64) -> f64 {
    let g = (1.0 + i).powf(t_years);
    ec * (g - 1.0) / (i * g)
}

/// Present value of the energy cost stream between `t1` and `t2` years.
pub fn pec_window(ec: f64, i: f64, t1: f64, t2: f64) -> Result<f64, EconomicsError> {
    if !(t1 >= 0.0 && t2 >= t1) {
        return Err(EconomicsError::Window { t1, t2 });
    }
    if t1 == t2 {
        return Ok(0.0);
    }
    Ok(ec / i * ((1.0 + i).powf(-t1) - (1.0 + i).powf(-t2)))
}

fn loss_factor(u: f64, gamma: f64) -> f64 {
    gamma * u + (1.0 - gamma) * u * u
}

/// Loss factor of a load with average `s_avg` and peak `s_hat`.
pub fn lof_conventional(s_avg: f64, s_hat: f64, gamma: f64) -> Result<f64, EconomicsError> {
    if !(s_hat > 0.0) || !(s_avg >= 0.0) {
        return Err(EconomicsError::InvalidParameter { name: "s_avg/s_hat", value: s_avg / s_hat });
    }
    if s_avg > s_hat {
        return Err(EconomicsError::AverageAbovePeak { s_avg, s_hat });
    }
    Ok(loss_factor(s_avg / s_hat, gamma))
}

/// Per-slot loss factor with `u(t) = k(t) / s_hat_pu`.
pub fn lof_timeseries(mean_k_series: &[f64], s_hat_pu: f64, gamma: f64) -> Result<Vec<f64>, EconomicsError> {
    if !(s_hat_pu > 0.0) {
        return Err(EconomicsError::InvalidParameter { name: "s_hat_pu", value: s_hat_pu });
    }
    mean_k_series
        .iter()
        .map(|&k| {
            if k > s_hat_pu {
                Err(EconomicsError::AverageAbovePeak { s_avg: k, s_hat: s_hat_pu })
            } else {
                Ok(loss_factor(k / s_hat_pu, gamma))
            }
        })
        .collect()
}

/// Conventional TCO over `[0, t_ins_years]` for a load averaging `s_avg` with peak `s_hat`.
pub fn tco_conventional(params: &TcoParams, s_avg: f64, s_hat: f64) -> Result<TcoBreakdown, EconomicsError> {
    params.validate()?;
    let lof = lof_conventional(s_avg, s_hat, params.gamma)?;
    let npec = params.n_hours * pec(params.ec, params.i, params.t_ins_years);
    let a = params.dc + npec;
    let b = (params.rf * params.dc + lof * npec) * params.p_hat * params.p_hat;
    Ok(TcoBreakdown::new((0.0, params.t_ins_years), params.c_o, params, a, b, lof))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ReestablishedOptions {
    /// Charge at least the calendar share of the normal life, `(t2 − t1) / t_ins_years`.
    pub calendar_floor: bool,
}

/// TCO over `[t1, t2]` years with capital charged as `lol_fraction · C_o`.
///
/// `lol_fraction` is the insulation life consumed over the window and may
/// exceed one, in which case the unit is replaced each time a full life is
/// used up. Consumption is taken as uniform over the window when placing
/// replacements.
pub fn tco_transformer_reestablished(
    params: &TcoParams,
    lol_fraction: f64,
    mean_k_series: &[f64],
    t1: f64,
    t2: f64,
    options: ReestablishedOptions,
) -> Result<TcoBreakdown, EconomicsError> {
    params.validate()?;
    if !(lol_fraction.is_finite() && lol_fraction >= 0.0) {
        return Err(EconomicsError::InvalidParameter { name: "lol_fraction", value: lol_fraction });
    }
    if mean_k_series.is_empty() {
        return Err(EconomicsError::EmptySeries);
    }
    let window = pec_window(params.ec, params.i, t1, t2)?;
    let s_hat = mean_k_series.iter().copied().fold(0.0, f64::max);
    let lof = if s_hat > 0.0 {
        let series = lof_timeseries(mean_k_series, s_hat, params.gamma)?;
        series.iter().sum::<f64>() / series.len() as f64
    } else {
        0.0
    };
    let npec = params.n_hours * window;
    let a = params.dc + npec;
    let b = (params.rf * params.dc + lof * npec) * params.p_hat * params.p_hat;

    let span = t2 - t1;
    let charged = if options.calendar_floor {
        lol_fraction.max(span / params.t_ins_years)
    } else {
        lol_fraction
    };
    let mut out = TcoBreakdown::new((t1, t2), charged * params.c_o, params, a, b, lof);
    if lol_fraction > 0.0 {
        let crossings = (lol_fraction.ceil() as u32).saturating_sub(1);
        out.replacements = crossings;
        out.replacement_times_yr = (1..=crossings).map(|n| t1 + span * f64::from(n) / lol_fraction).collect();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PEC_ORACLE: f64 = 0.5285095491656057;

    #[test]
    fn pec_values() {
        assert!((pec(0.05, 0.05, 15.41) - PEC_ORACLE).abs() < 1e-15);
        assert!((pec_window(0.05, 0.05, 0.0, 15.41).unwrap() - PEC_ORACLE).abs() < 1e-15);
        assert_eq!(pec_window(0.05, 0.05, 3.0, 3.0), Ok(0.0));
        assert!(pec_window(0.05, 0.05, 3.0, 2.0).is_err());
    }

    #[test]
    fn loss_factor_values() {
        assert_eq!(lof_conventional(2.0, 2.0, 0.37).unwrap(), 1.0);
        assert!((lof_conventional(0.5, 1.0, 0.2).unwrap() - 0.3).abs() < 1e-15);
        assert!(lof_conventional(1.1, 1.0, 0.2).is_err());
        let series = lof_timeseries(&[0.4; 6], 0.8, 0.2).unwrap();
        assert!(series.iter().all(|&l| (l - 0.3).abs() < 1e-15));
    }

    #[test]
    fn table_parameters_half_load() {
        let b = tco_conventional(&TcoParams::default(), 0.5, 1.0).unwrap();
        assert!((b.a - 4749.743650690705).abs() < 1e-9);
        assert!((b.b - 1486.123095207212).abs() < 1e-9);
        assert!((b.total - 211461.14023509953).abs() < 1e-6);
        assert_eq!(b.total, b.capital + b.core_loss + b.load_loss);
    }

    #[test]
    fn lossless_unit_costs_capital_only() {
        let p = TcoParams { cl: 0.0, ll: 0.0, ..TcoParams::default() };
        assert_eq!(tco_conventional(&p, 0.5, 1.0).unwrap().total, p.c_o);
    }

    #[test]
    fn energy_cost_raises_tco() {
        let p = TcoParams::default();
        let q = TcoParams { ec: 0.10, ..p.clone() };
        assert!(tco_conventional(&q, 0.5, 1.0).unwrap().total > tco_conventional(&p, 0.5, 1.0).unwrap().total);
    }

    #[test]
    fn flat_rated_load_matches_conventional() {
        let p = TcoParams::default();
        let re = tco_transformer_reestablished(&p, 1.0, &[1.0; 96], 0.0, p.t_ins_years, Default::default())
            .unwrap();
        let conv = tco_conventional(&p, 1.0, 1.0).unwrap();
        assert_eq!(re.capital, p.c_o);
        assert!((re.total - conv.total).abs() <= 0.02 * conv.total);
        assert_eq!(re.replacements, 0);
    }

    #[test]
    fn no_aging_charges_no_capital() {
        let p = TcoParams::default();
        let re = tco_transformer_reestablished(&p, 0.0, &[0.5, 0.7], 0.0, p.t_ins_years, Default::default())
            .unwrap();
        assert_eq!(re.capital, 0.0);
        assert!(re.total > 0.0);
        let floored = ReestablishedOptions { calendar_floor: true };
        let re = tco_transformer_reestablished(&p, 0.0, &[0.5, 0.7], 0.0, p.t_ins_years, floored).unwrap();
        assert_eq!(re.capital, p.c_o);
    }

    #[test]
    fn half_life_per_year_replaces_seven_times() {
        let p = TcoParams::default();
        let lol = 0.5 * p.t_ins_years;
        let re = tco_transformer_reestablished(&p, lol, &[0.8; 10], 0.0, p.t_ins_years, Default::default())
            .unwrap();
        assert_eq!(re.replacements, 7);
        assert!((re.capital - 7.705 * p.c_o).abs() < 1e-6);
        assert!((re.replacement_times_yr[0] - 2.0).abs() < 1e-12);
        assert!((re.replacement_times_yr[6] - 14.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn pec_window_additivity(a in 0.0f64..30.0, b in 0.0f64..30.0, c in 0.0f64..30.0) {
            let mut t = [a, b, c];
            t.sort_by(f64::total_cmp);
            let lhs = pec_window(0.05, 0.05, t[0], t[1]).unwrap() + pec_window(0.05, 0.05, t[1], t[2]).unwrap();
            let rhs = pec_window(0.05, 0.05, t[0], t[2]).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
        }

        #[test]
        fn reestablished_monotone_in_lol(a in 0.0f64..10.0, b in 0.0f64..10.0) {
            let p = TcoParams::default();
            let ks = [0.3, 0.9, 0.6];
            let f = |l| tco_transformer_reestablished(&p, l, &ks, 0.0, 15.41, Default::default()).unwrap().total;
            prop_assert!((a <= b) == (f(a) <= f(b)) || f(a) == f(b));
        }

        #[test]
        fn conventional_monotone_in_costs(scale in 1.0f64..3.0) {
            let p = TcoParams::default();
            let base = tco_conventional(&p, 0.4, 1.0).unwrap().total;
            for q in [
                TcoParams { c_o: p.c_o * scale, ..p.clone() },
                TcoParams { cl: p.cl * scale, ..p.clone() },
                TcoParams { ll: p.ll * scale, ..p.clone() },
                TcoParams { dc: p.dc * scale, ..p.clone() },
            ] {
                prop_assert!(tco_conventional(&q, 0.4, 1.0).unwrap().total >= base);
            }
        }

        #[test]
        fn surcharge_when_aging_exceeds_calendar(extra in 0.0f64..5.0, ks in prop::collection::vec(0.05f64..1.5, 1..50)) {
            let p = TcoParams::default();
            let s_hat = ks.iter().copied().fold(0.0, f64::max);
            let s_avg = ks.iter().sum::<f64>() / ks.len() as f64;
            let conv = tco_conventional(&p, s_avg.min(s_hat), s_hat).unwrap();
            let re = tco_transformer_reestablished(&p, 1.0 + extra, &ks, 0.0, p.t_ins_years, Default::default()).unwrap();
            prop_assert!(re.total >= conv.total - 1e-6 * conv.total);
        }
    }
}
