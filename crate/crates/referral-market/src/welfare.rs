//! Expected-wage comparison between the groups: acceptance-likelihood
//! ratio, expected-max quantiles, expected referral wages, and the welfare
//! gap, plus the sweep generator behind the gap figures.
//!
//! The expected referral wage uses the uniform-offer-distribution shortcut:
//! the minority reference quantile is 1/2 and the majority quantile is the
//! expected maximum of `gamma` uniform draws, `gamma / (gamma + 1)`, with
//! `gamma` treated as a real-valued effective number of draws.  The exact
//! schedule `w(q)` is then evaluated at those quantiles.  The Monte Carlo
//! module quantifies the residual error of this shortcut.

use serde::Serialize;

use crate::equilibrium::{market_wage, profit_constant, wage_at_quantile, WageSchedule};
use crate::error::{Error, Result};
use crate::model::{derived_rates, DerivedRates, ModelParam, NetworkParams};

/// Per-group expected wages and the resulting welfare gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WelfareReport {
    /// Likelihood a high-ability majority worker accepts a referral,
    /// relative to a high-ability minority worker.
    pub gamma_maj: f64,
    /// Expected-max quantile for the majority group, `gamma / (gamma + 1)`.
    pub q_maj: f64,
    /// Reference quantile for the minority group (1/2 by normalization).
    pub q_min: f64,
    /// Expected referral wage, majority.
    pub ew_r_maj: f64,
    /// Expected referral wage, minority.
    pub ew_r_min: f64,
    /// Overall expected wage, majority.
    pub ew_maj: f64,
    /// Overall expected wage, minority.
    pub ew_min: f64,
    /// Welfare gap `1 - ew_min / ew_maj`, as a fraction.
    pub gap: f64,
}

/// Referral acceptance likelihood of high-ability majority workers relative
/// to high-ability minority workers.
pub fn gamma_ratio(rates: &DerivedRates) -> Result<f64> {
    if rates.e.h_min >= 1.0 {
        return Err(Error::NoMinorityOffers);
    }
    Ok((1.0 - rates.e.h_maj) / (1.0 - rates.e.h_min))
}

/// Expected maximum of `gamma` uniform draws: `gamma / (gamma + 1)`.
/// With the minority count normalized to one draw, its quantile is 1/2.
pub fn expected_max_quantile(gamma: f64) -> f64 {
    gamma / (gamma + 1.0)
}

/// Runs the full pipeline: rates, market wage, profit constant, quantiles,
/// referral wages, and the gap.
pub fn welfare_report(params: &NetworkParams) -> Result<WelfareReport> {
    let rates = derived_rates(params);
    let w_m2 = market_wage(&rates, params);
    let c = profit_constant(&rates, w_m2);
    // Surfaces the degenerate-schedule error before any wage is reported.
    WageSchedule::checked(rates, c, w_m2)?;
    let gamma_maj = gamma_ratio(&rates)?;
    let q_maj = expected_max_quantile(gamma_maj);
    let q_min = 0.5;
    let ew_r_maj = wage_at_quantile(&rates, c, q_maj);
    let ew_r_min = wage_at_quantile(&rates, c, q_min);
    let ew_maj = rates.e.h_maj * w_m2 + (1.0 - rates.e.h_maj) * ew_r_maj;
    let ew_min = rates.e.h_min * w_m2 + (1.0 - rates.e.h_min) * ew_r_min;
    Ok(WelfareReport {
        gamma_maj,
        q_maj,
        q_min,
        ew_r_maj,
        ew_r_min,
        ew_maj,
        ew_min,
        gap: 1.0 - ew_min / ew_maj,
    })
}

/// Sweeps one parameter over `grid`, returning `(value, gap)` rows.
pub fn welfare_sweep(
    varying: ModelParam,
    grid: &[f64],
    base: &NetworkParams,
) -> Result<Vec<(f64, f64)>> {
    grid.iter()
        .map(|&value| {
            let params = varying.substitute(base, value)?;
            Ok((value, welfare_report(&params)?.gap))
        })
        .collect()
}
