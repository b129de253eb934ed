//! Period-2 equilibrium: market wage, firm profit constant, the
//! constant-profit referral wage schedule, and the period-1 wage.
//!
//! The schedule is represented parametrically as `w(q)` over the quantile
//! `q = F(w)`.  Holding expected firm profit equal to `c` across the support
//! is explicit in `w` given `F`, so the forward map needs no root-finding;
//! the inverse `F(w)` is recovered by bisection on the monotone schedule.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{derived_rates, DerivedRates, NetworkParams};

/// Default number of quantile samples in the serialized schedule.
pub const DEFAULT_RESOLUTION: usize = 1001;

/// Grid step used to verify the schedule is strictly increasing.
const MONOTONE_CHECK_STEP: f64 = 1e-3;

/// Wage tolerance for the bisection inverse `F(w)`.
const INVERSE_TOLERANCE: f64 = 1e-10;

/// Period-2 market wage: expected productivity of workers hired through the
/// general market (Bayes' rule over escape probabilities).
pub fn market_wage(rates: &DerivedRates, params: &NetworkParams) -> f64 {
    let d = params.delta();
    let e = &rates.e;
    (e.h_maj * d + e.h_min * (1.0 - d))
        / ((e.h_maj + e.l_maj) * d + (e.h_min + e.l_min) * (1.0 - d))
}

/// Expected referral profit of a high-ability-employing firm, constant over
/// the wage support.  Evaluated at the bottom of the support where the
/// acceptance probability is the escape probability.
pub fn profit_constant(rates: &DerivedRates, w_m2: f64) -> f64 {
    let (p, e) = (&rates.p, &rates.e);
    p.h_maj * e.h_maj * (1.0 - w_m2) + p.h_min * e.h_min * (1.0 - w_m2)
        - p.l_maj * e.l_maj * w_m2
        - p.l_min * e.l_min * w_m2
}

/// Referral wage at quantile `q` of the offer distribution: the unique wage
/// at which expected profit equals `c` when a fraction `q` of firms offer
/// less.
pub fn wage_at_quantile(rates: &DerivedRates, c: f64, q: f64) -> f64 {
    let p = &rates.p;
    let u = 1.0 - q;
    let high = p.h_maj * (-p.h_maj * u).exp() + p.h_min * (-p.h_min * u).exp();
    let low = p.l_maj * (-p.l_maj * u).exp() + p.l_min * (-p.l_min * u).exp();
    (high - c) / (high + low)
}

/// Expected profit of a high-ability-employing firm offering wage `w_r`
/// when a fraction `q` of firms offer less.  Evaluating this at
/// `wage_at_quantile(rates, c, q)` must return `c` for every `q`.
pub fn expected_profit_high(rates: &DerivedRates, w_r: f64, q: f64) -> f64 {
    let p = &rates.p;
    let u = 1.0 - q;
    p.h_maj * (-p.h_maj * u).exp() * (1.0 - w_r)
        + p.h_min * (-p.h_min * u).exp() * (1.0 - w_r)
        - p.l_maj * (-p.l_maj * u).exp() * w_r
        - p.l_min * (-p.l_min * u).exp() * w_r
}

/// Expected profit if a low-ability-employing firm deviated and offered the
/// referral wage `w(q)`.  The leading offer-rate factors swap the ability
/// bias (`alpha` with `1 - alpha`) because the deviating firm's worker is
/// low-ability; the acceptance factors keep the equilibrium rates.  Strictly
/// negative whenever `alpha > 1/2`.
pub fn expected_profit_low(rates: &DerivedRates, w_m2: f64, q: f64) -> f64 {
    let c = profit_constant(rates, w_m2);
    let w_r = wage_at_quantile(rates, c, q);
    let p = &rates.p;
    let u = 1.0 - q;
    // Swapping alpha and (1 - alpha) turns each high-ability offer rate into
    // its low-ability counterpart and vice versa.
    p.l_maj * (-p.h_maj * u).exp() * (1.0 - w_r)
        + p.l_min * (-p.h_min * u).exp() * (1.0 - w_r)
        - p.h_maj * (-p.l_maj * u).exp() * w_r
        - p.h_min * (-p.l_min * u).exp() * w_r
}

/// Maximum referral wage: the offer accepted with probability one.
pub fn max_referral_wage(rates: &DerivedRates, c: f64) -> f64 {
    let p = &rates.p;
    (p.h_maj + p.h_min - c) / (p.h_maj + p.h_min + p.l_maj + p.l_min)
}

/// Period-1 market wage: average productivity plus the option value of a
/// period-2 referral.
pub fn period1_wage(c: f64) -> f64 {
    0.5 * (1.0 + c)
}

/// The referral wage schedule `w(q)` together with the rates and profit
/// constant that define it.  Supports exact evaluation at any quantile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WageSchedule {
    rates: DerivedRates,
    c: f64,
    w_m2: f64,
    w_r_max: f64,
}

impl WageSchedule {
    pub fn new(rates: DerivedRates, c: f64, w_m2: f64) -> Self {
        let w_r_max = max_referral_wage(&rates, c);
        WageSchedule { rates, c, w_m2, w_r_max }
    }

    /// Builds the schedule and verifies it is strictly increasing.
    pub fn checked(rates: DerivedRates, c: f64, w_m2: f64) -> Result<Self> {
        let schedule = Self::new(rates, c, w_m2);
        schedule.check_monotone()?;
        Ok(schedule)
    }

    pub fn wage(&self, q: f64) -> f64 {
        wage_at_quantile(&self.rates, self.c, q)
    }

    pub fn rates(&self) -> &DerivedRates {
        &self.rates
    }

    pub fn profit_constant(&self) -> f64 {
        self.c
    }

    pub fn market_wage(&self) -> f64 {
        self.w_m2
    }

    pub fn max_wage(&self) -> f64 {
        self.w_r_max
    }

    /// Evenly spaced `(q, w(q))` samples, endpoints included.
    pub fn samples(&self, resolution: usize) -> Vec<(f64, f64)> {
        let n = resolution.max(2);
        (0..n)
            .map(|i| {
                let q = i as f64 / (n - 1) as f64;
                (q, self.wage(q))
            })
            .collect()
    }

    /// Inverse map `F(w)` by bisection on the monotone schedule.
    pub fn quantile_of_wage(&self, w: f64) -> Result<f64> {
        if w < self.w_m2 - INVERSE_TOLERANCE || w > self.w_r_max + INVERSE_TOLERANCE {
            return Err(Error::InvalidParameter {
                field: "wage",
                value: w,
                expected: "within [w_m2, w_r_max]",
            });
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        while hi - lo > 1e-15 {
            let mid = 0.5 * (lo + hi);
            if (self.wage(mid) - w).abs() <= INVERSE_TOLERANCE {
                return Ok(mid);
            }
            if self.wage(mid) < w {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Verifies strict monotonicity of `w(q)` on a fixed grid; a violation
    /// signals a parameter region without a dispersed-wage equilibrium.
    fn check_monotone(&self) -> Result<()> {
        let steps = (1.0 / MONOTONE_CHECK_STEP).round() as usize;
        let mut prev = self.wage(0.0);
        for i in 1..=steps {
            let q = i as f64 * MONOTONE_CHECK_STEP;
            let w = self.wage(q);
            if w <= prev {
                return Err(Error::DegenerateSchedule { q });
            }
            prev = w;
        }
        Ok(())
    }
}

/// Full period-2 equilibrium summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equilibrium {
    /// Period-2 market wage.
    pub w_m2: f64,
    /// Constant expected referral profit.
    pub c: f64,
    /// Maximum referral wage offer.
    pub w_r_max: f64,
    /// Period-1 market wage `(1 + c) / 2`.
    pub w_m1: f64,
    /// Sampled `(quantile, wage)` pairs of the referral wage schedule.
    pub schedule: Vec<(f64, f64)>,
}

/// Solves the equilibrium at the default schedule resolution.
pub fn solve(params: &NetworkParams) -> Result<Equilibrium> {
    solve_with_resolution(params, DEFAULT_RESOLUTION)
}

pub fn solve_with_resolution(params: &NetworkParams, resolution: usize) -> Result<Equilibrium> {
    let rates = derived_rates(params);
    let w_m2 = market_wage(&rates, params);
    let c = profit_constant(&rates, w_m2);
    let schedule = WageSchedule::new(rates, c, w_m2);
    schedule.check_monotone()?;
    Ok(Equilibrium {
        w_m2,
        c,
        w_r_max: schedule.max_wage(),
        w_m1: period1_wage(c),
        schedule: schedule.samples(resolution),
    })
}

/// Builds the exact schedule evaluator without sampling.
pub fn wage_schedule(params: &NetworkParams) -> Result<WageSchedule> {
    let rates = derived_rates(params);
    let w_m2 = market_wage(&rates, params);
    let c = profit_constant(&rates, w_m2);
    let schedule = WageSchedule::new(rates, c, w_m2);
    schedule.check_monotone()?;
    Ok(schedule)
}
