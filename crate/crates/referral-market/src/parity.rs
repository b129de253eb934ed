//! Compensating minority network parameters: the density `tau_min` or
//! in-group bias `psi_min` that equalizes referral-offer shares with the
//! groups' population shares.
//!
//! The parity condition is linear in `tau_min` and in `phi_min`, so both
//! solvers are closed-form.  The ability bias `alpha` cancels from both
//! sides of the condition and is accepted but ignored.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{homophily_bias, homophily_share, ModelParam, NetworkParams};

/// Residual tolerance certified by the solvers.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// A compensating-parameter solve result.  Infeasible solutions keep the
/// unclamped value for diagnostics so sweeps can serialize truncated curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Compensation {
    Feasible {
        value: f64,
        /// Left-minus-right of the parity condition at the solution.
        residual: f64,
    },
    Infeasible {
        /// The linear solution before range clamping (may be infinite when
        /// the coefficient degenerates).
        unclamped: f64,
    },
}

impl Compensation {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Compensation::Feasible { .. })
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Compensation::Feasible { value, .. } => Some(*value),
            Compensation::Infeasible { .. } => None,
        }
    }
}

/// Joint solution report for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParitySolution {
    pub tau_min_eq: Compensation,
    pub psi_min_eq: Compensation,
}

/// One row of a parity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParityRow {
    pub value: f64,
    pub tau_min_eq: Compensation,
    pub psi_min_eq: Compensation,
}

/// Left-minus-right of the parity condition
/// `(1-d)[d tau_maj phi_maj + (1-d) tau_min (1-phi_min)]
///  = d[d tau_maj (1-phi_maj) + (1-d) tau_min phi_min]`.
pub fn parity_residual(
    delta: f64,
    tau_maj: f64,
    tau_min: f64,
    phi_maj: f64,
    phi_min: f64,
) -> f64 {
    let lhs = (1.0 - delta)
        * (delta * tau_maj * phi_maj + (1.0 - delta) * tau_min * (1.0 - phi_min));
    let rhs =
        delta * (delta * tau_maj * (1.0 - phi_maj) + (1.0 - delta) * tau_min * phi_min);
    lhs - rhs
}

fn check_inputs(delta: f64, tau_maj: f64, psi_maj: f64) -> Result<()> {
    let ok = |field: &'static str, v: f64, cond: bool, expected: &'static str| {
        if v.is_finite() && cond {
            Ok(())
        } else {
            Err(Error::InvalidParameter { field, value: v, expected })
        }
    };
    ok("delta", delta, delta > 0.5 && delta < 1.0, "(1/2, 1)")?;
    ok("tau_maj", tau_maj, tau_maj > 0.0 && tau_maj <= 1.0, "(0, 1]")?;
    ok("psi_maj", psi_maj, (0.5..1.0).contains(&psi_maj), "[1/2, 1)")
}

/// Solves the parity condition for the minority network density, holding
/// `phi_min` fixed through `psi_min`.  `alpha` does not enter the condition.
pub fn compensating_density(
    delta: f64,
    _alpha: f64,
    tau_maj: f64,
    psi_maj: f64,
    psi_min: f64,
) -> Result<Compensation> {
    check_inputs(delta, tau_maj, psi_maj)?;
    let phi_maj = homophily_share(delta, psi_maj)?;
    let phi_min = homophily_share(1.0 - delta, psi_min)?;

    // Linear in tau_min: numerator / denominator below.
    let num = delta * tau_maj * (delta * (1.0 - phi_maj) - (1.0 - delta) * phi_maj);
    let den = (1.0 - delta) * ((1.0 - delta) * (1.0 - phi_min) - delta * phi_min);
    if den == 0.0 {
        // Degenerate coefficient: parity cannot be restored along tau_min.
        return Ok(Compensation::Infeasible { unclamped: f64::INFINITY });
    }
    let tau_min = num / den;
    if tau_min > 0.0 && tau_min <= 1.0 {
        let residual = parity_residual(delta, tau_maj, tau_min, phi_maj, phi_min);
        Ok(Compensation::Feasible { value: tau_min, residual })
    } else {
        Ok(Compensation::Infeasible { unclamped: tau_min })
    }
}

/// Solves the parity condition for the minority in-group bias: linear solve
/// for `phi_min`, then the analytic homophily inverse.
pub fn compensating_bias(
    delta: f64,
    _alpha: f64,
    tau_maj: f64,
    tau_min: f64,
    psi_maj: f64,
) -> Result<Compensation> {
    check_inputs(delta, tau_maj, psi_maj)?;
    if !(tau_min > 0.0 && tau_min <= 1.0) {
        return Err(Error::InvalidParameter {
            field: "tau_min",
            value: tau_min,
            expected: "(0, 1]",
        });
    }
    let phi_maj = homophily_share(delta, psi_maj)?;
    let phi_min = (delta * (1.0 - delta) * tau_maj * phi_maj
        + (1.0 - delta) * (1.0 - delta) * tau_min
        - delta * delta * tau_maj * (1.0 - phi_maj))
        / ((1.0 - delta) * tau_min);
    // A solution below the population share (or at/above 1) has no valid
    // psi_min; not expected to occur for in-range inputs.
    if !(phi_min >= 1.0 - delta && phi_min < 1.0) {
        return Ok(Compensation::Infeasible { unclamped: phi_min });
    }
    let psi_min = homophily_bias(1.0 - delta, phi_min)?;
    let residual = parity_residual(delta, tau_maj, tau_min, phi_maj, phi_min);
    Ok(Compensation::Feasible { value: psi_min, residual })
}

/// Solves both compensating parameters at one point.
pub fn parity_solution(params: &NetworkParams) -> Result<ParitySolution> {
    Ok(ParitySolution {
        tau_min_eq: compensating_density(
            params.delta(),
            params.alpha(),
            params.tau_maj(),
            params.psi_maj(),
            params.psi_min(),
        )?,
        psi_min_eq: compensating_bias(
            params.delta(),
            params.alpha(),
            params.tau_maj(),
            params.tau_min(),
            params.psi_maj(),
        )?,
    })
}

/// Sweeps one parameter over `grid`, solving both compensating parameters
/// at each point.  Rows where the solve itself errors (out-of-range grid)
/// propagate the error.
pub fn parity_sweep(
    varying: ModelParam,
    grid: &[f64],
    base: &NetworkParams,
) -> Result<Vec<ParityRow>> {
    grid.iter()
        .map(|&value| {
            let params = varying.substitute(base, value)?;
            let solution = parity_solution(&params)?;
            Ok(ParityRow {
                value,
                tau_min_eq: solution.tau_min_eq,
                psi_min_eq: solution.psi_min_eq,
            })
        })
        .collect()
}
