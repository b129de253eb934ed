//! Model primitives: the six network parameters, the homophily transform
//! linking in-group bias to same-type tie probability, and the per-cell
//! offer-rate / escape-probability algebra every other module consumes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Majority/minority worker group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    Majority,
    Minority,
}

/// High/low worker ability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ability {
    High,
    Low,
}

/// One of the four ability-by-group worker cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WorkerCell {
    pub ability: Ability,
    pub group: Group,
}

impl WorkerCell {
    pub const H_MAJ: WorkerCell = WorkerCell { ability: Ability::High, group: Group::Majority };
    pub const H_MIN: WorkerCell = WorkerCell { ability: Ability::High, group: Group::Minority };
    pub const L_MAJ: WorkerCell = WorkerCell { ability: Ability::Low, group: Group::Majority };
    pub const L_MIN: WorkerCell = WorkerCell { ability: Ability::Low, group: Group::Minority };

    pub const ALL: [WorkerCell; 4] =
        [Self::H_MAJ, Self::H_MIN, Self::L_MAJ, Self::L_MIN];

    pub fn label(&self) -> &'static str {
        match (self.ability, self.group) {
            (Ability::High, Group::Majority) => "H_maj",
            (Ability::High, Group::Minority) => "H_min",
            (Ability::Low, Group::Majority) => "L_maj",
            (Ability::Low, Group::Minority) => "L_min",
        }
    }
}

/// A value per worker cell, indexable by [`WorkerCell`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellValues {
    pub h_maj: f64,
    pub h_min: f64,
    pub l_maj: f64,
    pub l_min: f64,
}

impl CellValues {
    pub fn get(&self, cell: WorkerCell) -> f64 {
        match (cell.ability, cell.group) {
            (Ability::High, Group::Majority) => self.h_maj,
            (Ability::High, Group::Minority) => self.h_min,
            (Ability::Low, Group::Majority) => self.l_maj,
            (Ability::Low, Group::Minority) => self.l_min,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> CellValues {
        CellValues {
            h_maj: f(self.h_maj),
            h_min: f(self.h_min),
            l_maj: f(self.l_maj),
            l_min: f(self.l_min),
        }
    }
}

/// The six model primitives.
///
/// `alpha = 1` and `tau = 1` are admitted as a closed boundary: the numerical
/// example uses full network density and the calibration sets full ability
/// sorting.  The heterophily regime `psi < 1/2` is rejected at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    delta: f64,
    alpha: f64,
    tau_maj: f64,
    tau_min: f64,
    psi_maj: f64,
    psi_min: f64,
}

fn check_range(
    field: &'static str,
    value: f64,
    ok: bool,
    expected: &'static str,
) -> Result<()> {
    if value.is_finite() && ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter { field, value, expected })
    }
}

impl NetworkParams {
    pub fn new(
        delta: f64,
        alpha: f64,
        tau_maj: f64,
        tau_min: f64,
        psi_maj: f64,
        psi_min: f64,
    ) -> Result<Self> {
        check_range("delta", delta, delta > 0.5 && delta < 1.0, "(1/2, 1)")?;
        check_range("alpha", alpha, alpha > 0.5 && alpha <= 1.0, "(1/2, 1]")?;
        check_range("tau_maj", tau_maj, tau_maj > 0.0 && tau_maj <= 1.0, "(0, 1]")?;
        check_range("tau_min", tau_min, tau_min > 0.0 && tau_min <= 1.0, "(0, 1]")?;
        check_range("psi_maj", psi_maj, (0.5..1.0).contains(&psi_maj), "[1/2, 1)")?;
        check_range("psi_min", psi_min, (0.5..1.0).contains(&psi_min), "[1/2, 1)")?;
        Ok(NetworkParams { delta, alpha, tau_maj, tau_min, psi_maj, psi_min })
    }

    /// Equal-magnitude helper: both groups share `tau` and `psi`.
    pub fn equal_magnitude(delta: f64, alpha: f64, tau: f64, psi: f64) -> Result<Self> {
        Self::new(delta, alpha, tau, tau, psi, psi)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn tau_maj(&self) -> f64 {
        self.tau_maj
    }
    pub fn tau_min(&self) -> f64 {
        self.tau_min
    }
    pub fn psi_maj(&self) -> f64 {
        self.psi_maj
    }
    pub fn psi_min(&self) -> f64 {
        self.psi_min
    }

    /// Population share of `group`.
    pub fn share(&self, group: Group) -> f64 {
        match group {
            Group::Majority => self.delta,
            Group::Minority => 1.0 - self.delta,
        }
    }

    pub fn tau(&self, group: Group) -> f64 {
        match group {
            Group::Majority => self.tau_maj,
            Group::Minority => self.tau_min,
        }
    }

    pub fn psi(&self, group: Group) -> f64 {
        match group {
            Group::Majority => self.psi_maj,
            Group::Minority => self.psi_min,
        }
    }
}

/// One of the six parameters, for sweeps and CLI overrides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelParam {
    Delta,
    Alpha,
    TauMaj,
    TauMin,
    PsiMaj,
    PsiMin,
}

impl ModelParam {
    pub const ALL: [ModelParam; 6] = [
        ModelParam::Delta,
        ModelParam::Alpha,
        ModelParam::TauMaj,
        ModelParam::TauMin,
        ModelParam::PsiMaj,
        ModelParam::PsiMin,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelParam::Delta => "delta",
            ModelParam::Alpha => "alpha",
            ModelParam::TauMaj => "tau_maj",
            ModelParam::TauMin => "tau_min",
            ModelParam::PsiMaj => "psi_maj",
            ModelParam::PsiMin => "psi_min",
        }
    }

    pub fn parse(name: &str) -> Option<ModelParam> {
        Self::ALL.iter().copied().find(|p| p.name() == name)
    }

    /// Returns `base` with this parameter replaced by `value`.
    pub fn substitute(&self, base: &NetworkParams, value: f64) -> Result<NetworkParams> {
        let mut p = *base;
        match self {
            ModelParam::Delta => p.delta = value,
            ModelParam::Alpha => p.alpha = value,
            ModelParam::TauMaj => p.tau_maj = value,
            ModelParam::TauMin => p.tau_min = value,
            ModelParam::PsiMaj => p.psi_maj = value,
            ModelParam::PsiMin => p.psi_min = value,
        }
        NetworkParams::new(p.delta, p.alpha, p.tau_maj, p.tau_min, p.psi_maj, p.psi_min)
    }
}

/// Same-type tie probability phi for a group with population share `w` and
/// in-group bias `psi`:
///
/// ```text
/// phi = w * psi / (w * psi + (1 - w)(1 - psi))
/// ```
pub fn homophily_share(w: f64, psi: f64) -> Result<f64> {
    check_range("w", w, w > 0.0 && w < 1.0, "(0, 1)")?;
    check_range("psi", psi, (0.5..1.0).contains(&psi), "[1/2, 1)")?;
    Ok(w * psi / (w * psi + (1.0 - w) * (1.0 - psi)))
}

/// Analytic inverse of [`homophily_share`]: the bias `psi` producing
/// same-type tie probability `phi` at population share `w`.
pub fn homophily_bias(w: f64, phi: f64) -> Result<f64> {
    check_range("w", w, w > 0.0 && w < 1.0, "(0, 1)")?;
    // phi < w would imply heterophily, which is out of scope.
    check_range("phi", phi, phi >= w && phi < 1.0, "[w, 1)")?;
    Ok(phi * (1.0 - w) / (phi * (1.0 - w) + w * (1.0 - phi)))
}

/// Per-cell offer rates and escape probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedRates {
    /// Same-type tie probability for majority period-1 workers.
    pub phi_maj: f64,
    /// Same-type tie probability for minority period-1 workers.
    pub phi_min: f64,
    /// Referral offer rate per cell (Poisson intensity).
    pub p: CellValues,
    /// Escape probability per cell: `e = exp(-p)`, the chance of receiving
    /// no referral offer and taking the market wage.
    pub e: CellValues,
}

impl DerivedRates {
    pub fn phi(&self, group: Group) -> f64 {
        match group {
            Group::Majority => self.phi_maj,
            Group::Minority => self.phi_min,
        }
    }
}

/// Computes the four offer rates and escape probabilities from the model
/// primitives.  High-ability cells carry the `alpha` factor, low-ability
/// cells the `1 - alpha` substitution.
pub fn derived_rates(params: &NetworkParams) -> DerivedRates {
    let d = params.delta();
    let a = params.alpha();
    let (tm, tn) = (params.tau_maj(), params.tau_min());
    let phi_maj =
        homophily_share(d, params.psi_maj()).expect("valid params imply valid phi inputs");
    let phi_min =
        homophily_share(1.0 - d, params.psi_min()).expect("valid params imply valid phi inputs");

    // Offer mass reaching majority / minority workers per unit ability weight.
    let to_maj = d * tm * phi_maj + (1.0 - d) * tn * (1.0 - phi_min);
    let to_min = d * tm * (1.0 - phi_maj) + (1.0 - d) * tn * phi_min;

    let p = CellValues {
        h_maj: a * to_maj,
        h_min: a * to_min,
        l_maj: (1.0 - a) * to_maj,
        l_min: (1.0 - a) * to_min,
    };
    DerivedRates { phi_maj, phi_min, p, e: p.map(|x| (-x).exp()) }
}

/// Fraction of referral offers reaching each group, `(majority, minority)`.
/// The two shares sum to one.
pub fn referral_offer_shares(params: &NetworkParams) -> (f64, f64) {
    let rates = derived_rates(params);
    let d = params.delta();
    let total = d * params.tau_maj() + (1.0 - d) * params.tau_min();
    // alpha cancels between numerator and denominator.
    let maj = (rates.p.h_maj + rates.p.l_maj) / total;
    (maj, 1.0 - maj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    pub(crate) fn calibration_params() -> NetworkParams {
        NetworkParams::new(0.70, 1.0, 0.41, 0.43, 0.87, 0.83).unwrap()
    }

    #[test]
    fn params_reject_out_of_range() {
        for (d, a, tm, tn, pm, pn, field) in [
            (0.4, 0.9, 0.8, 0.8, 0.8, 0.8, "delta"),
            (1.0, 0.9, 0.8, 0.8, 0.8, 0.8, "delta"),
            (0.7, 0.5, 0.8, 0.8, 0.8, 0.8, "alpha"),
            (0.7, 1.1, 0.8, 0.8, 0.8, 0.8, "alpha"),
            (0.7, 0.9, 0.0, 0.8, 0.8, 0.8, "tau_maj"),
            (0.7, 0.9, 0.8, 1.5, 0.8, 0.8, "tau_min"),
            (0.7, 0.9, 0.8, 0.8, 0.3, 0.8, "psi_maj"),
            (0.7, 0.9, 0.8, 0.8, 0.8, 1.0, "psi_min"),
            (f64::NAN, 0.9, 0.8, 0.8, 0.8, 0.8, "delta"),
        ] {
            let err = NetworkParams::new(d, a, tm, tn, pm, pn).unwrap_err();
            match err {
                Error::InvalidParameter { field: f, .. } => assert_eq!(f, field),
                other => panic!("unexpected error: {other}"),
            }
        }
    }

    #[test]
    fn params_admit_closed_boundary() {
        // alpha = 1 (calibration) and tau = 1 (worked example) are allowed.
        NetworkParams::new(0.7, 1.0, 1.0, 1.0, 0.5, 0.5).unwrap();
    }

    #[test]
    fn homophily_share_worked_example() {
        // Two majority workers, one minority worker, psi = 2/3.
        let phi = homophily_share(2.0 / 3.0, 2.0 / 3.0).unwrap();
        assert!(close(phi, 0.8, 1e-12));
    }

    #[test]
    fn homophily_share_calibration_minority() {
        let phi = homophily_share(0.30, 0.83).unwrap();
        assert!(close(phi, 0.68, 0.005));
    }

    #[test]
    fn homophily_share_no_bias_is_population_share() {
        let phi = homophily_share(0.4, 0.5).unwrap();
        assert!(close(phi, 0.4, 1e-15));
    }

    #[test]
    fn homophily_share_rejects_heterophily() {
        assert!(homophily_share(0.4, 0.3).is_err());
        assert!(homophily_share(0.0, 0.8).is_err());
    }

    #[test]
    fn homophily_bias_examples() {
        assert!(close(homophily_bias(2.0 / 3.0, 0.8).unwrap(), 2.0 / 3.0, 1e-12));
        assert!(close(homophily_bias(0.30, 0.68).unwrap(), 0.83, 0.01));
        assert!(close(homophily_bias(0.5, 0.5).unwrap(), 0.5, 1e-15));
    }

    #[test]
    fn homophily_bias_rejects_heterophily() {
        // phi below the population share would require psi < 1/2.
        assert!(homophily_bias(0.6, 0.5).is_err());
    }

    #[test]
    fn derived_rates_calibration() {
        let rates = derived_rates(&calibration_params());
        assert!(close(rates.e.h_maj, 0.732, 0.001));
        assert!(close(rates.e.h_min, 0.901, 0.001));
        assert_eq!(rates.e.l_maj, 1.0);
        assert_eq!(rates.e.l_min, 1.0);
    }

    #[test]
    fn low_ability_rates_vanish_at_full_sorting() {
        let rates = derived_rates(&calibration_params());
        assert_eq!(rates.p.l_maj, 0.0);
        assert_eq!(rates.p.l_min, 0.0);
    }

    #[test]
    fn no_type_bias_gives_proportional_offer_rates() {
        let params = NetworkParams::new(0.7, 0.8, 0.6, 0.6, 0.5, 0.5).unwrap();
        let rates = derived_rates(&params);
        let share = rates.p.h_maj / (rates.p.h_maj + rates.p.h_min);
        assert!(close(share, 0.7, 1e-12));
    }

    #[test]
    fn offer_mass_conservation() {
        let params = NetworkParams::new(0.72, 0.81, 0.37, 0.55, 0.66, 0.91).unwrap();
        let rates = derived_rates(&params);
        let mass = params.delta() * params.tau_maj() + (1.0 - params.delta()) * params.tau_min();
        assert!(close(rates.p.h_maj + rates.p.h_min, params.alpha() * mass, 1e-14));
        assert!(close(
            rates.p.l_maj + rates.p.l_min,
            (1.0 - params.alpha()) * mass,
            1e-14
        ));
    }

    #[test]
    fn offer_shares_worked_example() {
        let params =
            NetworkParams::new(2.0 / 3.0, 0.9, 1.0, 1.0, 2.0 / 3.0, 2.0 / 3.0).unwrap();
        let (maj, min) = referral_offer_shares(&params);
        assert!(close(maj, 0.7, 1e-12));
        assert!(close(min, 0.3, 1e-12));
    }

    #[test]
    fn offer_shares_no_bias_proportional() {
        let params = NetworkParams::new(0.64, 0.8, 0.7, 0.7, 0.5, 0.5).unwrap();
        let (maj, min) = referral_offer_shares(&params);
        assert!(close(maj, 0.64, 1e-12));
        assert!(close(min, 0.36, 1e-12));
    }

    #[test]
    fn offer_shares_equal_magnitude_disadvantage_minority() {
        let params = NetworkParams::equal_magnitude(0.6, 0.8, 0.8, 0.8).unwrap();
        let (_, min) = referral_offer_shares(&params);
        assert!(min < 0.4);
    }

    #[test]
    fn equal_group_share_is_linear_in_psi() {
        // At w = 1/2 the transform collapses to the identity in psi.
        for i in 0..50 {
            let psi = 0.5 + 0.4999 * i as f64 / 49.0;
            assert!(close(homophily_share(0.5, psi).unwrap(), psi, 1e-14));
        }
    }

    #[test]
    fn amplification_relative_to_linear_scaling() {
        // For a large group the curve lies above the line from (0.5, w) to
        // (1, 1); for a small group it lies below.
        for i in 1..20 {
            let psi = 0.5 + 0.5 * i as f64 / 20.0;
            let linear = |w: f64| w + (1.0 - w) * (psi - 0.5) / 0.5;
            assert!(homophily_share(0.8, psi).unwrap() > linear(0.8));
            assert!(homophily_share(0.2, psi).unwrap() < linear(0.2));
        }
    }
}
