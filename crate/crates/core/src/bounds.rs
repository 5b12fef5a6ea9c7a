//! Bound polynomials `G_y`, `𝒢_y`, their roots, and the theorem checks.

use core::fmt;

use num_traits::Float;

use crate::error::{Error, Result};

/// `G_y(x) = x² - (y² - 2y + 3) x + 1`.
pub fn g_poly(y: f64, x: f64) -> f64 {
    x * x - (y * y - 2.0 * y + 3.0) * x + 1.0
}

/// `𝒢_y(x) = x² - 2 y x - 1`.
pub fn big_g_poly(y: f64, x: f64) -> f64 {
    x * x - 2.0 * y * x - 1.0
}

/// Largest root `𝔤_y` of `G_y`, `y > 1`.
///
/// With `d = y - 1` the middle coefficient is `d² + 2` and the discriminant factors as
/// `d² (d² + 4)`, which keeps the root accurate as `y -> 1`.
pub fn g_frak(y: f64) -> Result<f64> {
    if !(y > 1.0) || !y.is_finite() {
        return Err(Error::OutOfRange(alloc::format!("g_frak needs y > 1, got {y}")));
    }
    let d = y - 1.0;
    let d2 = d * d;
    Ok((d2 + 2.0 + d * Float::sqrt(d2 + 4.0)) / 2.0)
}

/// Positive root `𝔊_y = y + sqrt(y² + 1)` of `𝒢_y`, `y > 0`.
pub fn big_g_frak(y: f64) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::OutOfRange(alloc::format!("G_frak needs y > 0, got {y}")));
    }
    Ok(y + Float::hypot(y, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theorem {
    /// `ω(θ) >= 1 / (2 - ω̄(θ))`
    T1,
    /// `min(ω(θ), ω(η)) >= ϖ_ψ²` when `ϖ_ψ > 1`
    T2,
    /// `max(ω(θ), ω(η)) >= 𝔤_{ϖ_υ}` when `ϖ_υ > 1`
    T3,
    /// `ω_Λ >= 𝔊_{ω̄_Λ} ω̄_Λ`
    T4,
}

impl Theorem {
    pub fn name(self) -> &'static str {
        match self {
            Theorem::T1 => "T1",
            Theorem::T2 => "T2",
            Theorem::T3 => "T3",
            Theorem::T4 => "T4",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "T1" | "t1" => Some(Theorem::T1),
            "T2" | "t2" => Some(Theorem::T2),
            "T3" | "t3" => Some(Theorem::T3),
            "T4" | "t4" => Some(Theorem::T4),
            _ => None,
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exponent estimates consumed by [`check_theorem`]; missing ones are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Estimates {
    pub omega_theta: Option<f64>,
    pub omega_eta: Option<f64>,
    pub omega_bar_theta: Option<f64>,
    pub varpi_psi: Option<f64>,
    pub varpi_upsilon: Option<f64>,
    pub omega_lattice: Option<f64>,
    pub omega_bar_lattice: Option<f64>,
}

/// Settings for [`check_theorem`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub tolerance: f64,
    /// When `ω̄ >= 2` the T1 bound is infinite; `ω` must then exceed this value.
    pub infinite_threshold: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { tolerance: 0.05, infinite_threshold: 1e6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckStatus {
    Checked { lhs: f64, bound: f64, slack: f64, satisfied: bool },
    NotApplicable(&'static str),
}

/// One theorem evaluated on finite-depth estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub theorem: Theorem,
    pub inputs: Estimates,
    pub status: CheckStatus,
}

impl BoundCheck {
    pub fn satisfied(&self) -> Option<bool> {
        match self.status {
            CheckStatus::Checked { satisfied, .. } => Some(satisfied),
            CheckStatus::NotApplicable(_) => None,
        }
    }

    pub fn slack(&self) -> Option<f64> {
        match self.status {
            CheckStatus::Checked { slack, .. } => Some(slack),
            CheckStatus::NotApplicable(_) => None,
        }
    }
}

/// Evaluates one theorem; `satisfied = lhs >= bound - tolerance`, `slack = lhs - bound`.
pub fn check_theorem(which: Theorem, est: &Estimates, opts: CheckOptions) -> BoundCheck {
    let status = evaluate(which, est, opts);
    BoundCheck { theorem: which, inputs: *est, status }
}

fn checked(lhs: f64, bound: f64, tol: f64) -> CheckStatus {
    CheckStatus::Checked { lhs, bound, slack: lhs - bound, satisfied: lhs >= bound - tol }
}

fn evaluate(which: Theorem, est: &Estimates, opts: CheckOptions) -> CheckStatus {
    let tol = opts.tolerance;
    match which {
        Theorem::T1 => {
            let (Some(omega), Some(bar)) = (est.omega_theta, est.omega_bar_theta) else {
                return CheckStatus::NotApplicable("needs omega_theta and omega_bar_theta");
            };
            if bar >= 2.0 {
                return CheckStatus::Checked {
                    lhs: omega,
                    bound: f64::INFINITY,
                    slack: f64::NEG_INFINITY,
                    satisfied: omega > opts.infinite_threshold,
                };
            }
            checked(omega, 1.0 / (2.0 - bar), tol)
        }
        Theorem::T2 => {
            let (Some(a), Some(b), Some(varpi)) = (est.omega_theta, est.omega_eta, est.varpi_psi) else {
                return CheckStatus::NotApplicable("needs omega_theta, omega_eta and varpi_psi");
            };
            if !(varpi > 1.0) {
                return CheckStatus::NotApplicable("varpi_psi <= 1");
            }
            checked(a.min(b), varpi * varpi, tol)
        }
        Theorem::T3 => {
            let (Some(a), Some(b), Some(varpi)) = (est.omega_theta, est.omega_eta, est.varpi_upsilon) else {
                return CheckStatus::NotApplicable("needs omega_theta, omega_eta and varpi_upsilon");
            };
            match g_frak(varpi) {
                Ok(bound) => checked(a.max(b), bound, tol),
                Err(_) => CheckStatus::NotApplicable("varpi_upsilon <= 1"),
            }
        }
        Theorem::T4 => {
            let (Some(omega), Some(bar)) = (est.omega_lattice, est.omega_bar_lattice) else {
                return CheckStatus::NotApplicable("needs omega_lattice and omega_bar_lattice");
            };
            match big_g_frak(bar) {
                Ok(root) => checked(omega, root * bar, tol),
                Err(_) => CheckStatus::NotApplicable("omega_bar_lattice <= 0"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1.0)
    }

    #[test]
    fn g_frak_examples() {
        let golden_sq = (3.0 + Float::sqrt(5.0f64)) / 2.0;
        assert!(rel(g_frak(2.0).unwrap(), golden_sq) < 1e-15);
        let g = g_frak(1.5).unwrap();
        assert!((g - 1.640388203).abs() < 1e-9, "{g}");
        assert!(1.5 < g && g < 2.0);
        assert!(g_frak(1.0).is_err());
        assert!(g_frak(f64::NAN).is_err());
    }

    #[test]
    fn g_poly_identities() {
        for y in [1.1, 1.5, 1.9] {
            assert!(rel(g_poly(y, y), (1.0 - y).powi(3)) < 1e-12);
            let x = 1.0 / (2.0 - y);
            // (y-1)^3 / (2-y)^2 by direct expansion, positive on (1, 2)
            assert!(rel(g_poly(y, x), (y - 1.0).powi(3) / (2.0 - y).powi(2)) < 1e-12);
            assert!(g_poly(y, g_frak(y).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn big_g_frak_examples() {
        assert!(rel(big_g_frak(1.0).unwrap(), 1.0 + Float::sqrt(2.0f64)) < 1e-15);
        assert!((big_g_frak(1.5).unwrap() - 3.302775638).abs() < 1e-9);
        assert!((big_g_frak(1e-12).unwrap() - 1.0).abs() < 1e-11);
        assert!(big_g_frak(0.0).is_err());
        let r = big_g_frak(0.5).unwrap();
        assert!(big_g_poly(0.5, r).abs() < 1e-12 && r > 0.5);
    }

    #[test]
    fn theorem_one_equality_case() {
        let est = Estimates { omega_theta: Some(2.0), omega_bar_theta: Some(1.5), ..Default::default() };
        let check = check_theorem(Theorem::T1, &est, CheckOptions::default());
        assert_eq!(check.satisfied(), Some(true));
        assert!(check.slack().unwrap().abs() < 1e-12);
    }

    #[test]
    fn theorem_one_infinite_bound() {
        let opts = CheckOptions::default();
        let est = Estimates { omega_theta: Some(40.0), omega_bar_theta: Some(2.0), ..Default::default() };
        let check = check_theorem(Theorem::T1, &est, opts);
        assert_eq!(check.satisfied(), Some(false));
        let est = Estimates { omega_theta: Some(1e7), omega_bar_theta: Some(2.0), ..Default::default() };
        assert_eq!(check_theorem(Theorem::T1, &est, opts).satisfied(), Some(true));
    }

    #[test]
    fn theorem_two_and_three() {
        let est = Estimates {
            omega_theta: Some(1.69),
            omega_eta: Some(1.70),
            varpi_psi: Some(1.3),
            varpi_upsilon: Some(2.0),
            ..Default::default()
        };
        let t2 = check_theorem(Theorem::T2, &est, CheckOptions::default());
        assert_eq!(t2.satisfied(), Some(true));
        assert!(t2.slack().unwrap().abs() < 1e-12);
        let t3 = check_theorem(Theorem::T3, &est, CheckOptions::default());
        // max ω = 1.70 is far below 𝔤_2 = 2.618
        assert_eq!(t3.satisfied(), Some(false));
    }

    #[test]
    fn ineligible_inputs_are_not_failures() {
        let est = Estimates { omega_theta: Some(1.0), omega_eta: Some(1.0), varpi_psi: Some(1.0), ..Default::default() };
        let check = check_theorem(Theorem::T2, &est, CheckOptions::default());
        assert_eq!(check.status, CheckStatus::NotApplicable("varpi_psi <= 1"));
        assert_eq!(check.satisfied(), None);
        let check = check_theorem(Theorem::T4, &Estimates::default(), CheckOptions::default());
        assert!(matches!(check.status, CheckStatus::NotApplicable(_)));
    }

    #[test]
    fn theorem_four_reduces_to_theorem_three() {
        // ω_Λ = (ω - 1)/2, ω̄_Λ = (ϖ_υ - 1)/2 turns G_{ϖ}(2ω_Λ + 1) = 0 into 𝒢_{ω̄_Λ}(ω_Λ/ω̄_Λ) = 0
        for varpi in [1.2, 1.5, 2.0, 3.7] {
            let omega = g_frak(varpi).unwrap();
            let lattice = (omega - 1.0) / 2.0;
            let bar = (varpi - 1.0) / 2.0;
            assert!(rel(lattice, big_g_frak(bar).unwrap() * bar) < 1e-12, "varpi {varpi}");
        }
    }
}
