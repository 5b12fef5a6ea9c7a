//! Finite-depth estimators of Diophantine exponents.
//!
//! Ordinary (liminf-type) exponents are estimated by the window maximum of local exponents
//! at the right values of the jumps. Uniform (limsup-type) exponents are estimated by the
//! window minimum of local exponents at the left limits `f(t_k -)`, which is where
//! `t^γ f(t)` peaks for a non-increasing step function.

use alloc::vec::Vec;
use core::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::cf::{convergents, qnorm_rows, PartialQuotients};
use crate::error::{Error, Result};
use crate::measure::{min_step, psi_step, upsilon_step, StepFunction};
use crate::numeric::{ln_abs, ln_ratio};

/// The six exponents the crate estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExponentKind {
    /// `ω(θ)`
    Omega,
    /// `ω̄(θ)`, from `υ_θ`
    OmegaBar,
    /// `ϖ_ψ(θ, η)`, from `min(ψ_θ, ψ_η)`
    VarpiPsi,
    /// `ϖ_υ(θ, η)`, from `min(υ_θ, υ_η)`
    VarpiUpsilon,
    /// `ω_Λ`
    OmegaLattice,
    /// `ω̄_Λ`
    OmegaBarLattice,
}

impl ExponentKind {
    /// Ordinary kinds are liminf-type and take the window maximum.
    pub fn is_ordinary(self) -> bool {
        matches!(self, Self::Omega | Self::OmegaLattice)
    }

    /// `1` for the kinds defined through `t^(γ-1)`, otherwise `0`.
    pub fn shift(self) -> f64 {
        match self {
            Self::OmegaBar | Self::VarpiUpsilon => 1.0,
            _ => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Omega => "omega",
            Self::OmegaBar => "omega_bar",
            Self::VarpiPsi => "varpi_psi",
            Self::VarpiUpsilon => "varpi_upsilon",
            Self::OmegaLattice => "omega_lattice",
            Self::OmegaBarLattice => "omega_bar_lattice",
        }
    }
}

/// Which samples an estimate uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// Drop `head` samples at the start and `tail` at the end.
    Trim { head: usize, tail: usize },
    /// Explicit sample index range `start..end`.
    Span { start: usize, end: usize },
}

impl Default for Window {
    fn default() -> Self {
        Window::Trim { head: 3, tail: 2 }
    }
}

impl Window {
    pub fn all() -> Self {
        Window::Trim { head: 0, tail: 0 }
    }

    /// Index range into a sample list of length `len`; may be empty.
    pub fn resolve(&self, len: usize) -> Range<usize> {
        match *self {
            Window::Trim { head, tail } => {
                let end = len.saturating_sub(tail);
                head.min(end)..end
            }
            Window::Span { start, end } => {
                let end = end.min(len);
                start.min(end)..end
            }
        }
    }
}

/// One local exponent: the value of `-ln f / ln t` (plus the kind's shift) at `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: BigRational,
    pub ln_t: f64,
    pub local: f64,
}

/// A finite-depth estimate together with every candidate sample and the window used.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentEstimate {
    pub kind: ExponentKind,
    pub value: f64,
    pub window: Range<usize>,
    pub samples: Vec<Sample>,
}

impl ExponentEstimate {
    /// Builds the estimate from candidate samples: window max for ordinary kinds,
    /// window min for uniform kinds.
    pub fn from_samples(kind: ExponentKind, samples: Vec<Sample>, window: Window, min_len: usize) -> Result<Self> {
        let range = window.resolve(samples.len());
        if range.len() < min_len {
            return Err(Error::WindowTooSmall { required: min_len, actual: range.len() });
        }
        let locals = samples[range.clone()].iter().map(|s| s.local);
        let value = if kind.is_ordinary() {
            locals.fold(f64::NEG_INFINITY, f64::max)
        } else {
            locals.fold(f64::INFINITY, f64::min)
        };
        Ok(Self { kind, value, window: range, samples })
    }

    pub fn windowed(&self) -> &[Sample] {
        &self.samples[self.window.clone()]
    }
}

/// Local exponents `-ln ‖q_ν θ‖ / ln q_ν` for `1 <= ν <= N-2`, `q_ν > 1`.
pub fn ordinary_samples(pq: &PartialQuotients) -> Result<Vec<Sample>> {
    let n = pq.depth();
    if n < 3 {
        return Err(Error::PrefixTooShort { required: 3, actual: n });
    }
    let conv = convergents(pq);
    let one = BigInt::one();
    Ok(qnorm_rows(&conv)
        .into_iter()
        .filter(|row| row.index >= 1 && row.index + 2 <= n && row.q > one)
        .map(|row| {
            let ln_t = ln_abs(&row.q);
            Sample { local: -ln_ratio(&row.value) / ln_t, ln_t, t: BigRational::from(row.q) }
        })
        .collect())
}

/// Estimate of `ω(θ)`: window maximum of `-ln ‖q_ν θ‖ / ln q_ν`.
pub fn ordinary_exponent(pq: &PartialQuotients, window: Window) -> Result<ExponentEstimate> {
    ExponentEstimate::from_samples(ExponentKind::Omega, ordinary_samples(pq)?, window, 1)
}

/// Samples `-ln f(t_k -) / ln t_k + shift` at every breakpoint after the first.
pub fn uniform_samples(f: &StepFunction, kind: ExponentKind) -> Vec<Sample> {
    let shift = kind.shift();
    (1..f.len())
        .map(|k| {
            let t = &f.breakpoints()[k];
            let left = f.left_limit_at(k).expect("k >= 1");
            let ln_t = ln_abs(t);
            Sample { local: shift - ln_ratio(left) / ln_t, ln_t, t: BigRational::from(t.clone()) }
        })
        .collect()
}

/// Estimate of a uniform exponent (`ω̄`, `ϖ_ψ` or `ϖ_υ`) from the matching step function.
pub fn uniform_exponent(f: &StepFunction, kind: ExponentKind, window: Window) -> Result<ExponentEstimate> {
    if kind.is_ordinary() {
        return Err(Error::OutOfRange(alloc::format!("{} is not a uniform exponent", kind.name())));
    }
    ExponentEstimate::from_samples(kind, uniform_samples(f, kind), window, 3)
}

/// Tolerances for the ordering flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// For relations that hold exactly on finite data.
    pub exact: f64,
    /// For relations that only hold asymptotically.
    pub asymptotic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { exact: 1e-9, asymptotic: 0.05 }
    }
}

/// Ordering relations between the exponents of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    /// `ω(θ) >= 1`
    OmegaThetaAtLeastOne,
    /// `ω(η) >= 1`
    OmegaEtaAtLeastOne,
    /// `ω(θ) >= ω̄(θ)`
    OrdinaryDominatesUniformTheta,
    /// `ω(η) >= ω̄(η)`
    OrdinaryDominatesUniformEta,
    /// `ϖ_ψ >= 1`
    VarpiPsiAtLeastOne,
    /// `ϖ_ψ <= ϖ_υ`
    VarpiPsiBelowVarpiUpsilon,
}

impl Relation {
    pub fn name(self) -> &'static str {
        match self {
            Self::OmegaThetaAtLeastOne => "omega_theta >= 1",
            Self::OmegaEtaAtLeastOne => "omega_eta >= 1",
            Self::OrdinaryDominatesUniformTheta => "omega_theta >= omega_bar_theta",
            Self::OrdinaryDominatesUniformEta => "omega_eta >= omega_bar_eta",
            Self::VarpiPsiAtLeastOne => "varpi_psi >= 1",
            Self::VarpiPsiBelowVarpiUpsilon => "varpi_psi <= varpi_upsilon",
        }
    }
}

/// A violated ordering: `lhs >= rhs - tolerance` failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flag {
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
}

/// All number-side exponents of a pair plus any ordering violations.
///
/// Uniform estimates are `None` when the step function has too few jumps in the window
/// (for instance `υ_θ` of a number with bounded partial quotients is eventually constant).
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentReport {
    pub omega_theta: ExponentEstimate,
    pub omega_eta: ExponentEstimate,
    pub omega_bar_theta: Option<ExponentEstimate>,
    pub omega_bar_eta: Option<ExponentEstimate>,
    pub varpi_psi: Option<ExponentEstimate>,
    pub varpi_upsilon: Option<ExponentEstimate>,
    pub flags: Vec<Flag>,
}

fn optional(estimate: Result<ExponentEstimate>) -> Result<Option<ExponentEstimate>> {
    match estimate {
        Ok(e) => Ok(Some(e)),
        Err(Error::WindowTooSmall { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Estimates `ω`, `ω̄` of both numbers and `ϖ_ψ`, `ϖ_υ` of the pair, then checks the orderings.
pub fn exponent_report(
    theta: &PartialQuotients,
    eta: &PartialQuotients,
    window: Window,
    tol: Tolerances,
) -> Result<ExponentReport> {
    let omega_theta = ordinary_exponent(theta, window)?;
    let omega_eta = ordinary_exponent(eta, window)?;
    let ups_theta = upsilon_step(theta)?;
    let ups_eta = upsilon_step(eta)?;
    let omega_bar_theta = optional(uniform_exponent(&ups_theta, ExponentKind::OmegaBar, window))?;
    let omega_bar_eta = optional(uniform_exponent(&ups_eta, ExponentKind::OmegaBar, window))?;
    let psi_pair = min_step(&psi_step(theta)?, &psi_step(eta)?)?;
    let ups_pair = min_step(&ups_theta, &ups_eta)?;
    let varpi_psi = optional(uniform_exponent(&psi_pair, ExponentKind::VarpiPsi, window))?;
    let varpi_upsilon = optional(uniform_exponent(&ups_pair, ExponentKind::VarpiUpsilon, window))?;

    let value = |e: &Option<ExponentEstimate>| e.as_ref().map(|e| e.value);
    let checks = [
        (Relation::OmegaThetaAtLeastOne, Some(omega_theta.value), Some(1.0), tol.exact),
        (Relation::OmegaEtaAtLeastOne, Some(omega_eta.value), Some(1.0), tol.exact),
        (Relation::OrdinaryDominatesUniformTheta, Some(omega_theta.value), value(&omega_bar_theta), tol.asymptotic),
        (Relation::OrdinaryDominatesUniformEta, Some(omega_eta.value), value(&omega_bar_eta), tol.asymptotic),
        (Relation::VarpiPsiAtLeastOne, value(&varpi_psi), Some(1.0), tol.asymptotic),
        (Relation::VarpiPsiBelowVarpiUpsilon, value(&varpi_upsilon), value(&varpi_psi), tol.asymptotic),
    ];
    let flags = checks
        .into_iter()
        .filter_map(|(relation, lhs, rhs, tolerance)| Some((relation, lhs?, rhs?, tolerance)))
        .filter(|&(_, lhs, rhs, tolerance)| !(lhs >= rhs - tolerance))
        .map(|(relation, lhs, rhs, tolerance)| Flag { relation, lhs, rhs, tolerance })
        .collect();

    Ok(ExponentReport { omega_theta, omega_eta, omega_bar_theta, omega_bar_eta, varpi_psi, varpi_upsilon, flags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use num_traits::Float;

    #[test]
    fn window_resolution() {
        assert_eq!(Window::default().resolve(10), 3..8);
        assert_eq!(Window::default().resolve(4), 2..2);
        assert_eq!(Window::default().resolve(1), 0..0);
        assert_eq!(Window::Span { start: 2, end: 50 }.resolve(10), 2..10);
        assert_eq!(Window::all().resolve(7), 0..7);
    }

    #[test]
    fn golden_prefix_has_exponent_one() {
        // ‖q_ν φ‖ ≈ 1/(√5 q_ν), so local exponents sit at 1 + ln√5 / ln q_ν and decay to 1
        let pq = PartialQuotients::from_i64(0, &[1; 30]).unwrap();
        let est = ordinary_exponent(&pq, Window::default()).unwrap();
        assert!(est.value >= 1.0 && est.value < 1.5, "{}", est.value);
        for s in est.windowed() {
            let predicted = 1.0 + Float::ln(Float::sqrt(5f64)) / s.ln_t;
            assert!((s.local - predicted).abs() < 5e-3, "{} vs {predicted}", s.local);
        }
        let deep = PartialQuotients::from_i64(0, &[1; 60]).unwrap();
        let late = ordinary_exponent(&deep, Window::Trim { head: 40, tail: 2 }).unwrap();
        assert!((late.value - 1.0).abs() < 0.05, "{}", late.value);
    }

    #[test]
    fn huge_quotient_sample_tracks_log_ratio() {
        let pq = PartialQuotients::from_i64(0, &[1, 1, 1_000_000, 1, 1]).unwrap();
        let est = ordinary_exponent(&pq, Window::all()).unwrap();
        // ν = 2: q_2 = 2, q_3 = 2_000_001
        let s = est.samples.iter().find(|s| s.t == BigRational::from(BigInt::from(2))).unwrap();
        let ratio = Float::ln(2_000_001f64) / Float::ln(2f64);
        assert!((s.local - ratio).abs() < 1.0 / Float::ln(2f64), "{} vs {}", s.local, ratio);
        assert_eq!(est.value, s.local);
    }

    #[test]
    fn synthetic_power_law_is_recovered() {
        // values t_k^(-c) at t_k = 2^k, read as left limits at t_{k+1}
        let c = 3u32;
        let bps: Vec<BigInt> = (1..12u32).map(|k| BigInt::from(2u64.pow(k))).collect();
        let vals: Vec<BigRational> =
            bps.iter().map(|t| BigRational::new(BigInt::one(), t.pow(c))).collect();
        let end = BigInt::from(2u64.pow(12));
        let f = StepFunction::new(bps, vals, end).unwrap();
        // left limit at t_{k+1} = 2 t_k is t_k^-c, so local = c (k/(k+1)); use the exact value
        let est = uniform_exponent(&f, ExponentKind::VarpiPsi, Window::all()).unwrap();
        let last = est.samples.last().unwrap();
        assert!((last.local - 3.0 * 10.0 / 11.0).abs() < 1e-12);

        // with values t_{k+1}^(-c) the recovered exponent is exactly c
        let bps: Vec<BigInt> = (1..12u32).map(|k| BigInt::from(2u64.pow(k))).collect();
        let vals: Vec<BigRational> =
            bps.iter().map(|t| BigRational::new(BigInt::one(), (t * BigInt::from(2)).pow(c))).collect();
        let f = StepFunction::new(bps, vals, BigInt::from(2u64.pow(12))).unwrap();
        let est = uniform_exponent(&f, ExponentKind::VarpiPsi, Window::all()).unwrap();
        assert!((est.value - 3.0).abs() < 1e-12);
        let est = uniform_exponent(&f, ExponentKind::VarpiUpsilon, Window::all()).unwrap();
        assert!((est.value - 4.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_needs_three_samples() {
        let f = StepFunction::new(
            vec![BigInt::from(1), BigInt::from(2), BigInt::from(4)],
            vec![BigRational::one(), BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 8.into())],
            BigInt::from(9),
        )
        .unwrap();
        assert_eq!(
            uniform_exponent(&f, ExponentKind::OmegaBar, Window::all()),
            Err(Error::WindowTooSmall { required: 3, actual: 2 })
        );
        assert!(uniform_exponent(&f, ExponentKind::Omega, Window::all()).is_err());
    }

    #[test]
    fn bounded_quotient_pair_is_consistent() {
        let theta = PartialQuotients::from_i64(0, &[1; 40]).unwrap();
        let mut tail = vec![2i64];
        tail.extend([1i64; 39]);
        let eta = PartialQuotients::from_i64(0, &tail).unwrap();
        let report = exponent_report(&theta, &eta, Window::default(), Tolerances::default()).unwrap();
        assert!(report.flags.is_empty(), "{:?}", report.flags);
        for e in [&report.omega_theta, &report.omega_eta] {
            assert!(e.value >= 1.0 && e.value < 1.5, "{}", e.value);
        }
        // υ of a bounded-quotient number is eventually constant: too few jumps to estimate
        assert!(report.omega_bar_theta.is_none());
        let psi = report.varpi_psi.expect("ψ jumps at every denominator");
        assert!((psi.value - 1.0).abs() < 0.2, "{}", psi.value);
    }
}
