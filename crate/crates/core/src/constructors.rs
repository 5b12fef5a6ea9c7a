//! Continued-fraction prefixes with prescribed exponents.
//!
//! Asymptotic conditions such as `a_{ν+1} ≍ q_ν^e` are realised by rounding exact integer
//! roots: `γ` is rational, so `q^(u/v)` is the rounded `v`-th root of `q^u`.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, One, Signed};

use crate::cf::{convergents, PartialQuotients};
use crate::error::{Error, Result};
use crate::numeric::{decimal_digits, ratio_to_f64, round_pow_at_least_one, round_ratio, SmallExponent};

/// Default cap on the decimal digits of any generated denominator.
pub const DEFAULT_DIGIT_GUARD: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// One number with `ω = 1/(2-γ)` and `ω̄ = γ`, `1 < γ < 2`.
    Thm1,
    /// A pair with `ω(θ) = ω(η) = γ²` and `ϖ_ψ = γ`, `γ > 1`.
    Thm2,
    /// A pair with `ω(θ) = ω(η) = g(γ)` and `ϖ_υ = γ + 1`, `γ > 0`.
    Thm3,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Thm1 => "thm1",
            Scheme::Thm2 => "thm2",
            Scheme::Thm3 => "thm3",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "thm1" => Some(Scheme::Thm1),
            "thm2" => Some(Scheme::Thm2),
            "thm3" => Some(Scheme::Thm3),
            _ => None,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything needed to reproduce a construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionSpec {
    pub scheme: Scheme,
    pub gamma: BigRational,
    pub depth: usize,
    /// Seed for θ (q-side); `None` selects the default.
    pub theta_seed: Option<PartialQuotients>,
    /// Seed for η (s-side) in the pair schemes; `None` selects the default.
    pub eta_seed: Option<PartialQuotients>,
    pub digit_guard: u64,
}

impl ConstructionSpec {
    pub fn new(scheme: Scheme, gamma: BigRational, depth: usize) -> Self {
        Self { scheme, gamma, depth, theta_seed: None, eta_seed: None, digit_guard: DEFAULT_DIGIT_GUARD }
    }
}

/// Output of a construction: one number or an interleaved pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Construction {
    Single(PartialQuotients),
    Pair { theta: PartialQuotients, eta: PartialQuotients },
}

pub fn construct(spec: &ConstructionSpec) -> Result<Construction> {
    match spec.scheme {
        Scheme::Thm1 => {
            construct_thm1(&spec.gamma, spec.depth, spec.theta_seed.as_ref(), spec.digit_guard).map(Construction::Single)
        }
        Scheme::Thm2 | Scheme::Thm3 => {
            let seeds = match (&spec.theta_seed, &spec.eta_seed) {
                (Some(t), Some(e)) => Some((t, e)),
                (None, None) => None,
                _ => return Err(Error::OutOfRange("pair schemes need both seeds or neither".into())),
            };
            let f = if spec.scheme == Scheme::Thm2 { construct_thm2 } else { construct_thm3 };
            f(&spec.gamma, spec.depth, seeds, spec.digit_guard).map(|(theta, eta)| Construction::Pair { theta, eta })
        }
    }
}

fn check_depth(depth: usize) -> Result<()> {
    if depth < 3 {
        return Err(Error::OutOfRange(alloc::format!("depth {depth} < 3")));
    }
    Ok(())
}

fn guard(q: &BigInt, limit: u64) -> Result<()> {
    if decimal_digits(q.magnitude()) > limit {
        return Err(Error::DigitGuard { limit });
    }
    Ok(())
}

fn biguint(x: &BigInt) -> BigUint {
    x.magnitude().clone()
}

fn int(x: BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, x)
}

/// Theorem-1 extremal number: `a_{ν+1} = max(1, round(q_ν^((γ-1)/(2-γ))))`, `1 < γ < 2`.
///
/// Default seed `[0; 1]`.
pub fn construct_thm1(
    gamma: &BigRational,
    depth: usize,
    seed: Option<&PartialQuotients>,
    digit_guard: u64,
) -> Result<PartialQuotients> {
    check_depth(depth)?;
    let one = BigRational::one();
    let two = &one + &one;
    if gamma <= &one || gamma >= &two {
        return Err(Error::OutOfRange(alloc::format!("thm1 needs 1 < gamma < 2, got {gamma}")));
    }
    let exp = SmallExponent::from_ratio(&((gamma - &one) / (&two - gamma)))?;
    let seed = match seed {
        Some(s) => s.clone(),
        None => PartialQuotients::from_i64(0, &[1])?,
    };
    let conv = convergents(&seed);
    let mut tail = seed.tail().to_vec();
    tail.truncate(depth);
    let n = conv.len();
    let mut q_prev = if n >= 2 { conv[n - 2].q.clone() } else { BigInt::from(0) };
    let mut q = conv[n - 1].q.clone();
    while tail.len() < depth {
        let a = int(round_pow_at_least_one(&biguint(&q), exp));
        let q_next = &a * &q + &q_prev;
        guard(&q_next, digit_guard)?;
        tail.push(a);
        q_prev = core::mem::replace(&mut q, q_next);
    }
    PartialQuotients::new(seed.a0().clone(), tail)
}

/// Running denominators of one continued fraction under construction.
struct Growing {
    a0: BigInt,
    tail: Vec<BigInt>,
    /// `q_0, q_1, ...`
    q: Vec<BigInt>,
}

impl Growing {
    fn from_seed(seed: &PartialQuotients) -> Self {
        let q = convergents(seed).into_iter().map(|c| c.q).collect();
        Self { a0: seed.a0().clone(), tail: seed.tail().to_vec(), q }
    }

    fn push(&mut self, a: BigInt) {
        let n = self.q.len();
        let next = &a * &self.q[n - 1] + &self.q[n - 2];
        self.q.push(next);
        self.tail.push(a);
    }

    fn last(&self) -> &BigInt {
        &self.q[self.q.len() - 1]
    }

    fn before_last(&self) -> &BigInt {
        &self.q[self.q.len() - 2]
    }

    fn finish(mut self, depth: usize) -> Result<PartialQuotients> {
        self.tail.truncate(depth);
        PartialQuotients::new(self.a0, self.tail)
    }
}

fn pair_seeds(seeds: Option<(&PartialQuotients, &PartialQuotients)>) -> Result<(Growing, Growing)> {
    let (theta, eta) = match seeds {
        Some((t, e)) => (t.clone(), e.clone()),
        None => (PartialQuotients::from_i64(0, &[3])?, PartialQuotients::from_i64(0, &[2])?),
    };
    if theta.depth() != eta.depth() {
        return Err(Error::OutOfRange("theta and eta seeds must have equal depth".into()));
    }
    let mut q = Growing::from_seed(&theta);
    let s = Growing::from_seed(&eta);
    // repair s_1 < q_1 by raising a_1
    if q.q[1] <= s.q[1] {
        q.tail[0] = &s.q[1] + 1u32;
        let repaired = PartialQuotients::new(q.a0.clone(), q.tail.clone())?;
        q = Growing::from_seed(&repaired);
    }
    Ok((q, s))
}

/// Smallest quotient `x` with `x · last + before_last > bound`; keeps the pair interleaved
/// while the denominators are still small.
fn overtake(g: &Growing, bound: &BigInt) -> BigInt {
    (bound - g.before_last()).div_floor(g.last()) + 1u32
}

/// Verifies `s_1 < q_1 < s_2 < q_2 < ...` over the first `depth` indices.
fn check_interleaving(q: &[BigInt], s: &[BigInt], depth: usize) -> Result<()> {
    for nu in 1..=depth {
        if s[nu] >= q[nu] {
            return Err(Error::Interleaving { index: nu });
        }
        if nu < depth && q[nu] >= s[nu + 1] {
            return Err(Error::Interleaving { index: nu });
        }
    }
    Ok(())
}

fn construct_pair(
    depth: usize,
    seeds: Option<(&PartialQuotients, &PartialQuotients)>,
    digit_guard: u64,
    mut step: impl FnMut(&mut Growing, &mut Growing) -> Result<()>,
) -> Result<(PartialQuotients, PartialQuotients)> {
    check_depth(depth)?;
    let (mut q, mut s) = pair_seeds(seeds)?;
    while q.tail.len() < depth {
        step(&mut q, &mut s)?;
        guard(q.last(), digit_guard)?;
        guard(s.last(), digit_guard)?;
    }
    check_interleaving(&q.q, &s.q, depth)?;
    Ok((q.finish(depth)?, s.finish(depth)?))
}

/// Theorem-2 extremal pair: `s_{ν+1} ≈ q_ν^γ`, `q_{ν+1} ≈ s_{ν+1}^γ`, `γ > 1`.
///
/// Returns `(θ, η)` with denominators `q_ν` for θ and `s_ν` for η. Default seeds
/// `θ = [0; 3]`, `η = [0; 2]`.
pub fn construct_thm2(
    gamma: &BigRational,
    depth: usize,
    seeds: Option<(&PartialQuotients, &PartialQuotients)>,
    digit_guard: u64,
) -> Result<(PartialQuotients, PartialQuotients)> {
    if gamma <= &BigRational::one() {
        return Err(Error::OutOfRange(alloc::format!("thm2 needs gamma > 1, got {gamma}")));
    }
    let exp = SmallExponent::from_ratio(gamma)?;
    // x = max(1, round((round(target^γ) - prev) / last))
    let quotient = |target: &BigInt, prev: &BigInt, last: &BigInt| {
        let goal = int(round_pow_at_least_one(&biguint(target), exp));
        let x = round_ratio(&BigRational::new(goal - prev, last.clone()));
        if x.is_positive() {
            x
        } else {
            BigInt::one()
        }
    };
    construct_pair(depth, seeds, digit_guard, |q, s| {
        let b = quotient(q.last(), s.before_last(), s.last()).max(overtake(s, q.last()));
        s.push(b);
        let a = quotient(s.last(), q.before_last(), q.last()).max(overtake(q, s.last()));
        q.push(a);
        Ok(())
    })
}

/// Theorem-3 extremal pair: `b_{ν+1} = round(q_ν^γ)`, `a_{ν+1} = round(s_{ν+1}^γ)`, `γ > 0`.
pub fn construct_thm3(
    gamma: &BigRational,
    depth: usize,
    seeds: Option<(&PartialQuotients, &PartialQuotients)>,
    digit_guard: u64,
) -> Result<(PartialQuotients, PartialQuotients)> {
    if !gamma.is_positive() {
        return Err(Error::OutOfRange(alloc::format!("thm3 needs gamma > 0, got {gamma}")));
    }
    let exp = SmallExponent::from_ratio(gamma)?;
    construct_pair(depth, seeds, digit_guard, |q, s| {
        let b = int(round_pow_at_least_one(&biguint(q.last()), exp)).max(overtake(s, q.last()));
        s.push(b);
        let a = int(round_pow_at_least_one(&biguint(s.last()), exp)).max(overtake(q, s.last()));
        q.push(a);
        Ok(())
    })
}

/// Largest root of `x² - (γ² + 2) x + 1`, the common growth rate of `ln q_ν` and `ln s_ν`
/// in the Theorem-3 construction.
pub fn growth_rate_thm3(gamma: f64) -> f64 {
    (gamma * gamma + 2.0 + gamma * Float::sqrt(gamma * gamma + 4.0)) / 2.0
}

/// Targets `(ω(θ), ω(η), uniform exponent)` predicted for a construction.
pub fn predicted_targets(scheme: Scheme, gamma: &BigRational) -> (f64, f64) {
    let g = ratio_to_f64(gamma);
    match scheme {
        Scheme::Thm1 => (1.0 / (2.0 - g), g),
        Scheme::Thm2 => (g * g, g),
        Scheme::Thm3 => (growth_rate_thm3(g), g + 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ln_abs;
    use alloc::vec;

    fn gamma(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn denominators(pq: &PartialQuotients) -> Vec<BigInt> {
        convergents(pq).into_iter().map(|c| c.q).collect()
    }

    #[test]
    fn thm1_three_halves_denominators() {
        let pq = construct_thm1(&gamma(3, 2), 5, None, DEFAULT_DIGIT_GUARD).unwrap();
        let q: Vec<BigInt> = [1, 1, 2, 5, 27, 734].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(denominators(&pq), q);
        assert_eq!(pq.depth(), 5);
    }

    #[test]
    fn thm1_log_ratio_converges() {
        let pq = construct_thm1(&gamma(3, 2), 12, None, DEFAULT_DIGIT_GUARD).unwrap();
        let q = denominators(&pq);
        for nu in 6..12 {
            let ratio = ln_abs(&q[nu + 1]) / ln_abs(&q[nu]);
            assert!((ratio - 2.0).abs() / 2.0 < 0.05, "ν={nu}: {ratio}");
        }
    }

    #[test]
    fn thm1_near_one_is_golden_like() {
        let pq = construct_thm1(&gamma(1001, 1000), 20, None, DEFAULT_DIGIT_GUARD).unwrap();
        assert!(pq.tail().iter().all(|a| a == &BigInt::one()));
    }

    #[test]
    fn thm1_rejects_gamma_outside_unit_interval() {
        assert!(construct_thm1(&gamma(1, 1), 5, None, DEFAULT_DIGIT_GUARD).is_err());
        assert!(construct_thm1(&gamma(2, 1), 5, None, DEFAULT_DIGIT_GUARD).is_err());
        assert!(construct_thm1(&gamma(3, 2), 2, None, DEFAULT_DIGIT_GUARD).is_err());
    }

    #[test]
    fn digit_guard_trips() {
        assert_eq!(
            construct_thm1(&gamma(3, 2), 14, None, 50),
            Err(Error::DigitGuard { limit: 50 })
        );
    }

    #[test]
    fn thm2_growth_and_interleaving() {
        let (theta, eta) = construct_thm2(&gamma(13, 10), 20, None, DEFAULT_DIGIT_GUARD).unwrap();
        let q = denominators(&theta);
        let s = denominators(&eta);
        check_interleaving(&q, &s, 20).unwrap();
        for nu in 6..20 {
            let ratio = ln_abs(&q[nu + 1]) / ln_abs(&q[nu]);
            assert!((ratio - 1.69).abs() / 1.69 < 0.05, "ν={nu}: {ratio}");
        }
    }

    #[test]
    fn thm3_log_vector_recurrence() {
        let (theta, eta) = construct_thm3(&gamma(1, 1), 10, None, DEFAULT_DIGIT_GUARD).unwrap();
        let q = denominators(&theta);
        let s = denominators(&eta);
        check_interleaving(&q, &s, 10).unwrap();
        // (ln q', ln s') = [[2, 1], [1, 1]] (ln q, ln s) + O(1) at γ = 1
        let mut residuals = vec![];
        for nu in 2..10 {
            let (lq, ls) = (ln_abs(&q[nu]), ln_abs(&s[nu]));
            let pred_q = 2.0 * lq + ls;
            let pred_s = lq + ls;
            let rq = (ln_abs(&q[nu + 1]) - pred_q) / pred_q;
            let rs = (ln_abs(&s[nu + 1]) - pred_s) / pred_s;
            residuals.push(rq.abs().max(rs.abs()));
        }
        assert!(residuals.last().unwrap() < &1e-6, "{residuals:?}");
        assert!(residuals.windows(2).skip(2).all(|w| w[1] <= w[0]), "{residuals:?}");
        let g = ln_abs(&q[10]) / ln_abs(&q[9]);
        assert!((g - growth_rate_thm3(1.0)).abs() < 0.01, "{g}");
    }

    #[test]
    fn growth_rate_at_one_is_golden_square() {
        let expected = (3.0 + Float::sqrt(5.0f64)) / 2.0;
        assert!((growth_rate_thm3(1.0) - expected).abs() < 1e-15);
        let g = growth_rate_thm3(0.7);
        assert!((g * g - (0.49 + 2.0) * g + 1.0).abs() < 1e-12);
    }

    #[test]
    fn seeds_are_repaired_or_rejected() {
        let theta = PartialQuotients::from_i64(0, &[1]).unwrap();
        let eta = PartialQuotients::from_i64(0, &[4]).unwrap();
        let (t, e) = construct_thm3(&gamma(1, 1), 5, Some((&theta, &eta)), DEFAULT_DIGIT_GUARD).unwrap();
        assert_eq!(t.tail()[0], BigInt::from(5));
        assert_eq!(e.tail()[0], BigInt::from(4));
        let deep = PartialQuotients::from_i64(0, &[3, 1]).unwrap();
        assert!(construct_thm3(&gamma(1, 1), 5, Some((&deep, &eta)), DEFAULT_DIGIT_GUARD).is_err());
        assert!(construct_thm2(&gamma(1, 1), 5, None, DEFAULT_DIGIT_GUARD).is_err());
        assert!(construct_thm3(&gamma(0, 1), 5, None, DEFAULT_DIGIT_GUARD).is_err());
    }

    #[test]
    fn dispatch_through_spec() {
        let spec = ConstructionSpec::new(Scheme::Thm3, gamma(1, 1), 6);
        assert!(matches!(construct(&spec).unwrap(), Construction::Pair { .. }));
        let spec = ConstructionSpec::new(Scheme::Thm1, gamma(3, 2), 6);
        assert!(matches!(construct(&spec).unwrap(), Construction::Single(_)));
    }
}
