//! Irrationality measure functions `ψ_θ`, `υ_θ` and their pairwise minima as exact step functions.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::cf::{convergents, qnorm_rows, PartialQuotients};
use crate::error::{Error, Result};
use crate::numeric::dist_to_int;

/// A positive, non-increasing, right-continuous step function.
///
/// `f(t) = values[k]` for `breakpoints[k] <= t < breakpoints[k + 1]`, and the last piece ends
/// at `domain_end` (exclusive). Outside `[breakpoints[0], domain_end)` the function is undefined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepFunction {
    breakpoints: Vec<BigInt>,
    values: Vec<BigRational>,
    domain_end: BigInt,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<BigInt>, values: Vec<BigRational>, domain_end: BigInt) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::InvalidStep("no breakpoints"));
        }
        if breakpoints.len() != values.len() {
            return Err(Error::InvalidStep("breakpoints and values differ in length"));
        }
        if !breakpoints[0].is_positive() {
            return Err(Error::InvalidStep("breakpoints must be positive"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStep("breakpoints must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_positive()) {
            return Err(Error::InvalidStep("values must be positive"));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidStep("values must be non-increasing"));
        }
        if &domain_end <= breakpoints.last().expect("nonempty") {
            return Err(Error::InvalidStep("domain end must exceed the last breakpoint"));
        }
        Ok(Self { breakpoints, values, domain_end })
    }

    /// A single piece `value` on `[start, end)`.
    pub fn constant(start: BigInt, value: BigRational, end: BigInt) -> Result<Self> {
        Self::new(alloc::vec![start], alloc::vec![value], end)
    }

    /// Drops every breakpoint at which the value does not strictly decrease.
    pub fn merged(mut self) -> Self {
        let mut keep_b = Vec::with_capacity(self.breakpoints.len());
        let mut keep_v: Vec<BigRational> = Vec::with_capacity(self.values.len());
        for (b, v) in self.breakpoints.drain(..).zip(self.values.drain(..)) {
            if keep_v.last().is_some_and(|last| *last == v) {
                continue;
            }
            keep_b.push(b);
            keep_v.push(v);
        }
        self.breakpoints = keep_b;
        self.values = keep_v;
        self
    }

    pub fn breakpoints(&self) -> &[BigInt] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn domain_end(&self) -> &BigInt {
        &self.domain_end
    }

    pub fn start(&self) -> &BigInt {
        &self.breakpoints[0]
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// True iff the function strictly drops at `breakpoints[k]` (`k >= 1`).
    pub fn is_jump(&self, k: usize) -> bool {
        k >= 1 && k < self.len() && self.values[k] < self.values[k - 1]
    }

    /// `f(t_k -)`, the value on the piece just before breakpoint `k`.
    pub fn left_limit_at(&self, k: usize) -> Option<&BigRational> {
        if k == 0 || k > self.len() {
            None
        } else {
            self.values.get(k - 1)
        }
    }

    /// Index of the piece containing `t`, if `t` lies in the domain.
    pub fn piece_index(&self, t: &BigRational) -> Option<usize> {
        let floor = t.floor().to_integer();
        if &floor < self.start() || t >= &BigRational::from(self.domain_end.clone()) {
            return None;
        }
        Some(self.breakpoints.partition_point(|b| b <= &floor) - 1)
    }

    pub fn eval(&self, t: &BigRational) -> Option<&BigRational> {
        self.piece_index(t).map(|k| &self.values[k])
    }

    pub fn eval_int(&self, t: &BigInt) -> Option<&BigRational> {
        if t < self.start() || t >= &self.domain_end {
            return None;
        }
        let k = self.breakpoints.partition_point(|b| b <= t) - 1;
        Some(&self.values[k])
    }

    /// `f(t-)`, defined for `start < t <= domain_end`.
    pub fn left_limit(&self, t: &BigRational) -> Option<&BigRational> {
        let below = t.ceil().to_integer() - 1u32;
        if &below < self.start() || t > &BigRational::from(self.domain_end.clone()) {
            return None;
        }
        let k = self.breakpoints.partition_point(|b| b <= &below) - 1;
        Some(&self.values[k])
    }

    /// Pieces as `(start, end, value)` with `end` exclusive.
    pub fn pieces(&self) -> impl Iterator<Item = (&BigInt, &BigInt, &BigRational)> + '_ {
        self.breakpoints.iter().enumerate().map(move |(k, b)| {
            let end = self.breakpoints.get(k + 1).unwrap_or(&self.domain_end);
            (b, end, &self.values[k])
        })
    }
}

/// Which irrationality measure function is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    /// `min ‖qx‖`
    Ordinary,
    /// `min q‖qx‖`
    Weak,
}

struct Denominators {
    q: Vec<BigInt>,
    dist: Vec<BigRational>,
    domain_end: BigInt,
}

/// Deduplicated denominators `q_ν`, `ν <= N-2`, with their exact distances.
fn denominators(pq: &PartialQuotients) -> Result<Denominators> {
    let n = pq.depth();
    if n < 2 {
        return Err(Error::PrefixTooShort { required: 2, actual: n });
    }
    let conv = convergents(pq);
    let rows = qnorm_rows(&conv);
    let mut q = Vec::with_capacity(n);
    let mut dist = Vec::with_capacity(n);
    for row in rows.into_iter().take(n - 1) {
        if conv[row.index + 1].q == row.q {
            continue;
        }
        q.push(row.q);
        dist.push(row.value);
    }
    // [a0; 1, a2] has q_0 = q_1 = 1 and nothing below q_{N-1} = 1
    if q.is_empty() {
        return Err(Error::EmptyDomain);
    }
    Ok(Denominators { q, dist, domain_end: conv[n - 1].q.clone() })
}

/// `ψ_θ` for the truncation `θ_N`: `‖q_ν θ_N‖` on `[q_ν, q_{ν+1})`, valid below `q_{N-1}`.
pub fn psi_step(pq: &PartialQuotients) -> Result<StepFunction> {
    let d = denominators(pq)?;
    StepFunction::new(d.q, d.dist, d.domain_end).map(StepFunction::merged)
}

/// `υ_θ` for the truncation: running minimum of `q_ν ‖q_ν θ_N‖`, stored at its jumps only.
pub fn upsilon_step(pq: &PartialQuotients) -> Result<StepFunction> {
    let d = denominators(pq)?;
    let mut values = Vec::with_capacity(d.q.len());
    let mut best: Option<BigRational> = None;
    for (q, dist) in d.q.iter().zip(&d.dist) {
        let candidate = dist * BigRational::from(q.clone());
        let next = match best {
            Some(b) if b <= candidate => b,
            _ => candidate,
        };
        values.push(next.clone());
        best = Some(next);
    }
    StepFunction::new(d.q, values, d.domain_end).map(StepFunction::merged)
}

/// Pointwise minimum on the intersection of the two domains.
pub fn min_step(f: &StepFunction, g: &StepFunction) -> Result<StepFunction> {
    let lo = f.start().max(g.start()).clone();
    let hi = f.domain_end().min(g.domain_end()).clone();
    if lo >= hi {
        return Err(Error::EmptyDomain);
    }
    let mut points: Vec<BigInt> = f
        .breakpoints()
        .iter()
        .chain(g.breakpoints())
        .filter(|b| **b > lo && **b < hi)
        .cloned()
        .collect();
    points.push(lo);
    points.sort();
    points.dedup();
    let values = points
        .iter()
        .map(|t| {
            let a = f.eval_int(t).expect("inside f's domain");
            let b = g.eval_int(t).expect("inside g's domain");
            a.min(b).clone()
        })
        .collect();
    StepFunction::new(points, values, hi).map(StepFunction::merged)
}

/// Exhaustive `min_{1 <= q <= t} ‖qx‖` (or `q‖qx‖`).
pub fn brute_measure(x: &BigRational, t: u64, kind: MeasureKind) -> BigRational {
    assert!(t >= 1, "t must be at least 1");
    let mut best: Option<BigRational> = None;
    let den = x.denom();
    let mut residue = BigInt::zero();
    let step = x.numer().mod_floor(den);
    for q in 1..=t {
        residue = (residue + &step).mod_floor(den);
        let other = den - &residue;
        let d = BigRational::new(residue.clone().min(other), den.clone());
        let cand = match kind {
            MeasureKind::Ordinary => d,
            MeasureKind::Weak => d * BigRational::from(BigInt::from(q)),
        };
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    }
    best.unwrap_or_else(|| dist_to_int(x))
}

#[cfg(test)]
fn recip(t: &BigInt) -> BigRational {
    BigRational::new(BigInt::from(1), t.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn psi_of_two_two_two() {
        let pq = PartialQuotients::from_i64(0, &[2, 2, 2]).unwrap();
        let psi = psi_step(&pq).unwrap();
        assert_eq!(psi.breakpoints(), b(&[1, 2]).as_slice());
        assert_eq!(psi.values(), &[r(5, 12), r(1, 6)]);
        assert_eq!(psi.domain_end(), &BigInt::from(5));
        for (t, _, v) in psi.pieces() {
            assert!(v <= &recip(t));
        }
    }

    #[test]
    fn empty_domain() {
        let pq = PartialQuotients::from_i64(0, &[1, 4]).unwrap();
        assert_eq!(psi_step(&pq), Err(Error::EmptyDomain));
        assert_eq!(upsilon_step(&pq), Err(Error::EmptyDomain));
    }

    #[test]
    fn psi_of_golden_prefix() {
        let pq = PartialQuotients::from_i64(1, &[1, 1, 1, 1]).unwrap();
        let psi = psi_step(&pq).unwrap();
        assert_eq!(psi.eval_int(&BigInt::from(1)), Some(&r(2, 5)));
    }

    #[test]
    fn upsilon_of_two_two_two() {
        let pq = PartialQuotients::from_i64(0, &[2, 2, 2]).unwrap();
        let ups = upsilon_step(&pq).unwrap();
        assert_eq!(ups.breakpoints(), b(&[1, 2]).as_slice());
        assert_eq!(ups.values(), &[r(5, 12), r(1, 3)]);
        // one step deeper, q_2 = 5 gives 5 * 1/12 = 5/12 and is merged away
        let deeper = PartialQuotients::from_i64(0, &[2, 2, 2, 2]).unwrap();
        let ups = upsilon_step(&deeper).unwrap();
        assert_eq!(ups.breakpoints(), b(&[1, 2]).as_slice());
        assert_eq!(ups.domain_end(), &BigInt::from(12));
    }

    #[test]
    fn upsilon_single_piece_when_products_do_not_improve() {
        // [0;1,1,...]: q‖qθ‖ hovers near 1/sqrt(5) from above after the first term
        let pq = PartialQuotients::from_i64(0, &[5, 1, 1]).unwrap();
        let ups = upsilon_step(&pq).unwrap();
        assert_eq!(ups.len(), 1);
    }

    #[test]
    fn weak_bounded_by_t_times_ordinary() {
        let pq = PartialQuotients::from_i64(0, &[1, 3, 2, 7, 1, 1, 4]).unwrap();
        let psi = psi_step(&pq).unwrap();
        let ups = upsilon_step(&pq).unwrap();
        let end: i64 = psi.domain_end().try_into().unwrap();
        for t in 1..end {
            let t = BigInt::from(t);
            let lhs = ups.eval_int(&t).unwrap();
            let rhs = psi.eval_int(&t).unwrap() * BigRational::from(t.clone());
            assert!(*lhs <= rhs);
        }
    }

    #[test]
    fn min_step_examples() {
        let f = StepFunction::constant(BigInt::from(1), r(1, 1), BigInt::from(10)).unwrap();
        let g = StepFunction::new(b(&[1, 4]), vec![r(2, 1), r(1, 2)], BigInt::from(10)).unwrap();
        let m = min_step(&f, &g).unwrap();
        assert_eq!(m.breakpoints(), b(&[1, 4]).as_slice());
        assert_eq!(m.values(), &[r(1, 1), r(1, 2)]);
        assert_eq!(min_step(&g, &g).unwrap(), g);

        let far = StepFunction::constant(BigInt::from(20), r(1, 1), BigInt::from(30)).unwrap();
        assert_eq!(min_step(&f, &far), Err(Error::EmptyDomain));
    }

    #[test]
    fn brute_examples() {
        assert_eq!(brute_measure(&r(5, 12), 2, MeasureKind::Ordinary), r(1, 6));
        assert_eq!(brute_measure(&r(5, 12), 2, MeasureKind::Weak), r(1, 3));
        assert_eq!(brute_measure(&r(1, 2), 1, MeasureKind::Ordinary), r(1, 2));
    }

    #[test]
    fn evaluation_and_left_limits() {
        let f = StepFunction::new(b(&[1, 4, 10]), vec![r(1, 1), r(3, 10), r(1, 10)], BigInt::from(20)).unwrap();
        assert_eq!(f.eval(&r(7, 2)), Some(&r(1, 1)));
        assert_eq!(f.eval(&r(4, 1)), Some(&r(3, 10)));
        assert_eq!(f.left_limit(&r(4, 1)), Some(&r(1, 1)));
        assert_eq!(f.left_limit(&r(41, 10)), Some(&r(3, 10)));
        assert_eq!(f.left_limit(&r(20, 1)), Some(&r(1, 10)));
        assert_eq!(f.eval(&r(20, 1)), None);
        assert_eq!(f.eval(&r(1, 2)), None);
        assert_eq!(f.left_limit(&r(1, 1)), None);
        assert_eq!(f.left_limit_at(2), Some(&r(3, 10)));
        assert!(f.is_jump(1) && !f.is_jump(0));
    }

    #[test]
    fn constructor_rejects_malformed_input() {
        assert!(StepFunction::new(b(&[1, 1]), vec![r(1, 1), r(1, 2)], BigInt::from(5)).is_err());
        assert!(StepFunction::new(b(&[1, 2]), vec![r(1, 2), r(1, 1)], BigInt::from(5)).is_err());
        assert!(StepFunction::new(b(&[1]), vec![r(0, 1)], BigInt::from(5)).is_err());
        assert!(StepFunction::new(b(&[0]), vec![r(1, 1)], BigInt::from(5)).is_err());
        assert!(StepFunction::new(b(&[3]), vec![r(1, 1)], BigInt::from(3)).is_err());
        assert!(StepFunction::new(vec![], vec![], BigInt::from(3)).is_err());
    }
}
