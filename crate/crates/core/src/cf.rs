//! Continued-fraction prefixes, their convergents and exact distances `‖q_ν θ_N‖`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::dist_to_int;

/// A finite continued-fraction prefix `[a0; a1, ..., aN]` with `N >= 1`.
///
/// `a0` may be any integer; every tail entry is a positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialQuotients {
    a0: BigInt,
    tail: Vec<BigInt>,
}

impl PartialQuotients {
    pub fn new(a0: BigInt, tail: Vec<BigInt>) -> Result<Self> {
        if tail.is_empty() {
            return Err(Error::PrefixTooShort { required: 1, actual: 0 });
        }
        if let Some((i, a)) = tail.iter().enumerate().find(|(_, a)| !a.is_positive()) {
            return Err(Error::NonPositiveQuotient { index: i + 1, value: a.to_str_radix(10) });
        }
        Ok(Self { a0, tail })
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64(a0: i64, tail: &[i64]) -> Result<Self> {
        Self::new(a0.into(), tail.iter().map(|&a| BigInt::from(a)).collect())
    }

    pub fn a0(&self) -> &BigInt {
        &self.a0
    }

    pub fn tail(&self) -> &[BigInt] {
        &self.tail
    }

    /// Number of partial quotients after `a0`.
    pub fn depth(&self) -> usize {
        self.tail.len()
    }

    /// `a_i`, with `a_0` at index 0.
    pub fn quotient(&self, i: usize) -> Option<&BigInt> {
        if i == 0 {
            Some(&self.a0)
        } else {
            self.tail.get(i - 1)
        }
    }

    /// The prefix `[a0; a1, ..., a_depth]`.
    pub fn prefix(&self, depth: usize) -> Result<Self> {
        if depth == 0 || depth > self.tail.len() {
            return Err(Error::PrefixTooShort { required: depth.max(1), actual: self.tail.len() });
        }
        Ok(Self { a0: self.a0.clone(), tail: self.tail[..depth].to_vec() })
    }
}

/// Convergent `p_ν / q_ν`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub index: usize,
    pub p: BigInt,
    pub q: BigInt,
}

impl Convergent {
    pub fn value(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }
}

/// All convergents `p_0/q_0, ..., p_N/q_N` via `p_ν = a_ν p_{ν-1} + p_{ν-2}`.
pub fn convergents(pq: &PartialQuotients) -> Vec<Convergent> {
    let mut out = Vec::with_capacity(pq.depth() + 1);
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (pq.a0.clone(), BigInt::one());
    out.push(Convergent { index: 0, p: p.clone(), q: q.clone() });
    for (i, a) in pq.tail.iter().enumerate() {
        let p_next = a * &p + &p_prev;
        let q_next = a * &q + &q_prev;
        p_prev = core::mem::replace(&mut p, p_next);
        q_prev = core::mem::replace(&mut q, q_next);
        out.push(Convergent { index: i + 1, p: p.clone(), q: q.clone() });
    }
    out
}

/// The rational `θ_N = p_N / q_N`.
pub fn truncation_value(pq: &PartialQuotients) -> BigRational {
    let last = convergents(pq).pop().expect("at least one convergent");
    last.value()
}

/// Why a row of [`qnorm_table`] is or is not covered by the two-sided bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// `ν <= N-2` with `q_{ν-1} < q_ν < q_{ν+1}`: both sandwiches hold strictly.
    Interior,
    /// `a_1 = 1` makes `q_0 = q_1 = 1`; the row duplicates a denominator.
    Duplicate,
    /// `ν = N-1`: exact for the truncation (`1/q_N`) but not representative of θ.
    TailDegenerate,
}

/// `‖q_ν θ_N‖` for one convergent denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDistance {
    pub index: usize,
    pub q: BigInt,
    pub value: BigRational,
    pub kind: RowKind,
}

/// Exact distances `‖q_ν θ_N‖` for `ν = 0..N-1`. Requires `N >= 2`.
pub fn qnorm_table(pq: &PartialQuotients) -> Result<Vec<ExactDistance>> {
    let n = pq.depth();
    if n < 2 {
        return Err(Error::PrefixTooShort { required: 2, actual: n });
    }
    let conv = convergents(pq);
    Ok(qnorm_rows(&conv))
}

pub(crate) fn qnorm_rows(conv: &[Convergent]) -> Vec<ExactDistance> {
    let n = conv.len() - 1;
    let last = &conv[n];
    (0..n)
        .map(|nu| {
            let c = &conv[nu];
            let value = dist_to_int(&BigRational::new(&c.q * &last.p, last.q.clone()));
            let kind = if nu == n - 1 {
                RowKind::TailDegenerate
            } else if conv[nu + 1].q == c.q || (nu >= 1 && conv[nu - 1].q == c.q) {
                RowKind::Duplicate
            } else {
                RowKind::Interior
            };
            ExactDistance { index: nu, q: c.q.clone(), value, kind }
        })
        .collect()
}

/// Result of checking both two-sided bounds on one interior row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SandwichCheck {
    pub index: usize,
    /// `1/(2 q_{ν+1}) < ‖q_ν θ‖ < 1/q_{ν+1}`
    pub by_denominator: bool,
    /// `1/(a_{ν+1} + 2) < q_ν ‖q_ν θ‖ < 1/a_{ν+1}`
    pub by_quotient: bool,
}

/// Checks both sandwich inequalities exactly on every interior row.
pub fn check_sandwiches(pq: &PartialQuotients) -> Result<Vec<SandwichCheck>> {
    let table = qnorm_table(pq)?;
    let conv = convergents(pq);
    let one = BigRational::one();
    Ok(table
        .iter()
        .filter(|row| row.kind == RowKind::Interior)
        .map(|row| {
            let nu = row.index;
            let q_next = BigRational::from(conv[nu + 1].q.clone());
            let a_next = BigRational::from(pq.tail[nu].clone());
            let two = BigRational::from(BigInt::from(2));
            let by_denominator = row.value > &one / (&two * &q_next) && row.value < &one / &q_next;
            let scaled = &row.value * BigRational::from(row.q.clone());
            let by_quotient = scaled > &one / (&a_next + &two) && scaled < &one / &a_next;
            SandwichCheck { index: nu, by_denominator, by_quotient }
        })
        .collect())
}
