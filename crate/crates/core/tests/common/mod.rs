#![allow(dead_code)]

use dlab_core::cf::PartialQuotients;
use dlab_core::lattice::Lattice2;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use proptest::prelude::*;

pub fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Prefixes `[a0; a1, ..., aN]` with `N` in `depth` and tail entries in `1..=max_q`.
pub fn arb_prefix(depth: core::ops::RangeInclusive<usize>, max_q: i64) -> impl Strategy<Value = PartialQuotients> {
    (0i64..3, prop::collection::vec(1..=max_q, depth))
        .prop_map(|(a0, tail)| PartialQuotients::from_i64(a0, &tail).unwrap())
}

/// Bottom-up evaluation of the nested fraction.
pub fn nested_value(pq: &PartialQuotients) -> BigRational {
    let mut acc: Option<BigRational> = None;
    for a in pq.tail().iter().rev() {
        let a = BigRational::from(a.clone());
        acc = Some(match acc {
            None => a,
            Some(x) => a + x.recip(),
        });
    }
    BigRational::from(pq.a0().clone()) + acc.map_or_else(|| r(0, 1), |x| x.recip())
}

/// Running minimum of `‖q x‖` (or `q ‖q x‖`) over `1 <= q <= t`, for `t = 1..=cap`, by direct
/// residue arithmetic. Returns the points where it strictly decreases, as `(t, numerator)`
/// over the denominator of `x`.
pub fn running_min(x: &BigRational, cap: u64, weak: bool) -> Vec<(u64, u128)> {
    let den = x.denom().to_u128().expect("small denominator");
    let step = x.numer().mod_floor_u128(den);
    let mut out: Vec<(u64, u128)> = Vec::new();
    let mut residue = 0u128;
    for q in 1..=cap {
        residue = (residue + step) % den;
        let dist = residue.min(den - residue);
        let value = if weak { dist * q as u128 } else { dist };
        if out.last().is_none_or(|&(_, v)| value < v) {
            out.push((q, value));
        }
    }
    out
}

trait ModFloor {
    fn mod_floor_u128(&self, m: u128) -> u128;
}

impl ModFloor for BigInt {
    fn mod_floor_u128(&self, m: u128) -> u128 {
        let m = BigInt::from(m);
        let r = ((self % &m) + &m) % &m;
        r.to_u128().unwrap()
    }
}

/// Minimal `(x₁ x₂)²` over nonzero points with sup-norm at most `t`, scanning the box of
/// preimages `|m|, |n| <= bound`.
pub fn naive_psi_sq(lattice: &Lattice2, t: &BigRational, bound: i64) -> Option<BigRational> {
    let mut best: Option<BigRational> = None;
    for m in -bound..=bound {
        for n in -bound..=bound {
            if m == 0 && n == 0 {
                continue;
            }
            let (x1, x2) = lattice.image(&m.into(), &n.into());
            if x1.abs() > *t || x2.abs() > *t {
                continue;
            }
            let p = &x1 * &x2;
            let p = &p * &p;
            if best.as_ref().is_none_or(|b| p < *b) {
                best = Some(p);
            }
        }
    }
    best
}

/// `|m|, |n|` bound covering `A⁻¹ [-t, t]²`, padded by one.
pub fn preimage_bound(lattice: &Lattice2, t: &BigRational) -> i64 {
    let [[a, b], [c, d]] = lattice.entries();
    let det = lattice.det();
    let m = (d.abs() + b.abs()) * t / det.abs();
    let n = (c.abs() + a.abs()) * t / det.abs();
    (m.max(n).ceil().to_integer() + BigInt::from(1)).to_i64().unwrap()
}
