//! Two-dimensional lattices `Λ = A Z²`, exact minima `Ψ_Λ(t)` and lattice exponents.
//!
//! `Ψ_Λ(t) = min |x₁ x₂|^(1/2)` over nonzero `x ∈ Λ` with `max(|x₁|, |x₂|) <= t`. Each row of
//! `A` is brought to integer form `x_i = L_i(m, n) / D_i`, so all comparisons are on exact
//! integers. For a fixed `n` the product `L₁ L₂` is a quadratic in `m`, and `|L₁ L₂|` is
//! minimised over an integer interval at an endpoint or next to one of its two roots, which
//! makes the box scan linear in `t`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cf::{convergents, truncation_value, PartialQuotients};
use crate::error::{Error, Result};
use crate::exponents::{ExponentEstimate, ExponentKind, Sample, Window};
use crate::numeric::ln_ratio;

/// `A = [[a11, a12], [a21, a22]]` with `det A != 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice2 {
    a: [[BigRational; 2]; 2],
}

impl Lattice2 {
    pub fn new(a11: BigRational, a12: BigRational, a21: BigRational, a22: BigRational) -> Result<Self> {
        let lattice = Self { a: [[a11, a12], [a21, a22]] };
        if lattice.det().is_zero() {
            return Err(Error::Singular);
        }
        Ok(lattice)
    }

    pub fn identity() -> Self {
        Self { a: [[BigRational::one(), BigRational::zero()], [BigRational::zero(), BigRational::one()]] }
    }

    pub fn entries(&self) -> &[[BigRational; 2]; 2] {
        &self.a
    }

    pub fn det(&self) -> BigRational {
        &self.a[0][0] * &self.a[1][1] - &self.a[0][1] * &self.a[1][0]
    }

    /// `θ = a12 / a11`, if `a11 != 0`.
    pub fn theta(&self) -> Option<BigRational> {
        (!self.a[0][0].is_zero()).then(|| &self.a[0][1] / &self.a[0][0])
    }

    /// `η = a21 / a22`, if `a22 != 0`.
    pub fn eta(&self) -> Option<BigRational> {
        (!self.a[1][1].is_zero()).then(|| &self.a[1][0] / &self.a[1][1])
    }

    /// Image `A (m, n)ᵀ`.
    pub fn image(&self, m: &BigInt, n: &BigInt) -> (BigRational, BigRational) {
        let m = BigRational::from(m.clone());
        let n = BigRational::from(n.clone());
        (&self.a[0][0] * &m + &self.a[0][1] * &n, &self.a[1][0] * &m + &self.a[1][1] * &n)
    }

    /// Smallest sup-norm of a nonzero lattice point on a coordinate axis. For `t` at or
    /// beyond it `Ψ_Λ(t) = 0`.
    pub fn degeneracy_radius(&self) -> BigRational {
        let rows = IntRows::new(self);
        let along = |zero: usize| {
            let (alpha, beta) = (&rows.alpha[zero], &rows.beta[zero]);
            let g = alpha.gcd(beta);
            let (m, n) = (beta / &g, -(alpha / &g));
            let other = 1 - zero;
            let l = &rows.alpha[other] * m + &rows.beta[other] * n;
            BigRational::new(l.abs(), rows.den[other].clone())
        };
        along(0).min(along(1))
    }
}

/// Builds `A = [[1, θ_N], [η_N, 1]]` from two prefixes.
pub fn lattice_from_pair(theta: &PartialQuotients, eta: &PartialQuotients) -> Result<Lattice2> {
    Lattice2::new(BigRational::one(), truncation_value(theta), truncation_value(eta), BigRational::one())
}

/// `Λ_{DA}` with `D = diag(d1, d2)`.
pub fn diag_scale(lattice: &Lattice2, d1: &BigRational, d2: &BigRational) -> Result<Lattice2> {
    if d1.is_zero() || d2.is_zero() {
        return Err(Error::OutOfRange("diagonal scale factors must be nonzero".into()));
    }
    let [[a11, a12], [a21, a22]] = &lattice.a;
    Lattice2::new(a11 * d1, a12 * d1, a21 * d2, a22 * d2)
}

/// Shortest prefix of `pq` whose last denominator reaches `t_max²`, so that the truncated
/// lattice is non-degenerate far beyond `t_max`.
pub fn fidelity_prefix(pq: &PartialQuotients, t_max: &BigRational) -> PartialQuotients {
    let target = {
        let t = t_max.ceil().to_integer().max(BigInt::from(2));
        t.pow(2u32)
    };
    let conv = convergents(pq);
    let depth = conv.iter().position(|c| c.q >= target).map_or(pq.depth(), |k| k.max(2));
    pq.prefix(depth.min(pq.depth())).expect("depth within prefix")
}

/// A minimiser of `|x₁ x₂|` in the box of half-width `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeMinimum {
    pub t: BigRational,
    pub point: (BigInt, BigInt),
    pub image: (BigRational, BigRational),
    /// `(x₁ x₂)²`, so `Ψ_Λ(t) = product_sq^(1/4)`.
    pub product_sq: BigRational,
    /// The minimiser lies on a coordinate axis and `Ψ_Λ(t) = 0`.
    pub degenerate: bool,
}

impl LatticeMinimum {
    pub fn sup_norm(&self) -> BigRational {
        self.image.0.abs().max(self.image.1.abs())
    }

    /// `ln Ψ_Λ(t) = ln(product_sq) / 4`; `-∞` when degenerate.
    pub fn ln_psi(&self) -> f64 {
        if self.degenerate {
            f64::NEG_INFINITY
        } else {
            ln_ratio(&self.product_sq) / 4.0
        }
    }
}

/// Rows of `A` as `x_i = (alpha_i m + beta_i n) / den_i` with integer coefficients.
struct IntRows {
    alpha: [BigInt; 2],
    beta: [BigInt; 2],
    den: [BigInt; 2],
}

impl IntRows {
    fn new(lattice: &Lattice2) -> Self {
        let row = |i: usize| {
            let [a, b] = &lattice.a[i];
            let den = a.denom().lcm(b.denom());
            let alpha = a.numer() * (&den / a.denom());
            let beta = b.numer() * (&den / b.denom());
            (alpha, beta, den)
        };
        let (a0, b0, d0) = row(0);
        let (a1, b1, d1) = row(1);
        Self { alpha: [a0, a1], beta: [b0, b1], den: [d0, d1] }
    }
}

/// Whether the box bound is `<= t` or `< t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Closed,
    Open,
}

struct Candidate {
    abs_product: BigInt,
    /// `|L₁|`, `|L₂|`
    l: [BigInt; 2],
    m: BigInt,
    n: BigInt,
}

/// `max(|L₁|/D₁, |L₂|/D₂)` compared across candidates without division.
fn sup_cmp(a: &Candidate, b: &Candidate, den: &[BigInt; 2]) -> Ordering {
    let sup = |c: &Candidate| {
        if &c.l[0] * &den[1] >= &c.l[1] * &den[0] {
            BigRational::new(c.l[0].clone(), den[0].clone())
        } else {
            BigRational::new(c.l[1].clone(), den[1].clone())
        }
    };
    sup(a).cmp(&sup(b))
}

fn better(a: &Candidate, b: &Candidate, den: &[BigInt; 2]) -> bool {
    a.abs_product
        .cmp(&b.abs_product)
        .then_with(|| sup_cmp(a, b, den))
        .then_with(|| (&a.n, &a.m).cmp(&(&b.n, &b.m)))
        == Ordering::Less
}

/// `Ψ_Λ(t)` with its minimiser, by exact enumeration of the box `[-t, t]²`.
pub fn psi_lattice(lattice: &Lattice2, t: &BigRational) -> Result<LatticeMinimum> {
    psi_lattice_bounded(lattice, t, Bound::Closed)
}

/// Same as [`psi_lattice`] with the choice of a closed (`<= t`) or open (`< t`) box.
pub fn psi_lattice_bounded(lattice: &Lattice2, t: &BigRational, bound: Bound) -> Result<LatticeMinimum> {
    if !t.is_positive() {
        return Err(Error::EmptyBox);
    }
    let rows = IntRows::new(lattice);
    // x_i in the box  <=>  |a_i m + b_i n| <= c_i  (or <)
    let (tn, td) = (t.numer(), t.denom());
    let strips = Strips {
        a: [&rows.alpha[0] * td, &rows.alpha[1] * td],
        b: [&rows.beta[0] * td, &rows.beta[1] * td],
        c: [tn * &rows.den[0], tn * &rows.den[1]],
        den: rows.den.clone(),
        open: bound == Bound::Open,
    };
    let (m, n) = match strips.scan_i128() {
        Some(found) => found.map(|(m, n)| (BigInt::from(m), BigInt::from(n))),
        None => strips.scan_big(),
    }
    .ok_or(Error::EmptyBox)?;
    let image = lattice.image(&m, &n);
    let product = &image.0 * &image.1;
    Ok(LatticeMinimum {
        t: t.clone(),
        degenerate: product.is_zero(),
        product_sq: &product * &product,
        point: (m, n),
        image,
    })
}

/// The box as two integer strips `|a_i m + b_i n| <= c_i`; `den` orders sup-norms on ties.
///
/// Only `n >= 0` is scanned, with `m > 0` on `n = 0`, since `±(m, n)` share both the product
/// and the sup-norm. For each `n` the candidates are the ends of the feasible `m`-interval and
/// the integers on either side of both roots.
struct Strips {
    a: [BigInt; 2],
    b: [BigInt; 2],
    c: [BigInt; 2],
    den: [BigInt; 2],
    open: bool,
}

impl Strips {
    /// `|n| <= (|a₁| c₂ + |a₂| c₁) / |det|`, from Cramer's rule.
    fn n_max(&self) -> BigInt {
        let det = &self.a[0] * &self.b[1] - &self.a[1] * &self.b[0];
        (self.a[0].abs() * &self.c[1] + self.a[1].abs() * &self.c[0]).div_floor(&det.abs()) + 1u32
    }

    fn scan_big(&self) -> Option<(BigInt, BigInt)> {
        let Self { a, b, c, den, open } = self;
        let inside = |l: &BigInt, i: usize| if *open { l.abs() < c[i] } else { l.abs() <= c[i] };
        let n_max = self.n_max();
        let mut best: Option<Candidate> = None;
        let mut n = BigInt::zero();
        while n <= n_max {
            let mut lo: Option<BigInt> = None;
            let mut hi: Option<BigInt> = None;
            let mut feasible = true;
            let mut cands: Vec<BigInt> = Vec::with_capacity(6);
            for i in 0..2 {
                let bn = &b[i] * &n;
                if a[i].is_zero() {
                    feasible &= inside(&bn, i);
                    continue;
                }
                let (p, q) = if a[i].is_positive() { (-&c[i] - &bn, &c[i] - &bn) } else { (&c[i] - &bn, -&c[i] - &bn) };
                let low = div_ceil(&p, &a[i]);
                let high = q.div_floor(&a[i]);
                lo = Some(lo.map_or(low.clone(), |v| v.max(low)));
                hi = Some(hi.map_or(high.clone(), |v| v.min(high)));
                let r = (-bn).div_floor(&a[i]);
                cands.push(&r + 1u32);
                cands.push(r);
            }
            if let (true, Some(lo), Some(hi)) = (feasible, lo, hi) {
                cands.retain(|m| m >= &lo && m <= &hi);
                cands.push(lo);
                cands.push(hi);
                for m in cands {
                    if n.is_zero() && !m.is_positive() {
                        continue;
                    }
                    let l0 = &a[0] * &m + &b[0] * &n;
                    let l1 = &a[1] * &m + &b[1] * &n;
                    if !(inside(&l0, 0) && inside(&l1, 1)) {
                        continue;
                    }
                    let cand = Candidate { abs_product: (&l0 * &l1).abs(), l: [l0.abs(), l1.abs()], m, n: n.clone() };
                    if best.as_ref().is_none_or(|b| better(&cand, b, den)) {
                        best = Some(cand);
                    }
                }
            }
            n += 1u32;
        }
        best.map(|b| (b.m, b.n))
    }

    /// Same scan in `i128`, or `None` when intermediate values could exceed `2^125`.
    fn scan_i128(&self) -> Option<Option<(i128, i128)>> {
        let n_max = self.n_max();
        let limit = BigInt::one() << 125u32;
        let m_max = (0..2)
            .filter(|&i| !self.a[i].is_zero())
            .map(|i| (&self.c[i] + self.b[i].abs() * &n_max) / self.a[i].abs() + 2u32)
            .min()?;
        for i in 0..2 {
            if &self.c[i] + self.b[i].abs() * &n_max >= limit || self.a[i].abs() * &m_max >= limit || self.den[i] >= limit {
                return None;
            }
        }
        let small = |v: &BigInt| v.to_i128().expect("checked against limit");
        let a = [small(&self.a[0]), small(&self.a[1])];
        let b = [small(&self.b[0]), small(&self.b[1])];
        let c = [small(&self.c[0]), small(&self.c[1])];
        let den = [small(&self.den[0]) as u128, small(&self.den[1]) as u128];
        let open = self.open;
        let inside = |l: i128, i: usize| if open { l.abs() < c[i] } else { l.abs() <= c[i] };
        let n_max = small(&n_max);

        // (|L₁ L₂|, |L₁|, |L₂|, m, n)
        let mut best: Option<(Wide, u128, u128, i128, i128)> = None;
        for n in 0..=n_max {
            let (mut lo, mut hi) = (i128::MIN, i128::MAX);
            let mut feasible = true;
            let mut cands = [0i128; 6];
            let mut len = 0;
            for i in 0..2 {
                let bn = b[i] * n;
                if a[i] == 0 {
                    feasible &= inside(bn, i);
                    continue;
                }
                let (p, q) = if a[i] > 0 { (-c[i] - bn, c[i] - bn) } else { (c[i] - bn, -c[i] - bn) };
                lo = lo.max(ceil_div(p, a[i]));
                hi = hi.min(floor_div(q, a[i]));
                let r = floor_div(-bn, a[i]);
                cands[len] = r;
                cands[len + 1] = r + 1;
                len += 2;
            }
            if !feasible || lo > hi {
                continue;
            }
            cands[len] = lo;
            cands[len + 1] = hi;
            for &m in &cands[..len + 2] {
                if m < lo || m > hi || (n == 0 && m <= 0) {
                    continue;
                }
                let l0 = a[0] * m + b[0] * n;
                let l1 = a[1] * m + b[1] * n;
                if !(inside(l0, 0) && inside(l1, 1)) {
                    continue;
                }
                let (u0, u1) = (l0.unsigned_abs(), l1.unsigned_abs());
                let cand = (wide_mul(u0, u1), u0, u1, m, n);
                let wins = match &best {
                    None => true,
                    Some(cur) => cand.0.cmp(&cur.0).then_with(|| sup_cmp_wide((u0, u1), (cur.1, cur.2), den)).then_with(|| (n, m).cmp(&(cur.4, cur.3))) == Ordering::Less,
                };
                if wins {
                    best = Some(cand);
                }
            }
        }
        Some(best.map(|b| (b.3, b.4)))
    }
}

/// Unsigned 256-bit value as `(high, low)`.
type Wide = (u128, u128);

fn wide_mul(x: u128, y: u128) -> Wide {
    const MASK: u128 = u64::MAX as u128;
    let (x1, x0) = (x >> 64, x & MASK);
    let (y1, y0) = (y >> 64, y & MASK);
    let (p00, p01, p10, p11) = (x0 * y0, x0 * y1, x1 * y0, x1 * y1);
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let low = (p00 & MASK) | (mid << 64);
    let high = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (high, low)
}

/// Compares `max(l₀/d₀, l₁/d₁)` for two candidates.
fn sup_cmp_wide(x: (u128, u128), y: (u128, u128), den: [u128; 2]) -> Ordering {
    let sup = |l: (u128, u128)| if wide_mul(l.0, den[1]) >= wide_mul(l.1, den[0]) { (l.0, den[0]) } else { (l.1, den[1]) };
    let ((lx, dx), (ly, dy)) = (sup(x), sup(y));
    wide_mul(lx, dy).cmp(&wide_mul(ly, dx))
}

fn floor_div(x: i128, y: i128) -> i128 {
    let q = x / y;
    if x % y != 0 && ((x < 0) != (y < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(x: i128, y: i128) -> i128 {
    -floor_div(-x, y)
}

fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Every jump of `Ψ_Λ` on `(0, t_max]`, ascending. Entry `k` holds the minimiser that becomes
/// admissible at `t = σ_k` (its sup-norm); `Ψ_Λ` equals its value on `[σ_k, σ_{k+1})`.
///
/// Found by descending from `t_max`: the minimiser at `t` jumps in at its own sup-norm `σ`,
/// and the open box `< σ` yields the previous one.
pub fn lattice_jumps(lattice: &Lattice2, t_max: &BigRational, bound: Bound) -> Result<Vec<LatticeMinimum>> {
    let mut jumps = Vec::new();
    let mut current = psi_lattice_bounded(lattice, t_max, bound)?;
    loop {
        let sigma = current.sup_norm();
        current.t = sigma.clone();
        jumps.push(current);
        match psi_lattice_bounded(lattice, &sigma, Bound::Open) {
            Ok(next) => current = next,
            Err(Error::EmptyBox) => break,
            Err(e) => return Err(e),
        }
    }
    jumps.reverse();
    Ok(jumps)
}

/// Sampling controls for [`lattice_exponents`].
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSchedule {
    /// Jumps below this sup-norm are ignored.
    pub t_min: BigRational,
    pub window: Window,
}

impl Default for LatticeSchedule {
    fn default() -> Self {
        Self { t_min: BigRational::from(BigInt::from(10)), window: Window::all() }
    }
}

/// Ordinary and uniform lattice exponent estimates with the jump data behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeExponents {
    pub omega: ExponentEstimate,
    pub omega_bar: ExponentEstimate,
    pub jumps: Vec<LatticeMinimum>,
    /// Set when `t_max` reached the degeneracy radius and sampling stopped below it.
    pub truncated_at: Option<BigRational>,
}

/// Estimates `ω_Λ` (window max of `-ln Ψ(σ_k) / ln σ_k`) and `ω̄_Λ` (window min of
/// `-ln Ψ(σ_k -) / ln σ_k`) over the jumps `σ_k` of `Ψ_Λ` in `[t_min, t_max]`.
pub fn lattice_exponents(lattice: &Lattice2, t_max: &BigRational, schedule: &LatticeSchedule) -> Result<LatticeExponents> {
    let radius = lattice.degeneracy_radius();
    let (jumps, truncated_at) = if t_max >= &radius {
        (lattice_jumps(lattice, &radius, Bound::Open)?, Some(radius))
    } else {
        (lattice_jumps(lattice, t_max, Bound::Closed)?, None)
    };
    let one = BigRational::one();
    let mut ordinary = Vec::new();
    let mut uniform = Vec::new();
    for (k, jump) in jumps.iter().enumerate() {
        if jump.t <= one || jump.t < schedule.t_min || jump.degenerate {
            continue;
        }
        let ln_t = ln_ratio(&jump.t);
        ordinary.push(Sample { t: jump.t.clone(), ln_t, local: -jump.ln_psi() / ln_t });
        if k >= 1 {
            uniform.push(Sample { t: jump.t.clone(), ln_t, local: -jumps[k - 1].ln_psi() / ln_t });
        }
    }
    let omega = ExponentEstimate::from_samples(ExponentKind::OmegaLattice, ordinary, schedule.window, 1)?;
    let omega_bar = ExponentEstimate::from_samples(ExponentKind::OmegaBarLattice, uniform, schedule.window, 1)?;
    Ok(LatticeExponents { omega, omega_bar, jumps, truncated_at })
}

/// `Ψ_Λ(t)` as `f64`, for reporting.
pub fn psi_value(min: &LatticeMinimum) -> f64 {
    if min.degenerate {
        0.0
    } else {
        num_traits::Float::exp(min.ln_psi())
    }
}
