//! Hypotheses and conclusions of the interleaving lemma for pairs of decreasing step functions.
//!
//! For positive non-increasing `u`, `v` with breakpoints `q_ν` and `s_μ`:
//!
//! - (a): every piece of `v` contains some `t` with `u(t) < v(t)`;
//! - (b): every piece of `u` contains some `t` with `v(t) < u(t)`.
//!
//! A witness is a pair `(ν, μ)` with jumps of `u` at `q_ν` and of `v` at `s_μ`,
//! `q_ν < s_μ < q_{ν+1} < s_{μ+1}`, `u(s_μ) < v(s_μ -)` and `v(q_{ν+1} -) < u(q_{ν+1} -)`.
//! Breakpoints count as inside a window `[start, end)` from `start` up to and including `end`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::measure::StepFunction;

/// Minimum number of full pieces of each function inside the window.
pub const MIN_PIECES: usize = 2;

/// Two step functions compared on the window `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepPair {
    pub u: StepFunction,
    pub v: StepFunction,
    start: BigInt,
    end: BigInt,
}

impl StepPair {
    /// Pair on the intersection of both domains.
    pub fn new(u: StepFunction, v: StepFunction) -> Result<Self> {
        let start = u.start().max(v.start()).clone();
        let end = u.domain_end().min(v.domain_end()).clone();
        Self::with_window(u, v, start, end)
    }

    pub fn with_window(u: StepFunction, v: StepFunction, start: BigInt, end: BigInt) -> Result<Self> {
        if &start < u.start() || &start < v.start() || &end > u.domain_end() || &end > v.domain_end() {
            return Err(Error::OutOfRange("window must lie in both domains".into()));
        }
        if start >= end {
            return Err(Error::EmptyDomain);
        }
        Ok(Self { u, v, start, end })
    }

    pub fn window(&self) -> (&BigInt, &BigInt) {
        (&self.start, &self.end)
    }

    /// `(v, u)` on the same window.
    pub fn swapped(&self) -> Self {
        Self { u: self.v.clone(), v: self.u.clone(), start: self.start.clone(), end: self.end.clone() }
    }

    /// Full pieces `[max(t_k, start), t_{k+1})` of `f` with `start < t_{k+1} <= end`, as
    /// `(k, lo, hi)`. The last piece of a domain counts when it ends at `end`.
    fn full_pieces<'a>(&'a self, f: &'a StepFunction) -> impl Iterator<Item = (usize, BigInt, BigInt)> + 'a {
        let ends = f.breakpoints().iter().skip(1).chain(core::iter::once(f.domain_end()));
        f.breakpoints()
            .iter()
            .zip(ends)
            .enumerate()
            .filter(move |(_, (_, hi))| *hi > &self.start && *hi <= &self.end)
            .map(move |(k, (lo, hi))| (k, lo.max(&self.start).clone(), hi.clone()))
    }

    /// Indices of breakpoints of `f` inside the window.
    fn indices_in_window(&self, f: &StepFunction) -> core::ops::Range<usize> {
        let bp = f.breakpoints();
        bp.partition_point(|b| b < &self.start)..bp.partition_point(|b| b <= &self.end)
    }
}

/// Outcome of one piece: the first `t` in it where the strict inequality holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceCheck {
    /// Breakpoint index of the piece within its own function.
    pub index: usize,
    pub start: BigInt,
    pub end: BigInt,
    pub witness: Option<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    /// Pieces of `v`, tested for `u < v`.
    pub a: Vec<PieceCheck>,
    /// Pieces of `u`, tested for `v < u`.
    pub b: Vec<PieceCheck>,
}

impl ConditionReport {
    /// (a) on all full pieces.
    pub fn a_holds(&self) -> bool {
        self.a_holds_with_margin(0)
    }

    pub fn b_holds(&self) -> bool {
        self.b_holds_with_margin(0)
    }

    /// (a) on all pieces except `margin` at each end of the window.
    pub fn a_holds_with_margin(&self, margin: usize) -> bool {
        interior(&self.a, margin).iter().all(|p| p.witness.is_some())
    }

    pub fn b_holds_with_margin(&self, margin: usize) -> bool {
        interior(&self.b, margin).iter().all(|p| p.witness.is_some())
    }
}

fn interior(pieces: &[PieceCheck], margin: usize) -> &[PieceCheck] {
    if pieces.len() <= 2 * margin {
        &[]
    } else {
        &pieces[margin..pieces.len() - margin]
    }
}

/// Checks (a) and (b) piece by piece. Both functions change value only at integer
/// breakpoints, so each piece is tested at its start and at the other function's breakpoints
/// inside it.
pub fn check_conditions(pair: &StepPair) -> Result<ConditionReport> {
    let a = pieces_below(pair, &pair.v, &pair.u)?;
    let b = pieces_below(pair, &pair.u, &pair.v)?;
    Ok(ConditionReport { a, b })
}

/// For each full piece of `owner`, the first point where `other < owner`.
fn pieces_below(pair: &StepPair, owner: &StepFunction, other: &StepFunction) -> Result<Vec<PieceCheck>> {
    let pieces: Vec<_> = pair.full_pieces(owner).collect();
    if pieces.len() < MIN_PIECES {
        return Err(Error::WindowTooSmall { required: MIN_PIECES, actual: pieces.len() });
    }
    let obp = other.breakpoints();
    Ok(pieces
        .into_iter()
        .map(|(index, start, end)| {
            let from = obp.partition_point(|b| b <= &start);
            let to = obp.partition_point(|b| b < &end);
            let witness = core::iter::once(&start).chain(&obp[from..to]).find(|t| {
                let (o, w) = (other.eval_int(t), owner.eval_int(t));
                matches!((o, w), (Some(o), Some(w)) if o < w)
            });
            PieceCheck { index, witness: witness.cloned(), start, end }
        })
        .collect())
}

/// Indices `(ν*, μ*)` and every quantity the five clauses refer to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub nu_star: usize,
    pub mu_star: usize,
    /// `q_{ν*}`, `q_{ν*+1}`
    pub q: [BigInt; 2],
    /// `s_{μ*}`, `s_{μ*+1}`
    pub s: [BigInt; 2],
    /// `u(s_{μ*})` and `v(s_{μ*} -)`
    pub u_at_s: BigRational,
    pub v_before_s: BigRational,
    /// `v(q_{ν*+1} -)` and `u(q_{ν*+1} -)`
    pub v_before_q: BigRational,
    pub u_before_q: BigRational,
}

impl Witness {
    /// Re-checks all five clauses from the breakpoint positions alone, by direct evaluation.
    pub fn verify(&self, pair: &StepPair) -> bool {
        let at = |t: &BigInt| BigRational::from(t.clone());
        let jump = |f: &StepFunction, t: &BigInt| {
            f.breakpoints().binary_search(t).is_ok()
                && matches!((f.left_limit(&at(t)), f.eval(&at(t))), (Some(l), Some(r)) if r < l)
        };
        let [q0, q1] = &self.q;
        let [s0, s1] = &self.s;
        let (start, end) = pair.window();
        let inside = q0 >= start && s1 <= end;
        let interleaved = q0 < s0 && s0 < q1 && q1 < s1;
        let consecutive = |f: &StepFunction, a: &BigInt, b: &BigInt| {
            f.breakpoints().binary_search(b).is_ok()
                && !f.breakpoints().iter().any(|t| t > a && t < b)
        };
        let w1 = match (pair.u.eval(&at(s0)), pair.v.left_limit(&at(s0))) {
            (Some(u), Some(v)) => u < v,
            _ => false,
        };
        let w2 = match (pair.v.left_limit(&at(q1)), pair.u.left_limit(&at(q1))) {
            (Some(v), Some(u)) => v < u,
            _ => false,
        };
        inside
            && interleaved
            && jump(&pair.u, q0)
            && jump(&pair.v, s0)
            && consecutive(&pair.u, q0, q1)
            && consecutive(&pair.v, s0, s1)
            && w1
            && w2
    }

    /// Both index pairs lie at least `margin` breakpoints away from the window edges.
    pub fn is_interior(&self, pair: &StepPair, margin: usize) -> bool {
        let nu = pair.indices_in_window(&pair.u);
        let mu = pair.indices_in_window(&pair.v);
        self.nu_star >= nu.start + margin
            && self.nu_star + 1 + margin < nu.end
            && self.mu_star >= mu.start + margin
            && self.mu_star + 1 + margin < mu.end
    }
}

/// All witnesses with their four breakpoints in `[start, end]`, ordered by `ν*`.
///
/// For a given `ν` only the last `s_μ` in `(q_ν, q_{ν+1})` can have `s_{μ+1} > q_{ν+1}`.
pub fn find_witnesses(pair: &StepPair) -> Vec<Witness> {
    let (u, v) = (&pair.u, &pair.v);
    let (qs, ss) = (u.breakpoints(), v.breakpoints());
    let mut out = Vec::new();
    for nu in pair.indices_in_window(u) {
        let Some(q1) = qs.get(nu + 1) else { break };
        if q1 > &pair.end {
            break;
        }
        let q0 = &qs[nu];
        let below = ss.partition_point(|s| s < q1);
        if below == 0 {
            continue;
        }
        let mu = below - 1;
        let s0 = &ss[mu];
        let Some(s1) = ss.get(mu + 1) else { continue };
        if s0 <= q0 || s1 > &pair.end || !u.is_jump(nu) || !v.is_jump(mu) {
            continue;
        }
        let u_at_s = u.eval_int(s0).expect("s inside window").clone();
        let v_before_s = v.left_limit_at(mu).expect("jump has a left piece").clone();
        let v_before_q = v.values()[mu].clone();
        let u_before_q = u.values()[nu].clone();
        if u_at_s < v_before_s && v_before_q < u_before_q {
            out.push(Witness {
                nu_star: nu,
                mu_star: mu,
                q: [q0.clone(), q1.clone()],
                s: [s0.clone(), s1.clone()],
                u_at_s,
                v_before_s,
                v_before_q,
                u_before_q,
            });
        }
    }
    out
}

/// Parameters of [`random_step_pair`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepParams {
    /// Turns per function; each turn adds one or two breakpoints.
    pub pieces: usize,
    /// Per-mille range of the factor by which a new level undercuts the previous minimum.
    pub decay: (u32, u32),
    /// Range of integer gaps between consecutive breakpoints.
    pub gaps: (u64, u64),
    /// Per-mille chance that a turn first steps to a level between the two functions.
    pub splits: u32,
    /// When off, `u` never drops below `v`, which breaks (a).
    pub alternation: bool,
}

impl Default for StepParams {
    fn default() -> Self {
        Self { pieces: 12, decay: (300, 900), gaps: (1, 20), splits: 300, alternation: true }
    }
}

/// Generated pair with the outcomes the construction guarantees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedPair {
    pub pair: StepPair,
    pub expect_a: bool,
    pub expect_b: bool,
    pub expect_witness: bool,
}

/// Deterministic pair whose owners alternate turn by turn.
///
/// With alternation on, each turn ends below the other function, so every full piece
/// contains a crossing and (a), (b) hold everywhere. A split turn first stops at a level
/// strictly between the two functions. With alternation off, `u` only ever steps down to the
/// current value of `v`, so `u >= v` throughout and `u(s_μ) = v(s_μ -)` at every jump of `v`.
pub fn random_step_pair(seed: u64, params: StepParams) -> Result<GeneratedPair> {
    let StepParams { pieces, decay, gaps, splits, alternation } = params;
    if pieces < MIN_PIECES + 1 {
        return Err(Error::OutOfRange("pieces must be at least 4".into()));
    }
    if decay.0 == 0 || decay.0 > decay.1 || decay.1 >= 1000 {
        return Err(Error::OutOfRange("decay must satisfy 0 < lo <= hi < 1000".into()));
    }
    if gaps.0 == 0 || gaps.0 > gaps.1 {
        return Err(Error::OutOfRange("gaps must satisfy 0 < lo <= hi".into()));
    }
    if splits > 1000 {
        return Err(Error::OutOfRange("splits is per mille".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_mille = |x: u32| BigRational::new(x.into(), 1000.into());

    // [u, v]: breakpoints and values
    let mut bps: [Vec<BigInt>; 2] = [Vec::new(), Vec::new()];
    let mut vals: [Vec<BigRational>; 2] = [Vec::new(), Vec::new()];
    let mut t = BigInt::from(0);
    let mut next_t = |rng: &mut ChaCha8Rng| {
        t += rng.gen_range(gaps.0..=gaps.1);
        t.clone()
    };
    let mut last = BigInt::from(0);

    for turn in 0..2 * pieces {
        let (x, y) = (turn % 2, 1 - turn % 2);
        let cx = vals[x].last().cloned();
        let cy = vals[y].last().cloned();
        let f = per_mille(rng.gen_range(decay.0..=decay.1));
        let (cx, cy) = match (cx, cy) {
            (Some(cx), Some(cy)) => (cx, cy),
            (_, None) => {
                bps[x].push(next_t(&mut rng));
                vals[x].push(BigRational::from(BigInt::from(1)));
                continue;
            }
            (None, Some(cy)) => {
                bps[x].push(next_t(&mut rng));
                vals[x].push(cy * f);
                continue;
            }
        };
        if !alternation && x == 0 {
            bps[x].push(next_t(&mut rng));
            vals[x].push(cy);
            continue;
        }
        if alternation && cy < cx && rng.gen_range(0..1000) < splits {
            let g = per_mille(rng.gen_range(decay.0..=decay.1));
            bps[x].push(next_t(&mut rng));
            vals[x].push(&cy + (&cx - &cy) * g);
        }
        let low = if cy < cx { cy } else { cx };
        last = next_t(&mut rng);
        bps[x].push(last.clone());
        vals[x].push(low * f);
    }
    // the window closes at the last breakpoint so that the final pieces are complete
    let end = next_t(&mut rng);
    let [bu, bv] = bps;
    let [vu, vv] = vals;
    let u = StepFunction::new(bu, vu, end.clone())?;
    let v = StepFunction::new(bv, vv, end)?;
    let start = v.start().clone();
    let pair = StepPair::with_window(u, v, start, last)?;
    Ok(GeneratedPair { pair, expect_a: alternation, expect_b: true, expect_witness: alternation })
}
