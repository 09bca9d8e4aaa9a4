//! Step functions on `(0,1)`, their decreasing and maximal rearrangements,
//! and the piecewise closed forms that the quadrature consumes.

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rational::{q_to_f64, Q};
use crate::{Error, Result};

/// Nonnegative step function: value `values[i]` on `(breakpoints[i], breakpoints[i+1])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStep")]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawStep {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawStep> for StepFunction {
    type Error = Error;
    fn try_from(raw: RawStep) -> Result<Self> {
        StepFunction::new(raw.breakpoints, raw.values)
    }
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let bad = |m: &str| Err(Error::Domain(format!("step function: {m}")));
        if breakpoints.len() < 2 || values.len() + 1 != breakpoints.len() {
            return bad("need k+1 breakpoints for k values");
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return bad("breakpoints must start at 0 and end at 1");
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("breakpoints must be strictly increasing");
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return bad("values must be finite and nonnegative");
        }
        Ok(StepFunction { breakpoints, values })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![c])
    }

    /// `χ_{(a,b)}` for `0 ≤ a < b ≤ 1`.
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        if !(0.0 <= a && a < b && b <= 1.0) {
            return Err(Error::Domain(format!("indicator of ({a},{b})")));
        }
        let mut bp = vec![0.0];
        let mut vals = Vec::new();
        if a > 0.0 {
            bp.push(a);
            vals.push(0.0);
        }
        bp.push(b);
        vals.push(1.0);
        if b < 1.0 {
            bp.push(1.0);
            vals.push(0.0);
        }
        Self::new(bp, vals)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints.windows(2).zip(&self.values).map(|(w, &v)| (w[0], w[1], v))
    }

    /// Value at `s`, taking the right-hand piece at a breakpoint.
    pub fn eval(&self, s: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b <= s).clamp(1, self.values.len());
        self.values[i - 1]
    }

    /// `|{s : u(s) > t}|`.
    pub fn level_measure(&self, t: f64) -> f64 {
        self.pieces().filter(|&(_, _, v)| v > t).map(|(a, b, _)| b - a).sum()
    }

    pub fn integral(&self) -> f64 {
        self.pieces().map(|(a, b, v)| v * (b - a)).sum()
    }

    /// `∫₀¹ u v` over the common refinement.
    pub fn inner(&self, other: &StepFunction) -> f64 {
        merged_pieces(self, other).map(|(a, b, x, y)| x * y * (b - a)).sum()
    }

    /// Pointwise sum over the common refinement.
    pub fn add(&self, other: &StepFunction) -> StepFunction {
        let mut bp = vec![0.0];
        let mut vals = Vec::new();
        for (_, b, x, y) in merged_pieces(self, other) {
            bp.push(b);
            vals.push(x + y);
        }
        StepFunction { breakpoints: bp, values: vals }
    }

    fn merged(mut bp: Vec<f64>, mut vals: Vec<f64>) -> StepFunction {
        let mut i = 1;
        while i < vals.len() {
            if vals[i] == vals[i - 1] {
                vals.remove(i);
                bp.remove(i);
            } else {
                i += 1;
            }
        }
        StepFunction { breakpoints: bp, values: vals }
    }

    pub fn as_piecewise(&self) -> Piecewise {
        Piecewise {
            breaks: self.breakpoints.clone(),
            pieces: self.values.iter().map(|&v| vec![Term::constant(v)]).collect(),
        }
    }
}

fn merged_pieces<'a>(u: &'a StepFunction, v: &'a StepFunction) -> impl Iterator<Item = (f64, f64, f64, f64)> + 'a {
    let mut cuts: Vec<f64> = u.breakpoints.iter().chain(&v.breakpoints).copied().collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let cuts: Vec<(f64, f64)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();
    cuts.into_iter().map(move |(a, b)| {
        let mid = 0.5 * (a + b);
        (a, b, u.eval(mid), v.eval(mid))
    })
}

/// Nonincreasing equimeasurable rearrangement: pieces sorted by value, lengths concatenated.
pub fn decreasing_rearrangement(u: &StepFunction) -> StepFunction {
    let mut pieces: Vec<(f64, f64)> = u.pieces().map(|(a, b, v)| (v, b - a)).collect();
    pieces.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut bp = vec![0.0];
    let mut vals = Vec::with_capacity(pieces.len());
    let mut acc = 0.0;
    for (v, len) in pieces {
        acc += len;
        bp.push(acc);
        vals.push(v);
    }
    *bp.last_mut().unwrap() = 1.0;
    StepFunction::merged(bp, vals)
}

/// One summand of a piecewise closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Term {
    /// `c·s^e`.
    Pow { c: f64, e: Q },
    /// `c·(s+h)^e`, `h > 0`.
    Shifted { c: f64, h: f64, e: Q },
    /// `c·(1/s)∫₀^s (t+h)^e dt`, `h > 0`.
    AvgShifted { c: f64, h: f64, e: Q },
}

impl Term {
    pub fn constant(c: f64) -> Term {
        Term::Pow { c, e: Q::zero() }
    }

    pub fn coef(&self) -> f64 {
        match *self {
            Term::Pow { c, .. } | Term::Shifted { c, .. } | Term::AvgShifted { c, .. } => c,
        }
    }

    /// `ln` of the value at `s = e^{−t}`; `s` may underflow.
    pub fn ln_eval(&self, s: f64, t: f64) -> f64 {
        match *self {
            Term::Pow { c, e } => c.ln() - q_to_f64(e) * t,
            Term::Shifted { c, h, e } => c.ln() + q_to_f64(e) * (s + h).ln(),
            Term::AvgShifted { c, h, e } => {
                let x = s / h;
                let e1 = q_to_f64(e) + 1.0;
                let factor = if x == 0.0 {
                    1.0
                } else if e1 == 0.0 {
                    x.ln_1p() / x
                } else {
                    (e1 * x.ln_1p()).exp_m1() / (e1 * x)
                };
                c.ln() + q_to_f64(e) * h.ln() + factor.ln()
            }
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.ln_eval(s, -s.ln()).exp()
    }

    /// Exponent and log-coefficient of the germ as `s → 0⁺`.
    pub fn germ(&self) -> (Q, f64) {
        match *self {
            Term::Pow { c, e } => (e, c.ln()),
            Term::Shifted { c, h, e } | Term::AvgShifted { c, h, e } => (Q::zero(), c.ln() + q_to_f64(e) * h.ln()),
        }
    }
}

/// A function on `(0,1)` given on each piece `(breaks[i], breaks[i+1])` by a sum of [`Term`]s.
#[derive(Clone, Debug, PartialEq)]
pub struct Piecewise {
    pub breaks: Vec<f64>,
    pub pieces: Vec<Vec<Term>>,
}

impl Piecewise {
    pub fn zero() -> Self {
        Piecewise { breaks: vec![0.0, 1.0], pieces: vec![vec![]] }
    }

    fn piece_index(&self, s: f64) -> usize {
        self.breaks.partition_point(|&b| b <= s).clamp(1, self.pieces.len()) - 1
    }

    /// `ln f(s)` at `s = e^{−t}`, `-∞` where `f` vanishes.
    pub fn ln_eval_at(&self, s: f64, t: f64) -> f64 {
        let terms = &self.pieces[self.piece_index(s)];
        log_sum_exp(terms.iter().filter(|term| term.coef() > 0.0).map(|term| term.ln_eval(s, t)))
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.ln_eval_at(s, -s.ln()).exp()
    }

    /// Germ `c·s^e` of the first piece as `s → 0⁺` (most singular term wins).
    pub fn germ_at_zero(&self) -> Option<(Q, f64)> {
        let mut best: Option<(Q, f64)> = None;
        for term in self.pieces[0].iter().filter(|t| t.coef() > 0.0) {
            let (e, lc) = term.germ();
            best = match best {
                Some((be, blc)) if be < e => Some((be, blc)),
                Some((be, blc)) if be == e => Some((e, log_sum_exp([blc, lc].into_iter()))),
                _ => Some((e, lc)),
            };
        }
        best
    }

    /// Piece boundaries strictly inside `(a,b)`.
    pub fn interior_breaks(&self, a: f64, b: f64) -> Vec<f64> {
        self.breaks.iter().copied().filter(|&x| x > a && x < b).collect()
    }
}

fn log_sum_exp(xs: impl Iterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.collect();
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `u**(s) = (1/s)∫₀^s u*`: on each piece of `u*` with value `v` starting at `b`
/// after mass `A`, `u** = v + (A − v b)/s`.
pub fn maximal_rearrangement(u: &StepFunction) -> Piecewise {
    maximal_of_decreasing(&decreasing_rearrangement(u))
}

fn maximal_of_decreasing(ds: &StepFunction) -> Piecewise {
    let mut mass = 0.0;
    let mut pieces = Vec::new();
    for (a, b, v) in ds.pieces() {
        let c = mass - v * a;
        let mut terms = vec![Term::constant(v)];
        if c > 0.0 {
            terms.push(Term::Pow { c, e: -Q::one() });
        }
        pieces.push(terms);
        mass += v * (b - a);
    }
    Piecewise { breaks: ds.breakpoints.clone(), pieces }
}

/// `S_m f(s) = sup_{t∈[s,1)} t^{m/n} f**(t)`.
///
/// On a piece of `f**`, `g(t) = v t^θ + c t^{θ−1}` first decreases and then
/// increases, so its sup over `[s, b]` sits at `s` or `b`. Hence `S_m f` equals
/// `g` up to the crossing with the running maximum of right endpoints, and
/// that maximum afterwards.
pub fn supremal_sm(f: &StepFunction, m: u32, n: u32) -> Result<Piecewise> {
    if !(1 <= m && m < n) {
        return Err(Error::Domain(format!("S_m needs 1 ≤ m < n, got m={m}, n={n}")));
    }
    let theta = Q::new(m as i64, n as i64);
    let th = q_to_f64(theta);
    let fss = maximal_rearrangement(f);
    let k = fss.pieces.len();
    let coeffs: Vec<(f64, f64)> = fss
        .pieces
        .iter()
        .map(|terms| {
            let mut v = 0.0;
            let mut c = 0.0;
            for t in terms {
                match *t {
                    Term::Pow { c: cc, e } if e.is_zero() => v += cc,
                    Term::Pow { c: cc, .. } => c += cc,
                    _ => unreachable!("maximal rearrangement of a step function"),
                }
            }
            (v, c)
        })
        .collect();
    let g = |i: usize, t: f64| coeffs[i].0 * t.powf(th) + coeffs[i].1 * t.powf(th - 1.0);
    let mut run_max = vec![0.0; k];
    let mut m_right = 0.0f64;
    for i in (0..k).rev() {
        m_right = m_right.max(g(i, fss.breaks[i + 1]));
        run_max[i] = m_right;
    }
    let mut breaks = vec![0.0];
    let mut pieces: Vec<Vec<Term>> = Vec::new();
    let mut push = |b: f64, terms: Vec<Term>| {
        if let Some(last) = pieces.last() {
            if *last == terms {
                *breaks.last_mut().unwrap() = b;
                return;
            }
        }
        breaks.push(b);
        pieces.push(terms);
    };
    for i in 0..k {
        let (a, b) = (fss.breaks[i], fss.breaks[i + 1]);
        let (v, c) = coeffs[i];
        let mx = run_max[i];
        let flat = vec![Term::constant(mx)];
        let curve = {
            let mut t = Vec::new();
            if v > 0.0 {
                t.push(Term::Pow { c: v, e: theta });
            }
            if c > 0.0 {
                t.push(Term::Pow { c, e: theta - Q::one() });
            }
            t
        };
        // g decreases on (a, t*) with t* = (1−θ)c/(θv).
        let tstar = if v > 0.0 { (1.0 - th) * c / (th * v) } else { f64::INFINITY };
        let dec_end = tstar.min(b);
        let g_at_a = if a == 0.0 {
            if c > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            g(i, a)
        };
        if dec_end <= a || g_at_a <= mx {
            push(b, flat);
            continue;
        }
        let s0 = if g(i, dec_end) >= mx {
            dec_end
        } else {
            let (mut lo, mut hi) = (a, dec_end);
            for _ in 0..200 {
                let mid = if lo > 0.0 { (lo * hi).sqrt().max(0.5 * (lo + hi) * 1e-300) } else { 0.5 * hi };
                let mid = if mid <= lo || mid >= hi { 0.5 * (lo + hi) } else { mid };
                if g(i, mid) > mx {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-16 * hi {
                    break;
                }
            }
            hi
        };
        if s0 >= b {
            push(b, curve);
        } else {
            push(s0, curve);
            push(b, flat);
        }
    }
    Ok(Piecewise { breaks, pieces })
}

/// `T_{m/n} f(s) = s^{−m/n} sup_{t∈[s,1]} t^{m/n} f*(t)`. On a piece of `f*`
/// the sup is the largest `v_j b_j^{m/n}` over the pieces to the right.
pub fn fractional_t(f: &StepFunction, m: u32, n: u32) -> Result<Piecewise> {
    if !(1 <= m && m < n) {
        return Err(Error::Domain(format!("T needs 1 ≤ m < n, got m={m}, n={n}")));
    }
    let theta = Q::new(m as i64, n as i64);
    let th = q_to_f64(theta);
    let ds = decreasing_rearrangement(f);
    let k = ds.values.len();
    let mut kmax = vec![0.0; k];
    let mut acc = 0.0f64;
    for i in (0..k).rev() {
        acc = acc.max(ds.values[i] * ds.breakpoints[i + 1].powf(th));
        kmax[i] = acc;
    }
    let pieces = kmax.iter().map(|&kk| if kk > 0.0 { vec![Term::Pow { c: kk, e: -theta }] } else { vec![] }).collect();
    Ok(Piecewise { breaks: ds.breakpoints.clone(), pieces })
}

/// `(D_λ f)(s) = f(s/λ)` on `(0, min(λ,1))`, zero beyond.
pub fn dilation(f: &StepFunction, lam: f64) -> Result<StepFunction> {
    if !(lam > 0.0 && lam.is_finite()) {
        return Err(Error::Domain(format!("dilation needs λ > 0, got {lam}")));
    }
    let mut bp = vec![0.0];
    let mut vals = Vec::new();
    for (_, b, v) in f.pieces() {
        let nb = (b * lam).min(1.0);
        if nb > *bp.last().unwrap() {
            bp.push(nb);
            vals.push(v);
        }
        if nb >= 1.0 {
            break;
        }
    }
    if *bp.last().unwrap() < 1.0 {
        bp.push(1.0);
        vals.push(0.0);
    }
    *bp.last_mut().unwrap() = 1.0;
    Ok(StepFunction::merged(bp, vals))
}

/// Random step function: 1–16 pieces, breakpoints uniform on a dyadic grid
/// (so lengths add exactly), values log-uniform in `[1e−3, 1e3]`.
pub fn random_step_function<R: Rng>(rng: &mut R) -> StepFunction {
    const GRID: f64 = (1u64 << 32) as f64;
    let k = rng.random_range(1..=16usize);
    let mut cuts: Vec<u64> = (0..k - 1).map(|_| rng.random_range(1..(1u64 << 32))).collect();
    cuts.sort_unstable();
    cuts.dedup();
    let mut bp = vec![0.0];
    bp.extend(cuts.iter().map(|&c| c as f64 / GRID));
    bp.push(1.0);
    let vals = (0..bp.len() - 1).map(|_| 10f64.powf(rng.random_range(-3.0..=3.0))).collect();
    StepFunction::new(bp, vals).expect("valid by construction")
}
