//! Weighted `L^q` norms of log-singular integrands on `(0,1)`.
//!
//! Everything is integrated in `u = log ℓℓ(s) = ℓℓℓ(s) − 1`, a smooth bijection
//! `(0,1) → (0,∞)` with `|ds| = s·ℓ·ℓℓ du`. With `ℓ = e^{e^u−1}` and `ℓℓ = e^u`,
//! the integrand `s^a ℓ^b ℓℓ^c ℓℓℓ^d` becomes
//! `exp(−a'·t + b'·(e^u−1) + c'·u + d·log(1+u))`, whose coefficients are kept
//! as exact rationals so that cancelling powers are dropped rather than
//! subtracted. This lets the divergence test look arbitrarily deep.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::logpower::LogPowerForm;
use crate::rational::{q_to_f64, ExtendedRational, Q};
use crate::rearrange::{decreasing_rearrangement, maximal_rearrangement, Piecewise, StepFunction, Term};
use crate::space::{validate, SpaceDescriptor, SpaceKind, ValidationStatus};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    /// Maximum bisection depth of any panel.
    pub max_depth: u32,
    pub divergence_threshold: f64,
    /// Increasing depths in `u = ℓℓℓ(s) − 1` at which the partial integrals of
    /// a head norm are compared.
    pub inner_cutoffs: Vec<f64>,
    pub sup_grid_points_per_decade: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-8,
            max_depth: 60,
            divergence_threshold: 1e6,
            inner_cutoffs: vec![8.0, 64.0, 512.0],
            sup_grid_points_per_decade: 64,
        }
    }
}

impl QuadratureConfig {
    fn check(&self) -> Result<()> {
        let c = &self.inner_cutoffs;
        if !(self.rel_tol > 0.0) || c.len() < 2 || c.windows(2).any(|w| !(w[0] < w[1])) || !(c[0] > 0.0) {
            return Err(Error::Domain("quadrature config: rel_tol > 0 and ≥ 2 increasing positive cutoffs".into()));
        }
        Ok(())
    }
}

/// Serialized as a number or the string `"divergent"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormValue {
    Finite(f64),
    DivergenceDetected,
}

impl Serialize for NormValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NormValue::Finite(v) => s.serialize_f64(*v),
            NormValue::DivergenceDetected => s.serialize_str("divergent"),
        }
    }
}

impl<'de> Deserialize<'de> for NormValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) if s == "divergent" => Ok(NormValue::DivergenceDetected),
            serde_json::Value::Number(n) => Ok(NormValue::Finite(n.as_f64().unwrap_or(f64::NAN))),
            other => Err(serde::de::Error::custom(format!("expected number or \"divergent\", got {other}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: NormValue,
    pub rel_tol_achieved: f64,
}

impl NormResult {
    pub fn finite(&self) -> Option<f64> {
        match self.value {
            NormValue::Finite(v) => Some(v),
            NormValue::DivergenceDetected => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        self.value == NormValue::DivergenceDetected
    }

    fn divergent() -> Self {
        NormResult { value: NormValue::DivergenceDetected, rel_tol_achieved: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Base {
    One,
    Piecewise(Piecewise),
}

/// `‖weight · base‖_{L^exponent(a,b)}` with `weight = s^λ ℓ^{e1} ℓℓ^{e2} ℓℓℓ^{e3}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedIntegrand {
    pub base: Base,
    pub weight: LogPowerForm,
    pub interval: (f64, f64),
    pub exponent: ExtendedRational,
}

impl WeightedIntegrand {
    pub fn new(base: Base, weight: LogPowerForm, interval: (f64, f64), exponent: ExtendedRational) -> Result<Self> {
        let (a, b) = interval;
        if !(0.0 <= a && a < b && b <= 1.0) {
            return Err(Error::Domain(format!("interval ({a},{b}) not inside (0,1)")));
        }
        if exponent < ExtendedRational::int(1) {
            return Err(Error::Domain(format!("exponent {exponent} below 1")));
        }
        if weight.divergent {
            return Err(Error::DivergentForm);
        }
        Ok(WeightedIntegrand { base, weight, interval, exponent })
    }

    /// `Ψ_{λ;q,α,β}ℓℓℓ^{−γ}` in `L^{q′}` on `(a,b)`.
    pub fn psi(p: &crate::PsiParams, interval: (f64, f64)) -> Result<Self> {
        Self::new(Base::One, p.integrand(), interval, p.q_conj())
    }
}

/// `u(s) = log(1 + log(1 + log(1/s)))`.
pub fn u_of_s(s: f64) -> f64 {
    if s <= 0.0 {
        return f64::INFINITY;
    }
    (-s.ln()).ln_1p().ln_1p()
}

/// Log of the integrand (in the `u` variable) at one point.
struct Evaluator<'a> {
    base: &'a Base,
    weight: LogPowerForm,
    /// Power applied to `|w f|`; 1 for sup norms.
    power: Q,
    /// Whether the Jacobian `s ℓ ℓℓ` is included.
    jacobian: bool,
}

/// Exact coefficients of `(−t, log ℓ, log ℓℓ, log ℓℓℓ)` plus a float remainder.
struct Split {
    k: [Q; 4],
    rest: f64,
}

impl Evaluator<'_> {
    fn coefficients(&self, e_s: Q) -> [Q; 4] {
        let w = self.weight;
        let p = self.power;
        let j = if self.jacobian { Q::one() } else { Q::zero() };
        [p * (e_s + w.lambda) + j, p * w.e1 + j, p * w.e2 + j, p * w.e3]
    }

    /// Splits `log f` at `s = e^{−t}` into `e_min·(−t) + rest` with `e_min` the
    /// most singular power in the active piece.
    fn split_base(&self, s: f64, t: f64) -> Option<(Q, f64)> {
        let terms: &[Term] = match self.base {
            Base::One => return Some((Q::zero(), 0.0)),
            Base::Piecewise(pw) => {
                let idx = pw.breaks.partition_point(|&b| b <= s).clamp(1, pw.pieces.len()) - 1;
                &pw.pieces[idx]
            }
        };
        let active: Vec<&Term> = terms.iter().filter(|t| t.coef() > 0.0).collect();
        if active.is_empty() {
            return None;
        }
        let power_of = |term: &Term| match *term {
            Term::Pow { e, .. } => e,
            _ => Q::zero(),
        };
        let e_min = active.iter().map(|t| power_of(t)).min().unwrap();
        let logs = active.iter().map(|term| {
            let de = power_of(term) - e_min;
            let without_power = match **term {
                Term::Pow { c, .. } => c.ln(),
                _ => term.ln_eval(s, t),
            };
            if de.is_zero() {
                without_power
            } else {
                without_power - q_to_f64(de) * t
            }
        });
        let v: Vec<f64> = logs.collect();
        let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return None;
        }
        Some((e_min, m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()))
    }

    fn split(&self, u: f64) -> Option<Split> {
        let em = u.exp_m1();
        let t = em.exp_m1();
        let s = (-t).exp();
        let (e_s, rest) = self.split_base(s, t)?;
        Some(Split { k: self.coefficients(e_s), rest: q_to_f64(self.power) * rest })
    }

    /// `log F(u)`, possibly `±∞`.
    fn ln_at(&self, u: f64) -> f64 {
        let Some(Split { k, rest }) = self.split(u) else {
            return f64::NEG_INFINITY;
        };
        let em = u.exp_m1();
        let basis = [-(em.exp_m1()), em, u, u.ln_1p()];
        let mut acc = rest;
        for (kq, b) in k.iter().zip(basis) {
            if kq.is_zero() {
                continue;
            }
            let kf = q_to_f64(*kq);
            if b.is_infinite() {
                return kf * b;
            }
            acc += kf * b;
        }
        acc
    }

    fn at(&self, u: f64) -> f64 {
        self.ln_at(u).exp()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_64, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Gauss–Kronrod 7–15 on `[a,b]`: (Kronrod value, |Kronrod − Gauss|).
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Globally adaptive integration over consecutive panels `cuts[i]..cuts[i+1]`.
/// Returns (value, error estimate).
fn integrate(f: &dyn Fn(f64) -> f64, cuts: &[f64], cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let mut heap = BinaryHeap::new();
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            let (val, err) = gk15(f, w[0], w[1]);
            heap.push(Panel { a: w[0], b: w[1], val, err, depth: 0 });
        }
    }
    let totals = |h: &BinaryHeap<Panel>| h.iter().fold((0.0, 0.0), |(v, e), p| (v + p.val, e + p.err));
    for _ in 0..20_000 {
        let (val, err) = totals(&heap);
        if !val.is_finite() {
            return Ok((val, err));
        }
        if err <= cfg.rel_tol * val.abs() || err == 0.0 {
            return Ok((val, err));
        }
        let worst = heap.pop().expect("nonempty");
        if worst.depth >= cfg.max_depth {
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (val, err) = gk15(f, a, b);
            heap.push(Panel { a, b, val, err, depth: worst.depth + 1 });
        }
    }
    let (val, err) = totals(&heap);
    if err <= cfg.rel_tol * val.abs() * 10.0 {
        return Ok((val, err));
    }
    Err(Error::Quadrature { best: val })
}

/// Evaluates `‖w·f‖_{L^{q′}(a,b)}` (sup norm for `q′ = ∞`).
pub fn weighted_lq_norm(ig: &WeightedIntegrand, cfg: &QuadratureConfig) -> Result<NormResult> {
    cfg.check()?;
    let (a, b) = ig.interval;
    let (u_lo, u_hi) = (u_of_s(b), u_of_s(a));
    let mut cuts = vec![u_lo];
    if let Base::Piecewise(pw) = &ig.base {
        let mut inner: Vec<f64> = pw.interior_breaks(a, b).into_iter().map(u_of_s).collect();
        inner.sort_by(f64::total_cmp);
        cuts.extend(inner.into_iter().filter(|&u| u > u_lo && u < u_hi));
    }
    match ig.exponent {
        ExtendedRational::Infinity => sup_norm(ig, cuts, u_hi, cfg),
        ExtendedRational::Finite(p) => {
            let ev = Evaluator { base: &ig.base, weight: ig.weight, power: p, jacobian: true };
            let f = |u: f64| ev.at(u);
            let root = |x: f64| x.powf(1.0 / q_to_f64(p));
            if u_hi.is_finite() {
                cuts.push(u_hi);
                let (val, err) = integrate(&f, &cuts, cfg)?;
                return Ok(NormResult {
                    value: NormValue::Finite(root(val)),
                    rel_tol_achieved: rel(err, val) / q_to_f64(p),
                });
            }
            head_integral(&ev, cuts, cfg).map(|r| match r {
                Some((val, err)) => {
                    NormResult { value: NormValue::Finite(root(val)), rel_tol_achieved: rel(err, val) / q_to_f64(p) }
                }
                None => NormResult::divergent(),
            })
        }
    }
}

fn rel(err: f64, val: f64) -> f64 {
    if val == 0.0 {
        0.0
    } else {
        err / val.abs()
    }
}

/// Integral over `(u_lo, ∞)`, or `None` when the cutoff protocol sees divergence.
fn head_integral(ev: &Evaluator, mut cuts: Vec<f64>, cfg: &QuadratureConfig) -> Result<Option<(f64, f64)>> {
    let f = |u: f64| ev.at(u);
    let cutoffs: Vec<f64> = cfg.inner_cutoffs.iter().copied().filter(|&c| c > *cuts.last().unwrap()).collect();
    if cutoffs.len() < 2 {
        return Err(Error::Domain("inner cutoffs must lie beyond the last breakpoint".into()));
    }
    let mut partial = Vec::new();
    let mut total = 0.0;
    let mut err_total = 0.0;
    cuts.push(cutoffs[0]);
    let (v, e) = integrate(&f, &cuts, cfg).or_else(|e| match e {
        Error::Quadrature { best } if !best.is_finite() => Ok((best, 0.0)),
        other => Err(other),
    })?;
    total += v;
    err_total += e;
    partial.push(total);
    for w in cutoffs.windows(2) {
        let (v, e) = integrate(&f, &geometric_cuts(w[0], w[1]), cfg).or_else(|e| match e {
            Error::Quadrature { best } if !best.is_finite() => Ok((best, 0.0)),
            other => Err(other),
        })?;
        total += v;
        err_total += e;
        partial.push(total);
    }
    let last = *partial.last().unwrap();
    if !last.is_finite() || last > cfg.divergence_threshold.max(10.0 * partial[0]) {
        return Ok(None);
    }
    let (u2, u3) = (cutoffs[cutoffs.len() - 2], cutoffs[cutoffs.len() - 1]);
    let (f2, f3) = (ev.at(u2), ev.at(u3));
    if f3 > 0.0 && u3 * f3 >= u2 * f2 {
        return Ok(None);
    }
    // Beyond the last cutoff the integrand is a pure germ.
    let tail = match ev.split(u3) {
        Some(Split { k, rest }) if k[0].is_zero() && k[1].is_zero() && k[2].is_zero() => {
            let d = q_to_f64(k[3]);
            rest.exp() * (1.0 + u3).powf(d + 1.0) / (-d - 1.0)
        }
        Some(_) => {
            let mut acc = 0.0;
            let mut lo = u3;
            for _ in 0..40 {
                let hi = 2.0 * lo;
                let (v, e) = integrate(&f, &[lo, hi], cfg)?;
                acc += v;
                err_total += e;
                lo = hi;
                if v <= 1e-3 * cfg.rel_tol * (total + acc) {
                    break;
                }
            }
            acc
        }
        None => 0.0,
    };
    Ok(Some((total + tail, err_total)))
}

fn geometric_cuts(lo: f64, hi: f64) -> Vec<f64> {
    let mut v = vec![lo];
    let mut x = lo;
    while 2.0 * x < hi {
        x *= 2.0;
        v.push(x);
    }
    v.push(hi);
    v
}

fn sup_norm(ig: &WeightedIntegrand, cuts: Vec<f64>, u_hi: f64, cfg: &QuadratureConfig) -> Result<NormResult> {
    let ev = Evaluator { base: &ig.base, weight: ig.weight, power: Q::one(), jacobian: false };
    let g = |u: f64| ev.ln_at(u);
    let dense_end = u_hi.min(cfg.inner_cutoffs[0]);
    let u_lo = cuts[0];
    let per_unit = (cfg.sup_grid_points_per_decade as f64 * 4.0).max(16.0);
    let mut pts: Vec<f64> = Vec::new();
    let n = ((dense_end - u_lo) * per_unit).ceil().max(8.0) as usize;
    for j in 0..=n {
        pts.push(u_lo + (dense_end - u_lo) * j as f64 / n as f64);
    }
    // One-sided limits at piece boundaries.
    for &c in &cuts[1..] {
        let d = 1e-12 * c.max(1e-3);
        pts.extend([c - d, c + d]);
    }
    let deep: Vec<f64> = if u_hi.is_infinite() { cfg.inner_cutoffs.clone() } else { vec![] };
    pts.extend(deep.iter().copied());
    pts.retain(|&u| u >= u_lo && u <= u_hi);
    let vals: Vec<f64> = pts.iter().map(|&u| g(u)).collect();
    if vals.iter().any(|v| v.is_nan()) {
        return Err(Error::Quadrature { best: f64::NAN });
    }
    if u_hi.is_infinite() {
        let k = deep.len();
        let (l2, l3) = (g(deep[k - 2]), g(deep[k - 1]));
        if l3 == f64::INFINITY || (l3 > f64::NEG_INFINITY && l3 > l2 + 1e-12 * l2.abs().max(1.0)) {
            return Ok(NormResult::divergent());
        }
    }
    let (imax, &lmax) = vals.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    if lmax == f64::NEG_INFINITY {
        return Ok(NormResult { value: NormValue::Finite(0.0), rel_tol_achieved: 0.0 });
    }
    // Golden-section refinement between the neighbours of the best grid point,
    // kept inside one piece.
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&i, &j| pts[i].total_cmp(&pts[j]));
    let pos = order.iter().position(|&i| i == imax).unwrap();
    let lo = pts[order[pos.saturating_sub(1)]];
    let hi = pts[order[(pos + 1).min(order.len() - 1)]];
    let crosses = cuts[1..].iter().any(|&c| c > lo && c < hi);
    let mut best = lmax;
    if !crosses && hi > lo {
        let (mut x0, mut x1) = (lo, hi);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let a = x1 - phi * (x1 - x0);
            let b = x0 + phi * (x1 - x0);
            if g(a) > g(b) {
                x1 = b;
            } else {
                x0 = a;
            }
        }
        best = best.max(g(0.5 * (x0 + x1)));
    }
    Ok(NormResult { value: NormValue::Finite(best.exp()), rel_tol_achieved: cfg.rel_tol })
}

/// `f*` and `f**` of a function, in closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct Rearranged {
    pub star: Piecewise,
    pub double_star: Piecewise,
}

impl Rearranged {
    pub fn of_step(f: &StepFunction) -> Self {
        Rearranged { star: decreasing_rearrangement(f).as_piecewise(), double_star: maximal_rearrangement(f) }
    }
}

/// The defining functional of `desc` applied to a function given by its rearrangements.
pub fn glz_functional(desc: &SpaceDescriptor, f: &Rearranged, cfg: &QuadratureConfig) -> Result<NormResult> {
    let base = match desc.kind {
        SpaceKind::DoubleStar => &f.double_star,
        _ => &f.star,
    };
    let ig = WeightedIntegrand::new(Base::Piecewise(base.clone()), desc.weight(), (0.0, 1.0), desc.q)?;
    weighted_lq_norm(&ig, cfg)
}

/// `‖f‖_X` for a step function, using exact `f*` or `f**`.
pub fn glz_norm_numeric(f: &StepFunction, desc: &SpaceDescriptor, cfg: &QuadratureConfig) -> Result<NormResult> {
    if validate(desc).status == ValidationStatus::Invalid {
        return Err(Error::InvalidSpace(desc.to_string()));
    }
    glz_functional(desc, &Rearranged::of_step(f), cfg)
}

/// `φ_X(r) = ‖χ_{(0,r)}‖_X`.
pub fn fundamental_function_numeric(desc: &SpaceDescriptor, r: f64, cfg: &QuadratureConfig) -> Result<NormResult> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("r = {r} not in (0,1)")));
    }
    glz_norm_numeric(&StepFunction::indicator(0.0, r)?, desc, cfg)
}
