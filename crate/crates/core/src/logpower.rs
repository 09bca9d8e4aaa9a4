//! Log-power germs `r^λ ℓ^{e1} ℓℓ^{e2} ℓℓℓ^{e3}` at `r → 0⁺` and the
//! closed-form head and tail norms of `Ψ_{λ;q,α,β}`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{fmt_q, q_to_f64, serde_q, signum, ExtendedRational, Q};
use crate::{Error, Result};

/// `(ℓ(s), ℓℓ(s), ℓℓℓ(s))` for `s ∈ (0,1)`.
pub fn ell_chain(s: f64) -> Result<(f64, f64, f64)> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("ell_chain needs 0 < s < 1, got {s}")));
    }
    Ok(ell_chain_from_t(-s.ln()))
}

/// Same chain from `t = log(1/s) ≥ 0`; usable far below `f64::MIN_POSITIVE`.
pub fn ell_chain_from_t(t: f64) -> (f64, f64, f64) {
    let l1 = t.ln_1p();
    let l2 = l1.ln_1p();
    (1.0 + t, 1.0 + l1, 1.0 + l2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LogPowerForm {
    pub divergent: bool,
    #[serde(with = "serde_q")]
    pub lambda: Q,
    #[serde(with = "serde_q")]
    pub e1: Q,
    #[serde(with = "serde_q")]
    pub e2: Q,
    #[serde(with = "serde_q")]
    pub e3: Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Comparison {
    StrictlySmaller,
    Equivalent,
    StrictlyLarger,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Limit {
    TendsToZero,
    BoundedNonzero,
    TendsToInfinity,
}

impl LogPowerForm {
    pub fn new(lambda: Q, e1: Q, e2: Q, e3: Q) -> Self {
        LogPowerForm { divergent: false, lambda, e1, e2, e3 }
    }

    /// The constant germ `1`.
    pub fn one() -> Self {
        Self::new(Q::zero(), Q::zero(), Q::zero(), Q::zero())
    }

    pub fn divergent() -> Self {
        LogPowerForm { divergent: true, ..Self::one() }
    }

    pub fn power(lambda: Q) -> Self {
        Self::new(lambda, Q::zero(), Q::zero(), Q::zero())
    }

    /// `r^λ ℓ^{e1} ℓℓ^{e2}`.
    pub fn r_l_ll(lambda: Q, e1: Q, e2: Q) -> Self {
        Self::new(lambda, e1, e2, Q::zero())
    }

    pub fn l(e1: Q) -> Self {
        Self::new(Q::zero(), e1, Q::zero(), Q::zero())
    }

    pub fn ll(e2: Q) -> Self {
        Self::new(Q::zero(), Q::zero(), e2, Q::zero())
    }

    pub fn lll(e3: Q) -> Self {
        Self::new(Q::zero(), Q::zero(), Q::zero(), e3)
    }

    fn exps(&self) -> [Q; 4] {
        [self.lambda, self.e1, self.e2, self.e3]
    }

    pub fn inverse(self) -> Result<Self> {
        if self.divergent {
            return Err(Error::DivergentForm);
        }
        Ok(Self::new(-self.lambda, -self.e1, -self.e2, -self.e3))
    }

    /// Multiplies by `r^c`.
    pub fn times_power(self, c: Q) -> Self {
        self * Self::power(c)
    }

    /// Asymptotic class of the sum: the larger germ, or divergent if either is.
    pub fn plus(self, other: Self) -> Self {
        if self.divergent || other.divergent {
            return Self::divergent();
        }
        match lpf_compare_unchecked(self, other) {
            Ordering::Less => other,
            _ => self,
        }
    }

    /// Germ of `r ↦ f(r^k)`. Logarithms only change by constant factors.
    pub fn substitute_power(self, k: Q) -> Self {
        if self.divergent {
            return self;
        }
        Self { lambda: self.lambda * k, ..self }
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        lpf_eval(*self, r)
    }

    /// Natural log of the value at `s = e^{−t}`; avoids underflow deep near 0.
    pub fn ln_eval_at_t(&self, t: f64) -> f64 {
        let (l1, l2, l3) = ell_chain_from_t(t);
        -q_to_f64(self.lambda) * t
            + q_to_f64(self.e1) * l1.ln()
            + q_to_f64(self.e2) * l2.ln()
            + q_to_f64(self.e3) * l3.ln()
    }

    pub fn compare(&self, other: &Self) -> Result<Comparison> {
        lpf_compare(*self, *other)
    }

    pub fn limit_zero(&self) -> Result<Limit> {
        lpf_limit_zero(*self)
    }

    pub fn is_equivalent(&self, other: &Self) -> bool {
        !self.divergent && !other.divergent && self.exps() == other.exps()
    }
}

impl fmt::Display for LogPowerForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.divergent {
            return f.write_str("∞");
        }
        let mut parts = Vec::new();
        for (name, e) in [("r", self.lambda), ("ℓ", self.e1), ("ℓℓ", self.e2), ("ℓℓℓ", self.e3)] {
            if e.is_zero() {
                continue;
            }
            if e.is_one() {
                parts.push(name.to_string());
            } else {
                parts.push(format!("{name}^({})", fmt_q(e)));
            }
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("·"))
        }
    }
}

/// Product of germs; divergence is absorbing.
impl std::ops::Mul for LogPowerForm {
    type Output = Self;
    fn mul(self, other: Self) -> Self {
        if self.divergent || other.divergent {
            return Self::divergent();
        }
        Self::new(self.lambda + other.lambda, self.e1 + other.e1, self.e2 + other.e2, self.e3 + other.e3)
    }
}

pub fn lpf_eval(form: LogPowerForm, r: f64) -> Result<f64> {
    if form.divergent {
        return Err(Error::DivergentForm);
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("lpf_eval needs 0 < r < 1, got {r}")));
    }
    Ok(form.ln_eval_at_t(-r.ln()).exp())
}

fn lpf_compare_unchecked(a: LogPowerForm, b: LogPowerForm) -> Ordering {
    // A larger power of r is the smaller germ; logs grow, so larger exponents are larger germs.
    b.lambda.cmp(&a.lambda).then(a.e1.cmp(&b.e1)).then(a.e2.cmp(&b.e2)).then(a.e3.cmp(&b.e3))
}

pub fn lpf_compare(a: LogPowerForm, b: LogPowerForm) -> Result<Comparison> {
    if a.divergent || b.divergent {
        return Err(Error::DivergentForm);
    }
    Ok(match lpf_compare_unchecked(a, b) {
        Ordering::Less => Comparison::StrictlySmaller,
        Ordering::Equal => Comparison::Equivalent,
        Ordering::Greater => Comparison::StrictlyLarger,
    })
}

pub fn lpf_limit_zero(form: LogPowerForm) -> Result<Limit> {
    if form.divergent {
        return Err(Error::DivergentForm);
    }
    if !form.lambda.is_zero() {
        return Ok(if signum(form.lambda) > 0 { Limit::TendsToZero } else { Limit::TendsToInfinity });
    }
    for e in [form.e1, form.e2, form.e3] {
        match signum(e) {
            0 => continue,
            s if s < 0 => return Ok(Limit::TendsToZero),
            _ => return Ok(Limit::TendsToInfinity),
        }
    }
    Ok(Limit::BoundedNonzero)
}

/// Whether `∫₀ s^{−1} φ(s) ds < ∞`.
pub fn dini_integrable(form: LogPowerForm) -> Result<bool> {
    if form.divergent {
        return Err(Error::DivergentForm);
    }
    let m1 = -Q::one();
    Ok(form.lambda > Q::zero()
        || (form.lambda.is_zero()
            && (form.e1 < m1 || (form.e1 == m1 && form.e2 < m1) || (form.e1 == m1 && form.e2 == m1 && form.e3 < m1))))
}

/// Parameters of `Ψ_{λ;q,α,β}(s) ℓℓℓ^{−γ}(s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PsiParams {
    #[serde(with = "serde_q")]
    pub lambda: Q,
    pub q: ExtendedRational,
    #[serde(with = "serde_q")]
    pub alpha: Q,
    #[serde(with = "serde_q")]
    pub beta: Q,
    #[serde(with = "serde_q", default)]
    pub gamma: Q,
}

impl PsiParams {
    pub fn new(lambda: Q, q: ExtendedRational, alpha: Q, beta: Q) -> Self {
        PsiParams { lambda, q, alpha, beta, gamma: Q::zero() }
    }

    pub fn with_gamma(self, gamma: Q) -> Self {
        PsiParams { gamma, ..self }
    }

    /// `1/q′`, which is 0 for `q = 1` and 1 for `q = ∞`.
    pub fn a(&self) -> Q {
        self.q.conjugate().recip()
    }

    /// The integration exponent `q′`.
    pub fn q_conj(&self) -> ExtendedRational {
        self.q.conjugate()
    }

    /// Exponents of the integrand `s^{λ−1/q′} ℓ^{−α} ℓℓ^{−β} ℓℓℓ^{−γ}`.
    pub fn integrand(&self) -> LogPowerForm {
        LogPowerForm::new(self.lambda - self.a(), -self.alpha, -self.beta, -self.gamma)
    }

    fn check_valid(&self) -> Result<()> {
        if self.q < ExtendedRational::int(1) {
            return Err(Error::Domain(format!("q must lie in [1,∞], got {}", self.q)));
        }
        Ok(())
    }

    fn is_three_log_pattern(&self) -> bool {
        let a = self.a();
        !self.q.is_infinite() && self.alpha == a && self.beta == a && self.gamma.is_one()
    }
}

/// Which row of the head-norm table a parameter set falls in, numbered 1–8
/// in the order: λ<0; λ=0,α<a; λ=0,α=a,β<a; λ=0,q>1,α=β=a; λ=0,q=1,α=β=0;
/// λ=0,α=a,β>a; λ=0,α>a; λ>0 (here a = 1/q′). Returns 0 for the three-log rows.
pub fn head_line(p: &PsiParams) -> u8 {
    if !p.gamma.is_zero() {
        return 0;
    }
    let a = p.a();
    let q_is_one = p.q == ExtendedRational::int(1);
    match signum(p.lambda) {
        -1 => 1,
        1 => 8,
        _ if p.alpha < a => 2,
        _ if p.alpha == a && p.beta < a => 3,
        _ if p.alpha == a && p.beta == a && !q_is_one => 4,
        _ if p.alpha == a && p.beta == a => 5,
        _ if p.alpha == a => 6,
        _ => 7,
    }
}

/// Row of the tail-norm table, numbered 1–8: λ<0; λ=0,α<a; λ=0,α=a,β<a;
/// λ=0,q>1,α=β=a; λ=0,q=1,α=β=0; λ=0,α=a,β>a; λ=0,α>a; λ>0.
pub fn tail_line(p: &PsiParams) -> u8 {
    head_line(p)
}

/// `‖Ψ‖_{L^{q′}(0,r)}` near 0.
pub fn symbolic_head_norm(p: &PsiParams) -> Result<LogPowerForm> {
    p.check_valid()?;
    let a = p.a();
    if !p.gamma.is_zero() {
        // A nonzero power of s dominates any ℓℓℓ factor.
        return match signum(p.lambda) {
            -1 => Ok(LogPowerForm::divergent()),
            1 => Ok(LogPowerForm::new(p.lambda, -p.alpha, -p.beta, -p.gamma)),
            _ if p.is_three_log_pattern() => Ok(LogPowerForm::lll(-p.q.recip())),
            _ => Err(Error::ThreeLogPattern("head")),
        };
    }
    Ok(match head_line(p) {
        1..=4 => LogPowerForm::divergent(),
        5 => LogPowerForm::one(),
        6 => LogPowerForm::ll(a - p.beta),
        7 => LogPowerForm::r_l_ll(Q::zero(), a - p.alpha, -p.beta),
        _ => LogPowerForm::r_l_ll(p.lambda, -p.alpha, -p.beta),
    })
}

/// `‖Ψ‖_{L^{q′}(r,1−r)}` near 0.
pub fn symbolic_tail_norm(p: &PsiParams) -> Result<LogPowerForm> {
    p.check_valid()?;
    let a = p.a();
    if !p.gamma.is_zero() {
        return match signum(p.lambda) {
            -1 => Ok(LogPowerForm::new(p.lambda, -p.alpha, -p.beta, -p.gamma)),
            1 => Ok(LogPowerForm::one()),
            _ => Err(Error::ThreeLogPattern("tail")),
        };
    }
    Ok(match tail_line(p) {
        1 => LogPowerForm::r_l_ll(p.lambda, -p.alpha, -p.beta),
        2 => LogPowerForm::r_l_ll(Q::zero(), a - p.alpha, -p.beta),
        3 => LogPowerForm::ll(a - p.beta),
        4 => LogPowerForm::lll(a),
        _ => LogPowerForm::one(),
    })
}

/// Kernel of the `L¹` transforms: `s^{−1}φ(s) = Ψ_{λ;∞,−e1,−e2}(s) ℓℓℓ^{e3}(s)`.
pub fn l1_kernel(form: &LogPowerForm) -> PsiParams {
    PsiParams::new(form.lambda, ExtendedRational::Infinity, -form.e1, -form.e2).with_gamma(-form.e3)
}

/// `σ_φ(r) = ‖s^{−1}φ(s)‖_{L¹(0,r)}`. For `e3 = 0` this is the head norm of
/// [`l1_kernel`]; the `ℓℓℓ` factor is integrated level by level.
pub fn spanne_transform(form: LogPowerForm) -> LogPowerForm {
    if form.divergent {
        return form;
    }
    let m1 = -Q::one();
    let LogPowerForm { lambda, e1, e2, e3, .. } = form;
    match signum(lambda) {
        1 => return form,
        -1 => return LogPowerForm::divergent(),
        _ => {}
    }
    if e1 < m1 {
        LogPowerForm::new(Q::zero(), e1 + 1, e2, e3)
    } else if e1 > m1 {
        LogPowerForm::divergent()
    } else if e2 < m1 {
        LogPowerForm::new(Q::zero(), Q::zero(), e2 + 1, e3)
    } else if e2 > m1 || e3 >= m1 {
        LogPowerForm::divergent()
    } else {
        LogPowerForm::lll(e3 + 1)
    }
}

/// `φ_ψ(r) = ‖s^{−1}ψ(s)‖_{L¹(r,1)}`; the tail norm of [`l1_kernel`] when
/// `e3 = 0`. The one germ it cannot express is `log ℓℓℓ`, from `ℓ^{-1}ℓℓ^{-1}ℓℓℓ^{-1}`.
pub fn campanato_to_morrey_transform(form: LogPowerForm) -> Result<LogPowerForm> {
    if form.divergent {
        return Ok(form);
    }
    let m1 = -Q::one();
    let LogPowerForm { lambda, e1, e2, e3, .. } = form;
    Ok(match signum(lambda) {
        1 => LogPowerForm::one(),
        -1 => form,
        _ if e1 > m1 => LogPowerForm::new(Q::zero(), e1 + 1, e2, e3),
        _ if e1 < m1 => LogPowerForm::one(),
        _ if e2 > m1 => LogPowerForm::new(Q::zero(), Q::zero(), e2 + 1, e3),
        _ if e2 < m1 => LogPowerForm::one(),
        _ if e3 > m1 => LogPowerForm::lll(e3 + 1),
        _ if e3 < m1 => LogPowerForm::one(),
        _ => return Err(Error::Uncovered("log of ℓℓℓ".into())),
    })
}
