//! GLZ space descriptors: validity, canonical forms, associates and symbolic
//! fundamental functions.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::logpower::{symbolic_head_norm, symbolic_tail_norm, LogPowerForm, PsiParams};
use crate::rational::{fmt_q, parse_q, ExtendedRational, Q};
use crate::{Error, Result};

use ExtendedRational::{Finite, Infinity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceKind {
    /// `‖s^{1/p−1/q}ℓ^αℓℓ^β f*‖_{L^q}`.
    #[serde(rename = "star")]
    Star,
    /// The same with `f**`.
    #[serde(rename = "doublestar")]
    DoubleStar,
    /// Star functional with an extra `ℓℓℓ^γ`.
    #[serde(rename = "glz5")]
    Glz5,
    #[serde(rename = "linf")]
    LInfinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpaceDescriptor {
    pub kind: SpaceKind,
    pub p: ExtendedRational,
    pub q: ExtendedRational,
    pub alpha: Q,
    pub beta: Q,
    pub gamma: Q,
}

fn one() -> ExtendedRational {
    ExtendedRational::int(1)
}

impl SpaceDescriptor {
    pub fn star(p: ExtendedRational, q: ExtendedRational, alpha: Q, beta: Q) -> Self {
        SpaceDescriptor { kind: SpaceKind::Star, p, q, alpha, beta, gamma: Q::zero() }
    }

    pub fn double_star(p: ExtendedRational, q: ExtendedRational, alpha: Q, beta: Q) -> Self {
        SpaceDescriptor { kind: SpaceKind::DoubleStar, p, q, alpha, beta, gamma: Q::zero() }
    }

    pub fn glz5(p: ExtendedRational, q: ExtendedRational, alpha: Q, beta: Q, gamma: Q) -> Self {
        SpaceDescriptor { kind: SpaceKind::Glz5, p, q, alpha, beta, gamma }
    }

    pub fn linf() -> Self {
        SpaceDescriptor {
            kind: SpaceKind::LInfinity,
            p: Infinity,
            q: Infinity,
            alpha: Q::zero(),
            beta: Q::zero(),
            gamma: Q::zero(),
        }
    }

    pub fn l1() -> Self {
        Self::star(one(), one(), Q::zero(), Q::zero())
    }

    /// Weight `s^{1/p−1/q}ℓ^αℓℓ^βℓℓℓ^γ` of the defining functional.
    pub fn weight(&self) -> LogPowerForm {
        LogPowerForm::new(self.p.recip() - self.q.recip(), self.alpha, self.beta, self.gamma)
    }

    /// `1/q′`.
    fn a(&self) -> Q {
        self.q.conjugate().recip()
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q, a, b) = (self.p, self.q, fmt_q(self.alpha), fmt_q(self.beta));
        match self.kind {
            SpaceKind::Star => write!(f, "L({p},{q};{a},{b})"),
            SpaceKind::DoubleStar => write!(f, "L*({p},{q};{a},{b})"),
            SpaceKind::Glz5 => write!(f, "L({p},{q};{a},{b},{})", fmt_q(self.gamma)),
            SpaceKind::LInfinity => f.write_str("Linf"),
        }
    }
}

pub const SHORTHAND_GRAMMAR: &str =
    "expected \"L(p,q;a,b)\" (star), \"L*(p,q;a,b)\" (double-star), \"L(p,q;a,b,g)\" (five-parameter) or \"Linf\"; p, q may be \"inf\"";

impl FromStr for SpaceDescriptor {
    type Err = Error;

    /// Accepts the shorthand or the JSON object form.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()));
        }
        let bad = || Error::Parse(format!("malformed space {s:?}: {SHORTHAND_GRAMMAR}"));
        if s.eq_ignore_ascii_case("linf") {
            return Ok(Self::linf());
        }
        let (double, rest) = if let Some(r) = s.strip_prefix("L*") {
            (true, r)
        } else if let Some(r) = s.strip_prefix('L') {
            (false, r)
        } else {
            return Err(bad());
        };
        let inner = rest.trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let (pq, logs) = inner.split_once(';').ok_or_else(bad)?;
        let pq: Vec<&str> = pq.split(',').collect();
        let logs: Vec<&str> = logs.split(',').collect();
        if pq.len() != 2 || !(logs.len() == 2 || (logs.len() == 3 && !double)) {
            return Err(bad());
        }
        let ext = |x: &str| x.parse::<ExtendedRational>().map_err(|_| bad());
        let rat = |x: &str| parse_q(x).map_err(|_| bad());
        let (p, q) = (ext(pq[0])?, ext(pq[1])?);
        let (a, b) = (rat(logs[0])?, rat(logs[1])?);
        Ok(match (double, logs.len()) {
            (true, _) => Self::double_star(p, q, a, b),
            (false, 3) => Self::glz5(p, q, a, b, rat(logs[2])?),
            _ => Self::star(p, q, a, b),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    kind: SpaceKind,
    #[serde(default = "inf_string")]
    p: String,
    #[serde(default = "inf_string")]
    q: String,
    #[serde(default)]
    alpha: Option<serde_json::Value>,
    #[serde(default)]
    beta: Option<serde_json::Value>,
    #[serde(default)]
    gamma: Option<serde_json::Value>,
}

fn inf_string() -> String {
    "inf".into()
}

fn rational_field(v: &Option<serde_json::Value>) -> std::result::Result<Q, String> {
    match v {
        None => Ok(Q::zero()),
        Some(serde_json::Value::String(s)) => parse_q(s).map_err(|e| e.to_string()),
        Some(serde_json::Value::Number(n)) => parse_q(&n.to_string()).map_err(|e| e.to_string()),
        Some(other) => Err(format!("expected a rational, got {other}")),
    }
}

impl Serialize for SpaceDescriptor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let str_q = |x: Q| Some(serde_json::Value::String(fmt_q(x)));
        RawSpace {
            kind: self.kind,
            p: self.p.to_string(),
            q: self.q.to_string(),
            alpha: str_q(self.alpha),
            beta: str_q(self.beta),
            gamma: str_q(self.gamma),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpaceDescriptor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawSpace::deserialize(d)?;
        let p: ExtendedRational = raw.p.parse().map_err(D::Error::custom)?;
        let q: ExtendedRational = raw.q.parse().map_err(D::Error::custom)?;
        let alpha = rational_field(&raw.alpha).map_err(D::Error::custom)?;
        let beta = rational_field(&raw.beta).map_err(D::Error::custom)?;
        let gamma = rational_field(&raw.gamma).map_err(D::Error::custom)?;
        Ok(match raw.kind {
            SpaceKind::LInfinity => SpaceDescriptor::linf(),
            SpaceKind::Glz5 => SpaceDescriptor::glz5(p, q, alpha, beta, gamma),
            SpaceKind::Star => SpaceDescriptor::star(p, q, alpha, beta),
            SpaceKind::DoubleStar => SpaceDescriptor::double_star(p, q, alpha, beta),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ValidationStatus {
    ValidNorm,
    CollapsesToL1,
    RewritesToStar,
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationResult {
    pub status: ValidationStatus,
    pub canonical: Option<SpaceDescriptor>,
    /// 1-based row of the matched list of alternatives.
    pub matched_alternative: Option<u8>,
    /// The matched row, in words.
    pub alternative: String,
}

impl ValidationResult {
    fn new(status: ValidationStatus, canonical: Option<SpaceDescriptor>, row: Option<u8>, text: &str) -> Self {
        ValidationResult { status, canonical, matched_alternative: row, alternative: text.to_string() }
    }
}

pub const INVALID_STAR_MESSAGE: &str = "invalid parameters: not one of the admissible alternatives for this space type";

/// Row of the star-functional validity list, or `None`.
pub fn star_alternative(p: ExtendedRational, q: ExtendedRational, alpha: Q, beta: Q) -> Option<(u8, &'static str)> {
    if q < one() || p <= Finite(Q::zero()) {
        return None;
    }
    let inv_q = q.recip();
    let zero = Q::zero();
    if p == one() && q == one() {
        return if alpha == zero && beta >= zero {
            Some((1, "p = q = 1, alpha = 0, beta >= 0"))
        } else if alpha > zero {
            Some((2, "p = q = 1, alpha > 0"))
        } else {
            None
        };
    }
    match p {
        Finite(x) if x > Q::one() => Some((3, "p in (1,inf)")),
        Infinity if alpha < -inv_q => Some((4, "p = inf, alpha < -1/q")),
        Infinity if alpha == -inv_q && beta < -inv_q => Some((5, "p = inf, alpha = -1/q, beta < -1/q")),
        Infinity if q.is_infinite() && alpha.is_zero() && beta.is_zero() => Some((6, "p = q = inf, alpha = beta = 0")),
        _ => None,
    }
}

/// Row of the `p = 1` double-star list, or `None`.
pub fn double_star_l1_alternative(q: ExtendedRational, alpha: Q, beta: Q) -> Option<(u8, &'static str)> {
    if q < one() {
        return None;
    }
    let inv_q = q.recip();
    if alpha > -inv_q {
        Some((1, "p = 1, alpha > -1/q"))
    } else if alpha == -inv_q && beta > -inv_q {
        Some((2, "p = 1, alpha = -1/q, beta > -1/q"))
    } else if !q.is_infinite() && alpha == -inv_q && beta == -inv_q {
        Some((3, "p = 1, q < inf, alpha = beta = -1/q"))
    } else {
        None
    }
}

/// Whether `‖s^{−1/q}ℓ^αℓℓ^βℓℓℓ^γ‖_{L^q(0,1)}` is finite.
pub fn five_parameter_endpoint_finite(q: ExtendedRational, alpha: Q, beta: Q, gamma: Q) -> bool {
    let exps = [alpha, beta, gamma];
    match q {
        // sup of ℓ^αℓℓ^βℓℓℓ^γ: bounded iff the first nonzero exponent is negative.
        Infinity => exps.iter().find(|e| !e.is_zero()).is_none_or(|e| *e < Q::zero()),
        // ∫ s^{−1}ℓ^{αq}ℓℓ^{βq}ℓℓℓ^{γq}: converges iff the first exponent ≠ −1 is < −1.
        Finite(qq) => exps.iter().map(|e| *e * qq).find(|e| *e != -Q::one()).is_some_and(|e| e < -Q::one()),
    }
}

pub fn validate(desc: &SpaceDescriptor) -> ValidationResult {
    use ValidationStatus::*;
    let d = *desc;
    let invalid = ValidationResult::new(Invalid, None, None, INVALID_STAR_MESSAGE);
    match d.kind {
        SpaceKind::LInfinity => ValidationResult::new(ValidNorm, Some(d), Some(6), "L^inf"),
        SpaceKind::Star => match star_alternative(d.p, d.q, d.alpha, d.beta) {
            Some((6, text)) => ValidationResult::new(ValidNorm, Some(SpaceDescriptor::linf()), Some(6), text),
            Some((row, text)) => ValidationResult::new(ValidNorm, Some(d), Some(row), text),
            None => invalid,
        },
        SpaceKind::Glz5 => {
            if d.gamma.is_zero() {
                let mut r = validate(&SpaceDescriptor::star(d.p, d.q, d.alpha, d.beta));
                if r.status == ValidNorm {
                    r.status = RewritesToStar;
                }
                return r;
            }
            if d.q < one() {
                return invalid;
            }
            match d.p {
                Finite(x) if x > Q::one() => ValidationResult::new(ValidNorm, Some(d), Some(1), "p in (1,inf)"),
                Infinity if five_parameter_endpoint_finite(d.q, d.alpha, d.beta, d.gamma) => {
                    ValidationResult::new(ValidNorm, Some(d), Some(2), "p = inf, finite endpoint weight")
                }
                _ => invalid,
            }
        }
        SpaceKind::DoubleStar => {
            if d.q < one() || d.p <= Finite(Q::zero()) {
                return invalid;
            }
            let inv_q = d.q.recip();
            let l1 = Some(SpaceDescriptor::l1());
            match d.p {
                Finite(x) if x < Q::one() => ValidationResult::new(CollapsesToL1, l1, Some(1), "p in (0,1)"),
                Finite(x) if x == Q::one() => {
                    if let Some((row, text)) = double_star_l1_alternative(d.q, d.alpha, d.beta) {
                        ValidationResult::new(ValidNorm, Some(d), Some(row), text)
                    } else if d.alpha < -inv_q {
                        ValidationResult::new(CollapsesToL1, l1, Some(2), "p = 1, alpha < -1/q")
                    } else if d.alpha == -inv_q && d.beta < -inv_q {
                        ValidationResult::new(CollapsesToL1, l1, Some(3), "p = 1, alpha = -1/q, beta < -1/q")
                    } else {
                        ValidationResult::new(CollapsesToL1, l1, Some(4), "p = 1, q = inf, alpha = beta = 0")
                    }
                }
                _ => match star_alternative(d.p, d.q, d.alpha, d.beta) {
                    Some((row, text)) => {
                        let star = SpaceDescriptor::star(d.p, d.q, d.alpha, d.beta);
                        let canon = validate(&star).canonical;
                        ValidationResult::new(RewritesToStar, canon, Some(row.saturating_sub(2)), text)
                    }
                    None => invalid,
                },
            }
        }
    }
}

/// The canonical descriptor, or an error for invalid parameters.
pub fn canonical(desc: &SpaceDescriptor) -> Result<SpaceDescriptor> {
    validate(desc).canonical.ok_or_else(|| Error::InvalidSpace(format!("{desc}: {INVALID_STAR_MESSAGE}")))
}

/// Associate space by table lookup.
pub fn associate(desc: &SpaceDescriptor) -> Result<SpaceDescriptor> {
    let d = canonical(desc)?;
    let not_tab = || Error::NotTabulated(format!("{d}: associate not tabulated"));
    let (p, q, al, be) = (d.p, d.q, d.alpha, d.beta);
    let out = match d.kind {
        SpaceKind::LInfinity => SpaceDescriptor::l1(),
        SpaceKind::Glz5 => return Err(not_tab()),
        SpaceKind::Star => {
            let inv_q = q.recip();
            if p.is_infinite() && !q.is_infinite() {
                if al < -inv_q {
                    SpaceDescriptor::double_star(one(), q.conjugate(), -al - Q::one(), -be)
                } else {
                    SpaceDescriptor::double_star(one(), q.conjugate(), -q.conjugate().recip(), -be - Q::one())
                }
            } else {
                SpaceDescriptor::star(p.conjugate(), q.conjugate(), -al, -be)
            }
        }
        SpaceKind::DoubleStar => {
            let inv_q = q.recip();
            let qc = q.conjugate();
            let a = d.a();
            if al > -inv_q {
                SpaceDescriptor::star(Infinity, qc, -al - Q::one(), -be)
            } else if be > -inv_q {
                SpaceDescriptor::star(Infinity, qc, -a, -be - Q::one())
            } else {
                SpaceDescriptor::glz5(Infinity, qc, -a, -a, -Q::one())
            }
        }
    };
    canonical(&out)
}

/// A nonnegative, nonincreasing profile on `(0,1)` near `s = 0`, written in
/// terms of a small radius `R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Piece {
    /// `R^coef · s^mu` on `(0,R)`.
    Head { coef: Q, mu: Q },
    /// `R^coef · s^mu` on `(R,1)`.
    Tail { coef: Q, mu: Q },
}

/// Asymptotic class in `R` of `‖Σ pieces‖_X` where the pieces already form a
/// nonincreasing function (so they are their own decreasing rearrangement).
///
/// Each piece reduces to a kernel norm: the functional weight
/// `s^{1/P−1/Q}ℓ^Aℓℓ^Bℓℓℓ^Γ` times `s^μ` in `L^Q` equals `‖Ψ_{λ;q̃,α̃,β̃}ℓℓℓ^{−γ̃}‖_{L^{q̃′}}`
/// with `q̃ = Q′`, `α̃ = −A`, `β̃ = −B`, `γ̃ = −Γ`, `λ = 1/P + μ`. For a double-star
/// functional the pieces are first replaced by their running averages:
/// `(s^μχ_{(0,R)})** ≈ s^μχ_{(0,R)} + R^{μ+1}s^{−1}χ_{(R,1)}` and `(s^μχ_{(R,1)})** ≲ s^μχ_{(R,1)}`
/// (both need `μ > −1`). The norm of the sum is the largest of the piece norms.
pub fn norm_of_pieces(desc: &SpaceDescriptor, pieces: &[Piece]) -> Result<LogPowerForm> {
    let d = canonical(desc)?;
    let mut expanded = Vec::new();
    for &piece in pieces {
        expanded.push(piece);
        if d.kind == SpaceKind::DoubleStar {
            let (Piece::Head { mu, .. } | Piece::Tail { mu, .. }) = piece;
            if mu <= -Q::one() {
                return Err(Error::Domain(format!("running average of s^{} diverges", fmt_q(mu))));
            }
            if let Piece::Head { coef, mu } = piece {
                expanded.push(Piece::Tail { coef: coef + mu + Q::one(), mu: -Q::one() });
            }
        }
    }
    let mut total: Option<LogPowerForm> = None;
    for piece in expanded {
        let (head, coef, mu) = match piece {
            Piece::Head { coef, mu } => (true, coef, mu),
            Piece::Tail { coef, mu } => (false, coef, mu),
        };
        let psi = PsiParams::new(d.p.recip() + mu, d.q.conjugate(), -d.alpha, -d.beta).with_gamma(-d.gamma);
        let norm = if head { symbolic_head_norm(&psi)? } else { symbolic_tail_norm(&psi)? };
        let norm = if norm.divergent { norm } else { norm.times_power(coef) };
        total = Some(match total {
            None => norm,
            Some(t) => t.plus(norm),
        });
    }
    total.ok_or_else(|| Error::Domain("no pieces".into()))
}

/// `φ_X(r) = ‖χ_{(0,r)}‖_X` near 0.
pub fn fundamental_function_symbolic(desc: &SpaceDescriptor) -> Result<LogPowerForm> {
    norm_of_pieces(desc, &[Piece::Head { coef: Q::zero(), mu: Q::zero() }])
}
