//! Optimal targets for `W^m X` with `X` a GLZ space: exact table dispatch,
//! plus an independent re-derivation of each answer from kernel norms in `X′`.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::logpower::{Comparison, Limit, LogPowerForm};
use crate::rational::{ExtendedRational, Q};
use crate::space::{
    associate, canonical, fundamental_function_symbolic, norm_of_pieces, Piece, SpaceDescriptor, SpaceKind,
};
use crate::{Error, Result};

use ExtendedRational::{Finite, Infinity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EmbeddingQuery {
    pub m: u32,
    pub n: u32,
    pub space: SpaceDescriptor,
}

impl EmbeddingQuery {
    /// Validates the parameters and stores the canonical form of the space.
    pub fn new(m: u32, n: u32, space: SpaceDescriptor) -> Result<Self> {
        if n < 2 || m < 1 {
            return Err(Error::InvalidQuery(format!("need n >= 2 and m >= 1, got m = {m}, n = {n}")));
        }
        let space = canonical(&space)?;
        if space.kind == SpaceKind::Glz5 {
            return Err(Error::InvalidQuery(format!("{space}: five-parameter domains are outside the tables")));
        }
        Ok(EmbeddingQuery { m, n, space })
    }

    fn is_double_star(&self) -> bool {
        self.space.kind == SpaceKind::DoubleStar
    }

    /// The space as a star descriptor; `L^∞` becomes `L^{∞,∞;0,0}`.
    fn star(&self) -> SpaceDescriptor {
        match self.space.kind {
            SpaceKind::LInfinity => SpaceDescriptor::star(Infinity, Infinity, Q::zero(), Q::zero()),
            _ => self.space,
        }
    }

    fn ratio(&self, num: u32, den: u32) -> Q {
        Q::new(num as i64, den as i64)
    }
}

impl fmt::Display for EmbeddingQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={}, n={}, {}", self.m, self.n, self.space)
    }
}

/// The case tables, one per target class and order range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Table {
    RiStar,
    RiDoubleStar,
    Continuity,
    HolderFirst,
    HolderMiddle,
    HolderTop,
    HolderDoubleStar,
    MorreyStar,
    MorreyDoubleStar,
    CampanatoFirst,
    CampanatoMiddle,
    CampanatoTop,
    CampanatoDoubleStarFirst,
    CampanatoDoubleStarRest,
}

impl Table {
    pub const ALL: [Table; 14] = [
        Table::RiStar,
        Table::RiDoubleStar,
        Table::Continuity,
        Table::HolderFirst,
        Table::HolderMiddle,
        Table::HolderTop,
        Table::HolderDoubleStar,
        Table::MorreyStar,
        Table::MorreyDoubleStar,
        Table::CampanatoFirst,
        Table::CampanatoMiddle,
        Table::CampanatoTop,
        Table::CampanatoDoubleStarFirst,
        Table::CampanatoDoubleStarRest,
    ];

    /// Number of printed rows.
    pub fn lines(self) -> u8 {
        match self {
            Table::RiStar | Table::HolderMiddle | Table::HolderTop | Table::MorreyStar => 13,
            Table::HolderFirst => 6,
            Table::Continuity | Table::CampanatoFirst | Table::CampanatoMiddle => 4,
            Table::CampanatoTop => 2,
            _ => 3,
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Table::RiStar => "r.i. target, star domain",
            Table::RiDoubleStar => "r.i. target, double-star domain",
            Table::Continuity => "continuity, star domain",
            Table::HolderFirst => "modulus, m = 1",
            Table::HolderMiddle => "modulus, 2 <= m <= n-1",
            Table::HolderTop => "modulus, m = n",
            Table::HolderDoubleStar => "modulus, double-star domain, m = n",
            Table::MorreyStar => "Morrey, star domain",
            Table::MorreyDoubleStar => "Morrey, double-star domain",
            Table::CampanatoFirst => "Campanato, m = 1",
            Table::CampanatoMiddle => "Campanato, 2 <= m <= n-1",
            Table::CampanatoTop => "Campanato, m = n",
            Table::CampanatoDoubleStarFirst => "Campanato, double-star domain, m = 1",
            Table::CampanatoDoubleStarRest => "Campanato, double-star domain, 2 <= m <= n",
        }
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.title())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Payload {
    Space(SpaceDescriptor),
    Form(LogPowerForm),
    Bracket { lower: SpaceDescriptor, upper: SpaceDescriptor },
    NoEmbedding,
    Bool(bool),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetReport {
    pub payload: Payload,
    pub optimal: bool,
    pub not_glz: bool,
    pub case_line: String,
    /// Table and 1-based row; `None` for the trivial high-order cases.
    pub row: Option<(Table, u8)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl TargetReport {
    fn new(payload: Payload, row: Option<(Table, u8)>, condition: &str) -> Self {
        let case_line = match row {
            Some((t, k)) => format!("{t}, row {k}: {condition}"),
            None => condition.to_string(),
        };
        TargetReport { payload, optimal: true, not_glz: false, case_line, row, note: None }
    }

    pub fn form(&self) -> Option<LogPowerForm> {
        match self.payload {
            Payload::Form(f) => Some(f),
            _ => None,
        }
    }
}

pub const OPEN_PROBLEM_NOTE: &str = "for q > 1 the optimal r.i. target of a double-star domain is not a GLZ space and \
     has no known closed description; it lies between the two reported spaces";

/// Position of the exponents of a valid star space relative to a critical
/// value `c > 1` of `p`, with `a = 1/q′`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Regime {
    /// `p = q = 1`, `α = 0`, `β ≥ 0`.
    UnitLog,
    /// `p = q = 1`, `α > 0`.
    UnitPositive,
    /// `1 < p < c`.
    Below,
    At(Edge),
    /// `c < p < ∞`.
    Above,
    /// `p = ∞`, rows: `α < −1/q`; `α = −1/q, β < −1/q`; `q = ∞, α = β = 0`.
    Infinite(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Edge {
    AlphaBelow,
    BetaBelow,
    Both,
    LorentzOne,
    BetaAbove,
    AlphaAbove,
}

impl Edge {
    /// Rows 1–6 in the order the tables list them at a critical exponent.
    fn index(self) -> u8 {
        match self {
            Edge::AlphaBelow => 1,
            Edge::BetaBelow => 2,
            Edge::Both => 3,
            Edge::LorentzOne => 4,
            Edge::BetaAbove => 5,
            Edge::AlphaAbove => 6,
        }
    }

    fn text(self) -> &'static str {
        match self {
            Edge::AlphaBelow => "alpha < 1/q'",
            Edge::BetaBelow => "alpha = 1/q', beta < 1/q'",
            Edge::Both => "q > 1, alpha = beta = 1/q'",
            Edge::LorentzOne => "q = 1, alpha = beta = 0",
            Edge::BetaAbove => "alpha = 1/q', beta > 1/q'",
            Edge::AlphaAbove => "alpha > 1/q'",
        }
    }
}

fn regime(d: &SpaceDescriptor, c: Q) -> Regime {
    let (a, al, be) = (d.q.conjugate().recip(), d.alpha, d.beta);
    match d.p {
        Infinity => {
            let inv_q = d.q.recip();
            Regime::Infinite(if al < -inv_q {
                1
            } else if al == -inv_q && be < -inv_q {
                2
            } else {
                3
            })
        }
        Finite(p) if p.is_one() => {
            if al.is_zero() {
                Regime::UnitLog
            } else {
                Regime::UnitPositive
            }
        }
        Finite(p) if p < c => Regime::Below,
        Finite(p) if p > c => Regime::Above,
        Finite(_) => Regime::At(if al < a {
            Edge::AlphaBelow
        } else if al > a {
            Edge::AlphaAbove
        } else if be < a {
            Edge::BetaBelow
        } else if be > a {
            Edge::BetaAbove
        } else if d.q.is_infinite() || d.q > ExtendedRational::int(1) {
            Edge::Both
        } else {
            Edge::LorentzOne
        }),
    }
}

fn regime_text(r: Regime, crit: &str) -> String {
    match r {
        Regime::UnitLog => "p = q = 1, alpha = 0, beta >= 0".into(),
        Regime::UnitPositive => "p = q = 1, alpha > 0".into(),
        Regime::Below => format!("p in (1,{crit})"),
        Regime::At(e) => format!("p = {crit}, {}", e.text()),
        Regime::Above => format!("p in ({crit},inf)"),
        Regime::Infinite(1) => "p = inf, alpha < -1/q".into(),
        Regime::Infinite(2) => "p = inf, alpha = -1/q, beta < -1/q".into(),
        Regime::Infinite(_) => "p = q = inf, alpha = beta = 0".into(),
    }
}

/// Row of a 13-row table: rows 1–3 below the critical value, 4–9 at it,
/// 10 above, 11–13 at `p = ∞`.
fn thirteen_row(r: Regime) -> u8 {
    match r {
        Regime::UnitLog => 1,
        Regime::UnitPositive => 2,
        Regime::Below => 3,
        Regime::At(e) => 3 + e.index(),
        Regime::Above => 10,
        Regime::Infinite(k) => 10 + k,
    }
}

fn rll(lambda: Q, e1: Q, e2: Q) -> LogPowerForm {
    LogPowerForm::r_l_ll(lambda, e1, e2)
}

fn ext(n: i64) -> ExtendedRational {
    ExtendedRational::int(n)
}

fn trivial(payload: Payload, text: &str) -> TargetReport {
    TargetReport::new(payload, None, text)
}

/// Log factor shared by the double-star rows: `ℓ^{−1/q−α}ℓℓ^{−β}`,
/// `ℓℓ^{−1/q−β}` or `ℓℓℓ^{−1/q}`.
fn double_star_row(d: &SpaceDescriptor) -> (u8, &'static str, LogPowerForm) {
    let inv_q = d.q.recip();
    if d.alpha > -inv_q {
        (1, "alpha > -1/q", rll(Q::zero(), -inv_q - d.alpha, -d.beta))
    } else if d.beta > -inv_q {
        (2, "alpha = -1/q, beta > -1/q", LogPowerForm::ll(-inv_q - d.beta))
    } else {
        (3, "q < inf, alpha = beta = -1/q", LogPowerForm::lll(-inv_q))
    }
}

pub fn ri_optimal_target(q: &EmbeddingQuery) -> TargetReport {
    let (m, n) = (q.m, q.n);
    if m >= n {
        return trivial(Payload::Space(SpaceDescriptor::linf()), "m >= n: L^inf");
    }
    let d = q.star();
    if q.is_double_star() {
        let one_star = Finite(q.ratio(n, n - m));
        let inv_q = d.q.recip();
        let (row, text, upper, lower) = if d.alpha > -inv_q {
            (
                1,
                "alpha > -1/q",
                SpaceDescriptor::star(one_star, d.q, d.alpha + inv_q, d.beta),
                SpaceDescriptor::star(one_star, d.q, d.alpha + 1, d.beta),
            )
        } else if d.beta > -inv_q {
            (
                2,
                "alpha = -1/q, beta > -1/q",
                SpaceDescriptor::star(one_star, d.q, Q::zero(), d.beta + inv_q),
                SpaceDescriptor::star(one_star, d.q, Q::zero(), d.beta + 1),
            )
        } else {
            (
                3,
                "q < inf, alpha = beta = -1/q",
                SpaceDescriptor::glz5(one_star, d.q, Q::zero(), Q::zero(), inv_q),
                SpaceDescriptor::glz5(one_star, d.q, Q::zero(), Q::zero(), Q::one()),
            )
        };
        let upper = canonical(&upper).expect("tabulated target is valid");
        let lower = canonical(&lower).expect("lower bracket space is valid");
        let row = Some((Table::RiDoubleStar, row));
        if d.q == ext(1) {
            return TargetReport::new(Payload::Space(upper), row, &format!("q = 1, {text}"));
        }
        let mut rep = TargetReport::new(Payload::Bracket { lower, upper }, row, &format!("q > 1, {text}"));
        rep.optimal = false;
        rep.not_glz = true;
        rep.note = Some(OPEN_PROBLEM_NOTE.into());
        return rep;
    }
    let c = q.ratio(n, m);
    let r = regime(&d, c);
    let row = thirteen_row(r);
    let target = match row {
        1..=3 => {
            let p = d.p.finite().expect("finite p below the critical exponent");
            let nq = Q::from_integer(n as i64);
            let mq = Q::from_integer(m as i64);
            SpaceDescriptor::star(Finite(nq * p / (nq - mq * p)), d.q, d.alpha, d.beta)
        }
        4 => SpaceDescriptor::star(Infinity, d.q, d.alpha - 1, d.beta),
        5 => SpaceDescriptor::star(Infinity, d.q, -d.q.recip(), d.beta - 1),
        6 => {
            let m_inv_q = -d.q.recip();
            SpaceDescriptor::glz5(Infinity, d.q, m_inv_q, m_inv_q, -Q::one())
        }
        _ => SpaceDescriptor::linf(),
    };
    let target = canonical(&target).expect("tabulated target is valid");
    TargetReport::new(Payload::Space(target), Some((Table::RiStar, row)), &regime_text(r, "n/m"))
}

pub fn c0_embeds(q: &EmbeddingQuery) -> TargetReport {
    if q.m >= q.n {
        return trivial(Payload::Bool(true), "m >= n: bounded continuous");
    }
    if q.is_double_star() {
        return trivial(Payload::Bool(false), "double-star domain, m < n: no embedding into C^0");
    }
    let d = q.star();
    let r = regime(&d, q.ratio(q.n, q.m));
    let row = match r {
        Regime::At(Edge::LorentzOne) => 1,
        Regime::At(Edge::BetaAbove) => 2,
        Regime::At(Edge::AlphaAbove) => 3,
        Regime::Above | Regime::Infinite(_) => 4,
        _ => {
            let text = format!("{}: not a continuity case", regime_text(r, "n/m"));
            return TargetReport::new(Payload::Bool(false), Some((Table::Continuity, 0)), &text);
        }
    };
    let text = if row == 4 { "p in (n/m,inf]".to_string() } else { regime_text(r, "n/m") };
    TargetReport::new(Payload::Bool(true), Some((Table::Continuity, row)), &text)
}

fn no_embedding(table: Table, text: String) -> TargetReport {
    TargetReport::new(Payload::NoEmbedding, Some((table, 0)), &format!("{text}: no Hölder embedding"))
}

pub fn optimal_modulus(q: &EmbeddingQuery) -> TargetReport {
    let (m, n) = (q.m, q.n);
    let one = LogPowerForm::power(Q::one());
    if m > n {
        return trivial(Payload::Form(one), "m > n: Lipschitz");
    }
    let d = q.star();
    let a = d.q.conjugate().recip();
    let (al, be) = (d.alpha, d.beta);
    if q.is_double_star() {
        if m < n {
            return trivial(Payload::NoEmbedding, "double-star domain, m < n: not even continuous");
        }
        let (row, text, f) = double_star_row(&d);
        return TargetReport::new(Payload::Form(f), Some((Table::HolderDoubleStar, row)), text);
    }
    // Shared rows once p has reached n/(m−1): log-corrected Lipschitz or r.
    let upper_rows = |table: Table, r: Regime, crit: &str| -> TargetReport {
        let row = thirteen_row(r);
        let f = match r {
            Regime::At(Edge::AlphaBelow) => rll(Q::one(), a - al, -be),
            Regime::At(Edge::BetaBelow) => rll(Q::one(), Q::zero(), a - be),
            Regime::At(Edge::Both) => one * LogPowerForm::lll(a),
            _ => one,
        };
        TargetReport::new(Payload::Form(f), Some((table, row)), &regime_text(r, crit))
    };
    let power = |lambda: Q| rll(lambda, -al, -be);
    let p_inv = d.p.recip();
    let nq = Q::from_integer(n as i64);
    let mq = Q::from_integer(m as i64);
    if m == n {
        let r = regime(&d, q.ratio(n, n - 1));
        let table = Table::HolderTop;
        return match r {
            Regime::UnitLog if be.is_zero() => no_embedding(table, "p = q = 1, alpha = beta = 0".into()),
            Regime::UnitLog | Regime::UnitPositive | Regime::Below => {
                let text = if r == Regime::UnitLog {
                    "p = q = 1, alpha = 0, beta > 0".into()
                } else {
                    regime_text(r, "n/(n-1)")
                };
                TargetReport::new(Payload::Form(power(nq - nq * p_inv)), Some((table, thirteen_row(r))), &text)
            }
            _ => upper_rows(table, r, "n/(n-1)"),
        };
    }
    // m < n: the first threshold n/m decides whether any modulus exists.
    let crit1 = if m == 1 { "n" } else { "n/m" };
    let table = if m == 1 { Table::HolderFirst } else { Table::HolderMiddle };
    let r1 = regime(&d, q.ratio(n, m));
    let edge_row = match r1 {
        Regime::At(Edge::BetaAbove) => Some((1, LogPowerForm::ll(a - be))),
        Regime::At(Edge::AlphaAbove) => Some((2, rll(Q::zero(), a - al, -be))),
        _ => None,
    };
    if let Some((row, f)) = edge_row {
        return TargetReport::new(Payload::Form(f), Some((table, row)), &regime_text(r1, crit1));
    }
    if !matches!(r1, Regime::Above | Regime::Infinite(_)) {
        return no_embedding(table, regime_text(r1, crit1));
    }
    if m == 1 {
        let (row, f) = match r1 {
            Regime::Infinite(1) => (4, rll(Q::one(), -d.q.recip() - al, -be)),
            Regime::Infinite(2) => (5, rll(Q::one(), Q::zero(), -d.q.recip() - be)),
            Regime::Infinite(_) => (6, one),
            _ => (3, power(Q::one() - nq * p_inv)),
        };
        return TargetReport::new(Payload::Form(f), Some((table, row)), &regime_text(r1, crit1));
    }
    let r2 = regime(&d, q.ratio(n, m - 1));
    if r2 == Regime::Below {
        let text = "p in (n/m,n/(m-1))";
        return TargetReport::new(Payload::Form(power(mq - nq * p_inv)), Some((table, 3)), text);
    }
    upper_rows(table, r2, "n/(m-1)")
}

pub fn optimal_morrey(q: &EmbeddingQuery) -> TargetReport {
    let (m, n) = (q.m, q.n);
    if m >= n {
        return trivial(Payload::Form(LogPowerForm::one()), "m >= n: L^inf");
    }
    let d = q.star();
    let mq = Q::from_integer(m as i64);
    let nq = Q::from_integer(n as i64);
    if q.is_double_star() {
        let (row, text, f) = double_star_row(&d);
        return TargetReport::new(Payload::Form(f.times_power(mq - nq)), Some((Table::MorreyDoubleStar, row)), text);
    }
    let a = d.q.conjugate().recip();
    let r = regime(&d, q.ratio(n, m));
    let row = thirteen_row(r);
    let f = match row {
        1..=3 => rll(mq - nq * d.p.recip(), -d.alpha, -d.beta),
        4 => rll(Q::zero(), a - d.alpha, -d.beta),
        5 => LogPowerForm::ll(a - d.beta),
        6 => LogPowerForm::lll(a),
        _ => LogPowerForm::one(),
    };
    TargetReport::new(Payload::Form(f), Some((Table::MorreyStar, row)), &regime_text(r, "n/m"))
}

pub fn optimal_campanato(q: &EmbeddingQuery) -> TargetReport {
    let (m, n) = (q.m, q.n);
    if m > n {
        return trivial(Payload::Form(LogPowerForm::power(Q::one())), "m > n: r");
    }
    let d = q.star();
    let mq = Q::from_integer(m as i64);
    let nq = Q::from_integer(n as i64);
    if q.is_double_star() {
        let table = if m == 1 { Table::CampanatoDoubleStarFirst } else { Table::CampanatoDoubleStarRest };
        let (row, text, f) = double_star_row(&d);
        return TargetReport::new(Payload::Form(f.times_power(mq - nq)), Some((table, row)), text);
    }
    let modulus_row = |table: Table, row: u8, text: &str| {
        let sigma = optimal_modulus(q);
        let text = format!("{text}, via the modulus ({})", sigma.case_line);
        TargetReport::new(sigma.payload, Some((table, row)), &text)
    };
    if m == n {
        if d.p == ext(1) && d.alpha.is_zero() && d.beta.is_zero() {
            return TargetReport::new(
                Payload::Form(LogPowerForm::one()),
                Some((Table::CampanatoTop, 1)),
                "p = q = 1, alpha = beta = 0",
            );
        }
        return modulus_row(Table::CampanatoTop, 2, "otherwise");
    }
    let (table, crit) = if m == 1 { (Table::CampanatoFirst, "n") } else { (Table::CampanatoMiddle, "n/m") };
    let r = regime(&d, q.ratio(n, m));
    let power = rll(mq - nq * d.p.recip(), -d.alpha, -d.beta);
    match r {
        Regime::UnitLog | Regime::UnitPositive => {
            TargetReport::new(Payload::Form(power), Some((table, thirteen_row(r))), &regime_text(r, crit))
        }
        Regime::Below | Regime::At(_) => {
            TargetReport::new(Payload::Form(power), Some((table, 3)), &format!("p in (1,{crit}]"))
        }
        _ => modulus_row(table, 4, &format!("p in ({crit},inf]")),
    }
}

/// Outcome of a proof-pipeline derivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Derived {
    Form(LogPowerForm),
    DivergentOrNoLimit,
}

impl Derived {
    /// Exact agreement with a table payload; `NoEmbedding` matches `DivergentOrNoLimit`.
    pub fn matches(&self, payload: &Payload) -> bool {
        match (self, payload) {
            (Derived::Form(f), Payload::Form(g)) => f.is_equivalent(g),
            (Derived::DivergentOrNoLimit, Payload::NoEmbedding) => true,
            _ => false,
        }
    }
}

fn check_order(q: &EmbeddingQuery, strict: bool) -> Result<()> {
    if q.m > q.n || (strict && q.m == q.n) {
        return Err(Error::Domain(format!("derivation needs m {} n, got {q}", if strict { "<" } else { "<=" })));
    }
    Ok(())
}

/// Pieces in radius `R = rⁿ`:
/// `ϑ_m(R) = ‖s^{m/n−1}χ_{(0,R)}‖_{X′}` and
/// `ϱ_m(R) = R^{1/n}‖(s+R)^{(m−1)/n−1}‖_{X′} ≈ R^{1/n}‖R^{(m−1)/n−1}χ_{(0,R)} + s^{(m−1)/n−1}χ_{(R,1)}‖_{X′}`.
fn theta_pieces(q: &EmbeddingQuery) -> Vec<Piece> {
    vec![Piece::Head { coef: Q::zero(), mu: q.ratio(q.m, q.n) - 1 }]
}

fn rho_pieces(q: &EmbeddingQuery) -> Vec<Piece> {
    let k = q.ratio(q.m - 1, q.n) - 1;
    let lift = q.ratio(1, q.n);
    vec![Piece::Head { coef: k + lift, mu: Q::zero() }, Piece::Tail { coef: lift, mu: k }]
}

/// `‖Σ pieces‖_{X′}` evaluated at `R = rⁿ`.
fn dual_norm(q: &EmbeddingQuery, pieces: &[Piece]) -> Result<LogPowerForm> {
    let dual = associate(&q.space)?;
    Ok(norm_of_pieces(&dual, pieces)?.substitute_power(Q::from_integer(q.n as i64)))
}

/// `ϑ_m`, `ϑ_m + ϱ_m` or `ϱ_m` for `m = 1`, `1 < m < n`, `m = n`; a modulus
/// only if finite and vanishing at 0.
pub fn derive_modulus_via_proof(q: &EmbeddingQuery) -> Result<Derived> {
    check_order(q, false)?;
    let mut pieces = Vec::new();
    if q.m < q.n {
        pieces.extend(theta_pieces(q));
    }
    if q.m > 1 {
        pieces.extend(rho_pieces(q));
    }
    let f = dual_norm(q, &pieces)?;
    if f.divergent || f.limit_zero()? != Limit::TendsToZero {
        return Ok(Derived::DivergentOrNoLimit);
    }
    Ok(Derived::Form(f))
}

/// `‖s^{m/n−1}χ_{(R,1)}‖_{X′}` with the shift `(s+R)^{m/n−1}` split at `R`.
pub fn derive_morrey_via_proof(q: &EmbeddingQuery) -> Result<LogPowerForm> {
    check_order(q, true)?;
    let k = q.ratio(q.m, q.n) - 1;
    dual_norm(q, &[Piece::Head { coef: k, mu: Q::zero() }, Piece::Tail { coef: Q::zero(), mu: k }])
}

/// `r^{1−n}φ_{X′}(rⁿ)` for `m = 1` and `ϱ_m` for `2 ≤ m ≤ n`.
pub fn derive_campanato_via_proof(q: &EmbeddingQuery) -> Result<LogPowerForm> {
    check_order(q, false)?;
    if q.m == 1 {
        return dual_norm(q, &[Piece::Head { coef: q.ratio(1, q.n) - 1, mu: Q::zero() }]);
    }
    dual_norm(q, &rho_pieces(q))
}

/// Continuity holds iff `s^{m/n−1} ∈ X′` near 0.
pub fn derive_c0_via_proof(q: &EmbeddingQuery) -> Result<bool> {
    if q.m >= q.n {
        return Ok(true);
    }
    Ok(!dual_norm(q, &theta_pieces(q))?.divergent)
}

/// `φ` of the associate of the optimal r.i. target: the `X′` norm of
/// `s^{m/n}χ**_{(0,r)}`, with `χ**_{(0,r)} = χ_{(0,r)} + (r/s)χ_{(r,1)}`. That
/// function rises to `r^{m/n}` at `s = r` and then decays, so its decreasing
/// rearrangement is equivalent to `S_mχ_{(0,r)} = r^{m/n}χ_{(0,r)} + r s^{m/n−1}χ_{(r,1)}`.
pub fn optimal_target_fundamental(q: &EmbeddingQuery) -> Result<LogPowerForm> {
    check_order(q, true)?;
    let k = q.ratio(q.m, q.n);
    let dual = associate(&q.space)?;
    norm_of_pieces(&dual, &[Piece::Head { coef: k, mu: Q::zero() }, Piece::Tail { coef: Q::one(), mu: k - 1 }])
}

/// The same functional with the `X′` weight applied to `s^{m/n}χ**_{(0,r)}`
/// pointwise, without rearranging. Agrees with [`optimal_target_fundamental`]
/// for `q = 1` and is strictly smaller for `q > 1`.
pub fn optimal_target_fundamental_pointwise(q: &EmbeddingQuery) -> Result<LogPowerForm> {
    check_order(q, true)?;
    let k = q.ratio(q.m, q.n);
    let dual = associate(&q.space)?;
    norm_of_pieces(&dual, &[Piece::Head { coef: Q::zero(), mu: k }, Piece::Tail { coef: Q::one(), mu: k - 1 }])
}

/// Fundamental function of the associate of `target`, where tabulated.
pub fn associate_fundamental(target: &SpaceDescriptor) -> Result<LogPowerForm> {
    fundamental_function_symbolic(&associate(target)?)
}

/// Does the tabulated r.i. answer agree with [`optimal_target_fundamental`]?
/// Optimal targets must match exactly; a bracket must sandwich it.
pub fn ri_consistent(q: &EmbeddingQuery) -> Result<bool> {
    if q.m >= q.n {
        return Ok(matches!(ri_optimal_target(q).payload, Payload::Space(s) if s == SpaceDescriptor::linf()));
    }
    let derived = optimal_target_fundamental(q)?;
    match ri_optimal_target(q).payload {
        Payload::Space(t) => {
            let phi = match associate_fundamental(&t) {
                Err(Error::NotTabulated(_)) => fundamental_of_dual(&t)?,
                other => other?,
            };
            Ok(phi.is_equivalent(&derived))
        }
        Payload::Bracket { lower, upper } => {
            let lo = lpf_le(fundamental_of_dual(&lower)?, derived)?;
            let hi = lpf_le(derived, fundamental_of_dual(&upper)?)?;
            Ok(lo && hi)
        }
        _ => Ok(false),
    }
}

/// `φ_{Y′} = r/φ_Y`, usable for five-parameter `Y` whose associate is not tabulated.
fn fundamental_of_dual(y: &SpaceDescriptor) -> Result<LogPowerForm> {
    Ok(LogPowerForm::power(Q::one()) * fundamental_function_symbolic(y)?.inverse()?)
}

fn lpf_le(a: LogPowerForm, b: LogPowerForm) -> Result<bool> {
    Ok(a.compare(&b)? != Comparison::StrictlyLarger)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceComparison {
    Equal,
    Differs,
}

impl fmt::Display for SpaceComparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceComparison::Equal => "Equal",
            SpaceComparison::Differs => "Differs",
        })
    }
}

fn equal_if(b: bool) -> SpaceComparison {
    if b {
        SpaceComparison::Equal
    } else {
        SpaceComparison::Differs
    }
}

/// Hölder versus Campanato, by the listed exceptions.
pub fn holder_campanato_compare(q: &EmbeddingQuery) -> Result<SpaceComparison> {
    if q.is_double_star() || q.m > q.n {
        return Err(Error::InvalidQuery(format!("{q}: needs a star domain and m <= n")));
    }
    let d = q.star();
    let a = d.q.conjugate().recip();
    let exception = if q.m < q.n {
        d.p == Finite(q.ratio(q.n, q.m)) && ((d.alpha == a && d.beta > a) || d.alpha > a)
    } else {
        d.p == ext(1) && d.q == ext(1) && d.alpha.is_zero() && d.beta.is_zero()
    };
    Ok(equal_if(!exception))
}

/// Hölder versus Campanato, by direct comparison of the two optimal forms.
pub fn holder_campanato_forms(q: &EmbeddingQuery) -> SpaceComparison {
    match (optimal_modulus(q).form(), optimal_campanato(q).form()) {
        (Some(s), Some(c)) => equal_if(s.is_equivalent(&c)),
        _ => SpaceComparison::Differs,
    }
}

/// Morrey versus Campanato, by the listed coincidences.
pub fn morrey_campanato_compare(q: &EmbeddingQuery) -> Result<SpaceComparison> {
    if q.m >= q.n {
        return Err(Error::InvalidQuery(format!("{q}: needs m < n")));
    }
    if q.is_double_star() {
        return Ok(SpaceComparison::Equal);
    }
    let d = q.star();
    let (al, be) = (d.alpha, d.beta);
    let zero = Q::zero();
    let unit = d.p == ext(1) && d.q == ext(1);
    let listed = (unit && al == zero && be > zero)
        || (unit && al > zero)
        || (matches!(d.p, Finite(p) if p > Q::one() && p < q.ratio(q.n, q.m)) && al == zero && be < zero)
        || (d.p == Finite(q.ratio(q.n, q.m)) && d.q == ext(1) && al < zero)
        || (d.p.is_infinite() && al == zero && be <= zero);
    Ok(equal_if(listed))
}

/// Morrey versus Campanato, by direct comparison of the two optimal forms.
pub fn morrey_campanato_forms(q: &EmbeddingQuery) -> SpaceComparison {
    match (optimal_morrey(q).form(), optimal_campanato(q).form()) {
        (Some(m), Some(c)) => equal_if(m.is_equivalent(&c)),
        _ => SpaceComparison::Differs,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparisons {
    pub holder_campanato: String,
    pub morrey_campanato: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub query: EmbeddingQuery,
    pub ri: TargetReport,
    pub c0: bool,
    pub holder: TargetReport,
    pub morrey: TargetReport,
    pub campanato: TargetReport,
    pub comparisons: Comparisons,
}

pub fn classify(q: &EmbeddingQuery) -> Classification {
    let show = |r: Result<SpaceComparison>| r.map_or_else(|_| "not applicable".to_string(), |c| c.to_string());
    Classification {
        query: *q,
        ri: ri_optimal_target(q),
        c0: matches!(c0_embeds(q).payload, Payload::Bool(true)),
        holder: optimal_modulus(q),
        morrey: optimal_morrey(q),
        campanato: optimal_campanato(q),
        comparisons: Comparisons {
            holder_campanato: show(holder_campanato_compare(q)),
            morrey_campanato: show(morrey_campanato_compare(q)),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn query(m: u32, n: u32, s: &str) -> EmbeddingQuery {
        EmbeddingQuery::new(m, n, s.parse().unwrap()).unwrap()
    }

    fn space(s: &str) -> Payload {
        Payload::Space(s.parse().unwrap())
    }

    fn form(f: LogPowerForm) -> Payload {
        Payload::Form(f)
    }

    #[test]
    fn ri_examples() {
        assert_eq!(ri_optimal_target(&query(1, 3, "L(2,2;0,0)")).payload, space("L(6,2;0,0)"));
        assert_eq!(ri_optimal_target(&query(1, 2, "L(2,2;0,0)")).payload, space("L(inf,2;-1,0)"));
        let r = ri_optimal_target(&query(1, 2, "L*(1,1;0,0)"));
        assert_eq!((r.payload, r.optimal), (space("L(2,1;1,0)"), true));
        let r = ri_optimal_target(&query(1, 2, "L*(1,2;0,0)"));
        assert_eq!(
            r.payload,
            Payload::Bracket { lower: "L(2,2;1,0)".parse().unwrap(), upper: "L(2,2;1/2,0)".parse().unwrap() }
        );
        assert!(r.not_glz && !r.optimal && r.note.is_some());
        assert_eq!(ri_optimal_target(&query(3, 2, "L(2,2;0,0)")).payload, space("Linf"));
    }

    #[test]
    fn continuity_examples() {
        assert_eq!(c0_embeds(&query(1, 2, "L(2,1;0,0)")).payload, Payload::Bool(true));
        assert_eq!(c0_embeds(&query(1, 2, "L(2,2;0,0)")).payload, Payload::Bool(false));
        assert_eq!(c0_embeds(&query(1, 2, "L*(1,2;0,0)")).payload, Payload::Bool(false));
    }

    #[test]
    fn modulus_examples() {
        assert_eq!(optimal_modulus(&query(1, 2, "L(4,1;0,0)")).payload, form(LogPowerForm::power(q(1, 2))));
        assert_eq!(optimal_modulus(&query(1, 2, "L(2,2;1/2,1)")).payload, form(LogPowerForm::ll(q(-1, 2))));
        assert_eq!(optimal_modulus(&query(1, 2, "L(2,1;0,0)")).payload, Payload::NoEmbedding);
        assert_eq!(optimal_modulus(&query(2, 2, "L*(1,2;0,0)")).payload, form(LogPowerForm::l(q(-1, 2))));
    }

    #[test]
    fn morrey_and_campanato_examples() {
        assert_eq!(optimal_morrey(&query(1, 3, "L(2,2;0,0)")).payload, form(LogPowerForm::power(q(-1, 2))));
        assert_eq!(optimal_morrey(&query(1, 2, "L(2,2;0,0)")).payload, form(LogPowerForm::l(q(1, 2))));
        assert_eq!(optimal_morrey(&query(1, 2, "L*(1,1;0,0)")).payload, form(rll(qi(-1), qi(-1), qi(0))));
        assert_eq!(optimal_campanato(&query(1, 2, "L(1,1;0,0)")).payload, form(LogPowerForm::power(qi(-1))));
        assert_eq!(optimal_campanato(&query(3, 3, "L(1,1;0,0)")).payload, form(LogPowerForm::one()));
        assert_eq!(optimal_campanato(&query(1, 2, "L*(1,2;0,0)")).payload, form(rll(qi(-1), q(-1, 2), qi(0))));
    }

    #[test]
    fn derivation_examples() {
        let d = derive_modulus_via_proof(&query(1, 2, "L(4,1;0,0)")).unwrap();
        assert_eq!(d, Derived::Form(LogPowerForm::power(q(1, 2))));
        assert_eq!(derive_modulus_via_proof(&query(1, 2, "L(2,2;0,0)")).unwrap(), Derived::DivergentOrNoLimit);
        assert_eq!(
            derive_modulus_via_proof(&query(2, 2, "L*(1,1;0,0)")).unwrap(),
            Derived::Form(LogPowerForm::l(qi(-1)))
        );
        assert_eq!(derive_morrey_via_proof(&query(1, 3, "L(2,2;0,0)")).unwrap(), LogPowerForm::power(q(-1, 2)));
        assert_eq!(derive_morrey_via_proof(&query(1, 2, "L*(1,1;0,0)")).unwrap(), rll(qi(-1), qi(-1), qi(0)));
        assert_eq!(derive_morrey_via_proof(&query(1, 2, "Linf")).unwrap(), LogPowerForm::one());
        assert_eq!(derive_campanato_via_proof(&query(1, 2, "L(1,1;0,0)")).unwrap(), LogPowerForm::power(qi(-1)));
        let q22 = query(2, 2, "L(2,2;0,0)");
        assert!(optimal_campanato(&q22).form().unwrap().is_equivalent(&derive_campanato_via_proof(&q22).unwrap()));
        assert_eq!(derive_campanato_via_proof(&query(1, 2, "L*(1,1;0,0)")).unwrap(), rll(qi(-1), qi(-1), qi(0)));
    }

    #[test]
    fn target_fundamental_examples() {
        let q12 = query(1, 2, "L*(1,2;0,0)");
        assert_eq!(optimal_target_fundamental(&q12).unwrap(), rll(q(1, 2), q(-1, 2), qi(0)));
        assert_eq!(optimal_target_fundamental_pointwise(&q12).unwrap(), rll(q(1, 2), qi(-1), qi(0)));
        let q11 = query(1, 2, "L*(1,1;0,0)");
        assert_eq!(optimal_target_fundamental(&q11).unwrap(), optimal_target_fundamental_pointwise(&q11).unwrap());
        let q13 = query(1, 3, "L(2,2;0,0)");
        let assoc = associate_fundamental(&"L(6,2;0,0)".parse().unwrap()).unwrap();
        assert!(optimal_target_fundamental(&q13).unwrap().is_equivalent(&assoc));
        let f = optimal_target_fundamental(&query(1, 2, "L*(1,1;-1,0)")).unwrap();
        assert_eq!(f, rll(q(1, 2), qi(0), qi(-1)));
    }

    #[test]
    fn comparison_examples() {
        assert_eq!(holder_campanato_compare(&query(1, 2, "L(3,2;0,0)")).unwrap(), SpaceComparison::Equal);
        assert_eq!(holder_campanato_compare(&query(1, 3, "L(3,2;1,0)")).unwrap(), SpaceComparison::Differs);
        assert_eq!(holder_campanato_compare(&query(3, 3, "L(1,1;0,0)")).unwrap(), SpaceComparison::Differs);
        assert_eq!(morrey_campanato_compare(&query(1, 2, "L*(1,2;0,0)")).unwrap(), SpaceComparison::Equal);
        assert_eq!(morrey_campanato_compare(&query(1, 3, "L(2,2;0,-1)")).unwrap(), SpaceComparison::Equal);
        assert_eq!(morrey_campanato_compare(&query(1, 3, "L(2,2;0,0)")).unwrap(), SpaceComparison::Differs);
    }

    #[test]
    fn invalid_queries_are_rejected() {
        assert!(EmbeddingQuery::new(1, 1, "L(2,2;0,0)".parse().unwrap()).is_err());
        assert!(EmbeddingQuery::new(1, 2, "L(1,2;0,0)".parse().unwrap()).is_err());
        assert!(EmbeddingQuery::new(1, 2, "L(2,2;0,0,1)".parse().unwrap()).is_err());
    }

    #[test]
    fn classification_serializes() {
        let c = classify(&query(1, 3, "L(2,2;0,0)"));
        let v: serde_json::Value = serde_json::to_value(&c).unwrap();
        for key in ["query", "ri", "c0", "holder", "morrey", "campanato", "comparisons"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["comparisons"]["morrey_campanato"], "Differs");
        assert!(v["ri"]["case_line"].as_str().unwrap().contains("p in (1,n/m)"));
    }
}
