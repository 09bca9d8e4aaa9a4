//! Numeric-versus-symbolic checks on a dyadic grid of radii, plus the
//! rearrangement and duality property suites.

use std::fmt::Write as _;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::logpower::{symbolic_head_norm, symbolic_tail_norm, LogPowerForm, PsiParams};
use crate::oracle::EmbeddingQuery;
use crate::quadrature::{
    glz_functional, glz_norm_numeric, weighted_lq_norm, QuadratureConfig, Rearranged, WeightedIntegrand,
};
use crate::rational::{q_to_f64, Q};
use crate::rearrange::{
    decreasing_rearrangement, dilation, maximal_rearrangement, random_step_function, Piecewise, StepFunction, Term,
};
use crate::space::{associate, fundamental_function_symbolic, norm_of_pieces, Piece, SpaceDescriptor};
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 0x5EED;

/// Seed from `GLZ_EMBED_SEED` (decimal or `0x` hex), else [`DEFAULT_SEED`].
pub fn seed_from_env() -> u64 {
    std::env::var("GLZ_EMBED_SEED")
        .ok()
        .and_then(|s| match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
            Some(hex) => u64::from_str_radix(hex, 16).ok(),
            None => s.parse().ok(),
        })
        .unwrap_or(DEFAULT_SEED)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyConfig {
    /// Ratios must lie in `[1/band, band]`.
    pub band: f64,
    /// Grid `r = 2^{−k}`, `kmin ≤ k ≤ kmax`.
    pub kmin: u32,
    pub kmax: u32,
    pub quadrature: QuadratureConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { band: 10.0, kmin: 8, kmax: 36, quadrature: QuadratureConfig::default() }
    }
}

impl VerifyConfig {
    pub fn ks(&self) -> Vec<u32> {
        (self.kmin..=self.kmax).collect()
    }

    fn check(&self) -> Result<()> {
        if !(self.band >= 1.0) || self.kmin < 2 || self.kmin > self.kmax || self.kmax > 1000 {
            return Err(Error::Domain("verify config: band >= 1 and 2 <= kmin <= kmax <= 1000".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub label: String,
    pub ks: Vec<u32>,
    pub grid: Vec<f64>,
    /// `None` where divergence was detected.
    pub numeric: Vec<Option<f64>>,
    pub symbolic: Vec<f64>,
    pub ratios: Vec<f64>,
    pub band_constant: f64,
    pub divergence_expected: bool,
    pub divergence_observed: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl VerificationReport {
    /// `k,r,numeric,symbolic,ratio`, one row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,r,numeric,symbolic,ratio\n");
        for i in 0..self.ks.len() {
            let num = self.numeric[i].map_or("divergent".to_string(), |v| format!("{v:e}"));
            let sym = self.symbolic.get(i).map_or("divergent".to_string(), |v| format!("{v:e}"));
            let ratio = self.ratios.get(i).map_or(String::new(), |v| format!("{v:e}"));
            let _ = writeln!(out, "{},{:e},{num},{sym},{ratio}", self.ks[i], self.grid[i]);
        }
        out
    }

    fn failed(label: String, reason: String, cfg: &VerifyConfig) -> Self {
        VerificationReport {
            label,
            ks: vec![],
            grid: vec![],
            numeric: vec![],
            symbolic: vec![],
            ratios: vec![],
            band_constant: cfg.band,
            divergence_expected: false,
            divergence_observed: false,
            pass: false,
            reason: Some(reason),
        }
    }
}

/// Runs `numeric(r)` on the grid and compares with `symbolic`.
fn band_report(
    label: String,
    symbolic: LogPowerForm,
    cfg: &VerifyConfig,
    mut numeric: impl FnMut(f64) -> Result<Option<f64>>,
) -> VerificationReport {
    if let Err(e) = cfg.check() {
        return VerificationReport::failed(label, e.to_string(), cfg);
    }
    let ks = cfg.ks();
    let grid: Vec<f64> = ks.iter().map(|&k| 2f64.powi(-(k as i32))).collect();
    let mut values = Vec::with_capacity(grid.len());
    for &r in &grid {
        match numeric(r) {
            Ok(v) => values.push(v),
            Err(e) => {
                let mut rep = VerificationReport::failed(label, format!("r = {r:e}: {e}"), cfg);
                rep.divergence_expected = symbolic.divergent;
                return rep;
            }
        }
    }
    let divergence_observed = values.iter().any(Option::is_none);
    let (sym, ratios) = if symbolic.divergent {
        (vec![], vec![])
    } else {
        let sym: Vec<f64> =
            ks.iter().map(|&k| symbolic.ln_eval_at_t(k as f64 * std::f64::consts::LN_2).exp()).collect();
        let ratios = values.iter().zip(&sym).map(|(v, s)| v.map_or(f64::NAN, |v| v / s)).collect();
        (sym, ratios)
    };
    let in_band = ratios.iter().all(|&x: &f64| x >= 1.0 / cfg.band && x <= cfg.band);
    let pass = symbolic.divergent == divergence_observed && (symbolic.divergent || in_band);
    let reason = (!pass).then(|| {
        if symbolic.divergent != divergence_observed {
            format!("divergence expected {} but observed {}", symbolic.divergent, divergence_observed)
        } else {
            "ratio outside band".to_string()
        }
    });
    VerificationReport {
        label,
        ks,
        grid,
        numeric: values,
        symbolic: sym,
        ratios,
        band_constant: cfg.band,
        divergence_expected: symbolic.divergent,
        divergence_observed,
        pass,
        reason,
    }
}

fn psi_label(kind: &str, p: &PsiParams) -> String {
    format!("{kind} norm of Psi(lambda={}, q={}, alpha={}, beta={}, gamma={})", p.lambda, p.q, p.alpha, p.beta, p.gamma)
}

/// `‖Ψ‖_{L^{q′}(0,r)}` against [`symbolic_head_norm`].
pub fn verify_head_lemma(p: &PsiParams, cfg: &VerifyConfig) -> VerificationReport {
    let label = psi_label("head", p);
    match symbolic_head_norm(p) {
        Ok(sym) => band_report(label, sym, cfg, |r| {
            Ok(weighted_lq_norm(&WeightedIntegrand::psi(p, (0.0, r))?, &cfg.quadrature)?.finite())
        }),
        Err(e) => VerificationReport::failed(label, e.to_string(), cfg),
    }
}

/// `‖Ψ‖_{L^{q′}(r,1−r)}` against [`symbolic_tail_norm`].
pub fn verify_tail_lemma(p: &PsiParams, cfg: &VerifyConfig) -> VerificationReport {
    let label = psi_label("tail", p);
    match symbolic_tail_norm(p) {
        Ok(sym) => band_report(label, sym, cfg, |r| {
            Ok(weighted_lq_norm(&WeightedIntegrand::psi(p, (r, 1.0 - r))?, &cfg.quadrature)?.finite())
        }),
        Err(e) => VerificationReport::failed(label, e.to_string(), cfg),
    }
}

/// `R^{1/n}(s+R)^{(m−1)/n−1}χ_{(0,1−R)}` and its running average.
fn rho_function(m: u32, n: u32, big_r: f64) -> Rearranged {
    let e = Q::new(m as i64 - 1, n as i64) - 1;
    let c = big_r.powf(1.0 / n as f64);
    let cut = 1.0 - big_r;
    let ef = q_to_f64(e);
    let mass = c * (1.0 - big_r.powf(ef + 1.0)) / (ef + 1.0);
    let breaks = vec![0.0, cut, 1.0];
    Rearranged {
        star: Piecewise { breaks: breaks.clone(), pieces: vec![vec![Term::Shifted { c, h: big_r, e }], vec![]] },
        double_star: Piecewise {
            breaks,
            pieces: vec![vec![Term::AvgShifted { c, h: big_r, e }], vec![Term::Pow { c: mass, e: -Q::one() }]],
        },
    }
}

/// `s^{m/n−1}χ_{(0,R)}` and its running average.
fn theta_function(m: u32, n: u32, big_r: f64) -> Rearranged {
    let mu = Q::new(m as i64, n as i64) - 1;
    let muf = q_to_f64(mu);
    let breaks = vec![0.0, big_r, 1.0];
    Rearranged {
        star: Piecewise { breaks: breaks.clone(), pieces: vec![vec![Term::Pow { c: 1.0, e: mu }], vec![]] },
        double_star: Piecewise {
            breaks,
            pieces: vec![
                vec![Term::Pow { c: 1.0 / (muf + 1.0), e: mu }],
                vec![Term::Pow { c: big_r.powf(muf + 1.0) / (muf + 1.0), e: -Q::one() }],
            ],
        },
    }
}

/// `ϑ_m` and `ϱ_m` as functions of `R = rⁿ`, each evaluated numerically in
/// `X′` and compared with the piece algebra. Returns the applicable reports.
pub fn verify_theta_rho(q: &EmbeddingQuery, cfg: &VerifyConfig) -> Result<Vec<VerificationReport>> {
    if q.m > q.n {
        return Err(Error::Domain(format!("{q}: needs m <= n")));
    }
    let dual = associate(&q.space)?;
    let (m, n) = (q.m, q.n);
    let quad = &cfg.quadrature;
    let mut out = Vec::new();
    if m < n {
        let sym = norm_of_pieces(&dual, &[Piece::Head { coef: Q::zero(), mu: Q::new(m as i64, n as i64) - 1 }])?;
        out.push(band_report(format!("theta for {q}, in R = r^n"), sym, cfg, |big_r| {
            Ok(glz_functional(&dual, &theta_function(m, n, big_r), quad)?.finite())
        }));
    }
    if m > 1 {
        let k = Q::new(m as i64 - 1, n as i64) - 1;
        let lift = Q::new(1, n as i64);
        let sym =
            norm_of_pieces(&dual, &[Piece::Head { coef: k + lift, mu: Q::zero() }, Piece::Tail { coef: lift, mu: k }])?;
        out.push(band_report(format!("rho for {q}, in R = r^n"), sym, cfg, |big_r| {
            Ok(glz_functional(&dual, &rho_function(m, n, big_r), quad)?.finite())
        }));
    }
    Ok(out)
}

/// `φ_X(r)·φ_{X′}(r)` against `r`.
pub fn verify_fundamental(desc: &SpaceDescriptor, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let dual = associate(desc)?;
    let product = fundamental_function_symbolic(desc)? * fundamental_function_symbolic(&dual)?;
    let label = format!("fundamental product of {desc} and {dual}");
    if !product.is_equivalent(&LogPowerForm::power(Q::one())) {
        return Ok(VerificationReport::failed(label, format!("symbolic product is {product}, not r"), cfg));
    }
    Ok(band_report(label, product, cfg, |r| {
        let chi = StepFunction::indicator(0.0, r)?;
        let a = glz_norm_numeric(&chi, desc, &cfg.quadrature)?.finite();
        let b = glz_norm_numeric(&chi, &dual, &cfg.quadrature)?.finite();
        Ok(a.zip(b).map(|(a, b)| a * b))
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualityReport {
    pub space: SpaceDescriptor,
    pub associate: SpaceDescriptor,
    pub trials: usize,
    pub seed: u64,
    /// `max ∫fg / (‖f‖_X ‖g‖_{X′})` over the trials.
    pub empirical_constant: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Hölder's inequality between `X` and its tabulated associate on random step functions.
pub fn verify_duality(
    desc: &SpaceDescriptor,
    trials: usize,
    bound: f64,
    seed: u64,
    cfg: &QuadratureConfig,
) -> Result<DualityReport> {
    let dual = associate(desc)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let f = random_step_function(&mut rng);
        let g = random_step_function(&mut rng);
        let nf = glz_norm_numeric(&f, desc, cfg)?.finite();
        let ng = glz_norm_numeric(&g, &dual, cfg)?.finite();
        if let (Some(nf), Some(ng)) = (nf, ng) {
            worst = worst.max(f.inner(&g) / (nf * ng));
        }
    }
    Ok(DualityReport {
        space: *desc,
        associate: dual,
        trials,
        seed,
        empirical_constant: worst,
        bound,
        pass: worst <= bound,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PropertyReport {
    pub trials: usize,
    pub seed: u64,
    pub equimeasurability_failures: usize,
    pub hardy_littlewood_failures: usize,
    pub subadditivity_failures: usize,
    /// Cases with `‖D_λ f‖ > max{1, λ^{−1}}‖f‖`.
    pub dilation_stated_bound_failures: usize,
    /// Cases with `‖D_λ f‖ > max{1, λ}‖f‖`.
    pub dilation_max_lambda_failures: usize,
    /// Worst `|∫fg − ‖f‖₂‖g‖₂| / (‖f‖₂‖g‖₂)` with `g = f`, and worst excess of `∫fg` over `‖f‖₂‖g‖₂`.
    pub cauchy_schwarz_equality_error: f64,
    pub cauchy_schwarz_excess: f64,
}

const DILATION_SPACES: [&str; 5] = ["L(1,1;0,0)", "L(2,2;0,0)", "L(4,2;1,-1)", "L(inf,2;-1,0)", "L*(1,2;0,0)"];

/// Random-step-function checks of the basic rearrangement facts. Exact
/// identities use breakpoint arithmetic; norms use quadrature.
pub fn property_suite(trials: usize, seed: u64, cfg: &QuadratureConfig) -> Result<PropertyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = PropertyReport { trials, seed, ..Default::default() };
    let l2: SpaceDescriptor = "L(2,2;0,0)".parse()?;
    let dil_spaces: Vec<SpaceDescriptor> = DILATION_SPACES.iter().map(|s| s.parse()).collect::<Result<_>>()?;
    for i in 0..trials {
        let u = random_step_function(&mut rng);
        let v = random_step_function(&mut rng);
        let us = decreasing_rearrangement(&u);
        if u.values().iter().any(|&t| u.level_measure(t) != us.level_measure(t)) {
            rep.equimeasurability_failures += 1;
        }
        let vs = decreasing_rearrangement(&v);
        if u.inner(&v) > us.inner(&vs) * (1.0 + 1e-12) {
            rep.hardy_littlewood_failures += 1;
        }
        let (uu, vv, ww) = (maximal_rearrangement(&u), maximal_rearrangement(&v), maximal_rearrangement(&u.add(&v)));
        let mut probes: Vec<f64> =
            u.breakpoints().iter().chain(v.breakpoints()).copied().filter(|&s| s > 0.0 && s < 1.0).collect();
        probes.extend((1..64).map(|j| j as f64 / 64.0));
        if probes.iter().any(|&s| ww.eval(s) > (uu.eval(s) + vv.eval(s)) * (1.0 + 1e-12)) {
            rep.subadditivity_failures += 1;
        }
        // Dilations: λ log-uniform in [1/8, 8], one space per trial.
        use rand::Rng;
        let lam = 2f64.powf(rng.random_range(-3.0..=3.0));
        let desc = &dil_spaces[i % dil_spaces.len()];
        let nf = glz_norm_numeric(&u, desc, cfg)?.finite();
        let nd = glz_norm_numeric(&dilation(&u, lam)?, desc, cfg)?.finite();
        if let (Some(nf), Some(nd)) = (nf, nd) {
            let tol = 1.0 + 1e-6;
            if nd > 1f64.max(1.0 / lam) * nf * tol {
                rep.dilation_stated_bound_failures += 1;
            }
            if nd > 1f64.max(lam) * nf * tol {
                rep.dilation_max_lambda_failures += 1;
            }
        }
        let nu = glz_norm_numeric(&u, &l2, cfg)?.finite().unwrap_or(f64::NAN);
        let nv = glz_norm_numeric(&v, &l2, cfg)?.finite().unwrap_or(f64::NAN);
        rep.cauchy_schwarz_equality_error =
            rep.cauchy_schwarz_equality_error.max((u.inner(&u) / (nu * nu) - 1.0).abs());
        rep.cauchy_schwarz_excess = rep.cauchy_schwarz_excess.max(u.inner(&v) / (nu * nv) - 1.0);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use crate::ExtendedRational;

    fn ext(n: i64) -> ExtendedRational {
        ExtendedRational::int(n)
    }

    #[test]
    fn head_examples() {
        let cfg = VerifyConfig::default();
        let rep = verify_head_lemma(&PsiParams::new(qi(0), ext(2), qi(1), qi(0)), &cfg);
        assert!(rep.pass && rep.ratios.iter().all(|r| (0.5..=2.0).contains(r)), "{rep:?}");
        let rep = verify_head_lemma(&PsiParams::new(q(1, 2), ext(2), qi(0), qi(0)), &cfg);
        assert!(rep.pass && rep.ratios.iter().all(|r| (r - 1.0).abs() < 1e-6));
        let rep = verify_head_lemma(&PsiParams::new(qi(0), ext(2), q(1, 2), qi(0)), &cfg);
        assert!(rep.pass && rep.divergence_expected && rep.divergence_observed);
    }

    #[test]
    fn tail_examples() {
        let cfg = VerifyConfig::default();
        for p in [
            PsiParams::new(q(-1, 2), ext(2), qi(0), qi(0)),
            PsiParams::new(qi(0), ext(2), qi(0), qi(0)),
            PsiParams::new(qi(1), ext(1), qi(0), qi(0)),
        ] {
            let rep = verify_tail_lemma(&p, &cfg);
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn theta_rho_examples() {
        let cfg = VerifyConfig { kmax: 24, ..Default::default() };
        let q = |m, n, s: &str| EmbeddingQuery::new(m, n, s.parse().unwrap()).unwrap();
        for query in [q(1, 2, "L(4,1;0,0)"), q(2, 3, "L(4,2;0,0)"), q(2, 2, "L*(1,1;0,0)")] {
            for rep in verify_theta_rho(&query, &cfg).unwrap() {
                assert!(rep.pass, "{rep:?}");
            }
        }
    }

    #[test]
    fn duality_examples() {
        let cfg = QuadratureConfig::default();
        let rep = verify_duality(&"L(2,2;0,0)".parse().unwrap(), 100, 1.0 + 1e-7, DEFAULT_SEED, &cfg).unwrap();
        assert!(rep.pass, "{rep:?}");
        let a = verify_duality(&"L(inf,2;-1,0)".parse().unwrap(), 100, 10.0, DEFAULT_SEED, &cfg).unwrap();
        let b = verify_duality(&"L(inf,2;-1,0)".parse().unwrap(), 100, 10.0, DEFAULT_SEED, &cfg).unwrap();
        assert!(a.empirical_constant.is_finite() && a == b);
        let chi = StepFunction::indicator(0.0, 0.25).unwrap();
        let n = glz_norm_numeric(&chi, &"L(2,2;0,0)".parse().unwrap(), &cfg).unwrap().finite().unwrap();
        assert!((chi.inner(&chi) - n * n).abs() < 1e-12);
    }

    #[test]
    fn fundamental_product_is_r() {
        let cfg = VerifyConfig { kmax: 20, ..Default::default() };
        for s in ["L(2,2;0,0)", "L(inf,2;-1,0)", "L*(1,2;0,0)", "L(4,3;1,-1)"] {
            let rep = verify_fundamental(&s.parse().unwrap(), &cfg).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn csv_has_one_row_per_grid_point() {
        let cfg = VerifyConfig { kmin: 8, kmax: 10, ..Default::default() };
        let rep = verify_head_lemma(&PsiParams::new(q(1, 2), ext(2), qi(0), qi(0)), &cfg);
        let csv = rep.to_csv();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("k,r,numeric,symbolic,ratio\n8,"));
    }
}
