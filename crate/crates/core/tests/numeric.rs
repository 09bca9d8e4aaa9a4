use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use glz_embed::rearrange::{decreasing_rearrangement, dilation, maximal_rearrangement, random_step_function};
use glz_embed::verify::{
    property_suite, verify_duality, verify_head_lemma, verify_tail_lemma, VerifyConfig, DEFAULT_SEED,
};
use glz_embed::{
    fundamental_function_numeric, glz_norm_numeric, parse_q, ExtendedRational, PsiParams, QuadratureConfig,
    SpaceDescriptor, StepFunction,
};

fn psi(lambda: &str, q: &str, alpha: &str, beta: &str) -> PsiParams {
    PsiParams::new(
        parse_q(lambda).unwrap(),
        q.parse::<ExtendedRational>().unwrap(),
        parse_q(alpha).unwrap(),
        parse_q(beta).unwrap(),
    )
}

#[test]
fn head_and_tail_reports() {
    let cfg = VerifyConfig::default();
    assert!(verify_head_lemma(&psi("0", "2", "1", "0"), &cfg).pass);
    let div = verify_head_lemma(&psi("0", "2", "1/2", "0"), &cfg);
    assert!(div.pass && div.divergence_observed && div.ratios.is_empty());
    for p in [psi("-1/2", "2", "0", "0"), psi("0", "2", "0", "0"), psi("1", "1", "5", "-3")] {
        assert!(verify_tail_lemma(&p, &cfg).pass);
    }
}

#[test]
fn a_wrong_band_fails() {
    let cfg = VerifyConfig { band: 1.0 + 1e-9, ..Default::default() };
    let rep = verify_tail_lemma(&psi("0", "2", "0", "0"), &cfg);
    assert!(!rep.pass && rep.reason.is_some());
}

#[test]
fn pass_survives_tighter_tolerance() {
    let loose = VerifyConfig::default();
    let mut tight = VerifyConfig::default();
    tight.quadrature.rel_tol /= 10.0;
    for p in [psi("0", "2", "1", "0"), psi("1/3", "inf", "1", "1"), psi("0", "3", "2/3", "1")] {
        assert!(verify_head_lemma(&p, &loose).pass);
        assert!(verify_head_lemma(&p, &tight).pass);
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let cfg = VerifyConfig::default();
    let p = psi("0", "inf", "2", "-1");
    assert_eq!(verify_head_lemma(&p, &cfg).to_csv(), verify_head_lemma(&p, &cfg).to_csv());
    let d: SpaceDescriptor = "L(4,2;1,-1)".parse().unwrap();
    let q = QuadratureConfig::default();
    let a = serde_json::to_string(&verify_duality(&d, 20, 10.0, DEFAULT_SEED, &q).unwrap()).unwrap();
    let b = serde_json::to_string(&verify_duality(&d, 20, 10.0, DEFAULT_SEED, &q).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn lorentz_fundamental_function_is_a_power() {
    let d: SpaceDescriptor = "L(4,2;0,0)".parse().unwrap();
    let cfg = QuadratureConfig::default();
    for r in [1e-2, 1e-5, 1e-9] {
        let v = fundamental_function_numeric(&d, r, &cfg).unwrap().finite().unwrap();
        // ‖χ_{(0,r)}‖ = (∫₀^r s^{2/4−1} ds)^{1/2} = (2 r^{1/2})^{1/2}
        assert_relative_eq!(v, (2.0 * r.sqrt()).sqrt(), max_relative = 1e-7);
    }
}

#[test]
fn property_suite_small_run() {
    let rep = property_suite(50, DEFAULT_SEED, &QuadratureConfig::default()).unwrap();
    assert_eq!(rep.equimeasurability_failures + rep.hardy_littlewood_failures + rep.subadditivity_failures, 0);
    assert_eq!(rep.dilation_max_lambda_failures, 0);
    assert!(rep.cauchy_schwarz_equality_error < 1e-6 && rep.cauchy_schwarz_excess < 1e-6);
}

#[test]
fn dilation_by_more_than_one_can_exceed_one() {
    // ‖D_2 χ_{(0,1/2)}‖_{L¹} = ‖χ_{(0,1)}‖_{L¹} = 2‖χ_{(0,1/2)}‖_{L¹}
    let f = StepFunction::indicator(0.0, 0.5).unwrap();
    let l1: SpaceDescriptor = "L(1,1;0,0)".parse().unwrap();
    let cfg = QuadratureConfig::default();
    let a = glz_norm_numeric(&f, &l1, &cfg).unwrap().finite().unwrap();
    let b = glz_norm_numeric(&dilation(&f, 2.0).unwrap(), &l1, &cfg).unwrap().finite().unwrap();
    assert_relative_eq!(b / a, 2.0, max_relative = 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rearrangement_preserves_mass_and_order(seed in any::<u64>()) {
        let f = random_step_function(&mut ChaCha8Rng::seed_from_u64(seed));
        let fs = decreasing_rearrangement(&f);
        prop_assert!((fs.integral() - f.integral()).abs() <= 1e-12 * f.integral());
        prop_assert!(fs.values().windows(2).all(|w| w[0] >= w[1]));
        let fss = maximal_rearrangement(&f);
        for k in 1..32 {
            let s = k as f64 / 32.0;
            prop_assert!(fss.eval(s) >= fs.eval(s) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn lorentz_l2_equals_plain_l2(seed in any::<u64>()) {
        let f = random_step_function(&mut ChaCha8Rng::seed_from_u64(seed));
        let d: SpaceDescriptor = "L(2,2;0,0)".parse().unwrap();
        let v = glz_norm_numeric(&f, &d, &QuadratureConfig::default()).unwrap().finite().unwrap();
        prop_assert!((v * v / f.inner(&f) - 1.0).abs() < 1e-6);
    }
}
