use fracmix::mittag_leffler::{
    decay_envelope, ml_asymptotic, ml_real_zeros, ml_real_zeros_with_step, no_real_zeros,
    SCAN_EVAL_TOL, SCAN_TOLERANCE,
};
use fracmix::special::recip_gamma;
use fracmix::{ml_eval, Error, MLQuery, Method, MittagLeffler};
use proptest::prelude::*;
use std::f64::consts::PI;

const TOL: f64 = 1e-10;

/// Scaled complementary error function `e^{x²} erfc(x)` for x ≥ 0, computed
/// without any Mittag-Leffler machinery: Maclaurin series of erf below 2,
/// the Laplace continued fraction above.
fn erfcx(x: f64) -> f64 {
    assert!(x >= 0.0);
    if x < 2.0 {
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        while term.abs() > 1e-20 * sum.abs() {
            n += 1.0;
            term *= -x * x / n;
            sum += term / (2.0 * n + 1.0);
        }
        let erf = 2.0 / PI.sqrt() * sum;
        (x * x).exp() * (1.0 - erf)
    } else {
        // erfcx(x) = 1/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …))))
        let mut tail = x;
        for k in (1..400).rev() {
            tail = x + (k as f64 / 2.0) / tail;
        }
        1.0 / (PI.sqrt() * tail)
    }
}

#[test]
fn erfcx_oracle_is_sane() {
    assert!((erfcx(0.0) - 1.0).abs() < 1e-16);
    // Independent reference value e·erfc(1).
    assert!((erfcx(1.0) - 0.427_583_576_155_807).abs() < 1e-14);
    // Both branches agree where they meet.
    let lo = erfcx(1.999_999_999);
    let hi = erfcx(2.0);
    assert!((lo - hi).abs() < 1e-9);
}

#[test]
fn half_order_matches_erfc() {
    let ml = MittagLeffler::with_tolerance(0.5, 1.0, TOL).unwrap();
    for &x in &[0.1, 1.0, 5.0, 10.0] {
        let r = ml.eval(-x).unwrap();
        let err = (r.value - erfcx(x)).abs();
        assert!(err <= 1e-9, "x={x}: {} vs {} ({err:e})", r.value, erfcx(x));
        assert!(err <= r.abs_error_bound + 1e-15, "x={x}: bound {:e} < err {err:e}", r.abs_error_bound);
    }
}

#[test]
fn exponential_identity() {
    let ml = MittagLeffler::with_tolerance(1.0, 1.0, TOL).unwrap();
    for i in 0..1000 {
        let z = -50.0 + 55.0 * i as f64 / 999.0;
        let v = ml.value(z).unwrap();
        assert!((v - z.exp()).abs() <= TOL, "z={z}");
    }
}

#[test]
fn wave_identities() {
    let cos = MittagLeffler::with_tolerance(2.0, 1.0, TOL).unwrap();
    let sinc = MittagLeffler::with_tolerance(2.0, 2.0, TOL).unwrap();
    for i in 1..=1000 {
        let t = 20.0 * i as f64 / 1000.0;
        let c = cos.value(-t * t).unwrap();
        let s = sinc.value(-t * t).unwrap();
        assert!((c - t.cos()).abs() <= TOL, "cos t={t}");
        assert!((s - t.sin() / t).abs() <= TOL, "sinc t={t}");
    }
}

#[test]
fn zero_of_sinc_at_pi() {
    let r = ml_eval(MLQuery::new(2.0, 2.0, -PI * PI).unwrap(), TOL).unwrap();
    assert!(r.value.abs() <= TOL);
}

#[test]
fn leading_asymptotic_terms() {
    let r = ml_asymptotic(0.4, 1.0, 1e4, 1).unwrap();
    assert!((r.value * 1e4 / recip_gamma(0.6) - 1.0).abs() < 1e-14);
    let r = ml_asymptotic(1.5, 2.0, 1e4, 1).unwrap();
    assert!((r.value * 1e4 / recip_gamma(0.5) - 1.0).abs() < 1e-14);
    assert_eq!(r.method, Method::Asymptotic);
}

#[test]
fn asymptotic_agrees_with_evaluator_within_its_bound() {
    let r = ml_asymptotic(0.5, 1.0, 100.0, 3).unwrap();
    let exact = erfcx(100.0);
    assert!((r.value - exact).abs() <= r.abs_error_bound);
    let e = ml_eval(MLQuery::new(0.5, 1.0, -100.0).unwrap(), 1e-12).unwrap();
    assert!((r.value - e.value).abs() <= r.abs_error_bound + e.abs_error_bound);
}

#[test]
fn two_term_expansion_brackets_large_arguments() {
    for &(mu, eta) in &[(0.25, 1.0), (0.5, 1.0), (0.75, 1.0), (1.2, 1.0), (1.5, 2.0), (1.8, 2.0)] {
        for &x in &[1e3, 1e4, 1e5] {
            let a = ml_asymptotic(mu, eta, x, 2).unwrap();
            let e = ml_eval(MLQuery::new(mu, eta, -x).unwrap(), 1e-12).unwrap();
            assert!(
                (a.value - e.value).abs() <= a.abs_error_bound,
                "({mu},{eta}) x={x}: {} vs {} bound {:e}",
                a.value,
                e.value,
                a.abs_error_bound
            );
        }
    }
}

#[test]
fn too_many_terms_is_a_regime_error() {
    assert!(ml_asymptotic(0.5, 1.0, 0.5, 20).is_err());
}

#[test]
fn zeros_for_near_wave_order() {
    let scan = ml_real_zeros(1.9, 2.0, 1e3).unwrap();
    assert!(!scan.zeros.is_empty());
    assert_eq!(scan.max_zero, scan.zeros.last().copied());
    // Independent coarse oracle: count sign changes on a 10⁻³ grid.
    let ml = MittagLeffler::with_tolerance(1.9, 2.0, 1e-12).unwrap();
    let mut changes = 0;
    let mut prev = ml.value(-1e-3).unwrap();
    let n = 1_000_000;
    for i in 2..=n {
        let v = ml.value(-(i as f64) * 1e-3).unwrap();
        if v.signum() != prev.signum() {
            changes += 1;
        }
        prev = v;
    }
    assert_eq!(scan.zeros.len(), changes);
    // Across a 10⁻¹² bracket the function moves by far less than any
    // evaluation tolerance, so the sign change is checked with the scan's own
    // evaluator.
    let scan_ml = MittagLeffler::with_tolerance(1.9, 2.0, SCAN_EVAL_TOL).unwrap();
    for (&t, &(lo, hi)) in scan.zeros.iter().zip(&scan.brackets) {
        assert!(hi - lo <= 1e-12 && lo <= t && t <= hi);
        assert!(ml.value(-t).unwrap().abs() <= SCAN_TOLERANCE);
        let (a, b) = (scan_ml.value(-lo).unwrap(), scan_ml.value(-hi).unwrap());
        assert!(a == 0.0 || b == 0.0 || a.signum() != b.signum());
    }
    println!("E_1.9,2 zeros on (0,1000]: {} (h = {:?})", scan.zeros.len(), scan.max_zero);
}

#[test]
fn zero_free_parameters() {
    assert!(ml_real_zeros(1.2, 2.0, 1e3).unwrap().zeros.is_empty());
    let scan = ml_real_zeros(1.5, 2.25, 1e3).unwrap();
    assert!(scan.zeros.is_empty());
    assert_eq!(scan.max_zero, None);
    assert!(no_real_zeros(1.5, 2.25).unwrap());
    assert!(!no_real_zeros(1.5, 2.0).unwrap());
    assert!(no_real_zeros(1.1, 2.0).unwrap());
    assert!(no_real_zeros(2.0, 3.0).is_err());
}

#[test]
fn coarse_step_is_configurable() {
    let fine = ml_real_zeros(1.9, 2.0, 100.0).unwrap();
    let coarse = ml_real_zeros_with_step(1.9, 2.0, 100.0, 0.05).unwrap();
    assert_eq!(fine.zeros.len(), coarse.zeros.len());
    for (a, b) in fine.zeros.iter().zip(&coarse.zeros) {
        assert!((a - b).abs() < 1e-11);
    }
}

#[test]
fn decay_envelope_stabilises() {
    for &(mu, eta) in &[(0.5, 1.0), (1.5, 1.0), (1.5, 2.0)] {
        let ml = MittagLeffler::new(mu, eta).unwrap();
        let env = decay_envelope(&ml, 1e6, 8).unwrap();
        assert!(env.m.is_finite() && env.m > 0.0);
        let n = env.by_decade.len();
        // The running supremum stops growing over the last three decades.
        assert_eq!(env.by_decade[n - 4].1, env.m, "({mu},{eta}) {:?}", env.by_decade);
        println!("M({mu},{eta}) = {:.6}", env.m);
    }
}

#[test]
fn huge_positive_values_report_non_convergence() {
    // E_{0.1,0.5}(4.77) ~ 10·exp(4.77^10) overflows f64.
    let err = MittagLeffler::new(0.1, 0.5).unwrap().eval(4.772373914868894).unwrap_err();
    assert!(matches!(err, Error::NonConvergence { .. }), "{err:?}");
    // E_{1,1}(40) = e^40: one ulp is ~3e1, far above the tolerance.
    assert!(MittagLeffler::new(1.0, 1.0).unwrap().eval(40.0).is_err());
    assert!(MittagLeffler::with_tolerance(1.0, 1.0, 1e3).unwrap().eval(20.0).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn recurrence_holds(mu in 0.2f64..1.95, eta in 0.3f64..2.5, z in -60.0f64..3.0) {
        prop_assume!(z <= 0.0 || z.powf(1.0 / mu) <= 8.0);
        let lhs = MittagLeffler::new(mu, eta).unwrap().eval(z).unwrap();
        // The shifted function is multiplied by z, so it is evaluated at a
        // tolerance scaled down by |z|.
        let shifted = MittagLeffler::with_tolerance(mu, mu + eta, TOL / z.abs().max(1.0))
            .unwrap()
            .value(z)
            .unwrap();
        let rhs = z * shifted + recip_gamma(eta);
        prop_assert!((lhs.value - rhs).abs() <= 10.0 * TOL, "lhs {} rhs {}", lhs.value, rhs);
    }

    #[test]
    fn bound_is_within_tolerance(mu in 0.1f64..2.0, eta in 0.5f64..3.0, z in -1e4f64..5.0) {
        // Past z^{1/μ} ≈ 8 the value is too large for an absolute 1e-10.
        prop_assume!(z <= 0.0 || z.powf(1.0 / mu) <= 8.0);
        let r = MittagLeffler::new(mu, eta).unwrap().eval(z).unwrap();
        prop_assert!(r.abs_error_bound <= TOL);
        prop_assert!(r.value.is_finite());
    }
}
