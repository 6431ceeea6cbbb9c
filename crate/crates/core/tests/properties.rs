use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use backreact::cosmo::{cosmo_condition, map_params, CosmoParams};
use backreact::decay::{fit_decay_exponent, FitWindow, OscillationHandling};
use backreact::dispersion::{check_condition, classify, s_eval, Classification, Dispersion, RootKind};
use backreact::grid::PGrid;
use backreact::quad::Integrator;
use backreact::radial::{mode_to_radial, radial_to_mode, sinc, RadialField};
use backreact::spectral::{fa_closed, Kernel};
use backreact::ModelParams;

fn mass_and_point() -> impl Strategy<Value = (f64, f64)> {
    (0.2..3.0_f64).prop_flat_map(|m| (Just(m), (-3.95 * m * m)..(10.0 * m * m)))
}

fn admissible_params() -> impl Strategy<Value = ModelParams> {
    (
        mass_and_point(),
        0.05..80.0_f64,
        -4.0..4.0_f64,
        -4.0..4.0_f64,
        -4.0..4.0_f64,
        -4.0..4.0_f64,
    )
        .prop_map(|((m, a), lambda, lambda1, lambda2, g1, g2)| {
            let mut p = ModelParams {
                m,
                hbar: 1.0,
                lambda,
                lambda1,
                lambda2,
                g1,
                g2,
                a,
            };
            if !check_condition(&p) {
                p.g1 = -p.g1;
                p.g2 = -p.g2;
            }
            p
        })
        .prop_filter("couplings must not all vanish", |p| p.validate().is_ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn kernel_vanishes_at_renormalization_point((m, a) in mass_and_point()) {
        prop_assert!(fa_closed(Complex64::new(a, 0.0), m, a).unwrap().norm() <= 1e-12);
    }

    #[test]
    fn kernel_is_increasing_on_the_real_domain(
        (m, a) in mass_and_point(), u in 1e-6..1.0_f64, v in 1e-6..1.0_f64, scale in 0.0..6.0_f64,
    ) {
        let k = Kernel::new(m, a).unwrap();
        let lo = -4.0 * m * m;
        let s1 = lo + (u * 10f64.powf(scale)).min(v * 10f64.powf(scale));
        let s2 = lo + (u * 10f64.powf(scale)).max(v * 10f64.powf(scale));
        prop_assume!(s2 > s1 * (1.0 + 1e-9) + 1e-12);
        prop_assert!(k.eval_real(s2) > k.eval_real(s1));
    }

    #[test]
    fn imaginary_part_follows_the_half_plane(
        (m, a) in mass_and_point(), x in -100.0..100.0_f64, y in 1e-4..50.0_f64, lower in any::<bool>(),
    ) {
        let y = if lower { -y } else { y };
        let v = fa_closed(Complex64::new(x, y), m, a).unwrap();
        prop_assert!(v.im != 0.0 && v.im.signum() == y.signum());
    }

    #[test]
    fn telescoping((m, a) in mass_and_point(), b in -3.9..10.0_f64, x in -40.0..40.0_f64, y in -20.0..20.0_f64) {
        let b = b * m * m;
        let z = Complex64::new(x, y);
        prop_assume!(y != 0.0 || x > -4.0 * m * m);
        let lhs = fa_closed(Complex64::new(b, 0.0), m, a).unwrap() + fa_closed(z, m, b).unwrap();
        let rhs = fa_closed(z, m, a).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
    }

    #[test]
    fn reported_zeros_are_simple_sign_changes(p in admissible_params()) {
        let report = classify(&p).unwrap();
        prop_assume!(report.classification != Classification::Degenerate);
        prop_assert!(report.roots.len() <= 2);
        let d = Dispersion::new(&p).unwrap();
        for r in report.roots.iter().filter(|r| r.kind == RootKind::Interior) {
            let scale = d.derivative_scale(r.s).max(1.0);
            prop_assert!(d.eval_real(r.s).abs() <= 1e-12 * scale * r.s.abs().max(1.0));
            let delta = 1e-7 * r.s.abs().max(1e-3);
            let (below, above) = (d.eval_real(r.s - delta), d.eval_real(r.s + delta));
            prop_assert!(below.signum() != above.signum(), "{below} {above} at {}", r.s);
        }
        let sign_ok = match report.classification {
            Classification::Empty => report.roots.is_empty(),
            Classification::AllNegative => !report.roots.is_empty() && report.roots.iter().all(|r| r.s < 0.0),
            Classification::ContainsPositive => report.roots.iter().any(|r| r.s >= 0.0),
            Classification::Degenerate => true,
        };
        prop_assert!(sign_ok);
    }

    // With λ₂ = 0 and g₂/λ₁ ≥ 0, κF + (g₁ + g₂s)/λ₁ increases to +∞, so it
    // has one zero exactly when it starts negative at −4m².
    #[test]
    fn monotone_against_line_count(
        (m, a) in mass_and_point(), lambda in 0.05..80.0_f64, lambda1 in 0.1..4.0_f64,
        g1 in -4.0..4.0_f64, g2 in 0.0..4.0_f64, flip in any::<bool>(),
    ) {
        let (lambda1, g1, g2) = if flip { (-lambda1, -g1, -g2) } else { (lambda1, g1, g2) };
        let p = ModelParams { m, hbar: 1.0, lambda, lambda1, lambda2: 0.0, g1, g2, a };
        prop_assume!(p.validate().is_ok());
        let report = classify(&p).unwrap();
        prop_assume!(!report.tail_unresolved);
        let k = Kernel::new(m, a).unwrap();
        let kappa = p.kappa();
        let gap = |s: f64| kappa * k.eval_real(s) + (g1 + g2 * s) / lambda1;
        let expected = usize::from(gap(-4.0 * m * m) < 0.0);
        prop_assert_eq!(report.interior_roots().count(), expected);
    }

    #[test]
    fn no_zeros_off_the_real_axis(p in admissible_params(), x in -50.0..50.0_f64, y in 1e-3..30.0_f64) {
        let v = s_eval(Complex64::new(x, y), &p).unwrap();
        prop_assert!(v.norm() > 0.0);
    }

    #[test]
    fn cosmological_condition_is_the_stability_condition(
        m in 1e-5..10.0_f64, xi in 0.001..2.0_f64, alpha3 in -1e6..1e6_f64, mp in 0.1..100.0_f64,
    ) {
        let c = CosmoParams { m, xi, alpha3, m_planck: mp, a: 0.0 };
        let p = map_params(&c).unwrap();
        prop_assert_eq!(p.g1, -mp * mp / (8.0 * PI));
        prop_assert_eq!(p.lambda2, 3.0 * (xi - 1.0 / 6.0));
        prop_assert_eq!(check_condition(&p), cosmo_condition(&c));
    }

    #[test]
    fn fitter_is_scale_equivariant(c in 1e-6..1e6_f64, negate in any::<bool>(), freq in 2.0..8.0_f64) {
        let times: Vec<f64> = (0..20_000).map(|k| 10.0 + 0.05 * k as f64).collect();
        let series: Vec<f64> = times.iter().map(|t| t.powf(-1.5) * (freq * t).cos()).collect();
        let c = if negate { -c } else { c };
        let scaled: Vec<f64> = series.iter().map(|v| c * v).collect();
        let w = FitWindow { t_min: 90.0, t_max: 900.0 };
        for h in [OscillationHandling::Envelope, OscillationHandling::Rms { block: 10.0 }] {
            let a = fit_decay_exponent(&times, &series, w, h).unwrap();
            let b = fit_decay_exponent(&times, &scaled, w, h).unwrap();
            prop_assert!((a.exponent - b.exponent).abs() <= 1e-9);
            prop_assert!((b.amplitude / a.amplitude - c.abs()).abs() <= 1e-8 * c.abs());
        }
    }
}

#[test]
fn fitter_recovers_synthetic_exponent_and_tolerates_later_start() {
    let times: Vec<f64> = (0..99_001).map(|k| 10.0 + 0.01 * k as f64).collect();
    let series: Vec<f64> = times.iter().map(|t| t.powf(-1.5) * (5.0 * t).cos()).collect();
    let base = fit_decay_exponent(
        &times,
        &series,
        FitWindow {
            t_min: 10.0,
            t_max: 1000.0,
        },
        OscillationHandling::Envelope,
    )
    .unwrap();
    assert!((base.exponent + 1.5).abs() <= 0.02, "{}", base.exponent);
    let later = fit_decay_exponent(
        &times,
        &series,
        FitWindow {
            t_min: 20.0,
            t_max: 1000.0,
        },
        OscillationHandling::Envelope,
    )
    .unwrap();
    assert!((later.exponent - base.exponent).abs() < 0.05);
}

#[test]
fn special_point_is_a_zero_on_the_condition_boundary() {
    // g₂λ₁/λ₂ = g₁ makes −λ₁/λ₂ a zero of S; here it lies below −4m².
    let p = ModelParams {
        m: 0.5,
        hbar: 1.0,
        lambda: 1.0,
        lambda1: 3.0,
        lambda2: 1.0,
        g1: 3.0,
        g2: 1.0,
        a: -0.5,
    };
    let report = classify(&p).unwrap();
    let special: Vec<_> = report
        .roots
        .iter()
        .filter(|r| r.kind == RootKind::SpecialPoint)
        .collect();
    assert_eq!(special.len(), 1);
    assert_eq!(special[0].s, -3.0);
    assert!(report.condition_holds);
}

#[test]
fn massless_special_point_is_negative() {
    // The special point stays a zero of S at m = 0, where every interior zero
    // is positive.
    let p = ModelParams {
        m: 0.0,
        hbar: 1.0,
        lambda: 1.0,
        lambda1: 2.0,
        lambda2: 1.0,
        g1: 2.0,
        g2: 1.0,
        a: 1.0,
    };
    let report = classify(&p).unwrap();
    assert!(report.interior_roots().all(|r| r.s > 0.0));
    assert!(report
        .roots
        .iter()
        .any(|r| r.kind == RootKind::SpecialPoint && r.s == -2.0));
}

#[test]
fn radial_round_trip() {
    for (r0, dr) in [(2.0, 0.005), (3.0, 0.005)] {
        let field = RadialField::bump(r0, dr, r0 + 0.5).unwrap();
        let pg = PGrid::covering(PI / (4.0 * dr), 0.05).unwrap();
        let modes = radial_to_mode(&field, &pg.points()).unwrap();
        let back = mode_to_radial(&pg, &modes, dr, field.len()).unwrap();
        let worst = field
            .values
            .iter()
            .zip(&back.values)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(worst <= 1e-6 * field.max_abs(), "R0 = {r0}: {worst:e}");
    }
}

// `1 − r²` has a kink at its support edge, which limits the trapezoid rule
// to second order.
#[test]
fn transform_error_falls_at_second_order() {
    let quad = Integrator::new(1e-14, 1e-13);
    let points = [0.0, 0.7, 2.0, 5.0, 9.0];
    let exact: Vec<f64> = points
        .iter()
        .map(|&p| {
            let (v, _) = quad
                .integrate_real(|r| (1.0 - r * r) * r * r * sinc(p * r), 0.0, 1.0, &[])
                .unwrap();
            4.0 * PI * v
        })
        .collect();
    let err = |dr: f64| {
        let field = RadialField::from_fn(|r| (1.0 - r * r).max(0.0), dr, 1.5, 1.0).unwrap();
        let modes = radial_to_mode(&field, &points).unwrap();
        modes
            .iter()
            .zip(&exact)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    };
    let (coarse, fine) = (err(0.02), err(0.01));
    let order = (coarse / fine).log2();
    assert!((order - 2.0).abs() < 0.2, "observed order {order}");
}
