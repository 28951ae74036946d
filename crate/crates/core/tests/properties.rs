use std::f64::consts::PI;

use proptest::prelude::*;
use qdilog::param::DEFAULT_LATTICE_TOL;
use qdilog::variants::g_small_argument;
use qdilog::{
    classify_point, color_of, gb_product, qpochhammer, render, Complex64, GbEvaluator, LatticeKind,
    ModulusParameter, ProductConfig, RenderFunction, RenderOptions, RenderSpec,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

fn ev(b: f64) -> GbEvaluator {
    GbEvaluator::new(ModulusParameter::real(b).unwrap())
}

/// `z` with `Re z = s·Re Q` for `s` in the central part of the strip.
fn strip_z(p: &ModulusParameter, s: f64, y: f64) -> Complex64 {
    Complex64::new(s * p.big_q().re, y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q_and_zeta_are_dual_symmetric(r in 0.05f64..5.0, theta in -1.4f64..1.4) {
        let p = ModulusParameter::polar(r, theta).unwrap();
        let d = p.dual();
        prop_assert!((p.big_q() - d.big_q()).norm() <= 4.0 * f64::EPSILON * p.big_q().norm());
        prop_assert!(rel(p.zeta_b(), d.zeta_b()) < 1e-13);
    }

    #[test]
    fn lattice_zeros_are_classified(b in 0.2f64..3.0, n in 0u32..=5, m in 0u32..=5) {
        let p = ModulusParameter::real(b).unwrap();
        let z = p.big_q() + p.b() * n as f64 + p.b_inv() * m as f64;
        let c = classify_point(&p, z, DEFAULT_LATTICE_TOL);
        prop_assert_eq!(c.kind, LatticeKind::Zero);
        prop_assert!(c.order >= 1);
    }

    #[test]
    fn generic_lattice_points_are_simple(pick in 0usize..2, n in 0u32..=5, m in 0u32..=5) {
        let p = ModulusParameter::real([0.7, 0.248][pick]).unwrap();
        let z = p.big_q() + p.b() * n as f64 + p.b_inv() * m as f64;
        prop_assert_eq!(classify_point(&p, z, DEFAULT_LATTICE_TOL).order, 1);
        let w = -(p.b() * n as f64 + p.b_inv() * m as f64);
        prop_assert_eq!(classify_point(&p, w, DEFAULT_LATTICE_TOL).order, 1);
    }

    #[test]
    fn functional_equation(b in 0.25f64..2.5, s in 0.1f64..0.9, y in -2.0f64..2.0, dual in any::<bool>()) {
        let e = ev(b);
        let z = strip_z(e.param(), s, y);
        let w = if dual { 1.0 / b } else { b };
        let lhs = e.gb(z + w).unwrap().value;
        let rhs = (1.0 - (2.0 * PI * I * w * z).exp()) * e.gb(z).unwrap().value;
        prop_assert!(rel(lhs, rhs) < 1e-8, "b={} z={} rel={:e}", b, z, rel(lhs, rhs));
    }

    #[test]
    fn reflection(b in 0.25f64..2.5, s in 0.1f64..0.9, y in -0.5f64..0.5) {
        let e = ev(b);
        let q = e.param().big_q();
        let z = strip_z(e.param(), s, y);
        let lhs = e.gb(z).unwrap().value * e.gb(q - z).unwrap().value;
        let rhs = (PI * I * z * (z - q)).exp();
        prop_assert!((lhs - rhs).norm() < 1e-8);
    }

    #[test]
    fn self_duality(b in 0.25f64..1.0, s in 0.1f64..0.9, y in -2.0f64..2.0) {
        let (e, d) = (ev(b), ev(1.0 / b));
        let z = strip_z(e.param(), s, y);
        prop_assert!(rel(e.gb(z).unwrap().value, d.gb(z).unwrap().value) < 1e-9);
    }

    #[test]
    fn conjugation(b in 0.25f64..2.5, x in -3.0f64..5.0, y in -2.0f64..2.0) {
        let e = ev(b);
        let z = Complex64::new(x, y);
        prop_assume!(qdilog::param::nearest_lattice_distance(e.param(), z, 1e-3).is_none());
        prop_assume!(qdilog::param::nearest_lattice_distance(e.param(), e.param().big_q() - z.conj(), 1e-3).is_none());
        let lhs = e.gb(z).unwrap().value.conj() * e.gb(e.param().big_q() - z.conj()).unwrap().value;
        prop_assert!((lhs - 1.0).norm() < 1e-8, "b={} z={} lhs={}", b, z, lhs);
    }

    #[test]
    fn unitary_on_the_critical_line(b in 0.25f64..2.5, x in -5.0f64..5.0) {
        let e = ev(b);
        let z = Complex64::new(e.param().big_q().re / 2.0, x);
        prop_assert!((e.gb(z).unwrap().value.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sb_is_real_on_the_real_line(b in 0.3f64..2.0, x in -4.0f64..6.0) {
        let e = ev(b);
        let z = Complex64::new(x, 0.0);
        prop_assume!(qdilog::param::nearest_lattice_distance(e.param(), z, 1e-3).is_none());
        let s = e.sb(z).unwrap().value;
        prop_assert!(s.im.abs() < 1e-9 * (1.0 + s.norm()));
    }

    #[test]
    fn product_satisfies_the_functional_equation(r in 0.3f64..1.2, s in 0.1f64..0.9, y in -1.0f64..1.0) {
        let p = ModulusParameter::polar(r, PI / 4.0).unwrap();
        let cfg = ProductConfig::default();
        let z = strip_z(&p, s, y);
        let lhs = gb_product(&p, z + p.b(), &cfg).unwrap().value;
        let rhs = (1.0 - (2.0 * PI * I * p.b() * z).exp()) * gb_product(&p, z, &cfg).unwrap().value;
        prop_assert!(rel(lhs, rhs) < 1e-9);
    }

    #[test]
    fn qpochhammer_index_shift(ar in -2.0f64..2.0, ai in -2.0f64..2.0, qr in 0.0f64..0.9, qt in -3.1f64..3.1) {
        let a = Complex64::new(ar, ai);
        prop_assume!((1.0 - a).norm() > 1e-3);
        let q = Complex64::from_polar(qr, qt);
        let cfg = ProductConfig::default();
        let lhs = qpochhammer(a, q, &cfg).unwrap() / (1.0 - a);
        let rhs = qpochhammer(a * q, q, &cfg).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn hue_inverts_under_reciprocal(m in 1e-3f64..1e3, t in -PI..PI) {
        let w = Complex64::from_polar(m, t);
        let (h, hi) = (color_of(w).h, color_of(1.0 / w).h);
        prop_assert!((0.0..1.0).contains(&h) && (0.0..1.0).contains(&hi));
        let d = (h + hi).rem_euclid(1.0);
        prop_assert!(d.min(1.0 - d) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hue_wraps_into_the_unit_interval(m in 1e-8f64..1e8, t in -20.0f64..20.0) {
        let h = color_of(Complex64::from_polar(m, t)).h;
        prop_assert!((0.0..1.0).contains(&h));
        prop_assert_eq!(color_of(Complex64::new(m, 0.0)).h, 0.0);
        prop_assert_eq!(color_of(Complex64::new(-m, 0.0)).h, 0.5);
    }

    #[test]
    fn saturation_falls_and_brightness_rises(m in 0.0f64..1e6, k in 1.001f64..10.0, t in -3.0f64..3.0) {
        let a = color_of(Complex64::from_polar(m, t));
        let b = color_of(Complex64::from_polar(m * k + 1e-3, t));
        prop_assert!(b.s < a.s && b.v > a.v);
        let far = color_of(Complex64::from_polar(1e300, t));
        prop_assert!(far.s < 0.01 && far.v > 0.99);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn g_small_argument_stays_in_its_strip(m in 1e-6f64..1e6, t in (1e-9 - PI)..(PI - 1e-9), b in 0.2f64..3.0) {
        let p = ModulusParameter::real(b).unwrap();
        let z = Complex64::from_polar(m, t);
        let x = g_small_argument(&p, z).unwrap().re;
        let half = p.big_q().re / 2.0;
        prop_assert!(x > half - 0.5 / b && x < half + 0.5 / b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sb_images_mirror_across_the_real_axis(b in 0.4f64..1.5, x0 in -3.0f64..0.0, w in 1.0f64..5.0, h in 0.5f64..4.0) {
        let p = ModulusParameter::real(b).unwrap();
        let spec = RenderSpec::new([x0, x0 + w, -h, h], 12, 8, RenderFunction::Sb).with_param(p);
        let (img, _) = render(&spec, &RenderOptions::default()).unwrap();
        for j in 0..8 {
            for i in 0..12 {
                let [r, g, bl] = img.pixel(i, j);
                let [r2, g2, b2] = img.pixel(i, 7 - j);
                // Hue negation swaps the green and blue channels.
                let close = |a: u8, b: u8| a.abs_diff(b) <= 1;
                prop_assert!(close(r, r2) && close(g, b2) && close(bl, g2), "pixel ({}, {})", i, j);
            }
        }
    }
}
