//! Small complex helpers that `num-complex` does not provide with the
//! accuracy we need near cancellation.

use num_complex::Complex64;
use std::f64::consts::PI;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// `e^u - 1` without cancellation for small `|u|`.
pub fn expm1(u: Complex64) -> Complex64 {
    if u.norm() > 0.5 {
        return u.exp() - 1.0;
    }
    let em1 = u.re.exp_m1();
    let half = (0.5 * u.im).sin();
    Complex64::new(
        em1 * u.im.cos() - 2.0 * half * half,
        (em1 + 1.0) * u.im.sin(),
    )
}

/// `ln(1 + w)`, accurate for small `|w|`.
pub fn ln_1p(w: Complex64) -> Complex64 {
    if w.norm() > 0.5 {
        return (w + 1.0).ln();
    }
    let re = 0.5 * (2.0 * w.re + w.norm_sqr()).ln_1p();
    Complex64::new(re, w.im.atan2(1.0 + w.re))
}

/// `ln(1 - e^u)` that neither overflows for large `Re u` nor loses digits
/// near `u = 0`. The imaginary part is only defined modulo `2π`.
pub fn ln_one_minus_exp(u: Complex64) -> Complex64 {
    if u.re > 0.0 {
        // 1 - e^u = -e^u (1 - e^{-u})
        return u + Complex64::new(0.0, PI) + ln_one_minus_exp(-u);
    }
    if u.norm() < 0.7 {
        (-expm1(u)).ln()
    } else {
        ln_1p(-u.exp())
    }
}

/// Folds the imaginary part of a logarithm into `(-π, π]`.
pub fn wrap_log(w: Complex64) -> Complex64 {
    if !w.im.is_finite() {
        return w;
    }
    let two_pi = 2.0 * PI;
    let mut im = w.im - two_pi * (w.im / two_pi).round();
    if im <= -PI {
        im += two_pi;
    }
    Complex64::new(w.re, im)
}

pub fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm1_small_argument() {
        let u = Complex64::new(1e-12, -2e-12);
        let got = expm1(u);
        let series = u + u * u / 2.0;
        assert!((got - series).norm() < 1e-30);
    }

    #[test]
    fn ln_one_minus_exp_matches_naive_in_safe_range() {
        for &u in &[
            Complex64::new(-1.3, 0.4),
            Complex64::new(0.8, -2.0),
            Complex64::new(-0.1, 0.05),
        ] {
            let naive = (1.0 - u.exp()).ln();
            let got = ln_one_minus_exp(u);
            assert!((naive.exp() - got.exp()).norm() < 1e-14, "{u}");
        }
    }

    #[test]
    fn ln_one_minus_exp_large_positive_real_part() {
        let u = Complex64::new(800.0, 1.0);
        let got = ln_one_minus_exp(u);
        assert!((got.re - 800.0).abs() < 1e-12);
    }

    #[test]
    fn wrap_log_range() {
        let w = wrap_log(Complex64::new(0.0, 7.0 * PI));
        assert!((w.im - PI).abs() < 1e-12);
        let w = wrap_log(Complex64::new(0.0, -3.0));
        assert!((w.im + 3.0).abs() < 1e-15);
    }
}
