//! The compact regime `Im(b²) > 0`, where `|q| < 1` and `G_b` is a ratio of
//! convergent infinite products:
//!
//! ```text
//! G_b(z) = ζ̄_b ∏_{n≥1} (1 - e^{2πi(z - n/b)/b}) / ∏_{n≥0} (1 - e^{2πib(z + nb)})
//! ```
//!
//! Also home to the classical `Γ` used as the target of the `b → 0` limit
//! of the normalised `G̃_b(z) = G_b(bz) / (e^{-πi/4} |b| (1-q²)^{z-1})`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cmath::{self, ln_one_minus_exp, I};
use crate::error::{Error, Result};
use crate::gb::{EvaluationResult, GbEvaluator, Method};
use crate::param::{
    classify_point, LatticeClassification, LatticeKind, ModulusParameter, Regime,
    DEFAULT_LATTICE_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductConfig {
    /// Stop once the bound on the remaining factors drops below this.
    pub tail_tol: f64,
    pub max_terms: usize,
    pub min_terms: usize,
}

impl Default for ProductConfig {
    fn default() -> Self {
        ProductConfig {
            tail_tol: 1e-16,
            max_terms: 1_000_000,
            min_terms: 8,
        }
    }
}

impl ProductConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tail_tol > 0.0) || self.max_terms < 1 {
            return Err(Error::Domain(format!("invalid product config {self:?}")));
        }
        Ok(())
    }
}

/// `(a; q)_∞ = ∏_{n≥0} (1 - a qⁿ)` by direct multiplication.
///
/// Terminates once `|a qⁿ| |q| / (1 - |q|)`, a bound on `Σ_{k>n} |a q^k|`,
/// falls below `tail_tol`. A vanishing factor returns exactly zero.
pub fn qpochhammer(a: Complex64, q: Complex64, cfg: &ProductConfig) -> Result<Complex64> {
    cfg.validate()?;
    let qn = q.norm();
    if !(qn < 1.0) {
        return Err(Error::Domain(format!("|q| = {qn} must be < 1")));
    }
    if !cmath::is_finite(a) {
        return Err(Error::Domain(format!("a = {a} is not finite")));
    }
    let mut prod = Complex64::new(1.0, 0.0);
    let mut term = a;
    for n in 0..cfg.max_terms {
        let factor = 1.0 - term;
        if factor == Complex64::new(0.0, 0.0) {
            return Ok(factor);
        }
        prod *= factor;
        if n + 1 >= cfg.min_terms && term.norm() * qn / (1.0 - qn) < cfg.tail_tol {
            return Ok(prod);
        }
        term *= q;
    }
    Err(Error::NonConvergence {
        max_terms: cfg.max_terms,
    })
}

/// `ln ∏_{n≥0} (1 - e^{u + n λ})` with `Re λ < 0`, safe for huge `Re u`.
///
/// Large factors are taken through [`ln_one_minus_exp`] one at a time; the
/// small ones are multiplied together and folded into the logarithm only
/// when the running product leaves `[1e-150, 1e150]`. A vanishing factor
/// yields `-∞`.
pub fn log_qpochhammer_exp(
    u: Complex64,
    lambda: Complex64,
    cfg: &ProductConfig,
) -> Result<Complex64> {
    cfg.validate()?;
    if !(lambda.re < 0.0) {
        return Err(Error::Domain(format!(
            "product ratio e^({lambda}) does not decay"
        )));
    }
    let ratio = lambda.re.exp();
    let stop = (cfg.tail_tol * (1.0 - ratio)).ln();
    let mut log_sum = Complex64::new(0.0, 0.0);
    let mut prod = Complex64::new(1.0, 0.0);
    for n in 0..cfg.max_terms {
        let un = u + lambda * n as f64;
        if un.re > -1.0 {
            let l = ln_one_minus_exp(un);
            if !l.re.is_finite() {
                return Ok(Complex64::new(f64::NEG_INFINITY, 0.0));
            }
            log_sum += l;
        } else {
            prod *= 1.0 - un.exp();
            let m = prod.norm();
            if !(1e-150..=1e150).contains(&m) {
                log_sum += prod.ln();
                prod = Complex64::new(1.0, 0.0);
            }
        }
        if n + 1 >= cfg.min_terms && un.re + lambda.re < stop {
            return Ok(log_sum + prod.ln());
        }
    }
    Err(Error::NonConvergence {
        max_terms: cfg.max_terms,
    })
}

/// Exponents `(u, λ)` of the numerator product `∏_{k≥0}(1 - e^{u + kλ})`.
fn numerator_exponents(param: &ModulusParameter, z: Complex64) -> (Complex64, Complex64) {
    let b_inv = param.b_inv();
    let lambda = -2.0 * PI * I * b_inv * b_inv;
    (2.0 * PI * I * b_inv * z + lambda, lambda)
}

fn denominator_exponents(param: &ModulusParameter, z: Complex64) -> (Complex64, Complex64) {
    let b = param.b();
    (2.0 * PI * I * b * z, 2.0 * PI * I * b * b)
}

pub(crate) fn gb_product_with(
    param: &ModulusParameter,
    z: Complex64,
    cfg: &ProductConfig,
    classification: LatticeClassification,
) -> Result<EvaluationResult> {
    if param.regime() != Regime::Compact {
        return Err(Error::Domain(format!(
            "infinite product needs Im(b²) > 0, got b = {}",
            param.b()
        )));
    }
    if !cmath::is_finite(z) {
        return Err(Error::Domain(format!("z = {z} is not finite")));
    }
    if !classification.is_regular() {
        return Ok(EvaluationResult::lattice(
            Method::CompactProduct,
            classification,
        ));
    }
    let (u_num, l_num) = numerator_exponents(param, z);
    let (u_den, l_den) = denominator_exponents(param, z);
    // Both products must decay geometrically in this regime.
    assert!(
        l_num.re < 0.0 && l_den.re < 0.0,
        "compact regime without geometric decay: b = {}",
        param.b()
    );
    let num = log_qpochhammer_exp(u_num, l_num, cfg)?;
    let den = log_qpochhammer_exp(u_den, l_den, cfg)?;
    if den.re == f64::NEG_INFINITY {
        let cl = LatticeClassification {
            kind: LatticeKind::Pole,
            ..classification
        };
        return Ok(EvaluationResult::lattice(Method::CompactProduct, cl));
    }
    if num.re == f64::NEG_INFINITY {
        let cl = LatticeClassification {
            kind: LatticeKind::Zero,
            ..classification
        };
        return Ok(EvaluationResult::lattice(Method::CompactProduct, cl));
    }
    let log_value = param.log_zeta_bar() + num - den;
    let scale = 1.0 + u_num.norm().max(u_den.norm());
    Ok(EvaluationResult::from_log(
        log_value,
        32.0 * f64::EPSILON * scale,
        Method::CompactProduct,
        classification,
    ))
}

pub fn gb_product(
    param: &ModulusParameter,
    z: Complex64,
    cfg: &ProductConfig,
) -> Result<EvaluationResult> {
    let cl = classify_point(param, z, DEFAULT_LATTICE_TOL);
    gb_product_with(param, z, cfg, cl)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn gamma_pole(z: Complex64) -> Option<LatticeClassification> {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        Some(LatticeClassification {
            kind: LatticeKind::Pole,
            order: 1,
            representations: vec![((-z.re) as u32, 0)],
            tol: 0.0,
        })
    } else {
        None
    }
}

/// `ln Γ(z)` (Lanczos, g = 7, 9 terms; reflection for `Re z < 1/2`).
/// The imaginary part is a branch of the logarithm, not necessarily the
/// principal one.
pub fn ln_gamma_reference(z: Complex64) -> Result<Complex64> {
    if let Some(cl) = gamma_pole(z) {
        return Err(Error::Pole(cl));
    }
    if z.re < 0.5 {
        // Γ(z) Γ(1-z) = π / sin(πz)
        let s = (PI * z).sin();
        return Ok(Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_reference(1.0 - z)?);
    }
    let x = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (k, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += *c / (x + k as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln())
}

pub fn gamma_reference(z: Complex64) -> Result<Complex64> {
    if let Some(cl) = gamma_pole(z) {
        return Err(Error::Pole(cl));
    }
    if z.re < 0.5 {
        return Ok(PI / ((PI * z).sin() * gamma_reference(1.0 - z)?));
    }
    Ok(ln_gamma_reference(z)?.exp())
}

/// `ln(1 - q²)` with the branch constraint `|arg(1 - q²)| < π/2` asserted.
fn log_one_minus_q2(param: &ModulusParameter) -> Result<Complex64> {
    let l = cmath::expm1(2.0 * PI * I * param.b() * param.b());
    let l = (-l).ln();
    if !(l.im.abs() < PI / 2.0) {
        return Err(Error::Domain(format!(
            "arg(1 - q²) = {} outside (-π/2, π/2)",
            l.im
        )));
    }
    Ok(l)
}

/// `G̃_b(z) = G_b(bz) / (e^{-πi/4} |b| (1-q²)^{z-1})` on the ray `b² = ir`.
pub fn gb_tilde(evaluator: &GbEvaluator, z: Complex64) -> Result<EvaluationResult> {
    let param = evaluator.param();
    let b = param.b();
    if param.regime() != Regime::Compact || (b.arg() - PI / 4.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "the normalised limit is defined on arg b = π/4, got b = {b}"
        )));
    }
    let l = log_one_minus_q2(param)?;
    let g = evaluator.gb(b * z)?;
    let log_norm = Complex64::new(b.norm().ln(), -PI / 4.0) + (z - 1.0) * l;
    Ok(g.scaled(-log_norm))
}
