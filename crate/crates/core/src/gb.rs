//! Evaluation of `G_b(z)` and `S_b(z)` on the whole complex plane.
//!
//! Inside the fundamental strip `0 < Re z < Re Q` we integrate
//!
//! ```text
//! ln G_b(z) = ln ζ̄_b - ∫ e^{πtz} / ((e^{πbt} - 1)(e^{πt/b} - 1)) dt/t
//! ```
//!
//! along the horizontal line `Im t = δ`, which is homotopic to the real axis
//! indented above `t = 0` as long as `δ` stays below the first nonzero pole
//! of the integrand. For `Im z < 0` the line `Im t = -δ` is used instead;
//! crossing `t = 0` picks up `2πi·Res`, which is exactly
//! `πi z(z-Q) + 2 ln ζ_b`, so
//!
//! ```text
//! ln G_b(z) = ln ζ_b + πi z(z-Q) - ∫_{Im t = -δ} (...)
//! ```
//!
//! and the integrand stays bounded by `e^{-πδ|Im z|}` on either contour.
//!
//! Outside the strip, `G_b(z + Q) = (1 - e^{2πibz})(1 - e^{2πiz/b}) G_b(z)`
//! moves the argument back in whole periods, followed by at most a few
//! single steps `G_b(z + w) = (1 - e^{2πiwz}) G_b(z)` with `w ∈ {b, 1/b}`
//! to keep clear of the conditionally convergent boundary lines.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cmath::{self, expm1, ln_one_minus_exp, wrap_log, I};
use crate::compact::{self, ProductConfig};
use crate::error::{Error, Result};
use crate::param::{
    classify_point, nearest_lattice_distance, LatticeClassification, LatticeKind, ModulusParameter,
    Regime, DEFAULT_LATTICE_TOL,
};
use crate::quad;

/// Fraction of `Re Q` kept clear of each strip boundary.
pub const STRIP_MARGIN_FRACTION: f64 = 0.05;

/// Within this distance of a lattice point the value is still computed but
/// its error estimate is inflated.
pub const NEAR_LATTICE_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Height `δ` of the integration line; `None` picks half the distance to
    /// the nearest nonzero pole of the integrand.
    pub contour_offset: Option<f64>,
    /// Symmetric truncation `[-T, T]`; `None` derives each side from the
    /// exponential tail bound.
    pub truncation: Option<f64>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            contour_offset: None,
            truncation: None,
            rel_tol: 1e-13,
            abs_tol: 1e-15,
            max_subdivisions: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    StripIntegral,
    QShifted,
    Asymptotic,
    CompactProduct,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::StripIntegral => "strip_integral",
            Method::QShifted => "q_shifted",
            Method::Asymptotic => "asymptotic",
            Method::CompactProduct => "compact_product",
        }
    }
}

/// A value together with its logarithm, error estimate and lattice status.
///
/// `log_value` stays finite where `value` overflows, which is what the
/// renderer and the log-modulus traces consume. For poles the value is
/// `+∞` and for zeros it is `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationResult {
    pub value: Complex64,
    pub log_value: Complex64,
    /// Absolute error estimate on `value`.
    pub err_estimate: f64,
    pub method: Method,
    pub classification: LatticeClassification,
}

impl EvaluationResult {
    pub(crate) fn from_log(
        log_value: Complex64,
        rel_err: f64,
        method: Method,
        classification: LatticeClassification,
    ) -> Self {
        let log_value = wrap_log(log_value);
        let value = log_value.exp();
        EvaluationResult {
            value,
            log_value,
            err_estimate: rel_err * value.norm(),
            method,
            classification,
        }
    }

    pub(crate) fn lattice(method: Method, classification: LatticeClassification) -> Self {
        let (value, log_value) = match classification.kind {
            LatticeKind::Pole => (
                Complex64::new(f64::INFINITY, 0.0),
                Complex64::new(f64::INFINITY, 0.0),
            ),
            _ => (
                Complex64::new(0.0, 0.0),
                Complex64::new(f64::NEG_INFINITY, 0.0),
            ),
        };
        EvaluationResult {
            value,
            log_value,
            err_estimate: 0.0,
            method,
            classification,
        }
    }

    pub fn is_pole(&self) -> bool {
        self.classification.kind == LatticeKind::Pole
    }

    pub fn is_zero(&self) -> bool {
        self.classification.kind == LatticeKind::Zero
    }

    /// Relative error implied by `err_estimate`.
    pub fn rel_err(&self) -> f64 {
        let m = self.value.norm();
        if m > 0.0 && m.is_finite() {
            self.err_estimate / m
        } else {
            0.0
        }
    }

    /// Multiplies by `e^{log_factor}`; lattice points are left untouched.
    pub fn scaled(self, log_factor: Complex64) -> Self {
        if !self.classification.is_regular() {
            return self;
        }
        let rel = self.rel_err();
        Self::from_log(
            self.log_value + log_factor,
            rel,
            self.method,
            self.classification,
        )
    }

    /// `1/f`, swapping poles and zeros.
    pub fn inverted(self) -> Self {
        let rel = self.rel_err();
        let classification = self.classification.inverted();
        if !classification.is_regular() {
            return Self::lattice(self.method, classification);
        }
        Self::from_log(-self.log_value, rel, self.method, classification)
    }
}

/// `ln G_b` inside the strip, with the quadrature's absolute error estimate.
#[derive(Debug, Clone, Copy)]
pub struct StripValue {
    pub log_value: Complex64,
    pub err_estimate: f64,
}

/// Strip geometry shared by the adaptive and precomputed back-ends.
#[derive(Debug, Clone, Copy)]
struct Strip {
    b: Complex64,
    b_inv: Complex64,
    big_q: Complex64,
    delta: f64,
    margin: f64,
}

impl Strip {
    fn new(param: &ModulusParameter, contour_offset: Option<f64>) -> Result<Self> {
        let b = param.b();
        let b_inv = param.b_inv();
        // Integrand poles sit at t = 2ik b and t = 2ik/b; their heights are
        // 2k Re(b) and 2k Re(1/b).
        let pole_height = 2.0 * b.re.min(b_inv.re);
        let delta = match contour_offset {
            None => 0.5 * pole_height,
            Some(d) if d > 0.0 && d < pole_height => d,
            Some(d) => {
                return Err(Error::Domain(format!(
                    "contour offset {d} must lie in (0, {pole_height})"
                )))
            }
        };
        Ok(Strip {
            b,
            b_inv,
            big_q: param.big_q(),
            delta,
            margin: STRIP_MARGIN_FRACTION * param.big_q().re,
        })
    }

    fn check(&self, z: Complex64) -> Result<()> {
        if !cmath::is_finite(z) {
            return Err(Error::Domain(format!("z = {z} is not finite")));
        }
        if z.re < self.margin || z.re > self.big_q.re - self.margin {
            return Err(Error::Domain(format!(
                "Re z = {} outside the safe strip [{}, {}]",
                z.re,
                self.margin,
                self.big_q.re - self.margin
            )));
        }
        Ok(())
    }

    /// The integrand `e^{πtz} / (t (e^{πbt}-1)(e^{πt/b}-1))` at `t = s + iσδ`,
    /// written so that neither side overflows.
    fn integrand(&self, z: Complex64, sigma: f64, s: f64) -> Complex64 {
        let t = Complex64::new(s, sigma * self.delta);
        let pt = PI * t;
        if s >= 0.0 {
            let den = t * expm1(-pt * self.b) * expm1(-pt * self.b_inv);
            (pt * (z - self.big_q)).exp() / den
        } else {
            let den = t * expm1(pt * self.b) * expm1(pt * self.b_inv);
            (pt * z).exp() / den
        }
    }

    /// Tail lengths `(L, R)` beyond which the integrand is below `tol`.
    fn tails(&self, z: Complex64, tol: f64) -> (f64, f64) {
        let budget = (10.0 / tol).ln();
        let damp = PI * self.delta * z.im.abs();
        let left_rate = PI * z.re;
        let right_rate = PI * (self.big_q - z).re;
        let shift = PI * self.delta * self.big_q.im.abs();
        let floor = 4.0 * self.delta;
        let left = ((budget - damp) / left_rate).max(floor);
        let right = ((budget - damp + shift) / right_rate).max(floor);
        (left, right)
    }

    /// Adds the contour-independent part: `ln ζ̄` above, `ln ζ + πiz(z-Q)` below.
    fn assemble(&self, param: &ModulusParameter, z: Complex64, integral: Complex64) -> Complex64 {
        if z.im >= 0.0 {
            param.log_zeta_bar() - integral
        } else {
            param.log_zeta() + I * PI * z * (z - self.big_q) - integral
        }
    }
}

fn contour_sign(z: Complex64) -> f64 {
    if z.im >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Log-spaced breakpoints clustered around `s = 0`, where the integrand
/// varies on the scale `δ`.
fn breakpoints(delta: f64, left: f64, right: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut step = 0.5 * delta;
    while step < left {
        pts.push(-step);
        step *= 2.0;
    }
    pts.push(-left);
    let mut step = 0.5 * delta;
    while step < right {
        pts.push(step);
        step *= 2.0;
    }
    pts.push(right);
    pts.sort_by(f64::total_cmp);
    pts
}

/// `ln G_b(z)` for `z` inside the strip, by adaptive quadrature.
pub fn log_gb_strip(
    param: &ModulusParameter,
    z: Complex64,
    cfg: &QuadratureConfig,
) -> Result<StripValue> {
    let strip = Strip::new(param, cfg.contour_offset)?;
    strip.check(z)?;
    let sigma = contour_sign(z);
    let (left, right) = match cfg.truncation {
        Some(t) => (t, t),
        None => strip.tails(z, cfg.abs_tol),
    };
    let r = quad::integrate(
        |s| strip.integrand(z, sigma, s),
        &breakpoints(strip.delta, left, right),
        cfg.abs_tol,
        cfg.rel_tol,
        cfg.max_subdivisions,
    )?;
    Ok(StripValue {
        log_value: strip.assemble(param, z, r.value),
        err_estimate: r.err_estimate,
    })
}

/// Trapezoid weights on the line `Im t = ±δ`, precomputed once per `b`.
///
/// The integrand is analytic within distance `δ` of the line, so the
/// trapezoid rule converges like `e^{-2πδ/h}`. Each evaluation then costs
/// one complex multiply-add per node, with the exponential factor advanced
/// by recurrence and re-anchored every [`StripKernel::ANCHOR`] nodes.
#[derive(Debug, Clone)]
pub struct StripKernel {
    strip: Strip,
    h: f64,
    tol: f64,
    // index 0: contour above, 1: below
    left: [Vec<Complex64>; 2],
    right: [Vec<Complex64>; 2],
}

impl StripKernel {
    const ANCHOR: usize = 32;
    /// Exponent in the discretisation error `e^{-2πδ/h}`.
    const DISCRETISATION_DIGITS: f64 = 45.0;

    pub fn new(param: &ModulusParameter, cfg: &QuadratureConfig) -> Result<Self> {
        let strip = Strip::new(param, cfg.contour_offset)?;
        let h = 2.0 * PI * strip.delta / Self::DISCRETISATION_DIGITS;
        let tol = cfg.abs_tol;
        // Worst case over the safe strip: Re z at the margin, Im z = 0.
        let edge = Complex64::new(strip.margin, 0.0);
        let (left_max, _) = strip.tails(edge, tol);
        let (_, right_max) = strip.tails(Complex64::new(strip.big_q.re - strip.margin, 0.0), tol);
        let n_left = (left_max / h).ceil() as usize + 1;
        let n_right = (right_max / h).ceil() as usize + 1;
        let mut left = [Vec::with_capacity(n_left), Vec::with_capacity(n_left)];
        let mut right = [Vec::with_capacity(n_right), Vec::with_capacity(n_right)];
        for (k, sigma) in [1.0, -1.0].into_iter().enumerate() {
            for j in 1..=n_left {
                let t = Complex64::new(-(j as f64) * h, sigma * strip.delta);
                let pt = PI * t;
                left[k].push(h / (t * expm1(pt * strip.b) * expm1(pt * strip.b_inv)));
            }
            for j in 0..=n_right {
                let t = Complex64::new(j as f64 * h, sigma * strip.delta);
                let pt = PI * t;
                right[k].push(h / (t * expm1(-pt * strip.b) * expm1(-pt * strip.b_inv)));
            }
        }
        Ok(StripKernel {
            strip,
            h,
            tol,
            left,
            right,
        })
    }

    /// Sums `Σ w_j e^{π s_j rate}` for `s_j = ±j h` with a re-anchored recurrence.
    fn sweep(
        weights: &[Complex64],
        first: usize,
        count: usize,
        h: f64,
        base: Complex64,
        rate: Complex64,
    ) -> Complex64 {
        let step = (PI * h * rate).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut factor = Complex64::new(0.0, 0.0);
        for (i, w) in weights.iter().take(count).enumerate() {
            let j = first + i;
            if i % Self::ANCHOR == 0 {
                factor = base * (PI * h * j as f64 * rate).exp();
            } else {
                factor *= step;
            }
            acc += *w * factor;
        }
        acc
    }

    pub fn log_gb_strip(&self, param: &ModulusParameter, z: Complex64) -> Result<StripValue> {
        let st = &self.strip;
        st.check(z)?;
        let sigma = contour_sign(z);
        let k = if sigma > 0.0 { 0 } else { 1 };
        let (left, right) = st.tails(z, self.tol);
        let n_left = ((left / self.h).ceil() as usize).min(self.left[k].len());
        let n_right = ((right / self.h).ceil() as usize + 1).min(self.right[k].len());
        let lift = Complex64::new(0.0, sigma * st.delta);
        // Left nodes s = -j h (j >= 1): e^{π t z} = e^{π iσδ z} e^{-π j h z}
        let l = Self::sweep(&self.left[k], 1, n_left, self.h, (PI * lift * z).exp(), -z);
        // Right nodes s = j h (j >= 0): e^{π t (z-Q)}
        let zq = z - st.big_q;
        let r = Self::sweep(
            &self.right[k],
            0,
            n_right,
            self.h,
            (PI * lift * zq).exp(),
            zq,
        );
        let integral = l + r;
        Ok(StripValue {
            log_value: st.assemble(param, z, integral),
            err_estimate: self.tol.max(1e-14 * integral.norm()),
        })
    }

    pub fn nodes(&self) -> usize {
        self.left[0].len() + self.right[0].len()
    }
}

/// Accumulates `ln` of shift factors and reports how far the point moved.
struct Reduction {
    z: Complex64,
    log_factor: Complex64,
    shifted: bool,
}

/// `ln F(x)` with `F(x) = (1 - e^{2πibx})(1 - e^{2πix/b})`, so that
/// `G(x + Q) = F(x) G(x)`.
fn ln_period_factor(b: Complex64, b_inv: Complex64, x: Complex64) -> Complex64 {
    ln_one_minus_exp(2.0 * PI * I * b * x) + ln_one_minus_exp(2.0 * PI * I * b_inv * x)
}

fn reduce_into_strip(param: &ModulusParameter, z: Complex64) -> Reduction {
    let b = param.b();
    let b_inv = param.b_inv();
    let big_q = param.big_q();
    let margin = STRIP_MARGIN_FRACTION * big_q.re;
    let mut log_factor = Complex64::new(0.0, 0.0);

    // Whole periods: z = zr + nQ with 0 <= Re zr < Re Q.
    let n = (z.re / big_q.re).floor() as i64;
    let mut zr = z - big_q * n as f64;
    if n > 0 {
        for k in 1..=n {
            log_factor += ln_period_factor(b, b_inv, zr + big_q * (k - 1) as f64);
        }
    } else if n < 0 {
        for k in 1..=(-n) {
            log_factor -= ln_period_factor(b, b_inv, zr - big_q * k as f64);
        }
    }

    // Single steps by the generator with the smaller real part.
    let w = if b.re <= b_inv.re { b } else { b_inv };
    let mut steps = 0;
    while zr.re < margin {
        // G(zr) = G(zr + w) / (1 - e^{2πiw zr})
        log_factor -= ln_one_minus_exp(2.0 * PI * I * w * zr);
        zr += w;
        steps += 1;
    }
    while zr.re > big_q.re - margin {
        // G(zr) = (1 - e^{2πiw(zr - w)}) G(zr - w)
        log_factor += ln_one_minus_exp(2.0 * PI * I * w * (zr - w));
        zr -= w;
        steps += 1;
    }
    Reduction {
        z: zr,
        log_factor,
        shifted: n != 0 || steps > 0,
    }
}

/// Bundles a parameter with evaluation settings; the entry point for bulk work.
#[derive(Debug, Clone)]
pub struct GbEvaluator {
    param: ModulusParameter,
    quad: QuadratureConfig,
    product: ProductConfig,
    kernel: Option<StripKernel>,
    lattice_tol: f64,
}

impl GbEvaluator {
    pub fn new(param: ModulusParameter) -> Self {
        GbEvaluator {
            param,
            quad: QuadratureConfig::default(),
            product: ProductConfig::default(),
            kernel: None,
            lattice_tol: DEFAULT_LATTICE_TOL,
        }
    }

    pub fn with_quadrature(mut self, cfg: QuadratureConfig) -> Self {
        self.quad = cfg;
        if self.kernel.is_some() {
            self.kernel = StripKernel::new(&self.param, &cfg).ok();
        }
        self
    }

    pub fn with_product(mut self, cfg: ProductConfig) -> Self {
        self.product = cfg;
        self
    }

    pub fn with_lattice_tol(mut self, tol: f64) -> Self {
        self.lattice_tol = tol;
        self
    }

    /// Switches the strip back-end to the precomputed trapezoid kernel.
    pub fn with_kernel(mut self) -> Result<Self> {
        self.kernel = Some(StripKernel::new(&self.param, &self.quad)?);
        Ok(self)
    }

    pub fn param(&self) -> &ModulusParameter {
        &self.param
    }

    pub fn quadrature(&self) -> &QuadratureConfig {
        &self.quad
    }

    pub fn product(&self) -> &ProductConfig {
        &self.product
    }

    pub fn lattice_tol(&self) -> f64 {
        self.lattice_tol
    }

    pub fn log_gb_strip(&self, z: Complex64) -> Result<StripValue> {
        match &self.kernel {
            Some(k) => k.log_gb_strip(&self.param, z),
            None => log_gb_strip(&self.param, z, &self.quad),
        }
    }

    pub fn gb(&self, z: Complex64) -> Result<EvaluationResult> {
        if !cmath::is_finite(z) {
            return Err(Error::Domain(format!("z = {z} is not finite")));
        }
        let classification = classify_point(&self.param, z, self.lattice_tol);
        if self.param.regime() == Regime::Compact {
            return compact::gb_product_with(&self.param, z, &self.product, classification);
        }
        if !classification.is_regular() {
            return Ok(EvaluationResult::lattice(
                Method::StripIntegral,
                classification,
            ));
        }
        let red = reduce_into_strip(&self.param, z);
        let strip = self.log_gb_strip(red.z)?;
        let mut rel_err = strip.err_estimate + 4.0 * f64::EPSILON * (1.0 + red.log_factor.norm());
        if let Some(d) = nearest_lattice_distance(&self.param, z, NEAR_LATTICE_RADIUS) {
            rel_err += f64::EPSILON * (1.0 + z.norm()) / d;
        }
        let method = if red.shifted {
            Method::QShifted
        } else {
            Method::StripIntegral
        };
        Ok(EvaluationResult::from_log(
            strip.log_value + red.log_factor,
            rel_err,
            method,
            classification,
        ))
    }

    /// `S_b(z) = e^{-(πi/2) z (z-Q)} G_b(z)`.
    pub fn sb(&self, z: Complex64) -> Result<EvaluationResult> {
        let g = self.gb(z)?;
        let q = self.param.big_q();
        Ok(g.scaled(-0.5 * PI * I * z * (z - q)))
    }
}

pub fn gb(
    param: &ModulusParameter,
    z: Complex64,
    cfg: &QuadratureConfig,
) -> Result<EvaluationResult> {
    GbEvaluator::new(*param).with_quadrature(*cfg).gb(z)
}

pub fn sb(
    param: &ModulusParameter,
    z: Complex64,
    cfg: &QuadratureConfig,
) -> Result<EvaluationResult> {
    GbEvaluator::new(*param).with_quadrature(*cfg).sb(z)
}

/// Residue of `1/G_b(Q + z)` at `z = n b + m/b`:
/// `-(1/2π) ∏_{k=1}^n (1 - q^{2k})^{-1} ∏_{l=1}^m (1 - q̃^{2l})^{-1}`.
pub fn residue_inverse_gb(param: &ModulusParameter, n: u32, m: u32) -> Result<Complex64> {
    let b2 = param.b() * param.b();
    let b_inv2 = param.b_inv() * param.b_inv();
    let mut prod = Complex64::new(1.0, 0.0);
    for (count, square, name) in [(n, b2, "q"), (m, b_inv2, "q~")] {
        for k in 1..=count {
            // 1 - q^{2k} = -(e^{2πik b²} - 1)
            let f = -expm1(2.0 * PI * I * k as f64 * square);
            if f.norm() < 1e-12 {
                return Err(Error::Degenerate(format!(
                    "1 - {name}^{} vanishes at b = {}",
                    2 * k,
                    param.b()
                )));
            }
            prod *= f;
        }
    }
    Ok(-1.0 / (2.0 * PI * prod))
}

/// Leading behaviour for `|Im z|` large: `ζ̄_b` above, `ζ_b e^{πiz(z-Q)}` below.
/// No threshold is checked; this is an approximation for the caller to place.
pub fn gb_asymptotic(param: &ModulusParameter, z: Complex64) -> Complex64 {
    if z.im >= 0.0 {
        param.zeta_bar()
    } else {
        param.zeta_b() * (PI * I * z * (z - param.big_q())).exp()
    }
}
