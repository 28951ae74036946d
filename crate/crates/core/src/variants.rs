//! Reparametrisations of `G_b` found in the literature, and two integral
//! representations that do not go through `G_b` at all.
//!
//! ```text
//! g_b(z)       = ζ̄_b / G_b(Q/2 + log z / (2πib))
//! Φ^{b²}(z)    = V_{b⁻²}(z) = ζ_b G_b(Q/2 - iz/(2πb)) = 1 / g_b(e^z)
//! ψ(z)         = ζ̄_b / G_b(Q/2 + iz/(2π)) = Φ^{b²}(-bz)⁻¹
//! γ(z)         = ζ̄_b / G_b(Q - z/b)
//! G(b, 1/b; z) = S_b(Q/2 - iz)
//! ```
//!
//! Combining the `ψ` and `γ` lines gives `ψ(z) = γ(b(Q/2 + z/(2πi)))`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::cmath::{self, expm1, I};
use crate::error::{Error, Result};
use crate::gb::{EvaluationResult, GbEvaluator, QuadratureConfig, STRIP_MARGIN_FRACTION};
use crate::param::{ModulusParameter, Regime};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VariantSelector {
    GSmall,
    PhiHbar,
    /// `V_θ` with `θ = b⁻²`.
    VTheta,
    PsiFaddeev,
    GammaHyperbolic,
    RuijsenaarsG {
        a_plus: f64,
        a_minus: f64,
    },
    SB,
    GB,
}

impl VariantSelector {
    pub fn name(&self) -> &'static str {
        match self {
            VariantSelector::GSmall => "g_small",
            VariantSelector::PhiHbar => "phi_hbar",
            VariantSelector::VTheta => "v_theta",
            VariantSelector::PsiFaddeev => "psi",
            VariantSelector::GammaHyperbolic => "gamma_hyperbolic",
            VariantSelector::RuijsenaarsG { .. } => "ruijsenaars",
            VariantSelector::SB => "sb",
            VariantSelector::GB => "gb",
        }
    }

    /// Evaluates the variant with the evaluator's `b`. The Ruijsenaars
    /// payload carries its own scales and ignores the evaluator.
    pub fn evaluate(&self, ev: &GbEvaluator, z: Complex64) -> Result<EvaluationResult> {
        match *self {
            VariantSelector::GSmall => g_small(ev, z),
            VariantSelector::PhiHbar => phi_hbar(ev, z),
            VariantSelector::VTheta => v_theta(ev, z),
            VariantSelector::PsiFaddeev => psi_faddeev(ev, z),
            VariantSelector::GammaHyperbolic => gamma_hyperbolic(ev, z),
            VariantSelector::RuijsenaarsG { a_plus, a_minus } => ruijsenaars_g(a_plus, a_minus, z),
            VariantSelector::SB => ev.sb(z),
            VariantSelector::GB => ev.gb(z),
        }
    }
}

impl fmt::Display for VariantSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VariantSelector::RuijsenaarsG { a_plus, a_minus } => {
                write!(f, "ruijsenaars({a_plus},{a_minus})")
            }
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for VariantSelector {
    type Err = Error;

    /// Names as printed by [`VariantSelector::name`]; the Ruijsenaars form
    /// is `ruijsenaars(a+,a-)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(args) = s
            .strip_prefix("ruijsenaars(")
            .and_then(|r| r.strip_suffix(')'))
        {
            let parts: Vec<&str> = args.split(',').collect();
            let parse = |p: &str| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Domain(format!("bad Ruijsenaars scale '{p}'")))
            };
            if parts.len() != 2 {
                return Err(Error::Domain(format!(
                    "expected ruijsenaars(a+,a-), got '{s}'"
                )));
            }
            return Ok(VariantSelector::RuijsenaarsG {
                a_plus: parse(parts[0])?,
                a_minus: parse(parts[1])?,
            });
        }
        Ok(match s {
            "g_small" => VariantSelector::GSmall,
            "phi_hbar" => VariantSelector::PhiHbar,
            "v_theta" => VariantSelector::VTheta,
            "psi" => VariantSelector::PsiFaddeev,
            "gamma_hyperbolic" => VariantSelector::GammaHyperbolic,
            "sb" => VariantSelector::SB,
            "gb" => VariantSelector::GB,
            _ => return Err(Error::Domain(format!("unknown variant '{s}'"))),
        })
    }
}

/// The `G_b` argument used by [`g_small`].
pub fn g_small_argument(param: &ModulusParameter, z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("g_b is not defined at z = 0".into()));
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(Error::BranchCut(format!("z = {z} lies on (-∞, 0)")));
    }
    Ok(param.big_q() * 0.5 + z.ln() / (2.0 * PI * I * param.b()))
}

/// `g_b(z) = ζ̄_b / G_b(Q/2 + log z/(2πib))`, principal `log`.
pub fn g_small(ev: &GbEvaluator, z: Complex64) -> Result<EvaluationResult> {
    let p = ev.param();
    let w = g_small_argument(p, z)?;
    Ok(ev.gb(w)?.inverted().scaled(p.log_zeta_bar()))
}

/// `Φ^{b²}(z) = ζ_b G_b(Q/2 - iz/(2πb))`.
pub fn phi_hbar(ev: &GbEvaluator, z: Complex64) -> Result<EvaluationResult> {
    let p = ev.param();
    let w = p.big_q() * 0.5 - I * z / (2.0 * PI * p.b());
    Ok(ev.gb(w)?.scaled(p.log_zeta()))
}

/// `V_θ(z)` at `θ = b⁻²`, which coincides with `Φ^{b²}(z)`.
pub fn v_theta(ev: &GbEvaluator, z: Complex64) -> Result<EvaluationResult> {
    phi_hbar(ev, z)
}

/// `ψ(z) = ζ̄_b / G_b(Q/2 + iz/(2π))`.
pub fn psi_faddeev(ev: &GbEvaluator, z: Complex64) -> Result<EvaluationResult> {
    let p = ev.param();
    let w = p.big_q() * 0.5 + I * z / (2.0 * PI);
    Ok(ev.gb(w)?.inverted().scaled(p.log_zeta_bar()))
}

/// `γ(z) = ζ̄_b / G_b(Q - z/b)`; poles of `G_b` become zeros of `γ`.
pub fn gamma_hyperbolic(ev: &GbEvaluator, z: Complex64) -> Result<EvaluationResult> {
    let p = ev.param();
    let w = p.big_q() - z / p.b();
    Ok(ev.gb(w)?.inverted().scaled(p.log_zeta_bar()))
}

/// `ψ(z)` from its own integral
///
/// ```text
/// ψ(z) = exp( (1/4) ∫ e^{izξ/π} / (sinh(bξ) sinh(ξ/b)) dξ/ξ )
/// ```
///
/// over the line `Im ξ = η` passing above `ξ = 0`, with `η` half the
/// height of the first pole `iπ min(b, 1/b)`. Real `b` only.
pub fn psi_direct_integral(
    param: &ModulusParameter,
    z: Complex64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    if param.regime() != Regime::RealPositive {
        return Err(Error::Domain(format!(
            "direct ψ integral needs real b, got {}",
            param.b()
        )));
    }
    if !cmath::is_finite(z) {
        return Err(Error::Domain(format!("z = {z} is not finite")));
    }
    let b = param.b().re;
    let q = b + 1.0 / b;
    // Decay rates towards ±∞ are Q ± Im z / π.
    let limit = (1.0 - STRIP_MARGIN_FRACTION) * PI * q;
    if z.im.abs() >= limit {
        return Err(Error::Domain(format!(
            "|Im z| = {} must stay below {limit}",
            z.im.abs()
        )));
    }
    let first_pole = PI * b.min(1.0 / b);
    let eta = match cfg.contour_offset {
        None => 0.5 * first_pole,
        Some(d) if d > 0.0 && d < first_pole => d,
        Some(d) => {
            return Err(Error::Domain(format!(
                "contour offset {d} must lie in (0, {first_pole})"
            )))
        }
    };
    let integrand = |s: f64| {
        let xi = Complex64::new(s, eta);
        let phase = I * z * xi / PI;
        if s >= 0.0 {
            let den = xi * expm1(-2.0 * b * xi) * expm1(-2.0 * xi / b);
            4.0 * (phase - q * xi).exp() / den
        } else {
            let den = xi * expm1(2.0 * b * xi) * expm1(2.0 * xi / b);
            4.0 * (phase + q * xi).exp() / den
        }
    };
    let budget = (10.0 / cfg.abs_tol).ln();
    let (left, right) = match cfg.truncation {
        Some(t) => (t, t),
        None => (
            (budget / (q - z.im / PI)).max(4.0 * eta),
            (budget / (q + z.im / PI)).max(4.0 * eta),
        ),
    };
    let mut pts = vec![-left, -eta, 0.0, eta, right];
    pts.dedup();
    let r = quad::integrate(
        integrand,
        &pts,
        cfg.abs_tol,
        cfg.rel_tol,
        cfg.max_subdivisions,
    )?;
    Ok((0.25 * r.value).exp())
}

/// `G(b, 1/b; z) = S_b(Q/2 - iz)` for `a₊ a₋ = 1`; any other pair goes
/// through [`ruijsenaars_direct_integral`] and is confined to its strip.
pub fn ruijsenaars_g(a_plus: f64, a_minus: f64, z: Complex64) -> Result<EvaluationResult> {
    check_scales(a_plus, a_minus)?;
    if (a_plus * a_minus - 1.0).abs() > 1e-12 {
        let v = ruijsenaars_direct_integral(a_plus, a_minus, z, &QuadratureConfig::default())?;
        let cl = crate::param::LatticeClassification::regular(0.0);
        return Ok(EvaluationResult::from_log(
            v.ln(),
            1e-10,
            crate::gb::Method::StripIntegral,
            cl,
        ));
    }
    let ev = GbEvaluator::new(ModulusParameter::real(a_plus)?);
    let q = ev.param().big_q();
    ev.sb(q * 0.5 - I * z)
}

fn check_scales(a_plus: f64, a_minus: f64) -> Result<()> {
    if !(a_plus > 0.0 && a_minus > 0.0 && a_plus.is_finite() && a_minus.is_finite()) {
        return Err(Error::Domain(format!(
            "scales ({a_plus}, {a_minus}) must be positive and finite"
        )));
    }
    Ok(())
}

/// `G(a₊, a₋; z) = exp(i ∫₀^∞ (sin 2yz / (2 sinh a₊y sinh a₋y) - z/(a₊a₋y)) dy/y)`
/// for `|Im z| < (a₊ + a₋)/2`.
///
/// Near `y = 0` the bracket cancels to `O(y)`, so the integrand is replaced
/// by its Taylor polynomial there; beyond the truncation point only the
/// counterterm survives and integrates to `-z/(a₊a₋Y)`.
pub fn ruijsenaars_direct_integral(
    a_plus: f64,
    a_minus: f64,
    z: Complex64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    check_scales(a_plus, a_minus)?;
    if !cmath::is_finite(z) {
        return Err(Error::Domain(format!("z = {z} is not finite")));
    }
    let (a, c) = (a_plus, a_minus);
    let half_width = 0.5 * (a + c);
    if z.im.abs() >= (1.0 - STRIP_MARGIN_FRACTION) * half_width {
        return Err(Error::Domain(format!(
            "|Im z| = {} outside the strip |Im z| < {half_width}",
            z.im.abs()
        )));
    }
    let ac = a * c;
    let z2 = z * z;
    let z4 = z2 * z2;
    let (a2, c2) = (a * a, c * c);
    let t0 = -z * (a2 + c2 + 4.0 * z2) / (6.0 * ac);
    let t2 = z
        * (7.0 * a2 * a2
            + 10.0 * a2 * c2
            + 40.0 * a2 * z2
            + 7.0 * c2 * c2
            + 40.0 * c2 * z2
            + 48.0 * z4)
        / (360.0 * ac);
    let t4 = -z
        * (31.0 * a2 * a2 * a2
            + 49.0 * a2 * a2 * c2
            + 196.0 * a2 * a2 * z2
            + 49.0 * a2 * c2 * c2
            + 280.0 * a2 * c2 * z2
            + 336.0 * a2 * z4
            + 31.0 * c2 * c2 * c2
            + 196.0 * c2 * c2 * z2
            + 336.0 * c2 * z4
            + 192.0 * z4 * z2)
        / (15120.0 * ac);
    let scale = a.max(c).max(2.0 * z.norm()).max(1.0);
    let y_series = 0.02 / scale;
    let f = |y: f64| {
        if y < y_series {
            let y2 = y * y;
            return t0 + y2 * (t2 + y2 * t4);
        }
        // sin(2yz) / (2 sinh(ay) sinh(cy)) = sin(2yz) · 2e^{-(a+c)y} / ((1-e^{-2ay})(1-e^{-2cy}))
        let e = (-(a + c) * y).exp();
        let s = ((I * 2.0 * y * z).exp() * e - (-I * 2.0 * y * z).exp() * e) / (2.0 * I);
        let den = (-(-2.0 * a * y).exp_m1()) * (-(-2.0 * c * y).exp_m1());
        (2.0 * s / den - z / (ac * y)) / y
    };
    let rate = a + c - 2.0 * z.im.abs();
    let big_y = match cfg.truncation {
        Some(t) => t,
        None => ((10.0 / cfg.abs_tol).ln() / rate).max(4.0),
    };
    let mut pts = vec![0.0, y_series];
    let mut y = 0.25;
    while y < big_y {
        if y > y_series {
            pts.push(y);
        }
        y *= 2.0;
    }
    pts.push(big_y);
    let r = quad::integrate(f, &pts, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions)?;
    let integral = r.value - z / (ac * big_y);
    Ok((I * integral).exp())
}
