//! Identity checks run against the evaluator, each reduced to one maximal
//! residual compared with a threshold.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cmath::I;
use crate::compact::{gamma_reference, gb_product, gb_tilde, qpochhammer, ProductConfig};
use crate::error::{Error, Result};
use crate::gb::{log_gb_strip, residue_inverse_gb, GbEvaluator, QuadratureConfig};
use crate::param::{ModulusParameter, Regime};
use crate::render::color_of;
use crate::variants::{
    g_small, phi_hbar, psi_direct_integral, psi_faddeev, ruijsenaars_direct_integral,
    ruijsenaars_g, v_theta,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: &'static str,
    /// The `b` the suite ran with; `None` for parameter-free suites.
    pub b: Option<Complex64>,
    pub max_residual: f64,
    pub threshold: f64,
    pub passed: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub params: Vec<ModulusParameter>,
    /// Replaces every suite's own threshold.
    pub threshold_override: Option<f64>,
    pub seed: u64,
    pub random_points: usize,
    pub include_global: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            params: default_parameters(),
            threshold_override: None,
            seed: 20_170_823,
            random_points: 50,
            include_global: true,
        }
    }
}

/// `b ∈ {0.7, 0.248, 1, e^{πi/4}·0.7}`.
pub fn default_parameters() -> Vec<ModulusParameter> {
    vec![
        ModulusParameter::real(0.7).expect("valid"),
        ModulusParameter::real(0.248).expect("valid"),
        ModulusParameter::real(1.0).expect("valid"),
        ModulusParameter::polar(0.7, PI / 4.0).expect("valid"),
    ]
}

/// Outcome of one suite before the threshold is applied.
struct Outcome {
    residual: f64,
    note: String,
}

impl Outcome {
    fn new(residual: f64, note: impl Into<String>) -> Self {
        Outcome {
            residual,
            note: note.into(),
        }
    }
}

type ParamSuite = fn(&GbEvaluator, &mut ChaCha8Rng, usize) -> Result<Outcome>;
type GlobalSuite = fn() -> Result<Outcome>;

struct Suite<F> {
    name: &'static str,
    threshold: f64,
    /// Restricts the suite to real `b`.
    real_only: bool,
    compact_only: bool,
    run: F,
}

fn param_suites() -> Vec<Suite<ParamSuite>> {
    vec![
        Suite {
            name: "functional_equation",
            threshold: 1e-8,
            real_only: false,
            compact_only: false,
            run: functional_equation,
        },
        Suite {
            name: "reflection",
            threshold: 1e-8,
            real_only: false,
            compact_only: false,
            run: reflection,
        },
        Suite {
            name: "self_duality",
            threshold: 1e-9,
            real_only: false,
            compact_only: false,
            run: self_duality,
        },
        Suite {
            name: "conjugation",
            threshold: 1e-8,
            real_only: true,
            compact_only: false,
            run: conjugation,
        },
        Suite {
            name: "critical_line",
            threshold: 1e-9,
            real_only: true,
            compact_only: false,
            run: critical_line,
        },
        Suite {
            name: "continuation",
            threshold: 1e-9,
            real_only: false,
            compact_only: false,
            run: continuation,
        },
        Suite {
            name: "sb_reality",
            threshold: 1e-9,
            real_only: true,
            compact_only: false,
            run: sb_reality,
        },
        Suite {
            name: "residue_origin",
            threshold: 1e-3,
            real_only: false,
            compact_only: false,
            run: residue_origin,
        },
        Suite {
            name: "residue_general",
            threshold: 1e-6,
            real_only: false,
            compact_only: false,
            run: residue_general,
        },
        Suite {
            name: "product_vs_integral",
            threshold: 1e-8,
            real_only: false,
            compact_only: true,
            run: product_vs_integral,
        },
        Suite {
            name: "phi_chain",
            threshold: 1e-10,
            real_only: true,
            compact_only: false,
            run: phi_chain,
        },
        Suite {
            name: "psi_direct",
            threshold: 1e-8,
            real_only: true,
            compact_only: false,
            run: psi_direct,
        },
        Suite {
            name: "ruijsenaars_direct",
            threshold: 1e-7,
            real_only: true,
            compact_only: false,
            run: ruijsenaars_direct,
        },
    ]
}

fn global_suites() -> Vec<Suite<GlobalSuite>> {
    vec![
        Suite {
            name: "color_formula",
            threshold: 1e-4,
            real_only: false,
            compact_only: false,
            run: color_formula,
        },
        Suite {
            name: "qpochhammer_shift",
            threshold: 1e-12,
            real_only: false,
            compact_only: false,
            run: qpochhammer_shift,
        },
        Suite {
            name: "gamma_limit",
            threshold: 0.0,
            real_only: false,
            compact_only: false,
            run: gamma_limit,
        },
    ]
}

/// Runs every applicable suite; the report order is fixed regardless of scheduling.
pub fn run_verify(cfg: &VerifyConfig) -> Vec<SuiteReport> {
    let suites = param_suites();
    let mut jobs = Vec::new();
    for (pi, p) in cfg.params.iter().enumerate() {
        for (si, s) in suites.iter().enumerate() {
            let real = p.regime() == Regime::RealPositive;
            let compact = p.regime() == Regime::Compact;
            if (s.real_only && !real) || (s.compact_only && !compact) {
                continue;
            }
            jobs.push((pi, si, *p));
        }
    }
    let mut reports: Vec<SuiteReport> = jobs
        .par_iter()
        .map(|&(pi, si, p)| {
            let s = &suites[si];
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ ((pi as u64) << 32) ^ si as u64);
            let ev = GbEvaluator::new(p);
            let outcome = (s.run)(&ev, &mut rng, cfg.random_points.max(1));
            finish(
                s.name,
                Some(p.b()),
                s.threshold,
                cfg.threshold_override,
                outcome,
            )
        })
        .collect();
    if cfg.include_global {
        let globals: Vec<SuiteReport> = global_suites()
            .par_iter()
            .map(|s| finish(s.name, None, s.threshold, cfg.threshold_override, (s.run)()))
            .collect();
        reports.extend(globals);
    }
    reports
}

fn finish(
    suite: &'static str,
    b: Option<Complex64>,
    threshold: f64,
    threshold_override: Option<f64>,
    outcome: Result<Outcome>,
) -> SuiteReport {
    let threshold = threshold_override.unwrap_or(threshold);
    match outcome {
        Ok(o) => SuiteReport {
            suite,
            b,
            max_residual: o.residual,
            threshold,
            passed: o.residual.is_finite() && o.residual <= threshold,
            note: o.note,
        },
        Err(e) => SuiteReport {
            suite,
            b,
            max_residual: f64::INFINITY,
            threshold,
            passed: false,
            note: format!("error: {e}"),
        },
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

/// Uniform point with `Re z` in the central 80% of the strip.
fn strip_point(p: &ModulusParameter, rng: &mut ChaCha8Rng, max_im: f64) -> Complex64 {
    let q = p.big_q().re;
    Complex64::new(
        rng.random_range(0.1 * q..0.9 * q),
        rng.random_range(-max_im..max_im),
    )
}

/// 5 × 10 grid with `Re z` in the central 80% of the strip.
pub fn strip_grid(p: &ModulusParameter, max_im: f64) -> Vec<Complex64> {
    let q = p.big_q().re;
    let mut pts = Vec::with_capacity(50);
    for i in 0..5 {
        for j in 0..10 {
            let x = q * (0.1 + 0.8 * i as f64 / 4.0);
            let y = -max_im + 2.0 * max_im * j as f64 / 9.0;
            pts.push(Complex64::new(x, y));
        }
    }
    pts
}

fn functional_equation(ev: &GbEvaluator, rng: &mut ChaCha8Rng, n: usize) -> Result<Outcome> {
    let p = ev.param();
    let mut worst = 0.0f64;
    for _ in 0..n {
        let z = strip_point(p, rng, 2.0);
        let g = ev.gb(z)?.value;
        for w in [p.b(), p.b_inv()] {
            let shifted = ev.gb(z + w)?.value;
            let expected = (1.0 - (2.0 * PI * I * w * z).exp()) * g;
            worst = worst.max(rel(shifted, expected));
        }
    }
    Ok(Outcome::new(
        worst,
        format!("{n} random strip points, shifts by b and 1/b"),
    ))
}

fn reflection(ev: &GbEvaluator, _: &mut ChaCha8Rng, _: usize) -> Result<Outcome> {
    let p = ev.param();
    let q = p.big_q();
    let mut worst = 0.0f64;
    for z in strip_grid(p, 0.5) {
        let lhs = ev.gb(z)?.value * ev.gb(q - z)?.value;
        worst = worst.max((lhs - (PI * I * z * (z - q)).exp()).norm());
    }
    Ok(Outcome::new(
        worst,
        "absolute residual on a 50-point grid, |Im z| <= 0.5",
    ))
}

fn self_duality(ev: &GbEvaluator, rng: &mut ChaCha8Rng, n: usize) -> Result<Outcome> {
    let p = ev.param();
    let dual = GbEvaluator::new(p.dual());
    let mut worst = 0.0f64;
    for _ in 0..n {
        let z = strip_point(p, rng, 1.0);
        worst = worst.max(rel(ev.gb(z)?.value, dual.gb(z)?.value));
    }
    let note = match (p.regime(), p.dual().regime()) {
        (a, b) if a != b => format!("relative; {a} vs {b} evaluation paths"),
        _ => "relative".to_string(),
    };
    Ok(Outcome::new(worst, note))
}

fn conjugation(ev: &GbEvaluator, rng: &mut ChaCha8Rng, n: usize) -> Result<Outcome> {
    let q = ev.param().big_q();
    let mut worst = 0.0f64;
    for _ in 0..n {
        let z = strip_point(ev.param(), rng, 2.0);
        let v = ev.gb(z)?.value.conj() * ev.gb(q - z.conj())?.value;
        worst = worst.max((v - 1.0).norm());
    }
    Ok(Outcome::new(worst, "conj G(z) · G(Q - conj z) = 1"))
}

fn critical_line(ev: &GbEvaluator, _: &mut ChaCha8Rng, _: usize) -> Result<Outcome> {
    let half = ev.param().big_q() * 0.5;
    let mut worst = 0.0f64;
    for k in 0..=100 {
        let x = -5.0 + 0.1 * k as f64;
        worst = worst.max((ev.gb(half + I * x)?.value.norm() - 1.0).abs());
    }
    Ok(Outcome::new(worst, "101 samples, x in [-5, 5]"))
}

fn continuation(ev: &GbEvaluator, rng: &mut ChaCha8Rng, n: usize) -> Result<Outcome> {
    let p = ev.param();
    let (b, bi, q) = (p.b(), p.b_inv(), p.big_q());
    let period =
        |x: Complex64| (1.0 - (2.0 * PI * I * b * x).exp()) * (1.0 - (2.0 * PI * I * bi * x).exp());
    let mut worst = 0.0f64;
    for _ in 0..n {
        let z = strip_point(p, rng, 1.5);
        let g = ev.gb(z)?.value;
        worst = worst.max(rel(ev.gb(z + q)?.value, period(z) * g));
        worst = worst.max(rel(ev.gb(z - q)?.value, g / period(z - q)));
    }
    Ok(Outcome::new(
        worst,
        "G(z ± Q) against G(z) times the period factor",
    ))
}

fn sb_reality(ev: &GbEvaluator, _: &mut ChaCha8Rng, _: usize) -> Result<Outcome> {
    let q = ev.param().big_q().re;
    let mut worst = 0.0f64;
    let mut used = 0;
    for k in 0..200 {
        let x = -2.0 * q + 5.0 * q * (k as f64 + 0.5) / 200.0;
        let z = Complex64::new(x, 0.0);
        if crate::param::nearest_lattice_distance(ev.param(), z, 1e-3).is_some() {
            continue;
        }
        let s = ev.sb(z)?.value;
        worst = worst.max(s.im.abs() / (1.0 + s.norm()));
        used += 1;
    }
    Ok(Outcome::new(
        worst,
        format!("{used} points on (-2Q, 3Q) clear of the lattice"),
    ))
}

fn residue_origin(ev: &GbEvaluator, _: &mut ChaCha8Rng, _: usize) -> Result<Outcome> {
    let eps = 1e-5;
    let g = ev.gb(Complex64::new(eps, 0.0))?.value;
    Ok(Outcome::new(
        (2.0 * PI * eps * g - 1.0).norm(),
        "2π ε G(ε) at ε = 1e-5",
    ))
}

/// Residue of `1/G_b(Q + z)` at `z = nb + m/b` by the trapezoid rule on a
/// small circle.
pub fn residue_by_contour(
    ev: &GbEvaluator,
    n: u32,
    m: u32,
    radius: f64,
    nodes: usize,
) -> Result<Complex64> {
    let p = ev.param();
    let z0 = p.big_q() + p.b() * n as f64 + p.b_inv() * m as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..nodes {
        let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / nodes as f64);
        acc += e / ev.gb(z0 + radius * e)?.value;
    }
    Ok(acc * radius / nodes as f64)
}

fn residue_general(ev: &GbEvaluator, _: &mut ChaCha8Rng, _: usize) -> Result<Outcome> {
    match residue_inverse_gb(ev.param(), 1, 1) {
        Ok(closed) => {
            let oracle = residue_by_contour(ev, 1, 1, 1e-3, 64)?;
            Ok(Outcome::new(
                rel(closed, oracle),
                "(n, m) = (1, 1) against a 64-node contour sum",
            ))
        }
        Err(Error::Degenerate(msg)) => Ok(Outcome::new(
            0.0,
            format!("degenerate branch exercised: {msg}"),
        )),
        Err(e) => Err(e),
    }
}

fn product_vs_integral(ev: &GbEvaluator, rng: &mut ChaCha8Rng, _: usize) -> Result<Outcome> {
    let p = ev.param();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let z = strip_point(p, rng, 2.0);
        let prod = gb_product(p, z, ev.product())?.value;
        let strip = log_gb_strip(p, z, ev.quadrature())?.log_value.exp();
        worst = worst.max(rel(prod, strip));
    }
    Ok(Outcome::new(worst, "20 random strip points"))
}

fn phi_chain(ev: &GbEvaluator, rng: &mut ChaCha8Rng, _: usize) -> Result<Outcome> {
    let p = ev.param();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let z = Complex64::new(rng.random_range(-4.0..4.0), rng.random_range(-1.0..1.0));
        let phi = phi_hbar(ev, z)?.value;
        let v = v_theta(ev, z)?.value;
        let g = 1.0 / g_small(ev, z.exp())?.value;
        let direct = p.zeta_b() * ev.gb(p.big_q() * 0.5 - I * z / (2.0 * PI * p.b()))?.value;
        for x in [v, g, direct] {
            worst = worst.max(rel(phi, x));
        }
    }
    Ok(Outcome::new(worst, "V, Φ, 1/g(e^z) and ζ G at 20 points"))
}

fn psi_direct(ev: &GbEvaluator, rng: &mut ChaCha8Rng, _: usize) -> Result<Outcome> {
    let p = ev.param();
    let cfg = QuadratureConfig::default();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let z = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-1.0..1.0));
        let direct = psi_direct_integral(p, z, &cfg)?;
        let mapped = psi_faddeev(ev, z)?.value;
        let inv_phi = 1.0 / phi_hbar(ev, -p.b() * z)?.value;
        worst = worst.max(rel(direct, mapped)).max(rel(direct, inv_phi));
    }
    Ok(Outcome::new(worst, "10 points, direct integral as anchor"))
}

fn ruijsenaars_direct(ev: &GbEvaluator, rng: &mut ChaCha8Rng, _: usize) -> Result<Outcome> {
    let b = ev.param().b().re;
    let half = 0.5 * (b + 1.0 / b);
    let cfg = QuadratureConfig::default();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let z = Complex64::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-0.5 * half..0.5 * half),
        );
        let d = ruijsenaars_direct_integral(b, 1.0 / b, z, &cfg)?;
        let m = ruijsenaars_g(b, 1.0 / b, z)?.value;
        worst = worst.max(rel(d, m));
    }
    Ok(Outcome::new(worst, "10 points in the strip |Im z| < Q/4"))
}

fn color_formula() -> Result<Outcome> {
    let c = color_of(Complex64::new(1.0, 0.0));
    let worst = (c.h - 0.0)
        .abs()
        .max((c.s - 0.8279).abs())
        .max((c.v - 0.7810).abs());
    let neg = (color_of(Complex64::new(-5.0, 0.0)).h - 0.5).abs();
    Ok(Outcome::new(
        worst.max(neg),
        "color_of(1) and the hue of -5",
    ))
}

fn qpochhammer_shift() -> Result<Outcome> {
    let cfg = ProductConfig::default();
    let mut worst = 0.0f64;
    for (a, q) in [
        (Complex64::new(0.3, 0.4), Complex64::new(0.5, 0.1)),
        (Complex64::new(-1.5, 0.2), Complex64::new(-0.2, 0.7)),
        (Complex64::new(2.0, -1.0), Complex64::new(0.9, 0.0)),
    ] {
        let lhs = qpochhammer(a, q, &cfg)? / (1.0 - a);
        let rhs = qpochhammer(a * q, q, &cfg)?;
        worst = worst.max(rel(lhs, rhs));
    }
    Ok(Outcome::new(worst, "(a;q)/(1-a) = (aq;q)"))
}

/// Errors `|G̃_b(z) - Γ(z)|` for `|b| = 0.35, 0.248, 0.1` at `z`.
pub fn gamma_limit_errors(z: Complex64) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for (k, r) in [0.35, 0.248, 0.1].into_iter().enumerate() {
        let ev = GbEvaluator::new(ModulusParameter::polar(r, PI / 4.0)?);
        out[k] = (gb_tilde(&ev, z)?.value - gamma_reference(z)?).norm();
    }
    Ok(out)
}

/// Reported residual is the largest increase along the sequence (zero when
/// the errors decrease strictly).
fn gamma_limit() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for z in [Complex64::new(1.0, 0.5), Complex64::new(3.0, 0.0)] {
        let e = gamma_limit_errors(z)?;
        for w in e.windows(2) {
            if w[1] >= w[0] {
                worst = worst.max(w[1] - w[0]).max(f64::MIN_POSITIVE);
            }
        }
        notes.push(format!("z={z}: {:.3e} > {:.3e} > {:.3e}", e[0], e[1], e[2]));
    }
    Ok(Outcome::new(worst, notes.join("; ")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let cfg = VerifyConfig {
            random_points: 8,
            ..Default::default()
        };
        let reports = run_verify(&cfg);
        for r in &reports {
            assert!(r.passed, "{r:?}");
        }
        let resonant = reports
            .iter()
            .find(|r| r.suite == "residue_general" && r.b == Some(Complex64::new(1.0, 0.0)))
            .unwrap();
        assert!(resonant.note.starts_with("degenerate branch exercised"));
        assert!(reports.iter().any(|r| r.suite == "product_vs_integral"));
    }

    #[test]
    fn tampered_threshold_fails() {
        let cfg = VerifyConfig {
            params: vec![ModulusParameter::real(0.7).unwrap()],
            threshold_override: Some(1e-20),
            random_points: 4,
            include_global: false,
            ..Default::default()
        };
        let reports = run_verify(&cfg);
        assert!(reports.iter().any(|r| !r.passed));
        assert!(reports.iter().all(|r| r.threshold == 1e-20));
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = VerifyConfig {
            params: vec![ModulusParameter::real(0.7).unwrap()],
            random_points: 4,
            include_global: false,
            ..Default::default()
        };
        assert_eq!(run_verify(&cfg), run_verify(&cfg));
    }
}
