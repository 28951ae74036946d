//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::fs::File;
use std::panic;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use qdilog::param::DEFAULT_LATTICE_TOL;
use qdilog::render::DEFAULT_LONG_SIDE;
use qdilog::{
    classify_point, color_of, gamma_reference, gb_product, gb_tilde, log_gb_strip, preset,
    psi_direct_integral, psi_faddeev, render, residue_inverse_gb, ruijsenaars_direct_integral,
    trace, write_png, zeta_bar, Complex64, GbEvaluator, LatticeKind, ModulusParameter,
    ProductConfig, QuadratureConfig, RenderFunction, RenderOptions, RenderSpec, TraceKind,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ev(b: f64) -> GbEvaluator {
    GbEvaluator::new(ModulusParameter::real(b).unwrap())
}

fn within(what: &str, value: f64, tol: f64) -> Result<(), String> {
    if value.is_finite() && value < tol {
        Ok(())
    } else {
        Err(format!("{what} = {value:.3e} not below {tol:.0e}"))
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

/// Uniform point with `Re z` in the central 80% of `(0, Re Q)`.
fn strip_point(q: f64, rng: &mut ChaCha8Rng, max_im: f64) -> Complex64 {
    c(
        rng.random_range(0.1 * q..0.9 * q),
        rng.random_range(-max_im..max_im),
    )
}

fn c1_zeta_bar() -> Outcome {
    let z = zeta_bar(&ModulusParameter::real(0.7).unwrap());
    within(
        "|ζ̄ - (0.123 - 0.992i)|",
        (z - c(0.123, -0.992)).norm(),
        1e-3,
    )?;
    Ok(format!("ζ̄ = {:.6}{:+.6}i", z.re, z.im))
}

fn c2_asymptote() -> Outcome {
    let e = ev(0.7);
    let p = *e.param();
    let g = e
        .gb(p.big_q() / 2.0 + c(0.0, 10.0))
        .map_err(|e| e.to_string())?
        .value;
    let d = (g - zeta_bar(&p)).norm();
    within("|G(Q/2 + 10i) - ζ̄|", d, 1e-2)?;
    Ok(format!("distance {d:.2e}"))
}

fn c3_reflection() -> Outcome {
    let mut notes = Vec::new();
    for b in [0.7, 0.248] {
        let e = ev(b);
        let q = e.param().big_q().re;
        let mut worst = 0.0f64;
        for i in 0..5 {
            for k in 0..10 {
                let z = c(
                    0.1 * q + 0.8 * q * (k as f64 + 0.5) / 10.0,
                    -0.5 + 0.25 * i as f64,
                );
                let lhs = e.gb(z).unwrap().value * e.gb(q - z).unwrap().value;
                let rhs = (PI * c(0.0, 1.0) * z * (z - q)).exp();
                worst = worst.max((lhs - rhs).norm());
            }
        }
        within(&format!("reflection residual at b = {b}"), worst, 1e-8)?;
        notes.push(format!("b={b}: {worst:.1e}"));
    }
    Ok(notes.join(", "))
}

fn c4_functional_equations() -> Outcome {
    let mut notes = Vec::new();
    for b in [0.7, 0.248] {
        let e = ev(b);
        let q = e.param().big_q().re;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let z = strip_point(q, &mut rng, 2.0);
            let g = e.gb(z).unwrap().value;
            for w in [b, 1.0 / b] {
                let shifted = e.gb(z + w).unwrap().value;
                let factor = 1.0 - (2.0 * PI * c(0.0, 1.0) * w * z).exp();
                worst = worst.max(rel(shifted, factor * g));
            }
        }
        within(
            &format!("functional equation residual at b = {b}"),
            worst,
            1e-8,
        )?;
        notes.push(format!("b={b}: {worst:.1e}"));
    }
    Ok(notes.join(", "))
}

fn c5_self_duality() -> Outcome {
    let (e, d) = (ev(0.7), ev(1.0 / 0.7));
    let q = e.param().big_q().re;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let z = strip_point(q, &mut rng, 2.0);
        worst = worst.max((e.gb(z).unwrap().value - d.gb(z).unwrap().value).norm());
    }
    within("|G_0.7 - G_1/0.7|", worst, 1e-9)?;
    Ok(format!("max {worst:.1e}"))
}

fn c6_unitarity() -> Outcome {
    let e = ev(0.7);
    let half = e.param().big_q().re / 2.0;
    let mut worst = 0.0f64;
    for k in 0..101 {
        let x = -5.0 + 0.1 * k as f64;
        worst = worst.max((e.gb(c(half, x)).unwrap().value.norm() - 1.0).abs());
    }
    within("||G(Q/2 + ix)| - 1|", worst, 1e-9)?;
    Ok(format!("max {worst:.1e} over 101 samples"))
}

fn c7_residue_origin() -> Outcome {
    let eps = 1e-5;
    let g = ev(0.7).gb(c(eps, 0.0)).unwrap().value;
    let d = (2.0 * PI * eps * g - 1.0).norm();
    within("|2π ε G(ε) - 1|", d, 1e-3)?;
    Ok(format!("{d:.2e}"))
}

/// `(1/2πi) ∮ dw / G(w)` on a circle of radius `r` around `w0`, trapezoid rule.
fn contour_residue(e: &GbEvaluator, w0: Complex64, r: f64, nodes: usize) -> Complex64 {
    (0..nodes)
        .map(|k| {
            let u = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / nodes as f64);
            r * u / e.gb(w0 + r * u).unwrap().value
        })
        .sum::<Complex64>()
        / nodes as f64
}

fn c8_general_residue() -> Outcome {
    let e = ev(0.7);
    let p = *e.param();
    let closed = residue_inverse_gb(&p, 1, 1).map_err(|e| e.to_string())?;
    // Q + 3b lies 0.028 away, so the circle stays well inside.
    let oracle = contour_residue(&e, p.big_q() + p.b() + p.b_inv(), 4e-3, 96);
    let d = rel(closed, oracle);
    within("relative residue mismatch", d, 1e-6)?;
    Ok(format!(
        "closed {closed:.6}, contour {oracle:.6}, rel {d:.1e}"
    ))
}

fn c9_multiplicity() -> Outcome {
    let p = ModulusParameter::real(1.0).unwrap();
    let pole = classify_point(&p, c(-2.0, 0.0), DEFAULT_LATTICE_TOL);
    let zero = classify_point(&p, c(3.0, 0.0), DEFAULT_LATTICE_TOL);
    if (pole.kind, pole.order) != (LatticeKind::Pole, 3) {
        return Err(format!("z = -2 classified as {pole}"));
    }
    if (zero.kind, zero.order) != (LatticeKind::Zero, 2) {
        return Err(format!("z = 3 classified as {zero}"));
    }
    Ok("pole of order 3 at -2, zero of order 2 at 3".into())
}

fn c10_compact_agreement() -> Outcome {
    let p = ModulusParameter::polar(0.7, PI / 4.0).unwrap();
    let q = p.big_q().re;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let z = strip_point(q, &mut rng, 1.0);
        let product = gb_product(&p, z, &ProductConfig::default())
            .map_err(|e| e.to_string())?
            .value;
        let integral = log_gb_strip(&p, z, &QuadratureConfig::default())
            .map_err(|e| e.to_string())?
            .log_value
            .exp();
        worst = worst.max(rel(product, integral));
    }
    within("product vs integral", worst, 1e-8)?;
    Ok(format!("max relative difference {worst:.1e}"))
}

fn gamma_errors(z: Complex64) -> [f64; 3] {
    let gamma = gamma_reference(z).unwrap();
    [0.35, 0.248, 0.1].map(|r| {
        let e = GbEvaluator::new(ModulusParameter::polar(r, PI / 4.0).unwrap());
        (gb_tilde(&e, z).unwrap().value - gamma).norm()
    })
}

fn c11_gamma_limit() -> Outcome {
    let mut notes = Vec::new();
    let mut monotone = true;
    for z in [c(2.0, 0.0), c(1.0, 0.5), c(3.0, 0.0)] {
        let e = gamma_errors(z);
        let ok = e[0] > e[1] && e[1] > e[2];
        monotone &= ok;
        let mark = if ok { "decreasing" } else { "NOT decreasing" };
        notes.push(format!(
            "z={z}: {:.2e}, {:.2e}, {:.2e} {mark}",
            e[0], e[1], e[2]
        ));
    }

    let e = GbEvaluator::new(ModulusParameter::polar(0.7, PI / 4.0).unwrap());
    let target = c(1.0, -1.0 / 0.49);
    let f = |z: Complex64| gb_tilde(&e, z).unwrap();
    let (mut z0, mut z1) = (target + c(0.05, 0.05), target + c(-0.03, 0.02));
    let mut f0 = f(z0).value;
    for _ in 0..60 {
        let r1 = f(z1);
        if r1.is_zero() {
            break;
        }
        let step = r1.value * (z1 - z0) / (r1.value - f0);
        (z0, f0) = (z1, r1.value);
        z1 -= step;
        if step.norm() < 1e-14 {
            break;
        }
    }
    within("|located zero - (1 - i/0.49)|", (z1 - target).norm(), 1e-6)?;
    notes.push(format!("zero at {:.9}{:+.9}i", z1.re, z1.im));
    if !monotone {
        // G_b(2b) = -ib(1 - q²), so the normalised value equals Γ(2) = 1 for
        // every b and the z = 2 errors are rounding noise with no trend.
        notes.push("z = 2 is exact for every b, so a strict decrease there is unattainable".into());
        return Err(notes.join("; "));
    }
    Ok(notes.join("; "))
}

fn c12_variant_chains() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let e = ev(0.7);
    let p = *e.param();
    let cfg = QuadratureConfig::default();
    let q = p.big_q().re;
    let (mut psi_worst, mut ruij_worst) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let z = c(rng.random_range(-3.0..3.0), rng.random_range(-1.0..1.0));
        let direct = psi_direct_integral(&p, z, &cfg).map_err(|e| e.to_string())?;
        let mapped = psi_faddeev(&e, z).map_err(|e| e.to_string())?.value;
        psi_worst = psi_worst.max(rel(direct, mapped));

        let z = c(
            rng.random_range(-3.0..3.0),
            rng.random_range(-q / 4.0..q / 4.0),
        );
        let direct =
            ruijsenaars_direct_integral(0.7, 1.0 / 0.7, z, &cfg).map_err(|e| e.to_string())?;
        let mapped = e
            .sb(p.big_q() / 2.0 - c(0.0, 1.0) * z)
            .map_err(|e| e.to_string())?
            .value;
        ruij_worst = ruij_worst.max(rel(direct, mapped));
    }
    within("ψ direct vs mapped", psi_worst, 1e-8)?;
    within("Ruijsenaars direct vs S_b", ruij_worst, 1e-7)?;
    Ok(format!("ψ {psi_worst:.1e}, Ruijsenaars {ruij_worst:.1e}"))
}

fn c13_color_formula() -> Outcome {
    let k = color_of(c(1.0, 0.0));
    let d = (k.h - 0.0)
        .abs()
        .max((k.s - 0.8279).abs())
        .max((k.v - 0.7810).abs());
    within("color_of(1) deviation", d, 1e-4)?;
    for x in [-5.0, -1.0, -0.01, -1e6] {
        let h = color_of(c(x, 0.0)).h;
        if h != 0.5 {
            return Err(format!("hue of {x} is {h}"));
        }
    }
    Ok(format!("(h, s, v) = ({:.4}, {:.4}, {:.4})", k.h, k.s, k.v))
}

fn png_bytes(img: &qdilog::ImageBuffer, name: &str) -> Vec<u8> {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    write_png(img, &path).unwrap();
    std::fs::read(&path).unwrap()
}

fn golden() -> Vec<u8> {
    let hex: String = include_str!("data/identity_16x16.hex")
        .split_whitespace()
        .collect();
    (0..hex.len())
        .step_by(2)
        .map(|k| u8::from_str_radix(&hex[k..k + 2], 16).unwrap())
        .collect()
}

fn c14_render_determinism() -> Outcome {
    let spec = preset("figure6", DEFAULT_LONG_SIDE).map_err(|e| e.to_string())?;
    let run = |threads| {
        let opts = RenderOptions {
            threads: Some(threads),
            ..Default::default()
        };
        render(&spec, &opts).unwrap()
    };
    let (one, s1) = run(1);
    let (four, s4) = run(4);
    if one != four || s1 != s4 {
        return Err("figure6 differs between 1 and 4 threads".into());
    }
    if png_bytes(&one, "figure6_t1.png") != png_bytes(&four, "figure6_t4.png") {
        return Err("figure6 PNG files differ".into());
    }

    let spec = RenderSpec::new([-2.0, 2.0, -2.0, 2.0], 16, 16, RenderFunction::Identity);
    let (img, _) = render(&spec, &RenderOptions::default()).map_err(|e| e.to_string())?;
    let expected = golden();
    if img.data != expected {
        let diff = img
            .data
            .iter()
            .zip(&expected)
            .filter(|(a, b)| a != b)
            .count();
        return Err(format!("identity golden mismatch in {diff} bytes"));
    }
    png_bytes(&img, "identity16.png");
    let decoder = png::Decoder::new(std::io::BufReader::new(
        File::open(PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("identity16.png")).unwrap(),
    ));
    let mut reader = decoder.read_info().map_err(|e| e.to_string())?;
    let mut buf = vec![0; reader.output_buffer_size().unwrap()];
    let info = reader.next_frame(&mut buf).map_err(|e| e.to_string())?;
    if (info.width, info.height) != (16, 16) || buf[..info.buffer_size()] != expected[..] {
        return Err("decoded golden PNG differs".into());
    }
    Ok(format!(
        "figure6 at {}x{} identical for 1 and 4 threads; 16x16 golden matches",
        one.width, one.height
    ))
}

fn c15_sign_alternation() -> Outcome {
    let e = ev(0.7);
    let (b, bi) = (0.7, 1.0 / 0.7);
    let q = b + bi;
    let samples = 2130;
    let rows = trace(&e, TraceKind::SbReal, q, 3.0 * q, samples).map_err(|e| e.to_string())?;
    let mut zeros = Vec::new();
    for n in 0..8 {
        for m in 0..4 {
            let x = q + n as f64 * b + m as f64 * bi;
            if x > q && x < 3.0 * q {
                zeros.push(x);
            }
        }
    }
    zeros.sort_by(f64::total_cmp);
    let mut checked = 0;
    for &x in &zeros {
        let k = rows.iter().position(|r| r.t > x).unwrap();
        let (lo, hi) = (&rows[k - 1], &rows[k]);
        let inside = zeros.iter().filter(|&&y| y > lo.t && y < hi.t).count();
        let (Some(a), Some(c)) = (lo.value, hi.value) else {
            continue;
        };
        if inside != 1 {
            continue;
        }
        if a.re * c.re >= 0.0 {
            return Err(format!("no sign flip across the zero at {x:.6}"));
        }
        checked += 1;
    }
    if checked < zeros.len() - 1 {
        return Err(format!("only {checked} of {} zeros bracketed", zeros.len()));
    }
    Ok(format!(
        "{checked} of {} zeros in (Q, 3Q) bracketed, all flip",
        zeros.len()
    ))
}

fn main() {
    let criteria: [Criterion; 15] = [
        ("zeta_bar numeric", c1_zeta_bar, Duration::from_secs(1)),
        ("asymptote", c2_asymptote, Duration::from_secs(1)),
        ("reflection", c3_reflection, Duration::from_secs(10)),
        (
            "functional equations",
            c4_functional_equations,
            Duration::from_secs(10),
        ),
        ("self-duality", c5_self_duality, Duration::from_secs(10)),
        (
            "critical-line unitarity",
            c6_unitarity,
            Duration::from_secs(5),
        ),
        (
            "residue at origin",
            c7_residue_origin,
            Duration::from_secs(1),
        ),
        (
            "general residue",
            c8_general_residue,
            Duration::from_secs(5),
        ),
        (
            "multiplicity at b = 1",
            c9_multiplicity,
            Duration::from_secs(1),
        ),
        (
            "compact agreement",
            c10_compact_agreement,
            Duration::from_secs(30),
        ),
        ("gamma limit", c11_gamma_limit, Duration::from_secs(30)),
        (
            "variant chains",
            c12_variant_chains,
            Duration::from_secs(30),
        ),
        ("color formula", c13_color_formula, Duration::from_secs(1)),
        (
            "render determinism",
            c14_render_determinism,
            Duration::from_secs(60),
        ),
        (
            "sign alternation",
            c15_sign_alternation,
            Duration::from_secs(10),
        ),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, (name, check, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(check).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|d| {
            if elapsed <= budget {
                Ok(d)
            } else {
                Err(format!("{d}; took {elapsed:.2?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(d) => println!("criterion {:>2}: PASS {name}: {d} [{elapsed:.2?}]", n + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2}: FAIL {name}: {d} [{elapsed:.2?}]", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 15 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
