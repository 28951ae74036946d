//! Domain coloring: argument as hue, modulus as saturation and brightness.
//!
//! ```text
//! h = Arg(f)/2π mod 1
//! s = 1 / (1 + 0.3 ln(|f| + 1))
//! v = 1 - 1 / (1.1 + 5 ln(|f| + 1))
//! ```
//!
//! Zeros come out near-black (`v = 1 - 1/1.1`), poles and failed samples
//! white. Colors are computed from `ln f`, so values far beyond `f64` range
//! still get the right shade.

use std::f64::consts::PI;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::compact::{gb_tilde, ln_gamma_reference, ProductConfig};
use crate::error::{Error, Result};
use crate::gb::{EvaluationResult, GbEvaluator, QuadratureConfig};
use crate::param::{LatticeKind, ModulusParameter};
use crate::variants::VariantSelector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorTriple {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

impl ColorTriple {
    pub const WHITE: ColorTriple = ColorTriple {
        h: 0.0,
        s: 0.0,
        v: 1.0,
    };
}

fn hue_of(arg: f64) -> f64 {
    let h = (arg / (2.0 * PI)).rem_euclid(1.0);
    // rem_euclid can round up to exactly 1.0 for tiny negative inputs
    if h >= 1.0 {
        0.0
    } else {
        h
    }
}

fn shade(h: f64, ln_abs_plus_one: f64) -> ColorTriple {
    ColorTriple {
        h,
        s: 1.0 / (1.0 + 0.3 * ln_abs_plus_one),
        v: 1.0 - 1.0 / (1.1 + 5.0 * ln_abs_plus_one),
    }
}

pub fn color_of(f: Complex64) -> ColorTriple {
    if f.re.is_nan() || f.im.is_nan() || f.re.is_infinite() || f.im.is_infinite() {
        return ColorTriple::WHITE;
    }
    let m = f.norm();
    if m == 0.0 {
        return shade(0.0, 0.0);
    }
    if m.is_infinite() {
        return ColorTriple::WHITE;
    }
    shade(hue_of(f.arg()), m.ln_1p())
}

/// The color of `f = e^w`, without forming `f`.
pub fn color_from_log(w: Complex64) -> ColorTriple {
    if w.re.is_nan() || w.re == f64::INFINITY {
        return ColorTriple::WHITE;
    }
    if w.re == f64::NEG_INFINITY {
        return color_of(Complex64::new(0.0, 0.0));
    }
    if !w.im.is_finite() {
        return ColorTriple::WHITE;
    }
    // ln(|f| + 1) = ln|f| + ln(1 + 1/|f|)
    let l = if w.re > 30.0 {
        w.re + (-w.re).exp()
    } else {
        w.re.exp().ln_1p()
    };
    shade(hue_of(w.im), l)
}

/// Hexcone conversion with round-half-up quantisation to 8 bits.
pub fn hsb_to_rgb(c: ColorTriple) -> [u8; 3] {
    let [r, g, b] = hsb_to_rgb_f64(c);
    [quantise(r), quantise(g), quantise(b)]
}

fn quantise(x: f64) -> u8 {
    (x * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

fn hsb_to_rgb_f64(c: ColorTriple) -> [f64; 3] {
    let (h, s, v) = (c.h, c.s.clamp(0.0, 1.0), c.v.clamp(0.0, 1.0));
    let h6 = h.rem_euclid(1.0) * 6.0;
    let sector = h6.floor();
    let f = h6 - sector;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    match sector as u32 % 6 {
        0 => [v, t, p],
        1 => [q, v, p],
        2 => [p, v, t],
        3 => [p, q, v],
        4 => [t, p, v],
        _ => [v, p, q],
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RenderFunction {
    Identity,
    Reciprocal,
    Cube,
    Exp,
    Gamma,
    Gb,
    Sb,
    GbTilde,
    Variant(VariantSelector),
}

impl RenderFunction {
    pub fn needs_param(&self) -> bool {
        !matches!(
            self,
            RenderFunction::Identity
                | RenderFunction::Reciprocal
                | RenderFunction::Cube
                | RenderFunction::Exp
                | RenderFunction::Gamma
                | RenderFunction::Variant(VariantSelector::RuijsenaarsG { .. })
        )
    }
}

impl fmt::Display for RenderFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RenderFunction::Identity => f.write_str("identity"),
            RenderFunction::Reciprocal => f.write_str("reciprocal"),
            RenderFunction::Cube => f.write_str("cube"),
            RenderFunction::Exp => f.write_str("exp"),
            RenderFunction::Gamma => f.write_str("gamma"),
            RenderFunction::Gb => f.write_str("gb"),
            RenderFunction::Sb => f.write_str("sb"),
            RenderFunction::GbTilde => f.write_str("gb_tilde"),
            RenderFunction::Variant(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for RenderFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "identity" | "z" => RenderFunction::Identity,
            "reciprocal" => RenderFunction::Reciprocal,
            "cube" => RenderFunction::Cube,
            "exp" => RenderFunction::Exp,
            "gamma" => RenderFunction::Gamma,
            "gb" => RenderFunction::Gb,
            "sb" => RenderFunction::Sb,
            "gb_tilde" => RenderFunction::GbTilde,
            other => RenderFunction::Variant(other.parse()?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub width: u32,
    pub height: u32,
    pub function: RenderFunction,
    pub param: Option<ModulusParameter>,
    /// Average a 2×2 grid of samples per pixel.
    pub supersample: bool,
}

impl RenderSpec {
    pub fn new(rect: [f64; 4], width: u32, height: u32, function: RenderFunction) -> Self {
        RenderSpec {
            x_min: rect[0],
            x_max: rect[1],
            y_min: rect[2],
            y_max: rect[3],
            width,
            height,
            function,
            param: None,
            supersample: false,
        }
    }

    pub fn with_param(mut self, param: ModulusParameter) -> Self {
        self.param = Some(param);
        self
    }

    /// Width and height with `long_side` pixels along the longer axis and
    /// the other chosen to keep pixels square.
    pub fn with_long_side(mut self, long_side: u32) -> Self {
        let (w, h) = (self.x_max - self.x_min, self.y_max - self.y_min);
        if w >= h {
            self.width = long_side;
            self.height = ((long_side as f64 * h / w).round() as u32).max(1);
        } else {
            self.height = long_side;
            self.width = ((long_side as f64 * w / h).round() as u32).max(1);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.x_min < self.x_max) || !(self.y_min < self.y_max) {
            return Err(Error::Domain(format!(
                "invalid rectangle [{}, {}] × [{}, {}]",
                self.x_min, self.x_max, self.y_min, self.y_max
            )));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::Domain("image dimensions must be positive".into()));
        }
        if self.function.needs_param() && self.param.is_none() {
            return Err(Error::Domain(format!(
                "function {} needs a value of b",
                self.function
            )));
        }
        Ok(())
    }

    /// The point sampled at sub-position `(u, v)` of pixel `(i, j)`, where
    /// `(0.5, 0.5)` is the cell center; row 0 is the top edge.
    pub fn sample_point(&self, i: u32, j: u32, u: f64, v: f64) -> Complex64 {
        let dx = (self.x_max - self.x_min) / self.width as f64;
        let dy = (self.y_max - self.y_min) / self.height as f64;
        Complex64::new(
            self.x_min + (i as f64 + u) * dx,
            self.y_max - (j as f64 + v) * dy,
        )
    }

    pub fn pixel_center(&self, i: u32, j: u32) -> Complex64 {
        self.sample_point(i, j, 0.5, 0.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    pub quadrature: QuadratureConfig,
    pub product: ProductConfig,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Use the precomputed trapezoid kernel for strip integrals.
    pub kernel: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            quadrature: QuadratureConfig::default(),
            product: ProductConfig::default(),
            threads: None,
            kernel: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RenderStats {
    /// Samples whose evaluation returned an error.
    pub failures: usize,
    pub poles: usize,
    pub zeros: usize,
}

/// Row-major 8-bit RGB, top row first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(width: u32, height: u32) -> Self {
        ImageBuffer {
            width,
            height,
            data: vec![0; 3 * width as usize * height as usize],
        }
    }

    pub fn pixel(&self, i: u32, j: u32) -> [u8; 3] {
        let k = 3 * (j as usize * self.width as usize + i as usize);
        [self.data[k], self.data[k + 1], self.data[k + 2]]
    }
}

enum Sample {
    Log(Complex64),
    Pole,
    Failed,
}

struct Sampler {
    function: RenderFunction,
    evaluator: Option<GbEvaluator>,
}

impl Sampler {
    fn new(spec: &RenderSpec, opts: &RenderOptions) -> Result<Self> {
        let evaluator = match spec.param {
            Some(p) if spec.function.needs_param() => {
                let ev = GbEvaluator::new(p)
                    .with_quadrature(opts.quadrature)
                    .with_product(opts.product);
                Some(if opts.kernel { ev.with_kernel()? } else { ev })
            }
            _ => None,
        };
        Ok(Sampler {
            function: spec.function,
            evaluator,
        })
    }

    fn from_result(r: Result<EvaluationResult>) -> Sample {
        match r {
            Ok(e) if e.classification.kind == LatticeKind::Pole => Sample::Pole,
            Ok(e) => Sample::Log(e.log_value),
            Err(Error::Pole(_)) => Sample::Pole,
            Err(_) => Sample::Failed,
        }
    }

    fn sample(&self, z: Complex64) -> Sample {
        let ev = || {
            self.evaluator
                .as_ref()
                .expect("validated spec has a parameter")
        };
        match self.function {
            RenderFunction::Identity => Sample::Log(z.ln()),
            RenderFunction::Reciprocal => {
                if z == Complex64::new(0.0, 0.0) {
                    Sample::Pole
                } else {
                    Sample::Log(-z.ln())
                }
            }
            RenderFunction::Cube => Sample::Log(3.0 * z.ln()),
            RenderFunction::Exp => Sample::Log(z),
            RenderFunction::Gamma => match ln_gamma_reference(z) {
                Ok(l) => Sample::Log(l),
                Err(Error::Pole(_)) => Sample::Pole,
                Err(_) => Sample::Failed,
            },
            RenderFunction::Gb => Self::from_result(ev().gb(z)),
            RenderFunction::Sb => Self::from_result(ev().sb(z)),
            RenderFunction::GbTilde => Self::from_result(gb_tilde(ev(), z)),
            RenderFunction::Variant(VariantSelector::RuijsenaarsG { a_plus, a_minus }) => {
                Self::from_result(crate::variants::ruijsenaars_g(a_plus, a_minus, z))
            }
            RenderFunction::Variant(v) => Self::from_result(v.evaluate(ev(), z)),
        }
    }
}

#[derive(Default)]
struct Counters {
    failures: AtomicUsize,
    poles: AtomicUsize,
    zeros: AtomicUsize,
}

fn color_sample(s: &Sample, counters: &Counters) -> ColorTriple {
    match s {
        Sample::Log(w) => {
            if w.re == f64::NEG_INFINITY {
                counters.zeros.fetch_add(1, Ordering::Relaxed);
            }
            color_from_log(*w)
        }
        Sample::Pole => {
            counters.poles.fetch_add(1, Ordering::Relaxed);
            ColorTriple::WHITE
        }
        Sample::Failed => {
            counters.failures.fetch_add(1, Ordering::Relaxed);
            ColorTriple::WHITE
        }
    }
}

const SUBSAMPLES: [(f64, f64); 4] = [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)];

fn render_rows(spec: &RenderSpec, sampler: &Sampler, counters: &Counters, data: &mut [u8]) {
    let row_len = 3 * spec.width as usize;
    data.par_chunks_mut(row_len)
        .enumerate()
        .for_each(|(j, row)| {
            let j = j as u32;
            for i in 0..spec.width {
                let rgb = if spec.supersample {
                    let mut acc = [0.0; 3];
                    for &(u, v) in &SUBSAMPLES {
                        let s = sampler.sample(spec.sample_point(i, j, u, v));
                        let c = hsb_to_rgb_f64(color_sample(&s, counters));
                        for k in 0..3 {
                            acc[k] += 0.25 * c[k];
                        }
                    }
                    [quantise(acc[0]), quantise(acc[1]), quantise(acc[2])]
                } else {
                    let s = sampler.sample(spec.pixel_center(i, j));
                    hsb_to_rgb(color_sample(&s, counters))
                };
                let k = 3 * i as usize;
                row[k..k + 3].copy_from_slice(&rgb);
            }
        });
}

/// Renders `spec`; failing samples become white and are counted.
///
/// Each pixel is written by index from a pure evaluation, so the bytes do
/// not depend on the thread count or schedule.
pub fn render(spec: &RenderSpec, opts: &RenderOptions) -> Result<(ImageBuffer, RenderStats)> {
    spec.validate()?;
    let sampler = Sampler::new(spec, opts)?;
    let mut img = ImageBuffer::new(spec.width, spec.height);
    let counters = Counters::default();
    match opts.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Domain(format!("cannot build thread pool: {e}")))?;
            pool.install(|| render_rows(spec, &sampler, &counters, &mut img.data));
        }
        None => render_rows(spec, &sampler, &counters, &mut img.data),
    }
    let stats = RenderStats {
        failures: counters.failures.into_inner(),
        poles: counters.poles.into_inner(),
        zeros: counters.zeros.into_inner(),
    };
    Ok((img, stats))
}

/// 8-bit RGB PNG with an sRGB chunk.
pub fn write_png(img: &ImageBuffer, path: &Path) -> Result<()> {
    write_png_with_text(img, path, &[])
}

/// As [`write_png`], adding one `tEXt` chunk per `(keyword, text)` pair.
pub fn write_png_with_text(
    img: &ImageBuffer,
    path: &Path,
    text: &[(String, String)],
) -> Result<()> {
    let file = File::create(path)?;
    let mut enc = png::Encoder::new(BufWriter::new(file), img.width, img.height);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    enc.set_source_srgb(png::SrgbRenderingIntent::Perceptual);
    for (k, v) in text {
        enc.add_text_chunk(k.clone(), v.clone())
            .map_err(|e| Error::Io(e.to_string()))?;
    }
    let mut writer = enc.write_header().map_err(|e| Error::Io(e.to_string()))?;
    writer
        .write_image_data(&img.data)
        .map_err(|e| Error::Io(e.to_string()))?;
    writer.finish().map_err(|e| Error::Io(e.to_string()))
}

/// Binary PPM (P6).
pub fn write_ppm(img: &ImageBuffer, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P6\n{} {}\n255\n", img.width, img.height)?;
    w.write_all(&img.data)?;
    w.flush()?;
    Ok(())
}

/// Default pixel count along the longer side of preset images.
pub const DEFAULT_LONG_SIDE: u32 = 1200;

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 15] = [
    "figure1a", "figure1b", "figure2", "figure3", "figure4", "figure6", "figure7", "figure8",
    "figure9", "figure15", "figure16", "figure17", "figure18", "figure19", "figure20",
];

fn alias(name: &str) -> &str {
    match name {
        "identity" => "figure1a",
        "reciprocal" => "figure1b",
        "exp" => "figure2",
        "cube" => "figure3",
        "gamma" => "figure4",
        "gb-0.7" => "figure6",
        "gb-0.248" => "figure7",
        "gb-1" => "figure8",
        "sb-0.7" => "figure9",
        "gb-compact-0.7" => "figure15",
        "gb-compact-0.248" => "figure16",
        "gb-tilde-0.7" => "figure17",
        "gb-tilde-0.35" => "figure18",
        "gb-tilde-0.248" => "figure19",
        "g-small-0.7" => "figure20",
        other => other,
    }
}

/// Figure geometry with `long_side` pixels along the longer axis.
pub fn preset(name: &str, long_side: u32) -> Result<RenderSpec> {
    let real = |b: f64| ModulusParameter::real(b);
    let ray = |r: f64| ModulusParameter::polar(r, PI / 4.0);
    let strip = |b: f64, y0: f64, y1: f64, f: RenderFunction| -> Result<RenderSpec> {
        let p = real(b)?;
        let q = p.big_q().re;
        Ok(RenderSpec::new([-2.0 * q, 3.0 * q, y0, y1], 1, 1, f).with_param(p))
    };
    let square =
        |half: f64, f: RenderFunction| RenderSpec::new([-half, half, -half, half], 1, 1, f);
    let spec = match alias(name) {
        "figure1a" => square(2.0, RenderFunction::Identity),
        "figure1b" => square(2.0, RenderFunction::Reciprocal),
        "figure2" => square(5.0, RenderFunction::Exp),
        "figure3" => square(2.0, RenderFunction::Cube),
        "figure4" => square(5.0, RenderFunction::Gamma),
        "figure6" => strip(0.7, -5.0, 1.0, RenderFunction::Gb)?,
        "figure7" => strip(0.248, -6.0, 4.0, RenderFunction::Gb)?,
        "figure8" => strip(1.0, -5.0, 3.0, RenderFunction::Gb)?,
        "figure9" => strip(0.7, -5.0, 5.0, RenderFunction::Sb)?,
        "figure15" => square(10.0, RenderFunction::Gb).with_param(ray(0.7)?),
        "figure16" => square(10.0, RenderFunction::Gb).with_param(ray(0.248)?),
        "figure17" => square(10.0, RenderFunction::GbTilde).with_param(ray(0.7)?),
        "figure18" => square(10.0, RenderFunction::GbTilde).with_param(ray(0.35)?),
        "figure19" => square(10.0, RenderFunction::GbTilde).with_param(ray(0.248)?),
        "figure20" => {
            square(3.0, RenderFunction::Variant(VariantSelector::GSmall)).with_param(real(0.7)?)
        }
        _ => return Err(Error::Domain(format!("unknown preset '{name}'"))),
    };
    Ok(spec.with_long_side(long_side))
}
