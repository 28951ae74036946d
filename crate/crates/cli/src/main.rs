//! `qdilog`: evaluate, trace, render and verify the quantum dilogarithm.

mod complex;
mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qdilog::param::DEFAULT_LATTICE_TOL;
use qdilog::render::DEFAULT_LONG_SIDE;
use qdilog::trace::scaled_family_parameters;
use qdilog::variants::VariantSelector;
use qdilog::{
    Complex64, Error, EvaluationResult, GbEvaluator, LatticeClassification, LatticeKind,
    ModulusParameter, ProductConfig, QuadratureConfig, RenderFunction, RenderOptions, RenderSpec,
    TraceKind,
};

use crate::complex::parse_complex;
use crate::output::{argv, classification, cx, cx_text, fmt_f64, num, CliError, VERSION};

#[derive(Parser, Debug)]
#[command(
    name = "qdilog",
    version,
    about = "Quantum dilogarithm G_b(z) on the complex plane"
)]
struct Cli {
    /// Worker threads for render and verify.
    #[arg(long, global = true, env = "QDILOG_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a function at one or more points.
    Eval(EvalArgs),
    /// Sample a function along a line and write CSV.
    Trace(TraceArgs),
    /// Render a domain-coloring image.
    Render(RenderArgs),
    /// Run the identity verification suite.
    Verify(VerifyArgs),
}

fn complex_arg(s: &str) -> Result<Complex64, String> {
    parse_complex(s)
}

#[derive(Args, Debug, Clone)]
struct NumericArgs {
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Absolute tolerance of the adaptive quadrature.
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    max_subdivisions: Option<usize>,
    /// Height of the integration line.
    #[arg(long)]
    contour_offset: Option<f64>,
    /// Symmetric truncation of the integration line.
    #[arg(long)]
    truncation: Option<f64>,
    /// Tail tolerance of the infinite products.
    #[arg(long)]
    tail_tol: Option<f64>,
    #[arg(long)]
    max_terms: Option<usize>,
    /// Distance below which a point counts as a pole or zero.
    #[arg(long, default_value_t = DEFAULT_LATTICE_TOL)]
    lattice_tol: f64,
}

impl NumericArgs {
    fn quadrature(&self) -> QuadratureConfig {
        let d = QuadratureConfig::default();
        QuadratureConfig {
            contour_offset: self.contour_offset.or(d.contour_offset),
            truncation: self.truncation.or(d.truncation),
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            max_subdivisions: self.max_subdivisions.unwrap_or(d.max_subdivisions),
        }
    }

    fn product(&self) -> ProductConfig {
        let d = ProductConfig::default();
        ProductConfig {
            tail_tol: self.tail_tol.unwrap_or(d.tail_tol),
            max_terms: self.max_terms.unwrap_or(d.max_terms),
            ..d
        }
    }

    fn evaluator(&self, p: ModulusParameter) -> GbEvaluator {
        GbEvaluator::new(p)
            .with_quadrature(self.quadrature())
            .with_product(self.product())
            .with_lattice_tol(self.lattice_tol)
    }

    fn json(&self) -> Value {
        let q = self.quadrature();
        let p = self.product();
        json!({
            "rel_tol": num(q.rel_tol),
            "abs_tol": num(q.abs_tol),
            "max_subdivisions": q.max_subdivisions,
            "contour_offset": q.contour_offset.map(num),
            "truncation": q.truncation.map(num),
            "tail_tol": num(p.tail_tol),
            "max_terms": p.max_terms,
            "lattice_tol": num(self.lattice_tol),
        })
    }
}

fn parameter(b: Option<Complex64>, what: &str) -> Result<ModulusParameter, CliError> {
    let b = b.ok_or_else(|| CliError::Usage(format!("{what} needs --b")))?;
    Ok(ModulusParameter::new(b)?)
}

fn b_json(b: Option<&ModulusParameter>) -> Value {
    b.map_or(Value::Null, |p| cx(p.b()))
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

// ---------------------------------------------------------------- eval

#[derive(Args, Debug)]
struct EvalArgs {
    /// Modulus b, e.g. 0.7, 0.5+0.5i or 0.7@45.
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    b: Option<Complex64>,
    /// gb, sb, gb_tilde, gb_product, g_small, phi_hbar, v_theta, psi,
    /// psi_direct, gamma_hyperbolic, ruijsenaars(a,b),
    /// ruijsenaars_direct(a,b) or gamma.
    #[arg(long = "fn", default_value = "gb")]
    function: String,
    /// Point of evaluation; repeat for several points.
    #[arg(long, required = true, value_parser = complex_arg, allow_hyphen_values = true)]
    z: Vec<Complex64>,
    #[arg(long, value_enum, default_value_t = TableFormat::Json)]
    format: TableFormat,
    #[command(flatten)]
    numeric: NumericArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy)]
enum EvalFn {
    Variant(VariantSelector),
    GbTilde,
    GbProduct,
    PsiDirect,
    RuijsenaarsDirect { a_plus: f64, a_minus: f64 },
    Gamma,
}

impl EvalFn {
    fn parse(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        Ok(match s {
            "gb_tilde" => EvalFn::GbTilde,
            "gb_product" => EvalFn::GbProduct,
            "psi_direct" => EvalFn::PsiDirect,
            "gamma" => EvalFn::Gamma,
            _ => {
                if let Some(rest) = s.strip_prefix("ruijsenaars_direct(") {
                    match format!("ruijsenaars({rest}").parse()? {
                        VariantSelector::RuijsenaarsG { a_plus, a_minus } => {
                            EvalFn::RuijsenaarsDirect { a_plus, a_minus }
                        }
                        _ => unreachable!(),
                    }
                } else {
                    EvalFn::Variant(s.parse()?)
                }
            }
        })
    }

    fn needs_param(&self) -> bool {
        !matches!(
            self,
            EvalFn::Gamma
                | EvalFn::RuijsenaarsDirect { .. }
                | EvalFn::Variant(VariantSelector::RuijsenaarsG { .. })
        )
    }
}

/// One evaluated point, with the fields the direct routes cannot supply left empty.
struct Record {
    z: Complex64,
    value: Complex64,
    log_value: Option<Complex64>,
    err_estimate: Option<f64>,
    method: &'static str,
    classification: Option<LatticeClassification>,
}

impl Record {
    fn from_result(z: Complex64, r: EvaluationResult) -> Self {
        Record {
            z,
            value: r.value,
            log_value: Some(r.log_value),
            err_estimate: Some(r.err_estimate),
            method: r.method.as_str(),
            classification: Some(r.classification),
        }
    }

    fn direct(z: Complex64, value: Complex64, method: &'static str) -> Self {
        Record {
            z,
            value,
            log_value: None,
            err_estimate: None,
            method,
            classification: None,
        }
    }

    fn pole(z: Complex64, c: LatticeClassification, method: &'static str) -> Self {
        Record {
            z,
            value: Complex64::new(f64::INFINITY, 0.0),
            log_value: Some(Complex64::new(f64::INFINITY, 0.0)),
            err_estimate: Some(0.0),
            method,
            classification: Some(c),
        }
    }

    fn lattice_kind(&self) -> LatticeKind {
        self.classification
            .as_ref()
            .map_or(LatticeKind::Regular, |c| c.kind)
    }

    fn abs_arg(&self) -> (f64, f64) {
        match self.lattice_kind() {
            LatticeKind::Pole => (f64::INFINITY, f64::NAN),
            LatticeKind::Zero => (0.0, f64::NAN),
            LatticeKind::Regular => (self.value.norm(), self.value.arg()),
        }
    }

    fn json(&self) -> Value {
        let (abs, arg) = self.abs_arg();
        let value = match self.lattice_kind() {
            LatticeKind::Pole => json!("inf"),
            _ => cx(self.value),
        };
        json!({
            "z": cx(self.z),
            "value": value,
            "abs": num(abs),
            "arg": num(arg),
            "log_value": self.log_value.map(cx),
            "err_estimate": self.err_estimate.map(num),
            "method": self.method,
            "classification": self.classification.as_ref().map_or(json!({"kind": "regular"}), classification),
        })
    }

    fn csv(&self) -> String {
        let (abs, arg) = self.abs_arg();
        let (re, im) = match self.lattice_kind() {
            LatticeKind::Pole => ("inf".to_string(), String::new()),
            _ => (fmt_f64(self.value.re), fmt_f64(self.value.im)),
        };
        let cls = match &self.classification {
            Some(c) if !c.is_regular() => format!("{}:{}", c.kind, c.order),
            _ => "regular".into(),
        };
        format!(
            "{},{},{re},{im},{},{},{},{},{},{cls}",
            fmt_f64(self.z.re),
            fmt_f64(self.z.im),
            fmt_f64(abs),
            fmt_f64(arg),
            self.log_value.map_or(String::new(), |l| fmt_f64(l.re)),
            self.err_estimate.map_or(String::new(), fmt_f64),
            self.method,
        )
    }
}

fn eval_one(
    f: EvalFn,
    ev: Option<&GbEvaluator>,
    args: &EvalArgs,
    z: Complex64,
) -> Result<Record, CliError> {
    let ev = || ev.expect("checked by needs_param");
    let outcome = match f {
        EvalFn::Variant(v @ VariantSelector::RuijsenaarsG { .. }) => {
            let unit = GbEvaluator::new(ModulusParameter::real(1.0)?);
            v.evaluate(&unit, z).map(|r| Record::from_result(z, r))
        }
        EvalFn::Variant(v) => v.evaluate(ev(), z).map(|r| Record::from_result(z, r)),
        EvalFn::GbTilde => qdilog::gb_tilde(ev(), z).map(|r| Record::from_result(z, r)),
        EvalFn::GbProduct => qdilog::gb_product(ev().param(), z, &args.numeric.product())
            .map(|r| Record::from_result(z, r)),
        EvalFn::PsiDirect => {
            qdilog::psi_direct_integral(ev().param(), z, &args.numeric.quadrature())
                .map(|v| Record::direct(z, v, "direct_integral"))
        }
        EvalFn::RuijsenaarsDirect { a_plus, a_minus } => {
            qdilog::ruijsenaars_direct_integral(a_plus, a_minus, z, &args.numeric.quadrature())
                .map(|v| Record::direct(z, v, "direct_integral"))
        }
        EvalFn::Gamma => qdilog::gamma_reference(z).map(|v| Record::direct(z, v, "lanczos")),
    };
    match outcome {
        Ok(r) => Ok(r),
        Err(Error::Pole(c)) => Ok(Record::pole(
            z,
            c,
            if matches!(f, EvalFn::Gamma) {
                "lanczos"
            } else {
                "lattice"
            },
        )),
        Err(e) => Err(e.into()),
    }
}

fn cmd_eval(args: &EvalArgs) -> Result<(), CliError> {
    let f = EvalFn::parse(&args.function)?;
    let param = if f.needs_param() {
        Some(parameter(args.b, &format!("function {}", args.function))?)
    } else {
        None
    };
    let ev = param.map(|p| args.numeric.evaluator(p));
    let records = args
        .z
        .iter()
        .map(|&z| eval_one(f, ev.as_ref(), args, z))
        .collect::<Result<Vec<_>, _>>()?;
    let text = match args.format {
        TableFormat::Json => {
            let doc = json!({
                "schema": "qdilog.eval/1",
                "version": VERSION,
                "command": argv(),
                "function": args.function.trim(),
                "b": b_json(param.as_ref()),
                "tolerances": args.numeric.json(),
                "results": records.iter().map(Record::json).collect::<Vec<_>>(),
            });
            format!(
                "{}\n",
                serde_json::to_string_pretty(&doc).expect("serialisable")
            )
        }
        TableFormat::Csv => {
            let mut out = header_lines(param.as_ref(), &args.numeric);
            out.push_str(&format!("# function: {}\n", args.function.trim()));
            out.push_str("z_re,z_im,re,im,abs,arg,log_abs,err_estimate,method,classification\n");
            for r in &records {
                out.push_str(&r.csv());
                out.push('\n');
            }
            out
        }
    };
    emit(&text, None)
}

fn header_lines(param: Option<&ModulusParameter>, numeric: &NumericArgs) -> String {
    let mut out = format!("# qdilog {VERSION}\n# command: {}\n", argv().join(" "));
    if let Some(p) = param {
        out.push_str(&format!("# b: {}\n", cx_text(p.b())));
    }
    out.push_str(&format!("# tolerances: {}\n", numeric.json()));
    out
}

// --------------------------------------------------------------- trace

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum TraceKindArg {
    /// S_b(t) for real t.
    SbReal,
    /// G_b(t) for real t.
    GbReal,
    /// S_b(Qt) for real t.
    SbScaled,
    /// G_b(c + it).
    GbVertical,
}

#[derive(Args, Debug)]
struct TraceArgs {
    /// figure10, figure11, figure12, figure13, figure14a, figure14b or figure14c.
    #[arg(long, conflicts_with_all = ["b", "kind", "c"])]
    preset: Option<String>,
    /// Modulus b, e.g. 0.7, 0.5+0.5i or 0.7@45.
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    b: Option<Complex64>,
    #[arg(long, value_enum)]
    kind: Option<TraceKindArg>,
    /// Real part of the vertical line; defaults to Q/2.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
    #[arg(long, default_value_t = 1001)]
    samples: usize,
    /// CSV destination; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    numeric: NumericArgs,
}

struct TracePlan {
    b: f64,
    kind: TraceKindArg,
    c: Option<f64>,
    range: Option<(f64, f64)>,
}

fn trace_preset(name: &str) -> Result<Option<TracePlan>, CliError> {
    let plan = |b, kind, c| TracePlan {
        b,
        kind,
        c,
        range: None,
    };
    let q07 = ModulusParameter::real(0.7)?.big_q().re;
    let vertical = |c| TracePlan {
        range: Some((-5.0, 5.0)),
        ..plan(0.7, TraceKindArg::GbVertical, Some(c))
    };
    Ok(Some(match name {
        "figure10" | "sb-0.7" => plan(0.7, TraceKindArg::SbReal, None),
        "figure11" | "sb-0.248" => plan(0.248, TraceKindArg::SbReal, None),
        "figure12" | "sb-0.1" => plan(0.1, TraceKindArg::SbReal, None),
        "figure13" | "sb-scaled-family" => return Ok(None),
        "figure14a" | "gb-i" => vertical(0.0),
        "figure14b" | "gb-half-q" => vertical(q07 / 2.0),
        "figure14c" | "gb-q" => vertical(q07),
        _ => return Err(CliError::Usage(format!("unknown trace preset '{name}'"))),
    }))
}

fn cmd_trace(args: &TraceArgs) -> Result<(), CliError> {
    let plan = match &args.preset {
        Some(name) => match trace_preset(name)? {
            Some(p) => Some(p),
            None => return trace_family(args),
        },
        None => None,
    };
    let (param, kind_arg, c, preset_range) = match plan {
        Some(p) => (ModulusParameter::real(p.b)?, p.kind, p.c, p.range),
        None => {
            let kind = args
                .kind
                .ok_or_else(|| CliError::Usage("trace needs --preset or --kind".into()))?;
            (parameter(args.b, "trace")?, kind, args.c, None)
        }
    };
    let q = param.big_q().re;
    let kind = match kind_arg {
        TraceKindArg::SbReal => TraceKind::SbReal,
        TraceKindArg::GbReal => TraceKind::GbReal,
        TraceKindArg::SbScaled => TraceKind::SbScaled,
        TraceKindArg::GbVertical => TraceKind::GbVertical {
            c: c.unwrap_or(q / 2.0),
        },
    };
    let (d0, d1) = preset_range.unwrap_or(match kind_arg {
        TraceKindArg::SbReal | TraceKindArg::GbReal => (-2.0 * q, 3.0 * q),
        TraceKindArg::SbScaled => (0.0, 1.0),
        TraceKindArg::GbVertical => (-5.0, 5.0),
    });
    let (t0, t1) = (args.from.unwrap_or(d0), args.to.unwrap_or(d1));
    let ev = args.numeric.evaluator(param);
    let rows = qdilog::trace(&ev, kind, t0, t1, args.samples)?;
    let mut header = vec![
        format!("qdilog {VERSION}"),
        format!("command: {}", argv().join(" ")),
        format!("b: {}", cx_text(param.b())),
        format!("kind: {kind:?}"),
        format!(
            "range: [{}, {}] samples: {}",
            fmt_f64(t0),
            fmt_f64(t1),
            args.samples
        ),
        format!("tolerances: {}", args.numeric.json()),
    ];
    let flips = qdilog::sign_changes(&rows);
    header.push(format!("sign_changes: {}", flips.len()));
    emit(&qdilog::to_csv(&rows, &header), args.output.as_deref())
}

fn trace_family(args: &TraceArgs) -> Result<(), CliError> {
    let bs = scaled_family_parameters();
    let cfg = args.numeric.quadrature();
    let family = qdilog::scaled_family(&bs, args.samples, &cfg)?;
    let header = vec![
        format!("qdilog {VERSION}"),
        format!("command: {}", argv().join(" ")),
        "kind: SbScaled family on cell centers of (0, 1)".to_string(),
        "values are not rescaled; divide log_abs by endpoint_scale to map the ends to +-1"
            .to_string(),
        format!("samples: {}", args.samples),
        format!("tolerances: {}", args.numeric.json()),
    ];
    emit(
        &qdilog::family_to_csv(&family, &header),
        args.output.as_deref(),
    )
}

// -------------------------------------------------------------- render

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum ImageFormat {
    Png,
    Ppm,
}

#[derive(Args, Debug)]
struct RenderArgs {
    /// A named figure, e.g. figure6 or gb-0.7.
    #[arg(long, conflicts_with_all = ["function", "b", "xmin", "xmax", "ymin", "ymax"])]
    preset: Option<String>,
    /// identity, reciprocal, cube, exp, gamma, gb, sb, gb_tilde or a variant name.
    #[arg(long = "fn")]
    function: Option<String>,
    /// Modulus b, e.g. 0.7, 0.5+0.5i or 0.7@45.
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    b: Option<Complex64>,
    #[arg(long, allow_hyphen_values = true)]
    xmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    xmax: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    ymin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    ymax: Option<f64>,
    #[arg(long)]
    width: Option<u32>,
    #[arg(long)]
    height: Option<u32>,
    /// Pixels along the longer side when width and height are not both given.
    #[arg(long, default_value_t = DEFAULT_LONG_SIDE)]
    long_side: u32,
    /// Average 2x2 samples per pixel.
    #[arg(long)]
    supersample: bool,
    /// Use adaptive quadrature for every pixel instead of the fixed kernel.
    #[arg(long)]
    no_kernel: bool,
    /// Image path; the run metadata goes next to it with `.json` appended.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ImageFormat::Png)]
    format: ImageFormat,
    #[command(flatten)]
    numeric: NumericArgs,
}

fn render_spec(args: &RenderArgs) -> Result<(RenderSpec, String), CliError> {
    let mut spec = if let Some(name) = &args.preset {
        qdilog::preset(name, args.long_side)?
    } else {
        let name = args
            .function
            .as_deref()
            .ok_or_else(|| CliError::Usage("render needs --preset or --fn".into()))?;
        let function: RenderFunction = name.parse()?;
        let rect = [args.xmin, args.xmax, args.ymin, args.ymax];
        let [Some(x0), Some(x1), Some(y0), Some(y1)] = rect else {
            return Err(CliError::Usage(
                "--fn needs --xmin, --xmax, --ymin and --ymax".into(),
            ));
        };
        let mut spec = RenderSpec::new([x0, x1, y0, y1], 1, 1, function);
        if let Some(b) = args.b {
            spec = spec.with_param(ModulusParameter::new(b)?);
        }
        spec.validate()?;
        spec.with_long_side(args.long_side)
    };
    let aspect = (spec.y_max - spec.y_min) / (spec.x_max - spec.x_min);
    match (args.width, args.height) {
        (Some(w), Some(h)) => (spec.width, spec.height) = (w, h),
        (Some(w), None) => {
            (spec.width, spec.height) = (w, ((w as f64 * aspect).round() as u32).max(1))
        }
        (None, Some(h)) => {
            (spec.width, spec.height) = (((h as f64 / aspect).round() as u32).max(1), h)
        }
        (None, None) => {}
    }
    spec.supersample = args.supersample;
    spec.validate()?;
    let stem = args
        .preset
        .clone()
        .unwrap_or_else(|| spec.function.to_string().replace(['(', ')', ','], "_"));
    Ok((spec, stem))
}

fn cmd_render(args: &RenderArgs, threads: Option<usize>) -> Result<(), CliError> {
    let (spec, stem) = render_spec(args)?;
    let ext = match args.format {
        ImageFormat::Png => "png",
        ImageFormat::Ppm => "ppm",
    };
    let path = args
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{stem}.{ext}")));
    let opts = RenderOptions {
        quadrature: args.numeric.quadrature(),
        product: args.numeric.product(),
        threads,
        kernel: !args.no_kernel,
    };
    let (img, stats) = qdilog::render(&spec, &opts)?;
    let meta = json!({
        "schema": "qdilog.render/1",
        "version": VERSION,
        "command": argv(),
        "image": path.display().to_string(),
        "spec": {
            "function": spec.function.to_string(),
            "preset": args.preset,
            "b": b_json(spec.param.as_ref()),
            "x_min": num(spec.x_min),
            "x_max": num(spec.x_max),
            "y_min": num(spec.y_min),
            "y_max": num(spec.y_max),
            "width": spec.width,
            "height": spec.height,
            "supersample": spec.supersample,
        },
        "options": {
            "kernel": opts.kernel,
            "tolerances": args.numeric.json(),
        },
        "stats": {
            "failures": stats.failures,
            "poles": stats.poles,
            "zeros": stats.zeros,
        },
    });
    match args.format {
        ImageFormat::Png => {
            let text = [
                ("Software".to_string(), format!("qdilog {VERSION}")),
                ("Description".to_string(), describe(&spec)),
                ("qdilog:command".to_string(), argv().join(" ")),
                ("qdilog:metadata".to_string(), meta.to_string()),
            ];
            qdilog::write_png_with_text(&img, &path, &text)?;
        }
        ImageFormat::Ppm => qdilog::write_ppm(&img, &path)?,
    }
    let mut sidecar = path.clone().into_os_string();
    sidecar.push(".json");
    let pretty = format!(
        "{}\n",
        serde_json::to_string_pretty(&meta).expect("serialisable")
    );
    fs::write(&sidecar, &pretty)?;
    emit(&pretty, None)
}

fn describe(spec: &RenderSpec) -> String {
    let b = spec
        .param
        .map(|p| format!(" at b = {}", cx_text(p.b())))
        .unwrap_or_default();
    format!(
        "{}{b} on [{}, {}] x [{}, {}]",
        spec.function,
        fmt_f64(spec.x_min),
        fmt_f64(spec.x_max),
        fmt_f64(spec.y_min),
        fmt_f64(spec.y_max)
    )
}

// -------------------------------------------------------------- verify

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum ReportFormat {
    Table,
    Json,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Parameter to check; repeat for several. Defaults to 0.7, 0.248, 1 and 0.7@45.
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    b: Vec<Complex64>,
    /// Replace every suite's threshold.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Random points per suite.
    #[arg(long)]
    points: Option<usize>,
    /// Skip the parameter-free suites.
    #[arg(long)]
    no_global: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    format: ReportFormat,
}

fn cmd_verify(args: &VerifyArgs, threads: Option<usize>) -> Result<(), CliError> {
    let mut cfg = qdilog::VerifyConfig::default();
    if !args.b.is_empty() {
        cfg.params = args
            .b
            .iter()
            .map(|&b| ModulusParameter::new(b))
            .collect::<qdilog::Result<_>>()?;
    }
    cfg.threshold_override = args.threshold;
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.random_points = args.points.unwrap_or(cfg.random_points);
    cfg.include_global = !args.no_global;
    let reports = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?
            .install(|| qdilog::run_verify(&cfg)),
        None => qdilog::run_verify(&cfg),
    };
    let all_passed = reports.iter().all(|r| r.passed);
    let text = match args.format {
        ReportFormat::Json => {
            let doc = json!({
                "schema": "qdilog.verify/1",
                "version": VERSION,
                "command": argv(),
                "seed": cfg.seed,
                "points": cfg.random_points,
                "threshold_override": cfg.threshold_override.map(num),
                "passed": all_passed,
                "suites": reports.iter().map(|r| json!({
                    "suite": r.suite,
                    "b": r.b.map(cx),
                    "max_residual": num(r.max_residual),
                    "threshold": num(r.threshold),
                    "passed": r.passed,
                    "note": r.note,
                })).collect::<Vec<_>>(),
            });
            format!(
                "{}\n",
                serde_json::to_string_pretty(&doc).expect("serialisable")
            )
        }
        ReportFormat::Table => {
            let mut out = format!("# qdilog {VERSION}\n# command: {}\n", argv().join(" "));
            out.push_str(&format!(
                "# seed: {} points: {}\n",
                cfg.seed, cfg.random_points
            ));
            out.push_str(&format!(
                "{:<20} {:<20} {:>10} {:>10}  {:<6} note\n",
                "suite", "b", "residual", "threshold", "result"
            ));
            for r in &reports {
                let b =
                    r.b.map_or("-".to_string(), |b| format!("{:.6}{:+.6}i", b.re, b.im));
                out.push_str(&format!(
                    "{:<20} {:<20} {:>10.3e} {:>10.1e}  {:<6} {}\n",
                    r.suite,
                    b,
                    r.max_residual,
                    r.threshold,
                    if r.passed { "PASS" } else { "FAIL" },
                    r.note
                ));
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            out.push_str(&format!("# {} suites, {failed} failed\n", reports.len()));
            out
        }
    };
    emit(&text, None)?;
    if all_passed {
        Ok(())
    } else {
        Err(CliError::Failed)
    }
}

// ---------------------------------------------------------------- main

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Trace(a) => cmd_trace(a),
        Command::Render(a) => cmd_render(a, cli.threads),
        Command::Verify(a) => cmd_verify(a, cli.threads),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let kind = match e.kind() {
                ErrorKind::ValueValidation | ErrorKind::InvalidValue => "parse",
                _ => "usage",
            };
            let msg = e.render().to_string();
            eprintln!(
                "{}",
                json!({ "error": { "kind": kind, "message": msg.trim() } })
            );
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
