//! One-dimensional samples of `S_b` and `G_b` along lines in the plane.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gb::{EvaluationResult, GbEvaluator, QuadratureConfig};
use crate::param::LatticeKind;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceKind {
    /// `S_b(t)` for real `t`.
    SbReal,
    /// `G_b(t)` for real `t`.
    GbReal,
    /// `S_b(Q t)` for real `t`.
    SbScaled,
    /// `G_b(c + it)`.
    GbVertical { c: f64 },
}

impl TraceKind {
    pub fn point(&self, ev: &GbEvaluator, t: f64) -> Complex64 {
        match *self {
            TraceKind::SbReal | TraceKind::GbReal => Complex64::new(t, 0.0),
            TraceKind::SbScaled => ev.param().big_q() * t,
            TraceKind::GbVertical { c } => Complex64::new(c, t),
        }
    }

    fn evaluate(&self, ev: &GbEvaluator, t: f64) -> Result<EvaluationResult> {
        let z = self.point(ev, t);
        match self {
            TraceKind::SbReal | TraceKind::SbScaled => ev.sb(z),
            TraceKind::GbReal | TraceKind::GbVertical { .. } => ev.gb(z),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    /// `None` at poles and zeros.
    pub value: Option<Complex64>,
    /// `ln|f|`; `±∞` at lattice points.
    pub log_abs: f64,
    pub classification: LatticeKind,
    pub order: usize,
}

/// `samples` equally spaced points from `t0` to `t1` inclusive.
pub fn trace(
    ev: &GbEvaluator,
    kind: TraceKind,
    t0: f64,
    t1: f64,
    samples: usize,
) -> Result<Vec<TraceRow>> {
    if samples < 2 || !(t0 < t1) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::Domain(format!(
            "need t0 < t1 and at least 2 samples, got [{t0}, {t1}] with {samples}"
        )));
    }
    let step = (t1 - t0) / (samples - 1) as f64;
    (0..samples)
        .map(|k| {
            let t = if k + 1 == samples {
                t1
            } else {
                t0 + step * k as f64
            };
            let r = kind.evaluate(ev, t)?;
            let regular = r.classification.is_regular();
            Ok(TraceRow {
                t,
                value: regular.then_some(r.value),
                log_abs: r.log_value.re,
                classification: r.classification.kind,
                order: r.classification.order,
            })
        })
        .collect()
}

fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.17e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// CSV with columns `t,re,im,abs,log_abs,classification`; value cells are
/// empty at lattice points. `header` lines are written as `#` comments.
pub fn to_csv(rows: &[TraceRow], header: &[String]) -> String {
    let mut out = String::new();
    for h in header {
        let _ = writeln!(out, "# {h}");
    }
    out.push_str("t,re,im,abs,log_abs,classification\n");
    for r in rows {
        let cls = match r.classification {
            LatticeKind::Regular => "regular".to_string(),
            k => format!("{k}:{}", r.order),
        };
        match r.value {
            Some(v) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    fmt_f64(r.t),
                    fmt_f64(v.re),
                    fmt_f64(v.im),
                    fmt_f64(v.norm()),
                    fmt_f64(r.log_abs),
                    cls
                );
            }
            None => {
                let _ = writeln!(out, "{},,,,{},{}", fmt_f64(r.t), fmt_f64(r.log_abs), cls);
            }
        }
    }
    out
}

/// Indices `k` where the real parts of rows `k` and `k + 1` have opposite signs.
pub fn sign_changes(rows: &[TraceRow]) -> Vec<usize> {
    rows.windows(2)
        .enumerate()
        .filter_map(|(k, w)| match (w[0].value, w[1].value) {
            (Some(a), Some(b)) if a.re * b.re < 0.0 => Some(k),
            _ => None,
        })
        .collect()
}

/// A family of traces with its normalisation recorded rather than applied.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledTrace {
    pub b: f64,
    pub rows: Vec<TraceRow>,
    /// `ln|S_b(Qt)|` at the first sample; dividing by it maps the end
    /// values to `±1`, since `ln S_b(Qt) = -ln S_b(Q(1-t))`.
    pub endpoint_scale: f64,
}

/// `ln|S_b(Qt)|` on the cell centers of `(0, 1)` for each `b`.
pub fn scaled_family(
    bs: &[f64],
    samples: usize,
    cfg: &QuadratureConfig,
) -> Result<Vec<ScaledTrace>> {
    bs.iter()
        .map(|&b| {
            let ev =
                GbEvaluator::new(crate::param::ModulusParameter::real(b)?).with_quadrature(*cfg);
            let h = 1.0 / samples as f64;
            let rows = trace(&ev, TraceKind::SbScaled, 0.5 * h, 1.0 - 0.5 * h, samples)?;
            let endpoint_scale = rows[0].log_abs;
            Ok(ScaledTrace {
                b,
                rows,
                endpoint_scale,
            })
        })
        .collect()
}

/// One CSV for a whole family: a leading `b` column, and the endpoint
/// scale of each member as a `#` comment.
pub fn family_to_csv(family: &[ScaledTrace], header: &[String]) -> String {
    let mut out = String::new();
    for h in header {
        let _ = writeln!(out, "# {h}");
    }
    for tr in family {
        let _ = writeln!(
            out,
            "# endpoint_scale b={}: {}",
            tr.b,
            fmt_f64(tr.endpoint_scale)
        );
    }
    out.push_str("b,t,re,im,abs,log_abs,classification\n");
    for tr in family {
        let body = to_csv(&tr.rows, &[]);
        for line in body.lines().skip(1) {
            let _ = writeln!(out, "{},{line}", tr.b);
        }
    }
    out
}

/// The `b` values `0.1, 0.15, …, 1`.
pub fn scaled_family_parameters() -> Vec<f64> {
    (0..=18).map(|k| (10 + 5 * k) as f64 / 100.0).collect()
}
