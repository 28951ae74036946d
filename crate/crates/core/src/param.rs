//! The modulus `b`, its derived constants, and the pole/zero lattice.
//!
//! `G_b` has zeros at `Q + n b + m/b` and poles at `-n b - m/b` for
//! `n, m >= 0`. Both lattices are generated by the same pair `(b, 1/b)`, so
//! a single scan routine serves both: a pole at `z` is a representation of
//! `-z`, a zero at `z` is a representation of `z - Q`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::cmath::I;
use crate::error::{Error, Result};

/// Default tolerance for lattice detection during evaluation.
pub const DEFAULT_LATTICE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `b` real and positive; `|q| = 1`.
    RealPositive,
    /// `Im(b^2) > 0`; `|q| < 1` and the infinite product converges.
    Compact,
    /// Any other `b` with `Re(b) > 0`.
    GeneralRightHalf,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::RealPositive => "real",
            Regime::Compact => "compact",
            Regime::GeneralRightHalf => "general",
        };
        f.write_str(s)
    }
}

/// The modulus `b` with every derived constant precomputed.
///
/// Immutable after construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusParameter {
    b: Complex64,
    b_inv: Complex64,
    q: Complex64,
    q_tilde: Complex64,
    big_q: Complex64,
    zeta_b: Complex64,
    regime: Regime,
}

impl ModulusParameter {
    pub fn new(b: Complex64) -> Result<Self> {
        if !(b.re.is_finite() && b.im.is_finite()) {
            return Err(Error::Domain(format!("b = {b} is not finite")));
        }
        if b.re <= 0.0 {
            return Err(Error::Domain(format!("b = {b} must have Re(b) > 0")));
        }
        let b_inv = b.inv();
        let b2 = b * b;
        let b_inv2 = b_inv * b_inv;
        let regime = if b.im == 0.0 {
            Regime::RealPositive
        } else if b2.im > 0.0 {
            Regime::Compact
        } else {
            Regime::GeneralRightHalf
        };
        Ok(ModulusParameter {
            b,
            b_inv,
            q: (I * PI * b2).exp(),
            q_tilde: (I * PI * b_inv2).exp(),
            big_q: b + b_inv,
            zeta_b: Self::log_zeta_of(b2, b_inv2).exp(),
            regime,
        })
    }

    pub fn real(b: f64) -> Result<Self> {
        Self::new(Complex64::new(b, 0.0))
    }

    /// `b = r e^{iθ}` with `θ` in radians.
    pub fn polar(r: f64, theta: f64) -> Result<Self> {
        Self::new(Complex64::from_polar(r, theta))
    }

    fn log_zeta_of(b2: Complex64, b_inv2: Complex64) -> Complex64 {
        I * (PI / 4.0) + I * (PI / 12.0) * (b2 + b_inv2)
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn b_inv(&self) -> Complex64 {
        self.b_inv
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn q_tilde(&self) -> Complex64 {
        self.q_tilde
    }

    /// `q^2 = e^{2πi b^2}`, evaluated directly rather than by squaring `q`.
    pub fn q_squared(&self) -> Complex64 {
        (2.0 * PI * I * self.b * self.b).exp()
    }

    pub fn q_tilde_squared(&self) -> Complex64 {
        (2.0 * PI * I * self.b_inv * self.b_inv).exp()
    }

    /// `Q = b + 1/b`.
    pub fn big_q(&self) -> Complex64 {
        self.big_q
    }

    pub fn zeta_b(&self) -> Complex64 {
        self.zeta_b
    }

    /// `ln ζ_b = πi/4 + (πi/12)(b² + b⁻²)`.
    pub fn log_zeta(&self) -> Complex64 {
        Self::log_zeta_of(self.b * self.b, self.b_inv * self.b_inv)
    }

    /// The `Im(z) → +∞` limit of `G_b`. For non-real `b` this is the closed
    /// form with negated exponent, not the complex conjugate of `ζ_b`.
    pub fn zeta_bar(&self) -> Complex64 {
        (-self.log_zeta()).exp()
    }

    pub fn log_zeta_bar(&self) -> Complex64 {
        -self.log_zeta()
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// The parameter `1/b`; `G_b` is invariant under this exchange.
    pub fn dual(&self) -> ModulusParameter {
        ModulusParameter::new(self.b_inv).expect("1/b has positive real part whenever b does")
    }

    /// `ζ_b` computed from the form `e^{(πi/2)((b²+b⁻²)/6 + 1/2)}`.
    pub fn zeta_b_half_angle_form(&self) -> Complex64 {
        let s = self.b * self.b + self.b_inv * self.b_inv;
        (I * (PI / 2.0) * (s / 6.0 + 0.5)).exp()
    }
}

pub fn make_parameter(b: Complex64) -> Result<ModulusParameter> {
    ModulusParameter::new(b)
}

pub fn zeta_bar(param: &ModulusParameter) -> Complex64 {
    param.zeta_bar()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeKind {
    Regular,
    Pole,
    Zero,
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LatticeKind::Regular => "regular",
            LatticeKind::Pole => "pole",
            LatticeKind::Zero => "zero",
        };
        f.write_str(s)
    }
}

/// Where a point sits relative to the pole/zero lattice of `G_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeClassification {
    pub kind: LatticeKind,
    /// Number of `(n, m)` representations found within `tol`.
    pub order: usize,
    pub representations: Vec<(u32, u32)>,
    pub tol: f64,
}

impl LatticeClassification {
    pub fn regular(tol: f64) -> Self {
        LatticeClassification {
            kind: LatticeKind::Regular,
            order: 0,
            representations: Vec::new(),
            tol,
        }
    }

    pub fn is_regular(&self) -> bool {
        self.kind == LatticeKind::Regular
    }

    /// Swaps poles and zeros, as happens under `f ↦ 1/f`.
    pub fn inverted(mut self) -> Self {
        self.kind = match self.kind {
            LatticeKind::Pole => LatticeKind::Zero,
            LatticeKind::Zero => LatticeKind::Pole,
            LatticeKind::Regular => LatticeKind::Regular,
        };
        self
    }
}

impl fmt::Display for LatticeClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} of order {}", self.kind, self.order)?;
        if !self.representations.is_empty() {
            let reps: Vec<String> = self
                .representations
                .iter()
                .map(|(n, m)| format!("({n},{m})"))
                .collect();
            write!(f, " at (n,m) in {{{}}}", reps.join(","))?;
        }
        Ok(())
    }
}

/// All `(n, m)` with `|w - n b - m/b| <= tol`, together with the distance.
///
/// Since `Re(b), Re(1/b) > 0`, the real part of `n b + m/b` grows with both
/// indices, which bounds the scan: `n <= (Re w + tol)/Re b`.
pub(crate) fn lattice_representations(
    param: &ModulusParameter,
    w: Complex64,
    tol: f64,
) -> Vec<(u32, u32, f64)> {
    let mut out = Vec::new();
    if !(w.re.is_finite() && w.im.is_finite()) || w.re < -tol {
        return out;
    }
    let b = param.b();
    let b_inv = param.b_inv();
    let n_max = ((w.re + tol) / b.re).floor() as u64;
    for n in 0..=n_max {
        let r = w - b * n as f64;
        let lo = ((r.re - tol) / b_inv.re).ceil().max(0.0);
        let hi = (r.re + tol) / b_inv.re;
        let mut m = lo;
        while m <= hi {
            let d = (r - b_inv * m).norm();
            if d <= tol {
                out.push((n as u32, m as u32, d));
            }
            m += 1.0;
        }
    }
    out
}

/// Classifies `z` against the zero lattice `Q + nb + m/b` and the pole
/// lattice `-nb - m/b`.
pub fn classify_point(param: &ModulusParameter, z: Complex64, tol: f64) -> LatticeClassification {
    let poles = lattice_representations(param, -z, tol);
    if !poles.is_empty() {
        return LatticeClassification {
            kind: LatticeKind::Pole,
            order: poles.len(),
            representations: poles.iter().map(|&(n, m, _)| (n, m)).collect(),
            tol,
        };
    }
    let zeros = lattice_representations(param, z - param.big_q(), tol);
    if !zeros.is_empty() {
        return LatticeClassification {
            kind: LatticeKind::Zero,
            order: zeros.len(),
            representations: zeros.iter().map(|&(n, m, _)| (n, m)).collect(),
            tol,
        };
    }
    LatticeClassification::regular(tol)
}

/// Distance to the nearest pole or zero, if one lies within `radius`.
pub fn nearest_lattice_distance(
    param: &ModulusParameter,
    z: Complex64,
    radius: f64,
) -> Option<f64> {
    lattice_representations(param, -z, radius)
        .into_iter()
        .chain(lattice_representations(param, z - param.big_q(), radius))
        .map(|(_, _, d)| d)
        .min_by(f64::total_cmp)
}

/// `-n b - m/b`.
pub fn pole_location(param: &ModulusParameter, n: u32, m: u32) -> Complex64 {
    -(param.b() * n as f64 + param.b_inv() * m as f64)
}

/// `Q + n b + m/b`.
pub fn zero_location(param: &ModulusParameter, n: u32, m: u32) -> Complex64 {
    param.big_q() + param.b() * n as f64 + param.b_inv() * m as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_left_half_plane_and_non_finite() {
        assert!(matches!(ModulusParameter::real(0.0), Err(Error::Domain(_))));
        assert!(matches!(
            ModulusParameter::real(-0.7),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            ModulusParameter::new(c(f64::NAN, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            ModulusParameter::new(c(0.0, 1.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn q_values_from_figure_captions() {
        let p = ModulusParameter::real(0.7).unwrap();
        assert!((p.big_q().re - 2.129).abs() < 5e-4);
        let p = ModulusParameter::real(0.248).unwrap();
        assert!((p.big_q().re - 4.280).abs() < 5e-4);
        let p = ModulusParameter::real(1.0).unwrap();
        assert_eq!(p.big_q(), c(2.0, 0.0));
        let expected = Complex64::from_polar(1.0, 5.0 * PI / 12.0);
        assert!((p.zeta_b() - expected).norm() < 1e-15);
    }

    #[test]
    fn regimes() {
        let p = ModulusParameter::polar(0.7, PI / 4.0).unwrap();
        assert_eq!(p.regime(), Regime::Compact);
        assert!(((p.b() * p.b()).im - 0.49).abs() < 1e-15);
        assert_eq!(
            ModulusParameter::real(0.7).unwrap().regime(),
            Regime::RealPositive
        );
        assert_eq!(
            ModulusParameter::polar(0.7, -PI / 5.0).unwrap().regime(),
            Regime::GeneralRightHalf
        );
    }

    #[test]
    fn zeta_forms_agree() {
        for b in [
            c(0.7, 0.0),
            c(0.248, 0.0),
            c(1.0, 0.0),
            c(0.3, 0.4),
            c(2.0, -1.5),
        ] {
            let p = ModulusParameter::new(b).unwrap();
            assert!((p.zeta_b() - p.zeta_b_half_angle_form()).norm() < 1e-14);
        }
    }

    #[test]
    fn real_b_constants() {
        for b in [0.1, 0.248, 0.7, 1.0, 1.9] {
            let p = ModulusParameter::real(b).unwrap();
            assert!((p.zeta_b().norm() - 1.0).abs() < 1e-15);
            assert_eq!(p.big_q().im, 0.0);
            assert!(p.big_q().re >= 2.0);
            assert!((p.zeta_bar() - p.zeta_b().conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn zeta_bar_at_b_07() {
        let p = ModulusParameter::real(0.7).unwrap();
        let zb = p.zeta_bar();
        assert!((zb.re - 0.123).abs() < 5e-4);
        assert!((zb.im + 0.992).abs() < 5e-4);
    }

    #[test]
    fn zeta_bar_at_b_0248_against_independent_digits() {
        // e^{-πi/4 - (πi/12)(b^2 + b^-2)} at b = 0.248, evaluated at 30 digits.
        let p = ModulusParameter::real(0.248).unwrap();
        let zb = p.zeta_bar();
        assert!((zb - c(0.3388879503918524, 0.9408267412649416)).norm() < 1e-13);
    }

    #[test]
    fn q_squared_matches_square_of_q() {
        let p = ModulusParameter::real(0.7).unwrap();
        assert!((p.q_squared() - p.q() * p.q()).norm() < 1e-15);
    }

    #[test]
    fn classify_b1_multiplicities() {
        let p = ModulusParameter::real(1.0).unwrap();
        let cl = classify_point(&p, c(-2.0, 0.0), 1e-9);
        assert_eq!(cl.kind, LatticeKind::Pole);
        assert_eq!(cl.order, 3);
        let mut reps = cl.representations.clone();
        reps.sort();
        assert_eq!(reps, vec![(0, 2), (1, 1), (2, 0)]);
        let cl = classify_point(&p, c(3.0, 0.0), 1e-9);
        assert_eq!(cl.kind, LatticeKind::Zero);
        assert_eq!(cl.order, 2);
    }

    #[test]
    fn classify_regular_and_near_collision() {
        let p = ModulusParameter::real(0.7).unwrap();
        assert!(classify_point(&p, c(0.35, 0.0), 1e-9).is_regular());
        // 2b + 2/b and 4b + 1/b are 0.028 apart: distinct at tol 1e-3.
        let z1 = zero_location(&p, 2, 2);
        let cl = classify_point(&p, z1, 1e-3);
        assert_eq!(cl.kind, LatticeKind::Zero);
        assert_eq!(cl.order, 1);
        assert_eq!(cl.representations, vec![(2, 2)]);
        let cl = classify_point(&p, zero_location(&p, 4, 1), 1e-3);
        assert_eq!(cl.representations, vec![(4, 1)]);
        // At a loose tolerance the two merge.
        let mid = (zero_location(&p, 2, 2) + zero_location(&p, 4, 1)) * 0.5;
        assert_eq!(classify_point(&p, mid, 0.02).order, 2);
    }

    #[test]
    fn classify_exact_lattice_points() {
        for b in [0.7, 0.248, 1.0, 1.3] {
            let p = ModulusParameter::real(b).unwrap();
            for n in 0..=5 {
                for m in 0..=5 {
                    let cl = classify_point(&p, zero_location(&p, n, m), 1e-9);
                    assert_eq!(cl.kind, LatticeKind::Zero);
                    assert!(cl.order >= 1);
                    let cl = classify_point(&p, pole_location(&p, n, m), 1e-9);
                    assert_eq!(cl.kind, LatticeKind::Pole);
                    if b == 0.7 || b == 0.248 {
                        assert_eq!(cl.order, 1, "b={b} n={n} m={m}");
                    }
                }
            }
        }
    }

    #[test]
    fn classify_compact_lattice() {
        let p = ModulusParameter::polar(0.7, PI / 4.0).unwrap();
        let cl = classify_point(&p, zero_location(&p, 2, 1), 1e-9);
        assert_eq!(cl.representations, vec![(2, 1)]);
        assert!(classify_point(&p, c(0.5, 0.5), 1e-9).is_regular());
    }

    #[test]
    fn nearest_distance() {
        let p = ModulusParameter::real(0.7).unwrap();
        let d = nearest_lattice_distance(&p, c(-0.7 + 1e-7, 0.0), 1e-6).unwrap();
        assert!((d - 1e-7).abs() < 1e-15);
        assert!(nearest_lattice_distance(&p, c(0.35, 0.0), 1e-6).is_none());
    }
}
