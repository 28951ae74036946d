//! Numerical evaluation of the quantum dilogarithm `G_b(z)`.
//!
//! The crate covers the function itself on the whole plane, its common
//! reparametrisations, the `b → 0` limit towards `Γ`, an identity
//! verification suite and domain-coloring renders.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod cmath;
pub mod compact;
pub mod error;
pub mod gb;
pub mod param;
pub mod quad;
pub mod render;
pub mod trace;
pub mod variants;
pub mod verify;

pub use num_complex::Complex64;

pub use compact::{gamma_reference, gb_product, gb_tilde, qpochhammer, ProductConfig};
pub use error::{Error, Result};
pub use gb::{
    gb, gb_asymptotic, log_gb_strip, residue_inverse_gb, sb, EvaluationResult, GbEvaluator, Method,
    QuadratureConfig, StripKernel,
};
pub use param::{
    classify_point, make_parameter, pole_location, zero_location, zeta_bar, LatticeClassification,
    LatticeKind, ModulusParameter, Regime,
};
pub use render::{
    color_from_log, color_of, hsb_to_rgb, preset, render, write_png, write_png_with_text,
    write_ppm, ColorTriple, ImageBuffer, RenderFunction, RenderOptions, RenderSpec, RenderStats,
};
pub use trace::{family_to_csv, scaled_family, sign_changes, to_csv, trace, TraceKind, TraceRow};
pub use variants::{
    g_small, gamma_hyperbolic, phi_hbar, psi_direct_integral, psi_faddeev,
    ruijsenaars_direct_integral, ruijsenaars_g, v_theta, VariantSelector,
};
pub use verify::{run_verify, SuiteReport, VerifyConfig};
