//! JSON helpers and error reporting.

use qdilog::{Complex64, Error, LatticeClassification, LatticeKind};
use serde_json::{json, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Finite floats as numbers, the rest as `"inf"`, `"-inf"` or `"nan"`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn cx(z: Complex64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

pub fn classification(c: &LatticeClassification) -> Value {
    if c.kind == LatticeKind::Regular {
        return json!({ "kind": "regular" });
    }
    json!({
        "kind": c.kind.to_string(),
        "order": c.order,
        "representations": c.representations,
    })
}

/// `re+imi` with round-trip precision.
pub fn cx_text(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{:?}-{:?}i", z.re, -z.im)
    } else {
        format!("{:?}+{:?}i", z.re, z.im)
    }
}

pub fn fmt_f64(x: f64) -> String {
    match num(x) {
        Value::String(s) => s,
        v => v.to_string(),
    }
}

pub fn argv() -> Vec<String> {
    std::env::args().collect()
}

#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Usage(String),
    /// Verification ran and at least one suite failed.
    Failed,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Lib(Error::Domain(_)) => "domain",
            CliError::Lib(Error::BranchCut(_)) => "branch_cut",
            CliError::Lib(Error::Degenerate(_)) => "degenerate",
            CliError::Lib(Error::Pole(_)) => "pole",
            CliError::Lib(Error::Convergence { .. }) => "convergence",
            CliError::Lib(Error::NonConvergence { .. }) => "non_convergence",
            CliError::Lib(Error::Io(_)) => "io",
            CliError::Usage(_) => "usage",
            CliError::Failed => "verification_failed",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed => 1,
            CliError::Lib(Error::Convergence { .. } | Error::NonConvergence { .. }) => 3,
            CliError::Lib(Error::Io(_)) => 4,
            _ => 2,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Lib(e) => e.to_string(),
            CliError::Usage(m) => m.clone(),
            CliError::Failed => "one or more suites failed".into(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "kind": self.kind(), "message": self.message() } })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_numbers_are_strings() {
        assert_eq!(num(f64::INFINITY), json!("inf"));
        assert_eq!(num(f64::NEG_INFINITY), json!("-inf"));
        assert_eq!(num(f64::NAN), json!("nan"));
        assert_eq!(num(0.5), json!(0.5));
        assert_eq!(fmt_f64(1e-300), "1e-300");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Lib(Error::Domain("x".into())).exit_code(), 2);
        assert_eq!(
            CliError::Lib(Error::NonConvergence { max_terms: 1 }).exit_code(),
            3
        );
        assert_eq!(CliError::Lib(Error::Io("x".into())).exit_code(), 4);
        assert_eq!(CliError::Failed.exit_code(), 1);
    }

    #[test]
    fn complex_text_round_trips() {
        let z = Complex64::new(0.1, -2.5);
        assert_eq!(crate::complex::parse_complex(&cx_text(z)).unwrap(), z);
    }
}
