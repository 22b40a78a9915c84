use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{op}: argument outside domain ({detail})")]
    Domain { op: &'static str, detail: String },

    #[error("measured transmission {eta} is inconsistent with the model at kappa = {kappa} (implied aL = {implied_optical_depth})")]
    Inconsistent {
        eta: f64,
        kappa: f64,
        implied_optical_depth: f64,
    },

    #[error("unit mismatch: {0}")]
    UnitMismatch(&'static str),

    #[error("invalid configuration `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    #[error("no interior maximum found in bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("root not bracketed on [{lo}, {hi}] (f = {f_lo}, {f_hi})")]
    NoRoot { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("no convergence after {iterations} iterations in {op}")]
    NoConvergence { op: &'static str, iterations: usize },

    #[error("integrator step underflow at t = {t}: step {step:e}, error estimate {error:e}")]
    StepUnderflow { t: f64, step: f64, error: f64 },

    #[error("state invariant violated: {0}")]
    Invariant(String),

    #[error("slice {index}: {source}")]
    Slice {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            field,
            reason: reason.into(),
        }
    }

    /// True for failures of a numerical procedure (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Bracket { .. }
            | Error::NoRoot { .. }
            | Error::NoConvergence { .. }
            | Error::StepUnderflow { .. }
            | Error::Invariant(_) => true,
            Error::Slice { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
