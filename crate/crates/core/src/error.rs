use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{op}: argument `{field}` = {value} {reason}")]
    Domain {
        op: &'static str,
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error(
        "root bracketing for l={l}, mu_ratio={mu_ratio} isolated {found} of {wanted} roots on ({scan_lo}, {scan_hi})"
    )]
    RootBracketing {
        l: usize,
        mu_ratio: f64,
        found: usize,
        wanted: usize,
        scan_lo: f64,
        scan_hi: f64,
    },

    #[error("degenerate series coefficient at root zeta={root} (l={l}): denominator {denominator:e}")]
    DegenerateCoefficient { l: usize, root: f64, denominator: f64 },

    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },

    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("mesh parse error at line {line}: {reason}")]
    MeshParse { line: usize, reason: String },

    #[error("singular {what} (condition estimate {condition:e})")]
    Singular { what: &'static str, condition: f64 },

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("length mismatch: {what} has {got} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("unknown mode id {0}")]
    UnknownMode(usize),

    #[error("surface field at vertex {vertex} is not tangential (normal fraction {fraction:.3e})")]
    NonTangential { vertex: usize, fraction: f64 },

    #[error("fit window [{lo}, {hi}]: {reason}")]
    Fit { lo: f64, hi: f64, reason: String },
}

impl Error {
    pub(crate) fn domain(op: &'static str, field: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            op,
            field,
            value,
            reason,
        }
    }

    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
