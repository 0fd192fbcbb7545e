use thiserror::Error;

/// Errors produced by the numerical layer.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error in {op}: {message} (got {value})")]
    Domain {
        op: &'static str,
        message: &'static str,
        value: f64,
    },

    /// The law has no finite first absolute moment, so M(t) is undefined.
    #[error("infinite-mean law: E|X| diverges (tail exponent {beta} <= 1)")]
    InfiniteMean { beta: f64 },

    /// H(t) + t M(t) vanished, so G and K are undefined.
    #[error("degenerate law: H(t) + t*M(t) = 0 at t = {t}")]
    DegenerateLaw { t: f64 },

    /// A bracketing search failed to enclose the target value.
    #[error("bracket failure in {op}: could not enclose target {target}")]
    BracketFailure { op: &'static str, target: f64 },

    /// Fixed-point or iterative scheme did not converge within its cap.
    #[error("{op} did not converge after {iterations} iterations (last iterate {last})")]
    NonConvergence {
        op: &'static str,
        iterations: usize,
        last: f64,
    },

    /// A table input (tail table or custom slow-function table) is malformed.
    #[error("invalid table: {0}")]
    Table(String),

    /// A truncation sequence violated the required regularity trend.
    #[error("truncation sequence violates log(c_n/d_n)/LLn -> 0 at n = {n} (value {value})")]
    TruncationTrend { n: u64, value: f64 },

    /// Configuration-level misuse of an operation.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
