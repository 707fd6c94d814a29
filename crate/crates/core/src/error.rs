use thiserror::Error;

/// Everything that can go wrong across the crate.
///
/// Variants carry enough context to report the failing object (the factor
/// index, the gamma argument, the polynomial degree) without the caller
/// re-deriving it.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Gamma evaluated at zero or a negative integer.
    #[error("gamma pole at {arg}")]
    Pole { arg: String },

    /// Some factor of the product is zero or infinite at a non-excluded
    /// index, so the product is 0 or undefined rather than a gamma quotient.
    #[error("factor at k = {index} is {}; exclude it or shift the start", if *.is_pole { "a pole" } else { "zero" })]
    ZeroFactor { index: i64, is_pole: bool },

    /// The infinite product fails the convergence criterion.
    #[error("product diverges: {reason}")]
    Diverges { reason: String },

    /// The root finder failed to settle within its iteration budget.
    #[error("root finding did not converge for degree {degree} at {prec} bits")]
    NonConvergence { degree: usize, prec: u32 },

    /// The Padé linear system is singular: the requested diagonal entry of
    /// the table does not exist for this series.
    #[error("Padé table degenerate at order [{n}/{n}]")]
    DegenerateTable { n: usize },

    /// Series terms do not decay fast enough to sum by tail folding.
    #[error("terms decay like k^{gap} with gap {gap} > -2; sum is not accelerable")]
    Summability { gap: i64 },

    /// An argument violates a documented precondition.
    #[error("{0}")]
    Precondition(String),

    /// The discriminant -d is not fundamental, so the form/eta machinery
    /// does not apply.
    #[error("-{d} is not a fundamental discriminant")]
    NotFundamental { d: u64 },

    /// A factor of a finite product is a pole or zero of the function.
    #[error("factor at j = {j} is a pole or zero")]
    PoleOrZero { j: u64 },

    /// The two-precision certification loop could not reach the requested
    /// digit count.
    #[error("could not certify {requested} digits (best agreement {achieved})")]
    Certification { requested: u32, achieved: u32 },

    /// Malformed textual input (CLI-facing parsers).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
