use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("duplicate point {0} in quadruple")]
    DuplicatePoint(String),
    #[error("({0}, {1}) is not in the fundamental domain")]
    OutsideDomain(String, String),
    #[error("matrix determinant is {0}, expected 1")]
    Determinant(i64),
    #[error("quadruple {0} does not have the canonical (0,t1),(r,t2),(r,t3),(r4,t4) shape")]
    Shape(String),
    #[error("identity point has no finite x-coordinate / vanishing theta value")]
    IdentityPoint,
    #[error("scale {scale} cannot represent exponent {exponent}")]
    Scale { scale: u32, exponent: String },
    #[error("series is numerically zero; cannot invert")]
    ZeroSeries,
    #[error("cannot invert a series without finite precision")]
    UnboundedPrecision,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("|q| must be < 1, got {0}")]
    OutsideDisc(f64),
    #[error("root finder did not converge for degree {0} polynomial")]
    NoConvergence(usize),
    #[error("convention check failed: {0}")]
    Convention(String),
}

pub type Result<T> = std::result::Result<T, Error>;
