use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not a symplectic similitude")]
    NotSimilitude,
    #[error("matrix is not symplectic within tolerance {tolerance:e} (residual {residual:e})")]
    NotSymplectic { residual: f64, tolerance: f64 },
    #[error("elementary divisors {divisors:?} are not of the form diag(p^a, p^b, p^(r-b), p^(r-a)) for p = {p}")]
    DivisorPattern { p: i64, divisors: [i128; 4] },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("integer overflow in exact arithmetic")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, CoreError>;
