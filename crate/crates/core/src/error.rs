use thiserror::Error;

/// Errors produced by the arithmetic and numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("d = {0} is not one of the nine class-number-one discriminant parameters")]
    UnknownField(i64),
    #[error("operands belong to different fields ({0} vs {1})")]
    FieldMismatch(i64, i64),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} requires a nonzero element")]
    ZeroElement(&'static str),
    #[error("{0} requires an odd element (coprime to 2)")]
    EvenElement(&'static str),
    #[error("{0} requires a square-free element")]
    NotSquarefree(&'static str),
    #[error("{0} requires a primary element")]
    NotPrimary(&'static str),
    #[error("not a prime: {0}")]
    NotPrime(i64),
    #[error("generator search box missed an ideal of norm {0}; the box bound is wrong")]
    GeneratorNotFound(i64),
    #[error("lattice is not an ideal: {0}")]
    NotAnIdeal(String),
    #[error("the reciprocity fast path needs a norm-Euclidean field, got d = {0}")]
    NotEuclidean(i64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("numerical budget violated: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
