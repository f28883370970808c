use thiserror::Error;

/// Errors produced by the exact-arithmetic and expansion machinery.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("division by zero in Q(zeta_{modulus})")]
    DivisionByZero { modulus: u64 },

    #[error("{lambda} is not a unit modulo {modulus}")]
    NotAUnit { lambda: u64, modulus: u64 },

    #[error("modulus {target} is not a multiple of {base}")]
    NotAMultiple { base: u64, target: u64 },

    #[error("element of Q(zeta_{modulus}) does not lie in Q(zeta_{target})")]
    NotInSubfield { modulus: u64, target: u64 },

    #[error("width mismatch: {left} vs {right}")]
    WidthMismatch { left: u64, right: u64 },

    #[error("precision {given} below required {required}")]
    PrecisionTooLow { given: usize, required: usize },

    #[error("matrix error: {0}")]
    BadMatrix(String),

    #[error("character error: {0}")]
    BadCharacter(String),

    #[error("invalid input: {0}")]
    BadInput(String),

    #[error("input is not modular of the declared type: {0}")]
    NotModular(String),

    #[error("basis saturation failed: {0}")]
    Saturation(String),

    #[error("weight-1 not in the Eisenstein span: expansion of weight-1 forms is unsupported")]
    WeightOne,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Inapplicable(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
