use thiserror::Error;

/// Errors raised by the algebraic machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("operands live over different generator sets")]
    AlphabetMismatch,

    #[error("operands live over different variable sets")]
    VariableMismatch,

    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("generator `{name}`: {msg}")]
    Degree { name: String, msg: String },

    #[error("line {line}: unknown generator `{name}`")]
    UnknownGenerator { line: usize, name: String },

    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),

    #[error("empty word")]
    EmptyWord,

    #[error("unknown built-in `{0}`")]
    UnknownBuiltin(String),

    #[error("built-in `{0}` carries census data only; no differential is available")]
    CensusOnly(String),

    #[error("weight {requested} exceeds the completeness bound {bound} of the presentation")]
    BeyondCompleteness { requested: u32, bound: u32 },

    #[error("cell (h={hdeg}, w={weight}) needs {size} basis elements, over the budget of {budget}")]
    CellBudget {
        hdeg: i32,
        weight: u32,
        size: usize,
        budget: usize,
    },

    #[error("d^2 != 0 at cell (h={hdeg}, w={weight})")]
    DSquaredNonzero { hdeg: i32, weight: u32 },

    #[error("dimension mismatch at cell (h={hdeg}, w={weight}): {msg}")]
    DimensionMismatch { hdeg: i32, weight: u32, msg: String },

    #[error("non-integer result: {0}")]
    NonInteger(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
