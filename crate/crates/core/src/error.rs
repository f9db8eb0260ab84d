use thiserror::Error;

/// Errors surfaced by the simulation and analysis layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("arity {got} out of supported range [{min}, {max}]")]
    ArityOutOfRange { got: usize, min: usize, max: usize },

    #[error("truth table has {got} entries, expected {expected}")]
    TableLength { expected: usize, got: usize },

    #[error("table entry at index {index} is {value}, expected -1 or +1")]
    NonSignEntry { index: usize, value: i64 },

    #[error("majority requires odd arity, got {0}")]
    EvenMajority(usize),

    #[error("dictator coordinate {coord} out of range for arity {arity}")]
    DictatorCoordinate { coord: usize, arity: usize },

    #[error("bit string has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("correlation parameter {0} outside [-1, 1]")]
    CorrelationOutOfRange(f64),

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("exhaustive method limited to arity {max}, got {got}")]
    ExhaustiveTooLarge { got: usize, max: usize },

    #[error("matrix dimension {got} exceeds limit {max}")]
    DimensionTooLarge { got: usize, max: usize },

    #[error("matrix dimensions {0} and {1} do not match")]
    DimensionMismatch(usize, usize),

    #[error("Bloch vector has norm {0} > 1")]
    BlochNormTooLarge(f64),

    #[error("measurement direction has norm {0}, expected a unit vector")]
    NonUnitDirection(f64),

    #[error("matrix is not Hermitian (max deviation {0})")]
    NotHermitian(f64),

    #[error("density matrix has trace {0}, expected 1")]
    BadTrace(f64),

    #[error("density matrix has negative eigenvalue {0}")]
    NotPositive(f64),

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps (off-diagonal {offdiag})")]
    JacobiNoConvergence { sweeps: usize, offdiag: f64 },

    #[error("covering radius {radius} invalid for block length {block_len}")]
    BadCoveringParams { block_len: usize, radius: usize },

    #[error("block length {got} exceeds exhaustive-verification limit {max}")]
    BlockTooLarge { got: usize, max: usize },

    #[error("Krawtchouk arguments out of range: k={k}, n={n}, x={x}")]
    KrawtchoukArgs { k: usize, n: usize, x: usize },

    #[error("input length {0} must be a power of two")]
    NotPowerOfTwo(usize),

    #[error("{divisor} does not divide {value}")]
    Divisibility { divisor: usize, value: usize },

    #[error("enumeration budget exceeded: {needed} terms, limit {limit}")]
    BudgetExceeded { needed: u128, limit: u128 },

    #[error("protocol uses continuous randomness; exact evaluation is unsupported")]
    ContinuousRandomness,

    #[error("sequence is not a member of S_n^k (n={n}, k={k})")]
    BadSequence { n: usize, k: usize },

    #[error("eta {0} must exceed 2 ln 2")]
    EtaTooSmall(f64),

    #[error("derandomized table failed verification after {attempts} attempts (target {target}, slack {slack})")]
    DerandomizationFailed {
        attempts: usize,
        target: f64,
        slack: f64,
    },

    #[error("slack {slack} exceeds target bias {target}")]
    SlackTooLarge { target: f64, slack: f64 },

    #[error("PR box already used by {0}")]
    BoxReuse(&'static str),

    #[error("pyramid must be encoded before decoding")]
    PyramidNotEncoded,

    #[error("pyramid already consumed")]
    PyramidConsumed,

    #[error("database length {got} requires {max} address bits at most, got {bits}")]
    DatabaseTooLarge { got: usize, bits: usize, max: usize },

    #[error("composition {0:?} does not sum to n={1}")]
    BadComposition(Vec<usize>, usize),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
