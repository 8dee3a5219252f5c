use thiserror::Error;

/// Errors raised anywhere in the estimation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("EmptyDesign: at least one axis is required")]
    EmptyDesign,
    #[error("EvenGridSize: grid size {size} on axis {axis} is even; only odd sizes are supported")]
    EvenGridSize { axis: usize, size: usize },
    #[error("GridTooSmall: grid size {size} on axis {axis} is below 3")]
    GridTooSmall { axis: usize, size: usize },
    #[error("NonPositiveSnr: snr must be > 0, got {0}")]
    NonPositiveSnr(f64),
    #[error("UnequalGridSizesForSnr: the SNR parametrization needs a single grid size")]
    UnequalGridSizesForSnr,
    #[error("ComponentCountMismatch: expected {expected} components, got {got}")]
    ComponentCountMismatch { expected: usize, got: usize },
    #[error("NonFiniteComponent: component `{label}` is not finite at x = {x}")]
    NonFiniteComponent { label: String, x: f64 },
    #[error("LatticeTooLarge: {cells} lattice cells exceed the limit of {limit}")]
    LatticeTooLarge { cells: u128, limit: u128 },
    #[error("TensorShapeMismatch: tensor has {got} values, lattice has {expected} cells")]
    TensorShapeMismatch { expected: usize, got: usize },
    #[error("MarginalLengthMismatch: marginals[{axis}] has {got} values, grid size is {expected}")]
    MarginalLengthMismatch { axis: usize, expected: usize, got: usize },
    #[error("EvenLength: transform length {0} is even")]
    EvenLength(usize),
    #[error("NonFiniteInput: value at index {0} is not finite")]
    NonFiniteInput(usize),
    #[error("CutOutOfRange: cut {cut} outside 0..={max}")]
    CutOutOfRange { cut: usize, max: usize },
    #[error("KOutOfRange: k = {k} outside 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("NonPositiveTau2: effective noise variance must be > 0, got {0}")]
    NonPositiveTau2(f64),
    #[error("D0OutOfRange: d0 = {d0} outside 0..={d}")]
    D0OutOfRange { d0: usize, d: usize },
    #[error("EmptyPool: fewer than 2 coefficients available for noise estimation")]
    EmptyPool,
    #[error("ZeroTau: estimated noise level is zero; supply tau2 explicitly")]
    ZeroTau,
    #[error("InconsistentCandidate: {0}")]
    InconsistentCandidate(String),
    #[error("InvalidGamma: gamma must be > 0, got {0}")]
    InvalidGamma(f64),
    #[error("InvalidQ: {name} must lie in (0, 1), got {value}")]
    InvalidQ { name: String, value: f64 },
    #[error("AxisCountMismatch: {what} has {got} entries, design has {expected} axes")]
    AxisCountMismatch { what: &'static str, expected: usize, got: usize },
    #[error("NegativeLambda: lambda must be >= 0, got {0}")]
    NegativeLambda(f64),
    #[error("EmptyGrid: lambda grid is empty")]
    EmptyGrid,
    #[error("UnsortedGrid: lambda grid must be strictly increasing")]
    UnsortedGrid,
    #[error("BadId: test function id {0} is not in 1..=4")]
    BadId(usize),
    #[error("ZeroVariance: cannot standardize a constant vector")]
    ZeroVariance,
    #[error("DesignMismatch: {0}")]
    DesignMismatch(String),
    #[error("SearchSpaceTooLarge: {0}")]
    SearchSpaceTooLarge(String),
    #[error("InvalidScenario: {0}")]
    InvalidScenario(String),
    #[error("InvalidDataset: field `{field}`: {message}")]
    InvalidDataset { field: String, message: String },
    #[error("Io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
