use thiserror::Error;

use crate::conditions::ConditionId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("Riesz map undefined for Banach norm ({0})")]
    RieszUndefined(String),

    #[error("norming vector requested for the zero covector")]
    ZeroCovector,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("point {0:?} lies outside the domain")]
    OutsideDomain(Vec<f64>),

    #[error("could not place a sample in the shrunk domain after {attempts} attempts (rho = {rho}); domain too thin")]
    InfeasibleShrink { rho: f64, attempts: usize },

    #[error("unknown oracle `{0}`")]
    UnknownOracle(String),

    #[error("matrix is not symmetric (|A[{i}][{j}] - A[{j}][{i}]| = {gap})")]
    NonSymmetric { i: usize, j: usize, gap: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("oracle `{0}` has no gradient")]
    MissingGradient(String),

    #[error("non-finite value from oracle `{oracle}` at {x:?}")]
    NonFinite { oracle: String, x: Vec<f64> },

    #[error("condition {condition} is not applicable: {reason}")]
    Inapplicable {
        condition: ConditionId,
        reason: String,
    },

    #[error("unknown condition `{0}`")]
    UnknownCondition(String),

    #[error("no usable sample pairs (all pairs degenerate)")]
    EmptySampleSet,

    #[error("hypothesis range violated: {0}")]
    HypothesisRange(String),

    #[error("hypothesis {condition} not certified at L = {l}: worst margin {worst_margin}")]
    HypothesisNotCertified {
        condition: ConditionId,
        l: f64,
        worst_margin: f64,
    },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("config: {0}")]
    Config(String),
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
