//! Sampling-based checks of gradient-smoothness conditions for convex
//! functions on normed spaces, with constant estimation and an implication
//! matrix between the conditions.

pub mod cli;
pub mod conditions;
pub mod domains;
pub mod error;
pub mod estimation;
pub mod gallery;
pub mod oracles;
pub mod report;
pub mod spaces;

pub use conditions::{ConditionId, ConditionVerdict, Witness};
pub use domains::{ConvexDomain, DomainDescriptor, SamplePair};
pub use error::{Error, Result};
pub use oracles::{FunctionOracle, OracleDescriptor};
pub use spaces::{Covector, NormKind, NormedSpace, SpaceDescriptor};
