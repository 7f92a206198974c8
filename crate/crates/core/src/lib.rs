//! Exact-arithmetic library for the finite combinatorics of nonabelian
//! Fourier transforms: cyclotomic numbers, finite group machinery with
//! construction-specific character tables, Lusztig pairings on two-sided
//! parameter sets, elliptic pairing theory, and the maximal compact
//! classification attached to affine Dynkin data.
//!
//! All numeric results are exact elements of cyclotomic fields; no floating
//! point is used anywhere.

pub mod affine;
pub mod chars;
pub mod cyc;
pub mod elliptic;
pub mod fourier;
pub mod group;
pub mod padic;
pub mod report;
pub mod sym;

pub use chars::CharTable;
pub use cyc::CycNum;
pub use elliptic::DeltaRep;
pub use group::{FiniteGroup, Word};

use thiserror::Error;

/// Errors surfaced by every fallible operation in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("arithmetic error: {0}")]
    Arithmetic(String),
    #[error("group construction error: {0}")]
    Group(String),
    #[error("character theory error: {0}")]
    Chars(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("size limit exceeded: {0}")]
    TooLarge(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("data integrity error: {0}")]
    Data(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;
