//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("exponent {0} is not positive")]
    NonPositiveExponent(String),

    #[error("multiplicity must be a positive integer")]
    ZeroMultiplicity,

    #[error("the two Stokes circles are equal")]
    EqualCircles,

    #[error("irregular class is empty")]
    EmptyClass,

    #[error("dimension vector has length {got}, diagram has {want} vertices")]
    DimensionMismatch { got: usize, want: usize },

    #[error("not a graph: {0}")]
    NotAGraph(String),

    #[error("not simply laced: {0}")]
    NotSimplyLaced(String),

    #[error("ultrametric violation on vertex triple ({0}, {1}, {2})")]
    UltrametricViolation(usize, usize, usize),

    #[error("tree is not untwisted: {0}")]
    TwistedTree(String),

    #[error("tree does not match the class: {0}")]
    TreeClassMismatch(String),

    #[error("unknown format `{0}`")]
    UnknownFormat(String),

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("value out of range: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
