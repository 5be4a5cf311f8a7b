//! Engine-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("malformed input: {0}")]
    MalformedSpec(String),

    #[error("mismatched Lie algebras: `{0}` vs `{1}`")]
    MismatchedAlgebras(String, String),

    #[error("mismatched series shape: {0}")]
    MismatchedShape(String),

    #[error("truncation order {0} is unsupported without externally supplied higher associator coefficients")]
    UnsupportedOrder(usize),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error("unknown marked point `{0}`")]
    UnknownPoint(String),

    #[error("fusion requires two distinct points, got `{0}` twice")]
    SelfFusion(String),

    #[error("points `{0}` and `{1}` carry differently signed actions; re-declare one side first")]
    SignMismatch(String, String),

    #[error("subalgebra is not coisotropic: {0}")]
    NotCoisotropic(String),

    #[error("degree window overflow: {0}; rerun with a larger degree bound")]
    DegreeOverflow(String),

    #[error("invalid program: {0}")]
    InvalidProgram(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),
}
