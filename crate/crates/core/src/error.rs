use thiserror::Error;

use crate::model::InvolutionCase;

pub type Result<T> = std::result::Result<T, HetError>;

/// Every failure the library can report. Variants that describe where a
/// track leaves a domain carry the data needed by censuses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HetError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("level curve value a_c = {a:e} has the wrong sign for the transit map")]
    WrongSideOfCylinder { a: f64 },

    #[error("transit undefined at eta = 0 (point on the separatrix)")]
    EtaZero,

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("strip index {k} must exceed k0 = {k0}")]
    KBelowThreshold { k: i64, k0: i64 },

    #[error("track leaves the transit domain at tau = {tau:e}")]
    DomainExit { tau: f64 },

    #[error("no sign change on [{lo:e}, {hi:e}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("no bracket: {0}")]
    NoBracket(String),

    #[error("degenerate tangency: |second derivative| = {second:e} < {tol:e}")]
    DegenerateTangency { second: f64, tol: f64 },

    #[error("genericity condition fails: {0}")]
    Genericity(String),

    #[error("scenario requires {expected:?}, spec declares {found:?}")]
    CaseMismatch {
        expected: InvolutionCase,
        found: InvolutionCase,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl HetError {
    /// True for errors that mean "the point is outside the transit map's
    /// domain" rather than a numerical failure.
    pub fn is_transit_exit(&self) -> bool {
        matches!(
            self,
            HetError::WrongSideOfCylinder { .. } | HetError::EtaZero
        )
    }
}
