//! Desk-scale computations with twisted, higher-order and logarithmically
//! dampened spectral triples.
//!
//! The crate is organised bottom-up:
//!
//! * [`words`]: admissible words, free-group boundary points, the κ and ψ
//!   functions behind the Cuntz–Krieger Dirac operator.
//! * [`ck`]: exact Cuntz–Krieger monomial algebra and its action on the
//!   vertex Hilbert space.
//! * [`ops`]: truncated operators, functional calculus, norms and ranks.
//! * [`expsum`] and [`heat`]: exact heat traces as meromorphic functions of
//!   `e^{-Σ s_j}`, their poles, and brute-force oracles.
//! * [`circle`], [`damp`], [`higher_order`]: the circle, Möbius and
//!   Pimsner–Voiculescu models and the dampening transforms.
//! * [`moscovici`]: the residue cochain and the counterexample verdicts.
//! * [`report`] and [`experiments`]: serialisable experiment reports used by
//!   the command-line front end.

pub mod ck;
pub mod circle;
pub mod damp;
pub mod experiments;
pub mod expsum;
pub mod heat;
pub mod higher_order;
pub mod moscovici;
pub mod ops;
pub mod report;
pub mod words;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported model: {0}")]
    Unsupported(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub type Rat = num::BigRational;

pub(crate) fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

pub(crate) fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

pub(crate) fn rat_to_f64(r: &Rat) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
