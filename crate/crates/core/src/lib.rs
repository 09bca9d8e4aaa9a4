//! Optimal targets of `W^m X` for generalized Lorentz–Zygmund (GLZ) spaces `X`,
//! worked on the representation interval `(0,1)`.
//!
//! The crate has two halves that check each other:
//!
//! * a symbolic half ([`logpower`], [`space`], [`oracle`]) that classifies
//!   optimal targets by exact dispatch on rational parameters and re-derives
//!   every answer from head/tail norms of the kernel
//!   `Ψ(s) = s^{λ−1/q′} ℓ^{−α}(s) ℓℓ^{−β}(s)`;
//! * a numeric half ([`rearrange`], [`quadrature`], [`verify`]) that evaluates
//!   the same norms by quadrature and compares them with the symbolic forms
//!   on a dyadic grid of radii.
//!
//! Throughout, `ℓ(s) = 1+|log s|`, `ℓℓ = 1+log ℓ`, `ℓℓℓ = 1+log ℓℓ`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod logpower;
pub mod oracle;
pub mod quadrature;
pub mod rational;
pub mod rearrange;
pub mod space;
pub mod sweep;
pub mod verify;

pub use logpower::{
    campanato_to_morrey_transform, dini_integrable, ell_chain, spanne_transform, symbolic_head_norm,
    symbolic_tail_norm, Comparison, Limit, LogPowerForm, PsiParams,
};

pub use oracle::{classify, Classification, EmbeddingQuery, Payload, SpaceComparison, Table, TargetReport};
pub use quadrature::{
    fundamental_function_numeric, glz_norm_numeric, weighted_lq_norm, NormResult, NormValue, QuadratureConfig,
    WeightedIntegrand,
};
pub use rational::{parse_q, q, qi, ExtendedRational, Q};
pub use rearrange::{Piecewise, StepFunction};
pub use space::{
    associate, canonical, fundamental_function_symbolic, validate, SpaceDescriptor, SpaceKind, ValidationResult,
    ValidationStatus,
};
pub use verify::{VerificationReport, VerifyConfig};

/// Errors shared by every module.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("divergent form has no finite value")]
    DivergentForm,
    #[error("three-log {0} norm only defined for the iterated-log lemma parameters")]
    ThreeLogPattern(&'static str),
    #[error("associate not tabulated: {0}")]
    NotTabulated(String),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("outside symbolic coverage: {0}")]
    Uncovered(String),
    #[error("quadrature did not converge (best estimate {best})")]
    Quadrature { best: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
