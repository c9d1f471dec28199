//! Crate error type.

use alloc::string::String;
use core::fmt;

/// Errors produced by constructors and engines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A spec field is malformed or out of range.
    InvalidSpec(String),
    /// A table entry is not finite.
    NonFinite { index: usize },
    /// A table entry that must be positive is not.
    NonPositive { index: usize },
    /// An operation needs a longer truncation than the input provides.
    TruncationTooShort { needed: usize, have: usize },
    /// The conjugate bracket did not close before `t_max`.
    BracketFailed { s: f64, t_max: f64 },
    /// No absorption exponent `H <= h_max` stabilised on the truncation.
    AbsorptionFailed { sigma: f64, best_sup: f64 },
    /// A ratio that must stay bounded grows on the truncation.
    UnboundedRatio { name: &'static str, witness: usize },
    /// The base sequence is not special (`k_{j+1}/k_j` grows).
    NotSpecial { witness: usize },
    /// A precondition on a trend (bounded / vanishing) is violated.
    TrendViolation { name: &'static str },
    /// Derivative order beyond what the function supports.
    OrderUnsupported { order: usize, max_order: usize },
    /// The requested operation only applies to polynomial functions.
    NotPolynomial,
    /// Norm refinement did not converge; carries the last two estimates.
    NormNotConverged { last: f64, previous: f64 },
    /// 2^l term blowup guard in the polarization expansion.
    DegreeTooLarge { degree: usize, max: usize },
    /// Greedy index search exceeded the configured ceiling.
    SearchCeiling { stage: &'static str, ceiling_log2: f64 },
    /// The Beurling-mode rate search could not reach the target; carries the
    /// infimum rate achieved.
    RateSearchFailed { target: f64, achieved: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSpec(msg) => write!(f, "invalid spec: {msg}"),
            Error::NonFinite { index } => write!(f, "non-finite entry at index {index}"),
            Error::NonPositive { index } => write!(f, "non-positive entry at index {index}"),
            Error::TruncationTooShort { needed, have } => {
                write!(f, "truncation too short: need K >= {needed}, have {have}")
            }
            Error::BracketFailed { s, t_max } => {
                write!(f, "conjugate bracket failed to close for s = {s} within t_max = {t_max}")
            }
            Error::AbsorptionFailed { sigma, best_sup } => {
                write!(f, "no absorption exponent stabilised for sigma = {sigma}; best sup {best_sup}")
            }
            Error::UnboundedRatio { name, witness } => {
                write!(f, "{name} is unbounded on the truncation (witness index {witness})")
            }
            Error::NotSpecial { witness } => {
                write!(f, "base sequence is not special (ratio grows at j = {witness})")
            }
            Error::TrendViolation { name } => write!(f, "trend precondition violated: {name}"),
            Error::OrderUnsupported { order, max_order } => {
                write!(f, "derivative order {order} exceeds max_order {max_order}")
            }
            Error::NotPolynomial => write!(f, "operation requires a polynomial function"),
            Error::NormNotConverged { last, previous } => {
                write!(f, "norm refinement did not converge (last {last}, previous {previous})")
            }
            Error::DegreeTooLarge { degree, max } => {
                write!(f, "multi-index degree {degree} exceeds expansion guard {max}")
            }
            Error::SearchCeiling { stage, ceiling_log2 } => {
                write!(f, "index search at stage {stage} exceeded ceiling (log2 ~ {ceiling_log2})")
            }
            Error::RateSearchFailed { target, achieved } => {
                write!(f, "rate search missed target {target}; infimum achieved {achieved}")
            }
        }
    }
}
