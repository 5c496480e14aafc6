//! Generators for parametric consideration-set families.
//!
//! Every generator returns either a full [`RaumRule`] or an induced
//! dataset; the test suite uses them as constructive oracles — a dataset
//! generated here must be accepted by the feasibility test, and a rule
//! generated here must pass `validate_rule` with both assumptions on.

mod attention;
mod mixture;
mod rational_inattention;
mod satisficing;

pub use attention::{
    check_g_monotone, consideration_eba_exact, consideration_general_exact,
    consideration_logit_exact, gen_attention_index, sample_salience_eta, AttentionIndex, GMap,
    GMonotoneCheck,
};
pub use mixture::{
    correlated_singleton_rule, gen_ram_mixture, gen_rum, logit_marginal, random_marginal,
    random_mixture_rule, random_monotone_attention, AttentionRule,
};
pub use rational_inattention::{
    gen_rational_inattention, ri_consideration_set, ri_stable_marginal, ri_universe, RiParams,
};
pub use satisficing::{gen_satisficing, SatisficingParams, SatisficingSampler, Threshold};

use crate::domain::DomainError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("attention index positivity failed: {0}")]
    Positivity(String),
    #[error("attention rule violates the RAM constraints: {0}")]
    RamViolation(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
}
