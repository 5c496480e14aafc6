//! Testing and partial identification for stochastic choice data under
//! limited consideration.
//!
//! The library decides whether a finite stochastic choice dataset can be
//! generated by a population of decision makers who each draw a preference
//! order and a consideration set, where the marginal over orders is
//! menu-independent (stability) and attention to any fixed set weakly
//! shrinks as menus grow (set-monotonicity). Membership reduces to
//! feasibility of a sparse linear system `G v = g`, `v >= 0`; the same
//! polytope yields sharp bounds on preference marginals, out-of-sample
//! choice probabilities, and the fraction of choosers hurt by inattention.
//!
//! Module map:
//! - [`domain`]: alternatives, menus, orders, datasets, rules, validation.
//! - [`constraints`]: assembly of the sparse system and its text export.
//! - [`lp`]: feasibility / linear objectives / nonnegative projection,
//!   with verified certificates on both answers.
//! - [`analysis`]: the headline procedures built on top of the LP.
//! - [`models`]: generators for known consideration-set families, used as
//!   demos and as constructive oracles in the test suite.
//! - [`io`], [`report`], [`cli`]: file formats and the command-line front
//!   end.

pub mod analysis;
pub mod cli;
pub mod constraints;
pub mod domain;
pub mod io;
pub mod lp;
pub mod models;
pub mod report;

pub use domain::{
    best, choice_prob, enumerate_orders, enumerate_sets, validate_rule, ChoiceDataset,
    DomainError, PreferenceOrder, RaumRule, SubsetMask, Universe, ValidateOptions, Violation,
    ViolationReport,
};
