//! Domain types: alternatives, menus, preference orders, datasets, rules,
//! and the canonical row/column index maps.

mod dataset;
mod index;
mod order;
mod rule;
mod subset;
mod universe;
mod validate;

pub use dataset::{ChoiceDataset, DATASET_TOL};
pub use index::{Mode, VarIndex};
pub use order::{factorial, PreferenceOrder};
pub use rule::{best, choice_prob, RaumRule, RuleBuilder, MAX_RULE_N, RULE_TOL};
pub use subset::SubsetMask;
pub use universe::{enumerate_orders, enumerate_sets, Universe};
pub use validate::{validate_rule, ValidateOptions, Violation, ViolationReport, VALIDATE_TOL};

#[cfg(test)]
pub(crate) use rule::correlated_singleton_rule;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("invalid universe: {0}")]
    BadUniverse(String),
    #[error("invalid order: {0}")]
    BadOrder(String),
    #[error("invalid dataset: {0}")]
    BadDataset(String),
    #[error("invalid rule: {0}")]
    BadRule(String),
    #[error("empty consideration set")]
    EmptyConsiderationSet,
    #[error("alternative {alt} is not in menu {menu}")]
    AltNotInMenu { alt: String, menu: String },
    #[error("rule and dataset use different universes")]
    UniverseMismatch,
    #[error("order whitelist is empty")]
    EmptyWhitelist,
    #[error("problem too large: {0}")]
    TooLarge(String),
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn best_of_union_comes_from_a_part(
            n in 2usize..=5,
            rank in 0u64..120,
            abits in 1u32..31,
            bbits in 1u32..31,
        ) {
            let rank = rank % factorial(n);
            let full = SubsetMask::full(n).bits();
            let a = SubsetMask::new(abits & full);
            let b = SubsetMask::new(bbits & full);
            prop_assume!(!a.is_empty() && !b.is_empty());
            let order = PreferenceOrder::from_rank(n, rank).unwrap();
            let ba = order.best_in(a).unwrap();
            let bb = order.best_in(b).unwrap();
            let bu = order.best_in(a.union(b)).unwrap();
            prop_assert!(bu == ba || bu == bb);
        }

        #[test]
        fn rank_roundtrip_random(n in 2usize..=8, rank in 0u64..40320) {
            let rank = rank % factorial(n);
            let p = PreferenceOrder::from_rank(n, rank).unwrap();
            let q = PreferenceOrder::from_ranking(p.ranking().to_vec()).unwrap();
            prop_assert_eq!(q.rank(), rank);
        }
    }
}
