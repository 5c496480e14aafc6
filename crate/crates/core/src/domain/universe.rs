//! The grand choice set.

use super::order::{factorial, PreferenceOrder};
use super::subset::SubsetMask;
use super::DomainError;

/// The finite set of alternatives, identified by sorted distinct labels.
///
/// Alternative index = position of its label in the sorted list. Sizes are
/// capped at 8: per-menu behavioral types already number `n! * (2^n - 1)`,
/// which exceeds desk scale well before that.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    labels: Vec<String>,
}

impl Universe {
    pub fn new(mut labels: Vec<String>) -> Result<Self, DomainError> {
        labels.sort();
        if labels.len() < 2 || labels.len() > 8 {
            return Err(DomainError::BadUniverse(format!(
                "need between 2 and 8 alternatives, got {}",
                labels.len()
            )));
        }
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(DomainError::BadUniverse(
                "alternative labels must be distinct".into(),
            ));
        }
        Ok(Universe { labels })
    }

    /// Convenience constructor labelling alternatives "a", "b", ...
    pub fn letters(n: usize) -> Result<Self, DomainError> {
        let labels = (0..n)
            .map(|i| ((b'a' + i as u8) as char).to_string())
            .collect();
        Universe::new(labels)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, alt: u8) -> &str {
        &self.labels[alt as usize]
    }

    pub fn index_of(&self, label: &str) -> Option<u8> {
        self.labels
            .binary_search_by(|l| l.as_str().cmp(label))
            .ok()
            .map(|i| i as u8)
    }

    pub fn full_mask(&self) -> SubsetMask {
        SubsetMask::full(self.n())
    }

    pub fn n_orders(&self) -> u64 {
        factorial(self.n())
    }

    pub fn n_sets(&self) -> usize {
        (1usize << self.n()) - 1
    }

    /// Human-readable set, e.g. `{a,c}`.
    pub fn format_set(&self, set: SubsetMask) -> String {
        let names: Vec<&str> = set.members().map(|a| self.label(a)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Human-readable order, e.g. `a>b>c`.
    pub fn format_order(&self, order: &PreferenceOrder) -> String {
        let names: Vec<&str> = order.ranking().iter().map(|&a| self.label(a)).collect();
        names.join(">")
    }
}

/// All `n!` orders in lexicographic rank order.
pub fn enumerate_orders(universe: &Universe) -> Vec<PreferenceOrder> {
    (0..universe.n_orders())
        .map(|r| PreferenceOrder::from_rank(universe.n(), r).unwrap())
        .collect()
}

/// All `2^n - 1` nonempty subsets in increasing mask value.
pub fn enumerate_sets(universe: &Universe) -> Vec<SubsetMask> {
    (1..=universe.full_mask().bits()).map(SubsetMask::new).collect()
}
