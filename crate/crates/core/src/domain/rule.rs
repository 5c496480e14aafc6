//! Full behavioral rules: per-menu joint distributions over
//! (preference order, consideration set) pairs.

use super::dataset::ChoiceDataset;
use super::order::PreferenceOrder;
use super::subset::SubsetMask;
use super::universe::Universe;
use super::DomainError;

/// Per-menu sums must equal one to within this tolerance at construction.
pub const RULE_TOL: f64 = 1e-9;

/// Dense rules are refused above this size; beyond it a single rule holds
/// hundreds of millions of entries.
pub const MAX_RULE_N: usize = 6;

/// A complete choice rule: for every nonempty menu `A`, a distribution
/// `pi_A` over pairs of a preference order and a consideration set `D`,
/// with `pi_A(order, D) = 0` whenever `D` is not contained in `A`.
///
/// Values are stored densely over all `(menu, order, set)` triples,
/// including menus never observed in any dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct RaumRule {
    universe: Universe,
    values: Vec<f64>,
}

impl RaumRule {
    /// Number of stored values for a universe of size `n`.
    pub fn dense_len(n: usize) -> usize {
        let sets = (1usize << n) - 1;
        sets * sets * super::order::factorial(n) as usize
    }

    /// Strict constructor: enforces range, per-menu normalization at
    /// [`RULE_TOL`], and exact zeros on infeasible `(menu, set)` slots.
    pub fn new(universe: Universe, values: Vec<f64>) -> Result<Self, DomainError> {
        let rule = Self::from_values_unchecked(universe, values)?;
        rule.check_construction()?;
        Ok(rule)
    }

    /// Constructor for solver output: values are clamped into `[0, 1]` and
    /// no normalization check is applied. Callers are expected to run
    /// [`validate_rule`](super::validate::validate_rule) on the result.
    pub fn from_lp_values(universe: Universe, mut values: Vec<f64>) -> Result<Self, DomainError> {
        for v in &mut values {
            *v = v.clamp(0.0, 1.0);
        }
        Self::from_values_unchecked(universe, values)
    }

    fn from_values_unchecked(universe: Universe, values: Vec<f64>) -> Result<Self, DomainError> {
        if universe.n() > MAX_RULE_N {
            return Err(DomainError::TooLarge(format!(
                "dense rules support at most {MAX_RULE_N} alternatives, got {}",
                universe.n()
            )));
        }
        let want = Self::dense_len(universe.n());
        if values.len() != want {
            return Err(DomainError::BadRule(format!(
                "expected {want} values, got {}",
                values.len()
            )));
        }
        Ok(RaumRule { universe, values })
    }

    fn check_construction(&self) -> Result<(), DomainError> {
        let u = &self.universe;
        for menu in u.full_mask().nonempty_subsets() {
            let mut sum = 0.0;
            for rank in 0..u.n_orders() {
                for set in u.full_mask().nonempty_subsets() {
                    let v = self.value(menu, rank, set);
                    if !(0.0..=1.0).contains(&v) {
                        return Err(DomainError::BadRule(format!(
                            "value {v} outside [0,1] at menu {}",
                            u.format_set(menu)
                        )));
                    }
                    if !set.is_subset_of(menu) && v != 0.0 {
                        return Err(DomainError::BadRule(format!(
                            "nonzero mass {v} on consideration set {} infeasible in menu {}",
                            u.format_set(set),
                            u.format_set(menu)
                        )));
                    }
                    sum += v;
                }
            }
            if (sum - 1.0).abs() > RULE_TOL {
                return Err(DomainError::BadRule(format!(
                    "menu {} sums to {sum}, not 1",
                    u.format_set(menu)
                )));
            }
        }
        Ok(())
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    fn index(&self, menu: SubsetMask, order_rank: u64, set: SubsetMask) -> usize {
        let sets = self.universe.n_sets();
        let orders = self.universe.n_orders() as usize;
        ((menu.bits() as usize - 1) * orders + order_rank as usize) * sets
            + (set.bits() as usize - 1)
    }

    /// `pi_menu(order, set)`.
    pub fn value(&self, menu: SubsetMask, order_rank: u64, set: SubsetMask) -> f64 {
        self.values[self.index(menu, order_rank, set)]
    }

    /// Marginal probability of `order` at `menu`: sum over consideration
    /// sets.
    pub fn marginal(&self, menu: SubsetMask, order_rank: u64) -> f64 {
        self.universe
            .full_mask()
            .nonempty_subsets()
            .map(|set| self.value(menu, order_rank, set))
            .sum()
    }

    /// Choice probability of `alt` in `menu` induced by the rule.
    pub fn choice_prob(&self, menu: SubsetMask, alt: u8) -> Result<f64, DomainError> {
        if !menu.contains(alt) {
            return Err(DomainError::AltNotInMenu {
                alt: self.universe.label(alt).to_string(),
                menu: self.universe.format_set(menu),
            });
        }
        let mut p = 0.0;
        for rank in 0..self.universe.n_orders() {
            let order = PreferenceOrder::from_rank(self.universe.n(), rank).unwrap();
            for set in menu.nonempty_subsets() {
                if order.best_in(set).unwrap() == alt {
                    p += self.value(menu, rank, set);
                }
            }
        }
        Ok(p)
    }

    /// The dataset the rule induces on `menus` (all nonempty menus when
    /// `None`).
    pub fn induced_dataset(
        &self,
        menus: Option<&[SubsetMask]>,
    ) -> Result<ChoiceDataset, DomainError> {
        let all: Vec<SubsetMask>;
        let menus = match menus {
            Some(m) => m,
            None => {
                all = self.universe.full_mask().nonempty_subsets().collect();
                &all
            }
        };
        let mut probs = Vec::with_capacity(menus.len());
        for &menu in menus {
            let mut p = vec![0.0; self.universe.n()];
            for alt in menu.members() {
                p[alt as usize] = self.choice_prob(menu, alt)?;
            }
            // Renormalize away accumulated float dust so induced datasets
            // always pass input validation.
            let sum: f64 = p.iter().sum();
            if sum > 0.0 {
                for v in &mut p {
                    *v /= sum;
                }
            }
            probs.push(p);
        }
        ChoiceDataset::new(self.universe.clone(), menus.to_vec(), probs)
    }
}

/// The unique `order`-maximal element of `set`.
pub fn best(order: &PreferenceOrder, set: SubsetMask) -> Result<u8, DomainError> {
    order.best_in(set)
}

/// Free-function form of [`RaumRule::choice_prob`].
pub fn choice_prob(rule: &RaumRule, menu: SubsetMask, alt: u8) -> Result<f64, DomainError> {
    rule.choice_prob(menu, alt)
}

/// Builder for dense rules; generators fill feasible slots and then seal
/// with [`RuleBuilder::finish`].
pub struct RuleBuilder {
    universe: Universe,
    values: Vec<f64>,
}

impl RuleBuilder {
    pub fn new(universe: Universe) -> Result<Self, DomainError> {
        if universe.n() > MAX_RULE_N {
            return Err(DomainError::TooLarge(format!(
                "dense rules support at most {MAX_RULE_N} alternatives, got {}",
                universe.n()
            )));
        }
        let len = RaumRule::dense_len(universe.n());
        Ok(RuleBuilder {
            universe,
            values: vec![0.0; len],
        })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    #[inline]
    pub fn set(&mut self, menu: SubsetMask, order_rank: u64, set: SubsetMask, value: f64) {
        let sets = self.universe.n_sets();
        let orders = self.universe.n_orders() as usize;
        let idx = ((menu.bits() as usize - 1) * orders + order_rank as usize) * sets
            + (set.bits() as usize - 1);
        self.values[idx] = value;
    }

    #[inline]
    pub fn add(&mut self, menu: SubsetMask, order_rank: u64, set: SubsetMask, value: f64) {
        let sets = self.universe.n_sets();
        let orders = self.universe.n_orders() as usize;
        let idx = ((menu.bits() as usize - 1) * orders + order_rank as usize) * sets
            + (set.bits() as usize - 1);
        self.values[idx] += value;
    }

    /// Validate and seal.
    pub fn finish(self) -> Result<RaumRule, DomainError> {
        RaumRule::new(self.universe, self.values)
    }

    /// Seal without the strict construction checks (Monte Carlo rules can
    /// carry values whose menu sums are exact but whose individual entries
    /// come from empirical frequencies).
    pub fn finish_unchecked(self) -> Result<RaumRule, DomainError> {
        RaumRule::from_values_unchecked(self.universe, self.values)
    }
}


#[cfg(test)]
pub use tests::correlated_singleton_rule;
