//! Mixtures of single-order attention rules under a common marginal.
//!
//! Each preference order carries its own attention rule `lambda`: a
//! per-menu distribution over feasible consideration sets that weakly
//! shrinks along cover pairs. Mixing with any marginal over orders gives a
//! rule that is stable by construction and set-monotone exactly when every
//! component is. Full attention as the component rule recovers classic
//! random-utility behavior.

use super::attention::validate_marginal;
use super::ModelError;
use crate::domain::{
    enumerate_orders, factorial, PreferenceOrder, RaumRule, RuleBuilder, SubsetMask, Universe,
};
use rand::Rng;

/// A single-order attention rule `lambda`: values indexed by
/// `(menu, consideration set)`, dense over all nonempty sets.
#[derive(Clone, Debug)]
pub struct AttentionRule {
    universe: Universe,
    values: Vec<f64>,
}

impl AttentionRule {
    /// Validates the three constraints a component rule must satisfy:
    /// per-menu normalization, zero mass on infeasible sets, and
    /// cover-pair monotonicity.
    pub fn new(universe: Universe, values: Vec<f64>) -> Result<Self, ModelError> {
        let n_sets = universe.n_sets();
        if values.len() != n_sets * n_sets {
            return Err(ModelError::BadParams(format!(
                "expected {} attention values, got {}",
                n_sets * n_sets,
                values.len()
            )));
        }
        let rule = AttentionRule { universe, values };
        rule.check_ram()?;
        Ok(rule)
    }

    fn check_ram(&self) -> Result<(), ModelError> {
        let u = &self.universe;
        let full = u.full_mask();
        for menu in full.nonempty_subsets() {
            let mut sum = 0.0;
            for set in full.nonempty_subsets() {
                let v = self.value(menu, set);
                if !(0.0..=1.0 + 1e-12).contains(&v) {
                    return Err(ModelError::RamViolation(format!(
                        "lambda({}, {}) = {v} outside [0,1]",
                        u.format_set(menu),
                        u.format_set(set)
                    )));
                }
                if !set.is_subset_of(menu) && v != 0.0 {
                    return Err(ModelError::RamViolation(format!(
                        "feasibility: lambda({}, {}) = {v} but the set is not in the menu",
                        u.format_set(menu),
                        u.format_set(set)
                    )));
                }
                sum += v;
            }
            if (sum - 1.0).abs() > 1e-9 {
                return Err(ModelError::RamViolation(format!(
                    "normalization: menu {} sums to {sum}",
                    u.format_set(menu)
                )));
            }
            for x in full.minus(menu).members() {
                let larger = menu.with(x);
                for set in menu.nonempty_subsets() {
                    let small = self.value(menu, set);
                    let big = self.value(larger, set);
                    if small < big - 1e-12 {
                        return Err(ModelError::RamViolation(format!(
                            "set-monotonicity: lambda({}, {}) = {small} < {big} = lambda({}, {})",
                            u.format_set(menu),
                            u.format_set(set),
                            u.format_set(larger),
                            u.format_set(set),
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Deterministic full attention: `lambda(A, A) = 1`.
    pub fn full_attention(universe: Universe) -> Self {
        let n_sets = universe.n_sets();
        let mut values = vec![0.0; n_sets * n_sets];
        for menu in universe.full_mask().nonempty_subsets() {
            values[(menu.bits() as usize - 1) * n_sets + (menu.bits() as usize - 1)] = 1.0;
        }
        AttentionRule { universe, values }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    #[inline]
    pub fn value(&self, menu: SubsetMask, set: SubsetMask) -> f64 {
        let n_sets = self.universe.n_sets();
        self.values[(menu.bits() as usize - 1) * n_sets + (set.bits() as usize - 1)]
    }

    fn set_value(&mut self, menu: SubsetMask, set: SubsetMask, v: f64) {
        let n_sets = self.universe.n_sets();
        self.values[(menu.bits() as usize - 1) * n_sets + (set.bits() as usize - 1)] = v;
    }
}

/// Mix one attention rule per order under a marginal:
/// `pi_A(order, D) = lambda_order(A, D) * marginal(order)`.
pub fn gen_ram_mixture(
    universe: &Universe,
    marginal: &[f64],
    rules: &[AttentionRule],
) -> Result<RaumRule, ModelError> {
    let n_orders = universe.n_orders() as usize;
    validate_marginal(marginal, n_orders)?;
    if rules.len() != n_orders {
        return Err(ModelError::BadParams(format!(
            "need one attention rule per order ({n_orders}), got {}",
            rules.len()
        )));
    }
    for rule in rules {
        if rule.universe() != universe {
            return Err(ModelError::BadParams(
                "attention rule universe mismatch".into(),
            ));
        }
    }
    let mut builder = RuleBuilder::new(universe.clone())?;
    for menu in universe.full_mask().nonempty_subsets() {
        for (rank, rule) in rules.iter().enumerate() {
            let w = marginal[rank];
            if w == 0.0 {
                continue;
            }
            for set in menu.nonempty_subsets() {
                let v = rule.value(menu, set);
                if v != 0.0 {
                    builder.set(menu, rank as u64, set, v * w);
                }
            }
        }
    }
    Ok(builder.finish()?)
}

/// Classic random utility: full attention under the given marginal.
pub fn gen_rum(universe: &Universe, marginal: &[f64]) -> Result<RaumRule, ModelError> {
    let rules: Vec<AttentionRule> = (0..universe.n_orders())
        .map(|_| AttentionRule::full_attention(universe.clone()))
        .collect();
    gen_ram_mixture(universe, marginal, &rules)
}

/// A random set-monotone attention rule built by sequential cover-pair
/// shrinking: singleton menus attend to themselves; every larger menu
/// draws each carried-over set's weight below the minimum over its cover
/// parents and dumps the remainder on the menu itself.
pub fn random_monotone_attention<R: Rng + ?Sized>(
    universe: &Universe,
    rng: &mut R,
) -> AttentionRule {
    let n = universe.n();
    let full = universe.full_mask();
    let mut rule = AttentionRule {
        universe: universe.clone(),
        values: vec![0.0; universe.n_sets() * universe.n_sets()],
    };
    let mut menus: Vec<SubsetMask> = full.nonempty_subsets().collect();
    menus.sort_by_key(|m| (m.len(), m.bits()));
    for menu in menus {
        if menu.len() == 1 {
            rule.set_value(menu, menu, 1.0);
            continue;
        }
        let _ = n;
        let mut drawn: Vec<(SubsetMask, f64)> = Vec::new();
        let mut total = 0.0;
        for set in menu.nonempty_subsets() {
            if set == menu {
                continue;
            }
            let cap = menu
                .minus(set)
                .members()
                .map(|x| rule.value(menu.minus(SubsetMask::singleton(x)), set))
                .fold(f64::INFINITY, f64::min);
            let r = rng.gen_range(0.0..=1.0) * cap;
            drawn.push((set, r));
            total += r;
        }
        if total > 1.0 {
            let scale = rng.gen_range(0.0..1.0) / total;
            for (_, r) in &mut drawn {
                *r *= scale;
            }
            total = drawn.iter().map(|&(_, r)| r).sum();
        }
        for (set, r) in drawn {
            rule.set_value(menu, set, r);
        }
        rule.set_value(menu, menu, (1.0 - total).max(0.0));
    }
    debug_assert!(rule.check_ram().is_ok());
    rule
}

/// A random point of the order simplex (normalized exponentials).
pub fn random_marginal<R: Rng + ?Sized>(n_orders: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n_orders)
        .map(|_| -rng.gen_range(0.0f64..1.0).max(1e-12).ln())
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / sum).collect()
}

/// A random stable, set-monotone rule: random marginal plus one random
/// monotone attention rule per order.
pub fn random_mixture_rule<R: Rng + ?Sized>(universe: &Universe, rng: &mut R) -> RaumRule {
    let marginal = random_marginal(universe.n_orders() as usize, rng);
    let rules: Vec<AttentionRule> = (0..universe.n_orders())
        .map(|_| random_monotone_attention(universe, rng))
        .collect();
    gen_ram_mixture(universe, &marginal, &rules).expect("random components satisfy construction")
}

/// Marginal over orders induced by mean utilities with extreme-value
/// noise: the probability of a full ranking is the product of sequential
/// shares.
pub fn logit_marginal(universe: &Universe, weights: &[f64]) -> Result<Vec<f64>, ModelError> {
    let n = universe.n();
    if weights.len() != n {
        return Err(ModelError::BadParams(format!(
            "need {n} weights, got {}",
            weights.len()
        )));
    }
    let exps: Vec<f64> = weights.iter().map(|&w| w.exp()).collect();
    let mut out = Vec::with_capacity(factorial(n) as usize);
    for order in enumerate_orders(universe) {
        let mut p = 1.0;
        let mut denom: f64 = exps.iter().sum();
        for &alt in order.ranking() {
            p *= exps[alt as usize] / denom;
            denom -= exps[alt as usize];
        }
        out.push(p);
    }
    // normalize away the float dust so downstream validation is exact
    let total: f64 = out.iter().sum();
    Ok(out.into_iter().map(|x| x / total).collect())
}

/// The two-alternative demonstration rule in which preferences and
/// attention are correlated but stability and set-monotonicity both hold:
/// each order mostly attends to its own favorite.
pub fn correlated_singleton_rule() -> RaumRule {
    let u = Universe::letters(2).unwrap();
    let n_sets = u.n_sets();
    let a = SubsetMask::new(0b01);
    let b = SubsetMask::new(0b10);
    let ab = SubsetMask::new(0b11);
    let mut lam0 = vec![0.0; n_sets * n_sets];
    let mut lam1 = vec![0.0; n_sets * n_sets];
    let idx = |menu: SubsetMask, set: SubsetMask| (menu.bits() as usize - 1) * n_sets + set.bits() as usize - 1;
    // order a>b: favors considering {a} in the pair menu
    lam0[idx(a, a)] = 1.0;
    lam0[idx(b, b)] = 1.0;
    lam0[idx(ab, a)] = 2.0 / 3.0;
    lam0[idx(ab, b)] = 1.0 / 3.0;
    // order b>a: mirror image
    lam1[idx(a, a)] = 1.0;
    lam1[idx(b, b)] = 1.0;
    lam1[idx(ab, a)] = 1.0 / 3.0;
    lam1[idx(ab, b)] = 2.0 / 3.0;
    let rules = vec![
        AttentionRule::new(u.clone(), lam0).unwrap(),
        AttentionRule::new(u.clone(), lam1).unwrap(),
    ];
    gen_ram_mixture(&u, &[0.5, 0.5], &rules).unwrap()
}

/// A preference order drawn uniformly.
pub fn random_order<R: Rng + ?Sized>(universe: &Universe, rng: &mut R) -> PreferenceOrder {
    let rank = rng.gen_range(0..universe.n_orders());
    PreferenceOrder::from_rank(universe.n(), rank).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{validate_rule, ValidateOptions};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn correlated_rule_matches_hand_table() {
        let rule = correlated_singleton_rule();
        let ab = SubsetMask::new(0b11);
        let a = SubsetMask::new(0b01);
        let b = SubsetMask::new(0b10);
        assert!((rule.value(ab, 0, a) - 1.0 / 3.0).abs() < 1e-15);
        assert!((rule.value(ab, 0, b) - 1.0 / 6.0).abs() < 1e-15);
        assert!((rule.value(ab, 1, a) - 1.0 / 6.0).abs() < 1e-15);
        assert!((rule.value(ab, 1, b) - 1.0 / 3.0).abs() < 1e-15);
        assert!((rule.value(a, 0, a) - 0.5).abs() < 1e-15);
        let data = rule.induced_dataset(None).unwrap();
        let report = validate_rule(&rule, &data, ValidateOptions::default()).unwrap();
        assert!(report.is_empty(), "{report}");
    }

    #[test]
    fn degenerate_marginal_full_attention_maximizes() {
        let u = Universe::letters(3).unwrap();
        let mut marginal = vec![0.0; 6];
        marginal[0] = 1.0; // a>b>c
        let rule = gen_rum(&u, &marginal).unwrap();
        let d = rule.induced_dataset(None).unwrap();
        for &menu in d.menus() {
            let best = PreferenceOrder::from_rank(3, 0).unwrap().best_in(menu).unwrap();
            assert_eq!(d.prob(menu, best).unwrap(), 1.0);
        }
    }

    #[test]
    fn logit_rum_reproduces_multinomial_shares() {
        let u = Universe::letters(3).unwrap();
        let w = [0.4, -0.3, 1.1];
        let marginal = logit_marginal(&u, &w).unwrap();
        let rule = gen_rum(&u, &marginal).unwrap();
        let d = rule.induced_dataset(None).unwrap();
        let e: Vec<f64> = w.iter().map(|&x| x.exp()).collect();
        for &menu in d.menus() {
            let denom: f64 = menu.members().map(|y| e[y as usize]).sum();
            for alt in menu.members() {
                let want = e[alt as usize] / denom;
                let have = d.prob(menu, alt).unwrap();
                assert!((have - want).abs() < 1e-12, "menu {menu:?} alt {alt}");
            }
        }
    }

    #[test]
    fn random_rules_validate_across_sizes() {
        let mut rng = <StdRng as SeedableRng>::seed_from_u64(99);
        for n in 2..=4usize {
            let u = Universe::letters(n).unwrap();
            for _ in 0..5 {
                let rule = random_mixture_rule(&u, &mut rng);
                let data = rule.induced_dataset(None).unwrap();
                let report = validate_rule(&rule, &data, ValidateOptions::default()).unwrap();
                assert!(report.is_empty(), "n={n}: {report}");
            }
        }
    }

    #[test]
    fn non_monotone_component_rejected_with_reason() {
        let u = Universe::letters(2).unwrap();
        let n_sets = u.n_sets();
        let a = SubsetMask::new(0b01);
        let ab = SubsetMask::new(0b11);
        let mut lam = vec![0.0; n_sets * n_sets];
        let idx = |menu: SubsetMask, set: SubsetMask| {
            (menu.bits() as usize - 1) * n_sets + set.bits() as usize - 1
        };
        // attention to {a} grows when the menu expands: violates shrinking
        lam[idx(a, a)] = 0.2;
        lam[idx(SubsetMask::new(0b10), SubsetMask::new(0b10))] = 1.0;
        lam[idx(ab, a)] = 0.9;
        lam[idx(ab, ab)] = 0.1;
        // menu {a} must still normalize
        let err = AttentionRule::new(u, lam);
        match err {
            Err(ModelError::RamViolation(msg)) => {
                assert!(msg.contains("normalization") || msg.contains("monotonicity"));
            }
            other => panic!("expected RAM violation, got {other:?}"),
        }
    }
}
