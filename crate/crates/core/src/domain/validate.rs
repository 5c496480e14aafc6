//! Constraint-by-constraint audit of a rule against a dataset.

use super::dataset::ChoiceDataset;
use super::rule::RaumRule;
use super::subset::SubsetMask;
use super::DomainError;
use std::fmt;

/// Default comparison tolerance: below LP solver accuracy, above double
/// rounding noise.
pub const VALIDATE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug)]
pub struct ValidateOptions {
    pub stability: bool,
    pub monotonicity: bool,
    pub tol: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            stability: true,
            monotonicity: true,
            tol: VALIDATE_TOL,
        }
    }
}

impl ValidateOptions {
    pub fn with_tol(tol: f64) -> Self {
        ValidateOptions {
            tol,
            ..Default::default()
        }
    }
}

/// One violated constraint, with the menus/orders/sets involved and the
/// violation magnitude.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// |induced choice probability - observed| > tol at (alt, menu).
    DataFit {
        menu: SubsetMask,
        alt: u8,
        gap: f64,
    },
    /// |sum of pi_menu - 1| > tol.
    Normalization { menu: SubsetMask, gap: f64 },
    /// Positive mass on a consideration set not contained in the menu.
    Feasibility {
        menu: SubsetMask,
        order_rank: u64,
        set: SubsetMask,
        value: f64,
    },
    /// Marginal over orders differs between two menus.
    Stability {
        menu_a: SubsetMask,
        menu_b: SubsetMask,
        order_rank: u64,
        gap: f64,
    },
    /// Joint mass on a set increases from a menu to a superset menu.
    Monotonicity {
        menu_small: SubsetMask,
        menu_large: SubsetMask,
        order_rank: u64,
        set: SubsetMask,
        gap: f64,
    },
}

#[derive(Clone, Debug, Default)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    /// Largest violation magnitude, 0 for an empty report.
    pub fn max_gap(&self) -> f64 {
        self.violations
            .iter()
            .map(|v| match v {
                Violation::DataFit { gap, .. }
                | Violation::Normalization { gap, .. }
                | Violation::Stability { gap, .. }
                | Violation::Monotonicity { gap, .. } => *gap,
                Violation::Feasibility { value, .. } => *value,
            })
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "no violations");
        }
        writeln!(f, "{} violation(s):", self.len())?;
        for v in &self.violations {
            writeln!(f, "  {v:?}")?;
        }
        Ok(())
    }
}

/// Check a rule against a dataset: data fit, per-menu normalization,
/// feasibility, and (optionally) stability across all menu pairs and
/// set-monotonicity in joint-probability form across all nested menu
/// pairs. An empty report means the rule is a representation of the data
/// under the requested assumptions.
pub fn validate_rule(
    rule: &RaumRule,
    dataset: &ChoiceDataset,
    opts: ValidateOptions,
) -> Result<ViolationReport, DomainError> {
    if rule.universe() != dataset.universe() {
        return Err(DomainError::UniverseMismatch);
    }
    let u = rule.universe();
    let tol = opts.tol;
    let mut report = ViolationReport::default();
    let full = u.full_mask();

    // (a) data fit on observed pairs
    for (alt, menu) in dataset.observed_pairs() {
        let have = rule.choice_prob(menu, alt)?;
        let want = dataset.prob(menu, alt).unwrap();
        let gap = (have - want).abs();
        if gap > tol {
            report.violations.push(Violation::DataFit { menu, alt, gap });
        }
    }

    // (b) normalization and (c) feasibility over all menus
    for menu in full.nonempty_subsets() {
        let mut sum = 0.0;
        for rank in 0..u.n_orders() {
            for set in full.nonempty_subsets() {
                let v = rule.value(menu, rank, set);
                sum += v;
                if v > tol && !set.is_subset_of(menu) {
                    report.violations.push(Violation::Feasibility {
                        menu,
                        order_rank: rank,
                        set,
                        value: v,
                    });
                }
            }
        }
        let gap = (sum - 1.0).abs();
        if gap > tol {
            report
                .violations
                .push(Violation::Normalization { menu, gap });
        }
    }

    // (d) stability: marginals agree across every pair of menus
    if opts.stability {
        let menus: Vec<SubsetMask> = full.nonempty_subsets().collect();
        let marginals: Vec<Vec<f64>> = menus
            .iter()
            .map(|&m| (0..u.n_orders()).map(|r| rule.marginal(m, r)).collect())
            .collect();
        for i in 0..menus.len() {
            for j in i + 1..menus.len() {
                for rank in 0..u.n_orders() {
                    let gap = (marginals[i][rank as usize] - marginals[j][rank as usize]).abs();
                    if gap > tol {
                        report.violations.push(Violation::Stability {
                            menu_a: menus[i],
                            menu_b: menus[j],
                            order_rank: rank,
                            gap,
                        });
                    }
                }
            }
        }
    }

    // (e) set-monotonicity, joint form: pi_A(order, D) >= pi_B(order, D)
    // for every A inside B and D inside A
    if opts.monotonicity {
        for large in full.nonempty_subsets() {
            for small in large.nonempty_subsets() {
                if small == large {
                    continue;
                }
                for set in small.nonempty_subsets() {
                    for rank in 0..u.n_orders() {
                        let lo = rule.value(small, rank, set);
                        let hi = rule.value(large, rank, set);
                        if lo < hi - tol {
                            report.violations.push(Violation::Monotonicity {
                                menu_small: small,
                                menu_large: large,
                                order_rank: rank,
                                set,
                                gap: hi - lo,
                            });
                        }
                    }
                }
            }
        }
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::rule::{correlated_singleton_rule, RuleBuilder};
    use crate::domain::universe::Universe;

    #[test]
    fn known_valid_rule_passes() {
        let rule = correlated_singleton_rule();
        let data = rule.induced_dataset(None).unwrap();
        let report = validate_rule(&rule, &data, ValidateOptions::default()).unwrap();
        assert!(report.is_empty(), "{report}");
    }

    #[test]
    fn perturbed_marginal_reports_stability_gap() {
        // move 0.1 from (a>b, {a}) to (b>a, {a}) in menu {a,b} only
        let rule = correlated_singleton_rule();
        let data = rule.induced_dataset(None).unwrap();
        let u = rule.universe().clone();
        let mut b = RuleBuilder::new(u).unwrap();
        let full = rule.universe().full_mask();
        for menu in full.nonempty_subsets() {
            for rank in 0..rule.universe().n_orders() {
                for set in full.nonempty_subsets() {
                    b.set(menu, rank, set, rule.value(menu, rank, set));
                }
            }
        }
        let ab = SubsetMask::new(0b11);
        let a_mask = SubsetMask::new(0b01);
        b.set(ab, 0, a_mask, rule.value(ab, 0, a_mask) - 0.1);
        b.set(ab, 1, a_mask, rule.value(ab, 1, a_mask) + 0.1);
        let perturbed = b.finish().unwrap();
        let report = validate_rule(
            &perturbed,
            &data,
            ValidateOptions {
                monotonicity: false,
                ..Default::default()
            },
        )
        .unwrap();
        let stab_gaps: Vec<f64> = report
            .violations
            .iter()
            .filter_map(|v| match v {
                Violation::Stability { gap, .. } => Some(*gap),
                _ => None,
            })
            .collect();
        assert!(!stab_gaps.is_empty());
        assert!(stab_gaps.iter().any(|g| (g - 0.1).abs() < 1e-12));
    }

    #[test]
    fn infeasible_mass_reported() {
        // pi_{b}(a>b, {a}) = 0.5: consideration set {a} infeasible in menu {b}
        let u = Universe::letters(2).unwrap();
        let mut b = RuleBuilder::new(u.clone()).unwrap();
        let a_mask = SubsetMask::new(0b01);
        let b_mask = SubsetMask::new(0b10);
        let ab = SubsetMask::new(0b11);
        b.set(ab, 0, ab, 1.0);
        b.set(a_mask, 0, a_mask, 1.0);
        b.set(b_mask, 0, a_mask, 0.5);
        b.set(b_mask, 0, b_mask, 0.5);
        let rule = b.finish_unchecked().unwrap();
        let data = ChoiceDataset::new(
            u,
            vec![ab],
            vec![vec![1.0, 0.0]],
        )
        .unwrap();
        let report = validate_rule(&rule, &data, ValidateOptions::default()).unwrap();
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::Feasibility { menu, set, value, .. }
                if *menu == b_mask && *set == a_mask && (*value - 0.5).abs() < 1e-12
        )));
    }

    #[test]
    fn universe_mismatch_is_an_error() {
        let rule = correlated_singleton_rule();
        let u3 = Universe::letters(3).unwrap();
        let d3 = ChoiceDataset::new(
            u3,
            vec![SubsetMask::new(0b111)],
            vec![vec![1.0, 0.0, 0.0]],
        )
        .unwrap();
        assert!(matches!(
            validate_rule(&rule, &d3, ValidateOptions::default()),
            Err(DomainError::UniverseMismatch)
        ));
    }
}
