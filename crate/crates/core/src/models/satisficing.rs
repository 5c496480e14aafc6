//! Search-and-satisficing rules by Monte Carlo.
//!
//! Each simulated decision maker draws a search index and a utility per
//! alternative from a continuous joint law. In any menu, alternatives are
//! examined in decreasing search order and the walk stops at the first one
//! whose utility clears the threshold; the examined prefix is the
//! consideration set (the whole menu when nothing satisfices). The same
//! draws serve every menu, so the empirical marginal over orders is
//! literally identical across menus and stability holds exactly;
//! monotonicity holds up to sampling error (use tolerance `3/sqrt(draws)`
//! when validating).

use super::ModelError;
use crate::domain::{PreferenceOrder, RaumRule, RuleBuilder, SubsetMask, Universe};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SatisficingSampler {
    /// Independent uniforms on [0,1] for search indexes and utilities.
    UniformIid,
    /// Independent standard normals.
    GaussianIid,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Threshold {
    Fixed(f64),
    /// Threshold redrawn per decision maker, menu-independent.
    Uniform { lo: f64, hi: f64 },
}

#[derive(Clone, Copy, Debug)]
pub struct SatisficingParams {
    pub sampler: SatisficingSampler,
    pub threshold: Threshold,
    pub draws: u64,
    pub seed: u64,
}

impl SatisficingParams {
    /// Monotonicity tolerance appropriate for this draw count.
    pub fn mc_tol(&self) -> f64 {
        3.0 / (self.draws as f64).sqrt()
    }
}

/// Simulate the empirical rule. Counts are accumulated with common random
/// numbers across menus and normalized by the draw count.
pub fn gen_satisficing(
    universe: &Universe,
    params: &SatisficingParams,
) -> Result<RaumRule, ModelError> {
    if params.draws == 0 {
        return Err(ModelError::BadParams("draw count must be positive".into()));
    }
    if let Threshold::Uniform { lo, hi } = params.threshold {
        if !(lo < hi) {
            return Err(ModelError::BadParams(format!(
                "empty threshold range [{lo}, {hi})"
            )));
        }
    }
    let n = universe.n();
    let mut builder = RuleBuilder::new(universe.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let menus: Vec<SubsetMask> = universe.full_mask().nonempty_subsets().collect();
    let weight = 1.0 / params.draws as f64;

    for _ in 0..params.draws {
        let (search, utility): (Vec<f64>, Vec<f64>) = match params.sampler {
            SatisficingSampler::UniformIid => (
                (0..n).map(|_| rng.gen_range(0.0..1.0)).collect(),
                (0..n).map(|_| rng.gen_range(0.0..1.0)).collect(),
            ),
            SatisficingSampler::GaussianIid => (
                (0..n).map(|_| rng.sample(StandardNormal)).collect(),
                (0..n).map(|_| rng.sample(StandardNormal)).collect(),
            ),
        };
        let tau = match params.threshold {
            Threshold::Fixed(t) => t,
            Threshold::Uniform { lo, hi } => rng.gen_range(lo..hi),
        };

        // ranking by utility, ties broken by index (probability zero
        // under a continuous law, but keep the tie-break deterministic)
        let mut ranking: Vec<u8> = (0..n as u8).collect();
        ranking.sort_by(|&a, &b| {
            utility[b as usize]
                .partial_cmp(&utility[a as usize])
                .unwrap()
                .then(a.cmp(&b))
        });
        let rank = PreferenceOrder::from_ranking(ranking).unwrap().rank();

        let mut search_order: Vec<u8> = (0..n as u8).collect();
        search_order.sort_by(|&a, &b| {
            search[b as usize]
                .partial_cmp(&search[a as usize])
                .unwrap()
                .then(a.cmp(&b))
        });

        for &menu in &menus {
            let mut considered = SubsetMask::new(0);
            for &y in &search_order {
                if !menu.contains(y) {
                    continue;
                }
                considered = considered.with(y);
                if utility[y as usize] >= tau {
                    break;
                }
            }
            builder.add(menu, rank, considered, weight);
        }
    }
    Ok(builder.finish()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{validate_rule, ValidateOptions};

    #[test]
    fn nothing_satisfices_reduces_to_full_attention() {
        let u = Universe::letters(3).unwrap();
        let params = SatisficingParams {
            sampler: SatisficingSampler::UniformIid,
            threshold: Threshold::Fixed(f64::INFINITY),
            draws: 2000,
            seed: 5,
        };
        let rule = gen_satisficing(&u, &params).unwrap();
        for menu in u.full_mask().nonempty_subsets() {
            for rank in 0..u.n_orders() {
                for set in menu.nonempty_subsets() {
                    if set != menu {
                        assert_eq!(rule.value(menu, rank, set), 0.0);
                    }
                }
            }
        }
        // with full attention the best item in the menu is always chosen
        let data = rule.induced_dataset(None).unwrap();
        let report = validate_rule(&rule, &data, ValidateOptions::default()).unwrap();
        assert!(report.is_empty(), "{report}");
    }

    #[test]
    fn everything_satisfices_considers_first_searched_only() {
        let u = Universe::letters(3).unwrap();
        let params = SatisficingParams {
            sampler: SatisficingSampler::UniformIid,
            threshold: Threshold::Fixed(f64::NEG_INFINITY),
            draws: 2000,
            seed: 6,
        };
        let rule = gen_satisficing(&u, &params).unwrap();
        for menu in u.full_mask().nonempty_subsets() {
            for rank in 0..u.n_orders() {
                for set in menu.nonempty_subsets() {
                    if set.len() > 1 {
                        assert_eq!(rule.value(menu, rank, set), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn median_threshold_rule_passes_mc_validation() {
        let u = Universe::letters(2).unwrap();
        let params = SatisficingParams {
            sampler: SatisficingSampler::UniformIid,
            threshold: Threshold::Fixed(0.5),
            draws: 1_000_000,
            seed: 42,
        };
        let rule = gen_satisficing(&u, &params).unwrap();
        let data = rule.induced_dataset(None).unwrap();
        let report =
            validate_rule(&rule, &data, ValidateOptions::with_tol(params.mc_tol())).unwrap();
        assert!(report.is_empty(), "{report}");
    }

    #[test]
    fn random_threshold_variant_stays_monotone() {
        let u = Universe::letters(3).unwrap();
        let params = SatisficingParams {
            sampler: SatisficingSampler::GaussianIid,
            threshold: Threshold::Uniform { lo: -0.5, hi: 0.5 },
            draws: 200_000,
            seed: 9,
        };
        let rule = gen_satisficing(&u, &params).unwrap();
        let data = rule.induced_dataset(None).unwrap();
        let report =
            validate_rule(&rule, &data, ValidateOptions::with_tol(params.mc_tol())).unwrap();
        assert!(report.is_empty(), "{report}");
    }

    #[test]
    fn deterministic_given_seed() {
        let u = Universe::letters(2).unwrap();
        let params = SatisficingParams {
            sampler: SatisficingSampler::UniformIid,
            threshold: Threshold::Fixed(0.3),
            draws: 10_000,
            seed: 77,
        };
        let r1 = gen_satisficing(&u, &params).unwrap();
        let r2 = gen_satisficing(&u, &params).unwrap();
        assert_eq!(r1.values(), r2.values());
    }
}
