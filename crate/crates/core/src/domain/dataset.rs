//! Observed stochastic choice data.

use super::subset::SubsetMask;
use super::universe::Universe;
use super::DomainError;

/// Input datasets must satisfy per-menu probability sums to within this
/// tolerance.
pub const DATASET_TOL: f64 = 1e-9;

/// A stochastic choice dataset: a collection of observed menus and, for
/// each, the probability of every alternative being chosen.
///
/// Menus may be any distinct nonempty subsets; the dataset is complete when
/// every nonempty subset is observed. Probabilities are stored densely over
/// all alternatives with support inside the menu.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceDataset {
    universe: Universe,
    menus: Vec<SubsetMask>,
    probs: Vec<Vec<f64>>,
}

impl ChoiceDataset {
    pub fn new(
        universe: Universe,
        menus: Vec<SubsetMask>,
        probs: Vec<Vec<f64>>,
    ) -> Result<Self, DomainError> {
        if menus.is_empty() {
            return Err(DomainError::BadDataset("no menus observed".into()));
        }
        if menus.len() != probs.len() {
            return Err(DomainError::BadDataset(format!(
                "{} menus but {} probability vectors",
                menus.len(),
                probs.len()
            )));
        }
        let full = universe.full_mask();
        let mut seen = std::collections::HashSet::new();
        for (menu, p) in menus.iter().zip(&probs) {
            if menu.is_empty() || !menu.is_subset_of(full) {
                return Err(DomainError::BadDataset(format!(
                    "menu {menu:?} is not a nonempty subset of the universe"
                )));
            }
            if !seen.insert(menu.bits()) {
                return Err(DomainError::BadDataset(format!(
                    "duplicate menu {}",
                    universe.format_set(*menu)
                )));
            }
            if p.len() != universe.n() {
                return Err(DomainError::BadDataset(format!(
                    "probability vector for menu {} has length {}, expected {}",
                    universe.format_set(*menu),
                    p.len(),
                    universe.n()
                )));
            }
            let mut sum = 0.0;
            for (alt, &prob) in p.iter().enumerate() {
                if !prob.is_finite() || prob < 0.0 {
                    return Err(DomainError::BadDataset(format!(
                        "probability {prob} for {} in menu {} is invalid",
                        universe.label(alt as u8),
                        universe.format_set(*menu)
                    )));
                }
                if prob > 0.0 && !menu.contains(alt as u8) {
                    return Err(DomainError::BadDataset(format!(
                        "positive probability on {} outside menu {}",
                        universe.label(alt as u8),
                        universe.format_set(*menu)
                    )));
                }
                sum += prob;
            }
            if (sum - 1.0).abs() > DATASET_TOL {
                return Err(DomainError::BadDataset(format!(
                    "probabilities in menu {} sum to {sum}, not 1",
                    universe.format_set(*menu)
                )));
            }
        }
        Ok(ChoiceDataset {
            universe,
            menus,
            probs,
        })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    /// Observed menus in input order.
    pub fn menus(&self) -> &[SubsetMask] {
        &self.menus
    }

    pub fn n_menus(&self) -> usize {
        self.menus.len()
    }

    pub fn menu_position(&self, menu: SubsetMask) -> Option<usize> {
        self.menus.iter().position(|&m| m == menu)
    }

    pub fn is_observed(&self, menu: SubsetMask) -> bool {
        self.menu_position(menu).is_some()
    }

    pub fn is_complete(&self) -> bool {
        self.menus.len() == self.universe.n_sets()
    }

    /// Choice probability of `alt` in the `pos`-th observed menu.
    pub fn prob_at(&self, pos: usize, alt: u8) -> f64 {
        self.probs[pos][alt as usize]
    }

    /// Choice probability of `alt` in `menu`, if observed.
    pub fn prob(&self, menu: SubsetMask, alt: u8) -> Option<f64> {
        self.menu_position(menu).map(|i| self.prob_at(i, alt))
    }

    /// Observed (alternative, menu) pairs in canonical row order: menus in
    /// input order, alternatives ascending within each menu.
    pub fn observed_pairs(&self) -> Vec<(u8, SubsetMask)> {
        let mut out = Vec::new();
        for &menu in &self.menus {
            for alt in menu.members() {
                out.push((alt, menu));
            }
        }
        out
    }

    /// Restrict to a sub-collection of the observed menus (input order is
    /// the order of `keep`).
    pub fn restrict_menus(&self, keep: &[SubsetMask]) -> Result<Self, DomainError> {
        let mut menus = Vec::new();
        let mut probs = Vec::new();
        for &menu in keep {
            let pos = self.menu_position(menu).ok_or_else(|| {
                DomainError::BadDataset(format!(
                    "menu {} not observed",
                    self.universe.format_set(menu)
                ))
            })?;
            menus.push(menu);
            probs.push(self.probs[pos].clone());
        }
        ChoiceDataset::new(self.universe.clone(), menus, probs)
    }
}
