//! Attention-index consideration rules.
//!
//! A positive set-weight table `eta` per preference order generates the
//! probability of considering `D` inside menu `A` as
//!
//! ```text
//!            sum_{B ⊆ X \ g(A)} eta(D ∪ B)
//!   ---------------------------------------------------
//!   sum_{∅≠C ⊆ A} sum_{B ⊆ X \ g(A)} eta(C ∪ B)
//! ```
//!
//! for a set map `g`. `g(A) = X` collapses the outer sum and yields logit
//! attention; `g(A) = A` yields elimination by aspects. A containment
//! condition on `g` (checked by [`check_g_monotone`]) guarantees
//! set-monotonicity of the induced rule.

use super::ModelError;
use crate::domain::{
    enumerate_orders, PreferenceOrder, RaumRule, RuleBuilder, SubsetMask, Universe,
};
use num::rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Q = Ratio<i128>;

/// The set map `g` steering which supersets contribute to the weight of a
/// consideration set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GMap {
    /// `g(A) = X` (logit attention).
    Grand,
    /// `g(A) = A` (elimination by aspects).
    Menu,
    /// `g(A) = A \ S` for a fixed `S`.
    MenuMinus(SubsetMask),
    /// `g(A) = X \ S` for a fixed `S`.
    GrandMinus(SubsetMask),
    /// Arbitrary total map on nonempty menus, indexed by `mask - 1`.
    Custom(Vec<SubsetMask>),
}

impl GMap {
    pub fn apply(&self, n: usize, menu: SubsetMask) -> SubsetMask {
        let full = SubsetMask::full(n);
        match self {
            GMap::Grand => full,
            GMap::Menu => menu,
            GMap::MenuMinus(s) => menu.minus(*s),
            GMap::GrandMinus(s) => full.minus(*s),
            GMap::Custom(map) => map[menu.bits() as usize - 1],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GMonotoneCheck {
    Compliant,
    /// A cover pair `(A, A')` on which the containment condition fails.
    NonCompliant { witness: (SubsetMask, SubsetMask) },
}

/// Sufficient condition for set-monotonicity of the induced rule:
/// `g(A) ⊆ g(A')` and `g(A') \ g(A) ⊆ A' \ A` for all nested menus.
/// Checking cover pairs suffices — both conditions chain.
pub fn check_g_monotone(gmap: &GMap, universe: &Universe) -> GMonotoneCheck {
    let n = universe.n();
    let full = universe.full_mask();
    for menu in full.nonempty_subsets() {
        for x in full.minus(menu).members() {
            let larger = menu.with(x);
            let ga = gmap.apply(n, menu);
            let gb = gmap.apply(n, larger);
            if !ga.is_subset_of(gb) || !gb.minus(ga).is_subset_of(larger.minus(menu)) {
                return GMonotoneCheck::NonCompliant {
                    witness: (menu, larger),
                };
            }
        }
    }
    GMonotoneCheck::Compliant
}

/// Exact-rational general formula on an integer weight table (one order's
/// `eta`, indexed by mask; entry 0 is ignored).
pub fn consideration_general_exact(
    eta: &[i64],
    n: usize,
    gmap: &GMap,
    menu: SubsetMask,
    d: SubsetMask,
) -> Q {
    let full = SubsetMask::full(n);
    let outer = full.minus(gmap.apply(n, menu));
    let weight = |s: SubsetMask| -> i128 {
        if s.is_empty() {
            0
        } else {
            eta[s.bits() as usize] as i128
        }
    };
    let mut num: i128 = 0;
    for b in outer.subsets() {
        num += weight(d.union(b));
    }
    let mut den: i128 = 0;
    for c in menu.nonempty_subsets() {
        for b in outer.subsets() {
            den += weight(c.union(b));
        }
    }
    Q::new(num, den)
}

/// Logit-attention closed form: `eta(D) / sum_{∅≠C⊆A} eta(C)`.
pub fn consideration_logit_exact(eta: &[i64], menu: SubsetMask, d: SubsetMask) -> Q {
    let num = eta[d.bits() as usize] as i128;
    let den: i128 = menu
        .nonempty_subsets()
        .map(|c| eta[c.bits() as usize] as i128)
        .sum();
    Q::new(num, den)
}

/// Elimination-by-aspects double sum:
/// `sum_{C: C∩A=D} eta(C) / sum_{K: K∩A≠∅} eta(K)`.
pub fn consideration_eba_exact(eta: &[i64], n: usize, menu: SubsetMask, d: SubsetMask) -> Q {
    let total = 1u32 << n;
    let mut num: i128 = 0;
    let mut den: i128 = 0;
    for bits in 1..total {
        let s = SubsetMask::new(bits);
        let cap = s.intersect(menu);
        if cap == d {
            num += eta[bits as usize] as i128;
        }
        if !cap.is_empty() {
            den += eta[bits as usize] as i128;
        }
    }
    Q::new(num, den)
}

/// Positive set-weight tables per preference order plus the set map.
#[derive(Clone, Debug)]
pub struct AttentionIndex {
    universe: Universe,
    /// `eta[order rank][mask]`; index 0 unused.
    eta: Vec<Vec<f64>>,
    gmap: GMap,
}

impl AttentionIndex {
    pub fn new(universe: Universe, eta: Vec<Vec<f64>>, gmap: GMap) -> Result<Self, ModelError> {
        let n_orders = universe.n_orders() as usize;
        let want = 1usize << universe.n();
        if eta.len() != n_orders {
            return Err(ModelError::BadParams(format!(
                "need one weight table per order ({n_orders}), got {}",
                eta.len()
            )));
        }
        for table in &eta {
            if table.len() != want {
                return Err(ModelError::BadParams(format!(
                    "weight table length {} != {want}",
                    table.len()
                )));
            }
            for (mask, &w) in table.iter().enumerate().skip(1) {
                if !(w > 0.0) || !w.is_finite() {
                    return Err(ModelError::Positivity(format!(
                        "eta({mask:#b}) = {w} must be strictly positive"
                    )));
                }
            }
        }
        Ok(AttentionIndex {
            universe,
            eta,
            gmap,
        })
    }

    /// Constant table `eta ≡ 1` for every order.
    pub fn constant(universe: Universe, gmap: GMap) -> Self {
        let n_orders = universe.n_orders() as usize;
        let len = 1usize << universe.n();
        AttentionIndex {
            eta: vec![vec![1.0; len]; n_orders],
            universe,
            gmap,
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn gmap(&self) -> &GMap {
        &self.gmap
    }

    /// `P(consider D | order, menu)` by the general formula.
    pub fn consideration_prob(&self, order_rank: u64, menu: SubsetMask, d: SubsetMask) -> f64 {
        debug_assert!(d.is_subset_of(menu) && !d.is_empty());
        let n = self.universe.n();
        let table = &self.eta[order_rank as usize];
        let outer = SubsetMask::full(n).minus(self.gmap.apply(n, menu));
        let weight = |s: SubsetMask| -> f64 {
            if s.is_empty() {
                0.0
            } else {
                table[s.bits() as usize]
            }
        };
        let mut num = 0.0;
        for b in outer.subsets() {
            num += weight(d.union(b));
        }
        let mut den = 0.0;
        for c in menu.nonempty_subsets() {
            for b in outer.subsets() {
                den += weight(c.union(b));
            }
        }
        num / den
    }
}

/// Build the full rule `pi_A(order, D) = P(D | order, A) * marginal(order)`.
/// Stability holds by construction; set-monotonicity holds whenever the
/// set map passes [`check_g_monotone`].
pub fn gen_attention_index(
    idx: &AttentionIndex,
    marginal: &[f64],
) -> Result<RaumRule, ModelError> {
    let u = idx.universe.clone();
    validate_marginal(marginal, u.n_orders() as usize)?;
    let mut builder = RuleBuilder::new(u.clone())?;
    for menu in u.full_mask().nonempty_subsets() {
        for rank in 0..u.n_orders() {
            if marginal[rank as usize] == 0.0 {
                continue;
            }
            for d in menu.nonempty_subsets() {
                let p = idx.consideration_prob(rank, menu, d);
                builder.add(menu, rank, d, p * marginal[rank as usize]);
            }
        }
    }
    Ok(builder.finish()?)
}

pub(crate) fn validate_marginal(marginal: &[f64], n_orders: usize) -> Result<(), ModelError> {
    if marginal.len() != n_orders {
        return Err(ModelError::BadParams(format!(
            "marginal over {} orders, expected {n_orders}",
            marginal.len()
        )));
    }
    if marginal.iter().any(|&p| p < 0.0 || !p.is_finite()) {
        return Err(ModelError::BadParams(
            "marginal has negative or non-finite entries".into(),
        ));
    }
    let sum: f64 = marginal.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(ModelError::BadParams(format!(
            "marginal sums to {sum}, not 1"
        )));
    }
    Ok(())
}

/// Monte Carlo weight tables from the salience construction: draw latent
/// utilities and saliencies, attribute each draw to the order implied by
/// the utilities, and weight a set by how many of its members clear the
/// salience threshold `kappa`. Fails when any table entry comes out
/// nonpositive (the construction only defines an index on supports wide
/// enough to hit every set under every order).
pub fn sample_salience_eta(
    universe: &Universe,
    kappa: f64,
    draws: u64,
    seed: u64,
) -> Result<Vec<Vec<f64>>, ModelError> {
    if draws == 0 {
        return Err(ModelError::BadParams("draws must be positive".into()));
    }
    let n = universe.n();
    let n_orders = universe.n_orders() as usize;
    let len = 1usize << n;
    let mut eta = vec![vec![0.0f64; len]; n_orders];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..draws {
        let utils: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let salience: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let mut order: Vec<u8> = (0..n as u8).collect();
        order.sort_by(|&a, &b| {
            utils[b as usize]
                .partial_cmp(&utils[a as usize])
                .unwrap()
                .then(a.cmp(&b))
        });
        let rank = PreferenceOrder::from_ranking(order).unwrap().rank() as usize;
        let salient: Vec<bool> = (0..n).map(|y| utils[y] + salience[y] >= kappa).collect();
        for mask in 1..len {
            let count = SubsetMask::new(mask as u32)
                .members()
                .filter(|&y| salient[y as usize])
                .count();
            eta[rank][mask] += count as f64;
        }
    }
    for table in &mut eta {
        for w in table.iter_mut().skip(1) {
            *w /= draws as f64;
        }
    }
    for (rank, table) in eta.iter().enumerate() {
        for (mask, &w) in table.iter().enumerate().skip(1) {
            if !(w > 0.0) {
                return Err(ModelError::Positivity(format!(
                    "sampled eta is zero at order rank {rank}, set {mask:#b}; \
                     widen the support or lower kappa"
                )));
            }
        }
    }
    Ok(eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{validate_rule, ValidateOptions};
    use rand::rngs::StdRng;

    #[test]
    fn constant_eta_n2_uniform_consideration() {
        // eta ≡ 1, g = grand: each of the 3 subsets of {a,b} weighs 1/3
        let u = Universe::letters(2).unwrap();
        let idx = AttentionIndex::constant(u.clone(), GMap::Grand);
        let ab = SubsetMask::new(0b11);
        for d in ab.nonempty_subsets() {
            let p = idx.consideration_prob(0, ab, d);
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn grand_reduces_to_logit_exact() {
        let mut rng = <StdRng as SeedableRng>::seed_from_u64(7);
        for n in 2..=4usize {
            let len = 1usize << n;
            for _ in 0..25 {
                let eta: Vec<i64> = (0..len).map(|_| rng.gen_range(1..1000)).collect();
                let full = SubsetMask::full(n);
                for menu in full.nonempty_subsets() {
                    for d in menu.nonempty_subsets() {
                        let lhs =
                            consideration_general_exact(&eta, n, &GMap::Grand, menu, d);
                        let rhs = consideration_logit_exact(&eta, menu, d);
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn menu_reduces_to_eba_exact() {
        let mut rng = <StdRng as SeedableRng>::seed_from_u64(11);
        for n in 2..=4usize {
            let len = 1usize << n;
            for _ in 0..25 {
                let eta: Vec<i64> = (0..len).map(|_| rng.gen_range(1..1000)).collect();
                let full = SubsetMask::full(n);
                for menu in full.nonempty_subsets() {
                    for d in menu.nonempty_subsets() {
                        let lhs = consideration_general_exact(&eta, n, &GMap::Menu, menu, d);
                        let rhs = consideration_eba_exact(&eta, n, menu, d);
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn compliant_maps_pass_noncompliant_flagged() {
        let u = Universe::letters(3).unwrap();
        let fixed = SubsetMask::from_members(&[0, 1]);
        for g in [
            GMap::Grand,
            GMap::Menu,
            GMap::MenuMinus(fixed),
            GMap::GrandMinus(fixed),
        ] {
            assert_eq!(check_g_monotone(&g, &u), GMonotoneCheck::Compliant);
        }
        // g({a}) = {a,b}, g({a,b}) = {a}: containment fails on ({a},{a,b})
        let u2 = Universe::letters(2).unwrap();
        let mut map = vec![SubsetMask::new(0); 3];
        map[0b01 - 1] = SubsetMask::new(0b11);
        map[0b10 - 1] = SubsetMask::new(0b10);
        map[0b11 - 1] = SubsetMask::new(0b01);
        let check = check_g_monotone(&GMap::Custom(map), &u2);
        assert_eq!(
            check,
            GMonotoneCheck::NonCompliant {
                witness: (SubsetMask::new(0b01), SubsetMask::new(0b11))
            }
        );
    }

    #[test]
    fn generated_rule_is_stable_and_monotone() {
        let u = Universe::letters(3).unwrap();
        let mut rng = <StdRng as SeedableRng>::seed_from_u64(3);
        let len = 1usize << 3;
        let eta: Vec<Vec<f64>> = (0..6)
            .map(|_| (0..len).map(|_| rng.gen_range(0.1..4.0)).collect())
            .collect();
        for g in [GMap::Grand, GMap::Menu] {
            let idx = AttentionIndex::new(u.clone(), eta.clone(), g).unwrap();
            let marginal = vec![1.0 / 6.0; 6];
            let rule = gen_attention_index(&idx, &marginal).unwrap();
            let data = rule.induced_dataset(None).unwrap();
            let report = validate_rule(&rule, &data, ValidateOptions::default()).unwrap();
            assert!(report.is_empty(), "{report}");
        }
    }

    #[test]
    fn salience_sampler_positive_tables() {
        let u = Universe::letters(2).unwrap();
        let eta = sample_salience_eta(&u, -3.0, 4000, 42).unwrap();
        let idx = AttentionIndex::new(u, eta, GMap::Grand).unwrap();
        let rule = gen_attention_index(&idx, &[0.5, 0.5]).unwrap();
        let data = rule.induced_dataset(None).unwrap();
        let report = validate_rule(&rule, &data, ValidateOptions::default()).unwrap();
        assert!(report.is_empty());
    }

    #[test]
    fn salience_sampler_rejects_starved_support() {
        // kappa far above the support: no set ever clears the bar
        let u = Universe::letters(2).unwrap();
        assert!(matches!(
            sample_salience_eta(&u, 50.0, 200, 1),
            Err(ModelError::Positivity(_))
        ));
    }
}
