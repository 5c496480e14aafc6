//! The three-alternative rational-inattention example.
//!
//! A decision maker with prior `mu` over which single alternative is
//! high-quality pays Shannon attention costs; the net payoff parameter
//! `delta` determines a deterministic consideration set per menu (via four
//! thresholds) and conditional choice probabilities
//! `P_D(y) = (mu_D(y)(|D|+delta) - 1)/delta` inside the considered set.
//! Above the top threshold every menu is fully considered and an explicit
//! stable marginal over the six orders reproduces the data.

use super::ModelError;
use crate::domain::{ChoiceDataset, SubsetMask, Universe};

#[derive(Clone, Copy, Debug)]
pub struct RiParams {
    mu: [f64; 3],
    delta: f64,
}

impl RiParams {
    /// `mu` ordered `mu[0] >= mu[1] >= mu[2] > 0` and summing to one;
    /// `delta` positive and distinct from every threshold (the tables
    /// assign thresholds by half-open intervals, so landing exactly on
    /// one is a parameterization error rather than a choice).
    pub fn new(mu: [f64; 3], delta: f64) -> Result<Self, ModelError> {
        let sum: f64 = mu.iter().sum();
        if mu.iter().any(|&m| !(m > 0.0)) {
            return Err(ModelError::BadParams(
                "prior entries must be strictly positive".into(),
            ));
        }
        if !(mu[0] >= mu[1] && mu[1] >= mu[2]) {
            return Err(ModelError::BadParams(
                "prior must be ordered mu(a) >= mu(b) >= mu(c)".into(),
            ));
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ModelError::BadParams(format!(
                "prior sums to {sum}, not 1"
            )));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(ModelError::BadParams("delta must be positive".into()));
        }
        let params = RiParams { mu, delta };
        if params.thresholds().contains(&delta) {
            return Err(ModelError::BadParams(format!(
                "delta = {delta} sits exactly on a consideration threshold"
            )));
        }
        Ok(params)
    }

    pub fn mu(&self) -> [f64; 3] {
        self.mu
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Thresholds `[d1, d2, d3, d4]` with `d1 >= d2 >= d3` and `d2 >= d4`.
    pub fn thresholds(&self) -> [f64; 4] {
        let [a, b, c] = self.mu;
        [-3.0 + 1.0 / c, -1.0 + a / c, -1.0 + b / c, -1.0 + a / b]
    }
}

/// Universe `{a, b, c}`.
pub fn ri_universe() -> Universe {
    Universe::letters(3).unwrap()
}

/// The deterministic consideration set of `menu` at the given parameters.
pub fn ri_consideration_set(params: &RiParams, menu: SubsetMask) -> SubsetMask {
    let [d1, d2, d3, d4] = params.thresholds();
    let delta = params.delta;
    let a = SubsetMask::singleton(0);
    let b = SubsetMask::singleton(1);
    match menu.bits() {
        0b111 => {
            if delta > d1 {
                menu
            } else if delta > d4 {
                SubsetMask::new(0b011)
            } else {
                a
            }
        }
        0b011 => {
            if delta > d4 {
                menu
            } else {
                a
            }
        }
        0b110 => {
            if delta > d3 {
                menu
            } else {
                b
            }
        }
        0b101 => {
            if delta > d2 {
                menu
            } else {
                a
            }
        }
        _ => menu, // singletons
    }
}

/// Choice probability of `y` when the considered set is `d`.
fn choice_within(params: &RiParams, d: SubsetMask, y: u8) -> f64 {
    if d.len() == 1 {
        return 1.0; // the formula reduces to delta/delta
    }
    let mu_total: f64 = d.members().map(|m| params.mu[m as usize]).sum();
    let mu_d = params.mu[y as usize] / mu_total;
    (mu_d * (d.len() as f64 + params.delta) - 1.0) / params.delta
}

/// The induced dataset on all seven nonempty menus of `{a,b,c}`.
pub fn gen_rational_inattention(params: &RiParams) -> Result<ChoiceDataset, ModelError> {
    let u = ri_universe();
    let menus: Vec<SubsetMask> = u.full_mask().nonempty_subsets().collect();
    let mut probs = Vec::with_capacity(menus.len());
    for &menu in &menus {
        let d = ri_consideration_set(params, menu);
        let mut p = vec![0.0f64; 3];
        for y in d.members() {
            let v = choice_within(params, d, y);
            if v < -1e-9 || v > 1.0 + 1e-9 {
                return Err(ModelError::BadParams(format!(
                    "choice probability {v} out of range in menu {}; \
                     inconsistent consideration regime",
                    u.format_set(menu)
                )));
            }
            p[y as usize] = v.clamp(0.0, 1.0);
        }
        probs.push(p);
    }
    Ok(ChoiceDataset::new(u, menus, probs)?)
}

/// The explicit stable marginal over the six orders of `{a,b,c}` for the
/// full-consideration regime `delta > d1`. Order of entries follows the
/// lexicographic ranks: abc, acb, bac, bca, cab, cba. Together with full
/// attention it reproduces the induced dataset exactly.
pub fn ri_stable_marginal(params: &RiParams) -> Result<[f64; 6], ModelError> {
    let [d1, ..] = params.thresholds();
    let delta = params.delta;
    if !(delta > d1) {
        return Err(ModelError::BadParams(format!(
            "stable marginal needs delta > {d1}, got {delta}"
        )));
    }
    let [ma, mb, mc] = params.mu;
    let kappa_ac = 1.0 / mc - 1.0 / ma;
    let kappa_bc = 1.0 / mc - 1.0 / mb;
    let pi = [
        (delta - d1 + kappa_ac) / (mb + mc) * ma * mb / delta, // a>b>c
        (delta - d1 + kappa_ac) / (mb + mc) * ma * mc / delta, // a>c>b
        (delta - d1 + kappa_bc) / (ma + mc) * ma * mb / delta, // b>a>c
        (delta - d1 + kappa_bc) / (ma + mc) * mb * mc / delta, // b>c>a
        (delta - d1) / (ma + mb) * ma * mc / delta,            // c>a>b
        (delta - d1) / (ma + mb) * mb * mc / delta,            // c>b>a
    ];
    Ok(pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{gen_rum, ModelError};

    fn base() -> RiParams {
        RiParams::new([0.5, 0.3, 0.2], 3.0).unwrap()
    }

    #[test]
    fn thresholds_of_base_parameters() {
        let t = base().thresholds();
        assert_eq!(t[0], 2.0);
        assert_eq!(t[1], 1.5);
        assert!((t[2] - 0.5).abs() < 1e-15);
        assert!((t[3] - (2.0 / 3.0 - 0.0)).abs() < 1e-12 || (t[3] - (0.5 / 0.3 - 1.0)).abs() < 1e-12);
        // d4 > d3 here, so the second table regime applies
        assert!(t[3] > t[2]);
    }

    #[test]
    fn full_consideration_probabilities() {
        let d = gen_rational_inattention(&base()).unwrap();
        let abc = SubsetMask::new(0b111);
        let ab = SubsetMask::new(0b011);
        // (0.5 * 6 - 1) / 3 = 2/3
        assert!((d.prob(abc, 0).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        // (0.625 * 5 - 1) / 3 = 17/24
        assert!((d.prob(ab, 0).unwrap() - 17.0 / 24.0).abs() < 1e-12);
    }

    #[test]
    fn regularity_gap_closed_form() {
        let p = base();
        let d = gen_rational_inattention(&p).unwrap();
        let gap = d.prob(SubsetMask::new(0b011), 0).unwrap()
            - d.prob(SubsetMask::new(0b111), 0).unwrap();
        let [ma, _, mc] = p.mu();
        let expect = ma * mc * (p.delta() - p.thresholds()[0]) / (p.delta() * (ma + p.mu()[1]));
        assert!((gap - expect).abs() < 1e-12);
        assert!((gap - 1.0 / 24.0).abs() < 1e-12);
    }

    #[test]
    fn low_delta_considers_singletons() {
        // delta = 0.4 below d3 = 0.5: sets {a},{a},{b},{a} on the
        // non-singleton menus, and choice is degenerate on them
        let p = RiParams::new([0.5, 0.3, 0.2], 0.4).unwrap();
        assert_eq!(ri_consideration_set(&p, SubsetMask::new(0b111)).bits(), 0b001);
        assert_eq!(ri_consideration_set(&p, SubsetMask::new(0b011)).bits(), 0b001);
        assert_eq!(ri_consideration_set(&p, SubsetMask::new(0b110)).bits(), 0b010);
        assert_eq!(ri_consideration_set(&p, SubsetMask::new(0b101)).bits(), 0b001);
        let d = gen_rational_inattention(&p).unwrap();
        assert_eq!(d.prob(SubsetMask::new(0b111), 0).unwrap(), 1.0);
        assert_eq!(d.prob(SubsetMask::new(0b110), 1).unwrap(), 1.0);
    }

    #[test]
    fn stable_marginal_matches_hand_values() {
        let pi = ri_stable_marginal(&base()).unwrap();
        let expect = [0.4, 0.2667, 0.1905, 0.0762, 0.0417, 0.025];
        for (have, want) in pi.iter().zip(expect) {
            assert!((have - want).abs() < 5e-4, "{have} vs {want}");
        }
        let sum: f64 = pi.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn marginal_first_place_identity() {
        // pi(abc) + pi(acb) equals the grand-menu share of a
        let pi = ri_stable_marginal(&base()).unwrap();
        let d = gen_rational_inattention(&base()).unwrap();
        let share = d.prob(SubsetMask::new(0b111), 0).unwrap();
        assert!((pi[0] + pi[1] - share).abs() < 1e-12);
    }

    #[test]
    fn marginal_rum_reproduces_dataset() {
        let pi = ri_stable_marginal(&base()).unwrap();
        let rule = gen_rum(&ri_universe(), &pi).unwrap();
        let d = gen_rational_inattention(&base()).unwrap();
        for &menu in d.menus() {
            for alt in menu.members() {
                let have = rule.choice_prob(menu, alt).unwrap();
                let want = d.prob(menu, alt).unwrap();
                assert!((have - want).abs() < 1e-10, "menu {menu:?} alt {alt}");
            }
        }
    }

    #[test]
    fn factors_vanish_toward_threshold() {
        // delta just above d1: the two c-first orders carry ~zero mass
        let p = RiParams::new([0.5, 0.3, 0.2], 2.0 + 1e-9).unwrap();
        let pi = ri_stable_marginal(&p).unwrap();
        assert!(pi[4] < 1e-9 && pi[5] < 1e-9);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(RiParams::new([0.2, 0.3, 0.5], 1.0).is_err()); // unordered
        assert!(RiParams::new([0.5, 0.3, 0.2], 0.0).is_err()); // delta <= 0
        assert!(RiParams::new([0.5, 0.3, 0.2], 2.0).is_err()); // on a threshold
        assert!(matches!(
            ri_stable_marginal(&RiParams::new([0.5, 0.3, 0.2], 1.0).unwrap()),
            Err(ModelError::BadParams(_))
        ));
    }
}
