//! Canonical maps between semantic objects and system rows/columns.

use super::dataset::ChoiceDataset;
use super::order::PreferenceOrder;
use super::subset::SubsetMask;
use super::universe::Universe;
use super::DomainError;
use std::collections::HashMap;

/// Column layout of assembled systems.
///
/// `Full` materializes a column for every `(menu, order, set)` triple and
/// zeroes infeasible ones with explicit rows; `Reduced` (the default) only
/// creates columns with `set` inside `menu`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Full,
    Reduced,
}

/// Deterministic row/column numbering shared by every module.
///
/// Rows: observed (alternative, menu) pairs, menus in dataset order and
/// alternatives ascending within each menu. Columns: menus in increasing
/// mask value, orders in rank order (restricted to the whitelist when one
/// is supplied), consideration sets in increasing mask value; in full mode
/// this is `(menu_index * n_orders + order_pos) * n_sets + (set - 1)`.
#[derive(Clone, Debug)]
pub struct VarIndex {
    universe: Universe,
    mode: Mode,
    orders: Vec<PreferenceOrder>,
    order_pos: Vec<u32>,
    reduced_base: Vec<u64>,
    n_pi_cols: u64,
    rows: Vec<(u8, SubsetMask)>,
    row_of: HashMap<(u8, u32), u32>,
}

impl VarIndex {
    pub fn new(
        dataset: &ChoiceDataset,
        mode: Mode,
        whitelist: Option<&[PreferenceOrder]>,
    ) -> Result<Self, DomainError> {
        let universe = dataset.universe().clone();
        let n = universe.n();
        let all = universe.n_orders();

        let orders: Vec<PreferenceOrder> = match whitelist {
            None => super::universe::enumerate_orders(&universe),
            Some(list) => {
                if list.is_empty() {
                    return Err(DomainError::EmptyWhitelist);
                }
                let mut seen = vec![false; all as usize];
                let mut out = Vec::with_capacity(list.len());
                for o in list {
                    if o.n() != n {
                        return Err(DomainError::BadOrder(format!(
                            "order over {} alternatives in a universe of {n}",
                            o.n()
                        )));
                    }
                    if !seen[o.rank() as usize] {
                        seen[o.rank() as usize] = true;
                        out.push(o.clone());
                    }
                }
                out.sort_by_key(|o| o.rank());
                out
            }
        };

        let mut order_pos = vec![u32::MAX; all as usize];
        for (pos, o) in orders.iter().enumerate() {
            order_pos[o.rank() as usize] = pos as u32;
        }

        let n_sets = universe.n_sets() as u64;
        let k = orders.len() as u64;
        let mut reduced_base = Vec::with_capacity(n_sets as usize);
        let mut acc = 0u64;
        for menu in universe.full_mask().nonempty_subsets() {
            reduced_base.push(acc);
            acc += k * ((1u64 << menu.len()) - 1);
        }
        let n_pi_cols = match mode {
            Mode::Full => n_sets * k * n_sets,
            Mode::Reduced => acc,
        };

        let rows = dataset.observed_pairs();
        let mut row_of = HashMap::with_capacity(rows.len());
        for (i, &(alt, menu)) in rows.iter().enumerate() {
            row_of.insert((alt, menu.bits()), i as u32);
        }

        Ok(VarIndex {
            universe,
            mode,
            orders,
            order_pos,
            reduced_base,
            n_pi_cols,
            rows,
            row_of,
        })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Orders carried by the system, in rank order.
    pub fn orders(&self) -> &[PreferenceOrder] {
        &self.orders
    }

    pub fn n_orders(&self) -> usize {
        self.orders.len()
    }

    /// Position of an order (by rank) among the carried orders.
    pub fn position_of(&self, rank: u64) -> Option<usize> {
        match self.order_pos[rank as usize] {
            u32::MAX => None,
            p => Some(p as usize),
        }
    }

    /// Number of data-fit rows (observed pairs).
    pub fn n_b_rows(&self) -> usize {
        self.rows.len()
    }

    /// Row of an observed (alternative, menu) pair.
    pub fn row(&self, alt: u8, menu: SubsetMask) -> Option<u32> {
        self.row_of.get(&(alt, menu.bits())).copied()
    }

    /// The observed pair of a data-fit row.
    pub fn row_pair(&self, row: u32) -> (u8, SubsetMask) {
        self.rows[row as usize]
    }

    pub fn n_pi_cols(&self) -> u64 {
        self.n_pi_cols
    }

    /// Column of `(menu, order at position order_pos, set)`. In reduced
    /// mode `set` must be inside `menu`.
    pub fn col(&self, menu: SubsetMask, order_pos: usize, set: SubsetMask) -> u64 {
        let n_sets = self.universe.n_sets() as u64;
        let k = self.orders.len() as u64;
        match self.mode {
            Mode::Full => {
                ((menu.bits() as u64 - 1) * k + order_pos as u64) * n_sets
                    + (set.bits() as u64 - 1)
            }
            Mode::Reduced => {
                debug_assert!(set.is_subset_of(menu));
                let local = (1u64 << menu.len()) - 1;
                self.reduced_base[menu.bits() as usize - 1]
                    + order_pos as u64 * local
                    + menu.subset_rank(set) as u64
            }
        }
    }

    /// Column of `(menu, order, set)` when the order is carried.
    pub fn col_of(
        &self,
        menu: SubsetMask,
        order: &PreferenceOrder,
        set: SubsetMask,
    ) -> Option<u64> {
        self.position_of(order.rank())
            .map(|pos| self.col(menu, pos, set))
    }

    /// Inverse of [`col`]: the `(menu, order position, set)` of a column.
    pub fn col_triple(&self, col: u64) -> (SubsetMask, usize, SubsetMask) {
        let n_sets = self.universe.n_sets() as u64;
        let k = self.orders.len() as u64;
        match self.mode {
            Mode::Full => {
                let set = SubsetMask::new((col % n_sets) as u32 + 1);
                let q = col / n_sets;
                let menu = SubsetMask::new((q / k) as u32 + 1);
                (menu, (q % k) as usize, set)
            }
            Mode::Reduced => {
                let menu_idx = match self.reduced_base.binary_search(&col) {
                    Ok(mut i) => {
                        // skip empty blocks that share a base offset
                        while i + 1 < self.reduced_base.len()
                            && self.reduced_base[i + 1] == col
                        {
                            i += 1;
                        }
                        i
                    }
                    Err(i) => i - 1,
                };
                let menu = SubsetMask::new(menu_idx as u32 + 1);
                let local = (1u64 << menu.len()) - 1;
                let off = col - self.reduced_base[menu_idx];
                let pos = (off / local) as usize;
                let set = menu.subset_at((off % local) as usize);
                (menu, pos, set)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::dataset::ChoiceDataset;

    fn complete_uniform(n: usize) -> ChoiceDataset {
        let u = Universe::letters(n).unwrap();
        let menus: Vec<SubsetMask> = u.full_mask().nonempty_subsets().collect();
        let probs = menus
            .iter()
            .map(|m| {
                let mut p = vec![0.0; n];
                let k = m.len() as f64;
                for a in m.members() {
                    p[a as usize] = 1.0 / k;
                }
                p
            })
            .collect();
        ChoiceDataset::new(u, menus, probs).unwrap()
    }

    #[test]
    fn full_mode_formula() {
        let d = complete_uniform(3);
        let ix = VarIndex::new(&d, Mode::Full, None).unwrap();
        // (menu_index * n! + rank) * (2^n - 1) + (set - 1)
        let menu = SubsetMask::new(0b101);
        let set = SubsetMask::new(0b010);
        assert_eq!(ix.col(menu, 4, set), ((4 * 6 + 4) * 7 + 1) as u64);
        assert_eq!(ix.n_pi_cols(), 7 * 6 * 7);
    }

    #[test]
    fn reduced_mode_counts() {
        // pi columns = n! * (3^n - 2^n)
        for n in 2..=4usize {
            let d = complete_uniform(n);
            let ix = VarIndex::new(&d, Mode::Reduced, None).unwrap();
            let expect = crate::domain::order::factorial(n)
                * (3u64.pow(n as u32) - 2u64.pow(n as u32));
            assert_eq!(ix.n_pi_cols(), expect);
        }
    }

    #[test]
    fn col_triple_roundtrip_both_modes() {
        let d = complete_uniform(3);
        for mode in [Mode::Full, Mode::Reduced] {
            let ix = VarIndex::new(&d, mode, None).unwrap();
            let mut next = 0u64;
            for menu in d.universe().full_mask().nonempty_subsets() {
                for pos in 0..ix.n_orders() {
                    for set in d.universe().full_mask().nonempty_subsets() {
                        if mode == Mode::Reduced && !set.is_subset_of(menu) {
                            continue;
                        }
                        let col = ix.col(menu, pos, set);
                        if mode == Mode::Reduced {
                            // reduced numbering is contiguous in (menu, pos, set)
                            // order, which pins the enumeration bijection
                            let expected = if menu.bits() == 1 && pos == 0 && set.bits() == 1 {
                                0
                            } else {
                                next
                            };
                            assert_eq!(col, expected);
                            next = col + 1;
                        }
                        assert_eq!(ix.col_triple(col), (menu, pos, set));
                    }
                }
            }
        }
    }

    #[test]
    fn whitelist_restricts_columns() {
        let d = complete_uniform(3);
        let white = vec![
            PreferenceOrder::from_rank(3, 5).unwrap(),
            PreferenceOrder::from_rank(3, 2).unwrap(),
            PreferenceOrder::from_rank(3, 2).unwrap(),
        ];
        let ix = VarIndex::new(&d, Mode::Reduced, Some(&white)).unwrap();
        assert_eq!(ix.n_orders(), 2);
        assert_eq!(ix.orders()[0].rank(), 2);
        assert_eq!(ix.position_of(5), Some(1));
        assert_eq!(ix.position_of(0), None);
        assert_eq!(ix.n_pi_cols(), 2 * (3u64.pow(3) - 2u64.pow(3)));
    }

    #[test]
    fn empty_whitelist_rejected() {
        let d = complete_uniform(2);
        assert!(matches!(
            VarIndex::new(&d, Mode::Reduced, Some(&[])),
            Err(DomainError::EmptyWhitelist)
        ));
    }

    #[test]
    fn rows_follow_dataset_order() {
        let u = Universe::letters(3).unwrap();
        let m1 = SubsetMask::new(0b110);
        let m2 = SubsetMask::new(0b011);
        let d = ChoiceDataset::new(
            u,
            vec![m1, m2],
            vec![vec![0.0, 0.5, 0.5], vec![0.5, 0.5, 0.0]],
        )
        .unwrap();
        let ix = VarIndex::new(&d, Mode::Reduced, None).unwrap();
        assert_eq!(ix.n_b_rows(), 4);
        assert_eq!(ix.row(1, m1), Some(0));
        assert_eq!(ix.row(2, m1), Some(1));
        assert_eq!(ix.row(0, m2), Some(2));
        assert_eq!(ix.row(1, m2), Some(3));
        assert_eq!(ix.row(0, m1), None);
    }
}
