//! Assembly of the sparse equality system `g = G v`.
//!
//! Row blocks, in order:
//! - `B`: one row per observed (alternative, menu) pair — the induced
//!   choice probability must match the data.
//! - `O`: one row per nonempty menu (observed or not) — each menu's
//!   distribution sums to one.
//! - `F` (full mode only): one row per infeasible `(menu, order, set)`
//!   triple, pinning it to zero. Reduced mode simply never creates those
//!   columns.
//! - `S`: stability against the grand-set reference menu: for every other
//!   menu and order, the marginals agree. Pairwise equalities follow by
//!   transitivity at a fraction of the rows.
//! - `M`: set-monotonicity on cover pairs `A ⊂ A ∪ {x}` with a dedicated
//!   slack column per row turning the inequality into an equality. Chained
//!   cover pairs imply the inequality for arbitrary nested menus.
//!
//! All coefficients are -1, 0, or 1; the right-hand side is the observed
//! probabilities, then ones on the `O` rows, then zeros.

use crate::domain::{
    ChoiceDataset, DomainError, Mode, PreferenceOrder, RaumRule, SubsetMask, VarIndex,
};
use std::io::{BufRead, Write};
use thiserror::Error;

/// Hard cap on the number of stored nonzeros; builds predicted to exceed
/// it are refused before any allocation.
pub const MAX_NNZ: u64 = 150_000_000;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("system too large: {0}")]
    TooLarge(String),
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub mode: Mode,
    pub stability: bool,
    pub monotonicity: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            mode: Mode::Reduced,
            stability: true,
            monotonicity: true,
        }
    }
}

/// Block tag and semantic payload of a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowLabel {
    DataFit {
        menu: SubsetMask,
        alt: u8,
    },
    Normalization {
        menu: SubsetMask,
    },
    Feasibility {
        menu: SubsetMask,
        order_pos: u32,
        set: SubsetMask,
    },
    Stability {
        menu: SubsetMask,
        reference: SubsetMask,
        order_pos: u32,
    },
    Monotonicity {
        menu_small: SubsetMask,
        menu_large: SubsetMask,
        order_pos: u32,
        set: SubsetMask,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColLabel {
    Pi {
        menu: SubsetMask,
        order_pos: u32,
        set: SubsetMask,
    },
    Slack {
        menu_small: SubsetMask,
        menu_large: SubsetMask,
        order_pos: u32,
        set: SubsetMask,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemStats {
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    pub sparsity: f64,
}

/// The assembled system in triplet (coordinate) form.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    triplets: Vec<(u32, u32, i8)>,
    rhs: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
    n_pi_cols: usize,
    mode: Mode,
    row_labels: Vec<RowLabel>,
    col_labels: Vec<ColLabel>,
    index: Option<VarIndex>,
}

impl ConstraintSystem {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Columns carrying rule mass (the remainder are slacks).
    pub fn n_pi_cols(&self) -> usize {
        self.n_pi_cols
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn triplets(&self) -> &[(u32, u32, i8)] {
        &self.triplets
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn row_labels(&self) -> &[RowLabel] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[ColLabel] {
        &self.col_labels
    }

    /// The index map used during assembly (absent on systems read back
    /// from a text export).
    pub fn index(&self) -> Option<&VarIndex> {
        self.index.as_ref()
    }

    pub fn stats(&self) -> SystemStats {
        let nnz = self.triplets.len();
        SystemStats {
            rows: self.n_rows,
            cols: self.n_cols,
            nnz,
            sparsity: nnz as f64 / (self.n_rows as f64 * self.n_cols as f64),
        }
    }

    /// `G v` for a dense `v`.
    pub fn multiply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n_cols);
        let mut out = vec![0.0; self.n_rows];
        for &(r, c, x) in &self.triplets {
            out[r as usize] += x as f64 * v[c as usize];
        }
        out
    }

    /// `G' y` for a dense `y`.
    pub fn multiply_transpose(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.n_rows);
        let mut out = vec![0.0; self.n_cols];
        for &(r, c, x) in &self.triplets {
            out[c as usize] += x as f64 * y[r as usize];
        }
        out
    }

    /// Max-norm of the equality residual `G v - g`.
    pub fn residual(&self, v: &[f64]) -> f64 {
        self.multiply(v)
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Column-compressed view `(col_ptr, row_idx, values)`.
    pub fn to_csc(&self) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &(_, c, _) in &self.triplets {
            counts[c as usize + 1] += 1;
        }
        for i in 0..self.n_cols {
            counts[i + 1] += counts[i];
        }
        let mut row_idx = vec![0usize; self.triplets.len()];
        let mut values = vec![0.0f64; self.triplets.len()];
        let mut cursor = counts.clone();
        for &(r, c, x) in &self.triplets {
            let p = cursor[c as usize];
            row_idx[p] = r as usize;
            values[p] = x as f64;
            cursor[c as usize] += 1;
        }
        (counts, row_idx, values)
    }

    /// Dense row-major copy; refuses matrices above ~2e8 entries.
    pub fn to_dense(&self) -> Result<Vec<f64>, BuildError> {
        let cells = self.n_rows as u64 * self.n_cols as u64;
        if cells > 200_000_000 {
            return Err(BuildError::TooLarge(format!(
                "{} x {} dense copy refused",
                self.n_rows, self.n_cols
            )));
        }
        let mut dense = vec![0.0; cells as usize];
        for &(r, c, x) in &self.triplets {
            dense[r as usize * self.n_cols + c as usize] = x as f64;
        }
        Ok(dense)
    }

    /// Assemble a raw system (used by tests and the text importer). Labels
    /// and index maps are absent.
    pub fn from_raw(
        n_rows: usize,
        n_cols: usize,
        triplets: Vec<(u32, u32, i8)>,
        rhs: Vec<f64>,
    ) -> Self {
        assert_eq!(rhs.len(), n_rows);
        let mut triplets = triplets;
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        ConstraintSystem {
            triplets,
            rhs,
            n_rows,
            n_cols,
            n_pi_cols: n_cols,
            mode: Mode::Reduced,
            row_labels: Vec::new(),
            col_labels: Vec::new(),
            index: None,
        }
    }

    /// Text export: header `rows cols nnz`, one 0-based `row col value`
    /// triplet per line, then the right-hand side one value per line.
    pub fn write_text<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{} {} {}", self.n_rows, self.n_cols, self.triplets.len())?;
        for &(r, c, x) in &self.triplets {
            writeln!(w, "{} {} {}", r, c, x)?;
        }
        for &g in &self.rhs {
            writeln!(w, "{}", g)?;
        }
        Ok(())
    }

    /// Parse the text export format back into a raw system.
    pub fn read_text<R: BufRead>(r: &mut R) -> std::io::Result<Self> {
        let bad = |m: &str| std::io::Error::new(std::io::ErrorKind::InvalidData, m.to_string());
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| bad("empty export"))??;
        let mut it = header.split_whitespace();
        let n_rows: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad header"))?;
        let n_cols: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad header"))?;
        let nnz: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad header"))?;
        let mut triplets = Vec::with_capacity(nnz);
        for _ in 0..nnz {
            let line = lines.next().ok_or_else(|| bad("truncated triplets"))??;
            let mut it = line.split_whitespace();
            let r: u32 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("bad triplet"))?;
            let c: u32 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("bad triplet"))?;
            let v: i8 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("bad triplet"))?;
            triplets.push((r, c, v));
        }
        let mut rhs = Vec::with_capacity(n_rows);
        for _ in 0..n_rows {
            let line = lines.next().ok_or_else(|| bad("truncated rhs"))??;
            rhs.push(line.trim().parse().map_err(|_| bad("bad rhs value"))?);
        }
        Ok(ConstraintSystem::from_raw(n_rows, n_cols, triplets, rhs))
    }
}

/// Exact predicted dimensions of a build, computed without assembling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimEstimate {
    pub rows: u64,
    pub cols: u64,
    pub nnz: u64,
}

/// Predict system dimensions for `n` alternatives and `k_orders` carried
/// orders. `observed` lists the observed menus (the B block); everything
/// else ranges over all nonempty menus.
pub fn predict_dims(
    n: usize,
    k_orders: u64,
    observed: &[SubsetMask],
    opts: &BuildOptions,
) -> DimEstimate {
    let n_sets = (1u64 << n) - 1;
    let k = k_orders;
    let menu_sets = |m: SubsetMask| (1u64 << m.len()) - 1;

    let b_rows: u64 = observed.iter().map(|m| m.len() as u64).sum();
    let b_nnz: u64 = observed.iter().map(|&m| k * menu_sets(m)).sum();

    let all_menus: Vec<SubsetMask> = SubsetMask::full(n).nonempty_subsets().collect();
    let o_rows = n_sets;
    let o_nnz: u64 = match opts.mode {
        Mode::Full => n_sets * k * n_sets,
        Mode::Reduced => all_menus.iter().map(|&m| k * menu_sets(m)).sum(),
    };

    let (f_rows, f_nnz) = match opts.mode {
        Mode::Full => {
            let r: u64 = all_menus.iter().map(|&m| k * (n_sets - menu_sets(m))).sum();
            (r, r)
        }
        Mode::Reduced => (0, 0),
    };

    let (s_rows, s_nnz) = if opts.stability {
        let r = (n_sets - 1) * k;
        let nnz: u64 = all_menus
            .iter()
            .filter(|&&m| m != SubsetMask::full(n))
            .map(|&m| {
                let own = match opts.mode {
                    Mode::Full => n_sets,
                    Mode::Reduced => menu_sets(m),
                };
                k * (own + n_sets)
            })
            .sum();
        (r, nnz)
    } else {
        (0, 0)
    };

    let (m_rows, m_nnz) = if opts.monotonicity {
        let r: u64 = all_menus
            .iter()
            .map(|&m| k * (n as u64 - m.len() as u64) * menu_sets(m))
            .sum();
        (r, 3 * r)
    } else {
        (0, 0)
    };

    let pi_cols = match opts.mode {
        Mode::Full => n_sets * k * n_sets,
        Mode::Reduced => all_menus.iter().map(|&m| k * menu_sets(m)).sum(),
    };

    DimEstimate {
        rows: b_rows + o_rows + f_rows + s_rows + m_rows,
        cols: pi_cols + m_rows,
        nnz: b_nnz + o_nnz + f_nnz + s_nnz + m_nnz,
    }
}

/// Build the constraint system of a dataset under the given options,
/// optionally restricting preference orders to a whitelist.
pub fn build_system_with_orders(
    dataset: &ChoiceDataset,
    opts: &BuildOptions,
    whitelist: Option<&[PreferenceOrder]>,
) -> Result<ConstraintSystem, BuildError> {
    let index = VarIndex::new(dataset, opts.mode, whitelist)?;
    let universe = dataset.universe();
    let n = universe.n();
    let full = universe.full_mask();
    let k = index.n_orders();

    let est = predict_dims(n, k as u64, dataset.menus(), opts);
    if est.nnz > MAX_NNZ {
        return Err(BuildError::TooLarge(format!(
            "predicted {} nonzeros exceeds the {} cap",
            est.nnz, MAX_NNZ
        )));
    }
    if est.rows > u32::MAX as u64 || est.cols > u32::MAX as u64 {
        return Err(BuildError::TooLarge(format!(
            "predicted {} x {} exceeds 32-bit indexing",
            est.rows, est.cols
        )));
    }

    let mut triplets: Vec<(u32, u32, i8)> = Vec::with_capacity(est.nnz as usize);
    let mut rhs: Vec<f64> = Vec::with_capacity(est.rows as usize);
    let mut row_labels: Vec<RowLabel> = Vec::with_capacity(est.rows as usize);
    let mut col_labels: Vec<ColLabel> = Vec::with_capacity(est.cols as usize);
    for col in 0..index.n_pi_cols() {
        let (menu, pos, set) = index.col_triple(col);
        col_labels.push(ColLabel::Pi {
            menu,
            order_pos: pos as u32,
            set,
        });
    }

    let mut row: u32 = 0;

    // B block: observed choice probabilities
    for &menu in dataset.menus() {
        // bucket feasible (order, set) columns by the winning alternative
        let mut by_alt: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (pos, order) in index.orders().iter().enumerate() {
            for set in menu.nonempty_subsets() {
                let winner = order.best_in(set).unwrap();
                by_alt[winner as usize].push(index.col(menu, pos, set) as u32);
            }
        }
        for alt in menu.members() {
            let mut cols = std::mem::take(&mut by_alt[alt as usize]);
            cols.sort_unstable();
            for c in cols {
                triplets.push((row, c, 1));
            }
            rhs.push(dataset.prob(menu, alt).unwrap());
            row_labels.push(RowLabel::DataFit { menu, alt });
            row += 1;
        }
    }

    // O block: every menu's distribution sums to one
    for menu in full.nonempty_subsets() {
        for pos in 0..k {
            match opts.mode {
                Mode::Full => {
                    for set in full.nonempty_subsets() {
                        triplets.push((row, index.col(menu, pos, set) as u32, 1));
                    }
                }
                Mode::Reduced => {
                    for set in menu.nonempty_subsets() {
                        triplets.push((row, index.col(menu, pos, set) as u32, 1));
                    }
                }
            }
        }
        rhs.push(1.0);
        row_labels.push(RowLabel::Normalization { menu });
        row += 1;
    }

    // F block (full mode): infeasible triples pinned to zero
    if opts.mode == Mode::Full {
        for menu in full.nonempty_subsets() {
            for pos in 0..k {
                for set in full.nonempty_subsets() {
                    if set.is_subset_of(menu) {
                        continue;
                    }
                    triplets.push((row, index.col(menu, pos, set) as u32, 1));
                    rhs.push(0.0);
                    row_labels.push(RowLabel::Feasibility {
                        menu,
                        order_pos: pos as u32,
                        set,
                    });
                    row += 1;
                }
            }
        }
    }

    // S block: marginals agree with the grand-set reference menu
    if opts.stability {
        for menu in full.nonempty_subsets() {
            if menu == full {
                continue;
            }
            for pos in 0..k {
                match opts.mode {
                    Mode::Full => {
                        for set in full.nonempty_subsets() {
                            triplets.push((row, index.col(menu, pos, set) as u32, 1));
                        }
                    }
                    Mode::Reduced => {
                        for set in menu.nonempty_subsets() {
                            triplets.push((row, index.col(menu, pos, set) as u32, 1));
                        }
                    }
                }
                for set in full.nonempty_subsets() {
                    triplets.push((row, index.col(full, pos, set) as u32, -1));
                }
                rhs.push(0.0);
                row_labels.push(RowLabel::Stability {
                    menu,
                    reference: full,
                    order_pos: pos as u32,
                });
                row += 1;
            }
        }
    }

    // M block: cover-pair monotonicity with slack identities
    let mut slack_col = index.n_pi_cols() as u32;
    if opts.monotonicity {
        for menu in full.nonempty_subsets() {
            for x in full.minus(menu).members() {
                let larger = menu.with(x);
                for pos in 0..k {
                    for set in menu.nonempty_subsets() {
                        triplets.push((row, index.col(menu, pos, set) as u32, 1));
                        triplets.push((row, index.col(larger, pos, set) as u32, -1));
                        triplets.push((row, slack_col, -1));
                        col_labels.push(ColLabel::Slack {
                            menu_small: menu,
                            menu_large: larger,
                            order_pos: pos as u32,
                            set,
                        });
                        slack_col += 1;
                        rhs.push(0.0);
                        row_labels.push(RowLabel::Monotonicity {
                            menu_small: menu,
                            menu_large: larger,
                            order_pos: pos as u32,
                            set,
                        });
                        row += 1;
                    }
                }
            }
        }
    }

    // assembly above is row-major; the sort is a determinism guarantee,
    // not a correction
    triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));

    let system = ConstraintSystem {
        triplets,
        rhs,
        n_rows: row as usize,
        n_cols: slack_col as usize,
        n_pi_cols: index.n_pi_cols() as usize,
        mode: opts.mode,
        row_labels,
        col_labels,
        index: Some(index),
    };
    debug_assert_eq!(system.n_rows as u64, est.rows);
    debug_assert_eq!(system.n_cols as u64, est.cols);
    debug_assert_eq!(system.triplets.len() as u64, est.nnz);
    Ok(system)
}

/// [`build_system_with_orders`] over the unrestricted set of orders.
pub fn build_system(
    dataset: &ChoiceDataset,
    opts: &BuildOptions,
) -> Result<ConstraintSystem, BuildError> {
    build_system_with_orders(dataset, opts, None)
}

/// Arrange a rule's values (and implied monotonicity slacks) into a
/// solution vector for `system`. The result satisfies `G v = g` exactly
/// when the rule represents the dataset the system was built from.
pub fn embed_rule(system: &ConstraintSystem, rule: &RaumRule) -> Result<Vec<f64>, DomainError> {
    let index = system
        .index()
        .ok_or_else(|| DomainError::BadRule("system has no index map".into()))?;
    if index.universe() != rule.universe() {
        return Err(DomainError::UniverseMismatch);
    }
    let mut v = vec![0.0; system.n_cols()];
    for col in 0..index.n_pi_cols() {
        let (menu, pos, set) = index.col_triple(col);
        let order = &index.orders()[pos];
        v[col as usize] = rule.value(menu, order.rank(), set);
    }
    for (c, label) in system.col_labels().iter().enumerate() {
        if let ColLabel::Slack {
            menu_small,
            menu_large,
            order_pos,
            set,
        } = label
        {
            let order = &index.orders()[*order_pos as usize];
            let slack = rule.value(*menu_small, order.rank(), *set)
                - rule.value(*menu_large, order.rank(), *set);
            v[c] = slack.max(0.0);
        }
    }
    Ok(v)
}
