//! Dense two-phase tableau simplex with Bland's rule.
//!
//! The built-in reference engine: exact-ish, slow, and simple. It exists
//! to cross-check external backends on systems of desk size and to supply
//! Farkas vectors straight from the phase-1 duals. Refuses systems beyond
//! [`SimplexBackend::max_cols`] columns.

use super::{LpResult, LpStatus};
use crate::constraints::ConstraintSystem;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const PHASE1_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
pub struct SimplexBackend {
    pub max_cols: usize,
    pub max_cells: u64,
}

impl Default for SimplexBackend {
    fn default() -> Self {
        SimplexBackend {
            max_cols: 10_000,
            max_cells: 80_000_000,
        }
    }
}

struct Tableau {
    m: usize,
    /// structural columns
    n: usize,
    /// total columns (structural + artificial)
    w: usize,
    t: Vec<f64>,
    b: Vec<f64>,
    r: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    dead: Vec<bool>,
    pivots: u64,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.w + j]
    }

    fn pivot(&mut self, irow: usize, jcol: usize) {
        let w = self.w;
        let piv = self.t[irow * w + jcol];
        let inv = 1.0 / piv;
        for x in &mut self.t[irow * w..(irow + 1) * w] {
            *x *= inv;
        }
        self.b[irow] *= inv;
        self.t[irow * w + jcol] = 1.0;
        for i in 0..self.m {
            if i == irow {
                continue;
            }
            let f = self.t[i * w + jcol];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                self.t[i * w + j] -= f * self.t[irow * w + j];
            }
            self.t[i * w + jcol] = 0.0;
            self.b[i] -= f * self.b[irow];
        }
        let f = self.r[jcol];
        if f != 0.0 {
            for j in 0..w {
                self.r[j] -= f * self.t[irow * w + j];
            }
            self.r[jcol] = 0.0;
        }
        self.in_basis[self.basis[irow]] = false;
        self.in_basis[jcol] = true;
        self.basis[irow] = jcol;
        self.pivots += 1;
    }

    /// Bland iteration until optimality of the maintained cost row.
    /// `allow` marks columns permitted to enter. Returns false on an
    /// unbounded direction.
    fn run(&mut self, allow: &[bool], max_pivots: u64) -> Result<bool, String> {
        loop {
            if self.pivots > max_pivots {
                return Err(format!("pivot limit {max_pivots} exceeded"));
            }
            // entering: smallest eligible index with negative reduced cost
            let mut entering = None;
            for j in 0..self.w {
                if allow[j] && !self.in_basis[j] && self.r[j] < -COST_TOL {
                    entering = Some(j);
                    break;
                }
            }
            let Some(e) = entering else {
                return Ok(true);
            };
            // leaving: minimum ratio, ties by smallest basis variable
            let mut best: Option<(f64, usize, usize)> = None;
            for i in 0..self.m {
                if self.dead[i] {
                    continue;
                }
                let a = self.at(i, e);
                if a > PIVOT_TOL {
                    let ratio = self.b[i].max(0.0) / a;
                    let key = (ratio, self.basis[i]);
                    match best {
                        None => best = Some((key.0, key.1, i)),
                        Some((br, bv, _)) => {
                            if ratio < br - 1e-12 || (ratio < br + 1e-12 && self.basis[i] < bv) {
                                best = Some((ratio, self.basis[i], i));
                            }
                        }
                    }
                }
            }
            let Some((_, _, irow)) = best else {
                return Ok(false);
            };
            self.pivot(irow, e);
        }
    }
}

impl SimplexBackend {
    fn solve_impl(&self, system: &ConstraintSystem, minimize: Option<&[f64]>) -> LpResult {
        let m = system.n_rows();
        let n = system.n_cols();
        if n > self.max_cols {
            return LpResult::failure(format!(
                "dense reference simplex caps at {} columns, system has {n}",
                self.max_cols
            ));
        }
        let w = n + m;
        if (m as u64) * (w as u64) > self.max_cells {
            return LpResult::failure(format!(
                "dense tableau {m} x {w} exceeds the cell cap"
            ));
        }

        // rows with negative right-hand side are flipped so b >= 0
        let mut flip = vec![1.0f64; m];
        let mut b: Vec<f64> = system.rhs().to_vec();
        for i in 0..m {
            if b[i] < 0.0 {
                flip[i] = -1.0;
                b[i] = -b[i];
            }
        }
        let mut t = vec![0.0f64; m * w];
        for &(i, j, x) in system.triplets() {
            t[i as usize * w + j as usize] += x as f64 * flip[i as usize];
        }
        for i in 0..m {
            t[i * w + n + i] = 1.0;
        }

        // phase-1 reduced costs: cost 1 on artificials, basis = artificials
        let mut r = vec![0.0f64; w];
        for j in 0..n {
            let mut colsum = 0.0;
            for i in 0..m {
                colsum += t[i * w + j];
            }
            r[j] = -colsum;
        }
        let mut tab = Tableau {
            m,
            n,
            w,
            t,
            b,
            r,
            basis: (n..n + m).collect(),
            in_basis: {
                let mut v = vec![false; w];
                for j in n..w {
                    v[j] = true;
                }
                v
            },
            dead: vec![false; m],
            pivots: 0,
        };

        let max_pivots = 50 * (m as u64 + n as u64) + 10_000;
        let allow_all: Vec<bool> = vec![true; w];
        match tab.run(&allow_all, max_pivots) {
            Err(e) => return LpResult::failure(format!("phase 1: {e}")),
            Ok(false) => return LpResult::failure("phase 1 reported an unbounded direction"),
            Ok(true) => {}
        }

        let obj1: f64 = (0..m)
            .filter(|&i| tab.basis[i] >= n)
            .map(|i| tab.b[i])
            .sum();
        if obj1 > PHASE1_TOL {
            // infeasible: phase-1 duals are the Farkas vector
            let y: Vec<f64> = (0..m).map(|i| flip[i] * (1.0 - tab.r[n + i])).collect();
            return LpResult {
                status: LpStatus::Infeasible,
                v: None,
                objective: None,
                residual: None,
                farkas: Some(y),
                iterations: tab.pivots,
                message: None,
            };
        }

        // drive remaining artificials out of the basis
        for i in 0..m {
            if tab.basis[i] < n {
                continue;
            }
            let mut found = None;
            for j in 0..n {
                if !tab.in_basis[j] && tab.at(i, j).abs() > 1e-7 {
                    found = Some(j);
                    break;
                }
            }
            match found {
                Some(j) => tab.pivot(i, j),
                None => tab.dead[i] = true, // redundant row
            }
        }

        if let Some(c) = minimize {
            // phase-2 reduced costs from the real objective
            let mut r = vec![0.0f64; w];
            r[..n].copy_from_slice(c);
            for i in 0..m {
                if tab.dead[i] {
                    continue;
                }
                let cb = if tab.basis[i] < n { c[tab.basis[i]] } else { 0.0 };
                if cb == 0.0 {
                    continue;
                }
                for j in 0..w {
                    r[j] -= cb * tab.at(i, j);
                }
            }
            for j in 0..n {
                if tab.in_basis[j] {
                    r[j] = 0.0;
                }
            }
            tab.r = r;
            let mut allow = vec![false; w];
            allow[..n].fill(true); // artificials stay barred
            match tab.run(&allow, max_pivots) {
                Err(e) => return LpResult::failure(format!("phase 2: {e}")),
                Ok(false) => {
                    return LpResult::failure(
                        "phase 2 found an unbounded direction on a bounded polytope",
                    )
                }
                Ok(true) => {}
            }
        }

        let mut v = vec![0.0f64; n];
        for i in 0..m {
            if tab.basis[i] < n {
                v[tab.basis[i]] = tab.b[i].max(0.0);
            }
        }
        LpResult {
            status: LpStatus::Feasible,
            v: Some(v),
            objective: None,
            residual: None,
            farkas: None,
            iterations: tab.pivots,
            message: None,
        }
    }
}

impl super::LpBackend for SimplexBackend {
    fn name(&self) -> &'static str {
        "simplex"
    }

    fn solve_min(&self, system: &ConstraintSystem, minimize: Option<&[f64]>) -> LpResult {
        self.solve_impl(system, minimize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::LpBackend;

    #[test]
    fn pins_single_variable() {
        // x1 = 0.3; x1 + x2 = 1
        let sys = ConstraintSystem::from_raw(
            2,
            2,
            vec![(0, 0, 1), (1, 0, 1), (1, 1, 1)],
            vec![0.3, 1.0],
        );
        let backend = SimplexBackend::default();
        let res = backend.solve_min(&sys, None);
        assert_eq!(res.status, LpStatus::Feasible);
        let v = res.v.unwrap();
        assert!((v[0] - 0.3).abs() < 1e-9 && (v[1] - 0.7).abs() < 1e-9);
    }

    #[test]
    fn maximizes_against_bound() {
        // x1 + x2 = 1, minimize -x1 => x1 = 1
        let sys = ConstraintSystem::from_raw(1, 2, vec![(0, 0, 1), (0, 1, 1)], vec![1.0]);
        let backend = SimplexBackend::default();
        let res = backend.solve_min(&sys, Some(&[-1.0, 0.0]));
        let v = res.v.unwrap();
        assert!((v[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn redundant_rows_tolerated() {
        // duplicated constraint
        let sys = ConstraintSystem::from_raw(
            2,
            2,
            vec![(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)],
            vec![1.0, 1.0],
        );
        let backend = SimplexBackend::default();
        let res = backend.solve_min(&sys, Some(&[1.0, 2.0]));
        assert_eq!(res.status, LpStatus::Feasible);
        let v = res.v.unwrap();
        assert!((v[0] - 1.0).abs() < 1e-9 && v[1].abs() < 1e-9);
    }

    #[test]
    fn column_cap_is_a_numerical_failure() {
        let sys = ConstraintSystem::from_raw(1, 2, vec![(0, 0, 1), (0, 1, 1)], vec![1.0]);
        let backend = SimplexBackend {
            max_cols: 1,
            ..Default::default()
        };
        let res = backend.solve_min(&sys, None);
        assert_eq!(res.status, LpStatus::NumericalFailure);
    }
}
