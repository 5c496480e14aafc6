//! Interior-point backend via the Clarabel conic solver.
//!
//! The system is posed as `min c'x  s.t.  [G; -I] x + s = (g; 0)` with a
//! zero cone on the equality block and a nonnegative cone on the identity
//! block. On primal infeasibility Clarabel's dual vector restricted to the
//! equality block is (up to sign) a Farkas certificate, which the caller
//! re-verifies by direct multiplication.

use super::{LpResult, LpStatus};
use crate::constraints::ConstraintSystem;
use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, NonnegativeConeT, SolverStatus, ZeroConeT,
};

#[derive(Clone, Copy, Debug)]
pub struct ClarabelBackend {
    pub max_iter: u32,
}

impl Default for ClarabelBackend {
    fn default() -> Self {
        ClarabelBackend { max_iter: 200 }
    }
}

impl super::LpBackend for ClarabelBackend {
    fn name(&self) -> &'static str {
        "clarabel"
    }

    fn solve_min(&self, system: &ConstraintSystem, minimize: Option<&[f64]>) -> LpResult {
        let m = system.n_rows();
        let d = system.n_cols();

        // stacked constraint matrix [G; -I]
        let (colptr, rows, vals) = system.to_csc();
        let mut colptr2 = Vec::with_capacity(d + 1);
        let mut rows2 = Vec::with_capacity(rows.len() + d);
        let mut vals2 = Vec::with_capacity(vals.len() + d);
        colptr2.push(0usize);
        for j in 0..d {
            for p in colptr[j]..colptr[j + 1] {
                rows2.push(rows[p]);
                vals2.push(vals[p]);
            }
            rows2.push(m + j);
            vals2.push(-1.0);
            colptr2.push(rows2.len());
        }
        let a = CscMatrix::new(m + d, d, colptr2, rows2, vals2);
        let mut b = vec![0.0f64; m + d];
        b[..m].copy_from_slice(system.rhs());
        let cones = [ZeroConeT(m), NonnegativeConeT(d)];

        let p = CscMatrix::<f64>::zeros((d, d));
        let q: Vec<f64> = match minimize {
            Some(c) => c.to_vec(),
            None => vec![0.0; d],
        };

        let settings = match DefaultSettingsBuilder::default()
            .verbose(false)
            .max_iter(self.max_iter)
            .tol_feas(1e-10)
            .tol_gap_abs(1e-10)
            .tol_gap_rel(1e-10)
            .build()
        {
            Ok(s) => s,
            Err(e) => return LpResult::failure(format!("settings: {e}")),
        };
        let mut solver = DefaultSolver::new(&p, &q, &a, &b, &cones, settings);
        solver.solve();
        let sol = &solver.solution;
        let iterations = sol.iterations as u64;

        match sol.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => LpResult {
                status: LpStatus::Feasible,
                v: Some(sol.x.clone()),
                objective: None,
                residual: None,
                farkas: None,
                iterations,
                message: None,
            },
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
                // z satisfies G'z = w >= 0 and g'z < 0; negate for the
                // sign convention y'G <= 0, y'g > 0
                let y: Vec<f64> = sol.z[..m].iter().map(|&x| -x).collect();
                LpResult {
                    status: LpStatus::Infeasible,
                    v: None,
                    objective: None,
                    residual: None,
                    farkas: Some(y),
                    iterations,
                    message: None,
                }
            }
            other => LpResult {
                status: LpStatus::NumericalFailure,
                v: None,
                objective: None,
                residual: None,
                farkas: None,
                iterations,
                message: Some(format!("solver status {other:?}")),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::LpBackend;

    #[test]
    fn equality_with_nonnegativity() {
        // x1 + x2 = 1, minimize x1 - x2: optimum (0, 1)
        let sys = ConstraintSystem::from_raw(1, 2, vec![(0, 0, 1), (0, 1, 1)], vec![1.0]);
        let backend = ClarabelBackend::default();
        let res = backend.solve_min(&sys, Some(&[1.0, -1.0]));
        assert_eq!(res.status, LpStatus::Feasible);
        let v = res.v.unwrap();
        assert!(v[0].abs() < 1e-7 && (v[1] - 1.0).abs() < 1e-7);
    }
}
