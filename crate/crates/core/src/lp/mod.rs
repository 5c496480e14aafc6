//! Solver-agnostic optimization primitives over `{v >= 0 : Gv = g}`.
//!
//! Three operations cover every analysis in the crate: feasibility with a
//! certificate on both answers, optimization of a linear objective over
//! the polytope, and the nonnegative least-squares projection distance of
//! `g` onto the cone `{Gv : v >= 0}`.
//!
//! Verdicts are never taken on a backend's word alone: a claimed solution
//! is re-checked against the residual and sign constraints, and a claimed
//! infeasibility must ship a Farkas vector that passes
//! [`verify_farkas`]. A claim that fails verification degrades to
//! `NumericalFailure` rather than silently flipping the answer.

mod clarabel_backend;
mod nnls;
mod simplex;

pub use clarabel_backend::ClarabelBackend;
pub use nnls::{nnls, NnlsResult};
pub use simplex::SimplexBackend;

use crate::constraints::ConstraintSystem;
use thiserror::Error;

/// Residual tolerance for accepting a feasibility certificate. The system
/// is well-scaled (entries of `G` are unit, `g` holds probabilities), so a
/// single absolute tolerance is appropriate.
pub const FEAS_TOL: f64 = 1e-7;

/// Optimality tolerance for reported objective values.
pub const OPT_TOL: f64 = 1e-8;

/// Componentwise tolerance on `G'y <= 0` when checking a Farkas vector
/// normalized to unit max-norm.
pub const FARKAS_COL_TOL: f64 = 1e-8;

/// Required margin on `y'g > 0` for a normalized Farkas vector.
pub const FARKAS_GAP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Feasible,
    Infeasible,
    NumericalFailure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

/// Sparse linear objective over system columns.
#[derive(Clone, Debug)]
pub struct Objective {
    pub coeffs: Vec<(u32, f64)>,
    pub sense: Sense,
}

impl Objective {
    pub fn new(coeffs: Vec<(u32, f64)>, sense: Sense) -> Self {
        Objective { coeffs, sense }
    }

    pub fn dense(&self, n_cols: usize) -> Vec<f64> {
        let mut c = vec![0.0; n_cols];
        for &(j, x) in &self.coeffs {
            c[j as usize] += x;
        }
        c
    }

    pub fn value(&self, v: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .map(|&(j, x)| x * v[j as usize])
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct LpResult {
    pub status: LpStatus,
    /// Certificate solution when feasible.
    pub v: Option<Vec<f64>>,
    /// Objective value at `v` when an objective was supplied.
    pub objective: Option<f64>,
    /// Max-norm of `Gv - g` at the returned solution.
    pub residual: Option<f64>,
    /// Verified Farkas vector when infeasible.
    pub farkas: Option<Vec<f64>>,
    pub iterations: u64,
    /// Diagnostic detail for failures.
    pub message: Option<String>,
}

impl LpResult {
    pub fn failure(message: impl Into<String>) -> Self {
        LpResult {
            status: LpStatus::NumericalFailure,
            v: None,
            objective: None,
            residual: None,
            farkas: None,
            iterations: 0,
            message: Some(message.into()),
        }
    }
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// A feasibility/linear-programming engine for `{v >= 0 : Gv = g}`.
///
/// Implementations report raw claims; the free functions in this module
/// add the verification layer.
pub trait LpBackend: Sync {
    fn name(&self) -> &'static str;

    /// Solve the system, minimizing `minimize` when given (the wrapper
    /// handles `Max` by negation).
    fn solve_min(&self, system: &ConstraintSystem, minimize: Option<&[f64]>) -> LpResult;
}

/// Backend selection; `RAUM_SOLVER` chooses at runtime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BackendChoice {
    /// Interior-point backend (default).
    #[default]
    Clarabel,
    /// Built-in dense reference simplex.
    Simplex,
}

impl BackendChoice {
    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "clarabel" | "ipm" => Some(BackendChoice::Clarabel),
            "simplex" | "dense" => Some(BackendChoice::Simplex),
            _ => None,
        }
    }

    pub fn backend(self) -> Box<dyn LpBackend> {
        match self {
            BackendChoice::Clarabel => Box::new(ClarabelBackend::default()),
            BackendChoice::Simplex => Box::new(SimplexBackend::default()),
        }
    }
}

/// Backend named by the `RAUM_SOLVER` environment variable, or the
/// default. `Err` carries the unrecognized name.
pub fn backend_from_env() -> Result<Box<dyn LpBackend>, String> {
    match std::env::var("RAUM_SOLVER") {
        Ok(name) => BackendChoice::from_name(&name)
            .map(BackendChoice::backend)
            .ok_or(name),
        Err(_) => Ok(BackendChoice::default().backend()),
    }
}

/// Check a Farkas certificate by direct multiplication: after max-norm
/// normalization, `G'y` must be componentwise below [`FARKAS_COL_TOL`] and
/// `y'g` above [`FARKAS_GAP_TOL`].
pub fn verify_farkas(system: &ConstraintSystem, y: &[f64]) -> bool {
    if y.len() != system.n_rows() {
        return false;
    }
    let scale = y.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
    if !(scale > 0.0) || !scale.is_finite() {
        return false;
    }
    let yn: Vec<f64> = y.iter().map(|&x| x / scale).collect();
    let t = system.multiply_transpose(&yn);
    if t.iter().any(|&x| x > FARKAS_COL_TOL) {
        return false;
    }
    let gap: f64 = yn.iter().zip(system.rhs()).map(|(a, b)| a * b).sum();
    gap > FARKAS_GAP_TOL
}

fn verify_result(
    system: &ConstraintSystem,
    objective: Option<&Objective>,
    mut raw: LpResult,
) -> LpResult {
    match raw.status {
        LpStatus::Feasible => {
            let Some(v) = raw.v.as_ref() else {
                return LpResult::failure("backend reported feasible without a solution");
            };
            if v.len() != system.n_cols() {
                return LpResult::failure("backend returned a solution of the wrong size");
            }
            let min_v = v.iter().copied().fold(f64::INFINITY, f64::min);
            let residual = system.residual(v);
            if residual > FEAS_TOL || min_v < -FEAS_TOL {
                return LpResult::failure(format!(
                    "claimed solution fails verification: residual {residual:.3e}, min v {min_v:.3e}"
                ));
            }
            raw.residual = Some(residual);
            if let Some(obj) = objective {
                raw.objective = Some(obj.value(v));
            }
            raw
        }
        LpStatus::Infeasible => {
            let Some(y) = raw.farkas.as_ref() else {
                return LpResult::failure(
                    "backend reported infeasible without a Farkas certificate",
                );
            };
            if !verify_farkas(system, y) {
                return LpResult::failure("Farkas certificate failed verification");
            }
            raw
        }
        LpStatus::NumericalFailure => raw,
    }
}

/// Decide feasibility of `{v >= 0 : Gv = g}`, with a verified certificate
/// on either answer.
pub fn solve_feasibility(system: &ConstraintSystem, backend: &dyn LpBackend) -> LpResult {
    let raw = backend.solve_min(system, None);
    verify_result(system, None, raw)
}

/// Optimize a linear objective over the polytope. Feasibility and the
/// returned objective value are re-verified; `Max` is handled by
/// negation.
pub fn solve_linear(
    system: &ConstraintSystem,
    objective: &Objective,
    backend: &dyn LpBackend,
) -> LpResult {
    let mut c = objective.dense(system.n_cols());
    if objective.sense == Sense::Max {
        for x in &mut c {
            *x = -*x;
        }
    }
    let raw = backend.solve_min(system, Some(&c));
    verify_result(system, Some(objective), raw)
}

#[derive(Clone, Debug)]
pub struct Projection {
    /// Squared Euclidean norm of `g - Gv` at the minimizer.
    pub distance: f64,
    pub v: Vec<f64>,
    pub iterations: u64,
}

/// Projection distance `min_{v >= 0} ||g - Gv||^2`, the point statistic of
/// the quadratic testing route. Solved by the built-in active-set
/// nonnegative least squares, independently of the LP backends.
pub fn projection_distance(system: &ConstraintSystem) -> Result<Projection, LpError> {
    let res = nnls(system, 0);
    if !res.converged {
        return Err(LpError::Numerical(format!(
            "projection did not converge after {} iterations",
            res.iterations
        )));
    }
    Ok(Projection {
        distance: res.distance,
        v: res.v,
        iterations: res.iterations,
    })
}

/// Feasibility threshold on the squared projection distance: consistent
/// with [`FEAS_TOL`] on the LP route.
pub fn distance_feasible(distance: f64) -> bool {
    distance <= FEAS_TOL * FEAS_TOL
}
