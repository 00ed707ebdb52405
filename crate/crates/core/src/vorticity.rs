//! Solver for the vorticity density: `(1 + a_μ A(f))[ω] = −C_Θ f'`.

use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::params::DerivedConstants;
use crate::singular_ops::{self, DEFAULT_DENSE_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    /// Neumann iteration `ω ← rhs − a_μ A(f)[ω]`, falling back to `Dense`.
    FixedPoint,
    /// Direct LU solve of `I + a_μ A(f)`.
    Dense,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub method: SolveMethod,
    /// Relative residual tolerance.
    pub tol: f64,
    pub max_iter: usize,
    pub dense_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: SolveMethod::FixedPoint,
            tol: 1e-11,
            max_iter: 500,
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }
}

impl SolverConfig {
    pub fn dense() -> Self {
        Self {
            method: SolveMethod::Dense,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "solver tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".to_string()));
        }
        Ok(())
    }
}

/// A solved vorticity together with how it was obtained.
#[derive(Clone, Debug)]
pub struct VorticitySolution {
    pub omega: GridFunction,
    /// Method that produced `omega` (after any fallback).
    pub method: SolveMethod,
    /// Fixed-point iterations spent, including a failed attempt.
    pub iterations: usize,
    /// `‖ω + a_μA(f)[ω] − rhs‖∞ / ‖rhs‖∞`.
    pub residual: f64,
}

/// `ω(f) = −C_Θ (1 + a_μ A(f))⁻¹[f']`.
pub fn solve_omega(
    f: &GridFunction,
    constants: &DerivedConstants,
    cfg: &SolverConfig,
) -> Result<GridFunction> {
    Ok(solve_omega_report(f, constants, cfg)?.omega)
}

pub fn solve_omega_report(
    f: &GridFunction,
    constants: &DerivedConstants,
    cfg: &SolverConfig,
) -> Result<VorticitySolution> {
    let df = f.derivative();
    let rhs = df.scale(-constants.c_theta);
    solve_linear(f, &df, &rhs, constants.a_mu, cfg)
}

/// Solves `(1 + a_μ A(f))[ω] = rhs` with `A(f)` built from the slope `df`.
pub(crate) fn solve_linear(
    f: &GridFunction,
    df: &GridFunction,
    rhs: &GridFunction,
    a_mu: f64,
    cfg: &SolverConfig,
) -> Result<VorticitySolution> {
    cfg.validate()?;
    if !(a_mu.abs() < 1.0) {
        return Err(Error::InvalidParams(format!("|a_mu| must be < 1, got {a_mu}")));
    }
    f.grid().check_same(rhs.grid(), "vorticity right-hand side")?;
    let rhs_norm = rhs.sup_norm();
    if a_mu == 0.0 || rhs_norm == 0.0 {
        return Ok(VorticitySolution {
            omega: rhs.clone(),
            method: cfg.method,
            iterations: 0,
            residual: 0.0,
        });
    }

    let n = f.len();
    let dense_ok = n <= cfg.dense_cap;
    let matrix = dense_ok.then(|| singular_ops::assemble_a_with_slope(f, df));
    let apply_a = |w: &GridFunction| -> GridFunction {
        match &matrix {
            Some(m) => {
                let v = m * DVector::from_column_slice(w.values());
                GridFunction::from_values(*f.grid(), v.as_slice().to_vec())
                    .expect("matrix has grid dimension")
            }
            None => singular_ops::op_a_apply_with_slope(f, df, w),
        }
    };
    let residual_of = |w: &GridFunction| -> f64 {
        let aw = apply_a(w);
        w.values()
            .iter()
            .zip(aw.values())
            .zip(rhs.values())
            .fold(0.0_f64, |m, ((wi, ai), ri)| m.max((wi + a_mu * ai - ri).abs()))
            / rhs_norm
    };

    let mut iterations = 0;
    if cfg.method == SolveMethod::FixedPoint {
        let mut omega = rhs.clone();
        let mut first = f64::NAN;
        for it in 1..=cfg.max_iter {
            iterations = it;
            let aw = apply_a(&omega);
            let next: Vec<f64> = rhs
                .values()
                .iter()
                .zip(aw.values())
                .map(|(r, a)| r - a_mu * a)
                .collect();
            let change = next
                .iter()
                .zip(omega.values())
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
                / rhs_norm;
            omega = GridFunction::from_values(*f.grid(), next)?;
            if it == 1 {
                first = change;
            }
            if !change.is_finite() || change > 1e3 * first {
                break;
            }
            // The update difference equals the residual of the previous iterate.
            if change <= 0.1 * cfg.tol {
                let residual = residual_of(&omega);
                if residual <= cfg.tol {
                    return Ok(VorticitySolution {
                        omega,
                        method: SolveMethod::FixedPoint,
                        iterations,
                        residual,
                    });
                }
            }
        }
        if !dense_ok {
            return Err(Error::DenseCapExceeded {
                n,
                cap: cfg.dense_cap,
            });
        }
        warn!(
            "fixed-point vorticity iteration did not reach tol {:.1e} in {} steps; using dense solve",
            cfg.tol, iterations
        );
    }

    let a = matrix.as_ref().ok_or(Error::DenseCapExceeded {
        n,
        cap: cfg.dense_cap,
    })?;
    let system = DMatrix::<f64>::identity(n, n) + a * a_mu;
    let b = DVector::from_column_slice(rhs.values());
    let solved = system.clone().lu().solve(&b).filter(|x| x.iter().all(|v| v.is_finite()));
    let Some(mut x) = solved else {
        let sigma_min = system.singular_values().min();
        return Err(Error::SingularSystem { sigma_min });
    };
    // One step of iterative refinement.
    let r = &b - &system * &x;
    if let Some(dx) = system.clone().lu().solve(&r) {
        x += dx;
    }
    let omega = GridFunction::from_values(*f.grid(), x.as_slice().to_vec())?;
    let residual = residual_of(&omega);
    if !(residual <= cfg.tol) {
        let sigma_min = system.singular_values().min();
        if sigma_min <= f64::EPSILON * system.norm() {
            return Err(Error::SingularSystem { sigma_min });
        }
        warn!("dense vorticity solve residual {residual:.3e} exceeds tol {:.1e}", cfg.tol);
    }
    Ok(VorticitySolution {
        omega,
        method: SolveMethod::Dense,
        iterations,
        residual,
    })
}
