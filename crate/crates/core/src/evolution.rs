//! The velocity `Φ(f) = B(f)[ω(f)]`, its Fréchet derivative, the frozen
//! local symbol, and time integration of `f_t = Φ(f)`.

use std::f64::consts::PI;

use log::{info, warn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, SobolevIndex, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, DEFAULT_TAIL_TOL};
use crate::params::DerivedConstants;
use crate::singular_ops::{self, bnm_apply, KernelSpec};
use crate::vorticity::{self, SolverConfig};

/// `Φ(f)` together with the intermediate fields it was built from.
#[derive(Clone, Debug)]
pub struct Velocity {
    pub slope: GridFunction,
    pub omega: GridFunction,
    pub phi: GridFunction,
}

/// Evaluates `ω(f)` and `Φ(f)` in one pass.
pub fn velocity(
    f: &GridFunction,
    constants: &DerivedConstants,
    cfg: &SolverConfig,
) -> Result<Velocity> {
    let slope = f.derivative();
    let rhs = slope.scale(-constants.c_theta);
    let omega = vorticity::solve_linear(f, &slope, &rhs, constants.a_mu, cfg)?.omega;
    let phi = singular_ops::op_b_apply_with_slope(f, &slope, &omega);
    Ok(Velocity { slope, omega, phi })
}

/// `Φ(f) = B(f)[ω(f)]`.
pub fn phi(f: &GridFunction, constants: &DerivedConstants, cfg: &SolverConfig) -> Result<GridFunction> {
    Ok(velocity(f, constants, cfg)?.phi)
}

/// Fréchet derivative `∂Φ(f₀)[g]`.
///
/// `∂Φ(f₀)[g] = ∂B(f₀)[g][ω₀] + B(f₀)[∂ω]`, with
///
/// ```text
/// π∂B(f₀)[g][ω₀] = −2B₂,₂(f₀,f₀)[f₀,g,ω₀] + g'B₁,₁(f₀)[f₀,ω₀]
///                  + f₀'B₁,₁(f₀)[g,ω₀] − 2f₀'B₃,₂(f₀,f₀)[f₀,f₀,g,ω₀]
/// π∂A(f₀)[g][ω₀] = g'B₀,₁(f₀)[ω₀] − 2f₀'B₂,₂(f₀,f₀)[f₀,g,ω₀]
///                  − B₁,₁(f₀)[g,ω₀] + 2B₃,₂(f₀,f₀)[f₀,f₀,g,ω₀]
/// (1 + a_μA(f₀))[∂ω] = −a_μ∂A(f₀)[g][ω₀] − C_Θ g'.
/// ```
///
/// Every term is evaluated with the same quadrature as `Φ`, so this is the
/// exact Jacobian of the discrete velocity up to the linear-solver tolerance.
pub fn dphi(
    f0: &GridFunction,
    direction: &GridFunction,
    constants: &DerivedConstants,
    cfg: &SolverConfig,
) -> Result<GridFunction> {
    f0.grid().check_same(direction.grid(), "dphi direction")?;
    let Velocity {
        slope: df0,
        omega: w0,
        ..
    } = velocity(f0, constants, cfg)?;
    let dg = direction.derivative();
    let (a_mu, c_theta) = (constants.a_mu, constants.c_theta);

    let b11_f0 = bnm_apply(&KernelSpec::new(&[f0], &[f0])?, &w0)?;
    let b11_g = bnm_apply(&KernelSpec::new(&[f0], &[direction])?, &w0)?;
    let b22 = bnm_apply(&KernelSpec::new(&[f0, f0], &[f0, direction])?, &w0)?;
    let b32 = bnm_apply(&KernelSpec::new(&[f0, f0], &[f0, f0, direction])?, &w0)?;

    let n = f0.len();
    let mut d_b = vec![0.0; n];
    for i in 0..n {
        d_b[i] = (-2.0 * b22.values()[i]
            + dg.values()[i] * b11_f0.values()[i]
            + df0.values()[i] * b11_g.values()[i]
            - 2.0 * df0.values()[i] * b32.values()[i])
            / PI;
    }

    let rhs = if a_mu == 0.0 {
        dg.scale(-c_theta)
    } else {
        let b01 = bnm_apply(&KernelSpec::new(&[f0], &[])?, &w0)?;
        let values = (0..n)
            .map(|i| {
                let d_a = (dg.values()[i] * b01.values()[i]
                    - 2.0 * df0.values()[i] * b22.values()[i]
                    - b11_g.values()[i]
                    + 2.0 * b32.values()[i])
                    / PI;
                -a_mu * d_a - c_theta * dg.values()[i]
            })
            .collect();
        GridFunction::from_values(*f0.grid(), values)?
    };
    let d_omega = vorticity::solve_linear(f0, &df0, &rhs, a_mu, cfg)?.omega;
    let b_dw = singular_ops::op_b_apply_with_slope(f0, &df0, &d_omega);
    let d_b = GridFunction::from_values(*f0.grid(), d_b)?;
    d_b.axpy(1.0, &b_dw)
}

/// Frozen-coefficient symbol `−αΛ + β∂ₓ` of `∂Φ(f₀)`, pointwise in `x`.
#[derive(Clone, Debug)]
pub struct LocalSymbol {
    pub alpha: GridFunction,
    pub beta: GridFunction,
}

fn alpha_from(vel: &Velocity, constants: &DerivedConstants) -> GridFunction {
    let values = vel
        .phi
        .values()
        .iter()
        .zip(vel.slope.values())
        .map(|(p, s)| (constants.c_theta + constants.a_mu * p) / (1.0 + s * s))
        .collect();
    GridFunction::from_values(*vel.phi.grid(), values).expect("same grid")
}

/// `α = (C_Θ + a_μΦ(f₀))/(1+f₀'²)`,
/// `β = π⁻¹B₁,₁(f₀)[f₀,ω₀] − a_μω₀/(1+f₀'²)`.
pub fn local_symbol(
    f0: &GridFunction,
    constants: &DerivedConstants,
    cfg: &SolverConfig,
) -> Result<LocalSymbol> {
    let vel = velocity(f0, constants, cfg)?;
    let alpha = alpha_from(&vel, constants);
    let b11 = bnm_apply(&KernelSpec::new(&[f0], &[f0])?, &vel.omega)?;
    let values = (0..f0.len())
        .map(|i| {
            let s = vel.slope.values()[i];
            b11.values()[i] / PI - constants.a_mu * vel.omega.values()[i] / (1.0 + s * s)
        })
        .collect();
    Ok(LocalSymbol {
        alpha,
        beta: GridFunction::from_values(*f0.grid(), values)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Rk4,
    Imex,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperConfig {
    pub scheme: Scheme,
    pub dt: f64,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
    pub t_end: f64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    /// Stop when the Rayleigh–Taylor margin becomes non-positive.
    #[serde(default = "default_true")]
    pub stop_on_rt: bool,
    /// Largest admissible `|f₀|` over the outer eighth of the window.
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

fn default_cfl() -> f64 {
    0.5
}
fn default_record_every() -> usize {
    1
}
fn default_true() -> bool {
    true
}
fn default_tail_tol() -> f64 {
    DEFAULT_TAIL_TOL
}

impl StepperConfig {
    pub fn new(scheme: Scheme, dt: f64, t_end: f64) -> Self {
        Self {
            scheme,
            dt,
            cfl_safety: default_cfl(),
            t_end,
            record_every: default_record_every(),
            stop_on_rt: true,
            tail_tol: default_tail_tol(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "cfl_safety must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "t_end must be non-negative, got {}",
                self.t_end
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidArgument("record_every must be at least 1".to_string()));
        }
        Ok(())
    }
}

/// Admissible explicit step `cfl·h/max|α|` (infinite when `α ≡ 0`).
fn max_explicit_dt(alpha: &GridFunction, cfl_safety: f64) -> f64 {
    let a = alpha.sup_norm();
    if a == 0.0 {
        f64::INFINITY
    } else {
        cfl_safety * alpha.grid().spacing() / a
    }
}

fn rk4_from(
    f: &GridFunction,
    k1: &Velocity,
    dt: f64,
    constants: &DerivedConstants,
    cfg: &SolverConfig,
    cfl_safety: f64,
) -> Result<GridFunction> {
    let max_dt = max_explicit_dt(&alpha_from(k1, constants), cfl_safety);
    if dt > max_dt {
        return Err(Error::CflViolation { dt, max_dt });
    }
    let k1 = &k1.phi;
    let k2 = phi(&f.axpy(0.5 * dt, k1)?, constants, cfg)?;
    let k3 = phi(&f.axpy(0.5 * dt, &k2)?, constants, cfg)?;
    let k4 = phi(&f.axpy(dt, &k3)?, constants, cfg)?;
    let values = (0..f.len())
        .map(|i| {
            f.values()[i]
                + dt / 6.0
                    * (k1.values()[i] + 2.0 * k2.values()[i] + 2.0 * k3.values()[i] + k4.values()[i])
        })
        .collect();
    GridFunction::from_values(*f.grid(), values)
}

/// One classical Runge–Kutta step. Fails if `dt > cfl_safety·h/max|α|`.
pub fn step_rk4(
    f: &GridFunction,
    dt: f64,
    constants: &DerivedConstants,
    cfg: &SolverConfig,
    cfl_safety: f64,
) -> Result<GridFunction> {
    let k1 = velocity(f, constants, cfg)?;
    rk4_from(f, &k1, dt, constants, cfg, cfl_safety)
}

fn imex_from(
    f: &GridFunction,
    vel: &Velocity,
    dt: f64,
    constants: &DerivedConstants,
) -> Result<GridFunction> {
    let alpha = alpha_from(vel, constants);
    let alpha_bar = if constants.c_theta == 0.0 {
        // Θ = 0: Φ vanishes identically and no sign condition is needed.
        0.0
    } else {
        let min_alpha = alpha.min();
        if !(min_alpha > 0.0) {
            return Err(Error::NonPositiveAlpha { min_alpha });
        }
        alpha.max()
    };
    let explicit = f
        .half_laplacian()
        .scale(alpha_bar)
        .axpy(1.0, &vel.phi)?;
    let rhs = f.axpy(dt, &explicit)?;
    if alpha_bar == 0.0 {
        return Ok(rhs);
    }
    Ok(rhs.apply_multiplier(
        |k| Complex64::new(1.0 / (1.0 + dt * alpha_bar * k.abs()), 0.0),
        Complex64::new(1.0, 0.0),
    ))
}

/// One linearly implicit step
/// `(1 + dt·ᾱΛ)f_new = f + dt(Φ(f) + ᾱΛf)` with `ᾱ = max α`.
pub fn step_imex(
    f: &GridFunction,
    dt: f64,
    constants: &DerivedConstants,
    cfg: &SolverConfig,
) -> Result<GridFunction> {
    let vel = velocity(f, constants, cfg)?;
    imex_from(f, &vel, dt, constants)
}

/// Why a run ended.
#[derive(Clone, Debug, PartialEq)]
pub enum RunOutcome {
    Completed,
    /// The Rayleigh–Taylor margin dropped to `margin ≤ 0` at time `t`.
    RtStop { t: f64, margin: f64 },
    /// The step starting at `t` failed; the trajectory ends at the last good state.
    NumericalFailure { t: f64, reason: String },
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    /// States at every recorded step, including `t = 0` and the final state.
    pub snapshots: Vec<(usize, f64, GridFunction)>,
    pub records: Vec<TrajectoryRecord>,
    pub outcome: RunOutcome,
}

impl Trajectory {
    pub fn final_state(&self) -> &GridFunction {
        &self.snapshots.last().expect("trajectory holds the initial state").2
    }
}

/// Integrates `f_t = Φ(f)` from `f0` up to `stepper.t_end`.
///
/// A record (and snapshot) is taken at `t = 0`, every `record_every` steps and
/// at the last state reached. Non-finite states and failed steps end the run
/// with [`RunOutcome::NumericalFailure`]; a non-positive Rayleigh–Taylor margin
/// ends it with [`RunOutcome::RtStop`] when `stop_on_rt` is set and is logged
/// otherwise.
pub fn run(
    f0: &GridFunction,
    constants: &DerivedConstants,
    stepper: &StepperConfig,
    cfg: &SolverConfig,
    sobolev: &SobolevIndex,
) -> Result<Trajectory> {
    stepper.validate()?;
    cfg.validate()?;
    sobolev.validate()?;
    let tail = f0.tail_max();
    if tail > stepper.tail_tol {
        return Err(Error::TailViolation {
            max_tail: tail,
            tol: stepper.tail_tol,
        });
    }

    let n_steps = (stepper.t_end / stepper.dt - 1e-9).ceil().max(0.0) as usize;
    let mut traj = Trajectory {
        snapshots: Vec::new(),
        records: Vec::new(),
        outcome: RunOutcome::Completed,
    };
    let mut f = f0.clone();
    let mut t = 0.0;
    let mut warned_rt = false;

    for step in 0..=n_steps {
        let vel = match velocity(&f, constants, cfg) {
            Ok(v) => v,
            Err(e) => {
                traj.outcome = RunOutcome::NumericalFailure {
                    t,
                    reason: e.to_string(),
                };
                break;
            }
        };
        let margin = diagnostics::rt_margin_from(&vel.phi, constants);
        if step % stepper.record_every == 0 || step == n_steps {
            let record = diagnostics::record(t, &f, &vel, margin, sobolev, &traj.records);
            traj.records.push(record);
            traj.snapshots.push((step, t, f.clone()));
        }
        if !(margin > 0.0) && constants.c_theta != 0.0 {
            if stepper.stop_on_rt {
                info!("Rayleigh–Taylor margin {margin:.3e} at t = {t:.6}; stopping");
                traj.outcome = RunOutcome::RtStop { t, margin };
                break;
            } else if !warned_rt {
                warn!("Rayleigh–Taylor margin {margin:.3e} at t = {t:.6}; continuing");
                warned_rt = true;
            }
        }
        if step == n_steps {
            break;
        }
        let dt = stepper.dt.min(stepper.t_end - t);
        let next = match stepper.scheme {
            Scheme::Rk4 => rk4_from(&f, &vel, dt, constants, cfg, stepper.cfl_safety),
            Scheme::Imex => imex_from(&f, &vel, dt, constants),
        };
        match next {
            Ok(g) if g.is_finite() => {
                f = g;
                t = if step + 1 == n_steps {
                    stepper.t_end
                } else {
                    t + stepper.dt
                };
            }
            Ok(_) => {
                traj.outcome = RunOutcome::NumericalFailure {
                    t,
                    reason: "non-finite state".to_string(),
                };
                break;
            }
            Err(e) => {
                traj.outcome = RunOutcome::NumericalFailure {
                    t,
                    reason: e.to_string(),
                };
                break;
            }
        }
    }
    if let Some((_, t_last, _)) = traj.snapshots.last() {
        if *t_last != t {
            // Failure after the last record: keep the last good state too.
            let vel = velocity(&f, constants, cfg)?;
            let margin = diagnostics::rt_margin_from(&vel.phi, constants);
            let record = diagnostics::record(t, &f, &vel, margin, sobolev, &traj.records);
            traj.records.push(record);
            traj.snapshots.push((n_steps, t, f));
        }
    }
    Ok(traj)
}
