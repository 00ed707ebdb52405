//! The TOML run specification read by the `muskat` binary.
//!
//! ```toml
//! [grid]
//! L = 40.0
//! N = 512
//!
//! [fluids]
//! mu_minus = 3.0
//! mu_plus = 1.0
//! rho_minus = 4.0
//! rho_plus = 0.0
//! k = 1.0
//! g = 1.0
//! V = 0.0
//!
//! [initial]
//! kind = "mode"            # gaussian | mode | bump_file
//! amplitude = 1e-4
//! width_or_wavenumber = 2.5
//!
//! [stepper]
//! scheme = "imex"          # rk4 | imex
//! dt = 0.01
//! t_end = 0.4
//!
//! [output]
//! dir = "out/decay"
//! ```
//!
//! `[solver]`, `[sobolev]` and the remaining keys are optional.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::diagnostics::SobolevIndex;
use crate::error::{Error, Result};
use crate::evolution::StepperConfig;
use crate::grid::Grid;
use crate::params::FluidParams;
use crate::vorticity::SolverConfig;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    /// `A·exp(−(x/w)²)`.
    Gaussian,
    /// `A·cos(k₀x)·exp(−(x/σ)²)` with `σ = window_width` (default `L/10`).
    Mode,
    /// Samples read from `path` (CSV `x,value` or raw `.f64`), scaled by `A`.
    BumpFile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub kind: InitialKind,
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Width `w` for `gaussian`, wavenumber `k₀` for `mode`.
    pub width_or_wavenumber: Option<f64>,
    pub path: Option<PathBuf>,
    pub window_width: Option<f64>,
    /// Relative multiplicative noise: `f_j ← f_j(1 + noise·u_j)`, with
    /// `u_j` uniform on `[−1, 1)` drawn from the run seed.
    #[serde(default)]
    pub noise: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    #[serde(default = "default_true")]
    pub snapshots: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub fluids: FluidParams,
    pub initial: InitialSpec,
    pub stepper: StepperConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub sobolev: SobolevIndex,
    pub output: OutputSpec,
}

fn invalid(path: &str, msg: impl Into<String>) -> Error {
    Error::Config {
        path: path.to_string(),
        msg: msg.into(),
    }
}

fn require(ok: bool, path: &str, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(invalid(path, msg))
    }
}

/// Parses and validates a run specification.
///
/// Syntax errors carry the line and column; constraint violations carry the
/// dotted key path, e.g. `fluids.mu_minus: must be positive`.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.half_width, self.grid.n)
    }

    pub fn validate(&self) -> Result<()> {
        require(
            self.grid.half_width > 0.0 && self.grid.half_width.is_finite(),
            "grid.L",
            "must be positive and finite",
        )?;
        require(
            self.grid.n >= 16 && self.grid.n.is_power_of_two(),
            "grid.N",
            "must be a power of two, at least 16",
        )?;

        let f = &self.fluids;
        for (key, value) in [
            ("mu_minus", f.mu_minus),
            ("mu_plus", f.mu_plus),
            ("rho_minus", f.rho_minus),
            ("rho_plus", f.rho_plus),
            ("k", f.k),
            ("g", f.g),
            ("V", f.v),
        ] {
            require(value.is_finite(), &format!("fluids.{key}"), "must be finite")?;
        }
        require(f.mu_minus > 0.0, "fluids.mu_minus", "must be positive")?;
        require(f.mu_plus > 0.0, "fluids.mu_plus", "must be positive")?;
        require(f.k > 0.0, "fluids.k", "must be positive")?;
        f.derive_constants().map_err(|e| invalid("fluids", e.to_string()))?;

        let init = &self.initial;
        require(init.amplitude.is_finite(), "initial.amplitude", "must be finite")?;
        require(
            init.noise >= 0.0 && init.noise.is_finite(),
            "initial.noise",
            "must be non-negative",
        )?;
        match init.kind {
            InitialKind::Gaussian | InitialKind::Mode => {
                let w = init.width_or_wavenumber.ok_or_else(|| {
                    invalid("initial.width_or_wavenumber", "required for this kind")
                })?;
                require(
                    w > 0.0 && w.is_finite(),
                    "initial.width_or_wavenumber",
                    "must be positive",
                )?;
            }
            InitialKind::BumpFile => {
                require(init.path.is_some(), "initial.path", "required for kind = \"bump_file\"")?;
            }
        }
        if let Some(w) = init.window_width {
            require(w > 0.0 && w.is_finite(), "initial.window_width", "must be positive")?;
        }

        let s = &self.stepper;
        require(s.dt > 0.0 && s.dt.is_finite(), "stepper.dt", "must be positive")?;
        require(
            s.t_end >= 0.0 && s.t_end.is_finite(),
            "stepper.t_end",
            "must be non-negative",
        )?;
        require(
            s.cfl_safety > 0.0 && s.cfl_safety <= 1.0,
            "stepper.cfl_safety",
            "must lie in (0, 1]",
        )?;
        require(s.record_every >= 1, "stepper.record_every", "must be at least 1")?;
        require(s.tail_tol > 0.0, "stepper.tail_tol", "must be positive")?;

        require(
            self.solver.tol > 0.0 && self.solver.tol.is_finite(),
            "solver.tol",
            "must be positive",
        )?;
        require(self.solver.max_iter >= 1, "solver.max_iter", "must be at least 1")?;

        require(
            self.sobolev.s > 0.0 && self.sobolev.s < 2.0,
            "sobolev.s",
            "must lie in (0, 2)",
        )?;
        require(
            self.sobolev.p > 1.0 && self.sobolev.p.is_finite(),
            "sobolev.p",
            "must lie in (1, inf)",
        )?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::Scheme;
    use crate::vorticity::SolveMethod;

    const MINIMAL: &str = r#"
[grid]
L = 20.0
N = 256

[fluids]
mu_minus = 3.0
mu_plus = 1.0
rho_minus = 2.0
rho_plus = 1.0
k = 1.0
g = 1.0
V = 0.0

[initial]
kind = "gaussian"
amplitude = 0.1
width_or_wavenumber = 1.5

[stepper]
scheme = "rk4"
dt = 0.01
t_end = 0.1

[output]
dir = "out"
"#;

    fn with(old: &str, new: &str) -> String {
        assert!(MINIMAL.contains(old));
        MINIMAL.replace(old, new)
    }

    fn path_of(err: Error) -> String {
        match err {
            Error::Config { path, .. } => path,
            other => panic!("expected a validation error, got {other}"),
        }
    }

    #[test]
    fn minimal_document_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.solver.dense_cap, 4096);
        assert_eq!(cfg.solver.tol, 1e-11);
        assert_eq!(cfg.solver.max_iter, 500);
        assert_eq!(cfg.solver.method, SolveMethod::FixedPoint);
        assert_eq!(cfg.stepper.cfl_safety, 0.5);
        assert_eq!(cfg.stepper.scheme, Scheme::Rk4);
        assert_eq!(cfg.stepper.record_every, 1);
        assert!(cfg.stepper.stop_on_rt);
        assert!(cfg.output.snapshots);
        assert_eq!(cfg.initial.noise, 0.0);
    }

    #[test]
    fn validation_names_the_key() {
        let err = parse_config(&with("mu_minus = 3.0", "mu_minus = -1.0")).unwrap_err();
        assert_eq!(path_of(err), "fluids.mu_minus");
        let err = parse_config(&with("N = 256", "N = 100")).unwrap_err();
        assert_eq!(path_of(err), "grid.N");
        let err = parse_config(&with("dt = 0.01", "dt = 0.0")).unwrap_err();
        assert_eq!(path_of(err), "stepper.dt");
        let err = parse_config(&with("width_or_wavenumber = 1.5\n", "")).unwrap_err();
        assert_eq!(path_of(err), "initial.width_or_wavenumber");
        let err = parse_config(&with("kind = \"gaussian\"", "kind = \"bump_file\"")).unwrap_err();
        assert_eq!(path_of(err), "initial.path");
    }

    #[test]
    fn parse_errors_carry_position_and_unknown_keys_are_rejected() {
        let err = parse_config(&with("N = 256", "N = ")).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Parse(_)));
        assert!(msg.contains("line 4"), "{msg}");
        let err = parse_config(&with("N = 256", "N = 256\nM = 3")).unwrap_err();
        assert!(err.to_string().contains("unknown field"), "{err}");
        let err = parse_config(&with("scheme = \"rk4\"", "scheme = \"euler\"")).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }
}
