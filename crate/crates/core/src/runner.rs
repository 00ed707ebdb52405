//! Executes a [`RunConfig`]: builds the initial interface, integrates, and
//! writes `meta.json`, `records.csv` and the snapshots.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{debug, info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{InitialKind, RunConfig};
use crate::error::{Error, Result};
use crate::evolution::{self, RunOutcome, Trajectory};
use crate::grid::GridFunction;
use crate::io;
use crate::params::DerivedConstants;

pub const EXIT_COMPLETED: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RT_STOP: i32 = 2;
pub const EXIT_NUMERICAL_FAILURE: i32 = 3;

pub fn exit_code(outcome: &RunOutcome) -> i32 {
    match outcome {
        RunOutcome::Completed => EXIT_COMPLETED,
        RunOutcome::RtStop { .. } => EXIT_RT_STOP,
        RunOutcome::NumericalFailure { .. } => EXIT_NUMERICAL_FAILURE,
    }
}

/// Samples the configured initial interface. `seed` drives the optional
/// multiplicative noise.
pub fn build_initial(cfg: &RunConfig, seed: u64) -> Result<GridFunction> {
    let grid = cfg.grid()?;
    let init = &cfg.initial;
    let a = init.amplitude;
    let mut f = match init.kind {
        InitialKind::Gaussian => {
            let w = init.width_or_wavenumber.expect("validated");
            grid.sample(|x| a * (-(x / w).powi(2)).exp())
        }
        InitialKind::Mode => {
            let k0 = init.width_or_wavenumber.expect("validated");
            let sigma = init.window_width.unwrap_or(grid.half_width() / 10.0);
            grid.sample(|x| a * (k0 * x).cos() * (-(x / sigma).powi(2)).exp())
        }
        InitialKind::BumpFile => {
            let path = init.path.as_ref().expect("validated");
            let loaded = if path.extension().is_some_and(|e| e == "f64") {
                io::load_raw(path)?
            } else {
                io::load_csv(path)?
            };
            if *loaded.grid() != grid {
                return Err(Error::Config {
                    path: "initial.path".to_string(),
                    msg: format!(
                        "file grid (L = {}, N = {}) differs from [grid]",
                        loaded.grid().half_width(),
                        loaded.len()
                    ),
                });
            }
            loaded.scale(a)
        }
    };
    if init.noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in f.values_mut() {
            *v *= 1.0 + init.noise * rng.random_range(-1.0..1.0);
        }
    }
    let tail = f.tail_max();
    if tail > cfg.stepper.tail_tol {
        return Err(Error::Config {
            path: "initial".to_string(),
            msg: Error::TailViolation {
                max_tail: tail,
                tol: cfg.stepper.tail_tol,
            }
            .to_string(),
        });
    }
    Ok(f)
}

#[derive(Serialize)]
struct Meta<'a> {
    version: &'static str,
    a_mu: f64,
    c_theta: f64,
    theta: f64,
    seed: u64,
    outcome: String,
    t_final: f64,
    records: usize,
    config: &'a RunConfig,
}

fn describe(outcome: &RunOutcome) -> String {
    match outcome {
        RunOutcome::Completed => "completed".to_string(),
        RunOutcome::RtStop { t, margin } => format!("rt_stop at t = {t} (margin {margin:.3e})"),
        RunOutcome::NumericalFailure { t, reason } => format!("numerical_failure at t = {t}: {reason}"),
    }
}

#[derive(Debug)]
pub struct RunReport {
    pub constants: DerivedConstants,
    pub trajectory: Trajectory,
    pub output_dir: PathBuf,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        exit_code(&self.trajectory.outcome)
    }
}

/// Validates, integrates and writes every output file.
pub fn execute(cfg: &RunConfig, seed: u64) -> Result<RunReport> {
    cfg.validate()?;
    let constants = cfg.fluids.derive_constants()?;
    let f0 = build_initial(cfg, seed)?;
    info!(
        "a_mu = {:.6}, C_Theta = {:.6}, Theta = {:.6}; N = {}, L = {}",
        constants.a_mu, constants.c_theta, constants.theta, cfg.grid.n, cfg.grid.half_width
    );
    if constants.theta < 0.0 {
        warn!("Theta < 0: the flat interface is Rayleigh–Taylor unstable");
    }
    let trajectory = evolution::run(&f0, &constants, &cfg.stepper, &cfg.solver, &cfg.sobolev)?;
    for r in &trajectory.records {
        debug!("t = {:.6} sup_f = {:.6e} rt_margin = {:.6e}", r.t, r.sup_f, r.rt_margin);
    }
    write_outputs(cfg, seed, &constants, &trajectory)?;
    info!("{}", describe(&trajectory.outcome));
    Ok(RunReport {
        constants,
        trajectory,
        output_dir: cfg.output.dir.clone(),
    })
}

fn write_outputs(
    cfg: &RunConfig,
    seed: u64,
    constants: &DerivedConstants,
    traj: &Trajectory,
) -> Result<()> {
    let dir: &Path = &cfg.output.dir;
    fs::create_dir_all(dir)?;

    let mut w = BufWriter::new(File::create(dir.join("records.csv"))?);
    io::write_records(&traj.records, &mut w)?;
    w.flush()?;

    if cfg.output.snapshots {
        for (step, _, f) in &traj.snapshots {
            io::save_raw(f, &dir.join(format!("snap_{step:06}.f64")))?;
        }
    }

    let meta = Meta {
        version: env!("CARGO_PKG_VERSION"),
        a_mu: constants.a_mu,
        c_theta: constants.c_theta,
        theta: constants.theta,
        seed,
        outcome: describe(&traj.outcome),
        t_final: traj.snapshots.last().map_or(0.0, |s| s.1),
        records: traj.records.len(),
        config: cfg,
    };
    let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(dir.join("meta.json"), text + "\n")?;
    Ok(())
}
