//! Heavy fluid on top: the margin is negative and the run stops, or grows if allowed.

use std::f64::consts::PI;

use muskat::diagnostics::{rt_margin, SobolevIndex};
use muskat::evolution::{run, Scheme, StepperConfig};
use muskat::vorticity::SolverConfig;
use muskat::{FluidParams, Grid};

fn main() -> muskat::Result<()> {
    let fluids = FluidParams {
        mu_minus: 3.0,
        mu_plus: 1.0,
        rho_minus: 0.0,
        rho_plus: 1.0,
        k: 1.0,
        g: 1.0,
        v: 0.0,
    };
    let c = fluids.derive_constants()?;
    let (l, m) = (40.0, 16);
    let g = Grid::new(l, 512)?;
    let k = PI * m as f64 / l;
    let f0 = g.sample(|x| 1e-5 * (k * x).cos() * (-(x / 4.0).powi(2)).exp());
    let cfg = SolverConfig::default();
    println!("a_mu = {:.3}, C_theta = {:.3}, margin = {:.3e}", c.a_mu, c.c_theta, rt_margin(&f0, &c, &cfg)?);

    let t_end = 0.5 / k;
    let stopping = StepperConfig::new(Scheme::Rk4, t_end / 10.0, t_end);
    println!("stop_on_rt = true:  {:?}", run(&f0, &c, &stopping, &cfg, &SobolevIndex::default())?.outcome);

    let growing = StepperConfig { stop_on_rt: false, ..stopping };
    let traj = run(&f0, &c, &growing, &cfg, &SobolevIndex::default())?;
    let rate = (traj.final_state().spectrum()[m].norm() / f0.spectrum()[m].norm()).ln() / t_end;
    println!("stop_on_rt = false: growth rate {rate:.4} vs |C_theta| k = {:.4}", c.c_theta.abs() * k);
    Ok(())
}
