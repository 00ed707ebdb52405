//! A small single-mode perturbation decays at the linear rate `C_Θ·k`.

use std::f64::consts::PI;

use muskat::diagnostics::SobolevIndex;
use muskat::evolution::{run, Scheme, StepperConfig};
use muskat::vorticity::SolverConfig;
use muskat::{DerivedConstants, Grid};

fn main() -> muskat::Result<()> {
    let (l, n, m) = (40.0, 512, 32);
    let g = Grid::new(l, n)?;
    let k = PI * m as f64 / l;
    let f0 = g.sample(|x| 1e-6 * (k * x).cos() * (-(x / 4.0).powi(2)).exp());
    let c = DerivedConstants::new(0.5, 1.0)?;
    let t_end = 1.0 / (c.c_theta * k);
    let st = StepperConfig::new(Scheme::Rk4, t_end / 40.0, t_end);
    let traj = run(&f0, &c, &st, &SolverConfig::default(), &SobolevIndex::default())?;
    let ratio = traj.final_state().spectrum()[m].norm() / f0.spectrum()[m].norm();
    let want = (-c.c_theta * k * t_end).exp();
    println!("k = {k:.4}, t = {t_end:.4}");
    println!("mode ratio {ratio:.10}, linear prediction {want:.10}, rel err {:.2e}", (ratio / want - 1.0).abs());
    println!("outcome: {:?}", traj.outcome);
    Ok(())
}
