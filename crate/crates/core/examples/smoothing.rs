//! A C² bump gains analyticity: the fitted spectral decay rate grows in time.

use muskat::diagnostics::spectral_tail;
use muskat::evolution::{run, Scheme, StepperConfig};
use muskat::vorticity::SolverConfig;
use muskat::{DerivedConstants, Grid};

fn main() -> muskat::Result<()> {
    let g = Grid::new(64.0, 512)?;
    let f0 = g.sample(|x| if x.abs() < 2.0 { 0.1 * (1.0 - (x / 2.0).powi(2)).powi(3) } else { 0.0 });
    let c = DerivedConstants::new(0.5, 1.0)?;
    let st = StepperConfig {
        record_every: 5,
        ..StepperConfig::new(Scheme::Rk4, 0.015, 0.3)
    };
    let traj = run(&f0, &c, &st, &SolverConfig::default(), &Default::default())?;
    println!("{:>6} {:>12} {:>12}", "t", "fitted rate", "tail mass");
    for (_, t, f) in &traj.snapshots {
        let tail = spectral_tail(f);
        println!("{t:>6.3} {:>12.4} {:>12.3e}", tail.fitted_rate, tail.tail_mass);
    }
    Ok(())
}
