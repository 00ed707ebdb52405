//! Vorticity solves across viscosity contrasts: fixed point against dense LU.

use muskat::vorticity::{solve_omega_report, SolverConfig};
use muskat::{DerivedConstants, Grid};

fn main() -> muskat::Result<()> {
    let g = Grid::new(16.0, 512)?;
    let f = g.sample(|x| 0.8 * (-(x * x) / 2.0).exp() * (1.0 + 0.3 * x));
    println!("{:>6} {:>10} {:>6} {:>12} {:>12}", "a_mu", "method", "iters", "residual", "|w - w_lu|");
    for a_mu in [0.0, 0.3, 0.6, 0.9, -0.9] {
        let c = DerivedConstants::new(a_mu, 1.0)?;
        let it = solve_omega_report(&f, &c, &SolverConfig::default())?;
        let lu = solve_omega_report(&f, &c, &SolverConfig::dense())?;
        let gap = it.omega.axpy(-1.0, &lu.omega)?.sup_norm();
        println!(
            "{a_mu:>6.2} {:>10} {:>6} {:>12.2e} {gap:>12.2e}",
            format!("{:?}", it.method),
            it.iterations,
            it.residual
        );
    }
    Ok(())
}
