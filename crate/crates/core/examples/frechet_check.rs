//! The analytic derivative `∂Φ(f)[u]` against central differences.

use muskat::evolution::{dphi, phi};
use muskat::vorticity::SolverConfig;
use muskat::{DerivedConstants, Grid};

fn main() -> muskat::Result<()> {
    let g = Grid::new(20.0, 512)?;
    let f = g.sample(|x| 0.5 * (-(x * x) / 2.0).exp() * (1.0 + 0.3 * x));
    let u = g.sample(|x| (-(x - 1.0).powi(2)).exp());
    let c = DerivedConstants::new(0.4, 1.0)?;
    let cfg = SolverConfig::default();
    let exact = dphi(&f, &u, &c, &cfg)?;
    println!("{:>8} {:>12}", "eps", "rel err");
    for eps in [1e-2, 5e-3, 2.5e-3, 1.25e-3] {
        let plus = phi(&f.axpy(eps, &u)?, &c, &cfg)?;
        let minus = phi(&f.axpy(-eps, &u)?, &c, &cfg)?;
        let fd = plus.axpy(-1.0, &minus)?.scale(0.5 / eps);
        let err = fd.axpy(-1.0, &exact)?.sup_norm() / exact.sup_norm();
        println!("{eps:>8.2e} {err:>12.3e}");
    }
    Ok(())
}
