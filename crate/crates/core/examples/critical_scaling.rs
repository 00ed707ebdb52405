//! `Ẇ^{1+1/p,p}` is invariant under `f ↦ λ⁻¹f(λ·)`; other indices are not.

use muskat::diagnostics::{critical_seminorm, sobolev_seminorm, SobolevIndex};
use muskat::Grid;

fn main() -> muskat::Result<()> {
    let g = Grid::new(32.0, 1024)?;
    let f = g.sample(|x| 0.5 * (-(x * x) / 2.0).exp() * (1.0 + 0.2 * x));
    let off = SobolevIndex::new(1.7, 2.0)?;
    println!("{:>6} {:>14} {:>14}", "lambda", "critical(p=2)", "s=1.7 ratio");
    let base = sobolev_seminorm(&f, &off);
    for lambda in [0.5, 1.0, 2.0] {
        let r = f.rescale(lambda, 1e-8)?;
        println!(
            "{lambda:>6.2} {:>14.8} {:>14.8}",
            critical_seminorm(&r, 2.0)?,
            sobolev_seminorm(&r, &off) / base
        );
    }
    println!("expected ratio at lambda = 2: 2^0.2 = {:.8}", 2f64.powf(0.2));
    Ok(())
}
