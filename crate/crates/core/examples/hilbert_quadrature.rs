//! The punctured trapezoid sum for `B₀,₀` against the spectral Hilbert transform.
//!
//! ```text
//! cargo run --release --example hilbert_quadrature
//! ```

use std::f64::consts::PI;

use muskat::singular_ops::{bnm_apply, KernelSpec};
use muskat::Grid;

fn main() -> muskat::Result<()> {
    println!("{:>6} {:>12}", "N", "rel err");
    for n in [64, 128, 256, 512, 1024] {
        let g = Grid::new(40.0, n)?;
        let u = g.sample(|x| (1.0 - 2.0 * x * x) * (-x * x).exp());
        let sum = bnm_apply(&KernelSpec::on_grid(g, &[], &[])?, &u)?;
        let want = u.hilbert().scale(PI);
        let err = sum.axpy(-1.0, &want)?.sup_norm() / want.sup_norm();
        println!("{n:>6} {err:>12.3e}");
    }
    Ok(())
}
