//! `ℓ_p` norms of `T_a` as the slope of the phase grows.

use muskat::singular_ops::{assemble_dense_t_a, operator_norm_estimate, DEFAULT_DENSE_CAP};
use muskat::Grid;

fn main() -> muskat::Result<()> {
    let g = Grid::new(12.0, 256)?;
    let shape = g.sample(|x| (0.8 * x).sin() * (-(x * x) / 10.0).exp());
    let unit = shape.derivative().sup_norm();
    println!("{:>8} {:>10} {:>10}", "|a'|", "p = 2", "p = 3");
    for slope in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let op = assemble_dense_t_a(&shape.scale(slope / unit), DEFAULT_DENSE_CAP)?;
        let n2 = operator_norm_estimate(&op, 2.0, 200)?;
        let n3 = operator_norm_estimate(&op, 3.0, 200)?;
        println!("{slope:>8.2} {:>10.4} {:>10.4}", n2.value, n3.value);
    }
    Ok(())
}
