//! Discrete adjoint identities of the assembled operators.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use muskat::singular_ops::{assemble_dense, assemble_dense_t_a, KernelSpec, OperatorSpec, DEFAULT_DENSE_CAP};
use muskat::Grid;

fn main() -> muskat::Result<()> {
    let g = Grid::new(10.0, 256)?;

    let a = g.sample(|x| 0.8 * (0.7 * x).sin() * (-(x * x) / 8.0).exp());
    let ta = assemble_dense_t_a(&a, DEFAULT_DENSE_CAP)?.matrix;
    let t_minus = assemble_dense_t_a(&a.scale(-1.0), DEFAULT_DENSE_CAP)?.matrix;
    let err_t = (ta.adjoint() + t_minus).iter().fold(0.0_f64, |m, z: &Complex64| m.max(z.norm()));
    println!("max |T_a^* + T_(-a)|          = {err_t:.2e}");

    let f = g.sample(|x| 0.6 * (-(x - 0.5).powi(2)).exp());
    let df = f.derivative();
    let at = assemble_dense(&OperatorSpec::A(&f), DEFAULT_DENSE_CAP)?.matrix.transpose();
    let b11 = assemble_dense(&OperatorSpec::Bnm(KernelSpec::new(&[&f], &[&f])?), DEFAULT_DENSE_CAP)?.matrix;
    let b01 = assemble_dense(&OperatorSpec::Bnm(KernelSpec::new(&[&f], &[])?), DEFAULT_DENSE_CAP)?.matrix;
    let slope = DMatrix::from_diagonal(&DVector::from_column_slice(df.values()));
    let err_a = (at - (b11 - b01 * slope) / PI).amax();
    println!("max |A^T - (B11 - B01 f')/pi| = {err_a:.2e}");
    Ok(())
}
