//! Contour-dynamics solver for the two-phase Muskat problem.
//!
//! The interface between two fluids in a vertical porous medium is the graph
//! of `f(t, ·)`. It evolves by `f_t = Φ(f) = B(f)[ω(f)]`, where the vorticity
//! density `ω(f)` solves the nonlocal linear equation
//! `(1 + a_μ A(f))[ω] = −C_Θ f'`. The crate provides:
//!
//! - [`grid`]: the truncated-line grid and its Fourier multipliers;
//! - [`singular_ops`]: quadrature for `A(f)`, `B(f)`, `B_{n,m}` and `T_a`;
//! - [`vorticity`]: the solver for `ω(f)`;
//! - [`evolution`]: `Φ`, its Fréchet derivative, the frozen local symbol and
//!   the RK4 / IMEX time steppers;
//! - [`diagnostics`]: Rayleigh–Taylor margin, `W^s_p` seminorms, spectral tails;
//! - [`config`] and [`runner`]: the batch experiment driver behind the
//!   `muskat` binary;
//! - [`io`]: CSV and raw binary formats.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod io;
pub mod params;
pub mod runner;
pub mod singular_ops;
pub mod vorticity;

pub use error::{Error, Result};
pub use grid::{Grid, GridFunction};
pub use params::{DerivedConstants, FluidParams};
