//! Uniform discretization of the truncated line `[−L, L)` and the Fourier
//! multipliers acting on it.
//!
//! Multiplier operators treat the window as `2L`-periodic. The Nyquist mode is
//! annihilated by the derivative, the Hilbert transform and `Λ = |∂ₓ|`, so that
//! `Λ = H∘∂ₓ` holds exactly mode by mode and real input stays real.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Tail tolerance used when the caller does not configure one.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_pair(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    })
}

/// Nodes `x_j = −L + j·h`, `j = 0..N`, with `h = 2L/N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    half_width: f64,
    n: usize,
}

impl Grid {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "N must be a power of two >= 16, got {n}"
            )));
        }
        Ok(Self { half_width, n })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Angular wavenumber of DFT bin `m`, or `None` for the Nyquist bin.
    pub fn wavenumber(&self, m: usize) -> Option<f64> {
        let n = self.n;
        let dk = PI / self.half_width;
        match m.cmp(&(n / 2)) {
            std::cmp::Ordering::Less => Some(dk * m as f64),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(-dk * (n - m) as f64),
        }
    }

    /// Largest resolved wavenumber `π/h`.
    pub fn nyquist(&self) -> f64 {
        PI / self.spacing()
    }

    /// Samples `f` at the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction {
            grid: *self,
            values: (0..self.n).map(|j| f(self.node(j))).collect(),
        }
    }

    pub fn zeros(&self) -> GridFunction {
        GridFunction {
            grid: *self,
            values: vec![0.0; self.n],
        }
    }

    pub(crate) fn check_same(&self, other: &Grid, what: &str) -> Result<()> {
        if self != other {
            return Err(Error::ShapeMismatch(format!(
                "{what}: grid (L={}, N={}) vs (L={}, N={})",
                self.half_width, self.n, other.half_width, other.n
            )));
        }
        Ok(())
    }
}

/// Samples of a function on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<T = f64> {
    grid: Grid,
    values: Vec<T>,
}

pub type ComplexGridFunction = GridFunction<Complex64>;

impl<T: Copy> GridFunction<T> {
    pub fn from_values(grid: Grid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> GridFunction<U> {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl GridFunction {
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(h Σ|u_j|^p)^{1/p}`, the discrete `L_p` norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let h = self.grid.spacing();
        (h * self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Largest magnitude over the outer eighth of the window, `|x| ≥ 3L/4`.
    pub fn tail_max(&self) -> f64 {
        let l = self.grid.half_width;
        (0..self.len())
            .filter(|&j| self.grid.node(j).abs() >= 0.75 * l)
            .fold(0.0, |m, j| m.max(self.values[j].abs()))
    }

    pub fn is_decaying(&self, tol: f64) -> bool {
        self.tail_max() <= tol
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        self.map(|v| c * v)
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: f64, other: &GridFunction) -> Result<GridFunction> {
        self.grid.check_same(&other.grid, "axpy")?;
        Ok(GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + c * b)
                .collect(),
        })
    }

    /// Pointwise product.
    pub fn mul(&self, other: &GridFunction) -> Result<GridFunction> {
        self.grid.check_same(&other.grid, "mul")?;
        Ok(GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// Unnormalized forward DFT of the samples.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let (fwd, _) = fft_pair(self.len());
        let mut buf: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fwd.process(&mut buf);
        buf
    }

    fn from_spectrum(grid: Grid, mut spec: Vec<Complex64>) -> GridFunction {
        let (_, inv) = fft_pair(grid.len());
        inv.process(&mut spec);
        let scale = 1.0 / grid.len() as f64;
        GridFunction {
            grid,
            values: spec.iter().map(|c| c.re * scale).collect(),
        }
    }

    /// Applies the multiplier `symbol(k)` to every non-Nyquist bin; the Nyquist
    /// bin gets `nyquist`.
    pub fn apply_multiplier(
        &self,
        symbol: impl Fn(f64) -> Complex64,
        nyquist: Complex64,
    ) -> GridFunction {
        let mut spec = self.spectrum();
        for (m, c) in spec.iter_mut().enumerate() {
            *c *= match self.grid.wavenumber(m) {
                Some(k) => symbol(k),
                None => nyquist,
            };
        }
        Self::from_spectrum(self.grid, spec)
    }

    /// Spectral derivative.
    pub fn derivative(&self) -> GridFunction {
        self.apply_multiplier(|k| Complex64::new(0.0, k), Complex64::new(0.0, 0.0))
    }

    /// Hilbert transform, symbol `−i·sign(ξ)`; the mean is annihilated.
    pub fn hilbert(&self) -> GridFunction {
        self.apply_multiplier(
            |k| Complex64::new(0.0, if k == 0.0 { 0.0 } else { -k.signum() }),
            Complex64::new(0.0, 0.0),
        )
    }

    /// `Λ = (−∂ₓ²)^{1/2}`, symbol `|ξ|`.
    pub fn half_laplacian(&self) -> GridFunction {
        self.apply_multiplier(|k| Complex64::new(k.abs(), 0.0), Complex64::new(0.0, 0.0))
    }

    /// Right translation `(τ_ξ u)(x) = u(x − ξ)` with periodic wrap. Grid
    /// multiples of `h` are exact circular shifts; other shifts use
    /// band-limited interpolation.
    pub fn shift(&self, xi: f64) -> GridFunction {
        let h = self.grid.spacing();
        let steps = xi / h;
        let rounded = steps.round();
        if (steps - rounded).abs() <= 1e-12 * steps.abs().max(1.0) {
            let n = self.len() as i64;
            let s = (rounded as i64).rem_euclid(n) as usize;
            let mut values = self.values.clone();
            values.rotate_right(s);
            return GridFunction {
                grid: self.grid,
                values,
            };
        }
        let kn = self.grid.nyquist();
        self.apply_multiplier(
            |k| Complex64::from_polar(1.0, -k * xi),
            Complex64::new((kn * xi).cos(), 0.0),
        )
    }

    /// Evaluates the trigonometric interpolant at arbitrary points.
    pub fn interpolate_at(&self, points: &[f64]) -> Vec<f64> {
        let spec = self.spectrum();
        let grid = self.grid;
        let n = grid.len();
        let l = grid.half_width;
        let kn = grid.nyquist();
        points
            .iter()
            .map(|&x| {
                let s = x + l;
                let mut acc = 0.0;
                for (m, c) in spec.iter().enumerate() {
                    acc += match grid.wavenumber(m) {
                        Some(k) => (c * Complex64::from_polar(1.0, k * s)).re,
                        None => c.re * (kn * s).cos(),
                    };
                }
                acc / n as f64
            })
            .collect()
    }

    /// Builds `u_λ(x) = λ⁻¹u(λx)` on the same grid and checks that the result
    /// still decays to `tail_tol` over the outer eighth of the window.
    ///
    /// The samples are read as a function on the line that vanishes outside
    /// `[−L, L)`; inside the window the trigonometric interpolant is used.
    pub fn rescale(&self, lambda: f64, tail_tol: f64) -> Result<GridFunction> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rescale factor must be positive, got {lambda}"
            )));
        }
        let out = if lambda == 1.0 {
            self.clone()
        } else {
            // Points that leave the window see the zero extension of the data.
            let l = self.grid.half_width;
            let pts: Vec<f64> = self.grid.nodes().iter().map(|x| lambda * x).collect();
            let inside: Vec<f64> = pts.iter().copied().filter(|x| (-l..l).contains(x)).collect();
            let mut interp = self.interpolate_at(&inside).into_iter();
            GridFunction {
                grid: self.grid,
                values: pts
                    .iter()
                    .map(|x| {
                        if (-l..l).contains(x) {
                            interp.next().expect("one value per inside point") / lambda
                        } else {
                            0.0
                        }
                    })
                    .collect(),
            }
        };
        let max_tail = out.tail_max();
        if max_tail > tail_tol {
            return Err(Error::TailViolation {
                max_tail,
                tol: tail_tol,
            });
        }
        Ok(out)
    }
}
