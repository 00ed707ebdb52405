//! Physical fluid constants and the derived Atwood number, `Θ` and `C_Θ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw physical constants of the two-fluid system.
///
/// The fluid labelled `minus` sits below the interface. No unit conversion is
/// ever performed; all values are assumed to share one consistent system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidParams {
    pub mu_minus: f64,
    pub mu_plus: f64,
    pub rho_minus: f64,
    pub rho_plus: f64,
    /// Permeability of the medium.
    pub k: f64,
    /// Gravitational acceleration.
    pub g: f64,
    /// Vertical velocity of the fluid system (signed, upwards positive).
    #[serde(rename = "V")]
    pub v: f64,
}

/// Constants that actually enter the evolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DerivedConstants {
    /// Atwood number `(μ₋ − μ₊)/(μ₋ + μ₊)`, always in `(−1, 1)`.
    pub a_mu: f64,
    /// `kΘ/(μ₋ + μ₊)`, a velocity.
    pub c_theta: f64,
    /// `g(ρ₋ − ρ₊) + (μ₋ − μ₊)V/k`.
    pub theta: f64,
}

impl FluidParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("mu_minus", self.mu_minus),
            ("mu_plus", self.mu_plus),
            ("rho_minus", self.rho_minus),
            ("rho_plus", self.rho_plus),
            ("k", self.k),
            ("g", self.g),
            ("V", self.v),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite")));
            }
        }
        if self.mu_minus <= 0.0 || self.mu_plus <= 0.0 {
            return Err(Error::InvalidParams(
                "viscosities must be positive".to_string(),
            ));
        }
        if self.k <= 0.0 {
            return Err(Error::InvalidParams(
                "permeability k must be positive".to_string(),
            ));
        }
        Ok(())
    }

    /// Computes `(a_μ, C_Θ, Θ)`.
    pub fn derive_constants(&self) -> Result<DerivedConstants> {
        self.validate()?;
        let mu_sum = self.mu_minus + self.mu_plus;
        let mu_diff = self.mu_minus - self.mu_plus;
        let theta = self.g * (self.rho_minus - self.rho_plus) + mu_diff * self.v / self.k;
        let a_mu = mu_diff / mu_sum;
        if a_mu.abs() >= 1.0 {
            return Err(Error::InvalidParams(
                "viscosity ratio too extreme: Atwood number rounds to ±1".to_string(),
            ));
        }
        Ok(DerivedConstants {
            a_mu,
            c_theta: self.k * theta / mu_sum,
            theta,
        })
    }
}

impl DerivedConstants {
    /// Builds the constants directly, bypassing the physical parameters.
    ///
    /// `theta` is reported equal to `c_theta`, i.e. unit mobility `k/(μ₋+μ₊)`.
    pub fn new(a_mu: f64, c_theta: f64) -> Result<Self> {
        if !(a_mu.abs() < 1.0) || !c_theta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "need |a_mu| < 1 and finite C_Theta, got a_mu = {a_mu}, C_Theta = {c_theta}"
            )));
        }
        Ok(Self {
            a_mu,
            c_theta,
            theta: c_theta,
        })
    }
}
