//! Rayleigh–Taylor margin, `W^s_p` seminorms and spectral smoothing metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{self, Velocity};
use crate::grid::GridFunction;
use crate::params::DerivedConstants;
use crate::vorticity::SolverConfig;

/// Smoothness `s` and integrability `p` of `W^s_p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SobolevIndex {
    pub s: f64,
    pub p: f64,
}

/// `W^{7/4}_2`.
impl Default for SobolevIndex {
    fn default() -> Self {
        Self { s: 1.75, p: 2.0 }
    }
}

impl SobolevIndex {
    pub fn new(s: f64, p: f64) -> Result<Self> {
        let idx = Self { s, p };
        idx.validate()?;
        Ok(idx)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s < 2.0) {
            return Err(Error::InvalidArgument(format!("s must lie in (0, 2), got {}", self.s)));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidArgument(format!("p must lie in (1, inf), got {}", self.p)));
        }
        Ok(())
    }

    /// `[s]`.
    pub fn integer_part(&self) -> usize {
        self.s.floor() as usize
    }

    /// `{s}`; zero for integer `s`.
    pub fn fractional_part(&self) -> f64 {
        self.s - self.s.floor()
    }
}

/// `min_x (C_Θ + a_μΦ(f))`.
pub fn rt_margin(f: &GridFunction, constants: &DerivedConstants, cfg: &SolverConfig) -> Result<f64> {
    if constants.a_mu == 0.0 {
        return Ok(constants.c_theta);
    }
    let phi = evolution::phi(f, constants, cfg)?;
    Ok(rt_margin_from(&phi, constants))
}

pub(crate) fn rt_margin_from(phi: &GridFunction, constants: &DerivedConstants) -> f64 {
    if constants.a_mu == 0.0 {
        return constants.c_theta;
    }
    phi.values()
        .iter()
        .map(|p| constants.c_theta + constants.a_mu * p)
        .fold(f64::INFINITY, f64::min)
}

fn nth_derivative(f: &GridFunction, k: usize) -> GridFunction {
    (0..k).fold(f.clone(), |g, _| g.derivative())
}

/// `Q(ξ_m) = h Σ_j |g_j − g_{j−m}|^p` for `m = 0..=N/2`.
fn shifted_differences(g: &GridFunction, p: f64) -> Vec<f64> {
    let n = g.len();
    let h = g.grid().spacing();
    let v = g.values();
    (0..=n / 2)
        .map(|m| h * (0..n).map(|j| (v[j] - v[(j + n - m) % n]).abs().powf(p)).sum::<f64>())
        .collect()
}

/// Fractional seminorm `(∫ ‖g − τ_ξ g‖_p^p / |ξ|^{1+σp} dξ)^{1/p}` with `σ ∈ (0,1)`.
///
/// On `[0, L]` the integrand is written as `R(ξ)·ξ^e` with `R = Q/ξ^p` and
/// `e = p − 1 − σp`. `R` is interpolated linearly between the nodes `ξ = mh`
/// (with `R(0) = ‖g'‖_p^p`) and integrated exactly against `ξ^e`, which keeps
/// the integrable singularity at the origin under control when `e < 0`. Beyond
/// `L` the shifted copies no longer overlap a decaying `g`, so `Q` is frozen
/// at its last value and the tail integrated in closed form.
fn fractional_seminorm(g: &GridFunction, sigma: f64, p: f64) -> f64 {
    let h = g.grid().spacing();
    let q = shifted_differences(g, p);
    let r0 = g.derivative().lp_norm(p).powf(p);
    let e = p - 1.0 - sigma * p;
    let r_at = |m: usize| if m == 0 { r0 } else { q[m] / (m as f64 * h).powf(p) };
    let moment = |a: f64, b: f64, k: f64| (b.powf(e + k) - a.powf(e + k)) / (e + k);

    let mut total = 0.0;
    for m in 0..q.len() - 1 {
        let (a, b) = (m as f64 * h, (m + 1) as f64 * h);
        let (i0, i1) = (moment(a, b, 1.0), moment(a, b, 2.0));
        total += (r_at(m) * (b * i0 - i1) + r_at(m + 1) * (i1 - a * i0)) / h;
    }
    let l = (q.len() - 1) as f64 * h;
    total += q[q.len() - 1] * l.powf(-sigma * p) / (sigma * p);
    (2.0 * total).max(0.0).powf(1.0 / p)
}

/// `[f]_{W^s_p}`: the fractional seminorm of `f^{([s])}`. For integer `s`
/// this is `‖f^{(s)}‖_p`.
pub fn sobolev_seminorm(f: &GridFunction, idx: &SobolevIndex) -> f64 {
    let g = nth_derivative(f, idx.integer_part());
    let sigma = idx.fractional_part();
    if sigma == 0.0 {
        g.lp_norm(idx.p)
    } else {
        fractional_seminorm(&g, sigma, idx.p)
    }
}

/// `‖f‖_{W^s_p} = (Σ_{k≤[s]} ‖f^{(k)}‖_p^p + [f]_{W^s_p}^p)^{1/p}`.
pub fn sobolev_norm(f: &GridFunction, idx: &SobolevIndex) -> f64 {
    let p = idx.p;
    let mut sum = 0.0;
    let mut g = f.clone();
    for k in 0..=idx.integer_part() {
        if k > 0 {
            g = g.derivative();
        }
        sum += g.lp_norm(p).powf(p);
    }
    if idx.fractional_part() > 0.0 {
        sum += sobolev_seminorm(f, idx).powf(p);
    }
    sum.powf(1.0 / p)
}

/// `[f']_{W^{1/p}_p}`, invariant under `f ↦ λ⁻¹f(λ·)`.
pub fn critical_seminorm(f: &GridFunction, p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("p must lie in (1, inf), got {p}")));
    }
    Ok(fractional_seminorm(&f.derivative(), 1.0 / p, p))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralTail {
    /// Share of `Σ|f̂|²` carried by the modes with `|m| ≥ N/3`.
    pub tail_mass: f64,
    /// `−d ln|f̂(ξ)| / d|ξ|` fitted over the upper half of the spectrum;
    /// `+∞` when fewer than two modes clear the noise floor.
    pub fitted_rate: f64,
}

const SPECTRAL_FLOOR: f64 = 1e-14;

pub fn spectral_tail(f: &GridFunction) -> SpectralTail {
    let n = f.len();
    let spec = f.spectrum();
    let power: Vec<f64> = spec.iter().map(|c| c.norm_sqr()).collect();
    let total: f64 = power.iter().sum();
    let tail: f64 = (0..n)
        .filter(|&m| m.min(n - m) >= n / 3)
        .map(|m| power[m])
        .sum();
    let tail_mass = if total > 0.0 { tail / total } else { 0.0 };

    let peak = spec.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
    let (xs, ys): (Vec<f64>, Vec<f64>) = (n / 4..n / 2)
        .filter(|&m| spec[m].norm() > SPECTRAL_FLOOR * peak)
        .map(|m| (f.grid().wavenumber(m).expect("below Nyquist"), spec[m].norm().ln()))
        .unzip();
    let fitted_rate = match least_squares_slope(&xs, &ys) {
        Some(slope) => -slope,
        None => f64::INFINITY,
    };
    SpectralTail {
        tail_mass,
        fitted_rate,
    }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// One row of `records.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub rt_margin: f64,
    pub sup_f: f64,
    pub sup_omega: f64,
    pub ws_norm: f64,
    pub critical_seminorm: f64,
    pub tail_mass: f64,
    /// `−d ln sup|f| / dt`, least-squares over all records so far.
    pub fitted_decay_rate: Option<f64>,
}

impl TrajectoryRecord {
    pub const CSV_HEADER: &'static str =
        "t,rt_margin,sup_f,sup_omega,ws_norm,critical_seminorm,tail_mass,fitted_decay_rate";
}

pub(crate) fn record(
    t: f64,
    f: &GridFunction,
    vel: &Velocity,
    rt_margin: f64,
    idx: &SobolevIndex,
    previous: &[TrajectoryRecord],
) -> TrajectoryRecord {
    let sup_f = f.sup_norm();
    let (mut ts, mut ls): (Vec<f64>, Vec<f64>) = previous
        .iter()
        .filter(|r| r.sup_f > 0.0)
        .map(|r| (r.t, r.sup_f.ln()))
        .unzip();
    if sup_f > 0.0 {
        ts.push(t);
        ls.push(sup_f.ln());
    }
    TrajectoryRecord {
        t,
        rt_margin,
        sup_f,
        sup_omega: vel.omega.sup_norm(),
        ws_norm: sobolev_norm(f, idx),
        critical_seminorm: fractional_seminorm(&vel.slope, 1.0 / idx.p, idx.p),
        tail_mass: spectral_tail(f).tail_mass,
        fitted_decay_rate: least_squares_slope(&ts, &ls).map(|s| -s),
    }
}
