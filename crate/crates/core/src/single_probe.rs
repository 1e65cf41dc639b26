//! Occupation dynamics of a single resonant level coupled to the wide-band
//! bath: exact Heisenberg-Langevin solution, Markovian rate equation,
//! short-time expansion, steady state, and the frequency-domain
//! fluctuation-dissipation check.
//!
//! The exact excited-state population is
//!
//! ```text
//! p1(t) = e^{-Gamma t} p1(0)
//!       + (2 Gamma / pi) int dw f(w) (1 - 2 e^{-Gamma t/2} cos((w-eps)t)
//!                                       + e^{-Gamma t}) / (Gamma^2 + 4(w-eps)^2)
//! ```
//!
//! and its steady state replaces the transient weight by the plain
//! Lorentzian. Temperature derivatives are taken analytically under the
//! integral (only the Fermi factor depends on `T`), which preserves
//! precision at temperatures far below the gap where finite differences
//! collapse.

use alloc::vec::Vec;

#[allow(unused_imports)] // float intrinsics under no_std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{fermi, fermi_dt, ModelParams};
use crate::quad::{integrate_fermi_lorentzian, QuadConfig, ThermalKernel, Weight};

/// Half-width (in units of `T`) of the symmetric window regularising the
/// short-time expansion around `mu`.
const SHORT_TIME_WINDOW: f64 = 40.0;

/// Window-sensitivity level beyond which the short-time expansion is
/// rejected as meaningless.
const SHORT_TIME_DIVERGENCE: f64 = 0.1;

/// How the occupation samples of a [`Trajectory`] were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Markovian,
    ShortTime,
}

/// Time grid with occupation and temperature-derivative samples for one
/// probe.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub p1: Vec<f64>,
    pub dp1_dt: Vec<f64>,
    pub method: Method,
}

impl Trajectory {
    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.p1.len() || self.times.len() != self.dp1_dt.len() {
            return Err(Error::InvalidParams(
                "trajectory sequences differ in length",
            ));
        }
        if self.times.first().is_some_and(|&t| t < 0.0) {
            return Err(Error::InvalidParams("times must start at >= 0"));
        }
        if self.times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams("times must be strictly increasing"));
        }
        if self.p1.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::InvalidParams("occupations must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Exact excited-state population at time `t`.
pub fn p1_exact(t: f64, params: &ModelParams, cfg: &QuadConfig) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidParams("time must be >= 0"));
    }
    let p0 = params.initial_occupation()?;
    if t == 0.0 {
        return Ok(p0);
    }
    let gamma = params.gamma();
    let raw = integrate_fermi_lorentzian(
        params,
        cfg,
        Weight::Transient { t },
        ThermalKernel::Occupation,
    )?;
    let value = (-gamma * t).exp() * p0 + (2.0 * gamma / core::f64::consts::PI) * raw;
    clamp_probability(value, cfg)
}

/// Analytic temperature derivative of [`p1_exact`].
pub fn p1_exact_dt(t: f64, params: &ModelParams, cfg: &QuadConfig) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidParams("time must be >= 0"));
    }
    params.initial_occupation()?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let gamma = params.gamma();
    let raw = integrate_fermi_lorentzian(
        params,
        cfg,
        Weight::Transient { t },
        ThermalKernel::OccupationDt,
    )?;
    Ok((2.0 * gamma / core::f64::consts::PI) * raw)
}

/// Steady-state population, computed from its own frequency integral
/// rather than by running the dynamics out to large times.
pub fn p1_steady(params: &ModelParams, cfg: &QuadConfig) -> Result<f64> {
    let gamma = params.gamma();
    let raw = integrate_fermi_lorentzian(params, cfg, Weight::Steady, ThermalKernel::Occupation)?;
    clamp_probability((2.0 * gamma / core::f64::consts::PI) * raw, cfg)
}

/// Analytic temperature derivative of the steady-state population.
pub fn p1_steady_dt(params: &ModelParams, cfg: &QuadConfig) -> Result<f64> {
    let gamma = params.gamma();
    let raw = integrate_fermi_lorentzian(params, cfg, Weight::Steady, ThermalKernel::OccupationDt)?;
    Ok((2.0 * gamma / core::f64::consts::PI) * raw)
}

/// Markovian (GKLS rate equation) population: exact closed form.
pub fn p1_markovian(t: f64, params: &ModelParams) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidParams("time must be >= 0"));
    }
    let p0 = params.initial_occupation()?;
    let eps = params.epsilon()?;
    let decay = (-params.gamma() * t).exp();
    Ok(decay * p0 + (1.0 - decay) * fermi(eps, params))
}

/// Temperature derivative of the Markovian population.
pub fn p1_markovian_dt(t: f64, params: &ModelParams) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidParams("time must be >= 0"));
    }
    params.initial_occupation()?;
    let eps = params.epsilon()?;
    Ok((1.0 - (-params.gamma() * t).exp()) * fermi_dt(eps, params))
}

/// Short-time expansion of the population with its regularisation window
/// diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortTimeEstimate {
    pub value: f64,
    /// Half-width of the symmetric frequency window around `mu`.
    pub window: f64,
    /// Population shift caused by doubling the window: nonzero whenever
    /// the initial occupation differs from 1/2, where the flat-band
    /// integral is genuinely cutoff-dependent.
    pub window_sensitivity: f64,
    /// Set when `Gamma t` exceeds 0.1 and the expansion leaves its
    /// domain of validity.
    pub beyond_validity: bool,
}

/// Quadratic short-time population, regularised on a symmetric window
/// around `mu`.
pub fn p1_short_time(t: f64, params: &ModelParams) -> Result<f64> {
    p1_short_time_detailed(t, params).map(|s| s.value)
}

/// Short-time population together with window-dependence diagnostics.
pub fn p1_short_time_detailed(t: f64, params: &ModelParams) -> Result<ShortTimeEstimate> {
    if t < 0.0 {
        return Err(Error::InvalidParams("time must be >= 0"));
    }
    let n0 = params.initial_occupation()?;
    params.epsilon()?;
    let gamma = params.gamma();
    let temperature = params.temperature();
    let window = SHORT_TIME_WINDOW * temperature;
    // int_{mu-W}^{mu+W} (f - n0) dw = W (1 - 2 n0) exactly: the deviation
    // of f from the step is odd about mu, so it integrates to zero on any
    // symmetric window.
    let moment = |w: f64| w * (1.0 - 2.0 * n0);
    let quad_coeff = gamma / (2.0 * core::f64::consts::PI);
    let value = n0 + t * t * quad_coeff * moment(window);
    let sensitivity = (t * t * quad_coeff * (moment(2.0 * window) - moment(window))).abs();
    if sensitivity > SHORT_TIME_DIVERGENCE {
        return Err(Error::DivergentExpansion { sensitivity });
    }
    Ok(ShortTimeEstimate {
        value,
        window,
        window_sensitivity: sensitivity,
        beyond_validity: gamma * t > 0.1,
    })
}

/// Frequency-domain fluctuation-dissipation pair: the bath noise spectrum
/// and `4 pi f(w) Re chi(w)`. For the flat wide-band bath both sides equal
/// `2 pi f(w) Gamma`.
pub fn fdr_check(omega: f64, params: &ModelParams) -> (f64, f64) {
    let bath = params.bath();
    let f = fermi(omega, params);
    let noise_spectrum = 2.0 * core::f64::consts::PI * f * bath.spectral_density(omega);
    let re_chi = 0.5 * bath.spectral_density(omega);
    let response_side = 4.0 * core::f64::consts::PI * f * re_chi;
    (noise_spectrum, response_side)
}

/// Samples `p1` and its temperature derivative over a time grid.
pub fn trajectory(
    times: &[f64],
    params: &ModelParams,
    cfg: &QuadConfig,
    method: Method,
) -> Result<Trajectory> {
    let mut p1 = Vec::with_capacity(times.len());
    let mut dp1 = Vec::with_capacity(times.len());
    for &t in times {
        let (p, d) = match method {
            Method::Exact => (p1_exact(t, params, cfg)?, p1_exact_dt(t, params, cfg)?),
            Method::Markovian => (p1_markovian(t, params)?, p1_markovian_dt(t, params)?),
            Method::ShortTime => {
                let s = p1_short_time(t, params)?;
                // derivative of the regularised expansion: the window
                // moment is T-linear, so d/dT (t^2 G W (1-2n0) / 2pi)
                let n0 = params.initial_occupation()?;
                let d = t * t * params.gamma() / (2.0 * core::f64::consts::PI)
                    * SHORT_TIME_WINDOW
                    * (1.0 - 2.0 * n0);
                (s, d)
            }
        };
        p1.push(p);
        dp1.push(d);
    }
    let tr = Trajectory {
        times: times.to_vec(),
        p1,
        dp1_dt: dp1,
        method,
    };
    tr.validate()?;
    Ok(tr)
}

fn clamp_probability(value: f64, cfg: &QuadConfig) -> Result<f64> {
    let tol = cfg.abs_tol.max(1e-12) * 100.0;
    if value < -tol || value > 1.0 + tol {
        return Err(Error::OutOfRange {
            value,
            tolerance: tol,
        });
    }
    Ok(value.clamp(0.0, 1.0))
}
