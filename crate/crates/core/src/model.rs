//! Physical parameter records, unit conventions and Fermi statistics.
//!
//! Units are fixed to `hbar = k_B = 1`. All energies are measured in units
//! of the effective gap `epsilon - mu` (the convention used throughout for
//! reported results) and times in its inverse.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // float intrinsics under no_std
use num_traits::Float;

use crate::error::{Error, Result};

/// Largest exponent fed to `exp`; beyond it the Fermi function saturates
/// to exactly 0 or 1 to avoid overflow in low-temperature sweeps.
const EXP_CLAMP: f64 = 700.0;

/// Physical parameters of the probe(s) and bath: the single source of truth
/// shared by every other module.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    epsilons: Vec<f64>,
    mu: f64,
    gamma: f64,
    temperature: f64,
    initial_occupations: Vec<f64>,
}

impl ModelParams {
    /// Builds a parameter record, validating every invariant.
    pub fn new(
        epsilons: Vec<f64>,
        mu: f64,
        gamma: f64,
        temperature: f64,
        initial_occupations: Vec<f64>,
    ) -> Result<Self> {
        if epsilons.is_empty() {
            return Err(Error::InvalidParams("epsilons must be nonempty"));
        }
        if initial_occupations.len() != epsilons.len() {
            return Err(Error::InvalidParams(
                "initial_occupations length must equal epsilons length",
            ));
        }
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidParams("gamma must be finite and > 0"));
        }
        if !temperature.is_finite() || temperature <= 0.0 {
            return Err(Error::InvalidParams("temperature must be finite and > 0"));
        }
        if epsilons.iter().any(|e| !e.is_finite()) || !mu.is_finite() {
            return Err(Error::InvalidParams("energies must be finite"));
        }
        if initial_occupations
            .iter()
            .any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0)
        {
            return Err(Error::InvalidParams(
                "initial occupations must lie in [0, 1]",
            ));
        }
        Ok(Self {
            epsilons,
            mu,
            gamma,
            temperature,
            initial_occupations,
        })
    }

    /// Single-mode record with the default convention `epsilon - mu = 1`
    /// and the probe starting from the ground state.
    pub fn single_default(gamma: f64, temperature: f64) -> Result<Self> {
        Self::new(vec![1.0], 0.0, gamma, temperature, vec![0.0])
    }

    /// Single-mode record with explicit energy and initial occupation.
    pub fn single(epsilon: f64, mu: f64, gamma: f64, temperature: f64, p0: f64) -> Result<Self> {
        Self::new(vec![epsilon], mu, gamma, temperature, vec![p0])
    }

    /// Copy of this record with a different coupling.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(
            self.epsilons.clone(),
            self.mu,
            gamma,
            self.temperature,
            self.initial_occupations.clone(),
        )
    }

    /// Copy of this record with a different temperature.
    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        Self::new(
            self.epsilons.clone(),
            self.mu,
            self.gamma,
            temperature,
            self.initial_occupations.clone(),
        )
    }

    pub fn n_modes(&self) -> usize {
        self.epsilons.len()
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    /// Energy of the only mode; errors if the record is multi-mode.
    pub fn epsilon(&self) -> Result<f64> {
        if self.epsilons.len() == 1 {
            Ok(self.epsilons[0])
        } else {
            Err(Error::InvalidParams("operation requires a single mode"))
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }

    pub fn initial_occupations(&self) -> &[f64] {
        &self.initial_occupations
    }

    /// Initial occupation of the only mode; errors if multi-mode.
    pub fn initial_occupation(&self) -> Result<f64> {
        if self.initial_occupations.len() == 1 {
            Ok(self.initial_occupations[0])
        } else {
            Err(Error::InvalidParams("operation requires a single mode"))
        }
    }

    /// True when every mode sits at the same energy.
    pub fn is_symmetric(&self) -> bool {
        self.epsilons
            .iter()
            .all(|e| (*e - self.epsilons[0]).abs() == 0.0)
    }

    pub fn bath(&self) -> BathSpec {
        BathSpec {
            kind: BathKind::WideBandFlat,
            gamma: self.gamma,
        }
    }
}

/// Supported bath spectral densities. Only the flat wide-band case is
/// implemented; the enum is the extension point for structured baths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BathKind {
    WideBandFlat,
}

/// Bath spectral density `Gamma(omega)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    pub kind: BathKind,
    pub gamma: f64,
}

impl BathSpec {
    pub fn flat(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidParams("gamma must be finite and > 0"));
        }
        Ok(Self {
            kind: BathKind::WideBandFlat,
            gamma,
        })
    }

    /// Spectral density at frequency `omega`.
    pub fn spectral_density(&self, _omega: f64) -> f64 {
        match self.kind {
            BathKind::WideBandFlat => self.gamma,
        }
    }
}

/// Fermi distribution `1 / (e^{(omega - mu)/T} + 1)`.
///
/// Evaluated from the sign-stable side so it never overflows; saturates to
/// exactly 0 or 1 once `|omega - mu|/T` exceeds the representable range.
pub fn fermi(omega: f64, params: &ModelParams) -> f64 {
    fermi_raw(omega, params.mu, params.temperature)
}

/// Temperature derivative of the Fermi distribution,
/// `((omega - mu)/T^2) f (1 - f)`. Exactly zero at `omega = mu`.
pub fn fermi_dt(omega: f64, params: &ModelParams) -> f64 {
    fermi_dt_raw(omega, params.mu, params.temperature)
}

pub(crate) fn fermi_raw(omega: f64, mu: f64, temperature: f64) -> f64 {
    let x = (omega - mu) / temperature;
    if x > EXP_CLAMP {
        0.0
    } else if x < -EXP_CLAMP {
        1.0
    } else if x >= 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

pub(crate) fn fermi_dt_raw(omega: f64, mu: f64, temperature: f64) -> f64 {
    let x = (omega - mu) / temperature;
    if x == 0.0 || x.abs() > EXP_CLAMP {
        return 0.0;
    }
    // f(1-f) = e^{-|x|} / (1 + e^{-|x|})^2, computed from the stable side.
    let e = (-x.abs()).exp();
    let ff = e / ((1.0 + e) * (1.0 + e));
    (x / temperature) * ff
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(temperature: f64) -> ModelParams {
        ModelParams::single(1.0, 0.0, 0.5, temperature, 0.0).unwrap()
    }

    #[test]
    fn fermi_at_mu_is_half() {
        let p = params(0.37);
        assert_eq!(fermi(0.0, &p), 0.5);
    }

    #[test]
    fn fermi_infinite_temperature_limit() {
        let p = params(1e12);
        assert!((fermi(1.0, &p) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fermi_low_temperature_value() {
        // 1/(e^10 + 1) evaluated at high precision.
        let p = params(0.1);
        let expected = 4.5397868702434395e-5;
        assert!((fermi(1.0, &p) - expected).abs() < 1e-18);
    }

    #[test]
    fn fermi_saturates_without_overflow() {
        let p = params(1e-6);
        assert_eq!(fermi(1.0, &p), 0.0);
        assert_eq!(fermi(-1.0, &p), 1.0);
        assert_eq!(fermi_dt(1.0, &p), 0.0);
    }

    #[test]
    fn fermi_dt_at_mu_is_exactly_zero() {
        for t in [1e-3, 0.1, 1.0, 1e3] {
            assert_eq!(fermi_dt(0.0, &params(t)), 0.0);
        }
    }

    #[test]
    fn fermi_dt_symbolic_value() {
        // d/dT 1/(e^{1/T}+1) at T=1 is e/(1+e)^2.
        let p = params(1.0);
        let e = core::f64::consts::E;
        let expected = e / ((1.0 + e) * (1.0 + e));
        assert!((fermi_dt(1.0, &p) - expected).abs() < 1e-15);
        assert!((expected - 0.196611933241482).abs() < 1e-12);
    }

    #[test]
    fn fermi_dt_matches_finite_difference() {
        for temperature in [0.05, 0.3, 1.0, 7.0] {
            let p = params(temperature);
            let h = 1e-6 * temperature;
            for k in -30..=30 {
                let omega = 0.2 * k as f64;
                // difference the small occupation side: for omega < mu the
                // occupation saturates near 1 and loses the T-dependence to
                // rounding, but 1 - f(omega) = f(2 mu - omega) exactly
                let fd = if omega >= 0.0 {
                    let fp = fermi_raw(omega, 0.0, temperature + h);
                    let fm = fermi_raw(omega, 0.0, temperature - h);
                    (fp - fm) / (2.0 * h)
                } else {
                    let fp = fermi_raw(-omega, 0.0, temperature + h);
                    let fm = fermi_raw(-omega, 0.0, temperature - h);
                    -(fp - fm) / (2.0 * h)
                };
                let an = fermi_dt(omega, &p);
                let denom = an.abs().max(1e-12);
                assert!(
                    ((an - fd) / denom).abs() < 1e-5,
                    "T={temperature} omega={omega}: analytic {an} fd {fd}"
                );
            }
        }
    }

    #[test]
    fn validation_rejects_bad_params() {
        assert!(ModelParams::new(vec![], 0.0, 1.0, 1.0, vec![]).is_err());
        assert!(ModelParams::single(1.0, 0.0, 0.0, 1.0, 0.0).is_err());
        assert!(ModelParams::single(1.0, 0.0, 1.0, -1.0, 0.0).is_err());
        assert!(ModelParams::single(1.0, 0.0, 1.0, 1.0, 1.5).is_err());
        assert!(ModelParams::new(vec![1.0, 2.0], 0.0, 1.0, 1.0, vec![0.0]).is_err());
        assert!(BathSpec::flat(-2.0).is_err());
    }
}
