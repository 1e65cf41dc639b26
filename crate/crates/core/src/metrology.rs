//! Temperature-estimation metrology: classical Fisher information of the
//! population measurement, quantum Fisher information via the symmetric
//! logarithmic derivative, noise-to-signal ratios, the Fisher-information
//! rate, and the scalar optimisers used to locate optimal interrogation
//! times, couplings and temperatures.

use alloc::vec::Vec;

#[allow(unused_imports)] // float intrinsics under no_std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{fermi, fermi_dt, ModelParams};
use crate::quad::{ComplexMatrix, QuadConfig};
use crate::single_probe;

/// Eigenvalue-sum cutoff in the SLD double sum: pairs with
/// `p_i + p_j <= THETA` are dropped. Ground-state-like states at low
/// temperature carry near-zero eigenvalues whose contribution is finite
/// only through matched small numerators.
pub const SLD_EIGEN_CUTOFF: f64 = 1e-12;

/// Classical Fisher information of a two-outcome measurement,
/// `(dT p1)^2 / (p1 (1 - p1))`.
///
/// Returns 0 when the derivative vanishes regardless of `p1` (the `0/0`
/// limit at endpoints is dominated by the quadratic numerator); errors
/// when `p1` sits exactly at an endpoint with a nonzero derivative.
pub fn fi_two_outcome(p1: f64, dp1_dt: f64) -> Result<f64> {
    if dp1_dt == 0.0 {
        return Ok(0.0);
    }
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::InvalidParams("p1 must lie in [0, 1]"));
    }
    if p1 == 0.0 || p1 == 1.0 {
        return Err(Error::DegenerateDistribution { p1 });
    }
    Ok(dp1_dt * dp1_dt / (p1 * (1.0 - p1)))
}

/// Eigendecomposition of a state together with its temperature derivative
/// rotated into the eigenbasis.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Eigenvalues of the state, ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary whose columns are the eigenvectors.
    pub eigenvectors: ComplexMatrix,
    /// `U^dagger (dT rho) U`.
    pub d_eigen: ComplexMatrix,
}

/// Validates a (state, derivative) pair and diagonalises the state.
pub fn spectral_decomposition(
    rho: &ComplexMatrix,
    drho_dt: &ComplexMatrix,
) -> Result<SpectralDecomposition> {
    let n = rho.dim();
    if drho_dt.dim() != n {
        return Err(Error::NotAState("state and derivative dimensions differ"));
    }
    if !rho.is_hermitian(1e-10) {
        return Err(Error::NotAState("state is not Hermitian"));
    }
    if !drho_dt.is_hermitian(1e-10) {
        return Err(Error::NotAState("derivative is not Hermitian"));
    }
    if (rho.trace().re - 1.0).abs() > 1e-10 || rho.trace().im.abs() > 1e-10 {
        return Err(Error::NotAState("state trace differs from 1"));
    }
    if drho_dt.trace().norm() > 1e-10 {
        return Err(Error::NotAState("derivative is not traceless"));
    }
    let (eigenvalues, eigenvectors) = rho.hermitian_eigen()?;
    if eigenvalues.iter().any(|&p| p < -1e-10) {
        return Err(Error::NotAState("state has a negative eigenvalue"));
    }
    let d_eigen = eigenvectors.adjoint().mul(drho_dt).mul(&eigenvectors);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        d_eigen,
    })
}

/// Quantum Fisher information from the symmetric logarithmic derivative:
/// `sum_{ij: p_i + p_j > theta} 2 |<i| dT rho |j>|^2 / (p_i + p_j)`.
pub fn qfi_sld(rho: &ComplexMatrix, drho_dt: &ComplexMatrix) -> Result<f64> {
    let sd = spectral_decomposition(rho, drho_dt)?;
    Ok(qfi_from_decomposition(&sd))
}

pub fn qfi_from_decomposition(sd: &SpectralDecomposition) -> f64 {
    let n = sd.eigenvalues.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let denom = sd.eigenvalues[i].max(0.0) + sd.eigenvalues[j].max(0.0);
            if denom > SLD_EIGEN_CUTOFF {
                let num = sd.d_eigen[(i, j)].norm_sqr();
                total += 2.0 * num / denom;
            }
        }
    }
    total
}

/// Fisher information per unit interrogation time.
pub fn fi_rate(t: f64, fi: f64) -> f64 {
    debug_assert!(t > 0.0);
    fi / t
}

/// Fisher information of the exact population measurement at time `t`.
pub fn fi_exact_at(t: f64, params: &ModelParams, cfg: &QuadConfig) -> Result<f64> {
    let p = single_probe::p1_exact(t, params, cfg)?;
    let d = single_probe::p1_exact_dt(t, params, cfg)?;
    fi_two_outcome(p, d)
}

/// Fisher information of the Markovian population at time `t`.
pub fn fi_markovian_at(t: f64, params: &ModelParams) -> Result<f64> {
    let p = single_probe::p1_markovian(t, params)?;
    let d = single_probe::p1_markovian_dt(t, params)?;
    fi_two_outcome(p, d)
}

/// Steady-state Fisher information of the exact dynamics.
pub fn fi_steady(params: &ModelParams, cfg: &QuadConfig) -> Result<f64> {
    let p = single_probe::p1_steady(params, cfg)?;
    let d = single_probe::p1_steady_dt(params, cfg)?;
    fi_two_outcome(p, d)
}

/// Minimum noise-to-signal ratio `1 / (T^2 F)` of the exact steady state.
pub fn noise_to_signal(params: &ModelParams, cfg: &QuadConfig) -> Result<f64> {
    let fi = fi_steady(params, cfg)?;
    nsr_from_fi(params.temperature(), fi)
}

/// Weak-coupling (thermal-state) noise-to-signal ratio in closed form.
pub fn noise_to_signal_markovian(params: &ModelParams) -> Result<f64> {
    let eps = params.epsilon()?;
    let fi = fi_two_outcome(fermi(eps, params), fermi_dt(eps, params))?;
    nsr_from_fi(params.temperature(), fi)
}

fn nsr_from_fi(temperature: f64, fi: f64) -> Result<f64> {
    if fi <= 0.0 {
        return Err(Error::FlatObjective);
    }
    Ok(1.0 / (temperature * temperature * fi))
}

/// Which dynamics produced a Fisher curve.
pub use crate::single_probe::Method;

/// Quantity swept along a [`FisherCurve`] axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    Time,
    Coupling,
    Temperature,
}

/// Located maximum of a scanned objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub argmax: f64,
    pub max: f64,
    /// Set when the maximum sits on (or refines into) an interval edge:
    /// the Markovian rate optimum at `t -> 0` is the canonical case.
    pub boundary: bool,
}

/// Fisher information (or its rate) sampled along one axis, with the
/// located optimum when one was requested.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherCurve {
    pub axis: Vec<f64>,
    pub axis_kind: AxisKind,
    pub values: Vec<f64>,
    pub optimum: Option<Optimum>,
    pub method: Method,
}

impl FisherCurve {
    pub fn validate(&self) -> Result<()> {
        if self.axis.len() != self.values.len() {
            return Err(Error::InvalidParams("axis and values differ in length"));
        }
        if self.values.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidParams("Fisher information must be >= 0"));
        }
        if let Some(opt) = &self.optimum {
            let grid_max = self
                .values
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            if opt.max + 1e-9 * opt.max.abs().max(1.0) < grid_max {
                return Err(Error::InvalidParams(
                    "optimum must attain the grid maximum within tolerance",
                ));
            }
        }
        Ok(())
    }

    /// Builds a Fisher-information curve over `times`, locating the
    /// optimum by refinement around the best grid point.
    pub fn over_time(
        times: &[f64],
        params: &ModelParams,
        cfg: &QuadConfig,
        method: Method,
    ) -> Result<Self> {
        let eval = |t: f64| -> Result<f64> {
            match method {
                Method::Exact => fi_exact_at(t, params, cfg),
                Method::Markovian => fi_markovian_at(t, params),
                Method::ShortTime => Err(Error::InvalidParams(
                    "short-time Fisher curves are not defined",
                )),
            }
        };
        let mut values = Vec::with_capacity(times.len());
        for &t in times {
            values.push(eval(t)?);
        }
        let optimum = refine_grid_maximum(times, &values, eval, 1e-4).ok();
        let curve = Self {
            axis: times.to_vec(),
            axis_kind: AxisKind::Time,
            values,
            optimum,
            method,
        };
        curve.validate()?;
        Ok(curve)
    }
}

/// Options for [`optimize_scalar`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOptions {
    /// Relative tolerance on the located argmax.
    pub refine_tol: f64,
    /// Objective flatness threshold: `max - min` below this errors out.
    pub flat_tol: f64,
    /// Coarse scan size (log-spaced when the interval allows it).
    pub grid_points: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            refine_tol: 1e-4,
            flat_tol: 1e-12,
            grid_points: 96,
        }
    }
}

/// Maximises `f` on `[lo, hi]`: a coarse grid scan (at least 64 points,
/// log-spaced when `lo > 0` and the interval spans a decade) guards
/// against secondary peaks, then golden-section refinement sharpens the
/// best grid point. Ties break toward the smaller argument; edge optima
/// are flagged rather than hidden.
pub fn optimize_scalar<F>(mut f: F, lo: f64, hi: f64, opts: &OptimizeOptions) -> Result<Optimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParams(
            "interval bounds must be finite, lo < hi",
        ));
    }
    let n = opts.grid_points.max(64);
    let log_spaced = lo > 0.0 && hi / lo >= 10.0;
    let grid: Vec<f64> = (0..n)
        .map(|k| {
            let s = k as f64 / (n - 1) as f64;
            if log_spaced {
                lo * (hi / lo).powf(s)
            } else {
                lo + (hi - lo) * s
            }
        })
        .collect();

    let mut best_idx = 0usize;
    let mut best = f64::NEG_INFINITY;
    let mut worst = f64::INFINITY;
    for (k, &x) in grid.iter().enumerate() {
        let v = f(x)?;
        if v > best {
            best = v;
            best_idx = k;
        }
        worst = worst.min(v);
    }
    if best - worst < opts.flat_tol {
        return Err(Error::FlatObjective);
    }

    let a = grid[best_idx.saturating_sub(1)];
    let b = grid[(best_idx + 1).min(n - 1)];
    let (argmax, max) = golden_section_max(&mut f, a, b, opts.refine_tol)?;
    let boundary = best_idx == 0 && (argmax - lo).abs() <= (b - a).abs()
        || best_idx == n - 1 && (hi - argmax).abs() <= (b - a).abs();
    Ok(Optimum {
        argmax,
        max,
        boundary,
    })
}

fn golden_section_max<F>(f: &mut F, mut a: f64, mut b: f64, rel_tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..200 {
        if (b - a).abs() <= rel_tol * a.abs().max(b.abs()).max(1e-300) {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    // prefer the smaller argument on ties
    if f1 >= f2 {
        Ok((x1, f1))
    } else {
        Ok((x2, f2))
    }
}

/// Refines the maximum of tabulated values by golden section around the
/// best grid point.
fn refine_grid_maximum<F>(axis: &[f64], values: &[f64], mut f: F, rel_tol: f64) -> Result<Optimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if axis.len() < 2 {
        return Err(Error::InvalidParams("need at least two grid points"));
    }
    let mut best_idx = 0usize;
    for (k, &v) in values.iter().enumerate() {
        if v > values[best_idx] {
            best_idx = k;
        }
    }
    let a = axis[best_idx.saturating_sub(1)];
    let b = axis[(best_idx + 1).min(axis.len() - 1)];
    let (argmax, max) = golden_section_max(&mut f, a, b, rel_tol)?;
    Ok(Optimum {
        argmax,
        max,
        boundary: best_idx == 0 || best_idx == values.len() - 1,
    })
}

/// Search interval for the optimal interrogation time, in units of
/// `1/Gamma`: the Markovian optimum lives on the lower edge, the exact
/// optimum strictly inside.
pub const TIME_SEARCH_INTERVAL: (f64, f64) = (1e-4, 50.0);

/// Locates the interrogation time maximising the Fisher-information rate.
pub fn optimal_measurement_time(
    params: &ModelParams,
    cfg: &QuadConfig,
    method: Method,
) -> Result<Optimum> {
    let gamma = params.gamma();
    let (lo, hi) = TIME_SEARCH_INTERVAL;
    let objective = |t: f64| -> Result<f64> {
        let fi = match method {
            Method::Exact => fi_exact_at(t, params, cfg)?,
            Method::Markovian => fi_markovian_at(t, params)?,
            Method::ShortTime => {
                return Err(Error::InvalidParams(
                    "short-time rate optimisation is not defined",
                ))
            }
        };
        Ok(fi_rate(t, fi))
    };
    optimize_scalar(
        objective,
        lo / gamma,
        hi / gamma,
        &OptimizeOptions::default(),
    )
}
