//! Several fermionic levels sharing one wide-band bath: matrix Langevin
//! dynamics of the two-point correlations, Wick reconstruction of the
//! reduced density matrix (n <= 2), additivity comparisons against
//! independent baths, and the symmetric-case reduction to a single level
//! with a rescaled coupling.
//!
//! The Heisenberg equations close on the mode vector `d(t)`:
//!
//! ```text
//! d(t) = e^{A t} d(0) - i int_0^t ds e^{A(t-s)} 1_v xi(s),
//! ```
//!
//! with the generator `A` carrying `-i(E_j - i Gamma/2)` on the diagonal
//! and `-Gamma/2` everywhere else. The noise contribution to
//! `C_ij = <d_i^dag d_j>` collapses to a single frequency integral
//!
//! ```text
//! C_noise(t) = (Gamma / 2 pi) int dw f(w) conj(g_i(w,t)) g_j(w,t),
//! g(w, t) = (A + i w)^{-1} (e^{A t} - e^{-i w t}) 1_v,
//! ```
//!
//! evaluated through the resolvent (robust even at exceptional points of
//! `A`) while the analytic tails use the modal expansion
//! `g_i = sum_m c_im (e^{lambda_m t} - e^{-i w t}) / (lambda_m + i w)`.
//! Equal-energy probes bypass both: only the symmetric combination
//! couples, with `lambda = -i eps - n Gamma / 2`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)] // float intrinsics under no_std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::metrology;
use crate::model::ModelParams;
use crate::quad::{
    expm, integrate_thermal, ComplexMatrix, PolePair, QuadConfig, SpectralTerm, ThermalIntegral,
    ThermalKernel,
};
use crate::single_probe;

/// Drift matrix of the mode-vector Langevin equation.
#[derive(Debug, Clone, PartialEq)]
pub struct LangevinGenerator {
    pub a: ComplexMatrix,
}

/// Builds the generator: diagonal `-i(E_j - i Gamma/2)`, off-diagonal
/// `-Gamma/2`.
pub fn build_generator(params: &ModelParams) -> LangevinGenerator {
    let n = params.n_modes();
    let g2 = params.gamma() / 2.0;
    let mut a = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = if i == j {
                C64::new(-g2, -params.epsilons()[i])
            } else {
                C64::new(-g2, 0.0)
            };
        }
    }
    LangevinGenerator { a }
}

impl LangevinGenerator {
    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// All eigenvalues of the generator. Equal-energy probes have `n - 1`
    /// neutrally stable eigenvalues `-i eps` (the decoupled combinations,
    /// which make the steady state non-unique) next to `-i eps - n Gamma/2`.
    pub fn eigenvalues(&self, params: &ModelParams) -> Result<Vec<C64>> {
        if params.is_symmetric() {
            let eps = params.epsilons()[0];
            let n = self.dim();
            let mut out = vec![C64::new(0.0, -eps); n - 1];
            out.push(C64::new(-(n as f64) * params.gamma() / 2.0, -eps));
            return Ok(out);
        }
        Ok(modal_modes(params)?.into_iter().map(|m| m.lambda).collect())
    }

    /// True when every eigenvalue has strictly negative real part, i.e.
    /// the energies are not all degenerate into decoupled combinations.
    pub fn is_strictly_stable(&self, params: &ModelParams) -> Result<bool> {
        Ok(self
            .eigenvalues(params)?
            .iter()
            .all(|l| l.re < -1e-14 * params.gamma()))
    }
}

/// One coupled eigenmode of the generator: `g_i` picks up
/// `c_i (e^{lambda t} - e^{-i w t}) / (lambda + i w)` from it.
struct Mode {
    lambda: C64,
    weights: Vec<C64>,
}

/// Modal expansion of `(A + i w)^{-1}(..) 1_v`. The symmetric case has a
/// single coupled mode; distinct energies give `n` simple modes whose
/// eigenvectors are closed forms of the diagonal-plus-rank-one structure.
fn modal_modes(params: &ModelParams) -> Result<Vec<Mode>> {
    let n = params.n_modes();
    let gamma = params.gamma();
    let eps = params.epsilons();
    if n == 1 {
        return Ok(vec![Mode {
            lambda: C64::new(-gamma / 2.0, -eps[0]),
            weights: vec![C64::new(1.0, 0.0)],
        }]);
    }
    if params.is_symmetric() {
        return Ok(vec![Mode {
            lambda: C64::new(-(n as f64) * gamma / 2.0, -eps[0]),
            weights: vec![C64::new(1.0, 0.0); n],
        }]);
    }
    let lambdas = generator_spectrum(eps, gamma)?;
    let mut modes = Vec::with_capacity(n);
    for &lambda in &lambdas {
        // eigenvector of the diagonal-plus-rank-one generator
        let v: Vec<C64> = eps
            .iter()
            .map(|&e| (C64::new(0.0, -e) - lambda).inv())
            .collect();
        // complex-symmetric A: left and right eigenvectors coincide under
        // the bilinear (unconjugated) pairing
        let vv: C64 = v.iter().map(|x| x * x).sum();
        let v1: C64 = v.iter().sum();
        let vnorm: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        if vv.norm() < 1e-12 * vnorm {
            // exceptional point: defective eigenbasis
            return Err(Error::SingularDecomposition);
        }
        let factor = v1 / vv;
        modes.push(Mode {
            lambda,
            weights: v.iter().map(|x| x * factor).collect(),
        });
    }
    Ok(modes)
}

/// Eigenvalues of the generator for distinct energies: for n = 2 the
/// closed-form quadratic, beyond that Durand-Kerner iteration on the
/// characteristic polynomial `P(l) + (Gamma/2) P'(l)` with
/// `P(l) = prod_j (l + i E_j)`.
fn generator_spectrum(eps: &[f64], gamma: f64) -> Result<Vec<C64>> {
    let n = eps.len();
    let g2 = gamma / 2.0;
    if n == 2 {
        let a11 = C64::new(-g2, -eps[0]);
        let a22 = C64::new(-g2, -eps[1]);
        let tr = a11 + a22;
        let disc = (a11 - a22) * (a11 - a22) + C64::new(4.0 * g2 * g2, 0.0);
        let sq = disc.sqrt();
        return Ok(vec![(tr + sq) * 0.5, (tr - sq) * 0.5]);
    }
    // monic coefficients of P(l) = prod (l + i E_j), ascending powers
    let mut p = vec![C64::new(0.0, 0.0); n + 1];
    p[0] = C64::new(1.0, 0.0);
    for (deg, &e) in eps.iter().enumerate() {
        let root = C64::new(0.0, e);
        for k in (0..=deg).rev() {
            let pk = p[k];
            p[k + 1] += pk;
            p[k] = pk * root;
        }
    }
    // q = P + (Gamma/2) P'
    let mut q = p.clone();
    for k in 1..=n {
        let add = p[k] * (k as f64) * g2;
        q[k - 1] += add;
    }
    let eval = |z: C64| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for k in (0..=n).rev() {
            acc = acc * z + q[k];
        }
        acc
    };
    // Durand-Kerner from a circle around the eigenvalue centroid
    let centroid = C64::new(-g2, -eps.iter().sum::<f64>() / n as f64);
    let spread = eps
        .iter()
        .map(|&e| (e - eps[0]).abs())
        .fold(gamma, f64::max)
        + gamma;
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let ang = 2.0 * core::f64::consts::PI * k as f64 / n as f64 + 0.4;
            centroid + C64::new(0.0, 1.0).scale(0.0) + C64::from_polar(spread, ang)
        })
        .collect();
    for _ in 0..200 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..n {
                if j != k {
                    denom *= z[k] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                return Err(Error::SingularDecomposition);
            }
            let step = eval(z[k]) / denom;
            z[k] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-14 * spread {
            break;
        }
    }
    for zk in &z {
        if eval(*zk).norm() > 1e-8 * spread.powi(n as i32) {
            return Err(Error::SingularDecomposition);
        }
    }
    Ok(z)
}

/// Two-point correlations `C_ij = <d_i^dag d_j>` and their temperature
/// derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub c: ComplexMatrix,
    pub c_dt: ComplexMatrix,
}

impl CorrelationMatrix {
    pub fn dim(&self) -> usize {
        self.c.dim()
    }

    pub fn validate(&self) -> Result<()> {
        if self.c.dim() != self.c_dt.dim() {
            return Err(Error::InvalidParams("correlation matrices differ in size"));
        }
        if !self.c.is_hermitian(1e-10) || !self.c_dt.is_hermitian(1e-10) {
            return Err(Error::InvalidParams("correlation matrix not Hermitian"));
        }
        let (vals, _) = self.c.hermitian_eigen()?;
        if vals.iter().any(|&v| !(-1e-8..=1.0 + 1e-8).contains(&v)) {
            return Err(Error::InvalidParams(
                "correlation eigenvalues escape [0, 1]",
            ));
        }
        Ok(())
    }
}

/// What the noise integral should describe.
enum NoiseKind {
    Transient { t: f64 },
    Steady,
}

/// Evolves the correlation matrix from the diagonal product initial state
/// to time `t`.
pub fn evolve_correlations(
    t: f64,
    params: &ModelParams,
    cfg: &QuadConfig,
) -> Result<CorrelationMatrix> {
    if t < 0.0 {
        return Err(Error::InvalidParams("time must be >= 0"));
    }
    let n = params.n_modes();
    let gen = build_generator(params);
    let u = expm(&gen.a, t)?;

    // homogeneous part: conj(U) C(0) U^T with diagonal C(0)
    let p0 = params.initial_occupations();
    let mut c = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += u[(i, k)].conj() * p0[k] * u[(j, k)];
            }
            c[(i, j)] = acc;
        }
    }
    let mut c_dt = ComplexMatrix::zeros(n);
    if t > 0.0 {
        let (noise, noise_dt) = noise_integrals(params, cfg, &gen, &u, NoiseKind::Transient { t })?;
        c = c.add(&noise);
        c_dt = noise_dt;
    }
    let out = CorrelationMatrix { c, c_dt };
    out.validate()?;
    Ok(out)
}

/// Steady-state correlations (`t -> infinity`). Requires distinct mode
/// energies: equal energies leave decoupled combinations frozen at their
/// initial occupation, so no unique steady state exists.
pub fn steady_correlations(params: &ModelParams, cfg: &QuadConfig) -> Result<CorrelationMatrix> {
    if params.n_modes() > 1 && params.is_symmetric() {
        return Err(Error::InvalidParams(
            "equal-energy probes have no unique steady state",
        ));
    }
    let gen = build_generator(params);
    let u = ComplexMatrix::zeros(params.n_modes()); // e^{At} -> 0
    let (c, c_dt) = noise_integrals(params, cfg, &gen, &u, NoiseKind::Steady)?;
    let out = CorrelationMatrix { c, c_dt };
    out.validate()?;
    Ok(out)
}

/// Shared noise-integral assembly for the transient and steady cases.
fn noise_integrals(
    params: &ModelParams,
    cfg: &QuadConfig,
    gen: &LangevinGenerator,
    u: &ComplexMatrix,
    kind: NoiseKind,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = params.n_modes();
    let gamma = params.gamma();
    let mu = params.mu();
    let temperature = params.temperature();
    let t = match kind {
        NoiseKind::Transient { t } => t,
        NoiseKind::Steady => 0.0,
    };
    let modes = modal_modes(params)?;
    let ones = vec![C64::new(1.0, 0.0); n];
    let v = u.mul_vec(&ones);

    let peaks: Vec<(f64, f64)> = modes
        .iter()
        .map(|m| (-m.lambda.im, m.lambda.re.abs().max(1e-300)))
        .collect();

    // g_i(w) for the requested kind
    let symmetric = params.is_symmetric();
    let lam_sym = modes[0].lambda;
    let gvec = |w: f64| -> Vec<C64> {
        let phase = match kind {
            NoiseKind::Transient { t } => {
                let (sin, cos) = (w * t).sin_cos();
                C64::new(cos, -sin)
            }
            NoiseKind::Steady => C64::new(1.0, 0.0),
        };
        if symmetric {
            let phi = match kind {
                NoiseKind::Transient { .. } => {
                    ((lam_sym * t).exp() - phase) / (lam_sym + C64::new(0.0, w))
                }
                NoiseKind::Steady => (lam_sym + C64::new(0.0, w)).inv(),
            };
            return vec![phi; n];
        }
        let rhs: Vec<C64> = match kind {
            NoiseKind::Transient { .. } => (0..n).map(|i| v[i] - phase).collect(),
            NoiseKind::Steady => ones.clone(),
        };
        if n == 2 {
            let a11 = gen.a[(0, 0)] + C64::new(0.0, w);
            let a22 = gen.a[(1, 1)] + C64::new(0.0, w);
            let a12 = gen.a[(0, 1)];
            let a21 = gen.a[(1, 0)];
            let det = a11 * a22 - a12 * a21;
            return vec![
                (a22 * rhs[0] - a12 * rhs[1]) / det,
                (a11 * rhs[1] - a21 * rhs[0]) / det,
            ];
        }
        let mut aw = gen.a.clone();
        for i in 0..n {
            aw[(i, i)] += C64::new(0.0, w);
        }
        aw.solve_vec(&rhs)
            .unwrap_or_else(|_| vec![C64::new(f64::NAN, 0.0); n])
    };

    // exact tail representation per (i, j) pair
    let tail_terms = |i: usize, j: usize| -> Vec<SpectralTerm> {
        let mut terms = Vec::new();
        for m in &modes {
            for mp in &modes {
                let pair = PolePair::mode_cross(m.lambda, mp.lambda);
                let w = m.weights[i].conj() * mp.weights[j];
                match kind {
                    NoiseKind::Steady => {
                        terms.push(SpectralTerm {
                            pair,
                            coeff: w,
                            sigma: 0.0,
                        });
                    }
                    NoiseKind::Transient { t } => {
                        let em = (m.lambda.conj() * t).exp();
                        let emp = (mp.lambda * t).exp();
                        terms.push(SpectralTerm {
                            pair,
                            coeff: w * (em * emp + C64::new(1.0, 0.0)),
                            sigma: 0.0,
                        });
                        terms.push(SpectralTerm {
                            pair,
                            coeff: -w * em,
                            sigma: -1.0,
                        });
                        terms.push(SpectralTerm {
                            pair,
                            coeff: -w * emp,
                            sigma: 1.0,
                        });
                    }
                }
            }
        }
        terms
    };

    let prefactor = gamma / (2.0 * core::f64::consts::PI);
    let mut c = ComplexMatrix::zeros(n);
    let mut c_dt = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let terms = tail_terms(i, j);
            let smooth = |w: f64| -> C64 {
                let g = gvec(w);
                g[i].conj() * g[j]
            };
            let spec = ThermalIntegral {
                smooth: &smooth,
                terms: &terms,
                peaks: &peaks,
                t,
                need_imag: i != j,
                window_scale: 1.0,
            };
            let occ = integrate_thermal(mu, temperature, ThermalKernel::Occupation, &spec, cfg)?;
            let docc = integrate_thermal(mu, temperature, ThermalKernel::OccupationDt, &spec, cfg)?;
            let occ = occ * prefactor;
            let docc = docc * prefactor;
            if i == j {
                c[(i, i)] = C64::new(occ.re, 0.0);
                c_dt[(i, i)] = C64::new(docc.re, 0.0);
            } else {
                c[(i, j)] = occ;
                c[(j, i)] = occ.conj();
                c_dt[(i, j)] = docc;
                c_dt[(j, i)] = docc.conj();
            }
        }
    }
    Ok((c, c_dt))
}

/// Reduced density matrix of the probes in the occupation basis, together
/// with its temperature derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeDensityMatrix {
    pub rho: ComplexMatrix,
    pub rho_dt: ComplexMatrix,
}

impl ProbeDensityMatrix {
    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    /// Quantum Fisher information of this state for temperature.
    pub fn qfi(&self) -> Result<f64> {
        metrology::qfi_sld(&self.rho, &self.rho_dt)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.rho.is_hermitian(1e-10) {
            return Err(Error::NotAState("density matrix not Hermitian"));
        }
        if (self.rho.trace().re - 1.0).abs() > 1e-10 {
            return Err(Error::NotAState("density matrix trace differs from 1"));
        }
        if self.rho_dt.trace().norm() > 1e-10 {
            return Err(Error::NotAState("derivative not traceless"));
        }
        let (vals, _) = self.rho.hermitian_eigen()?;
        if let Some(&min) = vals.first() {
            if min < -1e-10 {
                return Err(Error::NotPsd {
                    min_eigenvalue: min,
                });
            }
        }
        if self.rho.dim() == 4 {
            // particle-number superselection: coherences only inside the
            // one-particle sector {|01>, |10>}
            for &(i, j) in &[(0usize, 1usize), (0, 2), (0, 3), (1, 3), (2, 3)] {
                if self.rho[(i, j)].norm() > 1e-12 || self.rho_dt[(i, j)].norm() > 1e-12 {
                    return Err(Error::NotAState(
                        "coherence between particle-number sectors",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Wick reconstruction of the reduced state from the correlation matrix.
///
/// Basis ordering `|n1 n2> = |00>, |01>, |10>, |11>`; the one-particle
/// coherence is `rho_{10,01} = C_12` (its conjugate on the transposed
/// slot). For one mode: `diag(1 - C_11, C_11)`.
pub fn gaussian_to_density(corr: &CorrelationMatrix) -> Result<ProbeDensityMatrix> {
    corr.validate()?;
    let n = corr.dim();
    match n {
        1 => {
            let occ = corr.c[(0, 0)].re;
            let docc = corr.c_dt[(0, 0)].re;
            let mut rho = ComplexMatrix::zeros(2);
            rho[(0, 0)] = C64::new(1.0 - occ, 0.0);
            rho[(1, 1)] = C64::new(occ, 0.0);
            let mut rho_dt = ComplexMatrix::zeros(2);
            rho_dt[(0, 0)] = C64::new(-docc, 0.0);
            rho_dt[(1, 1)] = C64::new(docc, 0.0);
            let out = ProbeDensityMatrix { rho, rho_dt };
            out.validate()?;
            Ok(out)
        }
        2 => {
            let c = &corr.c;
            let d = &corr.c_dt;
            let n1 = c[(0, 0)].re;
            let n2 = c[(1, 1)].re;
            let both = (c[(0, 0)] * c[(1, 1)] - c[(0, 1)] * c[(1, 0)]).re;
            let dn1 = d[(0, 0)].re;
            let dn2 = d[(1, 1)].re;
            let dboth = (d[(0, 0)] * c[(1, 1)] + c[(0, 0)] * d[(1, 1)]
                - d[(0, 1)] * c[(1, 0)]
                - c[(0, 1)] * d[(1, 0)])
                .re;
            let mut rho = ComplexMatrix::zeros(4);
            rho[(0, 0)] = C64::new(1.0 - n1 - n2 + both, 0.0);
            rho[(1, 1)] = C64::new(n2 - both, 0.0);
            rho[(2, 2)] = C64::new(n1 - both, 0.0);
            rho[(3, 3)] = C64::new(both, 0.0);
            rho[(2, 1)] = c[(0, 1)];
            rho[(1, 2)] = c[(0, 1)].conj();
            let mut rho_dt = ComplexMatrix::zeros(4);
            rho_dt[(0, 0)] = C64::new(-dn1 - dn2 + dboth, 0.0);
            rho_dt[(1, 1)] = C64::new(dn2 - dboth, 0.0);
            rho_dt[(2, 2)] = C64::new(dn1 - dboth, 0.0);
            rho_dt[(3, 3)] = C64::new(dboth, 0.0);
            rho_dt[(2, 1)] = d[(0, 1)];
            rho_dt[(1, 2)] = d[(0, 1)].conj();
            // positivity of the reconstruction (1e-8 signals inconsistent C)
            let sector_min = {
                let avg = 0.5 * (rho[(1, 1)].re + rho[(2, 2)].re);
                let half = 0.5 * (rho[(1, 1)].re - rho[(2, 2)].re);
                avg - (half * half + rho[(1, 2)].norm_sqr()).sqrt()
            };
            let min_eig = rho[(0, 0)].re.min(rho[(3, 3)].re).min(sector_min);
            if min_eig < -1e-8 {
                return Err(Error::NotPsd {
                    min_eigenvalue: min_eig,
                });
            }
            // clip rounding-level negatives so downstream PSD checks pass
            for k in 0..4 {
                if rho[(k, k)].re < 0.0 {
                    rho[(k, k)] = C64::new(0.0, 0.0);
                }
            }
            let out = ProbeDensityMatrix { rho, rho_dt };
            out.validate()?;
            Ok(out)
        }
        _ => Err(Error::InvalidParams(
            "density-matrix reconstruction is limited to n <= 2",
        )),
    }
}

/// Outcome of the common-bath vs independent-baths comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdditivityComparison {
    pub qfi_common: f64,
    pub qfi_independent: f64,
    pub ratio: f64,
}

/// Compares the QFI of two probes sharing the bath against the sum of two
/// independent single-probe runs at the same coupling and temperature.
pub fn qfi_common_vs_independent(
    t: f64,
    params: &ModelParams,
    cfg: &QuadConfig,
) -> Result<AdditivityComparison> {
    let corr = evolve_correlations(t, params, cfg)?;
    let common = gaussian_to_density(&corr)?.qfi()?;
    let independent = independent_fi(params, |p| {
        Ok((
            single_probe::p1_exact(t, p, cfg)?,
            single_probe::p1_exact_dt(t, p, cfg)?,
        ))
    })?;
    Ok(AdditivityComparison {
        qfi_common: common,
        qfi_independent: independent,
        ratio: common / independent,
    })
}

/// Steady-state additivity comparison.
pub fn qfi_additivity_steady(
    params: &ModelParams,
    cfg: &QuadConfig,
) -> Result<AdditivityComparison> {
    let corr = steady_correlations(params, cfg)?;
    let common = gaussian_to_density(&corr)?.qfi()?;
    let independent = independent_fi(params, |p| {
        Ok((
            single_probe::p1_steady(p, cfg)?,
            single_probe::p1_steady_dt(p, cfg)?,
        ))
    })?;
    Ok(AdditivityComparison {
        qfi_common: common,
        qfi_independent: independent,
        ratio: common / independent,
    })
}

fn independent_fi<F>(params: &ModelParams, mut occ: F) -> Result<f64>
where
    F: FnMut(&ModelParams) -> Result<(f64, f64)>,
{
    if params.n_modes() != 2 {
        return Err(Error::InvalidParams("additivity comparison requires n = 2"));
    }
    let mut total = 0.0;
    for i in 0..2 {
        let single = ModelParams::single(
            params.epsilons()[i],
            params.mu(),
            params.gamma(),
            params.temperature(),
            params.initial_occupations()[i],
        )?;
        let (p, d) = occ(&single)?;
        total += metrology::fi_two_outcome(p, d)?;
    }
    Ok(total)
}

/// Which single-mode coupling rescaling reproduces the symmetric-case
/// collective mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RescalingLaw {
    /// `Gamma -> n Gamma` (amplitude scaling `sqrt(n)` squared).
    RateTimesN,
    /// `Gamma -> sqrt(n) Gamma`.
    AmplitudeTimesSqrtN,
    Neither,
}

/// Symmetric-case reduction: the full n-mode solution next to single-mode
/// predictions with the two candidate coupling rescalings.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricReduction {
    pub correlations: CorrelationMatrix,
    /// Occupation of the collective (symmetric) mode from the full run.
    pub plus_occupation: f64,
    /// Single-mode prediction with `Gamma -> n Gamma`.
    pub rate_scaled: f64,
    /// Single-mode prediction with `Gamma -> sqrt(n) Gamma`.
    pub amplitude_scaled: f64,
    pub matched: RescalingLaw,
}

/// Runs the full symmetric n-mode dynamics and reports which coupling
/// rescaling the collective mode empirically follows.
pub fn symmetric_reduction(
    n: usize,
    params: &ModelParams,
    t: f64,
    cfg: &QuadConfig,
) -> Result<SymmetricReduction> {
    if params.n_modes() != n {
        return Err(Error::InvalidParams("n must match the parameter record"));
    }
    if !params.is_symmetric() {
        return Err(Error::InvalidParams(
            "symmetric reduction requires equal energies",
        ));
    }
    let corr = evolve_correlations(t, params, cfg)?;
    let nn = n as f64;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += corr.c[(i, j)];
        }
    }
    let plus_occupation = acc.re / nn;
    let p0_plus = params.initial_occupations().iter().sum::<f64>() / nn;
    let single = |gamma: f64| -> Result<f64> {
        let p = ModelParams::single(
            params.epsilons()[0],
            params.mu(),
            gamma,
            params.temperature(),
            p0_plus,
        )?;
        single_probe::p1_exact(t, &p, cfg)
    };
    let rate_scaled = single(nn * params.gamma())?;
    let amplitude_scaled = single(nn.sqrt() * params.gamma())?;
    let matched = if n == 1 || (plus_occupation - rate_scaled).abs() < 1e-8 {
        RescalingLaw::RateTimesN
    } else if (plus_occupation - amplitude_scaled).abs() < 1e-8 {
        RescalingLaw::AmplitudeTimesSqrtN
    } else {
        RescalingLaw::Neither
    };
    Ok(SymmetricReduction {
        correlations: corr,
        plus_occupation,
        rate_scaled,
        amplitude_scaled,
        matched,
    })
}
