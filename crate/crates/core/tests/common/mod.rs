//! Shared test oracles: deliberately independent implementations used to
//! pin the production quadrature and SLD paths.
//!
//! - fixed-grid composite Simpson with window doubling (no adaptivity,
//!   no Gauss-Kronrod, no tail expansions beyond the elementary arctan),
//! - Matsubara residue summation (pure pole algebra, no quadrature),
//! - vectorised Lyapunov solve for the SLD (no eigendecomposition),
//! - centered finite differences for temperature derivatives,
//! - a tiny deterministic SplitMix64 generator for reproducible sampling.

#![allow(dead_code)]

use fermitherm_core::ComplexMatrix;
use num_complex::Complex64 as C64;

/// Deterministic 64-bit generator (SplitMix64).
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Log-uniform in [lo, hi).
    pub fn log_range(&mut self, lo: f64, hi: f64) -> f64 {
        (self.range(lo.ln(), hi.ln())).exp()
    }
}

fn fermi_local(omega: f64, mu: f64, temperature: f64) -> f64 {
    let x = (omega - mu) / temperature;
    if x > 700.0 {
        0.0
    } else if x < -700.0 {
        1.0
    } else if x >= 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for k in 1..n {
        let x = a + h * k as f64;
        if k % 2 == 1 {
            odd += f(x);
        } else {
            even += f(x);
        }
    }
    h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
}

/// Fixed-grid Simpson evaluation of the exact population: the window is
/// doubled until the value moves by less than `1e-10`, and each window is
/// evaluated at two grid resolutions that must agree. The only analytic
/// ingredient is the arctan left tail of the non-oscillatory Lorentzian
/// part (where the Fermi factor is 1 to machine precision).
pub fn simpson_p1_oracle(t: f64, gamma: f64, temperature: f64, eps: f64, mu: f64, p0: f64) -> f64 {
    assert!(t >= 0.0);
    if t == 0.0 {
        return p0;
    }
    let c0 = 1.0 + (-gamma * t).exp();
    let cm = (-gamma * t / 2.0).exp();
    let integrand = |w: f64| -> f64 {
        let l = 1.0 / (gamma * gamma + 4.0 * (w - eps) * (w - eps));
        let n = c0 - 2.0 * cm * ((w - eps) * t).cos();
        fermi_local(w, mu, temperature) * n * l
    };
    let eval_window = |half: f64| -> f64 {
        // resolve the finest of: Fermi edge, Lorentzian width, oscillation
        let h_target = (temperature / 20.0)
            .min(gamma / 40.0)
            .min(2.0 * core::f64::consts::PI / t / 20.0);
        let n = ((2.0 * half / h_target).ceil() as usize).clamp(20_000, 40_000_000);
        let coarse = simpson(&integrand, eps - half, eps + half, n);
        let fine = simpson(&integrand, eps - half, eps + half, 2 * n);
        assert!(
            (coarse - fine).abs() < 1e-9,
            "oracle grid not converged at window {half}: {coarse} vs {fine}"
        );
        // left tail of the non-oscillatory part with f = 1
        let a = gamma / 2.0;
        let tail = c0 * 0.25 * ((-half / a).atan() / a + core::f64::consts::PI / (2.0 * a));
        fine + tail
    };
    let mut half = (40.0 * temperature + (eps - mu).abs())
        .max(20.0 * gamma)
        .max(60.0 / t);
    let mut prev = eval_window(half);
    for _ in 0..12 {
        half *= 2.0;
        let next = eval_window(half);
        if (next - prev).abs() < 1e-10 {
            prev = next;
            break;
        }
        prev = next;
    }
    (-gamma * t).exp() * p0 + (2.0 * gamma / core::f64::consts::PI) * prev
}

/// Same oracle for the steady state (no oscillatory part).
pub fn simpson_steady_oracle(gamma: f64, temperature: f64, eps: f64, mu: f64) -> f64 {
    let integrand = |w: f64| -> f64 {
        fermi_local(w, mu, temperature) / (gamma * gamma + 4.0 * (w - eps) * (w - eps))
    };
    let eval_window = |half: f64| -> f64 {
        let h_target = (temperature / 20.0).min(gamma / 40.0);
        let n = ((2.0 * half / h_target).ceil() as usize).clamp(20_000, 40_000_000);
        let coarse = simpson(&integrand, eps - half, eps + half, n);
        let fine = simpson(&integrand, eps - half, eps + half, 2 * n);
        assert!((coarse - fine).abs() < 1e-10);
        let a = gamma / 2.0;
        fine + 0.25 * ((-half / a).atan() / a + core::f64::consts::PI / (2.0 * a))
    };
    let mut half = (40.0 * temperature + (eps - mu).abs()).max(20.0 * gamma);
    let mut prev = eval_window(half);
    for _ in 0..12 {
        half *= 2.0;
        let next = eval_window(half);
        if (next - prev).abs() < 1e-10 {
            prev = next;
            break;
        }
        prev = next;
    }
    (2.0 * gamma / core::f64::consts::PI) * prev
}

fn fermi_complex(z: C64, mu: f64, temperature: f64) -> C64 {
    let x = (z - C64::new(mu, 0.0)) / temperature;
    if x.re >= 0.0 {
        let e = (-x).exp();
        e / (C64::new(1.0, 0.0) + e)
    } else {
        (C64::new(1.0, 0.0) + x.exp()).inv()
    }
}

/// Residue-sum (Matsubara) evaluation of the exact population: the
/// frequency integral closed in the upper/lower half plane picks up the
/// Lorentzian pole and the fermionic poles at `mu + i pi T (2k+1)`. A
/// pure-algebra route with no quadrature at all.
pub fn matsubara_p1_oracle(
    t: f64,
    gamma: f64,
    temperature: f64,
    eps: f64,
    mu: f64,
    p0: f64,
) -> f64 {
    assert!(t > 0.0);
    let zp = C64::new(eps, gamma / 2.0);
    let zm = C64::new(eps, -gamma / 2.0);
    let l = |w: C64| (C64::new(4.0, 0.0) * (w - zp) * (w - zm)).inv();
    let c0 = 1.0 + (-gamma * t).exp();
    let cm = (-gamma * t / 2.0).exp();
    let pi = core::f64::consts::PI;
    let k_max = 20_000usize;

    let mut s1 = C64::new(0.0, 0.0);
    let mut s2 = C64::new(0.0, 0.0);
    let mut s3 = C64::new(0.0, 0.0);
    for k in 0..k_max {
        let wk_up = C64::new(mu, pi * temperature * (2 * k + 1) as f64);
        let wk_dn = wk_up.conj();
        s1 += l(wk_up);
        s2 += (C64::new(0.0, 1.0) * (wk_up - eps) * t).exp() * l(wk_up);
        s3 += (C64::new(0.0, -1.0) * (wk_dn - eps) * t).exp() * l(wk_dn);
    }
    // Euler-Maclaurin closure of the undamped sum
    let wc = C64::new(mu, pi * temperature * (2 * k_max) as f64);
    s1 += -(C64::new(0.0, 2.0 * pi * temperature)).inv()
        * (C64::new(0.0, 4.0 * gamma)).inv()
        * ((wc - zp) / (wc - zm)).ln();

    let two_pi_it = C64::new(0.0, 2.0 * pi * temperature);
    let i1 =
        C64::new(pi / (2.0 * gamma), 0.0) * fermi_complex(zp, mu, temperature) - two_pi_it * s1;
    let i2 = C64::new(pi / (2.0 * gamma) * cm, 0.0) * fermi_complex(zp, mu, temperature)
        - two_pi_it * s2;
    let i3 = C64::new(pi / (2.0 * gamma) * cm, 0.0) * fermi_complex(zm, mu, temperature)
        + two_pi_it * s3;
    let integral = i1 * c0 - (i2 + i3) * cm;
    assert!(
        integral.im.abs() < 1e-10,
        "residue assembly lost reality: {integral}"
    );
    (-gamma * t).exp() * p0 + (2.0 * gamma / pi) * integral.re
}

/// Residue-sum steady-state population.
pub fn matsubara_steady_oracle(gamma: f64, temperature: f64, eps: f64, mu: f64) -> f64 {
    let zp = C64::new(eps, gamma / 2.0);
    let zm = C64::new(eps, -gamma / 2.0);
    let l = |w: C64| (C64::new(4.0, 0.0) * (w - zp) * (w - zm)).inv();
    let pi = core::f64::consts::PI;
    let k_max = 20_000usize;
    let mut s1 = C64::new(0.0, 0.0);
    for k in 0..k_max {
        s1 += l(C64::new(mu, pi * temperature * (2 * k + 1) as f64));
    }
    let wc = C64::new(mu, pi * temperature * (2 * k_max) as f64);
    s1 += -(C64::new(0.0, 2.0 * pi * temperature)).inv()
        * (C64::new(0.0, 4.0 * gamma)).inv()
        * ((wc - zp) / (wc - zm)).ln();
    let i1 = C64::new(pi / (2.0 * gamma), 0.0) * fermi_complex(zp, mu, temperature)
        - C64::new(0.0, 2.0 * pi * temperature) * s1;
    assert!(i1.im.abs() < 1e-11);
    (2.0 * gamma / pi) * i1.re
}

/// Quantum Fisher information through the explicit SLD: solve the
/// Lyapunov equation `rho L + L rho = 2 d rho` by vectorisation (LU on the
/// n^2 x n^2 system, no eigendecomposition) and return `Re Tr(rho L^2)`.
pub fn lyapunov_qfi_oracle(rho: &ComplexMatrix, drho: &ComplexMatrix) -> f64 {
    let n = rho.dim();
    let nn = n * n;
    let mut m = ComplexMatrix::zeros(nn);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                // (rho L)_{ij}: rho_{ik} L_{kj}
                let col = k * n + j;
                m[(row, col)] += rho[(i, k)];
                // (L rho)_{ij}: L_{ik} rho_{kj}
                let col = i * n + k;
                m[(row, col)] += rho[(k, j)];
            }
        }
    }
    let rhs: Vec<C64> = (0..nn).map(|idx| drho[(idx / n, idx % n)] * 2.0).collect();
    let sol = m.solve_vec(&rhs).expect("Lyapunov system is singular");
    let mut lambda = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            lambda[(i, j)] = sol[i * n + j];
        }
    }
    let prod = rho.mul(&lambda).mul(&lambda);
    prod.trace().re
}

/// Centered finite difference in temperature of a parametrised quantity.
pub fn finite_difference_dt<F: Fn(f64) -> f64>(f: F, temperature: f64, rel_step: f64) -> f64 {
    let h = rel_step * temperature;
    (f(temperature + h) - f(temperature - h)) / (2.0 * h)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let sx: f64 = lx.iter().sum();
    let sy: f64 = ly.iter().sum();
    let sxx: f64 = lx.iter().map(|x| x * x).sum();
    let sxy: f64 = lx.iter().zip(ly.iter()).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
