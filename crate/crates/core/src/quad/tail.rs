//! Analytic tail integrals for products of two simple complex poles,
//! optionally multiplied by `e^{i sigma omega t}`.
//!
//! Every semi-infinite integrand handled by this crate reduces, outside the
//! numeric window, to terms of the form
//!
//! ```text
//!     coeff * e^{i sigma omega t} / ((a1 + s1 i omega)(a2 + s2 i omega))
//! ```
//!
//! with `s = +-1` and poles strictly off the real axis. The non-oscillatory
//! tail has a closed form in logarithms (with a series branch when the two
//! pole factors nearly cancel); the oscillatory tail is expanded by repeated
//! integration by parts, each term exact and the remainder bounded
//! analytically. Nothing is ever extrapolated.

use num_complex::Complex64 as C64;
#[allow(unused_imports)] // float intrinsics under no_std
use num_traits::Float;

/// Which half-line the tail covers relative to the cut point `x0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    /// `(-inf, x0]`
    Left,
    /// `[x0, +inf)`
    #[allow(dead_code)]
    Right,
}

/// `scale / ((a1 + s1 i w)(a2 + s2 i w))` with `Re a_k > 0` after
/// normalisation and `s1 s2 = -1` (one retarded, one advanced factor).
#[derive(Debug, Clone, Copy)]
pub(crate) struct PolePair {
    a1: C64,
    s1: f64,
    a2: C64,
    s2: f64,
    scale: C64,
}

impl PolePair {
    /// Builds the pair, flipping factor signs so both `Re a > 0`.
    pub(crate) fn new(mut a1: C64, mut s1: f64, mut a2: C64, mut s2: f64, mut scale: C64) -> Self {
        debug_assert!(a1.re != 0.0 && a2.re != 0.0, "pole on the real axis");
        if a1.re < 0.0 {
            a1 = -a1;
            s1 = -s1;
            scale = -scale;
        }
        if a2.re < 0.0 {
            a2 = -a2;
            s2 = -s2;
            scale = -scale;
        }
        debug_assert!(s1 * s2 == -1.0, "tail forms assume opposite factor signs");
        Self {
            a1,
            s1,
            a2,
            s2,
            scale,
        }
    }

    /// Lorentzian weight `1 / (gamma^2 + 4 (w - eps)^2)` as a pole pair.
    pub(crate) fn lorentzian(gamma: f64, epsilon: f64) -> Self {
        // 1/(g^2+4x^2) = (1/4) / ((g/2 - i eps + i w)(g/2 + i eps - i w))
        Self::new(
            C64::new(gamma / 2.0, -epsilon),
            1.0,
            C64::new(gamma / 2.0, epsilon),
            -1.0,
            C64::new(0.25, 0.0),
        )
    }

    /// `1 / ((conj(lam_m) - i w)(lam_n + i w))`: the cross term of two
    /// stable propagator modes.
    pub(crate) fn mode_cross(lam_m: C64, lam_n: C64) -> Self {
        Self::new(lam_m.conj(), -1.0, lam_n, 1.0, C64::new(1.0, 0.0))
    }

    /// Largest |Im a|: tail cut points must stay well beyond it.
    pub(crate) fn im_extent(&self) -> f64 {
        self.a1.im.abs().max(self.a2.im.abs())
    }

    /// Real parts of the two (normalised) pole factors: the half-widths
    /// bounding `|factor| >= Re a` on the whole real line.
    pub(crate) fn re_extents(&self) -> (f64, f64) {
        (self.a1.re, self.a2.re)
    }

    pub(crate) fn scale_abs(&self) -> f64 {
        self.scale.norm()
    }

    #[allow(dead_code)]
    pub(crate) fn eval(&self, w: f64) -> C64 {
        let p = self.a1 + C64::new(0.0, self.s1 * w);
        let q = self.a2 + C64::new(0.0, self.s2 * w);
        self.scale / (p * q)
    }

    /// k-th derivative in `w`, closed form via Leibniz on the two factors.
    pub(crate) fn deriv(&self, w: f64, k: usize) -> C64 {
        let p = self.a1 + C64::new(0.0, self.s1 * w);
        let q = self.a2 + C64::new(0.0, self.s2 * w);
        let ip = C64::new(0.0, self.s1);
        let iq = C64::new(0.0, self.s2);
        let mut sum = C64::new(0.0, 0.0);
        for j in 0..=k {
            let mut term = C64::new(1.0, 0.0);
            for _ in 0..j {
                term *= ip;
            }
            for _ in 0..(k - j) {
                term *= iq;
            }
            term /= p.powi(j as i32 + 1) * q.powi((k - j) as i32 + 1);
            sum += term;
        }
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut kfac = 1.0;
        for i in 1..=k {
            kfac *= i as f64;
        }
        self.scale * sum * (sign * kfac)
    }

    /// Exact tail of the non-oscillatory pair beyond `x0`.
    ///
    /// Uses the substitution `z = a1 + s1 i w`; the second factor is then
    /// `D - z` with `D = a1 + a2` constant. The log closed form degrades
    /// when `|D| << |z(x0)|` (nearly cancelling factors), where a geometric
    /// series in `D/z` is exact and stable instead.
    pub(crate) fn tail(&self, x0: f64, side: Side) -> C64 {
        let d = self.a1 + self.a2;
        let z0 = self.a1 + C64::new(0.0, self.s1 * x0);
        let inv_is1 = C64::new(0.0, -self.s1); // 1/(s1 i)
        if d.norm() < 0.5 * z0.norm() {
            // series: G(z) = sum_k D^k / ((k+1) z^{k+1}), tail = +-scale/(s1 i) G(z0)
            let ratio = d / z0;
            let mut term = C64::new(1.0, 0.0) / z0;
            let mut g = C64::new(0.0, 0.0);
            for k in 0..64 {
                g += term / (k as f64 + 1.0);
                term *= ratio;
                if term.norm() < 1e-18 * g.norm().max(1e-300) {
                    break;
                }
            }
            let v = self.scale * inv_is1 * g;
            match side {
                Side::Right => -v,
                Side::Left => v,
            }
        } else {
            let a = self.scale / d;
            let w0 = self.a2 + C64::new(0.0, self.s2 * x0);
            // principal logs are safe: Re z0, Re w0 > 0
            let ln_diff = z0.ln() - w0.ln();
            let pi = C64::new(core::f64::consts::PI, 0.0);
            let is1 = C64::new(0.0, self.s1);
            match side {
                Side::Right => a * pi + is1 * a * ln_diff,
                Side::Left => a * pi - is1 * a * ln_diff,
            }
        }
    }

    /// Tail of `e^{i sigma w t} * r(w)` beyond `x0` by an `m`-term
    /// integration-by-parts expansion. Returns the partial sum and a
    /// rigorous bound on the dropped remainder.
    pub(crate) fn osc_tail(&self, x0: f64, side: Side, sigma: f64, t: f64, m: usize) -> (C64, f64) {
        debug_assert!(t > 0.0 && (sigma == 1.0 || sigma == -1.0));
        let ist = C64::new(0.0, sigma * t);
        let phase = (C64::new(0.0, sigma * x0 * t)).exp();
        let mut sum = C64::new(0.0, 0.0);
        let mut pw = ist;
        for k in 0..m {
            let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            sum += self.deriv(x0, k) * sign / pw;
            pw *= ist;
        }
        let value = match side {
            Side::Right => -phase * sum,
            Side::Left => phase * sum,
        };
        (value, self.osc_remainder_bound(x0, t, m))
    }

    /// Bound on the remainder after `m` integration-by-parts steps.
    pub(crate) fn osc_remainder_bound(&self, x0: f64, t: f64, m: usize) -> f64 {
        let c = self.im_extent();
        let dist = x0.abs() - c;
        if dist <= 0.0 {
            return f64::INFINITY;
        }
        let mut mfac = 1.0;
        for i in 1..=m {
            mfac *= i as f64;
        }
        self.scale.norm() * mfac / (dist.powi(m as i32 + 1) * t.powi(m as i32))
    }

    /// Distance from the imaginary extent needed so the `m`-term remainder
    /// stays below `budget`.
    pub(crate) fn required_distance(&self, t: f64, m: usize, budget: f64) -> f64 {
        let mut mfac = 1.0;
        for i in 1..=m {
            mfac *= i as f64;
        }
        let num = self.scale.norm() * mfac / (budget * t.powi(m as i32));
        self.im_extent() + num.powf(1.0 / (m as f64 + 1.0)).max(1.0)
    }
}
