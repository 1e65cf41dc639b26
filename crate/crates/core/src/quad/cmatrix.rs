//! Dense complex matrices of small dimension (n <= 8): the Langevin
//! generator, propagators and reduced density matrices all live here.
//!
//! Provides exactly the operations the physics needs: multiplication,
//! adjoints, LU solves, a cyclic Jacobi eigensolver for Hermitian matrices,
//! and the matrix exponential. `expm` takes the closed-form eigendecomposition
//! route for 1x1 and 2x2 inputs when the eigenvector matrix is well
//! conditioned, and falls back to scaling-and-squaring with a [13/13]
//! Pade approximant otherwise.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)] // float intrinsics under no_std
use num_traits::Float;

use crate::error::{Error, Result};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1);
        Self {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_entries(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::InvalidParams("entries length must equal dim^2"));
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(other.entries.iter()) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(other.entries.iter()) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(j, i)];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = a.conj();
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim)
            .map(|i| self[(i, i)])
            .fold(C64::new(0.0, 0.0), |a, b| a + b)
    }

    /// Maximum column sum of absolute values.
    pub fn one_norm(&self) -> f64 {
        let n = self.dim;
        let mut best = 0.0f64;
        for j in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                s += self[(i, j)].norm();
            }
            best = best.max(s);
        }
        best
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim;
        for i in 0..n {
            for j in i..n {
                if (self[(i, j)] - self[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Solves `A x = b` by LU with partial pivoting.
    pub fn solve_vec(&self, b: &[C64]) -> Result<Vec<C64>> {
        let cols = self.solve_columns(&[b.to_vec()])?;
        Ok(cols.into_iter().next().unwrap())
    }

    /// Solves `A X = B` where `B` is given column-wise.
    fn solve_columns(&self, columns: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
        let n = self.dim;
        let mut lu = self.entries.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut pivot = k;
            let mut best = lu[k * n + k].norm();
            for i in (k + 1)..n {
                let v = lu[i * n + k].norm();
                if v > best {
                    best = v;
                    pivot = i;
                }
            }
            if best == 0.0 {
                return Err(Error::SingularDecomposition);
            }
            if pivot != k {
                for j in 0..n {
                    lu.swap(k * n + j, pivot * n + j);
                }
                perm.swap(k, pivot);
            }
            let diag = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / diag;
                lu[i * n + k] = factor;
                for j in (k + 1)..n {
                    let sub = factor * lu[k * n + j];
                    lu[i * n + j] -= sub;
                }
            }
        }
        let mut out = Vec::with_capacity(columns.len());
        for b in columns {
            if b.len() != n {
                return Err(Error::InvalidParams("rhs length must equal dim"));
            }
            let mut x: Vec<C64> = perm.iter().map(|&i| b[i]).collect();
            for i in 1..n {
                for j in 0..i {
                    let sub = lu[i * n + j] * x[j];
                    x[i] -= sub;
                }
            }
            for i in (0..n).rev() {
                for j in (i + 1)..n {
                    let sub = lu[i * n + j] * x[j];
                    x[i] -= sub;
                }
                x[i] /= lu[i * n + i];
            }
            out.push(x);
        }
        Ok(out)
    }

    /// Solves `A X = B` for matrices.
    pub fn solve_matrix(&self, b: &Self) -> Result<Self> {
        let n = self.dim;
        let cols: Vec<Vec<C64>> = (0..n)
            .map(|j| (0..n).map(|i| b[(i, j)]).collect())
            .collect();
        let xcols = self.solve_columns(&cols)?;
        let mut out = Self::zeros(n);
        for (j, col) in xcols.iter().enumerate() {
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        Ok(out)
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.
    ///
    /// Returns eigenvalues in ascending order and the unitary whose columns
    /// are the matching eigenvectors.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        let n = self.dim;
        if !self.is_hermitian(1e-9 * self.max_abs_entry().max(1.0)) {
            return Err(Error::NotAState("matrix is not Hermitian"));
        }
        let mut a = self.clone();
        // symmetrise exactly so rounding asymmetry cannot accumulate
        for i in 0..n {
            a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let m = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
                a[(i, j)] = m;
                a[(j, i)] = m.conj();
            }
        }
        let mut v = ComplexMatrix::identity(n);
        let scale = a.max_abs_entry().max(1e-300);
        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    off = off.max(a[(i, j)].norm());
                }
            }
            if off <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq.norm() <= 1e-18 * scale {
                        continue;
                    }
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    // phase that makes the pivot real, then a real rotation
                    let phi = apq / apq.norm();
                    let g = apq.norm();
                    let theta = 0.5 * (2.0 * g).atan2(app - aqq);
                    let (s, c) = theta.sin_cos();
                    let cp = phi * s;
                    // columns p, q of the accumulated unitary and of A
                    for r in 0..n {
                        let arp = a[(r, p)];
                        let arq = a[(r, q)];
                        a[(r, p)] = arp * c + arq * cp.conj();
                        a[(r, q)] = -arp * cp + arq * c;
                    }
                    for rcol in 0..n {
                        let apr = a[(p, rcol)];
                        let aqr = a[(q, rcol)];
                        a[(p, rcol)] = apr * c + aqr * cp;
                        a[(q, rcol)] = -apr * cp.conj() + aqr * c;
                    }
                    for r in 0..n {
                        let vrp = v[(r, p)];
                        let vrq = v[(r, q)];
                        v[(r, p)] = vrp * c + vrq * cp.conj();
                        v[(r, q)] = -vrp * cp + vrq * c;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
        let eigvals: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
        let mut vv = ComplexMatrix::zeros(n);
        for (newj, &oldj) in order.iter().enumerate() {
            for i in 0..n {
                vv[(i, newj)] = v[(i, oldj)];
            }
        }
        Ok((eigvals, vv))
    }
}

impl core::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.dim + j]
    }
}

/// Matrix exponential `e^{A t}`.
///
/// 1x1 is scalar; 2x2 goes through the closed-form eigendecomposition when
/// the eigenvector matrix is well conditioned (estimated condition below
/// 1e8); everything else (and ill-conditioned 2x2 cases, e.g. near an
/// exceptional point) uses scaling-and-squaring with the [13/13] Pade
/// approximant.
pub fn expm(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let n = a.dim();
    if n > 8 {
        return Err(Error::InvalidParams("expm supports dim <= 8"));
    }
    if t == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    match n {
        1 => {
            let mut out = ComplexMatrix::zeros(1);
            out[(0, 0)] = (a[(0, 0)] * t).exp();
            Ok(out)
        }
        2 => match expm2_eigen(a, t) {
            Some(m) => Ok(m),
            None => expm_pade(a, t),
        },
        _ => expm_pade(a, t),
    }
}

/// Closed-form 2x2 eigendecomposition route; `None` when the eigenvector
/// basis is too ill conditioned to trust.
fn expm2_eigen(a: &ComplexMatrix, t: f64) -> Option<ComplexMatrix> {
    let a11 = a[(0, 0)];
    let a12 = a[(0, 1)];
    let a21 = a[(1, 0)];
    let a22 = a[(1, 1)];
    if a12.norm() == 0.0 && a21.norm() == 0.0 {
        let mut out = ComplexMatrix::zeros(2);
        out[(0, 0)] = (a11 * t).exp();
        out[(1, 1)] = (a22 * t).exp();
        return Some(out);
    }
    let tr = a11 + a22;
    let disc = (a11 - a22) * (a11 - a22) + a12 * a21 * 4.0;
    let sq = disc.sqrt();
    let l1 = (tr + sq) * 0.5;
    let l2 = (tr - sq) * 0.5;
    let scale = a.max_abs_entry();
    // eigenvector conditioning degrades as the eigenvalues coalesce
    if sq.norm() < 1e-8 * scale.max(1e-300) {
        return None;
    }
    // eigenvectors: (A - l I) v = 0
    let v = |l: C64| -> (C64, C64) {
        if a12.norm() >= a21.norm() {
            (a12, l - a11)
        } else {
            (l - a22, a21)
        }
    };
    let (v1x, v1y) = v(l1);
    let (v2x, v2y) = v(l2);
    let det = v1x * v2y - v2x * v1y;
    if det.norm() < 1e-8 * (v1x.norm() + v1y.norm()) * (v2x.norm() + v2y.norm()) {
        return None;
    }
    let e1 = (l1 * t).exp();
    let e2 = (l2 * t).exp();
    // V diag(e) V^{-1}
    let inv = det.inv();
    let mut out = ComplexMatrix::zeros(2);
    out[(0, 0)] = (v1x * e1 * v2y - v2x * e2 * v1y) * inv;
    out[(0, 1)] = (v2x * e2 * v1x - v1x * e1 * v2x) * inv;
    out[(1, 0)] = (v1y * e1 * v2y - v2y * e2 * v1y) * inv;
    out[(1, 1)] = (v2y * e2 * v1x - v1y * e1 * v2x) * inv;
    Some(out)
}

/// Scaling-and-squaring with the [13/13] Pade approximant.
fn expm_pade(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    const THETA_13: f64 = 5.371_920_351_148_152;
    const B: [f64; 14] = [
        64_764_752_532_480_000.0,
        32_382_376_266_240_000.0,
        7_771_770_303_897_600.0,
        1_187_353_796_428_800.0,
        129_060_195_264_000.0,
        10_559_470_521_600.0,
        670_442_572_800.0,
        33_522_128_640.0,
        1_323_241_920.0,
        40_840_800.0,
        960_960.0,
        16_380.0,
        182.0,
        1.0,
    ];
    let n = a.dim();
    let at = a.scale(C64::new(t, 0.0));
    let norm = at.one_norm();
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let m = at.scale(C64::new(0.5f64.powi(s as i32), 0.0));

    let id = ComplexMatrix::identity(n);
    let m2 = m.mul(&m);
    let m4 = m2.mul(&m2);
    let m6 = m2.mul(&m4);

    let u_inner = m6
        .mul(
            &m6.scale(B[13].into())
                .add(&m4.scale(B[11].into()))
                .add(&m2.scale(B[9].into())),
        )
        .add(&m6.scale(B[7].into()))
        .add(&m4.scale(B[5].into()))
        .add(&m2.scale(B[3].into()))
        .add(&id.scale(B[1].into()));
    let u = m.mul(&u_inner);
    let v = m6
        .mul(
            &m6.scale(B[12].into())
                .add(&m4.scale(B[10].into()))
                .add(&m2.scale(B[8].into())),
        )
        .add(&m6.scale(B[6].into()))
        .add(&m4.scale(B[4].into()))
        .add(&m2.scale(B[2].into()))
        .add(&id.scale(B[0].into()));

    let mut r = v.sub(&u).solve_matrix(&v.add(&u))?;
    for _ in 0..s {
        r = r.mul(&r);
    }
    if r.entries()
        .iter()
        .any(|e| !e.re.is_finite() || !e.im.is_finite())
    {
        return Err(Error::SingularDecomposition);
    }
    Ok(r)
}
