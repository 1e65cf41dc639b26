//! Property-based invariants over randomly drawn parameters.

mod common;

use common::lyapunov_qfi_oracle;
use fermitherm_core::metrology::{self, qfi_sld};
use fermitherm_core::model::{fermi, fermi_dt, ModelParams};
use fermitherm_core::multi_probe::{gaussian_to_density, CorrelationMatrix};
use fermitherm_core::quad::{expm, ComplexMatrix, QuadConfig};
use fermitherm_core::single_probe;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn matrix_from_parts(dim: usize, parts: &[(f64, f64)]) -> ComplexMatrix {
    let entries = parts.iter().map(|&(re, im)| C64::new(re, im)).collect();
    ComplexMatrix::from_entries(dim, entries).unwrap()
}

/// Random Hermitian matrix with entries of order `scale`.
fn hermitian(dim: usize, parts: &[(f64, f64)], scale: f64) -> ComplexMatrix {
    let raw = matrix_from_parts(dim, parts);
    let mut h = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        h[(i, i)] = C64::new(raw[(i, i)].re * scale, 0.0);
        for j in (i + 1)..dim {
            let v = (raw[(i, j)] + raw[(j, i)].conj()) * (0.5 * scale);
            h[(i, j)] = v;
            h[(j, i)] = v.conj();
        }
    }
    h
}

/// Random unitary as `exp(i H)`.
fn unitary_from(h: &ComplexMatrix) -> ComplexMatrix {
    expm(&h.scale(C64::new(0.0, 1.0)), 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fermi_is_a_probability_and_decreasing(
        temperature in 1e-3f64..1e3,
        w1 in -50.0f64..50.0,
        dw in 1e-6f64..10.0,
    ) {
        let p = ModelParams::single(1.0, 0.0, 1.0, temperature, 0.0).unwrap();
        let f1 = fermi(w1, &p);
        let f2 = fermi(w1 + dw, &p);
        prop_assert!((0.0..=1.0).contains(&f1));
        prop_assert!(f2 <= f1);
    }

    #[test]
    fn fermi_dt_is_antisymmetric_about_mu(
        temperature in 1e-2f64..1e2,
        w in 1e-3f64..30.0,
    ) {
        let p = ModelParams::single(1.0, 0.5, 1.0, temperature, 0.0).unwrap();
        // opposite signs on mirror frequencies (both zero far in the tails)
        let a = fermi_dt(0.5 + w, &p);
        let b = fermi_dt(0.5 - w, &p);
        prop_assert!(a * b <= 0.0);
        prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn expm_satisfies_the_semigroup_property(
        parts in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
        t in 0.05f64..2.0,
        s in 0.05f64..2.0,
    ) {
        let mut a = matrix_from_parts(3, &parts);
        for i in 0..3 {
            // keep the spectrum in the stable half plane
            a[(i, i)] -= C64::new(1.5, 0.0);
        }
        let lhs = expm(&a, t + s).unwrap();
        let rhs = expm(&a, t).unwrap().mul(&expm(&a, s).unwrap());
        let scale = lhs.max_abs_entry().max(1e-12);
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!(
                    (lhs[(i, j)] - rhs[(i, j)]).norm() <= 1e-10 * scale,
                    "entry ({}, {}) differs: {} vs {}", i, j, lhs[(i, j)], rhs[(i, j)]
                );
            }
        }
    }

    #[test]
    fn qfi_is_invariant_under_a_joint_unitary(
        probs in proptest::collection::vec(0.05f64..1.0, 4),
        dparts in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        hparts in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
    ) {
        let total: f64 = probs.iter().sum();
        let mut rho = ComplexMatrix::zeros(4);
        for i in 0..4 {
            rho[(i, i)] = C64::new(probs[i] / total, 0.0);
        }
        let mut drho = hermitian(4, &dparts, 0.1);
        // remove the trace to stay a valid derivative
        let tr = drho.trace().re / 4.0;
        for i in 0..4 {
            drho[(i, i)] -= C64::new(tr, 0.0);
        }
        let base = qfi_sld(&rho, &drho).unwrap();
        let u = unitary_from(&hermitian(4, &hparts, 0.7));
        let rho_u = u.mul(&rho).mul(&u.adjoint());
        let drho_u = u.mul(&drho).mul(&u.adjoint());
        let rotated = qfi_sld(&rho_u, &drho_u).unwrap();
        prop_assert!(
            ((base - rotated) / base.abs().max(1e-12)).abs() < 1e-8,
            "base {} rotated {}", base, rotated
        );
    }

    #[test]
    fn wick_qfi_is_covariant_under_single_particle_rotations(
        occ1 in 0.1f64..0.9,
        occ2 in 0.1f64..0.9,
        cfrac in 0.0f64..0.8,
        cphase in 0.0f64..core::f64::consts::TAU,
        d11 in -0.05f64..0.05,
        d22 in -0.05f64..0.05,
        dfrac in 0.0f64..0.04,
        dphase in 0.0f64..core::f64::consts::TAU,
        hparts in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
    ) {
        let cmax = (occ1 * occ2).min((1.0 - occ1) * (1.0 - occ2)).sqrt();
        let c12 = C64::from_polar(cfrac * cmax, cphase);
        let mut c = ComplexMatrix::zeros(2);
        c[(0, 0)] = C64::new(occ1, 0.0);
        c[(1, 1)] = C64::new(occ2, 0.0);
        c[(0, 1)] = c12;
        c[(1, 0)] = c12.conj();
        let mut c_dt = ComplexMatrix::zeros(2);
        c_dt[(0, 0)] = C64::new(d11, 0.0);
        c_dt[(1, 1)] = C64::new(d22, 0.0);
        let d12 = C64::from_polar(dfrac, dphase);
        c_dt[(0, 1)] = d12;
        c_dt[(1, 0)] = d12.conj();
        let corr = CorrelationMatrix { c: c.clone(), c_dt: c_dt.clone() };
        prop_assume!(corr.validate().is_ok());
        let qfi = gaussian_to_density(&corr).unwrap().qfi().unwrap();

        // rotate modes: C -> conj(V) C V^T, same for the derivative
        let v = unitary_from(&hermitian(2, &hparts, 1.0));
        let rot = |m: &ComplexMatrix| v.conj().mul(m).mul(&v.transpose());
        let corr_rot = CorrelationMatrix { c: rot(&c), c_dt: rot(&c_dt) };
        prop_assume!(corr_rot.validate().is_ok());
        let qfi_rot = gaussian_to_density(&corr_rot).unwrap().qfi().unwrap();
        prop_assert!(
            ((qfi - qfi_rot) / qfi.abs().max(1e-12)).abs() < 1e-8,
            "qfi {} rotated {}", qfi, qfi_rot
        );
    }

    #[test]
    fn sld_route_equals_lyapunov_route(
        probs in proptest::collection::vec(0.05f64..1.0, 4),
        dparts in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
    ) {
        let total: f64 = probs.iter().sum();
        let mut rho = ComplexMatrix::zeros(4);
        for i in 0..4 {
            rho[(i, i)] = C64::new(probs[i] / total, 0.0);
        }
        let mut drho = hermitian(4, &dparts, 0.05);
        let tr = drho.trace().re / 4.0;
        for i in 0..4 {
            drho[(i, i)] -= C64::new(tr, 0.0);
        }
        let a = qfi_sld(&rho, &drho).unwrap();
        let b = lyapunov_qfi_oracle(&rho, &drho);
        prop_assert!(((a - b) / b.abs().max(1e-12)).abs() < 1e-8, "{} vs {}", a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn exact_population_stays_physical(
        gamma in 0.05f64..3.0,
        temperature in 0.05f64..5.0,
        t in 0.01f64..20.0,
        p0 in 0.0f64..1.0,
    ) {
        let params = ModelParams::single(1.0, 0.0, gamma, temperature, p0).unwrap();
        let cfg = QuadConfig { abs_tol: 1e-10, ..QuadConfig::default() };
        let p = single_probe::p1_exact(t, &params, &cfg).unwrap();
        prop_assert!((0.0..=1.0).contains(&p), "p = {}", p);
        let fi = metrology::fi_exact_at(t, &params, &cfg).unwrap();
        prop_assert!(fi >= 0.0);
    }
}
