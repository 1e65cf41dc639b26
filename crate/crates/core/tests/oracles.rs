//! Oracle cross-checks: every production integral is pinned against at
//! least one independently implemented route before anything downstream
//! is trusted.

mod common;

use common::{
    finite_difference_dt, lyapunov_qfi_oracle, matsubara_p1_oracle, matsubara_steady_oracle,
    simpson_p1_oracle, simpson_steady_oracle, SplitMix64,
};
use fermitherm_core::metrology;
use fermitherm_core::model::ModelParams;
use fermitherm_core::multi_probe;
use fermitherm_core::quad::{integrate_fermi_lorentzian, QuadConfig, ThermalKernel, Weight};
use fermitherm_core::single_probe;

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

#[test]
fn transient_population_matches_simpson_oracle() {
    // the tuples cover weak/strong coupling, degenerate/cold baths, and
    // short/long interrogation times
    let tuples = [
        (0.5, 0.5, 1.0),
        (1.0, 0.2, 2.0),
        (2.0, 1.0, 0.7),
        (1.0, 0.1, 5.0),
        (0.7, 0.3, 3.0),
    ];
    for &(gamma, temperature, t) in &tuples {
        let params = ModelParams::single(1.0, 0.0, gamma, temperature, 0.0).unwrap();
        let got = single_probe::p1_exact(t, &params, &cfg()).unwrap();
        let oracle = simpson_p1_oracle(t, gamma, temperature, 1.0, 0.0, 0.0);
        assert!(
            (got - oracle).abs() < 1e-8,
            "G={gamma} T={temperature} t={t}: adaptive {got} vs Simpson {oracle}"
        );
    }
}

#[test]
fn transient_population_matches_matsubara_oracle() {
    let tuples = [
        (1.0, 0.05, 2.0),
        (0.5, 0.3, 4.0),
        (1.5, 1.0, 1.0),
        (0.2, 0.5, 8.0),
    ];
    for &(gamma, temperature, t) in &tuples {
        let params = ModelParams::single(1.0, 0.0, gamma, temperature, 0.5).unwrap();
        let got = single_probe::p1_exact(t, &params, &cfg()).unwrap();
        let oracle = matsubara_p1_oracle(t, gamma, temperature, 1.0, 0.0, 0.5);
        assert!(
            (got - oracle).abs() < 1e-9,
            "G={gamma} T={temperature} t={t}: adaptive {got} vs residue sum {oracle}"
        );
    }
}

#[test]
fn steady_population_matches_both_oracles() {
    for &(gamma, temperature) in &[(0.5, 0.1), (1.0, 1.0), (0.05, 0.25), (3.0, 0.6)] {
        let params = ModelParams::single(1.0, 0.0, gamma, temperature, 0.0).unwrap();
        let got = single_probe::p1_steady(&params, &cfg()).unwrap();
        let simpson = simpson_steady_oracle(gamma, temperature, 1.0, 0.0);
        let residues = matsubara_steady_oracle(gamma, temperature, 1.0, 0.0);
        assert!(
            (got - simpson).abs() < 1e-9,
            "G={gamma} T={temperature}: {got} vs Simpson {simpson}"
        );
        assert!(
            (got - residues).abs() < 1e-10,
            "G={gamma} T={temperature}: {got} vs residues {residues}"
        );
    }
}

#[test]
fn raw_quadrature_example_value_agrees_with_oracle() {
    // steady weight, occupation kernel, G=0.5, T=0.1: raw integral
    let params = ModelParams::single(1.0, 0.0, 0.5, 0.1, 0.0).unwrap();
    let raw =
        integrate_fermi_lorentzian(&params, &cfg(), Weight::Steady, ThermalKernel::Occupation)
            .unwrap();
    let oracle = simpson_steady_oracle(0.5, 0.1, 1.0, 0.0) * core::f64::consts::PI / (2.0 * 0.5);
    assert!((raw - oracle).abs() < 1e-10, "{raw} vs {oracle}");
}

#[test]
fn temperature_derivatives_match_finite_differences() {
    let cfg = cfg();
    for &(gamma, temperature, t) in &[(1.0, 0.1, 5.0), (0.5, 0.4, 1.5), (2.0, 1.0, 0.5)] {
        let an = single_probe::p1_exact_dt(
            t,
            &ModelParams::single(1.0, 0.0, gamma, temperature, 0.0).unwrap(),
            &cfg,
        )
        .unwrap();
        let fd = finite_difference_dt(
            |temp| {
                let p = ModelParams::single(1.0, 0.0, gamma, temp, 0.0).unwrap();
                single_probe::p1_exact(t, &p, &cfg).unwrap()
            },
            temperature,
            1e-4,
        );
        assert!(
            ((an - fd) / an.abs().max(1e-12)).abs() < 1e-4,
            "transient G={gamma} T={temperature} t={t}: analytic {an} fd {fd}"
        );
    }
    for &(gamma, temperature) in &[(1.0, 0.05), (0.3, 0.5), (2.0, 2.0)] {
        let an = single_probe::p1_steady_dt(
            &ModelParams::single(1.0, 0.0, gamma, temperature, 0.0).unwrap(),
            &cfg,
        )
        .unwrap();
        let fd = finite_difference_dt(
            |temp| {
                let p = ModelParams::single(1.0, 0.0, gamma, temp, 0.0).unwrap();
                single_probe::p1_steady(&p, &cfg).unwrap()
            },
            temperature,
            1e-4,
        );
        assert!(
            ((an - fd) / an.abs().max(1e-12)).abs() < 1e-4,
            "steady G={gamma} T={temperature}: analytic {an} fd {fd}"
        );
    }
}

#[test]
fn sld_qfi_matches_lyapunov_solve_on_common_bath_state() {
    // two fermions, common bath, Gamma = 0.5, T = 1, gaps 0 and 1, Gamma t = 1
    let params = ModelParams::new(vec![0.0, 1.0], 0.0, 0.5, 1.0, vec![0.0, 0.0]).unwrap();
    let corr = multi_probe::evolve_correlations(2.0, &params, &cfg()).unwrap();
    let pdm = multi_probe::gaussian_to_density(&corr).unwrap();
    let via_sld = pdm.qfi().unwrap();
    let via_lyapunov = lyapunov_qfi_oracle(&pdm.rho, &pdm.rho_dt);
    assert!(
        ((via_sld - via_lyapunov) / via_lyapunov).abs() < 1e-8,
        "eigen route {via_sld} vs Lyapunov route {via_lyapunov}"
    );
}

#[test]
fn sld_qfi_matches_lyapunov_on_random_states() {
    let mut rng = SplitMix64::new(0x00C0FFEE);
    for trial in 0..12 {
        // random full-rank correlated pair through the Wick pipeline
        let occ1 = rng.range(0.15, 0.85);
        let occ2 = rng.range(0.15, 0.85);
        let max_c = (occ1 * occ2).min((1.0 - occ1) * (1.0 - occ2)).sqrt() * 0.8;
        let c12 = num_complex::Complex64::from_polar(rng.range(0.0, max_c), rng.range(0.0, std::f64::consts::TAU));
        let mut c = fermitherm_core::ComplexMatrix::zeros(2);
        c[(0, 0)] = occ1.into();
        c[(1, 1)] = occ2.into();
        c[(0, 1)] = c12;
        c[(1, 0)] = c12.conj();
        let mut c_dt = fermitherm_core::ComplexMatrix::zeros(2);
        c_dt[(0, 0)] = rng.range(-0.05, 0.05).into();
        c_dt[(1, 1)] = rng.range(-0.05, 0.05).into();
        let d12 = num_complex::Complex64::from_polar(rng.range(0.0, 0.05), rng.range(0.0, std::f64::consts::TAU));
        c_dt[(0, 1)] = d12;
        c_dt[(1, 0)] = d12.conj();
        let corr = multi_probe::CorrelationMatrix { c, c_dt };
        if corr.validate().is_err() {
            continue;
        }
        let pdm = multi_probe::gaussian_to_density(&corr).unwrap();
        let via_sld = pdm.qfi().unwrap();
        let via_lyapunov = lyapunov_qfi_oracle(&pdm.rho, &pdm.rho_dt);
        assert!(
            ((via_sld - via_lyapunov) / via_lyapunov.abs().max(1e-12)).abs() < 1e-8,
            "trial {trial}: {via_sld} vs {via_lyapunov}"
        );
    }
}

#[test]
fn markovian_rate_closed_form_matches_composition() {
    // rate formula for p0 = 0:
    //   (eps-mu)^2 b^4 (e^{Gt}-1) e^{b(eps-mu)} /
    //   (t (e^{b(eps-mu)}+1)^2 (e^{-b(eps-mu)} + e^{Gt}))
    let gamma = 0.3;
    let temperature = 0.8;
    let params = ModelParams::single(1.0, 0.0, gamma, temperature, 0.0).unwrap();
    let beta = 1.0 / temperature;
    for k in 1..=20 {
        let t = 0.4 * k as f64 / gamma;
        let fi = metrology::fi_markovian_at(t, &params).unwrap();
        let composed = metrology::fi_rate(t, fi);
        let x = beta;
        let closed = beta.powi(4) * ((gamma * t).exp() - 1.0) * x.exp()
            / (t * (x.exp() + 1.0).powi(2) * ((-x).exp() + (gamma * t).exp()));
        assert!(
            ((composed - closed) / closed).abs() < 1e-12,
            "t={t}: composed {composed} closed {closed}"
        );
    }
}
