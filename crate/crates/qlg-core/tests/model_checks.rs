//! Analytic identity checks for the model layer: every closed form is pinned
//! against an algebraically independent route.

mod common;

use common::eta_closed;
use qlg_core::model::{
    coeff_denominator, eta, eta_theta, eta_theta_derivative, evolve_joint_oracle, f_coeff, g_coeff,
    reduced_state, sigma_blp, ModelParams,
};
use qlg_core::qcore::{partial_trace_env, DensityMatrix, Ket};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};

#[test]
fn sigma_equals_minus_g_times_sqrt_denominator() {
    // Pointwise identity on a 10^4-point grid: the back-flow witness computed
    // from the analytic derivative of |eta| must match -g sqrt(D).
    let params = ModelParams::defaults();
    for k in 0..10_000 {
        let t = k as f64 * 1e-6;
        let d = coeff_denominator(&params, t);
        let want = -g_coeff(&params, t).unwrap() * d.sqrt();
        let got = sigma_blp(&params, t).unwrap();
        assert!(
            (got - want).abs() <= 1e-10,
            "t={t}: sigma={got}, -g sqrt(D)={want}"
        );
    }
}

#[test]
fn log_derivative_of_eta_fixes_the_sign_convention() {
    // d/dt log eta = -2 g - 2 i f with the closed-form coefficient pair.
    for theta in [FRAC_PI_6, FRAC_PI_3, 0.1] {
        let params = ModelParams::new(215.06, theta, 0.0, 1.0).unwrap();
        for k in 1..2_000 {
            let t = k as f64 * 5e-6;
            let e = eta_theta(&params, t);
            if e.norm() < 1e-3 {
                continue;
            }
            let ratio = eta_theta_derivative(&params, t) / e;
            let f = f_coeff(&params, t).unwrap();
            let g = g_coeff(&params, t).unwrap();
            let scale = params.omega();
            assert!(
                (ratio.re + 2.0 * g).abs() <= 1e-8 * scale,
                "theta={theta}, t={t}: Re ratio {} vs -2g {}",
                ratio.re,
                -2.0 * g
            );
            assert!(
                (ratio.im + 2.0 * f).abs() <= 1e-8 * scale,
                "theta={theta}, t={t}: Im ratio {} vs -2f {}",
                ratio.im,
                -2.0 * f
            );
        }
    }
}

#[test]
fn real_part_of_eta_is_theta_independent() {
    let thetas = [0.0, PI / 18.0, FRAC_PI_6, PI / 4.0, FRAC_PI_3, FRAC_PI_2, 1.4];
    for k in 0..2_000 {
        let t = k as f64 * 5e-6;
        let reference = (PI * 215.06 * t).cos();
        for theta in thetas {
            let params = ModelParams::new(215.06, theta, 0.0, 1.0).unwrap();
            assert!((eta(&params, t).re - reference).abs() <= 1e-14);
        }
    }
}

#[test]
fn eta_magnitude_is_unity_only_for_z_eigenstates() {
    let t = 0.5 / 215.06; // pi J t = pi/2, where the contrast is maximal
    for theta in [0.0, FRAC_PI_2] {
        let params = ModelParams::new(215.06, theta, 0.0, 1.0).unwrap();
        assert!((eta(&params, t).norm() - 1.0).abs() <= 1e-14);
    }
    for theta in [0.1, FRAC_PI_6, FRAC_PI_3, 1.0] {
        let params = ModelParams::new(215.06, theta, 0.0, 1.0).unwrap();
        assert!(eta(&params, t).norm() < 1.0 - 1e-3, "theta={theta}");
    }
    // Any gamma > 0 breaks unit magnitude even for z eigenstates.
    let damped = ModelParams::new(215.06, 0.0, 5.0, 1.0).unwrap();
    assert!(eta(&damped, t).norm() < 1.0 - 1e-6);
}

#[test]
fn map_composition_with_environment_reset() {
    // Composing the reduced map over two legs (environment re-prepared in
    // between) matches the single-leg map only for z-eigenstate environments.
    let plus = DensityMatrix::from_ket(&Ket::plus());
    for theta in [0.0, FRAC_PI_2] {
        let params = ModelParams::new(215.06, theta, 0.0, 1.0).unwrap();
        for (t1, t2) in [(0.3e-3, 0.9e-3), (1.1e-3, 2.7e-3), (0.05e-3, 4.0e-3)] {
            let leg = reduced_state(&reduced_state(&plus, &params, t1).unwrap(), &params, t2)
                .unwrap();
            let direct = reduced_state(&plus, &params, t1 + t2).unwrap();
            assert!(
                leg.matrix().max_abs_diff(direct.matrix()) <= 1e-12,
                "theta={theta}, t1={t1}, t2={t2}"
            );
        }
    }
    // Generic angle: composition fails by a finite margin.
    let params = ModelParams::defaults();
    let (t1, t2) = (0.9e-3, 1.3e-3);
    let leg = reduced_state(&reduced_state(&plus, &params, t1).unwrap(), &params, t2).unwrap();
    let direct = reduced_state(&plus, &params, t1 + t2).unwrap();
    assert!(leg.matrix().max_abs_diff(direct.matrix()) > 1e-3);
}

#[test]
fn evolved_joint_state_reduces_to_the_dephasing_form() {
    // J = 215.06 Hz, theta = pi/3, t = 1 ms: tracing the brute-force joint
    // evolution matches the closed-form map, and the coherence factor matches
    // the independently written eta.
    let params = ModelParams::defaults();
    let t = 1.0e-3;
    let plus = DensityMatrix::from_ket(&Ket::plus());
    let joint0 = plus
        .tensor(&DensityMatrix::from_ket(&Ket::env_theta(params.theta_rad)))
        .unwrap();
    let reduced = partial_trace_env(&evolve_joint_oracle(&joint0, &params, t).unwrap()).unwrap();
    let closed = reduced_state(&plus, &params, t).unwrap();
    assert!(reduced.matrix().max_abs_diff(closed.matrix()) <= 1e-12);

    let coherence = reduced.entry(0, 1);
    let want = eta_closed(&params, t) * 0.5;
    assert!((coherence - want).norm() <= 1e-13);
}

#[test]
fn gamma_branch_of_sigma_matches_its_simplified_form() {
    // The published expression collapses to -exp(-gamma t) (gamma/2 + g) sqrt(D).
    let params = ModelParams::new(30.0, PI / 18.0, 1.0 / 0.150, 1.0).unwrap();
    for k in 0..5_000 {
        let t = k as f64 * 1e-5;
        let d = coeff_denominator(&params, t);
        let g = g_coeff(&params, t).unwrap();
        let want =
            -(-params.gamma_per_s * t).exp() * (0.5 * params.gamma_per_s + g) * d.sqrt();
        let got = sigma_blp(&params, t).unwrap();
        assert!((got - want).abs() <= 1e-10 * params.omega().max(1.0));
    }
}

#[test]
fn density_matrix_invariants_survive_long_channel_chains() {
    // Repeated channel application: every intermediate state satisfies the
    // constructor tolerances (the constructor re-validates each step).
    let params = ModelParams::new(215.06, FRAC_PI_3, 3.0, 1.0).unwrap();
    let mut state = DensityMatrix::from_ket(&Ket::plus());
    for _ in 0..2_000 {
        state = reduced_state(&state, &params, 3.7e-5).unwrap();
    }
    let mut joint = DensityMatrix::from_ket(&Ket::plus())
        .tensor(&DensityMatrix::from_ket(&Ket::env_theta(FRAC_PI_3)))
        .unwrap();
    for _ in 0..1_000 {
        joint = evolve_joint_oracle(&joint, &params, 2.9e-5).unwrap();
    }
}
