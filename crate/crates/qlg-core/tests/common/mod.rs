//! Shared helpers for the integration suites: hand-derived closed forms used
//! as independent oracles, an oracle-backed channel-matrix builder, and
//! seeded random-state generation.

#![allow(dead_code)]

use num_complex::Complex64 as C64;
use qlg_core::model::{evolve_joint_raw, ModelParams};
use qlg_core::qcore::{pauli_basis, partial_trace_env_raw, ComplexMatrix, DensityMatrix, Ket};
use qlg_core::tomo::map_matrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Closed-form survival probability P(+, t | +, 0) =
/// (1 + exp(-2 gamma t) cos(pi J t)) / 2. Independent of theta.
pub fn p_plus_closed(params: &ModelParams, t: f64) -> f64 {
    0.5 * (1.0 + (-2.0 * params.gamma_per_s * t).exp() * (params.omega() * t).cos())
}

/// Closed-form extended Leggett-Garg function |2 p(t) - p(2t)|.
pub fn lq_closed(params: &ModelParams, t: f64) -> f64 {
    (2.0 * p_plus_closed(params, t) - p_plus_closed(params, 2.0 * t)).abs()
}

/// Closed-form H pair.
pub fn h_closed(params: &ModelParams, t: f64) -> (f64, f64) {
    let p1 = p_plus_closed(params, t);
    let p2 = p_plus_closed(params, 2.0 * t);
    (p2 - p1 * p1, p2 + 2.0 * p1)
}

/// Closed-form coherence factor exp(-2 gamma t) (cos wt - i cos 2theta sin wt),
/// written out independently of the library implementation.
pub fn eta_closed(params: &ModelParams, t: f64) -> C64 {
    let w = params.omega() * t;
    let damp = (-2.0 * params.gamma_per_s * t).exp();
    C64::new(damp * w.cos(), -damp * (2.0 * params.theta_rad).cos() * w.sin())
}

/// Closed-form two-time correlator Re[eta(t2) conj(eta(t1))].
pub fn corr_closed(params: &ModelParams, t1: f64, t2: f64) -> f64 {
    (eta_closed(params, t2) * eta_closed(params, t1).conj()).re
}

/// Channel matrix at time t built through the brute-force joint oracle:
/// each normalized Pauli basis element is tensored with the environment
/// projector, evolved jointly, and traced back down. Independent of the
/// closed-form dephasing map.
pub fn map_matrix_via_oracle(params: &ModelParams, t: f64) -> ComplexMatrix {
    let env = Ket::env_theta(params.theta_rad).projector();
    let samples: Vec<(ComplexMatrix, ComplexMatrix)> = pauli_basis(2)
        .unwrap()
        .into_iter()
        .map(|chi| {
            let joint = chi.kron(&env).unwrap();
            let evolved = evolve_joint_raw(&joint, params, t).unwrap();
            (chi, partial_trace_env_raw(&evolved))
        })
        .collect();
    map_matrix(&samples).unwrap()
}

/// Heisenberg-evolved sigma_x under the channel matrix `m`:
/// Phi_dagger[sigma_x] = sqrt(2) sum_j M[1][j] chi_j.
pub fn heisenberg_sigma_x(m: &ComplexMatrix) -> ComplexMatrix {
    let basis = pauli_basis(2).unwrap();
    let sqrt2 = C64::new(2.0_f64.sqrt(), 0.0);
    let mut out = ComplexMatrix::zeros(2).unwrap();
    for (j, chi) in basis.iter().enumerate() {
        out = out.add(&chi.scale(m.get(1, j) * sqrt2)).unwrap();
    }
    out
}

/// Standard normal via Box-Muller.
pub fn randn(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Random density matrix from a Ginibre draw: G G^dagger normalized.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    loop {
        let data: Vec<C64> = (0..dim * dim)
            .map(|_| C64::new(randn(rng), randn(rng)))
            .collect();
        let g = ComplexMatrix::from_vec(dim, data).unwrap();
        let gram = g.mul(&g.adjoint()).unwrap();
        let trace = gram.trace().re;
        if trace < 1e-6 {
            continue;
        }
        let rho = gram.scale(C64::new(1.0 / trace, 0.0));
        return DensityMatrix::new(rho).expect("Ginibre state is physical");
    }
}

/// Random unit ket.
pub fn random_ket(rng: &mut ChaCha8Rng, dim: usize) -> Ket {
    loop {
        let amps: Vec<C64> = (0..dim).map(|_| C64::new(randn(rng), randn(rng))).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        return Ket::new(amps).expect("normalized ket");
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
