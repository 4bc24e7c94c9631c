//! Closed-form dynamics of a qubit dephasing through an Ising coupling to a
//! single environment spin, with an optional intrinsic dephasing channel.
//!
//! Conventions, frozen for the whole crate (hbar = 1, I_z = sigma_z / 2):
//!
//! - interaction Hamiltonian `H = (pi J / 2) sigma_z (x) sigma_z`, so the
//!   joint propagator is diagonal with phases -pi J t / 2 on |00>, |11> and
//!   +pi J t / 2 on |01>, |10>;
//! - environment prepared in |theta> = cos(theta)|0> + sin(theta)|1> gives
//!   the coherence factor `eta_theta(t) = cos(pi J t) - i cos(2 theta)
//!   sin(pi J t)`, whose real part is theta-independent;
//! - the intrinsic dephasing rate `gamma` multiplies the coherence by
//!   `exp(-2 gamma t)`, so the total instantaneous dephasing rate is
//!   `gamma + g(t)` and the log-derivative of the full coherence factor is
//!   `-2 (gamma + g(t)) - 2 i f(t)`. This fixes the global sign pairing of
//!   the effective Bohr frequency `f` with the dephasing rate `g`;
//! - the time-dependent coefficients share the denominator
//!   `D = 3 + 2 cos(4 theta) sin^2(pi J t) + cos(2 pi J t) = 4 |eta_theta|^2`
//!   with `f = 2 pi J cos(2 theta) / D` and
//!   `g = pi J sin^2(2 theta) sin(2 pi J t) / D`.
//!
//! Times are in seconds, couplings in Hz (cycles per second), rates in 1/s.

use crate::error::{Error, Result};
use crate::qcore::{
    partial_trace_env_raw, sigma_minus, ComplexMatrix, DensityMatrix,
};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

pub use crate::series::TimeGrid;

/// Coefficient denominators smaller than this are reported as singular
/// samples instead of numbers (the theta = pi/4 pole times).
pub const DENOM_SINGULAR_TOL: f64 = 1e-9;

/// System preparation choice: |+> or |->.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prep {
    Plus,
    Minus,
}

impl Prep {
    pub fn coherence_sign(self) -> f64 {
        match self {
            Prep::Plus => 1.0,
            Prep::Minus => -1.0,
        }
    }
}

/// Physical parameters of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Ising coupling, Hz.
    pub j_hz: f64,
    /// Environment preparation angle, stored reduced to [0, pi). All
    /// closed-form expressions have period pi in theta, so the reduction
    /// is exact.
    pub theta_rad: f64,
    /// Intrinsic dephasing rate, 1/s.
    pub gamma_per_s: f64,
    /// Pseudo-pure polarization, dimensionless.
    pub epsilon: f64,
}

impl ModelParams {
    pub fn new(j_hz: f64, theta_rad: f64, gamma_per_s: f64, epsilon: f64) -> Result<Self> {
        if !(j_hz.is_finite() && j_hz > 0.0) {
            return Err(Error::InvalidParameter(format!("J must be > 0, got {j_hz}")));
        }
        if !theta_rad.is_finite() {
            return Err(Error::InvalidParameter(format!("theta must be finite, got {theta_rad}")));
        }
        if !(gamma_per_s.is_finite() && gamma_per_s >= 0.0) {
            return Err(Error::InvalidParameter(format!("gamma must be >= 0, got {gamma_per_s}")));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!("epsilon must be in [0, 1], got {epsilon}")));
        }
        Ok(Self {
            j_hz,
            theta_rad: theta_rad.rem_euclid(PI),
            gamma_per_s,
            epsilon,
        })
    }

    /// J = 215.06 Hz, theta = pi/3, gamma = 0, epsilon = 1.
    pub fn defaults() -> Self {
        Self::new(215.06, PI / 3.0, 0.0, 1.0).unwrap()
    }

    /// Angular frequency pi * J (rad/s) under which the coherence rotates.
    pub fn omega(&self) -> f64 {
        PI * self.j_hz
    }
}

/// Joint propagator exp(-i H t) for the retained Ising term. Diagonal with
/// phases -pi J t / 2 on |00>, |11> and +pi J t / 2 on |01>, |10>.
pub fn joint_propagator(j_hz: f64, t: f64) -> ComplexMatrix {
    let half = 0.5 * PI * j_hz * t;
    let inner = C64::new(0.0, half).exp();
    let outer = C64::new(0.0, -half).exp();
    let mut u = ComplexMatrix::zeros(4).unwrap();
    u.set(0, 0, outer);
    u.set(1, 1, inner);
    u.set(2, 2, inner);
    u.set(3, 3, outer);
    u
}

/// Environment-only coherence factor, gamma excluded:
/// cos(pi J t) - i cos(2 theta) sin(pi J t).
pub fn eta_theta(params: &ModelParams, t: f64) -> C64 {
    let phase = params.omega() * t;
    C64::new(phase.cos(), -(2.0 * params.theta_rad).cos() * phase.sin())
}

/// Analytic time derivative of [`eta_theta`].
pub fn eta_theta_derivative(params: &ModelParams, t: f64) -> C64 {
    let w = params.omega();
    let phase = w * t;
    C64::new(
        -w * phase.sin(),
        -w * (2.0 * params.theta_rad).cos() * phase.cos(),
    )
}

/// Full coherence factor exp(-2 gamma t) * eta_theta(t). |eta| <= 1, with
/// equality only for theta in {0, pi/2} at gamma = 0.
pub fn eta(params: &ModelParams, t: f64) -> C64 {
    eta_theta(params, t) * (-2.0 * params.gamma_per_s * t).exp()
}

/// Shared denominator 3 + 2 cos(4 theta) sin^2(pi J t) + cos(2 pi J t).
/// Algebraically equal to 4 |eta_theta(t)|^2, hence never negative.
pub fn coeff_denominator(params: &ModelParams, t: f64) -> f64 {
    let phase = params.omega() * t;
    3.0 + 2.0 * (4.0 * params.theta_rad).cos() * phase.sin().powi(2)
        + (2.0 * phase).cos()
}

/// Effective Bohr frequency f(t) = 2 pi J cos(2 theta) / D, or `None` at a
/// singular sample (|D| below [`DENOM_SINGULAR_TOL`]).
pub fn f_coeff(params: &ModelParams, t: f64) -> Option<f64> {
    let d = coeff_denominator(params, t);
    if d.abs() < DENOM_SINGULAR_TOL {
        return None;
    }
    Some(2.0 * PI * params.j_hz * (2.0 * params.theta_rad).cos() / d)
}

/// Environment-induced dephasing rate
/// g(t) = pi J sin^2(2 theta) sin(2 pi J t) / D, or `None` at a singular
/// sample. g is odd around each zero of sin(2 pi J t) within a period.
pub fn g_coeff(params: &ModelParams, t: f64) -> Option<f64> {
    let d = coeff_denominator(params, t);
    if d.abs() < DENOM_SINGULAR_TOL {
        return None;
    }
    let s2t = (2.0 * params.theta_rad).sin();
    Some(PI * params.j_hz * s2t * s2t * (2.0 * params.omega() * t).sin() / d)
}

/// Time derivative of the trace distance between the evolved |+> / |->
/// preparations (the maximizing pair).
///
/// For gamma = 0 this is computed from the analytic derivative of |eta|,
/// which coincides with -g(t) sqrt(D). For gamma > 0 the published
/// closed form is returned verbatim:
/// -exp(-gamma t) [gamma (cos 4 theta + 3) + 2 sin^2(2 theta)
/// (gamma cos(2 pi J t) + pi J sin(2 pi J t))] / (2 sqrt(D)).
/// Note the gamma > 0 branch carries a half-rate dephasing convention
/// relative to the `exp(-2 gamma t)` coherence factor used elsewhere in this
/// crate; reports flag this (see the non-Markovianity module).
pub fn sigma_blp(params: &ModelParams, t: f64) -> Option<f64> {
    let d = coeff_denominator(params, t);
    if d.abs() < DENOM_SINGULAR_TOL {
        return None;
    }
    if params.gamma_per_s == 0.0 {
        let e = eta_theta(params, t);
        let de = eta_theta_derivative(params, t);
        Some((de * e.conj()).re / e.norm())
    } else {
        let gamma = params.gamma_per_s;
        let phase = params.omega() * t;
        let s2t_sq = (2.0 * params.theta_rad).sin().powi(2);
        let numer = gamma * ((4.0 * params.theta_rad).cos() + 3.0)
            + 2.0 * s2t_sq
                * (gamma * (2.0 * phase).cos() + PI * params.j_hz * (2.0 * phase).sin());
        Some(-(-gamma * t).exp() * numer / (2.0 * d.sqrt()))
    }
}

/// Environment-angle threshold below which the intrinsic dephasing keeps the
/// reduced dynamics Markovian: sqrt(gamma csc(2 pi J t) / (2 pi J)).
/// Monotone increasing in gamma at fixed J and t; undefined where
/// sin(2 pi J t) is not positive.
pub fn theta_threshold(gamma_per_s: f64, j_hz: f64, t: f64) -> Result<f64> {
    if !(j_hz > 0.0 && gamma_per_s >= 0.0) {
        return Err(Error::InvalidParameter(
            "threshold needs J > 0 and gamma >= 0".into(),
        ));
    }
    let s = (2.0 * PI * j_hz * t).sin();
    if s <= 0.0 {
        return Err(Error::ThresholdDomain(s));
    }
    Ok((gamma_per_s / (2.0 * PI * j_hz * s)).sqrt())
}

/// Linear action of the dephasing map on an arbitrary 2x2 operator:
/// populations fixed, upper coherence multiplied by eta(t), lower by its
/// conjugate.
pub fn apply_dephasing_map(op: &ComplexMatrix, params: &ModelParams, t: f64) -> Result<ComplexMatrix> {
    if op.dim() != 2 {
        return Err(Error::BadDimension(op.dim()));
    }
    let e = eta(params, t);
    let mut out = op.clone();
    out.set(0, 1, op.get(0, 1) * e);
    out.set(1, 0, op.get(1, 0) * e.conj());
    Ok(out)
}

/// Reduced state of the system at time t for an environment prepared in
/// |theta>: populations unchanged, coherence multiplied by eta(t).
pub fn reduced_state(rho0: &DensityMatrix, params: &ModelParams, t: f64) -> Result<DensityMatrix> {
    if rho0.dim() != 2 {
        return Err(Error::BadDimension(rho0.dim()));
    }
    DensityMatrix::new(apply_dephasing_map(rho0.matrix(), params, t)?)
}

/// Transverse magnetization <sigma_minus> = Tr(sigma_minus rho) = rho_10
/// under the frozen |0><1| convention.
pub fn magnetization(rho: &DensityMatrix) -> Result<C64> {
    if rho.dim() != 2 {
        return Err(Error::BadDimension(rho.dim()));
    }
    rho.expectation(&sigma_minus())
}

/// Brute-force joint evolution on a raw 4x4 matrix: unitary conjugation by
/// the Ising propagator followed, for gamma > 0, by a phase-damping channel
/// on the system with Kraus pair {sqrt(1-p) 1, sqrt(p) sigma_z (x) 1} and
/// p = (1 - exp(-2 gamma t)) / 2, reproducing the exp(-2 gamma t) coherence
/// factor of the frozen convention. Linear; no state validation.
pub fn evolve_joint_raw(m: &ComplexMatrix, params: &ModelParams, t: f64) -> Result<ComplexMatrix> {
    if m.dim() != 4 {
        return Err(Error::BadDimension(m.dim()));
    }
    let u = joint_propagator(params.j_hz, t);
    let mut out = u.mul(m)?.mul(&u.adjoint())?;
    if params.gamma_per_s > 0.0 {
        let p = 0.5 * (1.0 - (-2.0 * params.gamma_per_s * t).exp());
        let z1 = crate::qcore::sigma_z().kron(&ComplexMatrix::identity(2)?)?;
        let flipped = z1.mul(&out)?.mul(&z1)?;
        out = out
            .scale(C64::new(1.0 - p, 0.0))
            .add(&flipped.scale(C64::new(p, 0.0)))?;
    }
    Ok(out)
}

/// Brute-force oracle for the joint evolution of a validated state. CPTP by
/// construction; exactly unitary conjugation when gamma = 0.
pub fn evolve_joint_oracle(
    rho_se: &DensityMatrix,
    params: &ModelParams,
    t: f64,
) -> Result<DensityMatrix> {
    DensityMatrix::new(evolve_joint_raw(rho_se.matrix(), params, t)?)
}

/// Reduced system state obtained by tracing the environment out of the
/// brute-force joint evolution started from rho_S (x) |theta><theta|.
pub fn reduced_state_via_oracle(
    rho0: &DensityMatrix,
    params: &ModelParams,
    t: f64,
) -> Result<DensityMatrix> {
    let env = DensityMatrix::from_ket(&crate::qcore::Ket::env_theta(params.theta_rad));
    let joint = rho0.tensor(&env)?;
    let evolved = evolve_joint_oracle(&joint, params, t)?;
    DensityMatrix::new(partial_trace_env_raw(evolved.matrix()))
}
