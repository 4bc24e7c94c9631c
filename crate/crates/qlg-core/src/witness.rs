//! Temporal-inequality evaluators: the extended Leggett-Garg function, the
//! stationarity-based H inequalities, and the standard Leggett-Garg
//! combination, together with the conditional probabilities and two-time
//! correlators they are built from.
//!
//! Conditional probabilities are operational: the joint state is evolved,
//! the system is projected (Lueders collapse, system only, environment
//! carried through un-measured), and the evolution continues. Two-time
//! correlators of sigma_x are evaluated in the Heisenberg picture of the
//! reduced dynamical map — the non-invasive idealization — which makes them
//! environment-angle dependent; a sequential-collapse chain provably is not
//! (its correlator reduces to exp(-2 gamma dt) cos(pi J dt) for every theta)
//! and cannot reproduce the angle dependence of the standard Leggett-Garg
//! violations.

use crate::error::{Error, Result};
use crate::model::{eta, evolve_joint_raw, ModelParams, TimeGrid};
use crate::qcore::{ComplexMatrix, DensityMatrix, Ket};
use crate::series::positive_intervals;
use num_complex::Complex64 as C64;

/// Time resolution to which violation-interval boundaries are bisected.
pub const INTERVAL_REFINE_TOL: f64 = 1e-9;

/// Probability below which conditioning on a measurement outcome is refused.
pub const NULL_EVENT_TOL: f64 = 1e-14;

/// Conditional probability P(zeta, t1 | zeta, t0): prepare the system in
/// `zeta` and the environment in |theta> at time 0, evolve to t0, project the
/// system onto `zeta` keeping the renormalized post-measurement joint state,
/// evolve to t1, and read the probability of finding `zeta` again.
pub fn conditional_prob(zeta: &Ket, params: &ModelParams, t1: f64, t0: f64) -> Result<f64> {
    if zeta.dim() != 2 {
        return Err(Error::BadDimension(zeta.dim()));
    }
    if !(0.0 <= t0 && t0 <= t1) {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= t0 <= t1, got t0={t0}, t1={t1}"
        )));
    }
    let env = Ket::env_theta(params.theta_rad);
    let joint0 = DensityMatrix::from_ket(zeta)
        .tensor(&DensityMatrix::from_ket(&env))?;
    let projector = zeta
        .projector()
        .kron(&ComplexMatrix::identity(2)?)?;

    let at_t0 = evolve_joint_raw(joint0.matrix(), params, t0)?;
    let p0 = projector.mul(&at_t0)?.trace().re;
    if p0 < NULL_EVENT_TOL {
        return Err(Error::NullConditioning(p0));
    }
    let collapsed = projector
        .mul(&at_t0)?
        .mul(&projector)?
        .scale(C64::new(1.0 / p0, 0.0));
    let at_t1 = evolve_joint_raw(&collapsed, params, t1 - t0)?;
    Ok(projector.mul(&at_t1)?.trace().re)
}

/// Extended Leggett-Garg function |2 P(+, t | +, 0) - P(+, 2t | +, 0)| for
/// the projector observable |+><+| and the system prepared in |+>. A value
/// above 1 falsifies every classical Markovian description.
pub fn extended_lg(params: &ModelParams, t: f64) -> Result<f64> {
    let plus = Ket::plus();
    let p_t = conditional_prob(&plus, params, t, 0.0)?;
    let p_2t = conditional_prob(&plus, params, 2.0 * t, 0.0)?;
    Ok((2.0 * p_t - p_2t).abs())
}

/// Stationarity-based inequalities:
/// H1 = P(+, 2t | +, 0) - P(+, t | +, 0)^2, classically >= 0;
/// H2 = P(+, 2t | +, 0) + 2 P(+, t | +, 0), classically >= 1.
/// Both are reported as the left-hand sides; the violation flags are
/// H1 < 0 and H2 < 1.
pub fn h_inequalities(params: &ModelParams, t: f64) -> Result<(f64, f64)> {
    let plus = Ket::plus();
    let p_t = conditional_prob(&plus, params, t, 0.0)?;
    let p_2t = conditional_prob(&plus, params, 2.0 * t, 0.0)?;
    Ok((p_2t - p_t * p_t, p_2t + 2.0 * p_t))
}

/// Two-time correlator <sigma_x(t2) sigma_x(t1)> on the |+> (x) |theta>
/// preparation, with the observables evolved in the Heisenberg picture of the
/// reduced dephasing map (non-invasive idealization). Closed form:
/// Re[eta(t2) conj(eta(t1))].
pub fn two_time_correlator(params: &ModelParams, t1: f64, t2: f64) -> Result<f64> {
    if !(0.0 <= t1 && t1 <= t2) {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= t1 <= t2, got t1={t1}, t2={t2}"
        )));
    }
    let e1 = eta(params, t1);
    let e2 = eta(params, t2);
    Ok((e2 * e1.conj()).re)
}

/// Standard Leggett-Garg combination
/// L(t) = C(t; 0) + C(2t; t) + C(3t; 2t) - C(3t; 0), classically <= 2.
pub fn standard_lg(params: &ModelParams, t: f64) -> Result<f64> {
    Ok(two_time_correlator(params, 0.0, t)?
        + two_time_correlator(params, t, 2.0 * t)?
        + two_time_correlator(params, 2.0 * t, 3.0 * t)?
        - two_time_correlator(params, 0.0, 3.0 * t)?)
}

/// Per-grid evaluation of all witnesses with violation flags and refined
/// violation intervals.
#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub grid: TimeGrid,
    pub lq: Vec<f64>,
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
    pub lg: Vec<f64>,
    /// Maximal, disjoint, sorted intervals where |L_Q| > 1.
    pub lq_intervals: Vec<(f64, f64)>,
    /// Intervals where H1 < 0.
    pub h1_intervals: Vec<(f64, f64)>,
    /// Intervals where H2 < 1.
    pub h2_intervals: Vec<(f64, f64)>,
    /// Intervals where L > 2.
    pub lg_intervals: Vec<(f64, f64)>,
}

impl WitnessReport {
    pub fn lq_violation_at(&self, k: usize) -> bool {
        self.lq[k] > 1.0
    }
    pub fn h1_violation_at(&self, k: usize) -> bool {
        self.h1[k] < 0.0
    }
    pub fn h2_violation_at(&self, k: usize) -> bool {
        self.h2[k] < 1.0
    }
    pub fn lg_violation_at(&self, k: usize) -> bool {
        self.lg[k] > 2.0
    }
}

/// Evaluate every witness on the grid. Grid points are independent; the
/// output ordering is fixed by the grid.
pub fn evaluate(params: &ModelParams, grid: &TimeGrid) -> Result<WitnessReport> {
    let mut lq = Vec::with_capacity(grid.len());
    let mut h1 = Vec::with_capacity(grid.len());
    let mut h2 = Vec::with_capacity(grid.len());
    let mut lg = Vec::with_capacity(grid.len());
    for t in grid.times() {
        lq.push(extended_lg(params, t)?);
        let (a, b) = h_inequalities(params, t)?;
        h1.push(a);
        h2.push(b);
        lg.push(standard_lg(params, t)?);
    }
    let lq_intervals = positive_intervals(
        |t| extended_lg(params, t).ok().map(|v| v - 1.0),
        grid,
        INTERVAL_REFINE_TOL,
    );
    let h1_intervals = positive_intervals(
        |t| h_inequalities(params, t).ok().map(|(a, _)| -a),
        grid,
        INTERVAL_REFINE_TOL,
    );
    let h2_intervals = positive_intervals(
        |t| h_inequalities(params, t).ok().map(|(_, b)| 1.0 - b),
        grid,
        INTERVAL_REFINE_TOL,
    );
    let lg_intervals = positive_intervals(
        |t| standard_lg(params, t).ok().map(|v| v - 2.0),
        grid,
        INTERVAL_REFINE_TOL,
    );
    Ok(WitnessReport {
        grid: grid.clone(),
        lq,
        h1,
        h2,
        lg,
        lq_intervals,
        h1_intervals,
        h2_intervals,
        lg_intervals,
    })
}
