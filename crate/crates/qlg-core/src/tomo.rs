//! Master-equation tomography: infer the effective Bohr frequency and the
//! total dephasing rate from magnetization traces, and reconstruct the full
//! time-local generator from sampled channel matrices.
//!
//! Two independent routes to the same pair (f_hat, g_hat):
//!
//! 1. the magnetization route: with <sigma_minus> = rho_10 the coherence
//!    evolves as exp(2 i int f - 2 int g_total), so
//!    `f_hat = Im[<d sigma_minus/dt> / <sigma_minus>] / 2` and
//!    `g_hat = -Re[<d sigma_minus/dt> / <sigma_minus>] / 2`;
//! 2. the channel-matrix route: sample the map matrix
//!    `[M]_ij = Tr[chi_i Phi[chi_j]]` over the normalized Pauli basis and
//!    form the time-local generator `K = (dM/dt) M^{-1}`, whose only nonzero
//!    entries sit in the (sigma_x, sigma_y) block as
//!    `[[-2 g_total, -2 f], [2 f, -2 g_total]]`.
//!
//! `g_hat` is the TOTAL dephasing rate: on a trace generated with intrinsic
//! rate gamma it recovers gamma + g(t); with gamma = 0 it is g(t) itself.
//! The derivative stencil is fixed (second-order central, one-sided at the
//! ends); no smoothing of ingested data is applied.

use crate::error::{Error, Result};
use crate::model::{apply_dephasing_map, magnetization, reduced_state, ModelParams, Prep, TimeGrid};
use crate::qcore::{pauli_basis, ComplexMatrix, DensityMatrix, Ket};
use crate::series::differentiate_uniform;
use num_complex::Complex64 as C64;

/// Samples whose |<sigma_minus>| falls below this fraction of the trace
/// maximum are flagged singular: dividing by a near-zero coherence amplifies
/// noise without bound.
pub const SINGULAR_FRACTION: f64 = 1e-6;

/// |det M| below which a sampled channel matrix is treated as singular.
pub const MAP_DET_TOL: f64 = 1e-12;

/// Where a magnetization trace came from.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceSource {
    Simulated { params: ModelParams, prep: Prep },
    Ingested,
}

/// Uniformly sampled complex <sigma_minus(t)> series.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnetizationTrace {
    pub grid: TimeGrid,
    pub values: Vec<C64>,
    pub source: TraceSource,
}

impl MagnetizationTrace {
    pub fn new(grid: TimeGrid, values: Vec<C64>, source: TraceSource) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if values.iter().any(|v| v.re.is_nan() || v.im.is_nan()) {
            return Err(Error::InvalidParameter("trace contains NaN values".into()));
        }
        Ok(Self { grid, values, source })
    }
}

/// Simulate the transverse magnetization of a |+> or |-> prepared system over
/// a grid, through the validated reduced-state evolution.
pub fn synth_trace(params: &ModelParams, prep: Prep, grid: &TimeGrid) -> Result<MagnetizationTrace> {
    let rho0 = DensityMatrix::from_ket(&match prep {
        Prep::Plus => Ket::plus(),
        Prep::Minus => Ket::minus(),
    });
    let values = grid
        .times()
        .map(|t| magnetization(&reduced_state(&rho0, params, t)?))
        .collect::<Result<Vec<_>>>()?;
    MagnetizationTrace::new(grid.clone(), values, TraceSource::Simulated {
        params: *params,
        prep,
    })
}

/// Second-order finite-difference derivative of the trace values.
pub fn differentiate(trace: &MagnetizationTrace) -> Result<Vec<C64>> {
    differentiate_uniform(&trace.values, trace.grid.dt())
}

/// One inferred generator sample.
#[derive(Debug, Clone)]
pub struct GeneratorSample {
    pub t: f64,
    /// Effective Bohr frequency, 1/s. NaN when singular.
    pub f_hat: f64,
    /// Total dephasing rate, 1/s. NaN when singular.
    pub g_hat: f64,
    /// Generator matrix in the normalized Pauli basis; `None` when singular.
    pub k: Option<ComplexMatrix>,
    pub singular: bool,
}

/// Assemble the Pauli-basis generator matrix for a (f_hat, g_hat) pair:
/// zero outside the central block [[-2 g, -2 f], [2 f, -2 g]].
pub fn generator_from_rates(f_hat: f64, g_hat: f64) -> ComplexMatrix {
    let mut k = ComplexMatrix::zeros(4).unwrap();
    k.set(1, 1, C64::new(-2.0 * g_hat, 0.0));
    k.set(2, 2, C64::new(-2.0 * g_hat, 0.0));
    k.set(1, 2, C64::new(-2.0 * f_hat, 0.0));
    k.set(2, 1, C64::new(2.0 * f_hat, 0.0));
    k
}

fn singular_sample(t: f64) -> GeneratorSample {
    GeneratorSample { t, f_hat: f64::NAN, g_hat: f64::NAN, k: None, singular: true }
}

/// Infer (f_hat, g_hat) per grid point from a magnetization trace. Samples
/// with |<sigma_minus>| below [`SINGULAR_FRACTION`] of the trace maximum are
/// flagged singular; an all-singular trace is an error.
pub fn infer_fg(trace: &MagnetizationTrace) -> Result<Vec<GeneratorSample>> {
    let derivative = differentiate(trace)?;
    let max_mag = trace.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let threshold = SINGULAR_FRACTION * max_mag;
    let mut out = Vec::with_capacity(trace.values.len());
    let mut regular = 0usize;
    for (k, (value, dvalue)) in trace.values.iter().zip(&derivative).enumerate() {
        let t = trace.grid.t(k);
        if value.norm() < threshold || max_mag == 0.0 {
            out.push(singular_sample(t));
            continue;
        }
        let ratio = dvalue / value;
        let f_hat = 0.5 * ratio.im;
        let g_hat = -0.5 * ratio.re;
        out.push(GeneratorSample {
            t,
            f_hat,
            g_hat,
            k: Some(generator_from_rates(f_hat, g_hat)),
            singular: false,
        });
        regular += 1;
    }
    if regular == 0 {
        return Err(Error::AllSamplesSingular);
    }
    Ok(out)
}

/// Build the channel matrix [M]_ij = Tr[chi_i Phi[chi_j]] from the four
/// (basis element, channel output) pairs taken at a common time. The inputs
/// must cover the normalized Pauli basis exactly once each.
pub fn map_matrix(channel_samples: &[(ComplexMatrix, ComplexMatrix)]) -> Result<ComplexMatrix> {
    let basis = pauli_basis(2)?;
    if channel_samples.len() != basis.len() {
        return Err(Error::IncompleteBasis);
    }
    // Match each sample input to its basis element.
    let mut outputs: Vec<Option<&ComplexMatrix>> = vec![None; basis.len()];
    for (input, output) in channel_samples {
        let mut matched = false;
        for (j, chi) in basis.iter().enumerate() {
            if input.max_abs_diff(chi) < 1e-12 {
                if outputs[j].is_some() {
                    return Err(Error::IncompleteBasis);
                }
                outputs[j] = Some(output);
                matched = true;
                break;
            }
        }
        if !matched {
            return Err(Error::IncompleteBasis);
        }
    }
    let mut m = ComplexMatrix::zeros(4)?;
    for (j, output) in outputs.iter().enumerate() {
        let phi_chi = output.ok_or(Error::IncompleteBasis)?;
        for (i, chi_i) in basis.iter().enumerate() {
            m.set(i, j, chi_i.mul(phi_chi)?.trace());
        }
    }
    Ok(m)
}

/// Sample the dephasing channel matrix at time t by pushing each normalized
/// Pauli basis element through the map.
pub fn dephasing_map_samples(
    params: &ModelParams,
    t: f64,
) -> Result<Vec<(ComplexMatrix, ComplexMatrix)>> {
    pauli_basis(2)?
        .into_iter()
        .map(|chi| {
            let out = apply_dephasing_map(&chi, params, t)?;
            Ok((chi, out))
        })
        .collect()
}

/// Time-local generator K = (dM/dt) M^{-1} from a channel-matrix series.
/// Samples where |det M| falls below [`MAP_DET_TOL`] are flagged singular.
/// For dephasing-type channels the extracted rates follow the central-block
/// structure documented at module level.
pub fn generator_matrix(m_series: &[ComplexMatrix], grid: &TimeGrid) -> Result<Vec<GeneratorSample>> {
    if m_series.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    if m_series.len() < 3 {
        return Err(Error::TooFewSamples { need: 3, got: m_series.len() });
    }
    // Differentiate every matrix entry as its own series.
    let n = m_series.len();
    let mut entry_series = vec![Vec::with_capacity(n); 16];
    for m in m_series {
        if m.dim() != 4 {
            return Err(Error::BadDimension(m.dim()));
        }
        for i in 0..4 {
            for j in 0..4 {
                entry_series[i * 4 + j].push(m.get(i, j));
            }
        }
    }
    let entry_derivatives: Vec<Vec<C64>> = entry_series
        .iter()
        .map(|s| differentiate_uniform(s, grid.dt()))
        .collect::<Result<Vec<_>>>()?;

    let mut out = Vec::with_capacity(n);
    for (k, m) in m_series.iter().enumerate() {
        let t = grid.t(k);
        if m.det().norm() <= MAP_DET_TOL {
            out.push(singular_sample(t));
            continue;
        }
        let mut dm = ComplexMatrix::zeros(4)?;
        for i in 0..4 {
            for j in 0..4 {
                dm.set(i, j, entry_derivatives[i * 4 + j][k]);
            }
        }
        let kmat = dm.mul(&m.invert()?)?;
        let f_hat = 0.5 * kmat.get(2, 1).re;
        let g_hat = -0.5 * kmat.get(1, 1).re;
        out.push(GeneratorSample { t, f_hat, g_hat, k: Some(kmat), singular: false });
    }
    if out.iter().all(|s| s.singular) {
        return Err(Error::AllSamplesSingular);
    }
    Ok(out)
}

/// Integrate the inferred rates back into a coherence series:
/// <sigma_minus>(t) = <sigma_minus>(0) exp(int (2 i f_hat - 2 g_hat)),
/// cumulative trapezoid on the sample grid. Integration stops at the first
/// singular sample; the returned series covers the regular prefix.
pub fn integrate_coherence(samples: &[GeneratorSample], initial: C64) -> Vec<C64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut log_acc = C64::new(0.0, 0.0);
    let mut prev: Option<(f64, C64)> = None;
    for s in samples {
        if s.singular {
            break;
        }
        let rate = C64::new(-2.0 * s.g_hat, 2.0 * s.f_hat);
        if let Some((t_prev, rate_prev)) = prev {
            log_acc += (rate_prev + rate) * C64::new(0.5 * (s.t - t_prev), 0.0);
        }
        out.push(initial * log_acc.exp());
        prev = Some((s.t, rate));
    }
    out
}

/// Goodness of reconstruction: max |reconstructed - trace| over the regular
/// prefix, normalized by the trace maximum. Errors when the overlap between
/// the integrated series and the trace is empty.
pub fn residual(samples: &[GeneratorSample], trace: &MagnetizationTrace) -> Result<f64> {
    if samples.len() != trace.values.len() {
        return Err(Error::GridMismatch);
    }
    if samples
        .iter()
        .zip(trace.grid.times())
        .any(|(s, t)| (s.t - t).abs() > 1e-12)
    {
        return Err(Error::GridMismatch);
    }
    let recon = integrate_coherence(samples, trace.values[0]);
    if recon.is_empty() {
        return Err(Error::AllSamplesSingular);
    }
    let max_mag = trace.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if max_mag == 0.0 {
        return Err(Error::InvalidParameter("trace is identically zero".into()));
    }
    Ok(recon
        .iter()
        .zip(&trace.values)
        .map(|(r, v)| (r - v).norm())
        .fold(0.0, f64::max)
        / max_mag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};

    fn grid_ms(t_max: f64, dt: f64) -> TimeGrid {
        TimeGrid::from_span(t_max, dt).unwrap()
    }

    #[test]
    fn trace_validates_lengths_and_nan() {
        let grid = grid_ms(1e-3, 1e-4);
        assert!(MagnetizationTrace::new(grid.clone(), vec![C64::new(0.0, 0.0); 3], TraceSource::Ingested).is_err());
        let mut vals = vec![C64::new(0.1, 0.0); grid.len()];
        vals[2] = C64::new(f64::NAN, 0.0);
        assert!(MagnetizationTrace::new(grid, vals, TraceSource::Ingested).is_err());
    }

    #[test]
    fn infer_matches_closed_form_at_theta_zero() {
        // f = pi J / 2 within 1e-3 relative, g = 0 within 1e-6.
        let params = ModelParams::new(215.06, 0.0, 0.0, 1.0).unwrap();
        let trace = synth_trace(&params, Prep::Plus, &grid_ms(10e-3, 10e-6)).unwrap();
        let samples = infer_fg(&trace).unwrap();
        let f_want = 0.5 * PI * params.j_hz;
        let last = samples.len() - 1;
        for (k, s) in samples.iter().enumerate() {
            assert!(!s.singular);
            assert!((s.f_hat - f_want).abs() / f_want <= 1e-3);
            // Interior central stencils cancel the dephasing error exactly
            // for a pure rotation; the one-sided endpoint stencils leave an
            // O(dt^3 w^4) remainder.
            let tol = if k == 0 || k == last { 1e-4 } else { 1e-6 };
            assert!(s.g_hat.abs() <= tol, "g_hat = {} at k={k}", s.g_hat);
        }
    }

    #[test]
    fn sign_calibration_against_model_coefficients() {
        // theta = pi/6 synthetic trace: the frozen signs must reproduce the
        // closed-form coefficients without any flip.
        let params = ModelParams::new(215.06, PI / 6.0, 0.0, 1.0).unwrap();
        let trace = synth_trace(&params, Prep::Plus, &grid_ms(5e-3, 5e-6)).unwrap();
        let samples = infer_fg(&trace).unwrap();
        for s in samples.iter().filter(|s| !s.singular) {
            let f_want = crate::model::f_coeff(&params, s.t).unwrap();
            let g_want = crate::model::g_coeff(&params, s.t).unwrap();
            assert!((s.f_hat - f_want).abs() <= 1e-3 * f_want.abs().max(1.0));
            assert!((s.g_hat - g_want).abs() <= 1e-3 * g_want.abs().max(1.0));
        }
    }

    #[test]
    fn quarter_pi_angle_flags_singular_samples_near_pole() {
        let params = ModelParams::new(215.06, FRAC_PI_4, 0.0, 1.0).unwrap();
        // Grid aligned so a sample lands on pi J t = pi/2 (t = 1/(2J)): the
        // coherence vanishes there and the sample must be unusable.
        let t_pole = 0.5 / params.j_hz;
        let dt = t_pole / 64.0;
        let grid = TimeGrid::new(0.0, dt, 129).unwrap();
        let trace = synth_trace(&params, Prep::Plus, &grid).unwrap();
        let samples = infer_fg(&trace).unwrap();
        assert!(samples[64].singular, "on-pole sample not flagged");
        // Neighbors stay regular but carry a diverging dephasing rate.
        assert!(!samples[63].singular && !samples[65].singular);
        assert!(samples[63].g_hat.abs() > 10.0 * PI * params.j_hz);
    }

    #[test]
    fn all_singular_trace_is_an_error() {
        let grid = grid_ms(1e-3, 1e-4);
        let vals = vec![C64::new(0.0, 0.0); grid.len()];
        let trace = MagnetizationTrace::new(grid, vals, TraceSource::Ingested).unwrap();
        assert!(matches!(infer_fg(&trace), Err(Error::AllSamplesSingular)));
    }

    #[test]
    fn map_matrix_identity_and_full_dephasing() {
        let basis = pauli_basis(2).unwrap();
        let id_samples: Vec<_> = basis.iter().map(|chi| (chi.clone(), chi.clone())).collect();
        let m = map_matrix(&id_samples).unwrap();
        assert!(m.max_abs_diff(&ComplexMatrix::identity(4).unwrap()) < 1e-14);

        // eta = 0: diag(1, 0, 0, 1).
        let crush: Vec<_> = basis
            .iter()
            .map(|chi| {
                let mut out = chi.clone();
                out.set(0, 1, C64::new(0.0, 0.0));
                out.set(1, 0, C64::new(0.0, 0.0));
                (chi.clone(), out)
            })
            .collect();
        let m = map_matrix(&crush).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j && (i == 0 || i == 3) { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(m.get(i, j).re, want, epsilon = 1e-14);
                assert_abs_diff_eq!(m.get(i, j).im, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn map_matrix_real_contraction_at_quarter_pi() {
        // theta = pi/4: eta = cos(pi J t), pure contraction of the central block.
        let params = ModelParams::new(215.06, FRAC_PI_4, 0.0, 1.0).unwrap();
        let t = 0.8e-3;
        let m = map_matrix(&dephasing_map_samples(&params, t).unwrap()).unwrap();
        let c = (params.omega() * t).cos();
        let want = [1.0, c, c, 1.0];
        for i in 0..4 {
            for j in 0..4 {
                let w = if i == j { want[i] } else { 0.0 };
                assert_abs_diff_eq!(m.get(i, j).re, w, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn map_matrix_rejects_incomplete_basis() {
        let basis = pauli_basis(2).unwrap();
        let three: Vec<_> = basis[..3].iter().map(|chi| (chi.clone(), chi.clone())).collect();
        assert!(matches!(map_matrix(&three), Err(Error::IncompleteBasis)));
        // Duplicate element instead of full coverage.
        let mut dup: Vec<_> = basis.iter().map(|chi| (chi.clone(), chi.clone())).collect();
        dup[3] = dup[0].clone();
        assert!(matches!(map_matrix(&dup), Err(Error::IncompleteBasis)));
    }

    #[test]
    fn generator_of_static_channel_is_zero() {
        let grid = grid_ms(1e-3, 1e-4);
        let m = ComplexMatrix::identity(4).unwrap();
        let series = vec![m; grid.len()];
        for s in generator_matrix(&series, &grid).unwrap() {
            assert!(!s.singular);
            assert_abs_diff_eq!(s.f_hat, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(s.g_hat, 0.0, epsilon = 1e-12);
            assert!(s.k.unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn generator_of_pure_rotation_is_antisymmetric() {
        // theta = 0: K block is the antisymmetric rotation generator, g = 0.
        let params = ModelParams::new(215.06, 0.0, 0.0, 1.0).unwrap();
        let grid = grid_ms(2e-3, 10e-6);
        let series: Vec<ComplexMatrix> = grid
            .times()
            .map(|t| map_matrix(&dephasing_map_samples(&params, t).unwrap()).unwrap())
            .collect();
        let samples = generator_matrix(&series, &grid).unwrap();
        let last = samples.len() - 1;
        for (i, s) in samples.into_iter().enumerate() {
            let tol = if i == 0 || i == last { 1e-4 } else { 1e-6 };
            assert!(s.g_hat.abs() < tol);
            let k = s.k.unwrap();
            assert!((k.get(1, 2) + k.get(2, 1)).norm() < 2.0 * tol);
            assert!(k.get(1, 1).norm() < 2.0 * tol);
        }
    }

    #[test]
    fn residual_round_trip_and_errors() {
        let params = ModelParams::new(215.06, FRAC_PI_3, 0.0, 1.0).unwrap();
        let trace = synth_trace(&params, Prep::Plus, &grid_ms(5e-3, 10e-6)).unwrap();
        let samples = infer_fg(&trace).unwrap();
        let r = residual(&samples, &trace).unwrap();
        assert!(r <= 1e-3, "round-trip residual {r}");

        // Mismatched grids error out.
        let other = synth_trace(&params, Prep::Plus, &grid_ms(5e-3, 20e-6)).unwrap();
        assert!(matches!(residual(&samples, &other), Err(Error::GridMismatch)));
    }

    #[test]
    fn residual_detects_injected_noise() {
        let params = ModelParams::new(215.06, FRAC_PI_3, 0.0, 1.0).unwrap();
        let clean = synth_trace(&params, Prep::Plus, &grid_ms(5e-3, 10e-6)).unwrap();
        let samples = infer_fg(&clean).unwrap();
        // 1% amplitude kick on one sample.
        let mut noisy_vals = clean.values.clone();
        let mid = noisy_vals.len() / 2;
        noisy_vals[mid] *= C64::new(1.01, 0.0);
        let noisy =
            MagnetizationTrace::new(clean.grid.clone(), noisy_vals, TraceSource::Ingested).unwrap();
        let r = residual(&samples, &noisy).unwrap();
        assert!(r >= 2e-3, "residual {r} should sit above the injected 1% kick scale");
    }
}
