//! Exact small-dimension complex linear algebra for two-level and two-spin
//! quantum states: construction, composition, partial trace, norms, fidelity,
//! and Pauli decomposition.
//!
//! Dimensions are fixed to 2 (single spin) and 4 (joint system-environment
//! space). Eigenvalues of 2x2 Hermitian matrices are computed analytically;
//! 4x4 Hermitian matrices go through a cyclic complex Jacobi iteration, so no
//! external eigensolver is needed. All values are immutable after
//! construction and every operation is a pure function.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

/// Max allowed deviation from Hermiticity for a density matrix.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Max allowed deviation of a density-matrix trace from 1.
pub const TRACE_TOL: f64 = 1e-12;
/// Most negative eigenvalue tolerated in a density matrix. Chosen to absorb
/// accumulated floating-point error over long chains of channel applications.
pub const POSITIVITY_TOL: f64 = -1e-10;
/// Off-diagonal norm at which the Jacobi eigenvalue iteration stops.
pub const JACOBI_TOL: f64 = 1e-13;
/// Max allowed deviation of a ket norm from 1.
pub const KET_NORM_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense square complex matrix of dimension 2 or 4, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(Error::BadDimension(dim))
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim, data: vec![ZERO; dim * dim] })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.set(i, i, ONE);
        }
        Ok(m)
    }

    /// Build from row-major data; `data.len()` must equal `dim * dim`.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(data.len(), dim * dim));
        }
        Ok(Self { dim, data })
    }

    /// Build a 2x2 matrix from real entries.
    pub fn from_real_2x2(rows: [[f64; 2]; 2]) -> Self {
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self { dim: 2, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let n = self.dim;
        let mut out = Self::zeros(n)?;
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self { dim: n, data: vec![ZERO; n * n] };
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise absolute value.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise absolute difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max |A - A†| over all entries.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Kronecker product with the left factor acting on the system slot.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.dim != 2 || other.dim != 2 {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = Self::zeros(4)?;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out.set(2 * i + k, 2 * j + l, self.get(i, j) * other.get(k, l));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Eigenvalues of a Hermitian matrix, ascending. The input is symmetrized
    /// to wash out sub-tolerance Hermiticity violations before iterating.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        match self.dim {
            2 => {
                let a = self.get(0, 0).re;
                let d = self.get(1, 1).re;
                let b = 0.5 * (self.get(0, 1) + self.get(1, 0).conj());
                let mean = 0.5 * (a + d);
                let disc = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
                vec![mean - disc, mean + disc]
            }
            _ => self.jacobi_eigenvalues(),
        }
    }

    /// Cyclic complex Jacobi iteration for 4x4 Hermitian matrices.
    fn jacobi_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        // Hermitian part; off-diagonal work happens on a mutable copy.
        let mut a = {
            let herm = self.add(&self.adjoint()).expect("same dim").scale(C64::new(0.5, 0.0));
            herm.data
        };
        let scale = self.max_abs().max(1.0);
        let idx = |i: usize, j: usize| i * n + j;
        for _sweep in 0..64 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[idx(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= JACOBI_TOL * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[idx(p, q)];
                    let mag = apq.norm();
                    if mag <= f64::EPSILON * scale {
                        a[idx(p, q)] = ZERO;
                        a[idx(q, p)] = ZERO;
                        continue;
                    }
                    let phase = apq / mag;
                    let app = a[idx(p, p)].re;
                    let aqq = a[idx(q, q)].re;
                    let tau = (aqq - app) / (2.0 * mag);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // G: identity except G[p][p]=c, G[p][q]=s*phase,
                    // G[q][p]=-s*conj(phase), G[q][q]=c. Apply A <- G† A G.
                    let gpq = phase * s;
                    for k in 0..n {
                        let akp = a[idx(k, p)];
                        let akq = a[idx(k, q)];
                        a[idx(k, p)] = akp * c - akq * gpq.conj();
                        a[idx(k, q)] = akp * gpq + akq * c;
                    }
                    for k in 0..n {
                        let apk = a[idx(p, k)];
                        let aqk = a[idx(q, k)];
                        a[idx(p, k)] = apk * c - aqk * gpq;
                        a[idx(q, k)] = apk * gpq.conj() + aqk * c;
                    }
                    a[idx(p, q)] = ZERO;
                    a[idx(q, p)] = ZERO;
                }
            }
        }
        let mut eig: Vec<f64> = (0..n).map(|i| a[idx(i, i)].re).collect();
        eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
        eig
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let gram = self.adjoint().mul(self).expect("same dim");
        let mut sv: Vec<f64> = gram
            .hermitian_eigenvalues()
            .into_iter()
            .map(|l| l.max(0.0).sqrt())
            .collect();
        sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
        sv
    }

    /// Determinant via LU with partial pivoting.
    pub fn det(&self) -> C64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let idx = |i: usize, j: usize| i * n + j;
        let mut det = ONE;
        for col in 0..n {
            let (pivot_row, pivot_mag) = (col..n)
                .map(|r| (r, a[idx(r, col)].norm()))
                .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                .unwrap();
            if pivot_mag == 0.0 {
                return ZERO;
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(idx(col, j), idx(pivot_row, j));
                }
                det = -det;
            }
            let pivot = a[idx(col, col)];
            det *= pivot;
            for r in (col + 1)..n {
                let factor = a[idx(r, col)] / pivot;
                for j in col..n {
                    let v = a[idx(col, j)];
                    a[idx(r, j)] -= factor * v;
                }
            }
        }
        det
    }

    /// Inverse via Gauss-Jordan with partial pivoting.
    pub fn invert(&self) -> Result<Self> {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut inv = Self::identity(n)?.data;
        let idx = |i: usize, j: usize| i * n + j;
        for col in 0..n {
            let (pivot_row, pivot_mag) = (col..n)
                .map(|r| (r, a[idx(r, col)].norm()))
                .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                .unwrap();
            if pivot_mag < 1e-300 {
                return Err(Error::SingularMatrix(pivot_mag));
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(idx(col, j), idx(pivot_row, j));
                    inv.swap(idx(col, j), idx(pivot_row, j));
                }
            }
            let pivot = a[idx(col, col)];
            for j in 0..n {
                a[idx(col, j)] /= pivot;
                inv[idx(col, j)] /= pivot;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[idx(r, col)];
                if factor == ZERO {
                    continue;
                }
                for j in 0..n {
                    let av = a[idx(col, j)];
                    let iv = inv[idx(col, j)];
                    a[idx(r, j)] -= factor * av;
                    inv[idx(r, j)] -= factor * iv;
                }
            }
        }
        Ok(Self { dim: n, data: inv })
    }
}

/// Pauli x.
pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, vec![ZERO, ONE, ONE, ZERO]).unwrap()
}

/// Pauli y.
pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_vec(
        2,
        vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO],
    )
    .unwrap()
}

/// Pauli z.
pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, vec![ONE, ZERO, ZERO, -ONE]).unwrap()
}

/// Lowering operator |0><1|. This is the frozen transverse-magnetization
/// convention for the whole crate: <sigma_minus> on a state rho equals the
/// matrix element rho_10, whose log-derivative carries the effective Bohr
/// frequency with a positive sign (see the tomography module).
pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, vec![ZERO, ONE, ZERO, ZERO]).unwrap()
}

/// Normalized Hermitian operator basis: {1, sx, sy, sz}/sqrt(2) for dim 2,
/// their sixteen pairwise Kronecker products for dim 4. Orthonormal under
/// the Hilbert-Schmidt inner product.
pub fn pauli_basis(dim: usize) -> Result<Vec<ComplexMatrix>> {
    check_dim(dim)?;
    let inv_sqrt2 = C64::new(1.0 / 2.0_f64.sqrt(), 0.0);
    let single: Vec<ComplexMatrix> = vec![
        ComplexMatrix::identity(2)?.scale(inv_sqrt2),
        sigma_x().scale(inv_sqrt2),
        sigma_y().scale(inv_sqrt2),
        sigma_z().scale(inv_sqrt2),
    ];
    if dim == 2 {
        return Ok(single);
    }
    let mut basis = Vec::with_capacity(16);
    for a in &single {
        for b in &single {
            basis.push(a.kron(b)?);
        }
    }
    Ok(basis)
}

/// Coefficients of `m` over the normalized Pauli basis, in basis order.
pub fn pauli_decompose(m: &ComplexMatrix) -> Result<Vec<C64>> {
    let basis = pauli_basis(m.dim())?;
    basis.iter().map(|chi| Ok(chi.mul(m)?.trace())).collect()
}

/// Rebuild a matrix from its Pauli-basis coefficients.
pub fn pauli_reconstruct(dim: usize, coeffs: &[C64]) -> Result<ComplexMatrix> {
    let basis = pauli_basis(dim)?;
    if coeffs.len() != basis.len() {
        return Err(Error::DimensionMismatch(coeffs.len(), basis.len()));
    }
    let mut out = ComplexMatrix::zeros(dim)?;
    for (c, chi) in coeffs.iter().zip(&basis) {
        out = out.add(&chi.scale(*c))?;
    }
    Ok(out)
}

/// Trace norm: sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    m.singular_values().iter().sum()
}

/// Pure state vector of dimension 2 or 4 with unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: Vec<C64>,
}

impl Ket {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > KET_NORM_TOL {
            return Err(Error::NonUnitNorm((norm - 1.0).abs()));
        }
        Ok(Self { amplitudes })
    }

    /// Computational basis state |index>.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for dim {dim}"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self { amplitudes })
    }

    /// (|0> + |1>)/sqrt(2).
    pub fn plus() -> Self {
        let a = C64::new(1.0 / 2.0_f64.sqrt(), 0.0);
        Self { amplitudes: vec![a, a] }
    }

    /// (|0> - |1>)/sqrt(2).
    pub fn minus() -> Self {
        let a = C64::new(1.0 / 2.0_f64.sqrt(), 0.0);
        Self { amplitudes: vec![a, -a] }
    }

    /// cos(theta)|0> + sin(theta)|1>, the environment preparation state.
    pub fn env_theta(theta: f64) -> Self {
        Self {
            amplitudes: vec![
                C64::new(theta.cos(), 0.0),
                C64::new(theta.sin(), 0.0),
            ],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitude(&self, i: usize) -> C64 {
        self.amplitudes[i]
    }

    pub fn tensor(&self, other: &Ket) -> Result<Ket> {
        if self.dim() != 2 || other.dim() != 2 {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let mut amplitudes = Vec::with_capacity(4);
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(Ket { amplitudes })
    }

    /// Rank-1 projector |k><k| as a raw matrix.
    pub fn projector(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n).unwrap();
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.amplitudes[i] * self.amplitudes[j].conj());
            }
        }
        m
    }
}

/// Hermitian, unit-trace, positive-semidefinite matrix of dimension 2 or 4.
/// Every constructor validates the three defining invariants, so any value of
/// this type seen anywhere in a simulation run is a physical state up to the
/// crate tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let herm = matrix.hermiticity_deviation();
        if herm > HERMITICITY_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let trace = matrix.trace();
        let trace_err = (trace - ONE).norm();
        if trace_err > TRACE_TOL {
            return Err(Error::NotUnitTrace(trace_err));
        }
        let min_eig = matrix
            .hermitian_eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < POSITIVITY_TOL {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(Self { matrix })
    }

    /// |k><k| from a unit-norm ket.
    pub fn from_ket(k: &Ket) -> Self {
        Self { matrix: k.projector() }
    }

    /// 1/d.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let m = ComplexMatrix::identity(dim)?.scale(C64::new(1.0 / dim as f64, 0.0));
        Ok(Self { matrix: m })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.matrix.get(i, j)
    }

    pub fn purity(&self) -> f64 {
        self.matrix.mul(&self.matrix).unwrap().trace().re
    }

    /// System-first tensor product of two single-spin states.
    pub fn tensor(&self, env: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.matrix.kron(&env.matrix)?)
    }

    /// Expectation value Tr(O rho). Real within tolerance for Hermitian O.
    pub fn expectation(&self, observable: &ComplexMatrix) -> Result<C64> {
        if observable.dim() != self.dim() {
            return Err(Error::DimensionMismatch(observable.dim(), self.dim()));
        }
        Ok(observable.mul(&self.matrix)?.trace())
    }
}

/// Trace out the environment (second) factor of a joint state, system-first
/// ordering: rho_S[i][j] = sum_k rho[2i+k][2j+k].
pub fn partial_trace_env(rho_se: &DensityMatrix) -> Result<DensityMatrix> {
    if rho_se.dim() != 4 {
        return Err(Error::BadDimension(rho_se.dim()));
    }
    DensityMatrix::new(partial_trace_env_raw(rho_se.matrix()))
}

/// Partial trace on a raw 4x4 matrix; linear, no state validation.
pub fn partial_trace_env_raw(m: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(2).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = ZERO;
            for k in 0..2 {
                acc += m.get(2 * i + k, 2 * j + k);
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// Overlap fidelity |Tr(rho0 rho1)| / sqrt(Tr(rho0^2) Tr(rho1^2)).
pub fn fidelity(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::DimensionMismatch(rho0.dim(), rho1.dim()));
    }
    let overlap = rho0.matrix().mul(rho1.matrix())?.trace().norm();
    let p0 = rho0.purity();
    let p1 = rho1.purity();
    let denom_sq = p0 * p1;
    if denom_sq < 1e-30 {
        return Err(Error::DegenerateFidelity(denom_sq));
    }
    Ok(overlap / denom_sq.sqrt())
}

/// Trace distance: half the trace norm of the difference. For a pair of
/// dephasing-evolved states differing only in the coherence this equals the
/// coherence gap |eta|, which is the normalization the analytic back-flow
/// witness uses.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    Ok(0.5 * trace_norm(&a.matrix().sub(b.matrix())?))
}
