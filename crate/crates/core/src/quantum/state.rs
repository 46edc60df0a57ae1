//! Validated state, Hamiltonian, basis and unitary types.

use crate::error::{Error, Result};
use crate::quantum::linalg::{
    eigh, hermitian_part, hermiticity_defect, max_abs, orthonormality_defect, outer, real_diag,
    CMatrix, CVector, Eigensystem, SortOrder, C64, TOL,
};

/// Outcomes with probability below this contribute nothing to daemonic sums.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        validate_density(mat)
    }

    /// Wraps a matrix that is a density operator by construction. The
    /// Hermitian part is taken to remove rounding asymmetry.
    pub(crate) fn from_matrix_unchecked(mat: CMatrix) -> Self {
        Self {
            mat: hermitian_part(&mat),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = 1.0 / dim as f64;
        Self {
            mat: CMatrix::identity(dim, dim).scale(w),
        }
    }

    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if norm < TOL {
            return Err(Error::TraceNotOne { trace: 0.0 });
        }
        let v = psi / C64::new(norm, 0.0);
        Ok(Self { mat: outer(&v) })
    }

    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        validate_density(real_diag(populations))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Spectrum with `r_k >= r_(k+1)`.
    pub fn spectrum(&self) -> Eigensystem {
        eigh(&self.mat, SortOrder::Descending)
    }
}

/// Checks Hermiticity, unit trace and positivity, in that order.
///
/// A Hermiticity defect below tolerance is removed by `(M + M^dagger) / 2`.
pub fn validate_density(mat: CMatrix) -> Result<DensityMatrix> {
    if !mat.is_square() {
        return Err(Error::NotSquare {
            rows: mat.nrows(),
            cols: mat.ncols(),
        });
    }
    let defect = hermiticity_defect(&mat);
    if defect > TOL {
        return Err(Error::NotHermitian { defect });
    }
    let mat = hermitian_part(&mat);
    let trace = mat.trace().re;
    if (trace - 1.0).abs() > TOL {
        return Err(Error::TraceNotOne { trace });
    }
    let spectrum = eigh(&mat, SortOrder::Ascending);
    let min_eigenvalue = spectrum.values.first().copied().unwrap_or(0.0);
    if min_eigenvalue < -TOL {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(DensityMatrix { mat })
}

/// Density operator on S (x) A, indexed row-major as `s * d_a + a`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    d_s: usize,
    d_a: usize,
    mat: CMatrix,
}

impl BipartiteState {
    pub fn new(d_s: usize, d_a: usize, mat: CMatrix) -> Result<Self> {
        if mat.nrows() != d_s * d_a {
            return Err(Error::DimensionMismatch {
                expected: d_s * d_a,
                found: mat.nrows(),
            });
        }
        let rho = validate_density(mat)?;
        Ok(Self {
            d_s,
            d_a,
            mat: rho.into_matrix(),
        })
    }

    pub(crate) fn from_matrix_unchecked(d_s: usize, d_a: usize, mat: CMatrix) -> Self {
        Self {
            d_s,
            d_a,
            mat: hermitian_part(&mat),
        }
    }

    pub fn product(system: &DensityMatrix, ancilla: &DensityMatrix) -> Self {
        Self {
            d_s: system.dim(),
            d_a: ancilla.dim(),
            mat: system.matrix().kronecker(ancilla.matrix()),
        }
    }

    pub fn pure(psi: &CVector, d_s: usize, d_a: usize) -> Result<Self> {
        let rho = DensityMatrix::pure(psi)?;
        Self::new(d_s, d_a, rho.into_matrix())
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn as_density(&self) -> DensityMatrix {
        DensityMatrix {
            mat: self.mat.clone(),
        }
    }

    /// Convex mixture `(1 - t) self + t other`.
    pub fn mix(&self, other: &BipartiteState, t: f64) -> Result<Self> {
        if self.d_s != other.d_s || self.d_a != other.d_a {
            return Err(Error::DimensionMismatch {
                expected: self.mat.nrows(),
                found: other.mat.nrows(),
            });
        }
        Ok(Self {
            d_s: self.d_s,
            d_a: self.d_a,
            mat: self.mat.scale(1.0 - t) + other.mat.scale(t),
        })
    }

    /// Applies `op` on S: `(op (x) I) rho (op (x) I)^dagger`.
    pub fn conjugate_system(&self, op: &CMatrix) -> CMatrix {
        let big = op.kronecker(&CMatrix::identity(self.d_a, self.d_a));
        &big * &self.mat * big.adjoint()
    }
}

/// Energies `e_k` strictly increasing with orthonormal eigenvectors (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    energies: Vec<f64>,
    basis: CMatrix,
}

impl Hamiltonian {
    pub fn new(energies: Vec<f64>, basis: CMatrix) -> Result<Self> {
        if basis.nrows() != energies.len() || basis.ncols() != energies.len() {
            return Err(Error::DimensionMismatch {
                expected: energies.len(),
                found: basis.ncols(),
            });
        }
        if let Some(index) = energies.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::DegenerateHamiltonian { index });
        }
        let defect = orthonormality_defect(&basis);
        if defect > TOL {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(Self { energies, basis })
    }

    /// Hamiltonian diagonal in the computational basis.
    pub fn diagonal(energies: &[f64]) -> Result<Self> {
        let n = energies.len();
        Self::new(energies.to_vec(), CMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn energy_vector(&self, k: usize) -> CVector {
        self.basis.column(k).into_owned()
    }

    pub fn is_computational(&self) -> bool {
        let n = self.dim();
        max_abs(&(&self.basis - CMatrix::identity(n, n))) == 0.0
    }

    pub fn matrix(&self) -> CMatrix {
        self.function(|e| C64::new(e, 0.0))
    }

    /// f(H) = sum_k f(e_k) |e_k><e_k|.
    pub fn function(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dim(),
            self.energies.iter().map(|&e| f(e)),
        ));
        if self.is_computational() {
            diag
        } else {
            &self.basis * diag * self.basis.adjoint()
        }
    }

    /// Matrix elements `<e_i| M |e_j>`.
    pub fn to_energy_basis(&self, m: &CMatrix) -> CMatrix {
        if self.is_computational() {
            m.clone()
        } else {
            self.basis.adjoint() * m * &self.basis
        }
    }

    pub fn from_energy_basis(&self, m: &CMatrix) -> CMatrix {
        if self.is_computational() {
            m.clone()
        } else {
            &self.basis * m * self.basis.adjoint()
        }
    }

    /// E(rho) = Tr[H rho].
    pub fn mean_energy(&self, rho: &CMatrix) -> f64 {
        let r = self.to_energy_basis(rho);
        self.energies
            .iter()
            .enumerate()
            .map(|(k, e)| e * r[(k, k)].re)
            .sum()
    }

    pub fn spread(&self) -> f64 {
        self.energies[self.dim() - 1] - self.energies[0]
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: n,
            });
        }
        Ok(())
    }

    pub(crate) fn require_dim(&self, n: usize) -> Result<()> {
        self.check_dim(n)
    }
}

/// Orthonormal basis `{|a>}` of the ancilla; the columns of `vectors`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    vectors: CMatrix,
}

impl MeasurementBasis {
    pub fn new(vectors: CMatrix) -> Result<Self> {
        if !vectors.is_square() {
            return Err(Error::NotSquare {
                rows: vectors.nrows(),
                cols: vectors.ncols(),
            });
        }
        let defect = orthonormality_defect(&vectors);
        if defect > TOL {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(Self { vectors })
    }

    pub(crate) fn from_unitary_unchecked(vectors: CMatrix) -> Self {
        Self { vectors }
    }

    pub fn computational(dim: usize) -> Self {
        Self {
            vectors: CMatrix::identity(dim, dim),
        }
    }

    /// Qubit basis `{|n>, |n_perp>}` with `|n> = (cos t/2, e^{i phi} sin t/2)`.
    pub fn bloch(theta: f64, phi: f64) -> Self {
        Self {
            vectors: bloch_basis(theta, phi),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn vector(&self, a: usize) -> CVector {
        self.vectors.column(a).into_owned()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.vectors
    }

    /// Bloch angles (theta, phi) of the first basis vector, for qubits.
    pub fn bloch_angles(&self) -> Option<(f64, f64)> {
        if self.dim() != 2 {
            return None;
        }
        let mut v = self.vector(0);
        crate::quantum::linalg::phase_fix(&mut v);
        let theta = 2.0 * v[0].norm().clamp(0.0, 1.0).acos();
        let phi = if v[1].norm() < 1e-12 {
            0.0
        } else {
            v[1].arg().rem_euclid(std::f64::consts::TAU)
        };
        Some((theta, phi))
    }
}

pub(crate) fn bloch_basis(theta: f64, phi: f64) -> CMatrix {
    let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = C64::from_polar(1.0, phi);
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(ct, 0.0),
            -e.conj() * st,
            e * st,
            C64::new(ct, 0.0),
        ],
    )
}

/// Unitary operator; `U^dagger U = I` within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    mat: CMatrix,
}

impl Unitary {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        let defect = orthonormality_defect(&mat);
        if defect > TOL {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self { mat })
    }

    pub(crate) fn from_matrix_unchecked(mat: CMatrix) -> Self {
        Self { mat }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    /// U rho U^dagger.
    pub fn evolve(&self, rho: &CMatrix) -> CMatrix {
        &self.mat * rho * self.mat.adjoint()
    }
}

/// rho_S = Tr_A rho_SA.
pub fn partial_trace_ancilla(rho: &BipartiteState) -> DensityMatrix {
    let (ds, da) = (rho.d_s, rho.d_a);
    let mut out = CMatrix::zeros(ds, ds);
    for s in 0..ds {
        for t in 0..ds {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..da {
                acc += rho.mat[(s * da + a, t * da + a)];
            }
            out[(s, t)] = acc;
        }
    }
    DensityMatrix::from_matrix_unchecked(out)
}

/// rho_A = Tr_S rho_SA.
pub fn partial_trace_system(rho: &BipartiteState) -> DensityMatrix {
    let (ds, da) = (rho.d_s, rho.d_a);
    let mut out = CMatrix::zeros(da, da);
    for a in 0..da {
        for b in 0..da {
            let mut acc = C64::new(0.0, 0.0);
            for s in 0..ds {
                acc += rho.mat[(s * da + a, s * da + b)];
            }
            out[(a, b)] = acc;
        }
    }
    DensityMatrix::from_matrix_unchecked(out)
}

/// Unnormalized S block `<a|_A rho |a>_A`; its trace is the outcome probability.
pub(crate) fn ancilla_block(rho: &BipartiteState, v: &CVector) -> CMatrix {
    let (ds, da) = (rho.d_s, rho.d_a);
    let mut out = CMatrix::zeros(ds, ds);
    for s in 0..ds {
        for t in 0..ds {
            let mut acc = C64::new(0.0, 0.0);
            for b in 0..da {
                let vb = v[b].conj();
                if vb == C64::new(0.0, 0.0) {
                    continue;
                }
                for bp in 0..da {
                    acc += vb * rho.mat[(s * da + b, t * da + bp)] * v[bp];
                }
            }
            out[(s, t)] = acc;
        }
    }
    out
}

/// Unnormalized A block `<k|_S rho |k>_S`.
pub(crate) fn system_block(rho: &BipartiteState, v: &CVector) -> CMatrix {
    let (ds, da) = (rho.d_s, rho.d_a);
    let mut out = CMatrix::zeros(da, da);
    for a in 0..da {
        for b in 0..da {
            let mut acc = C64::new(0.0, 0.0);
            for s in 0..ds {
                for t in 0..ds {
                    acc += v[s].conj() * rho.mat[(s * da + a, t * da + b)] * v[t];
                }
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Post-measurement state of S for ancilla outcome `a`.
#[derive(Debug, Clone)]
pub struct Conditional {
    pub state: DensityMatrix,
    pub probability: f64,
}

/// rho_(S|a) and p_a for the projector `|a><a|` on the ancilla.
pub fn conditional_state(
    rho: &BipartiteState,
    basis: &MeasurementBasis,
    a: usize,
) -> Result<Conditional> {
    if basis.dim() != rho.d_a {
        return Err(Error::DimensionMismatch {
            expected: rho.d_a,
            found: basis.dim(),
        });
    }
    if a >= rho.d_a {
        return Err(Error::DimensionMismatch {
            expected: rho.d_a,
            found: a,
        });
    }
    let block = ancilla_block(rho, &basis.vector(a));
    let probability = block.trace().re;
    if probability < ZERO_PROBABILITY {
        return Err(Error::ZeroProbabilityOutcome {
            outcome: a,
            probability,
        });
    }
    Ok(Conditional {
        state: DensityMatrix::from_matrix_unchecked(block.unscale(probability)),
        probability,
    })
}

/// sum_k P_k rho P_k for rank-one projectors `P_k = |k><k|`.
pub fn dephase(rho: &DensityMatrix, projectors: &[CVector]) -> Result<DensityMatrix> {
    let n = rho.dim();
    if projectors.len() != n || projectors.iter().any(|v| v.len() != n) {
        return Err(Error::IncompleteProjectorSet);
    }
    let mut basis = CMatrix::zeros(n, n);
    for (k, v) in projectors.iter().enumerate() {
        basis.set_column(k, v);
    }
    if orthonormality_defect(&basis) > TOL {
        return Err(Error::IncompleteProjectorSet);
    }
    Ok(DensityMatrix::from_matrix_unchecked(dephase_in_basis(
        rho.matrix(),
        &basis,
    )))
}

pub(crate) fn dephase_in_basis(m: &CMatrix, basis: &CMatrix) -> CMatrix {
    let inner = basis.adjoint() * m * basis;
    let diag = CMatrix::from_diagonal(&inner.diagonal());
    basis * diag * basis.adjoint()
}

/// Dephasing in the energy eigenbasis.
pub fn dephase_energy(rho: &DensityMatrix, h: &Hamiltonian) -> Result<DensityMatrix> {
    h.require_dim(rho.dim())?;
    Ok(DensityMatrix::from_matrix_unchecked(dephase_in_basis(
        rho.matrix(),
        h.basis(),
    )))
}
