//! Dense Hermitian linear algebra for small systems.
//!
//! Everything here operates on `DMatrix<Complex<f64>>`. Dimensions are tiny
//! (joint spaces up to 16), so clarity wins over blocking or caching.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Validity tolerance for Hermiticity, positivity, trace and orthonormality.
pub const TOL: f64 = 1e-9;

/// Comparison tolerance for values produced by numerical optimizers.
pub const OPT_TOL: f64 = 1e-6;

/// Relative gap below which two eigenvalues are treated as degenerate.
const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SortOrder {
    Ascending,
    Descending,
}

/// Eigenvalues with orthonormal eigenvectors stored as matrix columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigensystem {
    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }

    /// Sum_k v_k |v_k><v_k|.
    pub fn reconstruct(&self) -> CMatrix {
        let diag = CMatrix::from_diagonal(&DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&v| C64::new(v, 0.0)),
        ));
        &self.vectors * diag * self.vectors.adjoint()
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real_diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| C64::new(v, 0.0)),
    ))
}

/// Max-entry norm.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.trace().re
}

/// Tr[A B] without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// max |V^dagger V - I| over the columns of `v`.
pub fn orthonormality_defect(v: &CMatrix) -> f64 {
    let gram = v.adjoint() * v;
    let n = gram.nrows();
    max_abs(&(gram - CMatrix::identity(n, n)))
}

/// Eigendecomposition of a Hermitian matrix with deterministic ordering.
///
/// Values are sorted per `order`. Within a degenerate block the basis is
/// canonicalized: the block projector is applied to the standard basis vectors
/// in order and Gram-Schmidt'd, each vector is phase-fixed so its first
/// nonzero component is real positive, and the block is sorted
/// lexicographically. The identity therefore returns the standard basis.
pub fn eig_sorted(m: &CMatrix, order: SortOrder) -> Result<Eigensystem> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let defect = hermiticity_defect(m);
    if defect > TOL * (1.0 + max_abs(m)) {
        return Err(Error::NotHermitian { defect });
    }
    Ok(eigh(m, order))
}

/// `eig_sorted` without the Hermiticity check; the Hermitian part is used.
pub fn eigh(m: &CMatrix, order: SortOrder) -> Eigensystem {
    let n = m.nrows();
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        let (x, y) = (eig.eigenvalues[a], eig.eigenvalues[b]);
        match order {
            SortOrder::Ascending => x.total_cmp(&y),
            SortOrder::Descending => y.total_cmp(&x),
        }
    });
    let values: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in idx.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }

    let scale = values.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[end] - values[start]).abs() <= DEGENERACY_TOL * scale {
            end += 1;
        }
        canonicalize_block(&mut vectors, start, end);
        start = end;
    }
    Eigensystem { values, vectors }
}

fn canonicalize_block(vectors: &mut CMatrix, start: usize, end: usize) {
    let n = vectors.nrows();
    let size = end - start;
    let mut block: Vec<CVector> = Vec::with_capacity(size);
    if size == 1 {
        block.push(vectors.column(start).into_owned());
    } else {
        let cols = vectors.columns(start, size).into_owned();
        let projector = &cols * cols.adjoint();
        for e in 0..n {
            if block.len() == size {
                break;
            }
            let mut v: CVector = projector.column(e).into_owned();
            for b in &block {
                let overlap = b.dotc(&v);
                v -= b * overlap;
            }
            let norm = v.norm();
            if norm > 1e-6 {
                block.push(v / C64::new(norm, 0.0));
            }
        }
        // Numerically the projected basis always spans the block; fall back
        // to the solver's vectors if it somehow does not.
        if block.len() < size {
            block = (start..end).map(|k| vectors.column(k).into_owned()).collect();
        }
    }
    for v in block.iter_mut() {
        phase_fix(v);
    }
    block.sort_by(lexicographic);
    for (k, v) in block.into_iter().enumerate() {
        vectors.set_column(start + k, &v);
    }
}

/// Rotates the global phase so the first nonzero component is real positive.
pub fn phase_fix(v: &mut CVector) {
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let phase = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

fn lexicographic(a: &CVector, b: &CVector) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        for (p, q) in [(x.re, y.re), (x.im, y.im)] {
            if (p - q).abs() > 1e-12 {
                // Larger components first so e_1 precedes e_2.
                return q.total_cmp(&p);
            }
        }
    }
    Ordering::Equal
}

/// f(M) = V diag(f(lambda)) V^dagger for Hermitian M.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let n = m.nrows();
    let diag = CMatrix::from_diagonal(&DVector::from_iterator(
        n,
        eig.eigenvalues.iter().map(|&l| f(l)),
    ));
    &eig.eigenvectors * diag * eig.eigenvectors.adjoint()
}

/// exp(iG) for Hermitian G; exactly unitary up to rounding.
pub fn expm_i_hermitian(g: &CMatrix) -> CMatrix {
    hermitian_function(g, |l| C64::new(l.cos(), l.sin()))
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    SymmetricEigen::new(hermitian_part(m))
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &v| acc.min(v))
}

/// `A >= B` in the Loewner order: min eigenvalue of A - B is >= -tol.
pub fn psd_order(a: &CMatrix, b: &CMatrix) -> Result<bool> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(min_eigenvalue(&(a - b)) >= -TOL)
}

/// Builds a Hermitian matrix from `n*n - 1` real parameters spanning su(n).
///
/// The first `n - 1` parameters fill a traceless diagonal; the remaining pairs
/// fill the real and imaginary parts of the strict upper triangle.
pub fn traceless_hermitian(n: usize, params: &[f64]) -> CMatrix {
    debug_assert_eq!(params.len(), n * n - 1);
    let mut g = CMatrix::zeros(n, n);
    let mut it = params.iter().copied();
    let mut sum = 0.0;
    for k in 0..n - 1 {
        let v = it.next().unwrap_or(0.0);
        g[(k, k)] = C64::new(v, 0.0);
        sum += v;
    }
    g[(n - 1, n - 1)] = C64::new(-sum, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let re = it.next().unwrap_or(0.0);
            let im = it.next().unwrap_or(0.0);
            g[(i, j)] = C64::new(re, im);
            g[(j, i)] = C64::new(re, -im);
        }
    }
    g
}
