//! Seeded sampling of density matrices and unitaries.
//!
//! Every sampler has a `*_with` form that draws from a caller-supplied RNG and
//! a seeded form that derives its stream from `(seed, 0)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::quantum::linalg::{CMatrix, C64};
use crate::quantum::state::{BipartiteState, DensityMatrix, Unitary};

/// Independent RNG stream for `(seed, index)`.
pub fn rng_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Matrix of independent standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

/// Hilbert-Schmidt induced measure: `G G^dagger / Tr[G G^dagger]`, G dim x rank.
pub fn random_density_with<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    assert!(rank >= 1 && rank <= dim, "rank must be in 1..=dim");
    let g = ginibre(dim, rank, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_matrix_unchecked(m.unscale(tr))
}

pub fn random_density(dim: usize, rank: usize, seed: u64) -> DensityMatrix {
    random_density_with(dim, rank, &mut rng_stream(seed, 0))
}

/// Haar unitary from the QR decomposition of a Ginibre matrix, with the
/// diagonal of R rotated to be real positive.
pub fn random_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Unitary {
    let g = ginibre(dim, dim, rng);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    Unitary::from_matrix_unchecked(q)
}

pub fn random_unitary(dim: usize, seed: u64) -> Unitary {
    random_unitary_with(dim, &mut rng_stream(seed, 0))
}

pub fn random_bipartite_with<R: Rng + ?Sized>(d_s: usize, d_a: usize, rng: &mut R) -> BipartiteState {
    let n = d_s * d_a;
    let rho = random_density_with(n, n, rng);
    BipartiteState::from_matrix_unchecked(d_s, d_a, rho.into_matrix())
}

pub fn random_bipartite(d_s: usize, d_a: usize, seed: u64) -> BipartiteState {
    random_bipartite_with(d_s, d_a, &mut rng_stream(seed, 0))
}

/// Random Hermitian matrix with Gaussian entries (GUE-like, unnormalized).
pub fn random_hermitian_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(dim, dim, rng);
    (&g + g.adjoint()).scale(0.5)
}
