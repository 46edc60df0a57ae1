//! Optimal work extraction from a single system.
//!
//! Linear utilities reduce to ergotropy, exponential utilities to the
//! eigensystem of the tilde state, and qubits to the root of a quadratic in
//! the (X, Y, Z) moments. Everything else goes through the unitary optimizer.

use crate::error::{Error, Result};
use crate::optimize::{maximize_unitary, OptimizeOptions};
use crate::quantum::linalg::{eigh, CMatrix, Eigensystem, SortOrder, C64, OPT_TOL, TOL};
use crate::quantum::random::{random_density_with, rng_stream};
use crate::quantum::state::{dephase_energy, DensityMatrix, Hamiltonian, Unitary};
use crate::quasiprob::UtilityKernel;
use crate::utility::{xyz_moments, Utility, UtilityFamily, UtilityFunction, LINEAR_RATE_CUTOFF};

/// Largest system dimension accepted by the numerical optimizer.
pub const MAX_NUMERIC_DIM: usize = 8;

/// How an optimal value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ergotropy,
    ExponentialClosedForm,
    QubitClosedForm,
    Numeric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub value: f64,
    pub unitary: Unitary,
    pub method: Method,
    /// False only for numeric results that exhausted the evaluation budget.
    pub converged: bool,
}

impl Optimum {
    fn exact(value: f64, unitary: Unitary, method: Method) -> Self {
        Self {
            value,
            unitary,
            method,
            converged: true,
        }
    }
}

fn check_q(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::OutOfRange {
            name: "q",
            value: q,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// W = E(rho) - E(U rho U^dagger).
pub fn average_work(rho: &DensityMatrix, u: &Unitary, h: &Hamiltonian) -> Result<f64> {
    h.require_dim(rho.dim())?;
    h.require_dim(u.dim())?;
    Ok(h.mean_energy(rho.matrix()) - h.mean_energy(&u.evolve(rho.matrix())))
}

/// Maps the k-th column of `from` onto the k-th energy eigenvector.
fn unitary_onto_energy(h: &Hamiltonian, from: &CMatrix) -> Unitary {
    Unitary::from_matrix_unchecked(h.basis() * from.adjoint())
}

/// Ergotropy and the unitary `sum_k |e_k><r_k|` attaining it.
pub fn ergotropy(rho: &DensityMatrix, h: &Hamiltonian) -> Result<Optimum> {
    h.require_dim(rho.dim())?;
    let spectrum = rho.spectrum();
    let passive: f64 = spectrum
        .values
        .iter()
        .zip(h.energies())
        .map(|(r, e)| r * e)
        .sum();
    let value = (h.mean_energy(rho.matrix()) - passive).max(0.0);
    Ok(Optimum::exact(
        value,
        unitary_onto_energy(h, &spectrum.vectors),
        Method::Ergotropy,
    ))
}

/// Commutes with H and has non-increasing populations in energy order.
pub fn is_passive(rho: &DensityMatrix, h: &Hamiltonian) -> Result<bool> {
    h.require_dim(rho.dim())?;
    let r = h.to_energy_basis(rho.matrix());
    let n = h.dim();
    // In the energy basis [rho, H]_ij = rho_ij (e_j - e_i).
    let mut commutator = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            commutator += (r[(i, j)].norm() * (h.energies()[j] - h.energies()[i])).powi(2);
        }
    }
    if commutator.sqrt() >= TOL {
        return Ok(false);
    }
    Ok((1..n).all(|k| r[(k, k)].re <= r[(k - 1, k - 1)].re + TOL))
}

/// `exp(-r a e_i - r b e_j)`, the element-wise tilde weight.
fn tilde_weight(h: &Hamiltonian, r: f64, q: f64, i: usize, j: usize) -> f64 {
    let e = h.energies();
    0.5 * ((-r * q * e[i] - r * (1.0 - q) * e[j]).exp()
        + (-r * (1.0 - q) * e[i] - r * q * e[j]).exp())
}

/// Applies the tilde map to any operator; the result is in the original basis.
pub fn tilde_operator(m: &CMatrix, h: &Hamiltonian, r: f64, q: f64) -> Result<CMatrix> {
    check_q(q)?;
    h.require_dim(m.nrows())?;
    let mut t = h.to_energy_basis(m);
    let n = h.dim();
    for i in 0..n {
        for j in 0..n {
            t[(i, j)] *= tilde_weight(h, r, q, i, j);
        }
    }
    Ok(h.from_energy_basis(&t))
}

/// Non-normalized tilde state with its descending eigensystem.
///
/// Positive semidefinite for q = 1/2; other q can produce small negative
/// eigenvalues, which the closed forms tolerate.
#[derive(Debug, Clone, PartialEq)]
pub struct TildeState {
    matrix: CMatrix,
    r: f64,
    q: f64,
    eigen: Eigensystem,
}

impl TildeState {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Eigenvalues `u_k`, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        self.eigen.values.as_slice()
    }

    /// Eigenvectors `|u_k>` as columns, in the order of `eigenvalues`.
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigen.vectors
    }

    pub fn trace(&self) -> f64 {
        self.eigen.values.iter().sum()
    }
}

pub fn tilde_state(rho: &DensityMatrix, h: &Hamiltonian, r: f64, q: f64) -> Result<TildeState> {
    tilde_state_of(rho.matrix(), h, r, q)
}

/// Tilde state of a possibly unnormalized operator.
pub fn tilde_state_of(m: &CMatrix, h: &Hamiltonian, r: f64, q: f64) -> Result<TildeState> {
    let matrix = tilde_operator(m, h, r, q)?;
    let eigen = eigh(&matrix, SortOrder::Descending);
    Ok(TildeState {
        matrix,
        r,
        q,
        eigen,
    })
}

/// Solves `tilde(rho) = rho_tilde` for rho, element-wise in the energy basis.
///
/// Returns a raw operator because the preimage of an arbitrary PSD matrix is
/// PSD but generally not unit-trace.
pub fn inverse_tilde(rho_tilde: &CMatrix, h: &Hamiltonian, r: f64, q: f64) -> Result<CMatrix> {
    check_q(q)?;
    h.require_dim(rho_tilde.nrows())?;
    let mut m = h.to_energy_basis(rho_tilde);
    let n = h.dim();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] /= tilde_weight(h, r, q, i, j);
        }
    }
    Ok(h.from_energy_basis(&m))
}

/// Energies `y_k = e^{r e_k} / r` (ascending) on the tilde eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct TildeHamiltonian {
    energies: Vec<f64>,
    basis: CMatrix,
}

impl TildeHamiltonian {
    pub fn new(h: &Hamiltonian, tilde: &TildeState) -> Result<Self> {
        let r = tilde.r();
        if r.abs() < LINEAR_RATE_CUTOFF {
            return Err(Error::OutOfRange {
                name: "r",
                value: r,
                range: "r != 0",
            });
        }
        Ok(Self {
            energies: h.energies().iter().map(|e| (r * e).exp() / r).collect(),
            basis: tilde.eigenvectors().clone(),
        })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// The vectors `|u_k>` as columns.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn matrix(&self) -> CMatrix {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.energies.len(),
            self.energies.iter().map(|&y| C64::new(y, 0.0)),
        ));
        &self.basis * d * self.basis.adjoint()
    }

    /// Ergotropy of an unnormalized operator with respect to this Hamiltonian.
    pub fn ergotropy(&self, m: &CMatrix) -> f64 {
        let mean = crate::quantum::linalg::trace_product(&self.matrix(), m).re;
        let spectrum = eigh(m, SortOrder::Descending);
        let passive: f64 = spectrum
            .values
            .iter()
            .zip(&self.energies)
            .map(|(v, y)| v * y)
            .sum();
        mean - passive
    }
}

/// Closed form for the exponential utility with rate r.
pub fn optimal_utility_exponential(
    rho: &DensityMatrix,
    h: &Hamiltonian,
    r: f64,
    q: f64,
) -> Result<Optimum> {
    check_q(q)?;
    if r.abs() < LINEAR_RATE_CUTOFF {
        return ergotropy(rho, h);
    }
    let tilde = tilde_state(rho, h, r, q)?;
    let weighted: f64 = tilde
        .eigenvalues()
        .iter()
        .zip(h.energies())
        .map(|(u, e)| u * (r * e).exp())
        .sum();
    Ok(Optimum::exact(
        (1.0 - weighted) / r,
        unitary_onto_energy(h, tilde.eigenvectors()),
        Method::ExponentialClosedForm,
    ))
}

/// Energy-basis population `p = <e_1|rho|e_1>` and coherence `c = <e_1|rho|e_2>`.
pub fn qubit_parameters(rho: &DensityMatrix, h: &Hamiltonian) -> Result<(f64, C64)> {
    if rho.dim() != 2 {
        return Err(Error::NotQubit { dim: rho.dim() });
    }
    h.require_dim(2)?;
    let m = h.to_energy_basis(rho.matrix());
    Ok((m[(0, 0)].re, m[(0, 1)]))
}

/// Largest root of `lambda^2 - D lambda - m^2 = 0` with D = X - pY, m = |c||Z|.
pub fn qubit_lambda(d: f64, m: f64) -> f64 {
    let half = 0.5 * d;
    half + (half * half + m * m).sqrt()
}

/// Closed-form optimum for d = 2 and any utility.
pub fn optimal_utility_qubit<U: Utility + ?Sized>(
    rho: &DensityMatrix,
    h: &Hamiltonian,
    u: &U,
    q: f64,
) -> Result<Optimum> {
    check_q(q)?;
    let (p, c) = qubit_parameters(rho, h)?;
    let e = h.energies();
    let xyz = xyz_moments(u, e[0], e[1], q);
    let d = xyz.x - p * xyz.y;
    let m = c.norm() * xyz.z.abs();
    let lambda = qubit_lambda(d, m);
    if lambda <= 0.0 {
        return Ok(Optimum::exact(0.0, Unitary::identity(2), Method::QubitClosedForm));
    }
    // Top eigenvector (m, lambda) of [[0, m], [m, D]] gives |alpha|, |beta|.
    let b = 1.0 / (1.0 + (m / lambda).powi(2)).sqrt();
    let a = m * b / lambda;
    let z_phase = if xyz.z < 0.0 { std::f64::consts::PI } else { 0.0 };
    let phi = std::f64::consts::PI - c.arg() - z_phase;
    let alpha = C64::new(a, 0.0);
    let beta = C64::from_polar(b, phi);
    let v = CMatrix::from_row_slice(2, 2, &[alpha, -beta.conj(), beta, alpha.conj()]);
    Ok(Optimum::exact(
        lambda,
        Unitary::from_matrix_unchecked(h.from_energy_basis(&v)),
        Method::QubitClosedForm,
    ))
}

/// Multistart maximization of the expected utility over U(d).
///
/// Identity and the ergotropy unitary are always among the starts, so the
/// result is never below the value at either.
pub fn optimal_utility_numeric<U: Utility + ?Sized>(
    rho: &DensityMatrix,
    h: &Hamiltonian,
    u: &U,
    q: f64,
    opts: &OptimizeOptions,
) -> Result<Optimum> {
    let n = rho.dim();
    if n > MAX_NUMERIC_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n,
            max: MAX_NUMERIC_DIM,
        });
    }
    let kernel = UtilityKernel::new(rho, h, u, q)?;
    let erg = ergotropy(rho, h)?;
    let seeds = [
        CMatrix::identity(n, n),
        h.to_energy_basis(erg.unitary.matrix()),
    ];
    let best = maximize_unitary(n, |v| kernel.evaluate_energy_basis(v), &seeds, opts);
    Ok(Optimum {
        value: best.value,
        unitary: Unitary::from_matrix_unchecked(h.from_energy_basis(&best.unitary)),
        method: Method::Numeric,
        converged: best.converged,
    })
}

/// Picks the cheapest exact route: ergotropy, exponential or qubit closed
/// form, then the numerical optimizer.
pub fn optimal_utility(
    rho: &DensityMatrix,
    h: &Hamiltonian,
    u: &UtilityFunction,
    q: f64,
    opts: &OptimizeOptions,
) -> Result<Optimum> {
    check_q(q)?;
    match u.family() {
        UtilityFamily::Linear => ergotropy(rho, h),
        UtilityFamily::Exponential { r } => optimal_utility_exponential(rho, h, r, q),
        _ if rho.dim() == 2 => optimal_utility_qubit(rho, h, u, q),
        _ => optimal_utility_numeric(rho, h, u, q, opts),
    }
}

/// Series of the qubit optimum in powers of m^2 = |c|^2 Z^2, through m^4.
///
/// The truncation error is O(m^6 / |X - pY|^5).
pub fn small_z_expansion(x: f64, y: f64, p: f64, c_abs: f64, z: f64) -> Result<f64> {
    let d = x - p * y;
    if d.abs() < TOL {
        return Err(Error::DegenerateDenominator { value: d });
    }
    let m2 = (c_abs * z).powi(2);
    let ad = d.abs();
    Ok(0.5 * (d + ad) + m2 / ad - m2 * m2 / ad.powi(3))
}

/// U(rho) - U(Delta(rho)) with Delta the energy dephasing.
pub fn coherent_contribution(
    rho: &DensityMatrix,
    h: &Hamiltonian,
    u: &UtilityFunction,
    q: f64,
    opts: &OptimizeOptions,
) -> Result<f64> {
    let full = optimal_utility(rho, h, u, q, opts)?.value;
    let dephased = optimal_utility(&dephase_energy(rho, h)?, h, u, q, opts)?.value;
    Ok(full - dephased)
}

/// Sampled necessary condition for an incoherent utility in any dimension:
/// the coherent contribution vanishes on `samples` random states.
pub fn sampled_incoherence_check(
    h: &Hamiltonian,
    u: &UtilityFunction,
    q: f64,
    samples: usize,
    seed: u64,
    opts: &OptimizeOptions,
) -> Result<bool> {
    for k in 0..samples {
        let rho = random_density_with(h.dim(), h.dim(), &mut rng_stream(seed, k as u64));
        if coherent_contribution(&rho, h, u, q, opts)?.abs() > OPT_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::{c, max_abs, CVector};
    use crate::quantum::random::random_density;
    use crate::quasiprob::{expected_utility, mean_work, work_quasiprob};

    fn h01() -> Hamiltonian {
        Hamiltonian::diagonal(&[0.0, 1.0]).unwrap()
    }

    fn plus() -> DensityMatrix {
        let s = 1.0 / 2f64.sqrt();
        DensityMatrix::pure(&CVector::from_vec(vec![c(s, 0.0), c(s, 0.0)])).unwrap()
    }

    fn swap() -> Unitary {
        Unitary::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ))
        .unwrap()
    }

    /// Brute-force maximum of W over a grid of SU(2) elements.
    fn grid_ergotropy(rho: &DensityMatrix, h: &Hamiltonian) -> f64 {
        let steps = 60;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=steps {
            let t = std::f64::consts::FRAC_PI_2 * i as f64 / steps as f64;
            for j in 0..steps {
                let phi = std::f64::consts::TAU * j as f64 / steps as f64;
                let (a, b) = (C64::new(t.cos(), 0.0), C64::from_polar(t.sin(), phi));
                let u = Unitary::new(CMatrix::from_row_slice(2, 2, &[a, -b.conj(), b, a.conj()]))
                    .unwrap();
                best = best.max(average_work(rho, &u, h).unwrap());
            }
        }
        best
    }

    #[test]
    fn average_work_examples() {
        let rho = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        assert_eq!(average_work(&rho, &Unitary::identity(2), &h01()).unwrap(), 0.0);
        assert!((average_work(&rho, &swap(), &h01()).unwrap() - 0.4).abs() < 1e-15);
        let w = average_work(&plus(), &swap(), &h01()).unwrap();
        let p = work_quasiprob(&plus(), &swap(), &h01(), 0.37).unwrap();
        assert!((w - mean_work(&p)).abs() < 1e-15);
    }

    #[test]
    fn ergotropy_examples() {
        let passive = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        assert_eq!(ergotropy(&passive, &h01()).unwrap().value, 0.0);

        let inverted = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let e = ergotropy(&inverted, &h01()).unwrap();
        assert!((e.value - 0.4).abs() < 1e-12);
        assert!((grid_ergotropy(&inverted, &h01()) - 0.4).abs() < 1e-9);
        assert!((average_work(&inverted, &e.unitary, &h01()).unwrap() - e.value).abs() < 1e-12);

        let e = ergotropy(&plus(), &h01()).unwrap();
        assert!((e.value - 0.5).abs() < 1e-12);
        assert!((grid_ergotropy(&plus(), &h01()) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn passivity_examples() {
        let g = 1.0 / (1.0 + std::f64::consts::E);
        let gibbs = DensityMatrix::diagonal(&[std::f64::consts::E * g, g]).unwrap();
        assert!(is_passive(&gibbs, &h01()).unwrap());
        assert!(!is_passive(&DensityMatrix::diagonal(&[0.3, 0.7]).unwrap(), &h01()).unwrap());
        assert!(!is_passive(&plus(), &h01()).unwrap());
    }

    #[test]
    fn tilde_examples() {
        let h = h01();
        let rho = random_density(2, 2, 5);
        let t = tilde_state(&rho, &h, 0.0, 0.3).unwrap();
        assert!(max_abs(&(t.matrix() - rho.matrix())) < 1e-15);

        let diag = DensityMatrix::diagonal(&[0.4, 0.6]).unwrap();
        let t = tilde_state(&diag, &h, 1.3, 0.5).unwrap();
        assert!((t.matrix()[(0, 0)].re - 0.4).abs() < 1e-15);
        assert!((t.matrix()[(1, 1)].re - 0.6 * (-1.3f64).exp()).abs() < 1e-15);

        // q = 1/2 is the symmetric sandwich.
        let half = h.function(|e| C64::new((-0.35 * e).exp(), 0.0));
        let t = tilde_state(&rho, &h, 0.7, 0.5).unwrap();
        assert!(max_abs(&(t.matrix() - &half * rho.matrix() * &half)) < 1e-14);
    }

    #[test]
    fn inverse_tilde_examples() {
        let h = Hamiltonian::diagonal(&[-0.2, 0.5, 1.4]).unwrap();
        let rho = random_density(3, 3, 11);
        let t = tilde_state(&rho, &h, 0.7, 0.3).unwrap();
        let back = inverse_tilde(t.matrix(), &h, 0.7, 0.3).unwrap();
        assert!(max_abs(&(back - rho.matrix())) < 1e-10);

        let sandwich = h.function(|e| C64::new((0.45 * e).exp(), 0.0));
        let m = random_density(3, 3, 12).into_matrix();
        let inv = inverse_tilde(&m, &h, 0.9, 0.5).unwrap();
        assert!(max_abs(&(inv - &sandwich * &m * &sandwich)) < 1e-12);
        assert!(max_abs(&(inverse_tilde(&m, &h, 0.0, 0.2).unwrap() - &m)) < 1e-15);
    }

    #[test]
    fn exponential_closed_form_examples() {
        let h = h01();
        let r = 1.0f64;
        let zr = 1.0 + r.exp();
        let gibbs_like = DensityMatrix::diagonal(&[1.0 / zr, r.exp() / zr]).unwrap();
        let v = optimal_utility_exponential(&gibbs_like, &h, r, 0.5).unwrap().value;
        assert!(v.abs() < 1e-12);

        let p = 1.0 / zr;
        let coh = 0.2;
        let m = CMatrix::from_row_slice(2, 2, &[c(p, 0.0), c(coh, 0.0), c(coh, 0.0), c(1.0 - p, 0.0)]);
        let rho = DensityMatrix::new(m).unwrap();
        let opt = optimal_utility_exponential(&rho, &h, r, 0.5).unwrap();
        let expected = 2.0 * coh / r * (0.5 * r).sinh();
        assert!((opt.value - expected).abs() < 1e-12);
        assert!((expected - 0.208438).abs() < 1e-6);
        // The returned unitary attains the value.
        let u = UtilityFunction::exponential(r);
        let attained =
            expected_utility(&work_quasiprob(&rho, &opt.unitary, &h, 0.5).unwrap(), &u);
        assert!((attained - opt.value).abs() < 1e-12);
    }

    #[test]
    fn exponential_matches_numeric() {
        let h = Hamiltonian::diagonal(&[0.0, 0.4, 1.1]).unwrap();
        for (seed, r, q) in [(1, 1.0, 0.5), (2, -1.0, 0.3), (3, 0.5, 0.0)] {
            let rho = random_density(3, 3, seed);
            let closed = optimal_utility_exponential(&rho, &h, r, q).unwrap();
            let u = UtilityFunction::exponential(r);
            let numeric = optimal_utility_numeric(&rho, &h, &u, q, &OptimizeOptions::default()).unwrap();
            assert!((closed.value - numeric.value).abs() < 1e-6, "{} vs {}", closed.value, numeric.value);
            let attained = expected_utility(&work_quasiprob(&rho, &closed.unitary, &h, q).unwrap(), &u);
            assert!((attained - closed.value).abs() < 1e-12);
        }
    }

    #[test]
    fn qubit_closed_form_examples() {
        let h = h01();
        // c = 0 leaves the leading term only.
        let u = UtilityFunction::cubic_from_xyz(0.9, 1.0, 0.7);
        let rho = DensityMatrix::diagonal(&[0.4, 0.6]).unwrap();
        let v = optimal_utility_qubit(&rho, &h, &u, 0.5).unwrap().value;
        assert!((v - 0.5).abs() < 1e-12);
        let u = UtilityFunction::cubic_from_xyz(0.2, 1.0, 0.7);
        assert_eq!(optimal_utility_qubit(&rho, &h, &u, 0.5).unwrap().value, 0.0);

        // X - pY = 0 and |c| Z = 0.3: the optimum is the root itself.
        let u = UtilityFunction::cubic_from_xyz(0.5, 1.0, 1.0);
        let m = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.3), c(0.0, -0.3), c(0.5, 0.0)]);
        let rho = DensityMatrix::new(m).unwrap();
        let closed = optimal_utility_qubit(&rho, &h, &u, 0.5).unwrap();
        assert!((closed.value - 0.3).abs() < 1e-12);
        let numeric = optimal_utility_numeric(&rho, &h, &u, 0.5, &OptimizeOptions::default()).unwrap();
        assert!((numeric.value - 0.3).abs() < 1e-9);
        let attained = expected_utility(&work_quasiprob(&rho, &closed.unitary, &h, 0.5).unwrap(), &u);
        assert!((attained - 0.3).abs() < 1e-12);

        assert!(matches!(
            optimal_utility_qubit(&random_density(3, 3, 0), &h, &u, 0.5),
            Err(Error::NotQubit { dim: 3 })
        ));
    }

    #[test]
    fn qubit_matches_numeric_for_random_cubics() {
        let h = Hamiltonian::diagonal(&[0.3, 1.3]).unwrap();
        for seed in 0..6u64 {
            let rho = random_density(2, 2, seed);
            let s = seed as f64;
            let u = UtilityFunction::cubic_from_xyz(0.3 - 0.2 * s, 0.1 * s, 0.5 - 0.15 * s);
            for q in [0.0, 0.3, 0.5] {
                let closed = optimal_utility_qubit(&rho, &h, &u, q).unwrap();
                let numeric =
                    optimal_utility_numeric(&rho, &h, &u, q, &OptimizeOptions::default()).unwrap();
                assert!((closed.value - numeric.value).abs() < 1e-6);
                let attained =
                    expected_utility(&work_quasiprob(&rho, &closed.unitary, &h, q).unwrap(), &u);
                assert!((attained - closed.value).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn linear_numeric_is_ergotropy() {
        let h = Hamiltonian::diagonal(&[0.0, 0.5, 2.0]).unwrap();
        let rho = random_density(3, 2, 9);
        let u = UtilityFunction::linear();
        let numeric = optimal_utility_numeric(&rho, &h, &u, 0.5, &OptimizeOptions::default()).unwrap();
        assert!((numeric.value - ergotropy(&rho, &h).unwrap().value).abs() < 1e-6);
    }

    #[test]
    fn small_z_examples() {
        assert_eq!(small_z_expansion(0.9, 1.0, 0.4, 0.3, 0.0).unwrap(), 0.5);
        assert_eq!(small_z_expansion(0.2, 1.0, 0.4, 0.0, 0.8).unwrap(), 0.0);
        let v = small_z_expansion(-0.5, 0.0, 0.3, 0.05, 1.0).unwrap();
        let exact = qubit_lambda(-0.5, 0.05);
        assert!((v - 0.0049500).abs() < 1e-12);
        // Next term of the series is 2 m^6 / |D|^5.
        let bound = 2.0 * 0.05f64.powi(6) / 0.5f64.powi(5);
        assert!((v - exact).abs() <= 1.01 * bound, "{}", (v - exact).abs());
        for (d, m) in [(0.8, 0.05), (-0.3, 0.02), (1.5, 0.2)] {
            let err = (small_z_expansion(d, 0.0, 0.0, m, 1.0).unwrap() - qubit_lambda(d, m)).abs();
            assert!(err <= 2.5 * m.powi(6) / f64::abs(d).powi(5), "{d} {m} {err}");
        }
        assert!(matches!(
            small_z_expansion(0.5, 1.0, 0.5, 0.1, 0.1),
            Err(Error::DegenerateDenominator { .. })
        ));
    }

    #[test]
    fn coherent_contribution_examples() {
        let h = h01();
        let opts = OptimizeOptions::default();
        let lin = UtilityFunction::linear();
        let diag = DensityMatrix::diagonal(&[0.2, 0.8]).unwrap();
        assert_eq!(coherent_contribution(&diag, &h, &lin, 0.5, &opts).unwrap(), 0.0);
        assert!((coherent_contribution(&plus(), &h, &lin, 0.5, &opts).unwrap() - 0.5).abs() < 1e-12);
        let quadratic = UtilityFunction::polynomial(vec![0.0, -1.0]);
        for seed in 0..5 {
            let rho = random_density(2, 2, seed);
            assert!(coherent_contribution(&rho, &h, &quadratic, 0.5, &opts).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_incoherence() {
        let h = Hamiltonian::diagonal(&[0.0, 1.0, 2.0]).unwrap();
        let opts = OptimizeOptions {
            starts: 4,
            ..OptimizeOptions::default()
        };
        let lin = UtilityFunction::linear();
        assert!(!sampled_incoherence_check(&h, &lin, 0.5, 2, 0, &opts).unwrap());
    }
}
