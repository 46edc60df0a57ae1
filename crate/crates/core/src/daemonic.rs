//! Measure the ancilla, then extract from the conditional system state.

use crate::error::{Error, Result};
use crate::extraction::{optimal_utility, tilde_state, tilde_state_of, TildeHamiltonian};
use crate::optimize::{maximize_unitary, nelder_mead, NelderMeadOptions, OptimizeOptions};
use crate::quantum::linalg::{CMatrix, TOL};
use crate::quantum::state::{
    ancilla_block, bloch_basis, conditional_state, partial_trace_ancilla, BipartiteState,
    DensityMatrix, Hamiltonian, MeasurementBasis, Unitary, ZERO_PROBABILITY,
};
use crate::utility::{UtilityFunction, LINEAR_RATE_CUTOFF};

/// Largest ancilla dimension accepted by `optimize_measurement`.
pub const MAX_ANCILLA_DIM: usize = 4;

/// Polar-angle points of the qubit seeding grid, both poles included.
pub const THETA_GRID: usize = 32;
/// Azimuthal points of the qubit seeding grid over [0, 2 pi).
pub const PHI_GRID: usize = 64;
/// Best grid cells refined by the simplex search.
const REFINED_CELLS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub probability: f64,
    /// Optimal conditional value; zero for outcomes below `ZERO_PROBABILITY`.
    pub value: f64,
    pub unitary: Unitary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DaemonicResult {
    pub basis: MeasurementBasis,
    pub outcomes: Vec<Outcome>,
    /// sum_a p_a U(rho_(S|a)).
    pub total: f64,
    /// U(rho_S).
    pub baseline: f64,
    pub gain: f64,
}

fn check_dims(rho: &BipartiteState, h: &Hamiltonian) -> Result<()> {
    h.require_dim(rho.d_s())
}

/// sum_a p_a U(rho_(S|a)) for the basis given by the columns of `vectors`.
fn conditional_total(
    rho: &BipartiteState,
    vectors: &CMatrix,
    h: &Hamiltonian,
    u: &UtilityFunction,
    q: f64,
    opts: &OptimizeOptions,
) -> Result<f64> {
    let mut total = 0.0;
    for a in 0..rho.d_a() {
        let block = ancilla_block(rho, &vectors.column(a).into_owned());
        let p = block.trace().re;
        if p < ZERO_PROBABILITY {
            continue;
        }
        let state = DensityMatrix::from_matrix_unchecked(block.unscale(p));
        total += p * optimal_utility(&state, h, u, q, opts)?.value;
    }
    Ok(total)
}

/// Daemonic value for a fixed ancilla basis.
pub fn daemonic_value(
    rho: &BipartiteState,
    basis: &MeasurementBasis,
    h: &Hamiltonian,
    u: &UtilityFunction,
    q: f64,
    opts: &OptimizeOptions,
) -> Result<DaemonicResult> {
    check_dims(rho, h)?;
    let baseline = optimal_utility(&partial_trace_ancilla(rho), h, u, q, opts)?.value;
    let mut outcomes = Vec::with_capacity(rho.d_a());
    let mut total = 0.0;
    for a in 0..rho.d_a() {
        match conditional_state(rho, basis, a) {
            Ok(cond) => {
                let opt = optimal_utility(&cond.state, h, u, q, opts)?;
                total += cond.probability * opt.value;
                outcomes.push(Outcome {
                    probability: cond.probability,
                    value: opt.value,
                    unitary: opt.unitary,
                });
            }
            Err(Error::ZeroProbabilityOutcome { probability, .. }) => outcomes.push(Outcome {
                probability,
                value: 0.0,
                unitary: Unitary::identity(rho.d_s()),
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(DaemonicResult {
        basis: basis.clone(),
        outcomes,
        total,
        baseline,
        gain: total - baseline,
    })
}

/// Best ancilla basis found by multistart search.
///
/// Qubit ancillas scan a `THETA_GRID x PHI_GRID` Bloch grid (which contains
/// the computational basis) and refine the best cells in (theta, phi). Larger
/// ancillas use the unitary optimizer with the identity as first start.
pub fn optimize_measurement(
    rho: &BipartiteState,
    h: &Hamiltonian,
    u: &UtilityFunction,
    q: f64,
    opts: &OptimizeOptions,
) -> Result<DaemonicResult> {
    check_dims(rho, h)?;
    let d_a = rho.d_a();
    if d_a > MAX_ANCILLA_DIM {
        return Err(Error::DimensionTooLarge {
            dim: d_a,
            max: MAX_ANCILLA_DIM,
        });
    }
    // Validates q and the utility once so the objectives below cannot fail.
    conditional_total(rho, &CMatrix::identity(d_a, d_a), h, u, q, opts)?;
    let objective =
        |v: &CMatrix| conditional_total(rho, v, h, u, q, opts).unwrap_or(f64::NEG_INFINITY);

    let best = match d_a {
        1 => CMatrix::identity(1, 1),
        2 => best_bloch_basis(&objective),
        _ => maximize_unitary(d_a, objective, &[CMatrix::identity(d_a, d_a)], opts).unitary,
    };
    daemonic_value(rho, &MeasurementBasis::from_unitary_unchecked(best), h, u, q, opts)
}

fn best_bloch_basis<F: Fn(&CMatrix) -> f64>(objective: &F) -> CMatrix {
    let angles = |i: usize, j: usize| {
        (
            std::f64::consts::PI * i as f64 / (THETA_GRID - 1) as f64,
            std::f64::consts::TAU * j as f64 / PHI_GRID as f64,
        )
    };
    let mut cells: Vec<(f64, f64, f64)> = Vec::with_capacity(THETA_GRID * PHI_GRID);
    for i in 0..THETA_GRID {
        for j in 0..PHI_GRID {
            let (t, p) = angles(i, j);
            cells.push((objective(&bloch_basis(t, p)), t, p));
        }
    }
    // Stable sort keeps grid order among ties, so the poles win degenerate cases.
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let local = NelderMeadOptions {
        initial_step: 0.05,
        ..NelderMeadOptions::default()
    };
    let (mut best_value, mut best_t, mut best_p) = cells[0];
    for &(_, t0, p0) in cells.iter().take(REFINED_CELLS) {
        let m = nelder_mead(|x| -objective(&bloch_basis(x[0], x[1])), &[t0, p0], &local);
        if -m.value > best_value {
            best_value = -m.value;
            best_t = m.x[0];
            best_p = m.x[1];
        }
    }
    bloch_basis(best_t, best_p)
}

/// Maximum daemonic gain; rounding below zero within `TOL` is clipped.
pub fn gain_utility(
    rho: &BipartiteState,
    h: &Hamiltonian,
    u: &UtilityFunction,
    q: f64,
    opts: &OptimizeOptions,
) -> Result<f64> {
    let g = optimize_measurement(rho, h, u, q, opts)?.gain;
    Ok(if g < 0.0 && g > -TOL { 0.0 } else { g })
}

/// Daemonic ergotropy gain.
pub fn gain_ergotropy(rho: &BipartiteState, h: &Hamiltonian, opts: &OptimizeOptions) -> Result<f64> {
    gain_utility(rho, h, &UtilityFunction::linear(), 0.5, opts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainTerm {
    pub probability: f64,
    /// Ergotropy of the tilde conditional state under the tilde Hamiltonian.
    pub tilde_ergotropy: f64,
}

/// Per-outcome terms whose probability-weighted sum is the exponential-utility
/// gain for `basis`.
pub fn lemma1_decomposition(
    rho: &BipartiteState,
    basis: &MeasurementBasis,
    h: &Hamiltonian,
    r: f64,
    q: f64,
) -> Result<Vec<GainTerm>> {
    check_dims(rho, h)?;
    if r.abs() < LINEAR_RATE_CUTOFF {
        return Err(Error::OutOfRange {
            name: "r",
            value: r,
            range: "r != 0",
        });
    }
    let global = tilde_state(&partial_trace_ancilla(rho), h, r, q)?;
    let tilde_h = TildeHamiltonian::new(h, &global)?;
    let mut terms = Vec::with_capacity(rho.d_a());
    for a in 0..rho.d_a() {
        match conditional_state(rho, basis, a) {
            Ok(cond) => {
                let t = tilde_state_of(cond.state.matrix(), h, r, q)?;
                terms.push(GainTerm {
                    probability: cond.probability,
                    tilde_ergotropy: tilde_h.ergotropy(t.matrix()),
                });
            }
            Err(Error::ZeroProbabilityOutcome { probability, .. }) => terms.push(GainTerm {
                probability,
                tilde_ergotropy: 0.0,
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(terms)
}
