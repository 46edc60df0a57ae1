//! Two-qubit correlation measures and classifiers.

use crate::error::{Error, Result};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::quantum::linalg::{c, eigh, hermitian_function, kron, min_eigenvalue, CMatrix, CVector, SortOrder, C64, TOL};
use crate::quantum::state::{
    ancilla_block, bloch_basis, partial_trace_ancilla, partial_trace_system, system_block, BipartiteState,
};

/// Largest joint dimension for which PPT decides separability.
pub const MAX_PPT_DIM: usize = 6;

/// (theta, phi) grid used by the classical-quantum search.
const CQ_GRID: (usize, usize) = (64, 128);
/// (theta, phi) grid used by the discord search.
const DISCORD_GRID: (usize, usize) = (32, 64);
const REFINED_CELLS: usize = 4;

fn require_two_qubit(rho: &BipartiteState) -> Result<()> {
    if rho.d_s() != 2 || rho.d_a() != 2 {
        return Err(Error::NotTwoQubit {
            d_s: rho.d_s(),
            d_a: rho.d_a(),
        });
    }
    Ok(())
}

fn sigma_y_sigma_y() -> CMatrix {
    let sy = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
    kron(&sy, &sy)
}

/// Wootters concurrence.
///
/// Uses the Hermitian form `sqrt(rho) rho_flip sqrt(rho)`, which has the same
/// spectrum as `rho rho_flip`.
pub fn concurrence(rho: &BipartiteState) -> Result<f64> {
    require_two_qubit(rho)?;
    let yy = sigma_y_sigma_y();
    let flipped = &yy * rho.matrix().conjugate() * &yy;
    let root = hermitian_function(rho.matrix(), |l| C64::new(l.max(0.0).sqrt(), 0.0));
    let m = &root * flipped * &root;
    let l: Vec<f64> = eigh(&m, SortOrder::Descending)
        .values
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

/// Partial transpose over the ancilla.
pub fn partial_transpose(rho: &BipartiteState) -> CMatrix {
    let (ds, da) = (rho.d_s(), rho.d_a());
    let m = rho.matrix();
    CMatrix::from_fn(ds * da, ds * da, |i, j| {
        let (s, a) = (i / da, i % da);
        let (t, b) = (j / da, j % da);
        m[(s * da + b, t * da + a)]
    })
}

/// PPT test, exact for joint dimension up to six.
pub fn is_separable_2x2(rho: &BipartiteState) -> Result<bool> {
    let dim = rho.d_s() * rho.d_a();
    if dim > MAX_PPT_DIM {
        return Err(Error::DimensionTooLarge {
            dim,
            max: MAX_PPT_DIM,
        });
    }
    Ok(min_eigenvalue(&partial_transpose(rho)) >= -TOL)
}

/// Frobenius norm of the cross block `<n|_S rho |n_perp>_S`, times sqrt(2):
/// the distance between rho and its S-dephasing in the basis `(n, n_perp)`.
fn dephasing_residual(rho: &BipartiteState, basis: &CMatrix) -> f64 {
    let (ds, da) = (rho.d_s(), rho.d_a());
    let (n, m) = (basis.column(0), basis.column(1));
    let mat = rho.matrix();
    let mut acc = 0.0;
    for a in 0..da {
        for b in 0..da {
            let mut z = C64::new(0.0, 0.0);
            for s in 0..ds {
                for t in 0..ds {
                    z += n[s].conj() * mat[(s * da + a, t * da + b)] * m[t];
                }
            }
            acc += z.norm_sqr();
        }
    }
    (2.0 * acc).sqrt()
}

/// Maximizes `f(theta, phi)` by a Bloch grid followed by simplex refinement.
/// Returns the best value and angles.
fn bloch_search<F: Fn(f64, f64) -> f64>(f: F, grid: (usize, usize)) -> (f64, f64, f64) {
    let (nt, np) = grid;
    let mut cells = Vec::with_capacity(nt * np);
    for i in 0..nt {
        let t = std::f64::consts::PI * i as f64 / (nt - 1) as f64;
        for j in 0..np {
            let p = std::f64::consts::TAU * j as f64 / np as f64;
            cells.push((f(t, p), t, p));
        }
    }
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let local = NelderMeadOptions {
        initial_step: 0.5 * std::f64::consts::PI / (nt - 1) as f64,
        ..NelderMeadOptions::default()
    };
    let mut best = cells[0];
    for &(_, t0, p0) in cells.iter().take(REFINED_CELLS) {
        let m = nelder_mead(|x| -f(x[0], x[1]), &[t0, p0], &local);
        if -m.value > best.0 {
            best = (-m.value, m.x[0], m.x[1]);
        }
    }
    best
}

/// Smallest distance from rho to its dephasing in some rank-one S basis.
pub fn classical_quantum_residual(rho: &BipartiteState) -> Result<f64> {
    if rho.d_s() != 2 {
        return Err(Error::NotImplementedDimension { dim: rho.d_s() });
    }
    // The squared residual is smooth at its zeros, which suits the simplex.
    let (best, _, _) = bloch_search(
        |t, p| -dephasing_residual(rho, &bloch_basis(t, p)).powi(2),
        CQ_GRID,
    );
    Ok((-best).max(0.0).sqrt())
}

/// Invariant under some S-side rank-one dephasing, within `tol`.
pub fn is_classical_quantum(rho: &BipartiteState, tol: f64) -> Result<bool> {
    Ok(classical_quantum_residual(rho)? <= tol)
}

/// -x log2 x - (1 - x) log2 (1 - x).
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange {
            name: "x",
            value: x,
            range: "[0, 1]",
        });
    }
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    Ok(term(x) + term(1.0 - x))
}

/// Preimage of `y` under the binary entropy on [0, 1/2], by bisection.
pub fn binary_entropy_inverse(y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::OutOfRange {
            name: "y",
            value: y,
            range: "[0, 1]",
        });
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if binary_entropy(mid)? < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if (binary_entropy(hi)? - y).abs() < (binary_entropy(lo)? - y).abs() { hi } else { lo })
}

/// Lower bound `2 - 2 x` on the two-qubit ergotropy gain (gap units), with
/// `x` the preimage of the discord under the binary entropy on [1/2, 1].
pub fn ergotropy_gain_bound(discord: f64) -> Result<f64> {
    let upper = 1.0 - binary_entropy_inverse(discord.clamp(0.0, 1.0))?;
    Ok(2.0 - 2.0 * upper)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(m: &CMatrix) -> f64 {
    eigh(m, SortOrder::Descending)
        .values
        .iter()
        .filter(|&&v| v > 1e-15)
        .map(|v| -v * v.log2())
        .sum()
}

/// Which subsystem the discord measurement acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeasuredSide {
    #[default]
    System,
    Ancilla,
}

/// sum_k p_k S(rho_(other|k)) for the measured basis `(n, n_perp)`.
fn conditional_entropy(rho: &BipartiteState, side: MeasuredSide, basis: &CMatrix) -> f64 {
    let mut acc = 0.0;
    for k in 0..2 {
        let v: CVector = basis.column(k).into_owned();
        let block = match side {
            MeasuredSide::System => system_block(rho, &v),
            MeasuredSide::Ancilla => ancilla_block(rho, &v),
        };
        let p = block.trace().re;
        if p > 1e-14 {
            acc += p * von_neumann_entropy(&block.unscale(p));
        }
    }
    acc
}

/// Projective discord with the measurement on `side`.
pub fn discord(rho: &BipartiteState, side: MeasuredSide) -> Result<f64> {
    discord_with_grid(rho, side, DISCORD_GRID)
}

/// Discord with an explicit (theta, phi) search grid.
pub fn discord_with_grid(rho: &BipartiteState, side: MeasuredSide, grid: (usize, usize)) -> Result<f64> {
    require_two_qubit(rho)?;
    let s_s = von_neumann_entropy(partial_trace_ancilla(rho).matrix());
    let s_a = von_neumann_entropy(partial_trace_system(rho).matrix());
    let s_joint = von_neumann_entropy(rho.matrix());
    let unmeasured = match side {
        MeasuredSide::System => s_a,
        MeasuredSide::Ancilla => s_s,
    };
    let (neg_min, _, _) = bloch_search(|t, p| -conditional_entropy(rho, side, &bloch_basis(t, p)), grid);
    let mutual = s_s + s_a - s_joint;
    let classical = unmeasured + neg_min;
    let d = mutual - classical;
    Ok(if d < 0.0 && d > -TOL { 0.0 } else { d })
}

/// Discord with projective measurements on S.
pub fn discord_as(rho: &BipartiteState) -> Result<f64> {
    discord(rho, MeasuredSide::System)
}
