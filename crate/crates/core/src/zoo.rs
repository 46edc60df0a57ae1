//! Named bipartite state families.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::extraction::inverse_tilde;
use crate::quantum::linalg::{c, kron, min_eigenvalue, orthonormality_defect, outer, psd_order, CMatrix, CVector, TOL};
use crate::quantum::random::{random_density_with, random_unitary_with, rng_stream};
use crate::quantum::state::{BipartiteState, Hamiltonian};
use crate::utility::{parse_key_values, reject_unknown, take_key};

/// Zero-gain state `sum_k inv_tilde(|u_k><u_k|) (x) C_k`, normalized.
///
/// `vectors` holds the `|u_k>` as columns and `blocks[k]` is `C_k`; the blocks
/// must be PSD and decreasing, `C_k >= C_(k+1)`.
pub fn zero_gain_state(
    h: &Hamiltonian,
    r: f64,
    q: f64,
    vectors: &CMatrix,
    blocks: &[CMatrix],
) -> Result<BipartiteState> {
    let d_s = h.dim();
    if vectors.nrows() != d_s || vectors.ncols() != d_s {
        return Err(Error::DimensionMismatch {
            expected: d_s,
            found: vectors.ncols(),
        });
    }
    let defect = orthonormality_defect(vectors);
    if defect > TOL {
        return Err(Error::NotOrthonormal { defect });
    }
    if blocks.len() != d_s {
        return Err(Error::DimensionMismatch {
            expected: d_s,
            found: blocks.len(),
        });
    }
    let d_a = blocks[0].nrows();
    for (index, b) in blocks.iter().enumerate() {
        if b.nrows() != d_a || b.ncols() != d_a {
            return Err(Error::DimensionMismatch {
                expected: d_a,
                found: b.nrows(),
            });
        }
        if min_eigenvalue(b) < -TOL {
            return Err(Error::NotPsd { index });
        }
    }
    for (index, pair) in blocks.windows(2).enumerate() {
        if !psd_order(&pair[0], &pair[1])? {
            return Err(Error::OrderingViolated { index });
        }
    }
    let mut mat = CMatrix::zeros(d_s * d_a, d_s * d_a);
    for (k, block) in blocks.iter().enumerate() {
        let projector = outer(&vectors.column(k).into_owned());
        mat += kron(&inverse_tilde(&projector, h, r, q)?, block);
    }
    let trace = mat.trace().re;
    if trace <= 0.0 {
        return Err(Error::TraceNotOne { trace });
    }
    BipartiteState::new(d_s, d_a, mat.unscale(trace))
}

/// Decreasing PSD blocks `C_k = sum_(j >= k) D_j` from random density matrices
/// `D_j` with random weights.
pub fn random_ordered_blocks<R: Rng + ?Sized>(count: usize, d_a: usize, rng: &mut R) -> Vec<CMatrix> {
    let increments: Vec<CMatrix> = (0..count)
        .map(|_| {
            let weight: f64 = rng.random_range(0.05..1.0);
            let rank = rng.random_range(1..=d_a);
            random_density_with(d_a, rank, rng).into_matrix().scale(weight)
        })
        .collect();
    let mut blocks = vec![CMatrix::zeros(d_a, d_a); count];
    let mut acc = CMatrix::zeros(d_a, d_a);
    for k in (0..count).rev() {
        acc += &increments[k];
        blocks[k] = acc.clone();
    }
    blocks
}

/// Zero-gain state with Haar-random `|u_k>` and random ordered blocks.
pub fn random_zero_gain_state<R: Rng + ?Sized>(
    h: &Hamiltonian,
    d_a: usize,
    r: f64,
    q: f64,
    rng: &mut R,
) -> Result<BipartiteState> {
    let vectors = random_unitary_with(h.dim(), rng).matrix().clone();
    let blocks = random_ordered_blocks(h.dim(), d_a, rng);
    zero_gain_state(h, r, q, &vectors, &blocks)
}

/// The two-qubit zero-gain example with coherence `c` in the energy basis.
///
/// Built from `|+->` with `C_+ = diag(C00, C11)` and `C_- = diag(C00, 0)`,
/// where `C11 = 2 c e^{-r(e1+e2)/2}` and `C00 = 1/Z_r - C11/2`.
pub fn example_state(e1: f64, e2: f64, r: f64, coherence: f64) -> Result<BipartiteState> {
    let h = Hamiltonian::diagonal(&[e1, e2])?;
    if coherence < 0.0 {
        return Err(Error::InfeasibleCoherence {
            c: coherence,
            reason: "c must be non-negative",
        });
    }
    let zr = (r * e1).exp() + (r * e2).exp();
    let c11 = 2.0 * coherence * (-0.5 * r * (e1 + e2)).exp();
    let c00 = 1.0 / zr - 0.5 * c11;
    if c00 < -TOL {
        return Err(Error::InfeasibleCoherence {
            c: coherence,
            reason: "joint state positivity needs C00 = 1/Z_r - C11/2 >= 0",
        });
    }
    let p = (r * e1).exp() / zr;
    if coherence > (p * (1.0 - p)).sqrt() + TOL {
        return Err(Error::InfeasibleCoherence {
            c: coherence,
            reason: "reduced state positivity needs c <= sqrt(p(1-p))",
        });
    }
    let s = 1.0 / 2f64.sqrt();
    let vectors = CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]);
    let c00 = c00.max(0.0);
    let blocks = [
        CMatrix::from_row_slice(2, 2, &[c(c00, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(c11, 0.0)]),
        CMatrix::from_row_slice(2, 2, &[c(c00, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
    ];
    zero_gain_state(&h, r, 0.5, &vectors, &blocks)
}

/// `p|00><00| + (1-p)|11><11| + C/2 (|00><11| + |11><00|)`.
pub fn x_state(p: f64, concurrence: f64) -> Result<BipartiteState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    let max = 2.0 * (p * (1.0 - p)).sqrt();
    if !(0.0..=max + TOL).contains(&concurrence) {
        return Err(Error::InfeasibleConcurrence { c: concurrence, max });
    }
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = c(p, 0.0);
    m[(3, 3)] = c(1.0 - p, 0.0);
    m[(0, 3)] = c(0.5 * concurrence, 0.0);
    m[(3, 0)] = c(0.5 * concurrence, 0.0);
    Ok(BipartiteState::from_matrix_unchecked(2, 2, m))
}

/// `(|00> + |11>)/sqrt(2)`.
pub fn bell_state() -> BipartiteState {
    let s = 1.0 / 2f64.sqrt();
    let psi = CVector::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
    BipartiteState::from_matrix_unchecked(2, 2, outer(&psi))
}

/// `(1-z)/4 I + z |Phi+><Phi+|`.
pub fn werner(z: f64) -> Result<BipartiteState> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::OutOfRange {
            name: "z",
            value: z,
            range: "[0, 1]",
        });
    }
    let mixed = CMatrix::identity(4, 4).scale(0.25 * (1.0 - z));
    Ok(BipartiteState::from_matrix_unchecked(2, 2, mixed + bell_state().matrix().scale(z)))
}

/// Werner-state gain for an incoherent utility at q = 1/2, in closed form.
pub fn werner_gain_incoherent(x: f64, y: f64, z: f64) -> f64 {
    let xt = x - 0.5 * y;
    let yt = 0.5 * z * y.abs();
    0.25 * (xt + yt).abs() + 0.25 * (xt - yt).abs() - 0.5 * xt.abs()
}

/// Largest z with zero Werner gain, `2X/Y - 1`.
pub fn werner_threshold(x: f64, y: f64) -> Result<f64> {
    if y <= 0.0 {
        return Err(Error::ZeroY { y });
    }
    Ok(2.0 * x / y - 1.0)
}

/// Moments and ground population drawn for one scatter sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XyzSample {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub p: f64,
}

/// Uniform `(X, Y, Z)` on [-1, 1]^3 and p on [0, 1], redrawn jointly until
/// `X - pY <= 0`.
pub fn random_xyz_constrained_with<R: Rng + ?Sized>(rng: &mut R) -> XyzSample {
    loop {
        let x = rng.random_range(-1.0..=1.0);
        let y = rng.random_range(-1.0..=1.0);
        let z = rng.random_range(-1.0..=1.0);
        let p = rng.random_range(0.0..=1.0);
        if x - p * y <= 0.0 {
            return XyzSample { x, y, z, p };
        }
    }
}

pub fn random_xyz_constrained(seed: u64) -> XyzSample {
    random_xyz_constrained_with(&mut rng_stream(seed, 0))
}

/// Parsed state-family specification.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Werner { z: f64 },
    XState { p: f64, c: f64 },
    Example { r: f64, c: f64, e1: f64, e2: f64 },
    ZeroGain { r: f64, q: f64, seed: u64 },
}

impl StateSpec {
    /// Builds the state; zero-gain states take `h` as the system Hamiltonian.
    pub fn build(&self, h: &Hamiltonian) -> Result<BipartiteState> {
        match *self {
            Self::Werner { z } => werner(z),
            Self::XState { p, c } => x_state(p, c),
            Self::Example { r, c, e1, e2 } => example_state(e1, e2, r, c),
            Self::ZeroGain { r, q, seed } => random_zero_gain_state(h, 2, r, q, &mut rng_stream(seed, 0)),
        }
    }

    /// Hamiltonian the family is defined with, when it fixes one.
    pub fn natural_hamiltonian(&self) -> Option<Hamiltonian> {
        match *self {
            Self::Example { e1, e2, .. } => Hamiltonian::diagonal(&[e1, e2]).ok(),
            _ => None,
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Werner { z } => write!(f, "werner:z={z}"),
            Self::XState { p, c } => write!(f, "xstate:p={p},C={c}"),
            Self::Example { r, c, e1, e2 } => write!(f, "example:r={r},c={c},e1={e1},e2={e2}"),
            Self::ZeroGain { r, q, seed } => write!(f, "zerogain:r={r},q={q},seed={seed}"),
        }
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    /// `werner:z=`, `xstate:p=,C=`, `example:r=,c=,e1=,e2=`, `zerogain:r=,q=,seed=`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, body) = s.split_once(':').ok_or_else(|| Error::Parse {
            token: s.to_string(),
            reason: "expected <family>:<key>=<value>,...".into(),
        })?;
        let pairs = parse_key_values(body)?;
        match head {
            "werner" => {
                reject_unknown(&pairs, &["z"])?;
                Ok(Self::Werner {
                    z: take_key(&pairs, "z", s)?,
                })
            }
            "xstate" => {
                reject_unknown(&pairs, &["p", "C"])?;
                Ok(Self::XState {
                    p: take_key(&pairs, "p", s)?,
                    c: take_key(&pairs, "C", s)?,
                })
            }
            "example" => {
                reject_unknown(&pairs, &["r", "c", "e1", "e2"])?;
                Ok(Self::Example {
                    r: take_key(&pairs, "r", s)?,
                    c: take_key(&pairs, "c", s)?,
                    e1: take_key(&pairs, "e1", s)?,
                    e2: take_key(&pairs, "e2", s)?,
                })
            }
            "zerogain" => {
                reject_unknown(&pairs, &["r", "q", "seed"])?;
                let seed = take_key(&pairs, "seed", s)?;
                if seed < 0.0 || seed.fract() != 0.0 || seed > u64::MAX as f64 {
                    return Err(Error::Parse {
                        token: seed.to_string(),
                        reason: "seed must be a non-negative integer".into(),
                    });
                }
                Ok(Self::ZeroGain {
                    r: take_key(&pairs, "r", s)?,
                    q: take_key(&pairs, "q", s)?,
                    seed: seed as u64,
                })
            }
            _ => Err(Error::Parse {
                token: head.to_string(),
                reason: "unknown state family".into(),
            }),
        }
    }
}
