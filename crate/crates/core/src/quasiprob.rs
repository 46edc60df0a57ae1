//! Work quasiprobability `p_q`, expected utilities and preference orderings.
//!
//! For a state rho, a cycle U and Hamiltonian eigenbasis `{|e_k>}` the
//! distribution has an atom at `w = q e_i + (1 - q) e_j - e_k` with weight
//! `Re[<e_i|rho|e_j> <e_j|U^dagger|e_k> <e_k|U|e_i>]`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::quantum::linalg::CMatrix;
use crate::quantum::state::{DensityMatrix, Hamiltonian, Unitary};
use crate::utility::Utility;

/// Relative width within which coincident work values are merged.
pub const MERGE_TOL: f64 = 1e-9;

/// Atoms whose merged weight is below this are dropped.
const DROP_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub work: f64,
    pub weight: f64,
}

/// Finite real distribution over work; weights sum to one, may be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkQuasiprobability {
    atoms: Vec<Atom>,
}

impl WorkQuasiprobability {
    /// Sorts, merges coincident work values within `merge_width`, and drops
    /// vanishing atoms.
    pub fn from_atoms(mut atoms: Vec<Atom>, merge_width: f64) -> Self {
        atoms.sort_by(|a, b| a.work.total_cmp(&b.work));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        // Merge against the first work value of the running cluster.
        let mut anchor = f64::NEG_INFINITY;
        for atom in atoms {
            match merged.last_mut() {
                Some(last) if atom.work - anchor <= merge_width => last.weight += atom.weight,
                _ => {
                    anchor = atom.work;
                    merged.push(atom);
                }
            }
        }
        merged.retain(|a| a.weight.abs() > DROP_TOL);
        Self { atoms: merged }
    }

    /// Point mass at `work`.
    pub fn certain(work: f64) -> Self {
        Self {
            atoms: vec![Atom { work, weight: 1.0 }],
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Writes `w,weight` rows with a header.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["w", "weight"])?;
        for a in &self.atoms {
            out.write_record([format!("{:e}", a.work), format!("{:e}", a.weight)])?;
        }
        out.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut input = csv::Reader::from_reader(reader);
        let mut atoms = Vec::new();
        for record in input.records() {
            let record = record?;
            let field = |i: usize| -> Result<f64> {
                let raw = record.get(i).unwrap_or("");
                raw.trim().parse::<f64>().map_err(|e| Error::Parse {
                    token: raw.to_string(),
                    reason: e.to_string(),
                })
            };
            atoms.push(Atom {
                work: field(0)?,
                weight: field(1)?,
            });
        }
        Ok(Self { atoms })
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

/// The quasiprobability `p_q(w, rho, U)`.
pub fn work_quasiprob(
    rho: &DensityMatrix,
    u: &Unitary,
    h: &Hamiltonian,
    q: f64,
) -> Result<WorkQuasiprobability> {
    check_q(q)?;
    h.require_dim(rho.dim())?;
    h.require_dim(u.dim())?;
    let n = h.dim();
    let e = h.energies();
    let r = h.to_energy_basis(rho.matrix());
    let v = h.to_energy_basis(u.matrix());
    let mut atoms = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let weight = (r[(i, j)] * v[(k, j)].conj() * v[(k, i)]).re;
                atoms.push(Atom {
                    work: q * e[i] + (1.0 - q) * e[j] - e[k],
                    weight,
                });
            }
        }
    }
    let width = if h.spread() > 0.0 {
        MERGE_TOL * h.spread()
    } else {
        MERGE_TOL
    };
    Ok(WorkQuasiprobability::from_atoms(atoms, width))
}

/// Average work, sum of w times weight.
pub fn mean_work(p: &WorkQuasiprobability) -> f64 {
    p.atoms.iter().map(|a| a.work * a.weight).sum()
}

/// <u(w)> = sum of u(w) times weight.
pub fn expected_utility<U: Utility + ?Sized>(p: &WorkQuasiprobability, u: &U) -> f64 {
    p.atoms.iter().map(|a| u.value(a.work) * a.weight).sum()
}

/// Total negative mass.
pub fn negativity(p: &WorkQuasiprobability) -> f64 {
    p.atoms.iter().map(|a| (-a.weight).max(0.0)).sum()
}

/// Expected-utility differences below this are indifference.
pub const PREFERENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preference {
    First,
    Second,
    Indifferent,
}

pub fn prefer<U: Utility + ?Sized>(
    first: &WorkQuasiprobability,
    second: &WorkQuasiprobability,
    u: &U,
) -> Preference {
    let delta = expected_utility(first, u) - expected_utility(second, u);
    if delta.abs() < PREFERENCE_TOL {
        Preference::Indifferent
    } else if delta > 0.0 {
        Preference::First
    } else {
        Preference::Second
    }
}

/// Set ordering `C1 > C2`: the worst element of C1 beats the worst of C2.
pub fn prefer_sets<U: Utility + ?Sized>(
    first: &[WorkQuasiprobability],
    second: &[WorkQuasiprobability],
    u: &U,
) -> Result<bool> {
    let worst = |set: &[WorkQuasiprobability]| -> Result<f64> {
        set.iter()
            .map(|p| expected_utility(p, u))
            .reduce(f64::min)
            .ok_or(Error::EmptySet)
    };
    Ok(worst(first)? > worst(second)?)
}

/// The family `{p_q : q in grid}` for one process.
pub fn representations(
    rho: &DensityMatrix,
    u: &Unitary,
    h: &Hamiltonian,
    grid: &[f64],
) -> Result<Vec<WorkQuasiprobability>> {
    grid.iter().map(|&q| work_quasiprob(rho, u, h, q)).collect()
}

/// `<u(w)>` as a function of the cycle with rho, H, u and q fixed.
///
/// The utility of every (i, j, k) atom is tabulated once, so evaluating a
/// candidate unitary costs O(d^3) without building the distribution.
#[derive(Debug, Clone)]
pub struct UtilityKernel {
    dim: usize,
    /// `rho` in the energy basis.
    rho: CMatrix,
    /// `u(q e_i + (1-q) e_j - e_k)` at index `(i * d + j) * d + k`.
    table: Vec<f64>,
}

impl UtilityKernel {
    pub fn new<U: Utility + ?Sized>(
        rho: &DensityMatrix,
        h: &Hamiltonian,
        u: &U,
        q: f64,
    ) -> Result<Self> {
        check_q(q)?;
        h.require_dim(rho.dim())?;
        let n = h.dim();
        let e = h.energies();
        let mut table = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    table.push(u.value(q * e[i] + (1.0 - q) * e[j] - e[k]));
                }
            }
        }
        Ok(Self {
            dim: n,
            rho: h.to_energy_basis(rho.matrix()),
            table,
        })
    }

    /// Expected utility for a cycle given in the energy basis.
    pub fn evaluate_energy_basis(&self, v: &CMatrix) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let rij = self.rho[(i, j)];
                if rij.norm_sqr() == 0.0 {
                    continue;
                }
                let base = (i * n + j) * n;
                for k in 0..n {
                    acc += (rij * v[(k, j)].conj() * v[(k, i)]).re * self.table[base + k];
                }
            }
        }
        acc
    }
}
