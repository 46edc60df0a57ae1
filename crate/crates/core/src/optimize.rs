//! Derivative-free local search and multistart maximization over U(d).
//!
//! Unitaries are parameterized as `exp(iG) U0` with G traceless Hermitian
//! (d^2 - 1 real parameters); the global phase never changes an objective
//! built from `U rho U^dagger`. Each local search re-centers `U0` on its best
//! point and restarts until the restart stops improving.

use crate::quantum::linalg::{expm_i_hermitian, traceless_hermitian, CMatrix};
use crate::quantum::random::{random_unitary_with, rng_stream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Objective evaluations allowed for one call, restarts included.
    pub max_evals: usize,
    /// Convergence when every vertex lies within this distance of the best.
    pub diameter_tol: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Extra restarts from the best vertex after convergence.
    pub max_restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 20_000,
            diameter_tol: 1e-9,
            initial_step: 0.3,
            max_restarts: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// False when the evaluation budget ran out before the diameter test passed.
    pub converged: bool,
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let best = &simplex[0];
    simplex[1..]
        .iter()
        .map(|v| {
            v.iter()
                .zip(best)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// One Nelder-Mead run with dimension-adaptive coefficients.
fn nelder_mead_once<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x0: &[f64],
    step: f64,
    tol: f64,
    budget: usize,
) -> Minimum {
    let n = x0.len();
    if n == 0 {
        return Minimum {
            x: Vec::new(),
            value: f(x0),
            evaluations: 1,
            converged: true,
        };
    }
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut evals = n + 1;

    let point = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> {
        c.iter().zip(w).map(|(ci, wi)| ci + t * (wi - ci)).collect()
    };

    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if diameter(&simplex) < tol {
            break;
        }
        if evals >= budget {
            return Minimum {
                x: simplex.swap_remove(0),
                value: values[0],
                evaluations: evals,
                converged: false,
            };
        }

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / nf;
            }
        }
        let worst = simplex[n].clone();
        let reflected = point(&centroid, &worst, -alpha);
        let fr = f(&reflected);
        evals += 1;

        if fr < values[0] {
            let expanded = point(&centroid, &worst, -alpha * gamma);
            let fe = f(&expanded);
            evals += 1;
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[n] {
            let p = point(&centroid, &worst, -alpha * rho);
            let v = f(&p);
            (p, v)
        } else {
            let p = point(&centroid, &worst, rho);
            let v = f(&p);
            (p, v)
        };
        evals += 1;
        if fc < values[n].min(fr) {
            simplex[n] = contracted;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            simplex[i] = point(&best, &simplex[i], sigma);
            values[i] = f(&simplex[i]);
        }
        evals += n;
    }
    Minimum {
        x: simplex.swap_remove(0),
        value: values[0],
        evaluations: evals,
        converged: true,
    }
}

/// Minimizes `f` from `x0`, restarting from the best vertex after each
/// convergence while the restart still lowers the value.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &NelderMeadOptions,
) -> Minimum {
    let mut best = nelder_mead_once(&mut f, x0, opts.initial_step, opts.diameter_tol, opts.max_evals);
    let mut step = opts.initial_step;
    for _ in 0..opts.max_restarts {
        if !best.converged || best.evaluations >= opts.max_evals {
            break;
        }
        step *= 0.1;
        let budget = opts.max_evals - best.evaluations;
        let next = nelder_mead_once(&mut f, &best.x, step.max(1e3 * opts.diameter_tol), opts.diameter_tol, budget);
        let improved = next.value < best.value - 1e-15 * best.value.abs().max(1.0);
        let evaluations = best.evaluations + next.evaluations;
        if next.value <= best.value {
            best = Minimum { evaluations, ..next };
        } else {
            best.evaluations = evaluations;
            best.converged = next.converged;
        }
        if !improved {
            break;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    /// Total starts, caller-supplied ones first, then Haar-random.
    pub starts: usize,
    /// Seed of the random starts; start k draws from stream k.
    pub seed: u64,
    pub local: NelderMeadOptions,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            starts: 16,
            seed: 0,
            local: NelderMeadOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct UnitaryMaximum {
    pub value: f64,
    pub unitary: CMatrix,
    pub evaluations: usize,
    /// False when the winning start exhausted its evaluation budget.
    pub converged: bool,
}

/// Local ascent of `f` on U(d) starting at `u0`.
pub fn refine_unitary<F: Fn(&CMatrix) -> f64>(
    dim: usize,
    f: &F,
    u0: &CMatrix,
    opts: &NelderMeadOptions,
) -> UnitaryMaximum {
    let mut center = u0.clone();
    let mut value = f(&center);
    let mut evaluations = 1;
    let mut converged = true;
    // Re-centering keeps the exponential chart close to the identity.
    for round in 0..=opts.max_restarts {
        let step = opts.initial_step * 0.1f64.powi(round as i32);
        let local = NelderMeadOptions {
            max_restarts: 0,
            initial_step: step.max(1e3 * opts.diameter_tol),
            max_evals: opts.max_evals.saturating_sub(evaluations).max(1),
            ..*opts
        };
        let base = center.clone();
        let m = nelder_mead(
            |x| -f(&(expm_i_hermitian(&traceless_hermitian(dim, x)) * &base)),
            &vec![0.0; dim * dim - 1],
            &local,
        );
        evaluations += m.evaluations;
        converged = m.converged;
        let improved = -m.value > value + 1e-15 * value.abs().max(1.0);
        if -m.value >= value {
            value = -m.value;
            center = expm_i_hermitian(&traceless_hermitian(dim, &m.x)) * &base;
        }
        if !improved || !converged || evaluations >= opts.max_evals {
            break;
        }
    }
    UnitaryMaximum {
        value,
        unitary: center,
        evaluations,
        converged,
    }
}

/// Multistart maximization of `f` over U(d).
///
/// Starts are `seeds` followed by Haar-random unitaries; the winner is the
/// first start (in index order) attaining the largest value.
pub fn maximize_unitary<F: Fn(&CMatrix) -> f64>(
    dim: usize,
    f: F,
    seeds: &[CMatrix],
    opts: &OptimizeOptions,
) -> UnitaryMaximum {
    let total = opts.starts.max(seeds.len()).max(1);
    let mut best: Option<UnitaryMaximum> = None;
    let mut evaluations = 0;
    for k in 0..total {
        let start = match seeds.get(k) {
            Some(u) => u.clone(),
            None => random_unitary_with(dim, &mut rng_stream(opts.seed, k as u64)).matrix().clone(),
        };
        let r = refine_unitary(dim, &f, &start, &opts.local);
        evaluations += r.evaluations;
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    let mut best = best.expect("at least one start");
    best.evaluations = evaluations;
    best
}
