//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::time::{Duration, Instant};

use daemonic_cli::commands::{empirical_threshold, fig2, summarize_fig2, unit_gap, werner_sweep};
use daemonic_core::correlations::{
    concurrence, discord, ergotropy_gain_bound, is_classical_quantum, is_separable_2x2, MeasuredSide,
};
use daemonic_core::daemonic::{gain_ergotropy, gain_utility, lemma1_decomposition, optimize_measurement};
use daemonic_core::extraction::{optimal_utility_exponential, optimal_utility_numeric};
use daemonic_core::optimize::OptimizeOptions;
use daemonic_core::quantum::linalg::{c, real_diag};
use daemonic_core::quantum::random::{random_bipartite_with, random_density_with, random_unitary_with};
use daemonic_core::quantum::{
    conditional_state, partial_trace_ancilla, rng_stream, CMatrix, DensityMatrix, Hamiltonian,
    MeasurementBasis, Unitary,
};
use daemonic_core::quasiprob::{mean_work, negativity, work_quasiprob};
use daemonic_core::utility::UtilityFunction;
use daemonic_core::zoo::{example_state, random_zero_gain_state, werner, werner_threshold};
use rand::Rng;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, budget_secs: u64) -> bool {
    elapsed <= Duration::from_secs(budget_secs)
}

fn random_energies<R: Rng>(dim: usize, rng: &mut R) -> Hamiltonian {
    let mut e: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..2.0)).collect();
    e.sort_by(f64::total_cmp);
    for k in 1..dim {
        if e[k] - e[k - 1] < 1e-2 {
            e[k] = e[k - 1] + 1e-2;
        }
    }
    Hamiltonian::diagonal(&e).unwrap()
}

fn nonzero_rate<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let r: f64 = rng.random_range(-1.0..=1.0);
        if r.abs() > 1e-3 {
            return r;
        }
    }
}

fn closed_form_vs_optimizer() -> Verdict {
    let start = Instant::now();
    let mut rng = rng_stream(1, 0);
    let opts = OptimizeOptions::default();
    let mut worst = 0.0f64;
    for (dim, count) in [(2, 200), (3, 50)] {
        for _ in 0..count {
            let h = random_energies(dim, &mut rng);
            let rho = random_density_with(dim, dim, &mut rng);
            let r = nonzero_rate(&mut rng) * 2.0;
            let exact = optimal_utility_exponential(&rho, &h, r, 0.5).map_err(|e| e.to_string())?.value;
            let u = UtilityFunction::exponential(r);
            let numeric = optimal_utility_numeric(&rho, &h, &u, 0.5, &opts).map_err(|e| e.to_string())?.value;
            worst = worst.max((exact - numeric).abs());
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-6 && within(elapsed, 120),
        format!("max |closed - numeric| = {worst:.3e} over 200 qubits + 50 qutrits in {elapsed:.1?}"),
    )
}

fn worked_example() -> Verdict {
    let h = unit_gap();
    let opts = OptimizeOptions::default();
    let mut failures = Vec::new();
    let mut min_mismatched = f64::INFINITY;
    let mut max_matched = 0.0f64;
    for coh in [0.05, 0.1, 0.2] {
        let rho = example_state(0.0, 1.0, 1.0, coh).map_err(|e| e.to_string())?;
        let rho_s = partial_trace_ancilla(&rho);
        let u_s = optimal_utility_exponential(&rho_s, &h, 1.0, 0.5).unwrap().value;
        let cond = conditional_state(&rho, &MeasurementBasis::computational(2), 1).unwrap();
        let u_cond = optimal_utility_exponential(&cond.state, &h, 1.0, 0.5).unwrap().value;
        if (u_s - 2.0 * coh * 0.5f64.sinh()).abs() > 1e-9 {
            failures.push(format!("c={coh}: U(rho_S) = {u_s}"));
        }
        if (cond.probability - 2.0 * coh * 0.5f64.cosh()).abs() > 1e-9 {
            failures.push(format!("c={coh}: p_1 = {}", cond.probability));
        }
        if (u_cond - 0.5f64.tanh()).abs() > 1e-9 {
            failures.push(format!("c={coh}: U(rho_S|1) = {u_cond}"));
        }
        let matched = gain_utility(&rho, &h, &UtilityFunction::exponential(1.0), 0.5, &opts).unwrap();
        max_matched = max_matched.max(matched);
        if matched > 1e-7 {
            failures.push(format!("c={coh}: gain at r_A = 1 is {matched:.3e}"));
        }
        for r_a in [0.0, 0.5, 2.0] {
            let g = gain_utility(&rho, &h, &UtilityFunction::exponential(r_a), 0.5, &opts).unwrap();
            min_mismatched = min_mismatched.min(g);
            if g <= 1e-4 {
                failures.push(format!("c={coh}: gain at r_A = {r_a} is {g:.3e}"));
            }
        }
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!("max gain at r_A = r: {max_matched:.3e}; min gain at r_A != r: {min_mismatched:.3e}")
        } else {
            failures.join("; ")
        },
    )
}

fn zero_gain_forward() -> Verdict {
    let h = unit_gap();
    let opts = OptimizeOptions::default();
    let mut rng = rng_stream(3, 0);
    let (mut worst_gain, mut worst_residual, mut entangled) = (0.0f64, 0.0f64, 0);
    for i in 0..100 {
        let r = nonzero_rate(&mut rng);
        let q = [0.3, 0.5, 0.7][i % 3];
        let rho = random_zero_gain_state(&h, 2, r, q, &mut rng).map_err(|e| e.to_string())?;
        let result = optimize_measurement(&rho, &h, &UtilityFunction::exponential(r), q, &opts).unwrap();
        worst_gain = worst_gain.max(result.gain);
        entangled += !is_separable_2x2(&rho).unwrap() as usize;
        let sum: f64 = lemma1_decomposition(&rho, &result.basis, &h, r, q)
            .unwrap()
            .iter()
            .map(|t| t.probability * t.tilde_ergotropy)
            .sum();
        worst_residual = worst_residual.max((sum - result.gain).abs());
    }
    check(
        worst_gain <= 1e-7 && entangled == 0 && worst_residual <= 1e-9,
        format!("max gain {worst_gain:.3e}; PPT failures {entangled}; max decomposition residual {worst_residual:.3e}"),
    )
}

fn zero_rate_classical_quantum() -> Verdict {
    let h = unit_gap();
    let opts = OptimizeOptions::default();
    let mut rng = rng_stream(4, 0);
    let mut non_cq = 0;
    for _ in 0..50 {
        let q = rng.random_range(0.0..=1.0);
        let rho = random_zero_gain_state(&h, 2, 0.0, q, &mut rng).map_err(|e| e.to_string())?;
        non_cq += !is_classical_quantum(&rho, 1e-7).unwrap() as usize;
    }
    let rho = example_state(0.0, 1.0, 1.0, 0.2).unwrap();
    let cq = is_classical_quantum(&rho, 1e-7).unwrap();
    let de = gain_ergotropy(&rho, &h, &opts).unwrap();
    check(
        non_cq == 0 && !cq && de > 0.0,
        format!("zero-rate constructions not classical-quantum: {non_cq}/50; example state classical-quantum = {cq}, ergotropy gain = {de:.6}"),
    )
}

fn werner_threshold_check() -> Verdict {
    let (x, y) = (0.6, 0.8);
    let rows = werner_sweep(x, y, 101, 0).map_err(|e| e.to_string())?;
    let z0 = werner_threshold(x, y).unwrap();
    let worst = rows.iter().map(|r| (r.closed_form - r.numeric).abs()).fold(0.0, f64::max);
    let boundary = empirical_threshold(&rows, 1e-7);
    let witness = werner(0.45).unwrap();
    let c45 = concurrence(&witness).unwrap();
    let g45 = gain_utility(
        &witness,
        &unit_gap(),
        &UtilityFunction::cubic_from_xyz(x, y, 0.0),
        0.5,
        &OptimizeOptions::default(),
    )
    .unwrap();
    let boundary_ok = boundary.is_some_and(|z| (z - 0.5).abs() <= 0.01);
    check(
        boundary_ok && worst <= 1e-5 && c45 > 0.0 && g45 <= 1e-7,
        format!(
            "boundary {boundary:?} vs z0 = {z0}; max |closed - numeric| = {worst:.3e}; z = 0.45: concurrence {c45:.4}, gain {g45:.3e}"
        ),
    )
}

fn fig2_reproduction() -> Verdict {
    let start = Instant::now();
    let rows = fig2(10_000, 0, 0.5).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let s = summarize_fig2(&rows);
    check(
        s.entangled_zero_gain >= 1 && s.small_z_violations == 0 && within(elapsed, 600),
        format!(
            "{} samples with C > 0.5 and gain < 1e-3; {} of {} small-|Z| samples with gain >= 1e-4; {elapsed:.1?}",
            s.entangled_zero_gain, s.small_z_violations, s.small_z
        ),
    )
}

fn quasiprobability_suite() -> Verdict {
    let start = Instant::now();
    let mut rng = rng_stream(7, 0);
    let (mut worst_norm, mut worst_moment, mut negative_incoherent) = (0.0f64, 0.0f64, 0);
    for i in 0..1000 {
        let dim = 2 + i % 3;
        let h = random_energies(dim, &mut rng);
        let rho = random_density_with(dim, dim, &mut rng);
        let u = random_unitary_with(dim, &mut rng);
        let (q1, q2) = (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
        let p1 = work_quasiprob(&rho, &u, &h, q1).unwrap();
        let p2 = work_quasiprob(&rho, &u, &h, q2).unwrap();
        worst_norm = worst_norm.max((p1.total_weight() - 1.0).abs());
        worst_moment = worst_moment.max((mean_work(&p1) - mean_work(&p2)).abs());
        let pops: Vec<f64> = (0..dim).map(|k| rho.matrix()[(k, k)].re).collect();
        let incoherent = DensityMatrix::new(real_diag(&pops)).unwrap();
        let p = work_quasiprob(&incoherent, &u, &h, q1).unwrap();
        negative_incoherent += p.atoms().iter().any(|a| a.weight < 0.0) as usize;
    }
    let s = 1.0 / 2f64.sqrt();
    let plus = DensityMatrix::new(CMatrix::from_element(2, 2, c(0.5, 0.0))).unwrap();
    let hadamard = Unitary::new(CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])).unwrap();
    let table = work_quasiprob(&plus, &hadamard, &unit_gap(), 0.5).unwrap();
    let expected = [(-1.0, 0.25), (-0.5, -0.5), (0.0, 0.5), (0.5, 0.5), (1.0, 0.25)];
    let table_ok = table.atoms().len() == expected.len()
        && table
            .atoms()
            .iter()
            .zip(&expected)
            .all(|(a, e)| (a.work - e.0).abs() < 1e-12 && (a.weight - e.1).abs() < 1e-12);
    let neg = negativity(&table);
    let elapsed = start.elapsed();
    check(
        worst_norm <= 1e-10
            && worst_moment <= 1e-9
            && negative_incoherent == 0
            && table_ok
            && (neg - 0.5).abs() < 1e-12
            && within(elapsed, 60),
        format!(
            "normalization {worst_norm:.3e}; first moment {worst_moment:.3e}; incoherent with negative weight {negative_incoherent}; Hadamard table {}; negativity {neg}; {elapsed:.1?}",
            if table_ok { "matches" } else { "differs" }
        ),
    )
}

fn discord_bound() -> Verdict {
    let h = unit_gap();
    let opts = OptimizeOptions::default();
    let mut rng = rng_stream(8, 0);
    let (mut violations, mut worst_slack) = (0, f64::INFINITY);
    for _ in 0..500 {
        let rho = random_bipartite_with(2, 2, &mut rng);
        let de = gain_ergotropy(&rho, &h, &opts).unwrap();
        let bound = ergotropy_gain_bound(discord(&rho, MeasuredSide::Ancilla).unwrap()).unwrap();
        let slack = de - bound;
        worst_slack = worst_slack.min(slack);
        violations += (slack < -1e-3) as usize;
    }
    check(
        violations == 0,
        format!("{violations} counterexamples; worst slack {worst_slack:.4e}"),
    )
}

fn zero_rate_reduction() -> Verdict {
    let h = unit_gap();
    let opts = OptimizeOptions::default();
    let mut rng = rng_stream(9, 0);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let rho = random_bipartite_with(2, 2, &mut rng);
        let q = rng.random_range(0.0..=1.0);
        let du = gain_utility(&rho, &h, &UtilityFunction::exponential(0.0), q, &opts).unwrap();
        let de = gain_ergotropy(&rho, &h, &opts).unwrap();
        worst = worst.max((du - de).abs());
    }
    check(worst <= 1e-7, format!("max |dU - dE| = {worst:.3e}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("closed form matches optimizer", closed_form_vs_optimizer),
        ("worked zero-gain example", worked_example),
        ("zero-gain construction", zero_gain_forward),
        ("zero rate implies classical-quantum", zero_rate_classical_quantum),
        ("Werner threshold", werner_threshold_check),
        ("gain versus concurrence scatter", fig2_reproduction),
        ("quasiprobability suite", quasiprobability_suite),
        ("discord bound", discord_bound),
        ("zero-rate reduction", zero_rate_reduction),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
