//! Almost-sure convergence diagnostics: median-of-k trajectories along a
//! prefix-consistent scrambled sequence, and single-realization subsequence
//! studies for methods that rebuild their point sets at every n.
//!
//!     cargo run --release -p rqmc --example slln_trajectory

use rqmc::estimators::{required_k, subsequence_schedule, EstimatorSpec, Method};
use rqmc::harness::{slln_trajectory, subsequence_study};
use rqmc::Seed;

fn main() -> rqmc::Result<()> {
    // median trajectories on the gamma = 0.5 singular integrand (in L^p for
    // p < 2); k chosen by the p-dependent rule
    let p = 1.8;
    let k = required_k(p)?;
    let grid = vec![64usize, 256, 1024, 4096];
    let spec = EstimatorSpec::new(Method::ScrambledNet, 1);
    let report = slln_trajectory(&spec, "singular-05", p, &grid, k, 0.05, 50, Seed(9))?;
    println!(
        "scrambled-sequence median trajectories: p = {p}, k = {k}, anchor N = {}",
        report.anchor_n
    );
    println!(
        "fraction of 50 seeds with tail sup below {}: {:.2}",
        report.eps, report.fraction_below
    );
    let mut sups = report.tail_sups.clone();
    sups.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!(
        "tail-sup quartiles: {:.4} / {:.4} / {:.4}",
        sups[12], sups[25], sups[37]
    );

    // subsequence route for Latin hypercube sampling
    let schedule = subsequence_schedule(p, 6)?;
    println!("\nsubsequence schedule for p = {p}: {schedule:?}");
    let lhs = EstimatorSpec::new(Method::LatinHypercube, 1);
    let report = subsequence_study(&lhs, "singular-05", p, 6, 50, Seed(10))?;
    println!(
        "LHS single realizations along the schedule: improved error (last vs first) in {:.0}% of seeds",
        100.0 * report.improved_fraction
    );
    let first_mean: f64 =
        report.errors.iter().map(|e| e[0]).sum::<f64>() / report.errors.len() as f64;
    let last_mean: f64 = report.errors.iter().map(|e| *e.last().unwrap()).sum::<f64>()
        / report.errors.len() as f64;
    println!("mean error at n_1 = {first_mean:.4}, at n_6 = {last_mean:.4}");
    Ok(())
}
