//! Median-of-k amplification: the empirical failure probability of the
//! median estimator against the 2^k alpha^{k/2} bound, on a singular
//! integrand where single realizations fail often.
//!
//!     cargo run --release -p rqmc --example median_amplification

use rqmc::estimators::{median_failure_bound, required_k, EstimatorSpec, Method};
use rqmc::harness::{amplification_study, StudyConfig};
use rqmc::Seed;

fn main() -> rqmc::Result<()> {
    let spec = EstimatorSpec::new(Method::ScrambledNet, 1);
    let cfg = StudyConfig::new(spec, "singular-07", vec![1 << 10], 1000)
        .with_seed(Seed(31))
        .with_eps(0.4)
        .with_k_list(vec![1, 3, 5, 7]);
    let report = amplification_study(&cfg)?;
    println!(
        "n = {}, eps = {}, alpha_hat = {:.4}, Wilson upper alpha_bar = {:.4}",
        report.n, report.eps, report.alpha_hat, report.alpha_bar
    );
    println!("{:>3} {:>10} {:>12} {:>12}", "k", "failures", "empirical", "bound");
    for row in &report.rows {
        println!(
            "{:>3} {:>10} {:>12.4} {:>12}",
            row.k,
            row.failures,
            row.failure_prob,
            row.bound
                .map(|b| format!("{b:.4}"))
                .unwrap_or_else(|| "-".into()),
        );
    }
    println!(
        "all empirical failures within bound: {}; nonincreasing in k: {}",
        report.all_within_bound, report.nonincreasing
    );

    // the bound calculators themselves
    println!("\nrequired_k(p) for p in (1,2):");
    for p in [1.1, 1.4, 1.5, 1.9] {
        println!("  p = {p}: k = {}", required_k(p)?);
    }
    println!("\nbound table 2^k alpha^(k/2) at alpha = 1/16:");
    for k in [1usize, 3, 5, 7] {
        println!("  k = {k}: {:.6}", median_failure_bound(1.0 / 16.0, k)?);
    }
    Ok(())
}
