//! Latin hypercube sampling: exact stratification and variance reduction on
//! additive integrands.
//!
//!     cargo run --release -p rqmc --example latin_hypercube

use rqmc::estimators::{realize, EstimatorSpec, Method};
use rqmc::randomize::{latin_hypercube, lhs_stratification_holds};
use rqmc::stats::mean_and_variance;
use rqmc::testfunctions::find;
use rqmc::Seed;

fn main() -> rqmc::Result<()> {
    let stream = Seed(5).stream(&[("lhs", 0)]);
    let ps = latin_hypercube(10, 3, &stream)?;
    println!("10-point LHS in d=3, stratification holds: {}", lhs_stratification_holds(&ps));
    for (i, p) in ps.iter_points().enumerate() {
        println!("  point {i}: ({:.3}, {:.3}, {:.3})", p[0], p[1], p[2]);
    }

    // variance vs iid on the additive quadratic, d=3, n=64
    let f = find(3, "additive-quadratic")?.integrand;
    let n = 64;
    let reps = 2000;
    let mut table = Vec::new();
    for method in [Method::LatinHypercube, Method::Iid] {
        let spec = EstimatorSpec::new(method, 3);
        let values: rqmc::Result<Vec<f64>> = (0..reps)
            .map(|r| realize(&spec, &f, n, &Seed(3).stream(&[("var", r)])).map(|rec| rec.value))
            .collect();
        let (mean, var) = mean_and_variance(&values?);
        table.push((spec.name(), mean, var));
    }
    let analytic_iid = 3.0 * (1.0 / 5.0 - 1.0 / 9.0) / n as f64;
    println!("\nadditive quadratic, d=3, n={n}, {reps} replications:");
    for (name, mean, var) in &table {
        println!("  {name:<6} mean = {mean:.5}, variance = {var:.3e}");
    }
    println!("  analytic iid variance = {analytic_iid:.3e}");
    println!(
        "  LHS variance ratio vs iid: {:.3}",
        table[0].2 / table[1].2
    );
    Ok(())
}
