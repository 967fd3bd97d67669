//! Owen-scrambled (0,d)-sequence: net preservation under scrambling and the
//! accuracy of the scrambled-net estimator against plain Monte Carlo.
//!
//!     cargo run --release -p rqmc --example scrambled_net_integration

use rqmc::estimators::{realize, EstimatorSpec, Method};
use rqmc::scramble::ScrambledSequence;
use rqmc::sequences::is_zero_net;
use rqmc::stats::mean_and_variance;
use rqmc::testfunctions::find;
use rqmc::Seed;

fn main() -> rqmc::Result<()> {
    // scrambling keeps the net property
    let stream = Seed(7).stream(&[("demo", 0)]);
    let seq = ScrambledSequence::new(2, &stream)?;
    let ps = seq.points(27)?;
    println!(
        "scrambled 27-point Faure prefix still a (0,3,2)-net: {}",
        is_zero_net(&ps, 3, 3)
    );

    // prefix property: the first 8 points do not depend on the request size
    let first8 = seq.points(8)?;
    let first16 = seq.points(16)?;
    let same = (0..8).all(|i| first8.point(i) == first16.point(i));
    println!("prefix property holds: {same}");

    // variance comparison on a smooth integrand, d = 2, n = 256
    let f = find(2, "exp-sum")?.integrand;
    let reps = 500;
    for method in [Method::ScrambledNet, Method::Iid] {
        let spec = EstimatorSpec::new(method, 2);
        let values: rqmc::Result<Vec<f64>> = (0..reps)
            .map(|r| {
                realize(&spec, &f, 256, &Seed(1).stream(&[("cmp", r)])).map(|rec| rec.value)
            })
            .collect();
        let (mean, var) = mean_and_variance(&values?);
        println!(
            "{:<14} mean = {:.6} (exact {:.6}), variance = {:.3e}",
            spec.name(),
            mean,
            f.exact_integral(),
            var
        );
    }
    Ok(())
}
