//! Randomized Frolov cubature: the admissible lattice generator, the
//! E[|det A|] = E[N] = n identities, and variance decay on a smooth bump.
//!
//!     cargo run --release -p rqmc --example frolov_cubature

use rqmc::estimators::{EstimatorSpec, Method};
use rqmc::frolov::{enumerate_points, frolov_generator, randomize_dilation};
use rqmc::harness::{replicate, StudyConfig};
use rqmc::stats::mean;
use rqmc::Seed;

fn main() -> rqmc::Result<()> {
    let gen = frolov_generator(2)?;
    println!("generator roots (d=2): {:?}", gen.roots());
    println!("|det B| = {:.6}", gen.det_b().abs());

    // expectation identities
    let n = 256;
    let mut dets = Vec::new();
    let mut counts = Vec::new();
    for r in 0..5000u64 {
        let mut stream = Seed(2).stream(&[("frolov", r)]);
        let dil = randomize_dilation(&gen, n, &mut stream)?;
        dets.push(dil.det_a().abs());
        counts.push(enumerate_points(&dil)?.count() as f64);
    }
    println!(
        "n = {n}: mean |det A| = {:.2}, mean N = {:.2} over 5000 draws",
        mean(&dets),
        mean(&counts)
    );

    // variance decay on the compactly supported bump
    let grid: Vec<usize> = (6..=12).map(|k| 1usize << k).collect();
    let cfg = StudyConfig::new(EstimatorSpec::new(Method::Frolov, 2), "bump", grid, 100)
        .with_seed(Seed(4))
        .with_eps(1.0);
    let result = replicate(&cfg)?;
    println!("\nvariance of the estimator on the bump (d=2):");
    for row in &result.rows {
        println!("  n = {:5}: variance = {:.3e}", row.n, row.variance);
    }
    println!(
        "log-log variance slope = {:.2}",
        result.slopes[0].variance_slope
    );
    Ok(())
}
