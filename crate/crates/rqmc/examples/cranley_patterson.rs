//! Cranley-Patterson rotations: structural invariants and how close the
//! rotated-set discrepancy stays to the deterministic substrate's.
//!
//!     cargo run --release -p rqmc --example cranley_patterson

use rqmc::discrepancy::star_discrepancy_exact;
use rqmc::randomize::{cranley_patterson, Rotation};
use rqmc::sequences::{rank1_lattice, LatticeRule};
use rqmc::Seed;

fn main() -> rqmc::Result<()> {
    let lattice = rank1_lattice(&LatticeRule::fibonacci(10)?)?;
    let base_star = star_discrepancy_exact(&lattice)?.star.unwrap();
    println!(
        "Fibonacci lattice n = {}: D* = {base_star:.5}",
        lattice.len()
    );

    let mut worst: f64 = 0.0;
    for s in 0..50u64 {
        let mut stream = Seed(s).stream(&[("rotation", 0)]);
        let rotation = Rotation::random(2, &mut stream);
        let rotated = cranley_patterson(&lattice, &rotation)?;
        let star = star_discrepancy_exact(&rotated)?.star.unwrap();
        worst = worst.max(star / base_star);
    }
    println!("worst rotated/unrotated D* ratio over 50 rotations: {worst:.3} (bound 2^d = 4)");

    // the multiset of pairwise differences mod 1 is exactly preserved
    let mut stream = Seed(1).stream(&[("rotation", 1)]);
    let rotation = Rotation::random(2, &mut stream);
    let rotated = cranley_patterson(&lattice, &rotation)?;
    let diff = |ps: &rqmc::PointSet| {
        let mut d: Vec<f64> = Vec::new();
        for i in 0..ps.len() {
            for k in 0..ps.len() {
                if i != k {
                    let mut delta = ps.coord(i, 0) - ps.coord(k, 0);
                    if delta < 0.0 {
                        delta += 1.0;
                    }
                    d.push(delta);
                }
            }
        }
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        d
    };
    let before = diff(&lattice);
    let after = diff(&rotated);
    let max_gap = before
        .iter()
        .zip(after.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("max gap between pairwise-difference multisets: {max_gap:.2e}");
    Ok(())
}
