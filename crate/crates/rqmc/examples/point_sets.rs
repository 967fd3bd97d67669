//! Tour of the deterministic low-discrepancy constructions and their
//! discrepancy certificates.
//!
//!     cargo run --release -p rqmc --example point_sets

use rqmc::discrepancy::{l2_star_discrepancy, star_discrepancy_exact};
use rqmc::sequences::{faure, halton, hammersley, is_zero_net, rank1_lattice, LatticeRule};

fn main() -> rqmc::Result<()> {
    println!("first 4 Halton points (d=2):");
    let ps = halton(4, 2)?;
    for p in ps.iter_points() {
        println!("  ({:.4}, {:.4})", p[0], p[1]);
    }

    println!("\nFaure net in base 3 (d=2, n=9) is a (0,2,2)-net: {}", {
        let ps = faure(9, 2)?;
        is_zero_net(&ps, 3, 2)
    });

    println!("\nexact star discrepancy along n for Halton (d=2):");
    for k in [4u32, 6, 8] {
        let ps = halton(1 << k, 2)?;
        let report = star_discrepancy_exact(&ps)?;
        println!(
            "  n = {:4}: D* = {:.5}, L2 star = {:.5}",
            1 << k,
            report.star.unwrap(),
            report.l2star
        );
    }

    println!("\nHammersley vs Halton at n = 64 (d=2):");
    for (name, ps) in [("halton", halton(64, 2)?), ("hammersley", hammersley(64, 2)?)] {
        println!("  {name:<11} L2 star = {:.5}", l2_star_discrepancy(&ps));
    }

    println!("\nFibonacci lattice rules (d=2):");
    for k in 6..=10 {
        let rule = LatticeRule::fibonacci(k)?;
        let ps = rank1_lattice(&rule)?;
        let star = star_discrepancy_exact(&ps)?.star.unwrap();
        println!(
            "  n = F_{k} = {:3}, z = (1, {:2}): D* = {:.5}",
            rule.n(),
            rule.generator()[1],
            star
        );
    }
    Ok(())
}
