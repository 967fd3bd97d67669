//! The integrand registry: exact integrals, integrability classes, and the
//! JSON manifest.
//!
//!     cargo run --release -p rqmc --example integrand_registry

use rqmc::testfunctions::{manifest_json, registry};

fn main() -> rqmc::Result<()> {
    println!(
        "{:<20} {:>12} {:>8} {:>10}",
        "name", "integral", "p*", "tolerance"
    );
    for entry in registry(2)? {
        let f = &entry.integrand;
        let p_star = if f.p_star().is_finite() {
            format!("{:.3}", f.p_star())
        } else {
            "inf".into()
        };
        println!(
            "{:<20} {:>12.6} {:>8} {:>10.0e}",
            f.name(),
            f.exact_integral(),
            p_star,
            entry.tolerance
        );
    }
    println!("\nmanifest (d=2):\n{}", manifest_json(2)?);
    Ok(())
}
