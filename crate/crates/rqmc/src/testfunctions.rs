//! Registry of integrands with known exact integrals and integrability
//! classes, spanning functions that are merely integrable, in L^p for
//! 1 < p < 2, square integrable, or smooth with compact support.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrand::Integrand;
use crate::quadrature::adaptive_simpson;

/// Smallest positive clamp for singular evaluations; point sets live in
/// [0,1), so a coordinate can be exactly zero. Clamping at 2^-53 changes the
/// integral by well under 1e-7 for gamma <= 0.7.
const SINGULAR_CLAMP: f64 = 1.0 / 9_007_199_254_740_992.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tag {
    Smooth,
    Singular,
    Indicator,
    Additive,
    NegativeControlTarget,
}

#[derive(Debug, Clone)]
pub struct IntegrandEntry {
    pub integrand: Integrand,
    pub tags: Vec<Tag>,
    /// Tolerance attached to the registered exact integral (oracle error plus
    /// clamp bias for the singular entries).
    pub tolerance: f64,
}

/// One-dimensional integral of the bump factor exp(-1/(x(1-x))), registered
/// once by adaptive quadrature at tolerance 1e-12.
pub fn bump_integral_1d() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| {
        adaptive_simpson(
            &|x| {
                if x <= 0.0 || x >= 1.0 {
                    0.0
                } else {
                    (-1.0 / (x * (1.0 - x))).exp()
                }
            },
            0.0,
            1.0,
            1e-13,
        )
    })
}

fn bump_factor(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        (-1.0 / (x * (1.0 - x))).exp()
    }
}

fn singular_factor(x: f64, gamma: f64) -> f64 {
    x.max(SINGULAR_CLAMP).powf(-gamma)
}

/// The library integrands for dimension `d`.
pub fn registry(d: usize) -> Result<Vec<IntegrandEntry>> {
    if d < 1 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    let df = d as f64;
    let e = std::f64::consts::E;

    let mut entries = Vec::new();

    entries.push(IntegrandEntry {
        integrand: Integrand::new("const", d, |_| 1.0, 1.0, f64::INFINITY, |_| Some(1.0)),
        tags: vec![Tag::Smooth],
        tolerance: 0.0,
    });

    let a = 0.5f64;
    entries.push(IntegrandEntry {
        integrand: Integrand::new(
            "box",
            d,
            move |x| {
                if x.iter().all(|&xi| xi < a) {
                    1.0
                } else {
                    0.0
                }
            },
            a.powi(d as i32),
            f64::INFINITY,
            move |p| Some(a.powi(d as i32).powf(1.0 / p)),
        ),
        tags: vec![Tag::Indicator],
        tolerance: 0.0,
    });

    entries.push(IntegrandEntry {
        integrand: Integrand::new(
            "exp-sum",
            d,
            |x| x.iter().sum::<f64>().exp(),
            (e - 1.0).powi(d as i32),
            f64::INFINITY,
            move |p| Some((((p * 1.0).exp_m1()) / p).powf(df / p)),
        ),
        tags: vec![Tag::Smooth],
        tolerance: 1e-12,
    });

    for &gamma in &[0.5f64, 0.7] {
        let name = if gamma == 0.5 {
            "singular-05"
        } else {
            "singular-07"
        };
        entries.push(IntegrandEntry {
            integrand: Integrand::new(
                name,
                d,
                move |x| x.iter().map(|&xi| singular_factor(xi, gamma)).product(),
                (1.0 - gamma).powi(-(d as i32)),
                1.0 / gamma,
                move |p| {
                    if p * gamma < 1.0 {
                        Some((1.0 - p * gamma).powf(-df / p))
                    } else {
                        None
                    }
                },
            ),
            tags: vec![Tag::Singular],
            tolerance: 1e-7,
        });
    }

    entries.push(IntegrandEntry {
        integrand: Integrand::new(
            "additive-quadratic",
            d,
            |x| x.iter().map(|&xi| xi * xi).sum::<f64>(),
            df / 3.0,
            f64::INFINITY,
            move |p| {
                if p == 1.0 {
                    Some(df / 3.0)
                } else if p == 2.0 {
                    Some((df / 5.0 + df * (df - 1.0) / 9.0).sqrt())
                } else {
                    None
                }
            },
        ),
        tags: vec![Tag::Additive, Tag::Smooth],
        tolerance: 0.0,
    });

    let bump1 = bump_integral_1d();
    entries.push(IntegrandEntry {
        integrand: Integrand::new(
            "bump",
            d,
            |x| x.iter().map(|&xi| bump_factor(xi)).product(),
            bump1.powi(d as i32),
            f64::INFINITY,
            move |p| {
                if p == 1.0 {
                    Some(bump1.powi(d as i32))
                } else {
                    None
                }
            },
        ),
        tags: vec![Tag::Smooth],
        tolerance: 1e-11,
    });

    entries.push(IntegrandEntry {
        integrand: Integrand::new(
            "half-cube",
            d,
            |x| if x[0] < 0.5 { 1.0 } else { 0.0 },
            0.5,
            f64::INFINITY,
            |p| Some(0.5f64.powf(1.0 / p)),
        ),
        tags: vec![Tag::Indicator, Tag::NegativeControlTarget],
        tolerance: 0.0,
    });

    Ok(entries)
}

/// Looks an entry up by name.
pub fn find(d: usize, name: &str) -> Result<IntegrandEntry> {
    registry(d)?
        .into_iter()
        .find(|e| e.integrand.name() == name)
        .ok_or_else(|| Error::UnknownIntegrand(name.to_string()))
}

pub fn names() -> Vec<&'static str> {
    vec![
        "const",
        "box",
        "exp-sum",
        "singular-05",
        "singular-07",
        "additive-quadratic",
        "bump",
        "half-cube",
    ]
}

#[derive(Serialize)]
struct ManifestRow<'a> {
    name: &'a str,
    d: usize,
    exact_integral: f64,
    p_star: Option<f64>,
    tolerance: f64,
    tags: &'a [Tag],
}

/// Serializes the registry to a JSON manifest (name, d, I, p*, tolerance).
pub fn manifest_json(d: usize) -> Result<String> {
    let entries = registry(d)?;
    let rows: Vec<ManifestRow> = entries
        .iter()
        .map(|e| ManifestRow {
            name: e.integrand.name(),
            d,
            exact_integral: e.integrand.exact_integral(),
            p_star: if e.integrand.p_star().is_finite() {
                Some(e.integrand.p_star())
            } else {
                None
            },
            tolerance: e.tolerance,
            tags: &e.tags,
        })
        .collect();
    let doc = serde_json::json!({
        "schema_version": 1,
        "integrands": rows,
    });
    Ok(serde_json::to_string_pretty(&doc).expect("serializable"))
}

/// Re-verifies every registered integral against a 10^7-sample Monte Carlo
/// estimate within 5 standard errors. The gamma = 0.7 singular entry has
/// infinite Monte Carlo variance; it is checked against a stratified
/// quadrature of its product factors instead.
pub fn verify_registry(d: usize, seed: crate::rng::Seed) -> Result<()> {
    let samples = 10_000_000usize;
    for entry in registry(d)? {
        let f = &entry.integrand;
        if f.name() == "singular-07" {
            let quad = stratified_singular_integral(0.7);
            let want = 1.0 / (1.0 - 0.7);
            if (quad - want).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "stratified quadrature {quad} disagrees with analytic factor {want}"
                )));
            }
            continue;
        }
        let mut stream = seed.stream(&[("registry-check", 0)]).derive(f.name(), 0);
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        let mut x = vec![0.0; d];
        for _ in 0..samples {
            for xj in x.iter_mut() {
                *xj = stream.next_f64();
            }
            let v = f.evaluate(&x);
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / samples as f64;
        let var = (sumsq / samples as f64 - mean * mean).max(0.0);
        let se = (var / samples as f64).sqrt();
        let err = (mean - f.exact_integral()).abs();
        if err > 5.0 * se + entry.tolerance {
            return Err(Error::InvalidParameter(format!(
                "registry entry {} fails MC check: |{mean} - {}| > 5*{se}",
                f.name(),
                f.exact_integral()
            )));
        }
    }
    Ok(())
}

/// Stratified quadrature oracle for int_0^1 x^-gamma dx: geometric strata
/// [2^-(j+1), 2^-j] where the factor is smooth, summed from the small end.
fn stratified_singular_integral(gamma: f64) -> f64 {
    let mut total = 0.0;
    for j in (0..1000).rev() {
        let hi = 2.0f64.powi(-j);
        let lo = hi / 2.0;
        if hi < 1e-300 {
            continue;
        }
        total += adaptive_simpson(&|x: f64| x.powf(-gamma), lo, hi, 1e-15);
    }
    total
}
