//! The acceptance suite: every consistency property the toolkit promises,
//! checked end to end at pinned tolerances. Each criterion is deterministic
//! given the master seed and reports a one-line verdict; the `rqmc verify`
//! subcommand and the `acceptance` integration test both run these.

use std::time::Instant;

use serde::Serialize;

use crate::discrepancy::{l2_star_discrepancy, star_discrepancy_exact};
use crate::error::Result;
use crate::estimators::{
    negative_control, realize, required_k, EstimatorSpec, Method, Substrate,
};
use crate::frolov::{enumerate_points, frolov_generator, randomize_dilation};
use crate::harness::{amplification_study, mean_error_trend, replicate, slln_trajectory, StudyConfig};
use crate::integrand::Integrand;
use crate::point_set::PointSet;
use crate::randomize::{latin_hypercube, lhs_stratification_holds};
use crate::rng::Seed;
use crate::scramble::{nested_uniform_scramble, ScrambleKey};
use crate::sequences::{
    digit_depth, faure, faure_digits, halton, hammersley, is_zero_net,
};
use crate::stats::{
    chi_square_critical, chi_square_uniform, mean, robust_scale, standard_error, Z_999,
};
use crate::testfunctions::{find, registry};

/// Suite scale. `Full` runs every criterion at its stated replication count;
/// `Quick` shrinks the replication-heavy studies (same checks, wider noise).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Quick,
    Full,
}

impl Suite {
    fn scale(&self, full: usize, quick: usize) -> usize {
        match self {
            Suite::Full => full,
            Suite::Quick => quick,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

pub const CRITERION_COUNT: usize = 13;

pub fn default_seed() -> Seed {
    Seed(424242)
}

/// Runs one criterion (1-based id).
pub fn run_criterion(id: usize, suite: Suite, seed: Seed) -> CriterionReport {
    let start = Instant::now();
    let (name, outcome) = match id {
        1 => ("negative-control exactness", criterion_1(suite, seed)),
        2 => ("unbiasedness", criterion_2(suite, seed)),
        3 => ("linearity and monotonicity", criterion_3(suite, seed)),
        4 => ("operator norm", criterion_4(suite, seed)),
        5 => ("net property under scrambling", criterion_5(suite, seed)),
        6 => ("lhs stratification", criterion_6(suite, seed)),
        7 => ("frolov expectation identities", criterion_7(suite, seed)),
        8 => ("frolov variance decay", criterion_8(suite, seed)),
        9 => ("median amplification", criterion_9(suite, seed)),
        10 => ("convergence-in-mean trend", criterion_10(suite, seed)),
        11 => ("slln trajectory", criterion_11(suite, seed)),
        12 => ("discrepancy oracles", criterion_12(suite, seed)),
        13 => ("experiment determinism", criterion_13(suite, seed)),
        _ => (
            "unknown",
            Ok((false, format!("no criterion with id {id}"))),
        ),
    };
    let (passed, detail) = match outcome {
        Ok(pair) => pair,
        Err(e) => (false, format!("errored: {e}")),
    };
    CriterionReport {
        id,
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Runs the whole suite in criterion order.
pub fn run_suite(suite: Suite, seed: Seed) -> Vec<CriterionReport> {
    (1..=CRITERION_COUNT)
        .map(|id| run_criterion(id, suite, seed))
        .collect()
}

pub fn verdict_json(suite: Suite, seed: Seed, reports: &[CriterionReport]) -> String {
    let doc = serde_json::json!({
        "schema_version": 1,
        "suite": match suite { Suite::Quick => "quick", Suite::Full => "full" },
        "seed": seed.0,
        "all_passed": reports.iter().all(|r| r.passed),
        "criteria": reports,
    });
    serde_json::to_string_pretty(&doc).expect("serializable verdict")
}

type Outcome = Result<(bool, String)>;

/// Recycled-sample estimator hits its exact failure probability 1/2^m:
/// m=3, half-cube indicator, n=300, 10^4 replications, band [0.105, 0.145].
fn criterion_1(_suite: Suite, seed: Seed) -> Outcome {
    let f = find(3, "half-cube")?.integrand;
    let reps = 10_000usize;
    let mut hits = 0usize;
    for r in 0..reps {
        let stream = seed.stream(&[("c1", 0), ("rep", r as u64)]);
        let value = negative_control(3, &f, 300, &stream)?;
        if value == 1.0 {
            hits += 1;
        }
    }
    let p = hits as f64 / reps as f64;
    let passed = (0.105..=0.145).contains(&p);
    Ok((
        passed,
        format!("P[S_n g = 1] = {p:.4} over {reps} replications (target 0.125, band [0.105, 0.145])"),
    ))
}

fn standard_methods(d: usize) -> Vec<EstimatorSpec> {
    vec![
        EstimatorSpec::new(Method::ScrambledNet, d),
        EstimatorSpec::new(Method::CranleyPatterson(Substrate::Halton), d),
        EstimatorSpec::new(Method::LatinHypercube, d),
        EstimatorSpec::new(Method::Frolov, d),
        EstimatorSpec::new(Method::Iid, d),
        EstimatorSpec::new(Method::NegativeControl(3), d),
    ]
}

/// Every method is unbiased: |sample mean - I(f)| <= 4 SE at n=64 for
/// exp-sum, box indicator and the additive quadratic in d = 1..3.
fn criterion_2(suite: Suite, seed: Seed) -> Outcome {
    let reps = suite.scale(2000, 500);
    let mut worst: (f64, String) = (0.0, String::new());
    let mut combo = 0u64;
    for d in 1..=3usize {
        for integrand in ["exp-sum", "box", "additive-quadratic"] {
            let f = find(d, integrand)?.integrand;
            for spec in standard_methods(d) {
                combo += 1;
                let values: Vec<f64> = (0..reps)
                    .map(|r| {
                        realize(&spec, &f, 64, &seed.stream(&[("c2", combo), ("rep", r as u64)]))
                            .map(|rec| rec.value)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let m = mean(&values);
                let se = standard_error(&values);
                let gap = (m - f.exact_integral()).abs();
                let slack = 4.0 * se + 1e-12;
                let ratio = if slack > 0.0 { gap / slack } else { 0.0 };
                if ratio > worst.0 {
                    worst = (
                        ratio,
                        format!("{} on {integrand} d={d}: |{m:.6} - {:.6}| vs 4SE={:.2e}",
                            spec.name(), f.exact_integral(), 4.0 * se),
                    );
                }
                if gap > slack {
                    return Ok((false, format!("bias detected: {}", worst.1)));
                }
            }
        }
    }
    Ok((
        true,
        format!("54 (method, integrand, d) cells unbiased at 4 SE; tightest: {}", worst.1),
    ))
}

/// Linearity (residual <= 1e-12) and monotonicity (|S f| <= S |f| exactly)
/// under shared-randomness replay, 100 random (alpha, beta, f, g) draws per
/// method.
fn criterion_3(suite: Suite, seed: Seed) -> Outcome {
    let combos = suite.scale(100, 40);
    let pool = ["const", "box", "exp-sum", "singular-05", "additive-quadratic", "bump"];
    let d = 2;
    let mut max_residual = 0.0f64;
    for spec in standard_methods(d) {
        let mut pick = seed.stream(&[("c3-picker", 0)]).derive(&spec.name(), 0);
        for trial in 0..combos {
            let alpha = 4.0 * pick.next_f64() - 2.0;
            let beta = 4.0 * pick.next_f64() - 2.0;
            let f = find(d, pool[pick.next_below(pool.len() as u64) as usize])?.integrand;
            let g = find(d, pool[pick.next_below(pool.len() as u64) as usize])?.integrand;
            let combo = Integrand::linear_combination(alpha, &f, beta, &g);
            let stream = seed.stream(&[("c3", trial as u64)]).derive(&spec.name(), 1);

            let s_combo = realize(&spec, &combo, 64, &stream)?.value;
            let s_f = realize(&spec, &f, 64, &stream)?.value;
            let s_g = realize(&spec, &g, 64, &stream)?.value;
            let residual = (s_combo - (alpha * s_f + beta * s_g)).abs();
            max_residual = max_residual.max(residual);
            if residual > 1e-12 {
                return Ok((
                    false,
                    format!(
                        "linearity residual {residual:.3e} > 1e-12 for {} (trial {trial})",
                        spec.name()
                    ),
                ));
            }

            let combo_abs = Integrand::abs(&combo);
            let s_abs = realize(&spec, &combo_abs, 64, &stream)?.value;
            if s_combo.abs() > s_abs {
                return Ok((
                    false,
                    format!(
                        "monotonicity violated for {}: |{s_combo}| > {s_abs}",
                        spec.name()
                    ),
                ));
            }
        }
    }
    Ok((
        true,
        format!("{combos} replayed draws per method; max linearity residual {max_residual:.3e}"),
    ))
}

/// Empirical operator norm: mean |S_n f| <= ||f||_1 + 4 SE for every method
/// and every registry integrand, n in {16, 256}.
fn criterion_4(suite: Suite, seed: Seed) -> Outcome {
    let reps = suite.scale(300, 100);
    let d = 2;
    let mut combo = 0u64;
    let mut tightest = f64::INFINITY;
    for entry in registry(d)? {
        let f = &entry.integrand;
        let norm1 = f.lp_norm(1.0).expect("registry entries have ||f||_1");
        for spec in standard_methods(d) {
            for &n in &[16usize, 256] {
                combo += 1;
                let values: Vec<f64> = (0..reps)
                    .map(|r| {
                        realize(&spec, f, n, &seed.stream(&[("c4", combo), ("rep", r as u64)]))
                            .map(|rec| rec.value.abs())
                    })
                    .collect::<Result<Vec<_>>>()?;
                let m = mean(&values);
                let se = standard_error(&values);
                let margin = norm1 + 4.0 * se + 1e-12 - m;
                tightest = tightest.min(margin);
                if margin < 0.0 {
                    return Ok((
                        false,
                        format!(
                            "operator norm violated: {} on {} at n={n}: E|S f| = {m:.6} > ||f||_1 = {norm1:.6} + 4SE",
                            spec.name(),
                            f.name()
                        ),
                    ));
                }
            }
        }
    }
    Ok((
        true,
        format!("{combo} cells satisfy E|S_n f| <= ||f||_1 + 4 SE; smallest margin {tightest:.3e}"),
    ))
}

/// The base-3 (0,d)-net property for d=2 at n=9 and n=27, before and after
/// nested uniform scrambling, across 100 scramble keys.
fn criterion_5(suite: Suite, seed: Seed) -> Outcome {
    let seeds = suite.scale(100, 25);
    for (n, m) in [(9usize, 2u32), (27, 3)] {
        let plain = faure(n, 2)?;
        if !is_zero_net(&plain, 3, m) {
            return Ok((false, format!("unscrambled faure n={n} is not a (0,{m},2)-net")));
        }
        let digits = faure_digits(n, 2)?.1;
        for s in 0..seeds {
            let stream = seed.stream(&[("c5", s as u64), ("n", n as u64)]);
            let key = ScrambleKey::new(&stream, 3, digit_depth(3), 2);
            let scrambled = nested_uniform_scramble(&digits, &key)?;
            if !is_zero_net(&scrambled, 3, m) {
                return Ok((
                    false,
                    format!("scrambled net property lost at n={n}, seed index {s}"),
                ));
            }
        }
    }
    Ok((
        true,
        format!("(0,m,2)-net property preserved for n in {{9, 27}} across {seeds} scramble keys"),
    ))
}

/// LHS stratification is exact every run for n in {10, 64, 1000}, d=5; the
/// pooled coordinates also pass a chi-square marginal-uniformity test (the
/// planted check that catches jitter-free midpoint mutants).
fn criterion_6(suite: Suite, seed: Seed) -> Outcome {
    let runs = suite.scale(5, 2);
    for &n in &[10usize, 64, 1000] {
        for s in 0..runs {
            let stream = seed.stream(&[("c6", s as u64), ("n", n as u64)]);
            let ps = latin_hypercube(n, 5, &stream)?;
            if !lhs_stratification_holds(&ps) {
                return Ok((false, format!("stratification violated at n={n}")));
            }
        }
    }
    // marginal uniformity on pooled coordinates
    let sets = suite.scale(200, 80);
    let mut per_dim: Vec<Vec<f64>> = vec![Vec::new(); 5];
    for s in 0..sets {
        let stream = seed.stream(&[("c6-chi", s as u64)]);
        let ps = latin_hypercube(10, 5, &stream)?;
        for j in 0..5 {
            per_dim[j].extend(ps.column(j));
        }
    }
    let crit = chi_square_critical(19, Z_999);
    for (j, values) in per_dim.iter().enumerate() {
        let stat = chi_square_uniform(values, 20);
        if stat >= crit {
            return Ok((
                false,
                format!("marginal chi-square {stat:.1} >= {crit:.1} in dimension {j}"),
            ));
        }
    }
    Ok((
        true,
        "stratification exact for n in {10, 64, 1000} d=5; marginals pass chi-square at level 0.001"
            .to_string(),
    ))
}

/// E[|det A_n|] = n and E[N_n] = n: dilation mean within 1% over 10^4 draws
/// (d=2, n=256) and realized-count mean within 4 SE over 2000 enumerations
/// (d=2, n=128).
fn criterion_7(suite: Suite, seed: Seed) -> Outcome {
    let gen = frolov_generator(2)?;
    let draws = suite.scale(10_000, 2_500);
    let mut dets = Vec::with_capacity(draws);
    for r in 0..draws {
        let mut stream = seed.stream(&[("c7-det", r as u64)]);
        dets.push(randomize_dilation(&gen, 256, &mut stream)?.det_a().abs());
    }
    let det_mean = mean(&dets);
    if (det_mean - 256.0).abs() > 0.01 * 256.0 {
        return Ok((
            false,
            format!("mean |det A| = {det_mean:.3} not within 1% of 256"),
        ));
    }

    let enums = suite.scale(2000, 500);
    let mut counts = Vec::with_capacity(enums);
    for r in 0..enums {
        let mut stream = seed.stream(&[("c7-count", r as u64)]);
        let dil = randomize_dilation(&gen, 128, &mut stream)?;
        counts.push(enumerate_points(&dil)?.count() as f64);
    }
    let count_mean = mean(&counts);
    let se = standard_error(&counts);
    if (count_mean - 128.0).abs() > 4.0 * se {
        return Ok((
            false,
            format!("mean N = {count_mean:.3} not within 4 SE ({se:.3}) of 128"),
        ));
    }
    Ok((
        true,
        format!(
            "mean |det A| = {det_mean:.2} (n=256, 1% band); mean N = {count_mean:.2} +- {:.2} (n=128)",
            4.0 * se
        ),
    ))
}

/// Frolov variance decay on the smooth bump (d=2): log-log slope over
/// n = 2^6..2^12 at R=200 must be <= -0.8.
fn criterion_8(suite: Suite, seed: Seed) -> Outcome {
    let reps = suite.scale(200, 50);
    let grid: Vec<usize> = (6..=12).map(|k| 1usize << k).collect();
    let cfg = StudyConfig::new(EstimatorSpec::new(Method::Frolov, 2), "bump", grid, reps)
        .with_seed(seed.stream(&[("c8", 0)]).fingerprint_seed())
        .with_eps(1.0);
    let result = replicate(&cfg)?;
    let slope = result.slopes[0].variance_slope;
    Ok((
        slope <= -0.8,
        format!("variance slope {slope:.2} over n = 2^6..2^12 (threshold -0.8)"),
    ))
}

/// Median amplification on the gamma=0.7 singular integrand: with eps chosen
/// so the k=1 Wilson upper failure bound stays below 1/4, the empirical
/// failure at k in {3,5,7} stays below 2^k alpha_bar^{k/2} plus Wilson
/// slack, and failures do not increase with k.
fn criterion_9(suite: Suite, seed: Seed) -> Outcome {
    let n = 1usize << 10;
    let spec = EstimatorSpec::new(Method::ScrambledNet, 1);
    let f = find(1, "singular-07")?.integrand;

    // Scale-aware eps from a pilot of 200 replications. The error law here
    // is skewed with its bulk well away from zero, so the threshold is the
    // pilot's median absolute error plus one robust scale; that puts the
    // k=1 failure probability near 0.1, small enough for the bound to bite
    // and large enough for the k > 1 failure counts to stay resolvable.
    let pilot: Vec<f64> = (0..200u64)
        .map(|r| realize(&spec, &f, n, &seed.stream(&[("c9-pilot", r)])).map(|rec| rec.value))
        .collect::<Result<Vec<_>>>()?;
    let abs_errors: Vec<f64> = pilot
        .iter()
        .map(|v| (v - f.exact_integral()).abs())
        .collect();
    let eps = crate::stats::median(&abs_errors) + robust_scale(&pilot);

    let reps = suite.scale(1500, 400);
    let cfg = StudyConfig::new(spec, "singular-07", vec![n], reps)
        .with_seed(seed.stream(&[("c9", 0)]).fingerprint_seed())
        .with_eps(eps)
        .with_k_list(vec![1, 3, 5, 7]);
    let report = amplification_study(&cfg)?;
    if report.alpha_bar >= 0.25 {
        return Ok((
            false,
            format!("alpha_bar = {:.3} >= 1/4 at eps = {eps:.3}", report.alpha_bar),
        ));
    }
    let rows: Vec<String> = report
        .rows
        .iter()
        .map(|r| match r.bound {
            Some(b) => format!("k={}: {:.4} (bound {:.4})", r.k, r.failure_prob, b),
            None => format!("k={}: {:.4}", r.k, r.failure_prob),
        })
        .collect();
    let passed = report.all_within_bound && report.nonincreasing;
    Ok((
        passed,
        format!(
            "eps = {eps:.3}, alpha_hat = {:.3}, alpha_bar = {:.3}; {}{}",
            report.alpha_hat,
            report.alpha_bar,
            rows.join("; "),
            if report.nonincreasing { "" } else { "; NOT nonincreasing" }
        ),
    ))
}

/// Convergence-in-mean trend on the gamma=0.5 singular integrand (L^1+ but
/// not L^2), d=1: every consistent method passes (negative slope, final
/// error < half the initial); the negative control on the box indicator
/// fails the same test.
fn criterion_10(suite: Suite, seed: Seed) -> Outcome {
    let reps = suite.scale(500, 150);
    let grid = vec![16usize, 64, 256, 1024, 4096];
    let mut details = Vec::new();
    for spec in [
        EstimatorSpec::new(Method::ScrambledNet, 1),
        EstimatorSpec::new(Method::CranleyPatterson(Substrate::Halton), 1),
        EstimatorSpec::new(Method::LatinHypercube, 1),
        EstimatorSpec::new(Method::Frolov, 1),
        EstimatorSpec::new(Method::Iid, 1),
    ] {
        let cfg = StudyConfig::new(spec, "singular-05", grid.clone(), reps)
            .with_seed(seed.stream(&[("c10", 0)]).fingerprint_seed())
            .with_eps(1.0);
        let report = mean_error_trend(&cfg)?;
        details.push(format!("{}: slope {:.2}", spec.name(), report.slope));
        if !report.pass {
            return Ok((
                false,
                format!(
                    "{} failed the trend test: slope {:.3}, first {:.4}, last {:.4}",
                    spec.name(),
                    report.slope,
                    report.first_error,
                    report.last_error
                ),
            ));
        }
    }
    let control = StudyConfig::new(
        EstimatorSpec::new(Method::NegativeControl(3), 1),
        "box",
        grid,
        reps,
    )
    .with_seed(seed.stream(&[("c10", 1)]).fingerprint_seed())
    .with_eps(1.0);
    let control_report = mean_error_trend(&control)?;
    if control_report.pass {
        return Ok((
            false,
            format!(
                "negative control passed the trend test (slope {:.3}) but must fail",
                control_report.slope
            ),
        ));
    }
    details.push(format!(
        "negative-control: slope {:.2} (fails as required)",
        control_report.slope
    ));
    Ok((true, details.join("; ")))
}

/// Strong-law trajectory study at the pinned desk-scale parameters:
/// scrambled-sequence median, p=1.4 (k = required_k(1.4)), gamma=0.7, d=1,
/// anchor N=2^10, eps=0.1, >= 95% of 50 seeds below eps.
///
/// Known limitation: on this integrand the estimator error at n=2^10 is
/// right-skewed with median about -0.21, double the 0.1 threshold, so the
/// median-of-k trajectories sit outside eps for nearly every seed at this
/// anchor; the check is kept at its stated parameters and reports the
/// measured gap. It passes only from roughly N = 2^14 onward or at eps
/// about 0.3.
fn criterion_11(suite: Suite, seed: Seed) -> Outcome {
    let seeds = suite.scale(50, 20);
    let k = required_k(1.4)?;
    let grid = vec![256usize, 512, 1024, 2048, 4096];
    let spec = EstimatorSpec::new(Method::ScrambledNet, 1);
    let report = slln_trajectory(
        &spec,
        "singular-07",
        1.4,
        &grid,
        k,
        0.1,
        seeds,
        seed.stream(&[("c11", 0)]).fingerprint_seed(),
    )?;
    let mut sups = report.tail_sups.clone();
    sups.sort_by(|a, b| a.partial_cmp(b).expect("finite sups"));
    let median_sup = sups[sups.len() / 2];
    let passed = report.fraction_below >= 0.95;
    Ok((
        passed,
        format!(
            "k={k}, anchor N={}, eps=0.1: fraction below = {:.2} (need >= 0.95); median tail sup = {median_sup:.3}",
            report.anchor_n, report.fraction_below
        ),
    ))
}

/// Discrepancy oracles: Warnock vs a Monte Carlo local-discrepancy integral,
/// the exact star discrepancy vs the 1-D closed form, and strict decay of
/// the Halton star discrepancy.
fn criterion_12(suite: Suite, seed: Seed) -> Outcome {
    // (a) Warnock^2 vs MC over anchor samples, n=16 Hammersley, d=2
    let ps = hammersley(16, 2)?;
    let warnock_sq = {
        let v = l2_star_discrepancy(&ps);
        v * v
    };
    let samples = suite.scale(1_000_000, 200_000);
    let mut stream = seed.stream(&[("c12-mc", 0)]);
    let mut acc = 0.0;
    for _ in 0..samples {
        let ya = stream.next_f64();
        let yb = stream.next_f64();
        let count = ps
            .iter_points()
            .filter(|p| p[0] < ya && p[1] < yb)
            .count();
        let g = ya * yb - count as f64 / 16.0;
        acc += g * g;
    }
    let mc = acc / samples as f64;
    if (warnock_sq - mc).abs() > 1e-3 {
        return Ok((
            false,
            format!("Warnock^2 {warnock_sq:.6e} vs MC {mc:.6e} differ by more than 1e-3"),
        ));
    }

    // (b) exact star vs the 1-D closed form on 100 random sets
    let mut stream = seed.stream(&[("c12-1d", 0)]);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let n = 1 + stream.next_below(40) as usize;
        let xs = stream.uniform01(n);
        let ps = PointSet::new(
            xs.clone(),
            n,
            1,
            crate::point_set::Provenance::deterministic("random", &[]),
        )?;
        let exact = star_discrepancy_exact(&ps)?.star.expect("within budget");
        let mut sorted = xs;
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let nf = n as f64;
        let mut oracle = 0.0f64;
        for (i, &x) in sorted.iter().enumerate() {
            let rank = (i + 1) as f64;
            oracle = oracle.max((x - (rank - 1.0) / nf).abs());
            oracle = oracle.max((x - rank / nf).abs());
        }
        worst = worst.max((exact - oracle).abs());
        if (exact - oracle).abs() > 1e-12 {
            return Ok((
                false,
                format!("1-D star mismatch at trial {trial}: {exact} vs {oracle}"),
            ));
        }
    }

    // (c) Halton d=2 star discrepancy strictly decreasing over {2^4, 2^6, 2^8}
    let mut last = f64::INFINITY;
    let mut stars = Vec::new();
    for k in [4u32, 6, 8] {
        let star = star_discrepancy_exact(&halton(1 << k, 2)?)?
            .star
            .expect("within budget");
        stars.push(format!("2^{k}: {star:.4}"));
        if star >= last {
            return Ok((false, format!("Halton star discrepancy not decreasing: {}", stars.join(", "))));
        }
        last = star;
    }
    Ok((
        true,
        format!(
            "Warnock^2 {warnock_sq:.3e} vs MC {mc:.3e}; 1-D closed form max gap {worst:.1e}; Halton stars {}",
            stars.join(", ")
        ),
    ))
}

/// Byte-identical CSV output for the same experiment at worker counts 1 and
/// 4.
fn criterion_13(_suite: Suite, seed: Seed) -> Outcome {
    let base = StudyConfig::new(
        EstimatorSpec::new(Method::LatinHypercube, 2),
        "exp-sum",
        vec![16, 64],
        100,
    )
    .with_seed(seed.stream(&[("c13", 0)]).fingerprint_seed())
    .with_k_list(vec![1, 3]);
    let serial = replicate(&base.clone().with_workers(1))?;
    let parallel = replicate(&base.with_workers(4))?;
    let identical = serial.to_csv() == parallel.to_csv();
    Ok((
        identical,
        if identical {
            "CSV byte-identical across worker counts {1, 4}".to_string()
        } else {
            "CSV differs between worker counts".to_string()
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomize::lhs_stratification_holds;
    use crate::rng::RngStream;

    /// Midpoint (jitter-free) LHS mutant: stratification still holds and the
    /// estimator is still unbiased for many integrands, but the pooled
    /// coordinates are lattice-like and the criterion-6 chi-square check
    /// must reject them.
    fn midpoint_lhs(n: usize, d: usize, stream: &RngStream) -> PointSet {
        let mut coords = vec![0.0f64; n * d];
        for j in 0..d {
            let mut perm_stream = stream.derive("perm", j as u64);
            let perm = perm_stream.permutation(n);
            for (i, &stratum) in perm.iter().enumerate() {
                coords[i * d + j] = (stratum as f64 + 0.5) / n as f64;
            }
        }
        PointSet::new(
            coords,
            n,
            d,
            crate::point_set::Provenance::deterministic("midpoint-lhs", &[]),
        )
        .unwrap()
    }

    #[test]
    fn chi_square_check_catches_midpoint_lhs_mutant() {
        let seed = Seed(909);
        let mut per_dim: Vec<Vec<f64>> = vec![Vec::new(); 5];
        for s in 0..200u64 {
            let stream = seed.stream(&[("mutant", s)]);
            let ps = midpoint_lhs(10, 5, &stream);
            assert!(
                lhs_stratification_holds(&ps),
                "mutant keeps stratification, the planted check must catch it instead"
            );
            for j in 0..5 {
                per_dim[j].extend(ps.column(j));
            }
        }
        let crit = chi_square_critical(19, Z_999);
        let mut detected = false;
        for values in &per_dim {
            if chi_square_uniform(values, 20) >= crit {
                detected = true;
            }
        }
        assert!(detected, "chi-square failed to flag midpoint mutant");
    }

    #[test]
    fn fast_criteria_pass() {
        for id in [1usize, 5, 6, 13] {
            let report = run_criterion(id, Suite::Quick, default_seed());
            assert!(report.passed, "criterion {id}: {}", report.detail);
        }
    }

    #[test]
    fn verdict_json_schema() {
        let reports = vec![run_criterion(13, Suite::Quick, default_seed())];
        let doc: serde_json::Value =
            serde_json::from_str(&verdict_json(Suite::Quick, default_seed(), &reports)).unwrap();
        assert_eq!(doc["schema_version"], 1);
        assert_eq!(doc["suite"], "quick");
        assert!(doc["criteria"].as_array().unwrap().len() == 1);
    }

    #[test]
    fn unknown_criterion_id_reports_failure() {
        let report = run_criterion(99, Suite::Quick, default_seed());
        assert!(!report.passed);
    }
}
