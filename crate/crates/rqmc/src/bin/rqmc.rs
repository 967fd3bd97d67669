//! Batch command-line surface: generate point sets, run single estimates,
//! run replication experiments, and execute the verification suite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 resource/budget refusal.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rqmc::estimators::{
    median_of_k_detailed, realize, EstimatorSpec, MedianConfig, Method, Substrate,
};
use rqmc::frolov::{enumerate_points, frolov_generator, randomize_dilation};
use rqmc::harness::{replicate, StudyConfig};
use rqmc::randomize::{cranley_patterson, latin_hypercube, Rotation};
use rqmc::scramble::ScrambledSequence;
use rqmc::sequences::{faure, halton, hammersley, rank1_lattice, LatticeRule};
use rqmc::testfunctions::find;
use rqmc::verify::{run_suite, verdict_json, CriterionReport, Suite};
use rqmc::{Error, PointSet, Provenance, Seed};

const SEED_ENV: &str = "RQMC_SEED";

#[derive(Parser)]
#[command(name = "rqmc", version, about = "randomized quasi-Monte Carlo toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a point set and write it with a provenance header.
    Points(PointsArgs),
    /// Run a single integration estimate and print one machine-readable line.
    Integrate(IntegrateArgs),
    /// Run a replication experiment and write JSON + CSV results.
    Experiment(ExperimentArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct PointsArgs {
    /// halton | hammersley | faure | lattice | lhs | scrambled-net | iid |
    /// cranley-patterson | frolov
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Substrate for cranley-patterson: halton | hammersley | lattice
    #[arg(long)]
    substrate: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
    /// key=value file supplying defaults for any flag above
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct IntegrateArgs {
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    integrand: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    /// Odd median order (1 = plain estimator)
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    substrate: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    integrand: Option<String>,
    #[arg(long)]
    d: Option<usize>,
    /// Comma-separated strictly increasing budgets, e.g. 16,64,256
    #[arg(long)]
    n_grid: Option<String>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    /// Comma-separated odd median orders, e.g. 1,3,5
    #[arg(long)]
    k_list: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    substrate: Option<String>,
    /// Output prefix; writes <prefix>.json and <prefix>.csv
    #[arg(long)]
    out_prefix: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// quick (reduced replication counts) or full
    #[arg(long, default_value = "quick")]
    suite: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Verdict JSON path; the full suite always writes one
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Points(args) => cmd_points(args),
        Command::Integrate(args) => cmd_integrate(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match code {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BudgetExceeded { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

/// key=value lines; '#' starts a comment. Keys mirror the long flag names.
fn read_config(path: &Path) -> Result<HashMap<String, String>, Error> {
    let text = fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::InvalidParameter(format!(
                "config line {} is not key=value: '{line}'",
                lineno + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn fill<T, F>(
    slot: &mut Option<T>,
    config: &HashMap<String, String>,
    key: &str,
    parse: F,
) -> Result<(), Error>
where
    F: FnOnce(&str) -> Result<T, Error>,
{
    if slot.is_none() {
        if let Some(raw) = config.get(key) {
            *slot = Some(parse(raw)?);
        }
    }
    Ok(())
}

fn parse_usize(raw: &str) -> Result<usize, Error> {
    raw.parse()
        .map_err(|_| Error::InvalidParameter(format!("expected an integer, got '{raw}'")))
}

fn parse_u64(raw: &str) -> Result<u64, Error> {
    raw.parse()
        .map_err(|_| Error::InvalidParameter(format!("expected an integer, got '{raw}'")))
}

fn parse_f64(raw: &str) -> Result<f64, Error> {
    raw.parse()
        .map_err(|_| Error::InvalidParameter(format!("expected a real, got '{raw}'")))
}

fn parse_list(raw: &str) -> Result<Vec<usize>, Error> {
    raw.split(',')
        .map(|part| parse_usize(part.trim()))
        .collect()
}

fn env_seed() -> Option<u64> {
    std::env::var(SEED_ENV).ok().and_then(|s| s.parse().ok())
}

fn resolve_seed(flag: Option<u64>) -> Seed {
    Seed(flag.or_else(env_seed).unwrap_or(0))
}

fn parse_substrate(raw: &str) -> Result<Substrate, Error> {
    match raw {
        "halton" => Ok(Substrate::Halton),
        "hammersley" => Ok(Substrate::Hammersley),
        "lattice" => Ok(Substrate::Lattice),
        other => Err(Error::InvalidParameter(format!(
            "unknown substrate '{other}'"
        ))),
    }
}

fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, Error> {
    value.ok_or_else(|| Error::InvalidParameter(format!("missing required flag --{flag}")))
}

fn cmd_points(mut args: PointsArgs) -> Result<ExitCode, Error> {
    let config = match &args.config {
        Some(p) => read_config(p)?,
        None => HashMap::new(),
    };
    fill(&mut args.method, &config, "method", |s| Ok(s.to_string()))?;
    fill(&mut args.n, &config, "n", parse_usize)?;
    fill(&mut args.d, &config, "d", parse_usize)?;
    fill(&mut args.seed, &config, "seed", parse_u64)?;
    fill(&mut args.substrate, &config, "substrate", |s| {
        Ok(s.to_string())
    })?;
    fill(&mut args.out, &config, "out", |s| Ok(PathBuf::from(s)))?;
    fill(&mut args.format, &config, "format", |s| match s {
        "csv" => Ok(FileFormat::Csv),
        "json" => Ok(FileFormat::Json),
        other => Err(Error::InvalidParameter(format!(
            "unknown format '{other}'"
        ))),
    })?;

    let method = require(args.method, "method")?;
    let n = require(args.n, "n")?;
    let d = require(args.d, "d")?;
    let out = require(args.out, "out")?;
    let format = args.format.unwrap_or(FileFormat::Csv);
    let seed = resolve_seed(args.seed);
    let substrate = parse_substrate(args.substrate.as_deref().unwrap_or("halton"))?;

    let (points, extra): (PointSet, Vec<(String, String)>) = match method.as_str() {
        "halton" => (halton(n, d)?, vec![]),
        "hammersley" => (hammersley(n, d)?, vec![]),
        "faure" => (faure(n, d)?, vec![]),
        "lattice" => {
            let rule = if d == 1 {
                LatticeRule::new(n, vec![1])?
            } else {
                LatticeRule::korobov_searched(n, d)?
            };
            (rank1_lattice(&rule)?, vec![])
        }
        "lhs" => (
            latin_hypercube(n, d, &seed.stream(&[("points", 0)]))?,
            vec![],
        ),
        "scrambled-net" => {
            let seq = ScrambledSequence::new(d, &seed.stream(&[("points", 0)]))?;
            (seq.points(n)?, vec![])
        }
        "iid" => {
            let mut stream = seed.stream(&[("points", 0)]);
            let coords = stream.uniform01(n * d);
            (
                PointSet::new(
                    coords,
                    n,
                    d,
                    Provenance::randomized("iid", &[("n", n.to_string())], seed),
                )?,
                vec![],
            )
        }
        "cranley-patterson" => {
            let base = match substrate {
                Substrate::Halton => halton(n, d)?,
                Substrate::Hammersley => hammersley(n, d)?,
                Substrate::Lattice => {
                    if d == 1 {
                        rank1_lattice(&LatticeRule::new(n, vec![1])?)?
                    } else {
                        rank1_lattice(&LatticeRule::korobov_searched(n, d)?)?
                    }
                }
            };
            let mut stream = seed.stream(&[("points", 0)]);
            let rotation = Rotation::random(d, &mut stream);
            (cranley_patterson(&base, &rotation)?, vec![])
        }
        "frolov" => {
            let gen = frolov_generator(d)?;
            let mut stream = seed.stream(&[("points", 0)]);
            let dilation = randomize_dilation(&gen, n, &mut stream)?;
            let sample = enumerate_points(&dilation)?;
            let mut coords = Vec::with_capacity(sample.count() * d);
            for p in sample.iter_points() {
                coords.extend_from_slice(p);
            }
            let count = sample.count();
            (
                PointSet::new(
                    coords,
                    count,
                    d,
                    Provenance::randomized("frolov", &[("n", n.to_string())], seed),
                )?,
                vec![
                    ("det_a".to_string(), fmt_real(sample.det_a().abs())),
                    ("count".to_string(), count.to_string()),
                ],
            )
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown point method '{other}'"
            )))
        }
    };

    let text = match format {
        FileFormat::Csv => points_csv(&points, seed, &extra),
        FileFormat::Json => points_json(&points, seed, &extra),
    };
    fs::write(&out, text)?;
    println!("wrote {} points to {}", points.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn points_csv(points: &PointSet, seed: Seed, extra: &[(String, String)]) -> String {
    let prov = points.provenance();
    let mut out = String::new();
    out.push_str("# schema_version=1\n");
    out.push_str(&format!("# method={}\n", prov.method));
    for (k, v) in &prov.params {
        out.push_str(&format!("# {k}={v}\n"));
    }
    for (k, v) in extra {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str(&format!("# seed={}\n", seed.0));
    let header: Vec<String> = (0..points.dimension()).map(|j| format!("x{j}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for p in points.iter_points() {
        let row: Vec<String> = p.iter().map(|&x| fmt_real(x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn points_json(points: &PointSet, seed: Seed, extra: &[(String, String)]) -> String {
    let prov = points.provenance();
    let rows: Vec<Vec<f64>> = points.iter_points().map(|p| p.to_vec()).collect();
    let params: serde_json::Map<String, serde_json::Value> = prov
        .params
        .iter()
        .chain(extra.iter())
        .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({
        "schema_version": 1,
        "provenance": {
            "method": prov.method,
            "params": params,
            "seed": seed.0,
        },
        "n": points.len(),
        "d": points.dimension(),
        "points": rows,
    }))
    .expect("serializable point set")
}

fn spec_from(method: &str, d: usize, substrate: Option<&str>) -> Result<EstimatorSpec, Error> {
    if method == "cranley-patterson" {
        let sub = parse_substrate(substrate.unwrap_or("halton"))?;
        return Ok(EstimatorSpec::new(Method::CranleyPatterson(sub), d));
    }
    EstimatorSpec::parse(method, d)
}

fn cmd_integrate(mut args: IntegrateArgs) -> Result<ExitCode, Error> {
    let config = match &args.config {
        Some(p) => read_config(p)?,
        None => HashMap::new(),
    };
    fill(&mut args.method, &config, "method", |s| Ok(s.to_string()))?;
    fill(&mut args.integrand, &config, "integrand", |s| {
        Ok(s.to_string())
    })?;
    fill(&mut args.n, &config, "n", parse_usize)?;
    fill(&mut args.d, &config, "d", parse_usize)?;
    fill(&mut args.k, &config, "k", parse_usize)?;
    fill(&mut args.seed, &config, "seed", parse_u64)?;
    fill(&mut args.substrate, &config, "substrate", |s| {
        Ok(s.to_string())
    })?;

    let method = require(args.method, "method")?;
    let integrand = require(args.integrand, "integrand")?;
    let n = require(args.n, "n")?;
    let d = require(args.d, "d")?;
    let k = args.k.unwrap_or(1);
    let seed = resolve_seed(args.seed);

    let spec = spec_from(&method, d, args.substrate.as_deref())?;
    let entry = find(d, &integrand)?;
    let f = &entry.integrand;
    let cfg = MedianConfig::new(k)?;
    let stream = seed.stream(&[("integrate", 0)]);

    let (estimate, evaluations) = if k == 1 {
        let record = realize(&spec, f, n, &stream.derive("median-rep", 0))?;
        (record.value, record.evaluations_used)
    } else {
        median_of_k_detailed(&spec, f, n, cfg, &stream)?
    };
    let exact = f.exact_integral();
    let mut line = format!(
        "method={} integrand={} d={d} n={n} k={k} seed={} estimate={} evaluations={evaluations} exact={} error={}",
        spec.name(),
        f.name(),
        seed.0,
        fmt_real(estimate),
        fmt_real(exact),
        fmt_real((estimate - exact).abs()),
    );
    if matches!(spec.method, Method::Frolov) && k == 1 {
        // report the realized weight alongside the count
        let gen = frolov_generator(d)?;
        let mut s = stream.derive("median-rep", 0).derive("frolov", 0);
        let dil = randomize_dilation(&gen, n, &mut s)?;
        line.push_str(&format!(" det_a={}", fmt_real(dil.det_a().abs())));
    }
    println!("{line}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_experiment(mut args: ExperimentArgs) -> Result<ExitCode, Error> {
    let config = match &args.config {
        Some(p) => read_config(p)?,
        None => HashMap::new(),
    };
    fill(&mut args.method, &config, "method", |s| Ok(s.to_string()))?;
    fill(&mut args.integrand, &config, "integrand", |s| {
        Ok(s.to_string())
    })?;
    fill(&mut args.d, &config, "d", parse_usize)?;
    fill(&mut args.n_grid, &config, "n-grid", |s| Ok(s.to_string()))?;
    fill(&mut args.replications, &config, "replications", parse_usize)?;
    fill(&mut args.eps, &config, "eps", parse_f64)?;
    fill(&mut args.k_list, &config, "k-list", |s| Ok(s.to_string()))?;
    fill(&mut args.seed, &config, "seed", parse_u64)?;
    fill(&mut args.workers, &config, "workers", parse_usize)?;
    fill(&mut args.substrate, &config, "substrate", |s| {
        Ok(s.to_string())
    })?;
    fill(&mut args.out_prefix, &config, "out-prefix", |s| {
        Ok(PathBuf::from(s))
    })?;

    let method = require(args.method, "method")?;
    let integrand = require(args.integrand, "integrand")?;
    let d = require(args.d, "d")?;
    let n_grid = parse_list(&require(args.n_grid, "n-grid")?)?;
    let replications = require(args.replications, "replications")?;
    let out_prefix = require(args.out_prefix, "out-prefix")?;
    let seed = resolve_seed(args.seed);

    let spec = spec_from(&method, d, args.substrate.as_deref())?;
    let mut study = StudyConfig::new(spec, &integrand, n_grid, replications)
        .with_seed(seed)
        .with_workers(args.workers.unwrap_or(1));
    if let Some(eps) = args.eps {
        study = study.with_eps(eps);
    }
    if let Some(raw) = args.k_list {
        study = study.with_k_list(parse_list(&raw)?);
    }
    let result = replicate(&study)?;

    let json_path = out_prefix.with_extension("json");
    let csv_path = out_prefix.with_extension("csv");
    fs::write(&json_path, result.to_json())?;
    fs::write(&csv_path, result.to_csv())?;
    println!("wrote {} and {}", json_path.display(), csv_path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let suite = match args.suite.as_str() {
        "quick" => Suite::Quick,
        "full" => Suite::Full,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown suite '{other}' (expected quick or full)"
            )))
        }
    };
    let seed = args
        .seed
        .or_else(env_seed)
        .map(Seed)
        .unwrap_or_else(rqmc::verify::default_seed);
    let reports = run_suite(suite, seed);
    for r in &reports {
        print_report(r);
    }
    let out = args
        .out
        .or_else(|| matches!(suite, Suite::Full).then(|| PathBuf::from("verify_verdict.json")));
    if let Some(path) = out {
        fs::write(&path, verdict_json(suite, seed, &reports))?;
        println!("verdict written to {}", path.display());
    }
    let failures: Vec<&CriterionReport> = reports.iter().filter(|r| !r.passed).collect();
    if failures.is_empty() {
        println!("all {} criteria passed", reports.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!(
            "{} of {} criteria failed: {}",
            failures.len(),
            reports.len(),
            failures
                .iter()
                .map(|r| format!("{:02} ({})", r.id, r.name))
                .collect::<Vec<_>>()
                .join(", ")
        );
        Ok(ExitCode::from(1))
    }
}

fn print_report(r: &CriterionReport) {
    println!(
        "criterion {:02} {:<34} {}  [{:>6.1}s]  {}",
        r.id,
        r.name,
        if r.passed { "PASS" } else { "FAIL" },
        r.seconds,
        r.detail
    );
}
