//! Replication studies: unbiasedness and variance tables, convergence-in-mean
//! trends, median failure-probability amplification, strong-law trajectories
//! along prefix-consistent streams, and subsequence studies.
//!
//! Every study is a deterministic function of its config. Replications run on
//! a worker pool but are keyed by (budget index, replication index) through
//! derived streams and reduced in index order, so the output is independent
//! of the worker count.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{median_of_values, realize, required_k, EstimatorSpec, Method};
use crate::integrand::Integrand;
use crate::rng::Seed;
use crate::scramble::ScrambledSequence;
use crate::stats::{
    log_log_slope, mean, mean_and_variance, median_of_ns, wilson_interval, Z_95,
};
use crate::testfunctions::find;

/// Configuration of a replication study.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub spec: EstimatorSpec,
    pub integrand: String,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    /// Failure threshold; `None` selects the scale-aware default
    /// 0.25 * (pilot standard deviation at the smallest budget).
    pub eps: Option<f64>,
    /// Median orders; must be odd. 1 means the plain estimator.
    pub k_list: Vec<usize>,
    pub master_seed: Seed,
    pub workers: usize,
}

impl StudyConfig {
    pub fn new(
        spec: EstimatorSpec,
        integrand: &str,
        n_grid: Vec<usize>,
        replications: usize,
    ) -> Self {
        StudyConfig {
            spec,
            integrand: integrand.to_string(),
            n_grid,
            replications,
            eps: None,
            k_list: vec![1],
            master_seed: Seed(0),
            workers: 1,
        }
    }

    pub fn with_seed(mut self, seed: Seed) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = Some(eps);
        self
    }

    pub fn with_k_list(mut self, k_list: Vec<usize>) -> Self {
        self.k_list = k_list;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::InvalidParameter("empty budget grid".into()));
        }
        if !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "budget grid must be strictly increasing".into(),
            ));
        }
        if self.replications < 2 {
            return Err(Error::InvalidParameter(
                "need at least 2 replications".into(),
            ));
        }
        if self.k_list.is_empty() || self.k_list.iter().any(|&k| k == 0 || k % 2 == 0) {
            return Err(Error::EvenMedianOrder(
                self.k_list
                    .iter()
                    .copied()
                    .find(|&k| k % 2 == 0)
                    .unwrap_or(0),
            ));
        }
        Ok(())
    }

    fn integrand(&self) -> Result<Integrand> {
        Ok(find(self.spec.dimension, &self.integrand)?.integrand)
    }
}

/// Statistics of one (budget, median order) cell.
#[derive(Debug, Clone, Serialize)]
pub struct CellStats {
    pub n: usize,
    pub k: usize,
    pub replications: usize,
    pub mean: f64,
    pub mean_abs_error: f64,
    pub variance: f64,
    pub failure_prob: f64,
    pub failure_lo: f64,
    pub failure_hi: f64,
    pub mean_evaluations: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeFit {
    pub k: usize,
    pub variance_slope: f64,
    pub mean_error_slope: f64,
}

/// Full output of [`replicate`].
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub schema_version: u32,
    pub method: String,
    pub integrand: String,
    pub dimension: usize,
    pub exact_integral: f64,
    pub seed: u64,
    pub eps_used: f64,
    pub rows: Vec<CellStats>,
    /// Log-log least-squares slopes per k, when the grid has >= 3 points.
    pub slopes: Vec<SlopeFit>,
}

fn fmt_real(x: f64) -> String {
    // 17 significant digits round-trip doubles exactly
    format!("{x:.16e}")
}

impl ExperimentResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable result")
    }

    /// Flat CSV: one row per (n, k) cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# schema_version=1\n");
        out.push_str(
            "method,integrand,d,n,k,R,mean,mean_abs_error,variance,fail_prob,fail_lo,fail_hi,mean_evals,seed\n",
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                self.method,
                self.integrand,
                self.dimension,
                row.n,
                row.k,
                row.replications,
                fmt_real(row.mean),
                fmt_real(row.mean_abs_error),
                fmt_real(row.variance),
                fmt_real(row.failure_prob),
                fmt_real(row.failure_lo),
                fmt_real(row.failure_hi),
                fmt_real(row.mean_evaluations),
                self.seed,
            ));
        }
        out
    }
}

fn run_indexed<T, F>(workers: usize, count: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if workers <= 1 {
        (0..count).map(job).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("worker pool");
        pool.install(|| (0..count).into_par_iter().map(job).collect())
    }
}

/// One replication cell: the values and evaluation counts of `k_max`
/// realizations drawn from sub-streams ("median-rep", j) of the replication
/// stream. Median orders read prefixes of this pool, so the k=1 column is
/// exactly the raw estimator.
fn realization_pool(
    config: &StudyConfig,
    f: &Integrand,
    n: usize,
    n_index: usize,
    rep: usize,
    k_max: usize,
) -> Result<(Vec<f64>, Vec<usize>)> {
    let stream = config
        .master_seed
        .stream(&[("n", n_index as u64), ("rep", rep as u64)]);
    let mut values = Vec::with_capacity(k_max);
    let mut evals = Vec::with_capacity(k_max);
    for j in 0..k_max {
        let record =
            realize(&config.spec, f, n, &stream.derive("median-rep", j as u64)).map_err(|e| {
                Error::InvalidParameter(format!(
                    "method {} refused at n={n}: {e}",
                    config.spec.name()
                ))
            })?;
        values.push(record.value);
        evals.push(record.evaluations_used);
    }
    Ok((values, evals))
}

/// Pilot-based default failure threshold: 0.25 times the sample standard
/// deviation of the estimator at the smallest budget.
fn default_eps(config: &StudyConfig, f: &Integrand) -> Result<f64> {
    let n = config.n_grid[0];
    let reps = config.replications.min(64).max(8);
    let values: Vec<f64> = (0..reps)
        .map(|r| {
            let stream = config.master_seed.stream(&[("pilot", r as u64)]);
            realize(&config.spec, f, n, &stream).map(|rec| rec.value)
        })
        .collect::<Result<Vec<_>>>()?;
    let (_, var) = mean_and_variance(&values);
    Ok(0.25 * var.sqrt())
}

/// Runs the replication grid and aggregates all statistics.
pub fn replicate(config: &StudyConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let f = config.integrand()?;
    let exact = f.exact_integral();
    let eps_used = match config.eps {
        Some(e) => e,
        None => default_eps(config, &f)?,
    };
    let k_max = *config.k_list.iter().max().expect("non-empty k list");

    let mut rows = Vec::new();
    let mut per_k_cells: Vec<Vec<(f64, f64)>> = vec![Vec::new(); config.k_list.len()];
    for (n_index, &n) in config.n_grid.iter().enumerate() {
        let pools: Vec<Result<(Vec<f64>, Vec<usize>)>> =
            run_indexed(config.workers, config.replications, |rep| {
                realization_pool(config, &f, n, n_index, rep, k_max)
            });
        let pools = pools.into_iter().collect::<Result<Vec<_>>>()?;

        for (ki, &k) in config.k_list.iter().enumerate() {
            let medians: Vec<f64> = pools
                .iter()
                .map(|(values, _)| median_of_values(&values[..k]))
                .collect();
            let eval_counts: Vec<f64> = pools
                .iter()
                .flat_map(|(_, evals)| evals[..k].iter().map(|&e| e as f64))
                .collect();
            let (mean_value, variance) = mean_and_variance(&medians);
            let abs_errors: Vec<f64> = medians.iter().map(|v| (v - exact).abs()).collect();
            let failures = abs_errors.iter().filter(|&&e| e > eps_used).count();
            let (lo, hi) = wilson_interval(failures, medians.len(), Z_95);
            let cell = CellStats {
                n,
                k,
                replications: medians.len(),
                mean: mean_value,
                mean_abs_error: mean(&abs_errors),
                variance,
                failure_prob: failures as f64 / medians.len() as f64,
                failure_lo: lo,
                failure_hi: hi,
                mean_evaluations: mean(&eval_counts),
            };
            per_k_cells[ki].push((n as f64, cell.variance));
            rows.push(cell);
        }
    }

    let mut slopes = Vec::new();
    if config.n_grid.len() >= 3 {
        for (ki, &k) in config.k_list.iter().enumerate() {
            let var_points = &per_k_cells[ki];
            let err_points: Vec<(f64, f64)> = rows
                .iter()
                .filter(|c| c.k == k)
                .map(|c| (c.n as f64, c.mean_abs_error))
                .collect();
            slopes.push(SlopeFit {
                k,
                variance_slope: log_log_slope(var_points),
                mean_error_slope: log_log_slope(&err_points),
            });
        }
    }

    Ok(ExperimentResult {
        schema_version: 1,
        method: config.spec.name(),
        integrand: config.integrand.clone(),
        dimension: config.spec.dimension,
        exact_integral: exact,
        seed: config.master_seed.0,
        eps_used,
        rows,
        slopes,
    })
}

/// Verdict of the convergence-in-mean trend test.
#[derive(Debug, Clone, Serialize)]
pub struct TrendReport {
    pub slope: f64,
    pub first_error: f64,
    pub last_error: f64,
    pub pass: bool,
    pub result: ExperimentResult,
}

/// Fits the log-log slope of the mean absolute error against n; passes iff
/// the slope is negative and the final error is below half the initial one.
pub fn mean_error_trend(config: &StudyConfig) -> Result<TrendReport> {
    if config.n_grid.len() < 4 {
        return Err(Error::InvalidParameter(
            "trend test needs at least 4 grid points".into(),
        ));
    }
    let mut cfg = config.clone();
    cfg.k_list = vec![1];
    let result = replicate(&cfg)?;
    let points: Vec<(f64, f64)> = result
        .rows
        .iter()
        .map(|c| (c.n as f64, c.mean_abs_error))
        .collect();
    let slope = log_log_slope(&points);
    let first_error = points.first().unwrap().1;
    let last_error = points.last().unwrap().1;
    let pass = slope < 0.0 && last_error < 0.5 * first_error;
    Ok(TrendReport {
        slope,
        first_error,
        last_error,
        pass,
        result,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AmplificationRow {
    pub k: usize,
    pub failures: usize,
    pub failure_prob: f64,
    pub failure_hi: f64,
    /// 2^k alpha_bar^{k/2} evaluated at the Wilson upper bound of the k=1
    /// failure probability; None for the k=1 row itself.
    pub bound: Option<f64>,
    pub within_bound: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AmplificationReport {
    pub n: usize,
    pub eps: f64,
    pub alpha_hat: f64,
    pub alpha_bar: f64,
    pub rows: Vec<AmplificationRow>,
    pub all_within_bound: bool,
    pub nonincreasing: bool,
}

/// Estimates the k=1 failure probability, its Wilson upper bound
/// `alpha_bar`, and checks each median order against the amplification bound
/// plus Wilson slack. Runs at the first budget of the grid.
pub fn amplification_study(config: &StudyConfig) -> Result<AmplificationReport> {
    config.validate()?;
    let mut k_list = config.k_list.clone();
    if !k_list.contains(&1) {
        k_list.insert(0, 1);
    }
    k_list.sort_unstable();
    let mut cfg = config.clone();
    cfg.k_list = k_list.clone();
    cfg.n_grid = vec![config.n_grid[0]];
    let result = replicate(&cfg)?;

    let cell_for = |k: usize| {
        result
            .rows
            .iter()
            .find(|c| c.k == k)
            .expect("cell for every k")
    };
    let base = cell_for(1);
    let alpha_hat = base.failure_prob;
    let alpha_bar = base.failure_hi;

    let mut rows = Vec::new();
    let mut all_within = true;
    for &k in &k_list {
        let cell = cell_for(k);
        let (bound, within) = if k == 1 {
            (None, true)
        } else {
            let b = crate::estimators::median_failure_bound(alpha_bar, k)?;
            let slack = cell.failure_hi - cell.failure_prob;
            let w = cell.failure_prob <= b + slack;
            (Some(b), w)
        };
        all_within &= within;
        rows.push(AmplificationRow {
            k,
            failures: (cell.failure_prob * cell.replications as f64).round() as usize,
            failure_prob: cell.failure_prob,
            failure_hi: cell.failure_hi,
            bound,
            within_bound: within,
        });
    }
    let nonincreasing = rows
        .windows(2)
        .all(|w| w[1].failure_prob <= w[0].failure_prob + 1e-15);
    Ok(AmplificationReport {
        n: cfg.n_grid[0],
        eps: result.eps_used,
        alpha_hat,
        alpha_bar,
        rows,
        all_within_bound: all_within,
        nonincreasing,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryReport {
    pub n_grid: Vec<usize>,
    /// Anchor N = median of the budget grid; the tail sup runs over grid
    /// budgets >= N.
    pub anchor_n: usize,
    pub eps: f64,
    pub k: usize,
    pub tail_sups: Vec<f64>,
    pub fraction_below: f64,
}

/// Median-of-k trajectories along nested prefixes of a prefix-consistent
/// stream (scrambled sequence or iid); reports, per seed, the sup of
/// |S_{n,k} f - I(f)| over grid budgets >= the anchor N, and the fraction of
/// seeds whose tail sup stays below eps.
#[allow(clippy::too_many_arguments)]
pub fn slln_trajectory(
    spec: &EstimatorSpec,
    integrand: &str,
    p: f64,
    n_grid: &[usize],
    k: usize,
    eps: f64,
    seeds: usize,
    master_seed: Seed,
) -> Result<TrajectoryReport> {
    match spec.method {
        Method::ScrambledNet | Method::Iid => {}
        _ => return Err(Error::NotPrefixConsistent(spec.name())),
    }
    if n_grid.is_empty() || !n_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter(
            "budget grid must be non-empty and strictly increasing".into(),
        ));
    }
    if k % 2 == 0 || k == 0 {
        return Err(Error::EvenMedianOrder(k));
    }
    let k_min = required_k(p)?;
    if k < k_min {
        return Err(Error::InvalidParameter(format!(
            "k = {k} below required_k({p}) = {k_min}"
        )));
    }
    let f = find(spec.dimension, integrand)?.integrand;
    let exact = f.exact_integral();
    let anchor_n = median_of_ns(n_grid);

    let mut tail_sups = Vec::with_capacity(seeds);
    for s in 0..seeds {
        // trajectories[j][gi] = S_n^{(j)} at grid point gi
        let mut trajectories = vec![vec![0.0f64; n_grid.len()]; k];
        for (j, traj) in trajectories.iter_mut().enumerate() {
            let stream = master_seed.stream(&[("slln-seed", s as u64), ("traj", j as u64)]);
            match spec.method {
                Method::ScrambledNet => {
                    let seq = ScrambledSequence::new(spec.dimension, &stream)?;
                    let mut buf = vec![0.0; spec.dimension];
                    let mut running = RunningMean::new();
                    let mut gi = 0;
                    for i in 0..*n_grid.last().unwrap() as u64 {
                        seq.point_into(i, &mut buf);
                        running.push(f.evaluate(&buf));
                        if (i + 1) as usize == n_grid[gi] {
                            traj[gi] = running.mean();
                            gi += 1;
                        }
                    }
                }
                Method::Iid => {
                    let mut stream = stream;
                    let mut buf = vec![0.0; spec.dimension];
                    let mut running = RunningMean::new();
                    let mut gi = 0;
                    for _ in 0..*n_grid.last().unwrap() as u64 {
                        for x in buf.iter_mut() {
                            *x = stream.next_f64();
                        }
                        running.push(f.evaluate(&buf));
                        if running.count() as usize == n_grid[gi] {
                            traj[gi] = running.mean();
                            gi += 1;
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        let mut sup = 0.0f64;
        for (gi, &n) in n_grid.iter().enumerate() {
            if n < anchor_n {
                continue;
            }
            let at_n: Vec<f64> = trajectories.iter().map(|t| t[gi]).collect();
            let med = median_of_values(&at_n);
            sup = sup.max((med - exact).abs());
        }
        tail_sups.push(sup);
    }
    let below = tail_sups.iter().filter(|&&s| s < eps).count();
    Ok(TrajectoryReport {
        n_grid: n_grid.to_vec(),
        anchor_n,
        eps,
        k,
        tail_sups,
        fraction_below: below as f64 / seeds as f64,
    })
}

/// Compensated running mean for trajectory sums.
struct RunningMean {
    sum: f64,
    compensation: f64,
    count: u64,
}

impl RunningMean {
    fn new() -> Self {
        RunningMean {
            sum: 0.0,
            compensation: 0.0,
            count: 0,
        }
    }

    fn push(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
        self.count += 1;
    }

    fn count(&self) -> u64 {
        self.count
    }

    fn mean(&self) -> f64 {
        (self.sum + self.compensation) / self.count as f64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SubsequenceReport {
    pub schedule: Vec<u64>,
    /// errors[seed][j] = |S_{n_j} f - I(f)| for a fresh realization at n_j.
    pub errors: Vec<Vec<f64>>,
    /// Fraction of seeds with last-error < first-error.
    pub improved_fraction: f64,
}

/// Single realizations along the polynomial schedule n_j = j^s from
/// [`crate::estimators::subsequence_schedule`]; the route to almost-sure
/// convergence for methods without prefix-consistent streams.
pub fn subsequence_study(
    spec: &EstimatorSpec,
    integrand: &str,
    p: f64,
    count: usize,
    seeds: usize,
    master_seed: Seed,
) -> Result<SubsequenceReport> {
    let schedule = crate::estimators::subsequence_schedule(p, count)?;
    let f = find(spec.dimension, integrand)?.integrand;
    let exact = f.exact_integral();
    let mut errors = Vec::with_capacity(seeds);
    let mut improved = 0usize;
    for s in 0..seeds {
        let mut per_seed = Vec::with_capacity(schedule.len());
        for (j, &n) in schedule.iter().enumerate() {
            let stream = master_seed.stream(&[("subseq-seed", s as u64), ("j", j as u64)]);
            let rec = realize(spec, &f, n as usize, &stream)?;
            per_seed.push((rec.value - exact).abs());
        }
        if per_seed.len() >= 2 && per_seed.last().unwrap() < per_seed.first().unwrap() {
            improved += 1;
        }
        errors.push(per_seed);
    }
    Ok(SubsequenceReport {
        schedule,
        errors,
        improved_fraction: improved as f64 / seeds.max(1) as f64,
    })
}
