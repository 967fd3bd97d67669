//! The estimator layer: equal-weight means over any point set, a dispatch
//! wrapper that draws a method's randomness from a derived stream, the
//! median-of-k modification, the recycled-sample negative control, and the
//! bound calculators backing the median analysis.

use crate::error::{Error, Result};
use crate::frolov::{enumerate_points, frolov_estimate, frolov_generator, randomize_dilation};
use crate::integrand::Integrand;
use crate::point_set::{PointSet, Provenance};
use crate::randomize::{cranley_patterson, latin_hypercube, Rotation};
use crate::rng::{RngStream, Seed};
use crate::scramble::ScrambledSequence;
use crate::sequences::{halton, hammersley, rank1_lattice, LatticeRule};
use crate::stats::kahan_sum;

/// Deterministic substrate for a Cranley-Patterson rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substrate {
    Halton,
    Hammersley,
    Lattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Owen-scrambled (0,d)-sequence in base = smallest prime >= d.
    ScrambledNet,
    /// Single uniform rotation of a deterministic point set.
    CranleyPatterson(Substrate),
    LatinHypercube,
    /// Randomized Frolov cubature (random evaluation count).
    Frolov,
    Iid,
    /// Recycled-sample estimator over m fixed draws; unbiased but
    /// inconsistent.
    NegativeControl(usize),
}

/// Which method to run and in which dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimatorSpec {
    pub method: Method,
    pub dimension: usize,
}

impl EstimatorSpec {
    pub fn new(method: Method, dimension: usize) -> Self {
        EstimatorSpec { method, dimension }
    }

    pub fn name(&self) -> String {
        match self.method {
            Method::ScrambledNet => "scrambled-net".into(),
            Method::CranleyPatterson(Substrate::Halton) => "cp-halton".into(),
            Method::CranleyPatterson(Substrate::Hammersley) => "cp-hammersley".into(),
            Method::CranleyPatterson(Substrate::Lattice) => "cp-lattice".into(),
            Method::LatinHypercube => "lhs".into(),
            Method::Frolov => "frolov".into(),
            Method::Iid => "iid".into(),
            Method::NegativeControl(m) => format!("negative-control-{m}"),
        }
    }

    /// Parses the names produced by [`EstimatorSpec::name`].
    pub fn parse(name: &str, dimension: usize) -> Result<Self> {
        let method = match name {
            "scrambled-net" => Method::ScrambledNet,
            "cp-halton" | "cranley-patterson" => Method::CranleyPatterson(Substrate::Halton),
            "cp-hammersley" => Method::CranleyPatterson(Substrate::Hammersley),
            "cp-lattice" => Method::CranleyPatterson(Substrate::Lattice),
            "lhs" => Method::LatinHypercube,
            "frolov" => Method::Frolov,
            "iid" => Method::Iid,
            other => {
                if let Some(m) = other.strip_prefix("negative-control-") {
                    let m: usize = m.parse().map_err(|_| {
                        Error::InvalidParameter(format!("bad negative-control order in '{other}'"))
                    })?;
                    Method::NegativeControl(m)
                } else {
                    return Err(Error::InvalidParameter(format!(
                        "unknown method '{other}'"
                    )));
                }
            }
        };
        Ok(EstimatorSpec::new(method, dimension))
    }

    /// Methods other than Frolov use exactly n evaluations per realization.
    pub fn uses_exactly_n(&self) -> bool {
        !matches!(self.method, Method::Frolov)
    }
}

/// Odd median order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MedianConfig {
    k: usize,
}

impl MedianConfig {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 || k % 2 == 0 {
            return Err(Error::EvenMedianOrder(k));
        }
        Ok(MedianConfig { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// One realization of an estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateRecord {
    pub n: usize,
    pub value: f64,
    pub evaluations_used: usize,
    pub replication_index: usize,
    pub seed: Seed,
}

/// Arithmetic mean of f over the points (compensated summation).
pub fn mean_estimate(f: &Integrand, points: &PointSet) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if f.dimension() != points.dimension() {
        return Err(Error::DimensionMismatch {
            expected: points.dimension(),
            got: f.dimension(),
        });
    }
    let values: Vec<f64> = points.iter_points().map(|p| f.evaluate(p)).collect();
    Ok(kahan_sum(&values) / values.len() as f64)
}

fn substrate_points(substrate: Substrate, n: usize, d: usize) -> Result<PointSet> {
    match substrate {
        Substrate::Halton => halton(n, d),
        Substrate::Hammersley => hammersley(n, d),
        Substrate::Lattice => {
            if d == 1 {
                rank1_lattice(&LatticeRule::new(n, vec![1])?)
            } else {
                rank1_lattice(&LatticeRule::korobov_searched(n, d)?)
            }
        }
    }
}

/// Runs one realization: draws the method's randomness from `stream`, builds
/// the point set (or weighted Frolov sample) and evaluates the estimate.
/// Passing the same stream again replays the identical randomness, which is
/// how the linearity and monotonicity axioms are tested.
pub fn realize(
    spec: &EstimatorSpec,
    f: &Integrand,
    n: usize,
    stream: &RngStream,
) -> Result<EstimateRecord> {
    if n < 1 {
        return Err(Error::InvalidParameter("budget n must be >= 1".into()));
    }
    if f.dimension() != spec.dimension {
        return Err(Error::DimensionMismatch {
            expected: spec.dimension,
            got: f.dimension(),
        });
    }
    let d = spec.dimension;
    let seed = Seed(stream.fingerprint());
    let (value, evaluations_used) = match spec.method {
        Method::ScrambledNet => {
            let seq = ScrambledSequence::new(d, &stream.derive("scramble", 0))?;
            let mut values = Vec::with_capacity(n);
            let mut buf = vec![0.0; d];
            for i in 0..n as u64 {
                seq.point_into(i, &mut buf);
                values.push(f.evaluate(&buf));
            }
            (kahan_sum(&values) / n as f64, n)
        }
        Method::CranleyPatterson(substrate) => {
            let base_points = substrate_points(substrate, n, d)?;
            let mut rot_stream = stream.derive("rotation", 0);
            let rotation = Rotation::random(d, &mut rot_stream);
            let rotated = cranley_patterson(&base_points, &rotation)?;
            (mean_estimate(f, &rotated)?, n)
        }
        Method::LatinHypercube => {
            let points = latin_hypercube(n, d, &stream.derive("lhs", 0))?;
            (mean_estimate(f, &points)?, n)
        }
        Method::Frolov => {
            let gen = frolov_generator(d)?;
            let mut s = stream.derive("frolov", 0);
            let dilation = randomize_dilation(&gen, n, &mut s)?;
            let sample = enumerate_points(&dilation)?;
            (frolov_estimate(f, &sample)?, sample.count())
        }
        Method::Iid => {
            let mut s = stream.derive("iid", 0);
            let coords = s.uniform01(n * d);
            let points = PointSet::new(
                coords,
                n,
                d,
                Provenance::randomized("iid", &[("n", n.to_string())], seed),
            )?;
            (mean_estimate(f, &points)?, n)
        }
        Method::NegativeControl(m) => {
            let mut s = stream.derive("negative-control", 0);
            (negative_control_impl(m, f, n, &mut s)?, n)
        }
    };
    Ok(EstimateRecord {
        n,
        value,
        evaluations_used,
        replication_index: 0,
        seed,
    })
}

/// The recycled-sample estimator: Y_1..Y_m iid uniform are drawn once, the
/// j-th evaluation point cycles through them, and the estimate is the plain
/// average of the n evaluations. Linear, monotone, unbiased, not consistent.
pub fn negative_control(m: usize, f: &Integrand, n: usize, stream: &RngStream) -> Result<f64> {
    let mut s = *stream;
    negative_control_impl(m, f, n, &mut s)
}

fn negative_control_impl(
    m: usize,
    f: &Integrand,
    n: usize,
    stream: &mut RngStream,
) -> Result<f64> {
    if m < 1 || n < 1 {
        return Err(Error::InvalidParameter(
            "negative control requires m >= 1 and n >= 1".into(),
        ));
    }
    let d = f.dimension();
    let values: Vec<f64> = (0..m)
        .map(|_| {
            let y = stream.uniform01(d);
            f.evaluate(&y)
        })
        .collect();
    if n % m == 0 {
        // equal weights: (1/n) sum_j f(X_j) = (1/m) sum_k f(Y_k)
        Ok(kahan_sum(&values) / m as f64)
    } else {
        let q = n / m;
        let r = n % m;
        let weighted: Vec<f64> = values
            .iter()
            .enumerate()
            .map(|(k, &v)| (q + usize::from(k < r)) as f64 * v)
            .collect();
        Ok(kahan_sum(&weighted) / n as f64)
    }
}

/// Middle order statistic of an odd-length sample.
pub fn median_of_values(values: &[f64]) -> f64 {
    assert!(
        values.len() % 2 == 1,
        "median_of_values expects odd length"
    );
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("non-comparable estimate"));
    v[v.len() / 2]
}

/// Median of k independent realizations, each drawn from its own derived
/// sub-stream.
pub fn median_of_k(
    spec: &EstimatorSpec,
    f: &Integrand,
    n: usize,
    cfg: MedianConfig,
    stream: &RngStream,
) -> Result<f64> {
    median_of_k_detailed(spec, f, n, cfg, stream).map(|(value, _)| value)
}

/// As [`median_of_k`], also reporting the total evaluations consumed across
/// the k realizations.
pub fn median_of_k_detailed(
    spec: &EstimatorSpec,
    f: &Integrand,
    n: usize,
    cfg: MedianConfig,
    stream: &RngStream,
) -> Result<(f64, usize)> {
    let records: Vec<EstimateRecord> = (0..cfg.k())
        .map(|j| realize(spec, f, n, &stream.derive("median-rep", j as u64)))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = records.iter().map(|r| r.value).collect();
    let evals = records.iter().map(|r| r.evaluations_used).sum();
    Ok((median_of_values(&values), evals))
}

/// Smallest odd k strictly greater than 2/(p-1), for p in (1,2).
pub fn required_k(p: f64) -> Result<usize> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "required_k needs p in (1,2), got {p}; for p >= 2 use p slightly below 2"
        )));
    }
    let t = 2.0 / (p - 1.0);
    let mut k = t.floor() as usize + 1;
    if k % 2 == 0 {
        k += 1;
    }
    Ok(k)
}

/// The amplification bound min(1, 2^k alpha^{k/2}) for odd k.
pub fn median_failure_bound(alpha: f64, k: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in [0,1], got {alpha}"
        )));
    }
    if k == 0 || k % 2 == 0 {
        return Err(Error::EvenMedianOrder(k));
    }
    Ok((2.0f64.powi(k as i32) * alpha.powf(k as f64 / 2.0)).min(1.0))
}

/// Tail bound 2^k (c_p ||f||_p / eps)^{pk/2} n^{-(p-1)k/2} with
/// c_p = 2^{2/p-1} c^{1-1/p}.
pub fn slln_error_bound(
    p: f64,
    c: f64,
    norm_f_p: f64,
    eps: f64,
    n: usize,
    k: usize,
) -> Result<f64> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "slln bound needs p in (1,2), got {p}"
        )));
    }
    if k == 0 || k % 2 == 0 {
        return Err(Error::EvenMedianOrder(k));
    }
    if eps <= 0.0 || c <= 0.0 || norm_f_p <= 0.0 || n < 1 {
        return Err(Error::InvalidParameter(
            "slln bound needs positive c, ||f||_p, eps and n >= 1".into(),
        ));
    }
    let c_p = 2.0f64.powf(2.0 / p - 1.0) * c.powf(1.0 - 1.0 / p);
    let base = c_p * norm_f_p / eps;
    Ok(2.0f64.powi(k as i32) * base.powf(p * k as f64 / 2.0)
        / (n as f64).powf((p - 1.0) * k as f64 / 2.0))
}

/// Polynomial budget schedule n_j = j^s with s = ceil(2/(p-1)), so the
/// failure probabilities along the schedule are summable.
pub fn subsequence_schedule(p: f64, count: usize) -> Result<Vec<u64>> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::InvalidParameter(format!(
            "subsequence schedule needs p in (1,2], got {p}"
        )));
    }
    let s = (2.0 / (p - 1.0)).ceil() as u32;
    (1..=count as u64)
        .map(|j| {
            j.checked_pow(s).ok_or_else(|| {
                Error::InvalidParameter(format!("schedule overflow at j={j}, s={s}"))
            })
        })
        .collect()
}
