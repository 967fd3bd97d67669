//! Point sets in the half-open unit cube with provenance metadata.

use crate::error::{Error, Result};
use crate::rng::Seed;

/// How a point set was produced: method name, parameters, and the seed if the
/// construction was randomized.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub method: String,
    pub params: Vec<(String, String)>,
    pub seed: Option<Seed>,
}

impl Provenance {
    pub fn deterministic(method: &str, params: &[(&str, String)]) -> Self {
        Provenance {
            method: method.to_string(),
            params: params
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            seed: None,
        }
    }

    pub fn randomized(method: &str, params: &[(&str, String)], seed: Seed) -> Self {
        let mut p = Self::deterministic(method, params);
        p.seed = Some(seed);
        p
    }
}

/// `n` points in [0,1)^d, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    coords: Vec<f64>,
    n: usize,
    d: usize,
    provenance: Provenance,
}

impl PointSet {
    /// Builds a point set, validating the shape and the [0,1) range contract.
    pub fn new(coords: Vec<f64>, n: usize, d: usize, provenance: Provenance) -> Result<Self> {
        if coords.len() != n * d {
            return Err(Error::InvalidParameter(format!(
                "coordinate buffer has {} entries, expected {}",
                coords.len(),
                n * d
            )));
        }
        for (idx, &v) in coords.iter().enumerate() {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::CoordinateOutOfRange {
                    value: v,
                    point: idx / d,
                    axis: idx % d,
                });
            }
        }
        Ok(PointSet {
            coords,
            n,
            d,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn coord(&self, i: usize, j: usize) -> f64 {
        self.coords[i * self.d + j]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    /// All values of one coordinate axis.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i, j)).collect()
    }
}
