//! Randomizations in digit space: nested uniform scrambling and the random
//! digital shift.
//!
//! Permutations are never materialized as a tree. Each node of the digit tree
//! (dimension, digit position, preceding digits) keys a small deterministic
//! stream and the permutation is drawn lazily from it, so scrambling a point
//! costs O(depth * base) regardless of how sparse the tree is.

use crate::error::{Error, Result};
use crate::point_set::{PointSet, Provenance};
use crate::rng::{RngStream, Seed};
use crate::sequences::{digit_depth, DigitVector};

/// Keyed family of digit permutations for one scrambling pass.
#[derive(Debug, Clone, Copy)]
pub struct ScrambleKey {
    k0: u64,
    k1: u64,
    base: u64,
    depth: usize,
    dimension: usize,
    identity: bool,
}

impl ScrambleKey {
    pub fn new(stream: &RngStream, base: u64, depth: usize, dimension: usize) -> Self {
        let (k0, k1) = stream.key();
        ScrambleKey {
            k0,
            k1,
            base,
            depth,
            dimension,
            identity: false,
        }
    }

    /// Test hook: forces every permutation (and shift digit) to the identity.
    pub fn forced_identity(base: u64, depth: usize, dimension: usize) -> Self {
        ScrambleKey {
            k0: 0,
            k1: 0,
            base,
            depth,
            dimension,
            identity: true,
        }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    fn check(&self, dv: &DigitVector) -> Result<()> {
        if dv.base() != self.base || dv.depth() != self.depth {
            return Err(Error::InvalidParameter(format!(
                "digit vector (base {}, depth {}) does not match scramble key (base {}, depth {})",
                dv.base(),
                dv.depth(),
                self.base,
                self.depth
            )));
        }
        Ok(())
    }
}

/// Backward Horner evaluation, identical to [`DigitVector::value`], so that
/// identity permutations reproduce the input bit-for-bit.
fn digits_to_value(base: u64, digits: &[u32]) -> f64 {
    let b = base as f64;
    let mut v = 0.0;
    for &d in digits.iter().rev() {
        v = (v + f64::from(d)) / b;
    }
    v
}

const MAX_DEPTH: usize = 64;

/// A scrambling pass with the per-(dimension, digit position) stream keys
/// precomputed; only the preceding-digits derivation happens per node.
#[derive(Debug, Clone)]
struct Scrambler {
    key: ScrambleKey,
    node_keys: Vec<(u64, u64)>,
    prefix_label: u64,
}

impl Scrambler {
    fn new(key: ScrambleKey) -> Self {
        let mut node_keys = Vec::with_capacity(key.dimension * key.depth);
        for dim in 0..key.dimension {
            let dim_stream = RngStream::from_key(key.k0, key.k1).derive("dim", dim as u64);
            for pos in 0..key.depth {
                node_keys.push(dim_stream.derive("pos", pos as u64).key());
            }
        }
        Scrambler {
            key,
            node_keys,
            prefix_label: RngStream::label_hash("prefix"),
        }
    }

    /// Permutation image of `digit` at the tree node addressed by the
    /// original preceding digits (encoded as a base-b integer).
    #[inline]
    fn permuted(&self, dim: usize, position: usize, prefix: u64, digit: u32) -> u32 {
        if self.key.identity {
            return digit;
        }
        let (nk0, nk1) = self.node_keys[dim * self.key.depth + position];
        let mut stream = RngStream::from_key(nk0, nk1).derive_hashed(self.prefix_label, prefix);
        if self.key.base == 2 {
            // a permutation of {0,1} is a conditional bit flip
            return digit ^ (stream.next_u64() & 1) as u32;
        }
        let b = self.key.base as usize;
        if b <= 16 {
            let mut perm = [0u32; 16];
            for (v, slot) in perm.iter_mut().enumerate().take(b) {
                *slot = v as u32;
            }
            for i in (1..b).rev() {
                let j = stream.next_below(i as u64 + 1) as usize;
                perm.swap(i, j);
            }
            perm[digit as usize]
        } else {
            let mut perm: Vec<u32> = (0..b as u32).collect();
            stream.shuffle(&mut perm);
            perm[digit as usize]
        }
    }

    fn scramble_vector(&self, dim: usize, dv: &DigitVector) -> f64 {
        let mut out = [0u32; MAX_DEPTH];
        let depth = dv.depth();
        debug_assert!(depth <= MAX_DEPTH);
        let mut prefix = 0u64;
        for (pos, &digit) in dv.digits().iter().enumerate() {
            out[pos] = self.permuted(dim, pos, prefix, digit);
            prefix = prefix * self.key.base + u64::from(digit);
        }
        digits_to_value(self.key.base, &out[..depth])
    }
}

/// Owen's nested uniform scrambling of per-dimension digit expansions.
/// `digits[i][j]` is the expansion of point i in dimension j.
pub fn nested_uniform_scramble(
    digits: &[Vec<DigitVector>],
    key: &ScrambleKey,
) -> Result<PointSet> {
    let d = key.dimension;
    let n = digits.len();
    let scrambler = Scrambler::new(*key);
    let mut coords = Vec::with_capacity(n * d);
    for point in digits {
        if point.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: point.len(),
            });
        }
        for (dim, dv) in point.iter().enumerate() {
            key.check(dv)?;
            coords.push(scrambler.scramble_vector(dim, dv));
        }
    }
    PointSet::new(
        coords,
        n,
        d,
        Provenance::deterministic(
            "nested-uniform-scramble",
            &[
                ("base", key.base.to_string()),
                ("depth", key.depth.to_string()),
            ],
        ),
    )
}

/// Random digital shift: one random digit vector per dimension, added
/// digit-wise mod b to every point.
pub fn digital_shift(digits: &[Vec<DigitVector>], key: &ScrambleKey) -> Result<PointSet> {
    let d = key.dimension;
    let n = digits.len();
    let shifts: Vec<Vec<u32>> = (0..d)
        .map(|dim| {
            if key.identity {
                vec![0u32; key.depth]
            } else {
                let mut s = RngStream::from_key(key.k0, key.k1).derive("shift", dim as u64);
                (0..key.depth).map(|_| s.next_below(key.base) as u32).collect()
            }
        })
        .collect();
    let mut coords = Vec::with_capacity(n * d);
    for point in digits {
        if point.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: point.len(),
            });
        }
        for (dim, dv) in point.iter().enumerate() {
            key.check(dv)?;
            let mut out = [0u32; MAX_DEPTH];
            for (pos, &digit) in dv.digits().iter().enumerate() {
                out[pos] = ((u64::from(digit) + u64::from(shifts[dim][pos])) % key.base) as u32;
            }
            coords.push(digits_to_value(key.base, &out[..dv.depth()]));
        }
    }
    PointSet::new(
        coords,
        n,
        d,
        Provenance::deterministic(
            "digital-shift",
            &[
                ("base", key.base.to_string()),
                ("depth", key.depth.to_string()),
            ],
        ),
    )
}

/// A scrambled Faure sequence with the prefix property: the first n points do
/// not depend on how many points are ultimately requested.
#[derive(Debug, Clone)]
pub struct ScrambledSequence {
    d: usize,
    base: u64,
    depth: usize,
    scrambler: Scrambler,
    seed: Seed,
    binom: std::sync::Arc<Vec<Vec<u64>>>,
}

impl ScrambledSequence {
    /// Scrambled (0,d)-sequence in the Faure base for dimension d, keyed by
    /// `stream`.
    pub fn new(d: usize, stream: &RngStream) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        let base = crate::sequences::faure_base(d);
        let depth = digit_depth(base);
        Ok(ScrambledSequence {
            d,
            base,
            depth,
            scrambler: Scrambler::new(ScrambleKey::new(stream, base, depth, d)),
            seed: Seed(stream.fingerprint()),
            binom: std::sync::Arc::new(crate::sequences::binomials_mod(base, depth)),
        })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// Point of index i; a pure function of (key, i).
    pub fn point_at(&self, index: u64) -> Vec<f64> {
        let mut out = vec![0.0; self.d];
        self.point_into(index, &mut out);
        out
    }

    /// Writes the point of index i into `out` without allocating.
    pub fn point_into(&self, index: u64, out: &mut [f64]) {
        assert_eq!(out.len(), self.d);
        let digits =
            crate::sequences::faure_digits_at(index, self.d, self.base, self.depth, &self.binom)
                .expect("valid parameters");
        for (dim, dv) in digits.iter().enumerate() {
            out[dim] = self.scrambler.scramble_vector(dim, dv);
        }
    }

    /// First n points as a PointSet.
    pub fn points(&self, n: usize) -> Result<PointSet> {
        let mut coords = Vec::with_capacity(n * self.d);
        for i in 0..n as u64 {
            coords.extend(self.point_at(i));
        }
        PointSet::new(
            coords,
            n,
            self.d,
            Provenance::randomized(
                "scrambled-net",
                &[
                    ("n", n.to_string()),
                    ("d", self.d.to_string()),
                    ("base", self.base.to_string()),
                ],
                self.seed,
            ),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;
    use crate::sequences::{faure, faure_digits};
    use crate::stats::{chi_square_critical, chi_square_uniform, Z_999};

    fn faure_digit_matrix(n: usize, d: usize) -> Vec<Vec<DigitVector>> {
        faure_digits(n, d).unwrap().1
    }

    #[test]
    fn identity_key_returns_input() {
        let digits = faure_digit_matrix(9, 2);
        let key = ScrambleKey::forced_identity(3, digit_depth(3), 2);
        let scrambled = nested_uniform_scramble(&digits, &key).unwrap();
        let plain = faure(9, 2).unwrap();
        for i in 0..9 {
            for j in 0..2 {
                assert_eq!(scrambled.coord(i, j), plain.coord(i, j));
            }
        }
        let shifted = digital_shift(&digits, &key).unwrap();
        for i in 0..9 {
            for j in 0..2 {
                assert_eq!(shifted.coord(i, j), plain.coord(i, j));
            }
        }
    }

    #[test]
    fn base_mismatch_rejected() {
        let digits = faure_digit_matrix(4, 2); // base 3
        let key = ScrambleKey::new(
            &Seed(1).stream(&[("scramble", 0)]),
            2,
            digit_depth(2),
            2,
        );
        assert!(nested_uniform_scramble(&digits, &key).is_err());
    }

    #[test]
    fn scrambling_preserves_net_property() {
        let digits = faure_digit_matrix(9, 2);
        for seed in 0..100u64 {
            let stream = Seed(seed).stream(&[("scramble", 0)]);
            let key = ScrambleKey::new(&stream, 3, digit_depth(3), 2);
            let scrambled = nested_uniform_scramble(&digits, &key).unwrap();
            assert!(
                crate::sequences::is_zero_net(&scrambled, 3, 2),
                "net property lost for seed {seed}"
            );
        }
    }

    #[test]
    fn scrambled_point_is_marginally_uniform() {
        // one fixed input point, 10^4 keys, chi-square on 27 bins at 0.001
        let digits = faure_digit_matrix(2, 2);
        let fixed = vec![digits[1].clone()];
        let mut firsts = Vec::with_capacity(10_000);
        for seed in 0..10_000u64 {
            let stream = Seed(seed).stream(&[("marginal", 0)]);
            let key = ScrambleKey::new(&stream, 3, digit_depth(3), 2);
            let ps = nested_uniform_scramble(&fixed, &key).unwrap();
            firsts.push(ps.coord(0, 0));
        }
        let stat = chi_square_uniform(&firsts, 27);
        let crit = chi_square_critical(26, Z_999);
        assert!(stat < crit, "chi-square {stat} >= {crit}");
    }

    #[test]
    fn digital_shift_base2_is_xor() {
        // base 2: digital shift of the expansion equals XOR on 53-bit
        // mantissas
        let depth = digit_depth(2);
        let digits = faure_digits(16, 1).unwrap().1;
        let stream = Seed(99).stream(&[("xor", 0)]);
        let key = ScrambleKey::new(&stream, 2, depth, 1);
        let shifted = digital_shift(&digits, &key).unwrap();

        // reconstruct the shift digits from how 0 maps
        let zero = &digits[0][0];
        assert!(zero.digits().iter().all(|&d| d == 0));
        let shift_bits: u64 = {
            let v = shifted.coord(0, 0);
            (v * (1u64 << 53) as f64).round() as u64
        };
        for i in 0..16 {
            let original_bits = {
                let v = digits[i][0].value();
                (v * (1u64 << 53) as f64).round() as u64
            };
            let got_bits = (shifted.coord(i, 0) * (1u64 << 53) as f64).round() as u64;
            assert_eq!(got_bits, original_bits ^ shift_bits, "point {i}");
        }
    }

    #[test]
    fn digital_shift_marginal_uniformity() {
        let digits = faure_digit_matrix(2, 2);
        let fixed = vec![digits[1].clone()];
        let mut firsts = Vec::with_capacity(10_000);
        for seed in 0..10_000u64 {
            let stream = Seed(seed).stream(&[("shift-marginal", 0)]);
            let key = ScrambleKey::new(&stream, 3, digit_depth(3), 2);
            let ps = digital_shift(&fixed, &key).unwrap();
            firsts.push(ps.coord(0, 0));
        }
        let stat = chi_square_uniform(&firsts, 27);
        let crit = chi_square_critical(26, Z_999);
        assert!(stat < crit, "chi-square {stat} >= {crit}");
    }

    #[test]
    fn stream_prefix_property() {
        let stream = Seed(5).stream(&[("stream", 0)]);
        let seq = ScrambledSequence::new(2, &stream).unwrap();
        let eight_a = seq.points(8).unwrap();
        let eight_b = seq.points(8).unwrap();
        assert_eq!(eight_a, eight_b, "same key, same points");

        let four = seq.points(4).unwrap();
        for i in 0..4 {
            assert_eq!(four.point(i), eight_a.point(i), "prefix mismatch at {i}");
        }
    }

    #[test]
    fn stream_running_mean_of_constant_is_one() {
        let stream = Seed(5).stream(&[("stream", 1)]);
        let seq = ScrambledSequence::new(3, &stream).unwrap();
        let mut sum = 0.0;
        for i in 0..64u64 {
            let p = seq.point_at(i);
            assert_eq!(p.len(), 3);
            sum += 1.0; // f == 1 evaluated at p
            let mean = sum / (i + 1) as f64;
            assert_eq!(mean, 1.0);
        }
    }

    #[test]
    fn scrambled_stream_prefix_is_a_net() {
        let stream = Seed(17).stream(&[("net", 0)]);
        let seq = ScrambledSequence::new(2, &stream).unwrap();
        let ps = seq.points(27).unwrap();
        assert!(crate::sequences::is_zero_net(&ps, 3, 3));
    }

    #[test]
    fn net_preservation_up_to_eighty_one_points() {
        // every (base, exponent) combination with b^k <= 81
        let cases: [(usize, u64, u32); 4] = [(1, 2, 6), (2, 3, 4), (3, 3, 4), (2, 3, 3)];
        for (d, base, m) in cases {
            let n = (base as usize).pow(m);
            assert!(n <= 81);
            let digits = faure_digits(n, d).unwrap().1;
            for s in 0..10u64 {
                let stream = Seed(s).stream(&[("net81", 0)]);
                let key = ScrambleKey::new(&stream, base, digit_depth(base), d);
                let ps = nested_uniform_scramble(&digits, &key).unwrap();
                assert!(
                    crate::sequences::is_zero_net(&ps, base, m),
                    "d={d}, base={base}, m={m}, seed {s}"
                );
            }
        }
    }
}
