use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::malt::build_malt_bits;
use super::AltConfig;
use crate::error::{domain, Result};
use crate::gf2::{F2Matrix, F2Vector};
use crate::monsky::row_sum_matrix;
use crate::numtheory::{legendre_plus, trial_factor};

/// Samples handled by one RNG stream. Fixed so results do not depend on the
/// number of workers.
const CHUNK: u64 = 1024;

/// Independent uniform model of the Legendre-symbol bits of `r` primes.
///
/// Each prime has a class in `(ℤ/8D)ˣ` modulo squares, stored as bits: bit 0
/// is `(−1/p)₊`, bit 1 is `(2/p)₊` and bit `2 + j` is `(p/q_j)₊` for the
/// `j`-th prime `q_j` of `D`. The pair bits are `(p_i/p_j)₊` for `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitAssignment {
    r: usize,
    d_primes: Vec<u64>,
    upper: Vec<u64>,
    classes: Vec<u64>,
}

/// Class bits of an integer coprime to `2D`.
fn class_of(n: i64, d_primes: &[u64]) -> u64 {
    let m8 = n.rem_euclid(8);
    let mut c = (m8 % 4 == 3) as u64 | ((m8 == 3 || m8 == 5) as u64) << 1;
    for (j, &q) in d_primes.iter().enumerate() {
        c |= (legendre_plus(n, q).expect("n coprime to D") as u64) << (2 + j);
    }
    c
}

impl BitAssignment {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn y(&self, i: usize) -> bool {
        self.classes[i] & 1 == 1
    }

    pub fn z(&self, i: usize) -> bool {
        self.classes[i] >> 1 & 1 == 1
    }

    pub fn class(&self, i: usize) -> u64 {
        self.classes[i]
    }

    /// XOR of all classes, i.e. the class of the product of the primes.
    pub fn class_product(&self) -> u64 {
        self.classes.iter().fold(0, |a, c| a ^ c)
    }

    /// Whether the product of the classes is the class of one of `cfg.n0`.
    pub fn is_consistent(&self, cfg: &AltConfig) -> bool {
        let prod = self.class_product();
        cfg.n0.iter().any(|&n0| class_of(n0, &self.d_primes) == prod)
    }

    /// `(p_i/p_j)₊` for `i < j`.
    pub fn upper_bit(&self, i: usize, j: usize) -> bool {
        self.upper[i] >> j & 1 == 1
    }

    /// `A` with `A_ij = (p_j/p_i)₊`, recovered through reciprocity.
    pub fn a(&self) -> F2Matrix {
        row_sum_matrix(self.r, |i, j| {
            if i > j {
                self.upper_bit(j, i)
            } else {
                self.upper_bit(i, j) ^ (self.y(i) & self.y(j))
            }
        })
    }

    /// `((d/p_1)₊, …, (d/p_r)₊)` for a signed divisor `d` of `2D`.
    pub fn plus(&self, cfg: &AltConfig, d: i64) -> F2Vector {
        debug_assert_eq!(trial_factor(cfg.d), self.d_primes);
        let m = d.unsigned_abs();
        F2Vector::from_bools((0..self.r).map(|i| {
            let mut bit = (d < 0 && self.y(i)) ^ (m % 2 == 0 && self.z(i));
            for (j, &q) in self.d_primes.iter().enumerate() {
                if m % q == 0 {
                    // (q/p) from (p/q) by reciprocity.
                    let pq = self.classes[i] >> (2 + j) & 1 == 1;
                    bit ^= pq ^ (self.y(i) && q % 4 == 3);
                }
            }
            bit
        }))
    }
}

/// Draws a bit assignment: pair bits and the first `r − 1` classes uniform,
/// the last class chosen so the product lands in the class of an `n0` picked
/// uniformly from `cfg.n0`.
pub fn sample_assignment<R: Rng + ?Sized>(cfg: &AltConfig, r: usize, rng: &mut R) -> Result<BitAssignment> {
    if r == 0 || r > 64 {
        return domain(format!("r = {r} must lie in [1, 64]"));
    }
    let d_primes = trial_factor(cfg.d);
    let width = d_primes.len() + 2;
    let class_mask = (1u64 << width) - 1;
    let n0 = if cfg.n0.len() == 1 { cfg.n0[0] } else { cfg.n0[rng.gen_range(0..cfg.n0.len())] };
    let upper = (0..r)
        .map(|i| {
            let above = if i + 1 >= 64 { 0 } else { !0u64 << (i + 1) };
            let within = if r == 64 { !0 } else { (1u64 << r) - 1 };
            rng.gen::<u64>() & above & within
        })
        .collect();
    let mut classes: Vec<u64> = (0..r - 1).map(|_| rng.gen::<u64>() & class_mask).collect();
    let partial = classes.iter().fold(0, |a, c| a ^ c);
    classes.push(partial ^ class_of(n0, &d_primes));
    Ok(BitAssignment { r, d_primes, upper, classes })
}

/// Observed coranks of `M^alt` over sampled bit assignments.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorankHistogram {
    pub config: AltConfig,
    pub r: usize,
    pub delta: usize,
    pub seed: u64,
    pub total: u64,
    /// `counts[c]` is the number of samples with corank `c`.
    pub counts: Vec<u64>,
    /// Samples whose corank has the wrong parity; always zero for
    /// alternating matrices.
    pub parity_violations: u64,
}

impl CorankHistogram {
    /// Empirical frequency of corank `k + δ`.
    pub fn frequency(&self, k: usize) -> f64 {
        self.counts.get(k + self.delta).map_or(0.0, |&c| c as f64 / self.total as f64)
    }

    /// `(corank − δ, count)` for every corank seen at least once.
    pub fn rows(&self) -> Vec<(i64, u64)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(c, &n)| (c as i64 - self.delta as i64, n))
            .collect()
    }
}

/// Corank histogram of `M^alt` for `samples` assignments of `r` primes. The
/// result depends only on the arguments, not on the size of the thread pool.
pub fn corank_distribution_mc(cfg: &AltConfig, r: usize, samples: u64, seed: u64, delta: usize) -> Result<CorankHistogram> {
    cfg.validate()?;
    if samples == 0 {
        return domain("samples must be positive");
    }
    if r == 0 || r > 64 {
        return domain(format!("r = {r} must lie in [1, 64]"));
    }
    let dim = 2 * r + cfg.t();
    let chunks = samples.div_ceil(CHUNK);
    let merged = (0..chunks)
        .into_par_iter()
        .map(|chunk| -> Result<(Vec<u64>, u64)> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let mut counts = vec![0u64; dim + 1];
            let mut bad = 0;
            let n = CHUNK.min(samples - chunk * CHUNK);
            for _ in 0..n {
                let bits = sample_assignment(cfg, r, &mut rng)?;
                let c = build_malt_bits(cfg, &bits)?.corank()?;
                counts[c] += 1;
                bad += (c % 2 != cfg.t() % 2) as u64;
            }
            Ok((counts, bad))
        })
        .try_reduce(
            || (vec![0u64; dim + 1], 0),
            |(mut a, x), (b, y)| {
                a.iter_mut().zip(&b).for_each(|(p, q)| *p += q);
                Ok((a, x + y))
            },
        )?;
    Ok(CorankHistogram {
        config: cfg.clone(),
        r,
        delta,
        seed,
        total: samples,
        counts: merged.0,
        parity_violations: merged.1,
    })
}
