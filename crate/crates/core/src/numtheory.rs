//! Sieving, squarefree factorization and quadratic residue symbols.

use std::io::{self, Read, Write};

use crate::error::{domain, Error, Result};

/// Largest sieve accepted by [`PrimeSieve::new`]: 2^28 entries, one gigabyte of table.
pub const DEFAULT_SIEVE_BUDGET: u64 = 1 << 28;

const CACHE_MAGIC: &[u8; 8] = b"CNSPF\0\0\0";
const CACHE_VERSION: u32 = 1;

/// Smallest-prime-factor table for `2..=limit`.
///
/// Immutable after construction, so one sieve can be shared by any number of
/// workers.
#[derive(Clone, PartialEq, Eq)]
pub struct PrimeSieve {
    limit: u64,
    spf: Vec<u32>,
}

impl std::fmt::Debug for PrimeSieve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrimeSieve").field("limit", &self.limit).finish()
    }
}

impl PrimeSieve {
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_budget(limit, DEFAULT_SIEVE_BUDGET)
    }

    pub fn with_budget(limit: u64, budget: u64) -> Result<Self> {
        if limit < 2 {
            return domain(format!("sieve limit must be at least 2, got {limit}"));
        }
        if limit > budget || limit > u32::MAX as u64 {
            return Err(Error::Resource(format!(
                "sieve limit {limit} exceeds the budget of {} entries",
                budget.min(u32::MAX as u64)
            )));
        }
        let len = limit as usize + 1;
        let mut spf = vec![0u32; len];
        let mut primes: Vec<u32> = Vec::new();
        // Linear sieve: every composite is crossed out exactly once, by its
        // smallest prime factor.
        for m in 2..len {
            if spf[m] == 0 {
                spf[m] = m as u32;
                primes.push(m as u32);
            }
            let lp = spf[m];
            for &p in &primes {
                let q = m * p as usize;
                if p > lp || q >= len {
                    break;
                }
                spf[q] = p;
            }
        }
        Ok(PrimeSieve { limit, spf })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of `m`, for `2 ≤ m ≤ limit`.
    pub fn spf(&self, m: u64) -> Option<u64> {
        if (2..=self.limit).contains(&m) {
            Some(self.spf[m as usize] as u64)
        } else {
            None
        }
    }

    pub fn is_prime(&self, m: u64) -> bool {
        self.spf(m) == Some(m)
    }

    /// Serializes the table: an 8-byte magic, a little-endian `u32` version,
    /// the `u64` limit, then `limit + 1` little-endian `u32` words.
    pub fn write_cache<W: Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(CACHE_MAGIC)?;
        out.write_all(&CACHE_VERSION.to_le_bytes())?;
        out.write_all(&self.limit.to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.spf.len() * 4);
        for w in &self.spf {
            buf.extend_from_slice(&w.to_le_bytes());
        }
        out.write_all(&buf)?;
        out.flush()
    }

    pub fn read_cache<R: Read>(mut input: R) -> io::Result<Self> {
        let bad = |msg: &str| io::Error::new(io::ErrorKind::InvalidData, msg.to_string());
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(bad("not a sieve cache file"));
        }
        let mut word = [0u8; 4];
        input.read_exact(&mut word)?;
        if u32::from_le_bytes(word) != CACHE_VERSION {
            return Err(bad("unsupported sieve cache version"));
        }
        let mut lim = [0u8; 8];
        input.read_exact(&mut lim)?;
        let limit = u64::from_le_bytes(lim);
        if !(2..=u32::MAX as u64).contains(&limit) {
            return Err(bad("sieve cache limit out of range"));
        }
        let mut raw = vec![0u8; (limit as usize + 1) * 4];
        input.read_exact(&mut raw)?;
        let spf: Vec<u32> = raw
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        // Spot-check the table rather than trusting the file blindly.
        for m in [2u64, 3, 4, limit / 2, limit] {
            if m >= 2 {
                let p = spf[m as usize] as u64;
                if p < 2 || m % p != 0 {
                    return Err(bad("corrupt sieve cache table"));
                }
            }
        }
        Ok(PrimeSieve { limit, spf })
    }
}

/// A positive squarefree integer together with its factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredInteger {
    n: u64,
    odd_primes: Vec<u64>,
    is_even: bool,
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger { n: 1, odd_primes: Vec::new(), is_even: false }
    }

    /// Builds `2^[is_even] · ∏ odd_primes`. The primes must be strictly
    /// increasing and odd; primality itself is the caller's promise.
    pub fn from_primes(is_even: bool, odd_primes: Vec<u64>) -> Result<Self> {
        let mut n: u64 = if is_even { 2 } else { 1 };
        for (i, &p) in odd_primes.iter().enumerate() {
            if p < 3 || p % 2 == 0 {
                return domain(format!("{p} is not an odd prime"));
            }
            if i > 0 && odd_primes[i - 1] >= p {
                return domain("odd primes must be strictly increasing");
            }
            n = n
                .checked_mul(p)
                .ok_or_else(|| Error::Domain("product overflows u64".into()))?;
        }
        Ok(FactoredInteger { n, odd_primes, is_even })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn odd_primes(&self) -> &[u64] {
        &self.odd_primes
    }

    pub fn is_even(&self) -> bool {
        self.is_even
    }

    /// Number of odd prime factors.
    pub fn r(&self) -> usize {
        self.odd_primes.len()
    }

    pub fn odd_part(&self) -> u64 {
        if self.is_even {
            self.n / 2
        } else {
            self.n
        }
    }

    /// The divisor built from the odd primes selected by `mask` (bit `i` picks
    /// `p_{i+1}`), times 2 when `with_two`.
    pub fn divisor(&self, mask: u64, with_two: bool) -> FactoredInteger {
        let odd_primes: Vec<u64> = self
            .odd_primes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        let n = odd_primes.iter().product::<u64>() * if with_two { 2 } else { 1 };
        FactoredInteger { n, odd_primes, is_even: with_two }
    }

    /// `2n` for odd `n`.
    pub fn doubled(&self) -> Result<FactoredInteger> {
        if self.is_even {
            return Err(Error::NotSquarefree(self.n.saturating_mul(2)));
        }
        let n = self
            .n
            .checked_mul(2)
            .ok_or_else(|| Error::Domain("product overflows u64".into()))?;
        Ok(FactoredInteger { n, odd_primes: self.odd_primes.clone(), is_even: true })
    }
}

impl std::fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.n)
    }
}

/// Factors `n ≤ sieve.limit()`, rejecting anything with a repeated prime.
pub fn factor_squarefree(n: u64, sieve: &PrimeSieve) -> Result<FactoredInteger> {
    if n == 0 {
        return domain("0 has no squarefree factorization");
    }
    if n > sieve.limit() {
        return Err(Error::OutOfRange { value: n, limit: sieve.limit() });
    }
    let mut m = n;
    let mut is_even = false;
    let mut odd_primes = Vec::new();
    while m > 1 {
        let p = sieve.spf[m as usize] as u64;
        m /= p;
        if m % p == 0 {
            return Err(Error::NotSquarefree(n));
        }
        if p == 2 {
            is_even = true;
        } else {
            odd_primes.push(p);
        }
    }
    Ok(FactoredInteger { n, odd_primes, is_even })
}

/// Jacobi symbol `(a/m)` for odd positive `m`, by the binary algorithm:
/// factors of two use the `(2/m)` supplement and swaps use reciprocity.
pub fn jacobi(a: i64, m: u64) -> i32 {
    assert!(m % 2 == 1, "jacobi symbol needs an odd modulus");
    let mut sign = 1i32;
    let mut a = if a < 0 {
        // (−1/m) = −1 exactly when m ≡ 3 (mod 4).
        if m % 4 == 3 {
            sign = -sign;
        }
        a.unsigned_abs() % m
    } else {
        a as u64 % m
    };
    let mut m = m;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (m % 8 == 3 || m % 8 == 5) {
            sign = -sign;
        }
        if a % 4 == 3 && m % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut m);
        a %= m;
    }
    if m == 1 {
        sign
    } else {
        0
    }
}

/// Legendre symbol `(d/p)` for an odd prime `p` not dividing `d`.
pub fn legendre(d: i64, p: u64) -> Result<i32> {
    if p < 3 || p % 2 == 0 {
        return domain(format!("{p} is not an odd prime"));
    }
    match jacobi(d, p) {
        0 => domain(format!("{p} divides {d}")),
        s => Ok(s),
    }
}

/// Additive Legendre symbol `(d/p)₊ = ½(1 − (d/p))`: `false` for residues,
/// `true` for non-residues.
pub fn legendre_plus(d: i64, p: u64) -> Result<bool> {
    legendre(d, p).map(|s| s < 0)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Odd prime factors of a small odd integer by trial division.
pub(crate) fn trial_factor(mut d: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 3;
    while q * q <= d {
        if d % q == 0 {
            out.push(q);
            while d % q == 0 {
                d /= q;
            }
        }
        q += 2;
    }
    if d > 1 {
        out.push(d);
    }
    out
}

/// Whether `a / n0` is positive and a square modulo `8D`.
///
/// `D` is an odd squarefree positive integer; both `a` and `n0` must be coprime
/// to `2D`.
pub fn is_square_class(a: i64, n0: i64, d: u64) -> Result<bool> {
    if d == 0 || d % 2 == 0 {
        return domain(format!("D = {d} must be odd and positive"));
    }
    let modulus = 2 * d;
    for x in [a, n0] {
        if gcd(x.unsigned_abs(), modulus) != 1 {
            return domain(format!("{x} is not coprime to {modulus}"));
        }
    }
    if (a > 0) != (n0 > 0) {
        return Ok(false);
    }
    let prod = a as i128 * n0 as i128;
    if prod.rem_euclid(8) != 1 {
        return Ok(false);
    }
    for q in trial_factor(d) {
        let residue = prod.rem_euclid(q as i128) as i64;
        if jacobi(residue, q) != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Squarefree `n ≤ limit` with `n ≡ residue (mod modulus)`, in ascending order.
pub fn enumerate_squarefree(
    residue: u64,
    modulus: u64,
    limit: u64,
    sieve: &PrimeSieve,
) -> Result<impl Iterator<Item = FactoredInteger> + '_> {
    if modulus == 0 {
        return domain("modulus must be positive");
    }
    if limit > sieve.limit() {
        return Err(Error::OutOfRange { value: limit, limit: sieve.limit() });
    }
    let mut start = residue % modulus;
    if start == 0 {
        start = modulus;
    }
    Ok((start..=limit)
        .step_by(modulus as usize)
        .filter_map(move |n| factor_squarefree(n, sieve).ok()))
}
