//! Range scans over squarefree `n ≡ t (mod 8)`: rank-3 proportions,
//! nonvanishing frequencies of `ℒ_x`, certified congruent numbers and the
//! 4-rank census.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::altsim::four_rank;
use crate::error::{domain, Error, Result};
use crate::lfun::{verify_table2_twist, LCache, Table2Row};
use crate::monsky::{build_twist, rank3_indicator, selmer_rank, RowLabel};
use crate::numtheory::{factor_squarefree, FactoredInteger, PrimeSieve};

const BLOCK: u64 = 1 << 16;
const Z: f64 = 1.96;
/// Mismatching `n` kept verbatim in a report; the count is always exact.
const KEEP_MISMATCHES: usize = 32;

/// Wilson score interval at 95%.
pub fn wilson(count: u64, total: u64) -> (f64, f64) {
    if total == 0 {
        return (0.0, 1.0);
    }
    let n = total as f64;
    let p = count as f64 / n;
    let denom = 1.0 + Z * Z / n;
    let center = (p + Z * Z / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + Z * Z / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub count: u64,
    pub total: u64,
    pub frequency: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Metric {
    pub fn new(name: impl Into<String>, count: u64, total: u64) -> Self {
        let (ci_low, ci_high) = wilson(count, total);
        let frequency = if total == 0 { 0.0 } else { count as f64 / total as f64 };
        Metric { name: name.into(), count, total, frequency, ci_low, ci_high }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RowCounts {
    pub nonzero: u64,
    pub nonzero_and_rank3: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub residue: u64,
    pub limit: u64,
    pub total: u64,
    /// Rank-3 count for `t ∈ {5, 6, 7}`.
    pub rank3: u64,
    pub rows: BTreeMap<RowLabel, RowCounts>,
    /// Both rows of 5 or of 7 considered together.
    pub joint: RowCounts,
    pub certified: u64,
    /// 2-Selmer rank histogram for `t ∈ {1, 2, 3}`.
    pub selmer: BTreeMap<usize, u64>,
    pub table2_checks: u64,
    pub table2_mismatches: u64,
    pub mismatch_examples: Vec<u64>,
    pub sel3_violations: u64,
}

impl DensityReport {
    fn empty(residue: u64, limit: u64) -> Self {
        DensityReport {
            residue,
            limit,
            total: 0,
            rank3: 0,
            rows: RowLabel::for_residue(residue).iter().map(|&r| (r, RowCounts::default())).collect(),
            joint: RowCounts::default(),
            certified: 0,
            selmer: BTreeMap::new(),
            table2_checks: 0,
            table2_mismatches: 0,
            mismatch_examples: Vec::new(),
            sel3_violations: 0,
        }
    }

    fn merge(mut self, other: DensityReport) -> Self {
        self.total += other.total;
        self.rank3 += other.rank3;
        for (row, c) in other.rows {
            let e = self.rows.entry(row).or_default();
            e.nonzero += c.nonzero;
            e.nonzero_and_rank3 += c.nonzero_and_rank3;
        }
        self.joint.nonzero += other.joint.nonzero;
        self.joint.nonzero_and_rank3 += other.joint.nonzero_and_rank3;
        self.certified += other.certified;
        for (k, c) in other.selmer {
            *self.selmer.entry(k).or_default() += c;
        }
        self.table2_checks += other.table2_checks;
        self.table2_mismatches += other.table2_mismatches;
        self.mismatch_examples.extend(other.mismatch_examples);
        self.mismatch_examples.sort_unstable();
        self.mismatch_examples.truncate(KEEP_MISMATCHES);
        self.sel3_violations += other.sel3_violations;
        self
    }

    fn has_rank3(&self) -> bool {
        matches!(self.residue, 5 | 6 | 7)
    }

    fn record(&mut self, f: &FactoredInteger, cache: &mut LCache) -> Result<()> {
        let t = build_twist(f);
        let rows = verify_table2_twist(&t, cache);
        self.total += 1;
        self.table2_checks += rows.len() as u64;
        let bad = rows.iter().filter(|r| !r.equal()).count() as u64;
        if bad > 0 {
            self.table2_mismatches += bad;
            if self.mismatch_examples.len() < KEEP_MISMATCHES {
                self.mismatch_examples.push(f.n());
            }
        }
        let any = rows.iter().any(|r| r.l_value);
        if self.has_rank3() {
            let rank3 = rank3_indicator(&t)?;
            self.rank3 += rank3 as u64;
            for r in &rows {
                let e = self.rows.get_mut(&r.row).expect("row present");
                e.nonzero += r.l_value as u64;
                e.nonzero_and_rank3 += (r.l_value && rank3) as u64;
                self.sel3_violations += (r.l_value && !rank3) as u64;
            }
            self.joint.nonzero += any as u64;
            self.joint.nonzero_and_rank3 += (any && rank3) as u64;
            self.certified += (any && rank3) as u64;
        } else {
            *self.selmer.entry(selmer_rank(&t)?).or_default() += 1;
            for r in &rows {
                self.rows.get_mut(&r.row).expect("row present").nonzero += r.l_value as u64;
            }
        }
        Ok(())
    }

    /// Counts and frequencies with confidence intervals, in a fixed order.
    pub fn metrics(&self) -> Vec<Metric> {
        let mut out = vec![Metric::new("squarefree", self.total, self.total)];
        if self.has_rank3() {
            out.push(Metric::new("rank3", self.rank3, self.total));
            for (row, c) in &self.rows {
                out.push(Metric::new(format!("L{row}_nonzero"), c.nonzero, self.total));
                out.push(Metric::new(format!("L{row}_nonzero_given_rank3"), c.nonzero_and_rank3, self.rank3));
            }
            if self.rows.len() > 1 {
                let names: Vec<&str> = self.rows.keys().map(|r| r.name()).collect();
                let name = format!("L{}_or_L{}_nonzero_given_rank3", names[0], names[1]);
                out.push(Metric::new(name, self.joint.nonzero_and_rank3, self.rank3));
            }
            out.push(Metric::new("certified", self.certified, self.total));
        } else {
            for (k, &c) in &self.selmer {
                out.push(Metric::new(format!("selmer_rank_{k}"), c, self.total));
            }
            for (row, c) in &self.rows {
                out.push(Metric::new(format!("L{row}_nonzero"), c.nonzero, self.total));
            }
        }
        out.push(Metric::new("table2_mismatch", self.table2_mismatches, self.table2_checks));
        out.push(Metric::new("sel3_violation", self.sel3_violations, self.total));
        out
    }

    pub fn metric(&self, name: &str) -> Option<Metric> {
        self.metrics().into_iter().find(|m| m.name == name)
    }
}

fn check_limit(limit: u64, sieve: &PrimeSieve) -> Result<()> {
    if limit > sieve.limit() {
        return Err(Error::OutOfRange { value: limit, limit: sieve.limit() });
    }
    Ok(())
}

/// Squarefree `n ≡ residue (mod modulus)` in block `b`, capped at `limit`.
fn block_members(b: u64, residue: u64, modulus: u64, limit: u64, sieve: &PrimeSieve) -> impl Iterator<Item = FactoredInteger> + '_ {
    let lo = (b * BLOCK).max(1);
    let hi = ((b + 1) * BLOCK - 1).min(limit);
    (lo..=hi).filter(move |n| n % modulus == residue).filter_map(move |n| factor_squarefree(n, sieve).ok())
}

fn blocks(limit: u64) -> std::ops::Range<u64> {
    0..limit / BLOCK + 1
}

/// Aggregates every squarefree `n ≡ t (mod 8)` with `n ≤ limit`.
pub fn scan(t: u64, limit: u64, sieve: &PrimeSieve) -> Result<DensityReport> {
    if !matches!(t, 1 | 2 | 3 | 5 | 6 | 7) {
        return domain(format!("residue {t} must be one of 1, 2, 3, 5, 6, 7"));
    }
    check_limit(limit, sieve)?;
    blocks(limit)
        .into_par_iter()
        .map_init(LCache::new, |cache, b| {
            let mut rep = DensityReport::empty(t, limit);
            for f in block_members(b, t, 8, limit, sieve) {
                rep.record(&f, cache)?;
            }
            Ok(rep)
        })
        .try_reduce(|| DensityReport::empty(t, limit), |a, b| Ok(a.merge(b)))
}

/// A certified congruent number with the row whose `ℒ_x` is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub n: u64,
    pub residue: u64,
    pub row: RowLabel,
    pub selmer_rank3: bool,
    pub l_value: bool,
}

fn certify_one(f: &FactoredInteger, cache: &mut LCache) -> Result<Option<Certificate>> {
    let t = build_twist(f);
    let rows: Vec<Table2Row> = verify_table2_twist(&t, cache);
    let Some(hit) = rows.iter().find(|r| r.l_value) else { return Ok(None) };
    Ok(Some(Certificate {
        n: f.n(),
        residue: f.n() % 8,
        row: hit.row,
        selmer_rank3: rank3_indicator(&t)?,
        l_value: true,
    }))
}

/// Every `n ≡ t (mod 8)`, `n ≤ limit`, with some applicable `ℒ_x(n) ≠ 0`, in
/// increasing order.
pub fn certified_table(t: u64, limit: u64, sieve: &PrimeSieve) -> Result<Vec<Certificate>> {
    if !matches!(t, 5 | 6 | 7) {
        return domain(format!("certificates exist for residues 5, 6, 7; got {t}"));
    }
    check_limit(limit, sieve)?;
    let parts: Vec<Vec<Certificate>> = blocks(limit)
        .into_par_iter()
        .map_init(LCache::new, |cache, b| {
            block_members(b, t, 8, limit, sieve)
                .filter_map(|f| certify_one(&f, cache).transpose())
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// Histogram of 4-ranks of `Cl(Q(√−n))` over squarefree `n ≡ 3 (mod 4)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FourRankCensus {
    pub limit: u64,
    pub total: u64,
    pub counts: Vec<u64>,
}

impl FourRankCensus {
    pub fn frequency(&self, k: usize) -> f64 {
        self.counts.get(k).map_or(0.0, |&c| c as f64 / self.total as f64)
    }

    pub fn metrics(&self) -> Vec<Metric> {
        self.counts.iter().enumerate().map(|(k, &c)| Metric::new(format!("four_rank_{k}"), c, self.total)).collect()
    }
}

pub fn fourrank_census(limit: u64, sieve: &PrimeSieve) -> Result<FourRankCensus> {
    check_limit(limit, sieve)?;
    let counts = blocks(limit)
        .into_par_iter()
        .map(|b| {
            let mut counts: Vec<u64> = Vec::new();
            for f in block_members(b, 3, 4, limit, sieve) {
                let k = four_rank(&f)?;
                if counts.len() <= k {
                    counts.resize(k + 1, 0);
                }
                counts[k] += 1;
            }
            Ok(counts)
        })
        .try_reduce(Vec::new, |mut a, b| {
            if a.len() < b.len() {
                a.resize(b.len(), 0);
            }
            a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
            Ok(a)
        })?;
    Ok(FourRankCensus { limit, total: counts.iter().sum(), counts })
}
