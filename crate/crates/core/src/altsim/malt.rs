use serde::Serialize;

use super::montecarlo::BitAssignment;
use super::{AltConfig, Table3Label};
use crate::error::{domain, Error, Result};
use crate::gf2::{block, Block, F2Matrix, F2Vector};
use crate::lfun::LCache;
use crate::monsky::{build_twist, RowLabel};
use crate::numtheory::{factor_squarefree, is_square_class, legendre_plus, FactoredInteger, PrimeSieve};

/// Members of `X_{n0,D}` tried when searching for the maximal rank in `δ`.
pub const DEFAULT_DELTA_BUDGET: usize = 200;

/// `M^alt` from the matrix `A` and a map `d ↦ ((d/p_1)₊, …, (d/p_r)₊)`.
pub fn malt_from_symbols(cfg: &AltConfig, a: &F2Matrix, plus: impl Fn(i64) -> F2Vector) -> Result<F2Matrix> {
    let r = a.nrows();
    let t = cfg.t();
    if cfg.t2.len() != t || cfg.b.nrows() != t || cfg.b.ncols() != t {
        return domain("T1, T2 and B must agree on t");
    }
    let gram = |q: &[i64]| {
        let mut m = F2Matrix::zeros(r, r);
        for &d in q {
            let u = plus(d);
            m = m.add(&F2Matrix::outer(&u, &u)).expect("same shape");
        }
        for i in 0..r {
            m.set(i, i, false);
        }
        m
    };
    let rows = |ts: &[i64]| {
        let cols: Vec<F2Vector> = ts.iter().map(|&d| plus(d)).collect();
        F2Matrix::from_columns(r, &cols).expect("same length").transpose()
    };
    let dd = F2Matrix::diagonal(&plus(cfg.d_diag));
    let r1 = rows(&cfg.t1);
    let r2 = rows(&cfg.t2);
    use Block::Matrix as M;
    block(&[
        vec![M(gram(&cfg.q1)), M(a.transpose().add(&dd)?), M(r1.transpose())],
        vec![M(a.add(&dd)?), M(gram(&cfg.q2)), M(r2.transpose())],
        vec![M(r1), M(r2), M(cfg.b.clone())],
    ])
}

/// Whether `n` lies in `X_{n0,D}` for one of the configuration's `n0`.
pub fn in_x(cfg: &AltConfig, f: &FactoredInteger) -> bool {
    let n = f.n();
    if f.is_even() || n > i64::MAX as u64 || crate::numtheory::trial_factor(cfg.d).iter().any(|q| n % q == 0) {
        return false;
    }
    cfg.n0.iter().any(|&n0| is_square_class(n as i64, n0, cfg.d).unwrap_or(false))
}

pub fn build_malt(cfg: &AltConfig, f: &FactoredInteger) -> Result<F2Matrix> {
    if !in_x(cfg, f) {
        return domain(format!("{} is not in X for n0 = {:?}, D = {}", f.n(), cfg.n0, cfg.d));
    }
    let t = build_twist(f);
    let primes = f.odd_primes().to_vec();
    malt_from_symbols(cfg, &t.a, |d| {
        F2Vector::from_bools(primes.iter().map(|&p| legendre_plus(d, p).expect("d divides 2D, p does not")))
    })
}

pub fn build_malt_bits(cfg: &AltConfig, bits: &BitAssignment) -> Result<F2Matrix> {
    let a = bits.a();
    malt_from_symbols(cfg, &a, |d| bits.plus(cfg, d))
}

/// Rank of `{v, v′, v_1, …, v_t}`: the sum of the first `r` columns, the sum
/// of the next `r`, and the last `t` columns.
fn correction_rank(m: &F2Matrix, r: usize, t: usize) -> usize {
    let dim = m.nrows();
    let sum = |range: std::ops::Range<usize>| {
        range.fold(F2Vector::zeros(dim), |acc, j| acc.xor(&m.column(j)))
    };
    let mut cols = vec![sum(0..r), sum(r..2 * r)];
    cols.extend((0..t).map(|i| m.column(2 * r + i)));
    F2Matrix::from_columns(dim, &cols).expect("same length").rank()
}

/// `δ = t + 2 − max rank{v, v′, v_1, …, v_t}`, the maximum taken over the
/// first `budget` members of `X_{n0,D}` in increasing order.
pub fn delta(cfg: &AltConfig, budget: usize, sieve: &PrimeSieve) -> Result<usize> {
    cfg.validate()?;
    let t = cfg.t();
    let mut best = None;
    let mut seen = 0;
    for n in (1..=sieve.limit()).step_by(2) {
        if seen == budget {
            break;
        }
        let Ok(f) = factor_squarefree(n, sieve) else { continue };
        if !in_x(cfg, &f) {
            continue;
        }
        seen += 1;
        let m = build_malt(cfg, &f)?;
        let rank = correction_rank(&m, f.r(), t);
        best = best.max(Some(rank));
        if rank == t + 2 {
            break;
        }
    }
    best.map(|b| t + 2 - b)
        .ok_or_else(|| Error::Search(format!("no member of X below {} for n0 = {:?}", sieve.limit(), cfg.n0)))
}

/// Both sides of the equivalence `F(n) ≠ 0 ⟺ corank M^alt(n) = δ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceOutcome {
    pub label: Table3Label,
    pub n: u64,
    pub f_nonzero: bool,
    pub corank: usize,
    pub delta: usize,
}

impl EquivalenceOutcome {
    pub fn agree(&self) -> bool {
        self.f_nonzero == (self.corank == self.delta)
    }
}

/// The divisor-sum side `F(n)` for a label: one `ℒ_x`, a sum of two, or
/// `ℒ₆(2n)`.
fn f_value(label: Table3Label, f: &FactoredInteger, cache: &mut LCache) -> Result<bool> {
    let l = |cache: &mut LCache, row| cache.l_x(row, f);
    Ok(match label {
        Table3Label::L5a => l(cache, RowLabel::R5a)?,
        Table3Label::L5b => l(cache, RowLabel::R5b)?,
        Table3Label::L5ab => l(cache, RowLabel::R5a)? ^ l(cache, RowLabel::R5b)?,
        Table3Label::L6 => cache.l_x(RowLabel::R6, &f.doubled()?)?,
        Table3Label::L7a => l(cache, RowLabel::R7a)?,
        Table3Label::L7b => l(cache, RowLabel::R7b)?,
        Table3Label::L7ab => l(cache, RowLabel::R7a)? ^ l(cache, RowLabel::R7b)?,
    })
}

/// Evaluates both sides for `n ∈ X_{n0,8}` using the tabulated `δ`.
pub fn equivalence_check(label: Table3Label, f: &FactoredInteger, cache: &mut LCache) -> Result<EquivalenceOutcome> {
    let cfg = label.config();
    let m = build_malt(&cfg, f)?;
    Ok(EquivalenceOutcome {
        label,
        n: f.n(),
        f_nonzero: f_value(label, f, cache)?,
        corank: m.corank()?,
        delta: label.delta_expected(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fi(n: u64) -> FactoredInteger {
        factor_squarefree(n, &PrimeSieve::new(n.max(2)).unwrap()).unwrap()
    }

    #[test]
    fn malt_for_five() {
        let m = build_malt(&Table3Label::L5a.config(), &fi(5)).unwrap();
        assert_eq!(m, F2Matrix::from_rows(&[[0, 0, 1], [0, 0, 1], [1, 1, 0]]));
        assert_eq!(m.corank().unwrap(), 1);
        assert!(build_malt(&Table3Label::L5a.config(), &fi(13)).is_ok());
        assert!(build_malt(&Table3Label::L5a.config(), &fi(7)).is_err());
        assert!(build_malt(&Table3Label::L6.config(), &fi(7)).is_ok());
        assert!(build_malt(&Table3Label::L6.config(), &fi(3)).is_ok());
        assert!(build_malt(&Table3Label::L6.config(), &fi(5)).is_err());
    }

    #[test]
    fn membership() {
        let c = Table3Label::L7a.config();
        assert!(in_x(&c, &fi(7)) && in_x(&c, &fi(15)) && in_x(&c, &fi(23)));
        assert!(!in_x(&c, &fi(5)) && !in_x(&c, &fi(14)) && !in_x(&c, &fi(1)));
    }

    #[test]
    fn delta_examples() {
        let s = PrimeSieve::new(20_000).unwrap();
        assert_eq!(delta(&Table3Label::L5a.config(), DEFAULT_DELTA_BUDGET, &s).unwrap(), 1);
        assert_eq!(delta(&Table3Label::L7a.config(), DEFAULT_DELTA_BUDGET, &s).unwrap(), 0);
        assert_eq!(delta(&Table3Label::L6.config(), DEFAULT_DELTA_BUDGET, &s).unwrap(), 1);
        let small = PrimeSieve::new(4).unwrap();
        assert!(matches!(delta(&Table3Label::L5a.config(), 10, &small), Err(Error::Search(_))));
    }

    #[test]
    fn equivalence_examples() {
        let mut c = LCache::new();
        let o = equivalence_check(Table3Label::L5a, &fi(5), &mut c).unwrap();
        assert!(o.f_nonzero && o.corank == o.delta && o.agree());
        let o = equivalence_check(Table3Label::L7a, &fi(7), &mut c).unwrap();
        assert!(o.f_nonzero && o.corank == o.delta);
        assert!(equivalence_check(Table3Label::L5a, &fi(13), &mut c).unwrap().agree());
        assert!(equivalence_check(Table3Label::L5a, &fi(7), &mut c).is_err());
    }
}
