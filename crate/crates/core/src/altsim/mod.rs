//! Alternating-matrix ensembles `M^alt`, their corank correction `δ`, the
//! limiting corank law `α_k`, and the tools used to check all of it
//! empirically: Monte Carlo over bit assignments, the two Markov chains and a
//! brute-force class group oracle.

mod classgroup;
mod malt;
mod markov;
mod montecarlo;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use classgroup::{classgroup_oracle, classgroup_oracle_with_bound, four_rank, ClassGroupInfo, CLASSGROUP_BOUND};
pub use malt::{
    build_malt, build_malt_bits, delta, equivalence_check, in_x, malt_from_symbols, EquivalenceOutcome,
    DEFAULT_DELTA_BUDGET,
};
pub use markov::{
    alpha, classrank_markov_step, classrank_stationary, gerth_pmf, markov_stationary, markov_step, Parity,
};
pub use montecarlo::{corank_distribution_mc, sample_assignment, BitAssignment, CorankHistogram};

use crate::error::{domain, Error, Result};
use crate::gf2::F2Matrix;
use crate::numtheory::trial_factor;

/// Data defining one `M^alt` ensemble.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AltConfig {
    /// Odd squarefree modulus part; `n` ranges over `X_{n0,D}`.
    pub d: u64,
    /// Admissible base classes. Most configurations have one; the row for
    /// `ℒ₆(2n)` takes both 3 and 7.
    pub n0: Vec<i64>,
    pub t1: Vec<i64>,
    pub t2: Vec<i64>,
    pub q1: Vec<i64>,
    pub q2: Vec<i64>,
    pub d_diag: i64,
    #[serde(skip)]
    pub b: F2Matrix,
}

fn is_perfect_square(x: i128) -> bool {
    if x < 0 {
        return false;
    }
    let s = (x as f64).sqrt() as i128;
    (s.saturating_sub(2)..=s + 2).any(|k| k >= 0 && k * k == x)
}

impl AltConfig {
    pub fn t(&self) -> usize {
        self.t1.len()
    }

    /// Checks the structural conditions: equal `T` lengths, `B` alternating
    /// of size `t`, every listed divisor dividing `2D`, every `n0` coprime to
    /// `2D`, and the square conditions on `b_l = ∏ Q_l`.
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d % 2 == 0 {
            return domain(format!("D = {} must be odd and positive", self.d));
        }
        let primes = trial_factor(self.d);
        if primes.iter().product::<u64>() != self.d || primes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::NotSquarefree(self.d));
        }
        if self.t1.len() != self.t2.len() {
            return domain("T1 and T2 must have the same length");
        }
        if self.b.nrows() != self.t() || !self.b.is_alternating() {
            return domain(format!("B must be an alternating {0}x{0} matrix", self.t()));
        }
        let two_d = 2 * self.d;
        let all = self.t1.iter().chain(&self.t2).chain(&self.q1).chain(&self.q2).chain([&self.d_diag]);
        for &x in all {
            if x == 0 || two_d % x.unsigned_abs() != 0 {
                return domain(format!("{x} does not divide 2D = {two_d}"));
            }
        }
        if self.n0.is_empty() {
            return domain("at least one n0 is required");
        }
        for &n0 in &self.n0 {
            if n0 % 2 == 0 || primes.iter().any(|&q| n0.unsigned_abs() % q == 0) {
                return domain(format!("n0 = {n0} is not coprime to 2D"));
            }
        }
        let b1: i128 = self.q1.iter().map(|&x| x as i128).product();
        let b2: i128 = self.q2.iter().map(|&x| x as i128).product();
        if is_perfect_square(b1) || is_perfect_square(b2) || is_perfect_square(-b1 * b2) {
            return domain(format!("one of b1 = {b1}, b2 = {b2}, -b1 b2 is a square"));
        }
        if is_perfect_square(-b1) && is_perfect_square(-b2) {
            return domain(format!("both b1 = {b1} and b2 = {b2} are -1 times a square"));
        }
        Ok(())
    }
}

/// The seven rows of the reformulation table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Table3Label {
    L5a,
    L5b,
    L5ab,
    L6,
    L7a,
    L7b,
    L7ab,
}

impl Table3Label {
    pub const ALL: [Table3Label; 7] = [
        Table3Label::L5a,
        Table3Label::L5b,
        Table3Label::L5ab,
        Table3Label::L6,
        Table3Label::L7a,
        Table3Label::L7b,
        Table3Label::L7ab,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Table3Label::L5a => "5a",
            Table3Label::L5b => "5b",
            Table3Label::L5ab => "5ab",
            Table3Label::L6 => "6",
            Table3Label::L7a => "7a",
            Table3Label::L7b => "7b",
            Table3Label::L7ab => "7ab",
        }
    }

    /// `δ` as listed in the table.
    pub fn delta_expected(self) -> usize {
        match self {
            Table3Label::L7a | Table3Label::L7b | Table3Label::L7ab => 0,
            _ => 1,
        }
    }

    pub fn config(self) -> AltConfig {
        let (n0, t1, t2, q1): (Vec<i64>, Vec<i64>, Vec<i64>, Vec<i64>) = match self {
            Table3Label::L5a => (vec![5], vec![-2], vec![2], vec![-1]),
            Table3Label::L5b => (vec![5], vec![1], vec![-1], vec![-1]),
            Table3Label::L5ab => (vec![5], vec![-2], vec![-2], vec![-1]),
            Table3Label::L6 => (vec![3, 7], vec![2], vec![-2], vec![-2, -1]),
            Table3Label::L7a => (vec![7], vec![-2, 1], vec![1, -2], vec![-1]),
            Table3Label::L7b => (vec![7], vec![-2, -1], vec![1, 1], vec![-1]),
            Table3Label::L7ab => (vec![7], vec![-2, -1], vec![1, -2], vec![-1]),
        };
        let t = t1.len();
        AltConfig { d: 1, n0, t1, t2, q1, q2: vec![2], d_diag: 1, b: F2Matrix::zeros(t, t) }
    }
}

impl fmt::Display for Table3Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Table3Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Table3Label::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown configuration label {s:?}")))
    }
}
