//! The recursive `ℒ(n)` and the divisor sums `ℒ_x(n)`.
//!
//! `ℒ(1) = 1`; for squarefree `n ≡ 1 (mod 8)` and a prime `p | n`,
//! `ℒ(n) = Σ_{p | d | n, d ≡ 1 (8)} g(d) ℒ(n/d)`; otherwise `ℒ(n) = 0`.
//! All divisors are handled as bit masks over the odd primes of one parent
//! `n`, plus a flag for the factor 2.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::monsky::{build_twist, det_mx, redei_g_of, RowLabel, TwistData};
use crate::numtheory::FactoredInteger;

/// Memo tables for `ℒ` and `g`, keyed by the integer itself.
#[derive(Clone, Debug, Default)]
pub struct LCache {
    l: HashMap<u64, bool>,
    g: HashMap<u64, bool>,
}

/// A divisor of the parent: odd primes by mask, and whether 2 divides it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Div {
    mask: u64,
    two: bool,
}

fn value(t: &TwistData, d: Div) -> u64 {
    let p = t.f.odd_primes();
    let odd: u64 = (0..p.len()).filter(|&i| d.mask >> i & 1 == 1).map(|i| p[i]).product();
    if d.two {
        2 * odd
    } else {
        odd
    }
}

fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    // Every s ⊆ mask, including 0 and mask itself.
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let s = next?;
        next = if s == 0 { None } else { Some((s - 1) & mask) };
        Some(s)
    })
}

fn full_mask(t: &TwistData) -> u64 {
    (1u64 << t.r()) - 1
}

impl LCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.l.len() + self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn g_div(&mut self, t: &TwistData, d: Div) -> bool {
        let v = value(t, d);
        if let Some(&b) = self.g.get(&v) {
            return b;
        }
        let b = redei_g_of(&t.divisor(d.mask, d.two));
        self.g.insert(v, b);
        b
    }

    /// `ℒ` of the odd divisor `mask` of `t`, recursing on `pivot` (an index
    /// into the parent's primes that `mask` contains) or on its lowest prime.
    fn l_mask(&mut self, t: &TwistData, mask: u64, pivot: Option<usize>) -> bool {
        let v = value(t, Div { mask, two: false });
        if v == 1 {
            return true;
        }
        if v % 8 != 1 {
            return false;
        }
        if pivot.is_none() {
            if let Some(&b) = self.l.get(&v) {
                return b;
            }
        }
        let p = pivot.map_or(mask.trailing_zeros() as u64, |i| i as u64);
        let mut acc = false;
        for s in submasks(mask) {
            if s >> p & 1 == 0 {
                continue;
            }
            let d = Div { mask: s, two: false };
            if value(t, d) % 8 != 1 {
                continue;
            }
            if self.g_div(t, d) && self.l_mask(t, mask & !s, None) {
                acc = !acc;
            }
        }
        if pivot.is_none() {
            self.l.insert(v, acc);
        }
        acc
    }

    fn l_div(&mut self, t: &TwistData, d: Div) -> bool {
        !d.two && self.l_mask(t, d.mask, None)
    }

    pub fn script_l(&mut self, f: &FactoredInteger) -> bool {
        let t = build_twist(f);
        self.l_div(&t, Div { mask: full_mask(&t), two: f.is_even() })
    }

    /// `ℒ(n)` recursing on the prime `p_pivot` (1-based) instead of the
    /// smallest one. Results are not cached at the top level.
    pub fn script_l_with_pivot(&mut self, f: &FactoredInteger, pivot: usize) -> Result<bool> {
        if !(1..=f.r()).contains(&pivot) {
            return domain(format!("pivot {pivot} must lie in [1, {}]", f.r()));
        }
        let t = build_twist(f);
        if f.is_even() {
            return Ok(false);
        }
        Ok(self.l_mask(&t, full_mask(&t), Some(pivot - 1)))
    }

    pub fn g(&mut self, f: &FactoredInteger) -> bool {
        let t = build_twist(f);
        self.g_div(&t, Div { mask: full_mask(&t), two: f.is_even() })
    }

    pub fn l_x(&mut self, row: RowLabel, f: &FactoredInteger) -> Result<bool> {
        self.l_x_twist(row, &build_twist(f))
    }

    /// `ℒ_x(n)` from already-built twist data.
    pub fn l_x_twist(&mut self, row: RowLabel, t: &TwistData) -> Result<bool> {
        let n = t.f.n();
        if n % 8 != row.residue() {
            return domain(format!("row {row} needs n ≡ {} (mod 8), got n = {n}", row.residue()));
        }
        let whole = Div { mask: full_mask(t), two: t.f.is_even() };
        Ok(match row {
            RowLabel::R1 => self.l_div(t, whole),
            RowLabel::R2 => self.single_sum(t, whole, |d| d % 16 == n % 16),
            RowLabel::R3 => self.single_sum(t, whole, |d| d % 8 == 3),
            RowLabel::R5a => self.single_sum(t, whole, |d| d % 8 == 5),
            RowLabel::R7a => self.single_sum(t, whole, |d| d % 8 == 7),
            RowLabel::R5b => self.double_sum(t, whole, |d0, d1| d0 % 8 == 7 && d1 % 8 == 3),
            RowLabel::R7b => self.double_sum(t, whole, |d0, d1| d0 % 8 == 5 && d1 % 8 == 3),
            RowLabel::R6 => {
                let m = (7 * n) % 16;
                self.double_sum(t, whole, |d0, d1| d0 % 16 == m && d1 % 8 == 7)
                    ^ self.single_sum(t, whole, |d| d % 16 == n % 16)
            }
        })
    }

    /// `Σ_{d | n, cond(d)} g(d) ℒ(n/d)`.
    fn single_sum(&mut self, t: &TwistData, whole: Div, cond: impl Fn(u64) -> bool) -> bool {
        let mut acc = false;
        for &two in twos(whole.two) {
            for s in submasks(whole.mask) {
                let d = Div { mask: s, two };
                if !cond(value(t, d)) {
                    continue;
                }
                let rest = Div { mask: whole.mask & !s, two: whole.two && !two };
                if self.g_div(t, d) && self.l_div(t, rest) {
                    acc = !acc;
                }
            }
        }
        acc
    }

    /// `Σ_{d₀d₁ | n, cond(d₀, d₁)} g(d₀) g(d₁) ℒ(n/d₀d₁)` over coprime pairs.
    fn double_sum(&mut self, t: &TwistData, whole: Div, cond: impl Fn(u64, u64) -> bool) -> bool {
        let mut acc = false;
        // Where the factor 2 goes: nowhere (odd n), d₀, d₁ or the cofactor.
        let placements: &[(bool, bool)] =
            if whole.two { &[(true, false), (false, true), (false, false)] } else { &[(false, false)] };
        for &(two0, two1) in placements {
            for s0 in submasks(whole.mask) {
                for s1 in submasks(whole.mask & !s0) {
                    let d0 = Div { mask: s0, two: two0 };
                    let d1 = Div { mask: s1, two: two1 };
                    if !cond(value(t, d0), value(t, d1)) {
                        continue;
                    }
                    let rest = Div { mask: whole.mask & !s0 & !s1, two: whole.two && !two0 && !two1 };
                    if self.g_div(t, d0) && self.g_div(t, d1) && self.l_div(t, rest) {
                        acc = !acc;
                    }
                }
            }
        }
        acc
    }
}

fn twos(even: bool) -> &'static [bool] {
    if even {
        &[false, true]
    } else {
        &[false]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Table2Row {
    pub row: RowLabel,
    pub l_value: bool,
    pub det_value: bool,
}

impl Table2Row {
    pub fn equal(&self) -> bool {
        self.l_value == self.det_value
    }
}

/// Both sides of every determinant row that applies to `n`.
pub fn verify_table2(f: &FactoredInteger, cache: &mut LCache) -> Vec<Table2Row> {
    verify_table2_twist(&build_twist(f), cache)
}

pub fn verify_table2_twist(t: &TwistData, cache: &mut LCache) -> Vec<Table2Row> {
    RowLabel::for_residue(t.f.n() % 8)
        .iter()
        .map(|&row| Table2Row {
            row,
            l_value: cache.l_x_twist(row, t).expect("row chosen by residue"),
            det_value: det_mx(row, t).expect("row chosen by residue"),
        })
        .collect()
}
