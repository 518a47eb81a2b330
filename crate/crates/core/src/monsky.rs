//! Per-`n` matrices: the Legendre-symbol data `y`, `z`, `A`, Rédei
//! determinants, the determinant forms `M_x` and 2-Selmer ranks.
//!
//! Write the odd part of `n` as `p₁ ⋯ p_r` with `p₁ < ⋯ < p_r`. Then
//! `y_i = (−1/p_i)₊`, `z_i = (2/p_i)₊`, `A_ij = (p_j/p_i)₊` off the diagonal,
//! and each diagonal entry of `A` makes its row sum to zero.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gf2::{block, Block, F2Matrix, F2Vector, IndexSet};
use crate::numtheory::{legendre_plus, FactoredInteger};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistData {
    pub f: FactoredInteger,
    pub y: F2Vector,
    pub z: F2Vector,
    pub a: F2Matrix,
}

/// `A` with the row-sum diagonal: `A_ij = sym(i, j)` for `i ≠ j`.
pub(crate) fn row_sum_matrix(r: usize, sym: impl Fn(usize, usize) -> bool) -> F2Matrix {
    let mut a = F2Matrix::from_fn(r, r, |i, j| i != j && sym(i, j));
    for i in 0..r {
        let s = a.row(i).parity();
        a.set(i, i, s);
    }
    a
}

pub fn build_twist(f: &FactoredInteger) -> TwistData {
    let p = f.odd_primes();
    let lp = |d: i64, q: u64| legendre_plus(d, q).expect("distinct odd primes are coprime");
    let y = F2Vector::from_bools(p.iter().map(|&q| lp(-1, q)));
    let z = F2Vector::from_bools(p.iter().map(|&q| lp(2, q)));
    let a = row_sum_matrix(p.len(), |i, j| lp(p[j] as i64, p[i]));
    TwistData { f: f.clone(), y, z, a }
}

impl TwistData {
    pub fn r(&self) -> usize {
        self.f.r()
    }

    /// `(A_Rows[S,S], y[S], z[S])`: the data of the divisor picked out by `S`.
    pub fn restrict(&self, s: &IndexSet) -> Result<(F2Matrix, F2Vector, F2Vector)> {
        Ok((self.a.rows_normalized(s, s)?, self.y.restrict(s)?, self.z.restrict(s)?))
    }

    /// The data of the divisor picked out by `mask` (bit `i` selects `p_{i+1}`),
    /// doubled when `with_two`.
    pub fn divisor(&self, mask: u64, with_two: bool) -> TwistData {
        let s = IndexSet::from_mask(mask, self.r());
        let (a, y, z) = self.restrict(&s).expect("mask lies inside [r]");
        TwistData { f: self.f.divisor(mask, with_two), y, z, a }
    }

    /// Both structural invariants: rows of `A` sum to zero and
    /// `A_ij + A_ji = y_i y_j` off the diagonal.
    pub fn check_invariants(&self) -> bool {
        let r = self.r();
        self.a.row_sums().is_zero()
            && (0..r).all(|i| {
                (0..r).all(|j| {
                    i == j || self.a.get(i, j) ^ self.a.get(j, i) == (self.y.get(i) & self.y.get(j))
                })
            })
    }
}

/// Diagonal matrix `D_v`.
pub fn diag(v: &F2Vector) -> F2Matrix {
    F2Matrix::diagonal(v)
}

/// Rédei determinant `g(n)` from Table-1 style data, using the free indices
/// `i` (and `j`) when the residue class needs them. `g = 1` exactly when the
/// 4-rank of the class group of `Q(√−n)` is zero.
pub fn redei_g_with(t: &TwistData, i: usize, j: usize) -> Result<bool> {
    let r = t.r();
    if t.f.is_even() {
        return t.a.add(&diag(&t.z))?.det();
    }
    if t.f.n() == 1 {
        return Ok(true);
    }
    if !(1..=r).contains(&i) || !(1..=r).contains(&j) {
        return domain(format!("free indices ({i}, {j}) must lie in [1, {r}]"));
    }
    match t.f.n() % 4 {
        1 => {
            let cols = t.a.submatrix(&IndexSet::full(r), &IndexSet::full_without(r, i))?;
            cols.with_column(&t.z)?.det()
        }
        _ => t
            .a
            .submatrix(&IndexSet::full_without(r, i), &IndexSet::full_without(r, j))?
            .det(),
    }
}

pub fn redei_g_of(t: &TwistData) -> bool {
    redei_g_with(t, 1, 1).expect("index 1 is admissible whenever r ≥ 1")
}

pub fn redei_g(f: &FactoredInteger) -> bool {
    redei_g_of(&build_twist(f))
}

/// Rows of the determinant table, one per residue class (two for 5 and 7).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RowLabel {
    R1,
    R2,
    R3,
    R5a,
    R5b,
    R6,
    R7a,
    R7b,
}

impl RowLabel {
    pub const ALL: [RowLabel; 8] = [
        RowLabel::R1,
        RowLabel::R2,
        RowLabel::R3,
        RowLabel::R5a,
        RowLabel::R5b,
        RowLabel::R6,
        RowLabel::R7a,
        RowLabel::R7b,
    ];

    /// The residue of `n` modulo 8 this row applies to.
    pub fn residue(self) -> u64 {
        match self {
            RowLabel::R1 => 1,
            RowLabel::R2 => 2,
            RowLabel::R3 => 3,
            RowLabel::R5a | RowLabel::R5b => 5,
            RowLabel::R6 => 6,
            RowLabel::R7a | RowLabel::R7b => 7,
        }
    }

    pub fn for_residue(n_mod_8: u64) -> &'static [RowLabel] {
        match n_mod_8 % 8 {
            1 => &[RowLabel::R1],
            2 => &[RowLabel::R2],
            3 => &[RowLabel::R3],
            5 => &[RowLabel::R5a, RowLabel::R5b],
            6 => &[RowLabel::R6],
            7 => &[RowLabel::R7a, RowLabel::R7b],
            _ => &[],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RowLabel::R1 => "1",
            RowLabel::R2 => "2",
            RowLabel::R3 => "3",
            RowLabel::R5a => "5a",
            RowLabel::R5b => "5b",
            RowLabel::R6 => "6",
            RowLabel::R7a => "7a",
            RowLabel::R7b => "7b",
        }
    }
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RowLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RowLabel::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s.trim_start_matches(['R', 'r'])))
            .ok_or_else(|| Error::Domain(format!("unknown row label {s:?}")))
    }
}

/// `M_x(A, y, z)` as a function of the data, with no residue check.
pub fn assemble_mx(row: RowLabel, a: &F2Matrix, y: &F2Vector, z: &F2Vector) -> Result<F2Matrix> {
    use Block::{Column as C, Matrix as M, Row as R, Scalar, Zero};
    let r = a.nrows();
    if !a.is_square() || y.len() != r || z.len() != r {
        return domain("A, y and z must share one dimension");
    }
    let at = a.transpose();
    let sym = a.add(&at)?;
    let dz = diag(z);
    let yz = y.xor(z);
    let sym_yz = sym.add(&diag(&yz))?;
    let o = || Scalar(false);
    let grid = match row {
        RowLabel::R1 => vec![vec![M(sym), M(at)], vec![M(a.clone()), M(dz)]],
        RowLabel::R2 => vec![vec![M(sym_yz), M(at)], vec![M(a.clone()), M(dz)]],
        RowLabel::R3 => vec![
            vec![M(sym), M(at), C(y.clone())],
            vec![M(a.clone()), M(dz), Zero],
            vec![R(y.clone()), Zero, o()],
        ],
        RowLabel::R5a => vec![
            vec![M(sym), M(at), C(yz.clone())],
            vec![M(a.clone()), M(dz), Zero],
            vec![R(yz), Zero, o()],
        ],
        RowLabel::R5b => vec![
            vec![M(sym), M(at), Zero],
            vec![M(a.clone()), M(dz), C(y.clone())],
            vec![Zero, R(y.clone()), o()],
        ],
        RowLabel::R6 => vec![
            vec![M(sym_yz), M(at), C(y.clone())],
            vec![M(a.clone()), M(dz), C(y.clone())],
            vec![R(y.clone()), R(y.clone()), o()],
        ],
        RowLabel::R7a => vec![
            vec![M(sym), M(at), C(yz.clone()), Zero],
            vec![M(a.clone()), M(dz), Zero, C(y.clone())],
            vec![R(yz), Zero, o(), o()],
            vec![Zero, R(y.clone()), o(), o()],
        ],
        RowLabel::R7b => vec![
            vec![M(sym), M(at), C(yz.clone()), C(y.clone())],
            vec![M(a.clone()), M(dz), Zero, Zero],
            vec![R(yz), Zero, o(), o()],
            vec![R(y.clone()), Zero, o(), o()],
        ],
    };
    block(&grid)
}

fn check_row(row: RowLabel, f: &FactoredInteger) -> Result<()> {
    if f.n() % 8 != row.residue() {
        return domain(format!("row {row} needs n ≡ {} (mod 8), got n = {}", row.residue(), f.n()));
    }
    Ok(())
}

pub fn build_mx(row: RowLabel, t: &TwistData) -> Result<F2Matrix> {
    check_row(row, &t.f)?;
    assemble_mx(row, &t.a, &t.y, &t.z)
}

pub fn det_mx(row: RowLabel, t: &TwistData) -> Result<bool> {
    build_mx(row, t)?.det()
}

/// `O(A, v₁, v₂) = [[A, v₁], [v₂ᵀ, 0]]`.
pub fn build_o(a: &F2Matrix, v1: &F2Vector, v2: &F2Vector) -> Result<F2Matrix> {
    block(&[
        vec![Block::Matrix(a.clone()), Block::Column(v1.clone())],
        vec![Block::Row(v2.clone()), Block::Scalar(false)],
    ])
}

/// `N(A, z, w)`, the `2r + 2` square matrix linearizing the 5b/7a determinants in `z`.
pub fn build_n(a: &F2Matrix, z: &F2Vector, w: &F2Vector) -> Result<F2Matrix> {
    let at = a.transpose();
    let sym = a.add(&at)?;
    let r = a.nrows();
    block(&[
        vec![Block::Matrix(sym), Block::Matrix(at), Block::Zero, Block::Zero],
        vec![
            Block::Matrix(a.clone()),
            Block::Matrix(F2Matrix::zeros(r, r)),
            Block::Column(z.clone()),
            Block::Column(w.clone()),
        ],
        vec![Block::Zero, Block::Row(z.clone()), Block::Scalar(false), Block::Scalar(false)],
        vec![Block::Zero, Block::Row(w.clone()), Block::Scalar(false), Block::Scalar(false)],
    ])
}

/// `P(A, y, z) = [[D_{y+z}, Aᵀ], [A, D_z]]`.
pub fn build_p(a: &F2Matrix, y: &F2Vector, z: &F2Vector) -> Result<F2Matrix> {
    if y.len() != a.nrows() || z.len() != a.nrows() {
        return domain("A, y and z must share one dimension");
    }
    block(&[
        vec![Block::Matrix(diag(&y.xor(z))), Block::Matrix(a.transpose())],
        vec![Block::Matrix(a.clone()), Block::Matrix(diag(z))],
    ])
}

/// `T(A, y, z) = [[D_{y+z}, Aᵀ, y], [A, D_z, 0], [yᵀ, 0, 0]]`.
pub fn build_t(a: &F2Matrix, y: &F2Vector, z: &F2Vector) -> Result<F2Matrix> {
    if y.len() != a.nrows() || z.len() != a.nrows() {
        return domain("A, y and z must share one dimension");
    }
    block(&[
        vec![Block::Matrix(diag(&y.xor(z))), Block::Matrix(a.transpose()), Block::Column(y.clone())],
        vec![Block::Matrix(a.clone()), Block::Matrix(diag(z)), Block::Zero],
        vec![Block::Row(y.clone()), Block::Zero, Block::Scalar(false)],
    ])
}

/// `Q(A, z) = (A[[r], [r−1]] | z)`.
pub fn build_q(a: &F2Matrix, z: &F2Vector) -> Result<F2Matrix> {
    let r = a.nrows();
    if r == 0 {
        return Ok(F2Matrix::zeros(0, 0));
    }
    a.submatrix(&IndexSet::full(r), &IndexSet::full(r - 1))?.with_column(z)
}

/// The subset sum
/// `Σ_{S ⊆ [r], 1 ∈ S} (1 + Σ_S y)(1 + Σ_S z) det Q(A, z)[S] · det M₁(A, z)[S′]`,
/// evaluated literally. It equals `det M₁(A, z)` whenever `A` has zero row
/// sums and `A_ij + A_ji = y_i y_j`.
pub fn main_rec_sum(a: &F2Matrix, y: &F2Vector, z: &F2Vector) -> Result<bool> {
    let r = a.nrows();
    if r == 0 {
        return domain("the sum needs r ≥ 1");
    }
    if r >= 64 {
        return domain("subset sums are limited to r < 64");
    }
    let mut acc = false;
    for mask in (1u64..1 << r).filter(|m| m & 1 == 1) {
        let s = IndexSet::from_mask(mask, r);
        let ys = y.restrict(&s)?;
        let zs = z.restrict(&s)?;
        if ys.parity() || zs.parity() {
            continue;
        }
        let q = build_q(&a.rows_normalized(&s, &s)?, &zs)?;
        if !q.det()? {
            continue;
        }
        let c = s.complement(r);
        let m1 = assemble_mx(RowLabel::R1, &a.rows_normalized(&c, &c)?, &y.restrict(&c)?, &z.restrict(&c)?)?;
        acc ^= m1.det()?;
    }
    Ok(acc)
}

/// Random `(A, y, z)` of dimension `r` satisfying the constraints of the
/// determinant identities: `y`, `z` and the strictly upper part of `A`
/// uniform, `A_ji = A_ij + y_i y_j`, rows of `A` summing to zero.
pub fn sample_constrained<R: rand::Rng + ?Sized>(r: usize, rng: &mut R) -> (F2Matrix, F2Vector, F2Vector) {
    let y = F2Vector::from_bools((0..r).map(|_| rng.gen::<bool>()));
    let z = F2Vector::from_bools((0..r).map(|_| rng.gen::<bool>()));
    let upper: Vec<Vec<bool>> = (0..r).map(|_| (0..r).map(|_| rng.gen()).collect()).collect();
    let a = row_sum_matrix(r, |i, j| {
        if i < j {
            upper[i][j]
        } else {
            upper[j][i] ^ (y.get(i) & y.get(j))
        }
    });
    (a, y, z)
}

/// 2-Selmer rank of `E⁽ⁿ⁾ : y² = x³ − n²x` for `n ≡ 1, 2, 3 (mod 8)`.
pub fn selmer_rank(t: &TwistData) -> Result<usize> {
    let r = t.r();
    match t.f.n() % 8 {
        1 => Ok(2 + build_mx(RowLabel::R1, t)?.corank()?),
        2 => Ok(2 + build_mx(RowLabel::R2, t)?.corank()?),
        3 => {
            let m3 = build_mx(RowLabel::R3, t)?;
            let idx = IndexSet::full(2 * r);
            Ok(1 + m3.submatrix(&idx, &idx)?.corank()?)
        }
        k => domain(format!("selmer_rank covers n ≡ 1, 2, 3 (mod 8); n ≡ {k}")),
    }
}

/// Whether the 2-Selmer group has rank exactly three, for `n ≡ 5, 6, 7 (mod 8)`.
pub fn rank3_indicator(t: &TwistData) -> Result<bool> {
    let m1 = || assemble_mx(RowLabel::R1, &t.a, &t.y, &t.z);
    match t.f.n() % 8 {
        5 => Ok(m1()?.corank()? == 1),
        6 => Ok(assemble_mx(RowLabel::R2, &t.a, &t.y, &t.z)?.corank()? == 1),
        7 => Ok(m1()?.corank()? == 2),
        k => domain(format!("rank3_indicator covers n ≡ 5, 6, 7 (mod 8); n ≡ {k}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::{factor_squarefree, PrimeSieve};

    fn twist(n: u64) -> TwistData {
        let s = PrimeSieve::new(n.max(2)).unwrap();
        build_twist(&factor_squarefree(n, &s).unwrap())
    }

    #[test]
    fn twist_examples() {
        let t = twist(15);
        assert_eq!(t.y, F2Vector::from_bits(&[1, 0]));
        assert_eq!(t.z, F2Vector::from_bits(&[1, 1]));
        assert_eq!(t.a, F2Matrix::from_rows(&[[1, 1], [1, 1]]));
        let t = twist(33);
        assert_eq!(t.y, F2Vector::from_bits(&[1, 1]));
        assert_eq!(t.z, F2Vector::from_bits(&[1, 1]));
        assert_eq!(t.a, F2Matrix::from_rows(&[[1, 1], [0, 0]]));
        let t = twist(1);
        assert!(t.y.is_empty() && t.z.is_empty());
        assert_eq!(t.a, F2Matrix::zeros(0, 0));
    }

    #[test]
    fn twist_matches_direct_symbol_calls() {
        let t = twist(3 * 7 * 13 * 17);
        let p = [3u64, 7, 13, 17];
        for i in 0..4 {
            assert_eq!(t.y.get(i), legendre_plus(-1, p[i]).unwrap());
            assert_eq!(t.z.get(i), legendre_plus(2, p[i]).unwrap());
            for j in 0..4 {
                if i != j {
                    assert_eq!(t.a.get(i, j), legendre_plus(p[j] as i64, p[i]).unwrap());
                }
            }
        }
        assert!(t.check_invariants());
    }

    #[test]
    fn diag_examples() {
        assert_eq!(diag(&F2Vector::from_bits(&[1, 0, 1])), F2Matrix::from_rows(&[[1, 0, 0], [0, 0, 0], [0, 0, 1]]));
        assert_eq!(diag(&F2Vector::zeros(0)), F2Matrix::zeros(0, 0));
        assert_eq!(diag(&F2Vector::from_bits(&[1, 1])), F2Matrix::identity(2));
    }

    #[test]
    fn redei_examples() {
        assert!(redei_g(&twist(5).f));
        for q in [3u64, 7, 11, 19, 23, 31, 43] {
            assert!(redei_g(&twist(q).f), "g({q})");
        }
        assert!(redei_g(&twist(33).f));
        assert!(redei_g(&twist(1).f));
        assert!(redei_g(&twist(2).f));
        let t = twist(33);
        assert!(redei_g_with(&t, 3, 1).is_err());
    }

    #[test]
    fn mx_examples() {
        let m = build_mx(RowLabel::R5a, &twist(5)).unwrap();
        assert_eq!(m, F2Matrix::from_rows(&[[0, 0, 1], [0, 1, 0], [1, 0, 0]]));
        let m = build_mx(RowLabel::R1, &twist(33)).unwrap();
        assert_eq!(m, F2Matrix::from_rows(&[[0, 1, 1, 0], [1, 0, 1, 0], [1, 1, 1, 0], [0, 0, 0, 1]]));
        let m = build_mx(RowLabel::R6, &twist(6)).unwrap();
        assert_eq!(m, F2Matrix::from_rows(&[[0, 0, 1], [0, 1, 1], [1, 1, 0]]));
        assert!(build_mx(RowLabel::R1, &twist(5)).is_err());
    }

    #[test]
    fn mx_dimensions() {
        let t = twist(3 * 5 * 7);
        let r = 3;
        for row in RowLabel::ALL {
            let m = assemble_mx(row, &t.a, &t.y, &t.z).unwrap();
            let want = match row {
                RowLabel::R1 | RowLabel::R2 => 2 * r,
                RowLabel::R7a | RowLabel::R7b => 2 * r + 2,
                _ => 2 * r + 1,
            };
            assert_eq!((m.nrows(), m.ncols()), (want, want), "{row}");
        }
    }

    #[test]
    fn det_mx_examples() {
        assert!(det_mx(RowLabel::R5a, &twist(5)).unwrap());
        assert!(!det_mx(RowLabel::R1, &twist(17)).unwrap());
        assert!(det_mx(RowLabel::R6, &twist(6)).unwrap());
        assert!(det_mx(RowLabel::R1, &twist(1)).unwrap());
    }

    #[test]
    fn auxiliary_matrix_examples() {
        let empty = F2Vector::zeros(0);
        let o = build_o(&F2Matrix::zeros(0, 0), &empty, &empty).unwrap();
        assert_eq!(o, F2Matrix::zeros(1, 1));
        assert!(!o.det().unwrap());

        // n = 15: Σy = 1, so det P vanishes.
        let t = twist(15);
        assert!(t.y.parity());
        assert!(!build_p(&t.a, &t.y, &t.z).unwrap().det().unwrap());

        // n = 5: no divisor is 3 mod 8.
        let t = twist(5);
        assert!(!build_n(&t.a, &t.z, &t.y).unwrap().det().unwrap());

        let t = twist(3 * 5 * 7);
        assert_eq!(build_n(&t.a, &t.z, &t.y).unwrap().nrows(), 8);
        assert_eq!(build_p(&t.a, &t.y, &t.z).unwrap().nrows(), 6);
        assert_eq!(build_t(&t.a, &t.y, &t.z).unwrap().nrows(), 7);
        assert!(build_p(&t.a, &empty, &t.z).is_err());
    }

    #[test]
    fn selmer_examples() {
        assert_eq!(selmer_rank(&twist(3)).unwrap(), 2);
        assert_eq!(selmer_rank(&twist(17)).unwrap(), 4);
        assert_eq!(selmer_rank(&twist(33)).unwrap(), 2);
        assert_eq!(selmer_rank(&twist(1)).unwrap(), 2);
        assert!(selmer_rank(&twist(5)).is_err());
        assert!(rank3_indicator(&twist(5)).unwrap());
        assert!(rank3_indicator(&twist(7)).unwrap());
        assert!(rank3_indicator(&twist(6)).unwrap());
        assert!(rank3_indicator(&twist(3)).is_err());
    }

    #[test]
    fn row_label_parsing() {
        for l in RowLabel::ALL {
            assert_eq!(l.name().parse::<RowLabel>().unwrap(), l);
            assert!(RowLabel::for_residue(l.residue()).contains(&l));
        }
        assert_eq!("R7b".parse::<RowLabel>().unwrap(), RowLabel::R7b);
        assert!("4".parse::<RowLabel>().is_err());
        assert!(RowLabel::for_residue(4).is_empty());
    }
}
