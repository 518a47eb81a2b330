use std::collections::HashMap;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::gf2::IndexSet;
use crate::monsky::build_twist;
use crate::numtheory::FactoredInteger;

/// Largest `n` the brute-force oracle accepts by default.
pub const CLASSGROUP_BOUND: u64 = 10_000;

/// Reduced primitive positive definite form `ax² + bxy + cy²`.
type Form = (i64, i64, i64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClassGroupInfo {
    pub discriminant: i64,
    pub h: usize,
    pub two_rank: u32,
    pub four_rank: u32,
    /// Whether `|Cl²|` is odd.
    pub square_subgroup_odd: bool,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(g, x, y)` with `ax + by = g`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        return if a < 0 { (-a, -1, 0) } else { (a, 1, 0) };
    }
    let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
    (g, y, x - a.div_euclid(b) * y)
}

fn reduce((mut a, mut b, mut c): Form) -> Form {
    let disc = b as i128 * b as i128 - 4 * a as i128 * c as i128;
    let normalize = |a: i64, b: i64| -> (i64, i64) {
        // b into (−a, a].
        let two_a = 2 * a;
        let mut nb = b.rem_euclid(two_a);
        if nb > a {
            nb -= two_a;
        }
        let c = ((nb as i128 * nb as i128 - disc) / (4 * a as i128)) as i64;
        (nb, c)
    };
    (b, c) = normalize(a, b);
    while a > c {
        (a, b) = (c, -b);
        (b, c) = normalize(a, b);
    }
    if a == c && b < 0 {
        b = -b;
    }
    (a, b, c)
}

fn compose(f: Form, g: Form, disc: i64) -> Form {
    let (a1, b1, _) = f;
    let (a2, b2, c2) = g;
    let s = (b1 + b2) / 2;
    let (d1, _, y1) = ext_gcd(a1, a2);
    let (d, x2, y2) = ext_gcd(d1, s);
    let (v, w) = (x2 * y1, y2);
    let a3 = a1 / d * (a2 / d);
    let b3 = b2 as i128 + 2 * (a2 / d) as i128 * (v as i128 * (s - b2) as i128 - w as i128 * c2 as i128);
    let b3 = b3.rem_euclid(2 * a3 as i128) as i64;
    let c3 = ((b3 as i128 * b3 as i128 - disc as i128) / (4 * a3 as i128)) as i64;
    reduce((a3, b3, c3))
}

fn reduced_forms(disc: i64) -> Vec<Form> {
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= -disc {
        for b in -a + 1..=a {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (a == c && b < 0) || gcd(gcd(a, b), c) != 1 {
                continue;
            }
            out.push((a, b, c));
        }
        a += 1;
    }
    out
}

/// Discriminant of `Q(√−n)`.
fn field_discriminant(n: u64) -> i64 {
    if n % 4 == 3 {
        -(n as i64)
    } else {
        -4 * n as i64
    }
}

pub fn classgroup_oracle(f: &FactoredInteger) -> Result<ClassGroupInfo> {
    classgroup_oracle_with_bound(f, CLASSGROUP_BOUND)
}

/// Class number, 2-rank and 4-rank of `Cl(Q(√−n))` by listing reduced forms
/// and composing them.
pub fn classgroup_oracle_with_bound(f: &FactoredInteger, bound: u64) -> Result<ClassGroupInfo> {
    let n = f.n();
    if n > bound {
        return Err(Error::Resource(format!("n = {n} exceeds the oracle bound {bound}")));
    }
    let disc = field_discriminant(n);
    let forms = reduced_forms(disc);
    let index: HashMap<Form, usize> = forms.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let h = forms.len();
    let identity = reduce((1, disc.rem_euclid(2), (disc.rem_euclid(2) - disc) / 4));
    let square = |x: Form| compose(x, x, disc);
    let two_torsion = forms.iter().filter(|&&x| square(x) == identity).count();
    let mut squares: Vec<Form> = forms.iter().map(|&x| square(x)).collect();
    squares.sort();
    squares.dedup();
    debug_assert!(squares.iter().all(|s| index.contains_key(s)));
    let squares_two_torsion = squares.iter().filter(|&&x| square(x) == identity).count();
    Ok(ClassGroupInfo {
        discriminant: disc,
        h,
        two_rank: two_torsion.trailing_zeros(),
        four_rank: squares_two_torsion.trailing_zeros(),
        square_subgroup_odd: squares.len() % 2 == 1,
    })
}

/// 4-rank of `Cl(Q(√−n))` for `n ≡ 3 (mod 4)` as the corank of
/// `A[[r] − {1}, [r] − {1}]`.
pub fn four_rank(f: &FactoredInteger) -> Result<usize> {
    if f.n() % 4 != 3 {
        return domain(format!("four_rank needs n ≡ 3 (mod 4), got {}", f.n()));
    }
    let t = build_twist(f);
    let s = IndexSet::full_without(t.r(), 1);
    t.a.submatrix(&s, &s)?.corank()
}
