//! Independent reference computations used as test oracles. Nothing here
//! calls into the Smith normal form code under test.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use simplexk::IntMatrix;

pub fn to_rows(m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn int_matrix(rows: usize, cols: usize, m: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_i64(rows, cols, &m.concat()).unwrap()
}

/// Cofactor expansion along the first row.
pub fn laplace_det(m: &[Vec<BigInt>]) -> BigInt {
    match m.len() {
        0 => BigInt::one(),
        1 => m[0][0].clone(),
        n => {
            let mut total = BigInt::zero();
            for c in 0..n {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<BigInt>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = &m[0][c] * laplace_det(&minor);
                if c % 2 == 0 {
                    total += term;
                } else {
                    total -= term;
                }
            }
            total
        }
    }
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Determinantal divisors: `g[k]` is the gcd of all `k×k` minors.
pub fn minor_gcds(m: &[Vec<BigInt>], cols: usize) -> Vec<BigInt> {
    let rows = m.len();
    let mut out = vec![BigInt::one()];
    for k in 1..=rows.min(cols) {
        let mut g = BigInt::zero();
        for rs in combinations(rows, k) {
            for cs in combinations(cols, k) {
                let sub: Vec<Vec<BigInt>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c].clone()).collect()).collect();
                g = g.gcd(&laplace_det(&sub));
            }
        }
        out.push(g);
    }
    out
}

/// Invariant factors `d_k = g_k / g_{k-1}` up to the rank.
pub fn minor_gcd_diagonal(m: &[Vec<BigInt>], cols: usize) -> Vec<BigInt> {
    let g = minor_gcds(m, cols);
    let mut d = Vec::new();
    for k in 1..g.len() {
        if g[k].is_zero() {
            break;
        }
        d.push(&g[k] / &g[k - 1]);
    }
    d
}

/// Rank over Q by fraction-exact Gaussian elimination.
pub fn rational_rank(m: &[Vec<BigInt>], cols: usize) -> usize {
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in 0..a.len() {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[rank][c];
                let pivot = a[rank].clone();
                for (x, p) in a[r][c..cols].iter_mut().zip(&pivot[c..cols]) {
                    *x -= &f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Free rank and nontrivial invariant factors of `Z^rows / im(m)`.
pub fn cokernel_oracle(m: &[Vec<BigInt>], rows: usize, cols: usize) -> (usize, Vec<u64>) {
    let rank = rational_rank(m, cols);
    let torsion = minor_gcd_diagonal(m, cols)
        .into_iter()
        .map(|d| u64::try_from(d.abs()).unwrap())
        .filter(|&d| d > 1)
        .collect();
    (rows - rank, torsion)
}

/// Homology of `C_n → … → C_0` at every degree as (free rank, torsion), via
/// rational ranks for the free part and determinantal divisors of the
/// incoming differential for the torsion (the kernel is saturated, so
/// `ker/im` and `C_p/im` have the same torsion).
pub fn homology_oracle(ranks: &[usize], ds: &[Vec<Vec<BigInt>>]) -> Vec<(usize, Vec<u64>)> {
    let rank_of = |p: usize| -> usize {
        if p == 0 || p >= ranks.len() {
            return 0;
        }
        rational_rank(&ds[p - 1], ranks[p])
    };
    (0..ranks.len())
        .map(|p| {
            let free = ranks[p] - rank_of(p) - rank_of(p + 1);
            let torsion = if p + 1 < ranks.len() {
                cokernel_oracle(&ds[p], ranks[p], ranks[p + 1]).1
            } else {
                vec![]
            };
            (free, torsion)
        })
        .collect()
}

pub fn matmul(a: &[Vec<i64>], b: &[Vec<i64>], inner: usize, cols: usize) -> Vec<Vec<i64>> {
    a.iter()
        .map(|r| (0..cols).map(|c| (0..inner).map(|k| r[k] * b[k][c]).sum()).collect())
        .collect()
}

/// Random `n×n` unimodular matrix and its inverse, built from a few
/// elementary row operations with small multipliers.
pub fn unimodular_pair() -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    (1usize..=4).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, -2i64..=2), 0..5).prop_map(move |ops| {
            let id: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
            let (mut u, mut inv) = (id.clone(), id);
            for (i, j, k) in ops {
                if i == j {
                    continue;
                }
                // u ← E·u with E = I + k e_ij; inv ← inv·E⁻¹.
                let src = u[j].clone();
                for (x, s) in u[i].iter_mut().zip(&src) {
                    *x += k * s;
                }
                for row in inv.iter_mut() {
                    let t = row[i];
                    row[j] -= k * t;
                }
            }
            (u, inv)
        })
    })
}

pub fn small_matrix(max: usize, lo: i64, hi: i64) -> impl Strategy<Value = (usize, usize, Vec<Vec<i64>>)> {
    (1..=max, 1..=max).prop_flat_map(move |(r, c)| {
        prop::collection::vec(prop::collection::vec(lo..=hi, c), r).prop_map(move |m| (r, c, m))
    })
}

/// A valid complex `C_2 → C_1 → C_0` with ranks ≤ 4: both differentials are
/// built around a split of `C_1 = A ⊕ B` in a random basis, with `d_2` landing
/// in `A` and `d_1` vanishing on `A`.
pub fn three_term_complex() -> impl Strategy<Value = (Vec<usize>, Vec<Vec<Vec<i64>>>)> {
    (unimodular_pair(), 0usize..=4, 0usize..=4)
        .prop_flat_map(|((u, uinv), n0, n2)| {
            let n1 = u.len();
            (Just((u, uinv)), Just(n0), Just(n2), 0..=n1)
        })
        .prop_flat_map(|((u, uinv), n0, n2, s)| {
            let n1 = u.len();
            let dpart = prop::collection::vec(prop::collection::vec(-4i64..=4, n2), s);
            let epart = prop::collection::vec(prop::collection::vec(-4i64..=4, n1 - s), n0);
            (Just((u, uinv)), Just((n0, n2, s)), dpart, epart)
        })
        .prop_map(|((u, uinv), (n0, n2, s), dpart, epart)| {
            let n1 = u.len();
            // d2 = U · [D; 0]
            let mut dz: Vec<Vec<i64>> = dpart;
            dz.extend((s..n1).map(|_| vec![0; n2]));
            let d2 = matmul(&u, &dz, n1, n2);
            // d1 = [0 | E] · U⁻¹
            let e0: Vec<Vec<i64>> = epart
                .into_iter()
                .map(|row| std::iter::repeat_n(0, s).chain(row).collect())
                .collect();
            let d1 = matmul(&e0, &uinv, n1, n1);
            (vec![n0, n1, n2], vec![d1, d2])
        })
}
