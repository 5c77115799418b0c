//! Independent oracles and fixture helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use tilecoh::algebra::{FgAbGroup, IntMatrix};
use tilecoh::tiling::{load_system, SystemSpec};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn system(name: &str) -> SystemSpec {
    load_system(&fixture(name)).unwrap()
}

/// `values.<key>.value` of an expected-value sidecar.
pub fn expected(name: &str, key: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["values"][key]["value"].clone()
}

pub fn groups(v: &serde_json::Value) -> Vec<FgAbGroup> {
    serde_json::from_value(v.clone()).unwrap()
}

// determinant by cofactor expansion on small minors
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, x)| x.clone()).collect()).collect();
        let term = &m[0][j] * det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors from determinantal divisors `d_k = gcd of k-minors`.
pub fn oracle_factors(a: &IntMatrix) -> Vec<BigInt> {
    let (r, c) = a.shape();
    let mut prev = BigInt::one();
    let mut out = Vec::new();
    for k in 1..=r.min(c) {
        let mut g = BigInt::zero();
        for rows in subsets(r, k) {
            for cols in subsets(c, k) {
                let m: Vec<Vec<BigInt>> = rows.iter().map(|&i| cols.iter().map(|&j| a.get(i, j).clone()).collect()).collect();
                g = g.gcd(&det(&m));
            }
        }
        if g.is_zero() {
            out.extend(std::iter::repeat(BigInt::zero()).take(r.min(c) - out.len()));
            return out;
        }
        out.push(&g / &prev);
        prev = g;
    }
    out
}

pub fn rational_rank(a: &IntMatrix) -> usize {
    let (r, c) = a.shape();
    let mut m: Vec<Vec<BigRational>> =
        (0..r).map(|i| (0..c).map(|j| BigRational::from_integer(a.get(i, j).clone())).collect()).collect();
    let mut rank = 0;
    for col in 0..c {
        let Some(p) = (rank..r).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(rank, p);
        for i in 0..r {
            if i != rank && !m[i][col].is_zero() {
                let f = &m[i][col] / &m[rank][col];
                for j in 0..c {
                    let t = &f * &m[rank][j];
                    m[i][j] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn oracle_homology(d_in: &IntMatrix, d_out: &IntMatrix) -> FgAbGroup {
    let nullity = d_in.rows() - rational_rank(d_out);
    let f = oracle_factors(d_in);
    let r_in = f.iter().filter(|d| !d.is_zero()).count();
    FgAbGroup {
        free_rank: nullity - r_in,
        torsion: f.into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect(),
    }
}

/// Characteristic polynomial by Faddeev–LeVerrier over the rationals,
/// highest degree first.
pub fn charpoly(m: &IntMatrix) -> Vec<BigInt> {
    let n = m.rows();
    let a: Vec<Vec<BigRational>> =
        (0..n).map(|i| (0..n).map(|j| BigRational::from_integer(m.get(i, j).clone())).collect()).collect();
    let mul = |x: &Vec<Vec<BigRational>>, y: &Vec<Vec<BigRational>>| -> Vec<Vec<BigRational>> {
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| &x[i][k] * &y[k][j]).fold(BigRational::zero(), |s, t| s + t)).collect()).collect()
    };
    let mut coeffs = vec![BigRational::one()];
    let mut mk: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        let mut am = mul(&a, &mk);
        for (i, row) in am.iter_mut().enumerate() {
            row[i] += &coeffs[k - 1];
        }
        mk = am;
        let amk = mul(&a, &mk);
        let tr = (0..n).map(|i| amk[i][i].clone()).fold(BigRational::zero(), |s, t| s + t);
        coeffs.push(-tr / BigRational::from_integer(BigInt::from(k as i64)));
    }
    coeffs.into_iter().map(|c| c.to_integer()).collect()
}

pub fn matrix(max: usize, entry: i64) -> impl Strategy<Value = IntMatrix> {
    (0..=max, 0..=max).prop_flat_map(move |(r, c)| {
        prop::collection::vec(-entry..=entry, r * c).prop_map(move |v| {
            if c == 0 {
                return IntMatrix::zeros(r, 0);
            }
            let rows: Vec<Vec<i64>> = v.chunks(c).map(|x| x.to_vec()).collect();
            IntMatrix::from_rows(&rows, c)
        })
    })
}

// random unimodular matrix together with its inverse, from elementary moves
pub fn unimodular(n: usize, moves: &[(usize, usize, i64)]) -> (IntMatrix, IntMatrix) {
    let mut a = IntMatrix::identity(n);
    let mut inv = IntMatrix::identity(n);
    if n < 2 {
        return (a, inv);
    }
    for &(i, j, k) in moves {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        let mut e = IntMatrix::identity(n);
        e.set(i, j, BigInt::from(k));
        let mut einv = IntMatrix::identity(n);
        einv.set(i, j, BigInt::from(-k));
        a = e.mul(&a);
        inv = inv.mul(&einv);
    }
    (a, inv)
}

/// `C_{k+1} -> C_k -> C_{k-1}` with known diagonal shape, conjugated.
pub fn complex() -> impl Strategy<Value = (IntMatrix, IntMatrix)> {
    (1usize..=5, 0usize..=4, 0usize..=4)
        .prop_flat_map(|(b, a, c)| {
            (
                Just((a, b, c)),
                0..=a.min(b),
                prop::collection::vec(1i64..=6, 4),
                prop::collection::vec(1i64..=6, 4),
                prop::collection::vec((0usize..5, 0usize..5, -2i64..=2), 0..12),
                prop::collection::vec((0usize..5, 0usize..5, -2i64..=2), 0..12),
                prop::collection::vec((0usize..5, 0usize..5, -2i64..=2), 0..12),
            )
        })
        .prop_map(|((a, b, c), r1, d1, d2, m1, m2, m3)| {
            let r2 = (b - r1).min(c);
            let mut din = IntMatrix::zeros(b, a);
            for i in 0..r1 {
                din.set(i, i, BigInt::from(d1[i % 4]));
            }
            let mut dout = IntMatrix::zeros(c, b);
            for i in 0..r2 {
                dout.set(i, r1 + i, BigInt::from(d2[i % 4]));
            }
            let (ua, _) = unimodular(a, &m1);
            let (ub, ub_inv) = unimodular(b, &m2);
            let (uc, _) = unimodular(c, &m3);
            (ub.mul(&din).mul(&ua), uc.mul(&dout).mul(&ub_inv))
        })
}
