use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// `u * a * v == s`, with `s` diagonal, nonnegative, and each diagonal
/// entry dividing the next.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.s.rows().min(self.s.cols());
        (0..k).map(|i| self.s.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

#[derive(Clone, Copy, Default)]
pub(crate) struct Track {
    pub u: bool,
    pub uinv: bool,
    pub v: bool,
}

/// Raw output of the elimination, with whatever transforms were requested.
pub(crate) struct Reduced {
    pub diag: Vec<BigInt>,
    pub rank: usize,
    pub u: Option<Vec<Vec<BigInt>>>,
    pub uinv: Option<Vec<Vec<BigInt>>>,
    pub v: Option<Vec<Vec<BigInt>>>,
}

fn ident(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

// q with |a - q b| <= |b|/2
fn nearest_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    // r shares the sign of b, so stepping q up shrinks a large remainder
    let twice: BigInt = &r * 2;
    if twice.abs() > b.abs() {
        q + 1
    } else {
        q
    }
}

fn axpy(dst: &mut [BigInt], src: &[BigInt], c: &BigInt) {
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d += c * s;
        }
    }
}

fn two_rows(m: &mut [Vec<BigInt>], i: usize, j: usize) -> (&mut Vec<BigInt>, &Vec<BigInt>) {
    assert_ne!(i, j);
    if i < j {
        let (a, b) = m.split_at_mut(j);
        (&mut a[i], &b[0])
    } else {
        let (a, b) = m.split_at_mut(i);
        (&mut b[0], &a[j])
    }
}

struct Engine {
    m: Vec<Vec<BigInt>>,
    rows: usize,
    cols: usize,
    u: Option<Vec<Vec<BigInt>>>,
    uinv: Option<Vec<Vec<BigInt>>>,
    v: Option<Vec<Vec<BigInt>>>,
}

impl Engine {
    // row i += c * row j
    fn add_row(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let (d, s) = two_rows(&mut self.m, i, j);
        axpy(d, s, c);
        if let Some(u) = self.u.as_mut() {
            let (d, s) = two_rows(u, i, j);
            axpy(d, s, c);
        }
        if let Some(w) = self.uinv.as_mut() {
            // inverse op on the right: col j -= c * col i
            for r in w.iter_mut() {
                if !r[i].is_zero() {
                    let t = c * &r[i];
                    r[j] -= t;
                }
            }
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.m.swap(i, j);
        if let Some(u) = self.u.as_mut() {
            u.swap(i, j);
        }
        if let Some(w) = self.uinv.as_mut() {
            for r in w.iter_mut() {
                r.swap(i, j);
            }
        }
    }

    fn neg_row(&mut self, i: usize) {
        for x in self.m[i].iter_mut() {
            *x = -std::mem::take(x);
        }
        if let Some(u) = self.u.as_mut() {
            for x in u[i].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        if let Some(w) = self.uinv.as_mut() {
            for r in w.iter_mut() {
                r[i] = -std::mem::take(&mut r[i]);
            }
        }
    }

    // col i += c * col j
    fn add_col(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for r in self.m.iter_mut() {
            if !r[j].is_zero() {
                let t = c * &r[j];
                r[i] += t;
            }
        }
        if let Some(v) = self.v.as_mut() {
            for r in v.iter_mut() {
                if !r[j].is_zero() {
                    let t = c * &r[j];
                    r[i] += t;
                }
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in self.m.iter_mut() {
            r.swap(i, j);
        }
        if let Some(v) = self.v.as_mut() {
            for r in v.iter_mut() {
                r.swap(i, j);
            }
        }
    }

    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = &self.m[i][j];
                if x.is_zero() {
                    continue;
                }
                let a = x.abs();
                if a.is_one() {
                    return Some((i, j));
                }
                if best.as_ref().is_none_or(|b| a < b.2) {
                    best = Some((i, j, a));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    fn run(mut self) -> Reduced {
        let k = self.rows.min(self.cols);
        let mut t = 0;
        while t < k {
            let Some((pi, pj)) = self.min_entry(t) else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut clean = true;
                for i in t + 1..self.rows {
                    if !self.m[i][t].is_zero() {
                        let q = nearest_quotient(&self.m[i][t], &self.m[t][t]);
                        self.add_row(i, t, &-q);
                        if !self.m[i][t].is_zero() {
                            clean = false;
                        }
                    }
                }
                for j in t + 1..self.cols {
                    if !self.m[t][j].is_zero() {
                        let q = nearest_quotient(&self.m[t][j], &self.m[t][t]);
                        self.add_col(j, t, &-q);
                        if !self.m[t][j].is_zero() {
                            clean = false;
                        }
                    }
                }
                if !clean {
                    // a remainder is now smaller than the pivot; move it in
                    let mut best = (t, t, self.m[t][t].abs());
                    for i in t + 1..self.rows {
                        let a = self.m[i][t].abs();
                        if !a.is_zero() && a < best.2 {
                            best = (i, t, a);
                        }
                    }
                    for j in t + 1..self.cols {
                        let a = self.m[t][j].abs();
                        if !a.is_zero() && a < best.2 {
                            best = (t, j, a);
                        }
                    }
                    self.swap_rows(t, best.0);
                    self.swap_cols(t, best.1);
                    continue;
                }
                let p = self.m[t][t].clone();
                if p.abs().is_one() {
                    break;
                }
                let bad = (t + 1..self.rows).find(|&i| {
                    self.m[i][t + 1..].iter().any(|x| !x.is_zero() && !x.is_multiple_of(&p))
                });
                match bad {
                    Some(i) => self.add_row(t, i, &BigInt::one()),
                    None => break,
                }
            }
            if self.m[t][t].is_negative() {
                self.neg_row(t);
            }
            t += 1;
        }
        let diag: Vec<BigInt> = (0..k).map(|i| self.m[i][i].clone()).collect();
        Reduced { diag, rank: t, u: self.u, uinv: self.uinv, v: self.v }
    }
}

pub(crate) fn reduce(a: &IntMatrix, track: Track) -> Reduced {
    let (rows, cols) = a.shape();
    let engine = Engine {
        m: a.to_rows(),
        rows,
        cols,
        u: track.u.then(|| ident(rows)),
        uinv: track.uinv.then(|| ident(rows)),
        v: track.v.then(|| ident(cols)),
    };
    engine.run()
}

fn to_matrix(rows: Vec<Vec<BigInt>>, n: usize) -> IntMatrix {
    IntMatrix::from_rows(&rows, n)
}

/// Smith normal form with both transforms.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = a.shape();
    let r = reduce(a, Track { u: true, uinv: false, v: true });
    let s = IntMatrix::diagonal(rows, cols, &r.diag);
    SmithDecomposition { u: to_matrix(r.u.unwrap(), rows), s, v: to_matrix(r.v.unwrap(), cols) }
}

/// Invariant factors only (diagonal including zeros, length min(rows, cols)).
pub fn invariant_factors(a: &IntMatrix) -> Vec<BigInt> {
    reduce(a, Track::default()).diag
}

pub fn rank(a: &IntMatrix) -> usize {
    reduce(a, Track::default()).rank
}

/// Saturated basis of the integer kernel `{x : a x = 0}`, as columns.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let r = reduce(a, Track { v: true, ..Track::default() });
    let v = to_matrix(r.v.unwrap(), a.cols());
    let idx: Vec<usize> = (r.rank..a.cols()).collect();
    v.select_columns(&idx)
}

/// Basis of the lattice spanned by the columns of `a`, as columns.
pub fn lattice_basis(a: &IntMatrix) -> IntMatrix {
    let r = reduce(a, Track { uinv: true, ..Track::default() });
    let w = r.uinv.unwrap();
    let cols: Vec<Vec<BigInt>> =
        (0..r.rank).map(|j| (0..a.rows()).map(|i| &w[i][j] * &r.diag[j]).collect()).collect();
    IntMatrix::from_columns(a.rows(), &cols)
}

/// Cached factorisation for repeated exact solves of `a x = b`.
pub struct Solver {
    u: IntMatrix,
    v: IntMatrix,
    diag: Vec<BigInt>,
    rank: usize,
}

impl Solver {
    pub fn new(a: &IntMatrix) -> Self {
        let r = reduce(a, Track { u: true, v: true, ..Track::default() });
        Solver {
            u: to_matrix(r.u.unwrap(), a.rows()),
            v: to_matrix(r.v.unwrap(), a.cols()),
            diag: r.diag,
            rank: r.rank,
        }
    }

    /// Some integer solution, if one exists. When `a` has full column rank
    /// the solution is unique.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        let ub = self.u.mul_vec(b);
        let mut y = vec![BigInt::zero(); self.v.rows()];
        for (i, c) in ub.iter().enumerate() {
            if i < self.rank {
                let (q, r) = c.div_rem(&self.diag[i]);
                if !r.is_zero() {
                    return None;
                }
                y[i] = q;
            } else if !c.is_zero() {
                return None;
            }
        }
        Some(self.v.mul_vec(&y))
    }

    /// Solves column by column; `None` if any column is not in the span.
    pub fn solve_matrix(&self, b: &IntMatrix) -> Option<IntMatrix> {
        let mut cols = Vec::with_capacity(b.cols());
        for j in 0..b.cols() {
            cols.push(self.solve(&b.column(j))?);
        }
        Some(IntMatrix::from_columns(self.v.rows(), &cols))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>], cols: usize) -> IntMatrix {
        IntMatrix::from_rows(rows, cols)
    }

    fn check(a: &IntMatrix) -> SmithDecomposition {
        let d = smith_normal_form(a);
        assert_eq!(d.u.mul(a).mul(&d.v), d.s);
        assert!(d.u.determinant().abs().is_one());
        assert!(d.v.determinant().abs().is_one());
        d
    }

    #[test]
    fn small_examples() {
        let d = check(&m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3));
        assert_eq!(d.diagonal(), vec![2.into(), 6.into(), 12.into()]);
        let d = check(&m(&[vec![4, 6]], 2));
        assert_eq!(d.diagonal(), vec![BigInt::from(2)]);
    }

    #[test]
    fn coprime_pivots_force_divisibility_fix() {
        let d = check(&m(&[vec![2, 0], vec![0, 3]], 2));
        assert_eq!(d.diagonal(), vec![1.into(), 6.into()]);
    }

    #[test]
    fn empty_and_zero() {
        let d = check(&IntMatrix::zeros(0, 3));
        assert!(d.diagonal().is_empty());
        let d = check(&IntMatrix::zeros(2, 2));
        assert_eq!(d.rank(), 0);
    }

    #[test]
    fn kernel_is_saturated() {
        let a = m(&[vec![2, 4, 6]], 3);
        let k = kernel_basis(&a);
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).is_zero());
        assert_eq!(invariant_factors(&k), vec![BigInt::one(), BigInt::one()]);
    }

    #[test]
    fn lattice_basis_spans() {
        let a = m(&[vec![2, 4, 6], vec![0, 2, 2]], 3);
        let b = lattice_basis(&a);
        assert_eq!(b.cols(), 2);
        let s = Solver::new(&b);
        assert!(s.solve_matrix(&a).is_some());
        let s2 = Solver::new(&a);
        assert!(s2.solve_matrix(&b).is_some());
        assert!(s2.solve(&[1.into(), 0.into()]).is_none());
    }
}
