use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::group::{FgAbGroup, GroupHom, Presentation};
use super::matrix::IntMatrix;
use super::snf::{invariant_factors, kernel_basis, rank, reduce, Solver, Track};
use super::AlgebraError;

/// `ker(d_out) / im(d_in)` for `d_in: C_{k+1} -> C_k`, `d_out: C_k -> C_{k-1}`.
pub fn homology_at(d_in: &IntMatrix, d_out: &IntMatrix) -> Result<FgAbGroup, AlgebraError> {
    Ok(HomologyBasis::new(d_in, d_out)?.group.canonical())
}

/// Independent route: rank from nullity minus rank, torsion straight from
/// the invariant factors of `d_in`.
pub fn homology_by_ranks(d_in: &IntMatrix, d_out: &IntMatrix) -> FgAbGroup {
    let n = d_in.rows();
    let nullity = n - rank(d_out);
    let diag = invariant_factors(d_in);
    let r_in = diag.iter().filter(|d| !d.is_zero()).count();
    let torsion = diag.into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect();
    FgAbGroup { free_rank: nullity - r_in, torsion }
}

fn check_composable(d_in: &IntMatrix, d_out: &IntMatrix) -> Result<(), AlgebraError> {
    if d_out.cols() != d_in.rows() {
        return Err(AlgebraError::ShapeMismatch { expected: (d_out.cols(), d_in.cols()), found: d_in.shape() });
    }
    if !d_out.mul(d_in).is_zero() {
        return Err(AlgebraError::CompositionNotZero);
    }
    Ok(())
}

/// Homology presented on a saturated basis of cycles, with a left inverse
/// for expressing cycles in that basis. Used to push chain maps down.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub cycles: IntMatrix,
    left_inverse: IntMatrix,
    pub group: Presentation,
}

impl HomologyBasis {
    pub fn new(d_in: &IntMatrix, d_out: &IntMatrix) -> Result<Self, AlgebraError> {
        check_composable(d_in, d_out)?;
        let cycles = kernel_basis(d_out);
        let left_inverse = saturated_left_inverse(&cycles);
        let relations = left_inverse.mul(d_in);
        let group = Presentation::new(cycles.cols(), relations);
        Ok(HomologyBasis { cycles, left_inverse, group })
    }

    /// Coordinates of a cycle in the cycle basis.
    pub fn coordinates(&self, cycle: &[BigInt]) -> Vec<BigInt> {
        self.left_inverse.mul_vec(cycle)
    }

    /// Induced map of a chain map `f: C_k -> C_k` (which must send cycles
    /// to cycles and boundaries to boundaries) on this homology group.
    pub fn induced(&self, f: &IntMatrix, target: &HomologyBasis) -> Result<GroupHom, AlgebraError> {
        let images = f.mul(&self.cycles);
        let m = target.left_inverse.mul(&images);
        if target.cycles.mul(&m) != images {
            return Err(AlgebraError::NotChainMap);
        }
        GroupHom::new(self.group.clone(), target.group.clone(), m)
    }
}

// L with L B = I for a saturated basis B (all invariant factors are 1).
fn saturated_left_inverse(b: &IntMatrix) -> IntMatrix {
    let (n, k) = b.shape();
    if k == 0 {
        return IntMatrix::zeros(0, n);
    }
    let r = reduce(b, Track { u: true, v: true, ..Track::default() });
    debug_assert!(r.diag.iter().all(|d| d.is_one()));
    let u = IntMatrix::from_rows(&r.u.unwrap(), n);
    let v = IntMatrix::from_rows(&r.v.unwrap(), k);
    // U B V = [I; 0]  =>  (V [I 0] U) B = I
    let top: Vec<usize> = (0..k).collect();
    v.mul(&u.select_rows(&top))
}

/// Cohomology `H^k` of a chain complex with boundaries `d_k: C_k -> C_{k-1}`
/// (index k = 1..), computed on transposes.
pub fn cohomology_basis(boundaries: &[IntMatrix], cells: &[usize], k: usize) -> Result<HomologyBasis, AlgebraError> {
    let dim = cells.len();
    // coboundary delta_k = d_{k+1}^T : C^k -> C^{k+1}
    let delta = |j: usize| -> IntMatrix {
        if j + 1 < dim {
            boundaries[j].transpose()
        } else {
            IntMatrix::zeros(0, cells[j])
        }
    };
    let d_out = delta(k);
    let d_in = if k == 0 { IntMatrix::zeros(cells[0], 0) } else { delta(k - 1) };
    HomologyBasis::new(&d_in, &d_out)
}

/// Express `v` as an integer combination of the columns of `b`.
pub fn solve_in(b: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    if v.iter().all(|x| x.is_zero()) {
        return Some(vec![BigInt::zero(); b.cols()]);
    }
    Solver::new(b).solve(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>], cols: usize) -> IntMatrix {
        IntMatrix::from_rows(rows, cols)
    }

    #[test]
    fn circle() {
        // one vertex, one loop edge
        let d1 = IntMatrix::zeros(1, 1);
        let h0 = homology_at(&d1, &IntMatrix::zeros(0, 1)).unwrap();
        let h1 = homology_at(&IntMatrix::zeros(1, 0), &d1).unwrap();
        assert_eq!(h0, FgAbGroup::free(1));
        assert_eq!(h1, FgAbGroup::free(1));
    }

    #[test]
    fn projective_plane_torsion() {
        // RP2: 1 vertex, 1 edge a, 1 face with boundary 2a
        let d2 = m(&[vec![2]], 1);
        let d1 = IntMatrix::zeros(1, 1);
        let h1 = homology_at(&d2, &d1).unwrap();
        assert_eq!(h1, FgAbGroup::from_cyclic_orders(&[BigInt::from(2)]));
        assert_eq!(h1, homology_by_ranks(&d2, &d1));
    }

    #[test]
    fn rejects_nonzero_composite() {
        let d = m(&[vec![1]], 1);
        assert!(matches!(homology_at(&d, &d), Err(AlgebraError::CompositionNotZero)));
    }

    #[test]
    fn torus_cohomology_and_swap() {
        // torus: 1 vertex, edges a b, face with boundary a + b - a - b = 0
        let d1 = IntMatrix::zeros(1, 2);
        let d2 = IntMatrix::zeros(2, 1);
        let cells = [1, 2, 1];
        let h1 = cohomology_basis(&[d1, d2], &cells, 1).unwrap();
        assert_eq!(h1.group.canonical(), FgAbGroup::free(2));
        let swap = m(&[vec![0, 1], vec![1, 0]], 2);
        let f = h1.induced(&swap, &h1).unwrap();
        assert_eq!(f.matrix.determinant(), BigInt::from(-1));
    }
}
