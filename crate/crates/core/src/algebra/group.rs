use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;
use super::snf::{invariant_factors, kernel_basis, lattice_basis, reduce, Solver, Track};
use super::AlgebraError;

/// Finitely generated abelian group in invariant-factor form:
/// `Z^free_rank ⊕ Z/d1 ⊕ ... ⊕ Z/dk` with `1 < d1 | d2 | ... | dk`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FgAbGroup {
    #[serde(rename = "rank", alias = "free_rank")]
    pub free_rank: usize,
    #[serde(with = "bigint_list")]
    pub torsion: Vec<BigInt>,
}

mod bigint_list {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(super::super::matrix::bigint_json))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw: Vec<serde_json::Value> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|v| {
                let text = match v {
                    serde_json::Value::Number(n) => n.to_string(),
                    serde_json::Value::String(s) => s,
                    other => return Err(serde::de::Error::custom(format!("bad integer {other}"))),
                };
                text.parse::<BigInt>().map_err(serde::de::Error::custom)
            })
            .collect()
    }
}

impl FgAbGroup {
    pub fn zero() -> Self {
        FgAbGroup { free_rank: 0, torsion: vec![] }
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup { free_rank: rank, torsion: vec![] }
    }

    /// Normalises arbitrary cyclic orders (0 = infinite) into invariant
    /// factor form.
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Self {
        let diag = IntMatrix::diagonal(orders.len(), orders.len(), orders);
        Presentation::new(orders.len(), diag).canonical()
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &FgAbGroup) -> FgAbGroup {
        let mut orders: Vec<BigInt> = self.torsion.iter().chain(&other.torsion).cloned().collect();
        orders.extend(std::iter::repeat(BigInt::zero()).take(self.free_rank + other.free_rank));
        FgAbGroup::from_cyclic_orders(&orders)
    }

    /// Number of generators of the standard presentation.
    pub fn generator_count(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    /// Generators ordered free first, then torsion.
    pub fn presentation(&self) -> Presentation {
        let n = self.generator_count();
        let mut rel_cols = Vec::new();
        for (i, d) in self.torsion.iter().enumerate() {
            let mut c = vec![BigInt::zero(); n];
            c[self.free_rank + i] = d.clone();
            rel_cols.push(c);
        }
        Presentation::new(n, IntMatrix::from_columns(n, &rel_cols))
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `Z^generators / col(relations)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: usize,
    pub relations: IntMatrix,
}

impl Presentation {
    pub fn new(generators: usize, relations: IntMatrix) -> Self {
        assert_eq!(relations.rows(), generators, "relation matrix height must equal generator count");
        Presentation { generators, relations }
    }

    pub fn free(n: usize) -> Self {
        Presentation::new(n, IntMatrix::zeros(n, 0))
    }

    pub fn canonical(&self) -> FgAbGroup {
        let diag = invariant_factors(&self.relations);
        let rank = diag.iter().filter(|d| !d.is_zero()).count();
        let torsion: Vec<BigInt> = diag.into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect();
        FgAbGroup { free_rank: self.generators - rank, torsion }
    }

    /// Whether `v` (a vector over the generators) is zero in the group.
    pub fn is_trivial_element(&self, v: &[BigInt]) -> bool {
        if v.iter().all(|x| x.is_zero()) {
            return true;
        }
        Solver::new(&self.relations).solve(v).is_some()
    }

    /// Lattice spanned by the relations, used to test containment.
    fn relation_solver(&self) -> Solver {
        Solver::new(&self.relations)
    }
}

/// Homomorphism between presented groups, given on generators.
#[derive(Clone, Debug)]
pub struct GroupHom {
    pub source: Presentation,
    pub target: Presentation,
    pub matrix: IntMatrix,
}

impl GroupHom {
    pub fn new(source: Presentation, target: Presentation, matrix: IntMatrix) -> Result<Self, AlgebraError> {
        if matrix.shape() != (target.generators, source.generators) {
            return Err(AlgebraError::ShapeMismatch {
                expected: (target.generators, source.generators),
                found: matrix.shape(),
            });
        }
        let images = matrix.mul(&source.relations);
        if !images.is_zero() {
            let s = target.relation_solver();
            if s.solve_matrix(&images).is_none() {
                return Err(AlgebraError::NotWellDefined);
            }
        }
        Ok(GroupHom { source, target, matrix })
    }

    pub fn identity(p: &Presentation) -> Self {
        GroupHom { source: p.clone(), target: p.clone(), matrix: IntMatrix::identity(p.generators) }
    }

    pub fn compose(&self, first: &GroupHom) -> GroupHom {
        GroupHom { source: first.source.clone(), target: self.target.clone(), matrix: self.matrix.mul(&first.matrix) }
    }

    pub fn source_group(&self) -> FgAbGroup {
        self.source.canonical()
    }

    pub fn target_group(&self) -> FgAbGroup {
        self.target.canonical()
    }

    /// Kernel as a presentation, plus the matrix sending its generators
    /// into the source generators.
    pub fn kernel(&self) -> (Presentation, IntMatrix) {
        let ns = self.source.generators;
        // x with F x in col(R_t): kernel of [F | R_t], projected to x
        let stacked = self.matrix.hstack(&self.target.relations);
        let k = kernel_basis(&stacked);
        let top: Vec<usize> = (0..ns).collect();
        let proj = k.select_rows(&top);
        let basis = lattice_basis(&proj.hstack(&self.source.relations));
        let solver = Solver::new(&basis);
        let rel = solver.solve_matrix(&self.source.relations).expect("source relations lie in kernel lattice");
        (Presentation::new(basis.cols(), rel), basis)
    }

    pub fn cokernel(&self) -> Presentation {
        Presentation::new(self.target.generators, self.target.relations.hstack(&self.matrix))
    }

    /// Image as a subgroup of the target.
    pub fn image(&self) -> (Presentation, IntMatrix) {
        subgroup(&self.target, &self.matrix)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().0.canonical().is_zero()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().canonical().is_zero()
    }

    pub fn is_automorphism(&self) -> bool {
        self.is_surjective() && self.is_injective()
    }

    /// Matrix of an endomorphism of a torsion-free group in a basis of
    /// that group (`None` if the group has torsion).
    pub fn free_matrix(&self) -> Option<IntMatrix> {
        if self.source != self.target {
            return None;
        }
        let n = self.source.generators;
        let r = reduce(&self.source.relations, Track { u: true, uinv: true, ..Track::default() });
        if r.diag[..r.rank].iter().any(|d| !d.is_one()) {
            return None;
        }
        let u = IntMatrix::from_rows(&r.u.unwrap(), n);
        let uinv = IntMatrix::from_rows(&r.uinv.unwrap(), n);
        let m = u.mul(&self.matrix).mul(&uinv);
        let keep: Vec<usize> = (r.rank..n).collect();
        Some(m.select_rows(&keep).select_columns(&keep))
    }
}

/// Subgroup of `g` generated by the columns of `gens`, presented on a basis
/// of `col(gens) + col(relations)`; the returned matrix maps the new
/// generators into `g`'s generators.
pub fn subgroup(g: &Presentation, gens: &IntMatrix) -> (Presentation, IntMatrix) {
    let basis = lattice_basis(&gens.hstack(&g.relations));
    let solver = Solver::new(&basis);
    let rel = solver.solve_matrix(&g.relations).expect("relations lie in the subgroup lattice");
    (Presentation::new(basis.cols(), rel), basis)
}

/// Restricts an endomorphism `f` of `g` to a subgroup given by an
/// embedding `basis` (as returned by [`subgroup`]). Fails if the subgroup
/// is not invariant.
pub fn restrict(f: &IntMatrix, sub: &Presentation, basis: &IntMatrix) -> Result<IntMatrix, AlgebraError> {
    let images = f.mul(basis);
    let solver = Solver::new(basis);
    let m = solver.solve_matrix(&images).ok_or(AlgebraError::NotInvariant)?;
    debug_assert_eq!(m.shape(), (sub.generators, sub.generators));
    Ok(m)
}

/// Fixed subgroup `ker(id - f)` of an endomorphism.
pub fn invariants_of(f: &GroupHom) -> Result<FgAbGroup, AlgebraError> {
    check_endo(f)?;
    let n = f.source.generators;
    let d = GroupHom { source: f.source.clone(), target: f.target.clone(), matrix: IntMatrix::identity(n).sub(&f.matrix) };
    Ok(d.kernel().0.canonical())
}

/// Largest quotient on which `f` acts trivially, `coker(id - f)`.
pub fn coinvariants_of(f: &GroupHom) -> Result<FgAbGroup, AlgebraError> {
    check_endo(f)?;
    let n = f.source.generators;
    let d = GroupHom { source: f.source.clone(), target: f.target.clone(), matrix: IntMatrix::identity(n).sub(&f.matrix) };
    Ok(d.cokernel().canonical())
}

fn check_endo(f: &GroupHom) -> Result<(), AlgebraError> {
    if f.source != f.target {
        return Err(AlgebraError::NotEndomorphism);
    }
    Ok(())
}

/// Order of an element of a presented group; `None` when infinite.
pub fn element_order(g: &Presentation, v: &[BigInt]) -> Option<BigInt> {
    let r = reduce(&g.relations, Track { u: true, ..Track::default() });
    let u = IntMatrix::from_rows(&r.u.unwrap(), g.generators);
    let w = u.mul_vec(v);
    let mut order = BigInt::one();
    for (i, c) in w.iter().enumerate() {
        let d = if i < r.rank { r.diag[i].clone() } else { BigInt::zero() };
        if d.is_zero() {
            if !c.is_zero() {
                return None;
            }
        } else {
            let o = &d / d.gcd(c);
            order = order.lcm(&o);
        }
    }
    Some(order.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn canonical_merges_coprime_torsion() {
        let g = FgAbGroup::from_cyclic_orders(&big(&[2, 3, 0]));
        assert_eq!(g, FgAbGroup { free_rank: 1, torsion: big(&[6]) });
        assert_eq!(g.to_string(), "Z + Z/6");
    }

    #[test]
    fn kernel_of_multiplication_on_torsion() {
        // x -> 2x on Z/4 has kernel Z/2
        let z4 = FgAbGroup::from_cyclic_orders(&big(&[4])).presentation();
        let f = GroupHom::new(z4.clone(), z4, IntMatrix::from_rows(&[vec![2]], 1)).unwrap();
        assert_eq!(f.kernel().0.canonical(), FgAbGroup::from_cyclic_orders(&big(&[2])));
        assert_eq!(f.cokernel().canonical(), FgAbGroup::from_cyclic_orders(&big(&[2])));
    }

    #[test]
    fn ill_defined_hom_rejected() {
        let z2 = FgAbGroup::from_cyclic_orders(&big(&[2])).presentation();
        let z = Presentation::free(1);
        let r = GroupHom::new(z2, z, IntMatrix::from_rows(&[vec![1]], 1));
        assert!(matches!(r, Err(AlgebraError::NotWellDefined)));
    }

    #[test]
    fn free_matrix_of_redundant_presentation() {
        // Z^3 / <e0 - e1> is Z^2, and swapping e0, e1 acts trivially on it
        let p = Presentation::new(3, IntMatrix::from_rows(&[vec![1], vec![-1], vec![0]], 1));
        let swap = IntMatrix::from_rows(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]], 3);
        let f = GroupHom::new(p.clone(), p, swap).unwrap();
        let m = f.free_matrix().unwrap();
        assert_eq!(m, IntMatrix::identity(2));
        let t = Presentation::new(1, IntMatrix::from_rows(&[vec![2]], 1));
        assert!(GroupHom::identity(&t).free_matrix().is_none());
    }

    #[test]
    fn swap_invariants_and_coinvariants() {
        let z2 = Presentation::free(2);
        let f = GroupHom::new(z2.clone(), z2, IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]], 2)).unwrap();
        assert_eq!(invariants_of(&f).unwrap(), FgAbGroup::free(1));
        assert_eq!(coinvariants_of(&f).unwrap(), FgAbGroup::free(1));
        let neg = GroupHom::new(Presentation::free(1), Presentation::free(1), IntMatrix::from_rows(&[vec![-1]], 1)).unwrap();
        assert_eq!(invariants_of(&neg).unwrap(), FgAbGroup::zero());
        assert_eq!(coinvariants_of(&neg).unwrap(), FgAbGroup::from_cyclic_orders(&big(&[2])));
    }

    #[test]
    fn orders_of_elements() {
        let g = FgAbGroup { free_rank: 2, torsion: big(&[5]) }.presentation();
        assert_eq!(element_order(&g, &big(&[0, 0, 1])), Some(BigInt::from(5)));
        assert_eq!(element_order(&g, &big(&[0, 0, 5])), Some(BigInt::one()));
        assert_eq!(element_order(&g, &big(&[1, 0, 1])), None);
    }
}
