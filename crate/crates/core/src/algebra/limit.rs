use super::group::{restrict, subgroup, FgAbGroup, GroupHom, Presentation};
use super::matrix::IntMatrix;
use super::AlgebraError;

pub const DEFAULT_MAX_STAGES: usize = 20;

/// `G -f-> G -f-> G -> ...`
#[derive(Clone, Debug)]
pub struct DirectSystem {
    pub map: GroupHom,
    pub max_stages: usize,
}

impl DirectSystem {
    pub fn new(map: GroupHom) -> Result<Self, AlgebraError> {
        if map.source != map.target {
            return Err(AlgebraError::NotEndomorphism);
        }
        Ok(DirectSystem { map, max_stages: DEFAULT_MAX_STAGES })
    }
}

/// The eventual image `f^k(G)` on which `f` restricts to an automorphism;
/// the direct limit is isomorphic to it.
#[derive(Clone, Debug)]
pub struct StableLimit {
    pub stage: usize,
    pub group: Presentation,
    /// Columns: the limit's generators as elements of `G`.
    pub embedding: IntMatrix,
    pub automorphism: GroupHom,
}

impl StableLimit {
    pub fn canonical(&self) -> FgAbGroup {
        self.group.canonical()
    }

    /// Restrict another endomorphism of `G` commuting with the system map.
    pub fn restrict(&self, g: &GroupHom) -> Result<GroupHom, AlgebraError> {
        let m = restrict(&g.matrix, &self.group, &self.embedding)?;
        GroupHom::new(self.group.clone(), self.group.clone(), m)
    }
}

pub fn direct_limit(system: &DirectSystem) -> Result<FgAbGroup, AlgebraError> {
    Ok(stable_limit(system)?.canonical())
}

/// Walks the image tower `I_k = f^k(G)` until `f|I_k` is an automorphism.
pub fn stable_limit(system: &DirectSystem) -> Result<StableLimit, AlgebraError> {
    let g = &system.map.source;
    let f = &system.map.matrix;
    let mut gens = IntMatrix::identity(g.generators);
    for stage in 0..=system.max_stages {
        let (sub, basis) = subgroup(g, &gens);
        let m = restrict(f, &sub, &basis)?;
        let h = GroupHom::new(sub.clone(), sub.clone(), m)?;
        if h.is_automorphism() {
            return Ok(StableLimit { stage, group: sub, embedding: basis, automorphism: h });
        }
        gens = f.mul(&basis);
    }
    Err(AlgebraError::NotStabilizing { stages: system.max_stages })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn endo(rows: &[Vec<i64>]) -> GroupHom {
        let n = rows.len();
        let p = Presentation::free(n);
        GroupHom::new(p.clone(), p, IntMatrix::from_rows(rows, n)).unwrap()
    }

    #[test]
    fn nilpotent_part_dies() {
        // e1 -> e1, e2 -> 0
        let s = DirectSystem::new(endo(&[vec![1, 0], vec![0, 0]])).unwrap();
        assert_eq!(direct_limit(&s).unwrap(), FgAbGroup::free(1));
    }

    #[test]
    fn doubling_never_stabilises() {
        let s = DirectSystem::new(endo(&[vec![2]])).unwrap();
        assert!(matches!(direct_limit(&s), Err(AlgebraError::NotStabilizing { .. })));
    }

    #[test]
    fn fibonacci_matrix_is_already_invertible() {
        let s = DirectSystem::new(endo(&[vec![1, 1], vec![1, 0]])).unwrap();
        let lim = stable_limit(&s).unwrap();
        assert_eq!(lim.stage, 0);
        assert_eq!(lim.canonical(), FgAbGroup::free(2));
    }

    #[test]
    fn torsion_killed_after_two_steps() {
        // Z/4 with x -> 2x: image tower Z/4, Z/2, 0
        let z4 = FgAbGroup::from_cyclic_orders(&[BigInt::from(4)]).presentation();
        let f = GroupHom::new(z4.clone(), z4, IntMatrix::from_rows(&[vec![2]], 1)).unwrap();
        let lim = stable_limit(&DirectSystem::new(f).unwrap()).unwrap();
        assert_eq!(lim.stage, 2);
        assert!(lim.canonical().is_zero());
    }
}
