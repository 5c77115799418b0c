//! Approximant complexes of substitution tilings, their cohomology as a
//! direct limit, the rotation action and the mapping-torus assembly.

mod planar;
mod word;

pub use planar::{collar, CollarOptions, Collaring, CollaredProto};
pub use word::{collar_word, WordCollaring};

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    coinvariants_of, cohomology_basis, invariants_of, stable_limit, AlgebraError, DirectSystem, FgAbGroup,
    GradedGroup, GroupHom, HomologyBasis, IntMatrix, StableLimit,
};
use crate::tiling::TilingError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApError {
    #[error("collared tiles did not stabilise within {levels} substitution levels")]
    NotClosed { levels: usize },
    #[error("inconsistent identification: {0}")]
    InconsistentIdentification(String),
    #[error("rotating a collared tile does not give a collared tile")]
    NoRotationGroup,
    #[error("rotation fixes a 2-cell; the orbit complex is not cellular")]
    NonCellularAction,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Tiling(#[from] TilingError),
}

/// Finite CW complex given by its cellular chain complex.
#[derive(Clone, Debug, Serialize)]
pub struct ApproximantComplex {
    /// Number of cells in each dimension.
    pub cells: Vec<usize>,
    /// `boundaries[k]` is `∂_{k+1}: C_{k+1} -> C_k`.
    pub boundaries: Vec<IntMatrix>,
}

impl ApproximantComplex {
    pub fn new(cells: Vec<usize>, boundaries: Vec<IntMatrix>) -> Result<Self, AlgebraError> {
        for (k, d) in boundaries.iter().enumerate() {
            if d.shape() != (cells[k], cells[k + 1]) {
                return Err(AlgebraError::ShapeMismatch { expected: (cells[k], cells[k + 1]), found: d.shape() });
            }
        }
        for w in boundaries.windows(2) {
            if !w[0].mul(&w[1]).is_zero() {
                return Err(AlgebraError::CompositionNotZero);
            }
        }
        Ok(ApproximantComplex { cells, boundaries })
    }

    pub fn dim(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
    }

    pub fn cohomology(&self) -> Result<Vec<FgAbGroup>, AlgebraError> {
        (0..self.cells.len()).map(|k| Ok(cohomology_basis(&self.boundaries, &self.cells, k)?.group.canonical())).collect()
    }
}

/// Per-degree matrices of a cellular map on chains, `C_k -> C_k`.
#[derive(Clone, Debug, Serialize)]
pub struct CellularSelfMap {
    pub chain: Vec<IntMatrix>,
}

impl CellularSelfMap {
    pub fn identity(cx: &ApproximantComplex) -> Self {
        CellularSelfMap { chain: cx.cells.iter().map(|&n| IntMatrix::identity(n)).collect() }
    }

    /// The induced map on cochains (transposes).
    pub fn cochain(&self, k: usize) -> IntMatrix {
        self.chain[k].transpose()
    }

    /// `∂ F = F ∂` in every degree.
    pub fn check(&self, cx: &ApproximantComplex) -> Result<(), AlgebraError> {
        for (k, d) in cx.boundaries.iter().enumerate() {
            if d.mul(&self.chain[k + 1]) != self.chain[k].mul(d) {
                return Err(AlgebraError::NotChainMap);
            }
        }
        Ok(())
    }

    pub fn compose(&self, first: &CellularSelfMap) -> CellularSelfMap {
        CellularSelfMap { chain: self.chain.iter().zip(&first.chain).map(|(a, b)| a.mul(b)).collect() }
    }
}

/// Cellular action of the generator of a cyclic rotation group: signed
/// permutation matrices on chains.
#[derive(Clone, Debug, Serialize)]
pub struct RotationAction {
    pub order: u32,
    pub chain: CellularSelfMap,
}

impl RotationAction {
    pub fn trivial(cx: &ApproximantComplex) -> Self {
        RotationAction { order: 1, chain: CellularSelfMap::identity(cx) }
    }
}

/// Cohomology of one degree of the approximant and its stable limit.
#[derive(Clone, Debug)]
pub struct LimitDegree {
    pub degree: usize,
    pub approximant: FgAbGroup,
    pub basis: HomologyBasis,
    pub map: GroupHom,
    pub limit: StableLimit,
}

impl LimitDegree {
    pub fn group(&self) -> FgAbGroup {
        self.limit.canonical()
    }

    /// A commuting cellular map, pushed to this degree's limit group.
    pub fn push(&self, g: &CellularSelfMap) -> Result<GroupHom, AlgebraError> {
        let h = self.basis.induced(&g.cochain(self.degree), &self.basis)?;
        self.limit.restrict(&h)
    }
}

/// `Ȟ^k` of the inverse limit: the direct limit of `H^k(cx)` under the
/// cochain map of `sub`, in every degree.
pub fn hull_cohomology(cx: &ApproximantComplex, sub: &CellularSelfMap) -> Result<Vec<LimitDegree>, AlgebraError> {
    sub.check(cx)?;
    let mut out = Vec::new();
    for k in 0..cx.cells.len() {
        let basis = cohomology_basis(&cx.boundaries, &cx.cells, k)?;
        let map = basis.induced(&sub.cochain(k), &basis)?;
        let limit = stable_limit(&DirectSystem::new(map.clone())?)?;
        out.push(LimitDegree { degree: k, approximant: basis.group.canonical(), basis, map, limit });
    }
    Ok(out)
}

/// Rotation action on each limit group, with the order and commutation
/// checks.
pub fn rotation_on_limits(
    limits: &[LimitDegree],
    sub: &CellularSelfMap,
    action: &RotationAction,
) -> Result<Vec<GroupHom>, ApError> {
    action.chain.check_commutes(sub)?;
    let mut out = Vec::new();
    for d in limits {
        let r = d.push(&action.chain)?;
        let mut p = GroupHom::identity(&r.source);
        for _ in 0..action.order {
            p = r.compose(&p);
        }
        let diff = p.matrix.sub(&IntMatrix::identity(p.matrix.rows()));
        if (0..diff.cols()).any(|j| !r.source.is_trivial_element(&diff.column(j))) {
            return Err(ApError::InconsistentIdentification("rotation action does not have the stated order".into()));
        }
        out.push(r);
    }
    Ok(out)
}

impl CellularSelfMap {
    fn check_commutes(&self, other: &CellularSelfMap) -> Result<(), AlgebraError> {
        for (a, b) in self.chain.iter().zip(&other.chain) {
            if a.mul(b) != b.mul(a) {
                return Err(AlgebraError::NotChainMap);
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantsTable {
    pub invariants: Vec<FgAbGroup>,
    pub coinvariants: Vec<FgAbGroup>,
}

pub fn invariants_table(fstar: &[GroupHom]) -> Result<InvariantsTable, AlgebraError> {
    Ok(InvariantsTable {
        invariants: fstar.iter().map(invariants_of).collect::<Result<_, _>>()?,
        coinvariants: fstar.iter().map(coinvariants_of).collect::<Result<_, _>>()?,
    })
}

/// Cohomology of the mapping torus of `f` from the short exact sequences
/// `0 → coinvar^{k−1} → H^k → invar^k → 0`, for k = 0..=len.
pub fn mapping_torus_cohomology(fstar: &[GroupHom]) -> Result<Vec<GradedGroup>, AlgebraError> {
    let t = invariants_table(fstar)?;
    let n = fstar.len();
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let sub = if k == 0 { FgAbGroup::zero() } else { t.coinvariants[k - 1].clone() };
        let quo = if k < n { t.invariants[k].clone() } else { FgAbGroup::zero() };
        // a free quotient always splits
        out.push(if quo.is_free() { GradedGroup::split(k, vec![sub, quo]) } else { GradedGroup::ambiguous(k, vec![sub, quo]) });
    }
    Ok(out)
}

/// Orbit complex of a cellular cyclic action, with the descended self-map.
/// Edges reversed by some group element are subdivided first; a 2-cell
/// carried to itself by a nontrivial element is reported.
pub fn quotient_complex(
    cx: &ApproximantComplex,
    sub: &CellularSelfMap,
    action: &RotationAction,
    edge_paths: Option<&[Vec<(usize, i64)>]>,
) -> Result<(ApproximantComplex, CellularSelfMap), ApError> {
    let (cx, sub, action) = subdivide_reversed_edges(cx, sub, action, edge_paths)?;
    let dims = cx.cells.len();
    let mut orbit_of = Vec::with_capacity(dims);
    let mut reps = Vec::with_capacity(dims);
    for k in 0..dims {
        let (o, s, r) = orbits(&action.chain.chain[k], action.order, k)?;
        orbit_of.push((o, s));
        reps.push(r);
    }
    let mut cells = Vec::with_capacity(dims);
    for r in &reps {
        cells.push(r.len());
    }
    let descend = |m: &IntMatrix, src: usize, dst: usize| -> IntMatrix {
        let (o, s) = &orbit_of[dst];
        let mut q = IntMatrix::zeros(reps[dst].len(), reps[src].len());
        for (j, &rep) in reps[src].iter().enumerate() {
            for x in 0..m.rows() {
                let c = m.get(x, rep);
                if !num_traits::Zero::is_zero(c) {
                    let v: i64 = num_traits::ToPrimitive::to_i64(c).expect("small entry");
                    q.add_at(o[x], j, v * s[x]);
                }
            }
        }
        q
    };
    let boundaries = (0..dims - 1).map(|k| descend(&cx.boundaries[k], k + 1, k)).collect();
    let chain = (0..dims).map(|k| descend(&sub.chain[k], k, k)).collect();
    let qcx = ApproximantComplex::new(cells, boundaries)?;
    let qsub = CellularSelfMap { chain };
    qsub.check(&qcx)?;
    Ok((qcx, qsub))
}

// orbit index and sign relative to the orbit representative for each cell
type Orbits = (Vec<usize>, Vec<i64>, Vec<usize>);

fn orbits(r: &IntMatrix, order: u32, dim: usize) -> Result<Orbits, ApError> {
    let n = r.rows();
    let image = |x: usize| -> (usize, i64) {
        for y in 0..n {
            let c = r.get(y, x);
            if !num_traits::Zero::is_zero(c) {
                return (y, num_traits::ToPrimitive::to_i64(c).unwrap());
            }
        }
        unreachable!("signed permutation")
    };
    let mut orbit = vec![usize::MAX; n];
    let mut sign = vec![0i64; n];
    let mut reps = Vec::new();
    for start in 0..n {
        if orbit[start] != usize::MAX {
            continue;
        }
        let id = reps.len();
        reps.push(start);
        let (mut x, mut s) = (start, 1i64);
        for step in 0..order {
            if step > 0 && x == start {
                if s != 1 {
                    return Err(ApError::InconsistentIdentification("edge reversal survived subdivision".into()));
                }
                if dim >= 2 {
                    return Err(ApError::NonCellularAction);
                }
                break;
            }
            orbit[x] = id;
            sign[x] = s;
            let (y, t) = image(x);
            x = y;
            s *= t;
        }
    }
    Ok((orbit, sign, reps))
}

// Cells (dimension 1) carried to themselves with reversed orientation.
fn reversed_edges(r: &IntMatrix, order: u32) -> Vec<usize> {
    let n = r.rows();
    let next = |x: usize| -> (usize, i64) {
        (0..n).find_map(|y| num_traits::ToPrimitive::to_i64(r.get(y, x)).filter(|&c| c != 0).map(|c| (y, c))).unwrap()
    };
    (0..n)
        .filter(|&e| {
            let (mut x, mut s) = (e, 1);
            for _ in 0..order {
                let (y, t) = next(x);
                x = y;
                s *= t;
                if x == e {
                    return s == -1;
                }
            }
            false
        })
        .collect()
}

fn subdivide_reversed_edges(
    cx: &ApproximantComplex,
    sub: &CellularSelfMap,
    action: &RotationAction,
    edge_paths: Option<&[Vec<(usize, i64)>]>,
) -> Result<(ApproximantComplex, CellularSelfMap, RotationAction), ApError> {
    if cx.cells.len() < 2 {
        return Ok((cx.clone(), sub.clone(), action.clone()));
    }
    let rev = reversed_edges(&action.chain.chain[1], action.order);
    if rev.is_empty() {
        return Ok((cx.clone(), sub.clone(), action.clone()));
    }
    let paths = edge_paths.ok_or(ApError::NonCellularAction)?;
    subdivide::run(cx, sub, action, paths, &rev)
}

mod subdivide {
    use super::*;
    use num_traits::ToPrimitive;

    /// Splits every reversed edge `e` at its midpoint into `e_a` (tail to
    /// midpoint, keeping index `e`) and `e_b` (midpoint to head, new
    /// index), with a new vertex per split edge.
    pub(super) fn run(
        cx: &ApproximantComplex,
        sub: &CellularSelfMap,
        action: &RotationAction,
        paths: &[Vec<(usize, i64)>],
        rev: &[usize],
    ) -> Result<(ApproximantComplex, CellularSelfMap, RotationAction), ApError> {
        let (nv, ne) = (cx.cells[0], cx.cells[1]);
        let mut second = vec![None; ne];
        let mut mid = vec![None; ne];
        for (i, &e) in rev.iter().enumerate() {
            second[e] = Some(ne + i);
            mid[e] = Some(nv + i);
        }
        let (nv2, ne2) = (nv + rev.len(), ne + rev.len());
        let d1 = &cx.boundaries[0];
        let mut b1 = IntMatrix::zeros(nv2, ne2);
        for e in 0..ne {
            match (second[e], mid[e]) {
                (Some(e2), Some(m)) => {
                    // a reversed loop has no recoverable end vertex
                    let (Some(t), Some(h)) = ends(d1, e) else { return Err(ApError::NonCellularAction) };
                    b1.add_at(m, e, 1);
                    b1.add_at(m, e2, -1);
                    b1.add_at(t, e, -1);
                    b1.add_at(h, e2, 1);
                }
                _ => {
                    for v in 0..nv {
                        b1.set(v, e, d1.get(v, e).clone());
                    }
                }
            }
        }
        let expand = |col: &[(usize, i64)]| -> Vec<(usize, i64)> {
            let mut out = Vec::new();
            for &(e, s) in col {
                out.push((e, s));
                if let Some(e2) = second[e] {
                    out.push((e2, s));
                }
            }
            out
        };
        let mut boundaries = vec![b1];
        if cx.cells.len() > 2 {
            let d2 = &cx.boundaries[1];
            let mut b2 = IntMatrix::zeros(ne2, cx.cells[2]);
            for f in 0..cx.cells[2] {
                let col: Vec<(usize, i64)> = (0..ne).filter_map(|e| d2.get(e, f).to_i64().filter(|&c| c != 0).map(|c| (e, c))).collect();
                for (e, c) in expand(&col) {
                    b2.add_at(e, f, c);
                }
            }
            boundaries.push(b2);
            boundaries.extend(cx.boundaries[2..].iter().cloned());
        }
        let mut cells = cx.cells.clone();
        cells[0] = nv2;
        cells[1] = ne2;
        let new_cx = ApproximantComplex::new(cells, boundaries)?;

        // rotation on the halves
        let r1 = &action.chain.chain[1];
        let r0 = &action.chain.chain[0];
        let mut nr1 = IntMatrix::zeros(ne2, ne2);
        let mut nr0 = IntMatrix::zeros(nv2, nv2);
        for v in 0..nv {
            for w in 0..nv {
                nr0.set(w, v, r0.get(w, v).clone());
            }
        }
        for e in 0..ne {
            let (img, s) = (0..ne).find_map(|y| r1.get(y, e).to_i64().filter(|&c| c != 0).map(|c| (y, c))).unwrap();
            match second[e] {
                None => nr1.set(img, e, s.into()),
                Some(e2) => {
                    let img2 = second[img].expect("orbits are subdivided together");
                    if s == 1 {
                        nr1.set(img, e, 1.into());
                        nr1.set(img2, e2, 1.into());
                    } else {
                        nr1.set(img2, e, (-1).into());
                        nr1.set(img, e2, (-1).into());
                    }
                    nr0.set(mid[img].unwrap(), mid[e].unwrap(), 1.into());
                }
            }
        }
        let mut rchain = vec![nr0, nr1];
        rchain.extend(action.chain.chain[2..].iter().cloned());
        let new_action = RotationAction { order: action.order, chain: CellularSelfMap { chain: rchain } };

        // substitution on the halves: first and second half of the image path
        let f0 = &sub.chain[0];
        let mut nf0 = IntMatrix::zeros(nv2, nv2);
        for v in 0..nv {
            for w in 0..nv {
                nf0.set(w, v, f0.get(w, v).clone());
            }
        }
        let mut nf1 = IntMatrix::zeros(ne2, ne2);
        for e in 0..ne {
            let path = expand_path(&paths[e], &second);
            match second[e] {
                None => {
                    for (x, s) in path {
                        nf1.add_at(x, e, s);
                    }
                }
                Some(e2) => {
                    if !path.len().is_multiple_of(2) {
                        return Err(ApError::NonCellularAction);
                    }
                    let h = path.len() / 2;
                    for &(x, s) in &path[..h] {
                        nf1.add_at(x, e, s);
                    }
                    for &(x, s) in &path[h..] {
                        nf1.add_at(x, e2, s);
                    }
                    // the midpoint goes to the vertex between the halves
                    let (x, s) = path[h - 1];
                    let (t, hd) = ends(&new_cx.boundaries[0], x);
                    let v = if s > 0 { hd } else { t };
                    nf0.set(v.ok_or(ApError::NonCellularAction)?, mid[e].unwrap(), 1.into());
                }
            }
        }
        let mut fchain = vec![nf0, nf1];
        fchain.extend(sub.chain[2..].iter().cloned());
        let mut new_sub = CellularSelfMap { chain: fchain };
        if cx.cells.len() > 2 {
            // faces: image boundaries are unchanged as sums, only re-expanded
            new_sub.chain[2] = sub.chain[2].clone();
        }
        new_sub.check(&new_cx)?;
        Ok((new_cx, new_sub, new_action))
    }

    // oriented path with every subdivided edge replaced by its two halves
    fn expand_path(path: &[(usize, i64)], second: &[Option<usize>]) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        for &(e, s) in path {
            match second[e] {
                None => out.push((e, s)),
                Some(e2) if s > 0 => {
                    out.push((e, 1));
                    out.push((e2, 1));
                }
                Some(e2) => {
                    out.push((e2, -1));
                    out.push((e, -1));
                }
            }
        }
        out
    }

    fn ends(d1: &IntMatrix, e: usize) -> (Option<usize>, Option<usize>) {
        let mut t = None;
        let mut h = None;
        for v in 0..d1.rows() {
            match d1.get(v, e).to_i64().unwrap() {
                -1 => t = Some(v),
                1 => h = Some(v),
                _ => {}
            }
        }
        (t, h)
    }
}

/// Cohomology of the orbit complex, as a direct limit.
pub fn quotient_cohomology(
    cx: &ApproximantComplex,
    sub: &CellularSelfMap,
    action: &RotationAction,
    edge_paths: Option<&[Vec<(usize, i64)>]>,
) -> Result<Vec<LimitDegree>, ApError> {
    let (qcx, qsub) = quotient_complex(cx, sub, action, edge_paths)?;
    Ok(hull_cohomology(&qcx, &qsub)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>], cols: usize) -> IntMatrix {
        IntMatrix::from_rows(rows, cols)
    }

    #[test]
    fn identity_on_a_point_gives_circle() {
        let p = crate::algebra::Presentation::free(1);
        let id = GroupHom::identity(&p);
        let mt = mapping_torus_cohomology(&[id]).unwrap();
        let groups: Vec<_> = mt.iter().map(|g| g.group.clone().unwrap()).collect();
        assert_eq!(groups, vec![FgAbGroup::free(1), FgAbGroup::free(1)]);
    }

    #[test]
    fn negation_gives_two_torsion() {
        let p = crate::algebra::Presentation::free(1);
        let neg = GroupHom::new(p.clone(), p, m(&[vec![-1]], 1)).unwrap();
        let mt = mapping_torus_cohomology(&[neg]).unwrap();
        assert_eq!(mt[0].group, Some(FgAbGroup::zero()));
        assert_eq!(mt[1].group.as_ref().unwrap().to_string(), "Z/2");
    }

    #[test]
    fn circle_with_reflection_like_swap() {
        // circle as two vertices and two edges; rotation by a half turn
        // swaps them, preserving orientation
        let d1 = m(&[vec![-1, 1], vec![1, -1]], 2);
        let cx = ApproximantComplex::new(vec![2, 2], vec![d1]).unwrap();
        let rot = CellularSelfMap { chain: vec![m(&[vec![0, 1], vec![1, 0]], 2), m(&[vec![0, 1], vec![1, 0]], 2)] };
        let action = RotationAction { order: 2, chain: rot };
        let id = CellularSelfMap::identity(&cx);
        let q = quotient_cohomology(&cx, &id, &action, None).unwrap();
        let groups: Vec<_> = q.iter().map(|d| d.group()).collect();
        assert_eq!(groups, vec![FgAbGroup::free(1), FgAbGroup::free(1)]);
    }

    #[test]
    fn reversed_edge_is_subdivided() {
        // interval [v0, v1] flipped end to end; the quotient is an interval
        let d1 = m(&[vec![-1], vec![1]], 1);
        let cx = ApproximantComplex::new(vec![2, 1], vec![d1]).unwrap();
        let rot = CellularSelfMap { chain: vec![m(&[vec![0, 1], vec![1, 0]], 2), m(&[vec![-1]], 1)] };
        let action = RotationAction { order: 2, chain: rot };
        let id = CellularSelfMap::identity(&cx);
        assert_eq!(quotient_complex(&cx, &id, &action, None).unwrap_err(), ApError::NonCellularAction);
        let paths = vec![vec![(0usize, 1i64)]];
        let (q, qf) = quotient_complex(&cx, &id, &action, Some(&paths)).unwrap();
        assert_eq!(q.cells, vec![2, 1]);
        assert_eq!(q.cohomology().unwrap(), vec![FgAbGroup::free(1), FgAbGroup::zero()]);
        assert_eq!(qf.chain[1], IntMatrix::identity(1));
    }

    #[test]
    fn swapped_edges_need_no_subdivision() {
        // v0 -e0- v1 -e1- v2 with the flip exchanging e0 and e1
        let d1 = m(&[vec![-1, 0], vec![1, -1], vec![0, 1]], 2);
        let cx = ApproximantComplex::new(vec![3, 2], vec![d1]).unwrap();
        let rot = CellularSelfMap {
            chain: vec![m(&[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]], 3), m(&[vec![0, -1], vec![-1, 0]], 2)],
        };
        let action = RotationAction { order: 2, chain: rot };
        let (q, _) = quotient_complex(&cx, &CellularSelfMap::identity(&cx), &action, None).unwrap();
        assert_eq!(q.cells, vec![2, 1]);
        assert_eq!(q.cohomology().unwrap(), vec![FgAbGroup::free(1), FgAbGroup::zero()]);
    }

    #[test]
    fn torus_limit_under_identity() {
        let cx = ApproximantComplex::new(vec![1, 2, 1], vec![IntMatrix::zeros(1, 2), IntMatrix::zeros(2, 1)]).unwrap();
        let l = hull_cohomology(&cx, &CellularSelfMap::identity(&cx)).unwrap();
        let g: Vec<_> = l.iter().map(|d| d.group()).collect();
        assert_eq!(g, vec![FgAbGroup::free(1), FgAbGroup::free(2), FgAbGroup::free(1)]);
        assert_eq!(cx.euler_characteristic(), 0);
    }
}
