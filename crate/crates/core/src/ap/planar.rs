use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use serde::Serialize;

use super::{ApError, ApproximantComplex, CellularSelfMap, RotationAction};
use crate::algebra::IntMatrix;
use crate::cyclo::PlanePoint;
use crate::tiling::{place_piece, substitute, CanonicalKey, Center, Mesh, Patch, Placement, TilingSystem};

/// A piece class together with the translation class of its corona (all
/// pieces sharing a vertex with it).
#[derive(Clone, Debug, Serialize)]
pub struct CollaredProto {
    pub id: usize,
    pub kind: usize,
    pub label: String,
    /// Occurrences in the final patch.
    pub count: usize,
    #[serde(skip)]
    pub key: CanonicalKey,
    /// Vertices relative to the first, in slot order.
    #[serde(skip)]
    pub shape: Vec<PlanePoint>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CollarOptions {
    pub max_level: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Collaring {
    pub level: usize,
    pub classes: Vec<CollaredProto>,
    pub complex: ApproximantComplex,
    pub self_map: CellularSelfMap,
    pub rotation: RotationAction,
    /// Ordered signed edge path of the image of each edge cell.
    #[serde(skip)]
    pub edge_paths: Vec<Vec<(usize, i64)>>,
}

// a keyable piece occurrence: class id and the vertex index listed first
#[derive(Clone, Copy, Debug)]
struct Occ {
    class: usize,
    start: usize,
}

struct Level {
    pieces: Vec<Placement>,
    mesh: Mesh,
    occ: Vec<Option<Occ>>,
    classes: BTreeSet<usize>,
    edge_pairs: BTreeSet<(usize, usize, usize, usize)>,
    vertex_pairs: BTreeSet<(usize, usize, usize, usize)>,
}

#[derive(Default)]
struct Interner {
    ids: HashMap<CanonicalKey, usize>,
    kinds: Vec<usize>,
    keys: Vec<CanonicalKey>,
    shapes: Vec<Vec<PlanePoint>>,
    // one occurrence patch per class, for the rotation action
    samples: Vec<Patch>,
}

fn collared_patch(mesh: &Mesh, t: usize) -> Patch {
    let mut tiles = vec![mesh.tiles[t].clone()];
    for u in mesh.tile_neighbours(t) {
        tiles.push(mesh.tiles[u].clone());
    }
    Patch::new(tiles, Center::Tile(0))
}

fn slot(o: Occ, idx: usize, n: usize) -> usize {
    (idx + n - o.start) % n
}

fn build_level(sys: &TilingSystem, pieces: Vec<Placement>, int: &mut Interner) -> Result<Level, ApError> {
    let mesh = Mesh::new(pieces.iter().map(|p| place_piece(sys, p)).collect())?;
    let complete: Vec<bool> = (0..mesh.points.len()).map(|v| mesh.vertex_complete(v)).collect();
    let mut occ = vec![None; mesh.tiles.len()];
    let mut classes = BTreeSet::new();
    for t in 0..mesh.tiles.len() {
        if !mesh.tile_vertices[t].iter().all(|&v| complete[v]) {
            continue;
        }
        let patch = collared_patch(&mesh, t);
        let key = patch.key_at(0);
        let start = patch.marked_start(0).unwrap();
        let class = match int.ids.get(&key) {
            Some(&c) => c,
            None => {
                let c = int.keys.len();
                let vs = &mesh.tiles[t].vertices;
                let n = vs.len();
                let shape = (0..n).map(|k| &vs[(start + k) % n] - &vs[start]).collect();
                int.ids.insert(key.clone(), c);
                int.keys.push(key);
                int.kinds.push(mesh.tiles[t].kind);
                int.shapes.push(shape);
                int.samples.push(patch);
                c
            }
        };
        occ[t] = Some(Occ { class, start });
        classes.insert(class);
    }
    let mut edge_pairs = BTreeSet::new();
    for e in &mesh.edges {
        if let [(t1, s1), (t2, s2)] = e.sides[..] {
            if let (Some(o1), Some(o2)) = (occ[t1], occ[t2]) {
                let a = (o1.class, slot(o1, s1, mesh.tiles[t1].vertices.len()));
                let b = (o2.class, slot(o2, s2, mesh.tiles[t2].vertices.len()));
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                edge_pairs.insert((a.0, a.1, b.0, b.1));
            }
        }
    }
    let mut vertex_pairs = BTreeSet::new();
    for around in &mesh.vertex_tiles {
        let mut items: Vec<(usize, usize)> = around
            .iter()
            .filter_map(|&(t, s)| occ[t].map(|o| (o.class, slot(o, s, mesh.tiles[t].vertices.len()))))
            .collect();
        items.sort_unstable();
        for (a, b) in items.iter().tuple_combinations() {
            vertex_pairs.insert((a.0, a.1, b.0, b.1));
        }
    }
    Ok(Level { pieces, mesh, occ, classes, edge_pairs, vertex_pairs })
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn lex_positive(p: &PlanePoint) -> bool {
    p.coeffs().iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

/// Collared pieces of the tiling with their approximant complex,
/// substitution self-map and rotation action. Substitutes the seed until
/// the collared classes and all adjacencies between them agree at two
/// consecutive levels, and every class occurs deep enough that its
/// substituted collar is visible.
pub fn collar(sys: &TilingSystem, opts: CollarOptions) -> Result<Collaring, ApError> {
    let max_level = opts.max_level.unwrap_or(sys.max_level);
    let mut int = Interner::default();
    let mut cur = build_level(sys, sys.seed.clone(), &mut int)?;
    for level in 1..=max_level {
        let (children, parent) = substitute(sys, &cur.pieces);
        let next = build_level(sys, children, &mut int)?;
        let stable = !cur.classes.is_empty()
            && cur.classes == next.classes
            && cur.edge_pairs == next.edge_pairs
            && cur.vertex_pairs == next.vertex_pairs;
        if stable {
            if let Some(found) = parent_witnesses(&cur, &next, &parent) {
                return assemble(sys, &int, &cur, &next, &parent, &found, level);
            }
        }
        cur = next;
    }
    Err(ApError::NotClosed { levels: max_level })
}

// For each class, a parent occurrence whose children are all keyable.
fn parent_witnesses(cur: &Level, next: &Level, parent: &[usize]) -> Option<HashMap<usize, usize>> {
    let mut kids_ok = vec![true; cur.pieces.len()];
    for (c, &p) in parent.iter().enumerate() {
        if next.occ[c].is_none() {
            kids_ok[p] = false;
        }
    }
    let mut found = HashMap::new();
    for (t, o) in cur.occ.iter().enumerate() {
        if let Some(o) = o {
            if kids_ok[t] {
                found.entry(o.class).or_insert(t);
            }
        }
    }
    (found.len() == cur.classes.len()).then_some(found)
}

fn assemble(
    sys: &TilingSystem,
    int: &Interner,
    cur: &Level,
    next: &Level,
    parent: &[usize],
    witness: &HashMap<usize, usize>,
    level: usize,
) -> Result<Collaring, ApError> {
    // dense renumbering sorted by key
    let mut ids: Vec<usize> = next.classes.iter().copied().collect();
    ids.sort_by(|a, b| int.keys[*a].cmp(&int.keys[*b]));
    let dense: HashMap<usize, usize> = ids.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let nf = ids.len();
    let sizes: Vec<usize> = ids.iter().map(|&c| int.shapes[c].len()).collect();
    let mut offset = vec![0; nf + 1];
    for i in 0..nf {
        offset[i + 1] = offset[i] + sizes[i];
    }
    let item = |c: usize, k: usize| offset[dense[&c]] + k;
    let total = offset[nf];

    let mut ue = UnionFind::new(total);
    let mut uv = UnionFind::new(total);
    for &(c1, s1, c2, s2) in &next.edge_pairs {
        ue.union(item(c1, s1), item(c2, s2));
    }
    for &(c1, s1, c2, s2) in &next.vertex_pairs {
        uv.union(item(c1, s1), item(c2, s2));
    }
    // every slot is its own edge and vertex item; number the classes
    let mut vid = HashMap::new();
    let mut vclass = vec![0; total];
    for (i, vc) in vclass.iter_mut().enumerate() {
        let r = uv.find(i);
        let n = vid.len();
        *vc = *vid.entry(r).or_insert(n);
    }
    let mut eid = HashMap::new();
    let mut eclass = vec![0; total];
    for (i, ec) in eclass.iter_mut().enumerate() {
        let r = ue.find(i);
        let n = eid.len();
        *ec = *eid.entry(r).or_insert(n);
    }
    let (nv, ne) = (vid.len(), eid.len());

    let dir = |ci: usize, k: usize| -> PlanePoint {
        let s = &int.shapes[ids[ci]];
        &s[(k + 1) % s.len()] - &s[k]
    };
    // canonical direction and ends per edge class
    let mut edir: Vec<Option<PlanePoint>> = vec![None; ne];
    let mut eends: Vec<Option<(usize, usize)>> = vec![None; ne];
    let mut esign = vec![0i64; total];
    for ci in 0..nf {
        let n = sizes[ci];
        for k in 0..n {
            let i = offset[ci] + k;
            let d = dir(ci, k);
            let (s, canon) = if lex_positive(&d) { (1, d) } else { (-1, -&d) };
            let e = eclass[i];
            match &edir[e] {
                None => edir[e] = Some(canon),
                Some(c) if *c == canon => {}
                Some(_) => return Err(ApError::InconsistentIdentification(format!("edge cell {e} joins edges of different shape"))),
            }
            let (a, b) = (vclass[offset[ci] + k], vclass[offset[ci] + (k + 1) % n]);
            let ends = if s > 0 { (a, b) } else { (b, a) };
            match eends[e] {
                None => eends[e] = Some(ends),
                Some(x) if x == ends => {}
                Some(_) => return Err(ApError::InconsistentIdentification(format!("edge cell {e} has two sets of ends"))),
            }
            esign[i] = s;
        }
    }
    let mut d1 = IntMatrix::zeros(nv, ne);
    for (e, ends) in eends.iter().enumerate() {
        let (t, h) = ends.unwrap();
        d1.add_at(t, e, -1);
        d1.add_at(h, e, 1);
    }
    let mut d2 = IntMatrix::zeros(ne, nf);
    for ci in 0..nf {
        for k in 0..sizes[ci] {
            let i = offset[ci] + k;
            d2.add_at(eclass[i], ci, esign[i]);
        }
    }
    let complex = ApproximantComplex::new(vec![nv, ne, nf], vec![d1, d2])?;

    // substitution self-map from the witnesses
    let mut kids: Vec<Vec<usize>> = vec![Vec::new(); cur.pieces.len()];
    for (c, &p) in parent.iter().enumerate() {
        kids[p].push(c);
    }
    let lambda = &sys.inflation;
    let mut f2 = IntMatrix::zeros(nf, nf);
    let mut f1: Vec<Option<Vec<(usize, i64)>>> = vec![None; ne];
    let mut f0: Vec<Option<usize>> = vec![None; nv];
    for ci in 0..nf {
        let t = witness[&ids[ci]];
        let o = cur.occ[t].unwrap();
        let n = sizes[ci];
        for &c in &kids[t] {
            f2.add_at(dense[&next.occ[c].unwrap().class], ci, 1);
        }
        let pv = &cur.mesh.tiles[t].vertices;
        for k in 0..n {
            let i = offset[ci] + k;
            let a = lambda * &pv[(o.start + k) % n];
            let b = lambda * &pv[(o.start + k + 1) % n];
            // image vertex
            let v_img = kids[t]
                .iter()
                .find_map(|&c| {
                    let cv = &next.mesh.tiles[c].vertices;
                    cv.iter().position(|x| *x == a).map(|j| {
                        let co = next.occ[c].unwrap();
                        vclass[item(co.class, slot(co, j, cv.len()))]
                    })
                })
                .ok_or_else(|| ApError::InconsistentIdentification("vertex image is not a child vertex".into()))?;
            set_once(&mut f0[vclass[i]], v_img, "vertex")?;
            // image edge path, oriented along the canonical direction
            let mut path = edge_image(next, &kids[t], &a, &b, |c, j| {
                let co = next.occ[c].unwrap();
                let it = item(co.class, slot(co, j, next.mesh.tiles[c].vertices.len()));
                (eclass[it], esign[it])
            });
            if esign[i] < 0 {
                path.reverse();
                for x in path.iter_mut() {
                    x.1 = -x.1;
                }
            }
            set_once(&mut f1[eclass[i]], path, "edge")?;
        }
    }
    let mut m0 = IntMatrix::zeros(nv, nv);
    for (v, img) in f0.iter().enumerate() {
        m0.add_at(img.unwrap(), v, 1);
    }
    let edge_paths: Vec<Vec<(usize, i64)>> = f1.into_iter().map(|p| p.unwrap()).collect();
    let mut m1 = IntMatrix::zeros(ne, ne);
    for (e, p) in edge_paths.iter().enumerate() {
        for &(x, s) in p {
            m1.add_at(x, e, s);
        }
    }
    let self_map = CellularSelfMap { chain: vec![m0, m1, f2] };
    self_map.check(&complex)?;

    let rotation = rotation_action(sys, int, &ids, &dense, &offset, &vclass, &eclass, &esign, (nv, ne, nf))?;
    rotation.chain.check(&complex)?;

    let mut counts = vec![0; nf];
    for o in next.occ.iter().flatten() {
        counts[dense[&o.class]] += 1;
    }
    let classes = ids
        .iter()
        .enumerate()
        .map(|(i, &c)| CollaredProto {
            id: i,
            kind: int.kinds[c],
            label: sys.pieces[int.kinds[c]].id.clone(),
            count: counts[i],
            key: int.keys[c].clone(),
            shape: int.shapes[c].clone(),
        })
        .collect();
    Ok(Collaring { level, classes, complex, self_map, rotation, edge_paths })
}

fn set_once<T: PartialEq>(slot: &mut Option<T>, v: T, what: &str) -> Result<(), ApError> {
    match slot {
        None => {
            *slot = Some(v);
            Ok(())
        }
        Some(x) if *x == v => Ok(()),
        Some(_) => Err(ApError::InconsistentIdentification(format!("substitution image of a {what} cell depends on the representative"))),
    }
}

// Child edges covering the segment a -> b, ordered from a, each with the
// sign of its edge cell relative to the direction of travel.
fn edge_image(
    next: &Level,
    kids: &[usize],
    a: &PlanePoint,
    b: &PlanePoint,
    cell: impl Fn(usize, usize) -> (usize, i64),
) -> Vec<(usize, i64)> {
    let ab = b - a;
    let (abx, aby) = ab.real_embed();
    let len2 = abx * abx + aby * aby;
    let param = |p: &PlanePoint| -> Option<f64> {
        let ap = p - a;
        if !(&ap * &ab.conj()).is_real() {
            return None;
        }
        let (x, y) = ap.real_embed();
        let t = (x * abx + y * aby) / len2;
        (-1e-9..=1.0 + 1e-9).contains(&t).then_some(t)
    };
    let mut segs: Vec<(f64, usize, i64)> = Vec::new();
    for &c in kids {
        let vs = &next.mesh.tiles[c].vertices;
        let n = vs.len();
        for j in 0..n {
            if let (Some(tx), Some(ty)) = (param(&vs[j]), param(&vs[(j + 1) % n])) {
                let (e, s) = cell(c, j);
                let forward = if ty > tx { 1 } else { -1 };
                segs.push((tx.min(ty), e, s * forward));
            }
        }
    }
    segs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    segs.into_iter().map(|(_, e, s)| (e, s)).collect()
}

#[allow(clippy::too_many_arguments)]
fn rotation_action(
    sys: &TilingSystem,
    int: &Interner,
    ids: &[usize],
    dense: &HashMap<usize, usize>,
    offset: &[usize],
    vclass: &[usize],
    eclass: &[usize],
    esign: &[i64],
    (nv, ne, nf): (usize, usize, usize),
) -> Result<RotationAction, ApError> {
    let step = sys.rotation_step() as i64;
    let mut r0: Vec<Option<usize>> = vec![None; nv];
    let mut r1: Vec<Option<(usize, i64)>> = vec![None; ne];
    let mut r2 = IntMatrix::zeros(nf, nf);
    for (ci, &c) in ids.iter().enumerate() {
        let patch = &int.samples[c];
        let start = patch.marked_start(0).unwrap();
        let key = patch.key_at(step);
        let rc = *int.ids.get(&key).and_then(|id| dense.get(id)).ok_or(ApError::NoRotationGroup)?;
        let rstart = patch.marked_start(step).unwrap();
        r2.add_at(rc, ci, 1);
        let n = offset[ci + 1] - offset[ci];
        for k in 0..n {
            let j = (start + k) % n;
            let k2 = (j + n - rstart) % n;
            let (i, i2) = (offset[ci] + k, offset[rc] + k2);
            set_once(&mut r0[vclass[i]], vclass[i2], "vertex")?;
            // rotation keeps the direction of travel along the tile boundary
            set_once(&mut r1[eclass[i]], (eclass[i2], esign[i] * esign[i2]), "edge")?;
        }
    }
    let mut m0 = IntMatrix::zeros(nv, nv);
    for (v, x) in r0.iter().enumerate() {
        m0.add_at(x.unwrap(), v, 1);
    }
    let mut m1 = IntMatrix::zeros(ne, ne);
    for (e, x) in r1.iter().enumerate() {
        let (y, s) = x.unwrap();
        m1.add_at(y, e, s);
    }
    Ok(RotationAction { order: sys.rotation_order, chain: CellularSelfMap { chain: vec![m0, m1, r2] } })
}
