use crate::cyclo::{PlanePoint, RigidMotion};

use super::patch::PlacedTile;

/// Marked cell a patch is centred on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Center {
    None,
    Vertex(PlanePoint),
    /// Undirected edge.
    Edge(PlanePoint, PlanePoint),
    /// Edge oriented from the first point to the second.
    DirectedEdge(PlanePoint, PlanePoint),
    /// Index into the patch's tile list.
    Tile(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyMode {
    /// Equal keys iff the patches differ by a translation.
    Translation,
    /// Equal keys iff they differ by a rotation in the symmetry group
    /// followed by a translation.
    Rigid { ring_order: u32, rotation_order: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(pub Vec<i64>);

#[derive(Clone, Debug)]
pub struct Patch {
    pub tiles: Vec<PlacedTile>,
    pub center: Center,
}

impl Patch {
    pub fn new(tiles: Vec<PlacedTile>, center: Center) -> Self {
        Patch { tiles, center }
    }

    pub fn transformed(&self, m: &RigidMotion) -> Patch {
        let tiles = self
            .tiles
            .iter()
            .map(|t| PlacedTile {
                kind: t.kind,
                motion: m.compose(&t.motion),
                vertices: t.vertices.iter().map(|v| m.apply(v)).collect(),
            })
            .collect();
        let center = match &self.center {
            Center::None => Center::None,
            Center::Vertex(p) => Center::Vertex(m.apply(p)),
            Center::Edge(a, b) => Center::Edge(m.apply(a), m.apply(b)),
            Center::DirectedEdge(a, b) => Center::DirectedEdge(m.apply(a), m.apply(b)),
            Center::Tile(i) => Center::Tile(*i),
        };
        Patch { tiles, center }
    }

    // (tag, denominator, numerator) of the marked point; the tag keeps
    // differently centred patches apart
    fn anchor(&self, rot: i64) -> (i64, i64, PlanePoint) {
        match &self.center {
            Center::None => {
                let min = self.tiles.iter().flat_map(|t| t.vertices.iter()).map(|v| v.mul_zeta(rot)).min().expect("empty patch");
                (0, 1, min)
            }
            Center::Vertex(p) => (1, 1, p.mul_zeta(rot)),
            Center::Edge(a, b) => (2, 2, &a.mul_zeta(rot) + &b.mul_zeta(rot)),
            Center::DirectedEdge(a, b) => (4, 2, &a.mul_zeta(rot) + &b.mul_zeta(rot)),
            Center::Tile(i) => {
                let t = &self.tiles[*i];
                let mut s = t.vertices[0].mul_zeta(rot);
                for v in &t.vertices[1..] {
                    s = &s + &v.mul_zeta(rot);
                }
                (3, t.vertices.len() as i64, s)
            }
        }
    }

    /// Key of the patch rotated by `ζ^rot` and translated to its anchor.
    pub fn key_at(&self, rot: i64) -> CanonicalKey {
        let (tag, den, num) = self.anchor(rot);
        let mut entries: Vec<Vec<i64>> = self
            .tiles
            .iter()
            .map(|t| {
                let pts: Vec<Vec<i64>> =
                    t.vertices.iter().map(|v| (&v.mul_zeta(rot).scale(den) - &num).coeffs().to_vec()).collect();
                let start = (0..pts.len()).min_by(|&i, &j| pts[i].cmp(&pts[j])).unwrap();
                let mut e = vec![t.kind as i64, pts.len() as i64];
                for k in 0..pts.len() {
                    e.extend_from_slice(&pts[(start + k) % pts.len()]);
                }
                e
            })
            .collect();
        let marked = match &self.center {
            Center::Tile(i) => Some(entries[*i].clone()),
            Center::DirectedEdge(a, b) => {
                let d = &b.mul_zeta(rot) - &a.mul_zeta(rot);
                Some(d.coeffs().to_vec())
            }
            _ => None,
        };
        entries.sort();
        let mut out = vec![tag, den, entries.len() as i64];
        if let Some(m) = marked {
            out.extend(m);
        }
        for e in entries {
            out.extend(e);
        }
        CanonicalKey(out)
    }

    /// For a tile-centred patch: index of the marked tile's vertex that
    /// the key lists first after rotating by `ζ^rot`. Translation
    /// invariant, so it fixes a slot numbering for the tile's class.
    pub fn marked_start(&self, rot: i64) -> Option<usize> {
        let Center::Tile(i) = self.center else { return None };
        let (_, den, num) = self.anchor(rot);
        let pts: Vec<Vec<i64>> =
            self.tiles[i].vertices.iter().map(|v| (&v.mul_zeta(rot).scale(den) - &num).coeffs().to_vec()).collect();
        (0..pts.len()).min_by(|&a, &b| pts[a].cmp(&pts[b]))
    }

    pub fn canonical_key(&self, mode: KeyMode) -> CanonicalKey {
        match mode {
            KeyMode::Translation => self.key_at(0),
            KeyMode::Rigid { ring_order, rotation_order } => {
                let step = (ring_order / rotation_order) as i64;
                (0..rotation_order as i64).map(|k| self.key_at(k * step)).min().unwrap()
            }
        }
    }

    /// Group rotations `r` for which the patch rotated by `r` equals itself
    /// up to translation (fixing the marked cell).
    pub fn symmetry_rotations(&self, ring_order: u32, rotation_order: u32) -> Vec<u32> {
        let step = ring_order / rotation_order;
        let k0 = self.key_at(0);
        (0..rotation_order).map(|k| k * step).filter(|&r| self.key_at(r as i64) == k0).collect()
    }
}

/// Motions `m` in the symmetry group with `m · p1 = p2`, marked cells
/// included.
pub fn matching_motions(p1: &Patch, p2: &Patch, ring_order: u32, rotation_order: u32) -> Vec<RigidMotion> {
    let step = ring_order / rotation_order;
    let target = p2.key_at(0);
    let mut out = Vec::new();
    for k in 0..rotation_order {
        let r = (k * step) as i64;
        if p1.key_at(r) != target {
            continue;
        }
        let (_, den, n1) = p1.anchor(r);
        let (_, _, n2) = p2.anchor(0);
        let t = (&n2 - &n1).div_exact(den).expect("matching keys imply integral translation");
        out.push(RigidMotion::new(r, t));
    }
    out
}
