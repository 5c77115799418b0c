use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::algebra::IntMatrix;
use crate::cyclo::PlanePoint;

use super::key::{CanonicalKey, Center, KeyMode, Patch};
use super::patch::{assemble_tiles, place_tile, substitute, Mesh, PlacedTile};
use super::system::{Placement, TilingSystem};
use super::TilingError;

/// Stars are read only where every tile of the star is at least this far
/// (through shared vertices) from a tile with a free edge.
pub const TRUST_DEPTH: usize = 2;

#[derive(Clone, Debug, Serialize)]
pub struct TileClass {
    pub id: usize,
    pub kind: usize,
    pub label: String,
    pub symmetry_order: usize,
    pub count: usize,
    #[serde(skip)]
    pub key: CanonicalKey,
    #[serde(skip)]
    pub representative: PlacedTile,
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeSide {
    pub tile_class: usize,
    pub kind: usize,
    pub slot: usize,
    /// Orientation of the tile relative to its prototile's reference, in
    /// units of 2π/ring_order.
    pub tau: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeClass {
    pub id: usize,
    pub left: EdgeSide,
    pub right: EdgeSide,
    pub symmetry_order: usize,
    pub count: usize,
    #[serde(skip)]
    pub key: CanonicalKey,
    #[serde(skip)]
    pub tail: PlanePoint,
    #[serde(skip)]
    pub head: PlanePoint,
    /// Left tile first.
    #[serde(skip)]
    pub representative: Vec<PlacedTile>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Incidence {
    pub edge_class: usize,
    pub outgoing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexClass {
    pub id: usize,
    pub symmetry_order: usize,
    pub count: usize,
    pub incidences: Vec<Incidence>,
    /// Prototile labels around the vertex, counterclockwise.
    pub signature: Vec<String>,
    #[serde(skip)]
    pub key: CanonicalKey,
    #[serde(skip)]
    pub point: PlanePoint,
    #[serde(skip)]
    pub representative: Vec<PlacedTile>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StarAtlas {
    pub system: String,
    pub ring_order: u32,
    pub rotation_order: u32,
    pub level: usize,
    pub tiles: Vec<TileClass>,
    pub edges: Vec<EdgeClass>,
    pub vertices: Vec<VertexClass>,
}

impl StarAtlas {
    /// `∂₁` on class-level chains, vertices × edges: head minus tail.
    pub fn boundary_1(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.vertices.len(), self.edges.len());
        for v in &self.vertices {
            for inc in &v.incidences {
                d.add_at(v.id, inc.edge_class, if inc.outgoing { -1 } else { 1 });
            }
        }
        d
    }

    /// `∂₂`, edges × tiles, entry `[right = t] − [left = t]` (tiles
    /// oriented clockwise against the edge directions).
    pub fn boundary_2(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.edges.len(), self.tiles.len());
        for e in &self.edges {
            d.add_at(e.id, e.right.tile_class, 1);
            d.add_at(e.id, e.left.tile_class, -1);
        }
        d
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        (self.vertices.len(), self.edges.len(), self.tiles.len())
    }
}

/// Class membership of the concrete cells of a patch.
#[derive(Clone, Debug, Default)]
pub struct Classification {
    pub tile_class: Vec<Option<usize>>,
    /// Edge class and oriented (tail, head) point ids.
    pub edge_class: Vec<Option<(usize, usize, usize)>>,
    pub vertex_class: Vec<Option<usize>>,
}

/// A grown patch together with its stabilised atlas.
#[derive(Clone, Debug)]
pub struct Closure {
    pub atlas: StarAtlas,
    pub mesh: Mesh,
    pub pieces: Vec<Placement>,
    pub level: usize,
    pub classification: Classification,
}

pub fn tau_of(sys: &TilingSystem, t: &PlacedTile) -> u32 {
    let n = sys.ring_order as i64;
    (t.motion.rot as i64 - sys.tiles[t.kind].reference_rot as i64).rem_euclid(n) as u32
}

fn rigid(sys: &TilingSystem) -> KeyMode {
    KeyMode::Rigid { ring_order: sys.ring_order, rotation_order: sys.rotation_order }
}

/// Orientation of a shared edge: the side whose (prototile, slot) pair is
/// smaller is placed on the left. Returns (left side, right side).
fn orient(sys: &TilingSystem, mesh: &Mesh, e: usize) -> ((usize, usize), (usize, usize)) {
    let s = &mesh.edges[e].sides;
    let (a, b) = (s[0], s[1]);
    let pa = (mesh.tiles[a.0].kind, a.1);
    let pb = (mesh.tiles[b.0].kind, b.1);
    if pa < pb {
        return (a, b);
    }
    if pb < pa {
        return (b, a);
    }
    // same prototile and slot on both sides: fall back to comparing the
    // star marked at either tail candidate
    let tiles = vec![mesh.tiles[a.0].clone(), mesh.tiles[b.0].clone()];
    let ka = Patch::new(tiles.clone(), Center::Vertex(mesh.tiles[a.0].edge(a.1).0.clone())).canonical_key(rigid(sys));
    let kb = Patch::new(tiles, Center::Vertex(mesh.tiles[b.0].edge(b.1).0.clone())).canonical_key(rigid(sys));
    if kb < ka {
        (b, a)
    } else {
        (a, b)
    }
}

pub fn tile_star(mesh: &Mesh, t: usize) -> Patch {
    Patch::new(vec![mesh.tiles[t].clone()], Center::Tile(0))
}

pub fn edge_star(mesh: &Mesh, e: usize) -> Patch {
    let r = &mesh.edges[e];
    Patch::new(mesh.cut(&mesh.tiles_at_edge(e)), Center::Edge(mesh.points[r.a].clone(), mesh.points[r.b].clone()))
}

pub fn vertex_star(mesh: &Mesh, v: usize) -> Patch {
    Patch::new(mesh.cut(&mesh.tiles_at_vertex(v)), Center::Vertex(mesh.points[v].clone()))
}

#[derive(Default, PartialEq, Eq, Debug, Clone)]
pub struct KeySets {
    pub tiles: BTreeSet<CanonicalKey>,
    pub edges: BTreeSet<CanonicalKey>,
    pub vertices: BTreeSet<CanonicalKey>,
}

fn trusted(dist: &[usize], tiles: &[usize]) -> bool {
    tiles.iter().all(|&t| dist[t] >= TRUST_DEPTH)
}

/// Rigid keys of every trusted star in the mesh.
pub fn trusted_keys(sys: &TilingSystem, mesh: &Mesh) -> KeySets {
    let dist = mesh.boundary_distance();
    let mode = rigid(sys);
    let mut ks = KeySets::default();
    for t in 0..mesh.tiles.len() {
        if dist[t] >= TRUST_DEPTH {
            ks.tiles.insert(tile_star(mesh, t).canonical_key(mode));
        }
    }
    for e in 0..mesh.edges.len() {
        if trusted(&dist, &mesh.tiles_at_edge(e)) && !mesh.is_boundary_edge(e) {
            ks.edges.insert(edge_star(mesh, e).canonical_key(mode));
        }
    }
    for v in 0..mesh.points.len() {
        if trusted(&dist, &mesh.tiles_at_vertex(v)) {
            ks.vertices.insert(vertex_star(mesh, v).canonical_key(mode));
        }
    }
    ks
}

/// Whole-tile mesh of a piece patch.
pub fn tile_mesh(sys: &TilingSystem, pieces: &[Placement]) -> Result<Mesh, TilingError> {
    let tiles = assemble_tiles(sys, pieces)?;
    Mesh::new(tiles.iter().map(|(p, _)| place_tile(sys, p)).collect())
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AtlasOptions {
    pub max_level: Option<usize>,
    /// Picks representatives pseudo-randomly among occurrences instead of
    /// taking the first one.
    pub representative_seed: Option<u64>,
}

/// Substitutes the seed until the trusted star classes agree at two
/// consecutive levels, then builds the atlas from the last patch.
pub fn grow_star_closure(sys: &TilingSystem, opts: AtlasOptions) -> Result<Closure, TilingError> {
    let max_level = opts.max_level.unwrap_or(sys.max_level);
    let mut pieces = sys.seed.clone();
    let mut prev: Option<KeySets> = None;
    for level in 0..=max_level {
        if level > 0 {
            pieces = substitute(sys, &pieces).0;
        }
        let mesh = tile_mesh(sys, &pieces)?;
        let ks = trusted_keys(sys, &mesh);
        if !ks.vertices.is_empty() && prev.as_ref() == Some(&ks) {
            let (atlas, classification) = build_atlas(sys, &mesh, level, opts.representative_seed)?;
            return Ok(Closure { atlas, mesh, pieces, level, classification });
        }
        prev = Some(ks);
    }
    Err(TilingError::NotClosed { levels: max_level })
}

fn pick(count: usize, seed: Option<u64>, salt: usize) -> usize {
    match seed {
        None => 0,
        Some(s) => StdRng::seed_from_u64(s ^ salt as u64).gen_range(0..count),
    }
}

/// Classifies every trusted cell of the mesh and assembles the atlas.
pub fn build_atlas(
    sys: &TilingSystem,
    mesh: &Mesh,
    level: usize,
    rep_seed: Option<u64>,
) -> Result<(StarAtlas, Classification), TilingError> {
    let mode = rigid(sys);
    let dist = mesh.boundary_distance();
    let (nr, nrot) = (sys.ring_order, sys.rotation_order);

    // tiles
    let mut tile_groups: BTreeMap<CanonicalKey, Vec<usize>> = BTreeMap::new();
    let mut tile_keys = vec![None; mesh.tiles.len()];
    for t in 0..mesh.tiles.len() {
        if dist[t] >= TRUST_DEPTH {
            let k = tile_star(mesh, t).canonical_key(mode);
            tile_keys[t] = Some(k.clone());
            tile_groups.entry(k).or_default().push(t);
        }
    }
    let tile_id: BTreeMap<CanonicalKey, usize> = tile_groups.keys().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let mut tiles = Vec::new();
    for (i, (k, occ)) in tile_groups.iter().enumerate() {
        let t = occ[pick(occ.len(), rep_seed, i)];
        let star = tile_star(mesh, t);
        tiles.push(TileClass {
            id: i,
            kind: mesh.tiles[t].kind,
            label: sys.tiles[mesh.tiles[t].kind].label.clone(),
            symmetry_order: star.symmetry_rotations(nr, nrot).len(),
            count: occ.len(),
            key: k.clone(),
            representative: mesh.tiles[t].clone(),
        });
    }
    let tile_class: Vec<Option<usize>> = tile_keys.iter().map(|k| k.as_ref().map(|k| tile_id[k])).collect();

    // edges
    let mut edge_groups: BTreeMap<CanonicalKey, Vec<usize>> = BTreeMap::new();
    for e in 0..mesh.edges.len() {
        if mesh.is_boundary_edge(e) || !trusted(&dist, &mesh.tiles_at_edge(e)) {
            continue;
        }
        edge_groups.entry(edge_star(mesh, e).canonical_key(mode)).or_default().push(e);
    }
    let mut edge_class = vec![None; mesh.edges.len()];
    let mut edges = Vec::new();
    for (i, (k, occ)) in edge_groups.iter().enumerate() {
        for &e in occ {
            let ((lt, ls), _) = orient(sys, mesh, e);
            let (tail, head) = mesh.tiles[lt].edge(ls);
            edge_class[e] = Some((i, mesh.point_index[tail], mesh.point_index[head]));
        }
        let e = occ[pick(occ.len(), rep_seed, 1000 + i)];
        let (l, r) = orient(sys, mesh, e);
        let side = |(t, s): (usize, usize)| -> Result<EdgeSide, TilingError> {
            Ok(EdgeSide {
                tile_class: tile_class[t].ok_or(TilingError::BoundaryContamination)?,
                kind: mesh.tiles[t].kind,
                slot: s,
                tau: tau_of(sys, &mesh.tiles[t]),
            })
        };
        let (tail, head) = mesh.tiles[l.0].edge(l.1);
        edges.push(EdgeClass {
            id: i,
            left: side(l)?,
            right: side(r)?,
            symmetry_order: edge_star(mesh, e).symmetry_rotations(nr, nrot).len(),
            count: occ.len(),
            key: k.clone(),
            tail: tail.clone(),
            head: head.clone(),
            representative: vec![mesh.tiles[l.0].clone(), mesh.tiles[r.0].clone()],
        });
    }

    // vertices
    let mut vertex_groups: BTreeMap<CanonicalKey, Vec<usize>> = BTreeMap::new();
    for v in 0..mesh.points.len() {
        if trusted(&dist, &mesh.tiles_at_vertex(v)) {
            vertex_groups.entry(vertex_star(mesh, v).canonical_key(mode)).or_default().push(v);
        }
    }
    let mut vertex_class = vec![None; mesh.points.len()];
    let mut vertices = Vec::new();
    for (i, (k, occ)) in vertex_groups.iter().enumerate() {
        for &v in occ {
            vertex_class[v] = Some(i);
        }
        let v = occ[pick(occ.len(), rep_seed, 2000 + i)];
        let mut incidences = Vec::new();
        for &e in &mesh.vertex_edges[v] {
            let (c, tail, _) = edge_class[e].ok_or(TilingError::BoundaryContamination)?;
            incidences.push(Incidence { edge_class: c, outgoing: tail == v });
        }
        incidences.sort_by_key(|i| (i.edge_class, i.outgoing));
        let star = vertex_star(mesh, v);
        vertices.push(VertexClass {
            id: i,
            symmetry_order: star.symmetry_rotations(nr, nrot).len(),
            count: occ.len(),
            incidences,
            signature: ccw_signature(sys, mesh, v),
            key: k.clone(),
            point: mesh.points[v].clone(),
            representative: star.tiles,
        });
    }

    let atlas = StarAtlas { system: sys.name.clone(), ring_order: nr, rotation_order: nrot, level, tiles, edges, vertices };
    Ok((atlas, Classification { tile_class, edge_class, vertex_class }))
}

// labels of the tiles around v, cyclically minimal, counterclockwise
fn ccw_signature(sys: &TilingSystem, mesh: &Mesh, v: usize) -> Vec<String> {
    let p = &mesh.points[v];
    let mut around: Vec<(f64, String)> = mesh.vertex_tiles[v]
        .iter()
        .map(|&(t, _)| {
            let tile = &mesh.tiles[t];
            // the centroid direction lies inside the tile's corner sector
            let (px, py) = p.real_embed();
            let n = tile.vertices.len() as f64;
            let (cx, cy) = tile.vertices.iter().map(|q| q.real_embed()).fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
            ((cy / n - py).atan2(cx / n - px), sys.tiles[tile.kind].label.clone())
        })
        .collect();
    around.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let labels: Vec<String> = around.into_iter().map(|(_, l)| l).collect();
    (0..labels.len())
        .map(|k| labels[k..].iter().chain(&labels[..k]).cloned().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct IsotropyReport {
    pub tiles_checked: usize,
    pub edges_checked: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CellKind {
    Tile,
    Edge,
}

/// No nontrivial group rotation may map a tile or edge star to itself.
pub fn check_isotropy(atlas: &StarAtlas) -> Result<IsotropyReport, TilingError> {
    let mut violations = Vec::new();
    for e in &atlas.edges {
        if e.symmetry_order > 1 {
            violations.push((CellKind::Edge, e.id));
        }
    }
    for t in &atlas.tiles {
        if t.symmetry_order > 1 {
            violations.push((CellKind::Tile, t.id));
        }
    }
    if violations.is_empty() {
        Ok(IsotropyReport { tiles_checked: atlas.tiles.len(), edges_checked: atlas.edges.len() })
    } else {
        Err(TilingError::IsotropyViolation { violations })
    }
}
