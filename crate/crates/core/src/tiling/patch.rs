use std::collections::{HashMap, HashSet, VecDeque};

use crate::cyclo::{PlanePoint, RigidMotion};

use super::system::{Placement, TilingSystem};
use super::TilingError;

/// A placed polygon: prototile index, motion, and its counterclockwise
/// vertices in patch coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlacedTile {
    pub kind: usize,
    pub motion: RigidMotion,
    pub vertices: Vec<PlanePoint>,
}

impl PlacedTile {
    pub fn edge(&self, slot: usize) -> (&PlanePoint, &PlanePoint) {
        let n = self.vertices.len();
        (&self.vertices[slot], &self.vertices[(slot + 1) % n])
    }
}

/// One application of the substitution to a list of piece placements.
/// Returns the children and, for each child, the index of its parent.
pub fn substitute(sys: &TilingSystem, pieces: &[Placement]) -> (Vec<Placement>, Vec<usize>) {
    let mut out = Vec::new();
    let mut parent = Vec::new();
    for (i, p) in pieces.iter().enumerate() {
        let scaled = RigidMotion { rot: p.motion.rot, trans: &sys.inflation * &p.motion.trans };
        for c in &sys.rule[p.kind] {
            out.push(Placement { kind: c.kind, motion: scaled.compose(&c.motion) });
            parent.push(i);
        }
    }
    (out, parent)
}

pub fn substitute_n(sys: &TilingSystem, seed: &[Placement], levels: usize) -> Vec<Placement> {
    let mut cur = seed.to_vec();
    for _ in 0..levels {
        cur = substitute(sys, &cur).0;
    }
    cur
}

/// Reassembles whole prototiles from their pieces. Pieces not belonging
/// to a complete tile are dropped; a piece claimed twice is an error.
pub fn assemble_tiles(sys: &TilingSystem, pieces: &[Placement]) -> Result<Vec<(Placement, Vec<usize>)>, TilingError> {
    let index: HashMap<&Placement, usize> = pieces.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut used = vec![false; pieces.len()];
    let mut out = Vec::new();
    for (i, p) in pieces.iter().enumerate() {
        for (t, proto) in sys.tiles.iter().enumerate() {
            let (k0, m0) = &proto.pieces[0];
            if *k0 != p.kind {
                continue;
            }
            let frame = p.motion.compose(&m0.inverse());
            let mut members = vec![i];
            let mut complete = true;
            for (k, m) in &proto.pieces[1..] {
                let want = Placement { kind: *k, motion: frame.compose(m) };
                match index.get(&want) {
                    Some(&j) => members.push(j),
                    None => {
                        complete = false;
                        break;
                    }
                }
            }
            if !complete {
                continue;
            }
            for &j in &members {
                if used[j] {
                    return Err(TilingError::InvalidSystem("a piece belongs to two assembled tiles".into()));
                }
                used[j] = true;
            }
            out.push((Placement { kind: t, motion: frame }, members));
        }
    }
    Ok(out)
}

pub fn place_tile(sys: &TilingSystem, p: &Placement) -> PlacedTile {
    PlacedTile {
        kind: p.kind,
        motion: p.motion.clone(),
        vertices: sys.tiles[p.kind].vertices.iter().map(|v| p.motion.apply(v)).collect(),
    }
}

pub fn place_piece(sys: &TilingSystem, p: &Placement) -> PlacedTile {
    PlacedTile { kind: p.kind, motion: p.motion.clone(), vertices: sys.placed_piece(p) }
}

#[derive(Clone, Debug)]
pub struct EdgeRec {
    pub a: usize,
    pub b: usize,
    /// (tile, slot) pairs; at most two in a valid patch.
    pub sides: Vec<(usize, usize)>,
}

/// Combinatorial structure of a patch: shared vertices and edges.
#[derive(Clone, Debug)]
pub struct Mesh {
    pub tiles: Vec<PlacedTile>,
    pub points: Vec<PlanePoint>,
    pub point_index: HashMap<PlanePoint, usize>,
    pub tile_vertices: Vec<Vec<usize>>,
    pub edges: Vec<EdgeRec>,
    pub edge_index: HashMap<(usize, usize), usize>,
    /// Per tile, per slot: edge id.
    pub tile_edges: Vec<Vec<usize>>,
    pub vertex_tiles: Vec<Vec<(usize, usize)>>,
    pub vertex_edges: Vec<Vec<usize>>,
}

impl Mesh {
    pub fn new(tiles: Vec<PlacedTile>) -> Result<Mesh, TilingError> {
        let mut points = Vec::new();
        let mut point_index = HashMap::new();
        let mut tile_vertices = Vec::with_capacity(tiles.len());
        for t in &tiles {
            let ids = t
                .vertices
                .iter()
                .map(|v| {
                    *point_index.entry(v.clone()).or_insert_with(|| {
                        points.push(v.clone());
                        points.len() - 1
                    })
                })
                .collect::<Vec<_>>();
            tile_vertices.push(ids);
        }
        let mut edges: Vec<EdgeRec> = Vec::new();
        let mut edge_index = HashMap::new();
        let mut tile_edges = Vec::with_capacity(tiles.len());
        let mut vertex_tiles = vec![Vec::new(); points.len()];
        let mut vertex_edges = vec![Vec::new(); points.len()];
        for (t, ids) in tile_vertices.iter().enumerate() {
            let n = ids.len();
            let mut te = Vec::with_capacity(n);
            for s in 0..n {
                let (a, b) = (ids[s], ids[(s + 1) % n]);
                vertex_tiles[a].push((t, s));
                let key = (a.min(b), a.max(b));
                let e = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(EdgeRec { a: key.0, b: key.1, sides: Vec::new() });
                    vertex_edges[key.0].push(edges.len() - 1);
                    vertex_edges[key.1].push(edges.len() - 1);
                    edges.len() - 1
                });
                edges[e].sides.push((t, s));
                if edges[e].sides.len() > 2 {
                    return Err(TilingError::Overlap);
                }
                if edges[e].sides.len() == 2 {
                    let (t0, s0) = edges[e].sides[0];
                    let m = tile_vertices[t0].len();
                    // neighbours traverse a shared edge in opposite directions
                    if tile_vertices[t0][s0] != b || tile_vertices[t0][(s0 + 1) % m] != a {
                        return Err(TilingError::Overlap);
                    }
                }
                te.push(e);
            }
            tile_edges.push(te);
        }
        Ok(Mesh { tiles, points, point_index, tile_vertices, edges, edge_index, tile_edges, vertex_tiles, vertex_edges })
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edges[e].sides.len() < 2
    }

    /// All incident edges are shared by two tiles, so the vertex star is
    /// the full neighbourhood.
    pub fn vertex_complete(&self, v: usize) -> bool {
        self.vertex_edges[v].iter().all(|&e| !self.is_boundary_edge(e))
    }

    pub fn tile_neighbours(&self, t: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.tile_vertices[t]
            .iter()
            .flat_map(|&v| self.vertex_tiles[v].iter().map(|&(u, _)| u))
            .filter(|&u| u != t)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Tile distance (through shared vertices) to the nearest tile with a
    /// free edge.
    pub fn boundary_distance(&self) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.tiles.len()];
        let mut q = VecDeque::new();
        for t in 0..self.tiles.len() {
            if self.tile_edges[t].iter().any(|&e| self.is_boundary_edge(e)) {
                dist[t] = 0;
                q.push_back(t);
            }
        }
        while let Some(t) = q.pop_front() {
            for u in self.tile_neighbours(t) {
                if dist[u] == usize::MAX {
                    dist[u] = dist[t] + 1;
                    q.push_back(u);
                }
            }
        }
        dist
    }

    pub fn tiles_at_vertex(&self, v: usize) -> Vec<usize> {
        let mut ts: Vec<usize> = self.vertex_tiles[v].iter().map(|&(t, _)| t).collect();
        ts.sort_unstable();
        ts.dedup();
        ts
    }

    pub fn tiles_at_edge(&self, e: usize) -> Vec<usize> {
        self.edges[e].sides.iter().map(|&(t, _)| t).collect()
    }

    /// Tiles in the closed neighbourhood of a vertex set (used to cut
    /// representative patches).
    pub fn cut(&self, tiles: &[usize]) -> Vec<PlacedTile> {
        let set: HashSet<usize> = tiles.iter().copied().collect();
        let mut v: Vec<usize> = set.into_iter().collect();
        v.sort_unstable();
        v.into_iter().map(|t| self.tiles[t].clone()).collect()
    }
}
