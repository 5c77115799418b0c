use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::algebra::FgAbGroup;
use crate::cyclo::{CycNum, PlanePoint, RigidMotion};

use super::key::{Center, KeyMode, Patch};
use super::patch::PlacedTile;
use super::TilingError;

/// A substitution piece: the polygons the rule acts on.
#[derive(Clone, Debug)]
pub struct Piece {
    pub id: String,
    pub vertices: Vec<PlanePoint>,
}

/// A prototile of the tiling whose stars are classified. Either a piece
/// itself or a union of pieces at fixed relative motions.
#[derive(Clone, Debug)]
pub struct Prototile {
    pub id: String,
    pub label: String,
    /// Counterclockwise boundary in the tile's own frame.
    pub vertices: Vec<PlanePoint>,
    /// Rotation (in units of 2π/ring_order) taking the frame to the
    /// reference orientation.
    pub reference_rot: u32,
    pub pieces: Vec<(usize, RigidMotion)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placement {
    pub kind: usize,
    pub motion: RigidMotion,
}

/// Optional externally supplied data for the spectral route.
#[derive(Clone, Debug, Deserialize, serde::Serialize, PartialEq, Eq)]
pub struct EpeFixture {
    pub h0_t0: FgAbGroup,
    pub omega_class: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct TilingSystem {
    pub name: String,
    pub ring_order: u32,
    pub rotation_order: u32,
    pub inflation: CycNum,
    pub pieces: Vec<Piece>,
    pub rule: Vec<Vec<Placement>>,
    pub tiles: Vec<Prototile>,
    pub seed: Vec<Placement>,
    pub max_level: usize,
    pub epe: Option<EpeFixture>,
}

/// One-dimensional symbolic substitution.
#[derive(Clone, Debug)]
pub struct WordSystem {
    pub name: String,
    pub letters: Vec<String>,
    pub rule: Vec<Vec<usize>>,
    pub max_level: usize,
}

#[derive(Clone, Debug)]
pub enum SystemSpec {
    Tiling(TilingSystem),
    Word(WordSystem),
}

impl SystemSpec {
    pub fn name(&self) -> &str {
        match self {
            SystemSpec::Tiling(t) => &t.name,
            SystemSpec::Word(w) => &w.name,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlacementFile {
    piece: String,
    #[serde(default)]
    rot: i64,
    #[serde(default)]
    trans: Vec<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceFile {
    id: String,
    vertices: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TileFile {
    id: String,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    reference_rot: i64,
    vertices: Vec<Vec<i64>>,
    pieces: Vec<PlacementFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TilingFile {
    name: String,
    #[serde(default)]
    kind: Option<String>,
    ring_order: u32,
    rotation_order: u32,
    inflation: Vec<i64>,
    pieces: Vec<PieceFile>,
    rule: BTreeMap<String, Vec<PlacementFile>>,
    #[serde(default)]
    tiles: Option<Vec<TileFile>>,
    #[serde(default)]
    seed: Option<Vec<PlacementFile>>,
    #[serde(default)]
    max_level: Option<usize>,
    #[serde(default)]
    epe: Option<EpeFixture>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WordFile {
    name: String,
    #[allow(dead_code)]
    kind: String,
    letters: Vec<String>,
    rule: BTreeMap<String, String>,
    #[serde(default)]
    max_level: Option<usize>,
}

pub const DEFAULT_MAX_LEVEL: usize = 12;

pub fn load_system(path: &Path) -> Result<SystemSpec, TilingError> {
    let text = std::fs::read_to_string(path).map_err(|e| TilingError::Io(path.display().to_string(), e.to_string()))?;
    parse_system(&text)
}

pub fn parse_system(text: &str) -> Result<SystemSpec, TilingError> {
    let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| TilingError::Parse(e.to_string()))?;
    if raw.get("kind").and_then(|k| k.as_str()) == Some("word") {
        let f: WordFile = serde_json::from_value(raw).map_err(|e| TilingError::Parse(e.to_string()))?;
        return Ok(SystemSpec::Word(word_from_file(f)?));
    }
    let f: TilingFile = serde_json::from_value(raw).map_err(|e| TilingError::Parse(e.to_string()))?;
    Ok(SystemSpec::Tiling(tiling_from_file(f)?))
}

fn word_from_file(f: WordFile) -> Result<WordSystem, TilingError> {
    let index = |c: char| {
        f.letters
            .iter()
            .position(|l| l.len() == 1 && l.starts_with(c))
            .ok_or_else(|| TilingError::Parse(format!("unknown letter {c}")))
    };
    let mut rule = Vec::new();
    for l in &f.letters {
        let img = f.rule.get(l).ok_or_else(|| TilingError::Parse(format!("no rule for letter {l}")))?;
        rule.push(img.chars().map(index).collect::<Result<Vec<_>, _>>()?);
    }
    if rule.iter().any(|w| w.is_empty()) {
        return Err(TilingError::Parse("empty substitution word".into()));
    }
    Ok(WordSystem { name: f.name, letters: f.letters, rule, max_level: f.max_level.unwrap_or(DEFAULT_MAX_LEVEL) })
}

fn point(n: u32, raw: &[i64]) -> Result<CycNum, TilingError> {
    CycNum::from_raw(n, raw).map_err(|e| TilingError::Parse(e.to_string()))
}

fn tiling_from_file(f: TilingFile) -> Result<TilingSystem, TilingError> {
    if let Some(k) = &f.kind {
        if k != "tiling" {
            return Err(TilingError::Parse(format!("unknown system kind {k}")));
        }
    }
    let n = f.ring_order;
    if n == 0 || f.rotation_order == 0 || !n.is_multiple_of(f.rotation_order) {
        return Err(TilingError::InvalidSystem(format!(
            "rotation order {} must divide ring order {}",
            f.rotation_order, n
        )));
    }
    let mut pieces = Vec::new();
    for p in &f.pieces {
        let vertices = p.vertices.iter().map(|v| point(n, v)).collect::<Result<Vec<_>, _>>()?;
        if vertices.len() < 3 {
            return Err(TilingError::InvalidSystem(format!("piece {} has fewer than 3 vertices", p.id)));
        }
        if signed_area(&vertices) <= 0.0 {
            return Err(TilingError::InvalidSystem(format!("piece {} is not counterclockwise", p.id)));
        }
        pieces.push(Piece { id: p.id.clone(), vertices });
    }
    let piece_index = |id: &str| {
        pieces.iter().position(|p| p.id == id).ok_or_else(|| TilingError::Parse(format!("unknown piece {id}")))
    };
    let placement = |p: &PlacementFile| -> Result<Placement, TilingError> {
        Ok(Placement { kind: piece_index(&p.piece)?, motion: RigidMotion::new(p.rot, point(n, &p.trans)?) })
    };
    let inflation = point(n, &f.inflation)?;
    let mut rule = Vec::new();
    for p in &pieces {
        let children = f.rule.get(&p.id).ok_or_else(|| TilingError::InvalidSystem(format!("no rule for piece {}", p.id)))?;
        rule.push(children.iter().map(placement).collect::<Result<Vec<_>, _>>()?);
    }
    for id in f.rule.keys() {
        piece_index(id)?;
    }
    let tiles = match &f.tiles {
        None => pieces
            .iter()
            .enumerate()
            .map(|(i, p)| Prototile {
                id: p.id.clone(),
                label: p.id.clone(),
                vertices: p.vertices.clone(),
                reference_rot: 0,
                pieces: vec![(i, RigidMotion::identity(n))],
            })
            .collect(),
        Some(ts) => {
            let mut out = Vec::new();
            for t in ts {
                let vertices = t.vertices.iter().map(|v| point(n, v)).collect::<Result<Vec<_>, _>>()?;
                if signed_area(&vertices) <= 0.0 {
                    return Err(TilingError::InvalidSystem(format!("tile {} is not counterclockwise", t.id)));
                }
                let parts = t
                    .pieces
                    .iter()
                    .map(|p| placement(p).map(|pl| (pl.kind, pl.motion)))
                    .collect::<Result<Vec<_>, _>>()?;
                if parts.is_empty() {
                    return Err(TilingError::InvalidSystem(format!("tile {} has no pieces", t.id)));
                }
                out.push(Prototile {
                    id: t.id.clone(),
                    label: t.label.clone().unwrap_or_else(|| t.id.clone()),
                    vertices,
                    reference_rot: t.reference_rot.rem_euclid(n as i64) as u32,
                    pieces: parts,
                });
            }
            out
        }
    };
    let seed = match &f.seed {
        Some(s) => s.iter().map(placement).collect::<Result<Vec<_>, _>>()?,
        None => tiles[0].pieces.iter().map(|(k, m)| Placement { kind: *k, motion: m.clone() }).collect(),
    };
    let sys = TilingSystem {
        name: f.name,
        ring_order: n,
        rotation_order: f.rotation_order,
        inflation,
        pieces,
        rule,
        tiles,
        seed,
        max_level: f.max_level.unwrap_or(DEFAULT_MAX_LEVEL),
        epe: f.epe,
    };
    sys.validate()?;
    Ok(sys)
}

/// Shoelace area of the numerical embedding.
pub fn signed_area(v: &[PlanePoint]) -> f64 {
    let pts: Vec<(f64, f64)> = v.iter().map(|p| p.real_embed()).collect();
    let mut a = 0.0;
    for i in 0..pts.len() {
        let (x0, y0) = pts[i];
        let (x1, y1) = pts[(i + 1) % pts.len()];
        a += x0 * y1 - x1 * y0;
    }
    a / 2.0
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-7 * (1.0 + a.abs().max(b.abs()))
}

impl TilingSystem {
    /// Rotation step generating the symmetry group, in ring units.
    pub fn rotation_step(&self) -> u32 {
        self.ring_order / self.rotation_order
    }

    pub fn group_rotations(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.rotation_order).map(move |k| k * self.rotation_step())
    }

    pub fn placed_piece(&self, p: &Placement) -> Vec<PlanePoint> {
        self.pieces[p.kind].vertices.iter().map(|v| p.motion.apply(v)).collect()
    }

    fn validate(&self) -> Result<(), TilingError> {
        let (lx, ly) = self.inflation.real_embed();
        let scale = lx * lx + ly * ly;
        if scale < 1.0 - 1e-9 {
            return Err(TilingError::InvalidSystem("inflation must not shrink".into()));
        }
        for (i, children) in self.rule.iter().enumerate() {
            let parent = signed_area(&self.pieces[i].vertices) * scale;
            let sum: f64 = children.iter().map(|c| signed_area(&self.placed_piece(c))).sum();
            if !close(parent, sum) {
                return Err(TilingError::RuleNotCovering(self.pieces[i].id.clone()));
            }
            let big: Vec<PlanePoint> = self.pieces[i].vertices.iter().map(|v| &self.inflation * v).collect();
            for c in children {
                for v in self.placed_piece(c) {
                    if !inside_closed(&big, &v) {
                        return Err(TilingError::RuleNotCovering(self.pieces[i].id.clone()));
                    }
                }
            }
        }
        for t in &self.tiles {
            let sum: f64 = t
                .pieces
                .iter()
                .map(|(k, m)| signed_area(&self.placed_piece(&Placement { kind: *k, motion: m.clone() })))
                .sum();
            if !close(sum, signed_area(&t.vertices)) {
                return Err(TilingError::InvalidSystem(format!("pieces of tile {} do not fill it", t.id)));
            }
        }
        // prototiles are told apart by their decomposition into pieces
        let mode = KeyMode::Rigid { ring_order: self.ring_order, rotation_order: self.rotation_order };
        let keys: Vec<_> = self
            .tiles
            .iter()
            .map(|t| {
                let parts = t
                    .pieces
                    .iter()
                    .map(|(k, m)| PlacedTile {
                        kind: *k,
                        motion: m.clone(),
                        vertices: self.placed_piece(&Placement { kind: *k, motion: m.clone() }),
                    })
                    .collect();
                Patch::new(parts, Center::None).canonical_key(mode)
            })
            .collect();
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                if keys[i] == keys[j] {
                    return Err(TilingError::InvalidSystem(format!(
                        "tiles {} and {} are rigid motions of each other",
                        self.tiles[i].id, self.tiles[j].id
                    )));
                }
            }
        }
        Ok(())
    }
}

// Closed point-in-convex-or-not polygon test by winding, tolerant at the
// boundary. Pieces here are small polygons so floats are adequate.
fn inside_closed(poly: &[PlanePoint], p: &PlanePoint) -> bool {
    let q = p.real_embed();
    let pts: Vec<(f64, f64)> = poly.iter().map(|v| v.real_embed()).collect();
    let n = pts.len();
    let mut winding = 0.0;
    for i in 0..n {
        let (ax, ay) = (pts[i].0 - q.0, pts[i].1 - q.1);
        let (bx, by) = (pts[(i + 1) % n].0 - q.0, pts[(i + 1) % n].1 - q.1);
        let cross = ax * by - ay * bx;
        let dot = ax * bx + ay * by;
        if cross.abs() < 1e-9 && dot <= 1e-9 {
            return true;
        }
        winding += cross.atan2(dot);
    }
    winding.abs() > 1.0
}
