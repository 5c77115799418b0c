//! Substitution tilings over cyclotomic coordinates: loading systems,
//! growing patches, canonical keys and the star atlas.

mod atlas;
mod key;
mod patch;
mod system;

pub use atlas::{
    build_atlas, check_isotropy, edge_star, grow_star_closure, tau_of, tile_mesh, tile_star, trusted_keys, vertex_star,
    AtlasOptions, CellKind, Classification, Closure, EdgeClass, EdgeSide, Incidence, IsotropyReport, KeySets,
    StarAtlas, TileClass, VertexClass, TRUST_DEPTH,
};
pub use key::{matching_motions, CanonicalKey, Center, KeyMode, Patch};
pub use patch::{assemble_tiles, place_piece, place_tile, substitute, substitute_n, EdgeRec, Mesh, PlacedTile};
pub use system::{
    load_system, parse_system, signed_area, EpeFixture, Piece, Placement, Prototile, SystemSpec, TilingSystem,
    WordSystem, DEFAULT_MAX_LEVEL,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TilingError {
    #[error("cannot read {0}: {1}")]
    Io(String, String),
    #[error("malformed system file: {0}")]
    Parse(String),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("substitution of piece {0} does not exactly tile its inflation")]
    RuleNotCovering(String),
    #[error("tiles overlap or meet improperly along an edge")]
    Overlap,
    #[error("star classes did not stabilise within {levels} levels")]
    NotClosed { levels: usize },
    #[error("a trusted star touches an unclassified cell")]
    BoundaryContamination,
    #[error("isotropy violated by {violations:?}")]
    IsotropyViolation { violations: Vec<(CellKind, usize)> },
}
