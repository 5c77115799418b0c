//! Exact integer linear algebra: Smith normal form, presented abelian
//! groups, homology of chain complexes and stabilising direct limits.

mod graded;
mod group;
mod homology;
mod limit;
mod matrix;
mod snf;

pub use graded::GradedGroup;
pub use group::{coinvariants_of, element_order, invariants_of, restrict, subgroup, FgAbGroup, GroupHom, Presentation};
pub use homology::{cohomology_basis, homology_at, homology_by_ranks, solve_in, HomologyBasis};
pub use limit::{direct_limit, stable_limit, DirectSystem, StableLimit, DEFAULT_MAX_STAGES};
pub use matrix::IntMatrix;
pub use snf::{invariant_factors, kernel_basis, lattice_basis, rank, smith_normal_form, SmithDecomposition, Solver};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("boundary composite is nonzero")]
    CompositionNotZero,
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error("matrix does not respect the source relations")]
    NotWellDefined,
    #[error("map is not an endomorphism")]
    NotEndomorphism,
    #[error("subgroup is not invariant under the map")]
    NotInvariant,
    #[error("map does not send cycles to cycles")]
    NotChainMap,
    #[error("image tower did not stabilise within {stages} stages")]
    NotStabilizing { stages: usize },
}
