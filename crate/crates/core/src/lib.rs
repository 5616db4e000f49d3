//! Combinatorial tilings produced by growing balls in the universal cover of
//! a closed 3-manifold, and the subdivision rules that reproduce them.

pub mod cayley;
pub mod cover;
pub mod glue;
pub mod growth;
pub mod iso;
pub mod library;
pub mod pack;
pub mod rule;
pub mod tiling;
pub mod unionfind;

pub use tiling::{refinement_check, EdgeStatus, RefinementWitness, Side, Tiling, TilingBuilder, TilingError};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Tiling(#[from] TilingError),
    #[error("invalid JSON")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Glue(#[from] glue::GlueError),
    #[error(transparent)]
    Cover(#[from] cover::CoverError),
    #[error(transparent)]
    Rule(#[from] rule::RuleError),
    #[error(transparent)]
    Library(#[from] library::LibraryError),
    #[error(transparent)]
    Growth(#[from] growth::GrowthError),
    #[error(transparent)]
    Cayley(#[from] cayley::CayleyError),
    #[error(transparent)]
    Pack(#[from] pack::PackError),
}
