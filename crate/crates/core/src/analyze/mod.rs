//! Analyzers over constructed balls.

pub mod delta;
pub mod ends;
pub mod paths;
pub mod structural;

pub use delta::{delta_hyperbolicity, DeltaMode, DeltaReport};
pub use ends::{boundary_at_scale, ends_estimate, ends_verdict, BoundaryAtScale, EndsReport, EndsRow};
pub use paths::{fineness_probe, loop_census, FinenessReport, LoopCensus};
pub use structural::{
    dense_amalgam_audit, neighborhood_basis, structural_boundary, AuditReport, ConditionVerdict, Direction, Neighborhood,
    StructuralBoundary,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalyzeError {
    #[error("{vertices} vertices exceed the exhaustive limit of {limit}")]
    TooLargeForExhaustive { vertices: usize, limit: usize },
    #[error("length {length} exceeds the limit of {limit}")]
    LengthTooLarge { length: u32, limit: u32 },
    #[error("need R > n + 2, got n = {n}, R = {r}")]
    RadiusOrderViolation { n: u32, r: u32 },
    #[error("ball must be complete through radius {needed}, but is only complete through {complete}")]
    BallTooSmall { needed: u32, complete: u32 },
    #[error("unknown vertex '{0}'")]
    UnknownVertex(String),
    #[error("'{0}' and '{1}' are not adjacent")]
    NotAnEdge(String, String),
    #[error("not a tree of spaces: {0}")]
    NotATreeOfSpaces(String),
    #[error("unknown direction: {0}")]
    UnknownDirection(String),
}
