//! Finite groups, graphs of finite groups, words and normal forms.

mod gog;
mod group;
pub mod presets;
mod word;

pub use gog::{
    parse_model, EdgeGroup, EdgeSpec, GraphOfGroups, GroupSpec, ModelFile, NamedTable, OrientedEdge,
    VertexGroup,
};
pub use group::{validate_group, FiniteGroup, Monomorphism, Subgroup, ASSOC_SAMPLES, EXHAUSTIVE_ASSOC_LIMIT};
pub use word::{format_letters, Letter, NormalForm, Reducer, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("multiplication table is empty")]
    EmptyTable,
    #[error("row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("not closed: {a} * {b} = {value} is out of range")]
    NotClosed { a: usize, b: usize, value: usize },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element {element} has no inverse")]
    NoInverse { element: usize },
    #[error("not associative at ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("expected {expected} element names, found {found}")]
    BadNames { expected: usize, found: usize },
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("not a monomorphism: {0}")]
    NotAMonomorphism(String),
    #[error("malformed word at letter {position}: {reason}")]
    MalformedWord { position: usize, reason: String },
    #[error("unknown preset group '{0}'")]
    UnknownPreset(String),
    #[error("unknown vertex '{0}'")]
    UnknownVertex(String),
    #[error("duplicate vertex or edge name '{0}'")]
    DuplicateName(String),
    #[error("graph of groups has no vertices")]
    EmptyGraph,
    #[error("underlying graph is not connected")]
    Disconnected,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}
