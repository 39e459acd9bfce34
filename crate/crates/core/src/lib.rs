#![forbid(unsafe_code)]
//! Finite balls of Cayley-Abels graphs, coned-off graphs, combinatorial horoballs and
//! trees of spaces for graphs of finite groups, plus analyzers for hyperbolicity, ends
//! and boundary structure at a fixed scale.

pub mod analyze;
pub mod cayley;
pub mod model;
pub mod treespace;
pub mod explicit;
pub mod graph;
pub mod horoball;
