//! Embedded path and simple loop enumeration.

use serde::{Deserialize, Serialize};

use super::AnalyzeError;
use crate::graph::{GraphBall, UNREACHED};

pub const MAX_PATH_LENGTH: u32 = 12;
pub const MAX_LOOP_LENGTH: u32 = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinenessReport {
    pub from: String,
    pub to: String,
    pub length: u32,
    pub embedded_paths: u64,
}

/// Count simple paths of exactly `len` edges from `start` to `target`.
fn count_paths(x: &GraphBall, start: usize, target: usize, len: u32) -> u64 {
    let to_target = x.bfs(target);
    let mut on_path = vec![false; x.vertex_count()];
    fn go(x: &GraphBall, v: usize, target: usize, left: u32, to_target: &[u32], on_path: &mut [bool]) -> u64 {
        if left == 0 {
            return u64::from(v == target);
        }
        if v == target {
            return 0;
        }
        let mut total = 0;
        on_path[v] = true;
        for &w in x.neighbors(v) {
            let w = w as usize;
            let dt = to_target[w];
            if !on_path[w] && dt != UNREACHED && dt <= left - 1 {
                total += go(x, w, target, left - 1, to_target, on_path);
            }
        }
        on_path[v] = false;
        total
    }
    go(x, start, target, len, &to_target, &mut on_path)
}

/// Number of embedded paths of length n from u to v.
pub fn fineness_probe(x: &GraphBall, u: usize, v: usize, n: u32) -> Result<FinenessReport, AnalyzeError> {
    if n > MAX_PATH_LENGTH {
        return Err(AnalyzeError::LengthTooLarge { length: n, limit: MAX_PATH_LENGTH });
    }
    check_vertex(x, u)?;
    check_vertex(x, v)?;
    let count = if u == v { u64::from(n == 0) } else { count_paths(x, u, v, n) };
    Ok(FinenessReport { from: x.label(u).to_string(), to: x.label(v).to_string(), length: n, embedded_paths: count })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopCensus {
    pub edge: (String, String),
    pub max_length: u32,
    /// counts[l] = number of simple loops of length l through the edge (index 0..=max_length).
    pub counts: Vec<u64>,
}

/// Simple loops of each length <= L through the edge (a, b): simple paths b -> a of
/// length l - 1 that avoid the edge itself.
pub fn loop_census(x: &GraphBall, a: usize, b: usize, max_len: u32) -> Result<LoopCensus, AnalyzeError> {
    if max_len > MAX_LOOP_LENGTH {
        return Err(AnalyzeError::LengthTooLarge { length: max_len, limit: MAX_LOOP_LENGTH });
    }
    check_vertex(x, a)?;
    check_vertex(x, b)?;
    if !x.has_edge(a, b) {
        return Err(AnalyzeError::NotAnEdge(x.label(a).to_string(), x.label(b).to_string()));
    }
    let mut counts = vec![0u64; max_len as usize + 1];
    for l in 3..=max_len {
        counts[l as usize] = count_paths(x, b, a, l - 1);
    }
    Ok(LoopCensus { edge: (x.label(a).to_string(), x.label(b).to_string()), max_length: max_len, counts })
}

fn check_vertex(x: &GraphBall, v: usize) -> Result<(), AnalyzeError> {
    if v >= x.vertex_count() {
        return Err(AnalyzeError::UnknownVertex(v.to_string()));
    }
    Ok(())
}
