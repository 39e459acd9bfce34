//! Four-point hyperbolicity constant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AnalyzeError;
use crate::graph::{GraphBall, UNREACHED};

/// Largest graph scanned exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 400;
pub const DEFAULT_SAMPLES: u64 = 200_000;
pub const DEFAULT_SEED: u64 = 0x00de_17a4;
/// Above this many vertices, sampled quadruples are drawn from a random pool of vertices so
/// that only the pool's BFS rows are stored.
pub const FULL_MATRIX_LIMIT: usize = 6_000;
pub const POOL_SIZE: usize = 1_500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DeltaMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
    /// Exhaustive when small enough, otherwise sampled with the defaults.
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    /// max over quadruples of (largest - middle of the three pair sums) / 2
    pub delta4: f64,
    pub vertices: usize,
    pub radius: u32,
    pub quadruples: u64,
    pub exhaustive: bool,
    pub seed: Option<u64>,
    /// Vertices quadruples were drawn from, when smaller than the graph.
    pub pool: Option<usize>,
    /// A quadruple attaining delta4.
    pub witness: Option<[String; 4]>,
}

#[inline]
fn defect(a: u32, b: u32, c: u32) -> u32 {
    let hi = a.max(b).max(c);
    let lo = a.min(b).min(c);
    let mid = a + b + c - hi - lo;
    hi - mid
}

fn distance_rows(x: &GraphBall, sources: &[usize]) -> Vec<Vec<u16>> {
    sources
        .par_iter()
        .map(|&s| x.bfs(s).into_iter().map(|d| if d == UNREACHED { u16::MAX } else { d as u16 }).collect())
        .collect()
}

pub fn delta_hyperbolicity(x: &GraphBall, mode: DeltaMode) -> Result<DeltaReport, AnalyzeError> {
    let n = x.vertex_count();
    let mode = match mode {
        DeltaMode::Auto if n <= EXHAUSTIVE_LIMIT => DeltaMode::Exhaustive,
        DeltaMode::Auto => DeltaMode::Sampled { samples: DEFAULT_SAMPLES, seed: DEFAULT_SEED },
        m => m,
    };
    let radius = x.radius();
    match mode {
        DeltaMode::Exhaustive => {
            if n > EXHAUSTIVE_LIMIT {
                return Err(AnalyzeError::TooLargeForExhaustive { vertices: n, limit: EXHAUSTIVE_LIMIT });
            }
            let all: Vec<usize> = (0..n).collect();
            let d = distance_rows(x, &all);
            // per w: best (defect, x, y, z) over w < x < y < z
            let best = (0..n)
                .into_par_iter()
                .map(|w| {
                    let mut best = (0u32, [w, w, w, w]);
                    let dw = &d[w];
                    for xx in w + 1..n {
                        let dx = &d[xx];
                        let dwx = u32::from(dw[xx]);
                        for y in xx + 1..n {
                            let dy = &d[y];
                            let (dwy, dxy) = (u32::from(dw[y]), u32::from(dx[y]));
                            let mut local = 0u32;
                            for z in y + 1..n {
                                let s1 = dwx + u32::from(dy[z]);
                                let s2 = dwy + u32::from(dx[z]);
                                let s3 = dxy + u32::from(dw[z]);
                                local = local.max(defect(s1, s2, s3));
                            }
                            if local > best.0 {
                                let z = (y + 1..n)
                                    .find(|&z| {
                                        defect(dwx + u32::from(dy[z]), dwy + u32::from(dx[z]), dxy + u32::from(dw[z])) == local
                                    })
                                    .unwrap();
                                best = (local, [w, xx, y, z]);
                            }
                        }
                    }
                    best
                })
                .reduce(|| (0, [0; 4]), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1 && b.0 > 0) { b } else { a });
            let quads = if n >= 4 { (n as u64) * (n as u64 - 1) * (n as u64 - 2) * (n as u64 - 3) / 24 } else { 0 };
            Ok(DeltaReport {
                delta4: f64::from(best.0) / 2.0,
                vertices: n,
                radius,
                quadruples: quads,
                exhaustive: true,
                seed: None,
                pool: None,
                witness: (best.0 > 0).then(|| best.1.map(|v| x.label(v).to_string())),
            })
        }
        DeltaMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pool: Vec<usize> = if n <= FULL_MATRIX_LIMIT {
                (0..n).collect()
            } else {
                rand::seq::index::sample(&mut rng, n, POOL_SIZE).into_vec().into_iter().collect()
            };
            let rows = distance_rows(x, &pool);
            let p = pool.len();
            let mut best = (0u32, [0usize; 4]);
            for _ in 0..samples {
                let q: [usize; 4] = std::array::from_fn(|_| rng.gen_range(0..p));
                let dd = |i: usize, j: usize| u32::from(rows[q[i]][pool[q[j]]]);
                let v = defect(dd(0, 1) + dd(2, 3), dd(0, 2) + dd(1, 3), dd(0, 3) + dd(1, 2));
                if v > best.0 {
                    best = (v, q.map(|i| pool[i]));
                }
            }
            Ok(DeltaReport {
                delta4: f64::from(best.0) / 2.0,
                vertices: n,
                radius,
                quadruples: samples,
                exhaustive: false,
                seed: Some(seed),
                pool: (p < n).then_some(p),
                witness: (best.0 > 0).then(|| best.1.map(|v| x.label(v).to_string())),
            })
        }
        DeltaMode::Auto => unreachable!(),
    }
}
