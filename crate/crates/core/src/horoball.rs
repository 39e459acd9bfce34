//! Combinatorial horoballs and augmented balls.
//!
//! The horoball over a base graph has vertices (v, k) for 0 <= k <= D. Level 0 is a copy of
//! the base; at level k >= 1, (v,k) ~ (w,k) when 0 < d(v,w) <= 2^k; and (v,k) ~ (v,k+1).

use serde::{Deserialize, Serialize};

use crate::graph::{GraphBall, GraphError, Tag, UNREACHED};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HoroballError {
    #[error("base graph distances are not exact (curtailed base that is not a tree)")]
    CurtailedBase,
    #[error("peripheral copy {0} has no usable intrinsic metric")]
    CopyMetricMissing(usize),
    #[error("depth {depth} is below ceil(log2(diameter)) = {needed}")]
    DepthTooSmall { depth: u32, needed: u32 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// ceil(log2(x)) for x >= 1, and 0 for x = 0.
pub fn ceil_log2(x: u32) -> u32 {
    if x <= 1 {
        0
    } else {
        32 - (x - 1).leading_zeros()
    }
}

/// Default truncation depth for a base of the given diameter.
pub fn default_depth(diameter: u32) -> u32 {
    ceil_log2(diameter) + 2
}

#[derive(Clone, Debug)]
pub struct HoroballGraph {
    /// Vertex (v, k) has index k * base_size + v; level 0 carries the base labels.
    pub ball: GraphBall,
    pub depth: u32,
    pub base_size: usize,
    pub base_diameter: u32,
    pub base_max_degree: usize,
    base_dist: Vec<Vec<u32>>,
}

fn all_pairs(base: &GraphBall) -> Vec<Vec<u32>> {
    (0..base.vertex_count()).map(|v| base.bfs(v)).collect()
}

/// Horizontal pairs (v, w), v < w, at level k >= 1 (any level when `k == 0` means base edges).
fn level_pairs(base: &GraphBall, dist: &[Vec<u32>], k: u32) -> Vec<(u32, u32)> {
    let n = base.vertex_count();
    if k == 0 {
        return base.edges().map(|(a, b)| (a as u32, b as u32)).collect();
    }
    let reach = 1u64 << k.min(40);
    let mut out = Vec::new();
    for v in 0..n {
        for w in v + 1..n {
            let d = dist[v][w];
            if d != UNREACHED && d > 0 && u64::from(d) <= reach {
                out.push((v as u32, w as u32));
            }
        }
    }
    out
}

/// Horoball of depth D over `base`, with labels prefixed by `prefix` above level 0.
fn build(base: &GraphBall, depth: u32, copy: u32, prefix: &str) -> Result<HoroballGraph, HoroballError> {
    if !base.has_exact_metric() {
        return Err(HoroballError::CurtailedBase);
    }
    let n = base.vertex_count();
    let dist = all_pairs(base);
    let diameter = dist.iter().flat_map(|r| r.iter().copied()).max().unwrap_or(0);
    let curtailed_base: Vec<usize> = (0..n).filter(|&v| base.is_curtailed(v)).collect();
    let mut labels = Vec::with_capacity(n * (depth as usize + 1));
    let mut tags = Vec::with_capacity(labels.capacity());
    let mut curtailed = Vec::with_capacity(labels.capacity());
    let mut edges = Vec::new();
    for k in 0..=depth {
        let off = k * n as u32;
        for v in 0..n {
            if k == 0 {
                labels.push(base.label(v).to_string());
                tags.push(base.tag(v));
            } else {
                labels.push(format!("{prefix}{}@{k}", base.label(v)));
                tags.push(Tag::Horo { copy, level: k });
            }
            // a missing base vertex lies beyond a curtailed one, so (v,k) misses a
            // neighbour iff some curtailed base vertex is within 2^k - 1 of v
            let reach = if k == 0 { 0 } else { (1u64 << k.min(40)) - 1 };
            curtailed.push(curtailed_base.iter().any(|&c| u64::from(dist[v][c]) <= reach));
        }
        for (a, b) in level_pairs(base, &dist, k) {
            edges.push((off + a, off + b));
        }
        if k < depth {
            for v in 0..n as u32 {
                edges.push((off + v, off + n as u32 + v));
            }
        }
    }
    let ball = GraphBall::from_edges(labels, &edges, base.base(), tags, curtailed)?;
    let base_max_degree = (0..n).map(|v| base.degree(v)).max().unwrap_or(0);
    Ok(HoroballGraph { ball, depth, base_size: n, base_diameter: diameter, base_max_degree, base_dist: dist })
}

/// Horoball of depth D over a base with exact distances.
pub fn horoball(base: &GraphBall, depth: u32) -> Result<HoroballGraph, HoroballError> {
    build(base, depth, 0, "")
}

/// Degree bound at level k over a base of maximum degree `delta`: two vertical edges plus
/// the size of a radius-2^k ball in the delta-regular tree, less the centre.
pub fn degree_bound(delta: usize, level: u32) -> u64 {
    let radius = if level == 0 { 1 } else { 1u64 << level.min(40) };
    let delta = delta as u64;
    let mut total = 0u64;
    let mut shell = delta;
    for _ in 0..radius {
        total = total.saturating_add(shell);
        shell = shell.saturating_mul(delta.saturating_sub(1));
        if shell == 0 {
            break;
        }
    }
    total + 2
}

impl HoroballGraph {
    pub fn vertex(&self, v: usize, level: u32) -> usize {
        level as usize * self.base_size + v
    }

    pub fn level_of(&self, x: usize) -> u32 {
        (x / self.base_size) as u32
    }

    /// Every vertex respects `degree_bound` for its level.
    pub fn check_degree_bound(&self) -> bool {
        (0..self.ball.vertex_count())
            .all(|x| self.ball.degree(x) as u64 <= degree_bound(self.base_max_degree, self.level_of(x)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub base_distance: u32,
    pub pairs: usize,
    pub min_horoball_distance: u32,
    pub max_horoball_distance: u32,
}

/// Horoball distance against base distance for every pair of level-0 vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceProfile {
    /// (u, v, base distance, horoball distance) for u < v.
    pub pairs: Vec<(u32, u32, u32, u32)>,
    pub rows: Vec<ProfileRow>,
}

pub fn horoball_distance_profile(h: &HoroballGraph) -> Result<DistanceProfile, HoroballError> {
    let needed = ceil_log2(h.base_diameter);
    if h.depth < needed {
        return Err(HoroballError::DepthTooSmall { depth: h.depth, needed });
    }
    let n = h.base_size;
    let mut pairs = Vec::new();
    for u in 0..n {
        let dh = h.ball.bfs(u);
        for v in u + 1..n {
            pairs.push((u as u32, v as u32, h.base_dist[u][v], dh[v]));
        }
    }
    let mut rows: Vec<ProfileRow> = Vec::new();
    let mut sorted = pairs.clone();
    sorted.sort_by_key(|p| p.2);
    for &(_, _, d, dh) in &sorted {
        match rows.last_mut() {
            Some(r) if r.base_distance == d => {
                r.pairs += 1;
                r.min_horoball_distance = r.min_horoball_distance.min(dh);
                r.max_horoball_distance = r.max_horoball_distance.max(dh);
            }
            _ => rows.push(ProfileRow { base_distance: d, pairs: 1, min_horoball_distance: dh, max_horoball_distance: dh }),
        }
    }
    Ok(DistanceProfile { pairs, rows })
}

/// A peripheral copy inside a core ball together with its intrinsic graph.
#[derive(Clone, Debug)]
pub struct CopyWithMetric {
    /// Core vertex of each intrinsic vertex, in intrinsic order.
    pub members: Vec<u32>,
    pub intrinsic: Option<GraphBall>,
}

#[derive(Clone, Debug)]
pub struct AugmentedBall {
    pub ball: GraphBall,
    pub core_size: usize,
    pub depth: u32,
    /// Per copy: the ball index of (member i, level k) is `offsets[c] + (k-1) * |members| + i`.
    pub offsets: Vec<u32>,
    pub copy_sizes: Vec<u32>,
}

impl AugmentedBall {
    pub fn horo_vertex(&self, copy: usize, member: usize, level: u32) -> Option<usize> {
        if level == 0 || level > self.depth || member >= self.copy_sizes[copy] as usize {
            return None;
        }
        Some(self.offsets[copy] as usize + (level as usize - 1) * self.copy_sizes[copy] as usize + member)
    }
}

/// Attach a depth-D horoball to each copy along its members, using the copy's own metric.
/// The core keeps its indices; horoball vertices above level 0 follow, copy by copy.
pub fn augmented(core: &GraphBall, copies: &[CopyWithMetric], depth: u32) -> Result<AugmentedBall, HoroballError> {
    let mut labels = core.labels().to_vec();
    let mut tags = core.tags().to_vec();
    let mut curtailed: Vec<bool> = (0..core.vertex_count()).map(|v| core.is_curtailed(v)).collect();
    let mut edges: Vec<(u32, u32)> = core.edges().map(|(a, b)| (a as u32, b as u32)).collect();
    let mut offsets = Vec::with_capacity(copies.len());
    let mut copy_sizes = Vec::with_capacity(copies.len());
    for (c, copy) in copies.iter().enumerate() {
        let y = copy.intrinsic.as_ref().ok_or(HoroballError::CopyMetricMissing(c))?;
        if y.vertex_count() != copy.members.len() || copy.members.iter().any(|&m| m as usize >= core.vertex_count()) {
            return Err(HoroballError::CopyMetricMissing(c));
        }
        let h = build(y, depth, c as u32, &format!("h{c}:")).map_err(|e| match e {
            HoroballError::CurtailedBase => HoroballError::CopyMetricMissing(c),
            other => other,
        })?;
        let n = copy.members.len();
        let off = labels.len() as u32;
        offsets.push(off);
        copy_sizes.push(n as u32);
        // level-0 vertex i of the horoball is core vertex members[i]
        let map = |x: usize| -> u32 {
            if x < n {
                copy.members[x]
            } else {
                off + (x - n) as u32
            }
        };
        for x in n..h.ball.vertex_count() {
            labels.push(h.ball.label(x).to_string());
            tags.push(h.ball.tag(x));
            curtailed.push(h.ball.is_curtailed(x));
        }
        for (a, b) in h.ball.edges() {
            // level-0 edges of the copy are intrinsic; keep them too (simple-graph merge)
            edges.push((map(a), map(b)));
        }
    }
    let ball = GraphBall::from_edges(labels, &edges, core.base(), tags, curtailed)?;
    Ok(AugmentedBall { ball, core_size: core.vertex_count(), depth, offsets, copy_sizes })
}
