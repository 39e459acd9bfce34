//! Finite balls of locally finite graphs.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

pub const UNREACHED: u32 = u32::MAX;

/// Default cap on the number of vertices a builder may create.
pub const DEFAULT_VERTEX_BUDGET: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("base vertex {0} out of range")]
    BadBase(usize),
    #[error("edge ({0}, {1}) refers to a missing vertex")]
    BadEdge(usize, usize),
    #[error("vertex '{0}' is not connected to the base")]
    Disconnected(String),
    #[error("vertex budget of {limit} exceeded")]
    BudgetExceeded { limit: usize },
    #[error("unknown vertex label '{0}'")]
    UnknownLabel(String),
    #[error("label '{0}' contains a tab or newline")]
    BadLabel(String),
    #[error("adjacency text line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Per-vertex annotation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tag {
    #[default]
    Plain,
    /// A coset gU of a Cayley-Abels graph.
    Coset,
    /// A coset vertex gH of a relative Cayley-Abels graph.
    Peripheral { family: u32, copy: u32 },
    /// The cone point over a peripheral copy.
    Cone { family: u32, copy: u32 },
    /// A horoball vertex above level 0.
    Horo { copy: u32, level: u32 },
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Tag::Plain => write!(f, "plain"),
            Tag::Coset => write!(f, "coset"),
            Tag::Peripheral { family, copy } => write!(f, "peripheral:{family}:{copy}"),
            Tag::Cone { family, copy } => write!(f, "cone:{family}:{copy}"),
            Tag::Horo { copy, level } => write!(f, "horo:{copy}:{level}"),
        }
    }
}

impl std::str::FromStr for Tag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<u32, String> {
            parts
                .get(i)
                .ok_or_else(|| format!("tag '{s}' is missing a field"))?
                .parse::<u32>()
                .map_err(|e| format!("tag '{s}': {e}"))
        };
        match parts[0] {
            "plain" => Ok(Tag::Plain),
            "coset" => Ok(Tag::Coset),
            "peripheral" => Ok(Tag::Peripheral { family: num(1)?, copy: num(2)? }),
            "cone" => Ok(Tag::Cone { family: num(1)?, copy: num(2)? }),
            "horo" => Ok(Tag::Horo { copy: num(1)?, level: num(2)? }),
            other => Err(format!("unknown tag '{other}'")),
        }
    }
}

/// A finite induced subgraph of a (possibly infinite) graph around a base vertex.
///
/// Vertices flagged as curtailed have neighbours in the ideal graph that are missing
/// here; every other vertex has its full neighbourhood. Edges between present vertices
/// are never missing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphBall {
    base: u32,
    labels: Vec<String>,
    offsets: Vec<u32>,
    neighbors: Vec<u32>,
    dist: Vec<u32>,
    tags: Vec<Tag>,
    curtailed: Vec<bool>,
}

impl GraphBall {
    /// Assemble a ball from an edge list. Loops and repeated edges are dropped.
    pub fn from_edges(
        labels: Vec<String>,
        edges: &[(u32, u32)],
        base: usize,
        tags: Vec<Tag>,
        curtailed: Vec<bool>,
    ) -> Result<Self, GraphError> {
        let n = labels.len();
        if base >= n {
            return Err(GraphError::BadBase(base));
        }
        assert_eq!(tags.len(), n, "one tag per vertex");
        assert_eq!(curtailed.len(), n, "one curtailment flag per vertex");
        let mut deg = vec![0u32; n];
        for &(a, b) in edges {
            if a as usize >= n || b as usize >= n {
                return Err(GraphError::BadEdge(a as usize, b as usize));
            }
            if a != b {
                deg[a as usize] += 1;
                deg[b as usize] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0u32);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill: Vec<u32> = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; *offsets.last().unwrap() as usize];
        for &(a, b) in edges {
            if a != b {
                neighbors[fill[a as usize] as usize] = b;
                fill[a as usize] += 1;
                neighbors[fill[b as usize] as usize] = a;
                fill[b as usize] += 1;
            }
        }
        // sort and dedupe each list, then compact
        let mut new_offsets = Vec::with_capacity(n + 1);
        new_offsets.push(0u32);
        let mut compact = Vec::with_capacity(neighbors.len());
        for v in 0..n {
            let s = &mut neighbors[offsets[v] as usize..offsets[v + 1] as usize];
            s.sort_unstable();
            let mut last = None;
            for &w in s.iter() {
                if Some(w) != last {
                    compact.push(w);
                    last = Some(w);
                }
            }
            new_offsets.push(compact.len() as u32);
        }
        let mut ball = GraphBall {
            base: base as u32,
            labels,
            offsets: new_offsets,
            neighbors: compact,
            dist: Vec::new(),
            tags,
            curtailed,
        };
        ball.dist = ball.bfs(base);
        if let Some(v) = ball.dist.iter().position(|&d| d == UNREACHED) {
            return Err(GraphError::Disconnected(ball.labels[v].clone()));
        }
        Ok(ball)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn base(&self) -> usize {
        self.base as usize
    }

    /// Largest BFS distance from the base.
    pub fn radius(&self) -> u32 {
        self.dist.iter().copied().max().unwrap_or(0)
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn tag(&self, v: usize) -> Tag {
        self.tags[v]
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn is_curtailed(&self, v: usize) -> bool {
        self.curtailed[v]
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn degree(&self, v: usize) -> usize {
        (self.offsets[v + 1] - self.offsets[v]) as usize
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Distance from the base, measured inside the ball.
    pub fn dist(&self, v: usize) -> u32 {
        self.dist[v]
    }

    pub fn distances(&self) -> &[u32] {
        &self.dist
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |v| {
            self.neighbors(v)
                .iter()
                .filter(move |&&w| (w as usize) > v)
                .map(move |&w| (v, w as usize))
        })
    }

    /// Smallest base distance of a curtailed vertex; `None` if nothing is curtailed.
    ///
    /// Every vertex of the ideal graph within this distance of the base is present, and
    /// distances from the base up to it are exact.
    pub fn complete_radius(&self) -> Option<u32> {
        (0..self.vertex_count())
            .filter(|&v| self.curtailed[v])
            .map(|v| self.dist[v])
            .min()
    }

    /// True if the ball contains the whole ideal ball of radius r, with exact distances.
    pub fn complete_through(&self, r: u32) -> bool {
        self.complete_radius().is_none_or(|c| r <= c)
    }

    pub fn is_finite_graph(&self) -> bool {
        self.complete_radius().is_none()
    }

    /// Vertices at exactly distance r from the base.
    pub fn sphere(&self, r: u32) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.dist[v] == r).collect()
    }

    pub fn find(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn label_index(&self) -> HashMap<&str, usize> {
        self.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect()
    }

    /// BFS distances from `src` inside the ball (`UNREACHED` if not connected).
    pub fn bfs(&self, src: usize) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src as u32);
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize] + 1;
            for &w in self.neighbors(v as usize) {
                if dist[w as usize] == UNREACHED {
                    dist[w as usize] = d;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_forest(&self) -> bool {
        // connected by construction
        self.edge_count() + 1 == self.vertex_count()
    }

    /// Pairwise distances are those of the ideal graph: nothing is curtailed, or the
    /// ball is a tree (geodesics between present vertices stay inside).
    pub fn has_exact_metric(&self) -> bool {
        self.is_finite_graph() || self.is_forest()
    }

    pub fn diameter(&self) -> u32 {
        (0..self.vertex_count()).map(|v| *self.bfs(v).iter().max().unwrap()).max().unwrap_or(0)
    }

    /// Same graph with a different base vertex.
    pub fn rebased(&self, base: usize) -> GraphBall {
        let mut b = self.clone();
        b.base = base as u32;
        b.dist = b.bfs(base);
        b
    }

    /// Induced subgraph on the vertices within distance r of the base.
    pub fn truncate(&self, r: u32) -> GraphBall {
        let keep: Vec<usize> = (0..self.vertex_count()).filter(|&v| self.dist[v] <= r).collect();
        let mut new_id = vec![u32::MAX; self.vertex_count()];
        for (i, &v) in keep.iter().enumerate() {
            new_id[v] = i as u32;
        }
        let edges: Vec<(u32, u32)> = self
            .edges()
            .filter(|&(a, b)| new_id[a] != u32::MAX && new_id[b] != u32::MAX)
            .map(|(a, b)| (new_id[a], new_id[b]))
            .collect();
        let curtailed = keep
            .iter()
            .map(|&v| self.curtailed[v] || self.neighbors(v).iter().any(|&w| new_id[w as usize] == u32::MAX))
            .collect();
        GraphBall::from_edges(
            keep.iter().map(|&v| self.labels[v].clone()).collect(),
            &edges,
            new_id[self.base as usize] as usize,
            keep.iter().map(|&v| self.tags[v]).collect(),
            curtailed,
        )
        .expect("truncation of a connected ball around its base is connected")
    }

    /// Compact text form: a header line, then one line per vertex
    /// `label<TAB>tag<TAB>curtailed(0/1)<TAB>neighbour labels...`.
    pub fn to_adjacency_text(&self) -> Result<String, GraphError> {
        let mut out = String::new();
        out.push_str("# relhyp adjacency v1\n");
        for l in &self.labels {
            if l.contains('\t') || l.contains('\n') {
                return Err(GraphError::BadLabel(l.clone()));
            }
        }
        out.push_str(&format!("base\t{}\n", self.labels[self.base as usize]));
        for v in 0..self.vertex_count() {
            out.push_str(&self.labels[v]);
            out.push('\t');
            out.push_str(&self.tags[v].to_string());
            out.push('\t');
            out.push(if self.curtailed[v] { '1' } else { '0' });
            for &w in self.neighbors(v) {
                out.push('\t');
                out.push_str(&self.labels[w as usize]);
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_adjacency_text(text: &str) -> Result<GraphBall, GraphError> {
        let mut base_label = None;
        let mut rows: Vec<(String, Tag, bool, Vec<String>)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let err = |m: String| GraphError::Parse { line: i + 1, message: m };
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields[0] == "base" && base_label.is_none() && fields.len() == 2 {
                base_label = Some(fields[1].to_string());
                continue;
            }
            if fields.len() < 3 {
                return Err(err("expected label, tag and curtailment flag".into()));
            }
            let tag: Tag = fields[1].parse().map_err(err)?;
            let cut = match fields[2] {
                "0" => false,
                "1" => true,
                other => return Err(err(format!("bad curtailment flag '{other}'"))),
            };
            rows.push((fields[0].to_string(), tag, cut, fields[3..].iter().map(|s| s.to_string()).collect()));
        }
        let index: HashMap<&str, u32> = rows.iter().enumerate().map(|(i, r)| (r.0.as_str(), i as u32)).collect();
        let mut edges = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            for nb in &r.3 {
                let j = *index.get(nb.as_str()).ok_or_else(|| GraphError::UnknownLabel(nb.clone()))?;
                edges.push((i as u32, j));
            }
        }
        let base_label = base_label.ok_or(GraphError::Parse { line: 0, message: "missing base line".into() })?;
        let base = *index.get(base_label.as_str()).ok_or(GraphError::UnknownLabel(base_label.clone()))? as usize;
        GraphBall::from_edges(
            rows.iter().map(|r| r.0.clone()).collect(),
            &edges,
            base,
            rows.iter().map(|r| r.1).collect(),
            rows.iter().map(|r| r.2).collect(),
        )
    }

    /// Equal as labelled graphs (same labels, tags, base and edges), ignoring vertex order.
    pub fn same_labelled_graph(&self, other: &GraphBall) -> bool {
        if self.vertex_count() != other.vertex_count() || self.edge_count() != other.edge_count() {
            return false;
        }
        let idx = other.label_index();
        if idx.len() != other.vertex_count() {
            return false;
        }
        let map: Option<Vec<usize>> = self.labels.iter().map(|l| idx.get(l.as_str()).copied()).collect();
        let Some(map) = map else { return false };
        if map[self.base()] != other.base() {
            return false;
        }
        (0..self.vertex_count()).all(|v| {
            self.tags[v] == other.tags[map[v]]
                && self.curtailed[v] == other.curtailed[map[v]]
                && self.neighbors(v).iter().all(|&w| other.has_edge(map[v], map[w as usize]))
        })
    }
}

/// Result of a breadth-first ball construction: the ball and the key of every vertex.
pub struct BuiltBall<K> {
    pub ball: GraphBall,
    pub keys: Vec<K>,
}

/// Breadth-first ball of radius `radius` in a graph given by a neighbour rule.
///
/// Vertices at distance < radius are expanded fully; for vertices on the outer sphere only
/// edges to vertices already present are kept (so the ball is an induced subgraph) and the
/// vertex is flagged curtailed if it has further neighbours.
pub fn bfs_ball<K, N, L, T>(
    start: K,
    radius: u32,
    mut neighbors: N,
    label: L,
    tag: T,
    budget: usize,
) -> Result<BuiltBall<K>, GraphError>
where
    K: Clone + Eq + Hash,
    N: FnMut(&K) -> Vec<K>,
    L: Fn(&K) -> String,
    T: Fn(&K) -> Tag,
{
    let mut index: HashMap<K, u32> = HashMap::new();
    let mut keys = vec![start.clone()];
    let mut dist = vec![0u32];
    index.insert(start, 0);
    let mut edges = Vec::new();
    let mut curtailed = Vec::new();
    let mut head = 0usize;
    while head < keys.len() {
        let v = head;
        head += 1;
        let d = dist[v];
        let nbrs = neighbors(&keys[v]);
        let mut cut = false;
        for w in nbrs {
            match index.get(&w) {
                Some(&j) => {
                    if j as usize != v {
                        edges.push((v as u32, j));
                    }
                }
                None if d < radius => {
                    if keys.len() >= budget {
                        return Err(GraphError::BudgetExceeded { limit: budget });
                    }
                    let j = keys.len() as u32;
                    index.insert(w.clone(), j);
                    keys.push(w);
                    dist.push(d + 1);
                    edges.push((v as u32, j));
                }
                None => cut = true,
            }
        }
        curtailed.push(cut);
    }
    let labels = keys.iter().map(&label).collect();
    let tags = keys.iter().map(&tag).collect();
    let ball = GraphBall::from_edges(labels, &edges, 0, tags, curtailed)?;
    Ok(BuiltBall { ball, keys })
}
