//! Explicit graph presets: regular trees, the square grid and regular {p,q} tessellations.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::graph::{bfs_ball, GraphBall, GraphError, Tag, UNREACHED};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExplicitGraphModel {
    /// Regular tree of degree d.
    Tree { degree: u32 },
    /// The square grid Z^2.
    Grid,
    /// Vertex graph of the regular tessellation by p-gons, q meeting at each vertex.
    Tessellation { p: u32, q: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExplicitError {
    #[error("tree degree must be at least 1")]
    BadDegree,
    #[error("{{{p},{q}}} is not an infinite tessellation: need p, q >= 3 and (p-2)(q-2) >= 4")]
    NotInfinite { p: u32, q: u32 },
    #[error("tessellation growth failed: {0}")]
    Growth(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl ExplicitGraphModel {
    pub fn name(&self) -> String {
        match self {
            ExplicitGraphModel::Tree { degree } => format!("T_{degree}"),
            ExplicitGraphModel::Grid => "grid".into(),
            ExplicitGraphModel::Tessellation { p, q } => format!("{{{p},{q}}}"),
        }
    }

    pub fn degree(&self) -> u32 {
        match *self {
            ExplicitGraphModel::Tree { degree } => degree,
            ExplicitGraphModel::Grid => 4,
            ExplicitGraphModel::Tessellation { q, .. } => q,
        }
    }

    pub fn validate(&self) -> Result<(), ExplicitError> {
        match *self {
            ExplicitGraphModel::Tree { degree } if degree == 0 => Err(ExplicitError::BadDegree),
            ExplicitGraphModel::Tessellation { p, q } if p < 3 || q < 3 || (p - 2) * (q - 2) < 4 => {
                Err(ExplicitError::NotInfinite { p, q })
            }
            _ => Ok(()),
        }
    }

    /// Ball of the given radius around the preset's base vertex.
    pub fn ball(&self, radius: u32, budget: usize) -> Result<GraphBall, ExplicitError> {
        self.validate()?;
        match *self {
            ExplicitGraphModel::Tree { degree } => Ok(tree_ball(degree, radius, budget)?),
            ExplicitGraphModel::Grid => Ok(grid_ball(radius, budget)?),
            ExplicitGraphModel::Tessellation { p, q } => {
                let mut t = Tessellation::new(p, q);
                t.grow_to(radius, budget)?;
                Ok(t.ball(radius)?)
            }
        }
    }
}

/// Tree vertices are paths from the root: the root is "o", children are appended as ".i".
pub fn tree_ball(degree: u32, radius: u32, budget: usize) -> Result<GraphBall, GraphError> {
    let nb = move |w: &Vec<u8>| -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        if !w.is_empty() {
            out.push(w[..w.len() - 1].to_vec());
        }
        let kids = if w.is_empty() { degree } else { degree - 1 };
        for i in 0..kids {
            let mut c = w.clone();
            c.push(i as u8);
            out.push(c);
        }
        out
    };
    let label = |w: &Vec<u8>| {
        let mut s = String::from("o");
        for &i in w {
            s.push('.');
            s.push_str(&i.to_string());
        }
        s
    };
    Ok(bfs_ball(Vec::new(), radius, nb, label, |_| Tag::Plain, budget)?.ball)
}

pub fn grid_ball(radius: u32, budget: usize) -> Result<GraphBall, GraphError> {
    let nb = |&(x, y): &(i64, i64)| vec![(x + 1, y), (x, y + 1), (x - 1, y), (x, y - 1)];
    let label = |&(x, y): &(i64, i64)| format!("({x},{y})");
    Ok(bfs_ball((0i64, 0i64), radius, nb, label, |_| Tag::Plain, budget)?.ball)
}

/// A path on n vertices 0..n-1 based at 0 (a finite graph, nothing curtailed).
pub fn path_graph(n: usize) -> GraphBall {
    let edges: Vec<(u32, u32)> = (1..n).map(|i| (i as u32 - 1, i as u32)).collect();
    GraphBall::from_edges((0..n).map(|i| i.to_string()).collect(), &edges, 0, vec![Tag::Plain; n], vec![false; n])
        .expect("paths are connected")
}

/// The cycle on n vertices based at 0.
pub fn cycle_graph(n: usize) -> GraphBall {
    let edges: Vec<(u32, u32)> = (0..n).map(|i| (i as u32, ((i + 1) % n) as u32)).collect();
    GraphBall::from_edges((0..n).map(|i| i.to_string()).collect(), &edges, 0, vec![Tag::Plain; n], vec![false; n])
        .expect("cycles are connected")
}

const NONE: u32 = u32::MAX;

/// Growing planar disk of a {p,q} tessellation.
///
/// The disk is a union of faces whose boundary is a cycle (prev/next). `left[v]` counts
/// the faces still missing at v; a vertex is complete when it reaches 0. Faces are added
/// one at a time in the outside wedge of a boundary vertex, adjacent to its `next` edge.
pub struct Tessellation {
    p: u32,
    q: u32,
    adj: Vec<u32>,
    deg: Vec<u8>,
    left: Vec<u8>,
    prev: Vec<u32>,
    next: Vec<u32>,
}

impl Tessellation {
    /// Start from a single face; vertex 0 is the base.
    pub fn new(p: u32, q: u32) -> Self {
        let mut t = Tessellation {
            p,
            q,
            adj: Vec::new(),
            deg: Vec::new(),
            left: Vec::new(),
            prev: Vec::new(),
            next: Vec::new(),
        };
        for _ in 0..p {
            t.new_vertex((q - 1) as u8);
        }
        for i in 0..p {
            let j = (i + 1) % p;
            t.add_edge(i, j);
            t.next[i as usize] = j;
            t.prev[j as usize] = i;
        }
        t
    }

    pub fn vertex_count(&self) -> usize {
        self.deg.len()
    }

    fn new_vertex(&mut self, left: u8) -> u32 {
        let id = self.deg.len() as u32;
        self.adj.extend(std::iter::repeat_n(NONE, self.q as usize));
        self.deg.push(0);
        self.left.push(left);
        self.prev.push(NONE);
        self.next.push(NONE);
        id
    }

    fn nbrs(&self, v: u32) -> &[u32] {
        let s = v as usize * self.q as usize;
        &self.adj[s..s + self.deg[v as usize] as usize]
    }

    fn add_edge(&mut self, a: u32, b: u32) {
        if self.nbrs(a).contains(&b) {
            return;
        }
        for (x, y) in [(a, b), (b, a)] {
            let d = self.deg[x as usize] as usize;
            assert!(d < self.q as usize, "degree exceeds q at vertex {x}");
            self.adj[x as usize * self.q as usize + d] = y;
            self.deg[x as usize] += 1;
        }
    }

    /// Add one face in the outside wedge at v, adjacent to the edge (v, next[v]).
    fn add_face(&mut self, v: u32) -> Result<(), ExplicitError> {
        let p = self.p as usize;
        let mut run_f = vec![self.next[v as usize]];
        while self.left[*run_f.last().unwrap() as usize] == 1 {
            let u = self.next[*run_f.last().unwrap() as usize];
            if u == v || run_f.len() > p {
                return Err(ExplicitError::Growth(format!("forward run wraps at vertex {v}")));
            }
            run_f.push(u);
        }
        let closing = self.left[v as usize] == 1;
        let mut run_b = Vec::new();
        if closing {
            run_b.push(self.prev[v as usize]);
            while self.left[*run_b.last().unwrap() as usize] == 1 {
                let u = self.prev[*run_b.last().unwrap() as usize];
                if u == v || run_b.len() > p {
                    return Err(ExplicitError::Growth(format!("backward run wraps at vertex {v}")));
                }
                run_b.push(u);
            }
        }
        let existing = run_b.len() + 1 + run_f.len();
        if existing > p {
            return Err(ExplicitError::Growth(format!("face at vertex {v} needs {existing} > p corners")));
        }
        let t = p - existing;
        let f_end = *run_f.last().unwrap();
        let start = if closing { *run_b.last().unwrap() } else { v };
        if start == f_end {
            return Err(ExplicitError::Growth("boundary closed up".into()));
        }
        // chain f_end -> x_1 -> ... -> x_t -> start
        let mut chain = Vec::with_capacity(t);
        let mut last = f_end;
        for _ in 0..t {
            let x = self.new_vertex((self.q - 1) as u8);
            self.add_edge(last, x);
            chain.push(x);
            last = x;
        }
        self.add_edge(last, start);
        // face counts
        self.left[v as usize] -= 1;
        for &u in &run_f {
            self.left[u as usize] -= 1;
        }
        for &u in &run_b {
            self.left[u as usize] -= 1;
        }
        // splice the boundary: start -> x_t -> ... -> x_1 -> f_end
        let mut cur = start;
        for &x in chain.iter().rev() {
            self.next[cur as usize] = x;
            self.prev[x as usize] = cur;
            cur = x;
        }
        self.next[cur as usize] = f_end;
        self.prev[f_end as usize] = cur;
        for &u in run_f[..run_f.len() - 1].iter().chain(run_b.iter().take(run_b.len().saturating_sub(1))) {
            self.prev[u as usize] = NONE;
            self.next[u as usize] = NONE;
        }
        if closing {
            self.prev[v as usize] = NONE;
            self.next[v as usize] = NONE;
        }
        Ok(())
    }

    fn complete(&mut self, v: u32) -> Result<(), ExplicitError> {
        while self.left[v as usize] > 0 {
            self.add_face(v)?;
        }
        if self.deg[v as usize] as u32 != self.q {
            return Err(ExplicitError::Growth(format!("vertex {v} completed with degree {}", self.deg[v as usize])));
        }
        Ok(())
    }

    fn bfs(&self) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.vertex_count()];
        dist[0] = 0;
        let mut queue = VecDeque::from([0u32]);
        while let Some(v) = queue.pop_front() {
            for &w in self.nbrs(v) {
                if dist[w as usize] == UNREACHED {
                    dist[w as usize] = dist[v as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Complete every vertex within distance r of the base.
    pub fn grow_to(&mut self, r: u32, budget: usize) -> Result<(), ExplicitError> {
        loop {
            let dist = self.bfs();
            let mut todo: Vec<u32> = (0..self.vertex_count() as u32)
                .filter(|&v| self.left[v as usize] > 0 && dist[v as usize] <= r)
                .collect();
            if todo.is_empty() {
                return Ok(());
            }
            todo.sort_by_key(|&v| (dist[v as usize], v));
            for v in todo {
                self.complete(v)?;
                if self.vertex_count() > budget {
                    return Err(GraphError::BudgetExceeded { limit: budget }.into());
                }
            }
        }
    }

    /// Induced ball of radius r; requires `grow_to(r)` first.
    pub fn ball(&self, r: u32) -> Result<GraphBall, ExplicitError> {
        let dist = self.bfs();
        let keep: Vec<u32> = (0..self.vertex_count() as u32).filter(|&v| dist[v as usize] <= r).collect();
        if keep.iter().any(|&v| self.left[v as usize] > 0) {
            return Err(ExplicitError::Growth(format!("ball of radius {r} requested before growing it")));
        }
        let mut id = vec![NONE; self.vertex_count()];
        for (i, &v) in keep.iter().enumerate() {
            id[v as usize] = i as u32;
        }
        let mut edges = Vec::new();
        let mut curtailed = Vec::with_capacity(keep.len());
        for &v in &keep {
            let mut cut = false;
            for &w in self.nbrs(v) {
                if id[w as usize] == NONE {
                    cut = true;
                } else if w > v {
                    edges.push((id[v as usize], id[w as usize]));
                }
            }
            curtailed.push(cut);
        }
        let labels = keep.iter().map(|v| format!("v{v}")).collect();
        Ok(GraphBall::from_edges(labels, &edges, 0, vec![Tag::Plain; keep.len()], curtailed)?)
    }
}
