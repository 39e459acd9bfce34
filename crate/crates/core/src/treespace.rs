//! Bass-Serre trees and trees of spaces.
//!
//! A tree of spaces is stored structurally: one template per vertex type (a ball of the
//! vertex space around its base, with attachment slots), and one record per copy of a
//! template, i.e. per vertex of the Bass-Serre tree. A slot (local vertex, oriented edge,
//! coset label) says where the lift edge for one tree edge leaves the copy; the child copy
//! is always entered at its own base. Lift edges are therefore bridges, and the distance
//! from the global base to a local vertex x of copy S is `base_dist(S) + d_loc(x)`.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::cayley::CayleyAbels;
use crate::explicit::ExplicitGraphModel;
use crate::graph::{GraphBall, GraphError, Tag};
use crate::horoball::{augmented, CopyWithMetric, HoroballError};
use crate::model::{GraphOfGroups, ModelError, NormalForm, OrientedEdge, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeSpaceError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Horoball(#[from] HoroballError),
    #[error(transparent)]
    Cayley(#[from] crate::cayley::CayleyError),
    #[error(transparent)]
    Explicit(#[from] crate::explicit::ExplicitError),
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("monomorphism mismatch: {0}")]
    MonomorphismMismatch(String),
    #[error("edge groups are not isomorphic: {0}")]
    NotIsomorphic(String),
    #[error("trivial amalgam: {0}")]
    TrivialAmalgam(String),
    #[error("radius too small: {0}")]
    RadiusTooSmall(String),
    #[error("copy budget of {0} exceeded")]
    BudgetExceeded(usize),
}

/// The underlying graph of a tree of spaces: vertex types and edges between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub vertices: Vec<String>,
    /// (name, from, to)
    pub edges: Vec<(String, usize, usize)>,
}

impl Shape {
    pub fn from_gog(g: &GraphOfGroups) -> Self {
        Shape {
            vertices: g.vertices().iter().map(|v| v.name.clone()).collect(),
            edges: g.edges().iter().map(|e| (e.name.clone(), e.from, e.to)).collect(),
        }
    }

    /// Two vertex types A, B joined by one edge e.
    pub fn amalgam() -> Self {
        Shape { vertices: vec!["A".into(), "B".into()], edges: vec![("e".into(), 0, 1)] }
    }

    /// One vertex type A with a loop t.
    pub fn hnn() -> Self {
        Shape { vertices: vec!["A".into()], edges: vec![("t".into(), 0, 0)] }
    }

    pub fn single() -> Self {
        Shape { vertices: vec!["A".into()], edges: vec![] }
    }

    pub fn origin(&self, oe: OrientedEdge) -> usize {
        let (_, a, b) = &self.edges[oe.edge as usize];
        if oe.reversed {
            *b
        } else {
            *a
        }
    }

    pub fn terminus(&self, oe: OrientedEdge) -> usize {
        self.origin(oe.rev())
    }

    /// Oriented edges starting at v, in index order.
    pub fn edges_at(&self, v: usize) -> Vec<OrientedEdge> {
        let mut out = Vec::new();
        for e in 0..self.edges.len() {
            for oe in [OrientedEdge::forward(e), OrientedEdge::forward(e).rev()] {
                if self.origin(oe) == v && !out.contains(&oe) {
                    out.push(oe);
                }
            }
        }
        out
    }

    pub fn edge_name(&self, oe: OrientedEdge) -> String {
        let name = &self.edges[oe.edge as usize].0;
        if oe.reversed {
            format!("{name}^-1")
        } else {
            name.clone()
        }
    }
}

/// Where one tree edge leaves a copy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub local: u32,
    pub edge: OrientedEdge,
    /// Label of the transversal element (or local vertex) of this tree edge.
    pub label: String,
    /// The slot of the identity coset: children entered along `edge.rev()` use it as their
    /// way back to the parent.
    pub identity: bool,
}

/// A vertex space: a ball around its base, with attachment slots sorted by local distance.
#[derive(Clone, Debug)]
pub struct SpaceTemplate {
    pub name: String,
    pub ball: GraphBall,
    pub slots: Vec<Slot>,
    /// The ball truncates an infinite space (its limit set is nonempty).
    pub infinite: bool,
    /// Local vertices in order of distance from the base; `within[d]` counts those at
    /// distance <= d.
    order: Vec<u32>,
    within: Vec<u32>,
    /// Slot indices at each local vertex.
    slots_at: Vec<Vec<u32>>,
    complete_radius: Option<u32>,
}

impl SpaceTemplate {
    pub fn new(name: &str, ball: GraphBall, mut slots: Vec<Slot>, infinite: bool) -> Self {
        let dist = ball.distances().to_vec();
        slots.sort_by_key(|s| (dist[s.local as usize], s.local, s.edge, !s.identity));
        let mut order: Vec<u32> = (0..ball.vertex_count() as u32).collect();
        order.sort_by_key(|&v| (dist[v as usize], v));
        let radius = ball.radius();
        let mut within = vec![0u32; radius as usize + 1];
        for &d in &dist {
            within[d as usize] += 1;
        }
        for d in 1..within.len() {
            within[d] += within[d - 1];
        }
        let mut slots_at = vec![Vec::new(); ball.vertex_count()];
        for (i, s) in slots.iter().enumerate() {
            slots_at[s.local as usize].push(i as u32);
        }
        let complete_radius = ball.complete_radius();
        SpaceTemplate { name: name.to_string(), ball, slots, infinite, order, within, slots_at, complete_radius }
    }

    /// A one-point space with the given slots (edge, labels): the Bass-Serre tree itself.
    pub fn point(name: &str, slots: Vec<(OrientedEdge, Vec<(String, bool)>)>) -> Self {
        let ball = GraphBall::from_edges(vec![name.to_string()], &[], 0, vec![Tag::Plain], vec![false])
            .expect("a point is a graph");
        let slots = slots
            .into_iter()
            .flat_map(|(edge, labels)| labels.into_iter().map(move |(label, identity)| Slot { local: 0, edge, label, identity }))
            .collect();
        Self::new(name, ball, slots, false)
    }

    /// Every local vertex is an attachment point for each listed edge; the base is the
    /// identity slot. Used for explicit vertex spaces, where the edge group is a point
    /// stabilizer and the cosets are the vertices themselves.
    pub fn from_ball(name: &str, ball: GraphBall, edges: &[OrientedEdge], infinite: bool) -> Self {
        let base = ball.base() as u32;
        let slots = edges
            .iter()
            .flat_map(|&edge| {
                let ball = &ball;
                (0..ball.vertex_count() as u32).map(move |v| Slot {
                    local: v,
                    edge,
                    label: ball.label(v as usize).to_string(),
                    identity: v == base,
                })
            })
            .collect();
        Self::new(name, ball, slots, infinite)
    }

    /// Cayley-Abels graph of the finite vertex group at `v` with respect to U (elements of
    /// G_v) and S (elements of G_v). The slot of the tree edge r*e (r a transversal
    /// representative of G_v / image of G_e) is the local coset rU.
    pub fn cayley(g: &GraphOfGroups, v: usize, u: &[usize], s: &[usize], radius: u32) -> Result<Self, TreeSpaceError> {
        let grp = g.vertex_group(v).clone();
        let name = g.vertices()[v].name.clone();
        let local = GraphOfGroups::single(&name, grp.clone());
        let words: Vec<Word> = s.iter().map(|&x| Word::vertex(0, x)).collect();
        let ca = CayleyAbels::new(&local, u, &words)?;
        let built = ca.ball(radius, crate::graph::DEFAULT_VERTEX_BUDGET)?;
        let index: HashMap<NormalForm, u32> = built.keys.iter().enumerate().map(|(i, k)| (k.clone(), i as u32)).collect();
        let mut slots = Vec::new();
        for oe in g.edges_at(v) {
            for &r in g.edge_transversal(oe) {
                let key = ca.coset(&NormalForm::identity(&local, 0).with_tail(r));
                let Some(&lv) = index.get(&key) else {
                    return Err(TreeSpaceError::RadiusTooSmall(format!(
                        "space radius {radius} does not reach the coset of {} in {name}",
                        grp.name_of(r)
                    )));
                };
                let label = if r == grp.identity() { "1".to_string() } else { format!("{name}:{}", grp.name_of(r)) };
                slots.push(Slot { local: lv, edge: oe, label, identity: r == grp.identity() });
            }
        }
        let infinite = !built.ball.is_finite_graph();
        Ok(Self::new(&name, built.ball, slots, infinite))
    }

    pub fn vertex_count(&self) -> usize {
        self.ball.vertex_count()
    }

    pub fn radius(&self) -> u32 {
        self.within.len() as u32 - 1
    }

    /// Local vertices within distance d of the base (all of them if d exceeds the radius).
    pub fn count_within(&self, d: u32) -> u32 {
        self.within[(d as usize).min(self.within.len() - 1)]
    }

    pub fn vertices_within(&self, d: u32) -> &[u32] {
        &self.order[..self.count_within(d) as usize]
    }

    pub fn slots_at(&self, v: usize) -> &[u32] {
        &self.slots_at[v]
    }

    pub fn local_dist(&self, v: usize) -> u32 {
        self.ball.dist(v)
    }

    /// Whether the ball holds the whole space up to local radius d.
    pub fn complete_through(&self, d: u32) -> bool {
        self.complete_radius.is_none_or(|c| d <= c)
    }
}

pub const NO_PARENT: u32 = u32::MAX;

/// One copy of a template: a vertex of the Bass-Serre tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyRecord {
    pub template: u32,
    pub parent: u32,
    /// Slot of the parent's template that this copy hangs from.
    pub via_slot: u32,
    pub depth: u32,
    /// Global distance from the root base to this copy's base.
    pub base_dist: u32,
}

#[derive(Clone, Debug)]
pub struct TreeOfSpacesBall {
    pub shape: Shape,
    pub templates: Vec<SpaceTemplate>,
    pub copies: Vec<CopyRecord>,
    /// children of copy i are copies child_start[i]..child_start[i+1]
    child_start: Vec<u32>,
    pub tree_radius: u32,
    /// Global metric cap: only the part of the assembled space within this distance of the
    /// base. `None` keeps every template ball whole (product of tree ball and space balls).
    pub radius: Option<u32>,
}

/// The assembled graph of a tree of spaces.
#[derive(Clone, Debug)]
pub struct Assembled {
    pub ball: GraphBall,
    /// Copy (tree vertex) of every vertex.
    pub projection: Vec<u32>,
    /// Local template vertex of every vertex.
    pub local: Vec<u32>,
    /// Lift edges, one per non-root copy.
    pub lift_edges: Vec<(u32, u32)>,
}

impl TreeOfSpacesBall {
    /// Enumerate copies breadth-first out to `tree_radius`, and (if `radius` is set) only
    /// those whose base lies within `radius` of the root base.
    pub fn build(
        shape: Shape,
        templates: Vec<SpaceTemplate>,
        root: usize,
        tree_radius: u32,
        radius: Option<u32>,
        budget: usize,
    ) -> Result<Self, TreeSpaceError> {
        if templates.len() != shape.vertices.len() {
            return Err(TreeSpaceError::UnsupportedShape("one template per vertex type is required".into()));
        }
        let mut copies = vec![CopyRecord { template: root as u32, parent: NO_PARENT, via_slot: 0, depth: 0, base_dist: 0 }];
        let mut child_start = Vec::new();
        let mut head = 0usize;
        while head < copies.len() {
            let c = copies[head];
            child_start.push(copies.len() as u32);
            head += 1;
            if c.depth >= tree_radius {
                continue;
            }
            let t = &templates[c.template as usize];
            let entry = (c.parent != NO_PARENT).then(|| templates[copies[c.parent as usize].template as usize].slots[c.via_slot as usize].edge);
            for (si, s) in t.slots.iter().enumerate() {
                if entry.is_some_and(|e| s.identity && s.edge == e.rev()) {
                    continue;
                }
                let b = c.base_dist + t.local_dist(s.local as usize) + 1;
                if radius.is_some_and(|r| b > r) {
                    break; // slots are sorted by local distance
                }
                if copies.len() >= budget {
                    return Err(TreeSpaceError::BudgetExceeded(budget));
                }
                copies.push(CopyRecord {
                    template: shape.terminus(s.edge) as u32,
                    parent: (head - 1) as u32,
                    via_slot: si as u32,
                    depth: c.depth + 1,
                    base_dist: b,
                });
            }
        }
        child_start.push(copies.len() as u32);
        Ok(TreeOfSpacesBall { shape, templates, copies, child_start, tree_radius, radius })
    }

    pub fn copy_count(&self) -> usize {
        self.copies.len()
    }

    pub fn children(&self, c: usize) -> std::ops::Range<usize> {
        self.child_start[c] as usize..self.child_start[c + 1] as usize
    }

    pub fn template_of(&self, c: usize) -> &SpaceTemplate {
        &self.templates[self.copies[c].template as usize]
    }

    /// Oriented edge along which copy c was entered.
    pub fn entry_edge(&self, c: usize) -> Option<OrientedEdge> {
        let rec = self.copies[c];
        (rec.parent != NO_PARENT).then(|| self.template_of(rec.parent as usize).slots[rec.via_slot as usize].edge)
    }

    /// Whether slot `si` of copy c is its way back to the parent.
    pub fn is_parent_slot(&self, c: usize, si: usize) -> bool {
        let s = &self.template_of(c).slots[si];
        self.entry_edge(c).is_some_and(|e| s.identity && s.edge == e.rev())
    }

    /// Local radius kept in copy c.
    pub fn local_limit(&self, c: usize) -> u32 {
        match self.radius {
            Some(r) => r.saturating_sub(self.copies[c].base_dist).min(self.template_of(c).radius()),
            None => self.template_of(c).radius(),
        }
    }

    /// Whether copy c's template ball covers its part of the capped global ball.
    pub fn copy_complete(&self, c: usize) -> bool {
        match self.radius {
            Some(r) => self.template_of(c).complete_through(r - self.copies[c].base_dist),
            None => true,
        }
    }

    /// The capped global ball is the true ball of the assembled space: every template is
    /// deep enough and the tree radius reaches every copy whose base is within the cap.
    pub fn is_exact_ball(&self) -> bool {
        let Some(r) = self.radius else { return false };
        (0..self.copies.len()).all(|c| self.copy_complete(c)) && self.tree_complete_through(r)
    }

    /// Every copy whose base lies within distance r of the root base was built.
    pub fn tree_complete_through(&self, r: u32) -> bool {
        (0..self.copies.len()).all(|c| {
            let rec = self.copies[c];
            if rec.depth < self.tree_radius || rec.base_dist > r {
                return true;
            }
            let t = self.template_of(c);
            (0..t.slots.len()).all(|si| {
                self.is_parent_slot(c, si) || rec.base_dist + t.local_dist(t.slots[si].local as usize) + 1 > r
            })
        })
    }

    pub fn vertex_count(&self) -> u64 {
        (0..self.copies.len()).map(|c| u64::from(self.template_of(c).count_within(self.local_limit(c)))).sum()
    }

    /// Label of a copy: the path of slot labels and edges from the root, then the type.
    pub fn copy_label(&self, c: usize) -> String {
        let mut parts = Vec::new();
        let mut cur = c;
        while self.copies[cur].parent != NO_PARENT {
            let rec = self.copies[cur];
            let s = &self.template_of(rec.parent as usize).slots[rec.via_slot as usize];
            parts.push(format!("{} {}", s.label, self.shape.edge_name(s.edge)));
            cur = rec.parent as usize;
        }
        parts.reverse();
        parts.push(self.template_of(c).name.clone());
        parts.join(" ")
    }

    /// Label of the tree edge above copy c (the coset of the edge group).
    pub fn tree_edge_label(&self, c: usize) -> Option<String> {
        let rec = self.copies[c];
        if rec.parent == NO_PARENT {
            return None;
        }
        let s = &self.template_of(rec.parent as usize).slots[rec.via_slot as usize];
        let prefix = self.copy_label(rec.parent as usize);
        Some(format!("{prefix} | {} {}", s.label, self.shape.edge_name(s.edge)))
    }

    /// The Bass-Serre tree ball spanned by the copies.
    pub fn tree(&self) -> Result<BassSerreBall, TreeSpaceError> {
        let n = self.copies.len();
        let labels = (0..n).map(|c| self.copy_label(c)).collect();
        let edges: Vec<(u32, u32)> = (1..n).map(|c| (self.copies[c].parent, c as u32)).collect();
        let curtailed = (0..n).map(|c| self.copies[c].depth == self.tree_radius && self.has_unused_slot(c)).collect();
        let ball = GraphBall::from_edges(labels, &edges, 0, vec![Tag::Plain; n], curtailed)?;
        let edge_labels = (1..n).map(|c| self.tree_edge_label(c).unwrap()).collect();
        let vertex_type = self.copies.iter().map(|r| r.template).collect();
        Ok(BassSerreBall { ball, edges, edge_labels, vertex_type })
    }

    fn has_unused_slot(&self, c: usize) -> bool {
        let t = self.template_of(c);
        let used = self.children(c).len();
        let total = t.slots.len() - usize::from(self.copies[c].parent != NO_PARENT);
        used < total
    }

    /// Materialize the assembled graph (vertex budget applies).
    pub fn to_graph(&self, budget: usize) -> Result<Assembled, TreeSpaceError> {
        let total = self.vertex_count();
        if total > budget as u64 {
            return Err(GraphError::BudgetExceeded { limit: budget }.into());
        }
        let n = total as usize;
        let mut offset = Vec::with_capacity(self.copies.len());
        let mut acc = 0u32;
        for c in 0..self.copies.len() {
            offset.push(acc);
            acc += self.template_of(c).count_within(self.local_limit(c));
        }
        // local -> position in the template's distance order
        let ranks: Vec<Vec<u32>> = self
            .templates
            .iter()
            .map(|t| {
                let mut r = vec![0u32; t.vertex_count()];
                for (i, &v) in t.order.iter().enumerate() {
                    r[v as usize] = i as u32;
                }
                r
            })
            .collect();
        let mut labels = Vec::with_capacity(n);
        let mut tags = Vec::with_capacity(n);
        let mut curtailed = Vec::with_capacity(n);
        let mut projection = Vec::with_capacity(n);
        let mut local = Vec::with_capacity(n);
        let mut edges = Vec::new();
        let mut lift_edges = Vec::new();
        // slot usage, to flag vertices whose children were not built
        let mut used: Vec<Vec<bool>> = Vec::with_capacity(self.copies.len());
        for c in 0..self.copies.len() {
            let mut u = vec![false; self.template_of(c).slots.len()];
            for ch in self.children(c) {
                u[self.copies[ch].via_slot as usize] = true;
            }
            used.push(u);
        }
        for c in 0..self.copies.len() {
            let t = self.template_of(c);
            let lim = self.local_limit(c);
            let kept = t.vertices_within(lim);
            let clabel = self.copy_label(c);
            let rk = &ranks[self.copies[c].template as usize];
            for &v in kept {
                let v = v as usize;
                labels.push(format!("{clabel} / {}", t.ball.label(v)));
                tags.push(t.ball.tag(v));
                projection.push(c as u32);
                local.push(v as u32);
                let mut cut = t.ball.is_curtailed(v);
                for &w in t.ball.neighbors(v) {
                    if t.local_dist(w as usize) > lim {
                        cut = true;
                    } else if (w as usize) > v {
                        edges.push((offset[c] + rk[v], offset[c] + rk[w as usize]));
                    }
                }
                for &si in t.slots_at(v) {
                    if !used[c][si as usize] && !self.is_parent_slot(c, si as usize) {
                        cut = true;
                    }
                }
                curtailed.push(cut);
            }
            let rec = self.copies[c];
            if rec.parent != NO_PARENT {
                let p = rec.parent as usize;
                let pt = self.template_of(p);
                let a = pt.slots[rec.via_slot as usize].local as usize;
                let base = t.ball.base();
                let e = (offset[p] + ranks[self.copies[p].template as usize][a], offset[c] + rk[base]);
                edges.push(e);
                lift_edges.push(e);
            }
        }
        let ball = GraphBall::from_edges(labels, &edges, 0, tags, curtailed)?;
        Ok(Assembled { ball, projection, local, lift_edges })
    }

    /// Replace every template by its augmented ball (horoballs over its peripheral copies).
    /// Slots stay on the core vertices, whose indices are unchanged.
    pub fn augmented(&self, peripherals: &[Vec<CopyWithMetric>], depth: u32) -> Result<Self, TreeSpaceError> {
        let mut templates = Vec::with_capacity(self.templates.len());
        for (i, t) in self.templates.iter().enumerate() {
            let copies = peripherals.get(i).map(|v| v.as_slice()).unwrap_or(&[]);
            if copies.is_empty() {
                templates.push(t.clone());
                continue;
            }
            let aug = augmented(&t.ball, copies, depth)?;
            templates.push(SpaceTemplate::new(&t.name, aug.ball, t.slots.clone(), t.infinite));
        }
        let root = self.copies[0].template as usize;
        Self::build(self.shape.clone(), templates, root, self.tree_radius, self.radius, usize::MAX)
    }
}

impl Assembled {
    /// Adjacent vertices project to equal or adjacent copies.
    pub fn projection_is_lipschitz(&self, t: &TreeOfSpacesBall) -> bool {
        self.ball.edges().all(|(a, b)| {
            let (p, q) = (self.projection[a] as usize, self.projection[b] as usize);
            p == q || t.copies[p].parent as usize == q || t.copies[q].parent as usize == p
        })
    }
}

/// A ball of the Bass-Serre tree: vertices are copies (cosets gG_v), edges carry the
/// coset of the edge group.
#[derive(Clone, Debug)]
pub struct BassSerreBall {
    pub ball: GraphBall,
    pub edges: Vec<(u32, u32)>,
    pub edge_labels: Vec<String>,
    pub vertex_type: Vec<u32>,
}

fn identity_flags(g: &GraphOfGroups, v: usize, reps: &[usize]) -> Vec<(String, bool)> {
    let grp = g.vertex_group(v);
    let name = &g.vertices()[v].name;
    reps.iter()
        .map(|&r| {
            let label = if r == grp.identity() { "1".to_string() } else { format!("{name}:{}", grp.name_of(r)) };
            (label, r == grp.identity())
        })
        .collect()
}

/// Tree of one-point spaces for a graph of groups: the Bass-Serre tree.
fn point_tree(g: &GraphOfGroups, tree_radius: u32, budget: usize) -> Result<TreeOfSpacesBall, TreeSpaceError> {
    let templates = (0..g.vertices().len())
        .map(|v| {
            let slots = g.edges_at(v).into_iter().map(|oe| (oe, identity_flags(g, v, g.edge_transversal(oe)))).collect();
            SpaceTemplate::point(&g.vertices()[v].name, slots)
        })
        .collect();
    TreeOfSpacesBall::build(Shape::from_gog(g), templates, 0, tree_radius, None, budget)
}

/// Ball of radius r around G_{v0} in the Bass-Serre tree of any finite graph of finite groups.
pub fn bass_serre_ball(g: &GraphOfGroups, r: u32) -> Result<BassSerreBall, TreeSpaceError> {
    point_tree(g, r, crate::graph::DEFAULT_VERTEX_BUDGET)?.tree()
}

/// How to build one vertex space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    /// Cayley-Abels graph of the finite vertex group. U defaults to the image of the first
    /// incident edge group, S to all elements outside U.
    Cayley { u: Option<Vec<usize>>, s: Option<Vec<usize>> },
    /// An explicit infinite graph; the edge group is a point stabilizer, so every vertex is
    /// an attachment point.
    Explicit { model: ExplicitGraphModel },
}

impl Default for SpaceSpec {
    fn default() -> Self {
        SpaceSpec::Cayley { u: None, s: None }
    }
}

fn cayley_template(g: &GraphOfGroups, v: usize, u: &Option<Vec<usize>>, s: &Option<Vec<usize>>, radius: u32) -> Result<SpaceTemplate, TreeSpaceError> {
    let grp = g.vertex_group(v);
    let u = match u {
        Some(u) => u.clone(),
        None => match g.edges_at(v).first() {
            Some(&oe) => g.edge_image(oe).elements().to_vec(),
            None => vec![grp.identity()],
        },
    };
    let usub = grp.subgroup(&u)?;
    let s = match s {
        Some(s) => s.clone(),
        None => (0..grp.order()).filter(|&x| !usub.contains(x)).collect(),
    };
    SpaceTemplate::cayley(g, v, &u, &s, radius)
}

/// Tree of spaces over a graph of finite groups, one spec per vertex.
pub fn graph_of_groups_space_ball(
    g: &GraphOfGroups,
    specs: &[SpaceSpec],
    tree_radius: u32,
    space_radius: u32,
    radius: Option<u32>,
) -> Result<TreeOfSpacesBall, TreeSpaceError> {
    let shape = Shape::from_gog(g);
    let mut templates = Vec::new();
    for v in 0..g.vertices().len() {
        let spec = specs.get(v).cloned().unwrap_or_default();
        templates.push(match spec {
            SpaceSpec::Cayley { u, s } => cayley_template(g, v, &u, &s, space_radius)?,
            SpaceSpec::Explicit { model } => {
                return Err(TreeSpaceError::UnsupportedShape(format!(
                    "explicit space {} cannot stand for the finite vertex group {}",
                    model.name(),
                    g.vertices()[v].name
                )))
            }
        });
    }
    TreeOfSpacesBall::build(shape, templates, 0, tree_radius, radius, crate::graph::DEFAULT_VERTEX_BUDGET * 4)
}

/// Amalgam A *_C B: vertex spaces for A and B glued along the Bass-Serre pattern.
pub fn amalgam_space_ball(
    g: &GraphOfGroups,
    spec_a: &SpaceSpec,
    spec_b: &SpaceSpec,
    tree_radius: u32,
    space_radius: u32,
    radius: Option<u32>,
) -> Result<TreeOfSpacesBall, TreeSpaceError> {
    if !g.is_amalgam() {
        return Err(TreeSpaceError::MonomorphismMismatch("expected two vertex groups joined by one edge".into()));
    }
    let e = &g.edges()[0];
    if e.group.order() == g.vertex_group(0).order() && e.group.order() == g.vertex_group(1).order() {
        return Err(TreeSpaceError::TrivialAmalgam("both factors equal the edge group".into()));
    }
    graph_of_groups_space_ball(g, &[spec_a.clone(), spec_b.clone()], tree_radius, space_radius, radius)
}

/// HNN extension A*_C: copies of X_A joined along the stable letter.
pub fn hnn_space_ball(
    g: &GraphOfGroups,
    spec: &SpaceSpec,
    tree_radius: u32,
    space_radius: u32,
    radius: Option<u32>,
) -> Result<TreeOfSpacesBall, TreeSpaceError> {
    if !g.is_hnn() {
        return Err(TreeSpaceError::NotIsomorphic("expected one vertex group with one loop".into()));
    }
    graph_of_groups_space_ball(g, std::slice::from_ref(spec), tree_radius, space_radius, radius)
}

/// Amalgam of two explicit infinite spaces over a point: every vertex of each space is an
/// attachment point. With T_3 for both this assembles to T_4.
pub fn explicit_amalgam(
    a: ExplicitGraphModel,
    b: ExplicitGraphModel,
    tree_radius: u32,
    space_radius: u32,
    radius: Option<u32>,
    budget: usize,
) -> Result<TreeOfSpacesBall, TreeSpaceError> {
    let shape = Shape::amalgam();
    let e = OrientedEdge::forward(0);
    let ta = SpaceTemplate::from_ball("A", a.ball(space_radius, budget)?, &[e], true);
    let tb = SpaceTemplate::from_ball("B", b.ball(space_radius, budget)?, &[e.rev()], true);
    TreeOfSpacesBall::build(shape, vec![ta, tb], 0, tree_radius, radius, budget)
}

/// A tree of spaces from arbitrary template balls (one per vertex type of `shape`), every
/// vertex an attachment point.
pub fn ball_amalgam(
    shape: Shape,
    balls: Vec<(GraphBall, bool)>,
    tree_radius: u32,
    radius: Option<u32>,
    budget: usize,
) -> Result<TreeOfSpacesBall, TreeSpaceError> {
    let templates = balls
        .into_iter()
        .enumerate()
        .map(|(v, (ball, infinite))| SpaceTemplate::from_ball(&shape.vertices[v].clone(), ball, &shape.edges_at(v), infinite))
        .collect();
    TreeOfSpacesBall::build(shape, templates, 0, tree_radius, radius, budget)
}

/// Replace each vertex space by its augmented ball.
pub fn augmented_tree_space(t: &TreeOfSpacesBall, peripherals: &[Vec<CopyWithMetric>], depth: u32) -> Result<TreeOfSpacesBall, TreeSpaceError> {
    t.augmented(peripherals, depth)
}

/// Distinct peripheral (horoball) copies met by the vertices of each copy: (tree copy,
/// horoball copy id) pairs, for tag-disjointness checks.
pub fn horoball_owners(a: &Assembled) -> BTreeSet<(u32, u32)> {
    (0..a.ball.vertex_count())
        .filter_map(|v| match a.ball.tag(v) {
            Tag::Horo { copy, .. } => Some((a.projection[v], copy)),
            _ => None,
        })
        .collect()
}
