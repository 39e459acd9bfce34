//! Cayley-Abels graphs of graphs of finite groups, their relative versions over peripheral
//! subgroups, coned-off graphs and embedding distortion.
//!
//! Vertices are left cosets gU of a finite subgroup U of the base vertex group. A coset is
//! labelled by the normal form of its canonical element: the tail is replaced by the
//! transversal representative of tail*U.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::graph::{bfs_ball, BuiltBall, GraphBall, GraphError, Tag};
use crate::model::{GraphOfGroups, ModelError, NormalForm, Subgroup, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CayleyError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("generating set is not symmetric: the inverse of '{0}' is missing")]
    NotSymmetricGeneratingSet(String),
    #[error("peripheral generator '{0}' has finite order; give finite peripherals as element lists")]
    PeripheralNotInfinite(String),
    #[error("peripheral copy {0} is empty")]
    EmptyPeripheralCopy(usize),
    #[error("inclusion is not injective: vertices {0} and {1} have the same image")]
    NotInjective(usize, usize),
    #[error("inclusion maps vertex {0} outside the ambient ball")]
    BadInclusion(usize),
    #[error("radius too small: {0}")]
    RadiusTooSmall(String),
}

/// A finite subgroup U of the base vertex group with a finite symmetric set S.
pub struct CayleyAbels<'g> {
    g: &'g GraphOfGroups,
    u: Subgroup,
    s: Vec<NormalForm>,
}

impl<'g> CayleyAbels<'g> {
    /// `u` lists elements of vertex group 0; `s` are words in the fundamental group.
    pub fn new(g: &'g GraphOfGroups, u: &[usize], s: &[Word]) -> Result<Self, CayleyError> {
        let u = g.vertex_group(0).subgroup(u)?;
        let mut nfs = Vec::with_capacity(s.len());
        for w in s {
            nfs.push(g.reduce(w)?);
        }
        for (w, x) in s.iter().zip(&nfs) {
            let inv = g.inverse_nf(x);
            if !nfs.contains(&inv) {
                return Err(CayleyError::NotSymmetricGeneratingSet(g.reduce(w)?.display(g)));
            }
        }
        Ok(Self { g, u, s: nfs })
    }

    pub fn group(&self) -> &'g GraphOfGroups {
        self.g
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.u
    }

    pub fn generators(&self) -> &[NormalForm] {
        &self.s
    }

    /// Canonical label of the coset xU.
    pub fn coset(&self, x: &NormalForm) -> NormalForm {
        x.coset_canonical(self.g, &self.u)
    }

    pub fn identity_coset(&self) -> NormalForm {
        self.coset(&NormalForm::identity(self.g, 0))
    }

    /// Elements x*u for u in U.
    pub fn coset_elements(&self, x: &NormalForm) -> Vec<NormalForm> {
        let grp = self.g.vertex_group(0);
        self.u.elements().iter().map(|&u| x.with_tail(grp.mul(x.tail(), u))).collect()
    }

    /// Neighbours of xU: the cosets x*u*s*U.
    pub fn neighbors(&self, x: &NormalForm) -> Vec<NormalForm> {
        let mut out = Vec::new();
        for xu in self.coset_elements(x) {
            for s in &self.s {
                let y = self.coset(&self.g.multiply(&xu, s));
                if y != *x && !out.contains(&y) {
                    out.push(y);
                }
            }
        }
        out
    }

    pub fn label(&self, x: &NormalForm) -> String {
        x.display(self.g)
    }

    pub fn ball(&self, r: u32, budget: usize) -> Result<BuiltBall<NormalForm>, CayleyError> {
        Ok(bfs_ball(
            self.identity_coset(),
            r,
            |x| self.neighbors(x),
            |x| self.label(x),
            |_| Tag::Coset,
            budget,
        )?)
    }
}

/// Ball of radius r around U in the Cayley-Abels graph X(U, S).
pub fn cayley_abels_ball(g: &GraphOfGroups, u: &[usize], s: &[Word], r: u32) -> Result<GraphBall, CayleyError> {
    Ok(CayleyAbels::new(g, u, s)?.ball(r, crate::graph::DEFAULT_VERTEX_BUDGET)?.ball)
}

/// A peripheral subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Peripheral {
    /// A finite subgroup of the base vertex group, given by its elements.
    Finite(Vec<usize>),
    /// The infinite cyclic subgroup generated by an element of infinite order.
    Cyclic(Word),
}

enum ResolvedPeripheral {
    Finite(Subgroup),
    Cyclic { h: NormalForm, h_inv: NormalForm, len: usize },
}

/// The U-coset vertices of a copy gH inside the core ball, with the intrinsic metric of H.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeripheralCopy {
    pub family: u32,
    pub copy: u32,
    pub label: String,
    /// Core-ball vertex indices, ordered by intrinsic position (powers of h for cyclic H).
    pub members: Vec<u32>,
    /// Intrinsic adjacency between members, as positions in `members`.
    pub intrinsic_edges: Vec<(u32, u32)>,
    /// Whether some member of the ideal copy lies outside the core ball.
    pub truncated: bool,
    /// Intrinsic graph is a line (infinite cyclic H) rather than a clique (finite H).
    pub line: bool,
}

impl PeripheralCopy {
    /// The copy's own graph (its subgroup's Cayley-Abels graph restricted to the members),
    /// based at the first member. Fails if the members do not span a connected piece.
    pub fn intrinsic_ball(&self, core: &GraphBall) -> Result<GraphBall, GraphError> {
        let n = self.members.len();
        let labels = self.members.iter().map(|&m| core.label(m as usize).to_string()).collect();
        let mut curtailed = vec![false; n];
        if self.truncated && self.line {
            // the ends of a truncated line continue
            curtailed[0] = true;
            curtailed[n - 1] = true;
        }
        GraphBall::from_edges(labels, &self.intrinsic_edges, 0, vec![Tag::Plain; n], curtailed)
    }
}

/// A relative Cayley-Abels ball: the core ball on U-cosets, followed by one peripheral
/// vertex gH for every coset gH meeting the core. Core indices are preserved.
#[derive(Clone, Debug)]
pub struct RelativeBall {
    pub core: GraphBall,
    pub ball: GraphBall,
    pub copies: Vec<PeripheralCopy>,
    /// Ball index of each copy's peripheral vertex.
    pub peripheral_vertex: Vec<u32>,
    /// No two distinct infinite peripherals were found to be conjugate by a core element.
    pub proper_pair_not_refuted: bool,
}

impl<'g> CayleyAbels<'g> {
    fn resolve(&self, h: &Peripheral) -> Result<ResolvedPeripheral, CayleyError> {
        match h {
            Peripheral::Finite(els) => Ok(ResolvedPeripheral::Finite(self.g.vertex_group(0).subgroup(els)?)),
            Peripheral::Cyclic(w) => {
                let h = self.g.reduce(w)?;
                let max_order = self.g.vertices().iter().map(|v| v.group.order()).max().unwrap_or(1);
                let mut p = h.clone();
                for _ in 0..max_order {
                    if p.is_identity(self.g) {
                        return Err(CayleyError::PeripheralNotInfinite(h.display(self.g)));
                    }
                    p = self.g.multiply(&p, &h);
                }
                let h_inv = self.g.inverse_nf(&h);
                let len = h.syllable_length();
                Ok(ResolvedPeripheral::Cyclic { h, h_inv, len })
            }
        }
    }

    /// Canonical element of gH and the position of g in it (the power k with g = rep*h^k).
    fn peripheral_coset(&self, x: &NormalForm, p: &ResolvedPeripheral) -> (NormalForm, i64) {
        match p {
            ResolvedPeripheral::Finite(sub) => (x.coset_canonical(self.g, sub), 0),
            ResolvedPeripheral::Cyclic { h, h_inv, len } => {
                // a shortest element of gH is g*h^k with |k| bounded by 2|g| + 2|h| + 2
                let w = (2 * x.syllable_length() + 2 * len + 2) as i64;
                let key = |y: &NormalForm| (y.syllable_length(), y.clone());
                let mut best = (key(x), 0i64);
                let mut up = x.clone();
                let mut down = x.clone();
                for k in 1..=w {
                    up = self.g.multiply(&up, h);
                    down = self.g.multiply(&down, h_inv);
                    for (y, kk) in [(&up, k), (&down, -k)] {
                        let ky = key(y);
                        if ky < best.0 {
                            best = (ky, kk);
                        }
                    }
                }
                // x = rep * h^(-k)
                (best.0 .1, -best.1)
            }
        }
    }

    /// Relative Cayley-Abels ball over the peripheral family `hs`.
    ///
    /// The core is the radius-r ball of X(U, S). Each coset gU of the core is joined to the
    /// peripheral vertices g*u*H (u in U); a peripheral vertex only sees the members inside
    /// the core, so it is flagged curtailed unless its coset is finite and fully present.
    pub fn relative_ball(&self, hs: &[Peripheral], r: u32, budget: usize) -> Result<RelativeBall, CayleyError> {
        let built = self.ball(r, budget)?;
        let core = built.ball;
        let resolved: Vec<ResolvedPeripheral> = hs.iter().map(|h| self.resolve(h)).collect::<Result<_, _>>()?;
        let n = core.vertex_count();

        // copy key -> (members with positions)
        let mut copies: Vec<(u32, NormalForm, BTreeMap<i64, u32>)> = Vec::new();
        let mut index: HashMap<(u32, NormalForm), usize> = HashMap::new();
        for (i, p) in resolved.iter().enumerate() {
            for (v, key) in built.keys.iter().enumerate() {
                for xu in self.coset_elements(key) {
                    let (rep, pos) = self.peripheral_coset(&xu, p);
                    let pos = match p {
                        ResolvedPeripheral::Finite(_) => v as i64,
                        ResolvedPeripheral::Cyclic { .. } => pos,
                    };
                    let id = *index.entry((i as u32, rep.clone())).or_insert_with(|| {
                        copies.push((i as u32, rep, BTreeMap::new()));
                        copies.len() - 1
                    });
                    copies[id].2.insert(pos, v as u32);
                }
            }
        }

        let mut labels: Vec<String> = core.labels().to_vec();
        let mut tags: Vec<Tag> = core.tags().to_vec();
        let mut curtailed: Vec<bool> = (0..n).map(|v| core.is_curtailed(v)).collect();
        let mut edges: Vec<(u32, u32)> = core.edges().map(|(a, b)| (a as u32, b as u32)).collect();
        let mut out_copies = Vec::new();
        let mut peripheral_vertex = Vec::new();
        let mut per_family = vec![0u32; resolved.len()];
        for (family, rep, members) in copies {
            let copy = per_family[family as usize];
            per_family[family as usize] += 1;
            let pv = labels.len() as u32;
            let label = format!("H{family}:{}", rep.display(self.g));
            let member_list: Vec<u32> = members.values().copied().collect();
            let (intrinsic_edges, truncated) = match &resolved[family as usize] {
                ResolvedPeripheral::Finite(sub) => {
                    let m = member_list.len() as u32;
                    let es = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
                    let expected = self.coset_count_in(sub);
                    (es, member_list.len() < expected)
                }
                ResolvedPeripheral::Cyclic { .. } => {
                    let pos: Vec<i64> = members.keys().copied().collect();
                    let es = (1..pos.len())
                        .filter(|&j| pos[j] == pos[j - 1] + 1)
                        .map(|j| (j as u32 - 1, j as u32))
                        .collect();
                    (es, true)
                }
            };
            for &m in &member_list {
                edges.push((m, pv));
            }
            labels.push(label.clone());
            tags.push(Tag::Peripheral { family, copy });
            curtailed.push(truncated);
            peripheral_vertex.push(pv);
            out_copies.push(PeripheralCopy {
                family,
                copy,
                label,
                members: member_list,
                intrinsic_edges,
                truncated,
                line: matches!(resolved[family as usize], ResolvedPeripheral::Cyclic { .. }),
            });
        }
        let ball = GraphBall::from_edges(labels, &edges, core.base(), tags, curtailed)?;
        let proper_pair_not_refuted = self.proper_pair_check(&resolved, &built.keys);
        Ok(RelativeBall { core, ball, copies: out_copies, peripheral_vertex, proper_pair_not_refuted })
    }

    /// Number of U-cosets in a coset gH of a finite H: |H U| / |U|.
    fn coset_count_in(&self, h: &Subgroup) -> usize {
        let grp = self.g.vertex_group(0);
        let mut reps: Vec<usize> = h.elements().iter().map(|&x| grp.coset_rep(x, &self.u)).collect();
        reps.sort_unstable();
        reps.dedup();
        reps.len()
    }

    /// Look for k, g with g h_j g^-1 = h_i^k (i != j) among the core coset elements.
    fn proper_pair_check(&self, ps: &[ResolvedPeripheral], keys: &[NormalForm]) -> bool {
        for (i, pi) in ps.iter().enumerate() {
            for (j, pj) in ps.iter().enumerate() {
                if i == j {
                    continue;
                }
                let (ResolvedPeripheral::Cyclic { h: hi, .. }, ResolvedPeripheral::Cyclic { h: hj, .. }) = (pi, pj) else {
                    continue;
                };
                for key in keys {
                    for g in self.coset_elements(key) {
                        let x = self.g.multiply(&self.g.multiply(&g, hj), &self.g.inverse_nf(&g));
                        let bound = x.syllable_length() + 2;
                        let hi_inv = self.g.inverse_nf(hi);
                        let (mut up, mut down) = (hi.clone(), hi_inv.clone());
                        for _ in 0..bound {
                            if up == x || down == x {
                                return false;
                            }
                            up = self.g.multiply(&up, hi);
                            down = self.g.multiply(&down, &hi_inv);
                        }
                    }
                }
            }
        }
        true
    }
}

/// Relative Cayley-Abels ball; with no peripherals it equals the Cayley-Abels ball.
pub fn relative_cayley_abels_ball(
    g: &GraphOfGroups,
    u: &[usize],
    s: &[Word],
    hs: &[Peripheral],
    r: u32,
) -> Result<RelativeBall, CayleyError> {
    CayleyAbels::new(g, u, s)?.relative_ball(hs, r, crate::graph::DEFAULT_VERTEX_BUDGET)
}

/// Add one cone point per copy, joined to every vertex of the copy. Cone points of the
/// copies in `copies[i]` are tagged with family 0 unless `families` says otherwise.
pub fn coned_off(x: &GraphBall, copies: &[Vec<u32>], families: Option<&[u32]>) -> Result<GraphBall, CayleyError> {
    let mut labels = x.labels().to_vec();
    let mut tags = x.tags().to_vec();
    let mut curtailed: Vec<bool> = (0..x.vertex_count()).map(|v| x.is_curtailed(v)).collect();
    let mut edges: Vec<(u32, u32)> = x.edges().map(|(a, b)| (a as u32, b as u32)).collect();
    let mut per_family: HashMap<u32, u32> = HashMap::new();
    for (i, members) in copies.iter().enumerate() {
        if members.is_empty() {
            return Err(CayleyError::EmptyPeripheralCopy(i));
        }
        let family = families.map_or(0, |f| f[i]);
        let copy = per_family.entry(family).or_insert(0);
        let c = labels.len() as u32;
        for &m in members {
            if m as usize >= x.vertex_count() {
                return Err(GraphError::BadEdge(c as usize, m as usize).into());
            }
            edges.push((m, c));
        }
        labels.push(format!("cone:{family}:{copy}"));
        tags.push(Tag::Cone { family, copy: *copy });
        curtailed.push(false);
        *copy += 1;
    }
    Ok(GraphBall::from_edges(labels, &edges, x.base(), tags, curtailed)?)
}

impl RelativeBall {
    /// Copies with their intrinsic graphs, for attaching horoballs. A copy whose members
    /// do not span a connected piece of its line gets no metric.
    pub fn copies_with_metric(&self) -> Vec<crate::horoball::CopyWithMetric> {
        self.copies
            .iter()
            .map(|c| crate::horoball::CopyWithMetric { members: c.members.clone(), intrinsic: c.intrinsic_ball(&self.core).ok() })
            .collect()
    }

    /// Coned-off graph of the core over all peripheral copies.
    pub fn coned_off(&self) -> Result<GraphBall, CayleyError> {
        let members: Vec<Vec<u32>> = self.copies.iter().map(|c| c.members.clone()).collect();
        let families: Vec<u32> = self.copies.iter().map(|c| c.family).collect();
        coned_off(&self.core, &members, Some(&families))
    }
}

/// Distortion of an inclusion Y -> X seen from Y's base:
/// eta(n) = max { d_Y(base, y) : d_X(incl(base), incl(y)) <= n }, for n = 1..=n_max.
///
/// Fails with RadiusTooSmall when a curtailed vertex of Y maps within X-distance n_max, since
/// a missing Y-vertex could then be the one realising the maximum.
pub fn embedding_distortion(y: &GraphBall, x: &GraphBall, inclusion: &[u32], n_max: u32) -> Result<Vec<u32>, CayleyError> {
    if inclusion.len() != y.vertex_count() {
        return Err(CayleyError::BadInclusion(inclusion.len()));
    }
    let mut seen: HashMap<u32, usize> = HashMap::new();
    for (v, &img) in inclusion.iter().enumerate() {
        if img as usize >= x.vertex_count() {
            return Err(CayleyError::BadInclusion(v));
        }
        if let Some(&w) = seen.get(&img) {
            return Err(CayleyError::NotInjective(w, v));
        }
        seen.insert(img, v);
    }
    let dx = x.bfs(inclusion[y.base()] as usize);
    let dy = y.distances();
    if !x.complete_through(n_max.saturating_sub(1)) {
        return Err(CayleyError::RadiusTooSmall(format!("ambient ball is not complete below {n_max}")));
    }
    for v in 0..y.vertex_count() {
        if y.is_curtailed(v) && dx[inclusion[v] as usize] <= n_max {
            return Err(CayleyError::RadiusTooSmall(format!(
                "curtailed vertex {} of the subgraph lies at ambient distance {} <= {n_max}",
                y.label(v),
                dx[inclusion[v] as usize]
            )));
        }
    }
    let mut eta = vec![0u32; n_max as usize + 1];
    for v in 0..y.vertex_count() {
        let d = dx[inclusion[v] as usize];
        if d <= n_max {
            eta[d as usize] = eta[d as usize].max(dy[v]);
        }
    }
    for n in 1..eta.len() {
        eta[n] = eta[n].max(eta[n - 1]);
    }
    Ok(eta[1..].to_vec())
}
