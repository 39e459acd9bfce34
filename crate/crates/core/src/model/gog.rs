use std::collections::VecDeque;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{presets, validate_group, FiniteGroup, ModelError, Monomorphism, Subgroup};

#[derive(Clone, Debug)]
pub struct VertexGroup {
    pub name: String,
    pub group: FiniteGroup,
}

#[derive(Clone, Debug)]
pub struct EdgeGroup {
    pub name: String,
    pub from: usize,
    pub to: usize,
    pub group: FiniteGroup,
    pub into_from: Monomorphism,
    pub into_to: Monomorphism,
}

/// An edge with a direction. `reversed` flips from/to and the two attachments.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrientedEdge {
    pub edge: u32,
    pub reversed: bool,
}

impl OrientedEdge {
    pub fn forward(edge: usize) -> Self {
        Self { edge: edge as u32, reversed: false }
    }

    pub fn rev(self) -> Self {
        Self { edge: self.edge, reversed: !self.reversed }
    }

    #[inline]
    pub fn index(self) -> usize {
        2 * self.edge as usize + self.reversed as usize
    }
}

/// Finite graph of finite groups with a fixed spanning tree rooted at vertex 0.
#[derive(Clone, Debug)]
pub struct GraphOfGroups {
    vertices: Vec<VertexGroup>,
    edges: Vec<EdgeGroup>,
    tree_edge: Vec<bool>,
    root_path: Vec<Vec<OrientedEdge>>,
    // indexed by OrientedEdge::index
    images: Vec<Subgroup>,
    rep_of: Vec<Vec<usize>>,
    transversals: Vec<Vec<usize>>,
}

impl GraphOfGroups {
    pub fn new(vertices: Vec<VertexGroup>, edges: Vec<EdgeGroup>) -> Result<Self, ModelError> {
        if vertices.is_empty() {
            return Err(ModelError::EmptyGraph);
        }
        let nv = vertices.len();
        for e in &edges {
            if e.from >= nv || e.to >= nv {
                return Err(ModelError::UnknownVertex(format!("edge {}", e.name)));
            }
            check_mono(&e.group, &vertices[e.from].group, &e.into_from)?;
            check_mono(&e.group, &vertices[e.to].group, &e.into_to)?;
        }
        let mut names: Vec<&str> = vertices.iter().map(|v| v.name.as_str()).collect();
        names.extend(edges.iter().map(|e| e.name.as_str()));
        let mut sorted = names.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::DuplicateName(w[0].to_string()));
        }
        // BFS spanning tree from vertex 0
        let mut tree_edge = vec![false; edges.len()];
        let mut root_path: Vec<Option<Vec<OrientedEdge>>> = vec![None; nv];
        root_path[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for (i, e) in edges.iter().enumerate() {
                let step = if e.from == v && root_path[e.to].is_none() {
                    Some((e.to, OrientedEdge::forward(i)))
                } else if e.to == v && root_path[e.from].is_none() {
                    Some((e.from, OrientedEdge::forward(i).rev()))
                } else {
                    None
                };
                if let Some((w, oe)) = step {
                    let mut p = root_path[v].clone().unwrap();
                    p.push(oe);
                    root_path[w] = Some(p);
                    tree_edge[i] = true;
                    queue.push_back(w);
                }
            }
        }
        if root_path.iter().any(|p| p.is_none()) {
            return Err(ModelError::Disconnected);
        }
        let root_path: Vec<Vec<OrientedEdge>> = root_path.into_iter().map(|p| p.unwrap()).collect();
        let mut images = Vec::with_capacity(2 * edges.len());
        let mut rep_of = Vec::with_capacity(2 * edges.len());
        let mut transversals = Vec::with_capacity(2 * edges.len());
        for e in &edges {
            for (v, m) in [(e.from, &e.into_from), (e.to, &e.into_to)] {
                let g = &vertices[v].group;
                let h = m.image_subgroup(g);
                rep_of.push((0..g.order()).map(|x| g.coset_rep(x, &h)).collect());
                transversals.push(g.transversal(&h));
                images.push(h);
            }
        }
        Ok(Self {
            vertices,
            edges,
            tree_edge,
            root_path,
            images,
            rep_of,
            transversals,
        })
    }

    pub fn vertices(&self) -> &[VertexGroup] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeGroup] {
        &self.edges
    }

    pub fn vertex_group(&self, v: usize) -> &FiniteGroup {
        &self.vertices[v].group
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.name == name)
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    pub fn is_tree_edge(&self, e: usize) -> bool {
        self.tree_edge[e]
    }

    pub fn origin(&self, oe: OrientedEdge) -> usize {
        let e = &self.edges[oe.edge as usize];
        if oe.reversed { e.to } else { e.from }
    }

    pub fn terminus(&self, oe: OrientedEdge) -> usize {
        self.origin(oe.rev())
    }

    /// Attachment of the edge group into the origin.
    pub fn alpha(&self, oe: OrientedEdge) -> &Monomorphism {
        let e = &self.edges[oe.edge as usize];
        if oe.reversed { &e.into_to } else { &e.into_from }
    }

    /// Attachment of the edge group into the terminus.
    pub fn omega(&self, oe: OrientedEdge) -> &Monomorphism {
        self.alpha(oe.rev())
    }

    /// Image of the edge group in the origin vertex group.
    pub fn edge_image(&self, oe: OrientedEdge) -> &Subgroup {
        &self.images[oe.index()]
    }

    /// Left transversal of the edge image in the origin group.
    pub fn edge_transversal(&self, oe: OrientedEdge) -> &[usize] {
        &self.transversals[oe.index()]
    }

    /// Index of the edge image in the origin group.
    pub fn edge_index_in_origin(&self, oe: OrientedEdge) -> usize {
        self.transversals[oe.index()].len()
    }

    /// Split g = r * alpha(c) with r the canonical representative.
    #[inline]
    pub fn decompose(&self, oe: OrientedEdge, g: usize) -> (usize, usize) {
        let grp = self.vertex_group(self.origin(oe));
        let r = self.rep_of[oe.index()][g];
        let c = self
            .alpha(oe)
            .preimage(grp.mul(grp.inv(r), g))
            .expect("remainder lies in the edge image");
        (r, c)
    }

    /// Oriented edges leaving `v`, in edge order (forward before reversed).
    pub fn edges_at(&self, v: usize) -> Vec<OrientedEdge> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.from == v {
                out.push(OrientedEdge::forward(i));
            }
            if e.to == v {
                out.push(OrientedEdge::forward(i).rev());
            }
        }
        out
    }

    /// Tree path from vertex 0 to `v`.
    pub fn root_path(&self, v: usize) -> &[OrientedEdge] {
        &self.root_path[v]
    }

    /// Single edge between two distinct vertices.
    pub fn is_amalgam(&self) -> bool {
        self.vertices.len() == 2 && self.edges.len() == 1
    }

    /// Single loop at a single vertex.
    pub fn is_hnn(&self) -> bool {
        self.vertices.len() == 1 && self.edges.len() == 1
    }

    pub fn to_model(&self) -> ModelFile {
        ModelFile {
            vertices: self
                .vertices
                .iter()
                .map(|v| (v.name.clone(), GroupSpec::from_group(&v.group)))
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    name: Some(e.name.clone()),
                    from: self.vertices[e.from].name.clone(),
                    to: self.vertices[e.to].name.clone(),
                    edge_group: GroupSpec::from_group(&e.group),
                    into_from: e.into_from.image_table().to_vec(),
                    into_to: e.into_to.image_table().to_vec(),
                })
                .collect(),
        }
    }
}

fn check_mono(src: &FiniteGroup, tgt: &FiniteGroup, m: &Monomorphism) -> Result<(), ModelError> {
    Monomorphism::new(src, tgt, m.image_table().to_vec()).map(|_| ())
}

/// Builder helpers for the common two-piece shapes.
impl GraphOfGroups {
    pub fn single(name: &str, group: FiniteGroup) -> Self {
        Self::new(vec![VertexGroup { name: name.into(), group }], vec![]).expect("single vertex")
    }

    pub fn amalgam(
        a: FiniteGroup,
        b: FiniteGroup,
        c: FiniteGroup,
        into_a: Vec<usize>,
        into_b: Vec<usize>,
    ) -> Result<Self, ModelError> {
        let into_from = Monomorphism::new(&c, &a, into_a)?;
        let into_to = Monomorphism::new(&c, &b, into_b)?;
        Self::new(
            vec![
                VertexGroup { name: "A".into(), group: a },
                VertexGroup { name: "B".into(), group: b },
            ],
            vec![EdgeGroup {
                name: "e".into(),
                from: 0,
                to: 1,
                group: c,
                into_from,
                into_to,
            }],
        )
    }

    /// HNN extension of `a` with stable letter `t` satisfying t^-1 into_from(c) t = into_to(c).
    pub fn hnn(a: FiniteGroup, c: FiniteGroup, into_from: Vec<usize>, into_to: Vec<usize>) -> Result<Self, ModelError> {
        let f = Monomorphism::new(&c, &a, into_from)?;
        let t = Monomorphism::new(&c, &a, into_to)?;
        Self::new(
            vec![VertexGroup { name: "A".into(), group: a }],
            vec![EdgeGroup {
                name: "t".into(),
                from: 0,
                to: 0,
                group: c,
                into_from: f,
                into_to: t,
            }],
        )
    }
}

/// A group in a model file: preset name, bare table, or table with names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Preset(String),
    Table(Vec<Vec<usize>>),
    Named(NamedTable),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedTable {
    pub table: Vec<Vec<usize>>,
    pub names: Vec<String>,
}

impl GroupSpec {
    pub fn resolve(&self) -> Result<FiniteGroup, ModelError> {
        match self {
            GroupSpec::Preset(p) => presets::preset(p),
            GroupSpec::Table(t) => validate_group(t),
            GroupSpec::Named(n) => validate_group(&n.table)?.with_names(n.names.clone()),
        }
    }

    fn from_group(g: &FiniteGroup) -> Self {
        match g.element_names() {
            Some(n) => GroupSpec::Named(NamedTable { table: g.table(), names: n.to_vec() }),
            None => GroupSpec::Table(g.table()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub from: String,
    pub to: String,
    pub edge_group: GroupSpec,
    pub into_from: Vec<usize>,
    pub into_to: Vec<usize>,
}

/// The JSON model-file schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub vertices: IndexMap<String, GroupSpec>,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
}

impl ModelFile {
    pub fn build(&self) -> Result<GraphOfGroups, ModelError> {
        let mut vertices = Vec::new();
        for (name, spec) in &self.vertices {
            vertices.push(VertexGroup { name: name.clone(), group: spec.resolve()? });
        }
        let idx = |n: &str| {
            self.vertices
                .get_index_of(n)
                .ok_or_else(|| ModelError::UnknownVertex(n.to_string()))
        };
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            let (from, to) = (idx(&e.from)?, idx(&e.to)?);
            let group = e.edge_group.resolve()?;
            let into_from = Monomorphism::new(&group, &vertices[from].group, e.into_from.clone())?;
            let into_to = Monomorphism::new(&group, &vertices[to].group, e.into_to.clone())?;
            let name = e.name.clone().unwrap_or_else(|| {
                if self.edges.len() == 1 && from == to { "t".to_string() } else { format!("t{i}") }
            });
            edges.push(EdgeGroup { name, from, to, group, into_from, into_to });
        }
        GraphOfGroups::new(vertices, edges)
    }
}

/// Parse a JSON model file.
pub fn parse_model(text: &str) -> Result<GraphOfGroups, ModelError> {
    let m: ModelFile = serde_json::from_str(text).map_err(|e| ModelError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    m.build()
}
