use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{GraphOfGroups, ModelError, OrientedEdge, Subgroup};

/// A letter of a word over the fundamental group relative to the spanning tree.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    Vertex { vertex: usize, element: usize },
    Edge { edge: usize, exponent: i8 },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn vertex(vertex: usize, element: usize) -> Self {
        Self::new(vec![Letter::Vertex { vertex, element }])
    }

    pub fn stable(edge: usize, exponent: i8) -> Self {
        Self::new(vec![Letter::Edge { edge, exponent }])
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    pub fn inverse(&self, g: &GraphOfGroups) -> Word {
        let letters = self
            .letters
            .iter()
            .rev()
            .map(|l| match *l {
                Letter::Vertex { vertex, element } => Letter::Vertex {
                    vertex,
                    element: g.vertex_group(vertex).inv(element),
                },
                Letter::Edge { edge, exponent } => Letter::Edge { edge, exponent: -exponent },
            })
            .collect();
        Word { letters }
    }

    pub fn validate(&self, g: &GraphOfGroups) -> Result<(), ModelError> {
        for (i, l) in self.letters.iter().enumerate() {
            match *l {
                Letter::Vertex { vertex, element } => {
                    if vertex >= g.vertices().len() {
                        return Err(ModelError::MalformedWord { position: i, reason: format!("unknown vertex {vertex}") });
                    }
                    if element >= g.vertex_group(vertex).order() {
                        return Err(ModelError::MalformedWord {
                            position: i,
                            reason: format!("element {element} out of range at vertex {}", g.vertices()[vertex].name),
                        });
                    }
                }
                Letter::Edge { edge, exponent } => {
                    if edge >= g.edges().len() {
                        return Err(ModelError::MalformedWord { position: i, reason: format!("unknown edge {edge}") });
                    }
                    if exponent != 1 && exponent != -1 {
                        return Err(ModelError::MalformedWord { position: i, reason: format!("exponent {exponent} is not +-1") });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Canonical path form g_0 e_1 g_1 ... e_n g_n based at a vertex of the graph of groups.
///
/// Each g_i (i < n) is the canonical representative of its coset modulo the image of
/// the edge group at e_{i+1}; reduction pushes the remainder to the right.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalForm {
    base: usize,
    syllables: Vec<(usize, OrientedEdge)>,
    tail: usize,
}

impl NormalForm {
    pub fn identity(g: &GraphOfGroups, base: usize) -> Self {
        Self {
            base,
            syllables: Vec::new(),
            tail: g.vertex_group(base).identity(),
        }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn syllables(&self) -> &[(usize, OrientedEdge)] {
        &self.syllables
    }

    pub fn tail(&self) -> usize {
        self.tail
    }

    /// Number of edges in the path form.
    pub fn syllable_length(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_identity(&self, g: &GraphOfGroups) -> bool {
        self.syllables.is_empty() && self.tail == g.vertex_group(self.base).identity()
    }

    /// The same element with the tail replaced by the representative of tail*U.
    pub fn coset_canonical(&self, g: &GraphOfGroups, u: &Subgroup) -> NormalForm {
        let mut nf = self.clone();
        nf.tail = g.vertex_group(self.base).coset_rep(self.tail, u);
        nf
    }

    pub fn with_tail(&self, tail: usize) -> NormalForm {
        let mut nf = self.clone();
        nf.tail = tail;
        nf
    }

    /// Prefix of the path form ending just after the k-th edge, with trivial tail.
    pub fn prefix(&self, g: &GraphOfGroups, k: usize) -> (Vec<(usize, OrientedEdge)>, usize) {
        let v = if k == 0 { self.base } else { g.terminus(self.syllables[k - 1].1) };
        (self.syllables[..k].to_vec(), v)
    }

    /// Letters of the word in the fundamental group relative to the spanning tree.
    pub fn reduced_letters(&self, g: &GraphOfGroups) -> Vec<Letter> {
        let mut out = Vec::new();
        let mut v = self.base;
        let push_elem = |out: &mut Vec<Letter>, v: usize, x: usize| {
            if x != g.vertex_group(v).identity() {
                out.push(Letter::Vertex { vertex: v, element: x });
            }
        };
        for &(r, oe) in &self.syllables {
            push_elem(&mut out, v, r);
            let e = oe.edge as usize;
            if !g.is_tree_edge(e) {
                out.push(Letter::Edge { edge: e, exponent: if oe.reversed { -1 } else { 1 } });
            }
            v = g.terminus(oe);
        }
        push_elem(&mut out, v, self.tail);
        out
    }

    pub fn to_word(&self, g: &GraphOfGroups) -> Word {
        Word::new(self.reduced_letters(g))
    }

    pub fn display(&self, g: &GraphOfGroups) -> String {
        format_letters(g, &self.reduced_letters(g))
    }
}

/// Incremental reducer: feed path items, read off the normal form.
#[derive(Clone, Debug)]
pub struct Reducer<'g> {
    g: &'g GraphOfGroups,
    base: usize,
    stack: Vec<(usize, OrientedEdge)>,
    cur: usize,
    vertex: usize,
}

impl<'g> Reducer<'g> {
    pub fn new(g: &'g GraphOfGroups, base: usize) -> Self {
        Self {
            g,
            base,
            stack: Vec::new(),
            cur: g.vertex_group(base).identity(),
            vertex: base,
        }
    }

    pub fn from_normal_form(g: &'g GraphOfGroups, nf: &NormalForm) -> Self {
        Self {
            g,
            base: nf.base,
            stack: nf.syllables.clone(),
            cur: nf.tail,
            vertex: nf.base,
        }
    }

    #[inline]
    fn elem(&mut self, x: usize) {
        self.cur = self.g.vertex_group(self.vertex).mul(self.cur, x);
    }

    fn edge(&mut self, oe: OrientedEdge) {
        debug_assert_eq!(self.g.origin(oe), self.vertex);
        let (r, c) = self.g.decompose(oe, self.cur);
        let trivial = r == self.g.vertex_group(self.vertex).identity();
        if trivial && self.stack.last().map(|t| t.1) == Some(oe.rev()) {
            let (r_prev, e_prev) = self.stack.pop().unwrap();
            let v = self.g.origin(e_prev);
            let grp = self.g.vertex_group(v);
            self.cur = grp.mul(r_prev, self.g.omega(oe).apply(c));
            self.vertex = v;
        } else {
            self.stack.push((r, oe));
            self.cur = self.g.omega(oe).apply(c);
            self.vertex = self.g.terminus(oe);
        }
    }

    fn tree_path(&mut self, from: usize, to: usize) {
        let g = self.g;
        for &oe in g.root_path(from).iter().rev() {
            self.edge(oe.rev());
        }
        for &oe in g.root_path(to) {
            self.edge(oe);
        }
    }

    /// Multiply on the right by one letter (assumed valid).
    pub fn push_letter(&mut self, l: Letter) {
        match l {
            Letter::Vertex { vertex, element } => {
                self.tree_path(self.base, vertex);
                self.elem(element);
                self.tree_path(vertex, self.base);
            }
            Letter::Edge { edge, exponent } => {
                let mut oe = OrientedEdge::forward(edge);
                if exponent < 0 {
                    oe = oe.rev();
                }
                let (o, t) = (self.g.origin(oe), self.g.terminus(oe));
                self.tree_path(self.base, o);
                self.edge(oe);
                self.tree_path(t, self.base);
            }
        }
    }

    /// Multiply on the right by an element of the base vertex group.
    pub fn push_base_element(&mut self, x: usize) {
        debug_assert_eq!(self.vertex, self.base);
        self.elem(x);
    }

    /// Multiply on the right by another normal form with the same base.
    pub fn push_normal_form(&mut self, nf: &NormalForm) {
        debug_assert_eq!(nf.base, self.base);
        for &(r, oe) in &nf.syllables {
            self.elem(r);
            self.edge(oe);
        }
        self.elem(nf.tail);
    }

    pub fn finish(self) -> NormalForm {
        debug_assert_eq!(self.vertex, self.base);
        NormalForm {
            base: self.base,
            syllables: self.stack,
            tail: self.cur,
        }
    }
}

impl GraphOfGroups {
    /// Normal form of a word, based at vertex `base`.
    pub fn reduce_at(&self, w: &Word, base: usize) -> Result<NormalForm, ModelError> {
        w.validate(self)?;
        let mut r = Reducer::new(self, base);
        for &l in &w.letters {
            r.push_letter(l);
        }
        Ok(r.finish())
    }

    pub fn reduce(&self, w: &Word) -> Result<NormalForm, ModelError> {
        self.reduce_at(w, 0)
    }

    pub fn equal(&self, w1: &Word, w2: &Word) -> Result<bool, ModelError> {
        Ok(self.reduce(w1)? == self.reduce(w2)?)
    }

    /// Product x * w in normal form.
    pub fn multiply_word(&self, x: &NormalForm, w: &Word) -> NormalForm {
        let mut r = Reducer::from_normal_form(self, x);
        for &l in &w.letters {
            r.push_letter(l);
        }
        r.finish()
    }

    pub fn multiply(&self, x: &NormalForm, y: &NormalForm) -> NormalForm {
        let mut r = Reducer::from_normal_form(self, x);
        r.push_normal_form(y);
        r.finish()
    }

    pub fn inverse_nf(&self, x: &NormalForm) -> NormalForm {
        let mut r = Reducer::new(self, x.base);
        let grp = self.vertex_group(x.base);
        r.elem(grp.inv(x.tail));
        for &(s, oe) in x.syllables.iter().rev() {
            r.edge(oe.rev());
            let v = self.origin(oe);
            r.elem(self.vertex_group(v).inv(s));
        }
        r.finish()
    }

    /// Parse a word: tokens `V:x` (vertex V, element name or index), `t`, `t^-1` (edge names),
    /// separated by whitespace, `*` or `.`; `1` alone denotes the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word, ModelError> {
        let mut letters = Vec::new();
        let tokens = text
            .split(|c: char| c.is_whitespace() || c == '*' || c == '.')
            .filter(|t| !t.is_empty());
        for (i, tok) in tokens.enumerate() {
            if tok == "1" {
                continue;
            }
            let bad = |reason: String| ModelError::MalformedWord { position: i, reason };
            if let Some((v, x)) = tok.split_once(':') {
                let vertex = self.vertex_index(v).ok_or_else(|| bad(format!("unknown vertex '{v}'")))?;
                let element = self
                    .vertex_group(vertex)
                    .parse_element(x)
                    .ok_or_else(|| bad(format!("unknown element '{x}' of {v}")))?;
                letters.push(Letter::Vertex { vertex, element });
            } else {
                let (name, exponent) = match tok.strip_suffix("^-1") {
                    Some(n) => (n, -1),
                    None => (tok, 1),
                };
                let edge = self.edge_index(name).ok_or_else(|| bad(format!("unknown edge '{name}'")))?;
                letters.push(Letter::Edge { edge, exponent });
            }
        }
        Ok(Word::new(letters))
    }
}

/// Display letters as `V:x` and `t`/`t^-1`; the empty word is `1`.
pub fn format_letters(g: &GraphOfGroups, letters: &[Letter]) -> String {
    if letters.is_empty() {
        return "1".to_string();
    }
    let mut s = String::new();
    for (i, l) in letters.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        match *l {
            Letter::Vertex { vertex, element } => {
                let v = &g.vertices()[vertex];
                let _ = write!(s, "{}:{}", v.name, v.group.name_of(element));
            }
            Letter::Edge { edge, exponent } => {
                s.push_str(&g.edges()[edge].name);
                if exponent < 0 {
                    s.push_str("^-1");
                }
            }
        }
    }
    s
}
