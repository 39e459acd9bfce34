//! Bounded congruence closure of the presentation relations, by exhaustive rewriting.
//!
//! Symbols: every non-identity element of every vertex group, plus t and t^-1 for each
//! edge outside the spanning tree. All words of length <= max_len are enumerated and
//! merged with union-find whenever one relation instance turns one into the other.

use relhyp_core::model::{GraphOfGroups, Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sym {
    Elem { vertex: usize, element: usize },
    Stable { edge: usize, exponent: i8 },
}

pub struct RewritingOracle {
    pub syms: Vec<Sym>,
    max_len: usize,
    offsets: Vec<usize>,
    parent: Vec<u32>,
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[parent[x as usize] as usize];
        parent[x as usize] = p;
        x = p;
    }
    x
}

impl RewritingOracle {
    pub fn new(g: &GraphOfGroups, max_len: usize) -> Self {
        let mut syms = Vec::new();
        for (v, vg) in g.vertices().iter().enumerate() {
            for x in 0..vg.group.order() {
                if x != vg.group.identity() {
                    syms.push(Sym::Elem { vertex: v, element: x });
                }
            }
        }
        for e in 0..g.edges().len() {
            if !g.is_tree_edge(e) {
                syms.push(Sym::Stable { edge: e, exponent: 1 });
                syms.push(Sym::Stable { edge: e, exponent: -1 });
            }
        }
        let k = syms.len();
        let sym_id = |s: Sym| syms.iter().position(|&t| t == s).unwrap();
        let elem = |v: usize, x: usize| -> Option<usize> {
            if x == g.vertex_group(v).identity() {
                None
            } else {
                Some(sym_id(Sym::Elem { vertex: v, element: x }))
            }
        };

        // relation instances, each as (lhs, rhs) with |lhs| >= |rhs|
        let mut rules: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for (v, vg) in g.vertices().iter().enumerate() {
            let grp = &vg.group;
            for x in 0..grp.order() {
                for y in 0..grp.order() {
                    if let (Some(a), Some(b)) = (elem(v, x), elem(v, y)) {
                        rules.push((vec![a, b], elem(v, grp.mul(x, y)).into_iter().collect()));
                    }
                }
            }
        }
        for (ei, e) in g.edges().iter().enumerate() {
            for c in 0..e.group.order() {
                if c == e.group.identity() {
                    continue;
                }
                let a = elem(e.from, e.into_from.apply(c)).unwrap();
                let b = elem(e.to, e.into_to.apply(c)).unwrap();
                if g.is_tree_edge(ei) {
                    rules.push((vec![a], vec![b]));
                } else {
                    let t = sym_id(Sym::Stable { edge: ei, exponent: 1 });
                    // t^-1 a t = b, i.e. a t = t b
                    rules.push((vec![a, t], vec![t, b]));
                }
            }
            if !g.is_tree_edge(ei) {
                let t = sym_id(Sym::Stable { edge: ei, exponent: 1 });
                let ti = sym_id(Sym::Stable { edge: ei, exponent: -1 });
                rules.push((vec![t, ti], vec![]));
                rules.push((vec![ti, t], vec![]));
                // one relation fused with one multiplication next to the stable letter,
                // so sliding an edge-group element costs one extra letter, not two
                let (gu, gw) = (g.vertex_group(e.from), g.vertex_group(e.to));
                let word = |parts: &[(usize, usize)], mid: usize, after: &[(usize, usize)]| -> Vec<usize> {
                    let mut out: Vec<usize> = parts.iter().filter_map(|&(v, x)| elem(v, x)).collect();
                    out.push(mid);
                    out.extend(after.iter().filter_map(|&(v, x)| elem(v, x)));
                    out
                };
                for c in 0..e.group.order() {
                    if c == e.group.identity() {
                        continue;
                    }
                    let (a, b) = (e.into_from.apply(c), e.into_to.apply(c));
                    for y in 0..gu.order() {
                        // y t = (y a^-1) t b
                        rules.push((word(&[(e.from, y)], t, &[]), word(&[(e.from, gu.mul(y, gu.inv(a)))], t, &[(e.to, b)])));
                        // t^-1 y = b t^-1 (a^-1 y)
                        rules.push((word(&[], ti, &[(e.from, y)]), word(&[(e.to, b)], ti, &[(e.from, gu.mul(gu.inv(a), y))])));
                    }
                    for z in 0..gw.order() {
                        // t z = a t (b^-1 z)
                        rules.push((word(&[], t, &[(e.to, z)]), word(&[(e.from, a)], t, &[(e.to, gw.mul(gw.inv(b), z))])));
                        // z t^-1 = (z b^-1) t^-1 a
                        rules.push((word(&[(e.to, z)], ti, &[]), word(&[(e.to, gw.mul(z, gw.inv(b)))], ti, &[(e.from, a)])));
                    }
                }
            }
        }

        // offsets[len] = number of words shorter than len
        let mut offsets = vec![0usize];
        for l in 0..max_len {
            offsets.push(offsets[l] + pow(k, l));
        }
        let total = offsets[max_len] + pow(k, max_len);
        let mut parent: Vec<u32> = (0..total as u32).collect();

        let mut by_first: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, (l, _)) in rules.iter().enumerate() {
            by_first[l[0]].push(i);
        }
        let mut me = Self { syms, max_len, offsets, parent: Vec::new() };
        let mut buf = Vec::with_capacity(max_len + 2);
        for len in 1..=max_len {
            for code in 0..pow(k, len) {
                let w = me.decode(len, code);
                let id = me.offsets[len] + code;
                for p in 0..len {
                    for &ri in &by_first[w[p]] {
                        let (l, r) = &rules[ri];
                        if p + l.len() > len || w[p..p + l.len()] != l[..] {
                            continue;
                        }
                        buf.clear();
                        buf.extend_from_slice(&w[..p]);
                        buf.extend_from_slice(r);
                        buf.extend_from_slice(&w[p + l.len()..]);
                        if buf.len() > max_len {
                            continue;
                        }
                        let other = me.encode(&buf);
                        let (x, y) = (find(&mut parent, id as u32), find(&mut parent, other as u32));
                        if x != y {
                            parent[x.max(y) as usize] = x.min(y);
                        }
                    }
                }
            }
        }
        me.parent = parent;
        me
    }

    pub fn alphabet_size(&self) -> usize {
        self.syms.len()
    }

    pub fn decode(&self, len: usize, mut code: usize) -> Vec<usize> {
        let k = self.syms.len();
        let mut w = vec![0; len];
        for slot in w.iter_mut() {
            *slot = code % k;
            code /= k;
        }
        w
    }

    pub fn encode(&self, w: &[usize]) -> usize {
        let k = self.syms.len();
        let mut code = 0;
        for &s in w.iter().rev() {
            code = code * k + s;
        }
        self.offsets[w.len()] + code
    }

    pub fn class(&mut self, w: &[usize]) -> u32 {
        let id = self.encode(w);
        find(&mut self.parent, id as u32)
    }

    pub fn to_word(&self, w: &[usize]) -> Word {
        Word::new(
            w.iter()
                .map(|&s| match self.syms[s] {
                    Sym::Elem { vertex, element } => Letter::Vertex { vertex, element },
                    Sym::Stable { edge, exponent } => Letter::Edge { edge, exponent },
                })
                .collect(),
        )
    }

    /// All words of length <= len, in encoding order.
    pub fn words_up_to(&self, len: usize) -> Vec<Vec<usize>> {
        assert!(len <= self.max_len);
        let k = self.syms.len();
        let mut out = Vec::new();
        for l in 0..=len {
            for code in 0..pow(k, l) {
                out.push(self.decode(l, code));
            }
        }
        out
    }
}

fn pow(k: usize, e: usize) -> usize {
    (0..e).fold(1, |a, _| a * k)
}

/// Compare the partition of words of length <= check_len under the oracle with the one
/// induced by the library's normal forms. Returns (words checked, disagreements).
pub fn compare_with_normal_forms(g: &GraphOfGroups, check_len: usize, closure_len: usize) -> (usize, usize) {
    use std::collections::HashMap;
    let mut oracle = RewritingOracle::new(g, closure_len);
    let words = oracle.words_up_to(check_len);
    let mut by_class: HashMap<u32, relhyp_core::model::NormalForm> = HashMap::new();
    let mut by_nf: HashMap<relhyp_core::model::NormalForm, u32> = HashMap::new();
    let mut bad = 0;
    for w in &words {
        let cls = oracle.class(w);
        let nf = g.reduce(&oracle.to_word(w)).expect("oracle words are well formed");
        let a = by_class.entry(cls).or_insert_with(|| nf.clone());
        let b = by_nf.entry(nf.clone()).or_insert(cls);
        if *a != nf || *b != cls {
            bad += 1;
        }
    }
    (words.len(), bad)
}
