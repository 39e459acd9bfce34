//! DOT export and a reader for the DOT this module writes.
//!
//! Nodes are `n{index}` in vertex order, edges are listed with the smaller index first.
//! Each node carries its label, tag and curtailment as attributes, which is enough to
//! rebuild the ball. Horoball levels become ranks.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use relhyp_core::graph::{GraphBall, Tag};

use crate::CliError;

const PALETTE: [&str; 12] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd",
    "#ccebc5", "#ffed6f",
];

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn style(tag: Tag) -> (&'static str, &'static str) {
    match tag {
        Tag::Plain => ("black", "circle"),
        Tag::Coset => ("blue", "circle"),
        Tag::Peripheral { .. } => ("darkgreen", "box"),
        Tag::Cone { .. } => ("red", "diamond"),
        Tag::Horo { .. } => ("purple", "point"),
    }
}

fn level(tag: Tag) -> u32 {
    match tag {
        Tag::Horo { level, .. } => level,
        _ => 0,
    }
}

/// DOT text for a ball. `groups` (one entry per vertex, e.g. the tree vertex owning it)
/// picks fill colours.
pub fn to_dot(ball: &GraphBall, groups: Option<&[u32]>) -> String {
    let mut s = String::new();
    s.push_str("graph relhyp {\n");
    let _ = writeln!(s, "  graph [base=\"n{}\", radius=\"{}\"];", ball.base(), ball.radius());
    s.push_str("  node [fontsize=10];\n");
    for v in 0..ball.vertex_count() {
        let tag = ball.tag(v);
        let (color, shape) = style(tag);
        let _ = write!(s, "  n{v} [label={}, tag=\"{tag}\", color={color}, shape={shape}", quote(ball.label(v)));
        let group = groups.and_then(|g| g.get(v));
        let mut styles = Vec::new();
        if ball.is_curtailed(v) {
            s.push_str(", curtailed=\"true\"");
            styles.push("dashed");
        }
        if let Some(g) = group {
            styles.push("filled");
            let _ = write!(s, ", group=\"{g}\", fillcolor=\"{}\"", PALETTE[*g as usize % PALETTE.len()]);
        }
        if !styles.is_empty() {
            let _ = write!(s, ", style=\"{}\"", styles.join(","));
        }
        if v == ball.base() {
            s.push_str(", penwidth=2");
        }
        s.push_str("];\n");
    }
    let mut edges: Vec<(usize, usize)> = ball.edges().map(|(a, b)| (a.min(b), a.max(b))).collect();
    edges.sort_unstable();
    for (a, b) in edges {
        let _ = writeln!(s, "  n{a} -- n{b};");
    }
    let mut levels: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for v in 0..ball.vertex_count() {
        levels.entry(level(ball.tag(v))).or_default().push(v);
    }
    if levels.len() > 1 {
        for (k, vs) in &levels {
            let _ = write!(s, "  {{ rank=same; /* level {k} */");
            for v in vs {
                let _ = write!(s, " n{v};");
            }
            s.push_str(" }\n");
        }
    }
    s.push_str("}\n");
    s
}

pub fn export_dot(ball: &GraphBall, groups: Option<&[u32]>, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, to_dot(ball, groups)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn node_index(tok: &str) -> Option<usize> {
    tok.strip_prefix('n')?.parse().ok()
}

/// Parse `key=value` pairs from the inside of `[...]`; values may be quoted.
fn attributes(body: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    let mut chars = body.chars().peekable();
    loop {
        while chars.next_if(|c| c.is_whitespace() || *c == ',' || *c == ';').is_some() {}
        if chars.peek().is_none() {
            return Ok(out);
        }
        let mut key = String::new();
        while let Some(c) = chars.next_if(|c| *c != '=') {
            key.push(c);
        }
        if chars.next() != Some('=') {
            return Err(format!("attribute '{}' has no value", key.trim()));
        }
        let mut value = String::new();
        if chars.next_if_eq(&'"').is_some() {
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some('\\') => match chars.next() {
                        Some('n') => value.push('\n'),
                        Some(c) => value.push(c),
                        None => return Err("unterminated escape".into()),
                    },
                    Some(c) => value.push(c),
                    None => return Err("unterminated string".into()),
                }
            }
        } else {
            while let Some(c) = chars.next_if(|c| !c.is_whitespace() && *c != ',' && *c != ';') {
                value.push(c);
            }
        }
        out.insert(key.trim().to_string(), value);
    }
}

/// Rebuild a ball from DOT written by [`to_dot`].
pub fn from_dot(text: &str) -> Result<GraphBall, CliError> {
    let err = |line: usize, message: String| CliError::Parse { line, column: 1, message };
    let mut base = None;
    let mut nodes: BTreeMap<usize, (String, Tag, bool)> = BTreeMap::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let ln = i + 1;
        if let Some(rest) = line.strip_prefix("graph [") {
            let attrs = attributes(rest.trim_end_matches("];")).map_err(|m| err(ln, m))?;
            let b = attrs.get("base").ok_or_else(|| err(ln, "graph attributes lack a base".into()))?;
            base = Some(node_index(b).ok_or_else(|| err(ln, format!("bad base node '{b}'")))?);
        } else if let Some((a, b)) = line.strip_suffix(';').filter(|l| !l.contains('[')).and_then(|l| l.split_once(" -- ")) {
            match (node_index(a.trim()), node_index(b.trim())) {
                (Some(a), Some(b)) => edges.push((a as u32, b as u32)),
                _ => return Err(err(ln, format!("bad edge '{line}'"))),
            }
        } else if let Some((id, rest)) = line.split_once(" [") {
            let Some(v) = node_index(id) else { continue };
            let attrs = attributes(rest.trim_end_matches("];")).map_err(|m| err(ln, m))?;
            let label = attrs.get("label").cloned().unwrap_or_else(|| id.to_string());
            let tag = match attrs.get("tag") {
                Some(t) => t.parse().map_err(|m| err(ln, m))?,
                None => Tag::Plain,
            };
            let curtailed = attrs.get("curtailed").is_some_and(|c| c == "true");
            nodes.insert(v, (label, tag, curtailed));
        }
    }
    let base = base.ok_or_else(|| err(1, "no base attribute".into()))?;
    if nodes.keys().copied().ne(0..nodes.len()) {
        return Err(err(1, "node ids are not 0..n".into()));
    }
    let mut labels = Vec::with_capacity(nodes.len());
    let mut tags = Vec::with_capacity(nodes.len());
    let mut curtailed = Vec::with_capacity(nodes.len());
    for (_, (l, t, c)) in nodes {
        labels.push(l);
        tags.push(t);
        curtailed.push(c);
    }
    GraphBall::from_edges(labels, &edges, base, tags, curtailed).map_err(|e| CliError::Graph(e.to_string()))
}
