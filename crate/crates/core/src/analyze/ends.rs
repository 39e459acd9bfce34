//! Sphere components: rough ends and boundary directions at a fixed scale.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::AnalyzeError;
use crate::graph::GraphBall;

/// Component id of every vertex of `keep` (u32::MAX elsewhere), numbered in vertex order.
pub(crate) fn components(x: &GraphBall, keep: &dyn Fn(usize) -> bool) -> (Vec<u32>, u32) {
    let n = x.vertex_count();
    let mut comp = vec![u32::MAX; n];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for s in 0..n {
        if comp[s] != u32::MAX || !keep(s) {
            continue;
        }
        comp[s] = next;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &w in x.neighbors(v) {
                let w = w as usize;
                if comp[w] == u32::MAX && keep(w) {
                    comp[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    (comp, next)
}

/// Number of components of {n <= d <= R} that meet the sphere S(R).
pub(crate) fn annulus_components_touching_sphere(x: &GraphBall, n: u32, r: u32) -> (Vec<u32>, usize) {
    let d = x.distances();
    let (comp, _) = components(x, &|v| d[v] >= n && d[v] <= r);
    let mut ids: Vec<u32> = x.sphere(r).iter().map(|&v| comp[v]).collect();
    ids.sort_unstable();
    ids.dedup();
    (comp, ids.len())
}

fn check_ball(x: &GraphBall, n_max: u32, r: u32, need: u32) -> Result<(), AnalyzeError> {
    if r <= n_max + 2 {
        return Err(AnalyzeError::RadiusOrderViolation { n: n_max, r });
    }
    if !x.complete_through(need) {
        return Err(AnalyzeError::BallTooSmall { needed: need, complete: x.complete_radius().unwrap_or(0) });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndsRow {
    pub n: u32,
    pub r: u32,
    pub components: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndsReport {
    pub rows: Vec<EndsRow>,
    /// "0 ends", "1", "2", "many/growing" or "undetermined".
    pub verdict: String,
}

/// Verdict for a sequence of component counts at increasing n.
pub fn ends_verdict(counts: &[usize]) -> String {
    if counts.is_empty() || counts.iter().all(|&c| c == 0) {
        "0 ends".into()
    } else if counts.iter().all(|&c| c == 1) {
        "1".into()
    } else if counts.iter().all(|&c| c == 2) {
        "2".into()
    } else if counts.len() > 1 && counts.windows(2).all(|w| w[1] > w[0]) {
        "many/growing".into()
    } else {
        "undetermined".into()
    }
}

/// Components of ball(R) minus the open ball of radius n that reach the sphere S(R).
pub fn ends_estimate(x: &GraphBall, n_list: &[u32], r: u32) -> Result<EndsReport, AnalyzeError> {
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    check_ball(x, ns.last().copied().unwrap_or(0), r, r)?;
    let rows: Vec<EndsRow> =
        ns.iter().map(|&n| EndsRow { n, r, components: annulus_components_touching_sphere(x, n, r).1 }).collect();
    let counts: Vec<usize> = rows.iter().map(|r| r.components).collect();
    Ok(EndsReport { verdict: ends_verdict(&counts), rows })
}

/// Sphere directions at scale (n, R).
///
/// Fine classes: two directions of S(R) are identified when they are joined inside the
/// outer shell S(R) ∪ S(R+1), i.e. they fan out into one piece just outside the ball.
/// Coarse classes: connectivity inside the annulus n <= d <= R (the end-type partition).
/// Every fine class lies in one coarse class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryAtScale {
    pub n: u32,
    pub r: u32,
    /// Ball indices of S(R), increasing.
    pub directions: Vec<u32>,
    /// Fine class of each direction, numbered by first appearance.
    pub class_of: Vec<u32>,
    pub classes: usize,
    pub coarse_of: Vec<u32>,
    pub coarse_classes: usize,
    /// For each owner id (vertex space, peripheral copy...), the fine classes its vertices hit.
    pub limit_sets: BTreeMap<u32, Vec<u32>>,
}

/// Partition S(R) into fine and coarse classes; needs the ball complete through R+1.
/// `owner` optionally assigns each ball vertex to a piece (u32::MAX for none).
pub fn boundary_at_scale(x: &GraphBall, n: u32, r: u32, owner: Option<&[u32]>) -> Result<BoundaryAtScale, AnalyzeError> {
    check_ball(x, n, r, r + 1)?;
    let d = x.distances();
    let (shell, _) = components(x, &|v| d[v] == r || d[v] == r + 1);
    let (annulus, _) = annulus_components_touching_sphere(x, n, r);
    let directions: Vec<u32> = x.sphere(r).into_iter().map(|v| v as u32).collect();
    let renumber = |ids: &[u32]| -> (Vec<u32>, usize) {
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        let mut out = Vec::with_capacity(directions.len());
        for &v in &directions {
            let k = map.len() as u32;
            out.push(*map.entry(ids[v as usize]).or_insert(k));
        }
        (out, map.len())
    };
    let (class_of, classes) = renumber(&shell);
    let (coarse_of, coarse_classes) = renumber(&annulus);
    let mut limit_sets: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    if let Some(owner) = owner {
        for (i, &v) in directions.iter().enumerate() {
            let o = owner[v as usize];
            if o != u32::MAX {
                limit_sets.entry(o).or_default().push(class_of[i]);
            }
        }
        for cls in limit_sets.values_mut() {
            cls.sort_unstable();
            cls.dedup();
        }
    }
    Ok(BoundaryAtScale { n, r, directions, class_of, classes, coarse_of, coarse_classes, limit_sets })
}
