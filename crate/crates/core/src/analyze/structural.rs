//! Boundary directions and the dense-amalgam conditions on a tree of spaces, computed
//! from copy records without materializing the assembled ball.
//!
//! A direction at scale R lives in exactly one copy: lift edges are bridges, so shell
//! components never cross them (the child side of a lift edge starts one step further out).
//! The directions of copy S are the components of its local shell {rho, rho+1} at
//! rho = R - base_dist(S), which depend only on (template, rho) and are cached.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::AnalyzeError;
use crate::treespace::{SpaceTemplate, TreeOfSpacesBall, NO_PARENT};

/// Shell classes of one template at one local radius.
#[derive(Debug)]
struct LocalShell {
    /// Local vertices at distance rho.
    sphere: Vec<u32>,
    /// Class of each sphere vertex.
    class_of: Vec<u32>,
    classes: u32,
    /// Largest local distance between class representatives (double sweep).
    rep_diameter: u32,
}

fn local_components(t: &SpaceTemplate, keep: &dyn Fn(u32) -> bool) -> Vec<u32> {
    let n = t.vertex_count();
    let mut comp = vec![u32::MAX; n];
    let mut next = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if comp[s] != u32::MAX || !keep(t.local_dist(s)) {
            continue;
        }
        comp[s] = next;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &w in t.ball.neighbors(v) {
                let w = w as usize;
                if comp[w] == u32::MAX && keep(t.local_dist(w)) {
                    comp[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    comp
}

fn local_shell(t: &SpaceTemplate, rho: u32) -> LocalShell {
    let sphere: Vec<u32> = (0..t.vertex_count() as u32).filter(|&v| t.local_dist(v as usize) == rho).collect();
    if sphere.is_empty() {
        return LocalShell { sphere, class_of: vec![], classes: 0, rep_diameter: 0 };
    }
    let comp = local_components(t, &|d| d == rho || d == rho + 1);
    let mut renum: HashMap<u32, u32> = HashMap::new();
    let mut reps = Vec::new();
    let class_of = sphere
        .iter()
        .map(|&v| {
            let k = renum.len() as u32;
            *renum.entry(comp[v as usize]).or_insert_with(|| {
                reps.push(v);
                k
            })
        })
        .collect();
    let rep_diameter = if reps.len() < 2 {
        0
    } else {
        let far = |src: u32| {
            let d = t.ball.bfs(src as usize);
            reps.iter().map(|&r| (d[r as usize], r)).max_by_key(|&(x, r)| (x, std::cmp::Reverse(r))).unwrap()
        };
        let (_, a) = far(reps[0]);
        far(a).0
    };
    LocalShell { sphere, class_of, classes: renum.len() as u32, rep_diameter }
}

fn bit(ty: u32) -> u64 {
    1u64 << (ty % 64)
}

/// Per-template data shared by the structural passes.
struct Prepared<'t> {
    t: &'t TreeOfSpacesBall,
    r: u32,
    shells: HashMap<(u32, u32), Arc<LocalShell>>,
    /// BFS-tree parent of each local vertex (smallest-index neighbour one step closer).
    bfs_parent: Vec<Vec<u32>>,
    /// Largest local distance reached inside the BFS subtree of each local vertex.
    reach: Vec<Vec<u32>>,
    /// Directions per copy (0 beyond the ball).
    dirs: Vec<u32>,
}

impl<'t> Prepared<'t> {
    fn new(t: &'t TreeOfSpacesBall, n: u32, r: u32) -> Result<Self, AnalyzeError> {
        if r <= n + 2 {
            return Err(AnalyzeError::RadiusOrderViolation { n, r });
        }
        let Some(cap) = t.radius else {
            return Err(AnalyzeError::NotATreeOfSpaces("a product ball has no global metric cap".into()));
        };
        if cap < r || !t.tree_complete_through(r) {
            return Err(AnalyzeError::BallTooSmall { needed: r, complete: cap.min(t.tree_radius) });
        }
        let mut shells = HashMap::new();
        let mut dirs = vec![0u32; t.copy_count()];
        for (c, rec) in t.copies.iter().enumerate() {
            if rec.base_dist > r {
                continue;
            }
            let rho = r - rec.base_dist;
            let tm = t.template_of(c);
            if !tm.complete_through(rho + 1) {
                return Err(AnalyzeError::BallTooSmall { needed: rho + 1, complete: tm.ball.complete_radius().unwrap_or(0) });
            }
            let sh = shells.entry((rec.template, rho)).or_insert_with(|| Arc::new(local_shell(tm, rho)));
            dirs[c] = sh.classes;
        }
        let mut bfs_parent = Vec::new();
        let mut reach = Vec::new();
        for tm in &t.templates {
            let n = tm.vertex_count();
            let mut par = vec![u32::MAX; n];
            for v in 0..n {
                let dv = tm.local_dist(v);
                if dv > 0 {
                    par[v] = tm.ball.neighbors(v).iter().copied().filter(|&w| tm.local_dist(w as usize) + 1 == dv).min().unwrap();
                }
            }
            let mut rc: Vec<u32> = (0..n).map(|v| tm.local_dist(v)).collect();
            for &v in tm.vertices_within(u32::MAX).iter().rev() {
                let p = par[v as usize];
                if p != u32::MAX {
                    rc[p as usize] = rc[p as usize].max(rc[v as usize]);
                }
            }
            bfs_parent.push(par);
            reach.push(rc);
        }
        Ok(Prepared { t, r, shells, bfs_parent, reach, dirs })
    }

    fn shell(&self, c: usize) -> Option<&LocalShell> {
        let rec = self.t.copies[c];
        (rec.base_dist <= self.r).then(|| self.shells[&(rec.template, self.r - rec.base_dist)].as_ref())
    }

    fn rho(&self, c: usize) -> u32 {
        self.r - self.t.copies[c].base_dist
    }

    /// Does copy c carry a limit set (an infinite vertex space with directions)?
    fn has_limit_set(&self, c: usize) -> bool {
        self.t.template_of(c).infinite && self.dirs[c] > 0
    }

    /// Type of the child hung at slot `si` of copy c, its own direction count, and whether
    /// it carries a limit set; None when the child lies beyond the ball.
    fn slot_child_dirs(&self, c: usize, si: usize) -> Option<(u32, u32, bool)> {
        let tm = self.t.template_of(c);
        let s = &tm.slots[si];
        let b = self.t.copies[c].base_dist + tm.local_dist(s.local as usize) + 1;
        if b > self.r {
            return None;
        }
        let ty = self.t.shape.terminus(s.edge) as u32;
        let child = &self.t.templates[ty as usize];
        let k = self.shells.get(&(ty, self.r - b)).map(|s| s.classes).unwrap_or_else(|| local_shell(child, self.r - b).classes);
        Some((ty, k, child.infinite && k > 0))
    }

    /// Directions and limit-set types per subtree, bottom-up.
    fn subtree_totals(&self) -> (Vec<u64>, Vec<u64>) {
        let n = self.t.copy_count();
        let mut total: Vec<u64> = self.dirs.iter().map(|&d| u64::from(d)).collect();
        let mut mask: Vec<u64> =
            (0..n).map(|c| if self.has_limit_set(c) { bit(self.t.copies[c].template) } else { 0 }).collect();
        for c in (1..n).rev() {
            let p = self.t.copies[c].parent as usize;
            total[p] += total[c];
            mask[p] |= mask[c];
        }
        (total, mask)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralBoundary {
    pub n: u32,
    pub r: u32,
    /// Sphere vertices at distance R.
    pub sphere: u64,
    /// Fine classes (directions).
    pub classes: u64,
    /// Classes lying in infinite vertex spaces (limit-set directions) vs the rest.
    pub stabilizer_classes: u64,
    pub tree_classes: u64,
    /// Copies whose limit set is nonempty.
    pub copies_with_limit_sets: u64,
    /// Classes per copy, indexed like the copy records.
    pub per_copy: Vec<u32>,
}

/// Fine boundary classes at scale (n, R) of a capped tree of spaces.
pub fn structural_boundary(t: &TreeOfSpacesBall, n: u32, r: u32) -> Result<StructuralBoundary, AnalyzeError> {
    let p = Prepared::new(t, n, r)?;
    let mut out = StructuralBoundary {
        n,
        r,
        sphere: 0,
        classes: 0,
        stabilizer_classes: 0,
        tree_classes: 0,
        copies_with_limit_sets: 0,
        per_copy: p.dirs.clone(),
    };
    for c in 0..t.copy_count() {
        let Some(sh) = p.shell(c) else { continue };
        out.sphere += sh.sphere.len() as u64;
        out.classes += u64::from(sh.classes);
        if p.has_limit_set(c) {
            out.stabilizer_classes += u64::from(sh.classes);
            out.copies_with_limit_sets += 1;
        } else {
            out.tree_classes += u64::from(sh.classes);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub condition: u8,
    pub name: String,
    pub pass: bool,
    /// Number of items (lift edges, copies, directions...) examined.
    pub checked: u64,
    pub detail: String,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyInfo {
    pub name: String,
    pub copies: u64,
    pub directions: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub n: u32,
    pub r: u32,
    pub epsilon_exponent: u32,
    pub copies: u64,
    pub directions: u64,
    pub families: Vec<FamilyInfo>,
    /// Set when the audit passes for a degenerate reason.
    pub degenerate: Option<String>,
    /// (k, max diameter of limit sets of copies at tree depth >= k)
    pub nullness_profile: Vec<(u32, f64)>,
    pub conditions: Vec<ConditionVerdict>,
    pub pass: bool,
}

fn verdict(condition: u8, name: &str, pass: bool, checked: u64, detail: String, witness: Option<String>) -> ConditionVerdict {
    ConditionVerdict { condition, name: name.into(), pass, checked, detail, witness }
}

/// Finite-scale audit of the five dense-amalgam conditions for the family of vertex-space
/// limit sets, at scale (n, R), with density threshold 2^-e.
pub fn dense_amalgam_audit(t: &TreeOfSpacesBall, n: u32, r: u32, e: u32) -> Result<AuditReport, AnalyzeError> {
    let p = Prepared::new(t, n, r)?;
    let nc = t.copy_count();
    let mut families: Vec<FamilyInfo> =
        t.templates.iter().map(|tm| FamilyInfo { name: tm.name.clone(), copies: 0, directions: 0 }).collect();
    let mut directions = 0u64;
    for c in 0..nc {
        directions += u64::from(p.dirs[c]);
        if p.has_limit_set(c) {
            let f = &mut families[t.copies[c].template as usize];
            f.copies += 1;
            f.directions += u64::from(p.dirs[c]);
        }
    }
    let mut report = AuditReport {
        n,
        r,
        epsilon_exponent: e,
        copies: nc as u64,
        directions,
        families,
        degenerate: None,
        nullness_profile: vec![],
        conditions: vec![],
        pass: true,
    };
    let vacuous = |why: &str| -> Vec<ConditionVerdict> {
        ["disjointness", "nullness", "complement", "density", "separation"]
            .iter()
            .enumerate()
            .map(|(i, name)| verdict(i as u8 + 1, name, true, 0, why.to_string(), None))
            .collect()
    };
    if t.shape.edges.is_empty() {
        report.degenerate = Some("single vertex space: the family has one element".into());
        report.conditions = vacuous("one-element family");
        return Ok(report);
    }
    if report.families.iter().all(|f| f.copies == 0) {
        report.degenerate =
            Some("every vertex-space limit set is empty: the boundary is the tree boundary, a Cantor set".into());
        report.conditions = vacuous("empty family");
        return Ok(report);
    }
    report.conditions.push(disjointness(&p));
    let (c2, profile) = nullness(&p);
    report.nullness_profile = profile;
    report.conditions.push(c2);
    let (total, _) = p.subtree_totals();
    report.conditions.push(complement(&p, n, &total));
    report.conditions.push(density(&p, e));
    report.conditions.push(separation(&p, &total));
    report.pass = report.conditions.iter().all(|c| c.pass);
    Ok(report)
}

/// (1) A shell class could only meet two copies through a lift edge with both ends in the
/// shell and directions on both sides.
fn disjointness(p: &Prepared) -> ConditionVerdict {
    let t = p.t;
    let r = p.r;
    let mut witness = None;
    let mut checked = 0u64;
    for c in 1..t.copy_count() {
        let b = t.copies[c].base_dist;
        if b > r + 1 {
            continue;
        }
        checked += 1;
        let parent_side = b - 1;
        let in_shell = (parent_side == r || parent_side == r + 1) && (b == r || b == r + 1);
        if in_shell && p.dirs[c] > 0 && witness.is_none() {
            witness = Some(format!("lift edge into {}", t.copy_label(c)));
        }
    }
    verdict(
        1,
        "disjointness",
        witness.is_none(),
        checked,
        "no lift edge joins shell classes of two copies".into(),
        witness,
    )
}

fn copy_diameter(p: &Prepared, c: usize) -> f64 {
    let sh = p.shell(c).unwrap();
    if sh.classes < 2 {
        return 0.0;
    }
    // (x.y) = b + rho - d_loc(x,y)/2 for x, y on the local sphere
    let b = f64::from(p.t.copies[c].base_dist);
    let m = b + f64::from(p.rho(c)) - f64::from(sh.rep_diameter) / 2.0;
    2f64.powf(-m)
}

/// (2) Max limit-set diameter over copies at tree depth >= k strictly decreases to 0.
fn nullness(p: &Prepared) -> (ConditionVerdict, Vec<(u32, f64)>) {
    let t = p.t;
    let max_depth = (0..t.copy_count()).filter(|&c| p.has_limit_set(c)).map(|c| t.copies[c].depth).max().unwrap_or(0);
    let mut at_depth = vec![0f64; max_depth as usize + 2];
    let mut checked = 0;
    for c in 0..t.copy_count() {
        if p.has_limit_set(c) {
            checked += 1;
            let d = t.copies[c].depth as usize;
            at_depth[d] = at_depth[d].max(copy_diameter(p, c));
        }
    }
    let mut profile = Vec::new();
    let mut running = 0f64;
    for k in (0..at_depth.len()).rev() {
        running = running.max(at_depth[k]);
        profile.push((k as u32, running));
    }
    profile.reverse();
    let mut witness = None;
    for w in profile.windows(2) {
        if w[0].1 > 0.0 && w[1].1 >= w[0].1 {
            witness = Some(format!("D({}) = {} does not drop at depth {}", w[0].0, w[0].1, w[1].0));
            break;
        }
    }
    let last = profile.last().map(|x| x.1).unwrap_or(0.0);
    let pass = witness.is_none() && last == 0.0;
    let detail = format!("D(k) for k = 0..{}: {:?}", max_depth + 1, profile.iter().map(|x| x.1).collect::<Vec<_>>());
    (verdict(2, "nullness", pass, checked, detail, witness), profile)
}

/// (3) For each direction of each limit set, the part of V_U(xi) reachable outside ball(n)
/// holds directions outside that limit set: a child subtree with directions hung inside U,
/// or (when U reaches the base) the rest of the tree beyond the parent.
fn complement(p: &Prepared, n: u32, total: &[u64]) -> ConditionVerdict {
    let t = p.t;
    let all = total[0];
    let mut cache: HashMap<(u32, u32, u32, bool, Option<(usize, bool)>, bool), (u64, u64)> = HashMap::new();
    let (mut checked, mut failed) = (0u64, 0u64);
    let mut witness = None;
    for c in 0..t.copy_count() {
        if !p.has_limit_set(c) {
            continue;
        }
        let b = t.copies[c].base_dist;
        let rho = p.rho(c);
        let lower = n.saturating_sub(b);
        let is_root = t.copies[c].parent == NO_PARENT;
        let entry = t.entry_edge(c).map(|e| (e.edge as usize, e.reversed));
        let outside = !is_root && all > total[c];
        let key = (t.copies[c].template, rho, lower, is_root, entry, outside);
        let (ok, bad) = *cache.entry(key).or_insert_with(|| {
            let tm = t.template_of(c);
            let sh = p.shell(c).unwrap();
            let comp = local_components(tm, &|d| d >= lower && d <= rho);
            let mut good: HashMap<u32, bool> = HashMap::new();
            for v in tm.vertices_within(rho) {
                let v = *v as usize;
                if comp[v] == u32::MAX {
                    continue;
                }
                let g = good.entry(comp[v]).or_insert(false);
                if *g {
                    continue;
                }
                if v == tm.ball.base() && outside {
                    *g = true;
                }
                for &si in tm.slots_at(v) {
                    if !t.is_parent_slot(c, si as usize) && p.slot_child_dirs(c, si as usize).is_some_and(|(_, k, _)| k > 0) {
                        *g = true;
                    }
                }
            }
            let mut class_ok = vec![false; sh.classes as usize];
            for (i, &v) in sh.sphere.iter().enumerate() {
                if good.get(&comp[v as usize]).copied().unwrap_or(false) {
                    class_ok[sh.class_of[i] as usize] = true;
                }
            }
            let ok = class_ok.iter().filter(|&&x| x).count() as u64;
            (ok, class_ok.len() as u64 - ok)
        });
        checked += ok + bad;
        failed += bad;
        if bad > 0 && witness.is_none() {
            witness = Some(format!("a direction of {} has no complementary direction in V_U", t.copy_label(c)));
        }
    }
    verdict(3, "complement", failed == 0, checked, format!("{failed} of {checked} limit-set directions fail"), witness)
}

/// (4) Every direction is within 2^-e of the limit set of some copy of each type.
fn density(p: &Prepared, e: u32) -> ConditionVerdict {
    let t = p.t;
    let types: Vec<u32> = (0..t.templates.len() as u32).filter(|&ty| t.templates[ty as usize].infinite).collect();
    let mut checked = 0u64;
    let mut failed = 0u64;
    let mut witness = None;
    type Key = (u32, u32, bool, Option<(usize, bool)>, u32, u32);
    let mut cache: HashMap<Key, (u64, u64)> = HashMap::new();
    for &f in &types {
        for c in 0..t.copy_count() {
            let k = p.dirs[c];
            if k == 0 {
                continue;
            }
            checked += u64::from(k);
            if t.copies[c].template == f && p.has_limit_set(c) {
                if p.r < e {
                    failed += u64::from(k);
                }
                continue;
            }
            let b = t.copies[c].base_dist;
            let key = (t.copies[c].template, p.rho(c), c == 0, t.entry_edge(c).map(|x| (x.edge as usize, x.reversed)), b.min(e), f);
            // (classes passing inside the copy, classes with no witness inside the copy)
            let (inside, missing) = *cache.entry(key).or_insert_with(|| {
                let tm = t.template_of(c);
                let sh = p.shell(c).unwrap();
                let par = &p.bfs_parent[t.copies[c].template as usize];
                let mut best = vec![None::<u32>; sh.classes as usize];
                for (i, &x) in sh.sphere.iter().enumerate() {
                    let cls = sh.class_of[i] as usize;
                    let mut u = x;
                    loop {
                        let du = tm.local_dist(u as usize);
                        let hit = tm.slots_at(u as usize).iter().any(|&si| {
                            !t.is_parent_slot(c, si as usize)
                                && p.slot_child_dirs(c, si as usize).is_some_and(|(ty, _, has)| ty == f && has)
                        });
                        if hit {
                            best[cls] = Some(best[cls].map_or(du, |b: u32| b.max(du)));
                            break;
                        }
                        if du == 0 {
                            break;
                        }
                        u = par[u as usize];
                    }
                }
                let inside = best.iter().filter(|x| x.is_some_and(|du| b.min(e) + du >= e)).count() as u64;
                (inside, best.iter().filter(|x| x.is_none()).count() as u64)
            });
            let mut ok = inside;
            if missing > 0 {
                // the classes without a witness inside the copy share the parent-side bound
                if parent_side_product(p, c, f).is_some_and(|prod| prod >= e) {
                    ok += missing;
                }
            }
            if ok < u64::from(k) {
                failed += u64::from(k) - ok;
                if witness.is_none() {
                    witness = Some(format!(
                        "a direction of {} is farther than 2^-{e} from every {} limit set",
                        t.copy_label(c),
                        t.templates[f as usize].name
                    ));
                }
            }
        }
    }
    let detail = format!("{failed} of {checked} (direction, family) pairs fail at epsilon = 2^-{e}");
    verdict(4, "density", failed == 0, checked, detail, witness)
}

/// Best Gromov product with an f-type limit set reached by leaving copy c through its base.
fn parent_side_product(p: &Prepared, c: usize, f: u32) -> Option<u32> {
    let t = p.t;
    let mut cur = c;
    while t.copies[cur].parent != NO_PARENT {
        let rec = t.copies[cur];
        let pc = rec.parent as usize;
        let tm = t.template_of(pc);
        let ty = t.copies[pc].template;
        let par = &p.bfs_parent[ty as usize];
        let reach = &p.reach[ty as usize];
        let bp = t.copies[pc].base_dist;
        let mut u = tm.slots[rec.via_slot as usize].local;
        loop {
            let du = tm.local_dist(u as usize);
            if ty == f && p.has_limit_set(pc) && reach[u as usize] >= p.rho(pc) {
                return Some(bp + du);
            }
            let hit = tm.slots_at(u as usize).iter().any(|&si| {
                si != rec.via_slot
                    && !t.is_parent_slot(pc, si as usize)
                    && p.slot_child_dirs(pc, si as usize).is_some_and(|(cty, _, has)| cty == f && has)
            });
            if hit {
                return Some(bp + du);
            }
            if du == 0 {
                break;
            }
            u = par[u as usize];
        }
        cur = pc;
    }
    None
}

/// (5) For every non-root copy S within the ball, V(S) = directions of subtree(S) is a union
/// of fine classes (its lift edge stays off the shell) and is saturated (each limit set sits
/// in one copy). Distinct limit sets are separated by the subtree of the first copy on the
/// tree path between them.
fn separation(p: &Prepared, total: &[u64]) -> ConditionVerdict {
    let t = p.t;
    let mut checked = 0u64;
    let mut witness = None;
    for c in 1..t.copy_count() {
        let b = t.copies[c].base_dist;
        if b > p.r {
            continue;
        }
        checked += 1;
        let lift_in_shell = b - 1 >= p.r;
        let proper = total[c] < total[0];
        if (lift_in_shell || !proper) && witness.is_none() {
            witness = Some(format!("subtree of {} is not a proper clopen set", t.copy_label(c)));
        }
    }
    verdict(
        5,
        "separation",
        witness.is_none(),
        checked,
        "every subtree direction set is clopen, saturated and proper".into(),
        witness,
    )
}

/// A boundary point at scale R: a direction class in a copy's limit set, or a tree
/// direction (the end of the tree path through a copy).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Direction {
    Stabilizer { copy: u32, local: u32 },
    Tree { copy: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Neighborhood {
    /// Local vertices of U, as (copy, local vertex).
    pub local_vertices: Vec<(u32, u32)>,
    /// Copies whose whole subtree is inside.
    pub subtrees: Vec<u32>,
    /// Everything outside the subtree of this copy is inside as well.
    pub beyond_parent_of: Option<u32>,
    pub directions: u64,
    /// Names of vertex types whose limit sets meet the set.
    pub types: Vec<String>,
    /// Every limit set is entirely inside or entirely outside.
    pub saturated: bool,
}

/// V_U(xi) for a stabilizer direction (parameter n: U is the part of the copy outside
/// ball(n) joined to xi), or V_n(eta) for a tree direction (parameter n: the subtree at the
/// depth-n copy on eta's path; n = 0 is everything).
pub fn neighborhood_basis(t: &TreeOfSpacesBall, r: u32, dir: Direction, n: u32) -> Result<Neighborhood, AnalyzeError> {
    let p = Prepared::new(t, 0, r)?;
    let (total, mask) = p.subtree_totals();
    let names = |m: u64| -> Vec<String> {
        (0..t.templates.len()).filter(|&i| m & bit(i as u32) != 0).map(|i| t.templates[i].name.clone()).collect()
    };
    match dir {
        Direction::Tree { copy } => {
            let c = copy as usize;
            if c >= t.copy_count() {
                return Err(AnalyzeError::UnknownDirection(format!("copy {copy}")));
            }
            if t.copies[c].depth < n {
                return Err(AnalyzeError::UnknownDirection(format!("copy {copy} is above depth {n}")));
            }
            let mut a = c;
            while t.copies[a].depth > n {
                a = t.copies[a].parent as usize;
            }
            Ok(Neighborhood {
                local_vertices: vec![],
                subtrees: vec![a as u32],
                beyond_parent_of: None,
                directions: total[a],
                types: names(mask[a]),
                saturated: true,
            })
        }
        Direction::Stabilizer { copy, local } => {
            let c = copy as usize;
            if c >= t.copy_count() || !p.has_limit_set(c) {
                return Err(AnalyzeError::UnknownDirection(format!("copy {copy} has no limit set")));
            }
            let tm = t.template_of(c);
            let rho = p.rho(c);
            if local as usize >= tm.vertex_count() || tm.local_dist(local as usize) != rho {
                return Err(AnalyzeError::UnknownDirection(format!("local vertex {local} is not at distance {r}")));
            }
            let b = t.copies[c].base_dist;
            let lower = n.saturating_sub(b);
            let comp = local_components(tm, &|d| d >= lower && d <= rho);
            let target = comp[local as usize];
            let members: Vec<u32> = (0..tm.vertex_count() as u32).filter(|&v| comp[v as usize] == target).collect();
            let sh = p.shell(c).unwrap();
            let mut classes: Vec<u32> = sh
                .sphere
                .iter()
                .zip(&sh.class_of)
                .filter(|(v, _)| comp[**v as usize] == target)
                .map(|(_, &k)| k)
                .collect();
            classes.sort_unstable();
            classes.dedup();
            let mut directions = classes.len() as u64;
            let mut m = bit(t.copies[c].template);
            let subtrees: Vec<u32> = t
                .children(c)
                .filter(|&ch| comp[tm.slots[t.copies[ch].via_slot as usize].local as usize] == target)
                .map(|ch| ch as u32)
                .collect();
            for &ch in &subtrees {
                directions += total[ch as usize];
                m |= mask[ch as usize];
            }
            let beyond = (t.copies[c].parent != NO_PARENT && members.contains(&(tm.ball.base() as u32))).then_some(copy);
            if beyond.is_some() {
                directions += total[0] - total[c];
                // the types on the other side of the parent lift edge
                let mut outside = 0u64;
                let mut cur = c;
                while t.copies[cur].parent != NO_PARENT {
                    let pc = t.copies[cur].parent as usize;
                    if p.has_limit_set(pc) {
                        outside |= bit(t.copies[pc].template);
                    }
                    for sib in t.children(pc) {
                        if sib != cur {
                            outside |= mask[sib];
                        }
                    }
                    cur = pc;
                }
                m |= outside;
            }
            // U cuts the copy's own limit set unless it holds every class of it
            let saturated = classes.len() as u32 == sh.classes;
            Ok(Neighborhood {
                local_vertices: members.into_iter().map(|v| (copy, v)).collect(),
                subtrees,
                beyond_parent_of: beyond,
                directions,
                types: names(m),
                saturated,
            })
        }
    }
}
