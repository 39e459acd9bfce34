use std::cell::OnceCell;
use std::path::{Path, PathBuf};

use relhyp_core::analyze::{
    self, delta::DEFAULT_SAMPLES, delta::EXHAUSTIVE_LIMIT, DeltaMode,
};
use relhyp_core::cayley::{cayley_abels_ball, relative_cayley_abels_ball, Peripheral, RelativeBall};
use relhyp_core::explicit::{cycle_graph, path_graph, tree_ball};
use relhyp_core::graph::{GraphBall, DEFAULT_VERTEX_BUDGET};
use relhyp_core::horoball::{augmented, default_depth, horoball, horoball_distance_profile, HoroballGraph};
use relhyp_core::model::{parse_model, presets, GraphOfGroups, Word};
use relhyp_core::treespace::{
    amalgam_space_ball, explicit_amalgam, graph_of_groups_space_ball, hnn_space_ball, Assembled, SpaceSpec,
    TreeOfSpacesBall,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{nonneg, AnalyzerSpec, Construction, HoroballBase, ModelSource, PeripheralSpec, RunConfig};
use crate::{dot, CliError, EXIT_FAILURE};

/// Copy budget for trees of spaces.
const COPY_BUDGET: usize = 20_000_000;

const BASEPOINT_NOTE: &str =
    "lift edges attach at the identity coset of the edge group in each copy; the root copy is the base vertex space";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalyzerOutcome {
    pub index: usize,
    pub kind: String,
    pub pass: bool,
    pub headline: String,
    pub report: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub summary: PathBuf,
    pub exports: Vec<PathBuf>,
    pub analyzers: Vec<AnalyzerOutcome>,
    pub construction_error: Option<String>,
}

impl RunOutcome {
    /// Human-readable lines for standard output.
    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(e) = &self.construction_error {
            out.push(format!("FAIL construction: {e}"));
        }
        for a in &self.analyzers {
            out.push(format!("{} [{}] {}: {}", if a.pass { "PASS" } else { "FAIL" }, a.index, a.kind, a.headline));
        }
        out.push(format!("report: {}", self.summary.display()));
        out
    }

    pub fn into_result(self) -> Result<Self, CliError> {
        if self.exit_code == 0 {
            return Ok(self);
        }
        let total = self.analyzers.len();
        let failed = self.analyzers.iter().filter(|a| !a.pass).count();
        match &self.construction_error {
            Some(e) => Err(CliError::Construction(e.clone())),
            None => Err(CliError::AnalyzerFailure { failed, total }),
        }
    }
}

#[derive(Serialize)]
struct Assertion {
    name: String,
    pass: bool,
    detail: String,
}

fn assertion(name: &str, pass: bool, detail: String) -> Assertion {
    Assertion { name: name.into(), pass, detail }
}

enum Built {
    Graph { ball: GraphBall, horo: Option<HoroballGraph> },
    Tree { t: TreeOfSpacesBall, assembled: OnceCell<Result<Assembled, String>> },
}

impl Built {
    fn graph(&self) -> Result<(&GraphBall, Option<&[u32]>), String> {
        match self {
            Built::Graph { ball, .. } => Ok((ball, None)),
            Built::Tree { t, assembled } => {
                let a = assembled
                    .get_or_init(|| t.to_graph(DEFAULT_VERTEX_BUDGET).map_err(|e| e.to_string()))
                    .as_ref()
                    .map_err(|e| e.clone())?;
                Ok((&a.ball, Some(&a.projection)))
            }
        }
    }

    fn vertex_count(&self) -> u64 {
        match self {
            Built::Graph { ball, .. } => ball.vertex_count() as u64,
            Built::Tree { t, .. } => t.vertex_count(),
        }
    }

    fn summary(&self, kind: &str) -> Value {
        match self {
            Built::Graph { ball, horo } => json!({
                "kind": kind,
                "vertices": ball.vertex_count(),
                "edges": ball.edge_count(),
                "radius": ball.radius(),
                "complete_radius": ball.complete_radius(),
                "finite_graph": ball.is_finite_graph(),
                "horoball_depth": horo.as_ref().map(|h| h.depth),
            }),
            Built::Tree { t, .. } => json!({
                "kind": kind,
                "vertices": t.vertex_count(),
                "copies": t.copy_count(),
                "tree_radius": t.tree_radius,
                "radius": t.radius,
                "exact_ball": t.is_exact_ball(),
                "vertex_spaces": t.templates.iter().map(|s| json!({
                    "name": s.name,
                    "vertices": s.vertex_count(),
                    "radius": s.radius(),
                    "infinite": s.infinite,
                })).collect::<Vec<_>>(),
                "conventions": [BASEPOINT_NOTE],
            }),
        }
    }
}

fn load_model(src: &ModelSource) -> Result<GraphOfGroups, CliError> {
    match src {
        ModelSource::Path(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Invalid(format!("cannot read model {}: {e}", p.display())))?;
            Ok(parse_model(&text)?)
        }
        ModelSource::Inline(m) => Ok(m.build()?),
        ModelSource::Preset(name) => Ok(GraphOfGroups::single(name, presets::preset(name)?)),
    }
}

fn words(g: &GraphOfGroups, s: &[String]) -> Result<Vec<Word>, CliError> {
    s.iter().map(|w| g.parse_word(w).map_err(CliError::from)).collect()
}

fn peripherals(g: &GraphOfGroups, hs: &[PeripheralSpec]) -> Result<Vec<Peripheral>, CliError> {
    hs.iter()
        .map(|h| match h {
            PeripheralSpec::Finite(els) => Ok(Peripheral::Finite(els.clone())),
            PeripheralSpec::Cyclic(w) => Ok(Peripheral::Cyclic(g.parse_word(w)?)),
        })
        .collect()
}

fn subgroup_or_trivial(g: &GraphOfGroups, u: &[usize]) -> Vec<usize> {
    if u.is_empty() {
        vec![g.vertex_group(0).identity()]
    } else {
        u.to_vec()
    }
}

fn construction_err(e: impl std::fmt::Display) -> CliError {
    CliError::Construction(e.to_string())
}

fn relative(g: &GraphOfGroups, u: &[usize], s: &[String], hs: &[PeripheralSpec], r: i64) -> Result<RelativeBall, CliError> {
    let (s, hs) = (words(g, s)?, peripherals(g, hs)?);
    relative_cayley_abels_ball(g, &subgroup_or_trivial(g, u), &s, &hs, nonneg("radius", r)?).map_err(construction_err)
}

fn opt_radius(r: Option<i64>) -> Result<Option<u32>, CliError> {
    r.map(|r| nonneg("radius", r)).transpose()
}

fn build(c: &Construction, g: Option<&GraphOfGroups>) -> Result<Built, CliError> {
    let need = || g.ok_or_else(|| CliError::Invalid(format!("construction '{}' needs a model", c.kind())));
    let graph = |ball| Ok(Built::Graph { ball, horo: None });
    match c {
        Construction::PresetGraph { graph: model, radius } => {
            graph(model.ball(nonneg("radius", *radius)?, DEFAULT_VERTEX_BUDGET).map_err(construction_err)?)
        }
        Construction::Cayley { u, s, radius } => {
            let g = need()?;
            let s = words(g, s)?;
            graph(cayley_abels_ball(g, &subgroup_or_trivial(g, u), &s, nonneg("radius", *radius)?).map_err(construction_err)?)
        }
        Construction::Relative { u, s, peripherals, radius } => graph(relative(need()?, u, s, peripherals, *radius)?.ball),
        Construction::Coned { u, s, peripherals, radius } => {
            graph(relative(need()?, u, s, peripherals, *radius)?.coned_off().map_err(construction_err)?)
        }
        Construction::Augmented { u, s, peripherals, radius, horoball_depth } => {
            let rel = relative(need()?, u, s, peripherals, *radius)?;
            let copies = rel.copies_with_metric();
            let depth = match horoball_depth {
                Some(d) => nonneg("horoball_depth", *d)?,
                None => {
                    let diam = copies.iter().filter_map(|c| c.intrinsic.as_ref()).map(|y| y.diameter()).max();
                    default_depth(diam.unwrap_or(0))
                }
            };
            graph(augmented(&rel.core, &copies, depth).map_err(construction_err)?.ball)
        }
        Construction::Horoball { base, depth } => {
            let base = match *base {
                HoroballBase::Path { vertices } => path_graph(nonneg("vertices", vertices)? as usize),
                HoroballBase::Cycle { vertices } => cycle_graph(nonneg("vertices", vertices)? as usize),
                HoroballBase::Tree { degree, radius } => {
                    tree_ball(nonneg("degree", degree)?, nonneg("radius", radius)?, DEFAULT_VERTEX_BUDGET).map_err(construction_err)?
                }
            };
            let depth = match depth {
                Some(d) => nonneg("depth", *d)?,
                None => default_depth(base.diameter()),
            };
            let h = horoball(&base, depth).map_err(construction_err)?;
            Ok(Built::Graph { ball: h.ball.clone(), horo: Some(h) })
        }
        Construction::Amalgam { a, b, tree_radius, space_radius, radius } => {
            let (tr, sr, cap) = (nonneg("tree_radius", *tree_radius)?, nonneg("space_radius", *space_radius)?, opt_radius(*radius)?);
            let t = match (a, b) {
                (SpaceSpec::Explicit { model: ma }, SpaceSpec::Explicit { model: mb }) => {
                    explicit_amalgam(*ma, *mb, tr, sr, cap, COPY_BUDGET)
                }
                _ => amalgam_space_ball(need()?, a, b, tr, sr, cap),
            }
            .map_err(construction_err)?;
            Ok(Built::Tree { t, assembled: OnceCell::new() })
        }
        Construction::Hnn { space, tree_radius, space_radius, radius } => {
            let t = hnn_space_ball(
                need()?,
                space,
                nonneg("tree_radius", *tree_radius)?,
                nonneg("space_radius", *space_radius)?,
                opt_radius(*radius)?,
            )
            .map_err(construction_err)?;
            Ok(Built::Tree { t, assembled: OnceCell::new() })
        }
        Construction::Graphofgroups { spaces, tree_radius, space_radius, radius } => {
            let t = graph_of_groups_space_ball(
                need()?,
                spaces,
                nonneg("tree_radius", *tree_radius)?,
                nonneg("space_radius", *space_radius)?,
                opt_radius(*radius)?,
            )
            .map_err(construction_err)?;
            Ok(Built::Tree { t, assembled: OnceCell::new() })
        }
    }
}

/// Check that words and peripherals parse before anything is built, so that malformed
/// input is a config error rather than a construction failure.
fn check_words(c: &Construction, g: Option<&GraphOfGroups>) -> Result<(), CliError> {
    let Some(g) = g else { return Ok(()) };
    match c {
        Construction::Cayley { s, .. } => words(g, s).map(drop),
        Construction::Relative { s, peripherals: hs, .. }
        | Construction::Coned { s, peripherals: hs, .. }
        | Construction::Augmented { s, peripherals: hs, .. } => {
            words(g, s)?;
            peripherals(g, hs).map(drop)
        }
        _ => Ok(()),
    }
}

fn find(ball: &GraphBall, label: &str) -> Result<usize, String> {
    ball.find(label).ok_or_else(|| format!("no vertex labelled '{label}'"))
}

struct Analysis {
    result: Value,
    assertions: Vec<Assertion>,
    headline: String,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn analyze(
    spec: &AnalyzerSpec,
    built: &Built,
    construction: &Construction,
    model: Option<&GraphOfGroups>,
    seed: u64,
) -> Result<Analysis, String> {
    let u = |x: i64| x as u32;
    match spec {
        AnalyzerSpec::Delta { exhaustive, samples, max } => {
            let (ball, _) = built.graph()?;
            let sampled = DeltaMode::Sampled { samples: samples.map_or(DEFAULT_SAMPLES, |s| s as u64), seed };
            let mode = match exhaustive {
                Some(true) => DeltaMode::Exhaustive,
                Some(false) => sampled,
                None if ball.vertex_count() <= EXHAUSTIVE_LIMIT => DeltaMode::Exhaustive,
                None => sampled,
            };
            let rep = analyze::delta_hyperbolicity(ball, mode).map_err(|e| e.to_string())?;
            let mut assertions = Vec::new();
            if let Some(m) = max {
                assertions.push(assertion("delta4 bound", rep.delta4 <= *m, format!("delta4 = {} against {m}", rep.delta4)));
            }
            let how = if rep.exhaustive { "exhaustive" } else { "sampled" };
            let headline = format!("delta4 = {} ({how}, {} vertices)", rep.delta4, rep.vertices);
            Ok(Analysis { result: to_value(&rep), assertions, headline })
        }
        AnalyzerSpec::Ends { n, r, expect } => {
            let (ball, _) = built.graph()?;
            let ns: Vec<u32> = n.iter().map(|&x| u(x)).collect();
            let rep = analyze::ends_estimate(ball, &ns, u(*r)).map_err(|e| e.to_string())?;
            let mut assertions = Vec::new();
            if let Some(e) = expect {
                assertions.push(assertion("verdict", &rep.verdict == e, format!("verdict '{}' against '{e}'", rep.verdict)));
            }
            let counts: Vec<String> = rep.rows.iter().map(|row| row.components.to_string()).collect();
            let headline = format!("verdict {} (components {})", rep.verdict, counts.join(", "));
            Ok(Analysis { result: to_value(&rep), assertions, headline })
        }
        AnalyzerSpec::Boundary { n, r, expect_classes } => {
            let (ball, _) = built.graph()?;
            let rep = analyze::boundary_at_scale(ball, u(*n), u(*r), None).map_err(|e| e.to_string())?;
            let mut assertions = Vec::new();
            if let Some(e) = expect_classes {
                assertions.push(assertion("classes", rep.classes as i64 == *e, format!("{} classes against {e}", rep.classes)));
            }
            let result = json!({
                "n": rep.n,
                "r": rep.r,
                "sphere": rep.directions.len(),
                "classes": rep.classes,
                "coarse_classes": rep.coarse_classes,
            });
            let headline = format!("{} classes over {} sphere vertices ({} coarse)", rep.classes, rep.directions.len(), rep.coarse_classes);
            Ok(Analysis { result, assertions, headline })
        }
        AnalyzerSpec::StructuralBoundary { n, r, expect_classes } => {
            let Built::Tree { t, .. } = built else { return Err("not a tree of spaces".into()) };
            let rep = analyze::structural_boundary(t, u(*n), u(*r)).map_err(|e| e.to_string())?;
            let mut assertions = Vec::new();
            if let Some(e) = expect_classes {
                assertions.push(assertion("classes", rep.classes as i64 == *e, format!("{} classes against {e}", rep.classes)));
            }
            let result = json!({
                "n": rep.n,
                "r": rep.r,
                "sphere": rep.sphere,
                "classes": rep.classes,
                "stabilizer_classes": rep.stabilizer_classes,
                "tree_classes": rep.tree_classes,
                "copies_with_limit_sets": rep.copies_with_limit_sets,
            });
            let headline = format!("{} classes over {} sphere vertices", rep.classes, rep.sphere);
            Ok(Analysis { result, assertions, headline })
        }
        AnalyzerSpec::Audit { n, r, epsilon_exponent } => {
            let Built::Tree { t, .. } = built else { return Err("not a tree of spaces".into()) };
            let rep = analyze::dense_amalgam_audit(t, u(*n), u(*r), u(*epsilon_exponent)).map_err(|e| e.to_string())?;
            let assertions: Vec<Assertion> = rep
                .conditions
                .iter()
                .map(|c| assertion(&format!("({}) {}", c.condition, c.name), c.pass, c.detail.clone()))
                .collect();
            let passed = rep.conditions.iter().filter(|c| c.pass).count();
            let headline = format!("{passed}/{} conditions hold over {} copies", rep.conditions.len(), rep.copies);
            Ok(Analysis { result: to_value(&rep), assertions, headline })
        }
        AnalyzerSpec::Fineness { from, to, length, max_paths } => {
            let (ball, _) = built.graph()?;
            let rep = analyze::fineness_probe(ball, find(ball, from)?, find(ball, to)?, u(*length)).map_err(|e| e.to_string())?;
            let mut assertions = Vec::new();
            if let Some(m) = max_paths {
                assertions.push(assertion(
                    "path bound",
                    rep.embedded_paths <= *m as u64,
                    format!("{} paths against {m}", rep.embedded_paths),
                ));
            }
            let headline = format!("{} embedded paths of length {}", rep.embedded_paths, rep.length);
            Ok(Analysis { result: to_value(&rep), assertions, headline })
        }
        AnalyzerSpec::LoopCensus { from, to, max_length, radii, increasing_at } => {
            let census = |ball: &GraphBall| {
                analyze::loop_census(ball, find(ball, from)?, find(ball, to)?, u(*max_length)).map_err(|e| e.to_string())
            };
            let mut rows = Vec::new();
            if radii.is_empty() {
                let (ball, _) = built.graph()?;
                rows.push((None, census(ball)?));
            } else {
                for &r in radii {
                    let c = construction.with_radius(r).ok_or("construction has no single radius")?;
                    let b = build(&c, model).map_err(|e| e.to_string())?;
                    let (ball, _) = b.graph()?;
                    rows.push((Some(r), census(ball)?));
                }
            }
            let mut assertions = Vec::new();
            let at = increasing_at.map(|k| k as usize);
            if let Some(k) = at {
                let seq: Vec<u64> = rows.iter().map(|(_, c)| c.counts[k]).collect();
                let pass = seq.windows(2).all(|w| w[0] < w[1]);
                assertions.push(assertion("strictly increasing", pass, format!("length-{k} counts {seq:?}")));
            }
            let result = json!({
                "rows": rows.iter().map(|(r, c)| json!({ "radius": r, "census": to_value(c) })).collect::<Vec<_>>(),
            });
            let k = at.unwrap_or(*max_length as usize);
            let seq: Vec<String> = rows.iter().map(|(_, c)| c.counts[k].to_string()).collect();
            let headline = format!("length-{k} loops: {}", seq.join(", "));
            Ok(Analysis { result, assertions, headline })
        }
        AnalyzerSpec::HoroballProfile { max_deviation } => {
            let Built::Graph { horo: Some(h), .. } = built else { return Err("not a horoball".into()) };
            let prof = horoball_distance_profile(h).map_err(|e| e.to_string())?;
            let monotone = prof.pairs.iter().all(|p| p.3 <= p.2);
            let worst = prof
                .pairs
                .iter()
                .filter(|p| p.2 >= 2)
                .map(|p| (f64::from(p.3) - 2.0 * f64::from(p.2).log2()).abs())
                .fold(0.0f64, f64::max);
            let bound = max_deviation.unwrap_or(4.0);
            let assertions = vec![
                assertion("levels shorten paths", monotone, "horoball distance <= base distance".into()),
                assertion("logarithmic bound", worst <= bound, format!("max |d_h - 2 log2 d| = {worst} against {bound}")),
            ];
            let result = json!({ "rows": to_value(&prof.rows), "worst_deviation": worst, "depth": h.depth });
            let headline = format!("max |d_h - 2 log2 d| = {worst:.6} at depth {}", h.depth);
            Ok(Analysis { result, assertions, headline })
        }
    }
}

#[derive(Serialize)]
struct AnalyzerReport<'a> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    config: &'a RunConfig,
    construction: &'a Value,
    index: usize,
    analyzer: &'a AnalyzerSpec,
    pass: bool,
    assertions: Vec<Assertion>,
    result: Option<Value>,
    error: Option<String>,
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, x: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(x).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write(path, &text)
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Build, export and analyze. Config problems are returned as errors; construction and
/// analyzer failures still write the reports and give a nonzero exit code.
pub fn run(config: &RunConfig, out: &Path, verbose: bool) -> Result<RunOutcome, CliError> {
    config.validate()?;
    let seed = config.seed();
    let mut resolved = config.clone();
    resolved.seed = Some(seed as i64);
    resolved.output = None;
    let model = match &config.model {
        Some(src) if config.construction.needs_model() => Some(load_model(src)?),
        _ => None,
    };
    check_words(&config.construction, model.as_ref())?;
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let stem = &config.name;
    let log = |msg: String| {
        if verbose {
            eprintln!("{msg}");
        }
    };

    log(format!("building {}", config.construction.kind()));
    let built = build(&config.construction, model.as_ref());
    let summary_path = out.join(format!("{stem}.json"));
    let built = match built {
        Ok(b) => b,
        Err(e) if e.exit_code() == EXIT_FAILURE => {
            let summary = json!({
                "tool": "relhyp",
                "version": env!("CARGO_PKG_VERSION"),
                "seed": seed,
                "config": &resolved,
                "construction": { "kind": config.construction.kind(), "error": e.to_string() },
                "exports": Vec::<String>::new(),
                "analyzers": Vec::<Value>::new(),
                "pass": false,
            });
            write_json(&summary_path, &summary)?;
            return Ok(RunOutcome {
                exit_code: EXIT_FAILURE,
                summary: summary_path,
                exports: Vec::new(),
                analyzers: Vec::new(),
                construction_error: Some(e.to_string()),
            });
        }
        Err(e) => return Err(e),
    };
    let construction = built.summary(config.construction.kind());
    log(format!("built {} vertices", built.vertex_count()));

    let mut exports = Vec::new();
    let mut export_notes = Vec::new();
    let ex = &config.export;
    if ex.dot || ex.adjacency {
        if built.vertex_count() > ex.max_vertices {
            export_notes.push(format!("graph not exported: {} vertices exceed {}", built.vertex_count(), ex.max_vertices));
        } else {
            match built.graph() {
                Ok((ball, groups)) => {
                    if ex.dot {
                        let p = out.join(format!("{stem}.dot"));
                        dot::export_dot(ball, groups, &p)?;
                        exports.push(p);
                    }
                    if ex.adjacency {
                        match ball.to_adjacency_text() {
                            Ok(text) => {
                                let p = out.join(format!("{stem}.adj"));
                                write(&p, &text)?;
                                exports.push(p);
                            }
                            Err(e) => export_notes.push(format!("adjacency text not written: {e}")),
                        }
                    }
                }
                Err(e) => export_notes.push(format!("graph not exported: {e}")),
            }
        }
        if let Built::Tree { t, .. } = &built {
            if ex.dot && t.copy_count() as u64 <= ex.max_vertices {
                match t.tree() {
                    Ok(bs) => {
                        let p = out.join(format!("{stem}-tree.dot"));
                        dot::export_dot(&bs.ball, Some(&bs.vertex_type), &p)?;
                        exports.push(p);
                    }
                    Err(e) => export_notes.push(format!("tree not exported: {e}")),
                }
            }
        }
    }

    let mut outcomes = Vec::new();
    let mut entries = Vec::new();
    for (i, spec) in config.analyzers.iter().enumerate() {
        log(format!("analyzer {i}: {}", spec.kind()));
        let (pass, headline, assertions, result, error) = match analyze(spec, &built, &config.construction, model.as_ref(), seed) {
            Ok(a) => {
                let pass = a.assertions.iter().all(|x| x.pass);
                (pass, a.headline, a.assertions, Some(a.result), None)
            }
            Err(e) => (false, format!("error: {e}"), Vec::new(), None, Some(e)),
        };
        let path = out.join(format!("{stem}-{i:02}-{}.json", spec.kind()));
        let report = AnalyzerReport {
            tool: "relhyp",
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config: &resolved,
            construction: &construction,
            index: i,
            analyzer: spec,
            pass,
            assertions,
            result,
            error,
        };
        write_json(&path, &report)?;
        entries.push(json!({
            "index": i,
            "kind": spec.kind(),
            "pass": pass,
            "headline": headline,
            "report": file_name(&path),
        }));
        outcomes.push(AnalyzerOutcome { index: i, kind: spec.kind().to_string(), pass, headline, report: path });
    }

    let pass = outcomes.iter().all(|o| o.pass);
    let summary = json!({
        "tool": "relhyp",
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "config": &resolved,
        "construction": construction,
        "exports": exports.iter().map(|p| file_name(p)).collect::<Vec<_>>(),
        "export_notes": export_notes,
        "analyzers": entries,
        "pass": pass,
    });
    write_json(&summary_path, &summary)?;
    Ok(RunOutcome {
        exit_code: if pass { 0 } else { EXIT_FAILURE },
        summary: summary_path,
        exports,
        analyzers: outcomes,
        construction_error: None,
    })
}
