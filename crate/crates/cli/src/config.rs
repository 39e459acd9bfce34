//! Run configuration: one file describes one run.
//!
//! Integer fields are read as signed values so that a negative radius is reported as a
//! validation error instead of a type error.

use std::path::{Path, PathBuf};

use relhyp_core::explicit::ExplicitGraphModel;
use relhyp_core::model::ModelFile;
use relhyp_core::treespace::SpaceSpec;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_SEED: u64 = relhyp_core::analyze::delta::DEFAULT_SEED;
pub const DEFAULT_EXPORT_LIMIT: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Stem of every output file.
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSource>,
    pub construction: Construction,
    #[serde(default)]
    pub analyzers: Vec<AnalyzerSpec>,
    /// Output directory. Not embedded in reports, so a run is reproducible anywhere.
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<i64>,
    #[serde(default)]
    pub export: ExportSpec,
}

fn default_name() -> String {
    "run".into()
}

/// Where the graph of groups comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSource {
    /// A JSON model file, relative to the config file.
    Path(PathBuf),
    Inline(ModelFile),
    /// A single vertex carrying a preset group.
    Preset(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PeripheralSpec {
    /// Elements of a finite subgroup of the base vertex group.
    Finite(Vec<usize>),
    /// A word of infinite order generating a cyclic peripheral.
    Cyclic(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HoroballBase {
    Path { vertices: i64 },
    Cycle { vertices: i64 },
    Tree { degree: i64, radius: i64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Construction {
    PresetGraph {
        graph: ExplicitGraphModel,
        radius: i64,
    },
    Cayley {
        #[serde(default)]
        u: Vec<usize>,
        s: Vec<String>,
        radius: i64,
    },
    Relative {
        #[serde(default)]
        u: Vec<usize>,
        s: Vec<String>,
        peripherals: Vec<PeripheralSpec>,
        radius: i64,
    },
    Coned {
        #[serde(default)]
        u: Vec<usize>,
        s: Vec<String>,
        peripherals: Vec<PeripheralSpec>,
        radius: i64,
    },
    Augmented {
        #[serde(default)]
        u: Vec<usize>,
        s: Vec<String>,
        peripherals: Vec<PeripheralSpec>,
        radius: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        horoball_depth: Option<i64>,
    },
    Horoball {
        base: HoroballBase,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        depth: Option<i64>,
    },
    Amalgam {
        #[serde(default)]
        a: SpaceSpec,
        #[serde(default)]
        b: SpaceSpec,
        tree_radius: i64,
        space_radius: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<i64>,
    },
    Hnn {
        #[serde(default)]
        space: SpaceSpec,
        tree_radius: i64,
        space_radius: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<i64>,
    },
    Graphofgroups {
        #[serde(default)]
        spaces: Vec<SpaceSpec>,
        tree_radius: i64,
        space_radius: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<i64>,
    },
}

impl Construction {
    pub fn kind(&self) -> &'static str {
        match self {
            Construction::PresetGraph { .. } => "preset-graph",
            Construction::Cayley { .. } => "cayley",
            Construction::Relative { .. } => "relative",
            Construction::Coned { .. } => "coned",
            Construction::Augmented { .. } => "augmented",
            Construction::Horoball { .. } => "horoball",
            Construction::Amalgam { .. } => "amalgam",
            Construction::Hnn { .. } => "hnn",
            Construction::Graphofgroups { .. } => "graphofgroups",
        }
    }

    /// Whether the construction reads a graph of groups.
    pub fn needs_model(&self) -> bool {
        match self {
            Construction::PresetGraph { .. } | Construction::Horoball { .. } => false,
            Construction::Amalgam { a, b, .. } => {
                !(matches!(a, SpaceSpec::Explicit { .. }) && matches!(b, SpaceSpec::Explicit { .. }))
            }
            _ => true,
        }
    }

    pub fn is_tree_of_spaces(&self) -> bool {
        matches!(self, Construction::Amalgam { .. } | Construction::Hnn { .. } | Construction::Graphofgroups { .. })
    }

    /// The same construction at another ball radius, for constructions with a single radius.
    pub fn with_radius(&self, r: i64) -> Option<Construction> {
        let mut c = self.clone();
        match &mut c {
            Construction::PresetGraph { radius, .. }
            | Construction::Cayley { radius, .. }
            | Construction::Relative { radius, .. }
            | Construction::Coned { radius, .. }
            | Construction::Augmented { radius, .. } => *radius = r,
            _ => return None,
        }
        Some(c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AnalyzerSpec {
    /// Four-point delta. `exhaustive` unset means exhaustive up to the size limit.
    Delta {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exhaustive: Option<bool>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        samples: Option<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max: Option<f64>,
    },
    Ends {
        n: Vec<i64>,
        r: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<String>,
    },
    Boundary {
        n: i64,
        r: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect_classes: Option<i64>,
    },
    StructuralBoundary {
        n: i64,
        r: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect_classes: Option<i64>,
    },
    Audit {
        n: i64,
        r: i64,
        epsilon_exponent: i64,
    },
    Fineness {
        from: String,
        to: String,
        length: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_paths: Option<i64>,
    },
    /// Simple loops through the edge (from, to). With several radii the construction is
    /// rebuilt at each one and the count at `increasing_at` must grow strictly.
    LoopCensus {
        from: String,
        to: String,
        max_length: i64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        radii: Vec<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        increasing_at: Option<i64>,
    },
    /// Horoball distance against 2 log2 of base distance.
    HoroballProfile {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_deviation: Option<f64>,
    },
}

impl AnalyzerSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            AnalyzerSpec::Delta { .. } => "delta",
            AnalyzerSpec::Ends { .. } => "ends",
            AnalyzerSpec::Boundary { .. } => "boundary",
            AnalyzerSpec::StructuralBoundary { .. } => "structural-boundary",
            AnalyzerSpec::Audit { .. } => "audit",
            AnalyzerSpec::Fineness { .. } => "fineness",
            AnalyzerSpec::LoopCensus { .. } => "loop-census",
            AnalyzerSpec::HoroballProfile { .. } => "horoball-profile",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportSpec {
    #[serde(default = "yes")]
    pub dot: bool,
    #[serde(default = "yes")]
    pub adjacency: bool,
    /// Larger graphs are not exported.
    #[serde(default = "default_export_limit")]
    pub max_vertices: u64,
}

fn yes() -> bool {
    true
}

fn default_export_limit() -> u64 {
    DEFAULT_EXPORT_LIMIT
}

impl Default for ExportSpec {
    fn default() -> Self {
        Self { dot: true, adjacency: true, max_vertices: DEFAULT_EXPORT_LIMIT }
    }
}

/// Read a config from TOML, or JSON when the text starts with '{'.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text)
            .map_err(|e| CliError::Parse { line: e.line(), column: e.column(), message: e.to_string() })
    } else {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
            CliError::Parse { line, column, message: e.message().to_string() }
        })
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// Load a config file. A relative model path is resolved against the file's directory.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut c = parse_config(&text)?;
    if let Some(ModelSource::Path(p)) = &mut c.model {
        if p.is_relative() {
            if let Some(dir) = path.parent() {
                *p = dir.join(&*p);
            }
        }
    }
    Ok(c)
}

pub(crate) fn nonneg(what: &str, v: i64) -> Result<u32, CliError> {
    u32::try_from(v).map_err(|_| CliError::Invalid(format!("{what} must be a non-negative integer, got {v}")))
}

pub(crate) fn positive(what: &str, v: i64) -> Result<u32, CliError> {
    match nonneg(what, v)? {
        0 => Err(CliError::Invalid(format!("{what} must be positive, got 0"))),
        x => Ok(x),
    }
}

impl RunConfig {
    pub fn seed(&self) -> u64 {
        self.seed.map_or(DEFAULT_SEED, |s| s as u64)
    }

    /// Check every numeric field and the analyzer/construction pairing.
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(s) = self.seed.filter(|&s| s < 0) {
            return Err(CliError::Invalid(format!("seed must be a non-negative integer, got {s}")));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(CliError::Invalid(format!("name '{}' is not a plain file stem", self.name)));
        }
        match &self.construction {
            Construction::PresetGraph { graph, radius } => {
                positive("radius", *radius)?;
                graph.validate().map_err(|e| CliError::Invalid(e.to_string()))?;
            }
            Construction::Cayley { radius, s, .. } => {
                positive("radius", *radius)?;
                if s.is_empty() {
                    return Err(CliError::Invalid("cayley needs a nonempty generating set s".into()));
                }
            }
            Construction::Relative { radius, .. } | Construction::Coned { radius, .. } => {
                positive("radius", *radius)?;
            }
            Construction::Augmented { radius, horoball_depth, .. } => {
                positive("radius", *radius)?;
                if let Some(d) = horoball_depth {
                    nonneg("horoball_depth", *d)?;
                }
            }
            Construction::Horoball { base, depth } => {
                match *base {
                    HoroballBase::Path { vertices } | HoroballBase::Cycle { vertices } => {
                        positive("base vertices", vertices)?;
                    }
                    HoroballBase::Tree { degree, radius } => {
                        positive("base degree", degree)?;
                        positive("base radius", radius)?;
                    }
                }
                if let HoroballBase::Cycle { vertices } = *base {
                    if vertices < 3 {
                        return Err(CliError::Invalid(format!("a cycle needs at least 3 vertices, got {vertices}")));
                    }
                }
                if let Some(d) = depth {
                    nonneg("depth", *d)?;
                }
            }
            Construction::Amalgam { tree_radius, space_radius, radius, .. }
            | Construction::Hnn { tree_radius, space_radius, radius, .. }
            | Construction::Graphofgroups { tree_radius, space_radius, radius, .. } => {
                positive("tree_radius", *tree_radius)?;
                positive("space_radius", *space_radius)?;
                if let Some(r) = radius {
                    positive("radius", *r)?;
                }
            }
        }
        if self.construction.needs_model() && self.model.is_none() {
            return Err(CliError::Invalid(format!("construction '{}' needs a model", self.construction.kind())));
        }
        let tree = self.construction.is_tree_of_spaces();
        for a in &self.analyzers {
            match a {
                AnalyzerSpec::Delta { samples, max, .. } => {
                    if let Some(s) = samples {
                        positive("samples", *s)?;
                    }
                    if max.is_some_and(|m| !(m >= 0.0)) {
                        return Err(CliError::Invalid("delta max must be a non-negative number".into()));
                    }
                }
                AnalyzerSpec::Ends { n, r, .. } => {
                    if n.is_empty() {
                        return Err(CliError::Invalid("ends needs at least one n".into()));
                    }
                    for &x in n {
                        nonneg("n", x)?;
                    }
                    nonneg("r", *r)?;
                }
                AnalyzerSpec::Boundary { n, r, expect_classes } => {
                    nonneg("n", *n)?;
                    nonneg("r", *r)?;
                    if let Some(e) = expect_classes {
                        nonneg("expect_classes", *e)?;
                    }
                }
                AnalyzerSpec::StructuralBoundary { n, r, expect_classes } => {
                    nonneg("n", *n)?;
                    nonneg("r", *r)?;
                    if let Some(e) = expect_classes {
                        nonneg("expect_classes", *e)?;
                    }
                    if !tree {
                        return Err(CliError::Invalid("structural-boundary needs an amalgam, hnn or graphofgroups construction".into()));
                    }
                }
                AnalyzerSpec::Audit { n, r, epsilon_exponent } => {
                    nonneg("n", *n)?;
                    nonneg("r", *r)?;
                    nonneg("epsilon_exponent", *epsilon_exponent)?;
                    if !tree {
                        return Err(CliError::Invalid("audit needs an amalgam, hnn or graphofgroups construction".into()));
                    }
                }
                AnalyzerSpec::Fineness { length, max_paths, .. } => {
                    nonneg("length", *length)?;
                    if let Some(m) = max_paths {
                        nonneg("max_paths", *m)?;
                    }
                }
                AnalyzerSpec::LoopCensus { max_length, radii, increasing_at, .. } => {
                    nonneg("max_length", *max_length)?;
                    for &r in radii {
                        positive("radius", r)?;
                    }
                    if let Some(k) = increasing_at {
                        if nonneg("increasing_at", *k)? > nonneg("max_length", *max_length)? {
                            return Err(CliError::Invalid("increasing_at exceeds max_length".into()));
                        }
                    }
                    if !radii.is_empty() && self.construction.with_radius(1).is_none() {
                        return Err(CliError::Invalid(format!(
                            "loop-census radii need a construction with a single radius, not '{}'",
                            self.construction.kind()
                        )));
                    }
                }
                AnalyzerSpec::HoroballProfile { max_deviation } => {
                    if !matches!(self.construction, Construction::Horoball { .. }) {
                        return Err(CliError::Invalid("horoball-profile needs a horoball construction".into()));
                    }
                    if max_deviation.is_some_and(|m| !(m >= 0.0)) {
                        return Err(CliError::Invalid("max_deviation must be a non-negative number".into()));
                    }
                }
            }
        }
        Ok(())
    }
}
