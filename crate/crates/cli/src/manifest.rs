//! Manifest loading and validation.
//!
//! A manifest is a JSON object:
//!
//! ```json
//! {
//!   "name": "affine plane",
//!   "q": { "builder": "chevalley-eilenberg", "dim": 2,
//!          "structure-constants": { "t2,t1,t2": "1" } },
//!   "connections": { "r": { "random": { "seed": 7 } } },
//!   "tasks": [ { "kind": "compute", "series": "C", "order": 2, "connection": "r" } ]
//! }
//! ```
//!
//! Everything is validated here; a loaded [`Manifest`] only holds certified
//! fields, valid connections and tasks whose references resolve.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_rational::BigRational;
use qclass_core::cocycles::Series;
use qclass_core::models::{
    algebroid_chart, build_chevalley_eilenberg, build_lie_algebroid, build_odd_tangent, ModelDescriptor,
    StructureConstants,
};
use qclass_core::random::PolyShape;
use qclass_core::{Chart, Connection, Parity, SuperPolynomial, TensorField};
use serde::Deserialize;
use serde_json::Value;

use crate::expr::{parse_constant, parse_expression, ParseError};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{location}: {source}")]
    Expression {
        location: String,
        #[source]
        source: ParseError,
    },
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
    #[error("{location}: {source}")]
    Model {
        location: String,
        #[source]
        source: qclass_core::Error,
    },
}

fn invalid(location: impl Into<String>, message: impl Into<String>) -> LoadError {
    LoadError::Invalid {
        location: location.into(),
        message: message.into(),
    }
}

fn model_error(location: impl Into<String>) -> impl FnOnce(qclass_core::Error) -> LoadError {
    let location = location.into();
    move |source| LoadError::Model { location, source }
}

fn parse_at(src: &str, chart: &Arc<Chart>, location: String) -> Result<SuperPolynomial, LoadError> {
    parse_expression(src, chart).map_err(|source| LoadError::Expression { location, source })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    chart: Option<Vec<RawCoordinate>>,
    q: Value,
    #[serde(default)]
    connections: BTreeMap<String, Value>,
    #[serde(default)]
    tasks: Vec<RawTask>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoordinate {
    name: String,
    parity: RawParity,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum RawParity {
    Even,
    Odd,
}

impl From<RawParity> for Parity {
    fn from(p: RawParity) -> Parity {
        match p {
            RawParity::Even => Parity::Even,
            RawParity::Odd => Parity::Odd,
        }
    }
}

#[derive(Deserialize)]
#[serde(
    tag = "builder",
    rename_all = "kebab-case",
    rename_all_fields = "kebab-case",
    deny_unknown_fields
)]
enum RawBuilder {
    OddTangent {
        base_dim: usize,
    },
    ChevalleyEilenberg {
        dim: usize,
        #[serde(default)]
        structure_constants: BTreeMap<String, String>,
    },
    LieAlgebroid {
        base_dim: usize,
        fiber_dim: usize,
        #[serde(default)]
        anchor: BTreeMap<String, String>,
        #[serde(default)]
        structure: BTreeMap<String, String>,
    },
}

#[derive(Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct RawRandom {
    seed: u64,
    #[serde(default)]
    density: Option<f64>,
    #[serde(default)]
    max_degree: Option<usize>,
}

#[derive(Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
enum RawConnection {
    Random(RawRandom),
    Christoffel(BTreeMap<String, String>),
}

#[derive(Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Exact,
    NotExact,
}

#[derive(Deserialize, Clone, Copy, Debug)]
#[serde(deny_unknown_fields)]
pub struct EndomorphismSample {
    pub count: usize,
    pub seed: u64,
}

#[derive(Deserialize)]
#[serde(
    tag = "kind",
    rename_all = "kebab-case",
    rename_all_fields = "kebab-case",
    deny_unknown_fields
)]
enum RawTask {
    CheckQ {
        id: Option<String>,
    },
    VerifyRelations {
        id: Option<String>,
        connection: String,
        endomorphisms: Option<EndomorphismSample>,
    },
    Compute {
        id: Option<String>,
        series: String,
        order: usize,
        connection: Option<String>,
    },
    Exactness {
        id: Option<String>,
        target: String,
        degree_bound: usize,
        expect: Option<Expectation>,
        unknown_cap: Option<usize>,
    },
    Transgression {
        id: Option<String>,
        series: String,
        order: usize,
        connections: [String; 2],
    },
    CohomologyDims {
        id: Option<String>,
        expect: Option<Vec<usize>>,
    },
}

/// What an exactness task tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    /// The homological field itself.
    Q,
    /// The value produced by the compute task at this position.
    Task(usize),
}

#[derive(Clone, Debug)]
pub enum TaskKind {
    CheckQ,
    VerifyRelations {
        connection: String,
        endomorphisms: Option<EndomorphismSample>,
    },
    Compute {
        series: Series,
        order: usize,
        connection: String,
    },
    Exactness {
        target: Target,
        degree_bound: usize,
        expect: Option<Expectation>,
        unknown_cap: Option<usize>,
    },
    Transgression {
        series: Series,
        order: usize,
        connections: [String; 2],
    },
    CohomologyDims {
        expect: Option<Vec<usize>>,
    },
}

impl TaskKind {
    pub fn name(&self) -> &'static str {
        match self {
            TaskKind::CheckQ => "check-q",
            TaskKind::VerifyRelations { .. } => "verify-relations",
            TaskKind::Compute { .. } => "compute",
            TaskKind::Exactness { .. } => "exactness",
            TaskKind::Transgression { .. } => "transgression",
            TaskKind::CohomologyDims { .. } => "cohomology-dims",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Task {
    pub id: String,
    pub kind: TaskKind,
}

#[derive(Clone, Debug)]
pub struct Manifest {
    pub name: String,
    pub model: ModelDescriptor,
    /// Declared connections plus the implicit `flat`.
    pub connections: BTreeMap<String, Connection>,
    pub tasks: Vec<Task>,
}

impl Manifest {
    pub fn chart(&self) -> &Arc<Chart> {
        self.model.chart()
    }
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_manifest(&text)
}

pub fn parse_manifest(text: &str) -> Result<Manifest, LoadError> {
    let raw: RawManifest = serde_json::from_str(text).map_err(|e| LoadError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let model = load_model(&raw)?;
    let chart = model.chart().clone();
    let mut connections = BTreeMap::new();
    connections.insert("flat".to_string(), Connection::flat(&chart));
    for (name, value) in &raw.connections {
        let location = format!("connections.{name}");
        if name == "flat" {
            return Err(invalid(location, "`flat` is predefined and cannot be redeclared"));
        }
        connections.insert(
            name.clone(),
            load_connection(value, &chart, &location)?.with_label(name.clone()),
        );
    }
    let tasks = load_tasks(raw.tasks, &connections)?;
    Ok(Manifest {
        name: raw.name.unwrap_or_else(|| model.name.clone()),
        model,
        connections,
        tasks,
    })
}

fn load_model(raw: &RawManifest) -> Result<ModelDescriptor, LoadError> {
    let is_builder = raw.q.as_object().is_some_and(|o| o.contains_key("builder"));
    if is_builder {
        if raw.chart.is_some() {
            return Err(invalid("chart", "a builder defines its own chart; remove `chart`"));
        }
        let builder: RawBuilder = serde_json::from_value(raw.q.clone()).map_err(|e| invalid("q", e.to_string()))?;
        return load_builder(builder);
    }
    let Some(coords) = &raw.chart else {
        return Err(invalid("chart", "a chart is required when q is given by components"));
    };
    let chart =
        Chart::new(coords.iter().map(|c| (c.name.clone(), Parity::from(c.parity)))).map_err(model_error("chart"))?;
    let Some(entries) = raw.q.as_object() else {
        return Err(invalid("q", "expected an object of components or a builder"));
    };
    let mut comps = Vec::new();
    for (name, value) in entries {
        let location = format!("q.{name}");
        let i = chart
            .index_of(name)
            .ok_or_else(|| invalid(&location, format!("unknown coordinate `{name}`")))?;
        let Some(src) = value.as_str() else {
            return Err(invalid(location, "expected an expression string"));
        };
        let f = parse_at(src, &chart, location.clone())?;
        let expected = Parity::Odd + chart.parity(i);
        if !f.is_homogeneous_of(expected) {
            return Err(invalid(
                location,
                format!("component must be {expected} for an odd vector field, found `{f}`"),
            ));
        }
        comps.push((i, f));
    }
    let q = TensorField::vector(&chart, Parity::Odd, comps).map_err(model_error("q"))?;
    let name = raw.name.clone().unwrap_or_else(|| "custom".into());
    ModelDescriptor::custom(name, q).map_err(model_error("q"))
}

/// Splits `"a,b,c"` into coordinate indices.
fn index_key(key: &str, chart: &Chart, arity: usize, location: &str) -> Result<Vec<usize>, LoadError> {
    let names: Vec<&str> = key.split(',').map(str::trim).collect();
    if names.len() != arity {
        return Err(invalid(
            location,
            format!("expected {arity} comma-separated coordinates, found `{key}`"),
        ));
    }
    names
        .iter()
        .map(|n| {
            chart
                .index_of(n)
                .ok_or_else(|| invalid(location, format!("unknown coordinate `{n}`")))
        })
        .collect()
}

/// Fills in missing antisymmetric partners; explicit partners are kept so
/// that inconsistent input is reported by the builder.
fn complete_antisymmetric<V: Clone>(entries: &mut BTreeMap<(usize, usize, usize), V>, neg: impl Fn(&V) -> V) {
    let missing: Vec<_> = entries
        .iter()
        .filter(|(&(k, i, j), _)| !entries.contains_key(&(k, j, i)))
        .map(|(&(k, i, j), v)| ((k, j, i), neg(v)))
        .collect();
    entries.extend(missing);
}

fn load_builder(builder: RawBuilder) -> Result<ModelDescriptor, LoadError> {
    match builder {
        RawBuilder::OddTangent { base_dim } => build_odd_tangent(base_dim).map_err(model_error("q")),
        RawBuilder::ChevalleyEilenberg {
            dim,
            structure_constants,
        } => {
            if dim == 0 {
                return Err(invalid("q.dim", "dimension must be positive"));
            }
            let chart = Chart::new((1..=dim).map(|i| (format!("t{i}"), Parity::Odd))).map_err(model_error("q"))?;
            let mut c = StructureConstants::new();
            for (key, value) in &structure_constants {
                let location = format!("q.structure-constants.{key}");
                let idx = index_key(key, &chart, 3, &location)?;
                let v: BigRational =
                    parse_constant(value, &chart).map_err(|source| LoadError::Expression { location, source })?;
                c.insert((idx[0], idx[1], idx[2]), v);
            }
            complete_antisymmetric(&mut c, |v| -v.clone());
            build_chevalley_eilenberg(dim, &c).map_err(model_error("q"))
        }
        RawBuilder::LieAlgebroid {
            base_dim,
            fiber_dim,
            anchor,
            structure,
        } => {
            let chart = algebroid_chart(base_dim, fiber_dim).map_err(model_error("q"))?;
            let mut rho = BTreeMap::new();
            for (key, value) in &anchor {
                let location = format!("q.anchor.{key}");
                let idx = index_key(key, &chart, 2, &location)?;
                if idx[0] >= base_dim || idx[1] < base_dim {
                    return Err(invalid(location, "anchor keys are `base,fiber` coordinate pairs"));
                }
                rho.insert((idx[0], idx[1] - base_dim), parse_at(value, &chart, location)?);
            }
            let mut c = BTreeMap::new();
            for (key, value) in &structure {
                let location = format!("q.structure.{key}");
                let idx = index_key(key, &chart, 3, &location)?;
                if idx.iter().any(|&i| i < base_dim) {
                    return Err(invalid(location, "structure keys are fiber coordinates"));
                }
                c.insert(
                    (idx[0] - base_dim, idx[1] - base_dim, idx[2] - base_dim),
                    parse_at(value, &chart, location)?,
                );
            }
            complete_antisymmetric(&mut c, |v: &SuperPolynomial| -v);
            build_lie_algebroid(&chart, base_dim, fiber_dim, rho, c).map_err(model_error("q"))
        }
    }
}

fn load_connection(value: &Value, chart: &Arc<Chart>, location: &str) -> Result<Connection, LoadError> {
    let raw: RawConnection = serde_json::from_value(value.clone()).map_err(|e| {
        invalid(
            location,
            format!("{e} (expected {{\"random\": {{...}}}} or {{\"christoffel\": {{...}}}})"),
        )
    })?;
    match raw {
        RawConnection::Random(r) => {
            let density = r.density.unwrap_or(0.4);
            if !(0.0..=1.0).contains(&density) {
                return Err(invalid(format!("{location}.random.density"), "must lie in [0, 1]"));
            }
            let shape = PolyShape {
                max_degree: r.max_degree.unwrap_or(2),
                ..PolyShape::default()
            };
            Ok(Connection::random(chart, r.seed, density, shape))
        }
        RawConnection::Christoffel(entries) => {
            let mut gamma = Vec::new();
            for (key, src) in &entries {
                let at = format!("{location}.christoffel.{key}");
                let idx = index_key(key, chart, 3, &at)?;
                gamma.push(((idx[0], idx[1], idx[2]), parse_at(src, chart, at)?));
            }
            Connection::new(chart, gamma).map_err(model_error(location))
        }
    }
}

fn load_tasks(raw: Vec<RawTask>, connections: &BTreeMap<String, Connection>) -> Result<Vec<Task>, LoadError> {
    let mut tasks: Vec<Task> = Vec::new();
    let mut ids: BTreeMap<String, usize> = BTreeMap::new();
    for (n, raw) in raw.into_iter().enumerate() {
        let location = format!("tasks[{n}]");
        let check_connection = |name: &str| {
            if connections.contains_key(name) {
                Ok(name.to_string())
            } else {
                Err(invalid(&location, format!("unknown connection `{name}`")))
            }
        };
        let series = |s: &str| s.parse::<Series>().map_err(model_error(&location));
        let (id, kind) = match raw {
            RawTask::CheckQ { id } => (id, TaskKind::CheckQ),
            RawTask::VerifyRelations {
                id,
                connection,
                endomorphisms,
            } => (
                id,
                TaskKind::VerifyRelations {
                    connection: check_connection(&connection)?,
                    endomorphisms,
                },
            ),
            RawTask::Compute {
                id,
                series: s,
                order,
                connection,
            } => {
                let series = series(&s)?;
                let connection = match connection {
                    Some(c) => check_connection(&c)?,
                    None if series.depends_on_connection() => {
                        return Err(invalid(location, format!("series {series} needs a connection")))
                    }
                    None => "flat".to_string(),
                };
                (
                    id,
                    TaskKind::Compute {
                        series,
                        order,
                        connection,
                    },
                )
            }
            RawTask::Exactness {
                id,
                target,
                degree_bound,
                expect,
                unknown_cap,
            } => {
                let resolved = match target.as_str() {
                    "q" | "Q" => Target::Q,
                    "last-result" => tasks
                        .iter()
                        .rposition(|t| matches!(t.kind, TaskKind::Compute { .. }))
                        .map(Target::Task)
                        .ok_or_else(|| invalid(&location, "`last-result` needs an earlier compute task"))?,
                    other => match ids.get(other) {
                        Some(&i) if matches!(tasks[i].kind, TaskKind::Compute { .. }) => Target::Task(i),
                        Some(_) => return Err(invalid(location, format!("task `{other}` is not a compute task"))),
                        None => {
                            return Err(invalid(
                                location,
                                format!("unknown target `{other}` (expected q, last-result or an earlier task id)"),
                            ))
                        }
                    },
                };
                (
                    id,
                    TaskKind::Exactness {
                        target: resolved,
                        degree_bound,
                        expect,
                        unknown_cap,
                    },
                )
            }
            RawTask::Transgression {
                id,
                series: s,
                order,
                connections: [a, b],
            } => (
                id,
                TaskKind::Transgression {
                    series: series(&s)?,
                    order,
                    connections: [check_connection(&a)?, check_connection(&b)?],
                },
            ),
            RawTask::CohomologyDims { id, expect } => (id, TaskKind::CohomologyDims { expect }),
        };
        let id = id.unwrap_or_else(|| format!("task-{}", n + 1));
        if ids.insert(id.clone(), n).is_some() {
            return Err(invalid(location, format!("duplicate task id `{id}`")));
        }
        tasks.push(Task { id, kind });
    }
    Ok(tasks)
}
