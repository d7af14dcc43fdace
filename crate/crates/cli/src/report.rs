//! Machine-readable report document. Tensors are sparse lists of
//! `[index-names, expression]` pairs in the manifest expression grammar,
//! so every tensor in a report can be parsed back onto the chart.

use std::sync::Arc;

use qclass_core::{Chart, Parity, TensorField};
use serde::{Deserialize, Serialize};

use crate::expr::parse_expression;
use crate::manifest::LoadError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateJson {
    pub name: String,
    pub parity: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorJson {
    pub upper: usize,
    pub lower: usize,
    pub parity: String,
    pub components: Vec<(Vec<String>, String)>,
}

impl TensorJson {
    pub fn from_tensor(t: &TensorField) -> Self {
        let chart = t.chart();
        TensorJson {
            upper: t.upper(),
            lower: t.lower(),
            parity: t.parity().to_string(),
            components: t
                .components()
                .map(|(k, v)| (k.iter().map(|&i| chart.name(i).to_string()).collect(), v.to_string()))
                .collect(),
        }
    }

    /// Parses the tensor back onto `chart`.
    pub fn to_tensor(&self, chart: &Arc<Chart>) -> Result<TensorField, LoadError> {
        let parity = match self.parity.as_str() {
            "even" => Parity::Even,
            "odd" => Parity::Odd,
            other => {
                return Err(LoadError::Invalid {
                    location: "tensor".into(),
                    message: format!("unknown parity `{other}`"),
                })
            }
        };
        let mut comps = Vec::with_capacity(self.components.len());
        for (names, src) in &self.components {
            let location = format!("tensor component ({})", names.join(", "));
            let key = names
                .iter()
                .map(|n| {
                    chart.index_of(n).ok_or_else(|| LoadError::Invalid {
                        location: location.clone(),
                        message: format!("unknown coordinate `{n}`"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let value = parse_expression(src, chart).map_err(|source| LoadError::Expression {
                location: location.clone(),
                source,
            })?;
            comps.push((key, value));
        }
        TensorField::from_components(chart, self.upper, self.lower, parity, comps).map_err(|source| LoadError::Model {
            location: "tensor".into(),
            source,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelJson {
    pub kind: String,
    pub name: String,
    pub chart: Vec<CoordinateJson>,
    pub q: TensorJson,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Detail {
    CheckQ {
        bracket: TensorJson,
    },
    VerifyRelations {
        connection: String,
        nabla_q_q: TensorJson,
        second: TensorJson,
        /// Coordinates whose third-identity residual is nonzero.
        third_failures: Vec<String>,
        endomorphisms_checked: usize,
        /// Indices of sampled endomorphisms with a nonzero residual.
        cov_lie_failures: Vec<usize>,
    },
    Compute {
        series: String,
        order: usize,
        connection: String,
        value: TensorJson,
        closedness_residual: TensorJson,
    },
    Exactness {
        target: String,
        status: String,
        degree_bound: usize,
        conclusive: bool,
        unknowns: usize,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        witness: Option<TensorJson>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        residual: Option<TensorJson>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        expected: Option<String>,
    },
    Transgression {
        series: String,
        order: usize,
        connections: [String; 2],
        psi: TensorJson,
        difference: TensorJson,
        residual: TensorJson,
    },
    CohomologyDims {
        dims: Vec<usize>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        expected: Option<Vec<usize>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskReport {
    pub index: usize,
    pub id: String,
    pub kind: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<Detail>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub manifest: String,
    pub model: ModelJson,
    pub max_order: usize,
    pub tasks: Vec<TaskReport>,
    pub summary: Summary,
}

impl Report {
    pub fn success(&self) -> bool {
        self.summary.failed == 0 && self.summary.errors == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Rebuilds the chart recorded in the report.
    pub fn chart(&self) -> Result<Arc<Chart>, LoadError> {
        let coords = self.model.chart.iter().map(|c| {
            (
                c.name.clone(),
                if c.parity == "odd" { Parity::Odd } else { Parity::Even },
            )
        });
        Chart::new(coords).map_err(|source| LoadError::Model {
            location: "model.chart".into(),
            source,
        })
    }
}

pub fn model_json(model: &qclass_core::models::ModelDescriptor) -> ModelJson {
    let chart = model.chart();
    ModelJson {
        kind: model.kind.to_string(),
        name: model.name.clone(),
        chart: chart
            .coords()
            .iter()
            .enumerate()
            .map(|(i, c)| CoordinateJson {
                name: c.name.clone(),
                parity: chart.parity(i).to_string(),
            })
            .collect(),
        q: TensorJson::from_tensor(model.q.field()),
    }
}
