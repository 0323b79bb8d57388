//! JSON file formats. Rationals are written as `"p/q"` strings; integers
//! are also accepted on input.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::arens_eells::{SignedMeasure, TransportPlan};
use crate::metric::{builtin, EmbeddedPointSet, FiniteMetricSpace, MetricError, Norm, WeightedGraph};
use crate::park::{HalfSpace, Hyperplane, ParkError, PolytopeH, PolytopeV};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Space,
    Graph,
    Measure,
    PolytopeV,
    PolytopeH,
    PointSet,
    Hyperplanes,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Space => "space",
            Kind::Graph => "graph",
            Kind::Measure => "measure",
            Kind::PolytopeV => "vertex polytope",
            Kind::PolytopeH => "half-space polytope",
            Kind::PointSet => "point set",
            Kind::Hyperplanes => "hyperplane list",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("expected a {expected} file, found a {found} file")]
    KindMismatch { expected: Kind, found: Kind },
    #[error("unrecognized file: no known combination of top-level keys")]
    UnknownKind,
    #[error("measure refers to unknown point {0:?}")]
    UnknownLabel(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Park(#[from] ParkError),
}

impl IoError {
    pub fn kind_name(&self) -> &'static str {
        match self {
            IoError::Io { .. } => "IoError",
            IoError::Parse { .. } => "ParseError",
            IoError::KindMismatch { .. } => "KindMismatch",
            IoError::UnknownKind => "UnknownKind",
            IoError::UnknownLabel(_) => "UnknownLabel",
            IoError::Metric(_) | IoError::Park(_) => "ValidationError",
        }
    }
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep the bare message
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        IoError::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, Rational)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    /// A builtin name such as `D_3`, or a space or graph file path relative
    /// to the measure file.
    pub space: String,
    pub coeffs: BTreeMap<String, Rational>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolytopeVFile {
    dim: usize,
    vertices: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolytopeHFile {
    dim: usize,
    rows: Vec<HalfSpace>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointSetFile {
    dim: usize,
    points: Vec<Vec<Rational>>,
    #[serde(default = "default_norm")]
    norm: Norm,
}

fn default_norm() -> Norm {
    Norm::Euclidean
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HyperplanesFile {
    hyperplanes: Vec<Hyperplane>,
}

#[derive(Debug, Clone)]
pub enum Input {
    Space(FiniteMetricSpace),
    Graph(WeightedGraph),
    Measure(MeasureFile),
    PolytopeV(PolytopeV),
    PolytopeH(PolytopeH),
    PointSet(EmbeddedPointSet),
    Hyperplanes(Vec<Hyperplane>),
}

/// Classifies a document by its top-level keys.
pub fn detect_kind(v: &Value) -> Option<Kind> {
    let obj = v.as_object()?;
    let has = |k: &str| obj.contains_key(k);
    if has("labels") && has("dist") {
        Some(Kind::Space)
    } else if has("edges") {
        Some(Kind::Graph)
    } else if has("coeffs") {
        Some(Kind::Measure)
    } else if has("rows") {
        Some(Kind::PolytopeH)
    } else if has("vertices") && has("dim") {
        Some(Kind::PolytopeV)
    } else if has("points") {
        Some(Kind::PointSet)
    } else if has("hyperplanes") {
        Some(Kind::Hyperplanes)
    } else {
        None
    }
}

/// Parses and validates a document. With `expected` set, any other kind is
/// a [`IoError::KindMismatch`].
pub fn parse_str(text: &str, expected: Option<Kind>) -> Result<Input, IoError> {
    let value: Value = serde_json::from_str(text)?;
    let found = detect_kind(&value).ok_or(IoError::UnknownKind)?;
    if let Some(expected) = expected {
        if expected != found {
            return Err(IoError::KindMismatch { expected, found });
        }
    }
    // typed parse from the text so errors keep their line and column
    Ok(match found {
        Kind::Space => {
            let f: SpaceFile = serde_json::from_str(text)?;
            Input::Space(FiniteMetricSpace::new(f.labels, f.dist)?)
        }
        Kind::Graph => {
            let f: GraphFile = serde_json::from_str(text)?;
            Input::Graph(WeightedGraph::from_labeled(f.vertices, &f.edges)?)
        }
        Kind::Measure => Input::Measure(serde_json::from_str(text)?),
        Kind::PolytopeV => {
            let f: PolytopeVFile = serde_json::from_str(text)?;
            Input::PolytopeV(PolytopeV::new(f.dim, f.vertices)?)
        }
        Kind::PolytopeH => {
            let f: PolytopeHFile = serde_json::from_str(text)?;
            Input::PolytopeH(PolytopeH::new(f.dim, f.rows)?)
        }
        Kind::PointSet => {
            let f: PointSetFile = serde_json::from_str(text)?;
            Input::PointSet(EmbeddedPointSet::new(f.dim, f.points, f.norm)?)
        }
        Kind::Hyperplanes => {
            let f: HyperplanesFile = serde_json::from_str(text)?;
            Input::Hyperplanes(f.hyperplanes)
        }
    })
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn parse_input(path: &Path, expected: Option<Kind>) -> Result<Input, IoError> {
    parse_str(&read_file(path)?, expected)
}

/// The metric space named by a measure file: a builtin, or a space or graph
/// file resolved against `base`.
pub fn resolve_space(reference: &str, base: &Path) -> Result<FiniteMetricSpace, IoError> {
    let path: PathBuf = base.join(reference);
    if path.is_file() {
        return match parse_input(&path, None)? {
            Input::Space(x) => Ok(x),
            Input::Graph(g) => Ok(crate::metric::graph_metric(&g)?),
            other => Err(IoError::KindMismatch {
                expected: Kind::Space,
                found: input_kind(&other),
            }),
        };
    }
    Ok(builtin(reference)?.into_space()?)
}

pub fn input_kind(i: &Input) -> Kind {
    match i {
        Input::Space(_) => Kind::Space,
        Input::Graph(_) => Kind::Graph,
        Input::Measure(_) => Kind::Measure,
        Input::PolytopeV(_) => Kind::PolytopeV,
        Input::PolytopeH(_) => Kind::PolytopeH,
        Input::PointSet(_) => Kind::PointSet,
        Input::Hyperplanes(_) => Kind::Hyperplanes,
    }
}

/// Maps labelled coefficients onto point indices of `x`.
pub fn measure_on(x: &FiniteMetricSpace, coeffs: &BTreeMap<String, Rational>) -> Result<SignedMeasure, IoError> {
    let mut mu = SignedMeasure::zero();
    for (label, c) in coeffs {
        let i = x.index_of(label).ok_or_else(|| IoError::UnknownLabel(label.clone()))?;
        mu.add_at(i, c);
    }
    Ok(mu)
}

pub fn space_json(x: &FiniteMetricSpace) -> Value {
    serde_json::to_value(SpaceFile {
        labels: x.labels().to_vec(),
        dist: x.matrix().to_vec(),
    })
    .expect("serializable")
}

/// `{"label": "coefficient", ...}` in point order.
pub fn measure_json(x: &FiniteMetricSpace, mu: &SignedMeasure) -> Value {
    let mut m = Map::new();
    for (i, c) in mu.coeffs() {
        m.insert(x.label(*i).to_string(), json!(c.to_string()));
    }
    Value::Object(m)
}

/// `{"y->z": "weight", ...}` in pair order.
pub fn plan_json(x: &FiniteMetricSpace, plan: &TransportPlan) -> Value {
    let mut m = Map::new();
    for ((a, b), w) in plan.weights() {
        m.insert(format!("{}->{}", x.label(*a), x.label(*b)), json!(w.to_string()));
    }
    Value::Object(m)
}

/// Inverse of [`plan_json`].
pub fn plan_from_json(x: &FiniteMetricSpace, v: &Value) -> Result<TransportPlan, IoError> {
    let weights: BTreeMap<String, Rational> = serde_json::from_value(v.clone())?;
    let mut plan = TransportPlan::new();
    for (key, w) in weights {
        let (a, b) = key
            .split_once("->")
            .ok_or_else(|| IoError::UnknownLabel(key.clone()))?;
        let ia = x.index_of(a).ok_or_else(|| IoError::UnknownLabel(a.into()))?;
        let ib = x.index_of(b).ok_or_else(|| IoError::UnknownLabel(b.into()))?;
        plan.add(ia, ib, &w);
    }
    Ok(plan)
}

pub fn polytope_v_json(p: &PolytopeV) -> Value {
    json!({"dim": p.dim, "vertices": p.vertices})
}

pub fn polytope_h_json(p: &PolytopeH) -> Value {
    json!({"dim": p.dim, "rows": p.rows})
}

#[cfg(test)]
mod tests {
    use super::*;

    const D3: &str = r#"{"labels":["a","b","c"],"dist":[[0,1,1],["1",0,1],[1,"1/1",0]]}"#;

    #[test]
    fn parses_space() {
        match parse_str(D3, Some(Kind::Space)).unwrap() {
            Input::Space(x) => assert_eq!(x.len(), 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_denominator_has_position() {
        let text = "{\"labels\":[\"a\",\"b\"],\n \"dist\":[[0,\"4/0\"],[\"4/0\",0]]}";
        match parse_str(text, None) {
            Err(IoError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn graph_is_not_space() {
        let g = r#"{"vertices":["a","b"],"edges":[["a","b","3/2"]]}"#;
        assert_eq!(
            parse_str(g, Some(Kind::Space)).unwrap_err(),
            IoError::KindMismatch {
                expected: Kind::Space,
                found: Kind::Graph
            }
        );
    }

    #[test]
    fn triangle_violation_is_validation() {
        let bad = r#"{"labels":["a","b","c"],"dist":[[0,1,5],[1,0,1],[5,1,0]]}"#;
        let e = parse_str(bad, None).unwrap_err();
        assert!(matches!(e, IoError::Metric(MetricError::TriangleViolation { .. })));
        assert_eq!(e.kind_name(), "ValidationError");
    }

    #[test]
    fn plan_round_trip() {
        let x = match parse_str(D3, None).unwrap() {
            Input::Space(x) => x,
            _ => unreachable!(),
        };
        let plan = TransportPlan::from_pairs([((0, 1), Rational::new(1, 2)), ((2, 1), Rational::one())]);
        let v = plan_json(&x, &plan);
        assert_eq!(v, json!({"a->b": "1/2", "c->b": "1"}));
        assert_eq!(plan_from_json(&x, &v).unwrap(), plan);
    }

    #[test]
    fn polytopes_and_hyperplanes() {
        let h = r#"{"dim":2,"rows":[{"normal":["1","0"],"offset":"1"}]}"#;
        assert!(matches!(parse_str(h, None).unwrap(), Input::PolytopeH(_)));
        let v = r#"{"dim":3,"vertices":[["1","1","-1"]]}"#;
        assert!(matches!(parse_str(v, None).unwrap(), Input::PolytopeV(_)));
        let s = r#"{"hyperplanes":[{"normal":["1","1"],"offset":"0"}]}"#;
        assert!(matches!(parse_str(s, None).unwrap(), Input::Hyperplanes(_)));
        let p = r#"{"dim":2,"points":[["0","0"],["1","0"]],"norm":"sup"}"#;
        assert!(matches!(parse_str(p, None).unwrap(), Input::PointSet(_)));
    }
}
