//! Finite metric spaces, weighted graphs and the spaces derived from them.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("distance matrix is {rows}x{cols} but there are {labels} labels")]
    ShapeMismatch {
        labels: usize,
        rows: usize,
        cols: usize,
    },
    #[error("the empty space is not allowed")]
    Empty,
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("d({a},{b}) = {ab} but d({b},{a}) = {ba}")]
    AsymmetryError {
        a: String,
        b: String,
        ab: Rational,
        ba: Rational,
    },
    #[error("d({a},{b}) = {d} must be positive for distinct points")]
    NegativeOrZeroOffDiagonal { a: String, b: String, d: Rational },
    #[error("d({a},{a}) = {d} must be zero")]
    NonzeroDiagonal { a: String, d: Rational },
    #[error("triangle inequality fails: d({a},{c}) = {ac} > d({a},{b}) + d({b},{c}) = {via}")]
    TriangleViolation {
        a: String,
        b: String,
        c: String,
        ac: Rational,
        via: Rational,
    },
    #[error("graph is disconnected: {0:?} is unreachable from {1:?}")]
    DisconnectedGraph(String, String),
    #[error("edge {0:?}-{1:?} has non-positive length {2}")]
    NonPositiveEdge(String, String, Rational),
    #[error("self-loop at {0:?}")]
    SelfLoop(String),
    #[error("edge references unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("unknown builtin space {0:?}")]
    UnknownName(String),
    #[error("bad parameters for {name}: {reason}")]
    BadParams { name: String, reason: String },
    #[error("subdivision count must be at least 1")]
    BadSubdivision,
}

/// Labeled points with an exact distance matrix satisfying the metric axioms.
///
/// Only constructible through [`FiniteMetricSpace::new`], which validates,
/// so every value of this type is a metric space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<Rational>>,
}

impl FiniteMetricSpace {
    /// Validates the metric axioms and builds the space.
    pub fn new(labels: Vec<String>, dist: Vec<Vec<Rational>>) -> Result<Self, MetricError> {
        let n = labels.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        let cols = dist.iter().map(Vec::len).max().unwrap_or(0);
        if dist.len() != n || dist.iter().any(|r| r.len() != n) {
            return Err(MetricError::ShapeMismatch {
                labels: n,
                rows: dist.len(),
                cols,
            });
        }
        let mut seen = HashMap::new();
        for l in &labels {
            if seen.insert(l.as_str(), ()).is_some() {
                return Err(MetricError::DuplicateLabel(l.clone()));
            }
        }
        for i in 0..n {
            if !dist[i][i].is_zero() {
                return Err(MetricError::NonzeroDiagonal {
                    a: labels[i].clone(),
                    d: dist[i][i].clone(),
                });
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                if dist[i][j] != dist[j][i] {
                    return Err(MetricError::AsymmetryError {
                        a: labels[i].clone(),
                        b: labels[j].clone(),
                        ab: dist[i][j].clone(),
                        ba: dist[j][i].clone(),
                    });
                }
                if !dist[i][j].is_positive() {
                    return Err(MetricError::NegativeOrZeroOffDiagonal {
                        a: labels[i].clone(),
                        b: labels[j].clone(),
                        d: dist[i][j].clone(),
                    });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let via = &dist[a][b] + &dist[b][c];
                    if dist[a][c] > via {
                        return Err(MetricError::TriangleViolation {
                            a: labels[a].clone(),
                            b: labels[b].clone(),
                            c: labels[c].clone(),
                            ac: dist[a][c].clone(),
                            via,
                        });
                    }
                }
            }
        }
        Ok(FiniteMetricSpace { labels, dist })
    }

    /// Space with default labels `p0, p1, ...`.
    pub fn from_matrix(dist: Vec<Vec<Rational>>) -> Result<Self, MetricError> {
        let labels = (0..dist.len()).map(|i| format!("p{i}")).collect();
        Self::new(labels, dist)
    }

    /// Subset of the real line with the induced metric, labeled by value.
    pub fn from_reals(values: &[Rational]) -> Result<Self, MetricError> {
        let labels = values.iter().map(|v| v.to_string()).collect();
        let dist = values
            .iter()
            .map(|a| values.iter().map(|b| (a - b).abs()).collect())
            .collect();
        Self::new(labels, dist)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn d(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    pub fn diameter(&self) -> Rational {
        self.dist
            .iter()
            .flat_map(|r| r.iter())
            .max()
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// `max_x d(p, x)`.
    pub fn eccentricity(&self, p: usize) -> Rational {
        self.dist[p].iter().max().cloned().unwrap_or_else(Rational::zero)
    }

    /// `rad_X(X)` together with the first center (in label order) attaining it.
    pub fn intrinsic_radius(&self) -> (Rational, usize) {
        let mut best = (self.eccentricity(0), 0);
        for p in 1..self.len() {
            let e = self.eccentricity(p);
            if e < best.0 {
                best = (e, p);
            }
        }
        best
    }

    /// Subspace on the given point indices, in the given order.
    pub fn subspace(&self, idx: &[usize]) -> Result<Self, MetricError> {
        let labels = idx.iter().map(|&i| self.labels[i].clone()).collect();
        let dist = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| self.dist[i][j].clone()).collect())
            .collect();
        Self::new(labels, dist)
    }

    /// The complete graph carrying every pairwise distance as an edge length.
    pub fn complete_graph(&self) -> WeightedGraph {
        let mut edges = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                edges.push((i, j, self.dist[i][j].clone()));
            }
        }
        WeightedGraph {
            vertices: self.labels.clone(),
            edges,
        }
    }

    /// Pairs `(y, z)` that no third point lies metrically between, i.e.
    /// there is no `w` with `d(y,w) + d(w,z) = d(y,z)`. Any transport along
    /// another pair can be rerouted through these at the same cost.
    pub fn irreducible_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for y in 0..n {
            for z in 0..n {
                if y == z {
                    continue;
                }
                let between = (0..n)
                    .any(|w| w != y && w != z && &self.dist[y][w] + &self.dist[w][z] == self.dist[y][z]);
                if !between {
                    out.push((y, z));
                }
            }
        }
        out
    }
}

/// Points embedded in `R^n` with rational coordinates under a chosen norm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddedPointSet {
    pub dim: usize,
    pub points: Vec<Vec<Rational>>,
    pub norm: Norm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    Sup,
    Euclidean,
}

impl EmbeddedPointSet {
    pub fn new(dim: usize, points: Vec<Vec<Rational>>, norm: Norm) -> Result<Self, MetricError> {
        if let Some(bad) = points.iter().find(|p| p.len() != dim) {
            return Err(MetricError::BadParams {
                name: "point set".into(),
                reason: format!("point has {} coordinates, expected {dim}", bad.len()),
            });
        }
        Ok(EmbeddedPointSet { dim, points, norm })
    }

    pub fn sup_distance(a: &[Rational], b: &[Rational]) -> Rational {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.points
            .iter()
            .map(|p| p.iter().map(Rational::to_f64).collect())
            .collect()
    }
}

/// Undirected graph with positive rational edge lengths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightedGraph {
    vertices: Vec<String>,
    /// `(u, v, length)` by vertex index; parallel edges are kept.
    edges: Vec<(usize, usize, Rational)>,
}

impl WeightedGraph {
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<(usize, usize, Rational)>,
    ) -> Result<Self, MetricError> {
        let mut seen = HashMap::new();
        for v in &vertices {
            if seen.insert(v.as_str(), ()).is_some() {
                return Err(MetricError::DuplicateLabel(v.clone()));
            }
        }
        for (u, v, len) in &edges {
            let name = |i: usize| {
                vertices
                    .get(i)
                    .cloned()
                    .ok_or_else(|| MetricError::UnknownVertex(format!("#{i}")))
            };
            let (a, b) = (name(*u)?, name(*v)?);
            if u == v {
                return Err(MetricError::SelfLoop(a));
            }
            if !len.is_positive() {
                return Err(MetricError::NonPositiveEdge(a, b, len.clone()));
            }
        }
        Ok(WeightedGraph { vertices, edges })
    }

    /// Builds a graph from labeled edges.
    pub fn from_labeled(
        vertices: Vec<String>,
        edges: &[(String, String, Rational)],
    ) -> Result<Self, MetricError> {
        let index: HashMap<&str, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let mut out = Vec::with_capacity(edges.len());
        for (a, b, len) in edges {
            let u = *index
                .get(a.as_str())
                .ok_or_else(|| MetricError::UnknownVertex(a.clone()))?;
            let v = *index
                .get(b.as_str())
                .ok_or_else(|| MetricError::UnknownVertex(b.clone()))?;
            out.push((u, v, len.clone()));
        }
        Self::new(vertices, out)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize, Rational)] {
        &self.edges
    }

    pub fn max_edge_length(&self) -> Option<Rational> {
        self.edges.iter().map(|e| e.2.clone()).max()
    }
}

/// All-pairs shortest paths (Floyd–Warshall) in exact arithmetic.
pub fn graph_metric(g: &WeightedGraph) -> Result<FiniteMetricSpace, MetricError> {
    let n = g.vertices.len();
    if n == 0 {
        return Err(MetricError::Empty);
    }
    let mut d: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(Rational::zero());
    }
    for (u, v, len) in &g.edges {
        let better = d[*u][*v].as_ref().is_none_or(|cur| len < cur);
        if better {
            d[*u][*v] = Some(len.clone());
            d[*v][*u] = Some(len.clone());
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = d[i][k].clone() else { continue };
            for j in 0..n {
                let Some(kj) = &d[k][j] else { continue };
                let via = &ik + kj;
                if d[i][j].as_ref().is_none_or(|cur| via < *cur) {
                    d[i][j] = Some(via);
                }
            }
        }
    }
    let mut dist = Vec::with_capacity(n);
    for (i, row) in d.into_iter().enumerate() {
        let mut out = Vec::with_capacity(n);
        for (j, v) in row.into_iter().enumerate() {
            match v {
                Some(v) => out.push(v),
                None => {
                    return Err(MetricError::DisconnectedGraph(
                        g.vertices[j].clone(),
                        g.vertices[i].clone(),
                    ))
                }
            }
        }
        dist.push(out);
    }
    FiniteMetricSpace::new(g.vertices.clone(), dist)
}

/// Subdivides every edge into `k` equal pieces and returns the path metric of
/// the result. Original vertices keep their labels and come first; interior
/// points of edge `u-v` are labeled `u-v:i/k`.
pub fn subdivide_graph(g: &WeightedGraph, k: usize) -> Result<WeightedGraph, MetricError> {
    if k == 0 {
        return Err(MetricError::BadSubdivision);
    }
    let mut vertices = g.vertices.clone();
    let mut edges = Vec::new();
    let mut used: HashMap<String, usize> = HashMap::new();
    let kq = Rational::from(k);
    for (u, v, len) in &g.edges {
        if k == 1 {
            edges.push((*u, *v, len.clone()));
            continue;
        }
        let base = format!("{}-{}", g.vertices[*u], g.vertices[*v]);
        let count = used.entry(base.clone()).or_insert(0);
        *count += 1;
        let stem = if *count == 1 {
            base
        } else {
            format!("{base}#{count}")
        };
        let piece = len / &kq;
        let mut prev = *u;
        for i in 1..k {
            vertices.push(format!("{stem}:{i}/{k}"));
            let cur = vertices.len() - 1;
            edges.push((prev, cur, piece.clone()));
            prev = cur;
        }
        edges.push((prev, *v, piece));
    }
    WeightedGraph::new(vertices, edges)
}

/// Metric of `g` with each edge cut into `k` equal sub-edges.
pub fn discretize_graph(g: &WeightedGraph, k: usize) -> Result<FiniteMetricSpace, MetricError> {
    graph_metric(&subdivide_graph(g, k)?)
}

/// Sup-norm embedding `x ↦ (d(x, x_j))_j`; isometric for finite spaces.
pub fn kuratowski_embedding(x: &FiniteMetricSpace) -> EmbeddedPointSet {
    EmbeddedPointSet {
        dim: x.len(),
        points: x.dist.clone(),
        norm: Norm::Sup,
    }
}

/// Result of [`builtin_space`]: either a ready metric space or a graph still
/// to be measured or discretized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Builtin {
    Space(FiniteMetricSpace),
    Graph(WeightedGraph),
}

impl Builtin {
    /// The metric of the builtin, using the graph metric for graphs.
    pub fn into_space(self) -> Result<FiniteMetricSpace, MetricError> {
        match self {
            Builtin::Space(x) => Ok(x),
            Builtin::Graph(g) => graph_metric(&g),
        }
    }

    /// The space, discretizing graphs with `k` pieces per edge. Plain spaces
    /// ignore `k`.
    pub fn discretized(self, k: usize) -> Result<FiniteMetricSpace, MetricError> {
        match self {
            Builtin::Space(x) => Ok(x),
            Builtin::Graph(g) => discretize_graph(&g, k),
        }
    }
}

/// Splits `D_3`, `cycle(4,8)`, `line(0,1/2,1)` or a bare name into a name and
/// its rational parameters.
pub fn parse_builtin(spec: &str) -> Result<(String, Vec<Rational>), MetricError> {
    let spec = spec.trim();
    let bad = |reason: &str| MetricError::BadParams {
        name: spec.to_string(),
        reason: reason.to_string(),
    };
    if let Some(m) = spec.strip_prefix("D_") {
        let m: Rational = m.parse().map_err(|_| bad("expected D_<m>"))?;
        return Ok(("D".into(), vec![m]));
    }
    if let Some(open) = spec.find('(') {
        let inner = spec[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| bad("missing closing parenthesis"))?;
        let params = inner
            .split(',')
            .map(|t| t.trim().parse::<Rational>().map_err(|_| bad("parameter is not a rational")))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok((spec[..open].trim().to_string(), params));
    }
    Ok((spec.to_string(), Vec::new()))
}

fn positive_count(name: &str, v: &Rational) -> Result<usize, MetricError> {
    if !v.is_integer() || !v.is_positive() {
        return Err(MetricError::BadParams {
            name: name.into(),
            reason: format!("{v} is not a positive integer"),
        });
    }
    v.to_string().parse().map_err(|_| MetricError::BadParams {
        name: name.into(),
        reason: format!("{v} is too large"),
    })
}

fn unit_graph(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> WeightedGraph {
    let vertices = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if adjacent(i, j) {
                edges.push((i, j, Rational::one()));
            }
        }
    }
    WeightedGraph { vertices, edges }
}

/// Named example spaces.
///
/// * `D` with `[m]`: `m` points at mutual distance 1, labeled `p0..`.
/// * `cycle` with `[L, k]`: `k` equally spaced points on a circle of
///   circumference `L`, arc-length metric.
/// * `line` with any values: the subset of the real line.
/// * `octahedron_skeleton`, `tetrahedron_skeleton`, `cube_skeleton`: unit-edge
///   1-skeleta as graphs. Octahedron vertices `v2i` and `v2i+1` are opposite;
///   cube vertex `vi` sits at the bit pattern of `i`.
/// * `seven_point`: the graph with `x - y_i` of length 1 and `y_i - z_j` of
///   length 2 for `i != j`.
pub fn builtin_space(name: &str, params: &[Rational]) -> Result<Builtin, MetricError> {
    let bad = |reason: String| MetricError::BadParams {
        name: name.into(),
        reason,
    };
    let arity = |n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(bad(format!("expected {n} parameters, got {}", params.len())))
        }
    };
    match name {
        "D" => {
            arity(1)?;
            let m = positive_count(name, &params[0])?;
            let dist = (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| if i == j { Rational::zero() } else { Rational::one() })
                        .collect()
                })
                .collect();
            Ok(Builtin::Space(FiniteMetricSpace::from_matrix(dist)?))
        }
        "cycle" => {
            arity(2)?;
            let len = &params[0];
            if !len.is_positive() {
                return Err(bad("circumference must be positive".into()));
            }
            let k = positive_count(name, &params[1])?;
            let step = len / &Rational::from(k);
            let dist = (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| {
                            let gap = i.abs_diff(j);
                            &step * &Rational::from(gap.min(k - gap))
                        })
                        .collect()
                })
                .collect();
            Ok(Builtin::Space(FiniteMetricSpace::from_matrix(dist)?))
        }
        "line" => {
            if params.is_empty() {
                return Err(bad("expected at least one value".into()));
            }
            Ok(Builtin::Space(FiniteMetricSpace::from_reals(params)?))
        }
        "octahedron_skeleton" => {
            arity(0)?;
            Ok(Builtin::Graph(unit_graph(6, |i, j| i / 2 != j / 2)))
        }
        "tetrahedron_skeleton" => {
            arity(0)?;
            Ok(Builtin::Graph(unit_graph(4, |_, _| true)))
        }
        "cube_skeleton" => {
            arity(0)?;
            Ok(Builtin::Graph(unit_graph(8, |i, j| (i ^ j).count_ones() == 1)))
        }
        "seven_point" => {
            arity(0)?;
            let vertices: Vec<String> = ["x", "y0", "y1", "y2", "z0", "z1", "z2"]
                .iter()
                .map(|s| s.to_string())
                .collect();
            let mut edges = Vec::new();
            for i in 0..3 {
                edges.push((0, 1 + i, Rational::one()));
            }
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        edges.push((1 + i, 4 + j, Rational::from(2)));
                    }
                }
            }
            Ok(Builtin::Graph(WeightedGraph { vertices, edges }))
        }
        _ => Err(MetricError::UnknownName(name.into())),
    }
}

/// [`parse_builtin`] followed by [`builtin_space`].
pub fn builtin(spec: &str) -> Result<Builtin, MetricError> {
    let (name, params) = parse_builtin(spec)?;
    builtin_space(&name, &params)
}
