#![allow(dead_code)]

use maprad_core::metric::{graph_metric, FiniteMetricSpace, WeightedGraph};
use maprad_core::park::{PolytopeH, PolytopeV};
use maprad_core::{Rational, SignedMeasure};
use rand::Rng;

pub fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Shortest-path metric of a complete graph with random weights in
/// `{1/2, 1, ..., 3}`, so many triangle inequalities are tight.
pub fn random_space<R: Rng>(rng: &mut R, n: usize) -> FiniteMetricSpace {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j, q(rng.random_range(1..=6), 2)));
        }
    }
    let labels = (0..n).map(|i| format!("p{i}")).collect();
    graph_metric(&WeightedGraph::new(labels, edges).unwrap()).unwrap()
}

/// Random tree metric with rational edge lengths.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> FiniteMetricSpace {
    let edges = (1..n)
        .map(|i| (rng.random_range(0..i), i, q(rng.random_range(1..=8), rng.random_range(1..=3))))
        .collect();
    let labels = (0..n).map(|i| format!("t{i}")).collect();
    graph_metric(&WeightedGraph::new(labels, edges).unwrap()).unwrap()
}

/// A measure of total mass zero with `pos` positive and `neg` negative
/// points, disjoint, all inside `0..n`.
pub fn random_u0<R: Rng>(rng: &mut R, n: usize, pos: usize, neg: usize) -> SignedMeasure {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        idx.swap(i, rng.random_range(0..=i));
    }
    let plus: Vec<Rational> = (0..pos).map(|_| r(rng.random_range(1..=5))).collect();
    let minus: Vec<Rational> = (0..neg).map(|_| r(rng.random_range(1..=5))).collect();
    let sp: Rational = plus.iter().sum();
    let sm: Rational = minus.iter().sum();
    let mut pairs = Vec::new();
    for (k, c) in plus.iter().enumerate() {
        pairs.push((idx[k], c * &sm));
    }
    for (k, c) in minus.iter().enumerate() {
        pairs.push((idx[pos + k], -(c * &sp)));
    }
    SignedMeasure::from_pairs(pairs)
}

/// A nonexpansive function `x ↦ min_i (v_i + d(x, a_i))` with random
/// anchors and offsets.
pub fn random_lipschitz<R: Rng>(rng: &mut R, x: &FiniteMetricSpace) -> Vec<Rational> {
    let anchors: Vec<(usize, Rational)> = (0..rng.random_range(1..=3))
        .map(|_| (rng.random_range(0..x.len()), q(rng.random_range(-6..=6), 2)))
        .collect();
    (0..x.len())
        .map(|p| anchors.iter().map(|(a, v)| v + x.d(p, *a)).min().unwrap())
        .collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Centrally symmetric `{x | |a_i · x| ≤ 1}` with random integer normals;
/// the coordinate normals are always included so it is bounded.
pub fn random_symmetric<R: Rng>(rng: &mut R, dim: usize) -> PolytopeH {
    let mut normals: Vec<Vec<Rational>> = (0..dim)
        .map(|j| (0..dim).map(|k| if j == k { q(1, rng.random_range(1..=3)) } else { r(0) }).collect())
        .collect();
    for _ in 0..rng.random_range(0..=4) {
        let n: Vec<Rational> = (0..dim).map(|_| q(rng.random_range(-4..=4), 3)).collect();
        if n.iter().any(|c| !c.is_zero()) {
            normals.push(n);
        }
    }
    PolytopeH::symmetric(dim, &normals).unwrap()
}

/// Largest `s ≥ 0` with `p + s u ∈ B`, given `p ∈ B`.
pub fn reach(b: &PolytopeH, p: &[Rational], u: &[Rational]) -> Rational {
    b.rows
        .iter()
        .filter_map(|row| {
            let au = dot(&row.normal, u);
            au.is_positive().then(|| (&row.offset - &dot(&row.normal, p)) / au)
        })
        .min()
        .expect("bounded polytope")
}

fn random_direction<R: Rng>(rng: &mut R, dim: usize) -> Vec<Rational> {
    loop {
        let u: Vec<Rational> = (0..dim).map(|_| r(rng.random_range(-5..=5))).collect();
        if u.iter().any(|c| !c.is_zero()) {
            return u;
        }
    }
}

/// A random point of `B` on a random ray from `from`.
pub fn random_point_in<R: Rng>(rng: &mut R, b: &PolytopeH, from: &[Rational]) -> Vec<Rational> {
    let u = random_direction(rng, b.dim);
    let s = reach(b, from, &u) * q(rng.random_range(0..=8), 8);
    from.iter().zip(&u).map(|(p, c)| p + &(c * &s)).collect()
}

/// A random polytope `C ⊆ B` given by up to six points.
pub fn random_inner<R: Rng>(rng: &mut R, b: &PolytopeH) -> PolytopeV {
    let origin = vec![r(0); b.dim];
    let pts = (0..rng.random_range(1..=6)).map(|_| random_point_in(rng, b, &origin)).collect();
    PolytopeV::new(b.dim, pts).unwrap()
}

/// A random centrally symmetric `C ⊆ B` with its center.
pub fn random_symmetric_inner<R: Rng>(rng: &mut R, b: &PolytopeH) -> (PolytopeV, Vec<Rational>) {
    let origin = vec![r(0); b.dim];
    let z = random_point_in(rng, b, &origin);
    let mut pts = Vec::new();
    for _ in 0..rng.random_range(1..=3) {
        let u = random_direction(rng, b.dim);
        let back: Vec<Rational> = u.iter().map(|c| -c).collect();
        let s = reach(b, &z, &u).min(reach(b, &z, &back)) * q(rng.random_range(0..=4), 4);
        pts.push(z.iter().zip(&u).map(|(p, c)| p + &(c * &s)).collect::<Vec<_>>());
        pts.push(z.iter().zip(&u).map(|(p, c)| p - &(c * &s)).collect::<Vec<_>>());
    }
    (PolytopeV::new(b.dim, pts).unwrap(), z)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Solves a small dense system by Gaussian elimination with partial
/// pivoting; `None` when (nearly) singular.
fn solve(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() < 1e-12 {
            return None;
        }
        m.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / m[i][i];
    }
    Some(x)
}

/// Center of the smallest sphere through `pts` within their affine hull.
fn circumcenter(pts: &[&Vec<f64>]) -> Option<Vec<f64>> {
    let p0 = pts[0];
    let k = pts.len() - 1;
    if k == 0 {
        return Some(p0.clone());
    }
    let v: Vec<Vec<f64>> = pts[1..].iter().map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect()).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let gram: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| 2.0 * dot(&v[i], &v[j])).collect()).collect();
    let rhs: Vec<f64> = (0..k).map(|i| dot(&v[i], &v[i])).collect();
    let lam = solve(gram, rhs)?;
    Some((0..p0.len()).map(|c| p0[c] + (0..k).map(|i| lam[i] * v[i][c]).sum::<f64>()).collect())
}

/// Minimum enclosing ball radius by trying the circumball of every subset
/// of at most `dim + 1` points and keeping the smallest that covers all.
pub fn meb_radius_oracle(points: &[Vec<f64>]) -> f64 {
    let dim = points[0].len();
    let n = points.len();
    let mut best = f64::INFINITY;
    let mut subset = Vec::new();
    fn go(
        start: usize,
        max: usize,
        points: &[Vec<f64>],
        subset: &mut Vec<usize>,
        best: &mut f64,
    ) {
        if !subset.is_empty() {
            let sel: Vec<&Vec<f64>> = subset.iter().map(|&i| &points[i]).collect();
            if let Some(c) = circumcenter(&sel) {
                let rad = points.iter().map(|p| dist(p, &c)).fold(0.0, f64::max);
                let on = dist(sel[0], &c);
                if rad <= on + 1e-9 && rad < *best {
                    *best = rad;
                }
            }
        }
        if subset.len() == max {
            return;
        }
        for i in start..points.len() {
            subset.push(i);
            go(i + 1, max, points, subset, best);
            subset.pop();
        }
    }
    go(0, (dim + 1).min(n), points, &mut subset, &mut best);
    best
}
