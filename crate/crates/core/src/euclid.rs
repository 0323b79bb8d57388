//! Euclidean minimum enclosing balls and the search for large nonexpansive
//! images of a finite metric space in `E^n`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::metric::{EmbeddedPointSet, FiniteMetricSpace, Norm};
use crate::radius::RadiusError;

/// Tolerance used for Euclidean containment and feasibility.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EuclideanBall {
    pub radius: f64,
    pub center: Vec<f64>,
    /// At most `n + 1` points on the boundary that determine the ball.
    pub support: Vec<usize>,
    /// Barycentric coordinates of the center over `support`.
    pub weights: Vec<f64>,
}

pub fn meb_euclidean(a: &EmbeddedPointSet) -> Result<EuclideanBall, RadiusError> {
    if a.norm != Norm::Euclidean {
        return Err(RadiusError::WrongNorm {
            expected: Norm::Euclidean,
        });
    }
    if a.points.is_empty() {
        return Err(RadiusError::Empty);
    }
    Ok(meb_points(&a.to_f64()))
}

/// Minimum enclosing ball by Welzl's recursion with move-to-front, starting
/// from the input order. Panics on an empty slice.
pub fn meb_points(points: &[Vec<f64>]) -> EuclideanBall {
    assert!(!points.is_empty(), "minimum enclosing ball of no points");
    let dim = points[0].len();
    let mut w = Welzl {
        pts: points,
        dim,
        order: (0..points.len()).collect(),
    };
    let mut boundary = Vec::with_capacity(dim + 1);
    let ball = w.mtf(points.len(), &mut boundary);
    EuclideanBall {
        radius: ball.r2.max(0.0).sqrt(),
        center: ball.center,
        support: ball.support,
        weights: ball.weights,
    }
}

struct Ball {
    center: Vec<f64>,
    r2: f64,
    support: Vec<usize>,
    weights: Vec<f64>,
}

impl Ball {
    fn contains(&self, p: &[f64]) -> bool {
        if self.r2 < 0.0 {
            return false;
        }
        let d2 = dist2(p, &self.center);
        let r = self.r2.sqrt();
        d2.sqrt() <= r + 1e-12 * (1.0 + r)
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

struct Welzl<'a> {
    pts: &'a [Vec<f64>],
    dim: usize,
    order: Vec<usize>,
}

impl Welzl<'_> {
    fn mtf(&mut self, end: usize, boundary: &mut Vec<usize>) -> Ball {
        let mut ball = self.circumball(boundary);
        if boundary.len() == self.dim + 1 {
            return ball;
        }
        for i in 0..end {
            let p = self.order[i];
            if !ball.contains(&self.pts[p]) {
                boundary.push(p);
                ball = self.mtf(i, boundary);
                boundary.pop();
                let v = self.order.remove(i);
                self.order.insert(0, v);
            }
        }
        ball
    }

    /// Smallest ball with every boundary point on its sphere: the center lies
    /// in their affine hull.
    fn circumball(&self, boundary: &[usize]) -> Ball {
        let Some(&first) = boundary.first() else {
            return Ball {
                center: vec![0.0; self.dim],
                r2: -1.0,
                support: vec![],
                weights: vec![],
            };
        };
        let p0 = &self.pts[first];
        let m = boundary.len() - 1;
        let vs: Vec<Vec<f64>> = boundary[1..]
            .iter()
            .map(|&i| self.pts[i].iter().zip(p0).map(|(a, b)| a - b).collect())
            .collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let lambda = if m == 0 {
            DVector::zeros(0)
        } else {
            let g = DMatrix::from_fn(m, m, |i, j| 2.0 * dot(&vs[i], &vs[j]));
            let rhs = DVector::from_fn(m, |i, _| dot(&vs[i], &vs[i]));
            g.clone()
                .lu()
                .solve(&rhs)
                .unwrap_or_else(|| g.svd(true, true).solve(&rhs, 1e-14).expect("svd solve"))
        };
        let mut center = p0.clone();
        for (k, v) in vs.iter().enumerate() {
            for (c, x) in center.iter_mut().zip(v) {
                *c += lambda[k] * x;
            }
        }
        let mut weights = Vec::with_capacity(m + 1);
        weights.push(1.0 - lambda.iter().sum::<f64>());
        weights.extend(lambda.iter());
        let r2 = boundary
            .iter()
            .map(|&i| dist2(&self.pts[i], &center))
            .fold(0.0, f64::max);
        Ball {
            center,
            r2,
            support: boundary.to_vec(),
            weights,
        }
    }
}

/// Fixed hyperparameters of the search, reported with every result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchParams {
    pub restarts: usize,
    pub seed: u64,
    /// Annealed ascent steps.
    pub iterations: usize,
    /// Ascent step on `r²`, interpolated linearly over the iterations.
    pub step_start: f64,
    pub step_end: f64,
    /// Sharpness of the soft enclosing-ball weights, interpolated
    /// geometrically over the iterations.
    pub beta_start: f64,
    pub beta_end: f64,
    /// Final ascent steps using the exact enclosing-ball weights.
    pub polish_iterations: usize,
    /// Dykstra cycles per projection.
    pub projection_cycles: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            restarts: 32,
            seed: 0,
            iterations: 300,
            step_start: 4.0,
            step_end: 0.5,
            beta_start: 5.0,
            beta_end: 100.0,
            polish_iterations: 300,
            projection_cycles: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    /// Enclosing radius of `config`, a lower bound on `map-rad(X, E^n)`.
    pub bound: f64,
    /// Image of each point; nonexpansive to within [`TOLERANCE`].
    pub config: Vec<Vec<f64>>,
    /// Restart that produced the configuration.
    pub restart: usize,
    pub dimension: usize,
    pub params: SearchParams,
    pub tolerance: f64,
}

/// Largest `max d(f(x), f(y)) / d(x, y)` over pairs.
pub fn lipschitz_ratio(x: &FiniteMetricSpace, config: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            worst = worst.max(dist2(&config[i], &config[j]).sqrt() / x.d(i, j).to_f64());
        }
    }
    worst
}

/// Scales the configuration about its mean so that it becomes nonexpansive.
pub fn repair(x: &FiniteMetricSpace, config: &mut [Vec<f64>]) {
    let ratio = lipschitz_ratio(x, config);
    if ratio <= 1.0 {
        return;
    }
    let s = 1.0 / ratio;
    for p in config.iter_mut() {
        for c in p.iter_mut() {
            *c *= s;
        }
    }
}

/// Multi-start search for a nonexpansive `f: X → E^n` with large enclosing
/// radius.
///
/// The set of nonexpansive configurations is convex and `r²` is a convex
/// function of the configuration, so each restart runs projected ascent:
/// first on a smoothed radius whose weights are a soft-max of the squared
/// distances to their weighted mean, then on the exact radius. Projections
/// are exact up to Dykstra's iteration; a final uniform contraction removes
/// any residual violation, so the reported radius is a valid lower bound.
///
/// Restart `i` draws from the ChaCha stream `(seed, i)`, so the result is
/// independent of scheduling and never decreases as restarts are added.
pub fn euclidean_map_rad_search(
    x: &FiniteMetricSpace,
    dimension: usize,
    params: &SearchParams,
) -> SearchResult {
    let dimension = dimension.max(1);
    let runs: Vec<(f64, Vec<Vec<f64>>)> = (0..params.restarts.max(1))
        .into_par_iter()
        .map(|i| single_restart(x, dimension, params, i))
        .collect();
    let (restart, (bound, config)) = runs
        .into_iter()
        .enumerate()
        .fold(None, |best: Option<(usize, (f64, Vec<Vec<f64>>))>, cur| match best {
            Some(b) if b.1 .0 >= cur.1 .0 => Some(b),
            _ => Some(cur),
        })
        .expect("at least one restart");
    SearchResult {
        bound,
        config,
        restart,
        dimension,
        params: params.clone(),
        tolerance: TOLERANCE,
    }
}

fn single_restart(
    x: &FiniteMetricSpace,
    dim: usize,
    params: &SearchParams,
    restart: usize,
) -> (f64, Vec<Vec<f64>>) {
    let n = x.len();
    if n == 1 {
        return (0.0, vec![vec![0.0; dim]]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(restart as u64);
    let d = float_distances(x);
    let diam = x.diameter().to_f64();
    let mut f: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(-diam..diam)).collect())
        .collect();
    let mut proj = Dykstra::new(n, dim);
    proj.project(&d, &mut f, 50 * params.projection_cycles, 1e-12);
    let total = params.iterations.max(1);
    for it in 0..params.iterations {
        let frac = it as f64 / total as f64;
        let step = params.step_start * (1.0 - frac) + params.step_end * frac;
        let beta = params.beta_start * (params.beta_end / params.beta_start).powf(frac);
        let (lam, c) = soft_weights(&f, beta);
        let mut y = f.clone();
        for i in 0..n {
            for k in 0..dim {
                y[i][k] += step * 2.0 * lam[i] * (f[i][k] - c[k]);
            }
        }
        proj.project(&d, &mut y, params.projection_cycles, 1e-15);
        f = y;
    }
    for _ in 0..params.polish_iterations {
        let ball = meb_points(&f);
        let mut y = f.clone();
        for (&i, &w) in ball.support.iter().zip(&ball.weights) {
            for k in 0..dim {
                y[i][k] += params.step_end * 2.0 * w.max(0.0) * (f[i][k] - ball.center[k]);
            }
        }
        proj.project(&d, &mut y, 2 * params.projection_cycles, 1e-15);
        f = y;
    }
    repair(x, &mut f);
    (meb_points(&f).radius, f)
}

fn float_distances(x: &FiniteMetricSpace) -> Vec<Vec<f64>> {
    x.matrix().iter().map(|r| r.iter().map(|v| v.to_f64()).collect()).collect()
}

/// Weights `λ_i ∝ exp(β |f_i − c|² / s²)` with `c` their own weighted mean,
/// a smoothed stand-in for the enclosing-ball dual weights.
fn soft_weights(f: &[Vec<f64>], beta: f64) -> (Vec<f64>, Vec<f64>) {
    let n = f.len();
    let dim = f[0].len();
    let mut c: Vec<f64> = (0..dim).map(|k| f.iter().map(|p| p[k]).sum::<f64>() / n as f64).collect();
    let mut lam = vec![1.0 / n as f64; n];
    for _ in 0..10 {
        let d2: Vec<f64> = f.iter().map(|p| dist2(p, &c)).collect();
        let scale = d2.iter().cloned().fold(0.0, f64::max).max(1e-300);
        let m = d2.iter().map(|v| beta * v / scale).fold(f64::MIN, f64::max);
        let e: Vec<f64> = d2.iter().map(|v| (beta * v / scale - m).exp()).collect();
        let z: f64 = e.iter().sum();
        lam = e.iter().map(|v| v / z).collect();
        c = (0..dim).map(|k| f.iter().zip(&lam).map(|(p, l)| l * p[k]).sum()).collect();
    }
    (lam, c)
}

/// Euclidean projection onto `{f : |f_i − f_j| ≤ d_ij for all pairs}` by
/// Dykstra's method, which is block coordinate ascent on the dual. The dual
/// variables persist between calls so nearby projections start warm.
struct Dykstra {
    pairs: Vec<(usize, usize)>,
    /// correction for endpoint `i` of each pair; endpoint `j` gets its negative
    inc: Vec<Vec<f64>>,
}

impl Dykstra {
    fn new(n: usize, dim: usize) -> Self {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let inc = vec![vec![0.0; dim]; pairs.len()];
        Dykstra { pairs, inc }
    }

    fn project(&mut self, d: &[Vec<f64>], f: &mut [Vec<f64>], cycles: usize, tol: f64) {
        let dim = f[0].len();
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            for k in 0..dim {
                f[i][k] -= self.inc[p][k];
                f[j][k] += self.inc[p][k];
            }
        }
        for _ in 0..cycles {
            let mut moved = 0.0f64;
            for (p, &(i, j)) in self.pairs.iter().enumerate() {
                let inc = &mut self.inc[p];
                let mut len2 = 0.0;
                for k in 0..dim {
                    let diff = (f[i][k] + inc[k]) - (f[j][k] - inc[k]);
                    len2 += diff * diff;
                }
                let len = len2.sqrt();
                let excess = len - d[i][j];
                let s = if excess > 0.0 { 0.5 * excess / len } else { 0.0 };
                for k in 0..dim {
                    let zi = f[i][k] + inc[k];
                    let zj = f[j][k] - inc[k];
                    let delta = s * (zi - zj);
                    moved = moved.max((inc[k] - delta).abs());
                    f[i][k] = zi - delta;
                    f[j][k] = zj + delta;
                    inc[k] = delta;
                }
            }
            if moved < tol {
                break;
            }
        }
    }
}
