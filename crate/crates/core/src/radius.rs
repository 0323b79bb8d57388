//! Exact radius and mapping-radius computations.

use serde::Serialize;
use thiserror::Error;

use crate::arens_eells::{boundary, canonicalize, SignedMeasure, TransportPlan};
use crate::euclid::{euclidean_map_rad_search, SearchParams};
use crate::lp::{solve_lp, LpError, LpProblem, Relation, Sense, VarId};
use crate::metric::{EmbeddedPointSet, FiniteMetricSpace, Norm};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RadiusError {
    #[error("point set is empty")]
    Empty,
    #[error("expected a {expected:?}-norm point set")]
    WrongNorm { expected: Norm },
    #[error("{count} maps exceed the budget of {budget}")]
    BudgetExceeded { count: String, budget: u64 },
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// `map-rad(X, Conv)` with an optimal probability measure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvRadiusResult {
    pub value: Rational,
    pub measure: SignedMeasure,
    /// Points `x` with `Σ_z μ(z) d(x,z) = value`.
    pub tight_points: Vec<usize>,
}

/// `map-rad(X, NmV)` with a witness `μ` of total mass 1 and, for every point
/// `x`, an acyclic plan `ν^x` with `D(ν^x) = μ − μ_x` and cost at most the
/// value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NmvRadiusResult {
    pub value: Rational,
    pub mu: SignedMeasure,
    pub plans: Vec<TransportPlan>,
}

/// Sup-norm Chebyshev ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupBall {
    pub radius: Rational,
    pub center: Vec<Rational>,
    /// Points at distance exactly `radius` from the center.
    pub support: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Within {
    Ambient,
    Hull,
}

/// `∫ d(x, z) dμ(z)`.
pub fn expected_distance(x: &FiniteMetricSpace, mu: &SignedMeasure, p: usize) -> Rational {
    mu.coeffs().iter().map(|(z, w)| w * x.d(p, *z)).sum()
}

/// Minimizes `t` over probability vectors `w` subject to
/// `Σ_z w_z d(x, z) ≤ t` for every `x`. The returned measure is, among the
/// optimal ones, a minimizer of `Σ_x Σ_z w_z d(x, z)`.
pub fn map_rad_conv(x: &FiniteMetricSpace) -> Result<ConvRadiusResult, RadiusError> {
    let n = x.len();
    if n == 1 {
        return Ok(ConvRadiusResult {
            value: Rational::zero(),
            measure: SignedMeasure::dirac(0),
            tight_points: vec![0],
        });
    }
    let mut lp = LpProblem::new(Sense::Minimize);
    let w: Vec<VarId> = (0..n).map(|z| lp.add_nonneg(format!("w{z}"))).collect();
    let t = lp.add_free("t");
    lp.set_objective(vec![(t, Rational::one())]);
    lp.add_constraint(
        w.iter().map(|&v| (v, Rational::one())).collect(),
        Relation::Eq,
        Rational::one(),
    );
    for p in 0..n {
        let mut row: Vec<(VarId, Rational)> = (0..n)
            .filter(|&z| z != p)
            .map(|z| (w[z], x.d(p, z).clone()))
            .collect();
        row.push((t, -Rational::one()));
        lp.add_constraint(row, Relation::Le, Rational::zero());
    }
    let sol = solve_lp(&lp)?;
    let value = sol.value.expect("conv LP is feasible and bounded");

    // Among optimal measures take one minimizing the mean expected distance.
    let mut tie = LpProblem::new(Sense::Minimize);
    let w: Vec<VarId> = (0..n).map(|z| tie.add_nonneg(format!("w{z}"))).collect();
    tie.set_objective(
        (0..n)
            .map(|z| (w[z], x.matrix()[z].iter().sum::<Rational>()))
            .collect(),
    );
    tie.add_constraint(
        w.iter().map(|&v| (v, Rational::one())).collect(),
        Relation::Eq,
        Rational::one(),
    );
    for p in 0..n {
        let row = (0..n)
            .filter(|&z| z != p)
            .map(|z| (w[z], x.d(p, z).clone()))
            .collect();
        tie.add_constraint(row, Relation::Le, value.clone());
    }
    let a = solve_lp(&tie)?
        .assignment
        .expect("the optimal face is nonempty");
    let measure = SignedMeasure::from_pairs((0..n).map(|z| (z, a[w[z].0].clone())));
    let tight_points = (0..n)
        .filter(|&p| expected_distance(x, &measure, p) == value)
        .collect();
    Ok(ConvRadiusResult {
        value,
        measure,
        tight_points,
    })
}

/// Exact `map-rad(X, NmV)`.
///
/// Solved as one LP over a free `μ` of mass 1, a bound `t`, and for each `x`
/// a nonnegative plan with boundary `μ − μ_x` and cost at most `t`. Plans
/// are restricted to pairs with no point metrically between them, which
/// loses nothing since any plan can be rerouted through such pairs at equal
/// cost. When `map-rad(X, Conv)` already equals `diam/2` the two values
/// coincide and the Conv measure is returned with its star plans.
pub fn map_rad_nmv(x: &FiniteMetricSpace) -> Result<NmvRadiusResult, RadiusError> {
    let n = x.len();
    let conv = map_rad_conv(x)?;
    let half = x.diameter() / Rational::from(2);
    if conv.value == half {
        let plans = (0..n)
            .map(|p| {
                let star = TransportPlan::from_pairs(
                    conv.measure.coeffs().iter().map(|(z, w)| ((*z, p), w.clone())),
                );
                canonicalize(x, &star)
            })
            .collect();
        return Ok(NmvRadiusResult {
            value: half,
            mu: conv.measure,
            plans,
        });
    }

    let pairs = x.irreducible_pairs();
    let mut lp = LpProblem::new(Sense::Minimize);
    let a: Vec<VarId> = (0..n).map(|z| lp.add_free(format!("a{z}"))).collect();
    let t = lp.add_free("t");
    lp.set_objective(vec![(t, Rational::one())]);
    lp.add_constraint(
        a.iter().map(|&v| (v, Rational::one())).collect(),
        Relation::Eq,
        Rational::one(),
    );
    let mut nu: Vec<Vec<VarId>> = Vec::with_capacity(n);
    for p in 0..n {
        let vars: Vec<VarId> = pairs
            .iter()
            .map(|(y, z)| lp.add_nonneg(format!("nu{p}_{y}_{z}")))
            .collect();
        // D(ν^p)(w) − a_w = −[w = p]
        for wpt in 0..n {
            let mut row: Vec<(VarId, Rational)> = Vec::new();
            for (k, &(y, z)) in pairs.iter().enumerate() {
                if y == wpt {
                    row.push((vars[k], Rational::one()));
                } else if z == wpt {
                    row.push((vars[k], -Rational::one()));
                }
            }
            row.push((a[wpt], -Rational::one()));
            let rhs = if wpt == p { -Rational::one() } else { Rational::zero() };
            lp.add_constraint(row, Relation::Eq, rhs);
        }
        let mut cost: Vec<(VarId, Rational)> = pairs
            .iter()
            .enumerate()
            .map(|(k, &(y, z))| (vars[k], x.d(y, z).clone()))
            .collect();
        cost.push((t, -Rational::one()));
        lp.add_constraint(cost, Relation::Le, Rational::zero());
        nu.push(vars);
    }
    log::debug!(
        "nmv LP: {} variables, {} constraints",
        lp.vars.len(),
        lp.constraints.len()
    );
    let sol = solve_lp(&lp)?;
    let v = sol.assignment.expect("nmv LP is feasible and bounded");
    let mu = SignedMeasure::from_pairs((0..n).map(|z| (z, v[a[z].0].clone())));
    let plans = nu
        .iter()
        .map(|vars| {
            let raw = TransportPlan::from_pairs(
                pairs.iter().zip(vars).map(|(&e, var)| (e, v[var.0].clone())),
            );
            canonicalize(x, &raw)
        })
        .collect();
    Ok(NmvRadiusResult {
        value: v[t.0].clone(),
        mu,
        plans,
    })
}

/// True iff every plan has boundary `μ − μ_x`, no undirected cycle, and
/// cost at most `value`.
pub fn verify_nmv(x: &FiniteMetricSpace, r: &NmvRadiusResult) -> bool {
    r.mu.in_u1()
        && r.plans.len() == x.len()
        && r.plans.iter().enumerate().all(|(p, plan)| {
            boundary(plan) == r.mu.minus(&SignedMeasure::dirac(p))
                && !plan.graph().has_undirected_cycle()
                && plan.cost(x) <= r.value
        })
}

/// Exact sup-norm Chebyshev radius, with the center free in `R^n` or
/// restricted to the convex hull of the points.
pub fn chebyshev_supnorm(a: &EmbeddedPointSet, within: Within) -> Result<SupBall, RadiusError> {
    if a.norm != Norm::Sup {
        return Err(RadiusError::WrongNorm { expected: Norm::Sup });
    }
    if a.points.is_empty() {
        return Err(RadiusError::Empty);
    }
    let dim = a.dim;
    let mut lp = LpProblem::new(Sense::Minimize);
    let t = lp.add_nonneg("t");
    lp.set_objective(vec![(t, Rational::one())]);
    // center coordinate j as a sparse linear form
    let center: Vec<Vec<(VarId, Rational)>> = match within {
        Within::Ambient => (0..dim)
            .map(|j| vec![(lp.add_free(format!("y{j}")), Rational::one())])
            .collect(),
        Within::Hull => {
            let lam: Vec<VarId> = (0..a.points.len())
                .map(|i| lp.add_nonneg(format!("l{i}")))
                .collect();
            lp.add_constraint(
                lam.iter().map(|&v| (v, Rational::one())).collect(),
                Relation::Eq,
                Rational::one(),
            );
            (0..dim)
                .map(|j| {
                    lam.iter()
                        .zip(&a.points)
                        .filter(|(_, p)| !p[j].is_zero())
                        .map(|(&v, p)| (v, p[j].clone()))
                        .collect()
                })
                .collect()
        }
    };
    for p in &a.points {
        for j in 0..dim {
            let mut up = center[j].clone();
            up.push((t, -Rational::one()));
            lp.add_constraint(up, Relation::Le, p[j].clone());
            let mut down = center[j].clone();
            down.push((t, Rational::one()));
            lp.add_constraint(down, Relation::Ge, p[j].clone());
        }
    }
    let sol = solve_lp(&lp)?;
    let v = sol.assignment.expect("Chebyshev LP is feasible and bounded");
    let c: Vec<Rational> = center
        .iter()
        .map(|form| form.iter().map(|(var, k)| k * &v[var.0]).sum())
        .collect();
    let radius = v[t.0].clone();
    let support = a
        .points
        .iter()
        .enumerate()
        .filter(|(_, p)| EmbeddedPointSet::sup_distance(p, &c) == radius)
        .map(|(i, _)| i)
        .collect();
    Ok(SupBall {
        radius,
        center: c,
        support,
    })
}

pub const DEFAULT_BRUTE_BUDGET: u64 = 10_000_000;

fn check_budget(x: &FiniteMetricSpace, y: &FiniteMetricSpace, budget: u64) -> Result<(), RadiusError> {
    let count = (y.len() as u64).checked_pow(x.len() as u32);
    match count {
        Some(c) if c <= budget => Ok(()),
        _ => Err(RadiusError::BudgetExceeded {
            count: format!("{}^{}", y.len(), x.len()),
            budget,
        }),
    }
}

/// Calls `visit` on every nonexpansive map `X → Y` (as the list of images),
/// extending partial maps only while they stay nonexpansive.
fn for_each_nonexpansive(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    visit: &mut impl FnMut(&[usize]),
) {
    fn go(
        x: &FiniteMetricSpace,
        y: &FiniteMetricSpace,
        f: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]),
    ) {
        let i = f.len();
        if i == x.len() {
            visit(f);
            return;
        }
        for img in 0..y.len() {
            if (0..i).all(|j| y.d(f[j], img) <= x.d(j, i)) {
                f.push(img);
                go(x, y, f, visit);
                f.pop();
            }
        }
    }
    go(x, y, &mut Vec::with_capacity(x.len()), visit);
}

/// `rad_Y(A) = min_y max_{a ∈ A} d(y, a)`.
pub fn rad_in(y: &FiniteMetricSpace, image: &[usize]) -> Rational {
    (0..y.len())
        .map(|c| image.iter().map(|&a| y.d(c, a)).max().cloned().unwrap_or_default())
        .min()
        .unwrap_or_default()
}

/// `corad_Y(A) = max_y min_{a ∈ A} d(y, a)`.
pub fn corad_in(y: &FiniteMetricSpace, image: &[usize]) -> Rational {
    (0..y.len())
        .map(|c| image.iter().map(|&a| y.d(c, a)).min().cloned().unwrap_or_default())
        .max()
        .unwrap_or_default()
}

/// `map-rad(X, Y)` by exhausting all maps; returns the first maximizing map
/// in lexicographic order.
pub fn map_rad_bruteforce(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    budget: u64,
) -> Result<(Rational, Vec<usize>), RadiusError> {
    check_budget(x, y, budget)?;
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for_each_nonexpansive(x, y, &mut |f| {
        let r = rad_in(y, f);
        if best.as_ref().is_none_or(|b| r > b.0) {
            best = Some((r, f.to_vec()));
        }
    });
    Ok(best.expect("constant maps are nonexpansive"))
}

/// `map-corad(X, Y)`: the least co-radius of a nonexpansive image; returns
/// the first minimizing map in lexicographic order.
pub fn map_corad_bruteforce(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    budget: u64,
) -> Result<(Rational, Vec<usize>), RadiusError> {
    check_budget(x, y, budget)?;
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for_each_nonexpansive(x, y, &mut |f| {
        let r = corad_in(y, f);
        if best.as_ref().is_none_or(|b| r < b.0) {
            best = Some((r, f.to_vec()));
        }
    });
    Ok(best.expect("constant maps are nonexpansive"))
}

/// A real number that is exact when the norm allows it.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Scalar {
    Exact(Rational),
    Float(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64(),
            Scalar::Float(f) => *f,
        }
    }
}

/// `inf_{W ⊇ V} rad_W(A)`, which is half the diameter of `A`: the set of
/// half-differences is centrally symmetric, so its best center is 0.
pub fn enlargement_radius(a: &EmbeddedPointSet) -> Result<Scalar, RadiusError> {
    if a.points.is_empty() {
        return Err(RadiusError::Empty);
    }
    let pts = &a.points;
    Ok(match a.norm {
        Norm::Sup => {
            let mut best = Rational::zero();
            for p in pts {
                for q in pts {
                    best = best.max(EmbeddedPointSet::sup_distance(p, q));
                }
            }
            Scalar::Exact(best / Rational::from(2))
        }
        Norm::Euclidean => {
            let f = a.to_f64();
            let mut best = 0.0f64;
            for p in &f {
                for q in &f {
                    let d2: f64 = p.iter().zip(q).map(|(u, v)| (u - v) * (u - v)).sum();
                    best = best.max(d2.sqrt());
                }
            }
            Scalar::Float(best / 2.0)
        }
    })
}

/// The computable entries of
/// `diam/2 ≤ Euc ≤ NmV ≤ Conv ≤ rad_X ≤ diam`, with `Euc` bracketed below by
/// `diam/2` and a search lower bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sextuple {
    pub half_diameter: Rational,
    pub euc_lower: Rational,
    pub euc_search: f64,
    pub nmv: Rational,
    pub conv: Rational,
    pub rad: Rational,
    pub diameter: Rational,
}

impl Sextuple {
    /// The exact entries are ordered as the chain requires.
    pub fn is_ordered(&self) -> bool {
        self.half_diameter <= self.nmv
            && self.nmv <= self.conv
            && self.conv <= self.rad
            && self.rad <= self.diameter
            && self.euc_search <= self.nmv.to_f64() + 1e-9
    }
}

/// Search dimension used for the `Euc` entry.
pub fn sextuple_dimension(x: &FiniteMetricSpace) -> usize {
    (x.len().saturating_sub(1)).clamp(1, 3)
}

pub fn sextuple(x: &FiniteMetricSpace, search: &SearchParams) -> Result<Sextuple, RadiusError> {
    let diameter = x.diameter();
    let half_diameter = &diameter / &Rational::from(2);
    let nmv = map_rad_nmv(x)?.value;
    let conv = map_rad_conv(x)?.value;
    let rad = x.intrinsic_radius().0;
    let found = euclidean_map_rad_search(x, sextuple_dimension(x), search);
    Ok(Sextuple {
        euc_lower: half_diameter.clone(),
        euc_search: found.bound.max(half_diameter.to_f64()),
        half_diameter,
        nmv,
        conv,
        rad,
        diameter,
    })
}
