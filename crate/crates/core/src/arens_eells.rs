//! Signed measures, transport plans and the Arens-Eells norm.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::lp::{solve_lp, LpError, LpProblem, Relation, Sense, VarId};
use crate::metric::FiniteMetricSpace;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AeError {
    #[error("measure has total mass {0}, expected 0")]
    NotInU0(Rational),
    #[error("point index {0} is outside the space")]
    OutOfRange(usize),
    #[error("plan edge {from}->{to} would get coefficient {value}")]
    NonPositiveCoefficient {
        from: usize,
        to: usize,
        value: Rational,
    },
    #[error("forest contains a cycle through edge {0}->{1}")]
    CycleInForest(usize, usize),
    #[error("forest vertices do not match the support of the measure")]
    SupportMismatch,
    #[error("forest component containing point {0} has nonzero mass")]
    UnbalancedComponent(usize),
    #[error("support has {size} points, budget is {budget}")]
    BudgetExceeded { size: usize, budget: usize },
    #[error("points must be distinct")]
    NotDistinct,
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Finitely supported measure with rational coefficients, keyed by point
/// index. Zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct SignedMeasure {
    coeffs: BTreeMap<usize, Rational>,
}

impl SignedMeasure {
    pub fn zero() -> Self {
        SignedMeasure::default()
    }

    /// The point mass `μ_x`.
    pub fn dirac(x: usize) -> Self {
        Self::from_pairs([(x, Rational::one())])
    }

    /// Sums the given coefficients, merging repeated points.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        let mut m = SignedMeasure::zero();
        for (x, c) in pairs {
            m.add_at(x, &c);
        }
        m
    }

    pub fn add_at(&mut self, x: usize, c: &Rational) {
        let entry = self.coeffs.entry(x).or_default();
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&x);
        }
    }

    pub fn get(&self, x: usize) -> Rational {
        self.coeffs.get(&x).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, Rational> {
        &self.coeffs
    }

    pub fn mass(&self) -> Rational {
        self.coeffs.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn in_u0(&self) -> bool {
        self.mass().is_zero()
    }

    pub fn in_u1(&self) -> bool {
        self.mass() == Rational::one()
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.coeffs.keys().copied().collect()
    }

    pub fn positive_support(&self) -> BTreeSet<usize> {
        self.coeffs.iter().filter(|(_, c)| c.is_positive()).map(|(x, _)| *x).collect()
    }

    pub fn negative_support(&self) -> BTreeSet<usize> {
        self.coeffs.iter().filter(|(_, c)| c.is_negative()).map(|(x, _)| *x).collect()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_pairs(self.coeffs.iter().map(|(x, v)| (*x, v * c)))
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (x, c) in &other.coeffs {
            out.add_at(*x, c);
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scale(&-Rational::one()))
    }

    /// `Σ g(x) μ(x)`.
    pub fn integrate(&self, g: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(x, c)| c * &g[*x]).sum()
    }

    fn check_range(&self, n: usize) -> Result<(), AeError> {
        match self.coeffs.keys().find(|&&x| x >= n) {
            Some(&x) => Err(AeError::OutOfRange(x)),
            None => Ok(()),
        }
    }
}

/// Nonnegative combination of the pair elements `ν_{y,z}`, `y ≠ z`. Only
/// positive weights are stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct TransportPlan {
    weights: BTreeMap<(usize, usize), Rational>,
}

impl TransportPlan {
    pub fn new() -> Self {
        TransportPlan::default()
    }

    /// Adds `w ν_{y,z}`; self-pairs are dropped since `D(ν_{y,y}) = 0`.
    pub fn add(&mut self, y: usize, z: usize, w: &Rational) {
        if y == z {
            return;
        }
        let entry = self.weights.entry((y, z)).or_default();
        *entry += w;
        if !entry.is_positive() {
            self.weights.remove(&(y, z));
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = ((usize, usize), Rational)>) -> Self {
        let mut p = TransportPlan::new();
        for ((y, z), w) in pairs {
            p.add(y, z, &w);
        }
        p
    }

    pub fn weights(&self) -> &BTreeMap<(usize, usize), Rational> {
        &self.weights
    }

    pub fn get(&self, y: usize, z: usize) -> Rational {
        self.weights.get(&(y, z)).cloned().unwrap_or_default()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn cost(&self, x: &FiniteMetricSpace) -> Rational {
        self.weights.iter().map(|((y, z), w)| w * x.d(*y, *z)).sum()
    }

    /// `Σ ν(y,z)`, the quantity the interior-vertex elimination decreases.
    pub fn total_weight(&self) -> Rational {
        self.weights.values().sum()
    }

    pub fn graph(&self) -> PlanGraph {
        PlanGraph {
            edges: self.weights.keys().copied().collect(),
        }
    }
}

/// The directed graph `Γ(ν)` of a plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanGraph {
    pub edges: Vec<(usize, usize)>,
}

impl PlanGraph {
    /// Points with an outgoing edge.
    pub fn initial_points(&self) -> BTreeSet<usize> {
        self.edges.iter().map(|e| e.0).collect()
    }

    /// Points with an incoming edge.
    pub fn terminal_points(&self) -> BTreeSet<usize> {
        self.edges.iter().map(|e| e.1).collect()
    }

    pub fn vertices(&self) -> BTreeSet<usize> {
        self.edges.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// First edge closing an undirected cycle, if any. Antiparallel pairs
    /// count as a 2-cycle.
    pub fn find_cycle_edge(&self) -> Option<(usize, usize)> {
        let mut uf = UnionFind::default();
        self.edges.iter().copied().find(|&(a, b)| !uf.union(a, b))
    }

    pub fn has_undirected_cycle(&self) -> bool {
        self.find_cycle_edge().is_some()
    }
}

#[derive(Default)]
struct UnionFind {
    parent: BTreeMap<usize, usize>,
}

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let p = *self.parent.entry(x).or_insert(x);
        if p == x {
            return x;
        }
        let root = self.find(p);
        self.parent.insert(x, root);
        root
    }

    /// Merges the classes; false if already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent.insert(ra.max(rb), ra.min(rb));
        true
    }
}

/// `D(ν) = Σ ν(y,z) (μ_y − μ_z)`.
pub fn boundary(plan: &TransportPlan) -> SignedMeasure {
    let mut m = SignedMeasure::zero();
    for ((y, z), w) in &plan.weights {
        m.add_at(*y, w);
        m.add_at(*z, &-w);
    }
    m
}

/// Rewrites a plan without increasing its cost or changing its boundary so
/// that no point both sends and receives, and `Γ(ν)` has no undirected
/// cycle. Afterwards the initial and terminal points are exactly the
/// positive and negative supports of the boundary.
pub fn canonicalize(x: &FiniteMetricSpace, plan: &TransportPlan) -> TransportPlan {
    let mut p = plan.clone();
    eliminate_interior(&mut p);
    cancel_cycles(x, &mut p);
    p
}

fn eliminate_interior(p: &mut TransportPlan) {
    // Routing q->v->r through q->r only shrinks the in-set and out-set, so a
    // vertex once cleared stays cleared.
    let vertices: BTreeSet<usize> = p.graph().vertices();
    for v in vertices {
        loop {
            let inc = p.weights.keys().find(|e| e.1 == v).copied();
            let out = p.weights.keys().find(|e| e.0 == v).copied();
            let (Some((q, _)), Some((_, r))) = (inc, out) else { break };
            let w = p.get(q, v).min(p.get(v, r));
            let neg = -&w;
            p.add(q, v, &neg);
            p.add(v, r, &neg);
            p.add(q, r, &w);
        }
    }
}

fn cancel_cycles(x: &FiniteMetricSpace, p: &mut TransportPlan) {
    while let Some(cycle) = undirected_cycle(p) {
        // cycle[i] is (edge, forward?) in traversal order; pushing ε along
        // the traversal adds ε to forward edges and removes it from backward.
        let mut delta = Rational::zero();
        for &((a, b), fwd) in &cycle {
            if fwd {
                delta += x.d(a, b);
            } else {
                delta -= x.d(a, b);
            }
        }
        // push in the direction that does not increase cost
        let along = !delta.is_positive();
        let eps = cycle
            .iter()
            .filter(|(_, fwd)| *fwd != along)
            .map(|&((a, b), _)| p.get(a, b))
            .min()
            .expect("cycle has edges in both orientations");
        for &((a, b), fwd) in &cycle {
            if fwd == along {
                p.add(a, b, &eps);
            } else {
                p.add(a, b, &-&eps);
            }
        }
    }
}

/// Edges of one undirected cycle of `Γ(p)` with their traversal orientation.
fn undirected_cycle(p: &TransportPlan) -> Option<Vec<((usize, usize), bool)>> {
    let (a, b) = p.graph().find_cycle_edge()?;
    // path from b back to a in the graph without this edge, by BFS
    let edges: Vec<(usize, usize)> = p.weights.keys().copied().filter(|&e| e != (a, b)).collect();
    let mut prev: BTreeMap<usize, ((usize, usize), bool)> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::from([b]);
    let mut seen = BTreeSet::from([b]);
    while let Some(u) = queue.pop_front() {
        if u == a {
            break;
        }
        for &(s, t) in &edges {
            let (next, fwd) = if s == u {
                (t, true)
            } else if t == u {
                (s, false)
            } else {
                continue;
            };
            if seen.insert(next) {
                prev.insert(next, ((s, t), fwd));
                queue.push_back(next);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = a;
    while cur != b {
        let (e, fwd) = prev[&cur];
        path.push((e, fwd));
        cur = if fwd { e.0 } else { e.1 };
    }
    path.reverse();
    // traversal a -> b -> ... -> a
    let mut cycle = vec![((a, b), true)];
    cycle.extend(path);
    Some(cycle)
}

/// The Arens-Eells norm `‖μ‖` with an optimal plan whose graph is a forest
/// running from the positive to the negative support.
///
/// The transportation LP has one column per (source, sink) pair in
/// lexicographic order; with Bland's rule this fixes which optimal plan is
/// returned.
pub fn ae_norm(
    x: &FiniteMetricSpace,
    mu: &SignedMeasure,
) -> Result<(Rational, TransportPlan), AeError> {
    mu.check_range(x.len())?;
    let mass = mu.mass();
    if !mass.is_zero() {
        return Err(AeError::NotInU0(mass));
    }
    if mu.is_zero() {
        return Ok((Rational::zero(), TransportPlan::new()));
    }
    let pos: Vec<usize> = mu.positive_support().into_iter().collect();
    let neg: Vec<usize> = mu.negative_support().into_iter().collect();
    let mut lp = LpProblem::new(Sense::Minimize);
    let mut cols = Vec::new();
    let mut objective = Vec::new();
    for &p in &pos {
        for &n in &neg {
            let v = lp.add_nonneg(format!("nu_{p}_{n}"));
            cols.push((p, n, v));
            objective.push((v, x.d(p, n).clone()));
        }
    }
    lp.set_objective(objective);
    for &p in &pos {
        let row: Vec<(VarId, Rational)> =
            cols.iter().filter(|c| c.0 == p).map(|c| (c.2, Rational::one())).collect();
        lp.add_constraint(row, Relation::Eq, mu.get(p));
    }
    for &n in &neg {
        let row: Vec<(VarId, Rational)> =
            cols.iter().filter(|c| c.1 == n).map(|c| (c.2, Rational::one())).collect();
        lp.add_constraint(row, Relation::Eq, -mu.get(n));
    }
    let sol = solve_lp(&lp)?;
    let assignment = sol
        .assignment
        .expect("a balanced transportation problem is feasible and bounded");
    let plan = TransportPlan::from_pairs(
        cols.iter()
            .map(|&(p, n, v)| ((p, n), assignment[v.0].clone())),
    );
    let plan = canonicalize(x, &plan);
    let value = plan.cost(x);
    debug_assert_eq!(Some(&value), sol.value.as_ref());
    Ok((value, plan))
}

/// The unique `ν` with `D(ν) = μ` and `Γ(ν)` inside the given forest: the
/// weight of `(y, z)` is the `μ`-mass of the component of `y` once the edge
/// is removed.
pub fn plan_from_forest(
    mu: &SignedMeasure,
    forest: &[(usize, usize)],
) -> Result<TransportPlan, AeError> {
    let g = PlanGraph {
        edges: forest.to_vec(),
    };
    if let Some((a, b)) = g.find_cycle_edge() {
        return Err(AeError::CycleInForest(a, b));
    }
    if g.vertices() != mu.support() {
        return Err(AeError::SupportMismatch);
    }
    let mut plan = TransportPlan::new();
    for (i, &(y, z)) in forest.iter().enumerate() {
        let side = component(forest, i, y);
        let value: Rational = side.iter().map(|&v| mu.get(v)).sum();
        if !value.is_positive() {
            return Err(AeError::NonPositiveCoefficient {
                from: y,
                to: z,
                value,
            });
        }
        plan.add(y, z, &value);
    }
    let d = boundary(&plan);
    if d != *mu {
        // only possible when some tree carries nonzero total mass
        let bad = mu
            .support()
            .into_iter()
            .find(|&v| d.get(v) != mu.get(v))
            .unwrap_or_default();
        return Err(AeError::UnbalancedComponent(bad));
    }
    Ok(plan)
}

/// Vertices reachable from `start` in the forest with edge `skip` removed.
fn component(forest: &[(usize, usize)], skip: usize, start: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for (j, &(a, b)) in forest.iter().enumerate() {
            if j == skip {
                continue;
            }
            let next = if a == u {
                b
            } else if b == u {
                a
            } else {
                continue;
            };
            if seen.insert(next) {
                stack.push(next);
            }
        }
    }
    seen
}

pub const DEFAULT_ENUMERATION_BUDGET: usize = 10;

/// Every plan `ν ≥ 0` with `D(ν) = μ` whose graph is a forest from the
/// positive to the negative support covering both, with its cost. Plans are
/// listed in lexicographic order of their edge sets.
pub fn enumerate_acyclic_plans(
    x: &FiniteMetricSpace,
    mu: &SignedMeasure,
    budget: usize,
) -> Result<Vec<(TransportPlan, Rational)>, AeError> {
    mu.check_range(x.len())?;
    let mass = mu.mass();
    if !mass.is_zero() {
        return Err(AeError::NotInU0(mass));
    }
    let size = mu.coeffs.len();
    if size > budget {
        return Err(AeError::BudgetExceeded { size, budget });
    }
    if mu.is_zero() {
        return Ok(vec![(TransportPlan::new(), Rational::zero())]);
    }
    let pos: Vec<usize> = mu.positive_support().into_iter().collect();
    let neg: Vec<usize> = mu.negative_support().into_iter().collect();
    let candidates: Vec<(usize, usize)> = pos
        .iter()
        .flat_map(|&p| neg.iter().map(move |&n| (p, n)))
        .collect();
    let mut search = ForestSearch {
        mu,
        candidates: &candidates,
        chosen: Vec::new(),
        out: Vec::new(),
    };
    search.run(0, &mut Vec::new());
    Ok(search
        .out
        .into_iter()
        .map(|p| {
            let c = p.cost(x);
            (p, c)
        })
        .collect())
}

struct ForestSearch<'a> {
    mu: &'a SignedMeasure,
    candidates: &'a [(usize, usize)],
    chosen: Vec<(usize, usize)>,
    out: Vec<TransportPlan>,
}

impl ForestSearch<'_> {
    /// Include/exclude each candidate edge in order. `groups` holds a
    /// component label per chosen vertex so cycles are never formed.
    fn run(&mut self, i: usize, groups: &mut Vec<(usize, usize)>) {
        if i == self.candidates.len() {
            if let Ok(plan) = plan_from_forest(self.mu, &self.chosen) {
                self.out.push(plan);
            }
            return;
        }
        let (p, n) = self.candidates[i];
        let label = |groups: &[(usize, usize)], v: usize| {
            groups.iter().find(|g| g.0 == v).map_or(v, |g| g.1)
        };
        let (lp, ln) = (label(groups, p), label(groups, n));
        if lp != ln {
            let saved = groups.clone();
            let (from, to) = (lp.max(ln), lp.min(ln));
            for v in [p, n] {
                if !groups.iter().any(|g| g.0 == v) {
                    groups.push((v, v));
                }
            }
            for g in groups.iter_mut() {
                if g.1 == from {
                    g.1 = to;
                }
            }
            self.chosen.push((p, n));
            self.run(i + 1, groups);
            self.chosen.pop();
            *groups = saved;
        }
        // skipping is only possible if p and n can still be covered later
        let covered = |v: usize| self.chosen.iter().any(|&(a, b)| a == v || b == v);
        let later = |v: usize| self.candidates[i + 1..].iter().any(|&(a, b)| a == v || b == v);
        if (covered(p) || later(p)) && (covered(n) || later(n)) {
            self.run(i + 1, groups);
        }
    }
}

/// `‖μ_{x1} + μ_{x2} − μ_{x3} − μ_{x4}‖`.
pub fn difference_norm_bound(
    x: &FiniteMetricSpace,
    pts: [usize; 4],
) -> Result<Rational, AeError> {
    for i in 0..4 {
        if pts[i] >= x.len() {
            return Err(AeError::OutOfRange(pts[i]));
        }
        for j in i + 1..4 {
            if pts[i] == pts[j] {
                return Err(AeError::NotDistinct);
            }
        }
    }
    let one = Rational::one();
    let mu = SignedMeasure::from_pairs([
        (pts[0], one.clone()),
        (pts[1], one.clone()),
        (pts[2], -&one),
        (pts[3], -&one),
    ]);
    Ok(ae_norm(x, &mu)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::builtin;
    use crate::rational::q;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn d(m: usize) -> FiniteMetricSpace {
        builtin(&format!("D_{m}")).unwrap().into_space().unwrap()
    }

    fn pm(pos: &[usize], neg: &[usize]) -> SignedMeasure {
        SignedMeasure::from_pairs(
            pos.iter()
                .map(|&p| (p, r(1)))
                .chain(neg.iter().map(|&n| (n, r(-1)))),
        )
    }

    #[test]
    fn boundary_examples() {
        let p = TransportPlan::from_pairs([((0, 1), r(1))]);
        assert_eq!(boundary(&p), pm(&[0], &[1]));
        assert!(boundary(&TransportPlan::new()).is_zero());
        let p = TransportPlan::from_pairs([((0, 2), r(1)), ((1, 3), r(1))]);
        assert_eq!(boundary(&p), pm(&[0, 1], &[2, 3]));
    }

    #[test]
    fn norm_of_four_point_difference() {
        let (v, plan) = ae_norm(&d(4), &pm(&[0, 1], &[2, 3])).unwrap();
        assert_eq!(v, r(2));
        assert_eq!(boundary(&plan), pm(&[0, 1], &[2, 3]));
        assert!(!plan.graph().has_undirected_cycle());
    }

    #[test]
    fn dirac_difference_and_star() {
        let x = FiniteMetricSpace::from_reals(&[r(0), r(1), r(3)]).unwrap();
        assert_eq!(ae_norm(&x, &pm(&[0], &[2])).unwrap().0, r(3));
        let mu = SignedMeasure::from_pairs([(0, r(1)), (1, q(-1, 4)), (2, q(-3, 4))]);
        let (v, plan) = ae_norm(&x, &mu).unwrap();
        assert_eq!(v, q(1, 4) + q(9, 4));
        assert_eq!(plan.get(0, 1), q(1, 4));
        assert_eq!(plan.get(0, 2), q(3, 4));
    }

    #[test]
    fn not_in_u0() {
        assert!(matches!(ae_norm(&d(2), &SignedMeasure::dirac(0)), Err(AeError::NotInU0(_))));
        assert!(matches!(ae_norm(&d(2), &pm(&[0], &[5])), Err(AeError::OutOfRange(5))));
    }

    #[test]
    fn five_point_forest() {
        let mu = SignedMeasure::from_pairs([(0, r(3)), (1, r(-4)), (2, r(2)), (3, r(-4)), (4, r(3))]);
        let plan = plan_from_forest(&mu, &[(0, 1), (2, 1), (2, 3), (4, 3)]).unwrap();
        let want = TransportPlan::from_pairs([
            ((0, 1), r(3)),
            ((2, 1), r(1)),
            ((2, 3), r(1)),
            ((4, 3), r(3)),
        ]);
        assert_eq!(plan, want);
    }

    #[test]
    fn forest_errors() {
        let mu = pm(&[0, 1], &[2, 3]);
        assert_eq!(plan_from_forest(&mu, &[(0, 2), (1, 2)]), Err(AeError::SupportMismatch));
        assert!(matches!(
            plan_from_forest(&mu, &[(0, 2), (1, 2), (0, 3), (1, 3)]),
            Err(AeError::CycleInForest(..))
        ));
        assert!(matches!(
            plan_from_forest(&mu, &[(2, 0), (1, 3)]),
            Err(AeError::NonPositiveCoefficient { from: 2, to: 0, .. })
        ));
        assert!(matches!(
            plan_from_forest(&mu, &[(0, 2), (0, 1), (1, 3)]),
            Err(AeError::NonPositiveCoefficient { .. }) | Err(AeError::UnbalancedComponent(_))
        ));
        let star = SignedMeasure::from_pairs([(0, r(1)), (1, q(-1, 2)), (2, q(-1, 2))]);
        let p = plan_from_forest(&star, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(p.get(0, 1), q(1, 2));
        assert_eq!(p.get(0, 2), q(1, 2));
        let split = SignedMeasure::from_pairs([(0, r(1)), (1, r(-2)), (2, r(1)), (3, r(0))]);
        assert!(matches!(
            plan_from_forest(&pm(&[0], &[1]).plus(&pm(&[2], &[3])), &[(0, 1), (2, 3), (2, 1)]),
            Err(AeError::NonPositiveCoefficient { .. })
        ));
        assert!(plan_from_forest(&split, &[(0, 1), (2, 1)]).is_ok());
    }

    #[test]
    fn enumeration_counts() {
        let plans = enumerate_acyclic_plans(&d(4), &pm(&[0, 1], &[2, 3]), 10).unwrap();
        let got: Vec<_> = plans.iter().map(|(p, _)| p.clone()).collect();
        assert_eq!(
            got,
            vec![
                TransportPlan::from_pairs([((0, 2), r(1)), ((1, 3), r(1))]),
                TransportPlan::from_pairs([((0, 3), r(1)), ((1, 2), r(1))]),
            ]
        );
        assert!(plans.iter().all(|(_, c)| *c == r(2)));
        assert_eq!(enumerate_acyclic_plans(&d(6), &pm(&[0, 1, 2], &[3, 4, 5]), 10).unwrap().len(), 6);
        assert_eq!(enumerate_acyclic_plans(&d(2), &pm(&[0], &[1]), 10).unwrap().len(), 1);
        assert!(matches!(
            enumerate_acyclic_plans(&d(6), &pm(&[0, 1, 2], &[3, 4, 5]), 5),
            Err(AeError::BudgetExceeded { size: 6, budget: 5 })
        ));
    }

    #[test]
    fn canonicalize_reroutes_through_interior() {
        let x = FiniteMetricSpace::from_reals(&[r(0), r(1), r(2)]).unwrap();
        let p = TransportPlan::from_pairs([((0, 1), r(1)), ((1, 2), r(1))]);
        let c = canonicalize(&x, &p);
        assert_eq!(c, TransportPlan::from_pairs([((0, 2), r(1))]));
        let p = TransportPlan::from_pairs([((0, 1), r(2)), ((1, 0), r(1))]);
        assert_eq!(canonicalize(&x, &p), TransportPlan::from_pairs([((0, 1), r(1))]));
    }

    #[test]
    fn canonicalize_breaks_cycles() {
        let x = d(4);
        let p = TransportPlan::from_pairs([
            ((0, 2), r(1)),
            ((0, 3), r(1)),
            ((1, 2), r(1)),
            ((1, 3), r(1)),
        ]);
        let c = canonicalize(&x, &p);
        assert!(!c.graph().has_undirected_cycle());
        assert_eq!(boundary(&c), boundary(&p));
        assert_eq!(c.cost(&x), r(4));
    }

    #[test]
    fn difference_bound() {
        assert_eq!(difference_norm_bound(&d(4), [0, 1, 2, 3]).unwrap(), r(2));
        let line = FiniteMetricSpace::from_reals(&[r(0), r(1), r(2), r(3)]).unwrap();
        assert_eq!(difference_norm_bound(&line, [0, 1, 2, 3]).unwrap(), r(4));
        assert_eq!(difference_norm_bound(&line, [0, 1, 0, 3]), Err(AeError::NotDistinct));
    }
}
