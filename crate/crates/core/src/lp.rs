//! Exact linear programming over [`Rational`].
//!
//! Two-phase primal simplex on a dense tableau with Bland's pivoting rule.
//! Problems are small (a few hundred columns) and every optimum has to be
//! certified exactly, so there is no floating-point presolve.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    /// `None` is −∞.
    pub lower: Option<Rational>,
    /// `None` is +∞.
    pub upper: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<(VarId, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    pub vars: Vec<Variable>,
    pub objective: Vec<(VarId, Rational)>,
    pub sense: Sense,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value, present iff `status == Optimal`.
    pub value: Option<Rational>,
    /// One entry per declared variable, present iff `status == Optimal`.
    pub assignment: Option<Vec<Rational>>,
}

impl LpSolution {
    fn without_point(status: LpStatus) -> LpSolution {
        LpSolution {
            status,
            value: None,
            assignment: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Value of `v` in an optimal assignment.
    pub fn get(&self, v: VarId) -> Option<&Rational> {
        self.assignment.as_ref().and_then(|a| a.get(v.0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("malformed problem: {0}")]
    MalformedProblem(String),
}

impl LpProblem {
    pub fn new(sense: Sense) -> LpProblem {
        LpProblem {
            vars: Vec::new(),
            objective: Vec::new(),
            sense,
            constraints: Vec::new(),
        }
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: Option<Rational>,
        upper: Option<Rational>,
    ) -> VarId {
        self.vars.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        VarId(self.vars.len() - 1)
    }

    /// Variable with bounds `[0, +∞)`.
    pub fn add_nonneg(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, Some(Rational::zero()), None)
    }

    pub fn add_free(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, None, None)
    }

    pub fn add_constraint(
        &mut self,
        coeffs: Vec<(VarId, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn set_objective(&mut self, objective: Vec<(VarId, Rational)>) {
        self.objective = objective;
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.vars.len();
        for (i, v) in self.vars.iter().enumerate() {
            if let (Some(l), Some(u)) = (&v.lower, &v.upper) {
                if l > u {
                    return Err(LpError::MalformedProblem(format!(
                        "variable {i} ({}) has lower bound {l} above upper bound {u}",
                        v.name
                    )));
                }
            }
        }
        for (id, _) in &self.objective {
            if id.0 >= n {
                return Err(LpError::MalformedProblem(format!(
                    "objective references undeclared variable {}",
                    id.0
                )));
            }
        }
        for (r, c) in self.constraints.iter().enumerate() {
            for (id, _) in &c.coeffs {
                if id.0 >= n {
                    return Err(LpError::MalformedProblem(format!(
                        "constraint {r} references undeclared variable {}",
                        id.0
                    )));
                }
            }
        }
        Ok(())
    }

    /// Evaluates the objective at `x`.
    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        self.objective.iter().map(|(v, c)| c * &x[v.0]).sum()
    }
}

fn lhs(coeffs: &[(VarId, Rational)], x: &[Rational]) -> Rational {
    coeffs.iter().map(|(v, c)| c * &x[v.0]).sum()
}

/// True iff `s` claims optimality and its assignment satisfies every bound
/// and constraint of `p` exactly while attaining the stated value.
pub fn check_solution(p: &LpProblem, s: &LpSolution) -> bool {
    let (Some(value), Some(x)) = (&s.value, &s.assignment) else {
        return false;
    };
    if s.status != LpStatus::Optimal || x.len() != p.vars.len() || p.validate().is_err() {
        return false;
    }
    for (v, xi) in p.vars.iter().zip(x) {
        if v.lower.as_ref().is_some_and(|l| xi < l) || v.upper.as_ref().is_some_and(|u| xi > u) {
            return false;
        }
    }
    for c in &p.constraints {
        let l = lhs(&c.coeffs, x);
        let ok = match c.relation {
            Relation::Le => l <= c.rhs,
            Relation::Eq => l == c.rhs,
            Relation::Ge => l >= c.rhs,
        };
        if !ok {
            return false;
        }
    }
    p.objective_at(x) == *value
}

/// How an original variable is expressed through nonnegative columns.
enum Substitution {
    /// x = offset + col
    Shift { offset: Rational, col: usize },
    /// x = offset − col
    Mirror { offset: Rational, col: usize },
    /// x = pos − neg
    Split { pos: usize, neg: usize },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    kinds: Vec<ColKind>,
    /// Reduced costs for the current phase.
    reduced: Vec<Rational>,
    /// Negated objective value for the current phase.
    neg_value: Rational,
    pivots: usize,
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "tableau {} rows x {} cols, {} pivots",
            self.rows.len(),
            self.kinds.len(),
            self.pivots
        )?;
        write!(f, "obj |")?;
        for d in &self.reduced {
            write!(f, " {d}")?;
        }
        writeln!(f, " | {}", -&self.neg_value)?;
        for (i, row) in self.rows.iter().enumerate() {
            write!(f, "x{:<3}|", self.basis[i])?;
            for a in row {
                write!(f, " {a}")?;
            }
            writeln!(f, " | {}", self.rhs[i])?;
        }
        Ok(())
    }
}

impl Tableau {
    fn set_costs(&mut self, costs: &[Rational]) {
        let n = self.kinds.len();
        let mut reduced = costs.to_vec();
        let mut neg_value = Rational::zero();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &costs[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..n {
                if !row[j].is_zero() {
                    reduced[j] -= cb * &row[j];
                }
            }
            neg_value -= cb * &self.rhs[i];
        }
        self.reduced = reduced;
        self.neg_value = neg_value;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        let support: Vec<usize> = (0..self.kinds.len())
            .filter(|&j| !self.rows[r][j].is_zero())
            .collect();
        for &j in &support {
            self.rows[r][j] *= &inv;
        }
        self.rhs[r] *= &inv;
        let prow = std::mem::take(&mut self.rows[r]);
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c].clone();
            if factor.is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for &j in &support {
                row[j] -= &factor * &prow[j];
            }
            self.rhs[i] -= &factor * &prhs;
        }
        let factor = self.reduced[c].clone();
        if !factor.is_zero() {
            for &j in &support {
                self.reduced[j] -= &factor * &prow[j];
            }
            self.neg_value -= &factor * &prhs;
        }
        self.rows[r] = prow;
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Runs Bland's rule over the allowed columns. Returns false on unboundedness.
    fn optimize(&mut self, allowed: impl Fn(usize) -> bool) -> bool {
        loop {
            let entering = (0..self.kinds.len()).find(|&j| allowed(j) && self.reduced[j].is_negative());
            let Some(c) = entering else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((r, _)) = best else {
                return false;
            };
            self.pivot(r, c);
        }
    }

    fn remove_row(&mut self, r: usize) {
        self.rows.remove(r);
        self.rhs.remove(r);
        self.basis.remove(r);
    }
}

struct StandardForm {
    subs: Vec<Substitution>,
    tableau: Tableau,
    structural: usize,
}

fn standard_form(p: &LpProblem) -> StandardForm {
    let mut subs = Vec::with_capacity(p.vars.len());
    let mut ncols = 0usize;
    // Extra rows for finite upper bounds of shifted variables: col ≤ u − l.
    let mut bound_rows: Vec<(usize, Rational)> = Vec::new();
    for v in &p.vars {
        match (&v.lower, &v.upper) {
            (Some(l), u) => {
                let col = ncols;
                ncols += 1;
                if let Some(u) = u {
                    bound_rows.push((col, u - l));
                }
                subs.push(Substitution::Shift {
                    offset: l.clone(),
                    col,
                });
            }
            (None, Some(u)) => {
                subs.push(Substitution::Mirror {
                    offset: u.clone(),
                    col: ncols,
                });
                ncols += 1;
            }
            (None, None) => {
                subs.push(Substitution::Split {
                    pos: ncols,
                    neg: ncols + 1,
                });
                ncols += 2;
            }
        }
    }
    let structural = ncols;

    // Rows over structural columns, with relation and rhs.
    let mut raw: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
    for c in &p.constraints {
        let mut row = vec![Rational::zero(); structural];
        let mut rhs = c.rhs.clone();
        for (v, a) in &c.coeffs {
            match &subs[v.0] {
                Substitution::Shift { offset, col } => {
                    row[*col] += a;
                    rhs -= a * offset;
                }
                Substitution::Mirror { offset, col } => {
                    row[*col] -= a;
                    rhs -= a * offset;
                }
                Substitution::Split { pos, neg } => {
                    row[*pos] += a;
                    row[*neg] -= a;
                }
            }
        }
        raw.push((row, c.relation, rhs));
    }
    for (col, cap) in bound_rows {
        let mut row = vec![Rational::zero(); structural];
        row[col] = Rational::one();
        raw.push((row, Relation::Le, cap));
    }
    for (row, rel, rhs) in raw.iter_mut() {
        if rhs.is_negative() {
            for a in row.iter_mut() {
                *a = -&*a;
            }
            *rhs = -&*rhs;
            *rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let n_slack = raw.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
    let n_art = raw.iter().filter(|(_, r, _)| *r != Relation::Le).count();
    let total = structural + n_slack + n_art;
    let mut kinds = vec![ColKind::Structural; structural];
    kinds.extend(std::iter::repeat_n(ColKind::Slack, n_slack));
    kinds.extend(std::iter::repeat_n(ColKind::Artificial, n_art));

    let m = raw.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs_col = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_slack = structural;
    let mut next_art = structural + n_slack;
    for (row, rel, rhs) in raw {
        let mut full = row;
        full.resize(total, Rational::zero());
        match rel {
            Relation::Le => {
                full[next_slack] = Rational::one();
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                full[next_slack] = -Rational::one();
                next_slack += 1;
                full[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                full[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            }
        }
        rows.push(full);
        rhs_col.push(rhs);
    }
    StandardForm {
        subs,
        tableau: Tableau {
            rows,
            rhs: rhs_col,
            basis,
            kinds,
            reduced: Vec::new(),
            neg_value: Rational::zero(),
            pivots: 0,
        },
        structural,
    }
}

/// Solves `p` exactly. Optimal assignments are basic (vertex) solutions and
/// the result is deterministic for a fixed input.
pub fn solve_lp(p: &LpProblem) -> Result<LpSolution, LpError> {
    solve_impl(p, None)
}

/// Like [`solve_lp`], additionally writing a plain-text dump of the tableau
/// at the start of each phase and at termination.
pub fn solve_lp_with_dump(p: &LpProblem, out: &mut String) -> Result<LpSolution, LpError> {
    solve_impl(p, Some(out))
}

fn solve_impl(p: &LpProblem, mut dump: Option<&mut String>) -> Result<LpSolution, LpError> {
    p.validate()?;
    let StandardForm {
        subs,
        mut tableau,
        structural,
    } = standard_form(p);
    let total = tableau.kinds.len();

    // Phase 1: minimise the sum of artificials.
    let phase1: Vec<Rational> = tableau
        .kinds
        .iter()
        .map(|k| match k {
            ColKind::Artificial => Rational::one(),
            _ => Rational::zero(),
        })
        .collect();
    tableau.set_costs(&phase1);
    if let Some(out) = dump.as_deref_mut() {
        let _ = write!(out, "phase 1\n{tableau}");
    }
    tableau.optimize(|_| true);
    if tableau.neg_value.is_negative() {
        if let Some(out) = dump.as_deref_mut() {
            let _ = write!(out, "infeasible\n{tableau}");
        }
        return Ok(LpSolution::without_point(LpStatus::Infeasible));
    }
    // Drive zero-level artificials out of the basis; drop redundant rows.
    let mut r = 0;
    while r < tableau.rows.len() {
        if tableau.kinds[tableau.basis[r]] == ColKind::Artificial {
            let col = (0..total).find(|&j| {
                tableau.kinds[j] != ColKind::Artificial && !tableau.rows[r][j].is_zero()
            });
            match col {
                Some(c) => tableau.pivot(r, c),
                None => {
                    tableau.remove_row(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // Phase 2.
    let mut costs = vec![Rational::zero(); total];
    for (v, c) in &p.objective {
        let c = match p.sense {
            Sense::Minimize => c.clone(),
            Sense::Maximize => -c,
        };
        match &subs[v.0] {
            Substitution::Shift { col, .. } => costs[*col] += &c,
            Substitution::Mirror { col, .. } => costs[*col] -= &c,
            Substitution::Split { pos, neg } => {
                costs[*pos] += &c;
                costs[*neg] -= &c;
            }
        }
    }
    tableau.set_costs(&costs);
    if let Some(out) = dump.as_deref_mut() {
        let _ = write!(out, "phase 2\n{tableau}");
    }
    let kinds = tableau.kinds.clone();
    let bounded = tableau.optimize(|j| kinds[j] != ColKind::Artificial);
    if let Some(out) = dump {
        let _ = write!(out, "final\n{tableau}");
    }
    if !bounded {
        return Ok(LpSolution::without_point(LpStatus::Unbounded));
    }

    let mut cols = vec![Rational::zero(); structural];
    for (i, &b) in tableau.basis.iter().enumerate() {
        if b < structural {
            cols[b] = tableau.rhs[i].clone();
        }
    }
    let x: Vec<Rational> = subs
        .iter()
        .map(|s| match s {
            Substitution::Shift { offset, col } => offset + &cols[*col],
            Substitution::Mirror { offset, col } => offset - &cols[*col],
            Substitution::Split { pos, neg } => &cols[*pos] - &cols[*neg],
        })
        .collect();
    log::debug!(
        "lp solved: {} rows, {} cols, {} pivots",
        tableau.rows.len(),
        total,
        tableau.pivots
    );
    let value = p.objective_at(&x);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value: Some(value),
        assignment: Some(x),
    })
}
