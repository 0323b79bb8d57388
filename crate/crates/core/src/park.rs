//! Parkability of convex polytopes: translating `C ⊆ B` by one of its own
//! points so that it stays inside `B`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{solve_lp, LpError, LpProblem, LpStatus, Relation, Sense, VarId};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParkError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vertex {vertex} of C violates row {row} of B")]
    CNotInB { vertex: usize, row: usize },
    #[error("polytope is unbounded")]
    UnboundedPolytope,
    #[error("sections are only computed in dimension at most 3, got {0}")]
    DimensionTooHigh(usize),
    #[error("polytope has no vertices")]
    Empty,
    #[error("hyperplane normal is zero")]
    ZeroNormal,
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Convex hull of a finite point list. Redundant points are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeV {
    pub dim: usize,
    pub vertices: Vec<Vec<Rational>>,
}

/// `{x | normal · x ≤ offset}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

/// Intersection of half-spaces; may be empty or unbounded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeH {
    pub dim: usize,
    pub rows: Vec<HalfSpace>,
}

/// `{x | normal · x = offset}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_dim(expected: usize, v: &[Rational]) -> Result<(), ParkError> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(ParkError::DimensionMismatch {
            expected,
            found: v.len(),
        })
    }
}

impl PolytopeV {
    pub fn new(dim: usize, vertices: Vec<Vec<Rational>>) -> Result<Self, ParkError> {
        if vertices.is_empty() {
            return Err(ParkError::Empty);
        }
        for v in &vertices {
            check_dim(dim, v)?;
        }
        Ok(PolytopeV { dim, vertices })
    }

    /// Vertices with repeats removed, in first-occurrence order.
    pub fn deduplicated(&self) -> Vec<Vec<Rational>> {
        let mut out: Vec<Vec<Rational>> = Vec::new();
        for v in &self.vertices {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }

    /// Flags each listed point that is a convex combination of the other
    /// distinct points. Repeats after the first occurrence are flagged.
    pub fn redundant_points(&self) -> Result<Vec<bool>, ParkError> {
        let mut flags = Vec::with_capacity(self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            if self.vertices[..i].contains(v) {
                flags.push(true);
                continue;
            }
            let others: Vec<&Vec<Rational>> =
                self.vertices.iter().filter(|w| *w != v).collect();
            flags.push(!others.is_empty() && in_hull(&others, v)?);
        }
        Ok(flags)
    }

    /// The extreme points, in input order.
    pub fn extreme_points(&self) -> Result<Vec<Vec<Rational>>, ParkError> {
        let flags = self.redundant_points()?;
        Ok(self
            .vertices
            .iter()
            .zip(flags)
            .filter(|(_, r)| !r)
            .map(|(v, _)| v.clone())
            .collect())
    }

    pub fn contains(&self, p: &[Rational]) -> Result<bool, ParkError> {
        check_dim(self.dim, p)?;
        let refs: Vec<&Vec<Rational>> = self.vertices.iter().collect();
        in_hull(&refs, p)
    }
}

/// Exact test for `p ∈ conv(points)`.
fn in_hull(points: &[&Vec<Rational>], p: &[Rational]) -> Result<bool, ParkError> {
    let mut lp = LpProblem::new(Sense::Minimize);
    let lam: Vec<VarId> = (0..points.len()).map(|i| lp.add_nonneg(format!("l{i}"))).collect();
    lp.add_constraint(
        lam.iter().map(|&v| (v, Rational::one())).collect(),
        Relation::Eq,
        Rational::one(),
    );
    for (j, pj) in p.iter().enumerate() {
        let row = lam
            .iter()
            .zip(points)
            .filter(|(_, q)| !q[j].is_zero())
            .map(|(&v, q)| (v, q[j].clone()))
            .collect();
        lp.add_constraint(row, Relation::Eq, pj.clone());
    }
    Ok(solve_lp(&lp)?.status == LpStatus::Optimal)
}

impl PolytopeH {
    pub fn new(dim: usize, rows: Vec<HalfSpace>) -> Result<Self, ParkError> {
        for r in &rows {
            check_dim(dim, &r.normal)?;
        }
        Ok(PolytopeH { dim, rows })
    }

    /// The cube `[−s, s]^n`.
    pub fn cube(dim: usize, s: Rational) -> Self {
        let mut rows = Vec::with_capacity(2 * dim);
        for j in 0..dim {
            for sign in [1, -1] {
                let mut normal = vec![Rational::zero(); dim];
                normal[j] = Rational::from(sign);
                rows.push(HalfSpace {
                    normal,
                    offset: s.clone(),
                });
            }
        }
        PolytopeH { dim, rows }
    }

    /// The centrally symmetric polytope `{x | |a_i · x| ≤ 1}`.
    pub fn symmetric(dim: usize, normals: &[Vec<Rational>]) -> Result<Self, ParkError> {
        let mut rows = Vec::with_capacity(2 * normals.len());
        for a in normals {
            check_dim(dim, a)?;
            rows.push(HalfSpace {
                normal: a.clone(),
                offset: Rational::one(),
            });
            rows.push(HalfSpace {
                normal: a.iter().map(|c| -c).collect(),
                offset: Rational::one(),
            });
        }
        Ok(PolytopeH { dim, rows })
    }

    /// A symmetric polygon circumscribing the unit disc, with `2m` facets
    /// whose unit normals are the rational points
    /// `((1 − t²)/(1 + t²), 2t/(1 + t²))` for `t = k/m`, `k = 0..m`, and
    /// their negatives.
    pub fn disc_proxy(m: usize) -> Self {
        let m = m.max(2);
        let normals: Vec<Vec<Rational>> = (0..m)
            .map(|k| {
                let t = Rational::from(k) / Rational::from(m);
                let t2 = &t * &t;
                let den = Rational::one() + &t2;
                vec![(Rational::one() - &t2) / &den, (&t + &t) / &den]
            })
            .collect();
        // k/m for k < m covers angles in [0, π/2); rotate by 90° for the rest
        let mut all = normals.clone();
        all.extend(normals.iter().map(|n| vec![-&n[1], n[0].clone()]));
        PolytopeH::symmetric(2, &all).expect("normals are two-dimensional")
    }

    /// Index of the first row violated by `p`, if any.
    pub fn violated_row(&self, p: &[Rational]) -> Option<usize> {
        self.rows.iter().position(|r| dot(&r.normal, p) > r.offset)
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        self.violated_row(p).is_none()
    }

    /// `Some(false)` when empty, `Some(true)` when nonempty and bounded,
    /// `None` when unbounded.
    fn bounded_nonempty(&self) -> Result<Option<bool>, ParkError> {
        for j in 0..self.dim {
            for sense in [Sense::Maximize, Sense::Minimize] {
                let mut lp = LpProblem::new(sense);
                let x: Vec<VarId> = (0..self.dim).map(|k| lp.add_free(format!("x{k}"))).collect();
                lp.set_objective(vec![(x[j], Rational::one())]);
                for r in &self.rows {
                    lp.add_constraint(
                        x.iter().zip(&r.normal).map(|(&v, a)| (v, a.clone())).collect(),
                        Relation::Le,
                        r.offset.clone(),
                    );
                }
                match solve_lp(&lp)?.status {
                    LpStatus::Infeasible => return Ok(Some(false)),
                    LpStatus::Unbounded => return Ok(None),
                    LpStatus::Optimal => {}
                }
            }
        }
        Ok(Some(true))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParkResult {
    pub parkable: bool,
    /// A point `v ∈ C` with `C − v ⊆ B`.
    pub v: Option<Vec<Rational>>,
}

/// Decides whether some `v ∈ C` has `C − v ⊆ B`.
///
/// Feasibility LP in barycentric weights `λ` of `v`: for each row `(a, b)`
/// of `B`, `Σ λ_k (a · c_k) ≥ max_i (a · c_i) − b`.
pub fn is_parkable(c: &PolytopeV, b: &PolytopeH) -> Result<ParkResult, ParkError> {
    if c.dim != b.dim {
        return Err(ParkError::DimensionMismatch {
            expected: b.dim,
            found: c.dim,
        });
    }
    let verts = c.deduplicated();
    for (vi, v) in c.vertices.iter().enumerate() {
        if let Some(row) = b.violated_row(v) {
            return Err(ParkError::CNotInB { vertex: vi, row });
        }
    }
    let mut lp = LpProblem::new(Sense::Minimize);
    let lam: Vec<VarId> = (0..verts.len()).map(|i| lp.add_nonneg(format!("l{i}"))).collect();
    lp.add_constraint(
        lam.iter().map(|&v| (v, Rational::one())).collect(),
        Relation::Eq,
        Rational::one(),
    );
    for r in &b.rows {
        let vals: Vec<Rational> = verts.iter().map(|v| dot(&r.normal, v)).collect();
        let top = vals.iter().max().cloned().expect("C is nonempty");
        let row = lam
            .iter()
            .zip(&vals)
            .filter(|(_, a)| !a.is_zero())
            .map(|(&v, a)| (v, a.clone()))
            .collect();
        lp.add_constraint(row, Relation::Ge, top - &r.offset);
    }
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Ok(ParkResult {
            parkable: false,
            v: None,
        });
    }
    let a = sol.assignment.expect("optimal");
    let v = (0..c.dim)
        .map(|j| verts.iter().zip(&lam).map(|(p, l)| &p[j] * &a[l.0]).sum())
        .collect();
    Ok(ParkResult {
        parkable: true,
        v: Some(v),
    })
}

/// True iff `v ∈ C` and every `c_i − v` satisfies every row of `B`, checked
/// exactly.
pub fn parks_at(c: &PolytopeV, b: &PolytopeH, v: &[Rational]) -> Result<bool, ParkError> {
    if !c.contains(v)? {
        return Ok(false);
    }
    Ok(c.vertices.iter().all(|p| {
        let shifted: Vec<Rational> = p.iter().zip(v).map(|(x, y)| x - y).collect();
        b.contains(&shifted)
    }))
}

/// A point `z` with `C = 2z − C`: the centroid of the extreme points,
/// accepted only if reflecting the extreme points through it permutes them.
pub fn center_of_symmetry(c: &PolytopeV) -> Result<Option<Vec<Rational>>, ParkError> {
    let ext = c.extreme_points()?;
    let k = Rational::from(ext.len());
    let z: Vec<Rational> = (0..c.dim)
        .map(|j| ext.iter().map(|p| p[j].clone()).sum::<Rational>() / &k)
        .collect();
    let symmetric = ext.iter().all(|p| {
        let r: Vec<Rational> = p.iter().zip(&z).map(|(x, zj)| zj + zj - x).collect();
        ext.contains(&r)
    });
    Ok(symmetric.then_some(z))
}

/// Solves the square system `m x = rhs` exactly; `None` if singular.
fn solve_square(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        rhs.swap(col, piv);
        let inv = m[col][col].recip();
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] * &inv;
            for k in col..n {
                let delta = &factor * &m[col][k];
                m[r][k] -= delta;
            }
            let delta = &factor * &rhs[col];
            rhs[r] -= delta;
        }
    }
    Some((0..n).map(|i| &rhs[i] / &m[i][i]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Vertices of `B ∩ H` for `dim ≤ 3`, sorted lexicographically. Each vertex
/// solves the hyperplane equation together with `dim − 1` rows of `B` held
/// at equality.
pub fn section_polytope(b: &PolytopeH, h: &Hyperplane) -> Result<PolytopeV, ParkError> {
    if b.dim > 3 {
        return Err(ParkError::DimensionTooHigh(b.dim));
    }
    check_dim(b.dim, &h.normal)?;
    if h.normal.iter().all(Rational::is_zero) {
        return Err(ParkError::ZeroNormal);
    }
    match b.bounded_nonempty()? {
        None => return Err(ParkError::UnboundedPolytope),
        Some(false) => {
            return Ok(PolytopeV {
                dim: b.dim,
                vertices: vec![],
            })
        }
        Some(true) => {}
    }
    let mut verts: Vec<Vec<Rational>> = Vec::new();
    for combo in combinations(b.rows.len(), b.dim - 1) {
        let mut m = vec![h.normal.clone()];
        let mut rhs = vec![h.offset.clone()];
        for &r in &combo {
            m.push(b.rows[r].normal.clone());
            rhs.push(b.rows[r].offset.clone());
        }
        if let Some(p) = solve_square(m, rhs) {
            if b.contains(&p) && !verts.contains(&p) {
                verts.push(p);
            }
        }
    }
    verts.sort();
    Ok(PolytopeV {
        dim: b.dim,
        vertices: verts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// Some section is not parkable, so `B` fails every parking condition.
    RefutedByWitness,
    /// Every sampled section parks; this is evidence, not proof.
    NoViolationFound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportEntry {
    pub hyperplane: Hyperplane,
    /// Vertices of the section; empty when the hyperplane misses `B`.
    pub section: Vec<Vec<Rational>>,
    /// `None` when the hyperplane misses `B`.
    pub parkable: Option<bool>,
    pub v: Option<Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParkReport {
    pub entries: Vec<ReportEntry>,
    pub verdict: Verdict,
}

/// Sections `B` by each sampled hyperplane and tests each section for
/// parkability in `B`. Entries follow the input order.
pub fn parkability_report(b: &PolytopeH, sample: &[Hyperplane]) -> Result<ParkReport, ParkError> {
    if b.dim > 3 {
        return Err(ParkError::DimensionTooHigh(b.dim));
    }
    let entries = sample
        .par_iter()
        .map(|h| {
            let sec = section_polytope(b, h)?;
            if sec.vertices.is_empty() {
                return Ok(ReportEntry {
                    hyperplane: h.clone(),
                    section: vec![],
                    parkable: None,
                    v: None,
                });
            }
            let res = is_parkable(&sec, b)?;
            Ok(ReportEntry {
                hyperplane: h.clone(),
                section: sec.vertices,
                parkable: Some(res.parkable),
                v: res.v,
            })
        })
        .collect::<Result<Vec<_>, ParkError>>()?;
    let verdict = if entries.iter().any(|e| e.parkable == Some(false)) {
        Verdict::RefutedByWitness
    } else {
        Verdict::NoViolationFound
    };
    Ok(ParkReport { entries, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn pt(c: &[i64]) -> Vec<Rational> {
        c.iter().map(|&v| r(v)).collect()
    }

    fn plane(n: &[i64], off: i64) -> Hyperplane {
        Hyperplane {
            normal: pt(n),
            offset: r(off),
        }
    }

    #[test]
    fn cube_triangle_is_not_parkable() {
        let b = PolytopeH::cube(3, r(1));
        let c = PolytopeV::new(3, vec![pt(&[1, 1, -1]), pt(&[1, -1, 1]), pt(&[-1, 1, 1])]).unwrap();
        let res = is_parkable(&c, &b).unwrap();
        assert!(!res.parkable);
        assert!(res.v.is_none());
    }

    #[test]
    fn origin_and_segment_park() {
        let b = PolytopeH::cube(2, r(1));
        let c = PolytopeV::new(2, vec![pt(&[-1, 0]), pt(&[1, 1]), pt(&[0, -1])]).unwrap();
        let res = is_parkable(&c, &b).unwrap();
        assert!(res.parkable);
        assert!(parks_at(&c, &b, res.v.as_ref().unwrap()).unwrap());
        let seg = PolytopeV::new(2, vec![pt(&[1, 1]), pt(&[1, -1])]).unwrap();
        let res = is_parkable(&seg, &b).unwrap();
        assert!(res.parkable);
        assert!(parks_at(&seg, &b, res.v.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn containment_and_dimension_are_checked() {
        let b = PolytopeH::cube(2, r(1));
        let c = PolytopeV::new(2, vec![pt(&[2, 0])]).unwrap();
        assert_eq!(is_parkable(&c, &b), Err(ParkError::CNotInB { vertex: 0, row: 0 }));
        let c3 = PolytopeV::new(3, vec![pt(&[0, 0, 0])]).unwrap();
        assert!(matches!(is_parkable(&c3, &b), Err(ParkError::DimensionMismatch { .. })));
    }

    #[test]
    fn centers() {
        let sq = PolytopeV::new(2, vec![pt(&[1, 1]), pt(&[1, -1]), pt(&[-1, 1]), pt(&[-1, -1])]).unwrap();
        assert_eq!(center_of_symmetry(&sq).unwrap(), Some(pt(&[0, 0])));
        let tri = PolytopeV::new(2, vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])]).unwrap();
        assert_eq!(center_of_symmetry(&tri).unwrap(), None);
        // hexagon with vertices (±2,0), (±1,±2), shifted by (3,1)
        let hex: Vec<Vec<Rational>> = [[2, 0], [1, 2], [-1, 2], [-2, 0], [-1, -2], [1, -2]]
            .iter()
            .map(|p| pt(&[p[0] + 3, p[1] + 1]))
            .collect();
        let mut with_interior = hex.clone();
        with_interior.push(pt(&[3, 1]));
        with_interior.push(pt(&[4, 1]));
        let c = PolytopeV::new(2, with_interior).unwrap();
        assert_eq!(center_of_symmetry(&c).unwrap(), Some(pt(&[3, 1])));
    }

    #[test]
    fn cube_sections() {
        let b = PolytopeH::cube(3, r(1));
        let tri = section_polytope(&b, &plane(&[1, 1, 1], 1)).unwrap();
        assert_eq!(tri.vertices, vec![pt(&[-1, 1, 1]), pt(&[1, -1, 1]), pt(&[1, 1, -1])]);
        let sq = section_polytope(&b, &plane(&[0, 0, 1], 0)).unwrap();
        assert_eq!(
            sq.vertices,
            vec![pt(&[-1, -1, 0]), pt(&[-1, 1, 0]), pt(&[1, -1, 0]), pt(&[1, 1, 0])]
        );
        assert!(section_polytope(&b, &plane(&[0, 0, 1], 5)).unwrap().vertices.is_empty());
    }

    #[test]
    fn section_errors() {
        let half = PolytopeH::new(2, vec![HalfSpace { normal: pt(&[1, 0]), offset: r(1) }]).unwrap();
        assert_eq!(section_polytope(&half, &plane(&[0, 1], 0)), Err(ParkError::UnboundedPolytope));
        let b4 = PolytopeH::cube(4, r(1));
        assert_eq!(section_polytope(&b4, &plane(&[1, 0, 0, 0], 0)), Err(ParkError::DimensionTooHigh(4)));
        let b = PolytopeH::cube(2, r(1));
        assert_eq!(section_polytope(&b, &plane(&[0, 0], 0)), Err(ParkError::ZeroNormal));
    }

    #[test]
    fn reports() {
        let cube = PolytopeH::cube(3, r(1));
        let rep = parkability_report(&cube, &[plane(&[0, 0, 1], 0), plane(&[1, 1, 1], 1)]).unwrap();
        assert_eq!(rep.verdict, Verdict::RefutedByWitness);
        assert_eq!(rep.entries[0].parkable, Some(true));
        assert_eq!(rep.entries[1].parkable, Some(false));
        let sq = PolytopeH::cube(2, r(1));
        let rep = parkability_report(&sq, &[plane(&[1, 2], 1), plane(&[3, -1], 0), plane(&[1, 0], 9)]).unwrap();
        assert_eq!(rep.verdict, Verdict::NoViolationFound);
        assert_eq!(rep.entries[2].parkable, None);
    }

    #[test]
    fn disc_proxy_is_symmetric_and_bounded() {
        let d = PolytopeH::disc_proxy(6);
        assert_eq!(d.rows.len(), 24);
        for row in &d.rows {
            let n2: Rational = row.normal.iter().map(|c| c * c).sum();
            assert_eq!(n2, r(1));
        }
        let sec = section_polytope(&d, &plane(&[1, 1], 0)).unwrap();
        assert_eq!(sec.vertices.len(), 2);
    }
}
