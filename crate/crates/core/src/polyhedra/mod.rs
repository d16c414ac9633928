//! Exact convex polyhedra over `ℚ^n`.
//!
//! [`HPolyhedron`] is the constraint form (closed, possibly unbounded);
//! [`VPolytope`] is the generator form and only covers bounded sets. The
//! two are converted with the double description method in [`dd`].

mod dd;
mod fm;

use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use crate::error::{check_dim, Error, Result};
use crate::lp::{self, LinRow, LpOutcome};
use crate::model::{AffineUpdate, Rel, VarId};
use crate::rational::{dot, primitive, Point, Rational};

/// `coeffs · x rel rhs` with `rel ∈ {≤, =}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub rel: Rel,
    pub rhs: Rational,
}

impl Constraint {
    pub fn le(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self {
            coeffs,
            rel: Rel::Le,
            rhs,
        }
    }

    /// `coeffs · x ≥ rhs`, stored as `−coeffs · x ≤ −rhs`.
    pub fn ge(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self::le(coeffs.into_iter().map(|c| -c).collect(), -rhs)
    }

    pub fn eq(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self {
            coeffs,
            rel: Rel::Eq,
            rhs,
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn holds(&self, p: &[Rational]) -> bool {
        self.rel.holds(&dot(&self.coeffs, p), &self.rhs)
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// For constraints with no variables: whether `0 rel rhs` holds.
    fn trivially_true(&self) -> bool {
        self.rel.holds(&Rational::zero(), &self.rhs)
    }

    /// Canonical positive rescaling; equalities also fix the sign.
    pub(crate) fn normalized(&self) -> Self {
        let mut all = self.coeffs.clone();
        all.push(self.rhs.clone());
        let mut all = primitive(&all);
        if self.rel == Rel::Eq && all.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
            all.iter_mut().for_each(|c| *c = -c.clone());
        }
        let rhs = all.pop().expect("rhs slot");
        Self {
            coeffs: all,
            rel: self.rel,
            rhs,
        }
    }

    pub(crate) fn row(&self) -> LinRow {
        LinRow::new(self.coeffs.clone(), self.rel, self.rhs.clone())
    }
}

/// Simplifies a constraint list: canonical forms, duplicates and trivially
/// true rows removed. `None` when some row is trivially false.
pub(crate) fn tidy(constraints: impl IntoIterator<Item = Constraint>) -> Option<Vec<Constraint>> {
    let mut out: Vec<Constraint> = Vec::new();
    for c in constraints {
        if c.is_trivial() {
            if c.trivially_true() {
                continue;
            }
            return None;
        }
        let n = c.normalized();
        if !out.contains(&n) {
            out.push(n);
        }
    }
    Some(out)
}

/// Constraint-form polyhedron `{x ∈ ℚ^dim : all constraints hold}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HPolyhedron {
    dim: usize,
    constraints: Vec<Constraint>,
}

impl HPolyhedron {
    pub fn new(dim: usize, constraints: Vec<Constraint>) -> Result<Self> {
        for c in &constraints {
            check_dim(dim, c.dim())?;
            if c.rel == Rel::Lt {
                return Err(Error::StrictConstraint);
            }
        }
        Ok(Self { dim, constraints })
    }

    pub fn universe(dim: usize) -> Self {
        Self {
            dim,
            constraints: vec![],
        }
    }

    /// Canonical empty set `{0 ≤ −1}`.
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            constraints: vec![Constraint::le(vec![Rational::zero(); dim], -Rational::one())],
        }
    }

    /// `lo_i ≤ x_i ≤ hi_i`.
    pub fn from_box(lo: &[Rational], hi: &[Rational]) -> Self {
        let dim = lo.len();
        let mut cs = Vec::new();
        for i in 0..dim {
            let mut e = vec![Rational::zero(); dim];
            e[i] = Rational::one();
            cs.push(Constraint::le(e.clone(), hi[i].clone()));
            cs.push(Constraint::ge(e, lo[i].clone()));
        }
        Self { dim, constraints: cs }
    }

    pub(crate) fn from_tidy(dim: usize, cs: Option<Vec<Constraint>>) -> Self {
        match cs {
            Some(constraints) => Self { dim, constraints },
            None => Self::empty(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn into_constraints(self) -> Vec<Constraint> {
        self.constraints
    }

    pub fn with_constraint(mut self, c: Constraint) -> Result<Self> {
        check_dim(self.dim, c.dim())?;
        if c.rel == Rel::Lt {
            return Err(Error::StrictConstraint);
        }
        self.constraints.push(c);
        Ok(self)
    }

    pub fn intersect(&self, other: &HPolyhedron) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut constraints = self.constraints.clone();
        constraints.extend(other.constraints.iter().cloned());
        Ok(Self {
            dim: self.dim,
            constraints,
        })
    }

    pub(crate) fn rows(&self) -> Vec<LinRow> {
        self.constraints.iter().map(Constraint::row).collect()
    }

    pub fn contains(&self, p: &[Rational]) -> Result<bool> {
        check_dim(self.dim, p.len())?;
        Ok(self.constraints.iter().all(|c| c.holds(p)))
    }

    /// Some point of the polyhedron, found by exact linear programming.
    pub fn feasible_point(&self) -> Option<Point> {
        lp::feasible_point(self.dim, &self.rows())
    }

    pub fn is_empty(&self) -> bool {
        self.feasible_point().is_none()
    }

    pub(crate) fn maximize(&self, objective: &[Rational]) -> LpOutcome {
        lp::maximize(self.dim, &self.rows(), objective)
    }

    /// A point of `self` that violates `c`, if any.
    pub fn violation(&self, c: &Constraint) -> Result<Option<Point>> {
        check_dim(self.dim, c.dim())?;
        let mut rows = self.rows();
        let above = LinRow::new(c.coeffs.iter().map(|x| -x).collect(), Rel::Lt, -c.rhs.clone());
        rows.push(above);
        if let Some(p) = lp::feasible_point(self.dim, &rows) {
            return Ok(Some(p));
        }
        if c.rel == Rel::Eq {
            rows.pop();
            rows.push(LinRow::new(c.coeffs.clone(), Rel::Lt, c.rhs.clone()));
            return Ok(lp::feasible_point(self.dim, &rows));
        }
        Ok(None)
    }

    /// Whether every point of `self` satisfies `c`.
    pub fn entails(&self, c: &Constraint) -> Result<bool> {
        Ok(self.violation(c)?.is_none())
    }

    /// Whether `self ⊆ other`.
    pub fn is_subset_of(&self, other: &HPolyhedron) -> Result<bool> {
        check_dim(self.dim, other.dim)?;
        for c in &other.constraints {
            if !self.entails(c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Mutual inclusion.
    pub fn same_set(&self, other: &HPolyhedron) -> Result<bool> {
        Ok(self.is_subset_of(other)? && other.is_subset_of(self)?)
    }

    pub fn is_bounded(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        (0..self.dim).all(|i| {
            [Rational::one(), -Rational::one()].into_iter().all(|s| {
                let mut obj = vec![Rational::zero(); self.dim];
                obj[i] = s;
                !matches!(self.maximize(&obj), LpOutcome::Unbounded)
            })
        })
    }

    /// Projection along `v`; the result lives in dimension `dim − 1`.
    pub fn eliminate(&self, v: VarId) -> Result<HPolyhedron> {
        if v.0 >= self.dim {
            return Err(Error::VarOutOfRange {
                index: v.0,
                dim: self.dim,
            });
        }
        Ok(fm::eliminate_all(self, &[v.0]))
    }

    /// Projection onto the variables not listed in `vars`.
    pub fn eliminate_many(&self, vars: &[VarId]) -> Result<HPolyhedron> {
        for v in vars {
            if v.0 >= self.dim {
                return Err(Error::VarOutOfRange {
                    index: v.0,
                    dim: self.dim,
                });
            }
        }
        let idx: Vec<usize> = vars.iter().map(|v| v.0).collect();
        Ok(fm::eliminate_all(self, &idx))
    }

    /// Exact image `{A·x + c | x ∈ self}`.
    pub fn affine_image(&self, u: &AffineUpdate) -> Result<HPolyhedron> {
        fm::affine_image(self, u)
    }

    /// Fixes the listed variables and drops them.
    pub fn substitute(&self, assignment: &BTreeMap<VarId, Rational>) -> Result<HPolyhedron> {
        for v in assignment.keys() {
            if v.0 >= self.dim {
                return Err(Error::VarOutOfRange {
                    index: v.0,
                    dim: self.dim,
                });
            }
        }
        let keep: Vec<usize> = (0..self.dim).filter(|i| !assignment.contains_key(&VarId(*i))).collect();
        let cs = self.constraints.iter().map(|c| {
            let mut rhs = c.rhs.clone();
            for (v, val) in assignment {
                rhs -= &c.coeffs[v.0] * val;
            }
            Constraint {
                coeffs: keep.iter().map(|&i| c.coeffs[i].clone()).collect(),
                rel: c.rel,
                rhs,
            }
        });
        Ok(Self::from_tidy(keep.len(), tidy(cs)))
    }

    /// Drops inequalities implied by the remaining constraints.
    pub fn remove_redundant(&self) -> HPolyhedron {
        let Some(mut cs) = tidy(self.constraints.iter().cloned()) else {
            return Self::empty(self.dim);
        };
        if lp::feasible_point(self.dim, &cs.iter().map(Constraint::row).collect::<Vec<_>>()).is_none() {
            return Self::empty(self.dim);
        }
        let mut i = 0;
        while i < cs.len() {
            if cs[i].rel == Rel::Le {
                let c = cs.remove(i);
                let rest = Self {
                    dim: self.dim,
                    constraints: cs.clone(),
                };
                let implied = match rest.maximize(&c.coeffs) {
                    LpOutcome::Optimal { value, .. } => value <= c.rhs,
                    LpOutcome::Infeasible => true,
                    LpOutcome::Unbounded => false,
                };
                if !implied {
                    cs.insert(i, c);
                    i += 1;
                }
            } else {
                i += 1;
            }
        }
        Self {
            dim: self.dim,
            constraints: cs,
        }
    }

    /// Vertex form; fails with [`Error::UnboundedPolyhedron`] on unbounded input.
    pub fn to_vrep(&self) -> Result<VPolytope> {
        dd::hrep_to_vrep(self)
    }
}

/// Generator-form polytope: the convex hull of finitely many points.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VPolytope {
    dim: usize,
    points: Vec<Point>,
}

impl VPolytope {
    pub fn new(dim: usize, points: Vec<Point>) -> Result<Self> {
        for p in &points {
            check_dim(dim, p.len())?;
        }
        Ok(Self { dim, points })
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, points: vec![] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Membership in the hull: `∃ λ ≥ 0, Σλ = 1, Σ λ_i·v_i = p`.
    pub fn contains(&self, p: &[Rational]) -> Result<bool> {
        check_dim(self.dim, p.len())?;
        Ok(hull_contains(self.points.iter(), p))
    }

    /// Whether `points[i]` lies outside the hull of the other points.
    pub fn is_vertex(&self, i: usize) -> bool {
        let others = self.points.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q);
        !hull_contains(others, &self.points[i])
    }

    /// The extreme points, deduplicated and sorted.
    pub fn vertices(&self) -> VPolytope {
        let mut pts = self.points.clone();
        pts.sort();
        pts.dedup();
        let probe = VPolytope {
            dim: self.dim,
            points: pts,
        };
        let points = (0..probe.points.len())
            .filter(|&i| probe.is_vertex(i))
            .map(|i| probe.points[i].clone())
            .collect();
        VPolytope { dim: self.dim, points }
    }

    /// Generator-wise image; exact because affine maps commute with hulls.
    pub fn affine_image(&self, u: &AffineUpdate) -> Result<VPolytope> {
        if let Some(v) = u.max_var().filter(|v| v.0 >= self.dim) {
            return Err(Error::VarOutOfRange {
                index: v.0,
                dim: self.dim,
            });
        }
        let points = self.points.iter().map(|p| u.apply(p)).collect::<Result<_>>()?;
        Ok(VPolytope { dim: self.dim, points })
    }

    pub fn to_hrep(&self) -> HPolyhedron {
        dd::vrep_to_hrep(self)
    }

    /// Mutual inclusion, checked generator by generator.
    pub fn same_set(&self, other: &VPolytope) -> Result<bool> {
        check_dim(self.dim, other.dim)?;
        for p in &self.points {
            if !other.contains(p)? {
                return Ok(false);
            }
        }
        for p in &other.points {
            if !self.contains(p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn hull_contains<'a>(points: impl Iterator<Item = &'a Point>, p: &[Rational]) -> bool {
    let pts: Vec<&Point> = points.collect();
    if pts.is_empty() {
        return false;
    }
    if pts.iter().any(|q| q.as_slice() == p) {
        return true;
    }
    let k = pts.len();
    let mut rows = Vec::with_capacity(p.len() + 1 + k);
    rows.push(LinRow::new(vec![Rational::one(); k], Rel::Eq, Rational::one()));
    for (d, target) in p.iter().enumerate() {
        rows.push(LinRow::new(pts.iter().map(|q| q[d].clone()).collect(), Rel::Eq, target.clone()));
    }
    for j in 0..k {
        let mut e = vec![Rational::zero(); k];
        e[j] = -Rational::one();
        rows.push(LinRow::new(e, Rel::Le, Rational::zero()));
    }
    lp::feasible_point(k, &rows).is_some()
}

/// A polyhedron in either representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Polyhedron {
    H(HPolyhedron),
    V(VPolytope),
}

impl Polyhedron {
    pub fn empty(dim: usize) -> Self {
        Polyhedron::V(VPolytope::empty(dim))
    }

    pub fn dim(&self) -> usize {
        match self {
            Polyhedron::H(h) => h.dim(),
            Polyhedron::V(v) => v.dim(),
        }
    }

    pub fn contains(&self, p: &[Rational]) -> Result<bool> {
        match self {
            Polyhedron::H(h) => h.contains(p),
            Polyhedron::V(v) => v.contains(p),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Polyhedron::H(h) => h.is_empty(),
            Polyhedron::V(v) => v.is_empty(),
        }
    }

    /// Some point of the set, if non-empty.
    pub fn some_point(&self) -> Option<Point> {
        match self {
            Polyhedron::H(h) => h.feasible_point(),
            Polyhedron::V(v) => v.points().first().cloned(),
        }
    }

    pub fn to_hrep(&self) -> HPolyhedron {
        match self {
            Polyhedron::H(h) => h.clone(),
            Polyhedron::V(v) => v.to_hrep(),
        }
    }

    pub fn to_vrep(&self) -> Result<VPolytope> {
        match self {
            Polyhedron::H(h) => h.to_vrep(),
            Polyhedron::V(v) => Ok(v.clone()),
        }
    }
}

impl From<HPolyhedron> for Polyhedron {
    fn from(h: HPolyhedron) -> Self {
        Polyhedron::H(h)
    }
}

impl From<VPolytope> for Polyhedron {
    fn from(v: VPolytope) -> Self {
        Polyhedron::V(v)
    }
}

#[cfg(test)]
mod tests;
