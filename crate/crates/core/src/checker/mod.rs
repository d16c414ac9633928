//! Checking inductive separating invariants.
//!
//! A labeling passes when the initial values lie in the initial label, the
//! bad label is empty, and every transition maps the guarded part of its
//! source label into its target label. Transitions are decided exactly by
//! guard shape:
//!
//! * linear guards: each target constraint is pulled back through the
//!   update and checked by exact LP, which yields a pre-state witness;
//! * `y = p(t)` or `y ≤ p(t)` on a source lying on the convex side: the
//!   guarded set is a union of generator hulls, see [`on_curve_groups`];
//! * `y < p(t)`: a convex function is maximal at a vertex, so the guarded
//!   set is non-empty iff some vertex lies strictly below the curve.

mod curve;

use std::cell::OnceCell;

use num::Signed;

pub use curve::{on_curve_groups, CurveAtom, CurveRel};

use crate::error::{check_dim, Error, Result};
use crate::lp::{self, LinRow};
use crate::model::{AffineUpdate, LinAtom, Rel, StateId, Transition, TransitionSystem};
use crate::polyhedra::{tidy, Constraint, HPolyhedron, Polyhedron, VPolytope};
use crate::rational::{dot, frac, Point, Rational};

/// One polyhedron per control state, indexed by [`StateId`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantLabeling {
    labels: Vec<Polyhedron>,
}

impl InvariantLabeling {
    pub fn new(labels: Vec<Polyhedron>) -> Self {
        Self { labels }
    }

    /// Every state labeled with the empty set.
    pub fn empty(states: usize, dim: usize) -> Self {
        Self::new(vec![Polyhedron::empty(dim); states])
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, s: StateId) -> &Polyhedron {
        &self.labels[s.0]
    }

    pub fn set(&mut self, s: StateId, p: Polyhedron) {
        self.labels[s.0] = p;
    }

    pub fn labels(&self) -> &[Polyhedron] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<Polyhedron> {
        self.labels
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    SeparatingInductive,
    NotInductive,
    NotSeparating,
    InitialViolated,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::SeparatingInductive => "separating-inductive",
            Verdict::NotInductive => "not-inductive",
            Verdict::NotSeparating => "not-separating",
            Verdict::InitialViolated => "initial-violated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    /// The initial values are outside the initial label.
    InitialNotContained,
    /// The bad label contains a point.
    BadStateNonEmpty,
    /// A transition leaves its target label.
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub kind: FailureKind,
    pub transition: Option<usize>,
    pub witness: Option<Point>,
    pub image: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub failures: Vec<Failure>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::SeparatingInductive
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransitionOutcome {
    Pass,
    Fail { witness: Point, image: Point },
}

impl TransitionOutcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, TransitionOutcome::Pass)
    }
}

/// A label with its other representation computed on demand.
struct Prepared<'a> {
    poly: &'a Polyhedron,
    h: OnceCell<HPolyhedron>,
    v: OnceCell<Result<VPolytope>>,
    empty: OnceCell<bool>,
}

impl<'a> Prepared<'a> {
    fn new(poly: &'a Polyhedron) -> Self {
        Self {
            poly,
            h: OnceCell::new(),
            v: OnceCell::new(),
            empty: OnceCell::new(),
        }
    }

    fn dim(&self) -> usize {
        self.poly.dim()
    }

    fn h(&self) -> &HPolyhedron {
        match self.poly {
            Polyhedron::H(h) => h,
            Polyhedron::V(v) => self.h.get_or_init(|| v.to_hrep()),
        }
    }

    fn v(&self) -> Result<&VPolytope> {
        match self.poly {
            Polyhedron::V(v) => Ok(v),
            Polyhedron::H(h) => self.v.get_or_init(|| h.to_vrep()).as_ref().map_err(Clone::clone),
        }
    }

    fn is_empty(&self) -> bool {
        *self.empty.get_or_init(|| self.poly.is_empty())
    }

    fn contains(&self, p: &[Rational]) -> Result<bool> {
        self.poly.contains(p)
    }

    /// Whether the label is all of space.
    fn is_universe(&self) -> bool {
        match self.poly {
            Polyhedron::H(h) => tidy(h.constraints().iter().cloned()).is_some_and(|c| c.is_empty()),
            Polyhedron::V(_) => false,
        }
    }
}

/// Decides `update(P ∩ guard) ⊆ Q` for a single transition.
pub fn check_transition(p: &Polyhedron, t: &Transition, q: &Polyhedron) -> Result<TransitionOutcome> {
    check_prepared(&Prepared::new(p), t, &Prepared::new(q))
}

fn check_prepared(p: &Prepared, t: &Transition, q: &Prepared) -> Result<TransitionOutcome> {
    let dim = p.dim();
    check_dim(dim, q.dim())?;
    for v in [t.guard.max_var(), t.update.max_var()].into_iter().flatten() {
        if v.0 >= dim {
            return Err(Error::VarOutOfRange { index: v.0, dim });
        }
    }
    if p.is_empty() {
        return Ok(TransitionOutcome::Pass);
    }
    match t.guard.poly.as_slice() {
        [] => linear_check(p.h(), &t.guard.lin, &t.update, q),
        [atom] => {
            let curve = CurveAtom::classify(atom)?;
            match curve.rel {
                CurveRel::Eq | CurveRel::Le => on_curve_check(p.v()?, &curve, &t.guard.lin, &t.update, q),
                CurveRel::Lt => below_curve_check(p, &curve, &t.guard.lin, &t.update, q),
                CurveRel::Ge | CurveRel::Gt => Err(Error::UnsupportedGuard(
                    "polynomial atom selects the convex side of the curve".into(),
                )),
            }
        }
        _ => Err(Error::UnsupportedGuard("more than one polynomial atom in a guard".into())),
    }
}

fn lin_rows(lin: &[LinAtom], dim: usize) -> Result<Vec<LinRow>> {
    lin.iter()
        .map(|a| Ok(LinRow::new(a.dense(dim)?, a.rel, a.rhs.clone())))
        .collect()
}

fn fail(u: &AffineUpdate, witness: Point) -> Result<TransitionOutcome> {
    let image = u.apply(&witness)?;
    Ok(TransitionOutcome::Fail { witness, image })
}

/// Linear guard: every constraint `a·x' rel b` of `Q` pulled back to
/// `a·(Ax + c) rel b` must hold on `P ∩ guard`.
fn linear_check(p: &HPolyhedron, lin: &[LinAtom], u: &AffineUpdate, q: &Prepared) -> Result<TransitionOutcome> {
    let dim = p.dim();
    let mut rows = p.rows();
    rows.extend(lin_rows(lin, dim)?);
    let Some(targets) = tidy(q.h().constraints().iter().cloned()) else {
        return match lp::feasible_point(dim, &rows) {
            Some(x) => fail(u, x),
            None => Ok(TransitionOutcome::Pass),
        };
    };
    let (a, c) = u.matrix(dim)?;
    for qc in &targets {
        let pulled: Vec<Rational> = (0..dim)
            .map(|j| (0..dim).map(|i| &qc.coeffs[i] * &a[i][j]).sum())
            .collect();
        let rhs = &qc.rhs - dot(&qc.coeffs, &c);
        let mut sides = vec![LinRow::new(pulled.iter().map(|x| -x).collect(), Rel::Lt, -rhs.clone())];
        if qc.rel == Rel::Eq {
            sides.push(LinRow::new(pulled, Rel::Lt, rhs));
        }
        for side in sides {
            rows.push(side);
            let found = lp::feasible_point(dim, &rows);
            rows.pop();
            if let Some(x) = found {
                return fail(u, x);
            }
        }
    }
    Ok(TransitionOutcome::Pass)
}

/// `y = p(t)` or `y ≤ p(t)` against a source entirely on `y ≥ p(t)`: both
/// select the same set, the union of the on-curve group hulls.
fn on_curve_check(
    v: &VPolytope,
    curve: &CurveAtom,
    lin: &[LinAtom],
    u: &AffineUpdate,
    q: &Prepared,
) -> Result<TransitionOutcome> {
    for g in curve::curve_groups(v, curve)? {
        let out = linear_check(&g.to_hrep(), lin, u, q)?;
        if !out.is_pass() {
            return Ok(out);
        }
    }
    Ok(TransitionOutcome::Pass)
}

/// `y < p(t)`: find a vertex of `P ∩ closure(linear guard)` below the curve
/// and nudge it into the strict guard if needed.
fn below_curve_check(
    p: &Prepared,
    curve: &CurveAtom,
    lin: &[LinAtom],
    u: &AffineUpdate,
    q: &Prepared,
) -> Result<TransitionOutcome> {
    let dim = p.dim();
    let vertices: Vec<Point> = if lin.is_empty() {
        p.v()?.points().to_vec()
    } else {
        let mut rows = p.h().rows();
        rows.extend(lin_rows(lin, dim)?);
        let Some(interior) = lp::feasible_point(dim, &rows) else {
            return Ok(TransitionOutcome::Pass);
        };
        let closed: Vec<Constraint> = lin
            .iter()
            .map(|a| {
                let coeffs = a.dense(dim)?;
                Ok(match a.rel {
                    Rel::Eq => Constraint::eq(coeffs, a.rhs.clone()),
                    Rel::Le | Rel::Lt => Constraint::le(coeffs, a.rhs.clone()),
                })
            })
            .collect::<Result<_>>()?;
        let bounded = p.h().intersect(&HPolyhedron::new(dim, closed)?)?;
        let verts = bounded.to_vrep()?.into_points();
        match verts.iter().find(|x| curve.gap(x).is_negative()) {
            None => return Ok(TransitionOutcome::Pass),
            Some(x) => vec![nudge(x, &interior, curve, lin)?],
        }
    };
    let Some(witness) = vertices.into_iter().find(|x| curve.gap(x).is_negative()) else {
        return Ok(TransitionOutcome::Pass);
    };
    let image = u.apply(&witness)?;
    if !q.contains(&image)? {
        return Ok(TransitionOutcome::Fail { witness, image });
    }
    if q.is_universe() {
        return Ok(TransitionOutcome::Pass);
    }
    Err(Error::UnsupportedGuard(
        "strict curve guard into a target that is neither empty nor everything".into(),
    ))
}

/// Moves `v` toward `w` until the strict linear atoms hold, keeping it below
/// the curve. Terminates because both conditions are open and `w` satisfies
/// the first while `v` satisfies the second.
fn nudge(v: &[Rational], w: &[Rational], curve: &CurveAtom, lin: &[LinAtom]) -> Result<Point> {
    let mut eps = Rational::from_integer(1.into());
    loop {
        let z: Point = v.iter().zip(w).map(|(a, b)| a + &eps * (b - a)).collect();
        let guard_ok = lin.iter().map(|a| a.holds(&z)).collect::<Result<Vec<_>>>()?.into_iter().all(|b| b);
        if guard_ok && curve.gap(&z).is_negative() {
            return Ok(z);
        }
        eps *= frac(1, 2);
    }
}

/// Checks the initial condition, emptiness of the bad label and stability of
/// every transition.
///
/// Every violated condition is reported. If nothing fails but some
/// transition lies outside the decidable fragment, that error is returned.
pub fn check_separating(s: &TransitionSystem, inv: &InvariantLabeling) -> Result<CheckReport> {
    s.ensure_valid()?;
    if inv.len() != s.states.len() {
        return Err(Error::LabelingMismatch(format!(
            "{} labels for {} states",
            inv.len(),
            s.states.len()
        )));
    }
    let dim = s.dim();
    for (i, l) in inv.labels().iter().enumerate() {
        if l.dim() != dim {
            return Err(Error::LabelingMismatch(format!(
                "label of {} has dimension {}, expected {dim}",
                s.states[i].name,
                l.dim()
            )));
        }
    }
    let prepared: Vec<Prepared> = inv.labels().iter().map(Prepared::new).collect();
    let init = s.initial_state().expect("validated");
    let bad = s.bad_state().expect("validated");
    let mut failures = Vec::new();

    if !prepared[init.0].contains(&s.initial_values)? {
        failures.push(Failure {
            kind: FailureKind::InitialNotContained,
            transition: None,
            witness: Some(s.initial_values.clone()),
            image: None,
        });
    }
    if let Some(x) = inv.get(bad).some_point() {
        failures.push(Failure {
            kind: FailureKind::BadStateNonEmpty,
            transition: None,
            witness: Some(x),
            image: None,
        });
    }
    let mut undecided = None;
    for (i, t) in s.transitions.iter().enumerate() {
        match check_prepared(&prepared[t.from.0], t, &prepared[t.to.0]) {
            Ok(TransitionOutcome::Pass) => {}
            Ok(TransitionOutcome::Fail { witness, image }) => failures.push(Failure {
                kind: FailureKind::Unstable,
                transition: Some(i),
                witness: Some(witness),
                image: Some(image),
            }),
            Err(e) => {
                undecided.get_or_insert(e);
            }
        }
    }
    let verdict = if failures.iter().any(|f| f.kind == FailureKind::InitialNotContained) {
        Verdict::InitialViolated
    } else if failures.iter().any(|f| f.kind == FailureKind::BadStateNonEmpty) {
        Verdict::NotSeparating
    } else if !failures.is_empty() {
        Verdict::NotInductive
    } else if let Some(e) = undecided {
        return Err(e);
    } else {
        Verdict::SeparatingInductive
    };
    Ok(CheckReport { verdict, failures })
}
