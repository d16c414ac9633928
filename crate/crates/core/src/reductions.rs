//! The two reductions: the time-counter gadget with parabola guards, and the
//! encoding of control states as vertices of a simplex.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use crate::checker::InvariantLabeling;
use crate::error::{check_dim, Error, Result};
use crate::model::{
    parabola_atom, AffineUpdate, ControlState, Guard, LinAtom, LinExpr, Rel, StateId, StateKind,
    Transition, TransitionSystem, VarId,
};
use crate::polyhedra::{Polyhedron, VPolytope};
use crate::rational::{Point, Rational};

/// Which parabola atom guards the original transitions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum GuardVariant {
    /// `y = (t² + t)/2`.
    #[default]
    Equality,
    /// `y ≤ (t² + t)/2`.
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetLayout {
    pub t_var: VarId,
    pub y_var: VarId,
    pub bad_state: StateId,
    pub source_dim: usize,
    /// Whether the source's own bad state was kept as the target's bad state.
    pub reused_bad: bool,
}

/// Adds a step counter `t` and `y = Σ (i+1)` so that every reachable
/// configuration lies on `y = (t² + t)/2`, guards each original transition
/// by that curve, and sends every point below the curve to the bad state.
///
/// The source bad state becomes the target bad state when nothing enters
/// it. Otherwise it is kept as an ordinary state and a fresh bad state is
/// appended.
pub fn gadget_reduce(s: &TransitionSystem, variant: GuardVariant) -> Result<(TransitionSystem, GadgetLayout)> {
    s.ensure_valid()?;
    let m = s.dim();
    let (t, y) = (VarId(m), VarId(m + 1));
    let mut vars = s.vars.clone();
    vars.push(TransitionSystem::fresh_name(&vars, "t"));
    vars.push(TransitionSystem::fresh_name(&vars, "y"));

    let src_bad = s.bad_state().expect("validated");
    let reused_bad = s.transitions.iter().all(|tr| tr.to != src_bad);
    let mut states = s.states.clone();
    let bad = if reused_bad {
        src_bad
    } else {
        states[src_bad.0].kind = StateKind::Ordinary;
        let names: Vec<String> = states.iter().map(|c| c.name.clone()).collect();
        states.push(ControlState::new(TransitionSystem::fresh_name(&names, "bad"), StateKind::Bad));
        StateId(states.len() - 1)
    };

    let rel = match variant {
        GuardVariant::Equality => Rel::Eq,
        GuardVariant::AtMost => Rel::Le,
    };
    let tick = |u: &AffineUpdate| {
        u.clone()
            .with(t, LinExpr::new([(t, Rational::one())], Rational::one()))
            .with(y, LinExpr::new([(y, Rational::one()), (t, Rational::one())], Rational::one()))
    };
    let mut transitions: Vec<Transition> = s
        .transitions
        .iter()
        .map(|tr| {
            let mut guard = tr.guard.clone();
            guard.poly.push(parabola_atom(t, y, rel));
            Transition::new(tr.from, tr.to, guard, tick(&tr.update))
        })
        .collect();
    for q in (0..states.len()).map(StateId).filter(|&q| q != bad) {
        let guard = Guard {
            lin: Vec::new(),
            poly: vec![parabola_atom(t, y, Rel::Lt)],
        };
        transitions.push(Transition::new(q, bad, guard, AffineUpdate::identity()));
    }
    let mut initial_values = s.initial_values.clone();
    initial_values.extend([Rational::zero(), Rational::zero()]);
    let target = TransitionSystem {
        vars,
        states,
        transitions,
        initial_values,
    };
    let layout = GadgetLayout {
        t_var: t,
        y_var: y,
        bad_state: bad,
        source_dim: m,
        reused_bad,
    };
    Ok((target, layout))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexLayout {
    /// Source register count.
    pub d: usize,
    /// Source state count.
    pub n: usize,
    pub y_vars: Vec<VarId>,
    /// Simplex vertex of every source state, indexed by source [`StateId`].
    pub encodings: Vec<Point>,
    pub source_bad: StateId,
    pub main: StateId,
    pub bad: StateId,
}

impl SimplexLayout {
    pub fn encoding(&self, q: StateId) -> &[Rational] {
        &self.encodings[q.0]
    }

    pub fn target_dim(&self) -> usize {
        self.d + self.n - 1
    }

    /// Source state encoded by `e`, if `e` is one of the vertices.
    pub fn decode(&self, e: &[Rational]) -> Option<StateId> {
        self.encodings.iter().position(|x| x.as_slice() == e).map(StateId)
    }

    fn in_simplex(e: &[Rational]) -> bool {
        e.iter().all(|c| !c.is_negative()) && e.iter().sum::<Rational>() <= Rational::one()
    }
}

/// Vertex `e_q` of the standard simplex: the initial state is the origin
/// and the others, in index order, are the unit vectors.
fn simplex_encodings(s: &TransitionSystem) -> Vec<Point> {
    let n = s.states.len();
    let init = s.initial_state().expect("validated");
    let mut next = 0;
    (0..n)
        .map(|q| {
            let mut e = vec![Rational::zero(); n - 1];
            if q != init.0 {
                e[next] = Rational::one();
                next += 1;
            }
            e
        })
        .collect()
}

/// Replaces the control states by `N − 1` registers holding a simplex
/// vertex. The target has one ordinary initial state and keeps a bad state.
pub fn state_encode(s: &TransitionSystem) -> Result<(TransitionSystem, SimplexLayout)> {
    s.ensure_valid()?;
    let d = s.dim();
    let n = s.states.len();
    let encodings = simplex_encodings(s);
    let mut vars = s.vars.clone();
    let mut y_vars = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        y_vars.push(VarId(vars.len()));
        let name = TransitionSystem::fresh_name(&vars, &format!("enc{i}"));
        vars.push(name);
    }
    let src_bad = s.bad_state().expect("validated");
    let bad_name = s.states[src_bad.0].name.clone();
    let main_name = TransitionSystem::fresh_name(std::slice::from_ref(&bad_name), "main");
    let (main, bad) = (StateId(0), StateId(1));

    let at = |e: &Point| {
        y_vars
            .iter()
            .zip(e)
            .map(|(&v, c)| LinAtom::new([(v, Rational::one())], Rel::Eq, c.clone()))
            .collect::<Vec<_>>()
    };
    let transitions = s
        .transitions
        .iter()
        .map(|tr| {
            let mut guard = tr.guard.clone();
            guard.lin.extend(at(&encodings[tr.from.0]));
            if tr.to == src_bad {
                Transition::new(main, bad, guard, tr.update.clone())
            } else {
                let update = y_vars
                    .iter()
                    .zip(&encodings[tr.to.0])
                    .fold(tr.update.clone(), |u, (&v, c)| u.with(v, LinExpr::constant(c.clone())));
                Transition::new(main, main, guard, update)
            }
        })
        .collect();
    let mut initial_values = s.initial_values.clone();
    initial_values.extend(encodings[s.initial_state().expect("validated").0].iter().cloned());
    let target = TransitionSystem {
        vars,
        states: vec![
            ControlState::new(main_name, StateKind::Initial),
            ControlState::new(bad_name, StateKind::Bad),
        ],
        transitions,
        initial_values,
    };
    let layout = SimplexLayout {
        d,
        n,
        y_vars,
        encodings,
        source_bad: src_bad,
        main,
        bad,
    };
    Ok((target, layout))
}

/// Hull of `P_q × {e_q}` over all source states.
pub fn lift_invariant(inv: &InvariantLabeling, layout: &SimplexLayout) -> Result<VPolytope> {
    if inv.len() != layout.n {
        return Err(Error::LabelingMismatch(format!("{} labels for {} states", inv.len(), layout.n)));
    }
    if !inv.get(layout.source_bad).is_empty() {
        return Err(Error::PreconditionViolated("the bad state label is not empty".into()));
    }
    let mut points = Vec::new();
    for (q, label) in inv.labels().iter().enumerate() {
        check_dim(layout.d, label.dim())?;
        if q == layout.source_bad.0 {
            continue;
        }
        for p in label.to_vrep()?.into_points() {
            let mut x = p;
            x.extend(layout.encodings[q].iter().cloned());
            points.push(x);
        }
    }
    VPolytope::new(layout.target_dim(), points)
}

/// The lifted polytope at `main` and the empty set at the bad state.
pub fn lift_labeling(inv: &InvariantLabeling, layout: &SimplexLayout) -> Result<InvariantLabeling> {
    let lifted = lift_invariant(inv, layout)?;
    let mut labels = vec![Polyhedron::empty(layout.target_dim()); 2];
    labels[layout.main.0] = lifted.into();
    Ok(InvariantLabeling::new(labels))
}

/// Slices `P` at every `e_q`. The bad state is always labeled empty.
pub fn project_invariant(p: &Polyhedron, layout: &SimplexLayout) -> Result<InvariantLabeling> {
    check_dim(layout.target_dim(), p.dim())?;
    let d = layout.d;
    let slice_by_generators = match p {
        Polyhedron::V(v) => v.points().iter().all(|x| SimplexLayout::in_simplex(&x[d..])),
        Polyhedron::H(_) => false,
    };
    let h = if slice_by_generators { None } else { Some(p.to_hrep()) };
    let mut labels = Vec::with_capacity(layout.n);
    for q in 0..layout.n {
        let e = &layout.encodings[q];
        let label = if q == layout.source_bad.0 {
            Polyhedron::empty(d)
        } else if let Some(h) = &h {
            let fix: BTreeMap<VarId, Rational> = layout.y_vars.iter().copied().zip(e.iter().cloned()).collect();
            h.substitute(&fix)?.into()
        } else {
            let Polyhedron::V(v) = p else { unreachable!("generator route needs generators") };
            let pts = v
                .points()
                .iter()
                .filter(|x| x[d..] == e[..])
                .map(|x| x[..d].to_vec())
                .collect();
            VPolytope::new(d, pts)?.into()
        };
        labels.push(label);
    }
    Ok(InvariantLabeling::new(labels))
}
