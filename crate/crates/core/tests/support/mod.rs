//! Independent oracles for the integration and acceptance tests.

#![allow(dead_code)]

pub mod smt;

use std::collections::BTreeSet;

use polyinv_core::model::Config;
use polyinv_core::rational::{int, Point};
use polyinv_core::{Polyhedron, Transition};

/// All integer points of `[-b, b]^dim` in lexicographic order.
pub fn integer_box(dim: usize, b: i64) -> Vec<Point> {
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p: Point| {
                (-b..=b).map(move |v| {
                    let mut q = p.clone();
                    q.push(int(v));
                    q
                })
            })
            .collect();
    }
    out
}

/// An integer point of `P ∩ guard` (within the box) whose image leaves `Q`.
pub fn integer_counterexample(p: &Polyhedron, t: &Transition, q: &Polyhedron, b: i64) -> Option<Point> {
    integer_box(p.dim(), b).into_iter().find(|x| {
        p.contains(x).unwrap()
            && t.guard.eval(x).unwrap()
            && !q.contains(&t.update.apply(x).unwrap()).unwrap()
    })
}

/// Projection of configurations to `(state, first d registers)`.
pub fn project_configs(configs: &BTreeSet<Config>, d: usize) -> BTreeSet<Config> {
    configs
        .iter()
        .map(|c| Config { state: c.state, values: c.values[..d].to_vec() })
        .collect()
}

use polyinv_core::model::{
    AffineUpdate, ControlState, Guard, LinAtom, LinExpr, Rel, StateId, StateKind, TransitionSystem, VarId,
};
use rand::Rng;

/// Shape of a random integer system: registers, non-bad states, transitions
/// and the bound on guard offsets.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub dim: usize,
    pub states: usize,
    pub transitions: usize,
    pub bound: i64,
}

/// A random system with integer data and linear guards. State 0 is
/// initial and the last state is bad.
pub fn random_system(rng: &mut impl Rng, shape: Shape) -> TransitionSystem {
    let n = shape.states + 1;
    let mut states: Vec<ControlState> =
        (0..shape.states).map(|i| ControlState::new(format!("q{i}"), StateKind::Ordinary)).collect();
    states[0].kind = StateKind::Initial;
    states.push(ControlState::new("bad", StateKind::Bad));
    let transitions = (0..shape.transitions)
        .map(|_| {
            let from = StateId(rng.gen_range(0..shape.states));
            let to = StateId(rng.gen_range(0..n));
            let lin = (0..rng.gen_range(0..=2))
                .map(|_| {
                    let terms: Vec<_> = (0..shape.dim).map(|i| (VarId(i), int(rng.gen_range(-2..=2)))).collect();
                    let rel = [Rel::Le, Rel::Le, Rel::Lt, Rel::Eq][rng.gen_range(0..4)];
                    LinAtom::new(terms, rel, int(rng.gen_range(-shape.bound..=shape.bound)))
                })
                .collect();
            let update = (0..shape.dim).fold(AffineUpdate::identity(), |u, i| {
                if rng.gen_bool(0.3) {
                    return u;
                }
                let j = rng.gen_range(0..shape.dim);
                let e = LinExpr::new([(VarId(j), int(rng.gen_range(-1..=1)))], int(rng.gen_range(-2..=2)));
                u.with(VarId(i), e)
            });
            Transition::new(from, to, Guard::linear(lin), update)
        })
        .collect();
    TransitionSystem {
        vars: (0..shape.dim).map(|i| format!("x{i}")).collect(),
        states,
        transitions,
        initial_values: (0..shape.dim).map(|_| int(rng.gen_range(-2..=2))).collect(),
    }
}
