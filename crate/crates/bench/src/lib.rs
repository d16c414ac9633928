//! Inputs for the benchmarks.

use polyinv_core::model::{
    AffineUpdate, ControlState, Guard, LinAtom, LinExpr, Rel, StateId, StateKind, Transition, TransitionSystem, VarId,
};
use polyinv_core::polyhedra::{Constraint, HPolyhedron};
use polyinv_core::rational::int;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Counts `x` from 0 to `n` and then halts in `done`.
pub fn counter_to(n: i64) -> TransitionSystem {
    let x = VarId(0);
    TransitionSystem {
        vars: vec!["x".into()],
        states: vec![
            ControlState::new("loop", StateKind::Initial),
            ControlState::new("done", StateKind::Ordinary),
            ControlState::new("bad", StateKind::Bad),
        ],
        transitions: vec![
            Transition::new(
                StateId(0),
                StateId(0),
                Guard::linear(vec![LinAtom::new([(x, int(1))], Rel::Le, int(n - 1))]),
                AffineUpdate::identity().with(x, LinExpr::new([(x, int(1))], int(1))),
            ),
            Transition::new(
                StateId(0),
                StateId(1),
                Guard::linear(vec![LinAtom::new([(x, int(-1))], Rel::Le, int(-n))]),
                AffineUpdate::identity(),
            ),
        ],
        initial_values: vec![int(0)],
    }
}

/// Bounded polytopes: a box cut by `cuts` random half-spaces through a
/// neighbourhood of the origin.
pub fn random_polytopes(count: usize, dim: usize, cuts: usize, seed: u64) -> Vec<HPolyhedron> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let lo = vec![int(-5); dim];
            let hi = vec![int(5); dim];
            let mut h = HPolyhedron::from_box(&lo, &hi);
            for _ in 0..cuts {
                let a = (0..dim).map(|_| int(rng.gen_range(-4..=4))).collect();
                h = h.with_constraint(Constraint::le(a, int(rng.gen_range(1..=8)))).expect("matching dimension");
            }
            h
        })
        .collect()
}
