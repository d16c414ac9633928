//! Small reference systems used by tests, benches and the command line.

use crate::model::{
    AffineUpdate, ControlState, Guard, LinAtom, LinExpr, Rel, StateId, StateKind, Transition,
    TransitionSystem, VarId,
};
use crate::rational::{int, point};

const X: VarId = VarId(0);

fn increment() -> AffineUpdate {
    AffineUpdate::identity().with(X, LinExpr::new([(X, int(1))], int(1)))
}

/// Counts `x` from 0 to 3 in `s0`, then moves to `h` and halts. The bad
/// state has no incoming transitions.
pub fn counter_to_three() -> TransitionSystem {
    TransitionSystem {
        vars: vec!["x".into()],
        states: vec![
            ControlState::new("s0", StateKind::Initial),
            ControlState::new("h", StateKind::Ordinary),
            ControlState::new("bad", StateKind::Bad),
        ],
        transitions: vec![
            Transition::new(
                StateId(0),
                StateId(0),
                Guard::linear(vec![LinAtom::new([(X, int(1))], Rel::Le, int(2))]),
                increment(),
            ),
            Transition::new(
                StateId(0),
                StateId(1),
                Guard::linear(vec![LinAtom::new([(X, int(-1))], Rel::Le, int(-3))]),
                AffineUpdate::identity(),
            ),
        ],
        initial_values: point(&[0]),
    }
}

/// Increments `x` forever in its initial state.
pub fn endless_counter() -> TransitionSystem {
    TransitionSystem {
        vars: vec!["x".into()],
        states: vec![
            ControlState::new("s0", StateKind::Initial),
            ControlState::new("bad", StateKind::Bad),
        ],
        transitions: vec![Transition::new(StateId(0), StateId(0), Guard::always(), increment())],
        initial_values: point(&[0]),
    }
}

/// `x := x + 1` forever from 0, with a move to `bad` guarded by `x ≤ bound`.
pub fn guarded_counter(bound: i64) -> TransitionSystem {
    TransitionSystem {
        vars: vec!["x".into()],
        states: vec![
            ControlState::new("s", StateKind::Initial),
            ControlState::new("bad", StateKind::Bad),
        ],
        transitions: vec![
            Transition::new(StateId(0), StateId(0), Guard::always(), increment()),
            Transition::new(
                StateId(0),
                StateId(1),
                Guard::linear(vec![LinAtom::new([(X, int(1))], Rel::Le, int(bound))]),
                AffineUpdate::identity(),
            ),
        ],
        initial_values: point(&[0]),
    }
}
