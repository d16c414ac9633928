//! Exact polyhedral invariants for affine transition systems.
//!
//! The kernel works over arbitrary-precision rationals throughout. Systems
//! are described by [`TransitionSystem`]; [`check_separating`] decides
//! whether a labeling by convex polyhedra is an inductive invariant that
//! keeps the bad state unreachable. [`reductions`] contains the step-counter
//! gadget and the simplex encoding of control states, [`execution`] the
//! concrete semantics and [`synth`] the bounded template search.

pub mod checker;
pub mod error;
pub mod execution;
mod linalg;
mod lp;
pub mod model;
pub mod polyhedra;
pub mod rational;
pub mod reductions;
pub mod samples;
pub mod synth;
pub mod univariate;

pub use checker::{
    check_separating, check_transition, on_curve_groups, CheckReport, Failure, FailureKind,
    InvariantLabeling, TransitionOutcome, Verdict,
};
pub use error::{Error, Result};
pub use execution::{build_witness, reach_oracle, run, Run, RunStatus};
pub use model::{
    AffineUpdate, Config, ControlState, Guard, LinAtom, LinExpr, Monomial, PolyAtom, Rel, StateId,
    StateKind, Transition, TransitionSystem, VarId, Violation,
};
pub use polyhedra::{Constraint, HPolyhedron, Polyhedron, VPolytope};
pub use rational::{parse_rational, render_rational, Point, Rational};
pub use reductions::{
    gadget_reduce, lift_invariant, project_invariant, state_encode, GadgetLayout, GuardVariant,
    SimplexLayout,
};
pub use synth::{encode_bounded_existence, search_bounded, TemplateSpec};
