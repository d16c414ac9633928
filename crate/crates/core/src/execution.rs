//! Concrete semantics: simulation, bounded reachability and the witness
//! invariant of a halting run.

use std::collections::BTreeSet;
use std::fmt;

use crate::checker::InvariantLabeling;
use crate::error::{Error, Result};
use crate::model::{Config, StateId, TransitionSystem};
use crate::polyhedra::{Polyhedron, VPolytope};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// No transition is enabled at the last configuration.
    Halted,
    StepBudgetExhausted,
    /// Two or more transitions are enabled at the last configuration.
    StuckNondeterministic,
}

impl RunStatus {
    pub fn name(self) -> &'static str {
        match self {
            RunStatus::Halted => "halted",
            RunStatus::StepBudgetExhausted => "step-budget-exhausted",
            RunStatus::StuckNondeterministic => "stuck-nondeterministic",
        }
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A deterministic run; `configs[k]` is the configuration after `k` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub configs: Vec<Config>,
    /// `fired[k]` is the transition taken from `configs[k]`.
    pub fired: Vec<usize>,
    pub status: RunStatus,
    /// Transitions enabled at the last configuration when the run got stuck.
    pub ambiguous: Vec<usize>,
}

impl Run {
    pub fn last(&self) -> &Config {
        self.configs.last().expect("a run has at least its initial config")
    }
}

/// Fires the unique enabled transition until none is enabled, two are, or
/// `max_steps` transitions have fired.
pub fn run(s: &TransitionSystem, max_steps: usize) -> Result<Run> {
    s.ensure_valid()?;
    let mut cur = s.initial_config().expect("validated");
    let mut configs = Vec::new();
    let mut fired = Vec::new();
    loop {
        let enabled = s.enabled(&cur)?;
        let status = match enabled.as_slice() {
            [] => Some(RunStatus::Halted),
            [_, _, ..] => Some(RunStatus::StuckNondeterministic),
            [_] if fired.len() == max_steps => Some(RunStatus::StepBudgetExhausted),
            [_] => None,
        };
        if let Some(status) = status {
            let ambiguous = if status == RunStatus::StuckNondeterministic { enabled } else { Vec::new() };
            configs.push(cur);
            return Ok(Run { configs, fired, status, ambiguous });
        }
        let t = &s.transitions[enabled[0]];
        let next = Config {
            state: t.to,
            values: s.apply_update(t, &cur.values)?,
        };
        configs.push(std::mem::replace(&mut cur, next));
        fired.push(enabled[0]);
    }
}

/// Labels every state with the hull of the configurations visited there.
pub fn labeling_from_configs(s: &TransitionSystem, configs: &[Config]) -> Result<InvariantLabeling> {
    let dim = s.dim();
    let mut groups: Vec<Vec<_>> = vec![Vec::new(); s.states.len()];
    for c in configs {
        if c.state.0 >= groups.len() {
            return Err(Error::LabelingMismatch(format!("config in unknown state {}", c.state.0)));
        }
        groups[c.state.0].push(c.values.clone());
    }
    let labels = groups
        .into_iter()
        .map(|pts| VPolytope::new(dim, pts).map(Polyhedron::V))
        .collect::<Result<_>>()?;
    Ok(InvariantLabeling::new(labels))
}

/// The hull-of-run invariant of a halted run, with the bad state empty.
pub fn build_witness(s: &TransitionSystem, r: &Run) -> Result<InvariantLabeling> {
    if r.status != RunStatus::Halted {
        return Err(Error::RunNotHalted(r.status));
    }
    let mut inv = labeling_from_configs(s, &r.configs)?;
    let bad = s.bad_state().ok_or_else(|| Error::InvalidSystem(s.validate()))?;
    inv.set(bad, Polyhedron::empty(s.dim()));
    Ok(inv)
}

/// All configurations reachable within `max_steps` transitions, explored
/// breadth first with every enabled transition.
pub fn reach_oracle(s: &TransitionSystem, max_steps: usize) -> Result<BTreeSet<Config>> {
    s.ensure_valid()?;
    let start = s.initial_config().expect("validated");
    let mut seen = BTreeSet::from([start.clone()]);
    let mut frontier = vec![start];
    for _ in 0..max_steps {
        let mut next = Vec::new();
        for c in &frontier {
            for i in s.enabled(c)? {
                let t = &s.transitions[i];
                let d = Config {
                    state: t.to,
                    values: s.apply_update(t, &c.values)?,
                };
                if seen.insert(d.clone()) {
                    next.push(d);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(seen)
}

/// Configurations reachable in exactly `k` steps for each `k ≤ max_steps`.
pub fn reach_layers(s: &TransitionSystem, max_steps: usize) -> Result<Vec<BTreeSet<Config>>> {
    s.ensure_valid()?;
    let mut layers = vec![BTreeSet::from([s.initial_config().expect("validated")])];
    for _ in 0..max_steps {
        let mut next = BTreeSet::new();
        for c in layers.last().expect("non-empty") {
            for i in s.enabled(c)? {
                let t = &s.transitions[i];
                next.insert(Config {
                    state: t.to,
                    values: s.apply_update(t, &c.values)?,
                });
            }
        }
        if next.is_empty() {
            break;
        }
        layers.push(next);
    }
    Ok(layers)
}

/// Whether `state` occurs among the configurations.
pub fn visits(configs: &BTreeSet<Config>, state: StateId) -> bool {
    configs.iter().any(|c| c.state == state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{check_separating, Verdict};
    use crate::model::{
        AffineUpdate, ControlState, Guard, LinAtom, Rel, StateKind, Transition, VarId,
    };
    use crate::rational::{int, point};
    use crate::samples;

    fn cfg(state: usize, values: &[i64]) -> Config {
        Config { state: StateId(state), values: point(values) }
    }

    #[test]
    fn counter_halts_in_h() {
        let r = run(&samples::counter_to_three(), 100).unwrap();
        assert_eq!(r.status, RunStatus::Halted);
        assert_eq!(
            r.configs,
            vec![cfg(0, &[0]), cfg(0, &[1]), cfg(0, &[2]), cfg(0, &[3]), cfg(1, &[3])]
        );
        assert_eq!(r.fired, vec![0, 0, 0, 1]);
    }

    #[test]
    fn budget_and_zero_steps() {
        let s = samples::endless_counter();
        for n in [0, 1, 7] {
            let r = run(&s, n).unwrap();
            assert_eq!(r.status, RunStatus::StepBudgetExhausted);
            assert_eq!(r.configs.len(), n + 1);
        }
        assert!(matches!(build_witness(&s, &run(&s, 3).unwrap()), Err(Error::RunNotHalted(_))));
    }

    #[test]
    fn nondeterminism_is_reported() {
        let mut s = samples::endless_counter();
        s.transitions.push(Transition::new(StateId(0), StateId(0), Guard::always(), AffineUpdate::identity()));
        let r = run(&s, 10).unwrap();
        assert_eq!(r.status, RunStatus::StuckNondeterministic);
        assert_eq!(r.configs, vec![cfg(0, &[0])]);
        assert_eq!(r.ambiguous, vec![0, 1]);
    }

    #[test]
    fn oracle_matches_hand_bfs() {
        let s = samples::counter_to_three();
        let expected: BTreeSet<Config> =
            [cfg(0, &[0]), cfg(0, &[1]), cfg(0, &[2]), cfg(0, &[3]), cfg(1, &[3])].into();
        assert_eq!(reach_oracle(&s, 10).unwrap(), expected);
        assert_eq!(reach_oracle(&s, 0).unwrap(), BTreeSet::from([cfg(0, &[0])]));
        assert!(reach_layers(&s, 10).unwrap().iter().all(|l| l.len() == 1));
    }

    #[test]
    fn single_config_witness() {
        let s = TransitionSystem {
            vars: vec!["x".into()],
            states: vec![
                ControlState::new("s", StateKind::Initial),
                ControlState::new("o", StateKind::Ordinary),
                ControlState::new("bad", StateKind::Bad),
            ],
            transitions: vec![Transition::new(
                StateId(0),
                StateId(1),
                Guard::linear(vec![LinAtom::new([(VarId(0), int(1))], Rel::Le, int(-1))]),
                AffineUpdate::identity(),
            )],
            initial_values: point(&[0]),
        };
        let r = run(&s, 5).unwrap();
        let inv = build_witness(&s, &r).unwrap();
        assert_eq!(inv.get(StateId(0)), &Polyhedron::V(VPolytope::new(1, vec![point(&[0])]).unwrap()));
        assert!(inv.get(StateId(1)).is_empty());
        assert!(inv.get(StateId(2)).is_empty());
        assert_eq!(check_separating(&s, &inv).unwrap().verdict, Verdict::SeparatingInductive);
    }
}
