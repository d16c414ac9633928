//! JSON documents read and written by the command line.
//!
//! Rationals are strings such as `"3"` or `"-1/2"`. Unknown fields are
//! rejected and maps are ordered, so rendering is deterministic.

use std::collections::BTreeMap;
use std::fmt;

use polyinv_core::model::{
    AffineUpdate, Config, ControlState, Guard, LinAtom, LinExpr, Monomial, PolyAtom, Rel, StateId,
    StateKind, Transition, TransitionSystem, VarId,
};
use polyinv_core::polyhedra::{Constraint, HPolyhedron, Polyhedron, VPolytope};
use polyinv_core::rational::{parse_rational, render_rational, Point, Rational};
use polyinv_core::reductions::{GadgetLayout, SimplexLayout};
use polyinv_core::{CheckReport, FailureKind, InvariantLabeling};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A semantic problem in an otherwise well-formed document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError(pub String);

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for FormatError {}

type Result<T> = std::result::Result<T, FormatError>;

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(FormatError(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rat(pub Rational);

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&render_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map(Rat).map_err(D::Error::custom)
    }
}

fn rats(p: &[Rational]) -> Vec<Rat> {
    p.iter().cloned().map(Rat).collect()
}

fn point(v: &[Rat]) -> Point {
    v.iter().map(|r| r.0.clone()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelName {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "=")]
    Eq,
}

impl From<RelName> for Rel {
    fn from(r: RelName) -> Self {
        match r {
            RelName::Le => Rel::Le,
            RelName::Lt => Rel::Lt,
            RelName::Eq => Rel::Eq,
        }
    }
}

impl From<Rel> for RelName {
    fn from(r: Rel) -> Self {
        match r {
            Rel::Le => RelName::Le,
            Rel::Lt => RelName::Lt,
            Rel::Eq => RelName::Eq,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindName {
    Initial,
    Ordinary,
    Bad,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    pub name: String,
    pub kind: KindName,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialEntry {
    pub state: String,
    pub values: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinEntry {
    pub coeffs: BTreeMap<String, Rat>,
    pub rel: RelName,
    pub rhs: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialEntry {
    pub coeff: Rat,
    pub vars: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyEntry {
    pub monomials: Vec<MonomialEntry>,
    pub rel: RelName,
    pub rhs: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuardEntry {
    pub lin: Vec<LinEntry>,
    pub poly: Vec<PolyEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExprEntry {
    pub coeffs: BTreeMap<String, Rat>,
    pub offset: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UpdateEntry {
    pub assign: BTreeMap<String, ExprEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionEntry {
    pub from: String,
    pub to: String,
    pub guard: GuardEntry,
    pub update: UpdateEntry,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub vars: Vec<String>,
    pub states: Vec<StateEntry>,
    pub initial: InitialEntry,
    pub transitions: Vec<TransitionEntry>,
}

/// Name lookups shared by the conversions.
struct Names<'a> {
    vars: &'a [String],
    states: &'a [String],
}

impl Names<'_> {
    fn var(&self, n: &str, ctx: &str) -> Result<VarId> {
        match self.vars.iter().position(|v| v == n) {
            Some(i) => Ok(VarId(i)),
            None => err(format!("{ctx}: unknown variable {n:?}")),
        }
    }

    fn state(&self, n: &str, ctx: &str) -> Result<StateId> {
        match self.states.iter().position(|v| v == n) {
            Some(i) => Ok(StateId(i)),
            None => err(format!("{ctx}: unknown state {n:?}")),
        }
    }

    fn terms(&self, m: &BTreeMap<String, Rat>, ctx: &str) -> Result<Vec<(VarId, Rational)>> {
        m.iter().map(|(k, v)| Ok((self.var(k, ctx)?, v.0.clone()))).collect()
    }

    fn dense(&self, m: &BTreeMap<String, Rat>, ctx: &str) -> Result<Vec<Rational>> {
        let mut row = vec![Rational::default(); self.vars.len()];
        for (v, c) in self.terms(m, ctx)? {
            row[v.0] = c;
        }
        Ok(row)
    }

    fn sparse(&self, row: &[Rational]) -> BTreeMap<String, Rat> {
        row.iter()
            .enumerate()
            .filter(|(_, c)| **c != Rational::default())
            .map(|(i, c)| (self.vars[i].clone(), Rat(c.clone())))
            .collect()
    }

    fn named(&self, m: &BTreeMap<VarId, Rational>) -> BTreeMap<String, Rat> {
        m.iter().map(|(v, c)| (self.vars[v.0].clone(), Rat(c.clone()))).collect()
    }
}

impl SystemFile {
    pub fn to_system(&self) -> Result<TransitionSystem> {
        let state_names: Vec<String> = self.states.iter().map(|s| s.name.clone()).collect();
        let names = Names { vars: &self.vars, states: &state_names };
        let states = self
            .states
            .iter()
            .map(|s| {
                let kind = match s.kind {
                    KindName::Initial => StateKind::Initial,
                    KindName::Ordinary => StateKind::Ordinary,
                    KindName::Bad => StateKind::Bad,
                };
                ControlState::new(s.name.clone(), kind)
            })
            .collect();
        let init = names.state(&self.initial.state, "initial")?;
        if self.states[init.0].kind != KindName::Initial {
            return err(format!("initial: state {:?} is not of kind \"initial\"", self.initial.state));
        }
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for (i, t) in self.transitions.iter().enumerate() {
            let ctx = format!("transitions[{i}]");
            let lin = t
                .guard
                .lin
                .iter()
                .map(|a| Ok(LinAtom::new(names.terms(&a.coeffs, &ctx)?, a.rel.into(), a.rhs.0.clone())))
                .collect::<Result<_>>()?;
            let poly = t
                .guard
                .poly
                .iter()
                .map(|a| {
                    let monomials = a
                        .monomials
                        .iter()
                        .map(|m| {
                            let exps = m
                                .vars
                                .iter()
                                .map(|(v, e)| Ok((names.var(v, &ctx)?, *e)))
                                .collect::<Result<Vec<_>>>()?;
                            Ok(Monomial::new(m.coeff.0.clone(), exps))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(PolyAtom::new(monomials, a.rel.into(), a.rhs.0.clone()))
                })
                .collect::<Result<_>>()?;
            let update = t
                .update
                .assign
                .iter()
                .map(|(v, e)| Ok((names.var(v, &ctx)?, LinExpr::new(names.terms(&e.coeffs, &ctx)?, e.offset.0.clone()))))
                .collect::<Result<Vec<_>>>()?;
            transitions.push(Transition::new(
                names.state(&t.from, &ctx)?,
                names.state(&t.to, &ctx)?,
                Guard { lin, poly },
                AffineUpdate::new(update),
            ));
        }
        let s = TransitionSystem {
            vars: self.vars.clone(),
            states,
            transitions,
            initial_values: point(&self.initial.values),
        };
        let problems = s.validate();
        if !problems.is_empty() {
            let all: Vec<String> = problems.iter().map(ToString::to_string).collect();
            return err(all.join("; "));
        }
        Ok(s)
    }

    pub fn from_system(s: &TransitionSystem) -> Self {
        let state_names: Vec<String> = s.states.iter().map(|c| c.name.clone()).collect();
        let names = Names { vars: &s.vars, states: &state_names };
        let states = s
            .states
            .iter()
            .map(|c| StateEntry {
                name: c.name.clone(),
                kind: match c.kind {
                    StateKind::Initial => KindName::Initial,
                    StateKind::Ordinary => KindName::Ordinary,
                    StateKind::Bad => KindName::Bad,
                },
            })
            .collect();
        let transitions = s
            .transitions
            .iter()
            .map(|t| TransitionEntry {
                from: state_names[t.from.0].clone(),
                to: state_names[t.to.0].clone(),
                guard: GuardEntry {
                    lin: t
                        .guard
                        .lin
                        .iter()
                        .map(|a| LinEntry { coeffs: names.named(a.coeffs()), rel: a.rel.into(), rhs: Rat(a.rhs.clone()) })
                        .collect(),
                    poly: t
                        .guard
                        .poly
                        .iter()
                        .map(|a| PolyEntry {
                            monomials: a
                                .monomials()
                                .iter()
                                .map(|m| MonomialEntry {
                                    coeff: Rat(m.coeff.clone()),
                                    vars: m.exps().iter().map(|(v, e)| (s.vars[v.0].clone(), *e)).collect(),
                                })
                                .collect(),
                            rel: a.rel.into(),
                            rhs: Rat(a.rhs.clone()),
                        })
                        .collect(),
                },
                update: UpdateEntry {
                    assign: t
                        .update
                        .assignments()
                        .iter()
                        .map(|(v, e)| {
                            (s.vars[v.0].clone(), ExprEntry { coeffs: names.named(e.coeffs()), offset: Rat(e.offset.clone()) })
                        })
                        .collect(),
                },
            })
            .collect();
        let init = s.initial_state().map_or_else(String::new, |q| state_names[q.0].clone());
        SystemFile {
            vars: s.vars.clone(),
            states,
            initial: InitialEntry { state: init, values: rats(&s.initial_values) },
            transitions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintEntry {
    pub coeffs: BTreeMap<String, Rat>,
    pub rel: RelName,
    pub rhs: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelEntry {
    #[serde(rename = "hrep")]
    Hrep(Vec<ConstraintEntry>),
    #[serde(rename = "vrep")]
    Vrep(Vec<Vec<Rat>>),
    #[serde(rename = "empty")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantFile {
    pub labels: BTreeMap<String, LabelEntry>,
}

impl InvariantFile {
    /// Labels in the order of `states`; every state must be labeled.
    pub fn to_labeling(&self, vars: &[String], states: &[String]) -> Result<InvariantLabeling> {
        let names = Names { vars, states };
        for k in self.labels.keys() {
            names.state(k, "labels")?;
        }
        let dim = vars.len();
        let mut out = Vec::with_capacity(states.len());
        for q in states {
            let ctx = format!("labels.{q}");
            let label = match self.labels.get(q) {
                None => return err(format!("{ctx}: missing label")),
                Some(LabelEntry::Empty) => Polyhedron::empty(dim),
                Some(LabelEntry::Vrep(points)) => {
                    for (i, p) in points.iter().enumerate() {
                        if p.len() != dim {
                            return err(format!("{ctx}.vrep[{i}]: {} coordinates, expected {dim}", p.len()));
                        }
                    }
                    Polyhedron::V(VPolytope::new(dim, points.iter().map(|p| point(p)).collect()).map_err(|e| FormatError(e.to_string()))?)
                }
                Some(LabelEntry::Hrep(cs)) => {
                    let mut rows = Vec::with_capacity(cs.len());
                    for (i, c) in cs.iter().enumerate() {
                        let ctx = format!("{ctx}.hrep[{i}]");
                        let coeffs = names.dense(&c.coeffs, &ctx)?;
                        rows.push(match c.rel {
                            RelName::Le => Constraint::le(coeffs, c.rhs.0.clone()),
                            RelName::Eq => Constraint::eq(coeffs, c.rhs.0.clone()),
                            RelName::Lt => return err(format!("{ctx}: strict constraints are not allowed in labels")),
                        });
                    }
                    Polyhedron::H(HPolyhedron::new(dim, rows).map_err(|e| FormatError(e.to_string()))?)
                }
            };
            out.push(label);
        }
        Ok(InvariantLabeling::new(out))
    }

    pub fn from_labeling(vars: &[String], states: &[String], inv: &InvariantLabeling) -> Self {
        let names = Names { vars, states };
        let labels = states
            .iter()
            .zip(inv.labels())
            .map(|(q, p)| {
                let entry = match p {
                    Polyhedron::V(v) if v.is_empty() => LabelEntry::Empty,
                    Polyhedron::V(v) => LabelEntry::Vrep(v.points().iter().map(|x| rats(x)).collect()),
                    Polyhedron::H(h) => LabelEntry::Hrep(
                        h.constraints()
                            .iter()
                            .map(|c| ConstraintEntry { coeffs: names.sparse(&c.coeffs), rel: c.rel.into(), rhs: Rat(c.rhs.clone()) })
                            .collect(),
                    ),
                };
                (q.clone(), entry)
            })
            .collect();
        InvariantFile { labels }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplexLayoutFile {
    pub source_vars: Vec<String>,
    pub source_states: Vec<String>,
    pub source_bad: String,
    pub target_vars: Vec<String>,
    pub main: String,
    pub bad: String,
    pub y_vars: Vec<String>,
    pub encodings: BTreeMap<String, Vec<Rat>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GadgetLayoutFile {
    pub source_vars: Vec<String>,
    pub target_vars: Vec<String>,
    pub t_var: String,
    pub y_var: String,
    pub bad_state: String,
    pub reused_bad: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayoutFile {
    #[serde(rename = "simplex")]
    Simplex(SimplexLayoutFile),
    #[serde(rename = "gadget")]
    Gadget(GadgetLayoutFile),
}

impl SimplexLayoutFile {
    pub fn new(source: &TransitionSystem, target: &TransitionSystem, l: &SimplexLayout) -> Self {
        SimplexLayoutFile {
            source_vars: source.vars.clone(),
            source_states: source.states.iter().map(|c| c.name.clone()).collect(),
            source_bad: source.states[l.source_bad.0].name.clone(),
            target_vars: target.vars.clone(),
            main: target.states[l.main.0].name.clone(),
            bad: target.states[l.bad.0].name.clone(),
            y_vars: l.y_vars.iter().map(|v| target.vars[v.0].clone()).collect(),
            encodings: source
                .states
                .iter()
                .zip(&l.encodings)
                .map(|(q, e)| (q.name.clone(), rats(e)))
                .collect(),
        }
    }

    /// The layout, with the target states ordered `[main, bad]`.
    pub fn layout(&self) -> Result<SimplexLayout> {
        let d = self.source_vars.len();
        let n = self.source_states.len();
        if n < 2 {
            return err("layout: at least two source states are needed");
        }
        if self.target_vars.len() != d + n - 1 || self.y_vars.len() != n - 1 {
            return err(format!("layout: dimensions do not match {d} registers and {n} states"));
        }
        if self.target_vars[..d] != self.source_vars[..] {
            return err("layout: target variables must start with the source variables");
        }
        let target = Names { vars: &self.target_vars, states: &[] };
        let y_vars = self.y_vars.iter().map(|v| target.var(v, "layout.y_vars")).collect::<Result<Vec<_>>>()?;
        let mut encodings = Vec::with_capacity(n);
        for q in &self.source_states {
            let Some(e) = self.encodings.get(q) else { return err(format!("layout.encodings: missing state {q:?}")) };
            if e.len() != n - 1 {
                return err(format!("layout.encodings.{q}: expected {} coordinates", n - 1));
            }
            encodings.push(point(e));
        }
        if self.encodings.len() != n {
            return err("layout.encodings: unknown state");
        }
        let names = Names { vars: &self.source_vars, states: &self.source_states };
        Ok(SimplexLayout {
            d,
            n,
            y_vars,
            encodings,
            source_bad: names.state(&self.source_bad, "layout.source_bad")?,
            main: StateId(0),
            bad: StateId(1),
        })
    }

    pub fn target_states(&self) -> Vec<String> {
        vec![self.main.clone(), self.bad.clone()]
    }
}

impl GadgetLayoutFile {
    pub fn new(source: &TransitionSystem, target: &TransitionSystem, l: &GadgetLayout) -> Self {
        GadgetLayoutFile {
            source_vars: source.vars.clone(),
            target_vars: target.vars.clone(),
            t_var: target.vars[l.t_var.0].clone(),
            y_var: target.vars[l.y_var.0].clone(),
            bad_state: target.states[l.bad_state.0].name.clone(),
            reused_bad: l.reused_bad,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEntry {
    pub state: String,
    pub values: Vec<Rat>,
}

impl ConfigEntry {
    pub fn new(s: &TransitionSystem, c: &Config) -> Self {
        ConfigEntry { state: s.states[c.state.0].name.clone(), values: rats(&c.values) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureEntry {
    pub kind: String,
    pub transition: Option<usize>,
    pub from: Option<String>,
    pub to: Option<String>,
    pub witness: Option<Vec<Rat>>,
    pub image: Option<Vec<Rat>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub verdict: String,
    pub failures: Vec<FailureEntry>,
}

impl ReportFile {
    pub fn new(s: &TransitionSystem, r: &CheckReport) -> Self {
        let failures = r
            .failures
            .iter()
            .map(|f| {
                let t = f.transition.map(|i| &s.transitions[i]);
                FailureEntry {
                    kind: match f.kind {
                        FailureKind::InitialNotContained => "initial-not-contained",
                        FailureKind::BadStateNonEmpty => "bad-state-non-empty",
                        FailureKind::Unstable => "unstable",
                    }
                    .into(),
                    transition: f.transition,
                    from: t.map(|t| s.states[t.from.0].name.clone()),
                    to: t.map(|t| s.states[t.to.0].name.clone()),
                    witness: f.witness.as_deref().map(rats),
                    image: f.image.as_deref().map(rats),
                }
            })
            .collect();
        ReportFile { verdict: r.verdict.name().into(), failures }
    }
}

pub fn state_names(s: &TransitionSystem) -> Vec<String> {
    s.states.iter().map(|c| c.name.clone()).collect()
}
