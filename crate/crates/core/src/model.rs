//! Transition systems over exact rationals: registers, guarded affine
//! transitions and explicit control states.
//!
//! Control is never a numeric register. A guard can only talk about the
//! registers, and the control graph plays the role of `q = k` atoms.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use crate::error::{check_dim, Error, Result};
use crate::rational::{Point, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Relation of an atom `lhs rel rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Le,
    Lt,
    Eq,
}

impl Rel {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Rel::Le => lhs <= rhs,
            Rel::Lt => lhs < rhs,
            Rel::Eq => lhs == rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Le => "<=",
            Rel::Lt => "<",
            Rel::Eq => "=",
        }
    }
}

fn sparse(terms: impl IntoIterator<Item = (VarId, Rational)>) -> BTreeMap<VarId, Rational> {
    let mut out: BTreeMap<VarId, Rational> = BTreeMap::new();
    for (v, c) in terms {
        *out.entry(v).or_insert_with(Rational::zero) += c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn lookup(p: &[Rational], v: VarId) -> Result<&Rational> {
    p.get(v.0).ok_or(Error::VarOutOfRange {
        index: v.0,
        dim: p.len(),
    })
}

/// `Σ coeffs·x rel rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinAtom {
    coeffs: BTreeMap<VarId, Rational>,
    pub rel: Rel,
    pub rhs: Rational,
}

impl LinAtom {
    pub fn new(terms: impl IntoIterator<Item = (VarId, Rational)>, rel: Rel, rhs: Rational) -> Self {
        Self {
            coeffs: sparse(terms),
            rel,
            rhs,
        }
    }

    /// Non-zero coefficients, ordered by variable.
    pub fn coeffs(&self) -> &BTreeMap<VarId, Rational> {
        &self.coeffs
    }

    pub fn lhs(&self, p: &[Rational]) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (v, c) in &self.coeffs {
            acc += c * lookup(p, *v)?;
        }
        Ok(acc)
    }

    pub fn holds(&self, p: &[Rational]) -> Result<bool> {
        Ok(self.rel.holds(&self.lhs(p)?, &self.rhs))
    }

    pub fn dense(&self, dim: usize) -> Result<Vec<Rational>> {
        let mut row = vec![Rational::zero(); dim];
        for (v, c) in &self.coeffs {
            *row.get_mut(v.0).ok_or(Error::VarOutOfRange { index: v.0, dim })? = c.clone();
        }
        Ok(row)
    }

    pub fn max_var(&self) -> Option<VarId> {
        self.coeffs.keys().next_back().copied()
    }
}

/// `coeff · Π x^e`. An empty exponent map is a constant term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coeff: Rational,
    exps: BTreeMap<VarId, u32>,
}

impl Monomial {
    pub fn new(coeff: Rational, exps: impl IntoIterator<Item = (VarId, u32)>) -> Self {
        let mut map = BTreeMap::new();
        for (v, e) in exps {
            *map.entry(v).or_insert(0) += e;
        }
        map.retain(|_, e| *e > 0);
        Self { coeff, exps: map }
    }

    pub fn exps(&self) -> &BTreeMap<VarId, u32> {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.exps.values().sum()
    }

    pub fn eval(&self, p: &[Rational]) -> Result<Rational> {
        let mut acc = self.coeff.clone();
        for (v, e) in &self.exps {
            acc *= num::pow(lookup(p, *v)?.clone(), *e as usize);
        }
        Ok(acc)
    }
}

/// Polynomial atom `Σ monomials rel rhs`. Monomials with equal exponent
/// vectors are merged and zero terms dropped on construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyAtom {
    monomials: Vec<Monomial>,
    pub rel: Rel,
    pub rhs: Rational,
}

impl PolyAtom {
    pub fn new(monomials: impl IntoIterator<Item = Monomial>, rel: Rel, rhs: Rational) -> Self {
        let mut merged: BTreeMap<Vec<(VarId, u32)>, Rational> = BTreeMap::new();
        for m in monomials {
            let key: Vec<_> = m.exps.iter().map(|(v, e)| (*v, *e)).collect();
            *merged.entry(key).or_insert_with(Rational::zero) += m.coeff;
        }
        let monomials = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(key, c)| Monomial::new(c, key))
            .collect();
        Self { monomials, rel, rhs }
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn degree(&self) -> u32 {
        self.monomials.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn lhs(&self, p: &[Rational]) -> Result<Rational> {
        let mut acc = Rational::zero();
        for m in &self.monomials {
            acc += m.eval(p)?;
        }
        Ok(acc)
    }

    pub fn holds(&self, p: &[Rational]) -> Result<bool> {
        Ok(self.rel.holds(&self.lhs(p)?, &self.rhs))
    }

    pub fn max_var(&self) -> Option<VarId> {
        self.monomials
            .iter()
            .filter_map(|m| m.exps.keys().next_back().copied())
            .max()
    }
}

/// Conjunction of atoms; the empty guard is `true`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Guard {
    pub lin: Vec<LinAtom>,
    pub poly: Vec<PolyAtom>,
}

impl Guard {
    pub fn always() -> Self {
        Self::default()
    }

    pub fn linear(lin: Vec<LinAtom>) -> Self {
        Self { lin, poly: vec![] }
    }

    pub fn is_linear(&self) -> bool {
        self.poly.is_empty()
    }

    /// Evaluates on the pre-state `p`.
    pub fn eval(&self, p: &[Rational]) -> Result<bool> {
        for a in &self.lin {
            if !a.holds(p)? {
                return Ok(false);
            }
        }
        for a in &self.poly {
            if !a.holds(p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn max_var(&self) -> Option<VarId> {
        let lin = self.lin.iter().filter_map(LinAtom::max_var);
        let poly = self.poly.iter().filter_map(PolyAtom::max_var);
        lin.chain(poly).max()
    }
}

/// `Σ coeffs·x + offset`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LinExpr {
    coeffs: BTreeMap<VarId, Rational>,
    pub offset: Rational,
}

impl LinExpr {
    pub fn new(terms: impl IntoIterator<Item = (VarId, Rational)>, offset: Rational) -> Self {
        Self {
            coeffs: sparse(terms),
            offset,
        }
    }

    pub fn var(v: VarId) -> Self {
        Self::new([(v, Rational::one())], Rational::zero())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new([], c)
    }

    pub fn coeffs(&self) -> &BTreeMap<VarId, Rational> {
        &self.coeffs
    }

    pub fn eval(&self, p: &[Rational]) -> Result<Rational> {
        let mut acc = self.offset.clone();
        for (v, c) in &self.coeffs {
            acc += c * lookup(p, *v)?;
        }
        Ok(acc)
    }
}

/// Simultaneous assignment `x' = A·x + c`. Variables without an entry keep
/// their value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct AffineUpdate {
    assign: BTreeMap<VarId, LinExpr>,
}

impl AffineUpdate {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(assign: impl IntoIterator<Item = (VarId, LinExpr)>) -> Self {
        Self {
            assign: assign.into_iter().collect(),
        }
    }

    pub fn with(mut self, v: VarId, e: LinExpr) -> Self {
        self.assign.insert(v, e);
        self
    }

    pub fn assignments(&self) -> &BTreeMap<VarId, LinExpr> {
        &self.assign
    }

    /// Every right-hand side reads the pre-state.
    pub fn apply(&self, p: &[Rational]) -> Result<Point> {
        let mut out = p.to_vec();
        for (v, e) in &self.assign {
            let value = e.eval(p)?;
            *out.get_mut(v.0).ok_or(Error::VarOutOfRange {
                index: v.0,
                dim: p.len(),
            })? = value;
        }
        Ok(out)
    }

    /// Dense `(A, c)` for dimension `dim`.
    pub fn matrix(&self, dim: usize) -> Result<(Vec<Vec<Rational>>, Vec<Rational>)> {
        let mut a = vec![vec![Rational::zero(); dim]; dim];
        let mut c = vec![Rational::zero(); dim];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = Rational::one();
        }
        for (v, e) in &self.assign {
            if v.0 >= dim {
                return Err(Error::VarOutOfRange { index: v.0, dim });
            }
            let row = &mut a[v.0];
            row.iter_mut().for_each(|x| *x = Rational::zero());
            for (w, coeff) in &e.coeffs {
                *row.get_mut(w.0).ok_or(Error::VarOutOfRange { index: w.0, dim })? = coeff.clone();
            }
            c[v.0] = e.offset.clone();
        }
        Ok((a, c))
    }

    pub fn max_var(&self) -> Option<VarId> {
        self.assign
            .iter()
            .flat_map(|(v, e)| std::iter::once(*v).chain(e.coeffs.keys().copied()))
            .max()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateKind {
    Initial,
    Ordinary,
    Bad,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ControlState {
    pub name: String,
    pub kind: StateKind,
}

impl ControlState {
    pub fn new(name: impl Into<String>, kind: StateKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: StateId,
    pub to: StateId,
    pub guard: Guard,
    pub update: AffineUpdate,
}

impl Transition {
    pub fn new(from: StateId, to: StateId, guard: Guard, update: AffineUpdate) -> Self {
        Self {
            from,
            to,
            guard,
            update,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransitionSystem {
    pub vars: Vec<String>,
    pub states: Vec<ControlState>,
    pub transitions: Vec<Transition>,
    pub initial_values: Point,
}

/// A configuration `(state, registers)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Config {
    pub state: StateId,
    pub values: Point,
}

/// A broken structural invariant of a [`TransitionSystem`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    InitialStateCount(usize),
    BadStateCount(usize),
    TransitionFromBad { transition: usize },
    InitialValuesLength { expected: usize, found: usize },
    VarOutOfRange { transition: usize, index: usize },
    StateOutOfRange { transition: usize, index: usize },
    DuplicateVarName(String),
    DuplicateStateName(String),
    NotNonlinear { transition: usize, atom: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InitialStateCount(n) => write!(f, "expected exactly one initial state, found {n}"),
            Violation::BadStateCount(n) => write!(f, "expected exactly one bad state, found {n}"),
            Violation::TransitionFromBad { transition } => {
                write!(f, "transition {transition} leaves the bad state")
            }
            Violation::InitialValuesLength { expected, found } => {
                write!(f, "initial values have length {found}, system dimension is {expected}")
            }
            Violation::VarOutOfRange { transition, index } => {
                write!(f, "transition {transition} mentions variable index {index} beyond the dimension")
            }
            Violation::StateOutOfRange { transition, index } => {
                write!(f, "transition {transition} mentions unknown state index {index}")
            }
            Violation::DuplicateVarName(n) => write!(f, "duplicate variable name {n:?}"),
            Violation::DuplicateStateName(n) => write!(f, "duplicate state name {n:?}"),
            Violation::NotNonlinear { transition, atom } => write!(
                f,
                "polynomial atom {atom} of transition {transition} has no monomial of degree >= 2"
            ),
        }
    }
}

impl TransitionSystem {
    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    fn unique_of_kind(&self, kind: StateKind) -> Option<StateId> {
        let mut it = self.states.iter().enumerate().filter(|(_, s)| s.kind == kind);
        match (it.next(), it.next()) {
            (Some((i, _)), None) => Some(StateId(i)),
            _ => None,
        }
    }

    pub fn initial_state(&self) -> Option<StateId> {
        self.unique_of_kind(StateKind::Initial)
    }

    pub fn bad_state(&self) -> Option<StateId> {
        self.unique_of_kind(StateKind::Bad)
    }

    pub fn var_index(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v == name).map(VarId)
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s.name == name).map(StateId)
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0].name
    }

    /// Collects every broken structural invariant; empty means well-formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let count = |k| self.states.iter().filter(|s| s.kind == k).count();
        let initial = count(StateKind::Initial);
        if initial != 1 {
            out.push(Violation::InitialStateCount(initial));
        }
        let bad = count(StateKind::Bad);
        if bad != 1 {
            out.push(Violation::BadStateCount(bad));
        }
        if self.initial_values.len() != self.dim() {
            out.push(Violation::InitialValuesLength {
                expected: self.dim(),
                found: self.initial_values.len(),
            });
        }
        for (i, name) in self.vars.iter().enumerate() {
            if self.vars[..i].contains(name) {
                out.push(Violation::DuplicateVarName(name.clone()));
            }
        }
        for (i, s) in self.states.iter().enumerate() {
            if self.states[..i].iter().any(|o| o.name == s.name) {
                out.push(Violation::DuplicateStateName(s.name.clone()));
            }
        }
        for (i, t) in self.transitions.iter().enumerate() {
            for s in [t.from, t.to] {
                if s.0 >= self.states.len() {
                    out.push(Violation::StateOutOfRange {
                        transition: i,
                        index: s.0,
                    });
                }
            }
            if self.states.get(t.from.0).is_some_and(|s| s.kind == StateKind::Bad) {
                out.push(Violation::TransitionFromBad { transition: i });
            }
            let max = t.guard.max_var().max(t.update.max_var());
            if let Some(v) = max.filter(|v| v.0 >= self.dim()) {
                out.push(Violation::VarOutOfRange {
                    transition: i,
                    index: v.0,
                });
            }
            for (j, a) in t.guard.poly.iter().enumerate() {
                if a.degree() < 2 {
                    out.push(Violation::NotNonlinear {
                        transition: i,
                        atom: j,
                    });
                }
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSystem(v))
        }
    }

    pub fn initial_config(&self) -> Option<Config> {
        Some(Config {
            state: self.initial_state()?,
            values: self.initial_values.clone(),
        })
    }

    pub fn eval_guard(&self, t: &Transition, p: &[Rational]) -> Result<bool> {
        check_dim(self.dim(), p.len())?;
        t.guard.eval(p)
    }

    pub fn apply_update(&self, t: &Transition, p: &[Rational]) -> Result<Point> {
        check_dim(self.dim(), p.len())?;
        t.update.apply(p)
    }

    /// Indices of the transitions enabled at `c`.
    pub fn enabled(&self, c: &Config) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, t) in self.transitions.iter().enumerate() {
            if t.from == c.state && self.eval_guard(t, &c.values)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Picks `base`, or `base_1`, `base_2`, … until the name is unused.
    pub fn fresh_name(taken: &[String], base: &str) -> String {
        if !taken.iter().any(|n| n == base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|c| !taken.iter().any(|n| n == c))
            .expect("unbounded suffix search")
    }
}

/// `(t² + t)/2` written as the atom `y − t²/2 − t/2 rel 0`.
pub fn parabola_atom(t: VarId, y: VarId, rel: Rel) -> PolyAtom {
    let half = Rational::new(1.into(), 2.into());
    PolyAtom::new(
        [
            Monomial::new(Rational::one(), [(y, 1)]),
            Monomial::new(-half.clone(), [(t, 2)]),
            Monomial::new(-half, [(t, 1)]),
        ],
        rel,
        Rational::zero(),
    )
}
