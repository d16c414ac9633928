//! Invariants with at most `k` constraints per state: an exact search over
//! small integer templates, and an SMT-LIB encoding of the general question.

use std::fmt::Write;

use num::{Signed, Zero};

use crate::checker::{check_separating, InvariantLabeling};
use crate::error::{Error, Result};
use crate::model::{AffineUpdate, Guard, Rel, StateId, TransitionSystem};
use crate::polyhedra::{Constraint, HPolyhedron, Polyhedron};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemplateSpec {
    /// Maximum number of constraints per state.
    pub k: usize,
    /// Coefficients and offsets range over the integers in `[−B, B]`.
    pub coeff_bound: u32,
}

/// Distinct constraints `a·x ≤ b` with integer entries in `[−B, B]`, in
/// lexicographic order of `(a, b)`. Tautologies are skipped; every
/// contradiction collapses to `0 ≤ −1`.
pub fn candidate_constraints(dim: usize, bound: u32) -> Vec<Constraint> {
    let b = bound as i64;
    let width = 2 * b + 1;
    let total = (width as u64).pow(dim as u32 + 1);
    let mut out: Vec<Constraint> = Vec::new();
    for code in 0..total {
        let mut digits = vec![0i64; dim + 1];
        let mut c = code;
        for slot in digits.iter_mut().rev() {
            *slot = (c % width as u64) as i64 - b;
            c /= width as u64;
        }
        let rhs = digits.pop().expect("offset digit");
        if digits.iter().all(|&a| a == 0) && rhs >= 0 {
            continue;
        }
        let n = Constraint::le(digits.into_iter().map(int).collect(), int(rhs)).normalized();
        if !out.contains(&n) {
            out.push(n);
        }
    }
    out
}

/// Index sets of size `0..=k` over `n` items, shortest first, each size in
/// lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..k.min(n) {
        let mut next = Vec::new();
        for s in &level {
            let start = s.last().map_or(0, |&i| i + 1);
            for i in start..n {
                let mut t = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// First labeling, in lexicographic order with state 0 most significant,
/// that passes the checker. `None` only means no template in range works.
pub fn search_bounded(s: &TransitionSystem, spec: TemplateSpec) -> Result<Option<InvariantLabeling>> {
    s.ensure_valid()?;
    let dim = s.dim();
    let init = s.initial_state().expect("validated");
    let bad = s.bad_state().expect("validated");
    let cands = candidate_constraints(dim, spec.coeff_bound);
    let all: Vec<HPolyhedron> = subsets(cands.len(), spec.k)
        .into_iter()
        .map(|idx| HPolyhedron::new(dim, idx.into_iter().map(|i| cands[i].clone()).collect()))
        .collect::<Result<_>>()?;
    let mut options: Vec<Vec<Polyhedron>> = Vec::with_capacity(s.states.len());
    for q in (0..s.states.len()).map(StateId) {
        let mut opts = Vec::new();
        for h in &all {
            let keep = if q == bad {
                h.is_empty()
            } else if q == init {
                h.contains(&s.initial_values)?
            } else {
                true
            };
            if keep {
                opts.push(Polyhedron::H(h.clone()));
            }
        }
        if opts.is_empty() {
            return Ok(None);
        }
        options.push(opts);
    }
    let mut digits = vec![0usize; options.len()];
    loop {
        let labels = digits.iter().zip(&options).map(|(&i, o)| o[i].clone()).collect();
        let inv = InvariantLabeling::new(labels);
        if check_separating(s, &inv).is_ok_and(|r| r.passed()) {
            return Ok(Some(inv));
        }
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < options[pos].len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}

fn is_simple_symbol(s: &str) -> bool {
    const EXTRA: &str = "~!@$%^&*_-+=<>.?/";
    !s.is_empty()
        && !s.starts_with(|c: char| c.is_ascii_digit())
        && s.chars().all(|c| c.is_ascii_alphanumeric() || EXTRA.contains(c))
}

fn symbol(s: &str) -> Result<String> {
    if is_simple_symbol(s) {
        Ok(s.to_string())
    } else if s.contains(['|', '\\']) {
        Err(Error::PreconditionViolated(format!("name {s:?} cannot be written as an SMT-LIB symbol")))
    } else {
        Ok(format!("|{s}|"))
    }
}

/// Name of the coefficient of variable `v` in constraint `c` of `state`.
pub fn coeff_symbol(state: &str, c: usize, var: &str) -> Result<String> {
    symbol(&format!("a_{state}_{c}_{var}"))
}

/// Name of the offset of constraint `c` of `state`.
pub fn offset_symbol(state: &str, c: usize) -> Result<String> {
    symbol(&format!("b_{state}_{c}"))
}

fn num(r: &Rational) -> String {
    let abs = r.abs();
    let body = if abs.is_integer() {
        abs.numer().to_string()
    } else {
        format!("(/ {} {})", abs.numer(), abs.denom())
    };
    if r.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

fn nary(op: &str, unit: &str, mut items: Vec<String>) -> String {
    match items.len() {
        0 => unit.to_string(),
        1 => items.pop().expect("one item"),
        _ => format!("({op} {})", items.join(" ")),
    }
}

fn rel_op(r: Rel) -> &'static str {
    match r {
        Rel::Le => "<=",
        Rel::Lt => "<",
        Rel::Eq => "=",
    }
}

struct Encoder<'a> {
    s: &'a TransitionSystem,
    k: usize,
    xs: Vec<String>,
}

impl Encoder<'_> {
    /// Template conjunction of state `q` evaluated at the given expressions.
    fn template(&self, q: StateId, at: &[String]) -> Result<String> {
        let name = &self.s.states[q.0].name;
        let mut rows = Vec::with_capacity(self.k);
        for c in 0..self.k {
            let mut terms = Vec::with_capacity(at.len());
            for (v, e) in self.s.vars.iter().zip(at) {
                terms.push(format!("(* {} {e})", coeff_symbol(name, c, v)?));
            }
            rows.push(format!("(<= {} {})", nary("+", "0", terms), offset_symbol(name, c)?));
        }
        Ok(nary("and", "true", rows))
    }

    fn guard(&self, g: &Guard) -> String {
        let mut atoms = Vec::new();
        for a in &g.lin {
            let terms = a.coeffs().iter().map(|(v, c)| format!("(* {} {})", num(c), self.xs[v.0])).collect();
            atoms.push(format!("({} {} {})", rel_op(a.rel), nary("+", "0", terms), num(&a.rhs)));
        }
        for a in &g.poly {
            let terms = a
                .monomials()
                .iter()
                .map(|m| {
                    let mut f = vec![num(&m.coeff)];
                    for (v, &e) in m.exps() {
                        f.extend(std::iter::repeat_n(self.xs[v.0].clone(), e as usize));
                    }
                    nary("*", "1", f)
                })
                .collect();
            atoms.push(format!("({} {} {})", rel_op(a.rel), nary("+", "0", terms), num(&a.rhs)));
        }
        nary("and", "true", atoms)
    }

    fn image(&self, u: &AffineUpdate) -> Vec<String> {
        (0..self.s.dim())
            .map(|i| match u.assignments().get(&crate::model::VarId(i)) {
                None => self.xs[i].clone(),
                Some(e) => {
                    let mut terms: Vec<String> =
                        e.coeffs().iter().map(|(v, c)| format!("(* {} {})", num(c), self.xs[v.0])).collect();
                    if !e.offset.is_zero() || terms.is_empty() {
                        terms.push(num(&e.offset));
                    }
                    nary("+", "0", terms)
                }
            })
            .collect()
    }

    fn forall(&self, body: String) -> String {
        if self.xs.is_empty() {
            return body;
        }
        let binders: Vec<String> = self.xs.iter().map(|x| format!("({x} Real)")).collect();
        format!("(forall ({}) {body})", binders.join(" "))
    }
}

/// SMT-LIB 2 problem whose models are invariants with `k` constraints per
/// state: existential template coefficients, universally quantified
/// registers.
pub fn encode_bounded_existence(s: &TransitionSystem, spec: TemplateSpec) -> Result<String> {
    s.ensure_valid()?;
    let xs = s.vars.iter().map(|v| symbol(&format!("x_{v}"))).collect::<Result<Vec<_>>>()?;
    let enc = Encoder { s, k: spec.k, xs };
    let mut out = String::new();
    writeln!(out, "; separating invariant with at most {} constraints per state", spec.k).unwrap();
    writeln!(out, "(set-logic NRA)").unwrap();
    for q in &s.states {
        for c in 0..spec.k {
            for v in &s.vars {
                writeln!(out, "(declare-const {} Real)", coeff_symbol(&q.name, c, v)?).unwrap();
            }
            writeln!(out, "(declare-const {} Real)", offset_symbol(&q.name, c)?).unwrap();
        }
    }
    let init = s.initial_state().expect("validated");
    let x0: Vec<String> = s.initial_values.iter().map(num).collect();
    writeln!(out, "(assert {})", enc.template(init, &x0)?).unwrap();
    for t in &s.transitions {
        let pre = nary("and", "true", vec![enc.template(t.from, &enc.xs)?, enc.guard(&t.guard)]);
        let post = enc.template(t.to, &enc.image(&t.update))?;
        writeln!(out, "(assert {})", enc.forall(format!("(=> {pre} {post})"))).unwrap();
    }
    let bad = s.bad_state().expect("validated");
    let body = format!("(=> {} false)", enc.template(bad, &enc.xs)?);
    writeln!(out, "(assert {})", enc.forall(body)).unwrap();
    writeln!(out, "(check-sat)").unwrap();
    writeln!(out, "(get-model)").unwrap();
    Ok(out)
}
