//! A small SMT-LIB reader: s-expressions, a sort checker for the fragment
//! the encoder uses, and an evaluator that samples universal quantifiers.

use std::collections::HashMap;

use num::{One, Zero};
use polyinv_core::checker::InvariantLabeling;
use polyinv_core::model::TransitionSystem;
use polyinv_core::synth::{coeff_symbol, offset_symbol};
use polyinv_core::{Polyhedron, Rational};
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

pub fn parse(text: &str) -> Result<Vec<Sexp>, String> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            ';' => {
                for d in chars.by_ref() {
                    if d == '\n' {
                        break;
                    }
                }
            }
            '(' => stack.push(Vec::new()),
            ')' => {
                let done = stack.pop().ok_or("unbalanced ')'")?;
                stack.last_mut().ok_or("unbalanced ')'")?.push(Sexp::List(done));
            }
            '|' => {
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('|') => break,
                        Some('\\') | None => return Err("bad quoted symbol".into()),
                        Some(d) => s.push(d),
                    }
                }
                stack.last_mut().ok_or("unbalanced")?.push(Sexp::Atom(s));
            }
            c if c.is_whitespace() => {}
            c => {
                let mut s = String::from(c);
                while let Some(&d) = chars.peek() {
                    if d.is_whitespace() || d == '(' || d == ')' || d == ';' || d == '|' {
                        break;
                    }
                    s.push(d);
                    chars.next();
                }
                stack.last_mut().ok_or("unbalanced")?.push(Sexp::Atom(s));
            }
        }
    }
    match stack.len() {
        1 => Ok(stack.pop().unwrap()),
        _ => Err("unbalanced '('".into()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sort {
    Bool,
    Real,
}

fn is_numeral(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_digit()) && (s == "0" || !s.starts_with('0'))
}

fn sort_of(t: &Sexp, consts: &HashMap<String, ()>, bound: &[String]) -> Result<Sort, String> {
    match t {
        Sexp::Atom(a) if is_numeral(a) => Ok(Sort::Real),
        Sexp::Atom(a) if a == "true" || a == "false" => Ok(Sort::Bool),
        Sexp::Atom(a) if consts.contains_key(a) || bound.contains(a) => Ok(Sort::Real),
        Sexp::Atom(a) => Err(format!("undeclared symbol {a}")),
        Sexp::List(items) => {
            let (head, args) = items.split_first().ok_or("empty application")?;
            let Sexp::Atom(head) = head else { return Err("application head is a list".into()) };
            let all = |s: Sort, min: usize, bound: &[String]| -> Result<(), String> {
                if args.len() < min {
                    return Err(format!("{head} needs at least {min} arguments"));
                }
                for a in args {
                    if sort_of(a, consts, bound)? != s {
                        return Err(format!("ill-sorted argument of {head}"));
                    }
                }
                Ok(())
            };
            match head.as_str() {
                "forall" | "exists" => {
                    let [Sexp::List(binders), body] = args else { return Err("malformed quantifier".into()) };
                    if binders.is_empty() {
                        return Err("quantifier without binders".into());
                    }
                    let mut inner = bound.to_vec();
                    for b in binders {
                        match b {
                            Sexp::List(v) if v.len() == 2 && v[1] == Sexp::Atom("Real".into()) => match &v[0] {
                                Sexp::Atom(x) => inner.push(x.clone()),
                                _ => return Err("binder name is a list".into()),
                            },
                            _ => return Err("malformed binder".into()),
                        }
                    }
                    (sort_of(body, consts, &inner)? == Sort::Bool)
                        .then_some(Sort::Bool)
                        .ok_or_else(|| "quantifier body is not Bool".into())
                }
                "and" | "or" | "=>" => all(Sort::Bool, 2, bound).map(|_| Sort::Bool),
                "not" if args.len() == 1 => all(Sort::Bool, 1, bound).map(|_| Sort::Bool),
                "<=" | "<" | ">=" | ">" | "=" => all(Sort::Real, 2, bound).map(|_| Sort::Bool),
                "+" | "*" | "/" => all(Sort::Real, 2, bound).map(|_| Sort::Real),
                "-" => all(Sort::Real, 1, bound).map(|_| Sort::Real),
                other => Err(format!("unknown function {other}")),
            }
        }
    }
}

/// Checks the command structure and sorts of a script. Returns the declared
/// constants in order.
pub fn check_script(script: &[Sexp]) -> Result<Vec<String>, String> {
    let mut consts = HashMap::new();
    let mut order = Vec::new();
    let mut saw_logic = false;
    for cmd in script {
        let Sexp::List(items) = cmd else { return Err("top-level atom".into()) };
        let Some(Sexp::Atom(head)) = items.first() else { return Err("malformed command".into()) };
        match (head.as_str(), &items[1..]) {
            ("set-logic", [Sexp::Atom(l)]) if !saw_logic && order.is_empty() => {
                if l != "NRA" {
                    return Err(format!("unexpected logic {l}"));
                }
                saw_logic = true;
            }
            ("declare-const", [Sexp::Atom(n), Sexp::Atom(s)]) if s == "Real" => {
                if consts.insert(n.clone(), ()).is_some() {
                    return Err(format!("{n} declared twice"));
                }
                order.push(n.clone());
            }
            ("assert", [t]) => {
                if sort_of(t, &consts, &[])? != Sort::Bool {
                    return Err("assertion is not Bool".into());
                }
            }
            ("check-sat", []) | ("get-model", []) => {}
            (h, _) => return Err(format!("unexpected command {h}")),
        }
    }
    if !saw_logic {
        return Err("missing set-logic".into());
    }
    Ok(order)
}

type Env = HashMap<String, Rational>;

fn real(t: &Sexp, env: &Env) -> Rational {
    match t {
        Sexp::Atom(a) if is_numeral(a) => Rational::from_integer(a.parse().unwrap()),
        Sexp::Atom(a) => env.get(a).unwrap_or_else(|| panic!("unbound {a}")).clone(),
        Sexp::List(items) => {
            let Sexp::Atom(head) = &items[0] else { panic!("list head") };
            let args: Vec<Rational> = items[1..].iter().map(|a| real(a, env)).collect();
            match head.as_str() {
                "+" => args.into_iter().fold(Rational::zero(), |a, b| a + b),
                "*" => args.into_iter().fold(Rational::one(), |a, b| a * b),
                "-" if args.len() == 1 => -args[0].clone(),
                "-" => args[1..].iter().fold(args[0].clone(), |a, b| a - b),
                "/" => args[1..].iter().fold(args[0].clone(), |a, b| a / b),
                h => panic!("not a real function: {h}"),
            }
        }
    }
}

fn truth(t: &Sexp, env: &Env) -> bool {
    match t {
        Sexp::Atom(a) => a == "true",
        Sexp::List(items) => {
            let Sexp::Atom(head) = &items[0] else { panic!("list head") };
            let args = &items[1..];
            match head.as_str() {
                "and" => args.iter().all(|a| truth(a, env)),
                "or" => args.iter().any(|a| truth(a, env)),
                "not" => !truth(&args[0], env),
                "=>" => {
                    let (last, pre) = args.split_last().unwrap();
                    !pre.iter().all(|a| truth(a, env)) || truth(last, env)
                }
                op => {
                    let v: Vec<Rational> = args.iter().map(|a| real(a, env)).collect();
                    v.windows(2).all(|w| match op {
                        "<=" => w[0] <= w[1],
                        "<" => w[0] < w[1],
                        ">=" => w[0] >= w[1],
                        ">" => w[0] > w[1],
                        "=" => w[0] == w[1],
                        h => panic!("not a predicate: {h}"),
                    })
                }
            }
        }
    }
}

pub fn random_rational(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.gen_range(-20i64..=20).into(), rng.gen_range(1i64..=6).into())
}

/// Evaluates every assertion under `model`, replacing each universal
/// quantifier by `samples` random rational instances. Returns the first
/// falsified assertion.
pub fn sample_check(script: &[Sexp], model: &Env, samples: usize, rng: &mut impl Rng) -> Result<(), String> {
    for cmd in script {
        let Sexp::List(items) = cmd else { continue };
        if items[0] != Sexp::Atom("assert".into()) {
            continue;
        }
        let t = &items[1];
        match t {
            Sexp::List(q) if q[0] == Sexp::Atom("forall".into()) => {
                let Sexp::List(binders) = &q[1] else { unreachable!() };
                let names: Vec<String> = binders
                    .iter()
                    .map(|b| match b {
                        Sexp::List(v) => match &v[0] {
                            Sexp::Atom(x) => x.clone(),
                            _ => unreachable!(),
                        },
                        _ => unreachable!(),
                    })
                    .collect();
                for _ in 0..samples {
                    let mut env = model.clone();
                    for n in &names {
                        env.insert(n.clone(), random_rational(rng));
                    }
                    if !truth(&q[2], &env) {
                        return Err(format!("falsified at {:?}", names.iter().map(|n| env[n].to_string()).collect::<Vec<_>>()));
                    }
                }
            }
            t => {
                if !truth(t, model) {
                    return Err("ground assertion falsified".into());
                }
            }
        }
    }
    Ok(())
}

/// Template assignment for a labeling whose labels are H-polyhedra with at
/// most `k` constraints each; missing rows are filled with `0 ≤ 0`.
pub fn model_of(s: &TransitionSystem, inv: &InvariantLabeling, k: usize) -> Env {
    let mut env = Env::new();
    for (q, label) in inv.labels().iter().enumerate() {
        let Polyhedron::H(h) = label else { panic!("template labels are constraint form") };
        assert!(h.constraints().len() <= k);
        let name = &s.states[q].name;
        for c in 0..k {
            let row = h.constraints().get(c);
            for (i, v) in s.vars.iter().enumerate() {
                let a = row.map_or(Rational::zero(), |r| r.coeffs[i].clone());
                env.insert(unquote(coeff_symbol(name, c, v).unwrap()), a);
            }
            env.insert(unquote(offset_symbol(name, c).unwrap()), row.map_or(Rational::zero(), |r| r.rhs.clone()));
        }
    }
    env
}

fn unquote(s: String) -> String {
    s.trim_matches('|').to_string()
}
