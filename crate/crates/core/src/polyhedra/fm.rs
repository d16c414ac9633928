//! Fourier–Motzkin projection with native equality substitution.

use num::{Signed, Zero};

use super::{tidy, Constraint, HPolyhedron};
use crate::error::Result;
use crate::model::{AffineUpdate, Rel};
use crate::rational::Rational;

/// Row count above which intermediate systems are pruned with LP.
const PRUNE_THRESHOLD: usize = 24;

/// Eliminates column `col` from `cs`, keeping the column (now all zero).
fn eliminate_column(cs: Vec<Constraint>, col: usize) -> Option<Vec<Constraint>> {
    if let Some(k) = cs.iter().position(|c| c.rel == Rel::Eq && !c.coeffs[col].is_zero()) {
        let eq = cs[k].clone();
        let out = cs.into_iter().enumerate().filter(|(i, _)| *i != k).map(|(_, c)| {
            if c.coeffs[col].is_zero() {
                return c;
            }
            let f = &c.coeffs[col] / &eq.coeffs[col];
            Constraint {
                coeffs: c.coeffs.iter().zip(&eq.coeffs).map(|(a, b)| a - &f * b).collect(),
                rel: c.rel,
                rhs: &c.rhs - &f * &eq.rhs,
            }
        });
        return tidy(out);
    }
    let (mut lower, mut upper, mut rest) = (Vec::new(), Vec::new(), Vec::new());
    for c in cs {
        if c.coeffs[col].is_positive() {
            upper.push(c);
        } else if c.coeffs[col].is_negative() {
            lower.push(c);
        } else {
            rest.push(c);
        }
    }
    for u in &upper {
        for l in &lower {
            // (−l_col)·u + u_col·l cancels the column with positive weights.
            let (wu, wl) = (-l.coeffs[col].clone(), u.coeffs[col].clone());
            rest.push(Constraint {
                coeffs: u.coeffs.iter().zip(&l.coeffs).map(|(a, b)| &wu * a + &wl * b).collect(),
                rel: Rel::Le,
                rhs: &wu * &u.rhs + &wl * &l.rhs,
            });
        }
    }
    tidy(rest)
}

fn cost(cs: &[Constraint], col: usize) -> usize {
    if cs.iter().any(|c| c.rel == Rel::Eq && !c.coeffs[col].is_zero()) {
        return 0;
    }
    let pos = cs.iter().filter(|c| c.coeffs[col].is_positive()).count();
    let neg = cs.iter().filter(|c| c.coeffs[col].is_negative()).count();
    1 + pos * neg
}

/// Projects away every column in `cols` and returns the polyhedron over the
/// remaining columns, in their original order.
pub(super) fn eliminate_all(p: &HPolyhedron, cols: &[usize]) -> HPolyhedron {
    let mut remaining: Vec<usize> = cols.to_vec();
    remaining.sort_unstable();
    remaining.dedup();
    let keep: Vec<usize> = (0..p.dim).filter(|i| !remaining.contains(i)).collect();
    let Some(mut cs) = tidy(p.constraints.iter().cloned()) else {
        return HPolyhedron::empty(keep.len());
    };
    while !remaining.is_empty() {
        let (pos, &col) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &c)| cost(&cs, c))
            .expect("non-empty");
        remaining.remove(pos);
        match eliminate_column(cs, col) {
            Some(next) => cs = next,
            None => return HPolyhedron::empty(keep.len()),
        }
        if cs.len() > PRUNE_THRESHOLD {
            let pruned = HPolyhedron {
                dim: p.dim,
                constraints: cs,
            }
            .remove_redundant();
            cs = pruned.constraints;
        }
    }
    let projected = cs.into_iter().map(|c| Constraint {
        coeffs: keep.iter().map(|&i| c.coeffs[i].clone()).collect(),
        rel: c.rel,
        rhs: c.rhs,
    });
    HPolyhedron::from_tidy(keep.len(), tidy(projected))
}

/// Builds the system over `(x, x′)` with `x′ = A·x + c` and projects out `x`.
pub(super) fn affine_image(p: &HPolyhedron, u: &AffineUpdate) -> Result<HPolyhedron> {
    let d = p.dim;
    let (a, c) = u.matrix(d)?;
    let mut cs: Vec<Constraint> = p
        .constraints
        .iter()
        .map(|k| {
            let mut coeffs = k.coeffs.clone();
            coeffs.extend(std::iter::repeat_n(Rational::zero(), d));
            Constraint {
                coeffs,
                rel: k.rel,
                rhs: k.rhs.clone(),
            }
        })
        .collect();
    for i in 0..d {
        let mut coeffs: Vec<Rational> = a[i].iter().map(|x| -x).collect();
        coeffs.extend((0..d).map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::zero() }));
        cs.push(Constraint::eq(coeffs, c[i].clone()));
    }
    let joint = HPolyhedron { dim: 2 * d, constraints: cs };
    Ok(eliminate_all(&joint, &(0..d).collect::<Vec<_>>()))
}
