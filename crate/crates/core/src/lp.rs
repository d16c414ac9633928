//! Exact rational linear programming.
//!
//! Dense two-phase tableau simplex with Bland's rule, so it never cycles.
//! Free variables are split as `x = p − q` with `p, q ≥ 0`. Strict rows are
//! handled by maximizing a slack `ε ≤ 1` shared by all of them.

use num::{One, Signed, Zero};

use crate::model::Rel;
use crate::rational::{Point, Rational};

/// `coeffs · x rel rhs` over `n` free variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LinRow {
    pub coeffs: Vec<Rational>,
    pub rel: Rel,
    pub rhs: Rational,
}

impl LinRow {
    pub fn new(coeffs: Vec<Rational>, rel: Rel, rhs: Rational) -> Self {
        Self { coeffs, rel, rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rational, point: Point },
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    ncols: usize,
    enterable: Vec<bool>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize, obj: &mut [Rational]) {
        let inv = Rational::one() / &self.rows[r][c];
        self.rows[r].iter_mut().for_each(|x| *x *= &inv);
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..=self.ncols).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |row: &mut [Rational]| {
            if row[c].is_zero() {
                return;
            }
            let f = row[c].clone();
            for &j in &nz {
                row[j] -= &f * &pivot_row[j];
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(obj);
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Objective row from costs: reduced costs, with `−value` in the last slot.
    fn objective_row(&self, costs: &[Rational]) -> Vec<Rational> {
        let mut obj = costs.to_vec();
        obj.push(Rational::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if !costs[b].is_zero() {
                let f = costs[b].clone();
                for (o, x) in obj.iter_mut().zip(row) {
                    if !x.is_zero() {
                        *o -= &f * x;
                    }
                }
            }
        }
        obj
    }

    /// Runs simplex iterations; `false` when unbounded.
    fn optimize(&mut self, obj: &mut [Rational]) -> bool {
        loop {
            let Some(c) = (0..self.ncols).find(|&j| self.enterable[j] && obj[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[self.ncols] / &row[c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c, obj),
                None => return false,
            }
        }
    }

    fn value_of(&self, col: usize) -> Rational {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map(|i| self.rows[i][self.ncols].clone())
            .unwrap_or_else(Rational::zero)
    }
}

/// Maximizes `objective · x` subject to non-strict `rows`.
pub(crate) fn maximize(n: usize, rows: &[LinRow], objective: &[Rational]) -> LpOutcome {
    debug_assert!(rows.iter().all(|r| r.rel != Rel::Lt && r.coeffs.len() == n));
    debug_assert_eq!(objective.len(), n);

    #[derive(Clone, Copy, PartialEq)]
    enum Kind {
        Le,
        Ge,
        Eq,
    }
    let normalized: Vec<(Vec<Rational>, Kind, Rational)> = rows
        .iter()
        .map(|r| {
            let kind = if r.rel == Rel::Eq { Kind::Eq } else { Kind::Le };
            if r.rhs.is_negative() {
                let flipped = if kind == Kind::Le { Kind::Ge } else { Kind::Eq };
                (r.coeffs.iter().map(|c| -c).collect(), flipped, -r.rhs.clone())
            } else {
                (r.coeffs.clone(), kind, r.rhs.clone())
            }
        })
        .collect();

    let n_slack = normalized.iter().filter(|r| r.1 != Kind::Eq).count();
    let n_art = normalized.iter().filter(|r| r.1 != Kind::Le).count();
    let ncols = 2 * n + n_slack + n_art;
    let art_start = 2 * n + n_slack;

    let mut tab = Tableau {
        rows: Vec::with_capacity(rows.len()),
        basis: Vec::with_capacity(rows.len()),
        ncols,
        enterable: vec![true; ncols],
    };
    let (mut s, mut a) = (2 * n, art_start);
    for (coeffs, kind, rhs) in &normalized {
        let mut row = vec![Rational::zero(); ncols + 1];
        for (j, c) in coeffs.iter().enumerate() {
            row[2 * j] = c.clone();
            row[2 * j + 1] = -c.clone();
        }
        row[ncols] = rhs.clone();
        match kind {
            Kind::Le => {
                row[s] = Rational::one();
                tab.basis.push(s);
                s += 1;
            }
            Kind::Ge => {
                row[s] = -Rational::one();
                s += 1;
                row[a] = Rational::one();
                tab.basis.push(a);
                a += 1;
            }
            Kind::Eq => {
                row[a] = Rational::one();
                tab.basis.push(a);
                a += 1;
            }
        }
        tab.rows.push(row);
    }

    if n_art > 0 {
        let mut costs = vec![Rational::zero(); ncols];
        costs[art_start..].iter_mut().for_each(|c| *c = -Rational::one());
        let mut obj = tab.objective_row(&costs);
        tab.optimize(&mut obj);
        if !obj[ncols].is_zero() {
            return LpOutcome::Infeasible;
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= art_start {
                match (0..art_start).find(|&j| !tab.rows[i][j].is_zero()) {
                    Some(j) => {
                        tab.pivot(i, j, &mut obj);
                        i += 1;
                    }
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        tab.enterable[art_start..].iter_mut().for_each(|e| *e = false);
    }

    let mut costs = vec![Rational::zero(); ncols];
    for (j, c) in objective.iter().enumerate() {
        costs[2 * j] = c.clone();
        costs[2 * j + 1] = -c.clone();
    }
    let mut obj = tab.objective_row(&costs);
    if !tab.optimize(&mut obj) {
        return LpOutcome::Unbounded;
    }
    let point: Point = (0..n).map(|j| tab.value_of(2 * j) - tab.value_of(2 * j + 1)).collect();
    LpOutcome::Optimal {
        value: -obj[ncols].clone(),
        point,
    }
}

/// A point satisfying every row (strict rows strictly), if one exists.
pub(crate) fn feasible_point(n: usize, rows: &[LinRow]) -> Option<Point> {
    if rows.iter().all(|r| r.rel != Rel::Lt) {
        return match maximize(n, rows, &vec![Rational::zero(); n]) {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        };
    }
    let mut lifted: Vec<LinRow> = rows
        .iter()
        .map(|r| {
            let mut coeffs = r.coeffs.clone();
            let strict = r.rel == Rel::Lt;
            coeffs.push(if strict { Rational::one() } else { Rational::zero() });
            LinRow::new(coeffs, if strict { Rel::Le } else { r.rel }, r.rhs.clone())
        })
        .collect();
    let mut eps = vec![Rational::zero(); n + 1];
    eps[n] = Rational::one();
    lifted.push(LinRow::new(eps.clone(), Rel::Le, Rational::one()));
    match maximize(n + 1, &lifted, &eps) {
        LpOutcome::Optimal { value, mut point } if value.is_positive() => {
            point.truncate(n);
            Some(point)
        }
        _ => None,
    }
}
