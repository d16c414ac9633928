//! Double description: extreme rays of pointed cones, used for both
//! directions of the H/V conversion.

use fixedbitset::FixedBitSet;
use num::{One, Signed, Zero};

use super::{tidy, Constraint, HPolyhedron, VPolytope};
use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::LpOutcome;
use crate::model::Rel;
use crate::rational::{dot, primitive, Point, Rational};

struct Ray {
    v: Vec<Rational>,
    zeros: FixedBitSet,
}

/// Extreme rays of `{y ∈ ℚ^dim : row·y ≥ 0 for every row}`.
///
/// The rows must have rank `dim` (the cone is pointed).
fn extreme_rays(rows: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    let nrows = rows.len();
    let init = linalg::independent_rows(rows, dim);
    assert_eq!(init.len(), dim, "cone is not pointed");
    let basis: Vec<Vec<Rational>> = init.iter().map(|&i| rows[i].clone()).collect();
    let inv = linalg::inverse(&basis).expect("independent rows");

    // Column k of the inverse is tight on every initial row except the k-th.
    let mut rays: Vec<Ray> = (0..dim)
        .map(|k| {
            let v: Vec<Rational> = inv.iter().map(|row| row[k].clone()).collect();
            let mut zeros = FixedBitSet::with_capacity(nrows);
            for (j, &r) in init.iter().enumerate() {
                if j != k {
                    zeros.insert(r);
                }
            }
            Ray { v: primitive(&v), zeros }
        })
        .collect();

    for (i, row) in rows.iter().enumerate() {
        if init.contains(&i) {
            continue;
        }
        let values: Vec<Rational> = rays.iter().map(|r| dot(row, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_negative()).collect();

        let mut fresh = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let mut common = rays[p].zeros.clone();
                common.intersect_with(&rays[n].zeros);
                if common.count_ones(..) + 2 < dim {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, r)| k == p || k == n || !common.is_subset(&r.zeros));
                if !adjacent {
                    continue;
                }
                let (sp, sn) = (&values[p], -values[n].clone());
                let v: Vec<Rational> = rays[p]
                    .v
                    .iter()
                    .zip(&rays[n].v)
                    .map(|(a, b)| &sn * a + sp * b)
                    .collect();
                let mut zeros = common;
                zeros.insert(i);
                fresh.push(Ray { v: primitive(&v), zeros });
            }
        }

        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            if values[k].is_zero() {
                r.zeros.insert(i);
                next.push(r);
            } else if values[k].is_positive() {
                next.push(r);
            }
        }
        next.extend(fresh);
        rays = next;
    }
    rays.into_iter().map(|r| r.v).collect()
}

pub(super) fn hrep_to_vrep(p: &HPolyhedron) -> Result<VPolytope> {
    let dim = p.dim;
    let Some(cs) = tidy(p.constraints.iter().cloned()) else {
        return Ok(VPolytope::empty(dim));
    };
    let hp = HPolyhedron { dim, constraints: cs };
    if hp.is_empty() {
        return Ok(VPolytope::empty(dim));
    }
    for i in 0..dim {
        for s in [Rational::one(), -Rational::one()] {
            let mut obj = vec![Rational::zero(); dim];
            obj[i] = s;
            if let LpOutcome::Unbounded = hp.maximize(&obj) {
                return Err(Error::UnboundedPolyhedron);
            }
        }
    }

    // Parametrize the affine hull of the equalities: x = base + N·z.
    let (eqs, ineqs): (Vec<&Constraint>, Vec<&Constraint>) = hp.constraints.iter().partition(|c| c.rel == Rel::Eq);
    let a: Vec<Vec<Rational>> = eqs.iter().map(|c| c.coeffs.clone()).collect();
    let b: Vec<Rational> = eqs.iter().map(|c| c.rhs.clone()).collect();
    let Some((base, null)) = linalg::solve_affine(&a, &b, dim) else {
        return Ok(VPolytope::empty(dim));
    };
    let k = null.len();
    if k == 0 {
        return Ok(VPolytope { dim, points: vec![base] });
    }

    // Homogenized cone over (x0, z): x0 ≥ 0 and (b − a·base)·x0 − (a·N)·z ≥ 0.
    let mut rows = Vec::with_capacity(ineqs.len() + 1);
    let mut x0 = vec![Rational::zero(); k + 1];
    x0[0] = Rational::one();
    rows.push(x0);
    for c in ineqs {
        let mut row = Vec::with_capacity(k + 1);
        row.push(&c.rhs - dot(&c.coeffs, &base));
        row.extend(null.iter().map(|n| -dot(&c.coeffs, n)));
        rows.push(row);
    }

    let mut points: Vec<Point> = extreme_rays(&rows, k + 1)
        .into_iter()
        .filter(|r| r[0].is_positive())
        .map(|r| {
            let mut x = base.clone();
            for (j, n) in null.iter().enumerate() {
                let zj = &r[j + 1] / &r[0];
                for (xi, ni) in x.iter_mut().zip(n) {
                    *xi += &zj * ni;
                }
            }
            x
        })
        .collect();
    points.sort();
    points.dedup();
    Ok(VPolytope { dim, points })
}

pub(super) fn vrep_to_hrep(v: &VPolytope) -> HPolyhedron {
    let dim = v.dim;
    let mut pts = v.points.clone();
    pts.sort();
    pts.dedup();
    let Some(p0) = pts.first().cloned() else {
        return HPolyhedron::empty(dim);
    };

    let dirs: Vec<Vec<Rational>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(&p0).map(|(a, b)| a - b).collect())
        .collect();
    let mut echelon = dirs.clone();
    let pivots = linalg::rref(&mut echelon, dim);

    let mut cs: Vec<Constraint> = linalg::null_space(&dirs, dim)
        .into_iter()
        .map(|n| {
            let rhs = dot(&n, &p0);
            Constraint::eq(n, rhs)
        })
        .collect();

    let r = pivots.len();
    if r > 0 {
        // The pivot coordinates are injective on the affine hull, so facets
        // can be computed there and read back as constraints on those columns.
        let rows: Vec<Vec<Rational>> = pts
            .iter()
            .map(|p| {
                let mut row = vec![Rational::one()];
                row.extend(pivots.iter().map(|&c| p[c].clone()));
                row
            })
            .collect();
        for ray in extreme_rays(&rows, r + 1) {
            if ray[1..].iter().all(Zero::is_zero) {
                continue;
            }
            let mut coeffs = vec![Rational::zero(); dim];
            for (j, &c) in pivots.iter().enumerate() {
                coeffs[c] = -ray[j + 1].clone();
            }
            cs.push(Constraint::le(coeffs, ray[0].clone()));
        }
    }
    HPolyhedron::from_tidy(dim, tidy(cs))
}
