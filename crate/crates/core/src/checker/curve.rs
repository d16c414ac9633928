//! Polynomial atoms of the shape `y rel p(t)` with `p` strictly convex.

use std::collections::BTreeMap;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{PolyAtom, Rel, VarId};
use crate::polyhedra::VPolytope;
use crate::rational::{Point, Rational};
use crate::univariate::UniPoly;

/// Relation between `y` and `p(t)` once the atom is solved for `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveRel {
    Eq,
    Le,
    Lt,
    Ge,
    Gt,
}

/// `y rel p(t)`, where `y` occurs linearly and `p` is strictly convex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveAtom {
    pub t: VarId,
    pub y: VarId,
    pub p: UniPoly,
    pub rel: CurveRel,
}

impl CurveAtom {
    pub fn classify(atom: &PolyAtom) -> Result<Self> {
        let unsupported = |why: &str| Error::UnsupportedGuard(format!("polynomial atom {why}"));
        let mut t: Option<VarId> = None;
        for m in atom.monomials() {
            if m.degree() < 2 {
                continue;
            }
            if m.exps().len() != 1 {
                return Err(unsupported("mixes variables in one monomial"));
            }
            let v = *m.exps().keys().next().expect("one variable");
            if t.is_some_and(|t| t != v) {
                return Err(unsupported("is nonlinear in more than one variable"));
            }
            t = Some(v);
        }
        let t = t.ok_or_else(|| unsupported("has no nonlinear term"))?;

        let mut h: Vec<Rational> = Vec::new();
        let mut y: Option<(VarId, Rational)> = None;
        for m in atom.monomials() {
            match m.exps().iter().next() {
                None => add_coeff(&mut h, 0, &m.coeff),
                Some((&v, &e)) if v == t => add_coeff(&mut h, e as usize, &m.coeff),
                Some((&v, _)) => {
                    if y.is_some() {
                        return Err(unsupported("has more than one linear variable"));
                    }
                    y = Some((v, m.coeff.clone()));
                }
            }
        }
        let (y, alpha) = y.ok_or_else(|| unsupported("has no linear variable"))?;

        // alpha·y + h(t) rel rhs  ⇔  y rel' (rhs − h(t)) / alpha
        let mut num: Vec<Rational> = h.iter().map(|c| -c).collect();
        if num.is_empty() {
            num.push(Rational::zero());
        }
        num[0] += &atom.rhs;
        let p = UniPoly::new(num.into_iter().map(|c| c / &alpha).collect());
        let flip = alpha.is_negative();
        let rel = match (atom.rel, flip) {
            (Rel::Eq, _) => CurveRel::Eq,
            (Rel::Le, false) => CurveRel::Le,
            (Rel::Lt, false) => CurveRel::Lt,
            (Rel::Le, true) => CurveRel::Ge,
            (Rel::Lt, true) => CurveRel::Gt,
        };
        if !p.is_strictly_convex() {
            return Err(unsupported("is not convex in its nonlinear variable"));
        }
        Ok(Self { t, y, p, rel })
    }

    /// `y − p(t)`: non-negative exactly on the convex side of the curve.
    pub fn gap(&self, x: &[Rational]) -> Rational {
        &x[self.y.0] - self.p.eval(&x[self.t.0])
    }
}

fn add_coeff(h: &mut Vec<Rational>, deg: usize, c: &Rational) {
    if h.len() <= deg {
        h.resize(deg + 1, Rational::zero());
    }
    h[deg] += c;
}

/// Groups the generators lying exactly on the curve by their `t` value.
///
/// When no generator lies strictly below the curve, the union of the hulls of
/// the groups is exactly the part of the polytope on the curve: for a point
/// `Σλ_i·v_i` on it, convexity of `p(t) − y` gives
/// `0 = p(t) − y ≤ Σλ_i·(p(t_i) − y_i) ≤ 0`, strict convexity forces a common
/// `t` among the contributing generators, and linearity in `y` then puts
/// every one of them on the curve.
pub fn on_curve_groups(v: &VPolytope, atom: &PolyAtom) -> Result<Vec<VPolytope>> {
    let curve = CurveAtom::classify(atom)?;
    curve_groups(v, &curve)
}

pub(crate) fn curve_groups(v: &VPolytope, curve: &CurveAtom) -> Result<Vec<VPolytope>> {
    let dim = v.dim();
    if let Some(m) = [curve.t, curve.y].into_iter().find(|x| x.0 >= dim) {
        return Err(Error::VarOutOfRange { index: m.0, dim });
    }
    let mut groups: BTreeMap<Rational, Vec<Point>> = BTreeMap::new();
    for p in v.points() {
        let gap = curve.gap(p);
        if gap.is_negative() {
            return Err(Error::PreconditionViolated(format!(
                "generator {} lies strictly below the curve",
                crate::rational::render_point(p)
            )));
        }
        if gap.is_zero() {
            let g = groups.entry(p[curve.t.0].clone()).or_default();
            if !g.contains(p) {
                g.push(p.clone());
            }
        }
    }
    groups
        .into_values()
        .map(|pts| VPolytope::new(dim, pts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parabola_atom, Monomial};
    use crate::rational::{frac, int, point};

    const T: VarId = VarId(0);
    const Y: VarId = VarId(1);

    #[test]
    fn classifies_the_parabola() {
        let c = CurveAtom::classify(&parabola_atom(T, Y, Rel::Lt)).unwrap();
        assert_eq!((c.t, c.y, c.rel), (T, Y, CurveRel::Lt));
        assert_eq!(c.p.coeffs(), &[int(0), frac(1, 2), frac(1, 2)]);
        assert_eq!(c.gap(&point(&[2, 3])), int(0));
    }

    #[test]
    fn negative_linear_coefficient_flips_the_relation() {
        // t² − y ≤ 1  ⇔  y ≥ t² − 1
        let atom = PolyAtom::new(
            [Monomial::new(int(1), [(T, 2)]), Monomial::new(int(-1), [(Y, 1)])],
            Rel::Le,
            int(1),
        );
        let c = CurveAtom::classify(&atom).unwrap();
        assert_eq!(c.rel, CurveRel::Ge);
        assert_eq!(c.p.coeffs(), &[int(-1), int(0), int(1)]);
    }

    #[test]
    fn rejects_unsupported_shapes() {
        let concave = PolyAtom::new(
            [Monomial::new(int(1), [(Y, 1)]), Monomial::new(int(1), [(T, 2)])],
            Rel::Le,
            int(0),
        );
        assert!(matches!(CurveAtom::classify(&concave), Err(Error::UnsupportedGuard(_))));
        let mixed = PolyAtom::new(
            [Monomial::new(int(1), [(Y, 1), (T, 1)]), Monomial::new(int(1), [(VarId(2), 1)])],
            Rel::Le,
            int(0),
        );
        assert!(CurveAtom::classify(&mixed).is_err());
        let no_y = PolyAtom::new([Monomial::new(int(1), [(T, 2)])], Rel::Le, int(4));
        assert!(CurveAtom::classify(&no_y).is_err());
    }

    #[test]
    fn run_points_form_singleton_groups() {
        let v = VPolytope::new(2, vec![point(&[0, 0]), point(&[1, 1]), point(&[2, 3]), point(&[3, 6])]).unwrap();
        let groups = on_curve_groups(&v, &parabola_atom(T, Y, Rel::Eq)).unwrap();
        assert_eq!(groups.len(), 4);
        assert!(groups.iter().all(|g| g.points().len() == 1));
    }

    #[test]
    fn duplicates_and_off_curve_points() {
        let v = VPolytope::new(2, vec![point(&[0, 0]), point(&[0, 0]), point(&[1, 5])]).unwrap();
        let groups = on_curve_groups(&v, &parabola_atom(T, Y, Rel::Eq)).unwrap();
        assert_eq!(groups, vec![VPolytope::new(2, vec![point(&[0, 0])]).unwrap()]);

        let above = VPolytope::new(2, vec![point(&[0, 1]), point(&[1, 5])]).unwrap();
        assert!(on_curve_groups(&above, &parabola_atom(T, Y, Rel::Eq)).unwrap().is_empty());

        let below = VPolytope::new(2, vec![point(&[0, 0]), vec![int(2), frac(5, 2)]]).unwrap();
        assert!(matches!(
            on_curve_groups(&below, &parabola_atom(T, Y, Rel::Eq)),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn groups_share_t_across_other_coordinates() {
        // (x, t, y): two generators on the curve at t = 1 with different x.
        let atom = parabola_atom(VarId(1), VarId(2), Rel::Eq);
        let v = VPolytope::new(3, vec![point(&[0, 1, 1]), point(&[5, 1, 1]), point(&[0, 2, 3])]).unwrap();
        let groups = on_curve_groups(&v, &atom).unwrap();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].points().len(), 2);
    }
}
