use std::collections::BTreeMap;

use num::{One, Zero};
use proptest::prelude::*;

use super::*;
use crate::model::{LinExpr, VarId};
use crate::rational::{frac, int, point};

fn le(c: &[i64], b: i64) -> Constraint {
    Constraint::le(point(c), int(b))
}

fn ge(c: &[i64], b: i64) -> Constraint {
    Constraint::ge(point(c), int(b))
}

fn h(dim: usize, cs: Vec<Constraint>) -> HPolyhedron {
    HPolyhedron::new(dim, cs).unwrap()
}

fn v(pts: &[&[i64]]) -> VPolytope {
    let dim = pts.first().map_or(0, |p| p.len());
    VPolytope::new(dim, pts.iter().map(|p| point(p)).collect()).unwrap()
}

fn unit_square() -> HPolyhedron {
    HPolyhedron::from_box(&point(&[0, 0]), &point(&[1, 1]))
}

/// Independent 2-D hull test: p is in the hull iff it lies in a triangle
/// (or segment, or point) spanned by some of the generators.
fn caratheodory_contains(pts: &[Point], p: &[Rational]) -> bool {
    let cross = |o: &Point, a: &[Rational], b: &[Rational]| (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0]);
    let on_segment = |a: &Point, b: &Point| {
        cross(a, b, p).is_zero()
            && (a[0].clone().min(b[0].clone())..=a[0].clone().max(b[0].clone())).contains(&p[0])
            && (a[1].clone().min(b[1].clone())..=a[1].clone().max(b[1].clone())).contains(&p[1])
    };
    let n = pts.len();
    for i in 0..n {
        if pts[i].as_slice() == p {
            return true;
        }
        for j in i + 1..n {
            if on_segment(&pts[i], &pts[j]) {
                return true;
            }
            for k in j + 1..n {
                let (d1, d2, d3) = (
                    cross(&pts[i], &pts[j], p),
                    cross(&pts[j], &pts[k], p),
                    cross(&pts[k], &pts[i], p),
                );
                let area = cross(&pts[i], &pts[j], &pts[k]);
                if area.is_zero() {
                    continue;
                }
                let neg = d1 < Rational::zero() || d2 < Rational::zero() || d3 < Rational::zero();
                let pos = d1 > Rational::zero() || d2 > Rational::zero() || d3 > Rational::zero();
                if !(neg && pos) {
                    return true;
                }
            }
        }
    }
    false
}

#[test]
fn point_membership_in_constraint_form() {
    let half_line = h(1, vec![ge(&[1], 0)]);
    assert!(half_line.contains(&point(&[0])).unwrap());
    assert!(!half_line.contains(&[frac(-1, 2)]).unwrap());
    assert!(unit_square().contains(&[frac(1, 3), frac(2, 3)]).unwrap());
    assert!(matches!(
        unit_square().contains(&point(&[0])),
        Err(Error::DimensionMismatch { expected: 2, found: 1 })
    ));
}

#[test]
fn hull_membership_examples() {
    assert!(v(&[&[3, 4]]).contains(&point(&[3, 4])).unwrap());
    assert!(v(&[&[0, 0], &[2, 2]]).contains(&point(&[1, 1])).unwrap());
    let run = v(&[&[0, 0], &[1, 1], &[2, 3], &[3, 6]]);
    let p = vec![int(2), frac(5, 2)];
    assert!(!caratheodory_contains(run.points(), &p));
    assert!(!run.contains(&p).unwrap());
    assert!(!VPolytope::empty(2).contains(&point(&[0, 0])).unwrap());
}

#[test]
fn vertex_examples() {
    assert!(v(&[&[0, 0], &[1, 1], &[2, 3]]).is_vertex(1));
    assert!(!v(&[&[0, 0], &[2, 2], &[1, 1]]).is_vertex(2));
    assert!(v(&[&[5, 5]]).is_vertex(0));
    assert!(!v(&[&[1, 1], &[1, 1]]).is_vertex(0));
}

#[test]
fn entailment_examples() {
    let seg = h(1, vec![ge(&[1], 0), le(&[1], 1)]);
    assert!(seg.entails(&le(&[1], 2)).unwrap());
    assert!(!seg.entails(&Constraint::le(point(&[1]), frac(1, 2))).unwrap());
    // max of x + y over the square's four vertices is 2.
    let corners = [[0, 0], [0, 1], [1, 0], [1, 1]];
    assert_eq!(corners.iter().map(|c| c[0] + c[1]).max(), Some(2));
    assert!(unit_square().entails(&le(&[1, 1], 2)).unwrap());
    assert!(!unit_square().entails(&le(&[1, 1], 1)).unwrap());
    assert!(seg.entails(&Constraint::eq(point(&[0]), int(0))).unwrap());
    assert!(!seg.entails(&Constraint::eq(point(&[1]), int(0))).unwrap());
}

#[test]
fn violation_is_a_witness() {
    let c = le(&[1, 1], 1);
    let w = unit_square().violation(&c).unwrap().unwrap();
    assert!(unit_square().contains(&w).unwrap());
    assert!(!c.holds(&w));
}

#[test]
fn emptiness_examples() {
    assert!(h(1, vec![le(&[1], 0), ge(&[1], 1)]).is_empty());
    assert!(!HPolyhedron::universe(1).is_empty());
    assert!(h(2, vec![le(&[1, 1], 1), ge(&[1, 0], 1), ge(&[0, 1], 1)]).is_empty());
    assert!(HPolyhedron::empty(0).is_empty());
    assert!(!HPolyhedron::universe(0).is_empty());
}

#[test]
fn strict_constraints_are_rejected() {
    let strict = Constraint {
        coeffs: point(&[1]),
        rel: Rel::Lt,
        rhs: int(0),
    };
    assert_eq!(HPolyhedron::new(1, vec![strict]), Err(Error::StrictConstraint));
}

#[test]
fn elimination_examples() {
    // {0 ≤ x, x ≤ y} over (x, y), eliminate x → {0 ≤ y}
    let p = h(2, vec![ge(&[1, 0], 0), le(&[1, -1], 0)]);
    let q = p.eliminate(VarId(0)).unwrap();
    assert!(q.same_set(&h(1, vec![ge(&[1], 0)])).unwrap());

    // {x = 3, y ≤ x} eliminate x → {y ≤ 3}
    let p = h(2, vec![Constraint::eq(point(&[1, 0]), int(3)), le(&[-1, 1], 0)]);
    let q = p.eliminate(VarId(0)).unwrap();
    assert_eq!(q.constraints(), &[le(&[1], 3)]);

    let q = unit_square().eliminate(VarId(1)).unwrap();
    assert!(q.same_set(&h(1, vec![ge(&[1], 0), le(&[1], 1)])).unwrap());

    let empty = h(2, vec![le(&[1, 0], 0), ge(&[1, 0], 1)]);
    assert!(empty.eliminate(VarId(0)).unwrap().is_empty());
    assert!(matches!(unit_square().eliminate(VarId(2)), Err(Error::VarOutOfRange { .. })));
}

#[test]
fn affine_image_examples() {
    let x = VarId(0);
    let seg = h(1, vec![ge(&[1], 0), le(&[1], 1)]);
    let shift = AffineUpdate::identity().with(x, LinExpr::new([(x, int(1))], int(1)));
    let img = seg.affine_image(&shift).unwrap();
    assert!(img.same_set(&h(1, vec![ge(&[1], 1), le(&[1], 2)])).unwrap());

    let zero = AffineUpdate::identity().with(x, LinExpr::constant(int(0)));
    let img = seg.affine_image(&zero).unwrap();
    assert!(img.same_set(&h(1, vec![Constraint::eq(point(&[1]), int(0))])).unwrap());

    // Vertices (0,0),(1,0),(0,1),(1,1) map to (0,0),(1,0),(1,1),(2,1).
    let shear = AffineUpdate::identity().with(x, LinExpr::new([(x, int(1)), (VarId(1), int(1))], int(0)));
    let img = unit_square().affine_image(&shear).unwrap();
    let expected = h(2, vec![ge(&[0, 1], 0), le(&[0, 1], 1), ge(&[1, -1], 0), le(&[1, -1], 1)]);
    assert!(img.same_set(&expected).unwrap());
    let mapped = v(&[&[0, 0], &[1, 0], &[1, 1], &[2, 1]]).to_hrep();
    assert!(img.same_set(&mapped).unwrap());
}

#[test]
fn generator_image_examples() {
    let x = VarId(0);
    let shift = AffineUpdate::identity().with(x, LinExpr::new([(x, int(1))], int(1)));
    let img = v(&[&[0, 0], &[1, 1]]).affine_image(&shift).unwrap();
    assert_eq!(img.points(), &[point(&[1, 0]), point(&[2, 1])]);
    assert!(VPolytope::empty(2).affine_image(&shift).unwrap().is_empty());
}

#[test]
fn substitution_examples() {
    let y = VarId(1);
    let p = h(2, vec![le(&[1, 1], 2)]);
    let q = p.substitute(&BTreeMap::from([(y, int(1))])).unwrap();
    assert_eq!(q.constraints(), &[le(&[1], 1)]);

    let p = h(2, vec![Constraint::eq(point(&[0, 1]), int(0)), le(&[1, 0], 5)]);
    let q = p.substitute(&BTreeMap::from([(y, int(1))])).unwrap();
    assert_eq!(q.dim(), 1);
    assert!(q.is_empty());
}

#[test]
fn conversion_examples() {
    let tri = v(&[&[0, 0], &[1, 0], &[0, 1]]).to_hrep();
    let mut got: Vec<Constraint> = tri.constraints().to_vec();
    got.sort();
    let mut want = vec![le(&[-1, 0], 0), le(&[0, -1], 0), le(&[1, 1], 1)];
    want.sort();
    assert_eq!(got, want);

    assert_eq!(h(1, vec![ge(&[1], 0)]).to_vrep(), Err(Error::UnboundedPolyhedron));

    let sq = unit_square().to_vrep().unwrap();
    assert_eq!(sq.points(), &[point(&[0, 0]), point(&[0, 1]), point(&[1, 0]), point(&[1, 1])]);

    // Lower-dimensional and degenerate inputs.
    let seg = v(&[&[0, 0, 0], &[2, 2, 2], &[1, 1, 1]]).to_hrep();
    assert!(seg.contains(&point(&[1, 1, 1])).unwrap());
    assert!(!seg.contains(&point(&[1, 1, 0])).unwrap());
    assert_eq!(seg.to_vrep().unwrap().points(), &[point(&[0, 0, 0]), point(&[2, 2, 2])]);
    assert_eq!(VPolytope::empty(3).to_hrep(), HPolyhedron::empty(3));
    assert!(HPolyhedron::empty(2).to_vrep().unwrap().is_empty());
    assert_eq!(HPolyhedron::universe(0).to_vrep().unwrap().points(), &[Vec::<Rational>::new()]);
}

#[test]
fn redundancy_removal_keeps_the_set() {
    let p = h(2, vec![le(&[1, 0], 1), le(&[1, 0], 2), le(&[0, 1], 1), ge(&[1, 0], 0), ge(&[0, 1], 0), le(&[1, 1], 5)]);
    let q = p.remove_redundant();
    assert_eq!(q.constraints().len(), 4);
    assert!(q.same_set(&p).unwrap());
}

#[test]
fn vertices_drop_interior_generators() {
    let p = v(&[&[0, 0], &[2, 0], &[1, 1], &[0, 2], &[1, 0]]);
    assert_eq!(p.vertices().points(), &[point(&[0, 0]), point(&[0, 2]), point(&[2, 0])]);
}

fn small_points(dim: usize, max: usize) -> impl Strategy<Value = Vec<Point>> {
    proptest::collection::vec(proptest::collection::vec(-4i64..=4, dim), 1..=max)
        .prop_map(|pts| pts.into_iter().map(|p| point(&p)).collect())
}

/// A bounded H-polytope: a box cut by extra half-spaces.
fn small_hpoly(dim: usize) -> impl Strategy<Value = HPolyhedron> {
    (
        proptest::collection::vec(1i64..=4, dim),
        proptest::collection::vec((proptest::collection::vec(-3i64..=3, dim), -2i64..=6), 0..4),
    )
        .prop_map(move |(half, cuts)| {
            let lo: Point = half.iter().map(|&b| int(-b)).collect();
            let hi: Point = half.iter().map(|&b| int(b)).collect();
            let mut p = HPolyhedron::from_box(&lo, &hi);
            for (a, b) in cuts {
                p = p.with_constraint(le(&a, b)).unwrap();
            }
            p
        })
}

fn sample_points(dim: usize) -> impl Strategy<Value = Vec<Point>> {
    proptest::collection::vec(proptest::collection::vec((-10i64..=10, 1i64..=3), dim), 8)
        .prop_map(|pts| pts.into_iter().map(|p| p.into_iter().map(|(n, d)| frac(n, d)).collect()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn representations_agree_on_membership(pts in small_points(2, 6), probes in sample_points(2)) {
        let poly = VPolytope::new(2, pts.clone()).unwrap();
        let hrep = poly.to_hrep();
        for p in &probes {
            let by_hull = poly.contains(p).unwrap();
            prop_assert_eq!(by_hull, hrep.contains(p).unwrap());
            prop_assert_eq!(by_hull, caratheodory_contains(&pts, p));
        }
    }

    #[test]
    fn representations_agree_in_three_dimensions(pts in small_points(3, 7), probes in sample_points(3)) {
        let poly = VPolytope::new(3, pts).unwrap();
        let hrep = poly.to_hrep();
        for p in &probes {
            prop_assert_eq!(poly.contains(p).unwrap(), hrep.contains(p).unwrap());
        }
        let back = hrep.to_vrep().unwrap();
        prop_assert!(back.same_set(&poly).unwrap());
    }

    #[test]
    fn elimination_matches_dropped_vertices(p in small_hpoly(3), var in 0usize..3) {
        let verts = p.to_vrep().unwrap();
        let dropped: Vec<Point> = verts.points().iter().map(|q| {
            q.iter().enumerate().filter(|(i, _)| *i != var).map(|(_, x)| x.clone()).collect()
        }).collect();
        let shadow = VPolytope::new(2, dropped).unwrap();
        let fm = p.eliminate(VarId(var)).unwrap().to_vrep().unwrap();
        prop_assert!(fm.same_set(&shadow).unwrap());
    }

    #[test]
    fn affine_images_agree(p in small_hpoly(2), m in proptest::collection::vec(-2i64..=2, 4), c in proptest::collection::vec(-3i64..=3, 2)) {
        let u = AffineUpdate::new((0..2).map(|i| {
            (VarId(i), LinExpr::new((0..2).map(|j| (VarId(j), int(m[2 * i + j]))), int(c[i])))
        }));
        let via_h = p.affine_image(&u).unwrap();
        let via_v = p.to_vrep().unwrap().affine_image(&u).unwrap().to_hrep();
        prop_assert!(via_h.same_set(&via_v).unwrap());
    }

    #[test]
    fn emptiness_matches_vertex_enumeration(p in small_hpoly(3)) {
        prop_assert_eq!(p.is_empty(), p.to_vrep().unwrap().is_empty());
    }

    #[test]
    fn hull_membership_is_convex(pts in small_points(3, 5), i in 0usize..5, j in 0usize..5, w in 0i64..=12) {
        let poly = VPolytope::new(3, pts.clone()).unwrap();
        let (a, b) = (&pts[i % pts.len()], &pts[j % pts.len()]);
        let lam = frac(w, 12);
        let one = Rational::one();
        let mix: Point = a.iter().zip(b).map(|(x, y)| &lam * x + (&one - &lam) * y).collect();
        prop_assert!(poly.contains(&mix).unwrap());
    }
}
