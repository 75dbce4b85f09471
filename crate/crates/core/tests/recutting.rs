mod common;

use centroaffine::integrals::integrals_f;
use centroaffine::polygon::sv_coords;
use centroaffine::random::{random_positive_closed, random_star_pentagon, rng, uniform};
use centroaffine::recut::{
    braid_check, elementary_recut, elementary_recut_differential, recut, recut_commutes_with_c, recut_sequence,
    RelationFamily,
};
use centroaffine::smallgons::pentagon_k_sv;
use centroaffine::symplectic::{center, ijk};
use centroaffine::{Error, Mat2, PolygonData, Rational, Vec2};
use common::*;
use proptest::prelude::*;

/// The vertex `X` with `[P_{j-1}, X] = s[j]` and `[X, P_{j+1}] = s[j-1]`, by Cramer's rule.
fn swapped_vertex(p: &PolygonData<Rational>, j: usize) -> Vec2<Rational> {
    let (a, b, c) = (vertex(p, j as i64 - 1), vertex(p, j as i64), vertex(p, j as i64 + 1));
    let (s_prev, s_next) = (det2(&a, &b), det2(&b, &c));
    // -a.y X.x + a.x X.y = s_next and c.y X.x - c.x X.y = s_prev.
    let det = a.y.clone() * c.x.clone() - a.x.clone() * c.y.clone();
    let x = (s_next.clone() * -c.x.clone() - a.x.clone() * s_prev.clone()) / det.clone();
    let y = (-a.y.clone() * s_prev - c.y.clone() * s_next) / det;
    Vec2::new(x, y)
}

fn poly(pts: &[(i64, i64)]) -> PolygonData<Rational> {
    PolygonData::closed(pts.iter().map(|&(x, y)| pt(x, y)).collect()).unwrap()
}

fn applied(p: &PolygonData<Rational>, word: &[usize]) -> Option<PolygonData<Rational>> {
    word.iter().try_fold(p.clone(), |acc, &j| elementary_recut(&acc, j).ok())
}

#[test]
fn hand_example() {
    let p = poly(&[(1, 0), (0, 1), (-2, -1)]);
    let q = elementary_recut(&p, 1).unwrap();
    assert_eq!(q.vertices, vec![pt(1, 0), pt(3, 2), pt(-2, -1)]);
    assert_eq!(sv_coords(&q).unwrap().s, vec![qi(2), qi(1), qi(1)]);
    assert_eq!(sv_coords(&p).unwrap().s, vec![qi(1), qi(2), qi(1)]);
}

#[test]
fn symmetric_triangle_is_fixed() {
    let tri = poly(&[(1, 0), (0, 1), (-1, -1)]);
    for j in 0..3 {
        assert_eq!(elementary_recut(&tri, j).unwrap(), tri);
    }
    assert_eq!(recut(&tri).unwrap(), tri);
}

#[test]
fn out_of_range_and_degenerate_indices() {
    let tri = poly(&[(1, 0), (0, 1), (-1, -1)]);
    assert!(matches!(elementary_recut(&tri, 3), Err(Error::InvalidInput(_))));
    let p = PolygonData { vertices: vec![pt(1, 0), pt(1, 1), pt(-1, 0), pt(0, -1)], closed: true, monodromy: Mat2::identity() };
    assert_eq!(elementary_recut(&p, 1), Err(Error::DegenerateDiagonal { index: 1 }));
    let report = braid_check(&p, 0.0);
    assert!(report.no_failures() && !report.all_pass());
}

#[test]
fn report_counts() {
    let p = poly(&[(3, 0), (2, 3), (-1, 2), (-3, -1), (1, -4), (4, -3)]);
    let r = braid_check(&p, 0.0);
    assert_eq!(r.count(RelationFamily::Involution), 6);
    assert_eq!(r.count(RelationFamily::Braid), 6);
    // Pairs at cyclic distance two or three: 6 + 3.
    assert_eq!(r.count(RelationFamily::Commute), 9);
    assert!(r.all_pass());
}

#[test]
fn commutes_with_c_relation() {
    let mut r = rng(5);
    let mut checked = 0;
    for trial in 0..60 {
        let p: PolygonData<f64> = if trial % 2 == 0 { random_star_pentagon(&mut r, 0.2).unwrap() } else { random_positive_closed(&mut r, 5 + trial % 3).unwrap() };
        let c = uniform(&mut r, 0.05, 0.6);
        let Ok(rep) = recut_commutes_with_c(&p, &c) else { continue };
        assert!(rep.max_residual() < 1e-8, "{rep:?}");
        checked += 1;
    }
    assert!(checked >= 20, "only {checked} pairs had partners");
}

#[test]
fn float_recut_conserves_integrals() {
    let mut r = rng(8);
    for _ in 0..50 {
        let p: PolygonData<f64> = random_positive_closed(&mut r, 5).unwrap();
        let q = recut(&p).unwrap();
        let (a, b) = (sv_coords(&p).unwrap(), sv_coords(&q).unwrap());
        assert!(integrals_f(&a).max_rel_diff(&integrals_f(&b)) < 1e-9);
        let (ka, kb) = (pentagon_k_sv(&a), pentagon_k_sv(&b));
        assert!((ka - kb).abs() < 1e-9 * ka.abs().max(1.0));
        let (ca, cb) = (center(&p), center(&q));
        assert!(ca.approx_eq(&cb, 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elementary_recut_swaps_the_side_brackets(p in twisted_polygon(3..=7), j in 0usize..7) {
        let j = j % p.n();
        let v = det2(&vertex(&p, j as i64 - 1), &vertex(&p, j as i64 + 1));
        prop_assume!(v != qi(0));
        let q = elementary_recut(&p, j).unwrap();
        prop_assert_eq!(&q.vertices[j], &swapped_vertex(&p, j));
        let (s, _) = brackets(&p);
        let (t, _) = brackets(&q);
        let n = p.n();
        for i in 0..n {
            let want = if i == (j + n - 1) % n { s[j].clone() } else if i == j { s[(j + n - 1) % n].clone() } else { s[i].clone() };
            prop_assert_eq!(&t[i], &want);
        }
        prop_assert_eq!(q.monodromy, p.monodromy);
    }

    #[test]
    fn involution_braid_and_far_commutation(p in twisted_polygon(3..=7), j in 0usize..7, k in 0usize..7) {
        let n = p.n();
        let (j, k) = (j % n, k % n);
        if let Some(q) = applied(&p, &[j, j]) {
            prop_assert_eq!(&q, &p);
        }
        let next = (j + 1) % n;
        if let Some(q) = applied(&p, &[j, next, j, next, j, next]) {
            prop_assert_eq!(&q, &p);
        }
        let d = j.abs_diff(k).min(n - j.abs_diff(k));
        if d >= 2 {
            if let (Some(a), Some(b)) = (applied(&p, &[j, k]), applied(&p, &[k, j])) {
                prop_assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn braid_report_has_no_failures(p in closed_polygon(3..=7)) {
        prop_assert!(braid_check(&p, 0.0).no_failures());
    }

    #[test]
    fn recut_conserves_integrals_and_center(p in closed_polygon(3..=7)) {
        let Some(q) = recut(&p).ok() else { return Ok(()) };
        let (a, b) = (sv_coords(&p), sv_coords(&q));
        prop_assume!(b.is_ok());
        let (a, b) = (a.unwrap(), b.unwrap());
        prop_assert_eq!(integrals_f(&a), integrals_f(&b));
        prop_assert_eq!(ijk(&p), ijk(&q));
        if p.n() == 5 {
            prop_assert_eq!(pentagon_k_sv(&a), pentagon_k_sv(&b));
        }
    }

    #[test]
    fn recut_conserves_twisted_integrals(p in twisted_polygon(3..=7)) {
        let Some(q) = recut(&p).ok() else { return Ok(()) };
        let Ok(b) = sv_coords(&q) else { return Ok(()) };
        prop_assert_eq!(integrals_f(&sv_coords(&p).unwrap()), integrals_f(&b));
    }

    #[test]
    fn differential_matches_exact_stencil(p in closed_polygon(4..=6), dir in proptest::collection::vec(point_strategy(), 6), j in 0usize..6) {
        // X v = s_prev a + s_next c is cubic in h, so exact stencils of both
        // sides give dX through the quotient rule.
        let n = p.n();
        let j = j % n;
        let u: Vec<Vec2<Rational>> = dir[..n].to_vec();
        let Ok((q, image)) = elementary_recut_differential(&p, j, &u) else { return Ok(()) };
        let at = |h: i64| PolygonData {
            vertices: p.vertices.iter().zip(&u).map(|(x, w)| x.clone() + w.scale(&qi(h))).collect(),
            closed: true,
            monodromy: Mat2::identity(),
        };
        let v_of = |h: i64| { let p = at(h); det2(&vertex(&p, j as i64 - 1), &vertex(&p, j as i64 + 1)) };
        let numer = |h: i64, coord: usize| {
            let p = at(h);
            let (a, b, c) = (vertex(&p, j as i64 - 1), vertex(&p, j as i64), vertex(&p, j as i64 + 1));
            let w = a.scale(&det2(&a, &b)) + c.scale(&det2(&b, &c));
            if coord == 0 { w.x } else { w.y }
        };
        let dv = exact_derivative(v_of, 2);
        let v0 = v_of(0);
        for coord in 0..2 {
            let dn = exact_derivative(|h| numer(h, coord), 2);
            let x0 = if coord == 0 { q.vertices[j].x.clone() } else { q.vertices[j].y.clone() };
            let want = (dn - x0 * dv.clone()) / v0.clone();
            let got = if coord == 0 { image[j].x.clone() } else { image[j].y.clone() };
            prop_assert_eq!(got, want);
        }
    }
}

#[test]
fn sequence_order_matters_for_neighbours() {
    let p = poly(&[(3, 0), (2, 3), (-1, 2), (-3, -1), (1, -4)]);
    let a = recut_sequence(&p, &[0, 1]).unwrap();
    let b = recut_sequence(&p, &[1, 0]).unwrap();
    assert_ne!(a, b);
    assert_eq!(recut_sequence(&p, &[0, 2]).unwrap(), recut_sequence(&p, &[2, 0]).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadrilateral_recut_has_period_three(p in closed_polygon(4..=4)) {
        let Ok(q3) = recut_sequence(&p, &[0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 2, 3]) else { return Ok(()) };
        prop_assert_eq!(sv_coords(&q3).unwrap(), sv_coords(&p).unwrap());
    }
}
