mod common;

use centroaffine::lax::{iterate_moduli, solve_c_related, CSolution};
use centroaffine::polygon::{canonical_frame, closure_defect, reconstruct, sv_coords};
use centroaffine::random::{random_positive_closed, rng, uniform};
use centroaffine::smallgons::{
    cond4, level_curve_samples, pentagon_chart, pentagon_discriminant, pentagon_flow_check, pentagon_k,
    pentagon_k_grad, pentagon_k_sv, pentagon_point_with_k, pentagon_polygon, pentagon_solver_exists,
    quad_conic_product, quad_conics, quad_partner_quadratic, triangle_analysis, triangle_from_sides,
    triangle_identity_check, tune_c_for_period, ConicKind, Motion, PentagonChart,
};
use centroaffine::{Error, PolygonData, Rational, Scalar};
use common::*;
use num_traits::Zero;
use proptest::prelude::*;

fn partners(p: &PolygonData<f64>, c: f64) -> Vec<PolygonData<f64>> {
    match solve_c_related(p, &c) {
        Ok(CSolution::Pairs(pairs)) => pairs.into_iter().map(|pr| pr.q).collect(),
        _ => Vec::new(),
    }
}

#[test]
fn triangle_cases() {
    let one = [qi(1), qi(1), qi(1)];
    let rep = triangle_analysis(&one, &qi(1));
    assert!(rep.exists && rep.motion == Motion::Elliptic && rep.solver_exists == Some(true));
    let rep = triangle_analysis(&one, &qi(2));
    assert!(!rep.exists && rep.solver_exists == Some(false));
    // 3 = 1 + 2 makes the product vanish.
    assert_eq!(triangle_analysis(&[qi(3), qi(1), qi(2)], &qi(1)).motion, Motion::Parabolic);
    assert_eq!(triangle_analysis(&[qi(5), qi(1), qi(1)], &qi(1)).motion, Motion::Hyperbolic);
}

#[test]
fn triangle_existence_matches_solver() {
    let mut r = rng(3);
    let mut compared = 0;
    for _ in 0..200 {
        let s = [uniform(&mut r, 0.3, 3.0), uniform(&mut r, 0.3, 3.0), uniform(&mut r, 0.3, 3.0)];
        let c = uniform(&mut r, 0.05, 4.0);
        let rep = triangle_analysis(&s, &c);
        if (rep.discriminant_lhs - rep.discriminant_rhs).abs() < 1e-6 * rep.discriminant_rhs {
            continue;
        }
        let tri = triangle_from_sides(&s).unwrap();
        let (bs, _) = brackets(&tri);
        assert!(bs.iter().zip(&s).all(|(a, b)| (a - b).abs() < 1e-12));
        assert_eq!(Some(rep.exists), rep.solver_exists, "s = {s:?}, c = {c}");
        compared += 1;
    }
    assert!(compared > 150);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triangle_identity_is_exact(p in closed_polygon(3..=3), c in nonzero_rat(7, 3)) {
        let tri = [p.vertices[0].clone(), p.vertices[1].clone(), p.vertices[2].clone()];
        let Ok(id) = triangle_identity_check(&tri, &c) else { return Ok(()) };
        prop_assert!(id.residual.is_zero());
        // [P, M P] = n x^2 - (m - l) xy - k y^2 at every vertex.
        for q in &tri {
            let lhs = id.n.clone() * q.x.clone() * q.x.clone() - id.d.clone() * q.x.clone() * q.y.clone() - id.k.clone() * q.y.clone() * q.y.clone();
            prop_assert_eq!(lhs, c.clone());
        }
    }

    #[test]
    fn chart_pentagons_are_closed(x in nonzero_rat(9, 4), y in nonzero_rat(9, 4), s in proptest::collection::vec(nonzero_rat(5, 3), 5)) {
        let s: [Rational; 5] = [s[0].clone(), s[1].clone(), s[2].clone(), s[3].clone(), s[4].clone()];
        let Ok(ch) = PentagonChart::new(x.clone(), y.clone(), s) else { return Ok(()) };
        let Ok(sv) = pentagon_chart(&ch) else { return Ok(()) };
        prop_assert_eq!((&sv.v[1], &sv.v[4]), (&x, &y));
        prop_assert!(closure_defect(&sv).iter().all(Zero::is_zero));
        prop_assert_eq!(pentagon_k(&ch), pentagon_k_sv(&sv));
        let p = pentagon_polygon(&ch).unwrap();
        prop_assert!(p.closed);
        prop_assert_eq!(PentagonChart::from_sv(&sv).unwrap(), ch.clone());
        let rep = pentagon_flow_check(&ch).unwrap();
        prop_assert!(rep.tangency.is_zero() && rep.hamiltonian.is_zero() && rep.field.is_zero());
    }
}

#[test]
fn k_gradient_against_richardson() {
    let mut r = rng(21);
    for _ in 0..100 {
        let s = [0, 1, 2, 3, 4].map(|_| uniform(&mut r, 0.5, 2.0));
        let Ok(ch) = PentagonChart::new(uniform(&mut r, 0.5, 3.0), uniform(&mut r, 0.5, 3.0), s) else { continue };
        let k = |dx: f64, dy: f64| pentagon_k(&PentagonChart { x: ch.x + dx, y: ch.y + dy, s });
        let d = |h: f64, ex: f64, ey: f64| (k(h * ex, h * ey) - k(-h * ex, -h * ey)) / (2.0 * h);
        let rich = |ex, ey| (4.0 * d(1e-4, ex, ey) - d(2e-4, ex, ey)) / 3.0;
        let (kx, ky) = pentagon_k_grad(&ch);
        assert!((kx - rich(1.0, 0.0)).abs() < 1e-7 * kx.abs().max(1.0));
        assert!((ky - rich(0.0, 1.0)).abs() < 1e-7 * ky.abs().max(1.0));
    }
}

#[test]
fn regular_pentagon() {
    let x = 2.0 * 72f64.to_radians().cos();
    assert!((x - 0.618034).abs() < 1e-6);
    let ch = PentagonChart::new(x, x, [1.0; 5]).unwrap();
    assert!((pentagon_k(&ch) - 3.09017).abs() < 1e-5);
    assert_eq!(PentagonChart::new(1.0, 0.0, [1.0; 5]), Err(Error::ChartSingular));
    assert_eq!(PentagonChart::new(1.0, 1.0, [1.0, 0.0, 1.0, 1.0, 1.0]), Err(Error::ChartSingular));
}

#[test]
fn discriminant_roots_at_sqrt_two() {
    let d = pentagon_discriminant(&[1.0; 5], 2f64.sqrt());
    assert!((d.dd - 1.0).abs() < 1e-12);
    let (lo, hi) = d.k_roots.unwrap();
    assert!((lo - (2.0 - 2f64.sqrt())).abs() < 1e-12);
    assert!((hi - (2.0 + 2f64.sqrt())).abs() < 1e-12);
    assert!(!d.predicts_partner(2.0) && d.predicts_partner(4.0));
    // Below every side the product is negative and every level has partners.
    assert!(pentagon_discriminant(&[1.0; 5], 0.5).k_roots.is_none());
}

#[test]
fn small_c_always_has_partners() {
    let mut r = rng(34);
    let mut found = 0;
    while found < 50 {
        let k = uniform(&mut r, -12.0, 12.0);
        let Some(ch) = pentagon_point_with_k(&[1.0; 5], k) else { continue };
        let c = uniform(&mut r, 0.05, 0.95);
        assert!(pentagon_discriminant(&[1.0; 5], c).predicts_partner(k));
        assert!(pentagon_solver_exists(&ch, c).unwrap(), "K = {k}, c = {c}");
        found += 1;
    }
}

#[test]
fn gap_band_prediction_matches_solver() {
    let s = [1.0, 3.0, 5.0, 7.0, 9.0];
    let mut r = rng(55);
    let (mut inside, mut outside) = (0, 0);
    // DD > 0 on (1,3), (5,7) and beyond 9.
    let bands = [(1.2, 2.8), (5.2, 6.8), (9.5, 11.5)];
    for trial in 0..400 {
        let (a, b) = bands[trial % 3];
        let c = uniform(&mut r, a, b);
        let (lo, hi) = pentagon_discriminant(&s, c).k_roots.unwrap();
        let w = hi - lo;
        let k = uniform(&mut r, lo - w, hi + w);
        if (k - lo).abs() < 1e-3 * w || (k - hi).abs() < 1e-3 * w {
            continue;
        }
        let Some(ch) = pentagon_point_with_k(&s, k) else { continue };
        let predicted = !(k > lo && k < hi);
        assert_eq!(pentagon_solver_exists(&ch, c).unwrap(), predicted, "c = {c}, K = {k}");
        if predicted { outside += 1 } else { inside += 1 }
    }
    assert!(inside > 20 && outside > 20, "{inside} inside, {outside} outside");
}

#[test]
fn quad_quadratic_and_inequality() {
    let mut r = rng(77);
    let mut compared = 0;
    for _ in 0..300 {
        let raw: PolygonData<f64> = random_positive_closed(&mut r, 4).unwrap();
        let sv = sv_coords(&raw).unwrap();
        let p = reconstruct(&sv, canonical_frame(&sv)).unwrap();
        let c = uniform(&mut r, 0.05, 2.5);
        let Ok(qq) = quad_partner_quadratic(&p, &c) else { continue };
        let s = [sv.s[0], sv.s[1], sv.s[2], sv.s[3]];
        let (lhs, rhs) = cond4(&s, &c);
        let scale = lhs.abs().max(rhs.abs());
        if (lhs - rhs).abs() < 1e-6 * scale || qq.disc.abs() < 1e-6 * (qq.u * qq.u).max(qq.v.abs()) {
            continue;
        }
        let found = partners(&p, c);
        assert_eq!(qq.disc > 0.0, lhs > rhs, "s = {s:?}, c = {c}");
        assert_eq!(!found.is_empty(), qq.disc > 0.0, "s = {s:?}, c = {c}");
        for q in &found {
            // Q_0 = (b, c) in this frame.
            let b = q.vertices[0].x;
            assert!((q.vertices[0].y - c).abs() < 1e-8);
            assert!((b * b + qq.u * b + qq.v).abs() < 1e-7 * (b * b).max(qq.v.abs()).max(1.0));
        }
        // The canonical frame can be badly scaled, so fit the conics on the original pair.
        let prod = quad_conic_product(&s);
        for q in &partners(&raw, c) {
            let conics = quad_conics(&raw, q).unwrap();
            assert!(conics.residual < 1e-8, "residual {}", conics.residual);
            assert!((4.0 * conics.discriminant - prod).abs() < 1e-8 * prod.abs().max(1.0));
            assert_eq!(conics.kind == ConicKind::Ellipse, prod < 0.0);
        }
        compared += 1;
    }
    assert!(compared > 200);
}

#[test]
fn cond4_symmetries() {
    let s = [q(3, 2), qi(2), q(5, 3), qi(1)];
    let c = q(7, 4);
    let rot = [s[1].clone(), s[2].clone(), s[3].clone(), s[0].clone()];
    let rev = [s[3].clone(), s[2].clone(), s[1].clone(), s[0].clone()];
    assert_eq!(cond4(&s, &c), cond4(&rot, &c));
    assert_eq!(cond4(&s, &c), cond4(&rev, &c));
    assert_eq!(cond4(&s, &c), cond4(&s, &-c.clone()));
}

#[test]
fn porism_on_one_level() {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let center = (-phi, -phi);
    let pts = level_curve_samples(&[1.0; 5], center, -9.5, 12);
    assert!(pts.len() >= 10);
    let first = pentagon_chart(&pts[0]).unwrap();
    let c = tune_c_for_period(&first, center, 4, 0.2, 0.7).unwrap();
    for ch in &pts {
        assert!((pentagon_k(ch) + 9.5).abs() < 1e-9);
        let sv = pentagon_chart(ch).unwrap();
        let orbit = iterate_moduli(&sv, &c, 4).unwrap();
        assert!(orbit[4].max_rel_diff(&sv) < 1e-6, "not 4-periodic at {ch:?}");
        assert!(orbit[1..4].iter().all(|o| o.max_rel_diff(&sv) > 1e-3));
    }
}

#[test]
fn rational_triangle_analysis_matches_float() {
    let s = [q(3, 2), qi(2), q(5, 4)];
    let c = q(2, 3);
    let exact = triangle_analysis(&s, &c);
    let float = triangle_analysis(&[1.5, 2.0, 1.25], &(2.0 / 3.0));
    assert_eq!(exact.exists, float.exists);
    assert!((exact.discriminant_lhs.to_f64() - float.discriminant_lhs).abs() < 1e-12);
}
