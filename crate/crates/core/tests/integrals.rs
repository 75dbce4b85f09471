mod common;

use centroaffine::integrals::{
    closed_relations_defect, conjugacy_invariant, dressing_rhs, dressing_state, flow, flow_observed, g_vars,
    integral_count, integrals_f, lax_trace_poly, sparse_subsets, xi_field,
};
use centroaffine::lax::lax_matrix;
use centroaffine::polygon::{closure_defect, monodromy, sv_coords};
use centroaffine::random::{random_positive_closed, random_star_pentagon, rng};
use centroaffine::smallgons::pentagon_k_sv;
use centroaffine::{Error, PolygonData, Rational, SVCoords, Scalar};
use common::*;
use num_traits::Zero;
use proptest::prelude::*;

fn triangle_sv() -> SVCoords<Rational> {
    SVCoords::new(vec![qi(1); 3], vec![qi(-1); 3]).unwrap()
}

fn odd_sv() -> impl Strategy<Value = SVCoords<Rational>> {
    prop_oneof![Just(3usize), Just(5), Just(7)].prop_flat_map(|n| {
        (proptest::collection::vec(nonzero_rat(7, 3), n), proptest::collection::vec(nonzero_rat(7, 3), n))
            .prop_map(|(s, v)| SVCoords::new(s, v).unwrap())
    })
}

fn any_sv(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = SVCoords<Rational>> {
    n.prop_flat_map(|n| {
        (proptest::collection::vec(nonzero_rat(7, 3), n), proptest::collection::vec(nonzero_rat(7, 3), n))
            .prop_map(|(s, v)| SVCoords::new(s, v).unwrap())
    })
}

fn shifted(sv: &SVCoords<Rational>, dir: &[Rational], h: i64) -> SVCoords<Rational> {
    SVCoords { s: sv.s.clone(), v: sv.v.iter().zip(dir).map(|(v, d)| v.clone() + qi(h) * d.clone()).collect() }
}

#[test]
fn sparse_subset_counts() {
    assert_eq!(sparse_subsets(3), vec![vec![], vec![0], vec![1], vec![2]]);
    assert_eq!(sparse_subsets(4).len(), 7);
    assert!(sparse_subsets(4).contains(&vec![0, 2]) && sparse_subsets(4).contains(&vec![1, 3]));
    assert_eq!(sparse_subsets(5).len(), 11);
    for n in 3..=10 {
        assert_eq!(sparse_subsets(n).len(), sparse_masks(n).len());
    }
}

#[test]
fn canonical_triangle_integrals() {
    let f = integrals_f(&triangle_sv());
    assert_eq!(f.f, vec![qi(2), qi(-3)]);
    let t = lax_trace_poly(&triangle_sv());
    assert_eq!(t.coeffs(), &[qi(0), qi(-3), qi(0), qi(2)]);
    assert_eq!(closed_relations_defect(&triangle_sv()), (qi(0), qi(0)));
}

#[test]
fn top_integrals_by_parity() {
    let sv = SVCoords::new(vec![qi(2), q(1, 3), qi(-1), q(5, 2), qi(3)], vec![qi(1), qi(-2), q(1, 2), qi(4), q(-3, 7)]).unwrap();
    let g = g_vars(&sv);
    let f = integrals_f(&sv);
    assert_eq!(f.f[integral_count(5) - 1], g.iter().fold(qi(0), |a, x| a + x.clone()));
    assert_eq!(pentagon_k_sv(&sv), f.f[2]);

    let sv = SVCoords::new(vec![qi(2), q(1, 3), qi(-1), q(5, 2)], vec![qi(1), qi(-2), q(1, 2), qi(4)]).unwrap();
    let g = g_vars(&sv);
    // Singletons leave two adjacent g's; the two alternating pairs contribute -1/s^2 each.
    let pairs = (0..4).fold(qi(0), |a, i| a + g[i].clone() * g[(i + 1) % 4].clone());
    let inv_sq = sv.s.iter().fold(qi(0), |a, s| a + qi(1) / (s.clone() * s.clone()));
    let f = integrals_f(&sv);
    assert_eq!(f.f[integral_count(4) - 1], pairs - inv_sq);
}

#[test]
fn spectral_singularities() {
    let sv = SVCoords::new(vec![qi(2), qi(3), qi(5)], vec![qi(1), qi(1), qi(1)]).unwrap();
    assert_eq!(conjugacy_invariant(&sv, &qi(2)), Err(Error::SingularSpectral));
    assert!(matches!(xi_field(&SVCoords::new(vec![qi(1); 4], vec![qi(1); 4]).unwrap()), Err(Error::EvenArity { n: 4 })));
}

#[test]
fn symmetric_triangle_is_an_equilibrium() {
    assert!(xi_field(&triangle_sv()).unwrap().iter().all(Zero::is_zero));
    let st = dressing_state(&triangle_sv()).unwrap();
    assert!(st.beta.iter().all(|b| *b == qi(-1)));
    assert!(dressing_rhs(&st).unwrap().iter().all(Zero::is_zero));
    let f = triangle_sv().to_f64();
    assert_eq!(flow(&f, 0.0, 1e-3).unwrap(), f);
    assert!(flow(&f, 10.0, 1e-2).unwrap().approx_eq(&f, 1e-14));
}

#[test]
fn closed_relations_on_positive_polygons() {
    let mut r = rng(17);
    for k in 0..100 {
        let p: PolygonData<f64> = random_positive_closed(&mut r, 3 + k % 4).unwrap();
        let sv = sv_coords(&p).unwrap();
        let f = integrals_f(&sv);
        let (r0, r1) = closed_relations_defect(&sv);
        assert!(r0.abs() < 1e-8 * f.f[0].abs().max(1.0));
        assert!(r1.abs() < 1e-8 * f.f[1].abs().max(1.0));
    }
}

#[test]
fn pentagon_flow_drift() {
    let mut r = rng(29);
    for _ in 0..4 {
        let p = random_star_pentagon(&mut r, 0.25).unwrap();
        let sv = sv_coords(&p).unwrap();
        let (f0, k0) = (integrals_f(&sv), pentagon_k_sv(&sv));
        let mut worst = 0.0f64;
        flow_observed(&sv, 5.0, 1e-3, |_, st| {
            worst = worst.max(integrals_f(st).max_rel_diff(&f0));
            worst = worst.max((pentagon_k_sv(st) - k0).abs() / k0.abs().max(1e-300));
        })
        .unwrap();
        assert!(worst < 1e-7, "drift {worst}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_polynomial_by_interpolation(sv in any_sv(3..=7)) {
        // Evaluate the Lax trace at n + 1 nodes away from the poles and interpolate.
        let n = sv.n();
        let nodes: Vec<Rational> = (0..=n as i64).map(|k| q(2 * k + 1, 7) + qi(11)).collect();
        let traces: Vec<Rational> = nodes.iter().map(|l| lax_matrix(&sv, l).m.trace()).collect();
        let coeffs = interpolate(&nodes, &traces);
        let sign = if n % 2 == 0 { qi(1) } else { qi(-1) };
        let f = integrals_f(&sv);
        for (deg, c) in coeffs.iter().enumerate() {
            let want = if (n - deg) % 2 == 1 { qi(0) } else {
                let k = (n - deg) / 2;
                if k < f.len() { f.f[k].clone() } else { qi(2) }
            };
            prop_assert_eq!(sign.clone() * c.clone(), want.clone());
            prop_assert_eq!(lax_trace_poly(&sv).coeff(deg), want);
        }
    }

    #[test]
    fn monodromy_trace_is_scaled_f0(p in twisted_polygon(3..=7)) {
        let sv = sv_coords(&p).unwrap();
        let prod = sv.s.iter().fold(qi(1), |a, s| a * s.clone());
        prop_assert_eq!(monodromy(&sv).trace(), prod * integrals_f(&sv).f[0].clone());
    }

    #[test]
    fn conjugacy_invariant_matches_trace_polynomial(sv in any_sv(3..=6), lam in nonzero_rat(9, 4)) {
        let den = sv.s.iter().fold(qi(1), |a, s| a * (lam.clone() * lam.clone() / (s.clone() * s.clone()) - qi(1)));
        prop_assume!(!den.is_zero());
        let t = horner(lax_trace_poly(&sv).coeffs(), &lam);
        prop_assert_eq!(conjugacy_invariant(&sv, &lam).unwrap(), t.clone() * t / den);
    }

    #[test]
    fn closed_relations_are_exact(p in closed_polygon(3..=6)) {
        let (r0, r1) = closed_relations_defect(&sv_coords(&p).unwrap());
        prop_assert!(r0.is_zero() && r1.is_zero());
    }

    #[test]
    fn xi_conserves_every_integral(sv in odd_sv()) {
        let xi = xi_field(&sv).unwrap();
        let n = sv.n() as i64;
        for k in 0..integral_count(sv.n()) {
            // F_k has degree at most n - 2k in v.
            let m = (n - 2 * k as i64 + 1) / 2;
            let d = exact_derivative(|h| integrals_f(&shifted(&sv, &xi, h)).f[k].clone(), m);
            prop_assert!(d.is_zero(), "dF_{k} = {d}");
        }
    }

    #[test]
    fn xi_preserves_closure(p in prop_oneof![closed_polygon(5..=5), closed_polygon(7..=7)]) {
        let sv = sv_coords(&p).unwrap();
        let xi = xi_field(&sv).unwrap();
        // Each defect is a continuant of size n - 1, so of degree n - 1 in v.
        let m = sv.n() as i64 / 2;
        for i in 0..sv.n() {
            let d = exact_derivative(|h| closure_defect(&shifted(&sv, &xi, h))[i].clone(), m);
            prop_assert!(d.is_zero());
        }
    }

    #[test]
    fn dressing_chain_is_the_pushforward(sv in odd_sv()) {
        // g_i = v_i/(s_{i-1} s_i) is linear in v, so its velocity is xi_i/(s_{i-1} s_i).
        let xi = xi_field(&sv).unwrap();
        let rhs = dressing_rhs(&dressing_state(&sv).unwrap()).unwrap();
        for i in 0..sv.n() {
            let push = xi[i].clone() / (sv.s_at(i as i64 - 1) * sv.s_at(i as i64));
            prop_assert_eq!(push, -rhs[i].clone());
        }
    }
}

#[test]
fn float_and_rational_integrals_agree() {
    let sv = SVCoords::new(vec![q(3, 2), qi(2), q(-1, 3), qi(1), q(5, 4)], vec![qi(1), q(1, 2), qi(-3), q(2, 3), qi(2)]).unwrap();
    let exact = integrals_f(&sv);
    let float = integrals_f(&sv.to_f64());
    for (a, b) in exact.f.iter().zip(&float.f) {
        assert!((a.to_f64() - b).abs() < 1e-12 * b.abs().max(1.0));
    }
}
